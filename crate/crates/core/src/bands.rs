//! Frequency bands and Fourier-bin selection.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A frequency band in Hz. Selection of Fourier frequencies is half-open,
/// `[lo, hi)`, so adjacent bands never share a bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyBand {
    pub lo: f64,
    pub hi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl FrequencyBand {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo < 0.0 || lo >= hi {
            return Err(Error::InvalidBand { lo, hi, reason: "need 0 <= lo < hi".into() });
        }
        Ok(Self { lo, hi, name: None })
    }

    pub fn named(name: &str, lo: f64, hi: f64) -> Self {
        Self { lo, hi, name: Some(name.to_string()) }
    }

    /// Checks the band against the Nyquist frequency of a series sampled at `fs`.
    pub fn validate_for(&self, fs: f64) -> Result<()> {
        if self.lo < 0.0 || self.lo >= self.hi || self.hi > fs / 2.0 + 1e-9 {
            return Err(Error::InvalidBand {
                lo: self.lo,
                hi: self.hi,
                reason: format!("must satisfy 0 <= lo < hi <= {}", fs / 2.0),
            });
        }
        Ok(())
    }

    pub fn contains(&self, hz: f64) -> bool {
        hz >= self.lo && hz < self.hi
    }

    /// Indices into `freqs` that fall inside the band. Errors when none do.
    pub fn select(&self, freqs: &[f64]) -> Result<Vec<usize>> {
        let idx: Vec<usize> = freqs
            .iter()
            .enumerate()
            .filter(|(_, &f)| self.contains(f))
            .map(|(i, _)| i)
            .collect();
        if idx.is_empty() {
            return Err(Error::EmptyBand { lo: self.lo, hi: self.hi });
        }
        Ok(idx)
    }

    pub fn label(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None => format!("{}-{}Hz", self.lo, self.hi),
        }
    }

    /// Parses either a standard band name (`alpha`) or `lo,hi` / `lo-hi` in Hz.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(b) = standard_bands().into_iter().find(|b| b.name.as_deref() == Some(s)) {
            return Ok(b);
        }
        let parts: Vec<&str> = s.split([',', ':']).collect();
        let parts = if parts.len() == 2 { parts } else { s.splitn(2, '-').collect() };
        if parts.len() == 2 {
            if let (Ok(lo), Ok(hi)) = (parts[0].trim().parse::<f64>(), parts[1].trim().parse::<f64>()) {
                return Self::new(lo, hi);
            }
        }
        Err(Error::Unknown { what: "band", name: s.to_string() })
    }
}

/// The five conventional EEG bands, in Hz.
pub fn standard_bands() -> Vec<FrequencyBand> {
    vec![
        FrequencyBand::named("delta", 0.0, 4.0),
        FrequencyBand::named("theta", 4.0, 8.0),
        FrequencyBand::named("alpha", 8.0, 12.0),
        FrequencyBand::named("beta", 12.0, 30.0),
        FrequencyBand::named("gamma", 30.0, 50.0),
    ]
}

pub fn standard_band(name: &str) -> Option<FrequencyBand> {
    standard_bands().into_iter().find(|b| b.name.as_deref() == Some(name))
}
