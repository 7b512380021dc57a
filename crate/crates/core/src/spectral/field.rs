use std::io::{Read, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bands::FrequencyBand;
use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    RawPeriodogram,
    SmoothedSpectrum,
    Coherence,
}

impl FieldKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FieldKind::RawPeriodogram => "raw-periodogram",
            FieldKind::SmoothedSpectrum => "smoothed-spectrum",
            FieldKind::Coherence => "coherence",
        }
    }

    fn code(self) -> u8 {
        match self {
            FieldKind::RawPeriodogram => 0,
            FieldKind::SmoothedSpectrum => 1,
            FieldKind::Coherence => 2,
        }
    }

    fn from_code(c: u8) -> Result<Self> {
        match c {
            0 => Ok(FieldKind::RawPeriodogram),
            1 => Ok(FieldKind::SmoothedSpectrum),
            2 => Ok(FieldKind::Coherence),
            _ => Err(Error::Container(format!("unknown field kind {c}"))),
        }
    }
}

/// Smoothing kernel that produced a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelInfo {
    pub family: super::KernelFamily,
    pub span: usize,
}

/// One N x N complex matrix per Fourier frequency (DC excluded). Coherence
/// fields carry real values with zero imaginary parts.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    pub(crate) freqs: Vec<f64>,
    pub(crate) mats: Vec<CMatrix>,
    pub(crate) kind: FieldKind,
    pub(crate) kernel: Option<KernelInfo>,
}

impl SpectralField {
    pub fn new(freqs: Vec<f64>, mats: Vec<CMatrix>, kind: FieldKind) -> Result<Self> {
        if freqs.len() != mats.len() {
            return Err(Error::SizeMismatch(format!("{} frequencies, {} matrices", freqs.len(), mats.len())));
        }
        if let Some(first) = mats.first() {
            let n = first.nrows();
            if mats.iter().any(|m| m.nrows() != n || m.ncols() != n) {
                return Err(Error::SizeMismatch("matrices must all be square of equal size".into()));
            }
        }
        Ok(Self { freqs, mats, kind, kernel: None })
    }

    pub fn freqs(&self) -> &[f64] {
        &self.freqs
    }

    pub fn matrices(&self) -> &[CMatrix] {
        &self.mats
    }

    pub fn matrix(&self, j: usize) -> &CMatrix {
        &self.mats[j]
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn kernel(&self) -> Option<KernelInfo> {
        self.kernel
    }

    pub fn n_channels(&self) -> usize {
        self.mats.first().map_or(0, |m| m.nrows())
    }

    pub fn n_freqs(&self) -> usize {
        self.freqs.len()
    }

    pub(crate) fn expect_kind(&self, kind: FieldKind) -> Result<()> {
        if self.kind != kind {
            return Err(Error::WrongFieldKind { expected: kind.as_str(), actual: self.kind.as_str() });
        }
        Ok(())
    }

    pub fn band_indices(&self, band: &FrequencyBand) -> Result<Vec<usize>> {
        band.select(&self.freqs)
    }

    /// Real parts of the matrices at the given bins.
    pub fn real_matrices(&self, bins: &[usize]) -> Vec<DMatrix<f64>> {
        bins.iter().map(|&j| self.mats[j].map(|z| z.re)).collect()
    }

    /// Auto-spectrum (diagonal) of one channel across all frequencies.
    pub fn auto_spectrum(&self, channel: usize) -> Vec<f64> {
        self.mats.iter().map(|m| m[(channel, channel)].re).collect()
    }

    /// Restriction to a subset of channels, in the given order.
    pub fn submatrix_field(&self, channels: &[usize]) -> SpectralField {
        let mats = self
            .mats
            .iter()
            .map(|m| CMatrix::from_fn(channels.len(), channels.len(), |i, j| m[(channels[i], channels[j])]))
            .collect();
        SpectralField { freqs: self.freqs.clone(), mats, kind: self.kind, kernel: self.kernel }
    }

    /// Largest |M - M*| entry over all frequencies.
    pub fn max_hermitian_defect(&self) -> f64 {
        self.mats
            .iter()
            .map(|m| {
                let mut worst = 0.0f64;
                for i in 0..m.nrows() {
                    for j in 0..m.ncols() {
                        worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
                    }
                }
                worst
            })
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let dto = FieldJson {
            kind: self.kind,
            kernel: self.kernel,
            n: self.n_channels(),
            freqs: self.freqs.clone(),
            matrices: self
                .mats
                .iter()
                .map(|m| {
                    (0..m.nrows())
                        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
                        .collect()
                })
                .collect(),
        };
        serde_json::to_value(dto).expect("field serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let dto: FieldJson = serde_json::from_value(value.clone())?;
        let mats = dto
            .matrices
            .iter()
            .map(|rows| {
                if rows.len() != dto.n || rows.iter().any(|r| r.len() != dto.n) {
                    return Err(Error::SizeMismatch("matrix rows do not match n".into()));
                }
                Ok(CMatrix::from_fn(dto.n, dto.n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut f = SpectralField::new(dto.freqs, mats, dto.kind)?;
        f.kernel = dto.kernel;
        Ok(f)
    }

    /// Little-endian binary container: magic, kind, kernel, N, J,
    /// frequencies, then row-major `[re, im]` matrices.
    pub fn write_binary<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&[self.kind.code()])?;
        let (family, span) = match self.kernel {
            Some(k) => (k.family.code(), k.span as u32),
            None => (0, 0),
        };
        w.write_all(&[family])?;
        w.write_all(&span.to_le_bytes())?;
        w.write_all(&(self.n_channels() as u32).to_le_bytes())?;
        w.write_all(&(self.n_freqs() as u32).to_le_bytes())?;
        for f in &self.freqs {
            w.write_all(&f.to_le_bytes())?;
        }
        for m in &self.mats {
            for i in 0..m.nrows() {
                for j in 0..m.ncols() {
                    w.write_all(&m[(i, j)].re.to_le_bytes())?;
                    w.write_all(&m[(i, j)].im.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn read_binary<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Container("bad magic".into()));
        }
        let mut b = [0u8; 2];
        r.read_exact(&mut b)?;
        let kind = FieldKind::from_code(b[0])?;
        let span = read_u32(&mut r)? as usize;
        let kernel = if b[1] == 0 {
            None
        } else {
            Some(KernelInfo { family: super::KernelFamily::from_code(b[1])?, span })
        };
        let n = read_u32(&mut r)? as usize;
        let j = read_u32(&mut r)? as usize;
        let freqs = (0..j).map(|_| read_f64(&mut r)).collect::<Result<Vec<_>>>()?;
        let mut mats = Vec::with_capacity(j);
        for _ in 0..j {
            let mut m = CMatrix::zeros(n, n);
            for row in 0..n {
                for col in 0..n {
                    let re = read_f64(&mut r)?;
                    let im = read_f64(&mut r)?;
                    m[(row, col)] = Complex64::new(re, im);
                }
            }
            mats.push(m);
        }
        let mut f = SpectralField::new(freqs, mats, kind)?;
        f.kernel = kernel;
        Ok(f)
    }
}

const MAGIC: &[u8; 8] = b"HCCSPEC1";

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}

#[derive(Serialize, Deserialize)]
struct FieldJson {
    kind: FieldKind,
    #[serde(default)]
    kernel: Option<KernelInfo>,
    n: usize,
    freqs: Vec<f64>,
    matrices: Vec<Vec<Vec<[f64; 2]>>>,
}
