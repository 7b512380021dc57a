//! Multichannel time series and CSV ingestion.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::layout::ChannelLayout;

/// N channels by T samples at a common sampling rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesSet {
    data: Vec<Vec<f64>>,
    fs: f64,
    labels: Vec<String>,
    layout: Option<ChannelLayout>,
}

impl TimeSeriesSet {
    pub fn new(data: Vec<Vec<f64>>, fs: f64, labels: Vec<String>) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidSeries("no channels".into()));
        }
        if !(fs.is_finite() && fs > 0.0) {
            return Err(Error::InvalidSeries(format!("sampling rate must be positive, got {fs}")));
        }
        let t = data[0].len();
        if t < 2 {
            return Err(Error::InvalidSeries(format!("need at least 2 samples, got {t}")));
        }
        for (c, row) in data.iter().enumerate() {
            if row.len() != t {
                return Err(Error::InvalidSeries(format!(
                    "channel {c} has {} samples, expected {t}",
                    row.len()
                )));
            }
            if let Some(i) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFinite { channel: c, index: i });
            }
        }
        if labels.len() != data.len() {
            return Err(Error::InvalidSeries(format!(
                "{} labels for {} channels",
                labels.len(),
                data.len()
            )));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidSeries(format!("duplicate label {l}")));
            }
        }
        Ok(Self { data, fs, labels, layout: None })
    }

    /// Channels labelled `X1..XN`.
    pub fn unlabeled(data: Vec<Vec<f64>>, fs: f64) -> Result<Self> {
        let labels = (1..=data.len()).map(|i| format!("X{i}")).collect();
        Self::new(data, fs, labels)
    }

    /// Attaches a layout; every label must have a position.
    pub fn with_layout(mut self, layout: ChannelLayout) -> Result<Self> {
        let mut positions = Vec::with_capacity(self.labels.len());
        for l in &self.labels {
            let idx = layout
                .index_of(l)
                .ok_or_else(|| Error::InvalidSeries(format!("layout has no position for channel {l}")))?;
            positions.push(layout.positions[idx].clone());
        }
        self.layout = Some(ChannelLayout { positions });
        Ok(self)
    }

    pub fn n_channels(&self) -> usize {
        self.data.len()
    }

    pub fn n_samples(&self) -> usize {
        self.data[0].len()
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn layout(&self) -> Option<&ChannelLayout> {
        self.layout.as_ref()
    }

    pub fn channel(&self, i: usize) -> &[f64] {
        &self.data[i]
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.data
    }

    pub fn channel_index(&self, label: &str) -> Option<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .or_else(|| self.labels.iter().position(|l| l.eq_ignore_ascii_case(label)))
    }

    pub fn duration_seconds(&self) -> f64 {
        self.n_samples() as f64 / self.fs
    }

    /// Disjoint consecutive segments of `seconds` length; a trailing partial
    /// segment is dropped.
    pub fn segments(&self, seconds: f64) -> Result<Vec<TimeSeriesSet>> {
        let len = (seconds * self.fs).round() as usize;
        if len < 2 {
            return Err(Error::InvalidParameter(format!("segment of {seconds} s has fewer than 2 samples")));
        }
        let count = self.n_samples() / len;
        if count == 0 {
            return Err(Error::InvalidParameter(format!(
                "recording of {} s is shorter than one {seconds} s segment",
                self.duration_seconds()
            )));
        }
        Ok((0..count).map(|s| self.slice(s * len, (s + 1) * len)).collect())
    }

    fn slice(&self, start: usize, end: usize) -> TimeSeriesSet {
        TimeSeriesSet {
            data: self.data.iter().map(|r| r[start..end].to_vec()).collect(),
            fs: self.fs,
            labels: self.labels.clone(),
            layout: self.layout.clone(),
        }
    }

    /// Reads one column per channel with a header row of labels. A leading
    /// column named `t` holds time stamps in seconds; when present and `fs`
    /// is `None`, the sampling rate is inferred from its spacing.
    pub fn from_csv<R: Read>(reader: R, fs: Option<f64>) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = rdr.headers().map_err(|e| Error::Csv { line: 1, reason: e.to_string() })?.clone();
        let has_t = headers.get(0).is_some_and(|h| h.eq_ignore_ascii_case("t"));
        let offset = usize::from(has_t);
        let labels: Vec<String> = headers.iter().skip(offset).map(str::to_string).collect();
        if labels.is_empty() {
            return Err(Error::Csv { line: 1, reason: "no channel columns".into() });
        }
        let mut data = vec![Vec::new(); labels.len()];
        let mut times = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 2;
            let rec = rec.map_err(|e| Error::Csv { line, reason: e.to_string() })?;
            if rec.len() != headers.len() {
                return Err(Error::Csv {
                    line,
                    reason: format!("expected {} fields, got {}", headers.len(), rec.len()),
                });
            }
            for (j, field) in rec.iter().enumerate() {
                let v: f64 = field
                    .parse()
                    .map_err(|_| Error::Csv { line, reason: format!("non-numeric value {field:?} in column {}", j + 1) })?;
                if !v.is_finite() {
                    return Err(Error::Csv { line, reason: format!("non-finite value in column {}", j + 1) });
                }
                if has_t && j == 0 {
                    times.push(v);
                } else {
                    data[j - offset].push(v);
                }
            }
        }
        let fs = match fs {
            Some(fs) => fs,
            None if times.len() >= 2 => {
                let dt = (times[times.len() - 1] - times[0]) / (times.len() - 1) as f64;
                if dt <= 0.0 {
                    return Err(Error::Csv { line: 2, reason: "time column is not increasing".into() });
                }
                1.0 / dt
            }
            None => {
                return Err(Error::InvalidParameter(
                    "sampling rate unknown: pass it explicitly or include a `t` column".into(),
                ))
            }
        };
        Self::new(data, fs, labels)
    }

    /// Writes the header row and one row per sample, without a time column.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(&self.labels).map_err(csv_err)?;
        let mut row = Vec::with_capacity(self.n_channels());
        for t in 0..self.n_samples() {
            row.clear();
            row.extend(self.data.iter().map(|c| c[t].to_string()));
            w.write_record(&row).map_err(csv_err)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv output is utf-8")
    }
}
