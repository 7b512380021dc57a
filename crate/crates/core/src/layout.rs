//! 2D scalp layouts (unit-disk projection, nose up, left hemisphere at x < 0).

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelPosition {
    pub name: String,
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelLayout {
    pub positions: Vec<ChannelPosition>,
}

// Equal-angle azimuthal projection of the spherical 10-20 positions: polar
// angle from Cz divided by 90 degrees, so the Fp/T/O ring sits at r = 0.8.
const TEN_TWENTY: [(&str, f64, f64); 19] = [
    ("Fp1", -0.2472, 0.7608),
    ("Fp2", 0.2472, 0.7608),
    ("F7", -0.6472, 0.4702),
    ("F3", -0.3158, 0.4706),
    ("Fz", 0.0, 0.4),
    ("F4", 0.3158, 0.4706),
    ("F8", 0.6472, 0.4702),
    ("T3", -0.8, 0.0),
    ("C3", -0.4, 0.0),
    ("Cz", 0.0, 0.0),
    ("C4", 0.4, 0.0),
    ("T4", 0.8, 0.0),
    ("T5", -0.6472, -0.4702),
    ("P3", -0.3158, -0.4706),
    ("Pz", 0.0, -0.4),
    ("P4", 0.3158, -0.4706),
    ("T6", 0.6472, -0.4702),
    ("O1", -0.2472, -0.7608),
    ("O2", 0.2472, -0.7608),
];

/// The 19 standard 10-20 electrodes.
pub fn standard_1020_layout() -> ChannelLayout {
    ChannelLayout {
        positions: TEN_TWENTY
            .iter()
            .map(|&(n, x, y)| ChannelPosition { name: n.to_string(), x, y })
            .collect(),
    }
}

impl ChannelLayout {
    pub fn new(positions: Vec<ChannelPosition>) -> Result<Self> {
        for p in &positions {
            if !(p.x.is_finite() && p.y.is_finite()) || p.x.hypot(p.y) > 1.0 + 1e-9 {
                return Err(Error::InvalidParameter(format!(
                    "channel {} at ({}, {}) lies outside the unit disk",
                    p.name, p.x, p.y
                )));
            }
        }
        for (i, p) in positions.iter().enumerate() {
            if positions[..i].iter().any(|q| q.name == p.name) {
                return Err(Error::InvalidParameter(format!("duplicate channel {}", p.name)));
            }
        }
        Ok(Self { positions })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// Case-insensitive lookup (`FP1` and `Fp1` name the same electrode).
    pub fn get(&self, name: &str) -> Option<(f64, f64)> {
        self.positions
            .iter()
            .find(|p| p.name.eq_ignore_ascii_case(name))
            .map(|p| (p.x, p.y))
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.positions.iter().position(|p| p.name.eq_ignore_ascii_case(name))
    }

    pub fn names(&self) -> Vec<String> {
        self.positions.iter().map(|p| p.name.clone()).collect()
    }

    pub fn distance(&self, a: &str, b: &str) -> Option<f64> {
        let (ax, ay) = self.get(a)?;
        let (bx, by) = self.get(b)?;
        Some((ax - bx).hypot(ay - by))
    }

    /// Reads a `name,x,y` CSV (header row optional).
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(reader);
        let mut positions = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let line = i + 1;
            let rec = rec.map_err(|e| Error::Csv { line, reason: e.to_string() })?;
            if rec.len() != 3 {
                return Err(Error::Csv { line, reason: format!("expected 3 fields, got {}", rec.len()) });
            }
            let (x, y) = match (rec[1].parse::<f64>(), rec[2].parse::<f64>()) {
                (Ok(x), Ok(y)) => (x, y),
                _ if line == 1 => continue,
                _ => return Err(Error::Csv { line, reason: "non-numeric coordinate".into() }),
            };
            positions.push(ChannelPosition { name: rec[0].to_string(), x, y });
        }
        Self::new(positions)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("name,x,y\n");
        for p in &self.positions {
            s.push_str(&format!("{},{},{}\n", p.name, p.x, p.y));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ten_twenty_basics() {
        let l = standard_1020_layout();
        assert_eq!(l.len(), 19);
        assert_eq!(l.get("Cz"), Some((0.0, 0.0)));
        assert!(l.get("T3").unwrap().0 < 0.0);
        assert!(l.get("T4").unwrap().0 > 0.0);
        assert!(l.get("FP1").is_some());
        for p in &l.positions {
            assert!(p.x.hypot(p.y) <= 1.0);
        }
        // left/right mirror symmetry
        for (a, b) in [("Fp1", "Fp2"), ("F7", "F8"), ("C3", "C4"), ("O1", "O2"), ("P3", "P4")] {
            let (ax, ay) = l.get(a).unwrap();
            let (bx, by) = l.get(b).unwrap();
            assert_eq!((ax, ay), (-bx, by));
        }
    }

    #[test]
    fn csv_round_trip() {
        let l = standard_1020_layout();
        let back = ChannelLayout::from_csv(l.to_csv().as_bytes()).unwrap();
        assert_eq!(back, l);
    }

    #[test]
    fn rejects_outside_disk() {
        assert!(ChannelLayout::from_csv("a,0.9,0.9\n".as_bytes()).is_err());
        assert!(ChannelLayout::from_csv("a,0.1,zz\nb,0,0\n".as_bytes()).is_ok());
        assert!(ChannelLayout::from_csv("a,0,0\nb,0,zz\n".as_bytes()).is_err());
    }
}
