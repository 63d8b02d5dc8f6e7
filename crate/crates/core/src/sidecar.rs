//! Binary and CSV serialization of jitter curves.
//!
//! Binary layout (all integers and floats little-endian):
//!
//! ```text
//! offset  size  field
//! 0       4     magic "LAPJ"
//! 4       4     version (u32, currently 1)
//! 8       4     width W (u32)
//! 12      4     direction count D (u32, always 2: roll then pitch)
//! 16      4     record count R (u32)
//! 20      4     image height H (u32, 0 when not tied to an image)
//! 24      ...   R records, each D curves of W f64 samples
//! ```
//!
//! Record `r` holds the curves of subdivision index `r`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::jitter::{Direction, JitterCurve};

pub const MAGIC: &[u8; 4] = b"LAPJ";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 24;
const DIRECTIONS: u32 = 2;

/// Roll and pitch curves of one subdivision.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvePair {
    pub roll: JitterCurve,
    pub pitch: JitterCurve,
}

impl CurvePair {
    pub fn new(roll: JitterCurve, pitch: JitterCurve) -> Result<Self> {
        if roll.width() != pitch.width() {
            return Err(Error::Argument(format!(
                "roll width {} differs from pitch width {}",
                roll.width(),
                pitch.width()
            )));
        }
        Ok(Self { roll, pitch })
    }

    pub fn width(&self) -> usize {
        self.roll.width()
    }
}

/// The jitter curves used to degrade one image, one pair per subdivision.
#[derive(Debug, Clone, PartialEq)]
pub struct Sidecar {
    pub height: usize,
    pub records: Vec<CurvePair>,
}

impl Sidecar {
    pub fn new(height: usize, records: Vec<CurvePair>) -> Result<Self> {
        if let Some(first) = records.first() {
            if records.iter().any(|r| r.width() != first.width()) {
                return Err(Error::Argument("sidecar records differ in width".into()));
            }
        }
        Ok(Self { height, records })
    }

    pub fn width(&self) -> usize {
        self.records.first().map_or(0, CurvePair::width)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let w = self.width();
        let mut out = Vec::with_capacity(HEADER_LEN + self.records.len() * 2 * w * 8);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(w as u32).to_le_bytes());
        out.extend_from_slice(&DIRECTIONS.to_le_bytes());
        out.extend_from_slice(&(self.records.len() as u32).to_le_bytes());
        out.extend_from_slice(&(self.height as u32).to_le_bytes());
        for rec in &self.records {
            for v in rec.roll.samples.iter().chain(&rec.pitch.samples) {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> std::result::Result<Self, String> {
        if bytes.len() < HEADER_LEN {
            return Err(format!("truncated header ({} bytes)", bytes.len()));
        }
        if &bytes[0..4] != MAGIC {
            return Err("bad magic".into());
        }
        let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        let version = word(4);
        if version != VERSION {
            return Err(format!("unsupported version {version}"));
        }
        let width = word(8) as usize;
        let directions = word(12);
        if directions != DIRECTIONS {
            return Err(format!(
                "expected {DIRECTIONS} directions, found {directions}"
            ));
        }
        let records = word(16) as usize;
        let height = word(20) as usize;
        let expected = HEADER_LEN + records * 2 * width * 8;
        if bytes.len() != expected {
            return Err(format!(
                "payload length {} does not match header (expected {expected})",
                bytes.len()
            ));
        }
        let mut floats = bytes[HEADER_LEN..]
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
        let mut take = |dir| -> std::result::Result<JitterCurve, String> {
            let samples: Vec<f64> = floats.by_ref().take(width).collect();
            JitterCurve::new(dir, samples).map_err(|e| e.to_string())
        };
        let mut out = Vec::with_capacity(records);
        for _ in 0..records {
            let roll = take(Direction::Roll)?;
            let pitch = take(Direction::Pitch)?;
            out.push(CurvePair { roll, pitch });
        }
        Ok(Self {
            height,
            records: out,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()).map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
        Self::from_bytes(&bytes).map_err(|reason| Error::integrity(path, reason))
    }
}

/// CSV with header `column,roll_px,pitch_px`; `column` is the 0-based image
/// column. Floats use the shortest representation that round-trips exactly.
pub fn curves_to_csv(pair: &CurvePair) -> String {
    let mut s = String::from("column,roll_px,pitch_px\n");
    for (k, (r, p)) in pair
        .roll
        .samples
        .iter()
        .zip(&pair.pitch.samples)
        .enumerate()
    {
        let _ = writeln!(s, "{k},{r},{p}");
    }
    s
}

pub fn curves_from_csv(text: &str) -> Result<CurvePair> {
    let mut lines = text.lines();
    match lines.next() {
        Some("column,roll_px,pitch_px") => {}
        other => {
            return Err(Error::Argument(format!("unexpected CSV header {other:?}")));
        }
    }
    let (mut roll, mut pitch) = (Vec::new(), Vec::new());
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.is_empty()) {
        let fields: Vec<&str> = line.split(',').collect();
        let parse = |s: &str| {
            s.parse::<f64>()
                .map_err(|e| Error::Argument(format!("CSV line {}: {e}", i + 2)))
        };
        if fields.len() != 3 {
            return Err(Error::Argument(format!(
                "CSV line {}: expected 3 fields",
                i + 2
            )));
        }
        roll.push(parse(fields[1])?);
        pitch.push(parse(fields[2])?);
    }
    CurvePair::new(
        JitterCurve::new(Direction::Roll, roll)?,
        JitterCurve::new(Direction::Pitch, pitch)?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pair(roll: Vec<f64>, pitch: Vec<f64>) -> CurvePair {
        CurvePair::new(
            JitterCurve::new(Direction::Roll, roll).unwrap(),
            JitterCurve::new(Direction::Pitch, pitch).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn header_layout() {
        let sc = Sidecar::new(480, vec![pair(vec![1.0, 2.0], vec![0.5, -0.5])]).unwrap();
        let bytes = sc.to_bytes();
        assert_eq!(&bytes[..4], b"LAPJ");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(bytes[12..16].try_into().unwrap()), 2);
        assert_eq!(u32::from_le_bytes(bytes[16..20].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[20..24].try_into().unwrap()), 480);
        assert_eq!(f64::from_le_bytes(bytes[24..32].try_into().unwrap()), 1.0);
        assert_eq!(f64::from_le_bytes(bytes[40..48].try_into().unwrap()), 0.5);
        assert_eq!(bytes.len(), 24 + 4 * 8);
    }

    #[test]
    fn corrupt_inputs_are_rejected() {
        let sc = Sidecar::new(4, vec![pair(vec![1.0], vec![2.0])]).unwrap();
        let bytes = sc.to_bytes();
        assert!(Sidecar::from_bytes(&bytes[..10]).is_err());
        assert!(Sidecar::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        let mut bad = bytes.clone();
        bad[0] = b'X';
        assert!(Sidecar::from_bytes(&bad).is_err());
        let mut nan = bytes;
        nan[24..32].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(Sidecar::from_bytes(&nan).is_err());
    }

    #[test]
    fn csv_rejects_garbage() {
        assert!(curves_from_csv("a,b\n").is_err());
        assert!(curves_from_csv("column,roll_px,pitch_px\n0,x,1\n").is_err());
    }

    proptest! {
        #[test]
        fn binary_and_csv_round_trip(
            data in proptest::collection::vec((-1e3f64..1e3, -1e3f64..1e3), 1..50),
            records in 1usize..4,
            height in 0usize..2000,
        ) {
            let (r, p): (Vec<f64>, Vec<f64>) = data.into_iter().unzip();
            let recs = vec![pair(r, p); records];
            let sc = Sidecar::new(height, recs).unwrap();
            prop_assert_eq!(Sidecar::from_bytes(&sc.to_bytes()).unwrap(), sc.clone());
            let csv = curves_to_csv(&sc.records[0]);
            prop_assert_eq!(curves_from_csv(&csv).unwrap(), sc.records[0].clone());
        }
    }
}
