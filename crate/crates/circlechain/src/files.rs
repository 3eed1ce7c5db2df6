//! The versioned structured-text coefficient file format.
//!
//! Layout (field names are part of the format):
//!
//! ```text
//! version 1
//! K 4
//! coefficients
//! 5.0000000000000000e-1 0.0000000000000000e0
//! ... (K+1 lines of "re im")
//! provenance
//! source cot_half
//! n_used 1
//! lift 0
//! reduced true
//! alpha0 0.0000000000000000e0
//! delta 0.0000000000000000e0 0 2.0000000000000000e0
//! chain -1
//! note free text
//! ```
//!
//! The `provenance` block is optional. Floats are written with 17
//! significant digits, so a write/read roundtrip is lossless.

use std::fmt::Write as _;
use std::path::Path;

use thiserror::Error;

use crate::coeffs::{CoeffsError, TaylorCoefficients};
use crate::reconstruct::DeltaComponent;
use crate::{Real, C};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum FilesError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unrecognized version {0}")]
    Version(u32),
    #[error("coefficient list has {got} entries, K = {k} requires {need}")]
    LengthMismatch { k: usize, got: usize, need: usize },
    #[error(transparent)]
    Coeffs(#[from] CoeffsError),
}

/// Provenance of a coefficient file: which function produced it and how.
#[derive(Debug, Clone, PartialEq)]
pub struct FileProvenance<T: Real> {
    pub source: Option<String>,
    pub n_used: Option<usize>,
    pub lift: Option<usize>,
    pub reduced: Option<bool>,
    pub alpha0: Option<T>,
    pub deltas: Vec<DeltaComponent<T>>,
    /// Chain walks applied to the coefficients after reconstruction,
    /// in order (positive = derivative steps, negative = primitive steps).
    pub chain: Vec<i64>,
    pub notes: Vec<String>,
}

impl<T: Real> Default for FileProvenance<T> {
    fn default() -> Self {
        Self {
            source: None,
            n_used: None,
            lift: None,
            reduced: None,
            alpha0: None,
            deltas: Vec::new(),
            chain: Vec::new(),
            notes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientFile<T: Real> {
    pub version: u32,
    pub coefficients: Vec<C<T>>,
    pub provenance: Option<FileProvenance<T>>,
}

impl<T: Real> CoefficientFile<T> {
    pub fn from_taylor(tc: &TaylorCoefficients<T>, provenance: Option<FileProvenance<T>>) -> Self {
        Self {
            version: FORMAT_VERSION,
            coefficients: tc.coeffs().to_vec(),
            provenance,
        }
    }

    pub fn order(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn to_taylor(&self) -> Result<TaylorCoefficients<T>, FilesError> {
        Ok(TaylorCoefficients::new(self.coefficients.clone())?)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "version {}", self.version);
        let _ = writeln!(s, "K {}", self.order());
        let _ = writeln!(s, "coefficients");
        for c in &self.coefficients {
            let _ = writeln!(s, "{:.16e} {:.16e}", c.re, c.im);
        }
        if let Some(p) = &self.provenance {
            let _ = writeln!(s, "provenance");
            if let Some(src) = &p.source {
                let _ = writeln!(s, "source {src}");
            }
            if let Some(n) = p.n_used {
                let _ = writeln!(s, "n_used {n}");
            }
            if let Some(l) = p.lift {
                let _ = writeln!(s, "lift {l}");
            }
            if let Some(r) = p.reduced {
                let _ = writeln!(s, "reduced {r}");
            }
            if let Some(a) = p.alpha0 {
                let _ = writeln!(s, "alpha0 {a:.16e}");
            }
            for d in &p.deltas {
                let _ = writeln!(s, "delta {:.16e} {} {:.16e}", d.location, d.order, d.amplitude);
            }
            for c in &p.chain {
                let _ = writeln!(s, "chain {c}");
            }
            for n in &p.notes {
                let _ = writeln!(s, "note {n}");
            }
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<(), FilesError> {
        std::fs::write(path, self.render())?;
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, FilesError> {
        let err = |line: usize, msg: &str| FilesError::Parse { line: line + 1, msg: msg.to_string() };
        let lines: Vec<&str> = text.lines().collect();
        let mut i = 0usize;
        let take_kv = |i: usize, key: &str| -> Result<&str, FilesError> {
            let l = lines.get(i).ok_or_else(|| err(i, "unexpected end of file"))?;
            l.strip_prefix(key)
                .and_then(|r| r.strip_prefix(' '))
                .ok_or_else(|| err(i, &format!("expected `{key} <value>`")))
        };
        let version: u32 = take_kv(i, "version")?
            .trim()
            .parse()
            .map_err(|_| err(i, "bad version"))?;
        if version != FORMAT_VERSION {
            return Err(FilesError::Version(version));
        }
        i += 1;
        let k: usize = take_kv(i, "K")?.trim().parse().map_err(|_| err(i, "bad K"))?;
        i += 1;
        if lines.get(i).map(|l| l.trim()) != Some("coefficients") {
            return Err(err(i, "expected `coefficients`"));
        }
        i += 1;
        let mut coefficients = Vec::with_capacity(k + 1);
        while i < lines.len() && lines[i].trim() != "provenance" && !lines[i].trim().is_empty() {
            let mut parts = lines[i].split_whitespace();
            let re: f64 = parts
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| err(i, "bad coefficient real part"))?;
            let im: f64 = parts
                .next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| err(i, "bad coefficient imaginary part"))?;
            if parts.next().is_some() {
                return Err(err(i, "trailing tokens on coefficient line"));
            }
            coefficients.push(C::new(T::of(re), T::of(im)));
            i += 1;
        }
        if coefficients.len() != k + 1 {
            return Err(FilesError::LengthMismatch {
                k,
                got: coefficients.len(),
                need: k + 1,
            });
        }
        let mut provenance = None;
        if i < lines.len() && lines[i].trim() == "provenance" {
            i += 1;
            let mut p = FileProvenance::<T>::default();
            while i < lines.len() {
                let l = lines[i].trim_end();
                if l.is_empty() {
                    i += 1;
                    continue;
                }
                let (key, rest) = l.split_once(' ').unwrap_or((l, ""));
                match key {
                    "source" => p.source = Some(rest.to_string()),
                    "n_used" => {
                        p.n_used = Some(rest.trim().parse().map_err(|_| err(i, "bad n_used"))?)
                    }
                    "lift" => p.lift = Some(rest.trim().parse().map_err(|_| err(i, "bad lift"))?),
                    "reduced" => {
                        p.reduced = Some(rest.trim().parse().map_err(|_| err(i, "bad reduced"))?)
                    }
                    "alpha0" => {
                        let v: f64 = rest.trim().parse().map_err(|_| err(i, "bad alpha0"))?;
                        p.alpha0 = Some(T::of(v));
                    }
                    "delta" => {
                        let mut parts = rest.split_whitespace();
                        let loc: f64 = parts
                            .next()
                            .and_then(|v| v.parse().ok())
                            .ok_or_else(|| err(i, "bad delta location"))?;
                        let order: usize = parts
                            .next()
                            .and_then(|v| v.parse().ok())
                            .ok_or_else(|| err(i, "bad delta order"))?;
                        let amp: f64 = parts
                            .next()
                            .and_then(|v| v.parse().ok())
                            .ok_or_else(|| err(i, "bad delta amplitude"))?;
                        p.deltas.push(DeltaComponent {
                            location: T::of(loc),
                            order,
                            amplitude: T::of(amp),
                        });
                    }
                    "chain" => {
                        p.chain.push(rest.trim().parse().map_err(|_| err(i, "bad chain step"))?)
                    }
                    "note" => p.notes.push(rest.to_string()),
                    _ => return Err(err(i, &format!("unknown provenance field `{key}`"))),
                }
                i += 1;
            }
            provenance = Some(p);
        }
        Ok(Self {
            version,
            coefficients,
            provenance,
        })
    }

    pub fn read(path: &Path) -> Result<Self, FilesError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_is_lossless() {
        let tc = TaylorCoefficients::new(vec![
            C::new(0.1234567890123456_f64, -1.0 / 3.0),
            C::new(f64::MIN_POSITIVE, 1e300),
            C::new(-2.5e-17, 0.0),
        ])
        .unwrap();
        let prov = FileProvenance {
            source: Some("cot_half".into()),
            n_used: Some(1),
            lift: Some(0),
            reduced: Some(true),
            alpha0: Some(0.25),
            deltas: vec![DeltaComponent { location: 0.0, order: 0, amplitude: 2.0 }],
            chain: vec![-1, 2],
            notes: vec!["walked for a test".into()],
        };
        let f = CoefficientFile::from_taylor(&tc, Some(prov.clone()));
        let text = f.render();
        let g = CoefficientFile::<f64>::parse(&text).unwrap();
        assert_eq!(f, g);
        assert_eq!(g.provenance.unwrap(), prov);
        // bit-exact coefficients
        for (a, b) in tc.coeffs().iter().zip(&g.coefficients) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
    }

    #[test]
    fn rejects_bad_version_and_length() {
        let text = "version 9\nK 1\ncoefficients\n0 0\n0 0\n";
        assert!(matches!(
            CoefficientFile::<f64>::parse(text),
            Err(FilesError::Version(9))
        ));
        let text = "version 1\nK 3\ncoefficients\n0 0\n0 0\n";
        assert!(matches!(
            CoefficientFile::<f64>::parse(text),
            Err(FilesError::LengthMismatch { k: 3, got: 2, need: 4 })
        ));
    }

    #[test]
    fn minimal_file_without_provenance() {
        let text = "version 1\nK 1\ncoefficients\n1 0\n0 -1\n";
        let f = CoefficientFile::<f64>::parse(text).unwrap();
        assert_eq!(f.order(), 1);
        assert!(f.provenance.is_none());
        assert_eq!(f.coefficients[1], C::new(0.0, -1.0));
    }
}
