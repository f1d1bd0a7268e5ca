//! Interchange formats.
//!
//! Matrices: `{"dim": n, "re": [[..], ..], "im": [[..], ..]}` (row-major).
//! Vectors: `{"dim": n, "re": [..], "im": [..]}`.
//! All floats are written with 17 significant digits.

use std::fmt;

use serde::de::Deserializer;
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, StateVector, C64};

/// `x` in scientific notation with 17 significant digits; `null` if non-finite.
pub fn fmt17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".to_string()
    }
}

/// An `f64` that serializes with [`fmt17`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F17(pub f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw = RawValue::from_string(fmt17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for F17 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(d).map(F17)
    }
}

impl fmt::Display for F17 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt17(self.0))
    }
}

impl From<f64> for F17 {
    fn from(x: f64) -> Self {
        F17(x)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<Vec<F17>>,
    pub im: Vec<Vec<F17>>,
}

impl MatrixJson {
    /// Square matrices only.
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let rows = |f: fn(&C64) -> f64| -> Vec<Vec<F17>> {
            (0..m.rows()).map(|i| (0..m.cols()).map(|j| F17(f(&m[(i, j)]))).collect()).collect()
        };
        Self { dim: m.rows(), re: rows(|z| z.re), im: rows(|z| z.im) }
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        let n = self.dim;
        let bad = |what: &str| Error::DimensionMismatch(format!("matrix JSON: {what} does not match dim {n}"));
        if self.re.len() != n || self.im.len() != n {
            return Err(bad("row count"));
        }
        let mut entries = Vec::with_capacity(n * n);
        for (r, i) in self.re.iter().zip(&self.im) {
            if r.len() != n || i.len() != n {
                return Err(bad("row length"));
            }
            entries.extend(r.iter().zip(i).map(|(a, b)| C64::new(a.0, b.0)));
        }
        ComplexMatrix::new(n, n, entries)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VectorJson {
    pub dim: usize,
    pub re: Vec<F17>,
    pub im: Vec<F17>,
}

impl VectorJson {
    pub fn from_amplitudes(v: &[C64]) -> Self {
        Self {
            dim: v.len(),
            re: v.iter().map(|z| F17(z.re)).collect(),
            im: v.iter().map(|z| F17(z.im)).collect(),
        }
    }

    pub fn from_state(v: &StateVector) -> Self {
        Self::from_amplitudes(v.amplitudes())
    }

    pub fn to_amplitudes(&self) -> Result<Vec<C64>> {
        if self.re.len() != self.dim || self.im.len() != self.dim {
            return Err(Error::DimensionMismatch(format!("vector JSON: length does not match dim {}", self.dim)));
        }
        Ok(self.re.iter().zip(&self.im).map(|(a, b)| C64::new(a.0, b.0)).collect())
    }

    pub fn to_state(&self) -> Result<StateVector> {
        StateVector::new(self.to_amplitudes()?)
    }
}

/// Pretty-printed JSON followed by a newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json_str<T: for<'de> Deserialize<'de>>(s: &str) -> Result<T> {
    Ok(serde_json::from_str(s)?)
}
