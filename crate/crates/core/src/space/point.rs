use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// A point of ℝⁿ with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPoint", into = "Vec<f64>")]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidParameter("point must have at least one coordinate".into()));
        }
        if let Some(bad) = coords.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite coordinate {bad}")));
        }
        Ok(Self(coords))
    }

    pub fn origin(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    /// The `i`-th standard basis vector scaled by `scale`.
    pub fn axis(dim: usize, i: usize, scale: f64) -> Self {
        let mut c = vec![0.0; dim];
        c[i] = scale;
        Self(c)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn add(&self, other: &[f64]) -> Point {
        debug_assert_eq!(self.dim(), other.len());
        Point(self.0.iter().zip(other).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &[f64]) -> Point {
        debug_assert_eq!(self.dim(), other.len());
        Point(self.0.iter().zip(other).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, t: f64) -> Point {
        Point(self.0.iter().map(|a| a * t).collect())
    }

    /// `self + t·dir`.
    pub fn offset(&self, dir: &[f64], t: f64) -> Point {
        debug_assert_eq!(self.dim(), dir.len());
        Point(self.0.iter().zip(dir).map(|(a, d)| a + t * d).collect())
    }

    /// Algebraic midpoint `(self + other) / 2`.
    pub fn midpoint(&self, other: &[f64]) -> Point {
        debug_assert_eq!(self.dim(), other.len());
        Point(self.0.iter().zip(other).map(|(a, b)| (a + b) * 0.5).collect())
    }

    /// Reflection of `x` through `self`: `2·self − x`.
    pub fn reflect(&self, x: &[f64]) -> Point {
        debug_assert_eq!(self.dim(), x.len());
        Point(self.0.iter().zip(x).map(|(c, v)| 2.0 * c - v).collect())
    }

    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|a| a.abs()).fold(0.0, f64::max)
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        check_dim(dim, self.dim())
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

// Unchecked conversions for literals in code; `Point::new` validates.
impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        debug_assert!(v.iter().all(|c| c.is_finite()));
        Self(v)
    }
}

impl From<&[f64]> for Point {
    fn from(v: &[f64]) -> Self {
        Self::from(v.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Self::from(v.to_vec())
    }
}

#[derive(Deserialize)]
struct RawPoint(Vec<f64>);

impl TryFrom<RawPoint> for Point {
    type Error = Error;

    fn try_from(v: RawPoint) -> Result<Self> {
        Self::new(v.0)
    }
}

impl From<Point> for Vec<f64> {
    fn from(p: Point) -> Self {
        p.0
    }
}

/// Parses comma-separated coordinates, e.g. `"0,0"` or `"1.5, -2"`.
impl FromStr for Point {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad coordinate {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Point::new(coords)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}
