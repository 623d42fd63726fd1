use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::PointMap;
use crate::error::{check_dim, Error, Result};
use crate::space::Point;

/// `x ↦ A·x + b` on ℝⁿ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawAffine", into = "RawAffine")]
pub struct AffineMap {
    linear: DMatrix<f64>,
    translation: DVector<f64>,
}

impl AffineMap {
    pub fn new(linear: DMatrix<f64>, translation: DVector<f64>) -> Result<Self> {
        let n = linear.nrows();
        if n == 0 || linear.ncols() != n {
            return Err(Error::InvalidParameter(format!(
                "linear part must be square and nonempty, got {}x{}",
                linear.nrows(),
                linear.ncols()
            )));
        }
        check_dim(n, translation.len())?;
        if linear.iter().chain(translation.iter()).any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("affine map has non-finite entries".into()));
        }
        Ok(Self { linear, translation })
    }

    /// Builds from row-major matrix rows and a translation vector.
    pub fn from_rows(rows: &[Vec<f64>], translation: &[f64]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidParameter("matrix rows must all have length dim".into()));
        }
        let linear = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
        Self::new(linear, DVector::from_column_slice(translation))
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            linear: DMatrix::identity(dim, dim),
            translation: DVector::zeros(dim),
        }
    }

    pub fn translation_by(t: &[f64]) -> Self {
        Self {
            linear: DMatrix::identity(t.len(), t.len()),
            translation: DVector::from_column_slice(t),
        }
    }

    /// Counterclockwise rotation of the plane by `theta` radians.
    pub fn rotation_2d(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            linear: DMatrix::from_row_slice(2, 2, &[c, -s, s, c]),
            translation: DVector::zeros(2),
        }
    }

    /// `x ↦ y` with `y[i] = signs[i]·x[perm[i]]`; an isometry of every
    /// unweighted ℓp norm.
    pub fn signed_permutation(perm: &[usize], signs: &[f64]) -> Result<Self> {
        let n = perm.len();
        check_dim(n, signs.len())?;
        let mut seen = vec![false; n];
        for &p in perm {
            if p >= n || seen[p] {
                return Err(Error::InvalidParameter(format!("{perm:?} is not a permutation")));
            }
            seen[p] = true;
        }
        if signs.iter().any(|s| s.abs() != 1.0) {
            return Err(Error::InvalidParameter("signs must be ±1".into()));
        }
        let mut linear = DMatrix::zeros(n, n);
        for i in 0..n {
            linear[(i, perm[i])] = signs[i];
        }
        Ok(Self {
            linear,
            translation: DVector::zeros(n),
        })
    }

    /// Mirror across the hyperplane `x[axis] = offset`.
    pub fn reflection(dim: usize, axis: usize, offset: f64) -> Result<Self> {
        if axis >= dim {
            return Err(Error::InvalidParameter(format!("axis {axis} out of range for dimension {dim}")));
        }
        let mut linear = DMatrix::identity(dim, dim);
        linear[(axis, axis)] = -1.0;
        let mut translation = DVector::zeros(dim);
        translation[axis] = 2.0 * offset;
        Ok(Self { linear, translation })
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn linear(&self) -> &DMatrix<f64> {
        &self.linear
    }

    pub fn translation(&self) -> &DVector<f64> {
        &self.translation
    }

    pub fn apply(&self, x: &[f64]) -> Result<Point> {
        check_dim(self.dim(), x.len())?;
        Ok(Point::from(self.apply_unchecked(x)))
    }

    pub(crate) fn apply_unchecked(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                x.iter()
                    .enumerate()
                    .fold(self.translation[i], |acc, (j, xj)| acc + self.linear[(i, j)] * xj)
            })
            .collect()
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> Result<AffineMap> {
        check_dim(self.dim(), inner.dim())?;
        Ok(AffineMap {
            linear: &self.linear * &inner.linear,
            translation: &self.linear * &inner.translation + &self.translation,
        })
    }

    pub fn inverse(&self) -> Result<AffineMap> {
        let inv = self.linear.clone().try_inverse().ok_or(Error::Singular)?;
        if inv.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular);
        }
        let translation = -(&inv * &self.translation);
        Ok(AffineMap {
            linear: inv,
            translation,
        })
    }

    /// Largest entrywise difference of linear parts and translations.
    pub fn max_entry_diff(&self, other: &AffineMap) -> f64 {
        if self.dim() != other.dim() {
            return f64::INFINITY;
        }
        let a = (&self.linear - &other.linear).amax();
        let b = (&self.translation - &other.translation).amax();
        a.max(b)
    }

    /// `‖AᵀA − I‖_max ≤ tol`.
    pub fn is_orthogonal(&self, tol: f64) -> bool {
        let n = self.dim();
        let g = self.linear.transpose() * &self.linear;
        (g - DMatrix::<f64>::identity(n, n)).amax() <= tol
    }

    /// Row-major copy of the linear part.
    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim())
            .map(|i| self.linear.row(i).iter().copied().collect())
            .collect()
    }
}

impl PointMap for AffineMap {
    fn dim(&self) -> usize {
        self.dim()
    }

    fn map_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        Ok(self.apply_unchecked(x))
    }

    fn as_affine(&self) -> Option<&AffineMap> {
        Some(self)
    }

    fn describe(&self) -> String {
        format!("affine{:?}+{:?}", self.rows(), self.translation.as_slice())
    }
}

/// `m1 ∘ m2`.
pub fn compose(m1: &AffineMap, m2: &AffineMap) -> Result<AffineMap> {
    m1.compose(m2)
}

pub fn invert(m: &AffineMap) -> Result<AffineMap> {
    m.inverse()
}

#[derive(Serialize, Deserialize)]
struct RawAffine {
    matrix: Vec<Vec<f64>>,
    translation: Vec<f64>,
}

impl TryFrom<RawAffine> for AffineMap {
    type Error = Error;
    fn try_from(r: RawAffine) -> Result<Self> {
        AffineMap::from_rows(&r.matrix, &r.translation)
    }
}

impl From<AffineMap> for RawAffine {
    fn from(m: AffineMap) -> Self {
        RawAffine {
            matrix: m.rows(),
            translation: m.translation.iter().copied().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn rotation_plus_shift_example() {
        let m = AffineMap::rotation_2d(FRAC_PI_2)
            .compose(&AffineMap::identity(2))
            .unwrap();
        let m = AffineMap::translation_by(&[1.0, 0.0]).compose(&m).unwrap();
        let y = m.apply(&[1.0, 0.0]).unwrap();
        assert!(y.max_abs_diff(&[1.0, 1.0]) < 1e-15);
        assert_eq!(AffineMap::identity(3).apply(&[1.0, -2.0, 3.5]).unwrap().coords(), &[1.0, -2.0, 3.5]);
    }

    #[test]
    fn inverses() {
        let id = AffineMap::identity(2);
        assert_eq!(id.inverse().unwrap(), id);
        let r = AffineMap::rotation_2d(FRAC_PI_2);
        assert!(r.inverse().unwrap().max_entry_diff(&AffineMap::rotation_2d(-FRAC_PI_2)) < 1e-15);
        let m = AffineMap::from_rows(&[vec![2.0, 1.0], vec![-1.0, 3.0]], &[0.5, -4.0]).unwrap();
        let both = m.compose(&m.inverse().unwrap()).unwrap();
        for x in [[0.0, 0.0], [1.0, 2.0], [-3.0, 0.25]] {
            assert!(both.apply(&x).unwrap().max_abs_diff(&x) < 1e-10);
        }
        let sing = AffineMap::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]], &[0.0, 0.0]).unwrap();
        assert!(matches!(sing.inverse(), Err(Error::Singular)));
    }

    #[test]
    fn json_is_row_major() {
        let m = AffineMap::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]], &[1.0, 0.0]).unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"matrix":[[0.0,-1.0],[1.0,0.0]],"translation":[1.0,0.0]}"#);
        let back: AffineMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        assert!(serde_json::from_str::<AffineMap>(r#"{"matrix":[[1.0]],"translation":[1.0,2.0]}"#).is_err());
    }

    #[test]
    fn helper_constructors() {
        let p = AffineMap::signed_permutation(&[1, 0], &[-1.0, 1.0]).unwrap();
        assert_eq!(p.apply(&[3.0, 5.0]).unwrap().coords(), &[-5.0, 3.0]);
        assert!(AffineMap::signed_permutation(&[0, 0], &[1.0, 1.0]).is_err());
        let f = AffineMap::reflection(2, 0, 0.5).unwrap();
        assert_eq!(f.apply(&[0.0, 7.0]).unwrap().coords(), &[1.0, 7.0]);
        assert!(f.is_orthogonal(0.0));
    }
}
