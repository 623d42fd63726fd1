//! Map representations (affine, oracle, sampled), isometry defects and
//! affine fitting.

mod affine;
mod defect;
mod sampled;

use std::fmt;
use std::sync::Arc;

pub use affine::{compose, invert, AffineMap};
pub use defect::{isometry_defect, isometry_defect_witness, max_deviation, DefectWitness};
pub use sampled::{fit_affine, SampledMap};

use crate::error::{check_dim, Error, Result};
use crate::space::{Ball, NormDescriptor, Point, SphereSurface, MEMBERSHIP_TOL};

/// Anything that evaluates points of ℝⁿ to points of ℝⁿ.
pub trait PointMap: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;

    fn map_point(&self, x: &[f64]) -> Result<Vec<f64>>;

    /// The closed form, when the map is affine.
    fn as_affine(&self) -> Option<&AffineMap> {
        None
    }

    /// Short human-readable label.
    fn describe(&self) -> String;
}

/// A named closure.
pub struct FnMap<F> {
    name: String,
    dim: usize,
    f: F,
}

impl<F> FnMap<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    pub fn new(name: impl Into<String>, dim: usize, f: F) -> Self {
        Self {
            name: name.into(),
            dim,
            f,
        }
    }
}

impl<F> fmt::Debug for FnMap<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FnMap").field("name", &self.name).field("dim", &self.dim).finish()
    }
}

impl<F> PointMap for FnMap<F>
where
    F: Fn(&[f64]) -> Vec<f64> + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn map_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim, x.len())?;
        Ok((self.f)(x))
    }

    fn describe(&self) -> String {
        self.name.clone()
    }
}

/// Where a [`MapOracle`] may be evaluated.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Whole,
    Ball(Ball),
    Sphere(SphereSurface),
}

/// A map rule together with its declared domain.
#[derive(Clone, Debug)]
pub struct MapOracle {
    rule: Arc<dyn PointMap>,
    domain: Domain,
    norm: NormDescriptor,
}

impl MapOracle {
    pub fn whole(rule: Arc<dyn PointMap>, norm: NormDescriptor) -> Result<Self> {
        Self::new(rule, Domain::Whole, norm)
    }

    pub fn new(rule: Arc<dyn PointMap>, domain: Domain, norm: NormDescriptor) -> Result<Self> {
        check_dim(norm.dim(), rule.dim())?;
        match &domain {
            Domain::Whole => {}
            Domain::Ball(b) => check_dim(norm.dim(), b.dim())?,
            Domain::Sphere(s) => check_dim(norm.dim(), s.dim())?,
        }
        Ok(Self { rule, domain, norm })
    }

    /// Same rule, domain replaced by `ball`.
    pub fn restrict(&self, ball: Ball) -> Result<Self> {
        Self::new(self.rule.clone(), Domain::Ball(ball), self.norm.clone())
    }

    pub fn rule(&self) -> &Arc<dyn PointMap> {
        &self.rule
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn norm(&self) -> &NormDescriptor {
        &self.norm
    }

    pub fn in_domain(&self, x: &[f64]) -> bool {
        match &self.domain {
            Domain::Whole => true,
            Domain::Ball(b) => {
                self.norm.dist(x, b.center()) <= b.radius() + MEMBERSHIP_TOL * (1.0 + b.radius())
            }
            Domain::Sphere(s) => {
                (self.norm.dist(x, s.center()) - s.radius()).abs() <= MEMBERSHIP_TOL * (1.0 + s.radius())
            }
        }
    }

    pub fn apply(&self, x: &[f64]) -> Result<Point> {
        self.map_point(x).map(Point::from)
    }
}

impl PointMap for MapOracle {
    fn dim(&self) -> usize {
        self.rule.dim()
    }

    fn map_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        if !self.in_domain(x) {
            return Err(Error::OutOfDomain { point: x.to_vec() });
        }
        self.rule.map_point(x)
    }

    fn as_affine(&self) -> Option<&AffineMap> {
        self.rule.as_affine()
    }

    fn describe(&self) -> String {
        self.rule.describe()
    }
}

impl<M: PointMap + ?Sized> PointMap for Arc<M> {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn map_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).map_point(x)
    }

    fn as_affine(&self) -> Option<&AffineMap> {
        (**self).as_affine()
    }

    fn describe(&self) -> String {
        (**self).describe()
    }
}

impl<M: PointMap + ?Sized> PointMap for &M {
    fn dim(&self) -> usize {
        (**self).dim()
    }

    fn map_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        (**self).map_point(x)
    }

    fn as_affine(&self) -> Option<&AffineMap> {
        (**self).as_affine()
    }

    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// `outer ∘ inner` for arbitrary point maps.
#[derive(Debug, Clone)]
pub struct Composed<A, B> {
    pub outer: A,
    pub inner: B,
}

impl<A: PointMap, B: PointMap> PointMap for Composed<A, B> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn map_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        let y = self.inner.map_point(x)?;
        self.outer.map_point(&y)
    }

    fn describe(&self) -> String {
        format!("{} ∘ {}", self.outer.describe(), self.inner.describe())
    }
}
