use serde::{Deserialize, Serialize};

use super::norm::{NormDescriptor, MEMBERSHIP_TOL};
use super::point::Point;
use crate::error::{Error, Result};

/// Closed ball `B(center, radius) = {x : ‖x − center‖ ≤ radius}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBall", into = "RawBall")]
pub struct Ball {
    center: Point,
    radius: f64,
}

/// Sphere surface `S(center, radius) = {x : ‖x − center‖ = radius}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBall", into = "RawBall")]
pub struct SphereSurface {
    center: Point,
    radius: f64,
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("radius must be positive and finite, got {radius}")))
    }
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// Membership with the global slack [`MEMBERSHIP_TOL`].
    pub fn contains(&self, x: &[f64], norm: &NormDescriptor) -> bool {
        norm.dist(x, &self.center) <= self.radius + MEMBERSHIP_TOL
    }

    /// Same center, radius scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Ball> {
        Ball::new(self.center.clone(), self.radius * factor)
    }
}

impl SphereSurface {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        check_radius(radius)?;
        Ok(Self { center, radius })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    /// `|‖x − center‖ − radius| ≤ tol`.
    pub fn contains(&self, x: &[f64], norm: &NormDescriptor, tol: f64) -> bool {
        (norm.dist(x, &self.center) - self.radius).abs() <= tol
    }
}

#[derive(Serialize, Deserialize)]
struct RawBall {
    center: Point,
    radius: f64,
}

impl TryFrom<RawBall> for Ball {
    type Error = Error;
    fn try_from(r: RawBall) -> Result<Self> {
        Ball::new(r.center, r.radius)
    }
}

impl From<Ball> for RawBall {
    fn from(b: Ball) -> Self {
        RawBall {
            center: b.center,
            radius: b.radius,
        }
    }
}

impl TryFrom<RawBall> for SphereSurface {
    type Error = Error;
    fn try_from(r: RawBall) -> Result<Self> {
        SphereSurface::new(r.center, r.radius)
    }
}

impl From<SphereSurface> for RawBall {
    fn from(s: SphereSurface) -> Self {
        RawBall {
            center: s.center,
            radius: s.radius,
        }
    }
}
