//! Geometric substrate: norms, points, balls, sphere surfaces, point clouds
//! and their lattice discretizations.

mod ball;
mod cloud;
mod index;
mod norm;
mod point;
mod sampling;

pub use ball::{Ball, SphereSurface};
pub use cloud::{farthest_distances, hull_candidates, set_diameter, PointCloud};
pub use index::ProximityIndex;
pub use norm::{NormDescriptor, NormKind, MEMBERSHIP_TOL};
pub use point::Point;
pub use sampling::{lattice_pitch, sample_ball, sample_sphere};

pub(crate) use cloud::lex_cmp;
pub(crate) use sampling::scan_convex;

/// Free-function form of [`NormDescriptor::norm`].
pub fn norm(v: &[f64], n: &NormDescriptor) -> crate::Result<f64> {
    n.norm(v)
}

/// Free-function form of [`NormDescriptor::distance`].
pub fn distance(x: &[f64], y: &[f64], n: &NormDescriptor) -> crate::Result<f64> {
    n.distance(x, y)
}
