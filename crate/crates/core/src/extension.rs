//! Extension of a ball isometry to a global affine isometry, the ray-growth
//! schedule, and the fixed-ball doubling certifier.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::error::{Error, Result};
use crate::maps::{fit_affine, isometry_defect, max_deviation, AffineMap, Composed, MapOracle, PointMap, SampledMap};
use crate::space::{sample_ball, Ball, NormDescriptor, Point, PointCloud, ProximityIndex};

/// Default multiplier on τ for residual certification.
pub const DEFAULT_CERTIFY_FACTOR: f64 = 10.0;

/// Default cap on the number of cloud points used for all-pairs defects.
pub const DEFAULT_PAIR_BUDGET: usize = 1200;

/// Pipeline stage that rejected the input.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Precondition,
    InteriorWitness,
    LocalAffinization,
    Inversion,
    Propagation,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Precondition => "precondition",
            Stage::InteriorWitness => "interior-witness",
            Stage::LocalAffinization => "local-affinization",
            Stage::Inversion => "inversion",
            Stage::Propagation => "propagation",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, Error, PartialEq, Serialize)]
#[error("{stage} stage failed: {detail}")]
pub struct ExtensionError {
    pub stage: Stage,
    pub detail: String,
    /// The quantity that exceeded its bound, when there is one.
    pub measured: Option<f64>,
}

impl ExtensionError {
    fn new(stage: Stage, detail: impl Into<String>) -> Self {
        Self {
            stage,
            detail: detail.into(),
            measured: None,
        }
    }

    fn measured(stage: Stage, detail: impl Into<String>, value: f64) -> Self {
        Self {
            stage,
            detail: detail.into(),
            measured: Some(value),
        }
    }

    fn from_error(stage: Stage, e: Error) -> Self {
        Self::new(stage, e.to_string())
    }
}

/// `f(B(x1, r1)) = B(y1, r1)`, verified at resolution η.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InteriorWitness {
    pub y1: Point,
    pub x1: Point,
    pub r1: f64,
}

/// Residual of `F = g⁻¹∘f` on the cloud points of one schedule ball.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShellRecord {
    pub lambda: f64,
    pub center: Point,
    pub radius: f64,
    pub points: usize,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtensionReport {
    pub g: AffineMap,
    /// `max ‖F(x) − x‖` over the sampled ball.
    pub residual_on_ball: f64,
    pub interior_witness: InteriorWitness,
    pub schedule: Vec<f64>,
    pub shells: Vec<ShellRecord>,
    pub sample_size: usize,
    pub eta: f64,
    pub tau: f64,
}

impl ExtensionReport {
    /// CSV rows `lambda,radius,points,residual` for plotting residual vs shell.
    pub fn write_shell_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["lambda", "radius", "points", "residual"])?;
        for s in &self.shells {
            out.write_record([
                format!("{:e}", s.lambda),
                format!("{:e}", s.radius),
                s.points.to_string(),
                format!("{:e}", s.residual),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionOptions {
    /// Place the interior witness at `center + λ0·R·u` (u the first unit
    /// axis direction) with `r1 = (1 − λ0)·R/2` instead of at the center.
    pub witness_lambda: f64,
    pub certify_factor: f64,
    pub pair_budget: usize,
}

impl Default for ExtensionOptions {
    fn default() -> Self {
        Self {
            witness_lambda: 0.0,
            certify_factor: DEFAULT_CERTIFY_FACTOR,
            pair_budget: DEFAULT_PAIR_BUDGET,
        }
    }
}

fn unit_axis(norm: &NormDescriptor) -> Vec<f64> {
    let mut u = vec![0.0; norm.dim()];
    u[0] = 1.0;
    let s = norm.eval(&u);
    u.iter_mut().for_each(|v| *v /= s);
    u
}

/// Interior witness at the ball center with `r1 = R/2`.
pub fn interior_witness(
    f: &MapOracle,
    ball: &Ball,
    norm: &NormDescriptor,
    eta: f64,
    tau: f64,
) -> Result<InteriorWitness, ExtensionError> {
    interior_witness_at(f, ball, norm, eta, tau, 0.0)
}

/// Interior witness at `center + λ0·R·u` with `r1 = (1 − λ0)·R/2`.
///
/// Verifies that the images of an η-sample of `B(x1, r1)` come within `η + τ`
/// of every point of an η-sample of `B(f(x1), r1)`.
pub fn interior_witness_at(
    f: &MapOracle,
    ball: &Ball,
    norm: &NormDescriptor,
    eta: f64,
    tau: f64,
    lambda0: f64,
) -> Result<InteriorWitness, ExtensionError> {
    let stage = Stage::InteriorWitness;
    if !(0.0..1.0).contains(&lambda0) {
        return Err(ExtensionError::new(stage, format!("witness position {lambda0} outside [0, 1)")));
    }
    let r = ball.radius();
    let x1 = ball.center().offset(&unit_axis(norm), lambda0 * r);
    let r1 = (1.0 - lambda0) * r / 2.0;
    let sub = Ball::new(x1.clone(), r1).map_err(|e| ExtensionError::from_error(stage, e))?;
    let y1 = f.apply(&x1).map_err(|e| ExtensionError::from_error(stage, e))?;
    let target_ball = Ball::new(y1.clone(), r1).map_err(|e| ExtensionError::from_error(stage, e))?;

    let source = sample_ball(norm, &sub, eta).map_err(|e| ExtensionError::from_error(stage, e))?;
    let target = sample_ball(norm, &target_ball, eta).map_err(|e| ExtensionError::from_error(stage, e))?;
    let mut images = PointCloud::new(norm.dim(), eta).map_err(|e| ExtensionError::from_error(stage, e))?;
    for x in source.iter() {
        let y = f.map_point(x).map_err(|e| ExtensionError::from_error(stage, e))?;
        images.push(&y).map_err(|e| ExtensionError::from_error(stage, e))?;
    }
    let reach = eta + tau;
    let index = ProximityIndex::new(&images, reach * norm.box_bound());
    let missed = target.iter().filter(|t| !index.any_within(t, reach, norm)).count();
    if missed > 0 {
        return Err(ExtensionError::measured(
            stage,
            format!(
                "image of B({x1}, {r1}) misses {missed} of {} target samples of B({y1}, {r1})",
                target.len()
            ),
            missed as f64 / target.len() as f64,
        ));
    }
    Ok(InteriorWitness { y1, x1, r1 })
}

/// Fits an affine map to `f` on an η-sample of `B(x1, r1)` and certifies that
/// it matches `f` and is isometric there within τ.
pub fn local_affinization(
    f: &MapOracle,
    x1: &Point,
    r1: f64,
    norm: &NormDescriptor,
    eta: f64,
    tau: f64,
) -> Result<AffineMap, ExtensionError> {
    local_affinization_with(f, x1, r1, norm, eta, tau, DEFAULT_PAIR_BUDGET)
}

fn local_affinization_with(
    f: &MapOracle,
    x1: &Point,
    r1: f64,
    norm: &NormDescriptor,
    eta: f64,
    tau: f64,
    pair_budget: usize,
) -> Result<AffineMap, ExtensionError> {
    let stage = Stage::LocalAffinization;
    let err = |e: Error| ExtensionError::from_error(stage, e);
    let sub = Ball::new(x1.clone(), r1).map_err(err)?;
    let cloud = sample_ball(norm, &sub, eta).map_err(err)?;
    let pairs = SampledMap::tabulate(f, cloud.to_points()).map_err(err)?;
    let g = fit_affine(&pairs).map_err(err)?;
    let (dev, _) = max_deviation(&g, f, &cloud, norm).map_err(err)?;
    if dev > tau {
        return Err(ExtensionError::measured(
            stage,
            format!("affine fit deviates from the map by {dev:e} > τ = {tau:e}"),
            dev,
        ));
    }
    let defect = isometry_defect(&g, &cloud.subsample(pair_budget), norm).map_err(err)?;
    if defect > tau {
        return Err(ExtensionError::measured(
            stage,
            format!("affine fit has isometry defect {defect:e} > τ = {tau:e}"),
            defect,
        ));
    }
    Ok(g)
}

/// `λ0 > λ1 > … > 0` with `λ_{k+1} = max(0, 2λ_k − 1 + ε)`, `ε = (1 − λ0)/8`.
pub fn ray_growth_schedule(lambda0: f64) -> Result<Vec<f64>> {
    if !(0.0..1.0).contains(&lambda0) {
        return Err(Error::InvalidParameter(format!("λ0 must lie in [0, 1), got {lambda0}")));
    }
    let eps = (1.0 - lambda0) / 8.0;
    let mut out = vec![lambda0];
    let mut lambda = lambda0;
    while lambda > 0.0 {
        lambda = (2.0 * lambda - 1.0 + eps).max(0.0);
        out.push(lambda);
    }
    Ok(out)
}

/// Precondition failures of [`doubling_fixed_check`].
#[derive(Debug, Error)]
pub enum DoublingPrecondition {
    #[error("map is not isometric on the cloud: defect {defect:e} > τ = {tau:e}")]
    NotIsometric { defect: f64, tau: f64 },
    #[error("map moves an inner-ball point by {displacement:e} > τ = {tau:e}")]
    NotFixed { displacement: f64, tau: f64 },
    #[error(transparent)]
    Map(#[from] Error),
}

/// Given `F` isometric on `D` within τ and moving no point of `D ∩ B(x0, r)`
/// by more than τ, reports whether it also moves no point of
/// `D ∩ B(x0, 2r)` by more than `10τ`.
pub fn doubling_fixed_check<M: PointMap + ?Sized>(
    map: &M,
    x0: &Point,
    r: f64,
    cloud: &PointCloud,
    norm: &NormDescriptor,
    tau: f64,
) -> Result<bool, DoublingPrecondition> {
    let defect = isometry_defect(map, cloud, norm)?;
    if defect > tau {
        return Err(DoublingPrecondition::NotIsometric { defect, tau });
    }
    let mut inner = 0.0f64;
    let mut outer = 0.0f64;
    for x in cloud.iter() {
        let d = norm.dist(x, x0);
        if d > 2.0 * r {
            continue;
        }
        let moved = norm.dist(&map.map_point(x)?, x);
        if d <= r {
            inner = inner.max(moved);
        }
        outer = outer.max(moved);
    }
    if inner > tau {
        return Err(DoublingPrecondition::NotFixed {
            displacement: inner,
            tau,
        });
    }
    Ok(outer <= DEFAULT_CERTIFY_FACTOR * tau)
}

/// See [`extend_ball_isometry_with`].
pub fn extend_ball_isometry(
    f: &MapOracle,
    ball: &Ball,
    norm: &NormDescriptor,
    eta: f64,
    tau: f64,
) -> Result<ExtensionReport, ExtensionError> {
    extend_ball_isometry_with(f, ball, norm, eta, tau, &ExtensionOptions::default())
}

/// Interior witness, local affinization, inversion, then verification of
/// `F = g⁻¹∘f` ball by ball along the ray schedule, ending with the whole
/// ball.
pub fn extend_ball_isometry_with(
    f: &MapOracle,
    ball: &Ball,
    norm: &NormDescriptor,
    eta: f64,
    tau: f64,
    opts: &ExtensionOptions,
) -> Result<ExtensionReport, ExtensionError> {
    let pre = |e: Error| ExtensionError::from_error(Stage::Precondition, e);
    if !(tau > 0.0 && tau.is_finite()) {
        return Err(ExtensionError::new(Stage::Precondition, format!("τ must be positive, got {tau}")));
    }
    if ball.dim() != norm.dim() || f.dim() != norm.dim() {
        return Err(ExtensionError::new(Stage::Precondition, "dimension mismatch between map, ball and norm"));
    }
    let cloud = sample_ball(norm, ball, eta).map_err(pre)?;
    let defect = isometry_defect(f, &cloud.subsample(opts.pair_budget), norm).map_err(pre)?;
    if defect > tau {
        return Err(ExtensionError::measured(
            Stage::Precondition,
            format!("map is not isometric on the sampled ball: defect {defect:e} > τ = {tau:e}"),
            defect,
        ));
    }

    let witness = interior_witness_at(f, ball, norm, eta, tau, opts.witness_lambda)?;
    let g = local_affinization_with(f, &witness.x1, witness.r1, norm, eta, tau, opts.pair_budget)?;
    let g_inv = g
        .inverse()
        .map_err(|e| ExtensionError::from_error(Stage::Inversion, e))?;
    let residual_map = Composed { outer: g_inv, inner: f };

    let prop = |e: Error| ExtensionError::from_error(Stage::Propagation, e);
    let mut residuals = Vec::with_capacity(cloud.len());
    for x in cloud.iter() {
        let fx = residual_map.map_point(x).map_err(prop)?;
        residuals.push(norm.dist(&fx, x));
    }
    let bound = opts.certify_factor * tau;
    let check = |center: &Point, radius: f64, lambda: f64| -> Result<ShellRecord, ExtensionError> {
        let mut worst = 0.0f64;
        let mut points = 0;
        for (x, &res) in cloud.iter().zip(&residuals) {
            if norm.dist(x, center) <= radius * (1.0 + 1e-12) {
                points += 1;
                worst = worst.max(res);
            }
        }
        if worst > bound {
            return Err(ExtensionError::measured(
                Stage::Propagation,
                format!("residual {worst:e} on B({center}, {radius}) exceeds {bound:e}"),
                worst,
            ));
        }
        Ok(ShellRecord {
            lambda,
            center: center.clone(),
            radius,
            points,
            residual: worst,
        })
    };

    let schedule = ray_growth_schedule(opts.witness_lambda).map_err(pre)?;
    let u = unit_axis(norm);
    let r = ball.radius();
    let mut shells = vec![check(&witness.x1, witness.r1, f64::NAN)?];
    for &lambda in &schedule {
        let center = ball.center().offset(&u, lambda * r);
        shells.push(check(&center, (1.0 - lambda) * r, lambda)?);
    }
    let residual_on_ball = residuals.iter().copied().fold(0.0, f64::max);

    Ok(ExtensionReport {
        g,
        residual_on_ball,
        interior_witness: witness,
        schedule,
        shells,
        sample_size: cloud.len(),
        eta,
        tau,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::maps::{Domain, FnMap};

    fn on_ball(m: Arc<dyn PointMap>, ball: &Ball, norm: &NormDescriptor) -> MapOracle {
        MapOracle::new(m, Domain::Ball(ball.clone()), norm.clone()).unwrap()
    }

    #[test]
    fn schedule_examples() {
        assert_eq!(ray_growth_schedule(0.0).unwrap(), vec![0.0]);
        assert_eq!(ray_growth_schedule(0.5).unwrap(), vec![0.5, 1.0 / 16.0, 0.0]);
        assert!(ray_growth_schedule(0.75).unwrap().len() <= 4);
        assert!(ray_growth_schedule(1.0).is_err());
        assert!(ray_growth_schedule(-0.1).is_err());
    }

    #[test]
    fn witness_examples() {
        let n = NormDescriptor::euclidean(2).unwrap();
        let ball = Ball::new(Point::from([0.0, 0.0]), 1.0).unwrap();
        let rot = on_ball(Arc::new(AffineMap::rotation_2d(0.4)), &ball, &n);
        let w = interior_witness(&rot, &ball, &n, 0.05, 1e-9).unwrap();
        assert_eq!(w.x1, Point::from([0.0, 0.0]));
        assert!(w.y1.max_abs() < 1e-15);
        assert_eq!(w.r1, 0.5);

        let shift = on_ball(Arc::new(AffineMap::translation_by(&[3.0, 0.0])), &ball, &n);
        let w = interior_witness(&shift, &ball, &n, 0.05, 1e-9).unwrap();
        assert_eq!(w.y1, Point::from([3.0, 0.0]));
        assert_eq!(w.r1, 0.5);

        let flat = on_ball(Arc::new(FnMap::new("flatten", 2, |x: &[f64]| vec![x[0], 0.0])), &ball, &n);
        let e = interior_witness(&flat, &ball, &n, 0.05, 1e-9).unwrap_err();
        assert_eq!(e.stage, Stage::InteriorWitness);
    }

    #[test]
    fn affinization_examples() {
        let n = NormDescriptor::euclidean(2).unwrap();
        let ball = Ball::new(Point::from([0.5, 0.0]), 1.0).unwrap();
        let truth = AffineMap::translation_by(&[1.0, -2.0])
            .compose(&AffineMap::rotation_2d(-1.1))
            .unwrap();
        let f = on_ball(Arc::new(truth.clone()), &ball, &n);
        let g = local_affinization(&f, ball.center(), 0.5, &n, 0.05, 1e-9).unwrap();
        assert!(g.max_entry_diff(&truth) <= 1e-9);

        let id = on_ball(Arc::new(AffineMap::identity(2)), &ball, &n);
        let g = local_affinization(&id, ball.center(), 0.5, &n, 0.05, 1e-9).unwrap();
        assert!(g.max_entry_diff(&AffineMap::identity(2)) <= 1e-12);

        let wobble = on_ball(
            Arc::new(FnMap::new("wobble", 2, |x: &[f64]| vec![x[0] + 0.1 * (3.0 * x[1]).sin(), x[1]])),
            &ball,
            &n,
        );
        let e = local_affinization(&wobble, ball.center(), 0.5, &n, 0.05, 1e-9).unwrap_err();
        assert_eq!(e.stage, Stage::LocalAffinization);
        assert!(e.measured.unwrap() > 1e-9);
    }

    #[test]
    fn extends_signed_permutation_with_translation() {
        let n = NormDescriptor::max_norm(2).unwrap();
        let ball = Ball::new(Point::from([1.0, 1.0]), 2.0).unwrap();
        let truth = AffineMap::signed_permutation(&[1, 0], &[-1.0, 1.0])
            .unwrap()
            .compose(&AffineMap::translation_by(&[0.5, -3.0]))
            .unwrap();
        let f = on_ball(Arc::new(truth.clone()), &ball, &n);
        let rep = extend_ball_isometry(&f, &ball, &n, 0.1, 1e-9).unwrap();
        assert!(rep.g.max_entry_diff(&truth) <= 1e-9);
        assert!(rep.residual_on_ball <= 1e-9);
        assert_eq!(rep.schedule, vec![0.0]);
    }

    #[test]
    fn off_center_witness_walks_the_schedule() {
        let n = NormDescriptor::lp(3.0, 2).unwrap();
        let ball = Ball::new(Point::from([0.0, 0.0]), 1.0).unwrap();
        let f = on_ball(Arc::new(AffineMap::translation_by(&[0.25, 0.5])), &ball, &n);
        let opts = ExtensionOptions {
            witness_lambda: 0.75,
            ..ExtensionOptions::default()
        };
        let rep = extend_ball_isometry_with(&f, &ball, &n, 0.05, 1e-9, &opts).unwrap();
        assert_eq!(rep.schedule, ray_growth_schedule(0.75).unwrap());
        assert_eq!(rep.shells.len(), rep.schedule.len() + 1);
        assert_eq!(rep.shells.last().unwrap().points, rep.sample_size);
        for w in rep.shells[1..].windows(2) {
            assert!(w[1].points >= w[0].points);
        }
    }

    #[test]
    fn seam_between_two_isometries_is_rejected() {
        let n = NormDescriptor::euclidean(2).unwrap();
        let ball = Ball::new(Point::from([0.0, 0.0]), 1.0).unwrap();
        let seam = FnMap::new("seam", 2, |x: &[f64]| {
            if (x[0] * x[0] + x[1] * x[1]).sqrt() <= 0.5 {
                x.to_vec()
            } else {
                vec![x[0] + 0.2, x[1]]
            }
        });
        let f = on_ball(Arc::new(seam), &ball, &n);
        let e = extend_ball_isometry(&f, &ball, &n, 0.05, 1e-9).unwrap_err();
        assert_eq!(e.stage, Stage::Precondition);
    }

    #[test]
    fn doubling_certifier_examples() {
        let n = NormDescriptor::euclidean(2).unwrap();
        let d = sample_ball(&n, &Ball::new(Point::from([0.0, 0.0]), 3.0).unwrap(), 0.5).unwrap();
        let x0 = Point::from([0.0, 0.0]);
        assert!(doubling_fixed_check(&AffineMap::identity(2), &x0, 1.0, &d, &n, 1e-9).unwrap());
        let rot = AffineMap::rotation_2d(1f64.to_radians());
        assert!(matches!(
            doubling_fixed_check(&rot, &x0, 1.0, &d, &n, 1e-9),
            Err(DoublingPrecondition::NotFixed { .. })
        ));
        let double = AffineMap::from_rows(&[vec![2.0, 0.0], vec![0.0, 2.0]], &[0.0, 0.0]).unwrap();
        assert!(matches!(
            doubling_fixed_check(&double, &x0, 1.0, &d, &n, 1e-9),
            Err(DoublingPrecondition::NotIsometric { .. })
        ));
    }
}
