//! Wild maps that are isometric on every large sphere surface but not
//! globally, and generators of positive and adversarial patch atlases.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::atlas::{Patch, PatchAtlas};
use crate::error::{check_dim, Error, Result};
use crate::maps::{isometry_defect, AffineMap, MapOracle, PointMap};
use crate::space::{sample_sphere, Ball, NormDescriptor, NormKind, Point, SphereSurface};

/// Pair defects at or below this are treated as floating noise.
pub const DEFECT_NOISE: f64 = 1e-12;

/// Number of interior knots of the seeded radial warp.
const SCRAMBLE_KNOTS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WildKind {
    /// `x ↦ ‖x‖·x` inside the unit ball.
    RadialSquare,
    /// `x ↦ φ(‖x‖)·x/‖x‖` inside the unit ball, `φ` a seeded increasing
    /// piecewise-linear bijection of `[0, 1]`.
    SeededScramble,
}

impl fmt::Display for WildKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WildKind::RadialSquare => "radial-square",
            WildKind::SeededScramble => "seeded-scramble",
        })
    }
}

impl FromStr for WildKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "radial-square" => Ok(WildKind::RadialSquare),
            "seeded-scramble" => Ok(WildKind::SeededScramble),
            _ => Err(Error::Parse(format!("unknown wild map kind {s:?}"))),
        }
    }
}

/// Bijection of ℝⁿ that is the identity outside the open unit ball and a
/// radial warp inside it.
#[derive(Clone, Debug)]
pub struct WildMap {
    kind: WildKind,
    norm: NormDescriptor,
    /// `(t, φ(t))` breakpoints from `(0, 0)` to `(1, 1)`.
    knots: Vec<(f64, f64)>,
}

impl WildMap {
    pub fn new(norm: &NormDescriptor, kind: WildKind, seed: u64) -> Self {
        let knots = match kind {
            WildKind::RadialSquare => Vec::new(),
            WildKind::SeededScramble => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let steps: Vec<f64> = (0..=SCRAMBLE_KNOTS).map(|_| rng.random_range(0.2..1.0)).collect();
                let total: f64 = steps.iter().sum();
                let mut acc = 0.0;
                let mut knots = vec![(0.0, 0.0)];
                for (i, s) in steps.iter().enumerate() {
                    acc += s / total;
                    let t = (i + 1) as f64 / (SCRAMBLE_KNOTS + 1) as f64;
                    knots.push((t, if i == SCRAMBLE_KNOTS { 1.0 } else { acc }));
                }
                knots
            }
        };
        Self {
            kind,
            norm: norm.clone(),
            knots,
        }
    }

    pub fn kind(&self) -> WildKind {
        self.kind
    }

    /// New radius of a point at radius `t < 1`.
    fn warp(&self, t: f64) -> f64 {
        match self.kind {
            WildKind::RadialSquare => t * t,
            WildKind::SeededScramble => {
                let k = self.knots.partition_point(|&(s, _)| s <= t).clamp(1, self.knots.len() - 1);
                let ((t0, v0), (t1, v1)) = (self.knots[k - 1], self.knots[k]);
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
        }
    }
}

impl PointMap for WildMap {
    fn dim(&self) -> usize {
        self.norm.dim()
    }

    fn map_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), x.len())?;
        let t = self.norm.eval(x);
        if t >= 1.0 || t == 0.0 {
            return Ok(x.to_vec());
        }
        let s = self.warp(t) / t;
        Ok(x.iter().map(|v| v * s).collect())
    }

    fn describe(&self) -> String {
        format!("wild:{}", self.kind)
    }
}

/// Whole-space oracle for a [`WildMap`]. The seed only affects
/// [`WildKind::SeededScramble`].
pub fn wild_ball_map(norm: &NormDescriptor, kind: WildKind, seed: u64) -> Result<MapOracle> {
    MapOracle::whole(Arc::new(WildMap::new(norm, kind, seed)), norm.clone())
}

/// `‖x0‖ + 2`: every point of `S(x0, ε)` then has norm at least 2.
pub fn sphere_epsilon(x0: &Point, norm: &NormDescriptor) -> Result<f64> {
    Ok(norm.norm(x0)? + 2.0)
}

/// Whether `U` restricted to an η-sample of `S(x0, ε)` has isometry defect
/// at most τ.
pub fn sphere_restriction_check<M: PointMap + ?Sized>(
    map: &M,
    x0: &Point,
    eps: f64,
    norm: &NormDescriptor,
    eta: f64,
    tau: f64,
) -> Result<bool> {
    Ok(sphere_restriction_defect(map, x0, eps, norm, eta)? <= tau)
}

/// The defect measured by [`sphere_restriction_check`].
pub fn sphere_restriction_defect<M: PointMap + ?Sized>(
    map: &M,
    x0: &Point,
    eps: f64,
    norm: &NormDescriptor,
    eta: f64,
) -> Result<f64> {
    let sphere = SphereSurface::new(x0.clone(), eps)?;
    let cloud = sample_sphere(norm, &sphere, eta)?;
    isometry_defect(map, &cloud, norm)
}

/// `|d(U(x), U(x')) − d(x, x')|`.
pub fn pair_defect<M: PointMap + ?Sized>(map: &M, x: &[f64], y: &[f64], norm: &NormDescriptor) -> Result<f64> {
    let (ux, uy) = (map.map_point(x)?, map.map_point(y)?);
    Ok((norm.dist(&ux, &uy) - norm.dist(x, y)).abs())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum DefectSearch {
    Found { x: Point, x_prime: Point, defect: f64 },
    NotFound { budget: usize },
}

/// Seeded random search over `budget` pairs of the region for the largest
/// pair defect; reports not-found when nothing exceeds [`DEFECT_NOISE`].
pub fn global_defect_witness<M: PointMap + ?Sized>(
    map: &M,
    region: &Ball,
    norm: &NormDescriptor,
    seed: u64,
    budget: usize,
) -> Result<DefectSearch> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(Point, Point, f64)> = None;
    for _ in 0..budget {
        let x = random_in_ball(&mut rng, region, norm);
        let y = random_in_ball(&mut rng, region, norm);
        let e = pair_defect(map, &x, &y, norm)?;
        if best.as_ref().is_none_or(|b| e > b.2) {
            best = Some((x, y, e));
        }
    }
    Ok(match best {
        Some((x, x_prime, defect)) if defect > DEFECT_NOISE => DefectSearch::Found { x, x_prime, defect },
        _ => DefectSearch::NotFound { budget },
    })
}

/// Seeded affine isometry of `norm` with translation in `[−2, 2]^dim`.
///
/// The linear part is a product of plane rotations for the Euclidean norm, a
/// signed permutation for unweighted ℓp, and `±I` otherwise.
pub fn random_isometry(rng: &mut ChaCha8Rng, norm: &NormDescriptor) -> AffineMap {
    let n = norm.dim();
    let t: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
    let sign = |rng: &mut ChaCha8Rng| if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let linear = match norm.kind() {
        NormKind::Lp { p } if *p == 2.0 => {
            let mut m = AffineMap::identity(n);
            for i in 0..n {
                for j in i + 1..n {
                    let theta = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                    let (s, c) = theta.sin_cos();
                    let mut rows = AffineMap::identity(n).rows();
                    rows[i][i] = c;
                    rows[i][j] = -s;
                    rows[j][i] = s;
                    rows[j][j] = c;
                    let givens = AffineMap::from_rows(&rows, &vec![0.0; n]).expect("square rows");
                    m = givens.compose(&m).expect("same dimension");
                }
            }
            m
        }
        NormKind::Lp { .. } => {
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                perm.swap(i, rng.random_range(0..=i));
            }
            let signs: Vec<f64> = (0..n).map(|_| sign(rng)).collect();
            AffineMap::signed_permutation(&perm, &signs).expect("valid permutation")
        }
        _ => {
            let s = sign(rng);
            let rows: Vec<Vec<f64>> = (0..n).map(|i| Point::axis(n, i, s).into_vec()).collect();
            AffineMap::from_rows(&rows, &vec![0.0; n]).expect("square rows")
        }
    };
    AffineMap::translation_by(&t).compose(&linear).expect("same dimension")
}

/// Uniform point of the ball by rejection from its bounding box.
pub fn random_in_ball(rng: &mut ChaCha8Rng, ball: &Ball, norm: &NormDescriptor) -> Point {
    let reach = ball.radius() * norm.box_bound();
    loop {
        let x: Vec<f64> = ball
            .center()
            .iter()
            .map(|c| c + rng.random_range(-reach..=reach))
            .collect();
        if norm.dist(&x, ball.center()) <= ball.radius() {
            return Point::from(x);
        }
    }
}

/// Lattice centers `c + spacing·k` close enough to the region that their
/// patches can cover it.
fn grid_centers(region: &Ball, norm: &NormDescriptor, spacing: f64) -> Vec<Point> {
    let dim = norm.dim();
    let limit = region.radius() + spacing * norm.sign_vector_norm() / 2.0;
    let m = (limit * norm.box_bound() / spacing).ceil() as i64;
    let mut k = vec![-m; dim];
    let mut out = Vec::new();
    loop {
        let offset: Vec<f64> = k.iter().map(|&ki| spacing * ki as f64).collect();
        if norm.eval(&offset) <= limit {
            out.push(region.center().add(&offset));
        }
        let mut axis = 0;
        loop {
            if axis == dim {
                return out;
            }
            if k[axis] < m {
                k[axis] += 1;
                break;
            }
            k[axis] = -m;
            axis += 1;
        }
    }
}

fn check_geometry(patch_radius: f64, spacing: f64) -> Result<()> {
    if !(patch_radius > 0.0 && spacing > 0.0) {
        return Err(Error::InvalidParameter("patch radius and spacing must be positive".into()));
    }
    if spacing >= 2.0 * patch_radius {
        return Err(Error::InvalidParameter(format!(
            "spacing {spacing} leaves gaps between patches of radius {patch_radius}"
        )));
    }
    Ok(())
}

/// Grid atlas whose every patch carries `g`. A patch radius above the region
/// radius yields the single patch at the region center.
pub fn make_atlas_from_global(
    g: &AffineMap,
    region: &Ball,
    norm: &NormDescriptor,
    patch_radius: f64,
    spacing: f64,
) -> Result<PatchAtlas> {
    check_geometry(patch_radius, spacing)?;
    check_dim(norm.dim(), g.dim())?;
    let rule: Arc<dyn PointMap> = Arc::new(g.clone());
    if patch_radius > region.radius() {
        let p = Patch::new(region.center().clone(), patch_radius, rule, norm)?;
        return PatchAtlas::new(norm.clone(), region.clone(), vec![p]);
    }
    let patches = grid_centers(region, norm, spacing)
        .into_iter()
        .map(|c| Patch::new(c, patch_radius, rule.clone(), norm))
        .collect::<Result<_>>()?;
    PatchAtlas::new(norm.clone(), region.clone(), patches)
}

/// Grid atlas using `g1` for centers strictly below the region center along
/// `split_axis` and `g2` for the rest.
pub fn make_adversarial_atlas(
    g1: &AffineMap,
    g2: &AffineMap,
    region: &Ball,
    norm: &NormDescriptor,
    split_axis: usize,
    patch_radius: f64,
    spacing: f64,
) -> Result<PatchAtlas> {
    check_geometry(patch_radius, spacing)?;
    check_dim(norm.dim(), g1.dim())?;
    check_dim(norm.dim(), g2.dim())?;
    if split_axis >= norm.dim() {
        return Err(Error::InvalidParameter(format!("split axis {split_axis} out of range")));
    }
    if g1 == g2 {
        return Err(Error::InvalidParameter("the two maps coincide; the atlas would not be adversarial".into()));
    }
    let split = region.center()[split_axis];
    let (r1, r2): (Arc<dyn PointMap>, Arc<dyn PointMap>) = (Arc::new(g1.clone()), Arc::new(g2.clone()));
    let patches = grid_centers(region, norm, spacing)
        .into_iter()
        .map(|c| {
            let rule = if c[split_axis] < split { r1.clone() } else { r2.clone() };
            Patch::new(c, patch_radius, rule, norm)
        })
        .collect::<Result<_>>()?;
    PatchAtlas::new(norm.clone(), region.clone(), patches)
}
