//! The acceptance battery: seeded, deterministic checks of every headline
//! property, shared by the `suite` subcommand and the acceptance tests.

use std::sync::Arc;

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::atlas::{stitch, surjectivity_coverage, Patch, PatchAtlas, UndeterminedReason, Verdict};
use crate::error::Result;
use crate::extension::{doubling_fixed_check, extend_ball_isometry, ray_growth_schedule, DoublingPrecondition};
use crate::gallery::{
    global_defect_witness, make_adversarial_atlas, make_atlas_from_global, pair_defect, random_in_ball, random_isometry,
    sphere_epsilon, sphere_restriction_check, sphere_restriction_defect, wild_ball_map, DefectSearch, WildKind,
};
use crate::maps::{AffineMap, FnMap, PointMap};
use crate::midpoint::{check_reflection_symmetry, initial_lens, metric_midpoint, metric_midpoint_anchored, refine_once};
use crate::space::{sample_ball, set_diameter, Ball, NormDescriptor, Point};

/// Outcome of one acceptance criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Which operations a criterion exercises.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoverageEntry {
    pub operation: String,
    pub exercised_by: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub criteria: Vec<CriterionResult>,
    pub coverage: Vec<CoverageEntry>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.criteria.iter().all(|c| c.passed)
    }

    /// Fixed-width pass/fail table, one line per criterion.
    pub fn table(&self) -> String {
        let mut out = format!("seed {}\n", self.seed);
        for c in &self.criteria {
            out.push_str(&format!(
                "[{}] {:>2} {:<34} {}\n",
                if c.passed { "PASS" } else { "FAIL" },
                c.id,
                c.name,
                c.detail
            ));
        }
        out
    }
}

/// Operations and the criteria that call them; the `run` entry point is
/// exercised by invoking the battery itself.
const COVERAGE: &[(&str, &[u8])] = &[
    ("norm", &[1, 2, 3, 5, 6, 7]),
    ("distance", &[1, 2, 3, 5, 6, 7]),
    ("sample_ball", &[3, 5, 6]),
    ("sample_sphere", &[7]),
    ("set_diameter", &[1, 2]),
    ("initial_lens", &[1, 2]),
    ("refine_once", &[2]),
    ("metric_midpoint", &[1, 2]),
    ("metric_midpoint_anchored", &[2]),
    ("check_reflection_symmetry", &[2]),
    ("apply", &[3, 6, 7]),
    ("isometry_defect", &[3, 5, 7]),
    ("fit_affine", &[3]),
    ("compose", &[3]),
    ("invert", &[3]),
    ("interior_witness", &[3, 6]),
    ("local_affinization", &[3, 6]),
    ("ray_growth_schedule", &[3, 4]),
    ("doubling_fixed_check", &[5]),
    ("extend_ball_isometry", &[3, 6]),
    ("cover_check", &[6]),
    ("build_cover_graph", &[6]),
    ("select_seed", &[6]),
    ("stitch", &[6]),
    ("surjectivity_coverage", &[6]),
    ("wild_ball_map", &[7]),
    ("sphere_epsilon", &[7]),
    ("sphere_restriction_check", &[7]),
    ("global_defect_witness", &[7]),
    ("make_atlas_from_global", &[6]),
    ("make_adversarial_atlas", &[6]),
    ("run", &[1, 2, 3, 4, 5, 6, 7]),
];

pub fn coverage_manifest() -> Vec<CoverageEntry> {
    COVERAGE
        .iter()
        .map(|&(operation, ids)| CoverageEntry {
            operation: operation.to_string(),
            exercised_by: ids.to_vec(),
        })
        .collect()
}

/// Runs criteria 1–7. Criterion 8 (byte-identical reruns) is checked by
/// running the battery twice and comparing its output.
pub fn run_suite(seed: u64) -> SuiteReport {
    let (c1, c2) = midpoint_sweep(seed);
    let criteria = vec![
        c1,
        c2,
        extension_recovery(seed),
        ray_schedule(),
        doubling_fuzz(seed, DOUBLING_TRIALS),
        stitch_soundness(seed),
        wild_maps(seed),
    ];
    SuiteReport {
        seed,
        criteria,
        coverage: coverage_manifest(),
    }
}

fn rng_for(seed: u64, criterion: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ criterion.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn result(id: u8, name: &str, passed: bool, detail: String) -> CriterionResult {
    CriterionResult {
        id,
        name: name.to_string(),
        passed,
        detail,
    }
}

/// The six norms of the midpoint sweep in dimension `dim`.
pub fn sweep_norms(dim: usize) -> Vec<NormDescriptor> {
    vec![
        NormDescriptor::l1(dim).expect("valid"),
        NormDescriptor::lp(1.5, dim).expect("valid"),
        NormDescriptor::euclidean(dim).expect("valid"),
        NormDescriptor::lp(3.0, dim).expect("valid"),
        NormDescriptor::max_norm(dim).expect("valid"),
        NormDescriptor::hexagonal(dim).expect("valid"),
    ]
}

/// Pairs per (norm, dimension) cell of the midpoint sweep.
pub const SWEEP_PAIRS: usize = 50;

/// Criteria 1 and 2: halving along every trace and recovery of the midpoint.
pub fn midpoint_sweep(seed: u64) -> (CriterionResult, CriterionResult) {
    let mut rng = rng_for(seed, 1);
    let mut halving_checks = 0usize;
    let mut halving_fail: Option<String> = None;
    let mut runs = 0usize;
    let mut recovery_fail: Option<String> = None;
    let mut worst_ratio = 0.0f64;
    let mut worst_anchored = 0.0f64;
    for dim in [2usize, 3] {
        for norm in sweep_norms(dim) {
            for _ in 0..SWEEP_PAIRS {
                let x0 = Point::from((0..dim).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>());
                let x1 = Point::from((0..dim).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>());
                let d = norm.dist(&x0, &x1);
                let (eta, tol) = (d / 200.0, d / 100.0);
                runs += 1;
                match metric_midpoint(&x0, &x1, &norm, eta, tol) {
                    Ok((m, trace)) => {
                        for w in trace.diameters.windows(2) {
                            halving_checks += 1;
                            if w[1] > 0.5 * w[0] + 4.0 * eta && halving_fail.is_none() {
                                halving_fail =
                                    Some(format!("{} {x0}->{x1}: {:e} after {:e}", norm.label(), w[1], w[0]));
                            }
                        }
                        let err = norm.dist(&m, &x0.midpoint(&x1));
                        worst_ratio = worst_ratio.max(err / (tol + 2.0 * eta));
                        if err > tol + 2.0 * eta && recovery_fail.is_none() {
                            recovery_fail = Some(format!("{} {x0}->{x1}: error {err:e}", norm.label()));
                        }
                        // Same pair on a lattice that need not contain the midpoint.
                        match metric_midpoint_anchored(&x0, &x1, &norm, eta, tol) {
                            Ok((ma, _)) => {
                                let err = norm.dist(&ma, &x0.midpoint(&x1));
                                worst_anchored = worst_anchored.max(err / (tol + 2.0 * eta));
                                if err > tol + 2.0 * eta && recovery_fail.is_none() {
                                    recovery_fail =
                                        Some(format!("{} {x0}->{x1}: anchored error {err:e}", norm.label()));
                                }
                            }
                            Err(e) => {
                                recovery_fail.get_or_insert(format!("{} {x0}->{x1}: anchored {e}", norm.label()));
                            }
                        }
                    }
                    Err(e) => {
                        let msg = format!("{} {x0}->{x1}: {e}", norm.label());
                        halving_fail.get_or_insert(msg.clone());
                        recovery_fail.get_or_insert(msg);
                    }
                }
            }
        }
    }
    let c1 = result(
        1,
        "delta-halving",
        halving_fail.is_none(),
        halving_fail.unwrap_or(format!("{runs} traces, {halving_checks} consecutive pairs within 0.5*delta + 4*eta")),
    );

    // The documented lens {1}×[−1,1] collapses after one refinement.
    let linf = NormDescriptor::max_norm(2).expect("valid");
    let (a, b) = (Point::from([0.0, 0.0]), Point::from([2.0, 0.0]));
    let eta = 0.01;
    let lens_ok = (|| -> Result<(bool, String)> {
        let lens = initial_lens(&a, &b, &linf, eta)?;
        let symmetric = check_reflection_symmetry(&lens, &Point::from([1.0, 0.0]), &linf, 1e-12);
        let once = refine_once(&lens, &linf, 1e-12)?;
        let diam = set_diameter(&once, &linf)?;
        let (_, trace) = metric_midpoint(&a, &b, &linf, eta, 2.0 * eta)?;
        let ok = symmetric && diam <= 2.0 * eta && trace.refinements() == 1;
        Ok((
            ok,
            format!(
                "lens of {} points, symmetric={symmetric}, diameter after one step {diam:e}",
                lens.len()
            ),
        ))
    })();
    let (lens_pass, lens_detail) = lens_ok.unwrap_or_else(|e| (false, e.to_string()));
    let passed = recovery_fail.is_none() && lens_pass;
    let detail = match recovery_fail {
        Some(f) => f,
        None => format!(
            "{runs} midpoints, worst error {worst_ratio:.2e} (anchored lattice {worst_anchored:.3}) of tol+2*eta; {lens_detail}"
        ),
    };
    (c1, result(2, "midpoint recovery", passed, detail))
}

/// Criterion 3: recovery and uniqueness of ball extensions.
pub fn extension_recovery(seed: u64) -> CriterionResult {
    let mut rng = rng_for(seed, 3);
    let norms = [
        NormDescriptor::euclidean(2).expect("valid"),
        NormDescriptor::l1(2).expect("valid"),
        NormDescriptor::max_norm(2).expect("valid"),
    ];
    let tau = 1e-9;
    let mut worst = 0.0f64;
    let mut worst_pair = 0.0f64;
    let mut failure = None;
    for k in 0..100 {
        let norm = &norms[k % 3];
        let truth = random_isometry(&mut rng, norm);
        let center = Point::from([rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)]);
        let radius = rng.random_range(0.5..2.0);
        let ball = Ball::new(center, radius).expect("positive radius");
        let f = match crate::maps::MapOracle::new(
            Arc::new(truth.clone()),
            crate::maps::Domain::Ball(ball.clone()),
            norm.clone(),
        ) {
            Ok(f) => f,
            Err(e) => {
                failure.get_or_insert(e.to_string());
                continue;
            }
        };
        let mut gs = Vec::new();
        for eta in [radius / 50.0, radius / 100.0] {
            match extend_ball_isometry(&f, &ball, norm, eta, tau) {
                Ok(rep) => gs.push(rep.g),
                Err(e) => {
                    failure.get_or_insert(format!("trial {k} ({}): {e}", norm.label()));
                }
            }
        }
        if gs.len() == 2 {
            worst = worst.max(gs[0].max_entry_diff(&truth)).max(gs[1].max_entry_diff(&truth));
            worst_pair = worst_pair.max(gs[0].max_entry_diff(&gs[1]));
        }
    }
    let passed = failure.is_none() && worst <= 1e-6 && worst_pair <= 1e-6;
    let detail = failure.unwrap_or(format!(
        "100 isometries, max entry error {worst:.2e}, max disagreement across resolutions {worst_pair:.2e}"
    ));
    result(3, "extension recovery & uniqueness", passed, detail)
}

/// Criterion 4: soundness and length of the ray schedule.
pub fn ray_schedule() -> CriterionResult {
    let mut lines = Vec::new();
    let mut passed = true;
    for lambda0 in [0.5, 0.75, 0.9, 0.99] {
        match ray_growth_schedule(lambda0) {
            Ok(s) => {
                let sound = s.windows(2).all(|w| w[1] >= 2.0 * w[0] - 1.0 && w[1] < w[0]);
                let cap = (1.0 / (1.0 - lambda0)).log2().ceil() as usize + 3;
                let ok = sound && s.len() <= cap && s.last() == Some(&0.0);
                passed &= ok;
                lines.push(format!("{lambda0}:{}<={cap}", s.len()));
            }
            Err(e) => {
                passed = false;
                lines.push(format!("{lambda0}: {e}"));
            }
        }
    }
    result(4, "ray schedule", passed, format!("lengths {}", lines.join(" ")))
}

/// Trials of the doubling fuzz harness in the full battery.
pub const DOUBLING_TRIALS: usize = 10_000;

/// Deterministic per-point noise in `[-1, 1]^dim`.
fn point_noise(x: &[f64], salt: u64) -> Vec<f64> {
    let mut h = salt ^ 0xD1B5_4A32_D192_ED03;
    for c in x {
        h = (h ^ c.to_bits()).wrapping_mul(0x0000_0100_0000_01B3).rotate_left(29);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(h);
    x.iter().map(|_| rng.random_range(-1.0..=1.0)).collect()
}

/// Criterion 5: fuzzing the fixed-ball doubling certifier.
pub fn doubling_fuzz(seed: u64, trials: usize) -> CriterionResult {
    let mut rng = rng_for(seed, 5);
    let tau = 1e-9;
    let norms = [
        NormDescriptor::l1(2).expect("valid"),
        NormDescriptor::euclidean(2).expect("valid"),
        NormDescriptor::max_norm(2).expect("valid"),
    ];
    let (mut admitted, mut rejected, mut violations) = (0usize, 0usize, 0usize);
    let mut certifier_disagreements = 0usize;
    let mut first_violation = None;
    for trial in 0..trials {
        let norm = norms[trial % 3].clone();
        let x0 = Point::from([rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
        let r = rng.random_range(0.5..1.0);
        let Ok(ball) = Ball::new(x0.clone(), 2.0 * r) else { continue };
        let Ok(cloud) = sample_ball(&norm, &ball, r / 2.0) else { continue };
        let salt = rng.next_u64();
        let family = trial % 5;
        let map: Box<dyn PointMap> = match family {
            // Identity plus pointwise noise of norm at most τ/3.
            0 => {
                let n = norm.clone();
                Box::new(FnMap::new("noisy-identity", 2, move |x: &[f64]| {
                    let v = point_noise(x, salt);
                    let s = tau / 3.0 / n.eval(&v).max(1.0);
                    x.iter().zip(&v).map(|(a, b)| a + s * b).collect()
                }))
            }
            // A global isometry; it fixes the inner ball only if trivial.
            1 => Box::new(random_isometry(&mut rng, &norm)),
            // Identity near x0, another isometry beyond a random radius.
            2 => {
                let outer = AffineMap::translation_by(&x0)
                    .compose(&AffineMap::rotation_2d(10f64.powf(rng.random_range(-12.0..-3.0))))
                    .and_then(|m| m.compose(&AffineMap::translation_by(&x0.scale(-1.0))))
                    .expect("same dimension");
                let rho = rng.random_range(r..2.0 * r);
                let (n, c) = (norm.clone(), x0.clone());
                Box::new(FnMap::new("piecewise", 2, move |x: &[f64]| {
                    if n.dist(x, &c) <= rho {
                        x.to_vec()
                    } else {
                        outer.apply_unchecked(x)
                    }
                }))
            }
            // One cloud point moved by a random amount.
            3 => {
                let target = Point::from(cloud.point(rng.random_range(0..cloud.len())));
                let step = 10f64.powf(rng.random_range(-12.0..-5.0));
                let dir = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
                let scale = step / norm.eval(&dir).max(1e-300);
                Box::new(FnMap::new("single-move", 2, move |x: &[f64]| {
                    if x == target.coords() {
                        vec![x[0] + scale * dir[0], x[1] + scale * dir[1]]
                    } else {
                        x.to_vec()
                    }
                }))
            }
            // A rotation about x0 small enough to fix the inner ball within τ.
            _ => {
                let theta = rng.random_range(0.0..tau / (2.0 * r));
                Box::new(
                    AffineMap::translation_by(&x0)
                        .compose(&AffineMap::rotation_2d(theta))
                        .and_then(|m| m.compose(&AffineMap::translation_by(&x0.scale(-1.0))))
                        .expect("same dimension"),
                )
            }
        };
        match doubling_fixed_check(&*map, &x0, r, &cloud, &norm, tau) {
            Ok(verdict) => {
                admitted += 1;
                // Independent displacement measurement over D ∩ B(x0, 2r).
                let moved = cloud
                    .iter()
                    .filter(|x| norm.dist(x, &x0) <= 2.0 * r)
                    .map(|x| map.map_point(x).map(|y| norm.dist(&y, x)).unwrap_or(f64::INFINITY))
                    .fold(0.0, f64::max);
                let violation = moved > 10.0 * tau;
                if violation {
                    violations += 1;
                    first_violation.get_or_insert(format!(
                        "trial {trial} family {family} ({}): moved {moved:e}",
                        norm.label()
                    ));
                }
                if verdict == violation {
                    certifier_disagreements += 1;
                }
            }
            Err(DoublingPrecondition::NotIsometric { .. } | DoublingPrecondition::NotFixed { .. }) => rejected += 1,
            Err(DoublingPrecondition::Map(e)) => {
                first_violation.get_or_insert(format!("trial {trial}: {e}"));
                violations += 1;
            }
        }
    }
    let passed = violations == 0 && certifier_disagreements == 0 && admitted > 0;
    let detail = first_violation.unwrap_or(format!(
        "{trials} trials: {admitted} met the preconditions, {rejected} rejected, 0 moved a point by more than 10*tau"
    ));
    result(5, "doubling certifier fuzz", passed, detail)
}

/// Random region of the positive/adversarial atlas sweeps.
fn random_region(rng: &mut ChaCha8Rng) -> Ball {
    let c = Point::from([rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);
    Ball::new(c, rng.random_range(0.6..1.2)).expect("positive radius")
}

/// Criterion 6: soundness of stitched verdicts.
pub fn stitch_soundness(seed: u64) -> CriterionResult {
    let mut rng = rng_for(seed, 6);
    let (eta, tau) = (0.05, 1e-9);
    let (radius, spacing) = (0.6, 0.5);
    let norms = [
        NormDescriptor::euclidean(2).expect("valid"),
        NormDescriptor::l1(2).expect("valid"),
        NormDescriptor::max_norm(2).expect("valid"),
    ];
    let mut failure: Option<String> = None;
    let mut note = |msg: String| {
        failure.get_or_insert(msg);
    };

    let mut certificates = 0;
    let mut worst_pair_defect = 0.0f64;
    let mut min_coverage = 1.0f64;
    for k in 0..100 {
        let norm = &norms[k % 3];
        let g = random_isometry(&mut rng, norm);
        let region = random_region(&mut rng);
        let atlas = match make_atlas_from_global(&g, &region, norm, radius, spacing) {
            Ok(a) => a,
            Err(e) => {
                note(format!("positive {k}: {e}"));
                continue;
            }
        };
        match stitch(&atlas, eta, tau) {
            Verdict::Certificate(c) => {
                if c.per_patch_residuals.iter().any(|&r| !(r <= 10.0 * tau)) {
                    note(format!("positive {k}: residual above 10*tau"));
                    continue;
                }
                let mut defect = 0.0f64;
                for _ in 0..10_000 {
                    let x = random_in_ball(&mut rng, &region, norm);
                    let y = random_in_ball(&mut rng, &region, norm);
                    defect = defect.max(pair_defect(&atlas, &x, &y, norm).unwrap_or(f64::INFINITY));
                }
                worst_pair_defect = worst_pair_defect.max(defect);
                if defect > 10.0 * tau + 4.0 * eta {
                    note(format!("positive {k}: pair defect {defect:e}"));
                    continue;
                }
                if k % 10 == 0 {
                    let target = g
                        .apply(region.center())
                        .and_then(|c| Ball::new(c, region.radius()))
                        .and_then(|t| surjectivity_coverage(&atlas, &t, eta));
                    match target {
                        Ok(f) => min_coverage = min_coverage.min(f),
                        Err(e) => note(format!("positive {k}: coverage {e}")),
                    }
                }
                certificates += 1;
            }
            v => note(format!("positive {k} ({}): {v:?}", norm.label())),
        }
    }
    if min_coverage < 0.99 {
        note(format!("surjectivity coverage {min_coverage:.4} below 0.99"));
    }

    let mut refutations = 0;
    let mut min_gap = f64::INFINITY;
    for k in 0..100 {
        let norm = &norms[k % 3];
        let g1 = random_isometry(&mut rng, norm);
        let region = random_region(&mut rng);
        let split_axis = rng.random_range(0..2usize);
        let g2 = if k % 5 == 4 {
            // Mirror across the split hyperplane, then shift along the seam.
            let mut shift = [0.0, 0.0];
            shift[1 - split_axis] = 0.5;
            let mirror = AffineMap::reflection(2, split_axis, region.center()[split_axis]).expect("axis in range");
            g1.compose(&AffineMap::translation_by(&shift).compose(&mirror).expect("same dimension"))
                .expect("same dimension")
        } else {
            let gap = 10f64.powf(rng.random_range(-7.0..-0.5)).max(100.0 * tau);
            let dir = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let s = gap / norm.eval(&dir).max(1e-300);
            AffineMap::translation_by(&[s * dir[0], s * dir[1]])
                .compose(&g1)
                .expect("same dimension")
        };
        // Seam gap measured on the seam through the region.
        let gap = (0..=100)
            .map(|i| {
                let mut x = region.center().clone().into_vec();
                x[1 - split_axis] += region.radius() * (2.0 * i as f64 / 100.0 - 1.0);
                norm.dist(&g1.apply_unchecked(&x), &g2.apply_unchecked(&x))
            })
            .fold(f64::INFINITY, f64::min);
        min_gap = min_gap.min(gap);
        if gap < 100.0 * tau {
            note(format!("adversarial {k}: seam gap {gap:e} below 100*tau"));
            continue;
        }
        let atlas = match make_adversarial_atlas(&g1, &g2, &region, norm, split_axis, radius, spacing) {
            Ok(a) => a,
            Err(e) => {
                note(format!("adversarial {k}: {e}"));
                continue;
            }
        };
        match stitch(&atlas, eta, tau) {
            Verdict::Refutation(r) => match pair_defect(&atlas, &r.x, &r.x_prime, norm) {
                Ok(d) if d > 10.0 * tau => refutations += 1,
                Ok(d) => note(format!("adversarial {k}: witness re-verifies at {d:e}")),
                Err(e) => note(format!("adversarial {k}: {e}")),
            },
            v => note(format!("adversarial {k} ({}, gap {gap:e}): {v:?}", norm.label())),
        }
    }

    let mut disconnected = 0;
    for k in 0..10 {
        let norm = &norms[k % 3];
        let g = random_isometry(&mut rng, norm);
        let region = random_region(&mut rng);
        let Ok(base) = make_atlas_from_global(&g, &region, norm, radius, spacing) else {
            note(format!("disconnected {k}: could not build base atlas"));
            continue;
        };
        // A second cluster far outside the region.
        let mut patches = base.patches().to_vec();
        let far = region.center().offset(&[1.0, 0.0], region.radius() + 5.0);
        for j in 0..(2 + k % 3) {
            let c = far.offset(&[0.0, 1.0], spacing * j as f64);
            match Patch::new(c, radius, Arc::new(g.clone()), norm) {
                Ok(p) => patches.push(p),
                Err(e) => note(format!("disconnected {k}: {e}")),
            }
        }
        let atlas = match PatchAtlas::new(norm.clone(), region, patches) {
            Ok(a) => a,
            Err(e) => {
                note(format!("disconnected {k}: {e}"));
                continue;
            }
        };
        match stitch(&atlas, eta, tau) {
            Verdict::Undetermined(u) if u.reason == UndeterminedReason::Disconnected => disconnected += 1,
            v => note(format!("disconnected {k}: {v:?}")),
        }
    }

    let passed = failure.is_none() && certificates == 100 && refutations == 100 && disconnected == 10;
    let detail = failure.unwrap_or(format!(
        "{certificates}/100 certificates (pair defect <= {worst_pair_defect:.1e}, coverage >= {min_coverage:.4}), \
         {refutations}/100 refutations (seam gap >= {min_gap:.1e}), {disconnected}/10 disconnected"
    ));
    result(6, "stitch soundness", passed, detail)
}

/// Criterion 7: the wild radial-square map is isometric on large sphere
/// surfaces but not globally.
pub fn wild_maps(seed: u64) -> CriterionResult {
    let mut rng = rng_for(seed, 7);
    let norm = NormDescriptor::euclidean(2).expect("valid");
    let mut run = || -> Result<(bool, String)> {
        let wild = wild_ball_map(&norm, WildKind::RadialSquare, seed)?;
        let centers_ball = Ball::new(Point::from([0.0, 0.0]), 3.0)?;
        let mut worst_sphere = 0.0f64;
        let mut spheres_pass = true;
        for _ in 0..20 {
            let x0 = random_in_ball(&mut rng, &centers_ball, &norm);
            let eps = sphere_epsilon(&x0, &norm)?;
            spheres_pass &= sphere_restriction_check(&wild, &x0, eps, &norm, eps / 8.0, 1e-9)?;
            worst_sphere = worst_sphere.max(sphere_restriction_defect(&wild, &x0, eps, &norm, eps / 8.0)?);
        }
        let documented = pair_defect(&wild, &[0.5, 0.0], &[0.6, 0.0], &norm)?;
        let found = match global_defect_witness(&wild, &centers_ball, &norm, seed, 2000)? {
            DefectSearch::Found { defect, .. } => defect,
            DefectSearch::NotFound { .. } => 0.0,
        };
        let ok = spheres_pass && worst_sphere <= 1e-9 && found >= 0.009 && (documented - 0.01).abs() <= 1e-12;
        Ok((
            ok,
            format!(
                "20 spheres with defect <= {worst_sphere:.1e}; search defect {found:.4}; documented pair {documented:.6}"
            ),
        ))
    };
    let (passed, detail) = run().unwrap_or_else(|e| (false, e.to_string()));
    result(7, "wild map (sphere vs ball)", passed, detail)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_lists_each_operation_once() {
        let m = coverage_manifest();
        let mut names: Vec<&str> = m.iter().map(|e| e.operation.as_str()).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), m.len());
        assert!(m.iter().all(|e| !e.exercised_by.is_empty() && e.exercised_by.iter().all(|&c| (1..=7).contains(&c))));
    }

    #[test]
    fn small_batteries_pass_and_are_repeatable() {
        assert!(ray_schedule().passed);
        let a = doubling_fuzz(7, 60);
        assert!(a.passed, "{}", a.detail);
        assert_eq!(a, doubling_fuzz(7, 60));
        let w = wild_maps(7);
        assert!(w.passed, "{}", w.detail);
    }

    #[test]
    fn table_has_one_line_per_criterion() {
        let report = SuiteReport {
            seed: 1,
            criteria: vec![result(4, "ray schedule", true, "ok".into())],
            coverage: coverage_manifest(),
        };
        assert_eq!(report.table().lines().count(), 2);
        assert!(report.table().contains("[PASS]"));
        assert!(report.passed());
    }
}
