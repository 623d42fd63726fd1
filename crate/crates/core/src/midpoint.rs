//! Nested-set midpoint extraction: start from the lens of points at half
//! distance from both endpoints and repeatedly keep only the points whose
//! farthest cloud neighbor is within half the current diameter.

use std::io::Write;

use crate::error::{Error, Result};
use crate::space::{
    farthest_distances, lex_cmp, scan_convex, set_diameter, NormDescriptor, Point, PointCloud,
    ProximityIndex,
};

/// Relative floating slack used by [`metric_midpoint`], scaled by `δ(C_1)`.
pub const DEFAULT_RELATIVE_SLACK: f64 = 1e-12;

/// Clouds `C_1 ⊃ C_2 ⊃ …`, their diameters and the returned point.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinementTrace {
    pub clouds: Vec<PointCloud>,
    pub diameters: Vec<f64>,
    pub limit: Point,
}

impl RefinementTrace {
    /// Number of refinement steps taken after the initial lens.
    pub fn refinements(&self) -> usize {
        self.diameters.len().saturating_sub(1)
    }

    /// CSV rows `iteration,delta,cloud_size`, iteration 1 being the lens.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["iteration", "delta", "cloud_size"])?;
        for (i, (d, c)) in self.diameters.iter().zip(&self.clouds).enumerate() {
            out.write_record([(i + 1).to_string(), format!("{d:e}"), c.len().to_string()])?;
        }
        out.flush()?;
        Ok(())
    }
}

/// The lens in coordinates centered at the algebraic midpoint: lattice points
/// `a = h·k` with `max(‖a − v‖, ‖a + v‖) ≤ ‖v‖ + η` where `v = (x1 − x0)/2`.
///
/// Both the lattice and the constraint are invariant under `a ↦ −a` in exact
/// floating arithmetic, and refinement preserves that, so the midpoint (the
/// origin of this frame) is never filtered out.
fn local_lens(x0: &[f64], x1: &[f64], norm: &NormDescriptor, eta: f64) -> Result<(PointCloud, Point)> {
    let dim = norm.dim();
    let half: Vec<f64> = x0.iter().zip(x1).map(|(a, b)| (b - a) * 0.5).collect();
    let neg: Vec<f64> = half.iter().map(|v| -v).collect();
    let mid = Point::from(x0.iter().zip(x1).map(|(a, b)| (a + b) * 0.5).collect::<Vec<_>>());
    let r = norm.eval(&half);
    let reach = r + eta;
    // Rounding to the lattice moves a point by at most h·σ/2 ≤ η, which the
    // thickening absorbs; the factor keeps η-density strict under rounding.
    let h = 2.0 * eta / (norm.sign_vector_norm() * (1.0 + 1e-9));
    let kappa = norm.box_bound();
    let ranges: Vec<(i64, i64)> = half
        .iter()
        .map(|v| {
            let b = ((reach * kappa - v.abs()) / h + 1e-9).floor().max(0.0) as i64;
            (-b, b)
        })
        .collect();
    let origin = vec![0.0; dim];
    let coords = scan_convex(&origin, h, &ranges, |a| {
        norm.dist(a, &half).max(norm.dist(a, &neg)) - reach
    })?;
    Ok((PointCloud::from_raw(dim, coords, eta), mid))
}

fn check_pair(x0: &Point, x1: &Point, norm: &NormDescriptor, eta: f64) -> Result<()> {
    x0.check_dim(norm.dim())?;
    x1.check_dim(norm.dim())?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParameter(format!("resolution must be positive, got {eta}")));
    }
    Ok(())
}

/// `C_1`: η-dense sample of `B(x0, d/2) ∩ B(x1, d/2)` (thickened by η),
/// containing `(x0 + x1)/2` exactly. Degenerate `x0 = x1` gives `{x0}`.
pub fn initial_lens(x0: &Point, x1: &Point, norm: &NormDescriptor, eta: f64) -> Result<PointCloud> {
    check_pair(x0, x1, norm, eta)?;
    if x0 == x1 {
        return PointCloud::singleton(x0, eta);
    }
    let (local, mid) = local_lens(x0, x1, norm, eta)?;
    Ok(local.translated(&mid))
}

/// One step `C ↦ {x ∈ C : max_{x'∈C} d(x, x') ≤ δ(C)/2 + τ}`, sorted
/// lexicographically.
pub fn refine_once(cloud: &PointCloud, norm: &NormDescriptor, tau: f64) -> Result<PointCloud> {
    let delta = set_diameter(cloud, norm)?;
    refine_with(cloud, norm, tau, delta)
}

fn refine_with(cloud: &PointCloud, norm: &NormDescriptor, tau: f64, delta: f64) -> Result<PointCloud> {
    let far = farthest_distances(cloud, norm);
    let bound = delta / 2.0 + tau;
    let mut keep: Vec<usize> = (0..cloud.len()).filter(|&i| far[i] <= bound).collect();
    if keep.is_empty() {
        return Err(Error::DegenerateDiscretization {
            slack: tau,
            eta: cloud.eta(),
        });
    }
    keep.sort_by(|&a, &b| lex_cmp(cloud.point(a), cloud.point(b)));
    Ok(cloud.select(&keep))
}

/// Iteration cap `⌈log2(δ(C_1)/tol)⌉ + 8`.
pub fn iteration_cap(delta1: f64, tol: f64) -> usize {
    if delta1 <= tol {
        return 8;
    }
    (delta1 / tol).log2().ceil() as usize + 8
}

/// Refines the lens of `x0, x1` until its diameter is at most `tol` and
/// returns the point of the final cloud with the smallest farthest distance.
pub fn metric_midpoint(
    x0: &Point,
    x1: &Point,
    norm: &NormDescriptor,
    eta: f64,
    tol: f64,
) -> Result<(Point, RefinementTrace)> {
    metric_midpoint_with_slack(x0, x1, norm, eta, tol, None)
}

/// [`metric_midpoint`] with an explicit refinement slack `τ` (default:
/// [`DEFAULT_RELATIVE_SLACK`]·δ(C_1)).
pub fn metric_midpoint_with_slack(
    x0: &Point,
    x1: &Point,
    norm: &NormDescriptor,
    eta: f64,
    tol: f64,
    slack: Option<f64>,
) -> Result<(Point, RefinementTrace)> {
    check_pair(x0, x1, norm, eta)?;
    if !(tol >= 2.0 * eta) {
        return Err(Error::InvalidParameter(format!(
            "tolerance {tol:e} must be at least twice the resolution {eta:e}"
        )));
    }
    if x0 == x1 {
        return Ok((
            x0.clone(),
            RefinementTrace {
                clouds: vec![PointCloud::singleton(x0, eta)?],
                diameters: vec![0.0],
                limit: x0.clone(),
            },
        ));
    }
    let (mut current, mid) = local_lens(x0, x1, norm, eta)?;
    let mut delta = set_diameter(&current, norm)?;
    let tau = slack.unwrap_or(DEFAULT_RELATIVE_SLACK * delta);
    let cap = iteration_cap(delta, tol);
    let mut clouds = vec![current.sorted().translated(&mid)];
    let mut diameters = vec![delta];
    let mut steps = 0;
    while delta > tol {
        if steps == cap {
            return Err(Error::NonConvergence {
                iterations: cap,
                diameter: delta,
                tol,
            });
        }
        current = refine_with(&current, norm, tau, delta)?;
        delta = set_diameter(&current, norm)?;
        clouds.push(current.translated(&mid));
        diameters.push(delta);
        steps += 1;
    }
    let far = farthest_distances(&current, norm);
    let best = (0..far.len()).fold(0, |b, i| if far[i] < far[b] { i } else { b });
    let limit = Point::from(current.point(best)).add(&mid);
    Ok((
        limit.clone(),
        RefinementTrace {
            clouds,
            diameters,
            limit,
        },
    ))
}

/// Second route to the midpoint, without the symmetric frame: the lens is
/// sampled on the lattice `x0 + h·k`, which generally misses `(x0 + x1)/2`,
/// and refinement uses slack `η` to absorb the lost symmetry. The diameter
/// can stall near `2η`; the loop stops when it no longer decreases.
pub fn metric_midpoint_anchored(
    x0: &Point,
    x1: &Point,
    norm: &NormDescriptor,
    eta: f64,
    tol: f64,
) -> Result<(Point, RefinementTrace)> {
    check_pair(x0, x1, norm, eta)?;
    if !(tol >= 2.0 * eta) {
        return Err(Error::InvalidParameter(format!(
            "tolerance {tol:e} must be at least twice the resolution {eta:e}"
        )));
    }
    let dim = norm.dim();
    let r = norm.dist(x0, x1) * 0.5;
    let reach = r + eta;
    let h = 2.0 * eta / (norm.sign_vector_norm() * (1.0 + 1e-9));
    let kappa = norm.box_bound();
    let ranges: Vec<(i64, i64)> = (0..dim)
        .map(|i| {
            let m = (x0[i] + x1[i]) * 0.5 - x0[i];
            (
                ((m - reach * kappa) / h).floor() as i64,
                ((m + reach * kappa) / h).ceil() as i64,
            )
        })
        .collect();
    let coords = scan_convex(x0, h, &ranges, |a| norm.dist(a, x0).max(norm.dist(a, x1)) - reach)?;
    let mut current = PointCloud::from_raw(dim, coords, eta);
    if current.is_empty() {
        return Err(Error::DegenerateDiscretization { slack: 2.0 * eta, eta });
    }
    let mut delta = set_diameter(&current, norm)?;
    let cap = iteration_cap(delta, tol);
    let mut clouds = vec![current.sorted()];
    let mut diameters = vec![delta];
    let slack = eta;
    // Without exact symmetry the diameter can stall above `tol`; stop there.
    while delta > tol && clouds.len() <= cap {
        let next = refine_with(&current, norm, slack, delta)?;
        let next_delta = set_diameter(&next, norm)?;
        if next_delta >= delta {
            break;
        }
        current = next;
        delta = next_delta;
        clouds.push(current.clone());
        diameters.push(delta);
    }
    let far = farthest_distances(&current, norm);
    let best = (0..far.len()).fold(0, |b, i| if far[i] < far[b] { i } else { b });
    let limit = Point::from(current.point(best));
    Ok((
        limit.clone(),
        RefinementTrace {
            clouds,
            diameters,
            limit,
        },
    ))
}

/// True iff every `x ∈ C` has a cloud point within `τ + η` of `2·x2 − x`.
pub fn check_reflection_symmetry(cloud: &PointCloud, x2: &Point, norm: &NormDescriptor, tau: f64) -> bool {
    let radius = tau + cloud.eta();
    let index = ProximityIndex::new(cloud, radius * norm.box_bound());
    cloud.iter().all(|x| index.any_within(&x2.reflect(x), radius, norm))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: [f64; 2]) -> Point {
        Point::from(c)
    }

    #[test]
    fn linf_lens_is_the_vertical_segment() {
        let n = NormDescriptor::max_norm(2).unwrap();
        let eta = 0.05;
        let lens = initial_lens(&p([0.0, 0.0]), &p([2.0, 0.0]), &n, eta).unwrap();
        assert!(lens.contains_exact(&[1.0, 0.0]));
        for x in lens.iter() {
            assert!((x[0] - 1.0).abs() <= eta && x[1].abs() <= 1.0 + eta, "{x:?}");
        }
        // Every point of {1}×[−1,1] is within η of the lens.
        for k in 0..=200 {
            let q = [1.0, -1.0 + k as f64 / 100.0];
            let (_, d) = lens.nearest(&q, &n).unwrap();
            assert!(d <= eta, "{q:?} at {d}");
        }
    }

    #[test]
    fn l1_lens_on_an_axis_is_a_point() {
        let n = NormDescriptor::l1(2).unwrap();
        let eta = 0.01;
        let lens = initial_lens(&p([0.0, 0.0]), &p([2.0, 0.0]), &n, eta).unwrap();
        for x in lens.iter() {
            assert!(n.dist(x, &[1.0, 0.0]) <= eta + 1e-12, "{x:?}");
        }
    }

    #[test]
    fn degenerate_pair_is_a_singleton() {
        let n = NormDescriptor::euclidean(2).unwrap();
        let lens = initial_lens(&p([0.5, 0.5]), &p([0.5, 0.5]), &n, 0.1).unwrap();
        assert_eq!(lens.len(), 1);
        let (m, trace) = metric_midpoint(&p([0.5, 0.5]), &p([0.5, 0.5]), &n, 0.1, 0.2).unwrap();
        assert_eq!(m, p([0.5, 0.5]));
        assert_eq!(trace.refinements(), 0);
    }

    #[test]
    fn refine_segment_keeps_center() {
        let n = NormDescriptor::max_norm(2).unwrap();
        let pts: Vec<Point> = [-1.0, -0.5, 0.0, 0.5, 1.0].iter().map(|&y| p([1.0, y])).collect();
        let c = PointCloud::from_points(&pts, 0.5).unwrap();
        let r = refine_once(&c, &n, 0.0).unwrap();
        assert_eq!(r.to_points(), vec![p([1.0, 0.0])]);
        let single = PointCloud::singleton(&p([3.0, 1.0]), 0.1).unwrap();
        assert_eq!(refine_once(&single, &n, 0.0).unwrap(), single);
    }

    #[test]
    fn refine_reports_empty_results() {
        let n = NormDescriptor::euclidean(2).unwrap();
        let c = PointCloud::from_points(&[p([0.0, 0.0]), p([1.0, 0.0])], 0.1).unwrap();
        assert!(matches!(
            refine_once(&c, &n, 0.0),
            Err(Error::DegenerateDiscretization { .. })
        ));
        let empty = PointCloud::new(2, 0.1).unwrap();
        assert!(matches!(refine_once(&empty, &n, 0.0), Err(Error::EmptyCloud)));
    }

    #[test]
    fn euclidean_refinement_halves_on_the_disk_lens() {
        let n = NormDescriptor::euclidean(2).unwrap();
        let eta = 0.02;
        let tau = 2.0 * eta;
        let lens = initial_lens(&p([0.0, 0.0]), &p([2.0, 0.0]), &n, eta).unwrap();
        let d0 = set_diameter(&lens, &n).unwrap();
        let next = refine_once(&lens, &n, tau).unwrap();
        // Brute-force diameter of the output.
        let mut d1 = 0.0f64;
        for a in next.iter() {
            for b in next.iter() {
                d1 = d1.max(n.dist(a, b));
            }
        }
        assert!(d1 <= d0 / 2.0 + 2.0 * tau, "{d1} vs {d0}");
    }

    #[test]
    fn midpoints_of_documented_pairs() {
        let l2 = NormDescriptor::euclidean(2).unwrap();
        let (m, _) = metric_midpoint(&p([0.0, 0.0]), &p([2.0, 0.0]), &l2, 0.005, 1e-2).unwrap();
        assert!(m.max_abs_diff(&[1.0, 0.0]) <= 1e-2);

        let linf = NormDescriptor::max_norm(2).unwrap();
        let eta = 0.01;
        let (m, trace) = metric_midpoint(&p([0.0, 0.0]), &p([2.0, 0.0]), &linf, eta, 2.0 * eta).unwrap();
        assert!(linf.dist(&m, &[1.0, 0.0]) <= eta);
        assert_eq!(trace.refinements(), 1);
        assert!(trace.diameters[1] <= 2.0 * eta);

        let l1 = NormDescriptor::l1(2).unwrap();
        let (m, _) = metric_midpoint(&p([0.0, 0.0]), &p([2.0, 2.0]), &l1, 0.02, 0.04).unwrap();
        assert!(l1.dist(&m, &[1.0, 1.0]) <= 0.04 + 0.04);
    }

    #[test]
    fn trace_is_nested_and_monotone() {
        let n = NormDescriptor::hexagonal(2).unwrap();
        let (_, trace) = metric_midpoint(&p([0.1, -0.3]), &p([1.4, 0.9]), &n, 0.01, 0.02).unwrap();
        for w in trace.diameters.windows(2) {
            assert!(w[1] <= w[0]);
        }
        for w in trace.clouds.windows(2) {
            for x in w[1].iter() {
                assert!(w[0].contains_exact(x));
            }
        }
    }

    #[test]
    fn tolerance_below_twice_resolution_is_rejected() {
        let n = NormDescriptor::euclidean(2).unwrap();
        assert!(metric_midpoint(&p([0.0, 0.0]), &p([1.0, 0.0]), &n, 0.1, 0.1).is_err());
    }

    #[test]
    fn reflection_symmetry_examples() {
        let n = NormDescriptor::euclidean(2).unwrap();
        let lens = initial_lens(&p([0.0, 0.0]), &p([2.0, 0.0]), &n, 0.05).unwrap();
        assert!(check_reflection_symmetry(&lens, &p([1.0, 0.0]), &n, 1e-9));
        assert!(!check_reflection_symmetry(&lens, &p([1.3, 0.0]), &n, 1e-9));
        let single = PointCloud::singleton(&p([0.2, 0.7]), 0.1).unwrap();
        assert!(check_reflection_symmetry(&single, &p([0.2, 0.7]), &n, 0.0));
    }

    #[test]
    fn trace_csv_has_one_row_per_cloud() {
        let n = NormDescriptor::euclidean(2).unwrap();
        let (_, trace) = metric_midpoint(&p([0.0, 0.0]), &p([2.0, 0.0]), &n, 0.01, 0.02).unwrap();
        let mut buf = Vec::new();
        trace.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), trace.clouds.len() + 1);
        assert!(text.starts_with("iteration,delta,cloud_size"));
    }
}
