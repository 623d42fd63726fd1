use super::ball::{Ball, SphereSurface};
use super::cloud::{lex_cmp, PointCloud};
use super::norm::NormDescriptor;
use crate::error::{check_dim, Error, Result};

/// Upper bound on the index box scanned by a single lattice enumeration.
pub(crate) const MAX_LATTICE_POINTS: f64 = 4e8;

/// Grid pitch for a ball of radius `radius` at resolution `eta`.
///
/// Rounding any vector to the grid moves it by at most `pitch/2` per
/// coordinate, i.e. by at most `pitch·σ/2` in norm, where `σ` is the largest
/// norm of a sign vector. The pitch makes `pitch·σ ≤ eta`, which covers points
/// near the boundary after pulling them inward by `pitch·σ/2`. It also divides
/// `radius` exactly so axis points of the sphere land on the grid.
pub fn lattice_pitch(norm: &NormDescriptor, radius: f64, eta: f64) -> f64 {
    let steps = (radius * norm.sign_vector_norm() / eta).ceil().max(1.0);
    radius / steps
}

fn check_eta(eta: f64) -> Result<()> {
    if eta > 0.0 && eta.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("resolution must be positive, got {eta}")))
    }
}

/// Lattice points `origin + pitch·k`, `k` in the integer box `ranges`, that
/// satisfy `excess(x) ≤ 0`, in lexicographic order of `k`.
///
/// `excess` must be convex along every line parallel to the last axis, so each
/// row's feasible set is an interval found by ternary search on its minimum.
pub(crate) fn scan_convex(
    origin: &[f64],
    pitch: f64,
    ranges: &[(i64, i64)],
    excess: impl Fn(&[f64]) -> f64,
) -> Result<Vec<f64>> {
    let dim = origin.len();
    let boxed: f64 = ranges.iter().map(|&(lo, hi)| (hi - lo + 1).max(0) as f64).product();
    if boxed > MAX_LATTICE_POINTS {
        return Err(Error::InvalidParameter(format!(
            "resolution too fine: lattice box holds {boxed:.3e} points"
        )));
    }
    let mut out = Vec::new();
    if ranges.iter().any(|&(lo, hi)| lo > hi) {
        return Ok(out);
    }
    let last = dim - 1;
    let (row_lo, row_hi) = ranges[last];
    let mut k: Vec<i64> = ranges.iter().map(|r| r.0).collect();
    let mut x = vec![0.0; dim];
    loop {
        for i in 0..last {
            x[i] = origin[i] + pitch * k[i] as f64;
        }
        let at = |t: i64, x: &mut [f64]| {
            x[last] = origin[last] + pitch * t as f64;
            excess(x)
        };
        let (mut a, mut b) = (row_lo, row_hi);
        while b - a > 2 {
            let m1 = a + (b - a) / 3;
            let m2 = b - (b - a) / 3;
            let (f1, f2) = (at(m1, &mut x), at(m2, &mut x));
            if f1 < f2 {
                b = m2 - 1;
            } else if f1 > f2 {
                a = m1 + 1;
            } else {
                a = m1;
                b = m2;
            }
        }
        let mut best = a;
        let mut best_val = at(a, &mut x);
        for t in a + 1..=b {
            let v = at(t, &mut x);
            if v < best_val {
                best = t;
                best_val = v;
            }
        }
        if best_val <= 0.0 {
            let mut first = best;
            while first > row_lo && at(first - 1, &mut x) <= 0.0 {
                first -= 1;
            }
            let mut end = best;
            while end < row_hi && at(end + 1, &mut x) <= 0.0 {
                end += 1;
            }
            for t in first..=end {
                x[last] = origin[last] + pitch * t as f64;
                out.extend_from_slice(&x);
            }
        }
        // Odometer over all axes but the last, last-but-one fastest.
        let mut axis = last;
        loop {
            if axis == 0 {
                return Ok(out);
            }
            axis -= 1;
            if k[axis] < ranges[axis].1 {
                k[axis] += 1;
                break;
            }
            k[axis] = ranges[axis].0;
        }
    }
}

/// Symmetric index box `[-b, b]^dim` containing every lattice point of a ball.
fn ball_ranges(norm: &NormDescriptor, radius: f64, pitch: f64) -> Vec<(i64, i64)> {
    let b = (radius * norm.box_bound() / pitch + 1e-9).floor() as i64;
    vec![(-b, b); norm.dim()]
}

/// Grid sample of a closed ball: every cloud point satisfies
/// `‖x − center‖ ≤ radius` exactly and every ball point is within `eta` of
/// the cloud. The center is always a sample.
///
/// The construction is a fixed lattice, so no seed is involved.
pub fn sample_ball(norm: &NormDescriptor, ball: &Ball, eta: f64) -> Result<PointCloud> {
    check_eta(eta)?;
    check_dim(norm.dim(), ball.dim())?;
    let (c, r) = (ball.center(), ball.radius());
    let pitch = lattice_pitch(norm, r, eta);
    let coords = scan_convex(c, pitch, &ball_ranges(norm, r, pitch), |x| norm.dist(x, c) - r)?;
    Ok(PointCloud::from_raw(norm.dim(), coords, eta))
}

/// Sample of a sphere surface: ball lattice points in the shell
/// `r − eta ≤ ‖x − c‖ ≤ r` at half resolution, pushed radially onto the
/// surface and deduplicated. Output is sorted lexicographically.
pub fn sample_sphere(norm: &NormDescriptor, sphere: &SphereSurface, eta: f64) -> Result<PointCloud> {
    check_eta(eta)?;
    check_dim(norm.dim(), sphere.dim())?;
    let (c, r) = (sphere.center(), sphere.radius());
    let pitch = lattice_pitch(norm, r, eta / 2.0);
    let shell = scan_convex(c, pitch, &ball_ranges(norm, r, pitch), |x| norm.dist(x, c) - r)?;
    let dim = norm.dim();
    let mut projected: Vec<Vec<f64>> = Vec::new();
    for x in shell.chunks_exact(dim) {
        let d = norm.dist(x, c);
        if d < r - eta || d == 0.0 {
            continue;
        }
        let s = r / d;
        projected.push(x.iter().zip(c.iter()).map(|(xi, ci)| ci + (xi - ci) * s).collect());
    }
    projected.sort_by(|a, b| lex_cmp(a, b));
    projected.dedup();
    Ok(PointCloud::from_raw(dim, projected.concat(), eta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::Point;

    fn ball(c: [f64; 2], r: f64) -> Ball {
        Ball::new(Point::from(c), r).unwrap()
    }

    /// Covering radius of `cloud` over a fine grid of the ball, brute force.
    fn covering_radius(cloud: &PointCloud, norm: &NormDescriptor, b: &Ball, fine: usize) -> f64 {
        let (c, r) = (b.center(), b.radius());
        let reach = r * norm.box_bound();
        let mut worst = 0.0f64;
        for i in 0..=fine {
            for j in 0..=fine {
                let q = [
                    c[0] - reach + 2.0 * reach * i as f64 / fine as f64,
                    c[1] - reach + 2.0 * reach * j as f64 / fine as f64,
                ];
                if norm.dist(&q, c) > r {
                    continue;
                }
                let near = cloud.iter().map(|p| norm.dist(p, &q)).fold(f64::INFINITY, f64::min);
                worst = worst.max(near);
            }
        }
        worst
    }

    #[test]
    fn linf_unit_ball_at_unit_resolution_is_the_3x3_grid() {
        let n = NormDescriptor::max_norm(2).unwrap();
        let cloud = sample_ball(&n, &ball([0.0, 0.0], 1.0), 1.0).unwrap();
        let mut expect = Vec::new();
        for i in -1..=1 {
            for j in -1..=1 {
                expect.push(vec![i as f64, j as f64]);
            }
        }
        let got: Vec<Vec<f64>> = cloud.iter().map(<[f64]>::to_vec).collect();
        assert_eq!(got, expect);
    }

    #[test]
    fn coarse_resolution_keeps_center_and_is_deterministic() {
        let n = NormDescriptor::l1(2).unwrap();
        let b = ball([0.3, -0.2], 0.5);
        let cloud = sample_ball(&n, &b, 10.0).unwrap();
        assert!(cloud.contains_exact(&[0.3, -0.2]));
        assert_eq!(cloud, sample_ball(&n, &b, 10.0).unwrap());
        assert!(sample_ball(&n, &b, 0.0).is_err());
        assert!(sample_ball(&n, &b, -1.0).is_err());
    }

    #[test]
    fn membership_is_exact_and_density_holds() {
        let norms = [
            NormDescriptor::l1(2).unwrap(),
            NormDescriptor::lp(1.5, 2).unwrap(),
            NormDescriptor::euclidean(2).unwrap(),
            NormDescriptor::max_norm(2).unwrap(),
            NormDescriptor::hexagonal(2).unwrap(),
            NormDescriptor::weighted_lp(1.0, vec![1.0, 3.0]).unwrap(),
        ];
        for n in &norms {
            let b = ball([0.25, -1.0], 0.8);
            let eta = 0.1;
            let cloud = sample_ball(n, &b, eta).unwrap();
            for p in cloud.iter() {
                assert!(n.dist(p, b.center()) <= b.radius(), "{} {:?}", n.label(), p);
            }
            let cov = covering_radius(&cloud, n, &b, 160);
            assert!(cov <= eta, "{}: covering radius {cov}", n.label());
        }
    }

    #[test]
    fn three_dimensional_ball_matches_brute_force_grid() {
        let n = NormDescriptor::lp(3.0, 3).unwrap();
        let b = Ball::new(Point::from([0.0, 0.5, -0.5]), 1.0).unwrap();
        let eta = 0.3;
        let cloud = sample_ball(&n, &b, eta).unwrap();
        let h = lattice_pitch(&n, 1.0, eta);
        let m = (n.box_bound() / h + 1e-9).floor() as i64;
        let mut brute = 0;
        for i in -m..=m {
            for j in -m..=m {
                for k in -m..=m {
                    let x = [h * i as f64, 0.5 + h * j as f64, -0.5 + h * k as f64];
                    if n.dist(&x, b.center()) <= 1.0 {
                        brute += 1;
                    }
                }
            }
        }
        assert_eq!(cloud.len(), brute);
    }

    #[test]
    fn euclidean_circle_contains_axis_points() {
        let n = NormDescriptor::euclidean(2).unwrap();
        let s = SphereSurface::new(Point::from([0.0, 0.0]), 1.0).unwrap();
        let cloud = sample_sphere(&n, &s, 1.0).unwrap();
        for p in [[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]] {
            assert!(cloud.contains_exact(&p), "missing {p:?}");
        }
    }

    #[test]
    fn linf_sphere_lies_on_the_square() {
        let n = NormDescriptor::max_norm(2).unwrap();
        let s = SphereSurface::new(Point::from([0.0, 0.0]), 1.0).unwrap();
        let cloud = sample_sphere(&n, &s, 0.2).unwrap();
        assert!(cloud.len() > 8);
        for p in cloud.iter() {
            let m = p[0].abs().max(p[1].abs());
            assert!((m - 1.0).abs() <= 1e-12, "{p:?}");
        }
        // Walk the boundary finely; every boundary point is near a sample.
        for k in 0..400 {
            let t = -1.0 + 2.0 * k as f64 / 400.0;
            for q in [[1.0, t], [-1.0, t], [t, 1.0], [t, -1.0]] {
                let near = cloud.iter().map(|p| n.dist(p, &q)).fold(f64::INFINITY, f64::min);
                assert!(near <= 0.2, "{q:?} at {near}");
            }
        }
    }

    #[test]
    fn sphere_rejects_bad_input() {
        assert!(SphereSurface::new(Point::from([0.0, 0.0]), 0.0).is_err());
        let n = NormDescriptor::euclidean(2).unwrap();
        let s = SphereSurface::new(Point::from([0.0, 0.0]), 1.0).unwrap();
        assert!(sample_sphere(&n, &s, 0.0).is_err());
    }
}
