use isoatlas_core::midpoint::metric_midpoint_anchored;
use isoatlas_core::{initial_lens, metric_midpoint, set_diameter, NormDescriptor, Point};
use proptest::prelude::*;

fn norms2() -> Vec<NormDescriptor> {
    vec![
        NormDescriptor::l1(2).unwrap(),
        NormDescriptor::euclidean(2).unwrap(),
        NormDescriptor::lp(3.0, 2).unwrap(),
        NormDescriptor::max_norm(2).unwrap(),
        NormDescriptor::hexagonal(2).unwrap(),
    ]
}

fn pt2() -> impl Strategy<Value = Point> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_map(|(a, b)| Point::from([a, b]))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn translation_equivariance(k in 0usize..5, x0 in pt2(), x1 in pt2(), t in pt2()) {
        let norm = &norms2()[k];
        let d = norm.dist(&x0, &x1);
        prop_assume!(d > 0.1);
        let (eta, tol) = (d / 100.0, d / 50.0);
        let (m, _) = metric_midpoint(&x0, &x1, norm, eta, tol).unwrap();
        let (mt, _) = metric_midpoint(&x0.add(&t), &x1.add(&t), norm, eta, tol).unwrap();
        prop_assert!(norm.dist(&mt, &m.add(&t)) <= 2.0 * (tol + 2.0 * eta));
    }

    #[test]
    fn scale_equivariance(k in 0usize..5, x0 in pt2(), x1 in pt2(), s in 0.2f64..5.0) {
        let norm = &norms2()[k];
        let d = norm.dist(&x0, &x1);
        prop_assume!(d > 0.1);
        let (eta, tol) = (d / 100.0, d / 50.0);
        let (m, _) = metric_midpoint(&x0, &x1, norm, eta, tol).unwrap();
        let (ms, _) = metric_midpoint(&x0.scale(s), &x1.scale(s), norm, s * eta, s * tol).unwrap();
        prop_assert!(norm.dist(&ms, &m.scale(s)) <= 2.0 * s * (tol + 2.0 * eta));
    }

    #[test]
    fn both_lattice_routes_agree(k in 0usize..5, x0 in pt2(), x1 in pt2()) {
        let norm = &norms2()[k];
        let d = norm.dist(&x0, &x1);
        prop_assume!(d > 0.1);
        let (eta, tol) = (d / 200.0, d / 100.0);
        let (m, _) = metric_midpoint(&x0, &x1, norm, eta, tol).unwrap();
        let (ma, trace) = metric_midpoint_anchored(&x0, &x1, norm, eta, tol).unwrap();
        let truth = x0.midpoint(&x1);
        prop_assert!(norm.dist(&m, &truth) <= tol + 2.0 * eta);
        prop_assert!(norm.dist(&ma, &truth) <= tol + 2.0 * eta);
        for w in trace.diameters.windows(2) {
            prop_assert!(w[1] <= 0.5 * w[0] + 4.0 * eta);
        }
    }
}

/// For ℓ∞ the metric midpoints of (0,0) and (2,0) form the segment {1}×[−1,1].
#[test]
fn linf_midpoint_set_is_not_a_point() {
    let norm = NormDescriptor::max_norm(2).unwrap();
    let (x, y) = (Point::from([0.0, 0.0]), Point::from([2.0, 0.0]));
    let lens = initial_lens(&x, &y, &norm, 0.01).unwrap();
    assert!(set_diameter(&lens, &norm).unwrap() >= norm.dist(&x, &y) / 2.0);
    // Both ends of the segment are exact metric midpoints.
    for end in [[1.0, 1.0], [1.0, -1.0]] {
        assert_eq!(norm.dist(&x, &end), 1.0);
        assert_eq!(norm.dist(&end, &y), 1.0);
    }
}

/// For strictly convex norms the lens shrinks with η. For ℓ1 the midpoints
/// of a diagonal pair form a segment of length d, whatever η.
#[test]
fn lens_diameter_trend_in_eta() {
    let (x, y) = (Point::from([0.0, 0.0]), Point::from([2.0, 0.0]));
    let lens_diam = |norm: &NormDescriptor, eta: f64| {
        set_diameter(&initial_lens(&x, &y, norm, eta).unwrap(), norm).unwrap()
    };
    let etas = [0.08, 0.04, 0.02, 0.01, 0.005];
    for p in [1.5, 2.0, 3.0] {
        let norm = NormDescriptor::lp(p, 2).unwrap();
        let d: Vec<f64> = etas.iter().map(|&e| lens_diam(&norm, e)).collect();
        assert!(d.windows(2).all(|w| w[1] < w[0]), "p = {p}: {d:?}");
        // δ(C_1) ≲ c·√(η·d) with a modest constant.
        for (e, dd) in etas.iter().zip(&d) {
            assert!(*dd <= 6.0 * (e * 2.0).sqrt(), "p = {p}, eta = {e}: {dd}");
        }
    }
    let l1 = NormDescriptor::l1(2).unwrap();
    let diag = Point::from([2.0, 2.0]);
    let lens = initial_lens(&x, &diag, &l1, 0.005).unwrap();
    assert!(set_diameter(&lens, &l1).unwrap() >= 4.0);
}
