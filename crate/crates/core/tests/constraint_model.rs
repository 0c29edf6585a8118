use std::sync::Arc;

use topp_ni::instances::{demo_case, demo_path};
use topp_ni::{
    compute_limit_curves, from_generalized_dynamics, unicycle_constraints, AccelRow, Bound, GeneralizedDynamics,
    PathSpec, StateSample,
};

fn one_dof(xi: fn(f64) -> StateSample<f64>) -> GeneralizedDynamics<f64> {
    GeneralizedDynamics {
        n: 1,
        m: 1,
        total_length: 2.0,
        state: Arc::new(xi),
        inertia: Arc::new(|_| vec![vec![1.0]]),
        quadratic: Arc::new(|_| vec![vec![vec![0.0]]]),
        bias: Arc::new(|_| vec![-0.3]),
    }
}

#[test]
fn identity_state_map() {
    let cp = from_generalized_dynamics(one_dof(|s| StateSample { xi: vec![s], xi_s: vec![1.0], xi_ss: vec![0.0] }))
        .unwrap();
    assert_eq!(cp.accel_rows(0.7), vec![AccelRow { a: 1.0, b: 0.0, c: -0.3 }]);
}

#[test]
fn quadratic_state_map() {
    let cp =
        from_generalized_dynamics(one_dof(|s| StateSample { xi: vec![s * s], xi_s: vec![2.0 * s], xi_ss: vec![2.0] }))
            .unwrap();
    let r = cp.accel_rows(0.4)[0];
    assert!((r.a - 0.8).abs() < 1e-15 && (r.b - 2.0).abs() < 1e-15 && r.c == -0.3);
}

#[test]
fn two_dof_rows_match_hand_evaluation() {
    let dynamics = GeneralizedDynamics {
        n: 2,
        m: 2,
        total_length: 1.0,
        state: Arc::new(|s: f64| StateSample {
            xi: vec![s.sin(), s * s],
            xi_s: vec![s.cos(), 2.0 * s],
            xi_ss: vec![-s.sin(), 2.0],
        }),
        inertia: Arc::new(|x: &[f64]| vec![vec![1.0 + x[0] * x[0], x[1]], vec![0.5, 2.0]]),
        quadratic: Arc::new(|x: &[f64]| {
            vec![vec![vec![0.1, x[0]], vec![0.0, 0.3]], vec![vec![0.2, 0.0], vec![x[1], -0.4]]]
        }),
        bias: Arc::new(|x: &[f64]| vec![-1.0 - x[0], -2.0]),
    };
    let cp = from_generalized_dynamics(dynamics).unwrap();
    let s: f64 = 0.3;
    let (x0, x1) = (s.sin(), s * s);
    let (d0, d1) = (s.cos(), 2.0 * s);
    let (e0, e1) = (-s.sin(), 2.0);
    // row 0: M = [1 + x0², x1], P[j][0] = [[0.1, x0], [0.2, 0]]
    let a0 = (1.0 + x0 * x0) * d0 + x1 * d1;
    let b0 = (1.0 + x0 * x0) * e0 + x1 * e1 + d0 * (0.1 * d0 + x0 * d1) + d1 * (0.2 * d0);
    // row 1: M = [0.5, 2], P[j][1] = [[0, 0.3], [x1, -0.4]]
    let a1 = 0.5 * d0 + 2.0 * d1;
    let b1 = 0.5 * e0 + 2.0 * e1 + d0 * (0.3 * d1) + d1 * (x1 * d0 - 0.4 * d1);
    let rows = cp.accel_rows(s);
    let close = |x: f64, y: f64| (x - y).abs() < 1e-12;
    assert!(close(rows[0].a, a0) && close(rows[0].b, b0) && close(rows[0].c, -1.0 - x0));
    assert!(close(rows[1].a, a1) && close(rows[1].b, b1) && close(rows[1].c, -2.0));
}

#[test]
fn mismatched_dimensions_are_rejected() {
    let mut d = one_dof(|s| StateSample { xi: vec![s], xi_s: vec![1.0], xi_ss: vec![0.0] });
    d.bias = Arc::new(|_| vec![-1.0, -1.0]);
    assert!(from_generalized_dynamics(d).is_err());
}

#[test]
fn circle_velocity_limits() {
    let slow = unicycle_constraints(PathSpec::circle(2.0, 3.0).unwrap(), [0.2, 1.3], [0.05, 0.1]).unwrap();
    assert!((slow.velocity_limit(1.0).unwrap().value() - 0.4).abs() < 1e-12);
    let fast = unicycle_constraints(PathSpec::circle(2.0, 3.0).unwrap(), [0.5, 1.3], [0.05, 0.1]).unwrap();
    assert!((fast.velocity_limit(1.0).unwrap().value() - 1.0).abs() < 1e-12);
    let line = unicycle_constraints(PathSpec::line(5.0).unwrap(), [0.5, 1.3], [0.05, 0.1]).unwrap();
    assert!((line.velocity_limit(2.0).unwrap().value() - 1.3).abs() < 1e-12);
}

#[test]
fn demo_extremes_match_rowwise_evaluation() {
    let cp = demo_case::<f64>(1).unwrap().unwrap();
    let path = demo_path::<f64>().unwrap();
    let s = cp.total_length() / 2.0;
    let sdot: f64 = 0.5;
    let (k, ks) = (path.curvature(s), path.curvature_rate(s));
    let (aw, av) = (0.05, 0.1);
    let z = sdot * sdot;
    // rows (k, ks, -aw), (1, 0, -av), (-k, -ks, -aw), (-1, 0, -av)
    let rows = [(k, ks, -aw), (1.0, 0.0, -av), (-k, -ks, -aw), (-1.0, 0.0, -av)];
    let bound = |(a, b, c): (f64, f64, f64)| (-b * z - c) / a;
    let alpha = rows.iter().filter(|r| r.0 < 0.0).map(|&r| bound(r)).fold(f64::NEG_INFINITY, f64::max);
    let beta = rows.iter().filter(|r| r.0 > 0.0).map(|&r| bound(r)).fold(f64::INFINITY, f64::min);
    assert!((cp.alpha(s, sdot).unwrap() - alpha).abs() < 1e-12);
    assert!((cp.beta(s, sdot).unwrap() - beta).abs() < 1e-12);
}

#[test]
fn closed_form_mvc_matches_bisection() {
    let cp = demo_case::<f64>(1).unwrap().unwrap();
    let total = cp.total_length();
    for i in 1..40 {
        let s = total * i as f64 / 40.0 + 0.013;
        let Bound::Finite(m) = cp.mvc_at(s).unwrap().sdot else { continue };
        let gap = |v: f64| {
            let (a, b) = cp.extremes(s, v * v).unwrap();
            b - a
        };
        let (mut lo, mut hi) = (0.0, 10.0 * m);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if gap(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo - m).abs() < 1e-6, "s = {s}: {lo} vs {m}");
    }
}

#[test]
fn limit_curve_invariants_on_demo() {
    for case in [1, 2] {
        let cp = demo_case::<f64>(case).unwrap().unwrap();
        let lc = compute_limit_curves(&cp, 1001).unwrap();
        for k in 0..lc.len() {
            let star = lc.mvc[k].min(lc.vlim[k]);
            assert_eq!(lc.mvc_star[k], star);
            assert!(!lc.mvc_star[k].exceeds(lc.mvc[k].finite().unwrap_or(f64::INFINITY)));
            if lc.dagger[k] {
                assert!(lc.mvc_star[k].value() < lc.mvc[k].finite().unwrap_or(f64::INFINITY));
            }
            let s = lc.grid[k];
            let cap = lc.mvc_star[k].value();
            for f in [0.0, 0.25, 0.5, 0.9, 0.999] {
                let (a, b) = cp.extremes(s, (f * cap).powi(2)).unwrap();
                assert!(a < b, "s = {s}, fraction {f}");
            }
        }
    }
}

#[test]
fn demo_case_one_has_two_pockets() {
    let cp = demo_case::<f64>(1).unwrap().unwrap();
    let lc = compute_limit_curves(&cp, 2001).unwrap();
    assert_eq!(lc.dagger_segments.len(), 2);
    let total = cp.total_length();
    assert!(lc.dagger_segments[0].end < total / 2.0 && lc.dagger_segments[1].start > total / 2.0);
}

#[test]
fn relaxing_bounds_raises_beta_and_lowers_alpha() {
    let tight = demo_case::<f64>(1).unwrap().unwrap();
    let loose = unicycle_constraints(demo_path().unwrap(), [0.5, 1.3], [0.1, 0.2]).unwrap();
    let total = tight.total_length();
    for i in 0..=50 {
        let s = total * i as f64 / 50.0;
        let (a0, b0) = tight.extremes(s, 0.04).unwrap();
        let (a1, b1) = loose.extremes(s, 0.04).unwrap();
        assert!(a1 <= a0 + 1e-15 && b1 >= b0 - 1e-15);
    }
}
