use proptest::prelude::*;
use topp_ni::{
    compute_limit_curves, ni_plan, rt_detect, unicycle_constraints, BezierPath, Error, PathSpec, PlannerOptions,
};

fn polygon() -> impl Strategy<Value = [[f64; 2]; 4]> {
    (4.0..9.0f64, 0.2..0.45f64, 0.55..0.8f64, -3.0..3.0f64, -3.0..3.0f64, -1.0..1.0f64)
        .prop_map(|(len, a, b, y1, y2, y3)| [[0.0, 0.0], [a * len, y1], [b * len, y2], [len, y3]])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn arc_map_round_trips(pts in polygon()) {
        let b = BezierPath::new(pts, 201).unwrap();
        let total = b.total_length();
        for i in 0..=200 {
            let s = total * i as f64 / 200.0;
            prop_assert!((b.arc_length_at(b.lambda_at(s)) - s).abs() < 1e-9);
        }
    }

    #[test]
    fn below_the_limit_alpha_is_below_beta(pts in polygon(), vw in 0.1..0.8f64, aw in 0.02..0.1f64) {
        let cp = unicycle_constraints(PathSpec::bezier(pts).unwrap(), [vw, 1.3], [aw, 0.1]).unwrap();
        let lc = compute_limit_curves(&cp, 401).unwrap();
        for (k, &s) in lc.grid.iter().enumerate() {
            prop_assert_eq!(lc.mvc_star[k], lc.mvc[k].min(lc.vlim[k]));
            let cap = lc.mvc_star[k].value();
            for f in [0.0, 0.5, 0.99] {
                let (a, b) = cp.extremes(s, (f * cap).powi(2)).unwrap();
                prop_assert!(a < b);
            }
        }
    }

    #[test]
    fn planner_and_detector_agree(pts in polygon(), vw in 0.1..0.8f64, aw in 0.02..0.1f64) {
        let cp = unicycle_constraints(PathSpec::bezier(pts).unwrap(), [vw, 1.3], [aw, 0.1]).unwrap();
        let lc = compute_limit_curves(&cp, 1001).unwrap();
        let opts = PlannerOptions::for_length(cp.total_length());
        let rt = rt_detect(&cp, &lc, 0.0, 0.0, &opts).unwrap();
        match ni_plan(&cp, &lc, 0.0, 0.0, &opts) {
            Ok(t) => {
                prop_assert!(rt.feasible);
                prop_assert!((t.traversal_time - rt.trajectory.traversal_time).abs() < 1e-9);
                prop_assert!(t.segments.windows(2).all(|w| w[0].kind != w[1].kind));
                prop_assert!(t.switch_ab.len() <= opts.switch_cap);
            }
            Err(Error::NiFailure { .. }) | Err(Error::NotTraversable { .. }) => prop_assert!(!rt.feasible),
            Err(e) => prop_assert!(false, "unexpected error {}", e),
        }
    }
}
