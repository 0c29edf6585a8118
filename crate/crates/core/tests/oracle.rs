use topp_ni::instances::demo_case;
use topp_ni::{compute_limit_curves, dp_min_time, ni_plan, PlannerOptions, DEFAULT_GRID};

#[test]
fn case_one_oracle_is_close_to_planner() {
    let cp = demo_case::<f64>(1).unwrap().unwrap();
    let lc = compute_limit_curves(&cp, DEFAULT_GRID).unwrap();
    let t_ni = ni_plan(&cp, &lc, 0.0, 0.0, &PlannerOptions::for_length(cp.total_length())).unwrap().traversal_time;
    let t_dp = dp_min_time(&cp, &lc, 0.0, 0.0, 256, 256).unwrap().unwrap();
    assert!((t_ni - t_dp).abs() / t_dp <= 0.05, "{t_ni} vs {t_dp}");
}

#[test]
fn refinement_converges() {
    let cp = demo_case::<f64>(1).unwrap().unwrap();
    let lc = compute_limit_curves(&cp, DEFAULT_GRID).unwrap();
    let times: Vec<f64> =
        [64, 128, 256, 512].iter().map(|&n| dp_min_time(&cp, &lc, 0.0, 0.0, n, n).unwrap().unwrap()).collect();
    for w in times.windows(3) {
        let (a, b, c) = (w[0], w[1], w[2]);
        // a refinement may not overshoot by more than twice the previous change
        assert!(c - b <= 2.0 * (a - b).abs() + 1e-9, "{times:?}");
    }
    assert!((times[3] - times[2]).abs() <= (times[1] - times[0]).abs() + 1e-9, "{times:?}");
}

#[test]
fn start_above_the_limit_is_unreachable() {
    let cp = demo_case::<f64>(1).unwrap().unwrap();
    let lc = compute_limit_curves(&cp, DEFAULT_GRID).unwrap();
    assert_eq!(dp_min_time(&cp, &lc, 5.0, 0.0, 64, 64).unwrap(), None);
}
