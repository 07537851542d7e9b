//! The parallel and sequential kernels must agree bit for bit.

use connfield::flow::{run_from, ExperimentConfig, PenaltyMode};
use connfield::{par, Grid2D, ScalarField};

#[test]
fn parallel_and_sequential_flows_agree() {
    let grid = Grid2D::square(48).unwrap();
    let u0 = ScalarField::from_fn(grid, |x, y| {
        let a = (x - 0.3).hypot(y - 0.5) < 0.12;
        let b = (x - 0.7).hypot(y - 0.45) < 0.1;
        let c = (x - 0.5).hypot(y - 0.8) < 0.08;
        if a || b || c {
            1.0
        } else {
            0.05 + 0.1 * (7.0 * x + 3.0 * y).sin().abs()
        }
    });
    let cfg = ExperimentConfig {
        nx: 48,
        ny: 48,
        tau: 1e-5,
        penalty: PenaltyMode::SimplyConnected,
        max_steps: 60,
        stationary_tol: Some(0.0),
        refresh: 7,
        ..ExperimentConfig::default()
    };
    let run = |sequential| {
        par::set_sequential(sequential);
        let r = run_from(&cfg, u0.clone(), None, |_, _, _| Ok(())).unwrap();
        par::set_sequential(false);
        r
    };
    let (a, b) = (run(false), run(true));
    assert_eq!(a.field.values(), b.field.values());
    assert_eq!(a.trace, b.trace);
    assert_eq!(a.refresh_steps, b.refresh_steps);
}
