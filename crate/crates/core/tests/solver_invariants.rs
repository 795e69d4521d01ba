//! Per-step solver invariants on every preset, plus mass conservation under refinement.

use mhd2d::estimates::EstimateSeries;
use mhd2d::solver::{run, step, Scenario, ScenarioKind, SolverConfig, DIVERGENCE_TOL};
use mhd2d::spectral::{max_abs_divergence, Grid};
use proptest::prelude::*;

fn series(kind: ScenarioKind, n: usize, dt: f64, t_end: f64) -> EstimateSeries {
    let out = run(&Scenario::new(kind), Grid::new(n).unwrap(), &SolverConfig::with_dt(dt), t_end, 1_000_000).unwrap();
    assert!(out.failure.is_none(), "{kind}: {:?}", out.failure);
    out.series
}

fn mass_drift(s: &EstimateSeries) -> f64 {
    let m = s.column("rho_mass").unwrap();
    m.iter().map(|x| (x / m[0] - 1.0).abs()).fold(0.0, f64::max)
}

#[test]
fn every_step_on_every_preset() {
    for kind in ScenarioKind::ALL {
        let s = series(kind, 32, 1e-3, 0.25);
        let col = |name| s.column(name).unwrap();
        let (lo, hi) = (col("rho_min"), col("rho_max"));
        let energy: Vec<f64> = col("e_kin").iter().zip(col("e_mag")).map(|(a, b)| a + b).collect();
        for k in 1..s.len() {
            assert!(lo[k] >= lo[k - 1] && hi[k] <= hi[k - 1], "{kind}: density bounds widened at step {k}");
            assert!(energy[k] <= energy[k - 1], "{kind}: energy grew at step {k}");
        }
        for name in ["div_u_max", "div_B_max"] {
            let worst = col(name).into_iter().fold(0.0, f64::max);
            assert!(worst <= DIVERGENCE_TOL, "{kind}: {name} = {worst:e}");
        }
    }
}

#[test]
fn bubble_mass_at_reference_resolution() {
    let drift = mass_drift(&series(ScenarioKind::VacuumBubble, 64, 5e-4, 1.0));
    assert!(drift <= 5e-3, "mass drift {drift:e}");
}

#[test]
fn mass_drift_converges_at_second_order() {
    let drifts: Vec<f64> = [16, 32, 64]
        .into_iter()
        .map(|n| mass_drift(&series(ScenarioKind::RandomSmooth, n, 5e-4, 0.5)))
        .collect();
    for w in drifts.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.7, "drifts {drifts:?}");
    }
}

#[test]
fn homogeneous_and_resting_reductions() {
    let g = Grid::new(32).unwrap();
    let cfg = SolverConfig::with_dt(1e-3);

    let mut s = Scenario::new(ScenarioKind::TaylorGreen).initial_state(g).unwrap();
    for _ in 0..50 {
        s = step(&s, &cfg).unwrap();
        assert_eq!((s.rho.min(), s.rho.max()), (1.0, 1.0));
        assert_eq!(s.b.max_magnitude(), 0.0);
    }

    let mut s = Scenario::new(ScenarioKind::MhdRest).initial_state(g).unwrap();
    let b0 = s.b.max_magnitude();
    for _ in 0..50 {
        s = step(&s, &cfg).unwrap();
        assert!(s.u.max_magnitude() <= 1e-12);
    }
    let want = b0 * (-s.t).exp();
    assert!((s.b.max_magnitude() / want - 1.0).abs() < 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn one_step_from_random_data(seed in any::<u64>(), dt in 1e-4f64..5e-3) {
        let g = Grid::new(16).unwrap();
        let s0 = Scenario::new(ScenarioKind::RandomSmooth).with_seed(seed).initial_state(g).unwrap();
        let s1 = step(&s0, &SolverConfig::with_dt(dt)).unwrap();
        prop_assert!(s1.rho.min() >= s0.rho.min() && s1.rho.max() <= s0.rho.max());
        prop_assert!(max_abs_divergence(&s1.u) <= DIVERGENCE_TOL);
        prop_assert!(max_abs_divergence(&s1.b) <= DIVERGENCE_TOL);
        let energy = |s: &mhd2d::solver::State| 0.5 * (s.u.dot(&s.u).mul(&s.rho).integral() + s.b.inner(&s.b));
        prop_assert!(energy(&s1) <= energy(&s0));
    }
}
