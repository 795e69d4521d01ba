//! Estimate functionals evaluated on solver trajectories.

use std::f64::consts::E;

use mhd2d::estimates::{gronwall_envelope, psi, psi_series, serrin_integral, EnergyColumns};
use mhd2d::lp::time_l2;
use mhd2d::solver::{run, RunOutput, Scenario, ScenarioKind, SolverConfig};
use mhd2d::spectral::{norm_hs, norm_lp, Grid};

fn simulate(kind: ScenarioKind, n: usize, dt: f64, t_end: f64, every: usize) -> RunOutput {
    let out = run(&Scenario::new(kind), Grid::new(n).unwrap(), &SolverConfig::with_dt(dt), t_end, every).unwrap();
    assert!(out.failure.is_none());
    out
}

#[test]
fn energy_inequality_on_every_preset() {
    for kind in ScenarioKind::ALL {
        let out = simulate(kind, 64, 5e-4, 0.25, 50);
        let cols = EnergyColumns::from_series(&out.series);
        let d = cols.identity_defect().unwrap();
        let last = d.len() - 1;
        let e0 = cols.total_energy()[0];
        // lhs − rhs = E(T) − E(0) + ∫D
        let excess = d.lhs[last] - d.rhs[last];
        assert!(excess <= 2e-2 * e0, "{kind}: excess {excess:e} of E(0) = {e0:e}");
    }
}

#[test]
fn psi_starts_at_its_floor_and_grows() {
    for kind in ScenarioKind::ALL {
        let out = simulate(kind, 32, 1e-3, 0.2, 10);
        let traj = &out.trajectory;
        let s0 = &traj.states()[0];
        let h1 = norm_hs(&s0.u, 1.0).unwrap().powi(2) + norm_hs(&s0.b, 1.0).unwrap().powi(2);
        assert!((psi(traj, 0.0).unwrap() - (E + h1)).abs() <= 1e-12 * (E + h1));
        let series = psi_series(traj);
        assert!(series.iter().all(|&p| p >= E));
        assert!(series.windows(2).all(|w| w[1] >= w[0]), "{kind}: {series:?}");

        let env = gronwall_envelope(traj, 0.0).unwrap();
        for (p, e) in env.psi.iter().zip(&env.envelope) {
            assert!(p <= &(e * (1.0 + 1e-12)));
        }
    }
}

#[test]
fn serrin_endpoint_matches_time_l2() {
    let out = simulate(ScenarioKind::RandomSmooth, 32, 1e-3, 0.3, 5);
    let traj = &out.trajectory;
    let times = traj.times();
    let sup: Vec<f64> = traj
        .states()
        .iter()
        .map(|s| norm_lp(&s.u, f64::INFINITY).unwrap())
        .collect();
    let want = time_l2(&times, &sup, times[0], *times.last().unwrap()).unwrap().powi(2);
    let got = serrin_integral(traj, f64::INFINITY, 2.0).unwrap();
    assert!((got / want - 1.0).abs() <= 1e-10, "{got} vs {want}");

    assert!(serrin_integral(traj, 4.0, 4.0).is_ok());
    assert!(serrin_integral(traj, 3.0, 2.0).is_err());
}
