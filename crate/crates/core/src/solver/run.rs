use crate::estimates::{EstimateSeries, SeriesBuilder, Trajectory};
use crate::spectral::Grid;

use super::{step_with_diagnostics, Scenario, SolverConfig, SolverError, State};

/// Solver bookkeeping summed over a run.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunTotals {
    pub steps: usize,
    pub momentum_iterations: usize,
    pub pressure_iterations: usize,
    /// Steps on which the vacuum floor was active somewhere.
    pub floor_steps: usize,
    pub cfl_warnings: usize,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    /// States every `snapshot_every` steps, starting with the initial state.
    pub trajectory: Trajectory,
    /// One row per step.
    pub series: EstimateSeries,
    pub final_state: State,
    /// Set when a step failed; everything above covers the steps before it.
    pub failure: Option<SolverError>,
    pub totals: RunTotals,
}

/// Integrates `round(t_end / dt)` steps. Step `k` is stamped `k · dt`.
pub fn run(
    scenario: &Scenario,
    grid: Grid,
    cfg: &SolverConfig,
    t_end: f64,
    snapshot_every: usize,
) -> Result<RunOutput, SolverError> {
    cfg.validate()?;
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(SolverError::BadHorizon(t_end));
    }
    if snapshot_every == 0 {
        return Err(SolverError::Config("snapshot_every must be at least 1".into()));
    }
    let steps = (t_end / cfg.dt).round() as usize;
    let mut state = scenario.initial_state(grid)?;
    let dt_snapshot = cfg.dt * snapshot_every as f64;
    let mut trajectory = Trajectory::new(vec![state.clone()], dt_snapshot)
        .expect("a single state is always uniform");
    let mut builder = SeriesBuilder::new(cfg.dt);
    builder.push(state.clone());
    let mut totals = RunTotals::default();
    let mut failure = None;
    for k in 1..=steps {
        match step_with_diagnostics(&state, cfg) {
            Ok((mut next, diag)) => {
                next.t = k as f64 * cfg.dt;
                if let Err(e) = next.validate() {
                    failure = Some(e);
                    break;
                }
                totals.steps += 1;
                totals.momentum_iterations += diag.momentum_iterations;
                totals.pressure_iterations += diag.pressure_iterations;
                totals.floor_steps += usize::from(diag.floor_cells > 0);
                totals.cfl_warnings += usize::from(diag.cfl_exceeded);
                state = next;
                builder.push(state.clone());
                if k % snapshot_every == 0 {
                    trajectory
                        .push(state.clone())
                        .expect("snapshot stamps are uniform by construction");
                }
            }
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    Ok(RunOutput {
        trajectory,
        series: builder.finish(),
        final_state: state,
        failure,
        totals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::ScenarioKind;

    #[test]
    fn zero_horizon_keeps_initial_state() {
        let g = Grid::new(16).unwrap();
        let sc = Scenario::new(ScenarioKind::TaylorGreen);
        let out = run(&sc, g, &SolverConfig::default(), 0.0, 1).unwrap();
        assert_eq!(out.trajectory.len(), 1);
        assert!(out.series.is_empty());
        assert_eq!(out.final_state, sc.initial_state(g).unwrap());
        assert!(run(&sc, g, &SolverConfig::default(), -1.0, 1).is_err());
        assert!(run(&sc, g, &SolverConfig::default(), 1.0, 0).is_err());
    }

    #[test]
    fn cadence_and_series_length() {
        let g = Grid::new(16).unwrap();
        let sc = Scenario::new(ScenarioKind::VacuumBubble);
        let cfg = SolverConfig::with_dt(1e-3);
        let out = run(&sc, g, &cfg, 0.01, 3).unwrap();
        assert!(out.failure.is_none());
        assert_eq!(out.totals.steps, 10);
        assert_eq!(out.series.len(), 11);
        assert_eq!(out.trajectory.times().len(), 4);
        assert!((out.trajectory.times()[3] - 0.009).abs() < 1e-15);
        assert_eq!(out.final_state.t, 0.01);
    }
}
