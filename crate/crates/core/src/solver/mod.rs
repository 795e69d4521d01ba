//! Time integration of the nonhomogeneous MHD system
//!
//! ```text
//! ρ_t + u·∇ρ = 0
//! ρ u_t − Δu + (ρu·∇)u − (B·∇)B + ∇P = 0
//! B_t − ΔB + (u·∇)B − (B·∇)u = 0
//! div u = div B = 0
//! ```
//!
//! on the periodic torus with μ = λ = 1. One step is split as density
//! transport, momentum, pressure projection, induction.

mod advect;
mod induction;
mod krylov;
mod momentum;
mod pressure;
mod run;
mod scenario;

pub use advect::{advect_density, cfl_dt, Advected};
pub use induction::induction_step;
pub use momentum::{momentum_step, MomentumOutcome};
pub use pressure::{compatibility_residual, pressure_project, CompatibilityResidual, Projection};
pub use run::{run, RunOutput, RunTotals};
pub use scenario::{bubble_density, Scenario, ScenarioKind};

pub(crate) use momentum::{convective, Spectral2};

use thiserror::Error;

use crate::spectral::{max_abs_divergence, FieldError, ScalarField, VectorField2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("non-finite values in {stage} at t = {t}")]
    NonFinite { stage: &'static str, t: f64 },
    #[error("{solve} solve did not converge in {iterations} iterations (relative residual {residual:e})")]
    NoConvergence {
        solve: &'static str,
        iterations: usize,
        residual: f64,
    },
    #[error("state invariant violated: {0}")]
    Invariant(String),
    #[error("t_end must be nonnegative and finite, got {0}")]
    BadHorizon(f64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub dt: f64,
    /// Vacuum floor relative to `max ρ`, used only inside the pressure operator.
    pub eps_rel: f64,
    pub cfl: f64,
    pub dealias: bool,
    pub picard_tol: f64,
    pub picard_max: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 5e-4,
            eps_rel: 1e-6,
            cfl: 0.5,
            dealias: true,
            picard_tol: 1e-10,
            picard_max: 500,
        }
    }
}

impl SolverConfig {
    pub fn with_dt(dt: f64) -> Self {
        Self {
            dt,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !positive(self.dt) {
            return Err(SolverError::Config(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.eps_rel > 0.0 && self.eps_rel < 1.0) {
            return Err(SolverError::Config(format!(
                "eps_rel = {} must lie in (0, 1)",
                self.eps_rel
            )));
        }
        if !positive(self.cfl) || !positive(self.picard_tol) || self.picard_max == 0 {
            return Err(SolverError::Config(
                "cfl, picard_tol and picard_max must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Density, velocity and magnetic field at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    pub t: f64,
    pub rho: ScalarField,
    pub u: VectorField2,
    pub b: VectorField2,
}

pub const DIVERGENCE_TOL: f64 = 1e-10;
pub const NEGATIVE_DENSITY_TOL: f64 = 1e-13;

impl State {
    pub fn new(t: f64, rho: ScalarField, u: VectorField2, b: VectorField2) -> Result<Self, SolverError> {
        let state = Self { t, rho, u, b };
        state.validate()?;
        Ok(state)
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        let g = self.rho.grid();
        if self.u.grid() != g || self.b.grid() != g {
            return Err(FieldError::GridMismatch(g.n(), self.u.grid().n()).into());
        }
        if !(self.rho.is_finite() && self.u.is_finite() && self.b.is_finite()) {
            return Err(SolverError::NonFinite {
                stage: "state",
                t: self.t,
            });
        }
        if self.rho.min() < -NEGATIVE_DENSITY_TOL {
            return Err(SolverError::Invariant(format!(
                "negative density {}",
                self.rho.min()
            )));
        }
        let du = max_abs_divergence(&self.u);
        let db = max_abs_divergence(&self.b);
        if du > DIVERGENCE_TOL || db > DIVERGENCE_TOL {
            return Err(SolverError::Invariant(format!(
                "divergence |div u| = {du:e}, |div B| = {db:e}"
            )));
        }
        Ok(())
    }
}

/// Per-step solver bookkeeping.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepDiagnostics {
    pub momentum_iterations: usize,
    pub pressure_iterations: usize,
    /// Cells where the vacuum floor replaced ρ in the pressure operator.
    pub floor_cells: usize,
    pub cfl_exceeded: bool,
}

/// Advances one step: transport, momentum, projection, induction.
pub fn step(state: &State, cfg: &SolverConfig) -> Result<State, SolverError> {
    step_with_diagnostics(state, cfg).map(|(s, _)| s)
}

pub fn step_with_diagnostics(
    state: &State,
    cfg: &SolverConfig,
) -> Result<(State, StepDiagnostics), SolverError> {
    cfg.validate()?;
    let advected = advect_density(&state.rho, &state.u, cfg.dt, cfg.cfl)?;
    let transported = State {
        t: state.t,
        rho: advected.rho,
        u: state.u.clone(),
        b: state.b.clone(),
    };
    let mom = momentum::momentum_solve(state, &transported.rho, cfg)?;
    let proj = pressure_project(&mom.u_star, &transported.rho, cfg)?;
    let after = State {
        u: proj.u,
        ..transported
    };
    let b = induction_step(&after, cfg)?;
    let next = State {
        t: state.t + cfg.dt,
        b,
        ..after
    };
    let diag = StepDiagnostics {
        momentum_iterations: mom.iterations,
        pressure_iterations: proj.iterations,
        floor_cells: proj.floor_cells,
        cfl_exceeded: advected.cfl_exceeded,
    };
    Ok((next, diag))
}

pub(crate) fn ensure_finite(v: &VectorField2, stage: &'static str, t: f64) -> Result<(), SolverError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(SolverError::NonFinite { stage, t })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        assert!(SolverConfig::with_dt(0.0).validate().is_err());
        let cfg = SolverConfig {
            eps_rel: 1.0,
            ..SolverConfig::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn zero_flow_is_stationary() {
        let g = Grid::new(32).unwrap();
        let rho = ScalarField::from_fn(g, |x, y| 1.0 + 0.3 * (x + y).sin());
        let s0 = State::new(0.0, rho, VectorField2::zeros(g), VectorField2::zeros(g)).unwrap();
        let cfg = SolverConfig::with_dt(1e-3);
        let s1 = step(&s0, &cfg).unwrap();
        assert_eq!(s1.rho, s0.rho);
        assert_eq!(s1.u.max_magnitude(), 0.0);
        assert_eq!(s1.b.max_magnitude(), 0.0);
        assert_eq!(s1.t, 1e-3);
    }

    #[test]
    fn state_rejects_divergent_velocity() {
        let g = Grid::new(16).unwrap();
        let u = VectorField2::from_fn(g, |x, _| x.sin(), |_, _| 0.0);
        let err = State::new(0.0, ScalarField::constant(g, 1.0), u, VectorField2::zeros(g));
        assert!(matches!(err, Err(SolverError::Invariant(_))));
    }

    #[test]
    fn mhd_rest_one_step_is_exact() {
        let g = Grid::new(32).unwrap();
        let s0 = Scenario::new(ScenarioKind::MhdRest).initial_state(g).unwrap();
        let cfg = SolverConfig::with_dt(1e-3);
        let s1 = step(&s0, &cfg).unwrap();
        assert!(s1.rho.sub(&s0.rho).max_abs() <= 1e-12);
        assert!(s1.u.max_magnitude() <= 1e-10);
        let want = s0.b.scale((-cfg.dt).exp());
        assert!(s1.b.max_abs_diff(&want) <= 1e-12);
    }

    #[test]
    fn taylor_green_step_dissipates() {
        let g = Grid::new(32).unwrap();
        let s0 = Scenario::new(ScenarioKind::TaylorGreen).initial_state(g).unwrap();
        let s1 = step(&s0, &SolverConfig::with_dt(1e-3)).unwrap();
        let e = |s: &State| 0.5 * s.u.dot(&s.u).mul(&s.rho).integral() + 0.5 * s.b.inner(&s.b);
        assert!(e(&s1) <= e(&s0));
        s1.validate().unwrap();
    }
}
