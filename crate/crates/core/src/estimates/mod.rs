//! Functionals, identities and inequality probes evaluated on trajectories.

mod functionals;
mod regularity;
mod series;

pub use functionals::{
    density_max_principle, energy_identity_defect, energy_report, first_level_identity_defect,
    gronwall_envelope, phi, phi_series, psi, psi_series, serrin_integral, DensityReport,
    EnergyColumns, FirstLevelDefects, GronwallEnvelope, IdentityDefect,
};
pub use regularity::{poisson_regularity_probe, stokes_regularity_probe};
pub use series::{EstimateSeries, COLUMNS};

pub(crate) use functionals::psi_from_series;
pub(crate) use series::SeriesBuilder;

use thiserror::Error;

use crate::solver::State;
use crate::spectral::{FieldError, VectorField2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("need at least {needed} snapshots, have {have}")]
    TooFewSnapshots { needed: usize, have: usize },
    #[error("time {0} lies outside the trajectory span [{1}, {2}]")]
    OutOfRange(f64, f64, f64),
    #[error("snapshot times must be strictly increasing and uniformly spaced by {0}")]
    NonUniform(f64),
    #[error("exponents r = {0}, s = {1} violate 2/s + 2/r = 1")]
    SerrinExponents(f64, f64),
    #[error("exponent q = {0} must lie in (1, ∞)")]
    Exponent(f64),
    #[error("forcing is identically zero")]
    ZeroForcing,
    #[error("forcing has nonzero mean {0:e}; no periodic solution exists")]
    NonzeroMean(f64),
    #[error("column '{0}' is unknown")]
    UnknownColumn(String),
    #[error("malformed series: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// States sampled at a uniform cadence.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    states: Vec<State>,
    dt_snapshot: f64,
}

impl Trajectory {
    pub fn new(states: Vec<State>, dt_snapshot: f64) -> Result<Self, EstimateError> {
        let uniform = states.windows(2).all(|w| {
            let gap = w[1].t - w[0].t;
            gap > 0.0 && (gap - dt_snapshot).abs() <= 1e-9 * dt_snapshot.max(1.0)
        });
        if !(dt_snapshot > 0.0) || !uniform {
            return Err(EstimateError::NonUniform(dt_snapshot));
        }
        Ok(Self {
            states,
            dt_snapshot,
        })
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn into_states(self) -> Vec<State> {
        self.states
    }

    pub fn dt_snapshot(&self) -> f64 {
        self.dt_snapshot
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    /// Appends a state one cadence after the last one.
    pub fn push(&mut self, state: State) -> Result<(), EstimateError> {
        if let Some(last) = self.states.last() {
            let gap = state.t - last.t;
            if !(gap > 0.0 && (gap - self.dt_snapshot).abs() <= 1e-9 * self.dt_snapshot.max(1.0)) {
                return Err(EstimateError::NonUniform(self.dt_snapshot));
            }
        }
        self.states.push(state);
        Ok(())
    }

    pub(crate) fn require(&self, needed: usize) -> Result<(), EstimateError> {
        if self.states.len() < needed {
            Err(EstimateError::TooFewSnapshots {
                needed,
                have: self.states.len(),
            })
        } else {
            Ok(())
        }
    }
}

/// `(u_t, B_t)` at index `k` of equally spaced states: centered in the
/// interior, second-order one-sided at the ends, first-order with two states.
pub(crate) fn time_derivative(states: &[State], k: usize, h: f64) -> (VectorField2, VectorField2) {
    let len = states.len();
    assert!(len >= 2 && k < len);
    let combine = |w: &[(usize, f64)], f: &dyn Fn(&State) -> &VectorField2| {
        let mut acc = VectorField2::zeros(f(&states[0]).grid());
        for &(i, c) in w {
            acc = acc.add(&f(&states[i]).scale(c / h));
        }
        acc
    };
    let weights: Vec<(usize, f64)> = if len == 2 {
        vec![(1, 1.0), (0, -1.0)]
    } else if k == 0 {
        vec![(0, -1.5), (1, 2.0), (2, -0.5)]
    } else if k == len - 1 {
        vec![(k, 1.5), (k - 1, -2.0), (k - 2, 0.5)]
    } else {
        vec![(k + 1, 0.5), (k - 1, -0.5)]
    };
    (combine(&weights, &|s| &s.u), combine(&weights, &|s| &s.b))
}

/// Maps `f` over `0..len`, in parallel when the `parallel` feature is on.
/// Results are returned in index order either way.
pub(crate) fn per_index<T: Send>(len: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..len).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..len).map(f).collect()
    }
}
