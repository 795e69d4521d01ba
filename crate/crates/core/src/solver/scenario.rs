use std::fmt;
use std::str::FromStr;

use crate::lp::smooth_ramp;
use crate::random::{band_limited, rng};
use crate::spectral::{gradient, leray_project, Grid, ScalarField, VectorField2};

use super::{SolverError, State};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    TaylorGreen,
    MhdRest,
    VacuumBubble,
    RandomSmooth,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 4] = [
        ScenarioKind::TaylorGreen,
        ScenarioKind::MhdRest,
        ScenarioKind::VacuumBubble,
        ScenarioKind::RandomSmooth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::TaylorGreen => "taylor_green",
            ScenarioKind::MhdRest => "mhd_rest",
            ScenarioKind::VacuumBubble => "vacuum_bubble",
            ScenarioKind::RandomSmooth => "random_smooth",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = SolverError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|k| k.name()).collect();
            SolverError::Config(format!(
                "unknown scenario '{s}', expected one of {}",
                names.join(", ")
            ))
        })
    }
}

/// Initial-data preset.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub seed: u64,
    pub velocity_amplitude: f64,
    pub magnetic_amplitude: f64,
}

/// Density that vanishes on the disc of radius 0.5 about `(π, π)` and equals
/// 1 outside radius 0.8.
pub fn bubble_density(grid: Grid) -> ScalarField {
    let c = std::f64::consts::PI;
    ScalarField::from_fn(grid, |x, y| {
        let d = (x - c).hypot(y - c);
        smooth_ramp((d - 0.5) / 0.3)
    })
}

fn curl_of_stream(psi: &ScalarField) -> VectorField2 {
    let g = gradient(psi);
    VectorField2::from_parts(g.y().clone(), g.x().scale(-1.0))
}

fn normalized(v: VectorField2, amplitude: f64) -> VectorField2 {
    let m = v.max_magnitude();
    if m > 0.0 {
        v.scale(amplitude / m)
    } else {
        v
    }
}

impl Scenario {
    pub fn new(kind: ScenarioKind) -> Self {
        let (velocity_amplitude, magnetic_amplitude) = match kind {
            ScenarioKind::TaylorGreen => (1.0, 0.0),
            ScenarioKind::MhdRest => (0.0, 1.0),
            ScenarioKind::VacuumBubble => (1.0, 0.2),
            ScenarioKind::RandomSmooth => (1.0, 0.5),
        };
        Self {
            kind,
            seed: 0,
            velocity_amplitude,
            magnetic_amplitude,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn initial_state(&self, grid: Grid) -> Result<State, SolverError> {
        let (a, b) = (self.velocity_amplitude, self.magnetic_amplitude);
        let (rho, u, bf) = match self.kind {
            ScenarioKind::TaylorGreen => (
                ScalarField::constant(grid, 1.0),
                VectorField2::from_fn(grid, |x, y| a * x.sin() * y.cos(), |x, y| -a * x.cos() * y.sin()),
                VectorField2::zeros(grid),
            ),
            ScenarioKind::MhdRest => (
                bubble_density(grid),
                VectorField2::zeros(grid),
                VectorField2::from_fn(grid, |_, y| b * y.sin(), |_, _| 0.0),
            ),
            ScenarioKind::VacuumBubble => {
                let rho = bubble_density(grid);
                let w = VectorField2::from_fn(grid, |_, y| a * y.cos(), |x, _| a * x.sin());
                let u = leray_project(&w.mul_scalar(&rho));
                let bf = VectorField2::from_fn(grid, |_, y| -b * y.sin(), |x, _| b * x.sin());
                (rho, u, bf)
            }
            ScenarioKind::RandomSmooth => {
                let mut r = rng(self.seed);
                let u = normalized(curl_of_stream(&band_limited(grid, 4.0, 1.0, &mut r)), a);
                let bf = normalized(curl_of_stream(&band_limited(grid, 4.0, 1.0, &mut r)), b);
                let s = band_limited(grid, 4.0, 1.0, &mut r);
                let m = s.max_abs();
                let rho = s.map(|v| if m > 0.0 { (1.0 + 0.5 * v / m).max(0.0) } else { 1.0 });
                (rho, leray_project(&u), leray_project(&bf))
            }
        };
        State::new(0.0, rho, u, bf)
    }
}
