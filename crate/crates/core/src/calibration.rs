//! Stress families for the inequality probes and the constants they were
//! calibrated to.
//!
//! The constants come from `cargo run --release --example calibrate`, which
//! takes each sup over seeds [`CALIBRATION_SEEDS`], ten times more fields than
//! a check draws, so the recorded value sits near the sup of the family rather
//! than of one sample. Checks should draw fresh seeds from [`CHECK_SEED_BASE`].

use std::ops::Range;

use rand::Rng;

use crate::estimates::{poisson_regularity_probe, stokes_regularity_probe, EstimateError};
use crate::lp::{
    bernstein_ratio, build_partition, log_sobolev_ratio, time_integrated_ratio, DyadicPartition, LpError,
};
use crate::random::{band_limited, rng};
use crate::solver::{run, Scenario, ScenarioKind, SolverConfig, SolverError};
use crate::spectral::{Grid, ScalarField, VectorField2};

pub const CALIBRATION_SEEDS: Range<u64> = 0..1000;
pub const CHECK_SEED_BASE: u64 = 1000;
/// Grid size the constants were measured on.
pub const CALIBRATION_N: usize = 64;

/// `sup_q sup_f ‖Δ_q f‖_∞ / (2^q ‖Δ_q f‖_{L²})` over [`random_field`].
pub const BERNSTEIN_P2: f64 = 6.365562730553838e-1;
/// `sup log_sobolev_ratio(·, 4)` over [`lacunary`] and [`random_field`].
pub const LOG_SOBOLEV_Q4: f64 = 8.736597701048956e-2;
/// `sup time_integrated_ratio(·, 4)` over [`random_windows`] of a
/// Taylor–Green velocity component.
pub const TIME_INTEGRATED_Q4: f64 = 4.9459509114099515e-1;
pub const STOKES_Q4_3: f64 = 1.5742636402927033;
pub const STOKES_Q4: f64 = 3.770825850335918e-1;
pub const POISSON_Q4_3: f64 = 1.8776539831687542;
pub const POISSON_Q4: f64 = 4.4705428853532597e-1;

/// Zero-mean random field with modes up to the dealiasing limit and an
/// amplitude spectrum decaying like `|k|⁻¹`.
pub fn random_field(grid: Grid, seed: u64) -> ScalarField {
    band_limited(grid, grid.n() as f64 / 3.0, 1.0, &mut rng(seed))
}

pub fn random_vector(grid: Grid, seed: u64) -> VectorField2 {
    let mut r = rng(seed);
    let k = grid.n() as f64 / 3.0;
    VectorField2::from_parts(band_limited(grid, k, 1.0, &mut r), band_limited(grid, k, 1.0, &mut r))
}

/// Lacunary series `Σ_{j=1..m} m^{-1/2} cos(2^j x)`.
pub fn lacunary(grid: Grid, m: u32) -> ScalarField {
    let c = 1.0 / (m as f64).sqrt();
    ScalarField::from_fn(grid, |x, _| (1..=m).map(|j| c * (2f64.powi(j as i32) * x).cos()).sum())
}

/// Largest `m` with `2^m ≤ n/2`.
pub fn lacunary_max(grid: Grid) -> u32 {
    (grid.n() / 2).ilog2()
}

/// Partition covering every lattice frequency of `grid` (corners included),
/// with the lowest band at `|k| = 1`.
pub fn full_partition(grid: Grid) -> DyadicPartition {
    let q_max = grid.n().ilog2() as i32;
    build_partition(grid, -2, q_max).expect("range covers Nyquist")
}

pub fn bernstein_sup(grid: Grid, seeds: Range<u64>) -> Result<f64, LpError> {
    let part = full_partition(grid);
    let mut sup: f64 = 0.0;
    for seed in seeds {
        let f = random_field(grid, seed);
        for q in part.bands() {
            match bernstein_ratio(&f, &part, q, 2.0) {
                Ok(r) => sup = sup.max(r),
                Err(LpError::ZeroBand(_)) => {}
                Err(e) => return Err(e),
            }
        }
    }
    Ok(sup)
}

/// Sup over the lacunary family `m = 1..=lacunary_max` and one random field per seed.
pub fn log_sobolev_sup(grid: Grid, seeds: Range<u64>) -> Result<f64, LpError> {
    let mut sup: f64 = 0.0;
    for m in 1..=lacunary_max(grid) {
        sup = sup.max(log_sobolev_ratio(&lacunary(grid, m), 4.0)?);
    }
    for seed in seeds {
        sup = sup.max(log_sobolev_ratio(&random_field(grid, seed), 4.0)?);
    }
    Ok(sup)
}

/// `count` windows `[s, t]` inside `[t0, t1]`, each at least a tenth of the span long.
pub fn random_windows(t0: f64, t1: f64, count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut r = rng(seed);
    let span = t1 - t0;
    (0..count)
        .map(|_| {
            let len = r.gen_range(0.1..=1.0) * span;
            let s = t0 + r.gen_range(0.0..=1.0) * (span - len);
            (s, (s + len).min(t1))
        })
        .collect()
}

/// `(t, u_x(t))` along a Taylor–Green run with `dt = 1e-3` up to `t = 1`,
/// sampled every 20 steps.
pub fn taylor_green_series(grid: Grid) -> Result<Vec<(f64, ScalarField)>, SolverError> {
    let out = run(&Scenario::new(ScenarioKind::TaylorGreen), grid, &SolverConfig::with_dt(1e-3), 1.0, 20)?;
    if let Some(e) = out.failure {
        return Err(e);
    }
    Ok(out.trajectory.into_states().into_iter().map(|s| (s.t, s.u.x().clone())).collect())
}

pub fn time_integrated_sup(series: &[(f64, ScalarField)], windows: &[(f64, f64)]) -> Result<f64, LpError> {
    let mut sup: f64 = 0.0;
    for &(s, t) in windows {
        sup = sup.max(time_integrated_ratio(series, s, t, 4.0)?);
    }
    Ok(sup)
}

/// Which regularity probe a sup is taken over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Probe {
    Stokes,
    Poisson,
}

pub fn regularity_sup(grid: Grid, probe: Probe, q: f64, seeds: Range<u64>) -> Result<f64, EstimateError> {
    let mut sup: f64 = 0.0;
    for seed in seeds {
        let f = random_vector(grid, seed);
        let r = match probe {
            Probe::Stokes => stokes_regularity_probe(&f, q)?,
            Probe::Poisson => poisson_regularity_probe(&f, q)?,
        };
        sup = sup.max(r);
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lacunary_is_normalized() {
        let g = Grid::new(64).unwrap();
        assert_eq!(lacunary_max(g), 5);
        let f = lacunary(g, 4);
        // all cosines peak together at x = 0
        assert!((f.max() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn windows_stay_inside() {
        for (s, t) in random_windows(0.0, 1.0, 50, 9) {
            assert!(0.0 <= s && s < t && t <= 1.0);
            assert!(t - s >= 0.1 - 1e-12);
        }
    }

    #[test]
    fn families_are_deterministic() {
        let g = Grid::new(32).unwrap();
        assert_eq!(random_field(g, 4), random_field(g, 4));
        assert_eq!(bernstein_sup(g, 0..3).unwrap(), bernstein_sup(g, 0..3).unwrap());
    }
}
