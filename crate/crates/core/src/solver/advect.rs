use crate::spectral::{ScalarField, VectorField2};

use super::momentum::{convective, Spectral2};
use super::SolverError;

/// Result of a semi-Lagrangian transport step.
#[derive(Debug, Clone, PartialEq)]
pub struct Advected {
    pub rho: ScalarField,
    /// `dt` exceeded four times the advisory CFL step.
    pub cfl_exceeded: bool,
}

/// Advisory step `cfl · spacing / max|u|` (infinite for a fluid at rest).
pub fn cfl_dt(u: &VectorField2, cfl: f64) -> f64 {
    let umax = u.max_magnitude();
    if umax == 0.0 {
        f64::INFINITY
    } else {
        cfl * u.grid().spacing() / umax
    }
}

fn wrap(v: i64, n: usize) -> usize {
    v.rem_euclid(n as i64) as usize
}

/// Catmull–Rom weights for offsets −1, 0, 1, 2 at fraction `t`.
fn cubic_weights(t: f64) -> [f64; 4] {
    let t2 = t * t;
    let t3 = t2 * t;
    [
        0.5 * (-t3 + 2.0 * t2 - t),
        0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
        0.5 * (-3.0 * t3 + 4.0 * t2 + t),
        0.5 * (t3 - t2),
    ]
}

/// Periodic Catmull–Rom sample at fractional index `(px, py)`.
fn bicubic(values: &[f64], n: usize, px: f64, py: f64) -> f64 {
    let (fx, fy) = (px.floor(), py.floor());
    let (wx, wy) = (cubic_weights(px - fx), cubic_weights(py - fy));
    let (i0, j0) = (fx as i64, fy as i64);
    let mut v = 0.0;
    for (b, wyb) in wy.iter().enumerate() {
        let j = wrap(j0 + b as i64 - 1, n) * n;
        let mut row = 0.0;
        for (a, wxa) in wx.iter().enumerate() {
            row += wxa * values[j + wrap(i0 + a as i64 - 1, n)];
        }
        v += wyb * row;
    }
    v
}

/// Semi-Lagrangian density transport. The departure point of each node is
/// the second-order Taylor trace `x − dt u + ½dt² (u·∇)u`, with the
/// convective derivative taken spectrally, so the departure map is as smooth
/// as `u`. `ρ` is sampled there by Catmull–Rom interpolation clamped to the local
/// corner range, so `min ρ` never decreases and `max ρ` never increases.
pub fn advect_density(
    rho: &ScalarField,
    u: &VectorField2,
    dt: f64,
    cfl: f64,
) -> Result<Advected, SolverError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(SolverError::Config(format!("dt = {dt} must be positive")));
    }
    let grid = rho.grid();
    let n = grid.n();
    // displacement in index units per unit velocity
    let scale = dt / grid.spacing();
    let (ux, uy) = (u.x().values(), u.y().values());
    let r = rho.values();
    let out = if u.max_magnitude() == 0.0 {
        r.to_vec()
    } else {
        let us = Spectral2::of(u);
        let a = convective(&us, &us, false);
        let (ax, ay) = (a.x().values(), a.y().values());
        let (lo, hi) = (rho.min(), rho.max());
        let mut out = Vec::with_capacity(grid.len());
        for j in 0..n {
            for i in 0..n {
                let idx = j * n + i;
                let px = i as f64 - scale * (ux[idx] - 0.5 * dt * ax[idx]);
                let py = j as f64 - scale * (uy[idx] - 0.5 * dt * ay[idx]);
                out.push(bicubic(r, n, px, py).clamp(lo, hi));
            }
        }
        out
    };
    let cfl_exceeded = dt > 4.0 * cfl_dt(u, cfl);
    Ok(Advected {
        rho: ScalarField::from_raw(grid, out),
        cfl_exceeded,
    })
}
