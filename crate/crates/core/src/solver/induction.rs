use crate::spectral::{dealias, wavenumber, VectorField2};

use super::momentum::{convective, Spectral2};
use super::{ensure_finite, SolverConfig, SolverError, State};

/// `B ← Π e^{dtΔ}(B + dt[(B·∇)u − (u·∇)B])`: explicit transport, exact
/// per-mode heat decay, then projection onto divergence-free fields.
pub fn induction_step(state: &State, cfg: &SolverConfig) -> Result<VectorField2, SolverError> {
    cfg.validate()?;
    let n = state.b.grid().n();
    let dt = cfg.dt;
    let u = Spectral2::of(&state.u);
    let b = Spectral2::of(&state.b);
    let stretch = convective(&b, &u, cfg.dealias);
    let transport = convective(&u, &b, cfg.dealias);
    let rhs = Spectral2::of(&stretch.sub(&transport)).map(|s| {
        if cfg.dealias {
            dealias(s)
        } else {
            s.clone()
        }
    });
    let heat = |s: &crate::spectral::Spectrum, r: &crate::spectral::Spectrum| {
        s.add(&r.scale(dt)).map_modes(|i, j, c| {
            let (kx, ky) = (wavenumber(i, n), wavenumber(j, n));
            c * (-(kx * kx + ky * ky) * dt).exp()
        })
    };
    let next = Spectral2 {
        x: heat(&b.x, &rhs.x),
        y: heat(&b.y, &rhs.y),
    }
    .project()
    .to_field();
    ensure_finite(&next, "induction", state.t)?;
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{band_limited, rng};
    use crate::spectral::{gradient, max_abs_divergence, Grid, ScalarField};

    #[test]
    fn single_mode_heat_decay() {
        let g = Grid::new(32).unwrap();
        let b = VectorField2::from_fn(g, |_, y| y.sin(), |_, _| 0.0);
        let s = State::new(0.0, ScalarField::constant(g, 1.0), VectorField2::zeros(g), b.clone()).unwrap();
        let dt = 0.013;
        let out = induction_step(&s, &SolverConfig::with_dt(dt)).unwrap();
        assert!(out.max_abs_diff(&b.scale((-dt).exp())) <= 1e-12);
    }

    #[test]
    fn zero_field_stays_zero() {
        let g = Grid::new(16).unwrap();
        let u = VectorField2::from_fn(g, |_, y| y.sin(), |x, _| x.cos());
        let s = State::new(0.0, ScalarField::constant(g, 1.0), u, VectorField2::zeros(g)).unwrap();
        let out = induction_step(&s, &SolverConfig::default()).unwrap();
        assert_eq!(out.max_magnitude(), 0.0);
    }

    #[test]
    fn result_is_solenoidal() {
        let g = Grid::new(32).unwrap();
        let mut r = rng(3);
        let curl = |f: ScalarField| {
            let gr = gradient(&f);
            VectorField2::from_parts(gr.y().clone(), gr.x().scale(-1.0))
        };
        let u = curl(band_limited(g, 6.0, 0.0, &mut r));
        let b = curl(band_limited(g, 6.0, 0.0, &mut r));
        let s = State::new(0.0, ScalarField::constant(g, 1.0), u, b).unwrap();
        let out = induction_step(&s, &SolverConfig::with_dt(0.01)).unwrap();
        assert!(max_abs_divergence(&out) <= 1e-10);
    }
}
