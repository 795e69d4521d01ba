use crate::spectral::{
    deriv_wavenumber, divergence_spectrum, forward_pair, inverse_pair, laplacian, max_abs_divergence,
    ScalarField, Spectrum, VectorField2,
};

use super::krylov::pcg;
use super::momentum::{convective, potential_of, Spectral2};
use super::{ensure_finite, SolverConfig, SolverError, DIVERGENCE_TOL};

/// Velocity after projection and the pressure that produced it.
#[derive(Debug, Clone)]
pub struct Projection {
    pub u: VectorField2,
    pub pressure: ScalarField,
    pub iterations: usize,
    /// Cells where `ρ < eps_rel · max ρ`, i.e. where the floor entered the operator.
    pub floor_cells: usize,
}

fn spectral_gradient(p: &ScalarField) -> (ScalarField, ScalarField) {
    let s = p.spectrum();
    let n = s.grid().n();
    let gx = s.map_modes(|i, _, c| c * num_complex::Complex64::new(0.0, deriv_wavenumber(i, n)));
    let gy = s.map_modes(|_, j, c| c * num_complex::Complex64::new(0.0, deriv_wavenumber(j, n)));
    inverse_pair(&gx, &gy)
}

fn spectral_divergence(x: &ScalarField, y: &ScalarField) -> ScalarField {
    let (sx, sy) = forward_pair(x, y);
    divergence_spectrum(&sx, &sy).to_field()
}

/// Variable-density projection `u = u* − dt ∇P / ρ_ε` with
/// `div(ρ_ε⁻¹ ∇P) = div u* / dt` and `ρ_ε = max(ρ, eps_rel · max ρ)`.
///
/// The elliptic problem is solved by conjugate gradients preconditioned with
/// the inverse Laplacian. A final spectral Leray pass removes the residual
/// divergence left at the solver tolerance.
pub fn pressure_project(
    u_star: &VectorField2,
    rho: &ScalarField,
    cfg: &SolverConfig,
) -> Result<Projection, SolverError> {
    cfg.validate()?;
    let grid = rho.grid();
    let n = grid.n();
    let floor = cfg.eps_rel * rho.max().max(0.0);
    let floor_cells = rho.values().iter().filter(|&&r| r < floor).count();
    if max_abs_divergence(u_star) <= 1e-2 * DIVERGENCE_TOL {
        return Ok(Projection {
            u: u_star.clone(),
            pressure: ScalarField::zeros(grid),
            iterations: 0,
            floor_cells,
        });
    }
    if floor <= 0.0 {
        return Err(SolverError::Invariant("density vanishes identically".into()));
    }
    let inv_rho: Vec<f64> = rho.values().iter().map(|&r| 1.0 / r.max(floor)).collect();
    let inv_rho = ScalarField::from_raw(grid, inv_rho);

    // A P = −div(ρ_ε⁻¹ ∇P) is symmetric positive semidefinite; its kernel is
    // the modes with vanishing derivative wavenumbers, which the right-hand
    // side and the preconditioner both avoid.
    let apply = |p: &[f64]| -> Vec<f64> {
        let (gx, gy) = spectral_gradient(&ScalarField::from_raw(grid, p.to_vec()));
        spectral_divergence(&gx.mul(&inv_rho), &gy.mul(&inv_rho))
            .scale(-1.0)
            .into_values()
    };
    let precondition = |r: &[f64]| -> Vec<f64> {
        ScalarField::from_raw(grid, r.to_vec())
            .spectrum()
            .map_modes(|i, j, c| {
                let (kx, ky) = (deriv_wavenumber(i, n), deriv_wavenumber(j, n));
                let k2 = kx * kx + ky * ky;
                if k2 == 0.0 {
                    c * 0.0
                } else {
                    c / k2
                }
            })
            .to_field()
            .into_values()
    };
    let rhs = spectral_divergence(u_star.x(), u_star.y()).scale(-1.0 / cfg.dt);
    let out = pcg(
        apply,
        precondition,
        rhs.values(),
        vec![0.0; grid.len()],
        cfg.picard_tol,
        cfg.picard_max,
    );
    if !out.converged {
        return Err(SolverError::NoConvergence {
            solve: "pressure",
            iterations: out.iterations,
            residual: out.residual,
        });
    }
    let p = ScalarField::from_raw(grid, out.x);
    let p = p.map(|v| v - p.mean());
    let (gx, gy) = spectral_gradient(&p);
    let corrected = VectorField2::from_parts(
        u_star.x().sub(&gx.mul(&inv_rho).scale(cfg.dt)),
        u_star.y().sub(&gy.mul(&inv_rho).scale(cfg.dt)),
    );
    let u = Spectral2::of(&corrected).project().to_field();
    ensure_finite(&u, "pressure", 0.0)?;
    Ok(Projection {
        u,
        pressure: p,
        iterations: out.iterations,
        floor_cells,
    })
}

/// Measured residual of the compatibility condition for initial data.
#[derive(Debug, Clone)]
pub struct CompatibilityResidual {
    /// `‖ρ₀^{-1/2} (F − ∇P₀)‖_{L²}` over `{ρ₀ > δ max ρ₀}`.
    pub g_norm: f64,
    /// `‖F − ∇P₀‖_{L²}` over the near-vacuum complement.
    pub vacuum_mass: f64,
    pub p0: ScalarField,
}

/// With `F = −Δu₀ − (B₀·∇)B₀` and `P₀` its Helmholtz potential, measures
/// `g = ρ₀^{-1/2}(F − ∇P₀)` away from vacuum and the mass of `F − ∇P₀` near it.
pub fn compatibility_residual(
    rho0: &ScalarField,
    u0: &VectorField2,
    b0: &VectorField2,
    delta: f64,
) -> Result<CompatibilityResidual, SolverError> {
    let du = max_abs_divergence(u0);
    let db = max_abs_divergence(b0);
    if du > DIVERGENCE_TOL || db > DIVERGENCE_TOL {
        return Err(SolverError::Invariant(format!(
            "initial data not solenoidal: |div u| = {du:e}, |div B| = {db:e}"
        )));
    }
    let grid = rho0.grid();
    let bs = Spectral2::of(b0);
    let f = u0
        .map_components(laplacian)
        .scale(-1.0)
        .sub(&convective(&bs, &bs, false));
    let fs = Spectral2::of(&f);
    let p0: Spectrum = potential_of(&fs.x, &fs.y);
    let solenoidal = fs.project().to_field();
    let cut = delta * rho0.max();
    let mut g2 = 0.0;
    let mut v2 = 0.0;
    for (idx, &r) in rho0.values().iter().enumerate() {
        let m2 = solenoidal.x().values()[idx].powi(2) + solenoidal.y().values()[idx].powi(2);
        if r > cut && r > 0.0 {
            g2 += m2 / r;
        } else {
            v2 += m2;
        }
    }
    let area = grid.cell_area();
    Ok(CompatibilityResidual {
        g_norm: (g2 * area).sqrt(),
        vacuum_mass: (v2 * area).sqrt(),
        p0: p0.to_field(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{Scenario, ScenarioKind};
    use crate::spectral::{gradient, leray_project, norm_lp, Grid};

    fn grid() -> Grid {
        Grid::new(32).unwrap()
    }

    #[test]
    fn solenoidal_input_passes_through() {
        let s = Scenario::new(ScenarioKind::TaylorGreen).initial_state(grid()).unwrap();
        let p = pressure_project(&s.u, &s.rho, &SolverConfig::default()).unwrap();
        assert_eq!(p.u, s.u);
        assert_eq!(p.pressure.max_abs(), 0.0);
    }

    #[test]
    fn unit_density_matches_leray() {
        let g = grid();
        let u = VectorField2::from_fn(g, |x, y| x.sin() + y.cos(), |x, y| (x + 2.0 * y).cos());
        let rho = ScalarField::constant(g, 1.0);
        let p = pressure_project(&u, &rho, &SolverConfig::default()).unwrap();
        assert!(p.u.max_abs_diff(&leray_project(&u)) <= 1e-9);
        assert_eq!(p.floor_cells, 0);
    }

    #[test]
    fn vacuum_bubble_gradient_is_removed() {
        let g = grid();
        let rho = Scenario::new(ScenarioKind::VacuumBubble).initial_state(g).unwrap().rho;
        let u = gradient(&ScalarField::from_fn(g, |x, y| x.sin() * y.sin()));
        let p = pressure_project(&u, &rho, &SolverConfig::default()).unwrap();
        assert!(max_abs_divergence(&p.u) <= 1e-10);
        assert!(p.floor_cells > 0);
        assert!(p.iterations > 0);
    }

    #[test]
    fn compatibility_of_presets() {
        let g = grid();
        let rest = Scenario::new(ScenarioKind::MhdRest).initial_state(g).unwrap();
        let c = compatibility_residual(&rest.rho, &rest.u, &rest.b, 1e-3).unwrap();
        assert!(c.g_norm < 1e-12 && c.vacuum_mass < 1e-12);

        let tg = Scenario::new(ScenarioKind::TaylorGreen).initial_state(g).unwrap();
        let c = compatibility_residual(&tg.rho, &tg.u, &tg.b, 1e-3).unwrap();
        let want = 2.0 * norm_lp(&tg.u, 2.0).unwrap();
        assert!((c.g_norm - want).abs() <= 1e-10 * want);

        let zero = VectorField2::zeros(g);
        let c = compatibility_residual(&tg.rho, &zero, &zero, 1e-3).unwrap();
        assert_eq!(c.g_norm, 0.0);
        assert_eq!(c.p0.max_abs(), 0.0);
    }
}
