use num_complex::Complex64;

use crate::spectral::{
    dealias, deriv_wavenumber, forward_pair, inverse_pair, wavenumber, ScalarField, Spectrum,
    VectorField2,
};

use super::krylov::pcg;
use super::{ensure_finite, SolverConfig, SolverError, State};

/// Spectra of both components of a vector field.
#[derive(Debug, Clone)]
pub(crate) struct Spectral2 {
    pub x: Spectrum,
    pub y: Spectrum,
}

impl Spectral2 {
    pub fn of(v: &VectorField2) -> Self {
        let (x, y) = forward_pair(v.x(), v.y());
        Self { x, y }
    }

    pub fn to_field(&self) -> VectorField2 {
        let (x, y) = inverse_pair(&self.x, &self.y);
        VectorField2::from_parts(x, y)
    }

    pub fn map(&self, f: impl Fn(&Spectrum) -> Spectrum) -> Self {
        Self {
            x: f(&self.x),
            y: f(&self.y),
        }
    }

    pub fn project(&self) -> Self {
        let (x, y) = crate::spectral::leray_spectrum(&self.x, &self.y);
        Self { x, y }
    }

    fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(4 * self.x.coeffs().len());
        for s in [&self.x, &self.y] {
            for c in s.coeffs() {
                out.push(c.re);
                out.push(c.im);
            }
        }
        out
    }

    fn unflatten(grid: crate::spectral::Grid, flat: &[f64]) -> Self {
        let len = grid.len();
        let build = |part: &[f64]| {
            let mut s = Spectrum::zeros(grid);
            s.coeffs_mut()
                .iter_mut()
                .zip(part.chunks_exact(2))
                .for_each(|(c, p)| *c = Complex64::new(p[0], p[1]));
            s
        };
        Self {
            x: build(&flat[..2 * len]),
            y: build(&flat[2 * len..]),
        }
    }
}

fn maybe_dealias(s: &Spectrum, on: bool) -> Spectrum {
    if on {
        dealias(s)
    } else {
        s.clone()
    }
}

/// Physical samples of `(a·∇)b`; inputs are truncated first when `dealias_on`.
pub(crate) fn convective(a: &Spectral2, b: &Spectral2, dealias_on: bool) -> VectorField2 {
    use crate::spectral::derivative_spectrum as d;
    let a = a.map(|s| maybe_dealias(s, dealias_on));
    let b = b.map(|s| maybe_dealias(s, dealias_on));
    let af = a.to_field();
    let (bxx, byx) = inverse_pair(&d(&b.x, 1, 0), &d(&b.y, 1, 0));
    let (bxy, byy) = inverse_pair(&d(&b.x, 0, 1), &d(&b.y, 0, 1));
    let cx = af.x().mul(&bxx).add(&af.y().mul(&bxy));
    let cy = af.x().mul(&byx).add(&af.y().mul(&byy));
    VectorField2::from_parts(cx, cy)
}

fn maybe_dealias_field(f: &ScalarField, on: bool) -> ScalarField {
    if on {
        dealias(&f.spectrum()).to_field()
    } else {
        f.clone()
    }
}

/// Skew-symmetric convection `½[ρ(u·∇)u + div(ρ u⊗u)]`.
///
/// Its grid inner product with `u` vanishes identically because spectral
/// derivatives are skew-adjoint, so convection exchanges no kinetic energy
/// whatever the discrete density update is.
fn skew_convection(rho: &ScalarField, u: &Spectral2, dealias_on: bool) -> VectorField2 {
    use crate::spectral::derivative_spectrum as d;
    let rho = maybe_dealias_field(rho, dealias_on);
    let advective = convective(u, u, dealias_on).mul_scalar(&rho);
    let uf = u.map(|s| maybe_dealias(s, dealias_on)).to_field();
    let (ux, uy) = (uf.x(), uf.y());
    let (sxx, syy) = forward_pair(&rho.mul(&ux.mul(ux)), &rho.mul(&uy.mul(uy)));
    let sxy = rho.mul(&ux.mul(uy)).spectrum();
    let (cx, cy) = inverse_pair(
        &d(&sxx, 1, 0).add(&d(&sxy, 0, 1)),
        &d(&sxy, 1, 0).add(&d(&syy, 0, 1)),
    );
    advective.add(&VectorField2::from_parts(cx, cy)).scale(0.5)
}

/// Explicit momentum forcing: Lorentz force minus convection, truncated after the products.
fn forcing(state: &State, u: &Spectral2, dealias_on: bool) -> Spectral2 {
    let b = Spectral2::of(&state.b);
    let conv = skew_convection(&state.rho, u, dealias_on);
    let lorentz = convective(&b, &b, dealias_on);
    Spectral2::of(&lorentz.sub(&conv)).map(|s| maybe_dealias(s, dealias_on))
}

/// Provisional velocity, pressure and Krylov iteration count of a momentum solve.
#[derive(Debug, Clone)]
pub struct MomentumOutcome {
    pub u_star: VectorField2,
    pub pressure: ScalarField,
    pub iterations: usize,
}

/// Semi-implicit momentum update with the density held fixed over the step,
/// see [`momentum_solve`] for the scheme.
pub fn momentum_step(state: &State, cfg: &SolverConfig) -> Result<VectorField2, SolverError> {
    momentum_solve(state, &state.rho, cfg).map(|m| m.u_star)
}

/// Solves, for divergence-free `u*`,
///
/// ```text
/// (ρⁿ⁺¹u* − ρⁿuⁿ)/dt − ½(ρⁿ⁺¹ − ρⁿ)/dt u* − Δu* + ∇P
///     = −½[ρⁿ(uⁿ·∇)uⁿ + div(ρⁿuⁿ⊗uⁿ)] + (Bⁿ·∇)Bⁿ
/// ```
///
/// which is consistent with `ρu_t + ρ(u·∇)u − Δu + ∇P = (B·∇)B` through the
/// mass equation. Testing with `u*` gives the discrete energy balance
/// `½∫ρⁿ⁺¹|u*|² − ½∫ρⁿ|uⁿ|² + ½∫ρⁿ|u* − uⁿ|² + dt‖∇u*‖² = O(dt²)` for any
/// density update, and the operator `½(ρⁿ + ρⁿ⁺¹)/dt − Δ` stays elliptic
/// where `ρ = 0`. Conjugate gradients run on divergence-free fields,
/// preconditioned by the spectral inverse of `ρ̄/dt − Δ` with `ρ̄` the mean
/// density.
pub(crate) fn momentum_solve(
    state: &State,
    rho_next: &ScalarField,
    cfg: &SolverConfig,
) -> Result<MomentumOutcome, SolverError> {
    cfg.validate()?;
    let grid = state.rho.grid();
    let n = grid.n();
    let dt = cfg.dt;
    let u_hat = Spectral2::of(&state.u).project();
    let forcing = forcing(state, &u_hat, cfg.dealias);
    let rho_mid = state.rho.add(rho_next).scale(0.5);

    let k2: Vec<f64> = (0..grid.len())
        .map(|idx| {
            let (kx, ky) = (wavenumber(idx % n, n), wavenumber(idx / n, n));
            kx * kx + ky * ky
        })
        .collect();
    let rho_bar = match rho_mid.mean() {
        m if m > 0.0 => m,
        _ => 1.0,
    };

    let weighted = |v: &VectorField2, rho: &ScalarField| -> Spectral2 {
        Spectral2::of(&v.mul_scalar(rho))
            .project()
            .map(|s| s.scale(1.0 / dt))
    };
    let inertia = weighted(&state.u, &state.rho);
    let rhs = Spectral2 {
        x: inertia.x.add(&forcing.x),
        y: inertia.y.add(&forcing.y),
    }
    .project();

    let apply = |flat: &[f64]| -> Vec<f64> {
        let v = Spectral2::unflatten(grid, flat);
        let mut out = weighted(&v.to_field(), &rho_mid);
        for (o, s) in [(&mut out.x, &v.x), (&mut out.y, &v.y)] {
            o.coeffs_mut()
                .iter_mut()
                .zip(s.coeffs())
                .zip(&k2)
                .for_each(|((o, s), k2)| *o += s * k2);
        }
        out.flatten()
    };
    let precondition = |flat: &[f64]| -> Vec<f64> {
        let r = Spectral2::unflatten(grid, flat).project();
        let scaled = r.map(|s| {
            let mut s = s.clone();
            s.coeffs_mut()
                .iter_mut()
                .zip(&k2)
                .for_each(|(c, k2)| *c /= rho_bar / dt + k2);
            s
        });
        scaled.flatten()
    };

    let out = pcg(
        apply,
        precondition,
        &rhs.flatten(),
        u_hat.flatten(),
        cfg.picard_tol,
        cfg.picard_max,
    );
    if !out.converged {
        return Err(SolverError::NoConvergence {
            solve: "momentum",
            iterations: out.iterations,
            residual: out.residual,
        });
    }
    let u_star = Spectral2::unflatten(grid, &out.x).to_field();
    ensure_finite(&u_star, "momentum", state.t)?;

    // ∇P is the gradient part of N − (ρⁿ⁺¹u* − ρⁿuⁿ)/dt + ½(ρⁿ⁺¹ − ρⁿ)/dt u*
    let accel = Spectral2::of(&u_star.mul_scalar(&rho_mid).sub(&state.u.mul_scalar(&state.rho)));
    let gx = forcing.x.sub(&accel.x.scale(1.0 / dt));
    let gy = forcing.y.sub(&accel.y.scale(1.0 / dt));
    let pressure = potential_of(&gx, &gy).to_field();

    Ok(MomentumOutcome {
        u_star,
        pressure,
        iterations: out.iterations,
    })
}

/// Zero-mean `P` with `∇P = (I − Π) G`.
pub(crate) fn potential_of(gx: &Spectrum, gy: &Spectrum) -> Spectrum {
    let n = gx.grid().n();
    let mut p = Spectrum::zeros(gx.grid());
    for (idx, c) in p.coeffs_mut().iter_mut().enumerate() {
        let kx = deriv_wavenumber(idx % n, n);
        let ky = deriv_wavenumber(idx / n, n);
        let k2 = kx * kx + ky * ky;
        if k2 > 0.0 {
            let dot = gx.coeffs()[idx] * kx + gy.coeffs()[idx] * ky;
            *c = Complex64::new(0.0, -1.0) * dot / k2;
        }
    }
    p
}
