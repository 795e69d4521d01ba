use crate::spectral::{
    forward_pair, inverse_pair, leray_spectrum, norm_hs, norm_lp, norm_sobolev, wavenumber, Spectrum,
    VectorField2,
};

use super::EstimateError;

fn check_q(q: f64) -> Result<(), EstimateError> {
    if q > 1.0 && q.is_finite() {
        Ok(())
    } else {
        Err(EstimateError::Exponent(q))
    }
}

/// Divides every nonzero mode by `−|k|²` (times `sign`) and zeroes the mean.
fn inverse_laplacian(s: &Spectrum, sign: f64) -> Spectrum {
    let n = s.grid().n();
    s.map_modes(|i, j, c| {
        let (kx, ky) = (wavenumber(i, n), wavenumber(j, n));
        let k2 = kx * kx + ky * ky;
        if k2 == 0.0 {
            c * 0.0
        } else {
            c * (sign / k2)
        }
    })
}

fn ratio(solution: &VectorField2, forcing: &VectorField2, q: f64) -> Result<f64, EstimateError> {
    let num = norm_sobolev(solution, 2, q)?;
    let den = norm_lp(forcing, q)? + norm_hs(solution, 1.0)?;
    Ok(num / den)
}

/// Solves the periodic Stokes problem `−Δu + ∇P = F`, `div u = 0` with zero
/// mean and returns `‖u‖_{W^{2,q}} / (‖F‖_{L^q} + ‖u‖_{H¹})`.
pub fn stokes_regularity_probe(f: &VectorField2, q: f64) -> Result<f64, EstimateError> {
    check_q(q)?;
    if f.max_magnitude() == 0.0 {
        return Err(EstimateError::ZeroForcing);
    }
    let (fx, fy) = forward_pair(f.x(), f.y());
    let (px, py) = leray_spectrum(&fx, &fy);
    let (ux, uy) = inverse_pair(&inverse_laplacian(&px, 1.0), &inverse_laplacian(&py, 1.0));
    ratio(&VectorField2::new(ux, uy)?, f, q)
}

/// Solves `ΔB = G` for zero-mean `G` and returns
/// `‖B‖_{W^{2,q}} / (‖G‖_{L^q} + ‖B‖_{H¹})`.
pub fn poisson_regularity_probe(g: &VectorField2, q: f64) -> Result<f64, EstimateError> {
    check_q(q)?;
    let scale = g.max_magnitude();
    if scale == 0.0 {
        return Err(EstimateError::ZeroForcing);
    }
    let mean = g.x().mean().hypot(g.y().mean());
    if mean > 1e-12 * scale.max(1.0) {
        return Err(EstimateError::NonzeroMean(mean));
    }
    let (gx, gy) = forward_pair(g.x(), g.y());
    let (bx, by) = inverse_pair(&inverse_laplacian(&gx, -1.0), &inverse_laplacian(&gy, -1.0));
    ratio(&VectorField2::new(bx, by)?, g, q)
}
