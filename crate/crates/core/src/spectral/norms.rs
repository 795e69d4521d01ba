use std::f64::consts::PI;

use super::ops::derivative_spectrum;
use super::{FieldError, Grid, ScalarField, Spectrum};

/// Something with one or more scalar components on a common grid.
pub trait Field {
    fn grid(&self) -> Grid;
    fn components(&self) -> Vec<&ScalarField>;
}

impl Field for ScalarField {
    fn grid(&self) -> Grid {
        ScalarField::grid(self)
    }

    fn components(&self) -> Vec<&ScalarField> {
        vec![self]
    }
}

impl Field for super::VectorField2 {
    fn grid(&self) -> Grid {
        super::VectorField2::grid(self)
    }

    fn components(&self) -> Vec<&ScalarField> {
        vec![self.x(), self.y()]
    }
}

fn check_exponent(p: f64) -> Result<(), FieldError> {
    if p.is_nan() || p < 1.0 {
        Err(FieldError::InvalidExponent(p))
    } else {
        Ok(())
    }
}

/// L^p norm of the pointwise magnitude of component samples.
fn lp_of_components(grid: Grid, comps: &[ScalarField], p: f64) -> f64 {
    let magnitude = |idx: usize| -> f64 {
        if comps.len() == 1 {
            comps[0].values()[idx].abs()
        } else {
            comps
                .iter()
                .map(|c| c.values()[idx].powi(2))
                .sum::<f64>()
                .sqrt()
        }
    };
    if p.is_infinite() {
        (0..grid.len()).map(magnitude).fold(0.0, f64::max)
    } else if p == 2.0 {
        let s: f64 = (0..grid.len()).map(|i| magnitude(i).powi(2)).sum();
        (s * grid.cell_area()).sqrt()
    } else {
        let s: f64 = (0..grid.len()).map(|i| magnitude(i).powf(p)).sum();
        (s * grid.cell_area()).powf(1.0 / p)
    }
}

/// Equal-weight quadrature L^p norm; `p = f64::INFINITY` gives the grid max.
pub fn norm_lp<F: Field + ?Sized>(f: &F, p: f64) -> Result<f64, FieldError> {
    check_exponent(p)?;
    let comps: Vec<ScalarField> = f.components().into_iter().cloned().collect();
    Ok(lp_of_components(f.grid(), &comps, p))
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// `W^{k,q}` norm with multinomial weights `k!/(a! b! (k−a−b)!)` on each
/// `∂x^a ∂y^b`, so that `q = 2` coincides with the `(1+|ξ|²)^k` weight of
/// [`norm_hs`]. For `q = ∞` the unweighted max over multi-indices is used.
pub fn norm_sobolev<F: Field + ?Sized>(f: &F, k: u32, q: f64) -> Result<f64, FieldError> {
    if k > 3 {
        return Err(FieldError::UnsupportedOrder(k));
    }
    check_exponent(q)?;
    let grid = f.grid();
    let spectra: Vec<Spectrum> = f.components().iter().map(|c| c.spectrum()).collect();
    let mut acc = 0.0;
    for order in 0..=k {
        for a in 0..=order {
            let b = order - a;
            let comps: Vec<ScalarField> = if order == 0 {
                f.components().into_iter().cloned().collect()
            } else {
                spectra
                    .iter()
                    .map(|s| derivative_spectrum(s, a, b).to_field())
                    .collect()
            };
            let norm = lp_of_components(grid, &comps, q);
            if q.is_infinite() {
                acc = f64::max(acc, norm);
            } else {
                let weight = factorial(k) / (factorial(a) * factorial(b) * factorial(k - order));
                acc += weight * norm.powf(q);
            }
        }
    }
    Ok(if q.is_infinite() { acc } else { acc.powf(1.0 / q) })
}

/// `( Σ_k (1+|k|²)^s |f̂(k)|² )^{1/2}`, scaled so `s = 0` is the L² norm.
pub fn norm_hs<F: Field + ?Sized>(f: &F, s: f64) -> Result<f64, FieldError> {
    if s.is_nan() || s < 0.0 {
        return Err(FieldError::NegativeSmoothness(s));
    }
    Ok(hs_from_spectra(
        &f.components().iter().map(|c| c.spectrum()).collect::<Vec<_>>(),
        s,
    ))
}

pub(crate) fn hs_from_spectra(spectra: &[Spectrum], s: f64) -> f64 {
    let sum: f64 = spectra
        .iter()
        .map(|sp| sp.weighted_energy(|kx, ky| (1.0 + kx * kx + ky * ky).powf(s)))
        .sum();
    2.0 * PI * sum.sqrt()
}
