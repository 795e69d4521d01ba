use num_complex::Complex64;

use super::fft::{deriv_wavenumber, forward_pair, inverse_pair, wavenumber};
use super::{ScalarField, Spectrum, VectorField2};

/// `(i k)^order` with the Nyquist mode dropped for odd orders.
fn deriv_factor(j: usize, n: usize, order: u32) -> Complex64 {
    if order == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let k = if order % 2 == 1 {
        deriv_wavenumber(j, n)
    } else {
        wavenumber(j, n)
    };
    Complex64::new(0.0, k).powu(order)
}

pub(crate) fn derivative_spectrum(s: &Spectrum, ax: u32, ay: u32) -> Spectrum {
    let n = s.grid().n();
    s.map_modes(|i, j, c| c * deriv_factor(i, n, ax) * deriv_factor(j, n, ay))
}

/// Mixed spectral derivative `∂x^ax ∂y^ay f`.
pub fn derivative(f: &ScalarField, ax: u32, ay: u32) -> ScalarField {
    derivative_spectrum(&f.spectrum(), ax, ay).to_field()
}

pub fn gradient(f: &ScalarField) -> VectorField2 {
    let s = f.spectrum();
    let (gx, gy) = inverse_pair(&derivative_spectrum(&s, 1, 0), &derivative_spectrum(&s, 0, 1));
    VectorField2::from_parts(gx, gy)
}

pub(crate) fn divergence_spectrum(sx: &Spectrum, sy: &Spectrum) -> Spectrum {
    derivative_spectrum(sx, 1, 0).add(&derivative_spectrum(sy, 0, 1))
}

pub fn divergence(v: &VectorField2) -> ScalarField {
    let (sx, sy) = forward_pair(v.x(), v.y());
    divergence_spectrum(&sx, &sy).to_field()
}

/// `∂x v₂ − ∂y v₁`.
pub fn scalar_curl(v: &VectorField2) -> ScalarField {
    let (sx, sy) = forward_pair(v.x(), v.y());
    derivative_spectrum(&sy, 1, 0)
        .sub(&derivative_spectrum(&sx, 0, 1))
        .to_field()
}

pub fn laplacian(f: &ScalarField) -> ScalarField {
    f.spectrum().multiply(|kx, ky| -(kx * kx + ky * ky)).to_field()
}

/// Projects a pair of spectra onto divergence-free fields, `I − k kᵀ/|k|²`.
/// Modes whose derivative wavenumber vanishes (the mean) pass through.
pub(crate) fn leray_spectrum(sx: &Spectrum, sy: &Spectrum) -> (Spectrum, Spectrum) {
    let n = sx.grid().n();
    let mut px = sx.clone();
    let mut py = sy.clone();
    let (cx, cy) = (px.coeffs_mut(), py.coeffs_mut());
    for idx in 0..cx.len() {
        let kx = deriv_wavenumber(idx % n, n);
        let ky = deriv_wavenumber(idx / n, n);
        let k2 = kx * kx + ky * ky;
        if k2 == 0.0 {
            continue;
        }
        let dot = (cx[idx] * kx + cy[idx] * ky) / k2;
        cx[idx] -= dot * kx;
        cy[idx] -= dot * ky;
    }
    (px, py)
}

pub fn leray_project(v: &VectorField2) -> VectorField2 {
    let (sx, sy) = forward_pair(v.x(), v.y());
    let (px, py) = leray_spectrum(&sx, &sy);
    let (x, y) = inverse_pair(&px, &py);
    VectorField2::from_parts(x, y)
}

/// Largest absolute value of the spectral divergence.
pub fn max_abs_divergence(v: &VectorField2) -> f64 {
    divergence(v).max_abs()
}

/// Two-thirds rule: zeroes every mode with `|kx|` or `|ky|` above `n/3`.
pub fn dealias(s: &Spectrum) -> Spectrum {
    let n = s.grid().n();
    let keep = |j: usize| 3.0 * wavenumber(j, n).abs() <= n as f64;
    s.map_modes(|i, j, c| if keep(i) && keep(j) { c } else { Complex64::default() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::Grid;

    fn grid() -> Grid {
        Grid::new(32).unwrap()
    }

    #[test]
    fn gradient_examples() {
        let g = grid();
        let c = ScalarField::constant(g, 3.7);
        assert!(gradient(&c).max_magnitude() < 1e-14);

        let d = gradient(&ScalarField::from_fn(g, |x, _| x.sin()));
        let want = VectorField2::from_fn(g, |x, _| x.cos(), |_, _| 0.0);
        assert!(d.max_abs_diff(&want) < 1e-13);

        let d = gradient(&ScalarField::from_fn(g, |_, y| (2.0 * y).cos()));
        let want = VectorField2::from_fn(g, |_, _| 0.0, |_, y| -2.0 * (2.0 * y).sin());
        assert!(d.max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn divergence_examples() {
        let g = grid();
        let v = VectorField2::from_fn(g, |_, y| y.sin(), |x, _| x.sin());
        assert!(divergence(&v).max_abs() <= 1e-13);
        let v = VectorField2::from_fn(g, |_, y| y.cos(), |x, _| x.cos());
        assert!(divergence(&v).max_abs() <= 1e-13);

        let f = ScalarField::from_fn(g, |x, y| x.sin() * y.sin());
        let d = divergence(&gradient(&f));
        assert!(d.sub(&f.scale(-2.0)).max_abs() < 1e-13);
    }

    #[test]
    fn curl_examples() {
        let g = grid();
        let f = ScalarField::from_fn(g, |x, y| (x + y.cos()).sin());
        assert!(scalar_curl(&gradient(&f)).max_abs() <= 1e-12);

        let v = VectorField2::from_fn(g, |_, y| -y.sin(), |_, _| 0.0);
        let want = ScalarField::from_fn(g, |_, y| y.cos());
        assert!(scalar_curl(&v).sub(&want).max_abs() < 1e-13);

        let v = VectorField2::from_fn(g, |_, y| y.sin(), |x, _| x.sin());
        let want = ScalarField::from_fn(g, |x, y| x.cos() - y.cos());
        assert!(scalar_curl(&v).sub(&want).max_abs() < 1e-13);
    }

    #[test]
    fn leray_kills_gradients_keeps_means() {
        let g = grid();
        let f = ScalarField::from_fn(g, |x, y| x.sin() * y.sin());
        let v = gradient(&f);
        let mean_shift = VectorField2::from_fn(g, |_, _| 0.3, |_, _| -1.1);
        let p = leray_project(&v.add(&mean_shift));
        assert!(p.max_abs_diff(&mean_shift) < 1e-13);
    }

    #[test]
    fn leray_fixes_solenoidal_fields() {
        let g = grid();
        let tg = VectorField2::from_fn(
            g,
            |x, y| x.sin() * y.cos(),
            |x, y| -x.cos() * y.sin(),
        );
        assert!(leray_project(&tg).max_abs_diff(&tg) <= 1e-13);
    }

    #[test]
    fn helmholtz_of_sin_x() {
        // (sin x, 0) is a pure gradient of -cos x: the projection removes all of it.
        let g = grid();
        let v = VectorField2::from_fn(g, |x, _| x.sin(), |_, _| 0.0);
        let p = leray_project(&v);
        assert!(divergence(&p).max_abs() <= 1e-12);
        // Helmholtz potential from the spectral inverse Laplacian of div v.
        let phi = divergence(&v)
            .spectrum()
            .multiply(|kx, ky| {
                let k2 = kx * kx + ky * ky;
                if k2 == 0.0 {
                    0.0
                } else {
                    -1.0 / k2
                }
            })
            .to_field();
        let recon = p.add(&gradient(&phi));
        assert!(recon.max_abs_diff(&v) < 1e-13);
    }

    #[test]
    fn dealias_cuts_high_modes() {
        let g = grid();
        let f = ScalarField::from_fn(g, |x, y| (10.0 * x).cos() + (11.0 * y).sin());
        let d = dealias(&f.spectrum()).to_field();
        let want = ScalarField::from_fn(g, |x, _| (10.0 * x).cos());
        assert!(d.sub(&want).max_abs() < 1e-13);
    }
}
