//! Seeded random band-limited fields.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spectral::{wavenumber, Grid, ScalarField, Spectrum};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Zero-mean real field whose Fourier modes are nonzero only for
/// `0 < |k| ≤ k_max`, with amplitudes `~ |k|^{-slope}` and random phases.
pub fn band_limited<R: Rng>(grid: Grid, k_max: f64, slope: f64, rng: &mut R) -> ScalarField {
    let n = grid.n();
    let mut s = Spectrum::zeros(grid);
    let coeffs = s.coeffs_mut();
    for j in 0..n {
        for i in 0..n {
            let (kx, ky) = (wavenumber(i, n), wavenumber(j, n));
            let k = kx.hypot(ky);
            // Nyquist rows have no conjugate partner; leave them empty
            if k == 0.0 || k > k_max || 2 * i == n || 2 * j == n {
                continue;
            }
            let (im, jm) = ((n - i) % n, (n - j) % n);
            let idx = j * n + i;
            let mirror = jm * n + im;
            if mirror < idx {
                continue;
            }
            let amp = rng.gen_range(0.0..1.0) * k.powf(-slope);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let c = Complex64::from_polar(amp, phase);
            coeffs[idx] = c;
            coeffs[mirror] = c.conj();
        }
    }
    s.to_field()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn band_limited_is_real_zero_mean_and_bounded_in_frequency() {
        let g = Grid::new(32).unwrap();
        let f = band_limited(g, 4.0, 1.0, &mut rng(3));
        assert!(f.mean().abs() < 1e-14);
        let s = f.spectrum();
        let high = s.weighted_energy(|kx, ky| if kx.hypot(ky) > 4.0 { 1.0 } else { 0.0 });
        assert!(high < 1e-28 * s.energy().max(1.0));
        assert!(s.energy() > 0.0);
    }

    #[test]
    fn seeded() {
        let g = Grid::new(16).unwrap();
        let a = band_limited(g, 5.0, 0.5, &mut rng(9));
        let b = band_limited(g, 5.0, 0.5, &mut rng(9));
        assert_eq!(a, b);
    }
}
