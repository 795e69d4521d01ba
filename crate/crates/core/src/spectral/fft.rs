use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::{Grid, ScalarField};

/// Signed integer wavenumber of FFT index `j`; the Nyquist index maps to `-n/2`.
pub fn wavenumber(j: usize, n: usize) -> f64 {
    if j < n / 2 {
        j as f64
    } else {
        j as f64 - n as f64
    }
}

/// Wavenumber used by odd-order derivatives: the Nyquist mode is dropped so
/// that derivatives of real fields stay real.
pub fn deriv_wavenumber(j: usize, n: usize) -> f64 {
    if j == n / 2 {
        0.0
    } else {
        wavenumber(j, n)
    }
}

struct Plan {
    n: usize,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
    scratch: RefCell<Vec<Complex64>>,
}

impl Plan {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let len = fwd
            .get_inplace_scratch_len()
            .max(inv.get_inplace_scratch_len());
        Self {
            n,
            fwd,
            inv,
            scratch: RefCell::new(vec![Complex64::default(); len]),
        }
    }

    fn transform(&self, buf: &mut [Complex64], inverse: bool) {
        let fft = if inverse { &self.inv } else { &self.fwd };
        let mut scratch = self.scratch.borrow_mut();
        // rustfft processes every contiguous length-n chunk in one call
        fft.process_with_scratch(buf, &mut scratch);
        transpose(buf, self.n);
        fft.process_with_scratch(buf, &mut scratch);
        transpose(buf, self.n);
    }
}

fn transpose(buf: &mut [Complex64], n: usize) {
    for j in 0..n {
        for i in (j + 1)..n {
            buf.swap(j * n + i, i * n + j);
        }
    }
}

thread_local! {
    static PLANS: RefCell<HashMap<usize, Rc<Plan>>> = RefCell::new(HashMap::new());
}

fn plan(n: usize) -> Rc<Plan> {
    PLANS.with(|p| {
        p.borrow_mut()
            .entry(n)
            .or_insert_with(|| Rc::new(Plan::new(n)))
            .clone()
    })
}

/// Fourier coefficients of a real periodic field, normalized so that
/// `f(x) = Σ_k c_k e^{i k·x}` (forward transform divided by `n²`).
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl Spectrum {
    pub fn zeros(grid: Grid) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn forward(f: &ScalarField) -> Self {
        let grid = f.grid();
        let mut coeffs: Vec<Complex64> =
            f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        plan(grid.n()).transform(&mut coeffs, false);
        let norm = 1.0 / grid.len() as f64;
        coeffs.iter_mut().for_each(|c| *c *= norm);
        Self { grid, coeffs }
    }

    /// Inverse transform; the (roundoff-level) imaginary part is discarded.
    pub fn to_field(&self) -> ScalarField {
        let mut buf = self.coeffs.clone();
        plan(self.grid.n()).transform(&mut buf, true);
        ScalarField::from_raw(self.grid, buf.into_iter().map(|c| c.re).collect())
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// Applies `f(ix, iy, c)` to every mode, `ix`/`iy` being FFT indices.
    pub fn map_modes(&self, f: impl Fn(usize, usize, Complex64) -> Complex64) -> Self {
        let n = self.grid.n();
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(idx, &c)| f(idx % n, idx / n, c))
            .collect();
        Self {
            grid: self.grid,
            coeffs,
        }
    }

    /// Multiplies by a real Fourier multiplier `m(kx, ky)` of signed wavenumbers.
    pub fn multiply(&self, m: impl Fn(f64, f64) -> f64) -> Self {
        let n = self.grid.n();
        self.map_modes(|i, j, c| c * m(wavenumber(i, n), wavenumber(j, n)))
    }

    /// `Σ_k w(kx, ky) |c_k|²`.
    pub fn weighted_energy(&self, w: impl Fn(f64, f64) -> f64) -> f64 {
        let n = self.grid.n();
        self.coeffs
            .iter()
            .enumerate()
            .map(|(idx, c)| w(wavenumber(idx % n, n), wavenumber(idx / n, n)) * c.norm_sqr())
            .sum()
    }

    pub fn energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            grid: self.grid,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            grid: self.grid,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }
}

/// Transforms two real fields with a single complex FFT.
pub(crate) fn forward_pair(a: &ScalarField, b: &ScalarField) -> (Spectrum, Spectrum) {
    let grid = a.grid();
    let n = grid.n();
    let mut buf: Vec<Complex64> = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(&x, &y)| Complex64::new(x, y))
        .collect();
    plan(n).transform(&mut buf, false);
    let norm = 0.5 / grid.len() as f64;
    let mut sa = Vec::with_capacity(buf.len());
    let mut sb = Vec::with_capacity(buf.len());
    for j in 0..n {
        let jm = (n - j) % n;
        for i in 0..n {
            let im = (n - i) % n;
            let c = buf[j * n + i];
            let cm = buf[jm * n + im].conj();
            sa.push((c + cm) * norm);
            // (c - cm) / (2i)
            let d = c - cm;
            sb.push(Complex64::new(d.im, -d.re) * norm);
        }
    }
    (
        Spectrum { grid, coeffs: sa },
        Spectrum { grid, coeffs: sb },
    )
}

/// Inverse of [`forward_pair`] for Hermitian spectra.
pub(crate) fn inverse_pair(a: &Spectrum, b: &Spectrum) -> (ScalarField, ScalarField) {
    let grid = a.grid;
    let mut buf: Vec<Complex64> = a
        .coeffs
        .iter()
        .zip(&b.coeffs)
        .map(|(x, y)| x + Complex64::new(-y.im, y.re))
        .collect();
    plan(grid.n()).transform(&mut buf, true);
    let (re, im) = buf.into_iter().map(|c| (c.re, c.im)).unzip();
    (ScalarField::from_raw(grid, re), ScalarField::from_raw(grid, im))
}
