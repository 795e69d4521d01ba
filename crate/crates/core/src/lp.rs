//! Dyadic Littlewood–Paley decomposition on the discrete torus and numerical
//! probes of the Bernstein and logarithmic Sobolev inequalities.
//!
//! The partition is built from the ramp `r(t) = η(t)/(η(t)+η(1−t))`,
//! `η(t) = e^{−1/t}` for `t > 0`: `χ(ξ) = 1 − r(3(|ξ|−1))` equals 1 on the unit
//! ball and vanishes beyond `4/3`, and `φ(ξ) = χ(ξ/2) − χ(ξ)` lives in the ring
//! `1 ≤ |ξ| ≤ 8/3`. Band operators act as Fourier multipliers on integer
//! lattice frequencies.

use thiserror::Error;

use crate::spectral::{norm_hs, norm_lp, norm_sobolev, wavenumber, FieldError, Grid, ScalarField};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LpError {
    #[error("q range [{0}, {1}] is empty")]
    EmptyRange(i32, i32),
    #[error("q_max = {q_max} does not cover the Nyquist frequency {nyquist}")]
    NyquistNotCovered { q_max: i32, nyquist: usize },
    #[error("band index {q} outside [{lo}, {hi}]")]
    BandOutOfRange { q: i32, lo: i32, hi: i32 },
    #[error("split with N = {0} needs bands from -N-1 to N")]
    SplitOutOfRange(i32),
    #[error("Sobolev exponent must exceed 2, got {0}")]
    ExponentTooSmall(f64),
    #[error("norms must be positive (got {0}, {1})")]
    NonpositiveNorm(f64, f64),
    #[error("band {0} is identically zero; ratio undefined")]
    ZeroBand(i32),
    #[error("field is identically zero")]
    ZeroField,
    #[error("time window [{0}, {1}] is empty or not covered by the series")]
    EmptyWindow(f64, f64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn eta(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth monotone ramp: 0 for `t ≤ 0`, 1 for `t ≥ 1`.
pub fn smooth_ramp(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = eta(t);
        a / (a + eta(1.0 - t))
    }
}

/// Radial low-pass profile, 1 on `|ξ| ≤ 1` and 0 on `|ξ| ≥ 4/3`.
pub fn chi(radius: f64) -> f64 {
    1.0 - smooth_ramp(3.0 * (radius - 1.0))
}

/// Ring profile `χ(ξ/2) − χ(ξ)`, supported in `1 ≤ |ξ| ≤ 8/3`.
pub fn phi(radius: f64) -> f64 {
    chi(radius / 2.0) - chi(radius)
}

fn dyadic(q: i32) -> f64 {
    2f64.powi(q)
}

/// Lattice samples of the partition `χ(2^{-(q_min+1)}ξ) + Σ_{q=q_min+1}^{q_max} φ(2^{-q}ξ)`.
#[derive(Debug, Clone)]
pub struct DyadicPartition {
    grid: Grid,
    q_min: i32,
    q_max: i32,
    radius: Vec<f64>,
    chi: Vec<f64>,
    phi_q: Vec<Vec<f64>>,
}

pub fn build_partition(grid: Grid, q_min: i32, q_max: i32) -> Result<DyadicPartition, LpError> {
    if q_min >= q_max {
        return Err(LpError::EmptyRange(q_min, q_max));
    }
    let nyquist = grid.n() / 2;
    if dyadic(q_max) < nyquist as f64 {
        return Err(LpError::NyquistNotCovered { q_max, nyquist });
    }
    let n = grid.n();
    let radius: Vec<f64> = (0..grid.len())
        .map(|idx| wavenumber(idx % n, n).hypot(wavenumber(idx / n, n)))
        .collect();
    let low_scale = dyadic(-(q_min + 1));
    let chi_s = radius.iter().map(|&r| chi(r * low_scale)).collect();
    let phi_q = ((q_min + 1)..=q_max)
        .map(|q| {
            let s = dyadic(-q);
            radius.iter().map(|&r| phi(r * s)).collect()
        })
        .collect();
    Ok(DyadicPartition {
        grid,
        q_min,
        q_max,
        radius,
        chi: chi_s,
        phi_q,
    })
}

impl DyadicPartition {
    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn q_min(&self) -> i32 {
        self.q_min
    }

    pub fn q_max(&self) -> i32 {
        self.q_max
    }

    /// Band indices carried by the partition, `q_min+1 ..= q_max`.
    pub fn bands(&self) -> std::ops::RangeInclusive<i32> {
        (self.q_min + 1)..=self.q_max
    }

    /// Lattice magnitude `|k|` at flat spectral index `idx`.
    pub fn radius(&self, idx: usize) -> f64 {
        self.radius[idx]
    }

    pub fn chi_at(&self, idx: usize) -> f64 {
        self.chi[idx]
    }

    pub fn phi_at(&self, q: i32, idx: usize) -> Result<f64, LpError> {
        self.check_band(q)?;
        Ok(self.phi_q[(q - self.q_min - 1) as usize][idx])
    }

    fn check_band(&self, q: i32) -> Result<(), LpError> {
        if q <= self.q_min || q > self.q_max {
            return Err(LpError::BandOutOfRange {
                q,
                lo: self.q_min + 1,
                hi: self.q_max,
            });
        }
        Ok(())
    }

    /// Largest `|χ + Σφ_q − 1|` over lattice frequencies with `|ξ| ≤ 2^{q_max}`.
    pub fn unity_defect(&self) -> f64 {
        let cap = dyadic(self.q_max);
        (0..self.grid.len())
            .filter(|&i| self.radius[i] <= cap)
            .map(|i| {
                let s: f64 = self.chi[i] + self.phi_q.iter().map(|p| p[i]).sum::<f64>();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    fn apply(&self, f: &ScalarField, mult: &[f64]) -> ScalarField {
        let mut s = f.spectrum();
        s.coeffs_mut()
            .iter_mut()
            .zip(mult)
            .for_each(|(c, m)| *c *= *m);
        s.to_field()
    }
}

/// `Δ_q f = ℱ⁻¹[φ(2^{-q}ξ) f̂]`.
pub fn delta_q(f: &ScalarField, part: &DyadicPartition, q: i32) -> Result<ScalarField, LpError> {
    part.check_band(q)?;
    Ok(part.apply(f, &part.phi_q[(q - part.q_min - 1) as usize]))
}

/// `S_q f = ℱ⁻¹[χ(2^{-q}ξ) f̂]` for `q_min ≤ q ≤ q_max + 1`.
pub fn s_q(f: &ScalarField, part: &DyadicPartition, q: i32) -> Result<ScalarField, LpError> {
    if q < part.q_min || q > part.q_max + 1 {
        return Err(LpError::BandOutOfRange {
            q,
            lo: part.q_min,
            hi: part.q_max + 1,
        });
    }
    if q == part.q_min + 1 {
        return Ok(part.apply(f, &part.chi));
    }
    let s = dyadic(-q);
    let mult: Vec<f64> = part.radius.iter().map(|&r| chi(r * s)).collect();
    Ok(part.apply(f, &mult))
}

/// Low part `S_{q_min+1} f` plus every band `Δ_q f`.
#[derive(Debug, Clone)]
pub struct BandDecomposition {
    pub low: ScalarField,
    pub bands: Vec<(i32, ScalarField)>,
}

impl BandDecomposition {
    pub fn reconstruct(&self) -> ScalarField {
        self.bands
            .iter()
            .fold(self.low.clone(), |acc, (_, b)| acc.add(b))
    }
}

pub fn decompose(f: &ScalarField, part: &DyadicPartition) -> BandDecomposition {
    let spec = f.spectrum();
    let apply = |mult: &[f64]| {
        let mut s = spec.clone();
        s.coeffs_mut()
            .iter_mut()
            .zip(mult)
            .for_each(|(c, m)| *c *= *m);
        s.to_field()
    };
    BandDecomposition {
        low: apply(&part.chi),
        bands: part
            .bands()
            .zip(&part.phi_q)
            .map(|(q, m)| (q, apply(m)))
            .collect(),
    }
}

/// `f1 = S_{−N−1} f`, `f2 = Σ_{|j|≤N} Δ_j f`, `f3 = Σ_{j>N} Δ_j f`.
pub fn three_part_split(
    f: &ScalarField,
    part: &DyadicPartition,
    big_n: i32,
) -> Result<(ScalarField, ScalarField, ScalarField), LpError> {
    if big_n < 1 || part.q_min > -big_n - 1 || part.q_max < big_n {
        return Err(LpError::SplitOutOfRange(big_n));
    }
    let f1 = s_q(f, part, -big_n - 1)?;
    let mut f2 = ScalarField::zeros(f.grid());
    let mut f3 = ScalarField::zeros(f.grid());
    for q in part.bands() {
        if q < -big_n {
            continue;
        }
        let band = delta_q(f, part, q)?;
        if q <= big_n {
            f2 = f2.add(&band);
        } else {
            f3 = f3.add(&band);
        }
    }
    Ok((f1, f2, f3))
}

/// `κ = min(2/q, 2(1/2 − 1/q))`.
pub fn kappa(q: f64) -> Result<f64, LpError> {
    if q.is_nan() || q <= 2.0 {
        return Err(LpError::ExponentTooSmall(q));
    }
    Ok(f64::min(2.0 / q, 2.0 * (0.5 - 1.0 / q)))
}

/// `N = ⌊log_{2^κ}(‖f‖_{W^{1,q}} / ‖∇f‖_{L²})⌋ + 1`, at least 1.
pub fn optimal_band_count(w1q_norm: f64, grad_l2_norm: f64, q: f64) -> Result<i32, LpError> {
    if !(w1q_norm > 0.0 && grad_l2_norm > 0.0) {
        return Err(LpError::NonpositiveNorm(w1q_norm, grad_l2_norm));
    }
    let k = kappa(q)?;
    let x = (w1q_norm / grad_l2_norm).log2() / k;
    // exact powers of 2^κ land a few ulps under the integer
    let floor = (x + 1e-12 * x.abs().max(1.0)).floor();
    Ok((floor as i32 + 1).max(1))
}

/// `‖Δ_q f‖_∞ / (2^{2q/p} ‖Δ_q f‖_{L^p})`.
pub fn bernstein_ratio(
    f: &ScalarField,
    part: &DyadicPartition,
    q: i32,
    p: f64,
) -> Result<f64, LpError> {
    let band = delta_q(f, part, q)?;
    bernstein_ratio_of_band(&band, f.max_abs(), q, p)
}

pub(crate) fn bernstein_ratio_of_band(
    band: &ScalarField,
    scale: f64,
    q: i32,
    p: f64,
) -> Result<f64, LpError> {
    let sup = band.max_abs();
    if sup == 0.0 || sup <= 1e-12 * scale {
        return Err(LpError::ZeroBand(q));
    }
    let lp = norm_lp(band, p)?;
    Ok(sup / (2f64.powf(2.0 * q as f64 / p) * lp))
}

fn ln_plus(x: f64) -> f64 {
    if x > 1.0 {
        x.ln()
    } else {
        0.0
    }
}

/// `‖f‖_∞ / (1 + ‖∇f‖_{L²} (ln⁺‖f‖_{W^{1,q}})^{1/2})`.
pub fn log_sobolev_ratio(f: &ScalarField, q: f64) -> Result<f64, LpError> {
    if q.is_nan() || q <= 2.0 {
        return Err(LpError::ExponentTooSmall(q));
    }
    let sup = f.max_abs();
    if sup == 0.0 {
        return Err(LpError::ZeroField);
    }
    let grad = f.spectrum().weighted_energy(|kx, ky| kx * kx + ky * ky).sqrt() * std::f64::consts::TAU;
    let w1q = norm_sobolev(f, 1, q)?;
    Ok(sup / (1.0 + grad * ln_plus(w1q).sqrt()))
}

/// `( ∫_s^t g(τ)² dτ )^{1/2}` where `g` is sampled at `times` and interpolated
/// linearly in `g²` between samples, so the integral is additive in the window.
pub fn time_l2(times: &[f64], values: &[f64], s: f64, t: f64) -> Result<f64, LpError> {
    Ok(time_integral(times, &values.iter().map(|v| v * v).collect::<Vec<_>>(), s, t)?.sqrt())
}

/// Trapezoid integral of a piecewise-linear sampled function over `[s, t]`.
pub fn time_integral(times: &[f64], values: &[f64], s: f64, t: f64) -> Result<f64, LpError> {
    let covered = times.len() >= 2 && times[0] <= s && t <= times[times.len() - 1];
    if !(s < t) || !covered || values.len() != times.len() {
        return Err(LpError::EmptyWindow(s, t));
    }
    let mut acc = 0.0;
    for w in 0..times.len() - 1 {
        let (a, b) = (times[w], times[w + 1]);
        let lo = a.max(s);
        let hi = b.min(t);
        if hi <= lo {
            continue;
        }
        let at = |x: f64| values[w] + (values[w + 1] - values[w]) * (x - a) / (b - a);
        acc += 0.5 * (hi - lo) * (at(lo) + at(hi));
    }
    Ok(acc)
}

/// Time-integrated ratio
/// `‖f‖_{L²(s,t;L^∞)} / (1 + ‖f‖_{L²(s,t;H¹)} (ln⁺‖f‖_{L²(s,t;W^{1,q})})^{1/2})`.
pub fn time_integrated_ratio(
    series: &[(f64, ScalarField)],
    s: f64,
    t: f64,
    q: f64,
) -> Result<f64, LpError> {
    if q.is_nan() || q <= 2.0 {
        return Err(LpError::ExponentTooSmall(q));
    }
    let times: Vec<f64> = series.iter().map(|(t, _)| *t).collect();
    let mut sup = Vec::with_capacity(series.len());
    let mut h1 = Vec::with_capacity(series.len());
    let mut w1q = Vec::with_capacity(series.len());
    for (_, f) in series {
        sup.push(f.max_abs());
        h1.push(norm_hs(f, 1.0)?);
        w1q.push(norm_sobolev(f, 1, q)?);
    }
    let num = time_l2(&times, &sup, s, t)?;
    let h1 = time_l2(&times, &h1, s, t)?;
    let w1q = time_l2(&times, &w1q, s, t)?;
    Ok(num / (1.0 + h1 * ln_plus(w1q).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{band_limited, rng};
    use rand::Rng;
    use std::f64::consts::PI;

    fn grid() -> Grid {
        Grid::new(32).unwrap()
    }

    #[test]
    fn ramp_shape() {
        assert_eq!(smooth_ramp(-0.1), 0.0);
        assert_eq!(smooth_ramp(1.2), 1.0);
        assert!((smooth_ramp(0.5) - 0.5).abs() < 1e-15);
        assert_eq!(chi(1.0), 1.0);
        assert_eq!(chi(4.0 / 3.0), 0.0);
        assert_eq!(phi(2.0), 1.0);
        assert_eq!(phi(1.0), 0.0);
    }

    #[test]
    fn partition_rejects_bad_ranges() {
        let g = grid();
        assert!(matches!(build_partition(g, 3, 3), Err(LpError::EmptyRange(..))));
        assert!(matches!(
            build_partition(g, -2, 3),
            Err(LpError::NyquistNotCovered { .. })
        ));
    }

    #[test]
    fn partition_at_origin_and_supports() {
        let part = build_partition(grid(), -3, 5).unwrap();
        assert_eq!(part.chi_at(0), 1.0);
        for q in part.bands() {
            assert_eq!(part.phi_at(q, 0).unwrap(), 0.0);
            for idx in 0..grid().len() {
                let r = part.radius(idx);
                let scale = dyadic(q);
                if r < 0.75 * scale || r > 8.0 / 3.0 * scale {
                    assert_eq!(part.phi_at(q, idx).unwrap(), 0.0);
                }
                assert!(part.phi_at(q, idx).unwrap() >= 0.0);
            }
        }
        assert!(part.unity_defect() <= 1e-12);
    }

    #[test]
    fn constants_have_no_bands() {
        let g = grid();
        let part = build_partition(g, -3, 5).unwrap();
        let c = ScalarField::constant(g, 2.5);
        for q in part.bands() {
            assert!(delta_q(&c, &part, q).unwrap().max_abs() <= 1e-13);
        }
        for q in part.q_min()..=part.q_max() + 1 {
            assert!(s_q(&c, &part, q).unwrap().sub(&c).max_abs() <= 1e-13);
        }
    }

    #[test]
    fn cos_2x_lives_in_band_zero() {
        let g = grid();
        let part = build_partition(g, -3, 5).unwrap();
        let f = ScalarField::from_fn(g, |x, _| (2.0 * x).cos());
        assert!(delta_q(&f, &part, 0).unwrap().sub(&f).max_abs() < 1e-14);
        assert!(delta_q(&f, &part, 1).unwrap().max_abs() < 1e-14);
        assert!(delta_q(&f, &part, -1).unwrap().max_abs() < 1e-14);
    }

    #[test]
    fn s_q_kills_high_modes() {
        let g = grid();
        let part = build_partition(g, -3, 5).unwrap();
        let f = ScalarField::from_fn(g, |x, _| (16.0 * x).cos());
        for q in -3..=2 {
            assert!(s_q(&f, &part, q).unwrap().max_abs() < 1e-14);
        }
    }

    #[test]
    fn telescoping() {
        let g = grid();
        let part = build_partition(g, -3, 5).unwrap();
        let f = band_limited(g, 15.0, 0.5, &mut rng(1));
        for q in part.bands() {
            let diff = s_q(&f, &part, q + 1).unwrap().sub(&s_q(&f, &part, q).unwrap());
            let d = delta_q(&f, &part, q).unwrap();
            assert!(diff.sub(&d).max_abs() <= 1e-12);
        }
    }

    #[test]
    fn almost_orthogonality() {
        let g = grid();
        let part = build_partition(g, -3, 5).unwrap();
        let f = band_limited(g, 22.0, 0.0, &mut rng(2));
        for q in part.bands() {
            let dq = delta_q(&f, &part, q).unwrap();
            for q2 in part.bands().filter(|q2| (q2 - q).abs() >= 2) {
                assert!(delta_q(&dq, &part, q2).unwrap().max_abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn split_examples() {
        let g = grid();
        let part = build_partition(g, -4, 5).unwrap();
        let c = ScalarField::constant(g, -1.5);
        let (f1, f2, f3) = three_part_split(&c, &part, 2).unwrap();
        assert!(f1.sub(&c).max_abs() < 1e-13);
        assert!(f2.max_abs() < 1e-13 && f3.max_abs() < 1e-13);

        // max mode 3 < 2^2: nothing above band 2
        let f = band_limited(g, 3.0, 0.0, &mut rng(5));
        let (f1, f2, f3) = three_part_split(&f, &part, 2).unwrap();
        assert!(f3.max_abs() <= 1e-13);
        assert!(f1.add(&f2).add(&f3).sub(&f).max_abs() <= 1e-10);

        let f = band_limited(g, 22.0, 0.0, &mut rng(6));
        let (f1, f2, f3) = three_part_split(&f, &part, 1).unwrap();
        assert!(f1.add(&f2).add(&f3).sub(&f).max_abs() <= 1e-10);

        assert!(matches!(
            three_part_split(&f, &part, 4),
            Err(LpError::SplitOutOfRange(4))
        ));
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(kappa(4.0).unwrap(), 0.5);
        assert_eq!(kappa(8.0).unwrap(), 0.25);
        assert!(kappa(2.0 + 1e-9).unwrap() < 1e-8);
        assert!(kappa(2.0).is_err());
    }

    #[test]
    fn band_count_examples() {
        assert_eq!(optimal_band_count(3.0, 3.0, 6.0).unwrap(), 1);
        let ratio = 2f64.powf(0.5 * 5.0);
        assert_eq!(optimal_band_count(ratio, 1.0, 4.0).unwrap(), 6);
        assert_eq!(optimal_band_count(1.0, 10.0, 4.0).unwrap(), 1);
        assert!(optimal_band_count(0.0, 1.0, 4.0).is_err());
    }

    #[test]
    fn bernstein_examples() {
        let g = grid();
        let part = build_partition(g, -3, 5).unwrap();
        let f = ScalarField::from_fn(g, |x, _| (2.0 * x).cos());
        let r = bernstein_ratio(&f, &part, 0, 2.0).unwrap();
        assert!((r - 1.0 / (PI * 2f64.sqrt())).abs() < 1e-13);
        let r2 = bernstein_ratio(&f.scale(2.0), &part, 0, 2.0).unwrap();
        assert!((r - r2).abs() < 1e-14);
        assert!(matches!(
            bernstein_ratio(&f, &part, 2, 2.0),
            Err(LpError::ZeroBand(2))
        ));
    }

    #[test]
    fn log_sobolev_examples() {
        let g = grid();
        let f = ScalarField::constant(g, 0.5);
        assert!((log_sobolev_ratio(&f, 4.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            log_sobolev_ratio(&ScalarField::zeros(g), 4.0),
            Err(LpError::ZeroField)
        ));
    }

    #[test]
    fn time_window_additivity() {
        let mut r = rng(8);
        let times: Vec<f64> = (0..40).map(|i| 0.05 * i as f64).collect();
        let vals: Vec<f64> = times.iter().map(|_| r.gen_range(0.0..3.0)).collect();
        for _ in 0..20 {
            let s = r.gen_range(0.0..0.9);
            let t = r.gen_range(1.0..1.95);
            let m = r.gen_range(s + 0.01..t - 0.01);
            let whole = time_l2(&times, &vals, s, t).unwrap();
            let a = time_l2(&times, &vals, s, m).unwrap();
            let b = time_l2(&times, &vals, m, t).unwrap();
            assert!((whole - (a * a + b * b).sqrt()).abs() <= 1e-12);
        }
        assert!(time_l2(&times, &vals, 1.0, 1.0).is_err());
        assert!(time_l2(&times, &vals, 1.0, 5.0).is_err());
    }

    #[test]
    fn constant_in_time_ratio() {
        let g = grid();
        let f = ScalarField::from_fn(g, |x, y| 0.3 * x.sin() + 0.2 * (2.0 * y).cos());
        let series: Vec<(f64, ScalarField)> = (0..5).map(|i| (0.1 * i as f64, f.clone())).collect();
        let (s, t) = (0.05f64, 0.35);
        let w = (t - s).sqrt();
        let sup = w * f.max_abs();
        let h1 = w * norm_hs(&f, 1.0).unwrap();
        let w1q = w * norm_sobolev(&f, 1, 4.0).unwrap();
        let want = sup / (1.0 + h1 * ln_plus(w1q).sqrt());
        let got = time_integrated_ratio(&series, s, t, 4.0).unwrap();
        assert!((got - want).abs() < 1e-13);
    }
}
