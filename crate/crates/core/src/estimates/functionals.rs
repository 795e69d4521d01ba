use crate::solver::{convective, Spectral2, State};
use crate::spectral::{forward_pair, Spectrum};

use super::{per_index, time_derivative, EstimateError, EstimateSeries, Trajectory};

use std::f64::consts::{E, PI};

/// Paired sides of an identity sampled over time.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IdentityDefect {
    pub times: Vec<f64>,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
}

impl IdentityDefect {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn defect(&self, i: usize) -> f64 {
        (self.lhs[i] - self.rhs[i]).abs()
    }

    /// `max(|lhs|, |rhs|, 1)`.
    pub fn scale(&self, i: usize) -> f64 {
        self.lhs[i].abs().max(self.rhs[i].abs()).max(1.0)
    }

    pub fn relative(&self, i: usize) -> f64 {
        self.defect(i) / self.scale(i)
    }

    pub fn max_relative(&self) -> f64 {
        (0..self.len()).map(|i| self.relative(i)).fold(0.0, f64::max)
    }

    pub fn max_defect(&self) -> f64 {
        (0..self.len()).map(|i| self.defect(i)).fold(0.0, f64::max)
    }
}

/// Energy and dissipation columns.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnergyColumns {
    pub t: Vec<f64>,
    pub e_kin: Vec<f64>,
    pub e_mag: Vec<f64>,
    pub diss_u: Vec<f64>,
    pub diss_b: Vec<f64>,
}

impl EnergyColumns {
    pub fn from_series(series: &EstimateSeries) -> Self {
        let col = |name| series.column(name).expect("documented column");
        Self {
            t: col("t"),
            e_kin: col("e_kin"),
            e_mag: col("e_mag"),
            diss_u: col("diss_u"),
            diss_b: col("diss_B"),
        }
    }

    pub fn total_energy(&self) -> Vec<f64> {
        self.e_kin.iter().zip(&self.e_mag).map(|(a, b)| a + b).collect()
    }

    /// `lhs = E(t) − E(0)` against `rhs = −∫₀ᵗ (diss_u + diss_B)` by the trapezoid rule.
    pub fn identity_defect(&self) -> Result<IdentityDefect, EstimateError> {
        if self.t.len() < 3 {
            return Err(EstimateError::TooFewSnapshots {
                needed: 3,
                have: self.t.len(),
            });
        }
        let e = self.total_energy();
        let d: Vec<f64> = self.diss_u.iter().zip(&self.diss_b).map(|(a, b)| a + b).collect();
        let cum = cumulative(&self.t, &d);
        Ok(IdentityDefect {
            times: self.t.clone(),
            lhs: e.iter().map(|v| v - e[0]).collect(),
            rhs: cum.iter().map(|c| -c).collect(),
        })
    }

    /// `|E(T) + ∫₀ᵀ D − E(0)| / E(0)` at the final time.
    pub fn relative_final_defect(&self) -> Result<f64, EstimateError> {
        let d = self.identity_defect()?;
        let e0 = self.e_kin[0] + self.e_mag[0];
        Ok(d.defect(d.len() - 1) / e0)
    }
}

fn cumulative(t: &[f64], v: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    for i in 0..t.len() {
        if i > 0 {
            acc += 0.5 * (t[i] - t[i - 1]) * (v[i] + v[i - 1]);
        }
        out.push(acc);
    }
    out
}

fn running_max(v: &[f64]) -> Vec<f64> {
    let mut m = f64::NEG_INFINITY;
    v.iter()
        .map(|&x| {
            m = m.max(x);
            m
        })
        .collect()
}

fn sq_norm_weighted(sx: &Spectrum, sy: &Spectrum, w: impl Fn(f64, f64) -> f64 + Copy) -> f64 {
    4.0 * PI * PI * (sx.weighted_energy(w) + sy.weighted_energy(w))
}

fn hs_sq(sx: &Spectrum, sy: &Spectrum, s: i32) -> f64 {
    sq_norm_weighted(sx, sy, move |kx, ky| (1.0 + kx * kx + ky * ky).powi(s))
}

/// Squared norms of one snapshot entering Φ, Ψ and the Gronwall envelope.
#[derive(Debug, Clone, Copy)]
struct SnapshotNorms {
    h1: f64,
    h2: f64,
    h3: f64,
    rho_ut: f64,
    bt: f64,
    dt_h1: f64,
    linf: f64,
}

fn snapshot_norms(traj: &Trajectory) -> Vec<SnapshotNorms> {
    let states = traj.states();
    let h = traj.dt_snapshot();
    per_index(states.len(), |k| {
        let s = &states[k];
        let (ux, uy) = forward_pair(s.u.x(), s.u.y());
        let (bx, by) = forward_pair(s.b.x(), s.b.y());
        let rho_hat = s.rho.spectrum();
        let rho_h2 = 4.0 * PI * PI * rho_hat.weighted_energy(|kx, ky| (1.0 + kx * kx + ky * ky).powi(2));
        let (rho_ut, bt, dt_h1) = if states.len() >= 2 {
            let (ut, bt) = time_derivative(states, k, h);
            let rho_plus = s.rho.map(|r| r.max(0.0));
            let (utx, uty) = forward_pair(ut.x(), ut.y());
            let (btx, bty) = forward_pair(bt.x(), bt.y());
            (
                ut.dot(&ut).mul(&rho_plus).integral(),
                bt.inner(&bt),
                hs_sq(&utx, &uty, 1) + hs_sq(&btx, &bty, 1),
            )
        } else {
            (0.0, 0.0, 0.0)
        };
        SnapshotNorms {
            h1: hs_sq(&ux, &uy, 1) + hs_sq(&bx, &by, 1),
            h2: rho_h2 + hs_sq(&ux, &uy, 2) + hs_sq(&bx, &by, 2),
            h3: hs_sq(&ux, &uy, 3) + hs_sq(&bx, &by, 3),
            rho_ut,
            bt,
            dt_h1,
            linf: s.u.max_magnitude().powi(2) + s.b.max_magnitude().powi(2),
        }
    })
}

/// Energy and dissipation of every snapshot.
pub fn energy_report(traj: &Trajectory) -> EnergyColumns {
    let rows = per_index(traj.len(), |k| {
        let s = &traj.states()[k];
        let (ux, uy) = forward_pair(s.u.x(), s.u.y());
        let (bx, by) = forward_pair(s.b.x(), s.b.y());
        let grad = |kx: f64, ky: f64| kx * kx + ky * ky;
        (
            0.5 * s.u.dot(&s.u).mul(&s.rho).integral(),
            0.5 * s.b.inner(&s.b),
            sq_norm_weighted(&ux, &uy, grad),
            sq_norm_weighted(&bx, &by, grad),
        )
    });
    EnergyColumns {
        t: traj.times(),
        e_kin: rows.iter().map(|r| r.0).collect(),
        e_mag: rows.iter().map(|r| r.1).collect(),
        diss_u: rows.iter().map(|r| r.2).collect(),
        diss_b: rows.iter().map(|r| r.3).collect(),
    }
}

pub fn energy_identity_defect(traj: &Trajectory) -> Result<IdentityDefect, EstimateError> {
    traj.require(3)?;
    energy_report(traj).identity_defect()
}

/// One-sided discrete maximum principle for the density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityReport {
    /// No sample ever left `[min ρ₀, max ρ₀]`.
    pub passed: bool,
    /// Largest excursion beyond the initial bounds (0 when passed).
    pub worst_excursion: f64,
    /// Decay of `max ρ` from the first to the last sample, in percent.
    pub max_decay_percent: f64,
}

impl DensityReport {
    pub fn from_bounds(mins: &[f64], maxs: &[f64]) -> Self {
        if mins.is_empty() {
            return Self {
                passed: true,
                worst_excursion: 0.0,
                max_decay_percent: 0.0,
            };
        }
        let (lo, hi) = (mins[0], maxs[0]);
        let worst = mins
            .iter()
            .zip(maxs)
            .map(|(&a, &b)| (lo - a).max(b - hi).max(0.0))
            .fold(0.0, f64::max);
        let last = maxs[maxs.len() - 1];
        Self {
            passed: worst == 0.0,
            worst_excursion: worst,
            max_decay_percent: if hi != 0.0 { 100.0 * (hi - last) / hi } else { 0.0 },
        }
    }

    pub fn from_series(series: &EstimateSeries) -> Self {
        Self::from_bounds(
            &series.column("rho_min").expect("documented column"),
            &series.column("rho_max").expect("documented column"),
        )
    }
}

pub fn density_max_principle(traj: &Trajectory) -> DensityReport {
    let mins: Vec<f64> = traj.states().iter().map(|s| s.rho.min()).collect();
    let maxs: Vec<f64> = traj.states().iter().map(|s| s.rho.max()).collect();
    DensityReport::from_bounds(&mins, &maxs)
}

/// Index of the last snapshot at or before `t`, plus the leftover time.
fn locate(traj: &Trajectory, t: f64) -> Result<(usize, f64), EstimateError> {
    traj.require(1)?;
    let t0 = traj.states()[0].t;
    let t1 = traj.states()[traj.len() - 1].t;
    let slack = 1e-9 * traj.dt_snapshot().max(1.0);
    if !(t >= t0 - slack && t <= t1 + slack) {
        return Err(EstimateError::OutOfRange(t, t0, t1));
    }
    let k = (((t - t0) / traj.dt_snapshot()) + 1e-9).floor() as usize;
    let k = k.min(traj.len() - 1);
    Ok((k, (t - traj.states()[k].t).max(0.0)))
}

fn integral_to(times: &[f64], cum: &[f64], v: &[f64], k: usize, rest: f64) -> f64 {
    if rest <= 0.0 || k + 1 >= times.len() {
        return cum[k];
    }
    let h = times[k + 1] - times[k];
    let vt = v[k] + (v[k + 1] - v[k]) * rest / h;
    cum[k] + 0.5 * rest * (v[k] + vt)
}

struct Functionals {
    times: Vec<f64>,
    norms: Vec<SnapshotNorms>,
}

impl Functionals {
    fn of(traj: &Trajectory) -> Self {
        Self {
            times: traj.times(),
            norms: snapshot_norms(traj),
        }
    }

    fn column(&self, f: impl Fn(&SnapshotNorms) -> f64) -> Vec<f64> {
        self.norms.iter().map(f).collect()
    }

    fn phi_at(&self, k: usize, rest: f64) -> f64 {
        let h2 = running_max(&self.column(|n| n.h2));
        let ut = running_max(&self.column(|n| n.rho_ut));
        let h3 = self.column(|n| n.h3);
        let dt = self.column(|n| n.dt_h1);
        let int = |v: &[f64]| integral_to(&self.times, &cumulative(&self.times, v), v, k, rest);
        h2[k] + ut[k] + int(&h3) + int(&dt)
    }

    fn psi_at(&self, k: usize, rest: f64) -> f64 {
        let h1 = running_max(&self.column(|n| n.h1));
        let d = self.column(|n| n.rho_ut + n.bt);
        E + h1[k] + integral_to(&self.times, &cumulative(&self.times, &d), &d, k, rest)
    }
}

/// `Φ(T) = sup_{t≤T}(‖ρ‖²_{H²} + ‖u‖²_{H²} + ‖B‖²_{H²}) + sup_{t≤T}‖√ρ u_t‖²
/// + ∫₀ᵀ(‖u‖²_{H³} + ‖B‖²_{H³}) + ∫₀ᵀ(‖u_t‖²_{H¹} + ‖B_t‖²_{H¹})`.
pub fn phi(traj: &Trajectory, t: f64) -> Result<f64, EstimateError> {
    let (k, rest) = locate(traj, t)?;
    Ok(Functionals::of(traj).phi_at(k, rest))
}

/// `Ψ(t) = e + sup_{τ≤t}(‖u‖²_{H¹} + ‖B‖²_{H¹}) + ∫₀ᵗ(‖√ρ u_t‖² + ‖B_t‖²)`.
pub fn psi(traj: &Trajectory, t: f64) -> Result<f64, EstimateError> {
    let (k, rest) = locate(traj, t)?;
    Ok(Functionals::of(traj).psi_at(k, rest))
}

/// Φ at every snapshot time.
pub fn phi_series(traj: &Trajectory) -> Vec<f64> {
    let f = Functionals::of(traj);
    (0..traj.len()).map(|k| f.phi_at(k, 0.0)).collect()
}

/// Ψ at every snapshot time.
pub fn psi_series(traj: &Trajectory) -> Vec<f64> {
    let f = Functionals::of(traj);
    (0..traj.len()).map(|k| f.psi_at(k, 0.0)).collect()
}

/// Ψ at every row of a per-step series.
pub(crate) fn psi_from_series(series: &EstimateSeries) -> Vec<f64> {
    let col = |name| series.column(name).expect("documented column");
    let t = col("t");
    let h1: Vec<f64> = col("u_H1")
        .iter()
        .zip(col("B_H1"))
        .map(|(a, b)| a * a + b * b)
        .collect();
    let d: Vec<f64> = col("sqrt_rho_ut_L2")
        .iter()
        .zip(col("Bt_L2"))
        .map(|(a, b)| a * a + b * b)
        .collect();
    let sup = running_max(&h1);
    let cum = cumulative(&t, &d);
    sup.iter().zip(&cum).map(|(s, c)| E + s + c).collect()
}

/// `∫₀ᵀ ‖u‖^s_{L^r} dt` for `2/s + 2/r = 1` (`r = ∞`, `s = 2` allowed).
pub fn serrin_integral(traj: &Trajectory, r: f64, s: f64) -> Result<f64, EstimateError> {
    let inv_r = if r.is_infinite() { 0.0 } else { 1.0 / r };
    if !(r >= 2.0 && s >= 2.0) || (2.0 / s + 2.0 * inv_r - 1.0).abs() > 1e-12 {
        return Err(EstimateError::SerrinExponents(r, s));
    }
    let vals = per_index(traj.len(), |k| {
        crate::spectral::norm_lp(&traj.states()[k].u, r).map(|v| v.powf(s))
    })
    .into_iter()
    .collect::<Result<Vec<f64>, _>>()?;
    Ok(cumulative(&traj.times(), &vals).last().copied().unwrap_or(0.0))
}

/// The two energy-type identities obtained by testing the momentum equation
/// with `u_t` and the induction equation with `B_t`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FirstLevelDefects {
    /// `½ d/dt‖∇u‖² + ‖√ρ u_t‖²` against `−∫ρ(u·∇u)·u_t + ∫(B·∇B)·u_t`.
    pub momentum: IdentityDefect,
    /// `½ d/dt‖∇B‖² + ‖B_t‖²` against `−∫(u·∇B)·B_t + ∫(B·∇u)·B_t`.
    pub induction: IdentityDefect,
}

/// Both identities at interior snapshots, time derivatives centered.
pub fn first_level_identity_defect(traj: &Trajectory) -> Result<FirstLevelDefects, EstimateError> {
    traj.require(3)?;
    let states = traj.states();
    let h = traj.dt_snapshot();
    let grad_sq: Vec<(f64, f64)> = per_index(states.len(), |k| {
        let s = &states[k];
        let (ux, uy) = forward_pair(s.u.x(), s.u.y());
        let (bx, by) = forward_pair(s.b.x(), s.b.y());
        let w = |kx: f64, ky: f64| kx * kx + ky * ky;
        (sq_norm_weighted(&ux, &uy, w), sq_norm_weighted(&bx, &by, w))
    });
    let rows = per_index(states.len() - 2, |i| {
        let k = i + 1;
        let s: &State = &states[k];
        let (ut, bt) = time_derivative(states, k, h);
        let us = Spectral2::of(&s.u);
        let bs = Spectral2::of(&s.b);
        let rho_plus = s.rho.map(|r| r.max(0.0));
        let m_lhs = 0.25 * (grad_sq[k + 1].0 - grad_sq[k - 1].0) / h
            + ut.dot(&ut).mul(&rho_plus).integral();
        let m_rhs = -convective(&us, &us, false).mul_scalar(&s.rho).inner(&ut)
            + convective(&bs, &bs, false).inner(&ut);
        let i_lhs = 0.25 * (grad_sq[k + 1].1 - grad_sq[k - 1].1) / h + bt.inner(&bt);
        let i_rhs = -convective(&us, &bs, false).inner(&bt) + convective(&bs, &us, false).inner(&bt);
        (s.t, m_lhs, m_rhs, i_lhs, i_rhs)
    });
    let times: Vec<f64> = rows.iter().map(|r| r.0).collect();
    Ok(FirstLevelDefects {
        momentum: IdentityDefect {
            times: times.clone(),
            lhs: rows.iter().map(|r| r.1).collect(),
            rhs: rows.iter().map(|r| r.2).collect(),
        },
        induction: IdentityDefect {
            times,
            lhs: rows.iter().map(|r| r.3).collect(),
            rhs: rows.iter().map(|r| r.4).collect(),
        },
    })
}

/// Ψ against its fitted exponential envelope from time `s` on.
#[derive(Debug, Clone, PartialEq)]
pub struct GronwallEnvelope {
    pub times: Vec<f64>,
    pub psi: Vec<f64>,
    pub envelope: Vec<f64>,
    /// Smallest `C ≥ 0` with `Ψ(T) ≤ Ψ(s) exp(C ∫_s^T (‖u‖²_∞ + ‖B‖²_∞))`.
    pub c_fit: f64,
}

impl GronwallEnvelope {
    fn fit(times: &[f64], psi: &[f64], linf: &[f64], s: f64) -> Result<Self, EstimateError> {
        let (Some(&t0), Some(&t1)) = (times.first(), times.last()) else {
            return Err(EstimateError::TooFewSnapshots { needed: 1, have: 0 });
        };
        let start = times
            .iter()
            .position(|&t| t >= s - 1e-12 * t1.abs().max(1.0))
            .filter(|_| s >= t0 - 1e-12 && s <= t1 + 1e-12)
            .ok_or(EstimateError::OutOfRange(s, t0, t1))?;
        let times = &times[start..];
        let psi = &psi[start..];
        let integral = cumulative(times, &linf[start..]);
        let mut c_fit: f64 = 0.0;
        for (p, i) in psi.iter().zip(&integral).skip(1) {
            let growth = (p / psi[0]).ln();
            if growth > 0.0 {
                c_fit = c_fit.max(if *i > 0.0 { growth / i } else { f64::INFINITY });
            }
        }
        let envelope = integral.iter().map(|i| psi[0] * (c_fit * i).exp()).collect();
        Ok(Self {
            times: times.to_vec(),
            psi: psi.to_vec(),
            envelope,
            c_fit,
        })
    }

    /// Fit on a per-step series.
    pub fn from_series(series: &EstimateSeries, s: f64) -> Result<Self, EstimateError> {
        let t = series.column("t")?;
        let linf: Vec<f64> = series
            .column("u_Linf")?
            .iter()
            .zip(series.column("B_Linf")?)
            .map(|(a, b)| a * a + b * b)
            .collect();
        Self::fit(&t, &psi_from_series(series), &linf, s)
    }
}

pub fn gronwall_envelope(traj: &Trajectory, s: f64) -> Result<GronwallEnvelope, EstimateError> {
    let f = Functionals::of(traj);
    let psi: Vec<f64> = (0..traj.len()).map(|k| f.psi_at(k, 0.0)).collect();
    GronwallEnvelope::fit(&f.times, &psi, &f.column(|n| n.linf), s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{Scenario, ScenarioKind};
    use crate::spectral::{norm_hs, Grid, ScalarField, VectorField2};

    fn grid() -> Grid {
        Grid::new(32).unwrap()
    }

    fn zero_traj(len: usize) -> Trajectory {
        let g = grid();
        let states = (0..len)
            .map(|k| State {
                t: k as f64 * 0.1,
                rho: ScalarField::constant(g, 1.0),
                u: VectorField2::zeros(g),
                b: VectorField2::zeros(g),
            })
            .collect();
        Trajectory::new(states, 0.1).unwrap()
    }

    /// `B(t) = e^{−t} B₀`, `u = 0` over a vacuum bubble.
    fn rest_traj(len: usize, h: f64) -> Trajectory {
        let s0 = Scenario::new(ScenarioKind::MhdRest).initial_state(grid()).unwrap();
        let states = (0..len)
            .map(|k| {
                let t = k as f64 * h;
                State {
                    t,
                    b: s0.b.scale((-t).exp()),
                    ..s0.clone()
                }
            })
            .collect();
        Trajectory::new(states, h).unwrap()
    }

    fn tg_traj(len: usize, h: f64) -> Trajectory {
        let s0 = Scenario::new(ScenarioKind::TaylorGreen).initial_state(grid()).unwrap();
        let states = (0..len)
            .map(|k| {
                let t = k as f64 * h;
                State {
                    t,
                    u: s0.u.scale((-2.0 * t).exp()),
                    ..s0.clone()
                }
            })
            .collect();
        Trajectory::new(states, h).unwrap()
    }

    #[test]
    fn zero_trajectory() {
        let z = zero_traj(5);
        let e = energy_report(&z);
        assert!(e.e_kin.iter().chain(&e.diss_u).all(|&v| v == 0.0));
        assert_eq!(energy_identity_defect(&z).unwrap().max_defect(), 0.0);
        let want_phi = (2.0 * PI).powi(2);
        assert!((phi(&z, 0.4).unwrap() - want_phi).abs() < 1e-10);
        assert_eq!(psi(&z, 0.3).unwrap(), E);
        assert_eq!(serrin_integral(&z, f64::INFINITY, 2.0).unwrap(), 0.0);
        let fl = first_level_identity_defect(&z).unwrap();
        assert_eq!(fl.momentum.max_defect() + fl.induction.max_defect(), 0.0);
        let g = gronwall_envelope(&z, 0.0).unwrap();
        assert_eq!(g.c_fit, 0.0);
        assert!(g.psi.iter().zip(&g.envelope).all(|(p, e)| p == e));
        assert!(density_max_principle(&z).passed);
    }

    #[test]
    fn taylor_green_energy_values() {
        let e = energy_report(&tg_traj(3, 0.01));
        assert!((e.e_kin[0] - PI * PI).abs() < 1e-12);
        assert!((e.diss_u[0] - 4.0 * PI * PI).abs() < 1e-10);
        let r = energy_report(&rest_traj(3, 0.01));
        assert!((r.e_mag[0] - PI * PI).abs() < 1e-12);
        assert!((r.diss_b[0] - 2.0 * PI * PI).abs() < 1e-10);
    }

    #[test]
    fn exact_decay_balances_energy() {
        let d = energy_identity_defect(&tg_traj(101, 0.005)).unwrap();
        // trapezoid error only
        assert!(d.max_defect() < 1e-3, "{}", d.max_defect());
        assert!(energy_identity_defect(&tg_traj(2, 0.1)).is_err());
    }

    #[test]
    fn psi_of_rest_matches_closed_form() {
        let h = 0.01;
        let traj = rest_traj(51, h);
        let b0 = &traj.states()[0].b;
        let h1 = norm_hs(b0, 1.0).unwrap().powi(2);
        let l2 = b0.inner(b0);
        for t in [0.0f64, 0.1, 0.25, 0.5] {
            let want = E + h1 + l2 * (1.0 - (-2.0 * t).exp()) / 2.0;
            let got = psi(&traj, t).unwrap();
            assert!((got - want).abs() < 1e-3 * want, "t = {t}: {got} vs {want}");
        }
        assert!(psi(&traj, 0.6).is_err());
    }

    #[test]
    fn phi_of_rest_matches_closed_form() {
        let h = 0.01;
        let traj = rest_traj(51, h);
        let s0 = &traj.states()[0];
        let hs = |f: &VectorField2, s| norm_hs(f, s).unwrap().powi(2);
        let rho_h2 = norm_hs(&s0.rho, 2.0).unwrap().powi(2);
        // single mode |k| = 1: ‖B‖²_{H^s} = 2^s ‖B₀‖² e^{−2t}; B_t = −B
        let l2 = s0.b.inner(&s0.b);
        let t: f64 = 0.5;
        let decay = (1.0 - (-2.0 * t).exp()) / 2.0;
        let want = rho_h2 + hs(&s0.b, 2.0) + 8.0 * l2 * decay + 2.0 * l2 * decay;
        let got = phi(&traj, t).unwrap();
        assert!((got - want).abs() < 1e-3 * want, "{got} vs {want}");
    }

    #[test]
    fn functionals_are_monotone() {
        let traj = tg_traj(30, 0.02);
        for w in phi_series(&traj).windows(2).chain(psi_series(&traj).windows(2)) {
            assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn serrin_of_taylor_green() {
        let h = 0.005;
        let traj = tg_traj(201, h);
        let t: f64 = 1.0;
        let want = (1.0 - (-4.0 * t).exp()) / 4.0;
        let got = serrin_integral(&traj, f64::INFINITY, 2.0).unwrap();
        assert!((got - want).abs() < 1e-3 * want, "{got} vs {want}");
        assert!(serrin_integral(&traj, 4.0, 3.0).is_err());
        assert!(serrin_integral(&traj, 4.0, 4.0).is_ok());
    }

    #[test]
    fn rest_induction_identity_is_second_order() {
        let mut defects = Vec::new();
        for h in [0.02, 0.01] {
            let d = first_level_identity_defect(&rest_traj(11, h)).unwrap();
            assert_eq!(d.momentum.max_defect(), 0.0);
            defects.push(d.induction.max_defect());
        }
        let ratio = defects[0] / defects[1];
        assert!((ratio - 4.0).abs() < 0.2, "{defects:?}");
    }

    #[test]
    fn gronwall_envelope_dominates() {
        // Ψ grows through ∫‖B_t‖² while the L∞ integral stays positive
        let traj = rest_traj(21, 0.05);
        let g = gronwall_envelope(&traj, 0.1).unwrap();
        assert!(g.c_fit > 0.0 && g.c_fit.is_finite());
        for (p, e) in g.psi.iter().zip(&g.envelope) {
            assert!(e * (1.0 + 1e-12) >= *p);
        }
        for w in g.envelope.windows(2) {
            assert!(w[1] >= w[0]);
        }
        assert!(gronwall_envelope(&traj, 5.0).is_err());
    }

    #[test]
    fn density_report_flags_excursions() {
        let r = DensityReport::from_bounds(&[0.0, 0.0, -1e-15], &[1.0, 0.99, 0.98]);
        assert!(!r.passed);
        assert_eq!(r.worst_excursion, 1e-15);
        let r = DensityReport::from_bounds(&[0.0, 0.0], &[1.0, 0.97]);
        assert!(r.passed);
        assert!((r.max_decay_percent - 3.0).abs() < 1e-12);
    }
}
