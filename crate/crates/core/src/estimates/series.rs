use std::io::{BufRead, Write};

use crate::solver::State;
use crate::spectral::{divergence_spectrum, forward_pair, inverse_pair, Spectrum, VectorField2};

use super::{time_derivative, EstimateError, Trajectory};

/// Column names of the per-step series, in file order.
pub const COLUMNS: [&str; 21] = [
    "t",
    "e_kin",
    "e_mag",
    "diss_u",
    "diss_B",
    "rho_min",
    "rho_max",
    "rho_mass",
    "u_L2",
    "u_Linf",
    "B_Linf",
    "u_H1",
    "B_H1",
    "u_H2",
    "B_H2",
    "u_H3",
    "B_H3",
    "sqrt_rho_ut_L2",
    "Bt_L2",
    "div_u_max",
    "div_B_max",
];

/// Named time series, one row per step.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct EstimateSeries {
    rows: Vec<[f64; 21]>,
}

fn column_index(name: &str) -> Result<usize, EstimateError> {
    COLUMNS
        .iter()
        .position(|c| *c == name)
        .ok_or_else(|| EstimateError::UnknownColumn(name.to_string()))
}

impl EstimateSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rows(&self) -> &[[f64; 21]] {
        &self.rows
    }

    /// Rows with `t ≤ t_max` (up to a relative slack of 1e-9).
    pub fn until(&self, t_max: f64) -> Self {
        let cut = t_max + 1e-9 * t_max.abs().max(1.0);
        Self {
            rows: self.rows.iter().take_while(|r| r[0] <= cut).copied().collect(),
        }
    }

    pub fn push_row(&mut self, row: [f64; 21]) {
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>, EstimateError> {
        let i = column_index(name)?;
        Ok(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn value(&self, name: &str, row: usize) -> Result<f64, EstimateError> {
        Ok(self.rows[row][column_index(name)?])
    }

    /// Header line, then one row per step with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", COLUMNS.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Parses the format produced by [`EstimateSeries::write_csv`].
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self, EstimateError> {
        let mut lines = r.lines();
        let header = lines
            .next()
            .ok_or_else(|| EstimateError::Parse("missing header".into()))?
            .map_err(|e| EstimateError::Parse(e.to_string()))?;
        let names: Vec<&str> = header.trim().split(',').collect();
        if names != COLUMNS {
            return Err(EstimateError::Parse(format!(
                "header has {} columns, expected the {} documented ones",
                names.len(),
                COLUMNS.len()
            )));
        }
        let mut series = Self::new();
        for (lineno, line) in lines.enumerate() {
            let line = line.map_err(|e| EstimateError::Parse(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let cells: Vec<&str> = line.trim().split(',').collect();
            if cells.len() != COLUMNS.len() {
                return Err(EstimateError::Parse(format!(
                    "row {} has {} columns, expected {}",
                    lineno + 1,
                    cells.len(),
                    COLUMNS.len()
                )));
            }
            let mut row = [0.0; 21];
            for (slot, cell) in row.iter_mut().zip(cells) {
                *slot = cell.parse().map_err(|_| {
                    EstimateError::Parse(format!("row {}: bad number '{cell}'", lineno + 1))
                })?;
            }
            series.push_row(row);
        }
        Ok(series)
    }
}

fn sobolev_sq(sx: &Spectrum, sy: &Spectrum, s: i32) -> f64 {
    let w = |kx: f64, ky: f64| (1.0 + kx * kx + ky * ky).powi(s);
    4.0 * std::f64::consts::PI.powi(2) * (sx.weighted_energy(w) + sy.weighted_energy(w))
}

fn dissipation(sx: &Spectrum, sy: &Spectrum) -> f64 {
    let w = |kx: f64, ky: f64| kx * kx + ky * ky;
    4.0 * std::f64::consts::PI.powi(2) * (sx.weighted_energy(w) + sy.weighted_energy(w))
}

/// One series row for `state` given its time derivatives.
pub(crate) fn state_row(state: &State, ut: &VectorField2, bt: &VectorField2) -> [f64; 21] {
    let (ux, uy) = forward_pair(state.u.x(), state.u.y());
    let (bx, by) = forward_pair(state.b.x(), state.b.y());
    let (div_u, div_b) = inverse_pair(&divergence_spectrum(&ux, &uy), &divergence_spectrum(&bx, &by));
    let u2 = state.u.dot(&state.u);
    let rho = &state.rho;
    let rho_plus = rho.map(|r| r.max(0.0));
    let e_kin = 0.5 * u2.mul(rho).integral();
    let e_mag = 0.5 * state.b.inner(&state.b);
    let sqrt_rho_ut = ut.dot(ut).mul(&rho_plus).integral().sqrt();
    [
        state.t,
        e_kin,
        e_mag,
        dissipation(&ux, &uy),
        dissipation(&bx, &by),
        rho.min(),
        rho.max(),
        rho.integral(),
        u2.integral().sqrt(),
        state.u.max_magnitude(),
        state.b.max_magnitude(),
        sobolev_sq(&ux, &uy, 1).sqrt(),
        sobolev_sq(&bx, &by, 1).sqrt(),
        sobolev_sq(&ux, &uy, 2).sqrt(),
        sobolev_sq(&bx, &by, 2).sqrt(),
        sobolev_sq(&ux, &uy, 3).sqrt(),
        sobolev_sq(&bx, &by, 3).sqrt(),
        sqrt_rho_ut,
        bt.dot(bt).integral().sqrt(),
        div_u.max_abs(),
        div_b.max_abs(),
    ]
}

/// Builds the series from a stream of equally spaced states while holding
/// at most three of them.
pub(crate) struct SeriesBuilder {
    window: Vec<State>,
    pushed: usize,
    h: f64,
    series: EstimateSeries,
}

impl SeriesBuilder {
    pub fn new(h: f64) -> Self {
        Self {
            window: Vec::with_capacity(3),
            pushed: 0,
            h,
            series: EstimateSeries::new(),
        }
    }

    fn emit(&mut self, k: usize) {
        let (ut, bt) = time_derivative(&self.window, k, self.h);
        let row = state_row(&self.window[k], &ut, &bt);
        self.series.push_row(row);
    }

    pub fn push(&mut self, state: State) {
        self.pushed += 1;
        self.window.push(state);
        if self.window.len() > 3 {
            self.window.remove(0);
        }
        match self.pushed {
            0..=2 => {}
            3 => {
                self.emit(0);
                self.emit(1);
            }
            _ => self.emit(1),
        }
    }

    /// Emits the trailing rows. With a single state there is no time
    /// derivative and the series stays empty.
    pub fn finish(mut self) -> EstimateSeries {
        match self.pushed {
            0 | 1 => {}
            2 => {
                self.emit(0);
                self.emit(1);
            }
            _ => self.emit(2),
        }
        self.series
    }
}

impl EstimateSeries {
    /// One row per snapshot, time derivatives taken at the snapshot cadence.
    pub fn from_trajectory(traj: &Trajectory) -> Self {
        let mut b = SeriesBuilder::new(traj.dt_snapshot());
        for s in traj.states() {
            b.push(s.clone());
        }
        b.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{Scenario, ScenarioKind};
    use crate::spectral::{norm_hs, Grid};
    use std::f64::consts::PI;

    fn series_of(states: &[State], h: f64) -> EstimateSeries {
        EstimateSeries::from_trajectory(&Trajectory::new(states.to_vec(), h).unwrap())
    }

    fn decaying(n_states: usize, h: f64) -> Vec<State> {
        let g = Grid::new(32).unwrap();
        let s0 = Scenario::new(ScenarioKind::TaylorGreen).initial_state(g).unwrap();
        (0..n_states)
            .map(|k| {
                let t = k as f64 * h;
                State {
                    t,
                    u: s0.u.scale((-2.0 * t).exp()),
                    ..s0.clone()
                }
            })
            .collect()
    }

    #[test]
    fn builder_matches_direct_stencils() {
        let h = 0.01;
        let states = decaying(6, h);
        let series = series_of(&states, h);
        assert_eq!(series.len(), 6);
        for (k, row) in series.rows().iter().enumerate() {
            let (ut, bt) = time_derivative(&states, k, h);
            assert_eq!(*row, state_row(&states[k], &ut, &bt));
        }
    }

    #[test]
    fn short_streams() {
        assert!(series_of(&decaying(1, 0.1), 0.1).is_empty());
        assert_eq!(series_of(&decaying(2, 0.1), 0.1).len(), 2);
        assert_eq!(series_of(&decaying(3, 0.1), 0.1).len(), 3);
    }

    #[test]
    fn taylor_green_row_values() {
        let states = decaying(3, 1e-3);
        let series = series_of(&states, 1e-3);
        let r = series.rows()[0];
        assert!((r[1] - PI * PI).abs() < 1e-12);
        assert_eq!(r[2], 0.0);
        // ∫|∇u₀|² = 2‖u₀‖² = 4π²
        assert!((r[3] - 4.0 * PI * PI).abs() < 1e-10);
        assert!((r[11] - norm_hs(&states[0].u, 1.0).unwrap()).abs() < 1e-10);
        assert!((r[15] - norm_hs(&states[0].u, 3.0).unwrap()).abs() < 1e-9);
        // ‖u_t‖ ≈ 2‖u₀‖ with a second-order one-sided stencil
        let want = 2.0 * (2.0 * PI * PI).sqrt();
        assert!((r[17] - want).abs() < 1e-4 * want);
    }

    #[test]
    fn csv_round_trip_and_format() {
        let series = series_of(&decaying(4, 0.05), 0.05);
        let text = series.to_csv_string();
        let header = text.lines().next().unwrap();
        assert_eq!(header, COLUMNS.join(","));
        let first = text.lines().nth(1).unwrap().split(',').next().unwrap();
        assert_eq!(first, "0.0000000000000000e0");
        let back = EstimateSeries::read_csv(text.as_bytes()).unwrap();
        assert_eq!(back, series);
    }

    #[test]
    fn csv_rejects_column_mismatch() {
        let bad = format!("{}\n1,2,3\n", COLUMNS.join(","));
        assert!(EstimateSeries::read_csv(bad.as_bytes()).is_err());
        assert!(EstimateSeries::read_csv("t,e_kin\n".as_bytes()).is_err());
        let empty = EstimateSeries::read_csv(format!("{}\n", COLUMNS.join(",")).as_bytes()).unwrap();
        assert!(empty.is_empty());
    }
}
