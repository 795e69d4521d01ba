//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Fields cross the boundary as row-major `Float64Array`s of length `n²`,
//! row `j` holding `y = 2πj/n`.

use mhd2d::calibration::full_partition;
use mhd2d::lp::{chi, decompose, delta_q, phi, s_q, DyadicPartition};
use mhd2d::solver::{step, Scenario, ScenarioKind, SolverConfig, State};
use mhd2d::spectral::{norm_lp, scalar_curl, Grid, ScalarField};
use wasm_bindgen::prelude::*;

pub const FIELDS: [&str; 8] = ["rho", "ux", "uy", "Bx", "By", "vorticity", "current", "speed"];

/// Plain-Rust core of [`Simulation`], usable off the wasm target.
pub struct Demo {
    state: State,
    cfg: SolverConfig,
    partition: DyadicPartition,
    failure: Option<String>,
}

impl Demo {
    pub fn new(scenario: &str, n: usize, dt: f64, seed: u64) -> Result<Self, String> {
        let kind: ScenarioKind = scenario.parse().map_err(|e| format!("{e}"))?;
        let grid = Grid::new(n).map_err(|e| e.to_string())?;
        let cfg = SolverConfig::with_dt(dt);
        cfg.validate().map_err(|e| e.to_string())?;
        let state = Scenario::new(kind).with_seed(seed).initial_state(grid).map_err(|e| e.to_string())?;
        Ok(Self {
            state,
            cfg,
            partition: full_partition(grid),
            failure: None,
        })
    }

    /// Advances up to `count` steps, stopping at the first solver error.
    pub fn advance(&mut self, count: u32) -> Result<(), String> {
        if let Some(e) = &self.failure {
            return Err(e.clone());
        }
        for _ in 0..count {
            match step(&self.state, &self.cfg) {
                Ok(next) => self.state = next,
                Err(e) => {
                    self.failure = Some(e.to_string());
                    return Err(e.to_string());
                }
            }
        }
        Ok(())
    }

    pub fn state(&self) -> &State {
        &self.state
    }

    pub fn field(&self, name: &str) -> Result<ScalarField, String> {
        let s = &self.state;
        Ok(match name {
            "rho" => s.rho.clone(),
            "ux" => s.u.x().clone(),
            "uy" => s.u.y().clone(),
            "Bx" => s.b.x().clone(),
            "By" => s.b.y().clone(),
            "vorticity" => scalar_curl(&s.u),
            "current" => scalar_curl(&s.b),
            "speed" => s.u.dot(&s.u).map(f64::sqrt),
            _ => return Err(format!("unknown field {name:?}, expected one of {}", FIELDS.join(", "))),
        })
    }

    pub fn energy(&self) -> f64 {
        let s = &self.state;
        0.5 * (s.u.dot(&s.u).mul(&s.rho).integral() + s.b.inner(&s.b))
    }

    /// `Δ_q f`, with `q = q_min` standing for the low part `S_{q_min+1} f`.
    pub fn band(&self, name: &str, q: i32) -> Result<ScalarField, String> {
        let f = self.field(name)?;
        let q_min = self.partition.q_min();
        let block = if q == q_min {
            s_q(&f, &self.partition, q_min + 1)
        } else {
            delta_q(&f, &self.partition, q)
        };
        block.map_err(|e| e.to_string())
    }

    /// L² norms of the low part and of every band, lowest first.
    pub fn band_norms(&self, name: &str) -> Result<Vec<f64>, String> {
        let d = decompose(&self.field(name)?, &self.partition);
        Ok(std::iter::once(&d.low)
            .chain(d.bands.iter().map(|(_, b)| b))
            .map(|b| norm_lp(b, 2.0).unwrap_or(f64::NAN))
            .collect())
    }

    /// Inclusive range accepted by [`Demo::band`].
    pub fn band_range(&self) -> (i32, i32) {
        (self.partition.q_min(), self.partition.q_max())
    }
}

/// Radial partition profiles on `[0, r_max]`, flattened by sample.
///
/// Each sample contributes `r`, the low-pass part `χ(2^{-(q_min+1)} r)`, the
/// rings `φ(2^{-q} r)` for `q = q_min+1..=q_max`, and their sum.
pub fn partition_rows(q_min: i32, q_max: i32, samples: usize, r_max: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..samples {
        let r = r_max * i as f64 / (samples.max(2) - 1) as f64;
        let low = chi(r / 2f64.powi(q_min + 1));
        out.push(r);
        out.push(low);
        let mut sum = low;
        for q in q_min + 1..=q_max {
            let ring = phi(r / 2f64.powi(q));
            out.push(ring);
            sum += ring;
        }
        out.push(sum);
    }
    out
}

fn js_err(e: String) -> JsError {
    JsError::new(&e)
}

#[wasm_bindgen]
pub struct Simulation {
    inner: Demo,
}

#[wasm_bindgen]
impl Simulation {
    #[wasm_bindgen(constructor)]
    pub fn new(scenario: &str, n: usize, dt: f64, seed: u32) -> Result<Simulation, JsError> {
        Demo::new(scenario, n, dt, seed as u64)
            .map(|inner| Simulation { inner })
            .map_err(js_err)
    }

    pub fn step(&mut self, count: u32) -> Result<(), JsError> {
        self.inner.advance(count).map_err(js_err)
    }

    pub fn time(&self) -> f64 {
        self.inner.state().t
    }

    pub fn grid_n(&self) -> usize {
        self.inner.state().rho.grid().n()
    }

    pub fn energy(&self) -> f64 {
        self.inner.energy()
    }

    pub fn mass(&self) -> f64 {
        self.inner.state().rho.integral()
    }

    pub fn field(&self, name: &str) -> Result<Vec<f64>, JsError> {
        self.inner.field(name).map(|f| f.values().to_vec()).map_err(js_err)
    }

    /// The block `Δ_q` of a field.
    pub fn band(&self, name: &str, q: i32) -> Result<Vec<f64>, JsError> {
        self.inner.band(name, q).map(|f| f.values().to_vec()).map_err(js_err)
    }

    pub fn band_norms(&self, name: &str) -> Result<Vec<f64>, JsError> {
        self.inner.band_norms(name).map_err(js_err)
    }

    pub fn q_min(&self) -> i32 {
        self.inner.band_range().0
    }

    pub fn q_max(&self) -> i32 {
        self.inner.band_range().1
    }
}

/// See [`partition_rows`].
#[wasm_bindgen]
pub fn partition_curves(q_min: i32, q_max: i32, samples: usize, r_max: f64) -> Vec<f64> {
    partition_rows(q_min, q_max, samples, r_max)
}
