use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::solver::{Scenario, ScenarioKind, SolverConfig};
use crate::spectral::Grid;

use super::CliError;

/// Run parameters read from a flat `key = value` file.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid_n: usize,
    pub dt: f64,
    pub t_end: f64,
    pub scenario: ScenarioKind,
    pub seed: u64,
    pub eps_rel: f64,
    pub snapshot_every: usize,
    pub output_dir: PathBuf,
}

pub const KEYS: [&str; 8] = [
    "grid_n",
    "dt",
    "t_end",
    "scenario",
    "seed",
    "eps_rel",
    "snapshot_every",
    "output_dir",
];

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid_n: 64,
            dt: 5e-4,
            t_end: 1.0,
            scenario: ScenarioKind::TaylorGreen,
            seed: 0,
            eps_rel: SolverConfig::default().eps_rel,
            snapshot_every: 20,
            output_dir: PathBuf::from("out"),
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    value
        .parse()
        .map_err(|e| CliError::Config(format!("line {line}: bad value for {key} ({value:?}): {e}")))
}

impl RunConfig {
    /// Keys may appear in any order; missing keys keep their defaults, unknown
    /// or repeated keys are errors.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        let mut seen = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| CliError::Config(format!("line {line}: expected `key = value`, got {body:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(CliError::Config(format!(
                    "line {line}: unknown key {key:?}, expected one of {}",
                    KEYS.join(", ")
                )));
            }
            if seen.contains(&key) {
                return Err(CliError::Config(format!("line {line}: {key} given twice")));
            }
            seen.push(key);
            match key {
                "grid_n" => cfg.grid_n = parse_value(key, value, line)?,
                "dt" => cfg.dt = parse_value(key, value, line)?,
                "t_end" => cfg.t_end = parse_value(key, value, line)?,
                "scenario" => {
                    cfg.scenario = value
                        .parse()
                        .map_err(|e| CliError::Config(format!("line {line}: {e}")))?
                }
                "seed" => cfg.seed = parse_value(key, value, line)?,
                "eps_rel" => cfg.eps_rel = parse_value(key, value, line)?,
                "snapshot_every" => cfg.snapshot_every = parse_value(key, value, line)?,
                "output_dir" => cfg.output_dir = PathBuf::from(value),
                _ => unreachable!("key list checked above"),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// `t_end = 0` is accepted and yields the initial state only.
    pub fn validate(&self) -> Result<(), CliError> {
        self.grid()?;
        self.solver()?;
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(CliError::Config(format!("t_end must be finite and ≥ 0, got {}", self.t_end)));
        }
        if self.snapshot_every == 0 {
            return Err(CliError::Config("snapshot_every must be at least 1".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid, CliError> {
        Grid::new(self.grid_n).map_err(|e| CliError::Config(format!("grid_n: {e}")))
    }

    pub fn solver(&self) -> Result<SolverConfig, CliError> {
        let cfg = SolverConfig {
            dt: self.dt,
            eps_rel: self.eps_rel,
            ..SolverConfig::default()
        };
        cfg.validate().map_err(|e| CliError::Config(e.to_string()))?;
        Ok(cfg)
    }

    pub fn scenario(&self) -> Scenario {
        Scenario::new(self.scenario).with_seed(self.seed)
    }

    /// Text that parses back to `self`.
    pub fn to_text(&self) -> String {
        format!(
            "grid_n = {}\ndt = {:e}\nt_end = {:e}\nscenario = {}\nseed = {}\neps_rel = {:e}\nsnapshot_every = {}\noutput_dir = {}\n",
            self.grid_n,
            self.dt,
            self.t_end,
            self.scenario,
            self.seed,
            self.eps_rel,
            self.snapshot_every,
            self.output_dir.display()
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_defaults() {
        let cfg = RunConfig::parse("# reference\ngrid_n = 32\n\nscenario = vacuum_bubble # with B\ndt=1e-3\n").unwrap();
        assert_eq!(cfg.grid_n, 32);
        assert_eq!(cfg.dt, 1e-3);
        assert_eq!(cfg.scenario, ScenarioKind::VacuumBubble);
        assert_eq!(cfg.t_end, RunConfig::default().t_end);
    }

    #[test]
    fn rejects_bad_input() {
        let msg = |t: &str| RunConfig::parse(t).unwrap_err().to_string();
        assert!(msg("colour = red").contains("unknown key"));
        assert!(msg("scenario = taylor").contains("taylor_green"));
        assert!(msg("grid_n = 48").contains("grid_n"));
        assert!(msg("dt = -1").contains("dt"));
        assert!(msg("dt = 1e-3\ndt = 2e-3").contains("twice"));
        assert!(msg("just words").contains("key = value"));
        assert!(msg("snapshot_every = 0").contains("snapshot_every"));
    }

    #[test]
    fn text_round_trip() {
        let cfg = RunConfig {
            scenario: ScenarioKind::RandomSmooth,
            seed: 42,
            t_end: 0.0,
            ..RunConfig::default()
        };
        assert_eq!(RunConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }
}
