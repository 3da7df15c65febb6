//! Declarative run description and its flat `key=value` file format.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScenarioKind {
    TestParticle,
    TwoStream,
    Landau,
    Convergence,
    ErrorScaling,
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ScenarioKind::TestParticle => "test_particle",
            ScenarioKind::TwoStream => "two_stream",
            ScenarioKind::Landau => "landau",
            ScenarioKind::Convergence => "convergence",
            ScenarioKind::ErrorScaling => "error_scaling",
        };
        f.write_str(name)
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "test_particle" => Ok(ScenarioKind::TestParticle),
            "two_stream" => Ok(ScenarioKind::TwoStream),
            "landau" => Ok(ScenarioKind::Landau),
            "convergence" => Ok(ScenarioKind::Convergence),
            "error_scaling" => Ok(ScenarioKind::ErrorScaling),
            other => Err(Error::config(format!(
                "unknown scenario '{other}' (expected test_particle, two_stream, landau, \
                 convergence, or error_scaling)"
            ))),
        }
    }
}

/// Full run description; every field maps 1:1 onto a config-file key.
#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub length: f64,
    pub n_elements: usize,
    pub degree: usize,
    pub dt: f64,
    pub n_steps: usize,
    pub n_markers: usize,
    /// 0 runs pure PIC (markers pushed directly, zero dipole block).
    pub n_clusters: usize,
    pub seed: u64,
    pub fit_start: f64,
    pub fit_end: f64,
    pub oracle_n_q: usize,
    pub oracle_n_p: usize,
    pub oracle_p_max: f64,
    pub out_dir: PathBuf,
    /// Beam temperature of the two-stream setup.
    pub temperature: f64,
    /// Density perturbation amplitude of the Landau setup.
    pub perturb_amplitude: f64,
    /// Amplitude of the prescribed potential in the test-particle setup.
    pub potential_amplitude: f64,
    pub snapshot_times: Vec<f64>,
}

impl ScenarioConfig {
    /// Benchmark presets.
    pub fn preset(kind: ScenarioKind) -> Self {
        let base = ScenarioConfig {
            scenario: kind,
            length: 1.0,
            n_elements: 32,
            degree: 1,
            dt: 0.01,
            n_steps: 100,
            n_markers: 1000,
            n_clusters: 0,
            seed: 1,
            fit_start: 0.0,
            fit_end: 0.0,
            oracle_n_q: 256,
            oracle_n_p: 512,
            oracle_p_max: 6.0,
            out_dir: PathBuf::from("out"),
            temperature: 0.09,
            perturb_amplitude: 0.5,
            potential_amplitude: 1.0,
            snapshot_times: Vec::new(),
        };
        match kind {
            ScenarioKind::TestParticle => ScenarioConfig {
                length: 10.0,
                n_elements: 16,
                dt: 2e-3,
                n_steps: 5000,
                n_markers: 30,
                n_clusters: 3,
                snapshot_times: vec![0.0, 10.0],
                ..base
            },
            ScenarioKind::TwoStream => ScenarioConfig {
                length: std::f64::consts::TAU,
                n_elements: 50,
                dt: 0.01,
                n_steps: 1000,
                n_markers: 100_000,
                n_clusters: 10_000,
                fit_start: 2.0,
                fit_end: 6.0,
                oracle_p_max: 6.0,
                snapshot_times: vec![0.0, 5.0, 10.0],
                ..base
            },
            ScenarioKind::Landau => ScenarioConfig {
                length: 12.0,
                n_elements: 100,
                dt: 0.2,
                n_steps: 500,
                n_markers: 100_000,
                n_clusters: 10_000,
                fit_start: 0.0,
                fit_end: 20.0,
                oracle_p_max: 8.0,
                snapshot_times: vec![0.0, 25.0],
                ..base
            },
            ScenarioKind::Convergence => ScenarioConfig {
                length: 1.0,
                n_elements: 16,
                ..base
            },
            ScenarioKind::ErrorScaling => ScenarioConfig {
                length: 12.0,
                n_elements: 100,
                dt: 0.2,
                n_steps: 50, // compare fields at t = 10
                n_markers: 100_000,
                n_clusters: 10_000,
                oracle_p_max: 8.0,
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.length > 0.0) {
            return Err(Error::config("length must be positive"));
        }
        if !(self.dt > 0.0) {
            return Err(Error::config("dt must be positive"));
        }
        if self.n_steps == 0 {
            return Err(Error::config("n_steps must be at least 1"));
        }
        if self.n_markers == 0 {
            return Err(Error::config("n_markers must be at least 1"));
        }
        if self.n_clusters > self.n_markers {
            return Err(Error::config("n_clusters cannot exceed n_markers"));
        }
        if !(1..=3).contains(&self.degree) {
            return Err(Error::config("degree must be 1, 2, or 3"));
        }
        let t_end = self.dt * self.n_steps as f64;
        if self.fit_start < 0.0 || self.fit_end > t_end + 1e-12 || self.fit_start > self.fit_end {
            return Err(Error::config(format!(
                "fit window [{}, {}] must lie inside [0, {t_end}]",
                self.fit_start, self.fit_end
            )));
        }
        Ok(())
    }

    /// Parses the flat `key=value` format. The `scenario` key selects the
    /// preset supplying defaults; all other keys override it. Unknown keys
    /// are errors.
    pub fn from_ini(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split(['#', ';']).next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::config(format!(
                    "line {}: expected key=value, got '{line}'",
                    lineno + 1
                )));
            };
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        let scenario = pairs
            .iter()
            .find(|(k, _)| k == "scenario")
            .ok_or_else(|| Error::config("config must set 'scenario'"))?
            .1
            .parse::<ScenarioKind>()?;
        let mut config = ScenarioConfig::preset(scenario);
        for (key, value) in &pairs {
            if key != "scenario" {
                config.set_key(key, value)?;
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_ini(&text)
    }

    /// Applies one `key=value` override.
    pub fn set_key(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, value: &str) -> Result<T>
        where
            T::Err: fmt::Display,
        {
            value.parse::<T>().map_err(|e| {
                Error::config(format!("key '{key}': cannot parse '{value}': {e}"))
            })
        }
        match key {
            "scenario" => self.scenario = value.parse()?,
            "length" => self.length = num(key, value)?,
            "n_elements" => self.n_elements = num(key, value)?,
            "degree" => self.degree = num(key, value)?,
            "dt" => self.dt = num(key, value)?,
            "n_steps" => self.n_steps = num(key, value)?,
            "n_markers" => self.n_markers = num(key, value)?,
            "n_clusters" => self.n_clusters = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "fit_start" => self.fit_start = num(key, value)?,
            "fit_end" => self.fit_end = num(key, value)?,
            "oracle_n_q" => self.oracle_n_q = num(key, value)?,
            "oracle_n_p" => self.oracle_n_p = num(key, value)?,
            "oracle_p_max" => self.oracle_p_max = num(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            "temperature" => self.temperature = num(key, value)?,
            "perturb_amplitude" => self.perturb_amplitude = num(key, value)?,
            "potential_amplitude" => self.potential_amplitude = num(key, value)?,
            "snapshot_times" => {
                self.snapshot_times = value
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| num::<f64>(key, s.trim()))
                    .collect::<Result<Vec<f64>>>()?;
            }
            other => {
                return Err(Error::config(format!("unknown config key '{other}'")));
            }
        }
        Ok(())
    }

    pub fn t_end(&self) -> f64 {
        self.dt * self.n_steps as f64
    }
}
