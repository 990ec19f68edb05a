//! Run configuration: TOML file, then `key=value` overrides, then flags.

use std::fmt;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use nucsl::csl::{CollapseParams, DampingMode};
use nucsl::dp::Cutoff;
use nucsl::neutrino::{Flight, Kinematics, Mixing, NeutrinoModel, Scenario, Source};

/// A rejected configuration value and the dotted key it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: String,
    pub message: String,
}

impl ConfigError {
    pub fn new(key: impl Into<String>, message: impl fmt::Display) -> Self {
        Self {
            key: key.into(),
            message: message.to_string(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.key.is_empty() {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.key, self.message)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    #[default]
    Energy,
    Time,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub mode: DampingMode,
    pub seed: u64,
    pub collapse: CollapseConfig,
    pub model: ModelConfig,
    pub scenario: ScenarioConfig,
    pub output: OutputConfig,
    pub scan: ScanConfig,
    pub dp: DpConfig,
    pub montecarlo: MonteCarloConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CollapseConfig {
    /// `adler` or `grw`; explicit fields below override it.
    pub preset: String,
    /// cm^3/s
    pub gamma: Option<f64>,
    /// cm
    pub r_c: Option<f64>,
    /// eV
    pub m0c2: Option<f64>,
}

impl Default for CollapseConfig {
    fn default() -> Self {
        Self {
            preset: "adler".into(),
            gamma: None,
            r_c: None,
            m0c2: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    /// `m_k^2 - m_0^2` for `k = 1..n`, eV^2; sets the number of flavors.
    pub delta_m2: Vec<f64>,
    /// eV
    pub lightest_mass: f64,
    /// Rotation angles in lexicographic pair order. Defaults to maximal
    /// mixing for two flavors.
    pub angles: Option<Vec<f64>>,
    /// Explicit real mixing matrix, rows are flavors.
    pub mixing: Option<Vec<Vec<f64>>>,
    /// Decay widths, eV.
    pub widths: Option<Vec<f64>>,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            delta_m2: vec![nucsl::neutrino::DEFAULT_DELTA_M2_EV2],
            lightest_mass: 0.0,
            angles: None,
            mixing: None,
            widths: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    /// Preset energy and flight time; defaults to cosmogenic.
    pub source: Option<Source>,
    /// eV
    pub energy: Option<f64>,
    /// `p c`, eV
    pub momentum: Option<f64>,
    /// s
    pub time: Option<f64>,
    /// cm
    pub baseline: Option<f64>,
    pub flavor: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub format: Format,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub axis: Axis,
    /// Explicit grid; otherwise `points` log-spaced values from `start` to `stop`.
    pub grid: Option<Vec<f64>>,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            axis: Axis::Energy,
            grid: None,
            start: 1e6,
            stop: 1e19,
            points: 14,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DpConfig {
    /// Lightest masses to evaluate, eV; otherwise a log grid `m_min..m_max`.
    pub masses: Option<Vec<f64>>,
    pub m_min: f64,
    pub m_max: f64,
    pub points: usize,
    /// eV
    pub energy: f64,
    /// m
    pub distance: f64,
    pub cutoff: Cutoff,
}

impl Default for DpConfig {
    fn default() -> Self {
        Self {
            masses: None,
            m_min: 0.05,
            m_max: 2.2,
            points: 12,
            energy: 1e19,
            distance: 1e25,
            cutoff: Cutoff::FermiLength,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MonteCarloConfig {
    pub n_paths: usize,
    /// s
    pub dt: f64,
    /// s
    pub t_max: f64,
    /// Relative decay rate of the synthetic pair, 1/s.
    pub rate: f64,
    /// Relative angular frequency of the synthetic pair, 1/s.
    pub omega_diff: f64,
    /// Use amplitudes from the collapse parameters and model instead.
    pub physical: bool,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        Self {
            n_paths: 10_000,
            dt: 0.1,
            t_max: 10.0,
            rate: 0.1,
            omega_diff: 0.0,
            physical: false,
        }
    }
}

/// Parses `value` as a TOML value, falling back to a bare string.
fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}

/// Applies `a.b.c=value` to `table`, creating intermediate tables.
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<(), ConfigError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::new(assignment, "override must have the form key=value"))?;
    let key = key.trim();
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(ConfigError::new(key, "empty key segment"));
    }
    let mut cur = table;
    for (i, part) in parts[..parts.len() - 1].iter().enumerate() {
        let entry = cur
            .entry(part.to_string())
            .or_insert_with(|| Value::Table(Table::new()));
        cur = match entry {
            Value::Table(t) => t,
            _ => {
                return Err(ConfigError::new(
                    parts[..=i].join("."),
                    "is not a table, cannot set a sub-key",
                ))
            }
        };
    }
    cur.insert(parts[parts.len() - 1].to_string(), parse_value(raw.trim()));
    Ok(())
}

pub fn parse_table(text: &str, origin: &str) -> Result<Table, ConfigError> {
    text.parse::<Table>()
        .map_err(|e| ConfigError::new("", format!("{origin}: {e}")))
}

pub fn read_table(path: &Path) -> Result<Table, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("", format!("cannot read {}: {e}", path.display())))?;
    parse_table(&text, &path.display().to_string())
}

/// Deserializes the merged table, reporting the dotted path of a bad key.
pub fn from_table(table: Table) -> Result<RunConfig, ConfigError> {
    serde_path_to_error::deserialize(Value::Table(table)).map_err(|e| {
        let path = e.path().to_string();
        let key = if path == "." { String::new() } else { path };
        // The toml error repeats the location on trailing lines.
        let inner = e.into_inner().to_string();
        ConfigError::new(key, inner.lines().next().unwrap_or_default().trim())
    })
}

fn log_grid(start: f64, stop: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![start];
    }
    let ratio = stop / start;
    (0..points)
        .map(|i| start * ratio.powf(i as f64 / (points - 1) as f64))
        .collect()
}

fn check_grid(key: &str, grid: &[f64]) -> Result<(), ConfigError> {
    if grid.is_empty() {
        return Err(ConfigError::new(key, "grid is empty"));
    }
    if let Some(x) = grid.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(ConfigError::new(
            key,
            format!("grid values must be positive, got {x}"),
        ));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(ConfigError::new(key, "grid must be strictly increasing"));
    }
    Ok(())
}

fn positive(key: &str, x: f64) -> Result<f64, ConfigError> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(ConfigError::new(
            key,
            format!("must be finite and > 0, got {x}"),
        ))
    }
}

impl RunConfig {
    pub fn collapse_params(&self) -> Result<CollapseParams, ConfigError> {
        let c = &self.collapse;
        let base = CollapseParams::preset(&c.preset).ok_or_else(|| {
            ConfigError::new(
                "collapse.preset",
                format!("unknown preset `{}` (expected adler or grw)", c.preset),
            )
        })?;
        let gamma = c.gamma.unwrap_or(base.gamma);
        let r_c = c.r_c.unwrap_or(base.r_c);
        let m0c2 = c.m0c2.unwrap_or(base.m0c2);
        CollapseParams::new(gamma, r_c, m0c2).map_err(|e| {
            let key = match &e {
                nucsl::Error::InvalidArgument { name, .. } => format!("collapse.{name}"),
                _ => "collapse".into(),
            };
            ConfigError::new(key, e)
        })
    }

    pub fn neutrino_model(&self) -> Result<NeutrinoModel, ConfigError> {
        let m = &self.model;
        let n = m.delta_m2.len() + 1;
        let mixing = match (&m.mixing, &m.angles) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::new(
                    "model.mixing",
                    "give either model.mixing or model.angles, not both",
                ))
            }
            (Some(rows), None) => {
                Mixing::from_rows(rows).map_err(|e| ConfigError::new("model.mixing", e))?
            }
            (None, Some(angles)) => {
                Mixing::from_angles(n, angles).map_err(|e| ConfigError::new("model.angles", e))?
            }
            (None, None) if n == 2 => Mixing::two_flavor(std::f64::consts::FRAC_PI_4),
            (None, None) => {
                return Err(ConfigError::new(
                    "model.angles",
                    format!("required for {n} flavors"),
                ))
            }
        };
        if mixing.dim() != n {
            return Err(ConfigError::new(
                "model.mixing",
                format!(
                    "{}x{} matrix for {n} mass eigenstates",
                    mixing.dim(),
                    mixing.dim()
                ),
            ));
        }
        let model = NeutrinoModel::from_splittings(m.lightest_mass, &m.delta_m2, mixing)
            .map_err(|e| ConfigError::new("model.delta_m2", e))?;
        match &m.widths {
            Some(w) => model
                .with_widths(w.clone())
                .map_err(|e| ConfigError::new("model.widths", e)),
            None => Ok(model),
        }
    }

    pub fn scenario(&self) -> Result<Scenario, ConfigError> {
        let s = &self.scenario;
        let source = s.source.unwrap_or(Source::Cosmogenic);
        let kinematics = match (s.energy, s.momentum) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::new(
                    "scenario.momentum",
                    "give either scenario.energy or scenario.momentum, not both",
                ))
            }
            (Some(e), None) => Kinematics::Energy(positive("scenario.energy", e)?),
            (None, Some(p)) => Kinematics::Momentum(positive("scenario.momentum", p)?),
            (None, None) => Kinematics::Energy(source.energy()),
        };
        let flight = match (s.time, s.baseline) {
            (Some(_), Some(_)) => {
                return Err(ConfigError::new(
                    "scenario.baseline",
                    "give either scenario.time or scenario.baseline, not both",
                ))
            }
            (Some(t), None) => Flight::Time(t),
            (None, Some(l)) => Flight::Baseline(l),
            (None, None) => Flight::Time(source.flight_time()),
        };
        let key = if s.baseline.is_some() {
            "scenario.baseline"
        } else {
            "scenario.time"
        };
        let scenario =
            Scenario::new(kinematics, flight, s.flavor).map_err(|e| ConfigError::new(key, e))?;
        if s.flavor > self.model.delta_m2.len() {
            return Err(ConfigError::new(
                "scenario.flavor",
                format!(
                    "flavor {} out of range for {} flavors",
                    s.flavor,
                    self.model.delta_m2.len() + 1
                ),
            ));
        }
        Ok(scenario)
    }

    pub fn scan_grid(&self) -> Result<Vec<f64>, ConfigError> {
        let s = &self.scan;
        let grid = match &s.grid {
            Some(g) => g.clone(),
            None => {
                positive("scan.start", s.start)?;
                positive("scan.stop", s.stop)?;
                if s.points == 0 {
                    return Err(ConfigError::new("scan.points", "grid is empty"));
                }
                log_grid(s.start, s.stop, s.points)
            }
        };
        let key = if s.grid.is_some() {
            "scan.grid"
        } else {
            "scan.stop"
        };
        check_grid(key, &grid)?;
        Ok(grid)
    }

    pub fn dp_masses(&self) -> Result<Vec<f64>, ConfigError> {
        let d = &self.dp;
        positive("dp.energy", d.energy)?;
        if !(d.distance.is_finite() && d.distance >= 0.0) {
            return Err(ConfigError::new("dp.distance", "must be finite and >= 0"));
        }
        let masses = match &d.masses {
            Some(m) => m.clone(),
            None => {
                positive("dp.m_min", d.m_min)?;
                positive("dp.m_max", d.m_max)?;
                if d.points == 0 {
                    return Err(ConfigError::new("dp.points", "grid is empty"));
                }
                log_grid(d.m_min, d.m_max, d.points)
            }
        };
        let key = if d.masses.is_some() {
            "dp.masses"
        } else {
            "dp.m_max"
        };
        check_grid(key, &masses)?;
        Ok(masses)
    }

    pub fn validate_montecarlo(&self) -> Result<(), ConfigError> {
        let m = &self.montecarlo;
        if m.n_paths == 0 {
            return Err(ConfigError::new(
                "montecarlo.n_paths",
                "need at least one path",
            ));
        }
        positive("montecarlo.dt", m.dt)?;
        positive("montecarlo.t_max", m.t_max)?;
        if m.dt > m.t_max {
            return Err(ConfigError::new(
                "montecarlo.dt",
                "must not exceed montecarlo.t_max",
            ));
        }
        if !(m.rate.is_finite() && m.rate >= 0.0) {
            return Err(ConfigError::new(
                "montecarlo.rate",
                "must be finite and >= 0",
            ));
        }
        if !m.omega_diff.is_finite() {
            return Err(ConfigError::new("montecarlo.omega_diff", "must be finite"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str, overrides: &[&str]) -> Result<RunConfig, ConfigError> {
        let mut t = parse_table(text, "test")?;
        for o in overrides {
            apply_override(&mut t, o)?;
        }
        from_table(t)
    }

    #[test]
    fn empty_is_default() {
        assert_eq!(load("", &[]).unwrap(), RunConfig::default());
    }

    #[test]
    fn unknown_key_reports_path() {
        let err = load("[collapse]\ngamm = 1.0\n", &[]).unwrap_err();
        assert!(err.to_string().contains("gamm"), "{err}");
        let err = load("[model]\ndelta_m2 = [1e-4, \"x\"]\n", &[]).unwrap_err();
        assert_eq!(err.key, "model.delta_m2[1]");
    }

    #[test]
    fn overrides_beat_file() {
        let c = load(
            "[collapse]\ngamma = 1e-20\n",
            &["collapse.gamma=1e-25", "mode=\"linear\""],
        )
        .unwrap();
        assert_eq!(c.collapse.gamma, Some(1e-25));
        assert_eq!(c.mode, DampingMode::Linear);
        let c = load("", &["scenario.source=solar", "output.format=json"]).unwrap();
        assert_eq!(c.scenario.source, Some(Source::Solar));
        assert_eq!(c.output.format, Format::Json);
    }

    #[test]
    fn bad_override() {
        assert!(load("", &["collapse"]).is_err());
        assert!(load("", &["collapse..gamma=1"]).is_err());
        assert!(load("", &["seed.x=1"]).is_err());
    }

    #[test]
    fn scenario_resolution() {
        let c = load("", &[]).unwrap();
        let s = c.scenario().unwrap();
        assert_eq!(s.momentum_c(), 1e19);
        assert_eq!(s.time(), 3.15e18);
        let c = load("[scenario]\nenergy = 1e6\nmomentum = 1e6\n", &[]).unwrap();
        assert_eq!(c.scenario().unwrap_err().key, "scenario.momentum");
        let c = load("[scenario]\nflavor = 2\n", &[]).unwrap();
        assert_eq!(c.scenario().unwrap_err().key, "scenario.flavor");
    }

    #[test]
    fn model_resolution() {
        let c = load("", &[]).unwrap();
        assert_eq!(c.neutrino_model().unwrap().n(), 2);
        let c = load("[model]\ndelta_m2 = [7.59e-5, 2.4e-3]\n", &[]).unwrap();
        assert_eq!(c.neutrino_model().unwrap_err().key, "model.angles");
        let c = load("[model]\nmixing = [[1.0, 0.1], [0.0, 1.0]]\n", &[]).unwrap();
        assert_eq!(c.neutrino_model().unwrap_err().key, "model.mixing");
    }

    #[test]
    fn grids() {
        let c = load("[scan]\ngrid = []\n", &[]).unwrap();
        assert_eq!(c.scan_grid().unwrap_err().key, "scan.grid");
        let c = load("[scan]\ngrid = [2.0, 1.0]\n", &[]).unwrap();
        assert!(c.scan_grid().is_err());
        let c = load("[scan]\nstart = 1.0\nstop = 100.0\npoints = 3\n", &[]).unwrap();
        let g = c.scan_grid().unwrap();
        assert_eq!(g.len(), 3);
        assert!((g[1] - 10.0).abs() < 1e-12);
    }

    #[test]
    fn unknown_preset() {
        let c = load("[collapse]\npreset = \"foo\"\n", &[]).unwrap();
        assert_eq!(c.collapse_params().unwrap_err().key, "collapse.preset");
        let c = load("[collapse]\npreset = \"GRW\"\n", &[]).unwrap();
        assert_eq!(c.collapse_params().unwrap(), CollapseParams::GRW);
    }
}
