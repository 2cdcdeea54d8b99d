//! Scenario configuration: a single TOML file with one `[mechanism]` block
//! and one block per scenario the file supports. Unknown keys are rejected —
//! a typo must fail loudly, not silently skew a sweep.

use serde::Deserialize;
use std::path::Path;
use thiserror::Error;

use dualtri::redundancy::Objective;
use dualtri::segment::DEFAULT_Q_MAX;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    /// TOML syntax or schema violation; the message carries line/column.
    #[error("{0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// Top-level configuration file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mechanism: MechanismConfig,
    #[serde(default)]
    pub output: Option<OutputConfig>,
    #[serde(default)]
    pub torque_sweep: Option<TorqueSweepConfig>,
    #[serde(default)]
    pub control_map: Option<ControlMapConfig>,
    #[serde(default)]
    pub reach: Option<ReachConfig>,
    #[serde(default)]
    pub loaded_reach: Option<LoadedReachConfig>,
}

/// Mechanism parameters shared by every scenario. Omitting `b` or `k`
/// selects dimensionless mode: lengths are reported in units of `b` and
/// torques in units of `k*b^2`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MechanismConfig {
    pub a: f64,
    pub l0: f64,
    pub b: Option<f64>,
    pub k: Option<f64>,
    pub q_max: Option<f64>,
}

impl MechanismConfig {
    pub fn b(&self) -> f64 {
        self.b.unwrap_or(1.0)
    }

    pub fn k(&self) -> f64 {
        self.k.unwrap_or(1.0)
    }

    pub fn q_max(&self) -> f64 {
        self.q_max.unwrap_or(DEFAULT_Q_MAX)
    }

    pub fn dimensionless(&self) -> bool {
        self.b.is_none() || self.k.is_none()
    }

    fn validate(&self) -> Result<(), ConfigError> {
        for (name, value) in [
            ("mechanism.a", self.a),
            ("mechanism.l0", self.l0),
            ("mechanism.b", self.b()),
            ("mechanism.k", self.k()),
            ("mechanism.q_max", self.q_max()),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(invalid(format!("{name} must be positive, got {value}")));
            }
        }
        if self.q_max() >= std::f64::consts::PI {
            return Err(invalid("mechanism.q_max must be below a half turn"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormatName {
    Csv,
    Json,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub path: Option<String>,
    pub format: Option<FormatName>,
}

/// One `(l0, delta)` curve of a torque sweep; `l0` defaults to the
/// mechanism's nominal free length.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCase {
    pub l0: Option<f64>,
    pub delta: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TorqueSweepConfig {
    pub q_start: f64,
    pub q_end: f64,
    pub samples: usize,
    pub cases: Vec<SweepCase>,
}

impl TorqueSweepConfig {
    fn validate(&self, mech: &MechanismConfig) -> Result<(), ConfigError> {
        validate_range("torque_sweep", self.q_start, self.q_end, self.samples)?;
        if self.cases.is_empty() {
            return Err(invalid("torque_sweep.cases must not be empty"));
        }
        for (i, case) in self.cases.iter().enumerate() {
            let l0 = case.l0.unwrap_or(mech.l0);
            if !(l0.is_finite() && l0 >= 0.0) {
                return Err(invalid(format!("torque_sweep.cases[{i}].l0 must be >= 0")));
            }
            if !case.delta.is_finite() || case.delta.abs() > l0 {
                return Err(invalid(format!(
                    "torque_sweep.cases[{i}].delta must satisfy |delta| <= l0"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ControlMapConfig {
    pub q_start: f64,
    pub q_end: f64,
    pub samples: usize,
    /// Optional external joint torque; adds a compensated-offset column.
    pub m_ext: Option<f64>,
}

impl ControlMapConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        validate_range("control_map", self.q_start, self.q_end, self.samples)?;
        if let Some(m) = self.m_ext {
            if !m.is_finite() {
                return Err(invalid("control_map.m_ext must be finite"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveName {
    MinSum,
    MinMax,
    LeastSquares,
}

impl ObjectiveName {
    pub fn to_objective(self) -> Objective {
        match self {
            ObjectiveName::MinSum => Objective::MinSum,
            ObjectiveName::MinMax => Objective::MinMax,
            ObjectiveName::LeastSquares => Objective::LeastSquares,
        }
    }
}

/// Rectangular target grid. Without an explicit `center` the grid is
/// centred on the forward image of the initial configuration, which places
/// the zero-displacement task exactly on a grid node.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub center: Option<[f64; 2]>,
    pub half_extent: [f64; 2],
    pub samples: [usize; 2],
}

impl GridConfig {
    fn validate(&self, section: &str) -> Result<(), ConfigError> {
        for axis in 0..2 {
            if self.samples[axis] < 2 {
                return Err(invalid(format!("{section}.grid.samples must be >= 2")));
            }
            if !(self.half_extent[axis].is_finite() && self.half_extent[axis] > 0.0) {
                return Err(invalid(format!("{section}.grid.half_extent must be > 0")));
            }
        }
        Ok(())
    }

    /// Grid nodes in row-major (y-outer) order, centred on `center`; the
    /// centre node is exact for odd sample counts.
    pub fn nodes(&self, center: [f64; 2]) -> Vec<[f64; 2]> {
        let coords = |axis: usize| -> Vec<f64> {
            let n = self.samples[axis];
            let step = 2.0 * self.half_extent[axis] / (n - 1) as f64;
            let mid = (n - 1) as f64 / 2.0;
            (0..n)
                .map(|i| center[axis] + (i as f64 - mid) * step)
                .collect()
        };
        let xs = coords(0);
        let ys = coords(1);
        let mut nodes = Vec::with_capacity(xs.len() * ys.len());
        for y in &ys {
            for x in &xs {
                nodes.push([*x, *y]);
            }
        }
        nodes
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReachConfig {
    pub q0: [f64; 3],
    pub objective: ObjectiveName,
    pub targets: Option<Vec<[f64; 2]>>,
    pub grid: Option<GridConfig>,
    pub tolerance: Option<f64>,
}

impl ReachConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        validate_reach_shape(
            "reach",
            &self.q0,
            self.targets.as_deref(),
            self.grid.as_ref(),
            self.tolerance,
        )
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadedReachConfig {
    pub q0: [f64; 3],
    pub objective: ObjectiveName,
    pub force: [f64; 2],
    pub m_ext_end: Option<f64>,
    pub targets: Option<Vec<[f64; 2]>>,
    pub grid: Option<GridConfig>,
    pub tolerance: Option<f64>,
}

impl LoadedReachConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        validate_reach_shape(
            "loaded_reach",
            &self.q0,
            self.targets.as_deref(),
            self.grid.as_ref(),
            self.tolerance,
        )?;
        for component in self.force {
            if !component.is_finite() {
                return Err(invalid("loaded_reach.force must be finite"));
            }
        }
        if let Some(m) = self.m_ext_end {
            if !m.is_finite() {
                return Err(invalid("loaded_reach.m_ext_end must be finite"));
            }
        }
        Ok(())
    }
}

fn validate_range(section: &str, start: f64, end: f64, samples: usize) -> Result<(), ConfigError> {
    if !(start.is_finite() && end.is_finite()) {
        return Err(invalid(format!("{section}.q_start/q_end must be finite")));
    }
    if start >= end {
        return Err(invalid(format!(
            "{section}: empty sweep range (q_start {start} >= q_end {end})"
        )));
    }
    if samples < 2 {
        return Err(invalid(format!("{section}.samples must be >= 2")));
    }
    Ok(())
}

fn validate_reach_shape(
    section: &str,
    q0: &[f64; 3],
    targets: Option<&[[f64; 2]]>,
    grid: Option<&GridConfig>,
    tolerance: Option<f64>,
) -> Result<(), ConfigError> {
    if !q0.iter().all(|q| q.is_finite()) {
        return Err(invalid(format!("{section}.q0 must be finite")));
    }
    match (targets, grid) {
        (Some(t), None) => {
            if t.is_empty() {
                return Err(invalid(format!("{section}.targets must not be empty")));
            }
            if !t.iter().flatten().all(|v| v.is_finite()) {
                return Err(invalid(format!("{section}.targets must be finite")));
            }
        }
        (None, Some(g)) => g.validate(section)?,
        (Some(_), Some(_)) => {
            return Err(invalid(format!(
                "{section}: give either `targets` or `grid`, not both"
            )))
        }
        (None, None) => {
            return Err(invalid(format!(
                "{section}: one of `targets` or `grid` is required"
            )))
        }
    }
    if let Some(tol) = tolerance {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(invalid(format!("{section}.tolerance must be > 0")));
        }
    }
    Ok(())
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.mechanism.validate()?;
        if let Some(sweep) = &self.torque_sweep {
            sweep.validate(&self.mechanism)?;
        }
        if let Some(map) = &self.control_map {
            map.validate()?;
        }
        if let Some(reach) = &self.reach {
            reach.validate()?;
        }
        if let Some(loaded) = &self.loaded_reach {
            loaded.validate()?;
        }
        Ok(())
    }

    /// Names of the scenario sections this config provides.
    pub fn configured_scenarios(&self) -> Vec<&'static str> {
        let mut names = Vec::new();
        if self.torque_sweep.is_some() {
            names.push("torque_sweep");
        }
        if self.control_map.is_some() {
            names.push("control_map");
        }
        if self.reach.is_some() {
            names.push("reach");
        }
        if self.loaded_reach.is_some() {
            names.push("loaded_reach");
        }
        names
    }
}

/// Evenly spaced samples on `[start, end]` with exact endpoints; symmetric
/// ranges with odd counts hit the midpoint exactly.
pub fn linspace(start: f64, end: f64, samples: usize) -> Vec<f64> {
    let n = (samples - 1) as f64;
    (0..samples)
        .map(|i| (start * (n - i as f64) + end * i as f64) / n)
        .collect()
}
