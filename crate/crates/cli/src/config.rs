use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tomolens::audit;
use tomolens::decoherence::ChannelKind;
use tomolens::states::{ComplexParam, Family, StateSpec};
use tomolens::tomography::DEFAULT_THETA_SAMPLES;
use tomolens::Complex64;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Tomogram,
    EntropySweep,
    VarianceSweep,
    HigherOrderSweep,
    Rfp,
    BeamsplitterSweep,
    DecoherenceRun,
    OracleAudit,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::Tomogram => "tomogram",
            Scenario::EntropySweep => "entropy_sweep",
            Scenario::VarianceSweep => "variance_sweep",
            Scenario::HigherOrderSweep => "higher_order_sweep",
            Scenario::Rfp => "rfp",
            Scenario::BeamsplitterSweep => "beamsplitter_sweep",
            Scenario::DecoherenceRun => "decoherence_run",
            Scenario::OracleAudit => "oracle_audit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

/// Either an explicit `values` list or `start`, `stop`, `count`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub start: Option<f64>,
    pub stop: Option<f64>,
    pub count: Option<usize>,
    pub values: Option<Vec<f64>>,
    #[serde(default)]
    pub spacing: Spacing,
}

impl Range {
    pub fn expand(&self, field: &str) -> Result<Vec<f64>, CliError> {
        let err = |sub: &str, msg: &str| CliError::Config(format!("field `{field}.{sub}`: {msg}"));
        if let Some(values) = &self.values {
            if self.start.is_some() || self.stop.is_some() || self.count.is_some() {
                return Err(err("values", "give either `values` or `start`/`stop`/`count`, not both"));
            }
            if values.is_empty() {
                return Err(err("values", "empty parameter range"));
            }
            if let Some(v) = values.iter().find(|v| !v.is_finite()) {
                return Err(err("values", &format!("{v} is not finite")));
            }
            return Ok(values.clone());
        }
        let start = self.start.ok_or_else(|| err("start", "missing"))?;
        let stop = self.stop.ok_or_else(|| err("stop", "missing"))?;
        let count = self.count.ok_or_else(|| err("count", "missing"))?;
        if !start.is_finite() {
            return Err(err("start", "must be finite"));
        }
        if !stop.is_finite() {
            return Err(err("stop", "must be finite"));
        }
        if count == 0 {
            return Err(err("count", "empty parameter range (count must be >= 1)"));
        }
        if count > 1 && start == stop {
            return Err(err("stop", "empty parameter range (start == stop with count > 1)"));
        }
        if count == 1 {
            return Ok(vec![start]);
        }
        let step = |i: usize| i as f64 / (count - 1) as f64;
        let last = (count - 1) as f64;
        match self.spacing {
            // rounded to 13 significant digits so decimal grids print as written
            Spacing::Linear => Ok((0..count)
                .map(|i| round_sig((start * (last - i as f64) + stop * i as f64) / last))
                .collect()),
            Spacing::Log => {
                if !(start > 0.0 && stop > 0.0) {
                    return Err(err("start", "log spacing needs start > 0 and stop > 0"));
                }
                let (a, b) = (start.ln(), stop.ln());
                Ok((0..count).map(|i| (a + (b - a) * step(i)).exp()).collect())
            }
        }
    }
}

fn round_sig(x: f64) -> f64 {
    format!("{x:.12e}").parse().unwrap_or(x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub kind: ChannelKind,
    #[serde(default = "unit_rates")]
    pub rates: [f64; 2],
}

fn unit_rates() -> [f64; 2] {
    [1.0, 1.0]
}

/// Tolerance overrides; unset fields keep the library defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub normalization: Option<f64>,
    pub two_mode_normalization: Option<f64>,
    pub oracle: Option<f64>,
    pub two_mode_oracle: Option<f64>,
}

/// Tolerances in force for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub normalization: f64,
    pub two_mode_normalization: f64,
    pub oracle: f64,
    pub two_mode_oracle: f64,
    pub tail_mass: f64,
}

impl ToleranceOverrides {
    fn resolve(&self) -> Result<Tolerances, CliError> {
        let pick = |name: &str, v: Option<f64>, default: f64| match v {
            Some(t) if !(t > 0.0) || !t.is_finite() => Err(CliError::Config(format!(
                "field `tolerances.{name}`: {t} must be a positive number"
            ))),
            Some(t) => Ok(t),
            None => Ok(default),
        };
        Ok(Tolerances {
            normalization: pick("normalization", self.normalization, audit::NORMALIZATION_TOLERANCE)?,
            two_mode_normalization: pick(
                "two_mode_normalization",
                self.two_mode_normalization,
                audit::TWO_MODE_NORMALIZATION_TOLERANCE,
            )?,
            oracle: pick("oracle", self.oracle, audit::ORACLE_TOLERANCE)?,
            two_mode_oracle: pick("two_mode_oracle", self.two_mode_oracle, audit::TWO_MODE_ORACLE_TOLERANCE)?,
            tail_mass: tomolens::TAIL_TOLERANCE,
        })
    }
}

/// The file format: one scenario per TOML file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// Relative paths resolve against the config file's directory.
    pub output_dir: PathBuf,
    #[serde(default)]
    pub states: Vec<StateSpec>,
    /// Sweep of each state's primary parameter (α, ξ, ζ or r).
    pub parameter: Option<Range>,
    pub theta: Option<Range>,
    /// Second-mode phases; defaults to `theta`.
    pub theta2: Option<Range>,
    pub phi: Option<Range>,
    pub times: Option<Range>,
    pub grid: Option<GridConfig>,
    pub channel: Option<ChannelSection>,
    /// Beamsplitter phase applied to the input before a decoherence run.
    pub beamsplitter_phi: Option<f64>,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
}

/// A validated configuration with every grid expanded.
#[derive(Debug, Clone)]
pub struct Plan {
    pub scenario: Scenario,
    pub output_dir: PathBuf,
    pub states: Vec<StateSpec>,
    pub parameters: Option<Vec<f64>>,
    pub thetas: Vec<f64>,
    /// False when `thetas` is the scenario default.
    pub theta_given: bool,
    pub thetas2: Vec<f64>,
    pub phis: Vec<f64>,
    pub times: Vec<f64>,
    pub grid: Option<GridConfig>,
    pub channel: Option<ChannelSection>,
    pub beamsplitter_phi: Option<f64>,
    pub tolerances: Tolerances,
}

pub fn load(path: &Path) -> Result<Plan, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
    let cfg: ScenarioConfig =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    cfg.validate(base)
}

/// Name of the swept parameter of a family, if it has one.
pub fn primary_parameter(family: &Family) -> Option<&'static str> {
    match family {
        Family::Coherent { .. }
        | Family::Ecs { .. }
        | Family::Ocs { .. }
        | Family::YurkeStoler { .. }
        | Family::Pacs { .. } => Some("alpha"),
        Family::SqueezedVacuum { .. } | Family::Yuen { .. } => Some("xi"),
        Family::Isospectral { .. } => Some("zeta"),
        Family::PairCoherent { .. } | Family::CavesSchumaker { .. } => Some("r"),
        Family::Fock { .. } | Family::Product { .. } => None,
    }
}

/// The spec with its primary parameter replaced by `value` (phase kept).
pub fn with_parameter(spec: &StateSpec, value: f64) -> StateSpec {
    let scaled = |z: &ComplexParam| {
        ComplexParam(if z.0.im == 0.0 {
            Complex64::new(if z.0.re < 0.0 { -value } else { value }, 0.0)
        } else {
            Complex64::from_polar(value, z.0.arg())
        })
    };
    let family = match &spec.family {
        Family::Coherent { alpha } => Family::Coherent { alpha: scaled(alpha) },
        Family::Ecs { alpha } => Family::Ecs { alpha: scaled(alpha) },
        Family::Ocs { alpha } => Family::Ocs { alpha: scaled(alpha) },
        Family::YurkeStoler { alpha } => Family::YurkeStoler { alpha: scaled(alpha) },
        Family::Pacs { alpha, m } => Family::Pacs { alpha: scaled(alpha), m: *m },
        Family::SqueezedVacuum { xi } => Family::SqueezedVacuum { xi: scaled(xi) },
        Family::Yuen { xi } => Family::Yuen { xi: scaled(xi) },
        Family::Isospectral { zeta, i } => Family::Isospectral { zeta: scaled(zeta), i: *i },
        Family::PairCoherent { theta, .. } => Family::PairCoherent { r: value, theta: *theta },
        Family::CavesSchumaker { theta, .. } => Family::CavesSchumaker { r: value, theta: *theta },
        other => other.clone(),
    };
    StateSpec { family, n_cut: spec.n_cut }
}

/// Current value of the primary parameter: |α|, |ξ|, |ζ| or r.
pub fn parameter_value(spec: &StateSpec) -> Option<f64> {
    match &spec.family {
        Family::Coherent { alpha }
        | Family::Ecs { alpha }
        | Family::Ocs { alpha }
        | Family::YurkeStoler { alpha }
        | Family::Pacs { alpha, .. } => Some(alpha.0.norm()),
        Family::SqueezedVacuum { xi } | Family::Yuen { xi } => Some(xi.0.norm()),
        Family::Isospectral { zeta, .. } => Some(zeta.0.norm()),
        Family::PairCoherent { r, .. } | Family::CavesSchumaker { r, .. } => Some(*r),
        Family::Fock { .. } | Family::Product { .. } => None,
    }
}

/// Every family at a representative point; used when an oracle audit lists
/// no states.
pub fn full_catalog() -> Vec<StateSpec> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut specs = audit::AuditBattery::default().single;
    specs.extend([
        StateSpec::new(Family::Pacs { alpha: s.into(), m: 1 }),
        StateSpec::new(Family::Pacs { alpha: s.into(), m: 5 }),
        StateSpec::new(Family::Isospectral { zeta: s.into(), i: 1 }),
    ]);
    specs.extend(audit::AuditBattery::default().two_mode);
    specs
}

fn optional(range: &Option<Range>, field: &str) -> Result<Option<Vec<f64>>, CliError> {
    range.as_ref().map(|r| r.expand(field)).transpose()
}

impl ScenarioConfig {
    pub fn validate(self, base: &Path) -> Result<Plan, CliError> {
        let cfg_err = |field: &str, msg: &str| CliError::Config(format!("field `{field}`: {msg}"));
        let tolerances = self.tolerances.resolve()?;
        if self.output_dir.as_os_str().is_empty() {
            return Err(cfg_err("output_dir", "must not be empty"));
        }
        let output_dir = if self.output_dir.is_absolute() { self.output_dir.clone() } else { base.join(&self.output_dir) };
        if let Some(g) = &self.grid {
            if !(g.x_min < g.x_max) || !g.x_min.is_finite() || !g.x_max.is_finite() {
                return Err(cfg_err("grid.x_max", "must exceed grid.x_min"));
            }
            if g.points < 3 || g.points % 2 == 0 {
                return Err(cfg_err("grid.points", "must be odd and >= 3 for Simpson weights"));
            }
        }

        let parameters = optional(&self.parameter, "parameter")?;
        if parameters.is_some() {
            for (i, s) in self.states.iter().enumerate() {
                if primary_parameter(&s.family).is_none() {
                    return Err(cfg_err(
                        &format!("states[{i}].family"),
                        "has no primary parameter to sweep",
                    ));
                }
            }
        }
        let mut states = self.states.clone();
        let single_only = |states: &[StateSpec], scenario: &str| -> Result<(), CliError> {
            match states.iter().position(|s| s.is_two_mode()) {
                Some(i) => Err(cfg_err(&format!("states[{i}]"), &format!("{scenario} needs single-mode states"))),
                None => Ok(()),
            }
        };

        let default_thetas: Vec<f64>;
        let mut phis = Vec::new();
        let mut times = Vec::new();
        match self.scenario {
            Scenario::Tomogram => {
                require_states(&states)?;
                default_thetas = tomolens::tomography::theta_samples(DEFAULT_THETA_SAMPLES);
            }
            Scenario::EntropySweep | Scenario::VarianceSweep => {
                require_states(&states)?;
                default_thetas = vec![0.0, FRAC_PI_2];
            }
            Scenario::HigherOrderSweep => {
                require_states(&states)?;
                single_only(&states, "higher_order_sweep")?;
                default_thetas = vec![0.0, FRAC_PI_2];
            }
            Scenario::Rfp => {
                if states.len() != 2 {
                    return Err(cfg_err("states", "rfp needs exactly two states"));
                }
                single_only(&states, "rfp")?;
                default_thetas = tomolens::metrics::eur_thetas(36);
            }
            Scenario::BeamsplitterSweep => {
                if states.is_empty() || states.len() > 2 {
                    return Err(cfg_err("states", "beamsplitter_sweep needs one or two single-mode input states"));
                }
                single_only(&states, "beamsplitter_sweep")?;
                default_thetas = vec![FRAC_PI_2];
                phis = optional(&self.phi, "phi")?.unwrap_or_else(|| vec![0.0, FRAC_PI_2]);
            }
            Scenario::DecoherenceRun => {
                require_states(&states)?;
                let two = states.len() == 1 && states[0].is_two_mode();
                let pair = states.len() == 2 && !states.iter().any(|s| s.is_two_mode());
                if !two && !pair {
                    return Err(cfg_err("states", "decoherence_run needs one two-mode state or two single-mode states"));
                }
                if self.beamsplitter_phi.is_some() && !pair {
                    return Err(cfg_err("beamsplitter_phi", "needs two single-mode input states"));
                }
                if let Some(phi) = self.beamsplitter_phi {
                    if !phi.is_finite() {
                        return Err(cfg_err("beamsplitter_phi", "must be finite"));
                    }
                }
                let ch = self.channel.as_ref().ok_or_else(|| cfg_err("channel", "missing"))?;
                for (i, rate) in ch.rates.iter().enumerate() {
                    if !(*rate > 0.0) || !rate.is_finite() {
                        return Err(cfg_err(&format!("channel.rates[{i}]"), "must be positive"));
                    }
                }
                times = self
                    .times
                    .as_ref()
                    .ok_or_else(|| cfg_err("times", "missing"))?
                    .expand("times")?;
                if let Some(t) = times.iter().find(|t| **t < 0.0) {
                    return Err(cfg_err("times", &format!("time {t} is negative")));
                }
                if times.windows(2).any(|w| w[1] < w[0]) {
                    return Err(cfg_err("times", "must be non-decreasing"));
                }
                default_thetas = vec![FRAC_PI_2];
            }
            Scenario::OracleAudit => {
                if states.is_empty() {
                    states = full_catalog();
                }
                default_thetas = Vec::new();
            }
        }
        if self.scenario != Scenario::BeamsplitterSweep && self.phi.is_some() {
            return Err(cfg_err("phi", &format!("not used by scenario {}", self.scenario.as_str())));
        }
        if self.scenario != Scenario::DecoherenceRun {
            for (field, present) in [
                ("times", self.times.is_some()),
                ("channel", self.channel.is_some()),
                ("beamsplitter_phi", self.beamsplitter_phi.is_some()),
            ] {
                if present {
                    return Err(cfg_err(field, &format!("not used by scenario {}", self.scenario.as_str())));
                }
            }
        }
        let thetas = optional(&self.theta, "theta")?.unwrap_or(default_thetas);
        let thetas2 = optional(&self.theta2, "theta2")?.unwrap_or_else(|| thetas.clone());
        if thetas2.len() != thetas.len() {
            return Err(cfg_err("theta2", "must have as many entries as theta"));
        }
        for (i, s) in states.iter().enumerate() {
            if let Some(v) = parameter_value(s) {
                if !v.is_finite() {
                    return Err(cfg_err(&format!("states[{i}]"), "parameter must be finite"));
                }
            }
        }
        Ok(Plan {
            scenario: self.scenario,
            output_dir,
            states,
            parameters,
            thetas,
            theta_given: self.theta.is_some(),
            thetas2,
            phis,
            times,
            grid: self.grid,
            channel: self.channel,
            beamsplitter_phi: self.beamsplitter_phi,
            tolerances,
        })
    }
}

fn require_states(states: &[StateSpec]) -> Result<(), CliError> {
    if states.is_empty() {
        return Err(CliError::Config("field `states`: at least one state is required".into()));
    }
    Ok(())
}

impl Plan {
    /// Input specs at every parameter point, in output order.
    pub fn parameter_points(&self) -> Vec<(Option<f64>, Vec<StateSpec>)> {
        match &self.parameters {
            None => vec![(None, self.states.clone())],
            Some(values) => values
                .iter()
                .map(|&v| (Some(v), self.states.iter().map(|s| with_parameter(s, v)).collect()))
                .collect(),
        }
    }

    /// Settings recorded in the manifest.
    pub fn summary(&self) -> BTreeMap<&'static str, serde_json::Value> {
        let mut m = BTreeMap::new();
        m.insert("states", serde_json::to_value(&self.states).unwrap_or_default());
        m.insert("parameter", serde_json::to_value(&self.parameters).unwrap_or_default());
        m.insert("theta", serde_json::to_value(&self.thetas).unwrap_or_default());
        if self.thetas2 != self.thetas {
            m.insert("theta2", serde_json::to_value(&self.thetas2).unwrap_or_default());
        }
        if !self.phis.is_empty() {
            m.insert("phi", serde_json::to_value(&self.phis).unwrap_or_default());
        }
        if !self.times.is_empty() {
            m.insert("times", serde_json::to_value(&self.times).unwrap_or_default());
        }
        if let Some(g) = &self.grid {
            m.insert("grid", serde_json::to_value(g).unwrap_or_default());
        }
        if let Some(c) = &self.channel {
            m.insert("channel", serde_json::to_value(c).unwrap_or_default());
        }
        if let Some(phi) = self.beamsplitter_phi {
            m.insert("beamsplitter_phi", serde_json::json!(phi));
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn range(start: f64, stop: f64, count: usize) -> Range {
        Range { start: Some(start), stop: Some(stop), count: Some(count), ..Range::default() }
    }

    #[test]
    fn ranges_expand_inclusively() {
        assert_eq!(range(0.0, 1.0, 3).expand("p").unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(range(0.3, 0.3, 1).expand("p").unwrap(), vec![0.3]);
        let decimal = range(0.1, 2.0, 20).expand("p").unwrap();
        assert_eq!(decimal[1], 0.2);
        assert_eq!(decimal[9], 1.0);
        let log = Range { spacing: Spacing::Log, ..range(0.1, 10.0, 3) }.expand("t").unwrap();
        assert!((log[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn empty_ranges_name_the_field() {
        let e = range(0.0, 1.0, 0).expand("parameter").unwrap_err();
        assert!(e.to_string().contains("parameter.count"));
        let e = range(1.0, 1.0, 4).expand("theta").unwrap_err();
        assert!(e.to_string().contains("theta.stop"));
        let e = Range { values: Some(vec![]), ..Range::default() }.expand("phi").unwrap_err();
        assert!(e.to_string().contains("phi.values"));
    }

    #[test]
    fn parameter_substitution_keeps_phase() {
        let spec = StateSpec::new(Family::Coherent { alpha: Complex64::new(0.0, 2.0).into() });
        let moved = with_parameter(&spec, 0.5);
        assert_eq!(parameter_value(&moved), Some(0.5));
        match moved.family {
            Family::Coherent { alpha } => assert!((alpha.0 - Complex64::new(0.0, 0.5)).norm() < 1e-15),
            _ => unreachable!(),
        }
    }
}
