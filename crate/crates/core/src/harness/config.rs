//! Scenario configuration documents (JSON).

use serde::{Deserialize, Serialize};

use crate::conformal::{euclidean_factor, ConformalFactor};
use crate::error::{FlowError, Result};
use crate::geometry::{RadialField, RadialGrid};
use crate::harness::expr::RadialExpr;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub m: u32,
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub initial: InitialConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exhaustion: Option<ExhaustionConfig>,
    #[serde(default)]
    pub checks: Vec<CheckConfig>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub r_max: f64,
    pub n: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    #[serde(rename = "T")]
    pub horizon: f64,
    pub dt: f64,
    /// Times written to the CSV output; ten equal intervals when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_stamps: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialConfig {
    Constant { value: f64 },
    Euclidean,
    Expression { expr: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExhaustionConfig {
    pub k_list: Vec<f64>,
    pub r_obs: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckConfig {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

/// Checks a scenario can request.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckId {
    /// `u > 0` on every recorded state.
    Positivity,
    /// Sandwich `min u0 <= u - m(m-1)t <= max u0`.
    Lemma1,
    /// Local lower bound with rate `C_m`.
    Lemma5,
    /// Local upper bound with the cutoff constant `c_m`.
    Lemma7,
    /// Distance to the scaling solution `m(m-1)t + 1`.
    Rigidity,
    /// Completeness bound `u >= m(m-1)t`.
    Theorem1,
    /// Strict decrease of the exhaustion differences `d_k`.
    Cauchy,
}

pub const PDE_TOLERANCE: f64 = 5e-3;
pub const IDENTITY_TOLERANCE: f64 = 1e-10;

impl CheckId {
    pub const ALL: [CheckId; 7] = [
        Self::Positivity,
        Self::Lemma1,
        Self::Lemma5,
        Self::Lemma7,
        Self::Rigidity,
        Self::Theorem1,
        Self::Cauchy,
    ];

    pub fn parse(id: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.as_str() == id)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Positivity => "positivity",
            Self::Lemma1 => "lemma1",
            Self::Lemma5 => "lemma5",
            Self::Lemma7 => "lemma7",
            Self::Rigidity => "rigidity",
            Self::Theorem1 => "theorem1",
            Self::Cauchy => "cauchy",
        }
    }

    /// The inequality the check measures.
    pub fn anchor(self) -> &'static str {
        match self {
            Self::Positivity => "u(., t) > 0",
            Self::Lemma1 => "inf u0 <= u(., t) - m(m-1)t <= sup u0 on B_k",
            Self::Lemma5 => "u(., t) >= inf_{B_2} u(., 0) - C_m t on B_1",
            Self::Lemma7 => "u(., t) <= sup_{B_r0} u(., 0) + (m-1)(m+c_m)t on B_{r0-1}",
            Self::Rigidity => "u(., t) = m(m-1)t + 1",
            Self::Theorem1 => "u(., t) >= m(m-1)t",
            Self::Cauchy => "d_k strictly decreasing in k",
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Self::Positivity | Self::Cauchy => 0.0,
            _ => PDE_TOLERANCE,
        }
    }
}

fn invalid(path: &str, what: impl std::fmt::Display) -> FlowError {
    FlowError::Config(format!("{path}: {what}"))
}

fn positive(path: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(path, format!("must be positive, got {v}")))
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self =
            serde_json::from_str(text).map_err(|e| FlowError::Config(format!("config: {e}")))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Rejects every configuration the solver cannot run, naming the field.
    pub fn validate(&self) -> Result<()> {
        let name_ok = !self.name.is_empty()
            && self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-');
        if !name_ok {
            return Err(invalid(
                "name",
                "must be a nonempty identifier of [A-Za-z0-9_-]",
            ));
        }
        if self.m < 3 {
            return Err(invalid("m", format!("must be at least 3, got {}", self.m)));
        }
        positive("grid.r_max", self.grid.r_max)?;
        let grid = RadialGrid::new(self.grid.r_max, self.grid.n).map_err(|e| invalid("grid", e))?;
        if self.grid.r_max <= 2.0 {
            return Err(invalid("grid.r_max", "balls need radius greater than 2"));
        }
        positive("time.T", self.time.horizon)?;
        positive("time.dt", self.time.dt)?;
        if let Some(stamps) = &self.time.output_stamps {
            if !stamps.windows(2).all(|w| w[0] < w[1]) {
                return Err(invalid("time.output_stamps", "must be strictly increasing"));
            }
            if let Some(bad) = stamps
                .iter()
                .find(|&&s| !(s >= 0.0 && s <= self.time.horizon))
            {
                return Err(invalid(
                    "time.output_stamps",
                    format!("{bad} lies outside [0, T]"),
                ));
            }
        }
        match &self.initial {
            InitialConfig::Constant { value } => positive("initial.value", *value)?,
            InitialConfig::Euclidean => {}
            InitialConfig::Expression { expr } => {
                let parsed = RadialExpr::parse(expr).map_err(|e| invalid("initial.expr", e))?;
                if let Some(r) = grid
                    .nodes()
                    .find(|&r| !(parsed.eval(r) > 0.0 && parsed.eval(r).is_finite()))
                {
                    return Err(invalid(
                        "initial.expr",
                        format!("must be positive and finite on the grid, fails at r = {r}"),
                    ));
                }
            }
        }
        if let Some(ex) = &self.exhaustion {
            if ex.k_list.is_empty() {
                return Err(invalid("exhaustion.k_list", "is empty"));
            }
            if !ex.k_list.windows(2).all(|w| w[0] < w[1]) {
                return Err(invalid("exhaustion.k_list", "must be strictly increasing"));
            }
            positive("exhaustion.r_obs", ex.r_obs)?;
            if ex.k_list[0] < ex.r_obs + 3.0 {
                return Err(invalid(
                    "exhaustion.k_list",
                    "smallest ball must satisfy k >= r_obs + 3",
                ));
            }
            for (i, &k) in ex.k_list.iter().enumerate() {
                if k > self.grid.r_max || grid.node_index(k).is_none() {
                    return Err(invalid(
                        &format!("exhaustion.k_list[{i}]"),
                        format!("{k} is not a grid node within r_max"),
                    ));
                }
            }
        }
        for (i, check) in self.checks.iter().enumerate() {
            let path = format!("checks[{i}]");
            let id = CheckId::parse(&check.id).ok_or_else(|| {
                invalid(
                    &format!("{path}.id"),
                    format!("unknown check '{}'", check.id),
                )
            })?;
            if id == CheckId::Cauchy && self.exhaustion.as_ref().is_none_or(|e| e.k_list.len() < 3)
            {
                return Err(invalid(
                    &format!("{path}.id"),
                    "cauchy needs an exhaustion with at least three balls",
                ));
            }
            if let Some(tol) = check.tolerance {
                if !(tol.is_finite() && tol >= 0.0) {
                    return Err(invalid(
                        &format!("{path}.tolerance"),
                        "must be finite and nonnegative",
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> crate::geometry::Dimension {
        crate::geometry::Dimension::new(self.m).expect("validated")
    }

    pub fn grid(&self) -> RadialGrid {
        RadialGrid::new(self.grid.r_max, self.grid.n).expect("validated")
    }

    /// Initial conformal factor sampled on the grid.
    pub fn initial_factor(&self) -> Result<ConformalFactor> {
        let grid = self.grid();
        match &self.initial {
            InitialConfig::Constant { value } => ConformalFactor::constant(grid, *value),
            InitialConfig::Euclidean => Ok(euclidean_factor(grid)),
            InitialConfig::Expression { expr } => {
                let parsed = RadialExpr::parse(expr)?;
                ConformalFactor::new(RadialField::from_fn(grid, |r| parsed.eval(r))?)
            }
        }
    }

    /// Requested output times, `t = 0` included.
    pub fn output_stamps(&self) -> Vec<f64> {
        let mut stamps = match &self.time.output_stamps {
            Some(s) => s.clone(),
            None => (0..=10)
                .map(|i| self.time.horizon * i as f64 / 10.0)
                .collect(),
        };
        if stamps.first() != Some(&0.0) {
            stamps.insert(0, 0.0);
        }
        stamps
    }
}
