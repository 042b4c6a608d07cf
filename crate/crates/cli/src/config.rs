//! Run configuration: strict JSON schema, defaults, dotted-path overrides
//! and validation.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use dcesim_core::cavity::{CavityProfile, Knot, ModeSpec};
use dcesim_core::units::Constants;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Validation(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Validation(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Constant,
    Sinusoidal,
    Step,
    PiecewiseLinear,
}

/// Cavity length profile. Which optional keys are required depends on
/// `kind`; keys that do not apply to the kind are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    #[serde(rename = "L0")]
    pub l0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(rename = "Omega", default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub step_time: Option<f64>,
    #[serde(rename = "step_L2", default, skip_serializing_if = "Option::is_none")]
    pub step_l2: Option<f64>,
    /// `[t, L]` pairs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub knots: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveSpec {
    /// Defaults to `epsilon/L0` of a sinusoidal profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_rel: Option<f64>,
    /// Defaults to the profile's drive frequency.
    #[serde(rename = "Omega", default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<f64>,
    #[serde(default)]
    pub gamma: f64,
    #[serde(default)]
    pub zeta: f64,
}

impl Default for DriveSpec {
    fn default() -> Self {
        DriveSpec {
            epsilon_rel: None,
            omega: None,
            gamma: 0.0,
            zeta: 0.0,
        }
    }
}

fn default_v_c() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnruhSpec {
    #[serde(rename = "V_c", default = "default_v_c")]
    pub v_c: f64,
    /// Observer acceleration for the spectrum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_min: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_count: Option<usize>,
}

impl Default for UnruhSpec {
    fn default() -> Self {
        UnruhSpec {
            v_c: 1.0,
            a: None,
            omega_min: None,
            omega_max: None,
            omega_count: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    #[serde(rename = "Omega_min")]
    pub omega_min: f64,
    #[serde(rename = "Omega_max")]
    pub omega_max: f64,
    pub points: usize,
    /// Worker threads; the result does not depend on it.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthColumn {
    Ode,
    Ideal,
    Damped,
    Saturated,
}

fn all_growth_columns() -> Vec<GrowthColumn> {
    vec![
        GrowthColumn::Ode,
        GrowthColumn::Ideal,
        GrowthColumn::Damped,
        GrowthColumn::Saturated,
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CasimirSpec {
    #[serde(default = "all_growth_columns")]
    pub models: Vec<GrowthColumn>,
}

impl Default for CasimirSpec {
    fn default() -> Self {
        CasimirSpec {
            models: all_growth_columns(),
        }
    }
}

fn default_tol() -> f64 {
    dcesim_core::engine::DEFAULT_TOLERANCE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSpec {
    pub t_end: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    pub sample_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitSystem {
    #[default]
    Internal,
    #[serde(rename = "SI", alias = "si")]
    Si,
}

/// Physical constants for SI runs; unset entries take CODATA values.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstantsSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hbar: Option<f64>,
    #[serde(rename = "k_B", default, skip_serializing_if = "Option::is_none")]
    pub k_b: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub profile: ProfileSpec,
    pub mode: u32,
    #[serde(default)]
    pub drive: DriveSpec,
    #[serde(default)]
    pub unruh: UnruhSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSpec>,
    #[serde(default)]
    pub casimir: CasimirSpec,
    pub numerics: NumericsSpec,
    #[serde(default)]
    pub units: UnitSystem,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<ConstantsSpec>,
}

/// Parses and validates a config document.
pub fn parse_config(text: &[u8]) -> Result<RunConfig, ConfigError> {
    parse_config_with_overrides(text, &[])
}

/// Parses a config document, applies `key=value` overrides on dotted paths
/// and validates the result.
pub fn parse_config_with_overrides(text: &[u8], overrides: &[String]) -> Result<RunConfig, ConfigError> {
    let text = std::str::from_utf8(text).map_err(|e| ConfigError::Parse(format!("config is not UTF-8: {e}")))?;
    let parse_error = |e: serde_json::Error| ConfigError::Parse(e.to_string());
    let cfg: RunConfig = if overrides.is_empty() {
        // Typed parse straight from the text keeps line/column context on
        // schema errors.
        serde_json::from_str(text).map_err(parse_error)?
    } else {
        let mut doc: Value = serde_json::from_str(text).map_err(parse_error)?;
        for ov in overrides {
            apply_override(&mut doc, ov)?;
        }
        serde_json::from_value(doc).map_err(parse_error)?
    };
    cfg.validate()?;
    Ok(cfg)
}

/// Sets `path.to.key` to `value`, read as JSON when it parses and as a
/// string otherwise. Intermediate objects are created as needed.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), ConfigError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::Parse(format!("override `{assignment}` is not of the form key=value")))?;
    let path = path.trim();
    if path.is_empty() || path.split('.').any(str::is_empty) {
        return Err(ConfigError::Parse(format!("override `{assignment}` has an empty key")));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.trim().to_string()));
    let mut node = doc;
    let keys: Vec<&str> = path.split('.').collect();
    for (i, key) in keys.iter().enumerate() {
        if node.is_null() {
            *node = Value::Object(Default::default());
        }
        let obj = node.as_object_mut().ok_or_else(|| {
            ConfigError::Parse(format!("override `{path}`: `{}` is not an object", keys[..i].join(".")))
        })?;
        if i + 1 == keys.len() {
            obj.insert((*key).to_string(), value);
            return Ok(());
        }
        node = obj.entry((*key).to_string()).or_insert(Value::Null);
    }
    unreachable!("loop returns on the last key")
}

fn finite(name: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite, got {v}")))
    }
}

fn positive(name: &str, v: f64) -> Result<(), ConfigError> {
    finite(name, v)?;
    if v > 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive, got {v}")))
    }
}

fn non_negative(name: &str, v: f64) -> Result<(), ConfigError> {
    finite(name, v)?;
    if v >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be non-negative, got {v}")))
    }
}

fn require<T: Copy>(kind: &str, name: &str, v: Option<T>) -> Result<T, ConfigError> {
    v.ok_or_else(|| invalid(format!("profile.{name} is required for kind `{kind}`")))
}

fn forbid<T>(kind: &str, name: &str, v: &Option<T>) -> Result<(), ConfigError> {
    match v {
        Some(_) => Err(invalid(format!("profile.{name} does not apply to kind `{kind}`"))),
        None => Ok(()),
    }
}

impl ProfileSpec {
    fn kind_name(&self) -> &'static str {
        match self.kind {
            ProfileKind::Constant => "constant",
            ProfileKind::Sinusoidal => "sinusoidal",
            ProfileKind::Step => "step",
            ProfileKind::PiecewiseLinear => "piecewise_linear",
        }
    }

    fn validate(&self, t_end: f64) -> Result<(), ConfigError> {
        positive("profile.L0", self.l0)?;
        let k = self.kind_name();
        match self.kind {
            ProfileKind::Constant => {
                forbid(k, "epsilon", &self.epsilon)?;
                forbid(k, "Omega", &self.omega)?;
                forbid(k, "step_time", &self.step_time)?;
                forbid(k, "step_L2", &self.step_l2)?;
                forbid(k, "knots", &self.knots)?;
            }
            ProfileKind::Sinusoidal => {
                let eps = require(k, "epsilon", self.epsilon)?;
                let omega = require(k, "Omega", self.omega)?;
                non_negative("profile.epsilon", eps)?;
                non_negative("profile.Omega", omega)?;
                if eps >= self.l0 {
                    return Err(invalid(format!(
                        "profile.epsilon ({eps}) must be smaller than profile.L0 ({})",
                        self.l0
                    )));
                }
                forbid(k, "step_time", &self.step_time)?;
                forbid(k, "step_L2", &self.step_l2)?;
                forbid(k, "knots", &self.knots)?;
            }
            ProfileKind::Step => {
                let at = require(k, "step_time", self.step_time)?;
                let l2 = require(k, "step_L2", self.step_l2)?;
                finite("profile.step_time", at)?;
                positive("profile.step_L2", l2)?;
                forbid(k, "epsilon", &self.epsilon)?;
                forbid(k, "Omega", &self.omega)?;
                forbid(k, "knots", &self.knots)?;
            }
            ProfileKind::PiecewiseLinear => {
                let knots = self
                    .knots
                    .as_ref()
                    .ok_or_else(|| invalid("profile.knots is required for kind `piecewise_linear`"))?;
                forbid(k, "epsilon", &self.epsilon)?;
                forbid(k, "Omega", &self.omega)?;
                forbid(k, "step_time", &self.step_time)?;
                forbid(k, "step_L2", &self.step_l2)?;
                for [t, l] in knots {
                    finite("profile.knots time", *t)?;
                    positive("profile.knots length", *l)?;
                }
                let (first, last) = match (knots.first(), knots.last()) {
                    (Some(f), Some(l)) if knots.len() >= 2 => (f[0], l[0]),
                    _ => return Err(invalid("profile.knots needs at least two knots")),
                };
                if first > 0.0 || last < t_end {
                    return Err(invalid(format!(
                        "profile.knots span [{first}, {last}] must cover [0, numerics.t_end = {t_end}]"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Builds the core profile. `L0` doubles as the length before a step.
    pub fn build(&self) -> dcesim_core::Result<CavityProfile> {
        match self.kind {
            ProfileKind::Constant => CavityProfile::constant(self.l0),
            ProfileKind::Sinusoidal => {
                CavityProfile::sinusoidal(self.l0, self.epsilon.unwrap_or(0.0), self.omega.unwrap_or(0.0))
            }
            ProfileKind::Step => CavityProfile::step(
                self.l0,
                self.step_l2.unwrap_or(self.l0),
                self.step_time.unwrap_or(0.0),
            ),
            ProfileKind::PiecewiseLinear => CavityProfile::piecewise_linear(
                self.knots
                    .iter()
                    .flatten()
                    .map(|&[t, length]| Knot { t, length })
                    .collect(),
            ),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let n = &self.numerics;
        positive("numerics.t_end", n.t_end)?;
        positive("numerics.tol", n.tol)?;
        if n.sample_count < 2 {
            return Err(invalid(format!("numerics.sample_count must be >= 2, got {}", n.sample_count)));
        }
        if self.mode == 0 {
            return Err(invalid("mode must be >= 1"));
        }
        self.profile.validate(n.t_end)?;
        self.profile
            .build()
            .map_err(|e| invalid(format!("profile: {e}")))?;

        let d = &self.drive;
        non_negative("drive.gamma", d.gamma)?;
        non_negative("drive.zeta", d.zeta)?;
        if let Some(e) = d.epsilon_rel {
            non_negative("drive.epsilon_rel", e)?;
            if e >= 1.0 {
                return Err(invalid(format!("drive.epsilon_rel must be below 1, got {e}")));
            }
        }
        if let Some(w) = d.omega {
            positive("drive.Omega", w)?;
        }
        if self.profile.kind == ProfileKind::Sinusoidal {
            let eps_rel = self.profile.epsilon.unwrap_or(0.0) / self.profile.l0;
            let omega = self.profile.omega.unwrap_or(0.0);
            if d.epsilon_rel.is_some_and(|e| (e - eps_rel).abs() > 1e-12 * eps_rel.max(1e-300)) {
                return Err(invalid(format!(
                    "drive.epsilon_rel disagrees with profile.epsilon/profile.L0 = {eps_rel}"
                )));
            }
            if d.omega.is_some_and(|w| (w - omega).abs() > 1e-12 * omega) {
                return Err(invalid(format!("drive.Omega disagrees with profile.Omega = {omega}")));
            }
        }

        let models = &self.casimir.models;
        if models.is_empty() {
            return Err(invalid("casimir.models must not be empty"));
        }
        if models.iter().enumerate().any(|(i, m)| models[..i].contains(m)) {
            return Err(invalid("casimir.models lists a model twice"));
        }

        let u = &self.unruh;
        positive("unruh.V_c", u.v_c)?;
        if let Some(a) = u.a {
            non_negative("unruh.a", a)?;
        }
        if let Some(w) = u.omega_min {
            positive("unruh.omega_min", w)?;
        }
        if let Some(w) = u.omega_max {
            positive("unruh.omega_max", w)?;
        }
        if let (Some(lo), Some(hi)) = (u.omega_min, u.omega_max) {
            if hi < lo {
                return Err(invalid("unruh.omega_max must not be below unruh.omega_min"));
            }
        }
        if u.omega_count.is_some_and(|c| c < 1) {
            return Err(invalid("unruh.omega_count must be >= 1"));
        }

        if let Some(s) = &self.scan {
            positive("scan.Omega_min", s.omega_min)?;
            positive("scan.Omega_max", s.omega_max)?;
            if s.omega_max < s.omega_min {
                return Err(invalid("scan.Omega_max must not be below scan.Omega_min"));
            }
            if s.points < 1 {
                return Err(invalid("scan.points must be >= 1"));
            }
            if s.workers == Some(0) {
                return Err(invalid("scan.workers must be >= 1"));
            }
        }

        if self.constants.is_some() && self.units == UnitSystem::Internal {
            return Err(invalid("constants may only be given with units = \"SI\""));
        }
        if let Some(c) = &self.constants {
            for (name, v) in [("constants.c", c.c), ("constants.hbar", c.hbar), ("constants.k_B", c.k_b)] {
                if let Some(v) = v {
                    positive(name, v)?;
                }
            }
        }
        Ok(())
    }

    pub fn constants(&self) -> Constants {
        match self.units {
            UnitSystem::Internal => Constants::INTERNAL,
            UnitSystem::Si => {
                let spec = self.constants.clone().unwrap_or_default();
                Constants {
                    c: spec.c.unwrap_or(Constants::SI.c),
                    hbar: spec.hbar.unwrap_or(Constants::SI.hbar),
                    k_b: spec.k_b.unwrap_or(Constants::SI.k_b),
                }
            }
        }
    }

    pub fn mode_spec(&self) -> dcesim_core::Result<ModeSpec> {
        ModeSpec::new(self.mode, self.profile.l0, self.constants().c)
    }

    /// `ε/L0` of the drive, from the drive block or the sinusoidal profile.
    pub fn epsilon_rel(&self) -> Option<f64> {
        self.drive.epsilon_rel.or(match self.profile.kind {
            ProfileKind::Sinusoidal => self.profile.epsilon.map(|e| e / self.profile.l0),
            _ => None,
        })
    }

    pub fn drive_frequency(&self) -> Option<f64> {
        self.drive.omega.or(match self.profile.kind {
            ProfileKind::Sinusoidal => self.profile.omega,
            _ => None,
        })
    }

    /// Canonical serialisation with all defaults filled in.
    pub fn to_canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serialises")
    }

    /// SHA-256 of the canonical serialisation.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_canonical_json().as_bytes()))
    }
}
