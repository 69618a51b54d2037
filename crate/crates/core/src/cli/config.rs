//! Run configuration: the TOML (or JSON) document, flag overlay and model
//! resolution.
//!
//! ```toml
//! preset = "fig1"
//! k = [0, 40, 1]
//! tol = 1e-5
//! window = [-40, 40]
//!
//! [model]            # or: model = "holling"
//! model = "cubic-demo"
//! b = 0.0
//! c = 1.0
//! ```

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::output::Format;
use crate::bifurcate::ParametricFamily;
use crate::bounded::MiddleMethod;
use crate::figures::FigureId;
use crate::models::{preset, ModelSpec};
use crate::signals::{PSpaceParams, Signal};
use crate::transitions::Alternative;

/// A model given by name (default parameters) or written out in full.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelChoice {
    Name(String),
    Spec(ModelSpec),
}

/// A single value or an inclusive `[lo, hi, step]` grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KSpec {
    Value(f64),
    Grid([f64; 3]),
}

/// A single parameter value or a bracket `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LambdaSpec {
    Value(f64),
    Range([f64; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    Single,
    Double,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum MiddleChoice {
    BackwardPullback,
    BasinBisection,
}

impl From<MiddleChoice> for MiddleMethod {
    fn from(m: MiddleChoice) -> Self {
        match m {
            MiddleChoice::BackwardPullback => MiddleMethod::BackwardPullback,
            MiddleChoice::BasinBisection => MiddleMethod::BasinBisection,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum AlternativeChoice {
    None,
    LowerAttractor,
}

impl From<AlternativeChoice> for Alternative {
    fn from(a: AlternativeChoice) -> Self {
        match a {
            AlternativeChoice::None => Alternative::None,
            AlternativeChoice::LowerAttractor => Alternative::LowerAttractor,
        }
    }
}

/// Every setting of a run. Absent keys take the subcommand's defaults;
/// the resolved document, defaults filled in, is embedded in the JSON output.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<ModelChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    /// Forcing index of the preset, or the `k` grid of a curve.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<KSpec>,
    /// Time shift of the preset forcing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub future_model: Option<ModelChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub future_preset: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub future_k: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal: Option<Signal>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_space: Option<PSpaceParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub figure: Option<FigureId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<LambdaSpec>,
    /// Parameter value with three solutions, where a double search starts.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_seed: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetKind>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Adds a tail window past the switch of an arctan blend (curves).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_reach: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Pullback convergence tolerance.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounded_tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_doublings: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_lo: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_hi: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stride: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<MiddleChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alternative: Option<AlternativeChoice>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warm_start: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_checks: Option<usize>,
    /// Seed of the cross-check draw.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

pub fn config_err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($field:ident),* $(,)?) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field; } )*
    };
}

impl RunConfig {
    /// Reads a config file: JSON when the extension is `.json`, TOML
    /// otherwise. The JSON report of an earlier run is accepted as is; its
    /// embedded `config` is used.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        let is_json = path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"));
        if is_json {
            let mut value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
            if let Some(inner) = value.get_mut("config") {
                value = inner.take();
            }
            serde_json::from_value(value)
                .map_err(|e| ConfigError(format!("{}: {e}", path.display())))
        } else {
            toml::from_str(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))
        }
    }

    /// Settings present in `top` replace those of `self`.
    pub fn overlay(mut self, top: RunConfig) -> Self {
        overlay!(self, top;
            model, preset, k, shift, future_model, future_preset, future_k, signal, p_space,
            figure, lambda, lambda_seed, radius, target, window, dt, tail_reach, tol, bounded_tol,
            max_doublings, gamma_min, x_lo, x_hi, x0, horizon, stride, method, alternative,
            warm_start, cross_checks, seed, out, format, jobs,
        );
        self
    }

    /// The forcing index of a preset (a single `k`).
    pub fn k_value(&self) -> Result<f64, ConfigError> {
        match self.k {
            None => Ok(0.0),
            Some(KSpec::Value(k)) => Ok(k),
            Some(KSpec::Grid(_)) => config_err("this subcommand takes a single k, not a grid"),
        }
    }

    pub fn k_grid(&self) -> Result<Vec<f64>, ConfigError> {
        match self.k {
            None => config_err("a k grid is required (--k LO:HI:STEP)"),
            Some(KSpec::Value(k)) => Ok(vec![k]),
            Some(KSpec::Grid([lo, hi, step])) => {
                if !(step > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) {
                    return config_err(format!("invalid k grid {lo}:{hi}:{step}"));
                }
                Ok(crate::figures::range_grid(lo, hi, step))
            }
        }
    }

    pub fn lambda_value(&self) -> Result<f64, ConfigError> {
        match self.lambda {
            Some(LambdaSpec::Value(l)) => Ok(l),
            Some(LambdaSpec::Range(_)) => {
                config_err("this subcommand takes a single lambda, not a range")
            }
            None => config_err("lambda is required (--lambda X)"),
        }
    }

    pub fn lambda_range(&self) -> Result<Option<(f64, f64)>, ConfigError> {
        match self.lambda {
            Some(LambdaSpec::Range([lo, hi])) if lo < hi => Ok(Some((lo, hi))),
            Some(LambdaSpec::Range([lo, hi])) => {
                config_err(format!("empty lambda range {lo}:{hi}"))
            }
            Some(LambdaSpec::Value(_)) => config_err("this subcommand takes a lambda range LO:HI"),
            None => Ok(None),
        }
    }

    pub fn window_or(&self, default: [f64; 2]) -> Result<(f64, f64), ConfigError> {
        let [a, b] = self.window.unwrap_or(default);
        if a < b && a.is_finite() && b.is_finite() {
            Ok((a, b))
        } else {
            config_err(format!("invalid window {a}:{b}"))
        }
    }

    /// The model spec selected by `model`, `preset`, `k` and `shift`.
    pub fn model_spec(&self) -> Result<ModelSpec, ConfigError> {
        resolve_model(
            self.model.as_ref(),
            self.preset.as_deref(),
            self.k_value()?,
            self.shift.unwrap_or(0.0),
        )
    }

    pub fn family(&self) -> Result<ParametricFamily, ConfigError> {
        self.model_spec()?
            .build()
            .map_err(|e| ConfigError(e.to_string()))
    }

    /// The future (limit) equation of a transition run. Defaults to the
    /// transition equation itself.
    pub fn future_spec(&self) -> Result<ModelSpec, ConfigError> {
        if self.future_model.is_none() && self.future_preset.is_none() {
            return self.model_spec();
        }
        resolve_model(
            self.future_model.as_ref(),
            self.future_preset.as_deref(),
            self.future_k.unwrap_or(self.k_value()?),
            0.0,
        )
    }
}

fn named(name: &str) -> Result<ModelSpec, ConfigError> {
    ModelSpec::default_for(name).map_err(|e| ConfigError(e.to_string()))
}

fn resolve_model(
    model: Option<&ModelChoice>,
    preset_name: Option<&str>,
    k: f64,
    shift: f64,
) -> Result<ModelSpec, ConfigError> {
    match (model, preset_name) {
        (None, None) => config_err("no model selected (use --model NAME or --preset NAME)"),
        (Some(ModelChoice::Name(n)), None) => named(n),
        (Some(ModelChoice::Spec(s)), None) => Ok(s.clone()),
        (model, Some(p)) => {
            let spec = preset(p, k, shift).map_err(|e| ConfigError(e.to_string()))?;
            match model {
                None => Ok(spec),
                Some(ModelChoice::Name(n)) if named(n)?.id() == spec.id() => Ok(spec),
                Some(ModelChoice::Name(n)) => {
                    config_err(format!("preset {p:?} is a {} model, not {n:?}", spec.id()))
                }
                Some(ModelChoice::Spec(_)) => {
                    config_err("an inline model cannot be combined with a preset")
                }
            }
        }
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("not finite: {s:?}"))
    }
}

fn parse_parts<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != N {
        return Err(format!("expected {N} numbers separated by ':', got {s:?}"));
    }
    let mut out = [0.0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse_f64(p)?;
    }
    Ok(out)
}

/// `A:B`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Span(pub [f64; 2]);

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_parts::<2>(s).map(Span)
    }
}

impl FromStr for LambdaSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains(':') {
            parse_parts::<2>(s).map(LambdaSpec::Range)
        } else {
            parse_f64(s).map(LambdaSpec::Value)
        }
    }
}

impl FromStr for KSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.contains(':') {
            parse_parts::<3>(s).map(KSpec::Grid)
        } else {
            parse_f64(s).map(KSpec::Value)
        }
    }
}

impl FromStr for ModelChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(ModelChoice::Name(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_syntax() {
        assert_eq!("-40:40".parse::<Span>().unwrap(), Span([-40.0, 40.0]));
        assert_eq!("0.3".parse::<LambdaSpec>().unwrap(), LambdaSpec::Value(0.3));
        assert_eq!(
            "0.1:0.5".parse::<LambdaSpec>().unwrap(),
            LambdaSpec::Range([0.1, 0.5])
        );
        assert_eq!(
            "0:40:1".parse::<KSpec>().unwrap(),
            KSpec::Grid([0.0, 40.0, 1.0])
        );
        assert!("0:1".parse::<KSpec>().is_err());
        assert!("nan".parse::<LambdaSpec>().is_err());
    }

    #[test]
    fn toml_document() {
        let cfg: RunConfig = toml::from_str(
            r#"
            preset = "fig1"
            model = "holling"
            k = [0, 40, 1]
            lambda = [0.0, 0.5]
            window = [-40, 40]
            "#,
        )
        .unwrap();
        assert_eq!(cfg.k_grid().unwrap().len(), 41);
        assert_eq!(cfg.lambda_range().unwrap(), Some((0.0, 0.5)));
        assert!(cfg.model_spec().is_err());
        let single = RunConfig {
            k: Some(KSpec::Value(3.0)),
            ..cfg
        };
        assert_eq!(single.model_spec().unwrap().id(), "holling");
    }

    #[test]
    fn inline_model() {
        let cfg: RunConfig = toml::from_str(
            r#"
            [model]
            model = "cubic-demo"
            b = 1.0
            c = 2.0
            "#,
        )
        .unwrap();
        assert_eq!(
            cfg.model_spec().unwrap(),
            ModelSpec::CubicDemo { b: 1.0, c: 2.0 }
        );
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("tolerance = 1e-3").is_err());
        assert!(toml::from_str::<RunConfig>(
            "[model]\nmodel = \"cubic-demo\"\nb = 1\nc = 2\nd = 3"
        )
        .is_err());
    }

    #[test]
    fn preset_and_model_must_agree() {
        let mut cfg = RunConfig {
            preset: Some("fig5".into()),
            model: Some(ModelChoice::Name("tunnel_circuit".into())),
            ..RunConfig::default()
        };
        assert!(cfg.model_spec().is_ok());
        cfg.model = Some(ModelChoice::Name("holling".into()));
        assert!(cfg.model_spec().is_err());
    }

    #[test]
    fn json_round_trip() {
        let cfg = RunConfig {
            preset: Some("fig3".into()),
            k: Some(KSpec::Value(0.5)),
            lambda: Some(LambdaSpec::Range([0.1, 0.2])),
            signal: Some(Signal::plateau_hat(2.0)),
            ..RunConfig::default()
        };
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn overlay_prefers_the_top() {
        let base = RunConfig {
            tol: Some(1e-3),
            horizon: Some(5.0),
            ..RunConfig::default()
        };
        let top = RunConfig {
            tol: Some(1e-6),
            ..RunConfig::default()
        };
        let merged = base.overlay(top);
        assert_eq!(merged.tol, Some(1e-6));
        assert_eq!(merged.horizon, Some(5.0));
    }
}
