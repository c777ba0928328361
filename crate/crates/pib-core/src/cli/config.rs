//! Strict JSON run configurations.
//!
//! A config is a single JSON object with a top-level `"mode"` discriminator;
//! every other key is validated against the mode's schema and unknown keys
//! are rejected so typos surface instead of silently falling back to
//! defaults.

use serde::Deserialize;
use serde_json::Value;
use std::path::PathBuf;

use crate::conjugate::{
    BetaBernoulliModel, ConjugateModel, DirichletCategoricalModel, GaussianMeanModel,
};
use crate::error::{PibError, Result};
use crate::world::World;

/// A parsed, validated run configuration.
#[derive(Debug, Clone)]
pub enum RunConfig {
    Curve(CurveConfig),
    ConjugateLimits(ConjugateLimitsConfig),
    Gibbs(GibbsConfig),
    Augmentation(AugmentationConfig),
    Verify(VerifyConfig),
}

/// Either a built-in world name or explicit tables.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum WorldSpec {
    Builtin(String),
    Custom {
        phi_prior: Vec<f64>,
        obs_given_phi: Vec<Vec<f64>>,
    },
}

impl WorldSpec {
    pub fn build(&self) -> Result<World> {
        match self {
            WorldSpec::Builtin(name) => World::builtin(name),
            WorldSpec::Custom {
                phi_prior,
                obs_given_phi,
            } => World::new(phi_prior.clone(), obs_given_phi.clone()),
        }
    }
}

fn default_restarts() -> usize {
    8
}
fn default_max_iters() -> usize {
    10_000
}
fn default_tol() -> f64 {
    1e-10
}
fn default_gibbs_step() -> f64 {
    0.05
}
fn default_gibbs_iters() -> usize {
    100_000
}
fn default_gibbs_tol() -> f64 {
    1e-9
}
fn default_mc_samples() -> usize {
    100_000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveConfig {
    pub world: WorldSpec,
    pub n_past: usize,
    pub n_future: usize,
    pub betas: Vec<f64>,
    pub k_theta: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

/// Conjugate model spec, discriminated by `"family"`.
#[derive(Debug, Clone)]
pub struct ModelSpec(pub ConjugateModel);

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct BetaBernoulliSpec {
    prior_a: f64,
    prior_b: f64,
    successes: u64,
    trials: u64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct GaussianMeanSpec {
    prior_mean: f64,
    prior_var: f64,
    obs_var: f64,
    data: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct DirichletCategoricalSpec {
    prior_alphas: Vec<f64>,
    counts: Vec<u64>,
}

impl ModelSpec {
    fn from_value(value: Value) -> Result<Self> {
        let mut object = match value {
            Value::Object(map) => map,
            other => {
                return Err(config_error(format!(
                    "\"model\" must be an object, got {other}"
                )))
            }
        };
        let family = match object.remove("family") {
            Some(Value::String(s)) => s,
            Some(other) => {
                return Err(config_error(format!(
                    "\"family\" must be a string, got {other}"
                )))
            }
            None => return Err(config_error("model is missing the \"family\" key".into())),
        };
        let rest = Value::Object(object);
        let model = match family.as_str() {
            "beta_bernoulli" => {
                let s: BetaBernoulliSpec = from_value(rest)?;
                ConjugateModel::BetaBernoulli(BetaBernoulliModel::new(
                    s.prior_a, s.prior_b, s.successes, s.trials,
                )?)
            }
            "gaussian_mean" => {
                let s: GaussianMeanSpec = from_value(rest)?;
                ConjugateModel::GaussianMean(GaussianMeanModel::new(
                    s.prior_mean,
                    s.prior_var,
                    s.obs_var,
                    s.data,
                )?)
            }
            "dirichlet_categorical" => {
                let s: DirichletCategoricalSpec = from_value(rest)?;
                ConjugateModel::DirichletCategorical(DirichletCategoricalModel::new(
                    s.prior_alphas,
                    s.counts,
                )?)
            }
            other => {
                return Err(config_error(format!(
                    "unknown model family {other:?} (expected beta_bernoulli, \
                     gaussian_mean, or dirichlet_categorical)"
                )))
            }
        };
        Ok(ModelSpec(model))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConjugateLimitsRaw {
    model: Value,
    betas: Vec<f64>,
    #[serde(default)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct ConjugateLimitsConfig {
    pub model: ModelSpec,
    pub betas: Vec<f64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct GibbsRaw {
    model: Value,
    pub beta: f64,
    #[serde(default)]
    init_mean: f64,
    #[serde(default)]
    init_log_std: f64,
    #[serde(default = "default_gibbs_step")]
    step_size: f64,
    #[serde(default = "default_gibbs_iters")]
    max_iters: usize,
    #[serde(default = "default_gibbs_tol")]
    tol: f64,
    #[serde(default)]
    out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct GibbsConfig {
    pub model: GaussianMeanModel,
    pub beta: f64,
    pub init_mean: f64,
    pub init_log_std: f64,
    pub step_size: f64,
    pub max_iters: usize,
    pub tol: f64,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AugmentationConfig {
    pub x: f64,
    pub theta: f64,
    pub obs_var: f64,
    pub noise_std: f64,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default)]
    pub seed: u64,
}

fn config_error(message: String) -> PibError {
    PibError::InvalidArgument(format!("config: {message}"))
}

fn from_value<T: serde::de::DeserializeOwned>(value: Value) -> Result<T> {
    serde_json::from_value(value).map_err(|e| config_error(e.to_string()))
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| config_error(format!("invalid JSON: {e}")))?;
    let mut object = match value {
        Value::Object(map) => map,
        other => return Err(config_error(format!("expected a JSON object, got {other}"))),
    };
    let mode = match object.remove("mode") {
        Some(Value::String(s)) => s,
        Some(other) => {
            return Err(config_error(format!(
                "\"mode\" must be a string, got {other}"
            )))
        }
        None => return Err(config_error("missing the top-level \"mode\" key".into())),
    };
    let rest = Value::Object(object);
    let config = match mode.as_str() {
        "curve" => RunConfig::Curve(validate_curve(from_value(rest)?)?),
        "conjugate_limits" => {
            let raw: ConjugateLimitsRaw = from_value(rest)?;
            RunConfig::ConjugateLimits(ConjugateLimitsConfig {
                model: ModelSpec::from_value(raw.model)?,
                betas: raw.betas,
                out: raw.out,
            })
        }
        "gibbs" => {
            let raw: GibbsRaw = from_value(rest)?;
            let model = match ModelSpec::from_value(raw.model)?.0 {
                ConjugateModel::GaussianMean(m) => m,
                _ => {
                    return Err(config_error(
                        "gibbs mode requires a gaussian_mean model".into(),
                    ))
                }
            };
            RunConfig::Gibbs(GibbsConfig {
                model,
                beta: raw.beta,
                init_mean: raw.init_mean,
                init_log_std: raw.init_log_std,
                step_size: raw.step_size,
                max_iters: raw.max_iters,
                tol: raw.tol,
                out: raw.out,
            })
        }
        "augmentation" => RunConfig::Augmentation(from_value(rest)?),
        "verify" => RunConfig::Verify(from_value(rest)?),
        other => {
            return Err(config_error(format!(
                "unknown mode {other:?} (expected curve, conjugate_limits, gibbs, \
                 augmentation, or verify)"
            )))
        }
    };
    Ok(config)
}

fn validate_curve(cfg: CurveConfig) -> Result<CurveConfig> {
    if cfg.betas.is_empty() {
        return Err(config_error("curve mode needs a non-empty beta grid".into()));
    }
    for &beta in &cfg.betas {
        if !beta.is_finite() || !(0.0..1.0).contains(&beta) {
            return Err(config_error(format!(
                "curve betas must lie in [0, 1), got {beta}"
            )));
        }
    }
    for pair in cfg.betas.windows(2) {
        if pair[0] >= pair[1] {
            return Err(config_error(
                "curve betas must be strictly increasing".into(),
            ));
        }
    }
    if cfg.k_theta == 0 {
        return Err(config_error("k_theta must be at least 1".into()));
    }
    Ok(cfg)
}
