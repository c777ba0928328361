//! Gibbs variational inference for the Gaussian mean model.
//!
//! The representation is restricted to a Gaussian family q(θ) = N(μ, s²)
//! with s = exp(log_std), and the functional
//!
//!   F(μ, log_std) = KL(q ‖ prior) − β · Σ_i E_q[ log N(x_i; θ, σ²) ]
//!
//! is minimized by plain fixed-step gradient descent. Every expectation is
//! closed-form, so gradients are exact and the finite-difference check is
//! deterministic. Because the family contains the true tempered posterior,
//! the restricted optimum coincides with [`crate::conjugate::gaussian_power`]
//! and the minimized value equals −log Z.

use crate::conjugate::GaussianMeanModel;
use crate::error::{PibError, Result};

/// Mean and log-standard-deviation of the Gaussian representation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianVariationalParams {
    pub mean: f64,
    pub log_std: f64,
}

impl GaussianVariationalParams {
    pub fn new(mean: f64, log_std: f64) -> Result<Self> {
        if !mean.is_finite() || !log_std.is_finite() {
            return Err(PibError::InvalidArgument(
                "variational parameters must be finite".into(),
            ));
        }
        Ok(GaussianVariationalParams { mean, log_std })
    }

    pub fn std(&self) -> f64 {
        self.log_std.exp()
    }

    pub fn var(&self) -> f64 {
        (2.0 * self.log_std).exp()
    }
}

/// The model and temperature the functional is evaluated against.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsObjectiveSpec {
    pub model: GaussianMeanModel,
    pub beta: f64,
}

impl GibbsObjectiveSpec {
    pub fn new(model: GaussianMeanModel, beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(PibError::InvalidArgument(format!(
                "beta must be finite and non-negative, got {beta}"
            )));
        }
        Ok(GibbsObjectiveSpec { model, beta })
    }
}

/// F(μ, log_std) in closed form.
///
/// KL(N(μ,s²) ‖ N(μ₀,v₀)) = ½·(s²/v₀ + (μ−μ₀)²/v₀ − 1 + ln(v₀/s²)) and
/// E_q[log N(x; θ, σ²)] = −½·ln(2πσ²) − ((x−μ)² + s²)/(2σ²).
pub fn gibbs_objective(params: &GaussianVariationalParams, spec: &GibbsObjectiveSpec) -> f64 {
    let m = &spec.model;
    let s2 = params.var();
    let kl = 0.5
        * (s2 / m.prior_var + (params.mean - m.prior_mean).powi(2) / m.prior_var - 1.0
            + (m.prior_var / s2).ln());
    let ln_norm = 0.5 * (2.0 * std::f64::consts::PI * m.obs_var).ln();
    let expected_neg_log_lik: f64 = m
        .data
        .iter()
        .map(|&x| ln_norm + ((x - params.mean).powi(2) + s2) / (2.0 * m.obs_var))
        .sum();
    kl + spec.beta * expected_neg_log_lik
}

/// Analytic gradient of [`gibbs_objective`] in the (mean, log_std)
/// coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gradient {
    pub d_mean: f64,
    pub d_log_std: f64,
}

impl Gradient {
    pub fn norm(&self) -> f64 {
        self.d_mean.hypot(self.d_log_std)
    }
}

pub fn gibbs_gradient(params: &GaussianVariationalParams, spec: &GibbsObjectiveSpec) -> Gradient {
    let m = &spec.model;
    let s2 = params.var();
    let d_mean = (params.mean - m.prior_mean) / m.prior_var
        + spec.beta * m.data.iter().map(|&x| (params.mean - x) / m.obs_var).sum::<f64>();
    // d(s²)/d(log_std) = 2s², so each ½·s² term contributes s².
    let d_log_std =
        s2 / m.prior_var - 1.0 + spec.beta * m.len() as f64 * s2 / m.obs_var;
    Gradient { d_mean, d_log_std }
}

/// Central finite differences with step `h` on each coordinate; the
/// verification oracle for [`gibbs_gradient`].
pub fn finite_difference_gradient(
    params: &GaussianVariationalParams,
    spec: &GibbsObjectiveSpec,
    h: f64,
) -> Result<Gradient> {
    if h <= 0.0 || !h.is_finite() {
        return Err(PibError::InvalidArgument(format!(
            "finite-difference step must be positive, got {h}"
        )));
    }
    let at = |mean: f64, log_std: f64| {
        gibbs_objective(&GaussianVariationalParams { mean, log_std }, spec)
    };
    let d_mean =
        (at(params.mean + h, params.log_std) - at(params.mean - h, params.log_std)) / (2.0 * h);
    let d_log_std =
        (at(params.mean, params.log_std + h) - at(params.mean, params.log_std - h)) / (2.0 * h);
    Ok(Gradient { d_mean, d_log_std })
}

/// Descent trace for [`gibbs_optimize`].
#[derive(Debug, Clone)]
pub struct OptimizeResult {
    pub params: GaussianVariationalParams,
    /// Objective value at the initial point and after every step.
    pub trace: Vec<f64>,
    /// Parameters visited, aligned with `trace`.
    pub params_trace: Vec<GaussianVariationalParams>,
    pub iterations: usize,
    pub converged: bool,
}

const DIVERGENCE_PATIENCE: usize = 100;

/// Fixed-step gradient descent on the functional until the gradient norm
/// drops below `tol` or the iteration budget runs out. One hundred
/// consecutive objective increases abort with a divergence error.
pub fn gibbs_optimize(
    spec: &GibbsObjectiveSpec,
    init: GaussianVariationalParams,
    step_size: f64,
    max_iters: usize,
    tol: f64,
) -> Result<OptimizeResult> {
    if step_size <= 0.0 || !step_size.is_finite() {
        return Err(PibError::InvalidArgument(format!(
            "step size must be positive, got {step_size}"
        )));
    }
    if tol <= 0.0 || !tol.is_finite() {
        return Err(PibError::InvalidArgument("tol must be positive".into()));
    }
    let mut params = init;
    let mut objective = gibbs_objective(&params, spec);
    let mut trace = vec![objective];
    let mut params_trace = vec![params];
    let mut increases = 0usize;
    let mut converged = false;
    let mut iterations = 0usize;

    for it in 1..=max_iters {
        let grad = gibbs_gradient(&params, spec);
        if grad.norm() < tol {
            converged = true;
            break;
        }
        params = GaussianVariationalParams {
            mean: params.mean - step_size * grad.d_mean,
            log_std: params.log_std - step_size * grad.d_log_std,
        };
        let next = gibbs_objective(&params, spec);
        trace.push(next);
        params_trace.push(params);
        if !next.is_finite() {
            return Err(PibError::NumericalFailure(
                "objective left the finite range during descent".into(),
            ));
        }
        if next > objective {
            increases += 1;
            if increases >= DIVERGENCE_PATIENCE {
                return Err(PibError::Divergence(DIVERGENCE_PATIENCE));
            }
        } else {
            increases = 0;
        }
        objective = next;
        iterations = it;
    }
    if !converged {
        // The budget may end exactly at a stationary point.
        converged = gibbs_gradient(&params, spec).norm() < tol;
    }
    Ok(OptimizeResult {
        params,
        trace,
        params_trace,
        iterations,
        converged,
    })
}
