//! Closed-form power posteriors for three conjugate families.
//!
//! A power posterior is proportional to prior × likelihood^β. For the
//! families here the update is a conjugate one in which β multiplies the
//! data sufficient statistics only, never the prior, and the partition
//! function log Z = log ∫ q(θ) Π q(x_i|θ)^β dθ has a closed form.
//!
//! The temperature limits are executable: β → 0 recovers the prior
//! (prior predictive inference), β = 1 is standard Bayes bitwise, and
//! large β concentrates the posterior on the maximum-likelihood solution.
//! [`limit_diagnostics`] reports all three on a caller-supplied schedule.

use statrs::function::beta::ln_beta;
use statrs::function::gamma::ln_gamma;

use crate::error::{PibError, Result};

/// Beta prior over a Bernoulli success probability, with observed counts.
#[derive(Debug, Clone, PartialEq)]
pub struct BetaBernoulliModel {
    pub prior_a: f64,
    pub prior_b: f64,
    /// Number of successes among the trials.
    pub successes: u64,
    /// Number of Bernoulli trials.
    pub trials: u64,
}

impl BetaBernoulliModel {
    pub fn new(prior_a: f64, prior_b: f64, successes: u64, trials: u64) -> Result<Self> {
        if !(prior_a > 0.0 && prior_a.is_finite()) || !(prior_b > 0.0 && prior_b.is_finite()) {
            return Err(PibError::InvalidArgument(
                "Beta prior shapes must be positive and finite".into(),
            ));
        }
        if successes > trials {
            return Err(PibError::InvalidArgument(format!(
                "{successes} successes exceed {trials} trials"
            )));
        }
        Ok(BetaBernoulliModel {
            prior_a,
            prior_b,
            successes,
            trials,
        })
    }
}

/// Gaussian prior over an unknown mean with known observation variance.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMeanModel {
    pub prior_mean: f64,
    pub prior_var: f64,
    pub obs_var: f64,
    pub data: Vec<f64>,
}

impl GaussianMeanModel {
    pub fn new(prior_mean: f64, prior_var: f64, obs_var: f64, data: Vec<f64>) -> Result<Self> {
        if !(prior_var > 0.0 && prior_var.is_finite()) {
            return Err(PibError::InvalidArgument(
                "prior variance must be positive and finite".into(),
            ));
        }
        if !(obs_var > 0.0 && obs_var.is_finite()) {
            return Err(PibError::InvalidArgument(
                "observation variance must be positive and finite".into(),
            ));
        }
        if !prior_mean.is_finite() || data.iter().any(|v| !v.is_finite()) {
            return Err(PibError::InvalidArgument(
                "means and observations must be finite".into(),
            ));
        }
        Ok(GaussianMeanModel {
            prior_mean,
            prior_var,
            obs_var,
            data,
        })
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    pub fn sum_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

/// Dirichlet prior over categorical probabilities, with observed counts.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletCategoricalModel {
    pub prior_alphas: Vec<f64>,
    pub counts: Vec<u64>,
}

impl DirichletCategoricalModel {
    pub fn new(prior_alphas: Vec<f64>, counts: Vec<u64>) -> Result<Self> {
        if prior_alphas.is_empty() {
            return Err(PibError::EmptyAlphabet(
                "Dirichlet needs at least one category".into(),
            ));
        }
        if prior_alphas.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(PibError::InvalidArgument(
                "Dirichlet concentrations must be positive and finite".into(),
            ));
        }
        if counts.len() != prior_alphas.len() {
            return Err(PibError::DimensionMismatch(format!(
                "{} counts for {} categories",
                counts.len(),
                prior_alphas.len()
            )));
        }
        Ok(DirichletCategoricalModel {
            prior_alphas,
            counts,
        })
    }
}

/// Any of the supported conjugate models.
#[derive(Debug, Clone, PartialEq)]
pub enum ConjugateModel {
    BetaBernoulli(BetaBernoulliModel),
    GaussianMean(GaussianMeanModel),
    DirichletCategorical(DirichletCategoricalModel),
}

/// Posterior parameters by family.
#[derive(Debug, Clone, PartialEq)]
pub enum PosteriorParams {
    Beta { a: f64, b: f64 },
    Gaussian { mean: f64, var: f64 },
    Dirichlet { alphas: Vec<f64> },
}

/// A tempered posterior together with its log-partition value
/// log Z = log ∫ q(θ) Π q(x_i|θ)^β dθ.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerPosterior {
    pub params: PosteriorParams,
    pub log_partition: f64,
}

impl PowerPosterior {
    /// Posterior mean as a vector (one entry per parameter component).
    pub fn mean(&self) -> Vec<f64> {
        match &self.params {
            PosteriorParams::Beta { a, b } => vec![a / (a + b)],
            PosteriorParams::Gaussian { mean, .. } => vec![*mean],
            PosteriorParams::Dirichlet { alphas } => {
                let s: f64 = alphas.iter().sum();
                alphas.iter().map(|a| a / s).collect()
            }
        }
    }

    /// A scalar spread measure: the variance for Beta and Gaussian, the
    /// largest component variance for Dirichlet.
    pub fn variance(&self) -> f64 {
        match &self.params {
            PosteriorParams::Beta { a, b } => {
                let s = a + b;
                a * b / (s * s * (s + 1.0))
            }
            PosteriorParams::Gaussian { var, .. } => *var,
            PosteriorParams::Dirichlet { alphas } => {
                let s: f64 = alphas.iter().sum();
                alphas
                    .iter()
                    .map(|a| a * (s - a) / (s * s * (s + 1.0)))
                    .fold(0.0, f64::max)
            }
        }
    }

    /// Flat list of the distribution parameters, used for distances.
    pub fn flat_params(&self) -> Vec<f64> {
        match &self.params {
            PosteriorParams::Beta { a, b } => vec![*a, *b],
            PosteriorParams::Gaussian { mean, var } => vec![*mean, *var],
            PosteriorParams::Dirichlet { alphas } => alphas.clone(),
        }
    }
}

fn require_beta_valid(beta: f64) -> Result<()> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(PibError::InvalidArgument(format!(
            "tempering exponent must be finite and non-negative, got {beta}"
        )));
    }
    Ok(())
}

/// Tempered Beta–Bernoulli update: Beta(a + β·k, b + β·(n−k)), with
/// log Z = ln B(a + β·k, b + β·(n−k)) − ln B(a, b).
pub fn beta_bernoulli_power(m: &BetaBernoulliModel, beta: f64) -> Result<PowerPosterior> {
    require_beta_valid(beta)?;
    let k = m.successes as f64;
    let n = m.trials as f64;
    let a = m.prior_a + beta * k;
    let b = m.prior_b + beta * (n - k);
    let log_partition = ln_beta(a, b) - ln_beta(m.prior_a, m.prior_b);
    Ok(PowerPosterior {
        params: PosteriorParams::Beta { a, b },
        log_partition,
    })
}

/// Tempered Gaussian-mean update in precision form, with the Gaussian
/// integral for log Z carried out in closed form.
pub fn gaussian_power(m: &GaussianMeanModel, beta: f64) -> Result<PowerPosterior> {
    require_beta_valid(beta)?;
    let n = m.len() as f64;
    let prior_prec = 1.0 / m.prior_var;
    let post_prec = prior_prec + beta * n / m.obs_var;
    let weighted = m.prior_mean * prior_prec + beta * m.sum() / m.obs_var;
    let mean = weighted / post_prec;
    let var = 1.0 / post_prec;

    // log Z = −(βn/2)·ln(2πσ²) − ½·ln(v₀·P) + P·m²/2 − μ₀²/(2v₀) − β·Σx²/(2σ²)
    let log_partition = -0.5 * beta * n * (2.0 * std::f64::consts::PI * m.obs_var).ln()
        - 0.5 * (m.prior_var * post_prec).ln()
        + 0.5 * post_prec * mean * mean
        - 0.5 * m.prior_mean * m.prior_mean * prior_prec
        - 0.5 * beta * m.sum_sq() / m.obs_var;

    Ok(PowerPosterior {
        params: PosteriorParams::Gaussian { mean, var },
        log_partition,
    })
}

/// Tempered Dirichlet–categorical update: α_j + β·c_j, with log Z as a
/// multivariate-Beta difference.
pub fn dirichlet_categorical_power(
    m: &DirichletCategoricalModel,
    beta: f64,
) -> Result<PowerPosterior> {
    require_beta_valid(beta)?;
    let alphas: Vec<f64> = m
        .prior_alphas
        .iter()
        .zip(&m.counts)
        .map(|(&a, &c)| a + beta * c as f64)
        .collect();
    let log_partition = ln_multivariate_beta(&alphas) - ln_multivariate_beta(&m.prior_alphas);
    Ok(PowerPosterior {
        params: PosteriorParams::Dirichlet { alphas },
        log_partition,
    })
}

fn ln_multivariate_beta(alphas: &[f64]) -> f64 {
    let sum: f64 = alphas.iter().sum();
    alphas.iter().map(|&a| ln_gamma(a)).sum::<f64>() - ln_gamma(sum)
}

/// Tempered update dispatched by family.
pub fn power_posterior(model: &ConjugateModel, beta: f64) -> Result<PowerPosterior> {
    match model {
        ConjugateModel::BetaBernoulli(m) => beta_bernoulli_power(m, beta),
        ConjugateModel::GaussianMean(m) => gaussian_power(m, beta),
        ConjugateModel::DirichletCategorical(m) => dirichlet_categorical_power(m, beta),
    }
}

/// The untempered conjugate update, computed by the conventional
/// count-addition formulas rather than through the β machinery. Used as
/// the independent oracle for the β = 1 row of the limit diagnostics.
pub fn standard_bayes(model: &ConjugateModel) -> PosteriorParams {
    match model {
        ConjugateModel::BetaBernoulli(m) => PosteriorParams::Beta {
            a: m.prior_a + m.successes as f64,
            b: m.prior_b + (m.trials - m.successes) as f64,
        },
        ConjugateModel::GaussianMean(m) => {
            let post_prec = 1.0 / m.prior_var + m.len() as f64 / m.obs_var;
            PosteriorParams::Gaussian {
                mean: (m.prior_mean / m.prior_var + m.sum() / m.obs_var) / post_prec,
                var: 1.0 / post_prec,
            }
        }
        ConjugateModel::DirichletCategorical(m) => PosteriorParams::Dirichlet {
            alphas: m
                .prior_alphas
                .iter()
                .zip(&m.counts)
                .map(|(&a, &c)| a + c as f64)
                .collect(),
        },
    }
}

/// Maximum-likelihood point of a model, as a parameter vector matching
/// [`PowerPosterior::mean`]. Undefined on empty data.
pub fn maximum_likelihood(model: &ConjugateModel) -> Result<Vec<f64>> {
    match model {
        ConjugateModel::BetaBernoulli(m) => {
            if m.trials == 0 {
                return Err(PibError::MleUndefined);
            }
            Ok(vec![m.successes as f64 / m.trials as f64])
        }
        ConjugateModel::GaussianMean(m) => {
            if m.is_empty() {
                return Err(PibError::MleUndefined);
            }
            Ok(vec![m.sum() / m.len() as f64])
        }
        ConjugateModel::DirichletCategorical(m) => {
            let total: u64 = m.counts.iter().sum();
            if total == 0 {
                return Err(PibError::MleUndefined);
            }
            Ok(m
                .counts
                .iter()
                .map(|&c| c as f64 / total as f64)
                .collect())
        }
    }
}

fn linf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// One row of a limit report.
#[derive(Debug, Clone)]
pub struct LimitRow {
    pub beta: f64,
    pub posterior: PowerPosterior,
    /// L∞ distance between posterior and prior parameters.
    pub prior_distance: f64,
    /// L∞ distance between posterior mean and the MLE point.
    pub mle_distance: f64,
    /// Scalar posterior spread (see [`PowerPosterior::variance`]).
    pub variance: f64,
}

/// Executable summary of the temperature limits on a β schedule.
#[derive(Debug, Clone)]
pub struct LimitReport {
    pub rows: Vec<LimitRow>,
    /// Posterior-to-prior parameter distance at the smallest scheduled β.
    pub small_beta_prior_distance: f64,
    /// Whether the β = 1 posterior matches the standard conjugate update
    /// parameter-for-parameter, bitwise.
    pub bayes_exact_match: bool,
    /// Posterior-mean-to-MLE distance at the largest scheduled β.
    pub large_beta_mle_distance: f64,
    /// Posterior spread at the largest scheduled β.
    pub large_beta_variance: f64,
}

fn prior_params(model: &ConjugateModel) -> Vec<f64> {
    match model {
        ConjugateModel::BetaBernoulli(m) => vec![m.prior_a, m.prior_b],
        ConjugateModel::GaussianMean(m) => vec![m.prior_mean, m.prior_var],
        ConjugateModel::DirichletCategorical(m) => m.prior_alphas.clone(),
    }
}

/// Runs the tempered update across a schedule that must probe all three
/// limits: some β ≤ 1e-6, β = 1 exactly, and some β ≥ 1e4.
pub fn limit_diagnostics(model: &ConjugateModel, schedule: &[f64]) -> Result<LimitReport> {
    if !schedule.iter().any(|&b| b <= 1e-6) {
        return Err(PibError::InvalidArgument(
            "schedule must include a small beta (<= 1e-6)".into(),
        ));
    }
    if !schedule.contains(&1.0) {
        return Err(PibError::InvalidArgument(
            "schedule must include beta = 1".into(),
        ));
    }
    if !schedule.iter().any(|&b| b >= 1e4) {
        return Err(PibError::InvalidArgument(
            "schedule must include a large beta (>= 1e4)".into(),
        ));
    }
    let mle = maximum_likelihood(model)?;
    let prior = prior_params(model);

    let mut rows = Vec::with_capacity(schedule.len());
    for &beta in schedule {
        let posterior = power_posterior(model, beta)?;
        rows.push(LimitRow {
            beta,
            prior_distance: linf(&posterior.flat_params(), &prior),
            mle_distance: linf(&posterior.mean(), &mle),
            variance: posterior.variance(),
            posterior,
        });
    }

    let small = rows
        .iter()
        .min_by(|a, b| a.beta.total_cmp(&b.beta))
        .expect("non-empty schedule");
    let large = rows
        .iter()
        .max_by(|a, b| a.beta.total_cmp(&b.beta))
        .expect("non-empty schedule");
    let bayes_row = rows.iter().find(|r| r.beta == 1.0).expect("checked above");
    let bayes_exact_match =
        bayes_row.posterior.flat_params() == flat_of(&standard_bayes(model));

    Ok(LimitReport {
        small_beta_prior_distance: small.prior_distance,
        large_beta_mle_distance: large.mle_distance,
        large_beta_variance: large.variance,
        bayes_exact_match,
        rows,
    })
}

fn flat_of(params: &PosteriorParams) -> Vec<f64> {
    match params {
        PosteriorParams::Beta { a, b } => vec![*a, *b],
        PosteriorParams::Gaussian { mean, var } => vec![*mean, *var],
        PosteriorParams::Dirichlet { alphas } => alphas.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bb_3_of_4() -> BetaBernoulliModel {
        BetaBernoulliModel::new(1.0, 1.0, 3, 4).unwrap()
    }

    #[test]
    fn beta_bernoulli_half_tempered() {
        let p = beta_bernoulli_power(&bb_3_of_4(), 0.5).unwrap();
        assert_eq!(
            p.params,
            PosteriorParams::Beta { a: 2.5, b: 1.5 }
        );
    }

    #[test]
    fn beta_bernoulli_at_one_is_standard_bayes() {
        let m = bb_3_of_4();
        let p = beta_bernoulli_power(&m, 1.0).unwrap();
        // Untempered conjugate oracle.
        let oracle = standard_bayes(&ConjugateModel::BetaBernoulli(m));
        assert_eq!(p.params, oracle);
        assert_eq!(p.params, PosteriorParams::Beta { a: 4.0, b: 2.0 });
    }

    #[test]
    fn beta_bernoulli_at_zero_ignores_data() {
        let p = beta_bernoulli_power(&bb_3_of_4(), 0.0).unwrap();
        assert_eq!(p.params, PosteriorParams::Beta { a: 1.0, b: 1.0 });
        assert_eq!(p.log_partition, 0.0);
    }

    fn gauss_single_two() -> GaussianMeanModel {
        GaussianMeanModel::new(0.0, 1.0, 1.0, vec![2.0]).unwrap()
    }

    #[test]
    fn gaussian_untempered_update() {
        let p = gaussian_power(&gauss_single_two(), 1.0).unwrap();
        match p.params {
            PosteriorParams::Gaussian { mean, var } => {
                assert_abs_diff_eq!(mean, 1.0, epsilon = 1e-15);
                assert_abs_diff_eq!(var, 0.5, epsilon = 1e-15);
            }
            _ => panic!("wrong family"),
        }
        // At β=1 the partition function is the marginal likelihood
        // N(2; 0, 1+1), an independent closed form.
        let marginal = -0.5 * (2.0 * std::f64::consts::PI * 2.0).ln() - 0.5 * 4.0 / 2.0;
        assert_abs_diff_eq!(p.log_partition, marginal, epsilon = 1e-12);
    }

    #[test]
    fn gaussian_tempered_thrice() {
        let p = gaussian_power(&gauss_single_two(), 3.0).unwrap();
        match p.params {
            PosteriorParams::Gaussian { mean, var } => {
                assert_abs_diff_eq!(mean, 1.5, epsilon = 1e-15);
                assert_abs_diff_eq!(var, 0.25, epsilon = 1e-15);
            }
            _ => panic!("wrong family"),
        }
    }

    #[test]
    fn any_family_at_zero_returns_the_prior() {
        let g = gaussian_power(&gauss_single_two(), 0.0).unwrap();
        assert_eq!(
            g.params,
            PosteriorParams::Gaussian { mean: 0.0, var: 1.0 }
        );
        assert_eq!(g.log_partition, 0.0);

        let d = DirichletCategoricalModel::new(vec![1.0, 1.0, 1.0], vec![2, 0, 1]).unwrap();
        let p = dirichlet_categorical_power(&d, 0.0).unwrap();
        assert_eq!(
            p.params,
            PosteriorParams::Dirichlet { alphas: vec![1.0, 1.0, 1.0] }
        );
        assert_abs_diff_eq!(p.log_partition, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn dirichlet_double_tempered() {
        let d = DirichletCategoricalModel::new(vec![1.0, 1.0, 1.0], vec![2, 0, 1]).unwrap();
        let p = dirichlet_categorical_power(&d, 2.0).unwrap();
        assert_eq!(
            p.params,
            PosteriorParams::Dirichlet { alphas: vec![5.0, 1.0, 3.0] }
        );
    }

    #[test]
    fn dirichlet_at_one_is_standard_bayes() {
        let d = DirichletCategoricalModel::new(vec![0.5, 2.0, 1.0], vec![4, 1, 0]).unwrap();
        let p = dirichlet_categorical_power(&d, 1.0).unwrap();
        let oracle = standard_bayes(&ConjugateModel::DirichletCategorical(d));
        assert_eq!(p.params, oracle);
    }

    #[test]
    fn integer_temper_equals_replicated_bayes() {
        // β = m on data D equals standard Bayes on D replicated m times.
        let m = 3u64;
        let bb = bb_3_of_4();
        let tempered = beta_bernoulli_power(&bb, m as f64).unwrap();
        let replicated = BetaBernoulliModel::new(
            bb.prior_a,
            bb.prior_b,
            bb.successes * m,
            bb.trials * m,
        )
        .unwrap();
        let oracle = standard_bayes(&ConjugateModel::BetaBernoulli(replicated));
        assert_eq!(tempered.params, oracle);

        let g = GaussianMeanModel::new(0.5, 2.0, 1.5, vec![1.0, -0.25, 3.0]).unwrap();
        let tempered = gaussian_power(&g, 2.0).unwrap();
        let mut doubled = g.data.clone();
        doubled.extend_from_slice(&g.data);
        let replicated = GaussianMeanModel::new(0.5, 2.0, 1.5, doubled).unwrap();
        let oracle = standard_bayes(&ConjugateModel::GaussianMean(replicated));
        match (tempered.params, oracle) {
            (
                PosteriorParams::Gaussian { mean: m1, var: v1 },
                PosteriorParams::Gaussian { mean: m2, var: v2 },
            ) => {
                assert_abs_diff_eq!(m1, m2, epsilon = 1e-14);
                assert_abs_diff_eq!(v1, v2, epsilon = 1e-14);
            }
            _ => panic!("wrong family"),
        }
    }

    #[test]
    fn sequential_half_tempering_composes() {
        let bb = bb_3_of_4();
        let beta = 0.8;
        let once = beta_bernoulli_power(&bb, beta).unwrap();
        let half = beta_bernoulli_power(&bb, beta / 2.0).unwrap();
        let (a1, b1) = match half.params {
            PosteriorParams::Beta { a, b } => (a, b),
            _ => unreachable!(),
        };
        let again = beta_bernoulli_power(
            &BetaBernoulliModel::new(a1, b1, bb.successes, bb.trials).unwrap(),
            beta / 2.0,
        )
        .unwrap();
        let (a2, b2) = match again.params {
            PosteriorParams::Beta { a, b } => (a, b),
            _ => unreachable!(),
        };
        let (af, bf) = match once.params {
            PosteriorParams::Beta { a, b } => (a, b),
            _ => unreachable!(),
        };
        assert_abs_diff_eq!(a2, af, epsilon = 1e-12);
        assert_abs_diff_eq!(b2, bf, epsilon = 1e-12);
    }

    #[test]
    fn log_partition_matches_quadrature() {
        // exp(log Z) against a 10^5-point trapezoid over [0, 1].
        let bb = bb_3_of_4();
        for beta in [0.5, 1.0, 2.0] {
            let p = beta_bernoulli_power(&bb, beta).unwrap();
            let z = trapezoid_partition(&bb, beta, 100_000);
            assert_abs_diff_eq!(p.log_partition.exp(), z, epsilon = 1e-8);
        }
    }

    fn trapezoid_partition(m: &BetaBernoulliModel, beta: f64, points: usize) -> f64 {
        // Independent route: prior density × likelihood^β on a uniform grid.
        let ln_b_prior = ln_beta(m.prior_a, m.prior_b);
        let f = |theta: f64| -> f64 {
            if theta <= 0.0 || theta >= 1.0 {
                // Integrand limit is 0 for the (1,1)-prior cases used here.
                return 0.0;
            }
            let prior = ((m.prior_a - 1.0) * theta.ln()
                + (m.prior_b - 1.0) * (1.0 - theta).ln()
                - ln_b_prior)
                .exp();
            let lik = (beta
                * (m.successes as f64 * theta.ln()
                    + (m.trials - m.successes) as f64 * (1.0 - theta).ln()))
            .exp();
            prior * lik
        };
        let h = 1.0 / (points - 1) as f64;
        let mut sum = 0.5 * (f(0.0) + f(1.0));
        for i in 1..points - 1 {
            sum += f(i as f64 * h);
        }
        sum * h
    }

    #[test]
    fn variance_is_monotone_in_beta() {
        let grid: Vec<f64> = (0..30).map(|i| i as f64 * 0.5).collect();
        let bb = ConjugateModel::BetaBernoulli(bb_3_of_4());
        let g = ConjugateModel::GaussianMean(
            GaussianMeanModel::new(0.0, 1.0, 1.0, vec![1.0, 3.0]).unwrap(),
        );
        let d = ConjugateModel::DirichletCategorical(
            DirichletCategoricalModel::new(vec![1.0, 1.0, 1.0], vec![2, 0, 1]).unwrap(),
        );
        for model in [bb, g, d] {
            let mut last = f64::INFINITY;
            for &beta in &grid {
                let v = power_posterior(&model, beta).unwrap().variance();
                assert!(
                    v <= last + 1e-12,
                    "variance increased from {last} to {v} at beta {beta}"
                );
                last = v;
            }
        }
    }

    #[test]
    fn limit_diagnostics_hits_all_three_limits() {
        let model = ConjugateModel::BetaBernoulli(bb_3_of_4());
        let report =
            limit_diagnostics(&model, &[1e-9, 1e-6, 0.5, 1.0, 1e4, 1e6]).unwrap();
        assert!(report.small_beta_prior_distance < 1e-6);
        assert!(report.bayes_exact_match);
        assert!(report.large_beta_mle_distance < 1e-5);
        assert!(report.large_beta_variance < 1e-6);
        // β=1e6 posterior mean near the MLE 0.75.
        let big = report
            .rows
            .iter()
            .find(|r| r.beta == 1e6)
            .unwrap();
        assert_abs_diff_eq!(big.posterior.mean()[0], 0.75, epsilon = 1e-5);
    }

    #[test]
    fn limit_diagnostics_gaussian_and_dirichlet() {
        let g = ConjugateModel::GaussianMean(gauss_single_two());
        let report = limit_diagnostics(&g, &[1e-9, 1.0, 1e6]).unwrap();
        assert!(report.small_beta_prior_distance < 1e-6);
        assert!(report.bayes_exact_match);
        assert!(report.large_beta_mle_distance < 1e-5);
        assert!(report.large_beta_variance < 1e-6);

        let d = ConjugateModel::DirichletCategorical(
            DirichletCategoricalModel::new(vec![1.0, 1.0, 1.0], vec![2, 0, 1]).unwrap(),
        );
        let report = limit_diagnostics(&d, &[1e-9, 1.0, 1e6]).unwrap();
        assert!(report.small_beta_prior_distance < 1e-6);
        assert!(report.bayes_exact_match);
        assert!(report.large_beta_mle_distance < 1e-5);
        assert!(report.large_beta_variance < 1e-6);
    }

    #[test]
    fn limit_diagnostics_requires_a_full_schedule() {
        let model = ConjugateModel::BetaBernoulli(bb_3_of_4());
        assert!(limit_diagnostics(&model, &[0.5, 1.0, 1e6]).is_err());
        assert!(limit_diagnostics(&model, &[1e-9, 0.5, 1e6]).is_err());
        assert!(limit_diagnostics(&model, &[1e-9, 1.0, 100.0]).is_err());
    }

    #[test]
    fn mle_undefined_on_empty_data() {
        let model = ConjugateModel::BetaBernoulli(
            BetaBernoulliModel::new(2.0, 2.0, 0, 0).unwrap(),
        );
        assert!(matches!(
            limit_diagnostics(&model, &[1e-9, 1.0, 1e6]).unwrap_err(),
            PibError::MleUndefined
        ));
    }

    #[test]
    fn validation_rejects_bad_shapes() {
        assert!(BetaBernoulliModel::new(0.0, 1.0, 0, 1).is_err());
        assert!(BetaBernoulliModel::new(1.0, 1.0, 2, 1).is_err());
        assert!(GaussianMeanModel::new(0.0, 0.0, 1.0, vec![]).is_err());
        assert!(GaussianMeanModel::new(0.0, 1.0, -1.0, vec![]).is_err());
        assert!(DirichletCategoricalModel::new(vec![], vec![]).is_err());
        assert!(DirichletCategoricalModel::new(vec![1.0, -1.0], vec![0, 0]).is_err());
        assert!(DirichletCategoricalModel::new(vec![1.0], vec![0, 0]).is_err());
    }
}
