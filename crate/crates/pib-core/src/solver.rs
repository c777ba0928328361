//! Bottleneck optimization over representation channels on finite worlds.
//!
//! The objective minimized here is
//!
//! ```text
//!     I(θ; X_P | X_F) − β · I(θ; X_P),        β ∈ [0, 1),
//! ```
//!
//! which by the chain rule equals (1−β)·I(θ;X_P) − I(θ;X_F). Dividing by
//! (1−β) > 0 turns it into a classical information-bottleneck problem with
//! source X_P, relevance variable X_F, and effective trade-off 1/(1−β), so
//! [`ba_solve`] runs the self-consistent fixed-point iteration at that
//! temperature:
//!
//!   p(θ)      ← Σ p(x_P) p(θ|x_P)
//!   p(x_F|θ)  ← Σ p(x_F|x_P) p(x_P|θ)
//!   p(θ|x_P)  ∝ p(θ) · exp( −1/(1−β) · KL(p(x_F|x_P) ‖ p(x_F|θ)) )
//!
//! For β ≥ 1 the objective is unbounded toward maximal-information channels
//! and the temperature diverges, so the solver rejects it; those limits are
//! exercised analytically by the conjugate module.
//!
//! The module also evaluates the table-valued variational objective
//!
//!   ⟨log p(θ|x_P)/q(θ)⟩ − β ( Σ_i ⟨log q(x_i|θ)⟩ + H(X_P) ),
//!
//! an upper bound on the exact objective for any prior q(θ) and factorized
//! likelihood q(x|θ) with consistent support. The H(X_P) constant is folded
//! in so the bound is directly comparable to the exact objective. The
//! optimal tables are closed-form: the aggregate marginal prior and the
//! per-symbol averaged likelihood. A tighter, future-conditioned prior
//! q(θ|x_F) is evaluated by [`conditional_prior_bound`]; with the exact
//! mixture Σ p(θ|x_P') p(x_P'|x_F) it recovers I(θ;X_P|X_F) itself.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand::SeedableRng;
use rayon::prelude::*;

use crate::error::{PibError, Result};
use crate::infotheory::{channel_joint, entropy, ChannelJoint};
use crate::world::{JointModel, INPUT_NORMALIZATION_TOL};

/// A representation channel p(θ | x_P): one probability row over the θ
/// alphabet per past dataset index.
#[derive(Debug, Clone, PartialEq)]
pub struct Channel {
    rows: Array2<f64>,
}

impl Channel {
    /// Validates rows: entries non-negative and finite, each row summing to
    /// one within 1e-9.
    pub fn new(rows: Array2<f64>) -> Result<Self> {
        for row in rows.rows() {
            let mut sum = 0.0;
            for &v in row {
                if !v.is_finite() || v < 0.0 {
                    return Err(PibError::InvalidDistribution(format!(
                        "negative or non-finite channel entry {v}"
                    )));
                }
                sum += v;
            }
            if (sum - 1.0).abs() >= INPUT_NORMALIZATION_TOL {
                return Err(PibError::InvalidDistribution(format!(
                    "channel row sums to {sum}"
                )));
            }
        }
        Ok(Channel { rows })
    }

    fn from_rows_unchecked(rows: Array2<f64>) -> Self {
        Channel { rows }
    }

    /// The channel that copies the past dataset index: θ = x_P, K_θ = n.
    pub fn identity(n: usize) -> Self {
        let mut rows = Array2::zeros((n, n));
        for i in 0..n {
            rows[(i, i)] = 1.0;
        }
        Channel { rows }
    }

    /// The channel that maps every input to a fixed θ atom.
    pub fn constant(n_inputs: usize, k_theta: usize, atom: usize) -> Self {
        assert!(atom < k_theta, "constant-channel atom out of range");
        let mut rows = Array2::zeros((n_inputs, k_theta));
        for i in 0..n_inputs {
            rows[(i, atom)] = 1.0;
        }
        Channel { rows }
    }

    /// The channel that ignores its input: θ uniform on its alphabet.
    pub fn uniform(n_inputs: usize, k_theta: usize) -> Self {
        Channel {
            rows: Array2::from_elem((n_inputs, k_theta), 1.0 / k_theta as f64),
        }
    }

    /// Rows drawn independently from a symmetric Dirichlet(1), i.e. uniform
    /// on the simplex.
    pub fn random<R: Rng>(n_inputs: usize, k_theta: usize, rng: &mut R) -> Self {
        let mut rows = Array2::zeros((n_inputs, k_theta));
        for i in 0..n_inputs {
            let row = sample_simplex(rng, k_theta);
            for (t, v) in row.into_iter().enumerate() {
                rows[(i, t)] = v;
            }
        }
        Channel { rows }
    }

    /// A copy of the channel with θ labels permuted: new column `perm[t]`
    /// is old column `t`.
    pub fn permute_theta(&self, perm: &[usize]) -> Result<Self> {
        let k = self.k_theta();
        if perm.len() != k {
            return Err(PibError::DimensionMismatch(format!(
                "permutation of length {} for {} theta labels",
                perm.len(),
                k
            )));
        }
        let mut seen = vec![false; k];
        for &t in perm {
            if t >= k || seen[t] {
                return Err(PibError::InvalidArgument(
                    "not a permutation of the theta alphabet".into(),
                ));
            }
            seen[t] = true;
        }
        let mut rows = Array2::zeros(self.rows.dim());
        for ((i, t), &v) in self.rows.indexed_iter() {
            rows[(i, perm[t])] = v;
        }
        Ok(Channel { rows })
    }

    pub fn n_inputs(&self) -> usize {
        self.rows.nrows()
    }

    pub fn k_theta(&self) -> usize {
        self.rows.ncols()
    }

    pub fn rows(&self) -> ArrayView2<'_, f64> {
        self.rows.view()
    }
}

/// One draw from the uniform distribution on the probability simplex
/// (symmetric Dirichlet(1)) via normalized unit exponentials.
pub fn sample_simplex<R: Rng>(rng: &mut R, k: usize) -> Vec<f64> {
    let mut draws: Vec<f64> = (0..k)
        .map(|_| {
            let u: f64 = rng.gen();
            -(1.0 - u).ln()
        })
        .collect();
    let sum: f64 = draws.iter().sum();
    if sum > 0.0 {
        for v in draws.iter_mut() {
            *v /= sum;
        }
    } else {
        draws = vec![1.0 / k as f64; k];
    }
    draws
}

#[cfg(test)]
pub(crate) fn test_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Settings for [`ba_solve`].
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Trade-off multiplier; must lie in [0, 1).
    pub beta: f64,
    /// Size of the θ alphabet.
    pub k_theta: usize,
    /// Independent random restarts; the best final objective wins.
    pub restarts: usize,
    /// Iteration budget per restart.
    pub max_iters: usize,
    /// Convergence threshold on the change of the exact objective.
    pub tol: f64,
    /// Base seed; restart r draws its initial channel from seed + r.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            beta: 0.0,
            k_theta: 2,
            restarts: 8,
            max_iters: 10_000,
            tol: 1e-10,
            seed: 0,
        }
    }
}

impl SolverConfig {
    fn validate(&self) -> Result<()> {
        if !self.beta.is_finite() || !(0.0..1.0).contains(&self.beta) {
            return Err(PibError::BetaOutOfRange(self.beta));
        }
        if self.k_theta == 0 {
            return Err(PibError::InvalidArgument(
                "k_theta must be at least 1".into(),
            ));
        }
        if self.restarts == 0 {
            return Err(PibError::InvalidArgument(
                "restarts must be at least 1".into(),
            ));
        }
        if self.max_iters == 0 {
            return Err(PibError::InvalidArgument(
                "max_iters must be at least 1".into(),
            ));
        }
        if self.tol <= 0.0 || !self.tol.is_finite() {
            return Err(PibError::InvalidArgument("tol must be positive".into()));
        }
        Ok(())
    }
}

/// Convergence report for a solve.
#[derive(Debug, Clone, Copy)]
pub struct BaDiagnostics {
    /// Exact objective of the returned channel.
    pub objective: f64,
    /// Iterations used by the winning restart.
    pub iterations: usize,
    /// Restarts run.
    pub restarts_used: usize,
    /// Whether the winning restart met the tolerance within budget.
    pub converged: bool,
}

/// Best-of-restarts solver output.
#[derive(Debug, Clone)]
pub struct BaSolution {
    pub channel: Channel,
    pub diagnostics: BaDiagnostics,
}

struct ChannelInformations {
    i_theta_past: f64,
    cmi_past_given_future: f64,
}

/// Direct summation of the objective's informations over the (x_P, x_F, θ)
/// table given as p(x_P,x_F) and channel rows; no φ axis is needed.
fn channel_informations(
    past_future: &Array2<f64>,
    channel: &Array2<f64>,
) -> ChannelInformations {
    let np = past_future.nrows();
    let nf = past_future.ncols();
    let k = channel.ncols();

    let pxp = past_future.sum_axis(Axis(1));
    let pxf = past_future.sum_axis(Axis(0));

    let mut ptheta = vec![0.0; k];
    for i in 0..np {
        for t in 0..k {
            ptheta[t] += pxp[i] * channel[(i, t)];
        }
    }

    let mut i_theta_past = 0.0;
    for i in 0..np {
        if pxp[i] <= 0.0 {
            continue;
        }
        for t in 0..k {
            let mass = pxp[i] * channel[(i, t)];
            if mass > 0.0 {
                i_theta_past += mass * (channel[(i, t)] / ptheta[t]).ln();
            }
        }
    }

    // p(x_F, θ)
    let mut pxf_theta: Array2<f64> = Array2::zeros((nf, k));
    for i in 0..np {
        for j in 0..nf {
            let pij = past_future[(i, j)];
            if pij <= 0.0 {
                continue;
            }
            for t in 0..k {
                pxf_theta[(j, t)] += pij * channel[(i, t)];
            }
        }
    }

    // I(θ; X_P | X_F) = Σ_xf Σ_{xp,θ} p(xp,xf)·p(θ|xp) · ln( p(θ|xp)·p(xf) / p(xf,θ) )
    let mut cmi = 0.0;
    for j in 0..nf {
        if pxf[j] <= 0.0 {
            continue;
        }
        for i in 0..np {
            let pij = past_future[(i, j)];
            if pij <= 0.0 {
                continue;
            }
            for t in 0..k {
                let c = channel[(i, t)];
                if c > 0.0 {
                    cmi += pij * c * (c * pxf[j] / pxf_theta[(j, t)]).ln();
                }
            }
        }
    }

    ChannelInformations {
        i_theta_past: i_theta_past.max(0.0),
        cmi_past_given_future: cmi.max(0.0),
    }
}

fn objective_from(info: &ChannelInformations, beta: f64) -> f64 {
    info.cmi_past_given_future - beta * info.i_theta_past
}

/// The exact objective I(θ;X_P|X_F) − β·I(θ;X_P), in nats.
///
/// In debug builds the chain-rule rewrite (1−β)·I(θ;X_P) − I(θ;X_F) is
/// checked against the direct form to 1e-10.
pub fn exact_pib_objective(cj: &ChannelJoint, beta: f64) -> Result<f64> {
    let cmi = cj.cmi_theta_past_given_future()?;
    let i_past = cj.mi_theta_past()?;
    let direct = cmi - beta * i_past;
    debug_assert!(
        {
            let rewrite = (1.0 - beta) * i_past - cj.mi_theta_future()?;
            (direct - rewrite).abs() < 1e-10
        },
        "chain-rule rewrite of the objective diverged"
    );
    Ok(direct)
}

fn kl_divergence_rows(p: &[f64], q: &[f64]) -> f64 {
    let mut kl = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b > 0.0 {
                kl += a * (a / b).ln();
            } else {
                return f64::INFINITY;
            }
        }
    }
    kl.max(0.0)
}

/// One round of the self-consistent update at trade-off β, taking and
/// returning full channels. Exposed so fixed-point stability is testable.
pub fn ba_step(joint: &JointModel, channel: &Channel, beta: f64) -> Result<Channel> {
    if !beta.is_finite() || !(0.0..1.0).contains(&beta) {
        return Err(PibError::BetaOutOfRange(beta));
    }
    let past_future = joint.past_future();
    if channel.n_inputs() != past_future.nrows() {
        return Err(PibError::DimensionMismatch(format!(
            "channel has {} rows but the past-dataset space has {}",
            channel.n_inputs(),
            past_future.nrows()
        )));
    }
    let pxp = joint.past_marginal();
    let predictive = joint.predictive_table();
    let next = ba_iteration(&past_future, &pxp, &predictive, &channel.rows, beta);
    Ok(Channel::from_rows_unchecked(next))
}

fn ba_iteration(
    past_future: &Array2<f64>,
    pxp: &Array1<f64>,
    predictive: &Array2<f64>,
    channel: &Array2<f64>,
    beta: f64,
) -> Array2<f64> {
    let np = past_future.nrows();
    let nf = past_future.ncols();
    let k = channel.ncols();
    let inv_temp = 1.0 / (1.0 - beta);

    let mut ptheta = vec![0.0; k];
    for i in 0..np {
        for t in 0..k {
            ptheta[t] += pxp[i] * channel[(i, t)];
        }
    }

    // p(x_F | θ); dead θ rows are left uniform and stay dead because their
    // weight p(θ) is zero in the row update.
    let mut pred_theta = Array2::from_elem((k, nf), 1.0 / nf as f64);
    for t in 0..k {
        if ptheta[t] <= 0.0 {
            continue;
        }
        let mut row = vec![0.0; nf];
        for i in 0..np {
            let w = channel[(i, t)] * pxp[i] / ptheta[t];
            if w > 0.0 {
                for j in 0..nf {
                    row[j] += predictive[(i, j)] * w;
                }
            }
        }
        for j in 0..nf {
            pred_theta[(t, j)] = row[j];
        }
    }

    let mut next = channel.clone();
    let mut kl = vec![0.0; k];
    for i in 0..np {
        let pred_row = predictive.row(i);
        let pred_slice = pred_row.as_slice().expect("contiguous row");
        let mut min_kl = f64::INFINITY;
        for t in 0..k {
            kl[t] = kl_divergence_rows(pred_slice, pred_theta.row(t).as_slice().unwrap());
            if ptheta[t] > 0.0 && kl[t] < min_kl {
                min_kl = kl[t];
            }
        }
        if !min_kl.is_finite() {
            // Every θ is unreachable; keep the previous row.
            continue;
        }
        let mut sum = 0.0;
        let mut unnorm = vec![0.0; k];
        for t in 0..k {
            // Shifting by the minimum KL guards the exponential; the largest
            // weight is then p(θ)·1.
            let w = if ptheta[t] > 0.0 && kl[t].is_finite() {
                ptheta[t] * (-inv_temp * (kl[t] - min_kl)).exp()
            } else {
                0.0
            };
            unnorm[t] = w;
            sum += w;
        }
        if sum > 0.0 && sum.is_finite() {
            for t in 0..k {
                next[(i, t)] = unnorm[t] / sum;
            }
        }
        // else: fall back to the previous row, already in place.
    }
    next
}

/// Optimizes the objective over channels by best-of-restarts fixed-point
/// iteration. Non-convergence within budget is reported in the
/// diagnostics, not an error.
pub fn ba_solve(joint: &JointModel, cfg: &SolverConfig) -> Result<BaSolution> {
    cfg.validate()?;
    let past_future = joint.past_future();
    let pxp = joint.past_marginal();
    let predictive = joint.predictive_table();
    let np = past_future.nrows();

    let mut best: Option<(f64, Channel, usize, bool)> = None;
    for restart in 0..cfg.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(restart as u64));
        let mut rows = Channel::random(np, cfg.k_theta, &mut rng).rows;
        let mut objective = objective_from(&channel_informations(&past_future, &rows), cfg.beta);
        let mut iterations = 0;
        let mut converged = false;
        for it in 1..=cfg.max_iters {
            rows = ba_iteration(&past_future, &pxp, &predictive, &rows, cfg.beta);
            let next_objective =
                objective_from(&channel_informations(&past_future, &rows), cfg.beta);
            iterations = it;
            let change = (next_objective - objective).abs();
            objective = next_objective;
            if change < cfg.tol {
                converged = true;
                break;
            }
        }
        let better = match &best {
            None => true,
            Some((best_obj, ..)) => objective < *best_obj,
        };
        if better {
            best = Some((
                objective,
                Channel::from_rows_unchecked(rows),
                iterations,
                converged,
            ));
        }
    }

    let (objective, channel, iterations, converged) = best.expect("at least one restart");
    Ok(BaSolution {
        channel,
        diagnostics: BaDiagnostics {
            objective,
            iterations,
            restarts_used: cfg.restarts,
            converged,
        },
    })
}

/// A representation-marginal table q(θ).
#[derive(Debug, Clone, PartialEq)]
pub struct PriorTable(Array1<f64>);

impl PriorTable {
    pub fn new(q_theta: Array1<f64>) -> Result<Self> {
        let mut sum = 0.0;
        for &v in q_theta.iter() {
            if !v.is_finite() || v < 0.0 {
                return Err(PibError::InvalidDistribution(format!(
                    "negative or non-finite prior entry {v}"
                )));
            }
            sum += v;
        }
        if (sum - 1.0).abs() >= INPUT_NORMALIZATION_TOL {
            return Err(PibError::InvalidDistribution(format!(
                "prior sums to {sum}"
            )));
        }
        Ok(PriorTable(q_theta))
    }

    pub fn uniform(k: usize) -> Self {
        PriorTable(Array1::from_elem(k, 1.0 / k as f64))
    }

    pub fn point_mass(k: usize, atom: usize) -> Self {
        let mut q = Array1::zeros(k);
        q[atom] = 1.0;
        PriorTable(q)
    }

    pub fn table(&self) -> &Array1<f64> {
        &self.0
    }
}

/// A factorized single-draw "likelihood" table q(x | θ), one row per θ.
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodTable(Array2<f64>);

impl LikelihoodTable {
    pub fn new(q_x_given_theta: Array2<f64>) -> Result<Self> {
        for row in q_x_given_theta.rows() {
            let mut sum = 0.0;
            for &v in row {
                if !v.is_finite() || v < 0.0 {
                    return Err(PibError::InvalidDistribution(format!(
                        "negative or non-finite likelihood entry {v}"
                    )));
                }
                sum += v;
            }
            if (sum - 1.0).abs() >= INPUT_NORMALIZATION_TOL {
                return Err(PibError::InvalidDistribution(format!(
                    "likelihood row sums to {sum}"
                )));
            }
        }
        Ok(LikelihoodTable(q_x_given_theta))
    }

    pub fn table(&self) -> &Array2<f64> {
        &self.0
    }
}

/// A future-conditioned prior q(θ | x_F), one row per future dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalPrior(Array2<f64>);

impl ConditionalPrior {
    pub fn new(q_theta_given_future: Array2<f64>) -> Result<Self> {
        for row in q_theta_given_future.rows() {
            let mut sum = 0.0;
            for &v in row {
                if !v.is_finite() || v < 0.0 {
                    return Err(PibError::InvalidDistribution(format!(
                        "negative or non-finite conditional-prior entry {v}"
                    )));
                }
                sum += v;
            }
            if (sum - 1.0).abs() >= INPUT_NORMALIZATION_TOL {
                return Err(PibError::InvalidDistribution(format!(
                    "conditional-prior row sums to {sum}"
                )));
            }
        }
        Ok(ConditionalPrior(q_theta_given_future))
    }

    /// Broadcasts an unconditional prior to every future dataset.
    pub fn from_prior(prior: &PriorTable, n_future_datasets: usize) -> Self {
        let k = prior.table().len();
        let mut rows = Array2::zeros((n_future_datasets, k));
        for j in 0..n_future_datasets {
            for t in 0..k {
                rows[(j, t)] = prior.table()[t];
            }
        }
        ConditionalPrior(rows)
    }

    pub fn table(&self) -> &Array2<f64> {
        &self.0
    }
}

/// The empirical-Bayes prior: the aggregate marginal p(θ) of the channel.
/// It minimizes the first term of the variational objective; any other
/// prior is worse by exactly KL(p(θ) ‖ q(θ)).
pub fn optimal_prior(cj: &ChannelJoint) -> PriorTable {
    PriorTable(cj.theta_marginal())
}

/// The optimal factorized likelihood: per θ, the draw-averaged symbol
/// distribution q*(x|θ) = (1/N)·Σ_i p(x_i = x | θ). Rows for zero-mass θ
/// are uniform.
pub fn optimal_factorized_likelihood(cj: &ChannelJoint) -> LikelihoodTable {
    let past_theta = cj.past_theta();
    let ptheta = cj.theta_marginal();
    let space = cj.past_space();
    let k_x = space.alphabet();
    let n = space.len() as f64;
    let k = ptheta.len();

    let mut q = Array2::from_elem((k, k_x), 1.0 / k_x as f64);
    for t in 0..k {
        if ptheta[t] <= 0.0 {
            continue;
        }
        let mut row = vec![0.0; k_x];
        for i in 0..past_theta.nrows() {
            let mass = past_theta[(i, t)];
            if mass > 0.0 {
                for (x, &c) in space.counts_of(i).iter().enumerate() {
                    row[x] += mass * c as f64;
                }
            }
        }
        for x in 0..k_x {
            q[(t, x)] = row[x] / (n * ptheta[t]);
        }
    }
    LikelihoodTable(q)
}

/// The exact mixture q(θ|x_F) = Σ_{x_P'} p(θ|x_P') p(x_P'|x_F), which by
/// the conditional independence of θ and x_F given x_P equals p(θ|x_F).
/// Rows for zero-mass futures are uniform.
pub fn exact_conditional_prior(cj: &ChannelJoint) -> ConditionalPrior {
    let future_theta = cj.future_theta();
    let k = cj.k_theta();
    let nf = future_theta.nrows();
    let mut rows = Array2::from_elem((nf, k), 1.0 / k as f64);
    for j in 0..nf {
        let mass: f64 = future_theta.row(j).sum();
        if mass > 0.0 {
            for t in 0..k {
                rows[(j, t)] = future_theta[(j, t)] / mass;
            }
        }
    }
    ConditionalPrior(rows)
}

/// The table-valued variational objective
/// ⟨log p(θ|x_P)/q(θ)⟩ − β·(Σ_i ⟨log q(x_i|θ)⟩ + H(X_P)).
///
/// The entropy constant is folded in so the returned value upper-bounds
/// the exact objective directly. At β = 0 the likelihood term is off.
pub fn variational_objective(
    cj: &ChannelJoint,
    prior: &PriorTable,
    likelihood: &LikelihoodTable,
    beta: f64,
) -> Result<f64> {
    if !beta.is_finite() || beta < 0.0 {
        return Err(PibError::InvalidArgument(format!(
            "beta must be finite and non-negative, got {beta}"
        )));
    }
    let k = cj.k_theta();
    if prior.table().len() != k {
        return Err(PibError::DimensionMismatch(format!(
            "prior over {} theta labels, channel has {}",
            prior.table().len(),
            k
        )));
    }
    let space = cj.past_space();
    if likelihood.table().dim() != (k, space.alphabet()) {
        return Err(PibError::DimensionMismatch(format!(
            "likelihood table of shape {:?}, expected ({}, {})",
            likelihood.table().dim(),
            k,
            space.alphabet()
        )));
    }

    let past_theta = cj.past_theta();
    let pxp = cj.past_marginal();
    let q_theta = prior.table();

    let mut rate_term = 0.0;
    for ((i, t), &mass) in past_theta.indexed_iter() {
        if mass <= 0.0 {
            continue;
        }
        if q_theta[t] <= 0.0 {
            return Err(PibError::SupportViolation(format!(
                "prior assigns zero mass to theta {t} which the channel reaches"
            )));
        }
        let conditional = mass / pxp[i];
        rate_term += mass * (conditional / q_theta[t]).ln();
    }
    if beta == 0.0 {
        return Ok(rate_term);
    }

    let q_lik = likelihood.table();
    let mut log_lik_term = 0.0;
    for i in 0..past_theta.nrows() {
        let counts = space.counts_of(i);
        for t in 0..k {
            let mass = past_theta[(i, t)];
            if mass <= 0.0 {
                continue;
            }
            let mut dataset_log_lik = 0.0;
            for (x, &c) in counts.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let q = q_lik[(t, x)];
                if q <= 0.0 {
                    return Err(PibError::SupportViolation(format!(
                        "likelihood assigns zero mass to symbol {x} under theta {t}"
                    )));
                }
                dataset_log_lik += c as f64 * q.ln();
            }
            log_lik_term += mass * dataset_log_lik;
        }
    }
    let h_past = entropy(pxp.as_slice().expect("contiguous marginal"))?;
    Ok(rate_term - beta * (log_lik_term + h_past))
}

/// The future-conditioned bound ⟨log p(θ|x_P) / q(θ|x_F)⟩. With the exact
/// mixture prior it equals I(θ;X_P|X_F); with rows all equal to a fixed
/// q(θ) it reduces to the unconditional first term.
pub fn conditional_prior_bound(cj: &ChannelJoint, cp: &ConditionalPrior) -> Result<f64> {
    let t3 = cj.past_future_theta();
    let (np, nf, k) = t3.dim();
    if cp.table().dim() != (nf, k) {
        return Err(PibError::DimensionMismatch(format!(
            "conditional prior of shape {:?}, expected ({nf}, {k})",
            cp.table().dim()
        )));
    }
    let past_theta = cj.past_theta();
    let pxp = cj.past_marginal();
    let q = cp.table();

    let mut value = 0.0;
    for i in 0..np {
        if pxp[i] <= 0.0 {
            continue;
        }
        for t in 0..k {
            let conditional = past_theta[(i, t)] / pxp[i];
            if conditional <= 0.0 {
                continue;
            }
            for j in 0..nf {
                let mass = t3[(i, j, t)];
                if mass <= 0.0 {
                    continue;
                }
                if q[(j, t)] <= 0.0 {
                    return Err(PibError::SupportViolation(format!(
                        "conditional prior assigns zero mass to theta {t} at future {j}"
                    )));
                }
                value += mass * (conditional / q[(j, t)]).ln();
            }
        }
    }
    Ok(value)
}

/// One solved point of the information curve.
#[derive(Debug, Clone, Copy)]
pub struct CurveRecord {
    pub beta: f64,
    pub mi_theta_past: f64,
    pub mi_theta_future: f64,
    pub cmi_theta_past_given_future: f64,
    pub exact_objective: f64,
    pub variational_objective: f64,
    pub restarts_used: usize,
    pub iterations: usize,
}

/// Traces the information curve over a strictly increasing β grid in
/// [0, 1). Each grid point is solved independently (best of restarts) and
/// evaluated with the optimal prior and optimal factorized likelihood;
/// grid points run in parallel and the output depends only on inputs and
/// seed.
pub fn information_curve(
    joint: &JointModel,
    betas: &[f64],
    cfg: &SolverConfig,
) -> Result<Vec<CurveRecord>> {
    for &beta in betas {
        if !beta.is_finite() || !(0.0..1.0).contains(&beta) {
            return Err(PibError::BetaOutOfRange(beta));
        }
    }
    for pair in betas.windows(2) {
        if pair[0] >= pair[1] {
            return Err(PibError::InvalidArgument(
                "beta grid must be strictly increasing".into(),
            ));
        }
    }
    betas
        .par_iter()
        .map(|&beta| {
            let cfg = SolverConfig { beta, ..cfg.clone() };
            let solution = ba_solve(joint, &cfg)?;
            let cj = channel_joint(joint, &solution.channel)?;
            let identity = crate::infotheory::markov_identity_residual(&cj)?;
            let exact = exact_pib_objective(&cj, beta)?;
            let variational = variational_objective(
                &cj,
                &optimal_prior(&cj),
                &optimal_factorized_likelihood(&cj),
                beta,
            )?;
            Ok(CurveRecord {
                beta,
                mi_theta_past: identity.mi_theta_past,
                mi_theta_future: identity.mi_theta_future,
                cmi_theta_past_given_future: identity.cmi_theta_past_given_future,
                exact_objective: exact,
                variational_objective: variational,
                restarts_used: solution.diagnostics.restarts_used,
                iterations: solution.diagnostics.iterations,
            })
        })
        .collect()
}
