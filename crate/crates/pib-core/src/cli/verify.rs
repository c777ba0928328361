//! Self-contained invariant suite over the built-in worlds, behind
//! `pib verify` and the `verify` config mode.
//!
//! Each check recomputes its expectations from an independent route
//! (enumeration, brute force over deterministic channels, closed forms,
//! quadrature) and reports a pass/fail with a one-line detail. All
//! randomness is seeded, so a verify run is reproducible.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::augmentation::{
    augmentation_gap_analytic, augmentation_gap_mc, augmented_gibbs_objective, AugmentationSpec,
};
use crate::conjugate::{
    beta_bernoulli_power, gaussian_power, limit_diagnostics, BetaBernoulliModel, ConjugateModel,
    DirichletCategoricalModel, GaussianMeanModel,
};
use crate::error::Result;
use crate::gibbs::{
    finite_difference_gradient, gibbs_gradient, gibbs_objective, gibbs_optimize,
    GaussianVariationalParams, GibbsObjectiveSpec,
};
use crate::infotheory::{channel_joint, entropy, markov_identity_residual, mutual_information};
use crate::solver::{
    ba_solve, conditional_prior_bound, exact_conditional_prior, exact_pib_objective,
    information_curve, optimal_factorized_likelihood, optimal_prior, sample_simplex,
    variational_objective, Channel, LikelihoodTable, PriorTable, SolverConfig,
};
use crate::world::{JointModel, World};

/// Outcome of one named invariant check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: &'static str, passed: bool, detail: String) -> Self {
        CheckResult {
            name,
            passed,
            detail,
        }
    }
}

/// Runs every check; failures are collected, not fatal.
pub fn run_verification(seed: u64) -> Result<Vec<CheckResult>> {
    Ok(vec![
        check_world_reconstruction()?,
        check_exchangeability()?,
        check_predictive_information_monotonicity()?,
        check_markov_identity(seed)?,
        check_data_processing(seed)?,
        check_bound_direction(seed)?,
        check_optimal_tables(seed)?,
        check_conditional_prior(seed)?,
        check_conjugate_limits()?,
        check_partition_quadrature()?,
        check_gibbs_gradients(seed)?,
        check_gibbs_oracle(seed)?,
        check_solver_endpoints()?,
        check_augmentation(seed)?,
    ])
}

fn builtin_worlds() -> [World; 2] {
    [World::w1(), World::w2()]
}

fn check_world_reconstruction() -> Result<CheckResult> {
    let mut max_err: f64 = 0.0;
    let mut cells = 0usize;
    for world in builtin_worlds() {
        for (n, m) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let joint = JointModel::new(&world, n, m)?;
            let past = joint.past_space();
            let future = joint.future_space();
            for phi in 0..world.k_phi() {
                for i in 0..past.size() {
                    for j in 0..future.size() {
                        let mut expect = world.phi_prior()[phi];
                        for &s in &past.draws_of(i) {
                            expect *= world.obs_given_phi()[phi][s];
                        }
                        for &s in &future.draws_of(j) {
                            expect *= world.obs_given_phi()[phi][s];
                        }
                        max_err = max_err.max((joint.joint()[(phi, i, j)] - expect).abs());
                        cells += 1;
                    }
                }
            }
        }
    }
    Ok(CheckResult::new(
        "world_reconstruction",
        max_err < 1e-14,
        format!("{cells} cells, max |joint - product| = {max_err:.2e}"),
    ))
}

fn check_exchangeability() -> Result<CheckResult> {
    let joint = JointModel::new(&World::w2(), 3, 1)?;
    let past = joint.past_space();
    let marginal = joint.past_marginal();
    let perms = [
        [0usize, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    let mut exact = true;
    for draws in past.iter() {
        let base = past.index_of(&draws)?;
        let base_pred = joint.predictive_by_index(base)?;
        for perm in perms {
            let permuted: Vec<usize> = perm.iter().map(|&k| draws[k]).collect();
            let idx = past.index_of(&permuted)?;
            if marginal[base] != marginal[idx] {
                exact = false;
            }
            let pred = joint.predictive_by_index(idx)?;
            if base_pred.iter().zip(pred.iter()).any(|(a, b)| a != b) {
                exact = false;
            }
        }
    }
    Ok(CheckResult::new(
        "exchangeability",
        exact,
        "draw-order permutations leave p(x_P) and the predictive bitwise unchanged".into(),
    ))
}

fn check_predictive_information_monotonicity() -> Result<CheckResult> {
    let world = World::w1();
    let mut last = 0.0;
    let mut ok = true;
    let mut values = Vec::new();
    for m in 1..=3 {
        let joint = JointModel::new(&world, 1, m)?;
        let mi = mutual_information(joint.past_future().view())?;
        let mi_phi = mutual_information(joint.phi_past().view())?;
        ok &= mi + 1e-12 >= last && mi <= mi_phi + 1e-12;
        values.push(format!("{mi:.6}"));
        last = mi;
    }
    Ok(CheckResult::new(
        "predictive_information_monotone_in_future",
        ok,
        format!("I(X_P;X_F) over M=1..3: [{}], all <= I(X_P;phi)", values.join(", ")),
    ))
}

fn check_markov_identity(seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d61726b);
    let mut max_residual: f64 = 0.0;
    let mut max_leak: f64 = 0.0;
    let mut trials = 0usize;
    for world in builtin_worlds() {
        for (n, m) in [(1, 1), (1, 2), (2, 1), (2, 2)] {
            let joint = JointModel::new(&world, n, m)?;
            let inputs = joint.past_space().size();
            for _ in 0..100 {
                let ch = Channel::random(inputs, 3, &mut rng);
                let cj = channel_joint(&joint, &ch)?;
                let id = markov_identity_residual(&cj)?;
                max_residual = max_residual.max(id.residual);
                max_leak = max_leak.max(id.cmi_theta_future_given_past);
                trials += 1;
            }
        }
    }
    Ok(CheckResult::new(
        "markov_chain_identity",
        max_residual < 1e-10 && max_leak < 1e-12,
        format!(
            "{trials} random channels: max residual {max_residual:.2e}, \
             max I(theta;X_F|X_P) {max_leak:.2e}"
        ),
    ))
}

fn check_data_processing(seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x64617461);
    let mut ok = true;
    for world in builtin_worlds() {
        let joint = JointModel::new(&world, 1, 1)?;
        let mi_pf = mutual_information(joint.past_future().view())?;
        let h_past = entropy(joint.past_marginal().as_slice().expect("contiguous"))?;
        for _ in 0..50 {
            let ch = Channel::random(joint.past_space().size(), 4, &mut rng);
            let cj = channel_joint(&joint, &ch)?;
            ok &= cj.mi_theta_future()? <= mi_pf + 1e-12;
            ok &= cj.mi_theta_past()? <= h_past + 1e-12;
        }
    }
    Ok(CheckResult::new(
        "data_processing_inequalities",
        ok,
        "I(theta;X_F) <= I(X_P;X_F) and I(theta;X_P) <= H(X_P) on 100 random channels".into(),
    ))
}

fn check_bound_direction(seed: u64) -> Result<CheckResult> {
    let joint = JointModel::new(&World::w1(), 1, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x626f756e);
    let mut min_gap = f64::INFINITY;
    for _ in 0..200 {
        let ch = Channel::random(2, 2, &mut rng);
        let cj = channel_joint(&joint, &ch)?;
        let prior = PriorTable::new(Array1::from(sample_simplex(&mut rng, 2)))?;
        let mut rows = Array2::zeros((2, 2));
        for t in 0..2 {
            let row = sample_simplex(&mut rng, 2);
            rows[(t, 0)] = row[0];
            rows[(t, 1)] = row[1];
        }
        let lik = LikelihoodTable::new(rows)?;
        let beta: f64 = rng.gen_range(0.0..1.0);
        let gap = variational_objective(&cj, &prior, &lik, beta)?
            - exact_pib_objective(&cj, beta)?;
        min_gap = min_gap.min(gap);
    }
    Ok(CheckResult::new(
        "variational_bound_direction",
        min_gap >= -1e-10,
        format!("200 random (channel, prior, likelihood, beta) tuples: min gap {min_gap:.2e}"),
    ))
}

fn check_optimal_tables(seed: u64) -> Result<CheckResult> {
    let joint = JointModel::new(&World::w1(), 1, 1)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6f707431);
    let mut ok = true;
    for _ in 0..200 {
        let ch = Channel::random(2, 2, &mut rng);
        let cj = channel_joint(&joint, &ch)?;
        let beta: f64 = rng.gen_range(0.0..1.0);
        let exact = exact_pib_objective(&cj, beta)?;
        let best = variational_objective(
            &cj,
            &optimal_prior(&cj),
            &optimal_factorized_likelihood(&cj),
            beta,
        )? - exact;
        for _ in 0..10 {
            let prior = PriorTable::new(Array1::from(sample_simplex(&mut rng, 2)))?;
            let mut rows = Array2::zeros((2, 2));
            for t in 0..2 {
                let row = sample_simplex(&mut rng, 2);
                rows[(t, 0)] = row[0];
                rows[(t, 1)] = row[1];
            }
            let lik = LikelihoodTable::new(rows)?;
            let gap = variational_objective(&cj, &prior, &lik, beta)? - exact;
            ok &= best <= gap + 1e-12;
        }
    }
    Ok(CheckResult::new(
        "optimal_tables_minimize_the_gap",
        ok,
        "optimal prior + likelihood beat 10 random competitors in all 200 trials".into(),
    ))
}

fn check_conditional_prior(seed: u64) -> Result<CheckResult> {
    let joint = JointModel::new(&World::w1(), 1, 1)?;
    let identity = channel_joint(&joint, &Channel::identity(2))?;
    let tight = conditional_prior_bound(&identity, &exact_conditional_prior(&identity))?;
    let expected = identity.cmi_theta_past_given_future()?;
    let mut ok = (tight - expected).abs() < 1e-10 && (tight - 0.471393).abs() < 1e-6;

    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x636f6e64);
    let mut max_err: f64 = (tight - expected).abs();
    for _ in 0..20 {
        let ch = Channel::random(2, 3, &mut rng);
        let cj = channel_joint(&joint, &ch)?;
        let bound = conditional_prior_bound(&cj, &exact_conditional_prior(&cj))?;
        let cmi = cj.cmi_theta_past_given_future()?;
        max_err = max_err.max((bound - cmi).abs());
        ok &= (bound - cmi).abs() < 1e-10;
    }
    Ok(CheckResult::new(
        "conditional_prior_tightness",
        ok,
        format!("exact mixture recovers I(theta;X_P|X_F); max |bound - cmi| = {max_err:.2e}"),
    ))
}

fn check_conjugate_limits() -> Result<CheckResult> {
    let schedule = [1e-9, 1e-6, 1.0, 1e4, 1e6];
    let models = [
        ConjugateModel::BetaBernoulli(BetaBernoulliModel::new(1.0, 1.0, 3, 4)?),
        ConjugateModel::GaussianMean(GaussianMeanModel::new(0.0, 1.0, 1.0, vec![2.0])?),
        ConjugateModel::DirichletCategorical(DirichletCategoricalModel::new(
            vec![1.0, 1.0, 1.0],
            vec![2, 0, 1],
        )?),
    ];
    let mut ok = true;
    let mut details = Vec::new();
    for model in &models {
        let report = limit_diagnostics(model, &schedule)?;
        ok &= report.small_beta_prior_distance < 1e-6;
        ok &= report.bayes_exact_match;
        ok &= report.large_beta_mle_distance < 1e-5;
        ok &= report.large_beta_variance < 1e-6;
        details.push(format!(
            "prior_dist {:.1e}, mle_dist {:.1e}, var {:.1e}",
            report.small_beta_prior_distance,
            report.large_beta_mle_distance,
            report.large_beta_variance
        ));
    }
    Ok(CheckResult::new(
        "conjugate_temperature_limits",
        ok,
        details.join("; "),
    ))
}

fn check_partition_quadrature() -> Result<CheckResult> {
    let model = BetaBernoulliModel::new(1.0, 1.0, 3, 4)?;
    let mut max_err: f64 = 0.0;
    for beta in [0.5, 1.0, 2.0] {
        let z = beta_bernoulli_power(&model, beta)?.log_partition.exp();
        // Independent route: trapezoid over the explicit integrand.
        let points = 100_000usize;
        let h = 1.0 / (points - 1) as f64;
        let integrand = |theta: f64| -> f64 {
            if theta <= 0.0 || theta >= 1.0 {
                return 0.0;
            }
            // Uniform prior; Bernoulli likelihood tempered by beta.
            (beta * (3.0 * theta.ln() + (1.0 - theta).ln())).exp()
        };
        let mut sum = 0.5 * (integrand(0.0) + integrand(1.0));
        for i in 1..points - 1 {
            sum += integrand(i as f64 * h);
        }
        max_err = max_err.max((z - sum * h).abs());
    }
    Ok(CheckResult::new(
        "partition_function_quadrature",
        max_err < 1e-8,
        format!("Beta-Bernoulli exp(log Z) vs 1e5-point trapezoid: max error {max_err:.2e}"),
    ))
}

fn check_gibbs_gradients(seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x67726164);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=6);
        let data: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let spec = GibbsObjectiveSpec::new(
            GaussianMeanModel::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.5..2.0),
                rng.gen_range(0.5..2.0),
                data,
            )?,
            rng.gen_range(0.0..3.0),
        )?;
        let params =
            GaussianVariationalParams::new(rng.gen_range(-2.0..2.0), rng.gen_range(-1.5..1.0))?;
        let analytic = gibbs_gradient(&params, &spec);
        let fd = finite_difference_gradient(&params, &spec, 1e-6)?;
        for (a, f) in [
            (analytic.d_mean, fd.d_mean),
            (analytic.d_log_std, fd.d_log_std),
        ] {
            let err = (a - f).abs();
            if err >= 1e-8 {
                worst = worst.max(err / a.abs().max(1e-8));
            }
        }
    }
    Ok(CheckResult::new(
        "gibbs_gradient_check",
        worst < 1e-5,
        format!("100 random points: worst relative error {worst:.2e}"),
    ))
}

fn check_gibbs_oracle(seed: u64) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6f72636c);
    let mut max_param_err: f64 = 0.0;
    let mut max_obj_err: f64 = 0.0;
    let mut ok = true;
    for n in [1usize, 2, 4, 6, 8] {
        let data: Vec<f64> = (0..n).map(|_| 2.0 * box_muller(&mut rng)).collect();
        let model = GaussianMeanModel::new(0.0, 1.0, 1.0, data)?;
        for beta in [0.0, 0.5, 1.0, 2.0, 10.0] {
            let spec = GibbsObjectiveSpec::new(model.clone(), beta)?;
            let prec = 1.0 / model.prior_var + beta * n as f64 / model.obs_var;
            let step = (0.9 / prec).min(0.05);
            let out = gibbs_optimize(
                &spec,
                GaussianVariationalParams::new(0.0, 0.0)?,
                step,
                100_000,
                1e-9,
            )?;
            let oracle = gaussian_power(&model, beta)?;
            let (mean, var) = match oracle.params {
                crate::conjugate::PosteriorParams::Gaussian { mean, var } => (mean, var),
                _ => unreachable!(),
            };
            max_param_err = max_param_err
                .max((out.params.mean - mean).abs())
                .max((out.params.var() - var).abs());
            max_obj_err = max_obj_err
                .max((gibbs_objective(&out.params, &spec) + oracle.log_partition).abs());
            ok &= out.converged;
        }
    }
    Ok(CheckResult::new(
        "gibbs_matches_power_posterior",
        ok && max_param_err < 1e-6 && max_obj_err < 1e-8,
        format!(
            "25 (beta, dataset) pairs: max parameter error {max_param_err:.2e}, \
             max |F* + log Z| {max_obj_err:.2e}"
        ),
    ))
}

fn box_muller<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

fn check_solver_endpoints() -> Result<CheckResult> {
    let joint = JointModel::new(&World::w1(), 1, 1)?;
    let mi_ceiling = mutual_information(joint.past_future().view())?;
    let cfg = SolverConfig {
        beta: 0.0,
        k_theta: 2,
        restarts: 8,
        max_iters: 10_000,
        tol: 1e-10,
        seed: 7,
    };

    let at_zero = ba_solve(&joint, &cfg)?;
    let rate_at_zero = channel_joint(&joint, &at_zero.channel)?.mi_theta_past()?;
    let mut ok = rate_at_zero < 1e-9;

    let at_high = ba_solve(&joint, &SolverConfig { beta: 0.99, ..cfg.clone() })?;
    let reached = channel_joint(&joint, &at_high.channel)?.mi_theta_future()?;
    ok &= reached >= 0.99 * mi_ceiling;

    // Brute-force oracle: every deterministic 2→2 channel.
    let mut best = f64::INFINITY;
    for a in 0..2usize {
        for b in 0..2usize {
            let mut rows = Array2::zeros((2, 2));
            rows[(0, a)] = 1.0;
            rows[(1, b)] = 1.0;
            let cj = channel_joint(&joint, &Channel::new(rows)?)?;
            best = best.min(exact_pib_objective(&cj, 0.5)?);
        }
    }
    let at_half = ba_solve(&joint, &SolverConfig { beta: 0.5, ..cfg.clone() })?;
    ok &= at_half.diagnostics.objective <= best + 1e-9;

    let betas: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let records = information_curve(&joint, &betas, &cfg)?;
    let mut last = 0.0;
    for r in &records {
        ok &= r.mi_theta_future + 1e-6 >= last;
        last = r.mi_theta_future;
    }

    Ok(CheckResult::new(
        "solver_endpoints_and_curve",
        ok,
        format!(
            "beta=0 I(theta;X_P)={rate_at_zero:.1e}; beta=0.99 I(theta;X_F)={reached:.6} \
             (ceiling {mi_ceiling:.6}); beta=0.5 objective {:.2e} vs brute force {best:.2e}; \
             curve monotone over 9 betas",
            at_half.diagnostics.objective
        ),
    ))
}

fn check_augmentation(seed: u64) -> Result<CheckResult> {
    let spec = AugmentationSpec::new(0.5, 100_000, seed ^ 0x61756766)?;
    let analytic = augmentation_gap_analytic(0.7, 0.1, 1.0, &spec)?;
    let mut ok = analytic == -0.125;
    let mc = augmentation_gap_mc(0.7, 0.1, 1.0, &spec)?;
    ok &= (mc.estimate - analytic).abs() <= 4.0 * mc.std_error;

    let model = GaussianMeanModel::new(0.0, 1.0, 1.0, vec![1.0, 3.0, -0.5])?;
    let gspec = GibbsObjectiveSpec::new(model, 0.8)?;
    let params = GaussianVariationalParams::new(0.4, -0.2)?;
    let clean = gibbs_objective(&params, &gspec);
    let augmented = augmented_gibbs_objective(&params, &gspec, 0.5)?;
    let offset = gspec.beta * gspec.model.len() as f64 * 0.25 / (2.0 * gspec.model.obs_var);
    ok &= (augmented - clean - offset).abs() < 1e-10;
    let log_z = gaussian_power(&gspec.model, gspec.beta)?.log_partition;
    ok &= augmented >= clean - 1e-10 && clean >= -log_z - 1e-10;

    Ok(CheckResult::new(
        "augmentation_bound",
        ok,
        format!(
            "analytic gap {analytic}; MC {:.6} ± {:.1e}; augmented-clean offset exact",
            mc.estimate, mc.std_error
        ),
    ))
}
