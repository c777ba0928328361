//! Batch experiment driver: JSON config in, deterministic CSV out.
//!
//! `run_config_file` loads a config, dispatches on its mode, and writes the
//! result to the configured output path or standard output. Identical
//! config bytes and seed produce byte-identical output regardless of worker
//! count; the β grid is solved in parallel but collected in grid order.
//!
//! Exit-code contract (enforced by the `pib` binary):
//! 0 success; 1 config parse/validation or I/O error; 2 numerical failure
//! (support violation, divergence, or a solve that exhausted its budget).

pub mod config;
pub mod csv;
pub mod verify;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::augmentation::{augmentation_gap_analytic, augmentation_gap_mc, AugmentationSpec};
use crate::conjugate::limit_diagnostics;
use crate::error::PibError;
use crate::gibbs::{gibbs_optimize, GaussianVariationalParams, GibbsObjectiveSpec};
use crate::solver::{information_curve, SolverConfig};
use crate::world::JointModel;

pub use config::{parse_config, RunConfig};
pub use verify::{run_verification, CheckResult};

/// How a run failed, mapped to the exit-code contract.
#[derive(Debug)]
pub enum RunError {
    /// Unreadable, unparseable, or invalid configuration; exit 1.
    Config(String),
    /// I/O failure on inputs or outputs; exit 1.
    Io(String),
    /// Numerical failure during computation; exit 2.
    Numerical(String),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "config error: {m}"),
            RunError::Io(m) => write!(f, "io error: {m}"),
            RunError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Io(_) => 1,
            RunError::Numerical(_) => 2,
        }
    }
}

fn computation_error(err: PibError) -> RunError {
    match err {
        PibError::NumericalFailure(_)
        | PibError::SupportViolation(_)
        | PibError::Divergence(_)
        | PibError::ZeroProbabilityDataset => RunError::Numerical(err.to_string()),
        other => RunError::Config(other.to_string()),
    }
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// The result of a successful run.
#[derive(Debug)]
pub struct RunOutcome {
    /// Where the data went (None = standard output).
    pub out_path: Option<PathBuf>,
    /// Verify mode: (passed, failed) counts.
    pub check_counts: Option<(usize, usize)>,
}

/// Loads the config at `path` and executes it.
pub fn run_config_file(path: &Path, overrides: &Overrides) -> Result<RunOutcome, RunError> {
    let text = fs::read_to_string(path)
        .map_err(|e| RunError::Io(format!("cannot read {}: {e}", path.display())))?;
    let config = parse_config(&text).map_err(|e| RunError::Config(e.to_string()))?;
    run_parsed(config, overrides)
}

/// Executes an already-parsed config.
pub fn run_parsed(config: RunConfig, overrides: &Overrides) -> Result<RunOutcome, RunError> {
    match config {
        RunConfig::Curve(cfg) => run_curve(cfg, overrides),
        RunConfig::ConjugateLimits(cfg) => run_conjugate_limits(cfg, overrides),
        RunConfig::Gibbs(cfg) => run_gibbs(cfg, overrides),
        RunConfig::Augmentation(cfg) => run_augmentation(cfg, overrides),
        RunConfig::Verify(cfg) => run_verify(overrides.seed.unwrap_or(cfg.seed)),
    }
}

fn write_output(out: Option<PathBuf>, text: &str) -> Result<Option<PathBuf>, RunError> {
    match out {
        Some(path) => {
            fs::write(&path, text.as_bytes())
                .map_err(|e| RunError::Io(format!("cannot write {}: {e}", path.display())))?;
            Ok(Some(path))
        }
        None => {
            std::io::stdout()
                .write_all(text.as_bytes())
                .map_err(|e| RunError::Io(format!("cannot write to stdout: {e}")))?;
            Ok(None)
        }
    }
}

fn run_curve(cfg: config::CurveConfig, overrides: &Overrides) -> Result<RunOutcome, RunError> {
    let world = cfg
        .world
        .build()
        .map_err(|e| RunError::Config(e.to_string()))?;
    let joint = JointModel::new(&world, cfg.n_past, cfg.n_future)
        .map_err(|e| RunError::Config(e.to_string()))?;
    let solver_cfg = SolverConfig {
        beta: 0.0,
        k_theta: cfg.k_theta,
        restarts: cfg.restarts,
        max_iters: cfg.max_iters,
        tol: cfg.tol,
        seed: overrides.seed.unwrap_or(cfg.seed),
    };
    let records = information_curve(&joint, &cfg.betas, &solver_cfg).map_err(computation_error)?;
    let text = csv::emit_curve_csv(&records);
    let out_path = write_output(overrides.out.clone().or(cfg.out), &text)?;

    // A solve that consumed its entire budget never met the tolerance.
    if let Some(r) = records.iter().find(|r| r.iterations >= cfg.max_iters) {
        return Err(RunError::Numerical(format!(
            "solve at beta {} did not converge within {} iterations",
            r.beta, cfg.max_iters
        )));
    }
    Ok(RunOutcome {
        out_path,
        check_counts: None,
    })
}

fn run_conjugate_limits(
    cfg: config::ConjugateLimitsConfig,
    overrides: &Overrides,
) -> Result<RunOutcome, RunError> {
    let report = limit_diagnostics(&cfg.model.0, &cfg.betas)
        .map_err(|e| RunError::Config(e.to_string()))?;
    eprintln!(
        "conjugate limits: prior distance at small beta {:.3e}; bayes exact match {}; \
         mle distance at large beta {:.3e}; variance at large beta {:.3e}",
        report.small_beta_prior_distance,
        report.bayes_exact_match,
        report.large_beta_mle_distance,
        report.large_beta_variance
    );
    let text = csv::emit_limit_csv(&report);
    let out_path = write_output(overrides.out.clone().or(cfg.out), &text)?;
    Ok(RunOutcome {
        out_path,
        check_counts: None,
    })
}

fn run_gibbs(cfg: config::GibbsConfig, overrides: &Overrides) -> Result<RunOutcome, RunError> {
    let spec = GibbsObjectiveSpec::new(cfg.model, cfg.beta)
        .map_err(|e| RunError::Config(e.to_string()))?;
    let init = GaussianVariationalParams::new(cfg.init_mean, cfg.init_log_std)
        .map_err(|e| RunError::Config(e.to_string()))?;
    let result = gibbs_optimize(&spec, init, cfg.step_size, cfg.max_iters, cfg.tol)
        .map_err(computation_error)?;
    eprintln!(
        "gibbs: converged={} iterations={} mean={:.12} std={:.12} objective={:.12}",
        result.converged,
        result.iterations,
        result.params.mean,
        result.params.std(),
        result.trace.last().copied().unwrap_or(f64::NAN)
    );
    let text = csv::emit_gibbs_csv(&result);
    let out_path = write_output(overrides.out.clone().or(cfg.out), &text)?;
    if !result.converged {
        return Err(RunError::Numerical(format!(
            "gradient descent did not reach tolerance within {} iterations",
            cfg.max_iters
        )));
    }
    Ok(RunOutcome {
        out_path,
        check_counts: None,
    })
}

fn run_augmentation(
    cfg: config::AugmentationConfig,
    overrides: &Overrides,
) -> Result<RunOutcome, RunError> {
    let spec = AugmentationSpec::new(
        cfg.noise_std,
        cfg.mc_samples,
        overrides.seed.unwrap_or(cfg.seed),
    )
    .map_err(|e| RunError::Config(e.to_string()))?;
    let analytic = augmentation_gap_analytic(cfg.x, cfg.theta, cfg.obs_var, &spec)
        .map_err(|e| RunError::Config(e.to_string()))?;
    let mc =
        augmentation_gap_mc(cfg.x, cfg.theta, cfg.obs_var, &spec).map_err(computation_error)?;
    let text = csv::emit_augmentation_csv(analytic, &mc, cfg.mc_samples);
    let out_path = write_output(overrides.out.clone().or(cfg.out), &text)?;
    Ok(RunOutcome {
        out_path,
        check_counts: None,
    })
}

fn run_verify(seed: u64) -> Result<RunOutcome, RunError> {
    let results = run_verification(seed).map_err(computation_error)?;
    let mut passed = 0usize;
    let mut failed = 0usize;
    for check in &results {
        let status = if check.passed {
            passed += 1;
            "PASS"
        } else {
            failed += 1;
            "FAIL"
        };
        println!("{status} {} — {}", check.name, check.detail);
    }
    println!("{passed} passed, {failed} failed");
    if failed > 0 {
        return Err(RunError::Numerical(format!(
            "{failed} verification checks failed"
        )));
    }
    Ok(RunOutcome {
        out_path: None,
        check_counts: Some((passed, failed)),
    })
}
