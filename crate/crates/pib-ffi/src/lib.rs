//! C ABI for the bottleneck laboratory: opaque handles, status codes, and
//! plain-old-data results so other languages can bind without Rust types.
//!
//! Conventions:
//! - Every fallible call returns [`PibStatus`]; `Ok` is zero.
//! - Outputs are written through caller-provided pointers only on success.
//! - Handles created by `*_new` functions must be released with the
//!   matching `*_free`; passing them to any other library is undefined.
//! - On failure a human-readable detail is stored per thread and can be
//!   fetched with [`pib_last_error_message`] until the next failing call.
//!
//! The header `include/pib.h` is generated from this file by cbindgen at
//! build time.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use pib_core::conjugate::{
    beta_bernoulli_power, dirichlet_categorical_power, gaussian_power, BetaBernoulliModel,
    DirichletCategoricalModel, GaussianMeanModel, PosteriorParams,
};
use pib_core::gibbs::{gibbs_optimize, GaussianVariationalParams, GibbsObjectiveSpec};
use pib_core::{
    ba_solve, channel_joint, exact_pib_objective, information_curve, mutual_information,
    optimal_factorized_likelihood, optimal_prior, variational_objective, JointModel, PibError,
    SolverConfig, World,
};

/// Status code returned by every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PibStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidDistribution = 3,
    SizeCapExceeded = 4,
    BetaOutOfRange = 5,
    SupportViolation = 6,
    NumericalFailure = 7,
    Panic = 8,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("invalid error message").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
}

fn fail(err: PibError) -> PibStatus {
    let status = match &err {
        PibError::NegativeProbability(_)
        | PibError::NotNormalized { .. }
        | PibError::InvalidDistribution(_) => PibStatus::InvalidDistribution,
        PibError::SizeCapExceeded { .. } => PibStatus::SizeCapExceeded,
        PibError::BetaOutOfRange(_) => PibStatus::BetaOutOfRange,
        PibError::SupportViolation(_) => PibStatus::SupportViolation,
        PibError::NumericalFailure(_) | PibError::Divergence(_) => PibStatus::NumericalFailure,
        _ => PibStatus::InvalidArgument,
    };
    set_last_error(err.to_string());
    status
}

fn guarded<F: FnOnce() -> PibStatus>(body: F) -> PibStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("panic inside the library".into());
            PibStatus::Panic
        }
    }
}

/// Detail message for the most recent failure on this thread, or null.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pib_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(ptr::null(), |message| message.as_ptr())
    })
}

/// Library version as a static, NUL-terminated string.
#[no_mangle]
pub extern "C" fn pib_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Opaque world handle.
pub struct PibWorld(World);

/// Opaque exact-joint handle.
pub struct PibJointModel(JointModel);

/// Builds a world from a cause prior of length `k_phi` and a row-major
/// `k_phi × k_x` observation table.
///
/// # Safety
/// `phi_prior` must point to `k_phi` doubles, `obs_given_phi` to
/// `k_phi * k_x` doubles, and `out` must be a valid destination pointer.
#[no_mangle]
pub unsafe extern "C" fn pib_world_new(
    phi_prior: *const f64,
    k_phi: usize,
    obs_given_phi: *const f64,
    k_x: usize,
    out: *mut *mut PibWorld,
) -> PibStatus {
    if phi_prior.is_null() || obs_given_phi.is_null() || out.is_null() {
        set_last_error("null pointer argument".into());
        return PibStatus::NullPointer;
    }
    let prior = std::slice::from_raw_parts(phi_prior, k_phi).to_vec();
    let obs_flat = std::slice::from_raw_parts(obs_given_phi, k_phi.saturating_mul(k_x));
    let obs: Vec<Vec<f64>> = obs_flat.chunks(k_x).map(|row| row.to_vec()).collect();
    guarded(|| match World::new(prior.clone(), obs.clone()) {
        Ok(world) => {
            *out = Box::into_raw(Box::new(PibWorld(world)));
            PibStatus::Ok
        }
        Err(err) => fail(err),
    })
}

/// Looks up a built-in world ("w1" or "w2") by NUL-terminated name.
///
/// # Safety
/// `name` must be a valid NUL-terminated string and `out` a valid
/// destination pointer.
#[no_mangle]
pub unsafe extern "C" fn pib_world_builtin(
    name: *const c_char,
    out: *mut *mut PibWorld,
) -> PibStatus {
    if name.is_null() || out.is_null() {
        set_last_error("null pointer argument".into());
        return PibStatus::NullPointer;
    }
    let name = match CStr::from_ptr(name).to_str() {
        Ok(s) => s.to_string(),
        Err(_) => {
            set_last_error("world name is not valid UTF-8".into());
            return PibStatus::InvalidArgument;
        }
    };
    guarded(|| match World::builtin(&name) {
        Ok(world) => {
            *out = Box::into_raw(Box::new(PibWorld(world)));
            PibStatus::Ok
        }
        Err(err) => fail(err),
    })
}

/// Releases a world handle. Null is a no-op.
///
/// # Safety
/// `world` must have come from `pib_world_new`/`pib_world_builtin` and not
/// have been freed already.
#[no_mangle]
pub unsafe extern "C" fn pib_world_free(world: *mut PibWorld) {
    if !world.is_null() {
        drop(Box::from_raw(world));
    }
}

/// Materializes the exact joint table for `n_past` past and `n_future`
/// future draws.
///
/// # Safety
/// `world` must be a live world handle and `out` a valid destination.
#[no_mangle]
pub unsafe extern "C" fn pib_joint_new(
    world: *const PibWorld,
    n_past: usize,
    n_future: usize,
    out: *mut *mut PibJointModel,
) -> PibStatus {
    if world.is_null() || out.is_null() {
        set_last_error("null pointer argument".into());
        return PibStatus::NullPointer;
    }
    let world = &(*world).0;
    guarded(|| match JointModel::new(world, n_past, n_future) {
        Ok(joint) => {
            *out = Box::into_raw(Box::new(PibJointModel(joint)));
            PibStatus::Ok
        }
        Err(err) => fail(err),
    })
}

/// Releases a joint handle. Null is a no-op.
///
/// # Safety
/// `joint` must have come from `pib_joint_new` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn pib_joint_free(joint: *mut PibJointModel) {
    if !joint.is_null() {
        drop(Box::from_raw(joint));
    }
}

/// I(X_P; X_F) of the joint, in nats.
///
/// # Safety
/// `joint` must be a live joint handle and `out` a valid destination.
#[no_mangle]
pub unsafe extern "C" fn pib_predictive_information(
    joint: *const PibJointModel,
    out: *mut f64,
) -> PibStatus {
    if joint.is_null() || out.is_null() {
        set_last_error("null pointer argument".into());
        return PibStatus::NullPointer;
    }
    let joint = &(*joint).0;
    guarded(|| match mutual_information(joint.past_future().view()) {
        Ok(mi) => {
            *out = mi;
            PibStatus::Ok
        }
        Err(err) => fail(err),
    })
}

/// Solver settings for [`pib_curve`] and [`pib_solve`]. Zeroed fields fall
/// back to the defaults (k_theta 2, restarts 8, max_iters 10000, tol 1e-10).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PibSolverOptions {
    pub k_theta: usize,
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

/// One solved β grid point.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PibCurveRecord {
    pub beta: f64,
    pub mi_theta_past: f64,
    pub mi_theta_future: f64,
    pub cmi_theta_past_given_future: f64,
    pub exact_objective: f64,
    pub variational_objective: f64,
    pub restarts_used: u64,
    pub iterations: u64,
}

fn solver_config(options: &PibSolverOptions) -> SolverConfig {
    let defaults = SolverConfig::default();
    SolverConfig {
        beta: 0.0,
        k_theta: if options.k_theta == 0 {
            defaults.k_theta
        } else {
            options.k_theta
        },
        restarts: if options.restarts == 0 {
            defaults.restarts
        } else {
            options.restarts
        },
        max_iters: if options.max_iters == 0 {
            defaults.max_iters
        } else {
            options.max_iters
        },
        tol: if options.tol > 0.0 {
            options.tol
        } else {
            defaults.tol
        },
        seed: options.seed,
    }
}

fn record_from(
    joint: &JointModel,
    beta: f64,
    cfg: &SolverConfig,
) -> Result<PibCurveRecord, PibError> {
    let solution = ba_solve(joint, cfg)?;
    let cj = channel_joint(joint, &solution.channel)?;
    let exact = exact_pib_objective(&cj, beta)?;
    let variational = variational_objective(
        &cj,
        &optimal_prior(&cj),
        &optimal_factorized_likelihood(&cj),
        beta,
    )?;
    Ok(PibCurveRecord {
        beta,
        mi_theta_past: cj.mi_theta_past()?,
        mi_theta_future: cj.mi_theta_future()?,
        cmi_theta_past_given_future: cj.cmi_theta_past_given_future()?,
        exact_objective: exact,
        variational_objective: variational,
        restarts_used: solution.diagnostics.restarts_used as u64,
        iterations: solution.diagnostics.iterations as u64,
    })
}

/// Traces the information curve over a strictly increasing β grid in
/// [0, 1), writing one record per grid point into `out_records`.
///
/// # Safety
/// `joint` must be a live joint handle, `betas` must point to `n_betas`
/// doubles, and `out_records` to space for `n_betas` records.
#[no_mangle]
pub unsafe extern "C" fn pib_curve(
    joint: *const PibJointModel,
    betas: *const f64,
    n_betas: usize,
    options: PibSolverOptions,
    out_records: *mut PibCurveRecord,
) -> PibStatus {
    if joint.is_null() || betas.is_null() || out_records.is_null() {
        set_last_error("null pointer argument".into());
        return PibStatus::NullPointer;
    }
    let joint = &(*joint).0;
    let betas = std::slice::from_raw_parts(betas, n_betas).to_vec();
    let out = std::slice::from_raw_parts_mut(out_records, n_betas);
    guarded(|| match information_curve(joint, &betas, &solver_config(&options)) {
        Ok(records) => {
            for (slot, r) in out.iter_mut().zip(&records) {
                *slot = PibCurveRecord {
                    beta: r.beta,
                    mi_theta_past: r.mi_theta_past,
                    mi_theta_future: r.mi_theta_future,
                    cmi_theta_past_given_future: r.cmi_theta_past_given_future,
                    exact_objective: r.exact_objective,
                    variational_objective: r.variational_objective,
                    restarts_used: r.restarts_used as u64,
                    iterations: r.iterations as u64,
                };
            }
            PibStatus::Ok
        }
        Err(err) => fail(err),
    })
}

/// Solves a single β and reports the channel's informations plus the exact
/// and variational objectives (the latter at the optimal tables).
///
/// # Safety
/// `joint` must be a live joint handle and `out_record` a valid
/// destination pointer.
#[no_mangle]
pub unsafe extern "C" fn pib_solve(
    joint: *const PibJointModel,
    beta: f64,
    options: PibSolverOptions,
    out_record: *mut PibCurveRecord,
) -> PibStatus {
    if joint.is_null() || out_record.is_null() {
        set_last_error("null pointer argument".into());
        return PibStatus::NullPointer;
    }
    let joint = &(*joint).0;
    guarded(|| {
        let cfg = SolverConfig {
            beta,
            ..solver_config(&options)
        };
        match record_from(joint, beta, &cfg) {
            Ok(record) => {
                *out_record = record;
                PibStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Tempered Beta posterior parameters and log-partition value.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PibBetaPosterior {
    pub a: f64,
    pub b: f64,
    pub log_partition: f64,
}

/// Beta–Bernoulli tempered update.
///
/// # Safety
/// `out` must be a valid destination pointer.
#[no_mangle]
pub unsafe extern "C" fn pib_beta_bernoulli_power(
    prior_a: f64,
    prior_b: f64,
    successes: u64,
    trials: u64,
    beta: f64,
    out: *mut PibBetaPosterior,
) -> PibStatus {
    if out.is_null() {
        set_last_error("null pointer argument".into());
        return PibStatus::NullPointer;
    }
    guarded(|| {
        let outcome = BetaBernoulliModel::new(prior_a, prior_b, successes, trials)
            .and_then(|m| beta_bernoulli_power(&m, beta));
        match outcome {
            Ok(p) => {
                let (a, b) = match p.params {
                    PosteriorParams::Beta { a, b } => (a, b),
                    _ => unreachable!("beta family"),
                };
                *out = PibBetaPosterior {
                    a,
                    b,
                    log_partition: p.log_partition,
                };
                PibStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Tempered Gaussian posterior parameters and log-partition value.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PibGaussianPosterior {
    pub mean: f64,
    pub var: f64,
    pub log_partition: f64,
}

/// Gaussian-mean tempered update on `n` observations.
///
/// # Safety
/// `data` must point to `n` doubles (may be null when `n` is 0) and `out`
/// must be a valid destination.
#[no_mangle]
pub unsafe extern "C" fn pib_gaussian_power(
    prior_mean: f64,
    prior_var: f64,
    obs_var: f64,
    data: *const f64,
    n: usize,
    beta: f64,
    out: *mut PibGaussianPosterior,
) -> PibStatus {
    if (data.is_null() && n > 0) || out.is_null() {
        set_last_error("null pointer argument".into());
        return PibStatus::NullPointer;
    }
    let data = if n == 0 {
        Vec::new()
    } else {
        std::slice::from_raw_parts(data, n).to_vec()
    };
    guarded(|| {
        let outcome = GaussianMeanModel::new(prior_mean, prior_var, obs_var, data.clone())
            .and_then(|m| gaussian_power(&m, beta));
        match outcome {
            Ok(p) => {
                let (mean, var) = match p.params {
                    PosteriorParams::Gaussian { mean, var } => (mean, var),
                    _ => unreachable!("gaussian family"),
                };
                *out = PibGaussianPosterior {
                    mean,
                    var,
                    log_partition: p.log_partition,
                };
                PibStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Dirichlet–categorical tempered update over `k` categories; posterior
/// concentrations are written to `out_alphas`.
///
/// # Safety
/// `prior_alphas` and `counts` must point to `k` entries each, `out_alphas`
/// to space for `k` doubles, and `out_log_partition` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pib_dirichlet_power(
    prior_alphas: *const f64,
    counts: *const u64,
    k: usize,
    beta: f64,
    out_alphas: *mut f64,
    out_log_partition: *mut f64,
) -> PibStatus {
    if prior_alphas.is_null()
        || counts.is_null()
        || out_alphas.is_null()
        || out_log_partition.is_null()
    {
        set_last_error("null pointer argument".into());
        return PibStatus::NullPointer;
    }
    let alphas = std::slice::from_raw_parts(prior_alphas, k).to_vec();
    let counts = std::slice::from_raw_parts(counts, k).to_vec();
    let out_alphas = std::slice::from_raw_parts_mut(out_alphas, k);
    guarded(|| {
        let outcome = DirichletCategoricalModel::new(alphas.clone(), counts.clone())
            .and_then(|m| dirichlet_categorical_power(&m, beta));
        match outcome {
            Ok(p) => {
                match p.params {
                    PosteriorParams::Dirichlet { alphas } => {
                        out_alphas.copy_from_slice(&alphas);
                    }
                    _ => unreachable!("dirichlet family"),
                }
                *out_log_partition = p.log_partition;
                PibStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// Result of a Gibbs variational optimization.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct PibGibbsResult {
    pub mean: f64,
    pub log_std: f64,
    pub objective: f64,
    pub iterations: u64,
    pub converged: bool,
}

/// Minimizes the Gaussian Gibbs functional by fixed-step gradient descent.
///
/// # Safety
/// `data` must point to `n` doubles (may be null when `n` is 0) and `out`
/// must be a valid destination.
#[no_mangle]
pub unsafe extern "C" fn pib_gibbs_optimize(
    prior_mean: f64,
    prior_var: f64,
    obs_var: f64,
    data: *const f64,
    n: usize,
    beta: f64,
    init_mean: f64,
    init_log_std: f64,
    step_size: f64,
    max_iters: usize,
    tol: f64,
    out: *mut PibGibbsResult,
) -> PibStatus {
    if (data.is_null() && n > 0) || out.is_null() {
        set_last_error("null pointer argument".into());
        return PibStatus::NullPointer;
    }
    let data = if n == 0 {
        Vec::new()
    } else {
        std::slice::from_raw_parts(data, n).to_vec()
    };
    guarded(|| {
        let outcome = (|| {
            let model = GaussianMeanModel::new(prior_mean, prior_var, obs_var, data.clone())?;
            let spec = GibbsObjectiveSpec::new(model, beta)?;
            let init = GaussianVariationalParams::new(init_mean, init_log_std)?;
            gibbs_optimize(&spec, init, step_size, max_iters, tol)
        })();
        match outcome {
            Ok(result) => {
                *out = PibGibbsResult {
                    mean: result.params.mean,
                    log_std: result.params.log_std,
                    objective: result.trace.last().copied().unwrap_or(f64::NAN),
                    iterations: result.iterations as u64,
                    converged: result.converged,
                };
                PibStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}

/// The closed-form centered-augmentation gap −noise_std²/(2·obs_var).
///
/// # Safety
/// `out` must be a valid destination pointer.
#[no_mangle]
pub unsafe extern "C" fn pib_augmentation_gap(
    noise_std: f64,
    obs_var: f64,
    out: *mut f64,
) -> PibStatus {
    if out.is_null() {
        set_last_error("null pointer argument".into());
        return PibStatus::NullPointer;
    }
    guarded(|| {
        let outcome = pib_core::augmentation::AugmentationSpec::new(noise_std, 1, 0).and_then(
            |spec| pib_core::augmentation::augmentation_gap_analytic(0.0, 0.0, obs_var, &spec),
        );
        match outcome {
            Ok(gap) => {
                *out = gap;
                PibStatus::Ok
            }
            Err(err) => fail(err),
        }
    })
}
