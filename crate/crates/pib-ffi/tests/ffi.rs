//! Exercises the C ABI through the exported functions themselves.

use std::ffi::{CStr, CString};
use std::ptr;

use pib_ffi::*;

fn w1() -> *mut PibWorld {
    let name = CString::new("w1").unwrap();
    let mut world = ptr::null_mut();
    let status = unsafe { pib_world_builtin(name.as_ptr(), &mut world) };
    assert_eq!(status, PibStatus::Ok);
    assert!(!world.is_null());
    world
}

#[test]
fn builtin_world_and_joint_lifecycle() {
    let world = w1();
    let mut joint = ptr::null_mut();
    assert_eq!(
        unsafe { pib_joint_new(world, 1, 1, &mut joint) },
        PibStatus::Ok
    );
    let mut mi = 0.0;
    assert_eq!(
        unsafe { pib_predictive_information(joint, &mut mi) },
        PibStatus::Ok
    );
    assert!((mi - 0.221754).abs() < 1e-6, "I(X_P;X_F) = {mi}");
    unsafe {
        pib_joint_free(joint);
        pib_world_free(world);
    }
}

#[test]
fn custom_world_round_trip() {
    let prior = [0.5, 0.5];
    let obs = [0.9, 0.1, 0.1, 0.9];
    let mut world = ptr::null_mut();
    let status = unsafe { pib_world_new(prior.as_ptr(), 2, obs.as_ptr(), 2, &mut world) };
    assert_eq!(status, PibStatus::Ok);
    unsafe { pib_world_free(world) };
}

#[test]
fn invalid_world_reports_a_message() {
    let prior = [0.5, 0.6];
    let obs = [0.9, 0.1, 0.1, 0.9];
    let mut world = ptr::null_mut();
    let status = unsafe { pib_world_new(prior.as_ptr(), 2, obs.as_ptr(), 2, &mut world) };
    assert_eq!(status, PibStatus::InvalidDistribution);
    let message = unsafe { CStr::from_ptr(pib_last_error_message()) };
    assert!(message.to_str().unwrap().contains("sums"));
}

#[test]
fn unknown_builtin_is_invalid_argument() {
    let name = CString::new("w9").unwrap();
    let mut world = ptr::null_mut();
    assert_eq!(
        unsafe { pib_world_builtin(name.as_ptr(), &mut world) },
        PibStatus::InvalidArgument
    );
}

#[test]
fn null_pointers_are_rejected_not_dereferenced() {
    let mut out = 0.0;
    assert_eq!(
        unsafe { pib_predictive_information(ptr::null(), &mut out) },
        PibStatus::NullPointer
    );
    assert_eq!(
        unsafe { pib_world_builtin(ptr::null(), ptr::null_mut()) },
        PibStatus::NullPointer
    );
    unsafe {
        pib_world_free(ptr::null_mut());
        pib_joint_free(ptr::null_mut());
    }
}

fn default_options(seed: u64) -> PibSolverOptions {
    PibSolverOptions {
        k_theta: 2,
        restarts: 8,
        max_iters: 10_000,
        tol: 1e-10,
        seed,
    }
}

#[test]
fn curve_fills_records_in_grid_order() {
    let world = w1();
    let mut joint = ptr::null_mut();
    unsafe { pib_joint_new(world, 1, 1, &mut joint) };
    let betas = [0.1, 0.5, 0.9];
    let mut records = [PibCurveRecord {
        beta: 0.0,
        mi_theta_past: 0.0,
        mi_theta_future: 0.0,
        cmi_theta_past_given_future: 0.0,
        exact_objective: 0.0,
        variational_objective: 0.0,
        restarts_used: 0,
        iterations: 0,
    }; 3];
    let status = unsafe {
        pib_curve(
            joint,
            betas.as_ptr(),
            betas.len(),
            default_options(7),
            records.as_mut_ptr(),
        )
    };
    assert_eq!(status, PibStatus::Ok);
    for (r, &beta) in records.iter().zip(&betas) {
        assert_eq!(r.beta, beta);
        assert_eq!(r.restarts_used, 8);
        assert!(r.variational_objective >= r.exact_objective - 1e-10);
    }
    assert!(records[2].mi_theta_future >= records[0].mi_theta_future);

    // Out-of-range beta is rejected through the same path.
    let bad = [1.5];
    let status = unsafe {
        pib_curve(
            joint,
            bad.as_ptr(),
            1,
            default_options(7),
            records.as_mut_ptr(),
        )
    };
    assert_eq!(status, PibStatus::BetaOutOfRange);
    unsafe {
        pib_joint_free(joint);
        pib_world_free(world);
    }
}

#[test]
fn single_solve_matches_the_curve_record() {
    let world = w1();
    let mut joint = ptr::null_mut();
    unsafe { pib_joint_new(world, 1, 1, &mut joint) };
    let mut single = PibCurveRecord {
        beta: 0.0,
        mi_theta_past: 0.0,
        mi_theta_future: 0.0,
        cmi_theta_past_given_future: 0.0,
        exact_objective: 0.0,
        variational_objective: 0.0,
        restarts_used: 0,
        iterations: 0,
    };
    assert_eq!(
        unsafe { pib_solve(joint, 0.9, default_options(7), &mut single) },
        PibStatus::Ok
    );
    let betas = [0.9];
    let mut from_curve = [single];
    unsafe {
        pib_curve(
            joint,
            betas.as_ptr(),
            1,
            default_options(7),
            from_curve.as_mut_ptr(),
        )
    };
    assert_eq!(single.mi_theta_future, from_curve[0].mi_theta_future);
    assert_eq!(single.exact_objective, from_curve[0].exact_objective);
    unsafe {
        pib_joint_free(joint);
        pib_world_free(world);
    }
}

#[test]
fn conjugate_updates_through_the_abi() {
    let mut beta_post = PibBetaPosterior {
        a: 0.0,
        b: 0.0,
        log_partition: 0.0,
    };
    assert_eq!(
        unsafe { pib_beta_bernoulli_power(1.0, 1.0, 3, 4, 1.0, &mut beta_post) },
        PibStatus::Ok
    );
    assert_eq!((beta_post.a, beta_post.b), (4.0, 2.0));

    let data = [2.0];
    let mut gauss = PibGaussianPosterior {
        mean: 0.0,
        var: 0.0,
        log_partition: 0.0,
    };
    assert_eq!(
        unsafe { pib_gaussian_power(0.0, 1.0, 1.0, data.as_ptr(), 1, 3.0, &mut gauss) },
        PibStatus::Ok
    );
    assert!((gauss.mean - 1.5).abs() < 1e-12);
    assert!((gauss.var - 0.25).abs() < 1e-12);

    let alphas = [1.0, 1.0, 1.0];
    let counts = [2u64, 0, 1];
    let mut out_alphas = [0.0; 3];
    let mut log_z = 0.0;
    assert_eq!(
        unsafe {
            pib_dirichlet_power(
                alphas.as_ptr(),
                counts.as_ptr(),
                3,
                2.0,
                out_alphas.as_mut_ptr(),
                &mut log_z,
            )
        },
        PibStatus::Ok
    );
    assert_eq!(out_alphas, [5.0, 1.0, 3.0]);

    // Invalid shapes surface as status codes.
    assert_eq!(
        unsafe { pib_beta_bernoulli_power(-1.0, 1.0, 3, 4, 1.0, &mut beta_post) },
        PibStatus::InvalidArgument
    );
}

#[test]
fn gibbs_descent_through_the_abi() {
    let data = [1.0, 3.0];
    let mut result = PibGibbsResult {
        mean: 0.0,
        log_std: 0.0,
        objective: 0.0,
        iterations: 0,
        converged: false,
    };
    let status = unsafe {
        pib_gibbs_optimize(
            0.0,
            1.0,
            1.0,
            data.as_ptr(),
            2,
            1.0,
            0.0,
            0.0,
            0.05,
            100_000,
            1e-9,
            &mut result,
        )
    };
    assert_eq!(status, PibStatus::Ok);
    assert!(result.converged);
    assert!((result.mean - 4.0 / 3.0).abs() < 1e-6);
    let var = (2.0 * result.log_std).exp();
    assert!((var - 1.0 / 3.0).abs() < 1e-6);
}

#[test]
fn augmentation_gap_and_version() {
    let mut gap = 0.0;
    assert_eq!(
        unsafe { pib_augmentation_gap(0.5, 1.0, &mut gap) },
        PibStatus::Ok
    );
    assert_eq!(gap, -0.125);
    let version = unsafe { CStr::from_ptr(pib_version()) };
    assert!(!version.to_str().unwrap().is_empty());
}
