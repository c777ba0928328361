//! Deterministic CSV rendering: LF line endings, '.' decimal separator,
//! floats at 12 significant digits regardless of locale.

use crate::augmentation::McGap;
use crate::conjugate::{LimitReport, PosteriorParams};
use crate::gibbs::OptimizeResult;
use crate::solver::CurveRecord;

/// Significant digits used for every float column.
pub const CSV_SIGNIFICANT_DIGITS: usize = 12;

/// Renders a float with a fixed number of significant digits, falling back
/// to scientific notation outside the comfortable fixed-point range (the
/// same switch rule as C's `%g`, but trailing zeros are kept).
pub fn format_significant(x: f64, sig: usize) -> String {
    assert!(sig >= 1, "need at least one significant digit");
    if x == 0.0 {
        // Canonicalize -0.0 as well.
        return format!("{:.*}", sig - 1, 0.0f64);
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // Decimal exponent after rounding to `sig` digits.
    let sci = format!("{:.*e}", sig - 1, x);
    let e_pos = sci.find('e').expect("scientific rendering has an exponent");
    let exp: i32 = sci[e_pos + 1..].parse().expect("valid exponent");
    if exp < -4 || exp >= sig as i32 {
        sci
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        format!("{:.*}", decimals, x)
    }
}

fn f(x: f64) -> String {
    format_significant(x, CSV_SIGNIFICANT_DIGITS)
}

/// Renders curve records with the exact header pinned by the record's
/// field list, one row per β, newline-terminated.
pub fn emit_curve_csv(records: &[CurveRecord]) -> String {
    let mut out = String::from(
        "beta,mi_theta_past,mi_theta_future,cmi_theta_past_given_future,\
         exact_objective,variational_objective,restarts_used,iterations\n",
    );
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            f(r.beta),
            f(r.mi_theta_past),
            f(r.mi_theta_future),
            f(r.cmi_theta_past_given_future),
            f(r.exact_objective),
            f(r.variational_objective),
            r.restarts_used,
            r.iterations
        ));
    }
    out
}

/// Renders a conjugate limit report, one row per scheduled β. Posterior
/// parameter columns depend on the family; Dirichlet gets one `alpha_i`
/// column per category.
pub fn emit_limit_csv(report: &LimitReport) -> String {
    let param_header = match report
        .rows
        .first()
        .map(|r| &r.posterior.params)
    {
        Some(PosteriorParams::Beta { .. }) | None => "post_a,post_b".to_string(),
        Some(PosteriorParams::Gaussian { .. }) => "post_mean,post_var".to_string(),
        Some(PosteriorParams::Dirichlet { alphas }) => (0..alphas.len())
            .map(|i| format!("post_alpha_{i}"))
            .collect::<Vec<_>>()
            .join(","),
    };
    let mut out = format!(
        "beta,{param_header},log_partition,prior_distance,mle_distance,posterior_variance\n"
    );
    for r in &report.rows {
        let params = r
            .posterior
            .flat_params()
            .iter()
            .map(|&v| f(v))
            .collect::<Vec<_>>()
            .join(",");
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            f(r.beta),
            params,
            f(r.posterior.log_partition),
            f(r.prior_distance),
            f(r.mle_distance),
            f(r.variance)
        ));
    }
    out
}

/// Renders a descent trace: objective and parameters per iteration; the
/// last row carries the final parameters.
pub fn emit_gibbs_csv(result: &OptimizeResult) -> String {
    let mut out = String::from("iteration,objective,mean,log_std\n");
    for (i, (obj, p)) in result.trace.iter().zip(&result.params_trace).enumerate() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            i,
            f(*obj),
            f(p.mean),
            f(p.log_std)
        ));
    }
    out
}

/// Renders the augmentation gap report: analytic value, Monte Carlo
/// estimate, and the standard-error budget, as a single row.
pub fn emit_augmentation_csv(analytic: f64, mc: &McGap, mc_samples: usize) -> String {
    let mut out =
        String::from("analytic_gap,mc_estimate,mc_std_error,abs_error,mc_samples\n");
    out.push_str(&format!(
        "{},{},{},{},{}\n",
        f(analytic),
        f(mc.estimate),
        f(mc.std_error),
        f((mc.estimate - analytic).abs()),
        mc_samples
    ));
    out
}
