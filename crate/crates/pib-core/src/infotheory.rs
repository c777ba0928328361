//! Exact information measures over finite joint tables.
//!
//! Everything here is computed by direct summation in natural log (nats)
//! with the 0·log 0 = 0 convention. Mutual informations that come out
//! within 1e-12 below zero are clamped to zero; anything more negative is
//! reported as a numerical failure rather than silently absorbed.
//!
//! [`ChannelJoint`] is the four-way table p(φ, x_P, x_F, θ) induced by
//! attaching a representation channel p(θ | x_P) to a [`JointModel`]. By
//! construction θ is conditionally independent of (φ, x_F) given x_P, which
//! is what makes the chain-rule identity checked by
//! [`markov_identity_residual`] hold for every channel.

use ndarray::{Array1, Array2, Array3, Array4, ArrayView2, ArrayView3, ArrayView4, Axis};

use crate::error::{PibError, Result};
use crate::solver::Channel;
use crate::world::{DatasetSpace, JointModel, INPUT_NORMALIZATION_TOL, INTERNAL_NORMALIZATION_TOL};

/// Negative values above this floor are numerical noise and clamp to zero.
pub const NEGATIVE_INFORMATION_FLOOR: f64 = -1e-12;

fn validate_table<'a, I: IntoIterator<Item = &'a f64>>(entries: I) -> Result<()> {
    let mut sum = 0.0;
    for &v in entries {
        if !v.is_finite() || v < 0.0 {
            return Err(PibError::InvalidDistribution(format!(
                "negative or non-finite table entry {v}"
            )));
        }
        sum += v;
    }
    if (sum - 1.0).abs() >= INPUT_NORMALIZATION_TOL {
        return Err(PibError::InvalidDistribution(format!(
            "table sums to {sum}"
        )));
    }
    Ok(())
}

fn clamp_information(value: f64, what: &str) -> Result<f64> {
    if value < NEGATIVE_INFORMATION_FLOOR {
        return Err(PibError::NumericalFailure(format!(
            "{what} evaluated to {value}, below the {NEGATIVE_INFORMATION_FLOOR:e} floor"
        )));
    }
    Ok(value.max(0.0))
}

/// Shannon entropy −Σ p ln p of a probability table, in nats.
pub fn entropy(p: &[f64]) -> Result<f64> {
    validate_table(p)?;
    let h: f64 = p
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|&v| -v * v.ln())
        .sum();
    Ok(h.max(0.0))
}

/// Mutual information of a pairwise joint table, in nats.
pub fn mutual_information(joint: ArrayView2<'_, f64>) -> Result<f64> {
    validate_table(joint.iter())?;
    let px = joint.sum_axis(Axis(1));
    let py = joint.sum_axis(Axis(0));
    let mut mi = 0.0;
    for ((i, j), &p) in joint.indexed_iter() {
        if p > 0.0 {
            mi += p * (p / (px[i] * py[j])).ln();
        }
    }
    clamp_information(mi, "mutual information")
}

/// Conditional mutual information I(X;Y|Z) of a three-way joint table,
/// where `cond_axis` selects which axis plays Z. Computed as
/// Σ_z p(z) I(X;Y | Z = z), in nats.
pub fn conditional_mutual_information(
    joint: ArrayView3<'_, f64>,
    cond_axis: usize,
) -> Result<f64> {
    if cond_axis > 2 {
        return Err(PibError::InvalidArgument(format!(
            "conditioning axis {cond_axis} out of range for a three-way table"
        )));
    }
    validate_table(joint.iter())?;
    // Bring the conditioning axis to the front.
    let axes = match cond_axis {
        0 => [0, 1, 2],
        1 => [1, 0, 2],
        _ => [2, 0, 1],
    };
    let view = joint.permuted_axes(axes);
    let mut cmi = 0.0;
    for slice in view.axis_iter(Axis(0)) {
        let pz: f64 = slice.sum();
        if pz <= 0.0 {
            continue;
        }
        let sx = slice.sum_axis(Axis(1));
        let sy = slice.sum_axis(Axis(0));
        for ((x, y), &s) in slice.indexed_iter() {
            if s > 0.0 {
                cmi += s * (s * pz / (sx[x] * sy[y])).ln();
            }
        }
    }
    clamp_information(cmi, "conditional mutual information")
}

/// Exact four-way table p(φ, x_P, x_F, θ) for a joint model and a channel.
#[derive(Debug, Clone)]
pub struct ChannelJoint {
    joint4: Array4<f64>,
    past_space: DatasetSpace,
    future_space: DatasetSpace,
}

/// Attaches a channel to a joint model, materializing p(φ, x_P, x_F, θ)
/// = p(φ, x_P, x_F) · p(θ | x_P) cell by cell.
pub fn channel_joint(joint: &JointModel, channel: &Channel) -> Result<ChannelJoint> {
    let past = joint.past_space();
    if channel.n_inputs() != past.size() {
        return Err(PibError::DimensionMismatch(format!(
            "channel has {} input rows but the past-dataset space has {} elements",
            channel.n_inputs(),
            past.size()
        )));
    }
    let base = joint.joint();
    let (k_phi, np, nf) = base.dim();
    let k_theta = channel.k_theta();
    let rows = channel.rows();
    let mut joint4 = Array4::zeros((k_phi, np, nf, k_theta));
    for phi in 0..k_phi {
        for i in 0..np {
            for j in 0..nf {
                let mass = base[(phi, i, j)];
                for t in 0..k_theta {
                    joint4[(phi, i, j, t)] = mass * rows[(i, t)];
                }
            }
        }
    }
    let total = joint4.sum();
    if (total - 1.0).abs() > INTERNAL_NORMALIZATION_TOL {
        return Err(PibError::NumericalFailure(format!(
            "channel joint sums to {total}, outside internal tolerance"
        )));
    }
    Ok(ChannelJoint {
        joint4,
        past_space: past,
        future_space: joint.future_space(),
    })
}

impl ChannelJoint {
    pub fn joint4(&self) -> ArrayView4<'_, f64> {
        self.joint4.view()
    }

    pub fn k_phi(&self) -> usize {
        self.joint4.dim().0
    }

    pub fn k_theta(&self) -> usize {
        self.joint4.dim().3
    }

    pub fn past_space(&self) -> DatasetSpace {
        self.past_space
    }

    pub fn future_space(&self) -> DatasetSpace {
        self.future_space
    }

    /// Marginal p(x_P, θ).
    pub fn past_theta(&self) -> Array2<f64> {
        self.joint4.sum_axis(Axis(0)).sum_axis(Axis(1))
    }

    /// Marginal p(x_F, θ).
    pub fn future_theta(&self) -> Array2<f64> {
        self.joint4.sum_axis(Axis(0)).sum_axis(Axis(0))
    }

    /// Marginal p(x_P, x_F, θ).
    pub fn past_future_theta(&self) -> Array3<f64> {
        self.joint4.sum_axis(Axis(0))
    }

    /// Marginal p(x_P).
    pub fn past_marginal(&self) -> Array1<f64> {
        self.past_theta().sum_axis(Axis(1))
    }

    /// Marginal p(θ).
    pub fn theta_marginal(&self) -> Array1<f64> {
        self.past_theta().sum_axis(Axis(0))
    }

    pub fn mi_theta_past(&self) -> Result<f64> {
        mutual_information(self.past_theta().view())
    }

    pub fn mi_theta_future(&self) -> Result<f64> {
        mutual_information(self.future_theta().view())
    }

    /// I(θ; X_P | X_F).
    pub fn cmi_theta_past_given_future(&self) -> Result<f64> {
        conditional_mutual_information(self.past_future_theta().view(), 1)
    }

    /// I(θ; X_F | X_P); zero for every channel built by this artifact.
    pub fn cmi_theta_future_given_past(&self) -> Result<f64> {
        conditional_mutual_information(self.past_future_theta().view(), 0)
    }
}

/// The chain-rule identity components for a channel joint.
#[derive(Debug, Clone, Copy)]
pub struct MarkovIdentity {
    pub mi_theta_past: f64,
    pub mi_theta_future: f64,
    pub cmi_theta_past_given_future: f64,
    pub cmi_theta_future_given_past: f64,
    /// |I(θ;X_F) − I(θ;X_P) + I(θ;X_P|X_F)|.
    pub residual: f64,
}

/// Evaluates I(θ;X_F) = I(θ;X_P) − I(θ;X_P|X_F) as an executable residual.
/// The residual stays below 1e-10 for every channel; callers assert.
pub fn markov_identity_residual(cj: &ChannelJoint) -> Result<MarkovIdentity> {
    let mi_theta_past = cj.mi_theta_past()?;
    let mi_theta_future = cj.mi_theta_future()?;
    let cmi_theta_past_given_future = cj.cmi_theta_past_given_future()?;
    let cmi_theta_future_given_past = cj.cmi_theta_future_given_past()?;
    let residual = (mi_theta_future - mi_theta_past + cmi_theta_past_given_future).abs();
    Ok(MarkovIdentity {
        mi_theta_past,
        mi_theta_future,
        cmi_theta_past_given_future,
        cmi_theta_future_given_past,
        residual,
    })
}
