//! Exact, desk-scale laboratory for the predictive information bottleneck.
//!
//! The crate optimizes the bottleneck objective over representation
//! channels on finite worlds where every distribution is an explicit
//! table, evaluates the matching variational bounds, and reproduces
//! generalized Bayesian inference (power posteriors, Gibbs variational
//! inference, augmented likelihood bounds) as special cases — all
//! checkable against brute-force enumeration or closed-form conjugate
//! results.
//!
//! Modules:
//! - [`world`]: finite data-generating processes and exact joints over
//!   (φ, past dataset, future dataset).
//! - [`infotheory`]: entropy, mutual information, conditional mutual
//!   information, and the chain-rule identity over channel joints.
//! - [`solver`]: the fixed-point bottleneck solver, variational bounds,
//!   optimal prior/likelihood tables, and information-curve tracing.
//! - [`conjugate`]: closed-form power posteriors with log-partition
//!   values and temperature-limit diagnostics.
//! - [`gibbs`]: Gibbs variational inference for the Gaussian mean model
//!   with analytic and finite-difference gradients.
//! - [`augmentation`]: the centered-augmentation bound for Gaussian
//!   likelihoods, analytic and Monte Carlo.
//! - [`cli`]: the JSON-config batch driver behind the `pib` binary.

pub mod augmentation;
pub mod cli;
pub mod conjugate;
pub mod error;
pub mod gibbs;
pub mod infotheory;
pub mod solver;
pub mod world;

pub use error::{PibError, Result};
pub use infotheory::{
    channel_joint, conditional_mutual_information, entropy, markov_identity_residual,
    mutual_information, ChannelJoint, MarkovIdentity,
};
pub use solver::{
    ba_solve, ba_step, conditional_prior_bound, exact_conditional_prior, exact_pib_objective,
    information_curve, optimal_factorized_likelihood, optimal_prior, variational_objective,
    BaSolution, Channel, ConditionalPrior, CurveRecord, LikelihoodTable, PriorTable, SolverConfig,
};
pub use world::{DatasetSpace, JointModel, World};
