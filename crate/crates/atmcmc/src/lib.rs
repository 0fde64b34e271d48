//! Additive transformation MCMC (ATMCMC) and random-walk Metropolis–Hastings
//! (RWMH) kernels for product targets, together with the optimal-scaling
//! calculus (diffusion speeds, optimal scale, asymptotic acceptance rates)
//! and empirical convergence diagnostics (ensemble KS curves, drift ratios,
//! regularity moments, draw-count accounting).
//!
//! ATMCMC perturbs all `d` coordinates with a single positive draw `ε` and
//! independent random signs, proposing `y_i = x_i + b_i ε`; RWMH gives every
//! coordinate its own Gaussian increment. Both kernels share the symmetric
//! Metropolis acceptance rule in log space.

pub mod diagnostics;
mod error;
pub mod quad;
pub mod rng;
pub mod samplers;
pub mod scaling;
pub mod targets;

pub use error::Error;
pub use rng::RngStream;
pub use samplers::{ChainRun, KernelKind, ProposalSpec, StepOutcome};
pub use scaling::{QuadratureSpec, ScalingResult};
pub use targets::{StateVector, TargetModel};

/// Identifier for the RNG algorithm, recorded in every experiment's metadata
/// so outputs are regenerable from the sidecar alone.
pub const RNG_ALGORITHM: &str = "chacha8";
