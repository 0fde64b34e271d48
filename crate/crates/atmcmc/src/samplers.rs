//! Markov transition kernels: ATMCMC, RWMH and the c-scaled ATMCMC variant,
//! plus the single-chain runner.
//!
//! All acceptance arithmetic stays in log space; a move is accepted iff
//! `log u < log α`. Move types are equiprobable and the ε-density does not
//! depend on the signs, so the proposals are symmetric and the acceptance
//! ratio reduces to the bare density ratio.

use crate::rng::{DrawCounts, RngStream};
use crate::targets::{StateVector, TargetModel};
use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum KernelKind {
    Atmcmc,
    Rwmh,
    AtmcmcScaled,
}

impl KernelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            KernelKind::Atmcmc => "atmcmc",
            KernelKind::Rwmh => "rwmh",
            KernelKind::AtmcmcScaled => "atmcmc_scaled",
        }
    }
}

impl std::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "atmcmc" => Ok(KernelKind::Atmcmc),
            "rwmh" => Ok(KernelKind::Rwmh),
            "atmcmc_scaled" => Ok(KernelKind::AtmcmcScaled),
            other => Err(Error::InvalidSpec(format!("unknown kernel `{other}`"))),
        }
    }
}

/// Proposal parameters. The per-coordinate standard deviation in the scaling
/// regime is `l/√d` for both kernel families.
#[derive(Debug, Clone)]
pub struct ProposalSpec {
    pub kind: KernelKind,
    pub l: f64,
    pub d: usize,
    /// Per-coordinate scalars for the c-scaled variant only; must not be all
    /// equal (all-equal collapses to plain ATMCMC with a rescaled l).
    pub c: Option<Vec<f64>>,
}

impl ProposalSpec {
    pub fn new(kind: KernelKind, l: f64, d: usize) -> Result<Self, Error> {
        let spec = ProposalSpec { kind, l, d, c: None };
        spec.validate()?;
        Ok(spec)
    }

    pub fn scaled(l: f64, d: usize, c: Vec<f64>) -> Result<Self, Error> {
        let spec = ProposalSpec {
            kind: KernelKind::AtmcmcScaled,
            l,
            d,
            c: Some(c),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), Error> {
        if !self.l.is_finite() || self.l <= 0.0 {
            return Err(Error::invalid("l", format!("must be finite and > 0, got {}", self.l)));
        }
        if self.d == 0 {
            return Err(Error::invalid("d", "must be >= 1"));
        }
        match (self.kind, &self.c) {
            (KernelKind::AtmcmcScaled, Some(c)) => {
                if c.len() != self.d {
                    return Err(Error::InvalidSpec(format!(
                        "c has length {}, expected d = {}",
                        c.len(),
                        self.d
                    )));
                }
                if !c.iter().all(|&ci| ci.is_finite() && ci > 0.0) {
                    return Err(Error::InvalidSpec("all entries of c must be positive".into()));
                }
                if c.iter().all(|&ci| ci == c[0]) {
                    return Err(Error::InvalidSpec("entries of c must not be all equal".into()));
                }
            }
            (KernelKind::AtmcmcScaled, None) => {
                return Err(Error::InvalidSpec("atmcmc_scaled requires c".into()));
            }
            (_, Some(_)) => {
                return Err(Error::InvalidSpec(format!(
                    "c is only valid for atmcmc_scaled, not {}",
                    self.kind.as_str()
                )));
            }
            (_, None) => {}
        }
        Ok(())
    }

    /// Per-coordinate proposal standard deviation l/√d.
    pub fn sigma(&self) -> f64 {
        self.l / (self.d as f64).sqrt()
    }
}

/// Result of one kernel application.
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub next: StateVector,
    pub accepted: bool,
    pub log_alpha: f64,
    pub draws_consumed: DrawCounts,
}

/// log α = min(0, log π(y) − log π(x)); no Hastings correction is needed for
/// these symmetric proposals.
pub fn accept_prob(model: &TargetModel, x: &StateVector, y: &StateVector) -> Result<f64, Error> {
    let lx = model.log_pi(x)?;
    let ly = model.log_pi(y)?;
    Ok((ly - lx).min(0.0))
}

fn decide(
    model: &TargetModel,
    x: &StateVector,
    y: StateVector,
    log_u: f64,
    draws: DrawCounts,
) -> Result<StepOutcome, Error> {
    let log_alpha = accept_prob(model, x, &y)?;
    let accepted = log_u < log_alpha;
    Ok(StepOutcome {
        next: if accepted { y } else { x.clone() },
        accepted,
        log_alpha,
        draws_consumed: draws,
    })
}

fn check_step(model: &TargetModel, spec: &ProposalSpec, x: &StateVector, kind: KernelKind) -> Result<(), Error> {
    if spec.kind != kind {
        return Err(Error::InvalidSpec(format!(
            "spec kind {} does not match kernel {}",
            spec.kind.as_str(),
            kind.as_str()
        )));
    }
    spec.validate()?;
    if spec.d != model.dim() || x.dim() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: if spec.d != model.dim() { spec.d } else { x.dim() },
        });
    }
    Ok(())
}

fn atmcmc_propose(x: &StateVector, eps: f64, signs: &[f64], c: Option<&[f64]>) -> StateVector {
    let coords = x
        .coords()
        .iter()
        .enumerate()
        .map(|(i, &xi)| xi + signs[i] * c.map_or(1.0, |c| c[i]) * eps)
        .collect();
    StateVector::new(coords).expect("finite move from finite state")
}

/// One ATMCMC transition: a single half-normal ε with σ = l/√d, d independent
/// signs, y_i = x_i + b_i ε. Consumes 1 continuous draw + d sign bits + 1
/// accept uniform.
pub fn atmcmc_step(
    model: &TargetModel,
    spec: &ProposalSpec,
    x: &StateVector,
    stream: &mut RngStream,
) -> Result<StepOutcome, Error> {
    check_step(model, spec, x, KernelKind::Atmcmc)?;
    let eps = stream.draw_half_normal(spec.sigma())?;
    let signs = stream.draw_signs(spec.d)?;
    let y = atmcmc_propose(x, eps, &signs, None);
    let log_u = stream.draw_uniform().ln();
    decide(
        model,
        x,
        y,
        log_u,
        DrawCounts {
            continuous: 2,
            sign_bits: spec.d as u64,
        },
    )
}

/// One RWMH transition: y = x + ε⃗ with ε⃗ iid N(0, l²/d). Consumes d
/// continuous draws + 1 accept uniform.
pub fn rwmh_step(
    model: &TargetModel,
    spec: &ProposalSpec,
    x: &StateVector,
    stream: &mut RngStream,
) -> Result<StepOutcome, Error> {
    check_step(model, spec, x, KernelKind::Rwmh)?;
    let noise = stream.draw_std_normal_vec(spec.d, spec.sigma())?;
    let coords = x.coords().iter().zip(&noise).map(|(xi, e)| xi + e).collect();
    let y = StateVector::new(coords)?;
    let log_u = stream.draw_uniform().ln();
    decide(
        model,
        x,
        y,
        log_u,
        DrawCounts {
            continuous: spec.d as u64 + 1,
            sign_bits: 0,
        },
    )
}

/// The c-scaled variant: y_i = x_i + b_i c_i ε with one shared ε, for targets
/// whose contours run parallel to {|x_1| = … = |x_d|}.
pub fn atmcmc_scaled_step(
    model: &TargetModel,
    spec: &ProposalSpec,
    x: &StateVector,
    stream: &mut RngStream,
) -> Result<StepOutcome, Error> {
    check_step(model, spec, x, KernelKind::AtmcmcScaled)?;
    let c = spec.c.as_deref().expect("validated");
    let eps = stream.draw_half_normal(spec.sigma())?;
    let signs = stream.draw_signs(spec.d)?;
    let y = atmcmc_propose(x, eps, &signs, Some(c));
    let log_u = stream.draw_uniform().ln();
    decide(
        model,
        x,
        y,
        log_u,
        DrawCounts {
            continuous: 2,
            sign_bits: spec.d as u64,
        },
    )
}

/// Apply whichever kernel the spec names.
pub fn step(
    model: &TargetModel,
    spec: &ProposalSpec,
    x: &StateVector,
    stream: &mut RngStream,
) -> Result<StepOutcome, Error> {
    match spec.kind {
        KernelKind::Atmcmc => atmcmc_step(model, spec, x, stream),
        KernelKind::Rwmh => rwmh_step(model, spec, x, stream),
        KernelKind::AtmcmcScaled => atmcmc_scaled_step(model, spec, x, stream),
    }
}

// Deterministic hooks for kernel tests: injected (ε, b, u), no stream.
#[doc(hidden)]
pub fn atmcmc_step_forced(
    model: &TargetModel,
    spec: &ProposalSpec,
    x: &StateVector,
    eps: f64,
    signs: &[f64],
    log_u: f64,
) -> Result<StepOutcome, Error> {
    check_step(model, spec, x, spec.kind)?;
    let c = spec.c.as_deref();
    let y = atmcmc_propose(x, eps, signs, c);
    decide(model, x, y, log_u, DrawCounts::default())
}

/// A completed single-chain run: thinned trace plus counters.
#[derive(Debug, Clone)]
pub struct ChainRun {
    pub seed: u64,
    pub stream_id: u64,
    pub kernel: KernelKind,
    pub n_iter: u64,
    pub thin: u64,
    /// Iterates at steps thin, 2·thin, …; length ⌊N/thin⌋.
    pub trace: Vec<StateVector>,
    pub accept_count: u64,
    pub draws: DrawCounts,
    pub final_state: StateVector,
}

impl ChainRun {
    pub fn acceptance_rate(&self) -> f64 {
        self.accept_count as f64 / self.n_iter as f64
    }
}

/// Run one chain for `n_iter` steps, recording every `thin`-th iterate.
/// Burn-in is not discarded here; that is the diagnostics layer's job.
pub fn run_chain(
    model: &TargetModel,
    spec: &ProposalSpec,
    x0: &StateVector,
    n_iter: u64,
    stream: &mut RngStream,
    thin: u64,
) -> Result<ChainRun, Error> {
    if n_iter == 0 {
        return Err(Error::invalid("n_iter", "must be >= 1"));
    }
    if thin == 0 {
        return Err(Error::invalid("thin", "must be >= 1"));
    }
    spec.validate()?;
    let start_counts = stream.counts();
    let mut state = x0.clone();
    let mut trace = Vec::with_capacity((n_iter / thin) as usize);
    let mut accept_count = 0u64;
    for it in 1..=n_iter {
        let out = step(model, spec, &state, stream)?;
        if out.accepted {
            accept_count += 1;
        }
        state = out.next;
        if it % thin == 0 {
            trace.push(state.clone());
        }
    }
    let mut draws = stream.counts();
    draws.continuous -= start_counts.continuous;
    draws.sign_bits -= start_counts.sign_bits;
    Ok(ChainRun {
        seed: stream.seed(),
        stream_id: stream.stream_id(),
        kernel: spec.kind,
        n_iter,
        thin,
        trace,
        accept_count,
        draws,
        final_state: state,
    })
}
