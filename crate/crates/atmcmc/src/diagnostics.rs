//! Empirical measurements over chains: acceptance rates, ensemble KS curves
//! against the target marginal, drift-ratio and regularity-moment estimators,
//! and the draw-count cost comparison.

use rayon::prelude::*;

use crate::rng::RngStream;
use crate::samplers::{step, ChainRun, ProposalSpec};
use crate::targets::{StateVector, TargetModel};
use crate::Error;

/// Fraction of accepted transitions.
pub fn acceptance_rate(run: &ChainRun) -> f64 {
    run.acceptance_rate()
}

/// One-sample KS statistic sup_x |F̂(x) − F(x)| via the exact sorted-sample
/// two-sided formula.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<f64, Error> {
    if samples.is_empty() {
        return Err(Error::EmptySample);
    }
    if !samples.iter().all(|s| s.is_finite()) {
        return Err(Error::NonFinite { context: "KS samples" });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        let upper = (i + 1) as f64 / n - f;
        let lower = f - i as f64 / n;
        d = d.max(upper).max(lower);
    }
    Ok(d)
}

/// Iteration indices at which the ensemble is snapshotted: every iteration up
/// to 200, then every 10th, so the early decay is resolved without blowing up
/// output size.
pub fn recording_times(horizon: u64) -> Vec<u64> {
    let mut times: Vec<u64> = (1..=horizon.min(200)).collect();
    let mut t = 210;
    while t <= horizon {
        times.push(t);
        t += 10;
    }
    times
}

/// Per-iteration KS statistics for an ensemble of chains against a reference
/// marginal CDF.
#[derive(Debug, Clone)]
pub struct KsSeries {
    pub times: Vec<u64>,
    pub ks_values: Vec<f64>,
    pub chain_count: usize,
    pub coordinate: usize,
    pub reference_cdf: String,
}

fn ensemble_coord_snapshots(
    model: &TargetModel,
    spec: &ProposalSpec,
    x0: &StateVector,
    chain_count: usize,
    times: &[u64],
    root_seed: u64,
    stream_offset: u64,
    coordinate: usize,
) -> Result<Vec<Vec<f64>>, Error> {
    let horizon = *times.last().unwrap();
    // chains in parallel; aggregation below is a deterministic reduction over
    // chain index, so scheduling cannot change the result
    let per_chain: Result<Vec<Vec<f64>>, Error> = (0..chain_count)
        .into_par_iter()
        .map(|chain| {
            let mut stream = RngStream::new(root_seed, stream_offset + chain as u64);
            let mut state = x0.clone();
            let mut recorded = Vec::with_capacity(times.len());
            let mut next_record = 0usize;
            for t in 1..=horizon {
                let out = step(model, spec, &state, &mut stream)?;
                state = out.next;
                if next_record < times.len() && times[next_record] == t {
                    recorded.push(state.coords()[coordinate]);
                    next_record += 1;
                }
            }
            Ok(recorded)
        })
        .collect();
    per_chain
}

/// Run L chains per kernel from a common start and compute, at each recorded
/// time, the KS distance between the L chain values along `coordinate` and
/// the target's marginal CDF. Both series share the same times.
#[allow(clippy::too_many_arguments)]
pub fn ks_experiment(
    model: &TargetModel,
    spec_a: &ProposalSpec,
    spec_b: &ProposalSpec,
    x0: &StateVector,
    chain_count: usize,
    horizon: u64,
    root_seed: u64,
    coordinate: usize,
) -> Result<(KsSeries, KsSeries), Error> {
    if chain_count < 2 {
        return Err(Error::invalid("chain_count", "need at least 2 chains"));
    }
    if horizon == 0 {
        return Err(Error::invalid("horizon", "must be >= 1"));
    }
    if coordinate >= model.dim() {
        return Err(Error::invalid("coordinate", format!("index {coordinate} out of range for d = {}", model.dim())));
    }
    if spec_a.d != model.dim() || spec_b.d != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: if spec_a.d != model.dim() { spec_a.d } else { spec_b.d },
        });
    }
    let times = recording_times(horizon);
    let mut series = Vec::with_capacity(2);
    for (offset, spec) in [(0u64, spec_a), (chain_count as u64, spec_b)] {
        let snapshots = ensemble_coord_snapshots(
            model, spec, x0, chain_count, &times, root_seed, offset, coordinate,
        )?;
        let ks_values: Result<Vec<f64>, Error> = (0..times.len())
            .map(|ti| {
                let ensemble: Vec<f64> = snapshots.iter().map(|chain| chain[ti]).collect();
                ks_statistic(&ensemble, |x| model.marginal_cdf(x))
            })
            .collect();
        series.push(KsSeries {
            times: times.clone(),
            ks_values: ks_values?,
            chain_count,
            coordinate,
            reference_cdf: format!("{}-marginal", model.component().name()),
        });
    }
    let b = series.pop().unwrap();
    let a = series.pop().unwrap();
    Ok((a, b))
}

/// Monte Carlo estimate of PV(x)/V(x) at a probe point, for the exponential
/// drift family V_s(x) = exp(s|x₁|).
#[derive(Debug, Clone)]
pub struct DriftEstimate {
    pub x_probe: StateVector,
    pub drift_s: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub sample_count: usize,
}

pub fn drift_ratio(
    model: &TargetModel,
    spec: &ProposalSpec,
    drift_s: f64,
    x_probe: &StateVector,
    mc_size: usize,
    stream: &mut RngStream,
) -> Result<DriftEstimate, Error> {
    if !(drift_s > 0.0 && drift_s <= 1.0) {
        return Err(Error::invalid("drift_s", format!("must be in (0, 1], got {drift_s}")));
    }
    if mc_size < 1000 {
        return Err(Error::SampleTooSmall(mc_size, 1000));
    }
    let v = |state: &StateVector| (drift_s * state.coords()[0].abs()).exp();
    let v_x = v(x_probe);
    let mut ratios = Vec::with_capacity(mc_size);
    for _ in 0..mc_size {
        let out = step(model, spec, x_probe, stream)?;
        ratios.push(v(&out.next) / v_x);
    }
    let n = mc_size as f64;
    let mean = ratios.iter().sum::<f64>() / n;
    let var = ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1.0);
    Ok(DriftEstimate {
        x_probe: x_probe.clone(),
        drift_s,
        estimate: mean,
        std_error: (var / n).sqrt(),
        sample_count: mc_size,
    })
}

/// Monte Carlo estimates of the regularity moments
/// M₁ = E[{f′(X)/f(X)}⁸] and M₂ = E[{f″(X)/f(X)}⁴] under the component f.
#[derive(Debug, Clone)]
pub struct RegularityMoments {
    pub m1: f64,
    pub m1_std_error: f64,
    /// Heuristic: flagged when the estimate keeps growing as M doubles,
    /// suggesting the moment does not exist.
    pub m1_divergence_suspected: bool,
    pub m2: f64,
    pub m2_std_error: f64,
    pub m2_divergence_suspected: bool,
    pub sample_count: usize,
}

fn prefix_mean(vals: &[f64], len: usize) -> f64 {
    vals[..len].iter().sum::<f64>() / len as f64
}

fn suspect_divergence(vals: &[f64]) -> bool {
    // doubling-M batch comparison: flag if the estimate grows by >20% at each
    // of the last two doublings
    let m = vals.len();
    let quarter = prefix_mean(vals, m / 4);
    let half = prefix_mean(vals, m / 2);
    let full = prefix_mean(vals, m);
    half > 1.2 * quarter && full > 1.2 * half
}

pub fn regularity_moments(
    model: &TargetModel,
    mc_size: usize,
    stream: &mut RngStream,
) -> Result<RegularityMoments, Error> {
    if mc_size < 1000 {
        return Err(Error::SampleTooSmall(mc_size, 1000));
    }
    let comp = model.component();
    let mut t1 = Vec::with_capacity(mc_size);
    let mut t2 = Vec::with_capacity(mc_size);
    for _ in 0..mc_size {
        let x = comp.sample(stream);
        let score = comp.score(x);
        // f″/f = (log f)″ + {(log f)′}²
        let dens_ratio2 = comp.second_score(x) + score * score;
        t1.push(score.powi(8));
        t2.push(dens_ratio2.powi(4));
    }
    let n = mc_size as f64;
    let stats = |vals: &[f64]| {
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        (mean, (var / n).sqrt())
    };
    let (m1, m1_se) = stats(&t1);
    let (m2, m2_se) = stats(&t2);
    Ok(RegularityMoments {
        m1,
        m1_std_error: m1_se,
        m1_divergence_suspected: suspect_divergence(&t1),
        m2,
        m2_std_error: m2_se,
        m2_divergence_suspected: suspect_divergence(&t2),
        sample_count: mc_size,
    })
}

/// Machine-independent cost comparison between two completed runs.
#[derive(Debug, Clone, Copy)]
pub struct DrawCountReport {
    pub continuous_a: u64,
    pub sign_bits_a: u64,
    pub continuous_b: u64,
    pub sign_bits_b: u64,
    /// continuous_b / continuous_a
    pub continuous_ratio: f64,
}

pub fn draw_count_report(run_a: &ChainRun, run_b: &ChainRun) -> DrawCountReport {
    DrawCountReport {
        continuous_a: run_a.draws.continuous,
        sign_bits_a: run_a.draws.sign_bits,
        continuous_b: run_b.draws.continuous,
        sign_bits_b: run_b.draws.sign_bits,
        continuous_ratio: run_b.draws.continuous as f64 / run_a.draws.continuous as f64,
    }
}
