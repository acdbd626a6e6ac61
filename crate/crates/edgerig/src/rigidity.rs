//! Global rigidity statistics for sampled point configurations.
//!
//! For a process with mean `mu` and variance proxy `sigma2` the rigidity
//! estimate bounds `|mu(x_k) - k| / sigma2(mu^{-1}(k))` uniformly in large `k` by
//! `sqrt(2 (1 + eps) / a) = 2 pi sqrt(1 + eps)`, with `a = 1 / (2 pi^2)` for all
//! four processes. Sums over `k` are truncated at a finite `k_max`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{moment_asymptotics, rigidity_envelope, MomentAsymptotics, RIGIDITY_A};
use crate::error::{domain, Result};
use crate::kernels::ProcessSpec;
use crate::rmt_sampling::{par_replicas, PointSample, SamplerConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub k0: usize,
    /// The supremum is truncated here.
    pub k_max: usize,
    pub eps: f64,
    pub sup_statistic: f64,
    pub bound: f64,
    pub violated: bool,
    /// `|mu(x_k) - k| / sigma2(mu^{-1}(k))` for `k = k0..=k_max`.
    pub per_k: Vec<f64>,
}

/// `2 pi sqrt(1 + eps)`, the bound on the normalized point deviation.
pub fn rigidity_bound(eps: f64) -> f64 {
    (2.0 * (1.0 + eps) / RIGIDITY_A).sqrt()
}

/// Number of points at or below `x`.
pub fn counting_function(sample: &PointSample, x: f64) -> usize {
    sample.points.partition_point(|p| *p <= x)
}

/// The edge-regime default for the truncation: `min(len, sqrt(n))`.
pub fn default_k_max(sample: &PointSample) -> usize {
    let root = (sample.provenance.matrix_size as f64).sqrt().floor() as usize;
    sample.len().min(root.max(1))
}

fn check_range(sample: &PointSample, k0: usize, k_max: usize) -> Result<()> {
    if k0 < 2 {
        return domain(format!("rigidity statistics need k0 >= 2, got {k0}"));
    }
    if k_max < k0 || k_max > sample.len() {
        return domain(format!("need k0 <= k_max <= {}, got k0 = {k0}, k_max = {k_max}", sample.len()));
    }
    Ok(())
}

fn variance_at_rank(m: &MomentAsymptotics, k: usize) -> Result<f64> {
    let v = m.sigma2(m.mu_inverse(k as f64));
    if !(v > 0.0) {
        return domain(format!("variance proxy vanishes at k = {k}; raise k0"));
    }
    Ok(v)
}

/// The normalized point deviations over `k0..=k_max` and their supremum.
pub fn sup_point_deviation(sample: &PointSample, spec: &ProcessSpec, k0: usize, k_max: usize, eps: f64) -> Result<RigidityReport> {
    check_range(sample, k0, k_max)?;
    if !(eps > 0.0) {
        return domain(format!("eps must be positive, got {eps}"));
    }
    let m = moment_asymptotics(spec);
    let per_k = (k0..=k_max)
        .map(|k| Ok((m.mu(sample.points[k - 1]) - k as f64).abs() / variance_at_rank(&m, k)?))
        .collect::<Result<Vec<f64>>>()?;
    let sup_statistic = per_k.iter().copied().fold(0.0, f64::max);
    let bound = rigidity_bound(eps);
    Ok(RigidityReport { k0, k_max, eps, sup_statistic, bound, violated: sup_statistic > bound, per_k })
}

/// `sup |N(x) - mu(x)| / sigma2(x)` over `x` in `[s, largest point]`,
/// evaluated at `s`, at every jump and at every left limit.
pub fn sup_counting_deviation(sample: &PointSample, spec: &ProcessSpec, s: f64) -> f64 {
    let m = moment_asymptotics(spec);
    let stat = |x: f64, count: usize| (count as f64 - m.mu(x)).abs() / m.sigma2(x);
    let mut sup = stat(s, counting_function(sample, s));
    for (j, &x) in sample.points.iter().enumerate() {
        if x > s {
            // left limit sees j points, the jump itself j + 1
            sup = sup.max(stat(x, j)).max(stat(x, j + 1));
        }
    }
    sup
}

/// `sup |mu(x_k) - k| / ((1/pi + eps) log k)`; at most 1 exactly when every
/// `x_k` lies inside the rigidity envelope.
pub fn envelope_statistic(sample: &PointSample, spec: &ProcessSpec, k0: usize, k_max: usize, eps: f64) -> Result<f64> {
    check_range(sample, k0, k_max)?;
    let m = moment_asymptotics(spec);
    Ok((k0..=k_max)
        .map(|k| (m.mu(sample.points[k - 1]) - k as f64).abs() / ((1.0 / PI + eps) * (k as f64).ln()))
        .fold(0.0, f64::max))
}

/// Whether some `x_k`, `k0 <= k <= k_max`, falls outside its envelope.
/// An empty range never violates.
pub fn envelope_violated(sample: &PointSample, spec: &ProcessSpec, k0: usize, k_max: usize, eps: f64) -> Result<bool> {
    let k0 = k0.max(2);
    for k in k0..=k_max.min(sample.len()) {
        let e = rigidity_envelope(spec, k as u64, eps)?;
        let x = sample.points[k - 1];
        if x < e.lower || x > e.upper {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub fraction: f64,
    /// Half-width of the Wilson 95% interval.
    pub half_width: f64,
    pub violations: u64,
    pub reps: u64,
}

/// Half-width of the 95% Wilson score interval for `hits` out of `n`.
pub fn wilson_half_width(hits: u64, n: u64) -> f64 {
    let z = 1.959_963_984_540_054;
    let (n, p) = (n as f64, hits as f64 / n as f64);
    z / (1.0 + z * z / n) * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub sampler: SamplerConfig,
    pub k_max: usize,
    pub reps: u64,
    pub seed: u64,
    pub jobs: usize,
}

/// Fraction of replicas with an envelope violation for some `k` in `[k0, k_max]`.
/// Replica `i` always uses stream `(seed, i)`, so runs with different `k0` or
/// `eps` share their random numbers.
pub fn tail_probability_mc(spec: &ProcessSpec, cfg: &McConfig, eps: f64, k0: usize) -> Result<TailEstimate> {
    let samples = par_replicas(cfg.reps, cfg.jobs, |rep| cfg.sampler.sample(cfg.k_max, cfg.seed, rep))?;
    tail_probability_from_samples(spec, &samples, eps, k0, cfg.k_max)
}

/// The estimate of [`tail_probability_mc`] on samples already drawn.
pub fn tail_probability_from_samples(spec: &ProcessSpec, samples: &[PointSample], eps: f64, k0: usize, k_max: usize) -> Result<TailEstimate> {
    let reps = samples.len() as u64;
    if reps < 50 {
        return domain(format!("tail estimate needs at least 50 replicas, got {reps}"));
    }
    let mut violations = 0;
    for s in samples {
        if envelope_violated(s, spec, k0, k_max, eps)? {
            violations += 1;
        }
    }
    Ok(TailEstimate { fraction: violations as f64 / reps as f64, half_width: wilson_half_width(violations, reps), violations, reps })
}
