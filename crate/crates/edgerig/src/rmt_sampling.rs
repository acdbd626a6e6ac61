//! Finite random matrices whose rescaled extreme eigenvalues approximate the
//! edge processes.
//!
//! * GUE soft edge from the beta = 2 tridiagonal model, `x_k = n^{1/6} (2 sqrt(n) - lambda_(n+1-k))`.
//! * LUE hard edge from the beta = 2 bidiagonal Laguerre model, `x_k = 4 n lambda_(k)`.
//! * Squared singular values of products of `r` square complex Ginibre
//!   matrices, `x_k = n lambda_(k)`, which approximate the Meijer-G process
//!   with `nu = (0, ..., 0)`.
//!
//! Extreme eigenvalues of the symmetric tridiagonal models are found one at
//! a time by Sturm-sequence bisection, which is `O(n)` per step and bit-for-bit
//! reproducible. Randomness comes from ChaCha8 streams keyed by `(seed, replica)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::kernels::ProcessSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub ensemble: String,
    pub matrix_size: usize,
    /// Ensemble parameter: `alpha` for LUE, `r` for Ginibre products.
    pub parameter: Option<f64>,
    /// `x = scale * (shift - lambda)` (GUE) or `x = scale * lambda`.
    pub scale: f64,
    pub shift: f64,
    /// How `scale` was obtained.
    pub scale_source: String,
    pub seed: u64,
    pub replica: u64,
    /// The limit process the points approximate.
    pub target: ProcessSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSample {
    /// Strictly increasing.
    pub points: Vec<f64>,
    pub provenance: Provenance,
}

impl PointSample {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Generator for replica `replica` of a run seeded with `seed`.
pub fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

// chi_k / sqrt(2) for k = 2 m, i.e. sqrt(Gamma(m, 1))
fn half_chi(rng: &mut impl Rng, m: f64) -> f64 {
    Gamma::new(m, 1.0).expect("positive shape").sample(rng).sqrt()
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix with
/// diagonal `a` and squared off-diagonal `b2`.
fn sturm_count(a: &[f64], b2: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..a.len() {
        d = a[i] - x - if i > 0 { b2[i - 1] / d } else { 0.0 };
        if d == 0.0 {
            d = -f64::EPSILON * (a[i].abs() + x.abs()).max(f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Eigenvalue number `j` (0-based, ascending) by bisection inside `[lo, hi]`.
fn bisect(a: &[f64], b2: &[f64], j: usize, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(a, b2, mid) > j {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn gershgorin(a: &[f64], b2: &[f64]) -> (f64, f64) {
    let n = a.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { b2[i - 1].sqrt() } else { 0.0 } + if i + 1 < n { b2[i].sqrt() } else { 0.0 };
        lo = lo.min(a[i] - r);
        hi = hi.max(a[i] + r);
    }
    (lo, hi)
}

/// Number of eigenvalues strictly below `x` of the symmetric tridiagonal matrix
/// with diagonal `diag` and off-diagonal `off`.
pub fn tridiagonal_count_below(diag: &[f64], off: &[f64], x: f64) -> usize {
    let b2: Vec<f64> = off.iter().map(|b| b * b).collect();
    sturm_count(diag, &b2, x)
}

/// The beta = 2 Hermite tridiagonal model of size `n` as `(diag, off)`;
/// its spectrum fills `[-2 sqrt(n), 2 sqrt(n)]`.
pub fn gue_tridiagonal(n: usize, rng: &mut impl Rng) -> (Vec<f64>, Vec<f64>) {
    let diag: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
    let off: Vec<f64> = (1..n).map(|i| half_chi(rng, (n - i) as f64)).collect();
    (diag, off)
}

/// The beta = 2 Laguerre model `B B^T` of size `n` as `(diag, off)`, with `B`
/// lower bidiagonal, `b_i ~ chi_{2(n+alpha-i)}/sqrt 2` and `c_i ~ chi_{2(n-1-i)}/sqrt 2`.
/// Its spectrum fills `[0, 4n]`.
pub fn lue_tridiagonal(n: usize, alpha: f64, rng: &mut impl Rng) -> (Vec<f64>, Vec<f64>) {
    let b: Vec<f64> = (0..n).map(|i| half_chi(rng, n as f64 + alpha - i as f64)).collect();
    let c: Vec<f64> = (0..n.saturating_sub(1)).map(|i| half_chi(rng, (n - 1 - i) as f64)).collect();
    let diag: Vec<f64> = (0..n).map(|i| b[i] * b[i] + if i > 0 { c[i - 1] * c[i - 1] } else { 0.0 }).collect();
    let off: Vec<f64> = (0..n.saturating_sub(1)).map(|i| b[i] * c[i]).collect();
    (diag, off)
}

/// The `k` smallest (or largest) eigenvalues of a symmetric tridiagonal matrix, ascending.
pub fn tridiagonal_extreme_eigenvalues(diag: &[f64], off: &[f64], k: usize, largest: bool) -> Result<Vec<f64>> {
    let n = diag.len();
    if off.len() + 1 != n || k > n {
        return domain(format!("tridiagonal sizes: diag {n}, off {}, k {k}", off.len()));
    }
    let b2: Vec<f64> = off.iter().map(|b| b * b).collect();
    let (lo, hi) = gershgorin(diag, &b2);
    let pad = 1e-12 * (hi - lo).max(1.0);
    let (lo, hi) = (lo - pad, hi + pad);
    let idx: Vec<usize> = if largest { (n - k..n).collect() } else { (0..k).collect() };
    let out: Vec<f64> = idx.into_iter().map(|j| bisect(diag, &b2, j, lo, hi)).collect();
    if out.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("tridiagonal bisection produced a non-finite eigenvalue".into()));
    }
    Ok(out)
}

fn strictly_increasing(mut v: Vec<f64>) -> Result<Vec<f64>> {
    v.sort_by(f64::total_cmp);
    if v.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Numerical("sampled points are not distinct".into()));
    }
    Ok(v)
}

/// Rescaled largest GUE eigenvalues, approximating the negated Airy points.
pub fn sample_gue_edge(n: usize, k_max: usize, seed: u64, replica: u64) -> Result<PointSample> {
    if n < 100 {
        return domain(format!("gue sampler needs n >= 100, got {n}"));
    }
    if k_max == 0 || k_max > n / 4 {
        return domain(format!("gue sampler needs 1 <= k_max <= n/4, got {k_max}"));
    }
    let mut rng = replica_rng(seed, replica);
    let (diag, off) = gue_tridiagonal(n, &mut rng);
    let top = tridiagonal_extreme_eigenvalues(&diag, &off, k_max, true)?;
    let nf = n as f64;
    let (scale, shift) = (nf.powf(1.0 / 6.0), 2.0 * nf.sqrt());
    let points = strictly_increasing(top.iter().map(|l| scale * (shift - l)).collect())?;
    Ok(PointSample {
        points,
        provenance: Provenance {
            ensemble: "gue".into(),
            matrix_size: n,
            parameter: None,
            scale,
            shift,
            scale_source: "soft-edge scaling n^(1/6) (2 sqrt(n) - lambda)".into(),
            seed,
            replica,
            target: ProcessSpec::Airy,
        },
    })
}

/// Rescaled smallest LUE eigenvalues, approximating the Bessel process.
pub fn sample_lue_hard_edge(n: usize, alpha: f64, k_max: usize, seed: u64, replica: u64) -> Result<PointSample> {
    if n < 100 {
        return domain(format!("lue sampler needs n >= 100, got {n}"));
    }
    if !(alpha > -1.0 && alpha.is_finite()) {
        return domain(format!("lue sampler needs alpha > -1, got {alpha}"));
    }
    if k_max == 0 || k_max > n {
        return domain(format!("lue sampler needs 1 <= k_max <= n, got {k_max}"));
    }
    let mut rng = replica_rng(seed, replica);
    let (diag, off) = lue_tridiagonal(n, alpha, &mut rng);
    let low = tridiagonal_extreme_eigenvalues(&diag, &off, k_max, false)?;
    let scale = 4.0 * n as f64;
    let points = strictly_increasing(low.iter().map(|l| scale * l).collect())?;
    Ok(PointSample {
        points,
        provenance: Provenance {
            ensemble: "lue".into(),
            matrix_size: n,
            parameter: Some(alpha),
            scale,
            shift: 0.0,
            scale_source: "hard-edge scaling 4 n lambda".into(),
            seed,
            replica,
            target: ProcessSpec::Bessel { alpha },
        },
    })
}

fn ginibre(n: usize, rng: &mut impl Rng) -> DMatrix<Complex64> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_fn(n, n, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(h * re, h * im)
    })
}

/// Meijer-G parameters of the hard-edge limit of products of `r` square Ginibre matrices.
pub fn ginibre_product_target(r: usize) -> Result<ProcessSpec> {
    ProcessSpec::meijer(vec![0.0; r], Vec::new())
}

/// Smallest squared singular values of `G_r ... G_1` (entries with `E|g|^2 = 1`), times `n`.
pub fn sample_ginibre_product_hard_edge(n: usize, r: usize, k_max: usize, seed: u64, replica: u64) -> Result<PointSample> {
    sample_ginibre_product_scaled(n, r, k_max, seed, replica, n as f64, "hard-edge scaling n lambda")
}

fn sample_ginibre_product_scaled(
    n: usize,
    r: usize,
    k_max: usize,
    seed: u64,
    replica: u64,
    scale: f64,
    source: &str,
) -> Result<PointSample> {
    if n < 50 {
        return domain(format!("ginibre product sampler needs n >= 50, got {n}"));
    }
    if !(1..=3).contains(&r) {
        return domain(format!("ginibre product sampler supports r in 1..=3, got {r}"));
    }
    if k_max == 0 || k_max > n {
        return domain(format!("ginibre product sampler needs 1 <= k_max <= n, got {k_max}"));
    }
    let mut rng = replica_rng(seed, replica);
    let mut y = ginibre(n, &mut rng);
    for _ in 1..r {
        y = ginibre(n, &mut rng) * y;
    }
    let sv = y
        .try_svd(false, false, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("svd of the ginibre product did not converge".into()))?
        .singular_values;
    let mut sq: Vec<f64> = sv.iter().map(|s| s * s).collect();
    sq.sort_by(f64::total_cmp);
    let points = strictly_increasing(sq[..k_max].iter().map(|l| scale * l).collect())?;
    Ok(PointSample {
        points,
        provenance: Provenance {
            ensemble: "ginibre-product".into(),
            matrix_size: n,
            parameter: Some(r as f64),
            scale,
            shift: 0.0,
            scale_source: source.into(),
            seed,
            replica,
            target: ginibre_product_target(r)?,
        },
    })
}

/// First-moment calibration of the product scaling: the factor `c` such that
/// the points `c n lambda` have mean count `mu(s)` at `s`, estimated over `reps`
/// replicas by bisection on `c`. Values near 1 confirm the `n lambda` scaling.
pub fn calibrate_product_scale(n: usize, r: usize, s: f64, reps: u64, seed: u64) -> Result<f64> {
    let target = crate::asymptotics::moment_asymptotics(&ginibre_product_target(r)?).mu(s);
    let k_max = n.min(((4.0 * target).ceil() as usize).max(20));
    let samples: Vec<Vec<f64>> = (0..reps)
        .map(|rep| sample_ginibre_product_hard_edge(n, r, k_max, seed, rep).map(|p| p.points))
        .collect::<Result<_>>()?;
    let mean = |c: f64| {
        let total: usize = samples.iter().map(|p| p.partition_point(|x| c * x <= s)).sum();
        total as f64 / reps as f64
    };
    let (mut lo, mut hi) = (0.05f64, 20.0f64);
    for _ in 0..80 {
        let mid = (lo * hi).sqrt();
        // the count at s falls as the scale grows
        if mean(mid) < target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok((lo * hi).sqrt())
}

/// Ginibre product sample with a calibrated scale `c n` recorded in the provenance.
pub fn sample_ginibre_product_calibrated(n: usize, r: usize, k_max: usize, seed: u64, replica: u64, factor: f64) -> Result<PointSample> {
    sample_ginibre_product_scaled(n, r, k_max, seed, replica, factor * n as f64, "first-moment calibration c n lambda")
}

/// A sampler choice, for drivers that loop over replicas.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "ensemble", rename_all = "kebab-case")]
pub enum SamplerConfig {
    Gue { n: usize },
    Lue { n: usize, alpha: f64 },
    /// `factor` multiplies the `n lambda` scaling; `None` means 1.
    GinibreProduct { n: usize, r: usize, factor: Option<f64> },
}

impl SamplerConfig {
    pub fn matrix_size(&self) -> usize {
        match *self {
            SamplerConfig::Gue { n } | SamplerConfig::Lue { n, .. } | SamplerConfig::GinibreProduct { n, .. } => n,
        }
    }

    /// The limit process approximated by the rescaled points.
    pub fn target(&self) -> Result<ProcessSpec> {
        match *self {
            SamplerConfig::Gue { .. } => Ok(ProcessSpec::Airy),
            SamplerConfig::Lue { alpha, .. } => ProcessSpec::bessel(alpha),
            SamplerConfig::GinibreProduct { r, .. } => ginibre_product_target(r),
        }
    }

    pub fn sample(&self, k_max: usize, seed: u64, replica: u64) -> Result<PointSample> {
        match *self {
            SamplerConfig::Gue { n } => sample_gue_edge(n, k_max, seed, replica),
            SamplerConfig::Lue { n, alpha } => sample_lue_hard_edge(n, alpha, k_max, seed, replica),
            SamplerConfig::GinibreProduct { n, r, factor: None } => sample_ginibre_product_hard_edge(n, r, k_max, seed, replica),
            SamplerConfig::GinibreProduct { n, r, factor: Some(c) } => sample_ginibre_product_calibrated(n, r, k_max, seed, replica, c),
        }
    }
}

/// Runs `f` on replicas `0..reps` over `jobs` worker threads and returns the
/// results in replica order, so the output does not depend on `jobs`.
pub fn par_replicas<T: Send>(reps: u64, jobs: usize, f: impl Fn(u64) -> Result<T> + Sync) -> Result<Vec<T>> {
    let jobs = jobs.max(1).min(reps.max(1) as usize);
    if jobs == 1 {
        return (0..reps).map(&f).collect();
    }
    let f = &f;
    let mut parts: Vec<Result<Vec<(u64, T)>>> = Vec::with_capacity(jobs);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|j| scope.spawn(move || (j as u64..reps).step_by(jobs).map(|rep| f(rep).map(|v| (rep, v))).collect::<Result<Vec<_>>>()))
            .collect();
        for h in handles {
            parts.push(h.join().unwrap_or_else(|_| Err(Error::Numerical("worker thread panicked".into()))));
        }
    });
    let mut all = Vec::with_capacity(reps as usize);
    for p in parts {
        all.extend(p?);
    }
    all.sort_by_key(|(rep, _)| *rep);
    Ok(all.into_iter().map(|(_, v)| v).collect())
}
