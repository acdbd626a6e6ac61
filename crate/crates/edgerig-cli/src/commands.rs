use edgerig::asymptotics::{moment_asymptote, moment_asymptotics, rigidity_envelope};
use edgerig::fredholm::exp_moment_with_tol;
use edgerig::kernels::{meijer_wright_identity_error, wright_bessel_identity_error, KernelEvaluator};
use edgerig::pcmodel::{second_coefficient_check, verify, PCParams, PcReport};
use edgerig::rigidity::{sup_point_deviation, tail_probability_from_samples, RigidityReport};
use edgerig::rmt_sampling::{par_replicas, PointSample};
use edgerig::Error;
use serde::Serialize;

use crate::config::{RunInfo, Settings};
use crate::output::{ensure_dir, num, sidecar, write_csv, write_json, write_text};
use crate::svg::Scatter;
use crate::CliError;

#[derive(Serialize)]
struct MomentsSidecar {
    run: RunInfo,
    process: edgerig::ProcessSpec,
    s_list: Vec<f64>,
    nu_list: Vec<f64>,
    refine_tol: f64,
    node_counts: Vec<usize>,
    failures: Vec<String>,
}

pub fn moments(st: &Settings) -> Result<(), CliError> {
    let spec = st.process()?;
    let s_list = st.s_list()?;
    let nu_list = st.nu_list_required()?;
    let tol = st.tol()?;
    if s_list.iter().any(|s| *s <= 0.0) {
        return Err(CliError::Config("moment asymptotics need s > 0".into()));
    }
    let mut rows = Vec::new();
    let mut node_counts = Vec::new();
    let mut failures = Vec::new();
    for &s in &s_list {
        for &nu in &nu_list {
            let asym = moment_asymptote(&spec, s, nu)?;
            let (log_det, nodes) = match exp_moment_with_tol(&spec, s, nu, tol) {
                Ok(r) => (r.log_det, r.node_count),
                Err(e @ (Error::Accuracy(_) | Error::Numerical(_))) => {
                    failures.push(format!("s={s} nu={nu}: {e}"));
                    (f64::NAN, 0)
                }
                Err(e) => return Err(e.into()),
            };
            node_counts.push(nodes);
            rows.push(vec![num(s), num(nu), num(log_det), num(asym), num(log_det - asym)]);
        }
    }
    let out = st.out();
    write_csv(out.as_deref(), &["s", "nu", "log_det", "asymptote", "residual"], &rows)?;
    if let Some(p) = &out {
        let meta = MomentsSidecar { run: RunInfo::new("moments"), process: spec, s_list, nu_list, refine_tol: tol, node_counts, failures: failures.clone() };
        write_json(Some(&sidecar(p)), &meta)?;
    }
    if !failures.is_empty() {
        return Err(CliError::Accuracy(failures.join("; ")));
    }
    Ok(())
}

#[derive(Serialize)]
struct ReplicaReport {
    replica: u64,
    report: RigidityReport,
}

#[derive(Serialize)]
struct RigiditySidecar {
    run: RunInfo,
    sampler: edgerig::rmt_sampling::SamplerConfig,
    target: edgerig::ProcessSpec,
    seed: u64,
    reps: u64,
    k_max: usize,
    eps: f64,
    k0: Vec<usize>,
    truncation: String,
    first_replica: edgerig::rmt_sampling::Provenance,
}

pub fn rigidity(st: &Settings) -> Result<(), CliError> {
    let sampler = st.sampler()?;
    let target = sampler.target()?;
    let n = sampler.matrix_size();
    let reps = st.reps();
    let seed = st.seed();
    let eps = st.eps()?;
    let k0s = st.k0_list()?;
    let k_max = st.k_max().unwrap_or(((n as f64).sqrt().floor() as usize).max(2));
    let k_low = *k0s.iter().min().unwrap_or(&2);
    if k_low > k_max {
        return Err(CliError::Config(format!("smallest k0 = {k_low} exceeds k_max = {k_max}")));
    }
    let samples: Vec<PointSample> = par_replicas(reps, st.jobs()?, |rep| sampler.sample(k_max, seed, rep))?;

    let mut summary = Vec::new();
    for &k0 in &k0s {
        let row = if reps >= 50 {
            let t = tail_probability_from_samples(&target, &samples, eps, k0, k_max)?;
            vec![k0.to_string(), k_max.to_string(), num(eps), reps.to_string(), t.violations.to_string(), num(t.fraction), num(t.half_width)]
        } else {
            let v = samples.iter().map(|s| edgerig::rigidity::envelope_violated(s, &target, k0, k_max, eps)).collect::<Result<Vec<bool>, _>>()?;
            let hits = v.iter().filter(|b| **b).count() as u64;
            vec![k0.to_string(), k_max.to_string(), num(eps), reps.to_string(), hits.to_string(), num(hits as f64 / reps as f64), "NaN".into()]
        };
        summary.push(row);
    }
    let header = ["k0", "k_max", "eps", "reps", "violations", "fraction", "wilson_half_width"];
    let out = st.out();
    let Some(dir) = out else {
        return write_csv(None, &header, &summary);
    };
    ensure_dir(&dir)?;
    write_csv(Some(&dir.join("summary.csv")), &header, &summary)?;

    let m = moment_asymptotics(&target);
    let mut reports = Vec::new();
    let mut dev_rows = Vec::new();
    let mut scatter = Vec::new();
    for (rep, s) in samples.iter().enumerate() {
        reports.push(ReplicaReport { replica: rep as u64, report: sup_point_deviation(s, &target, k_low, k_max, eps)? });
        for k in 2..=k_max {
            let x = s.points[k - 1];
            let e = rigidity_envelope(&target, k as u64, eps)?;
            let d = (m.mu(x) - k as f64) / (k as f64).ln();
            scatter.push((k as f64, d));
            dev_rows.push(vec![rep.to_string(), k.to_string(), num(x), num(d), num(e.lower), num(e.upper)]);
        }
    }
    write_json(Some(&dir.join("reports.json")), &reports)?;
    write_csv(Some(&dir.join("deviations.csv")), &["replica", "k", "x_k", "normalized_deviation", "envelope_lower", "envelope_upper"], &dev_rows)?;
    let meta = RigiditySidecar {
        run: RunInfo::new("rigidity"),
        sampler: sampler.clone(),
        target: target.clone(),
        seed,
        reps,
        k_max,
        eps,
        k0: k0s,
        truncation: format!("supremum over k restricted to k <= {k_max}"),
        first_replica: samples[0].provenance.clone(),
    };
    write_json(Some(&dir.join("provenance.json")), &meta)?;
    if let Some(svg) = st.svg() {
        let plot = Scatter { title: format!("global rigidity, {}, n = {n}, {reps} replica(s)", target.label()), eps, k_max, points: scatter };
        write_text(Some(&svg), &plot.render())?;
    }
    Ok(())
}

const IDENTITY_GRID: [f64; 5] = [2.0, 4.0, 6.0, 8.0, 10.0];

pub fn kernel(st: &Settings) -> Result<(), CliError> {
    let out = st.out();
    match st.identity().as_deref() {
        Some("wright-bessel") => {
            let alphas = st.flags.alpha.map(|a| vec![a]).unwrap_or_else(|| vec![0.0, 0.5, 2.0]);
            let mut rows = Vec::new();
            let mut worst: f64 = 0.0;
            for a in alphas {
                let e = wright_bessel_identity_error(a, &IDENTITY_GRID)?;
                worst = worst.max(e);
                rows.push(vec!["wright-bessel".into(), num(a), "1".into(), num(e)]);
            }
            write_csv(out.as_deref(), &["identity", "alpha", "r", "max_error"], &rows)?;
            eprintln!("max error {worst:e}");
            Ok(())
        }
        Some("meijer-wright") => {
            let rs = st.flags.r.map(|r| vec![r]).unwrap_or_else(|| vec![1, 2, 3]);
            let a = st.flags.alpha.unwrap_or(0.0);
            let grid = [0.5, 1.0, 2.0, 4.0, 8.0];
            let mut rows = Vec::new();
            let mut worst: f64 = 0.0;
            for r in rs {
                let e = meijer_wright_identity_error(r, a, &grid)?;
                worst = worst.max(e);
                rows.push(vec!["meijer-wright".into(), num(a), r.to_string(), num(e)]);
            }
            write_csv(out.as_deref(), &["identity", "alpha", "r", "max_error"], &rows)?;
            eprintln!("max error {worst:e}");
            Ok(())
        }
        Some(other) => Err(CliError::Config(format!("unknown identity {other:?} (wright-bessel or meijer-wright)"))),
        None => {
            let spec = st.process()?;
            let xs = st.s_list()?;
            let k = KernelEvaluator::new(&spec)?;
            let mut rows = Vec::new();
            for &x in &xs {
                for &y in &xs {
                    rows.push(vec![num(x), num(y), num(k.eval(x, y)?)]);
                }
            }
            write_csv(out.as_deref(), &["x", "y", "kernel"], &rows)
        }
    }
}

#[derive(Serialize)]
struct PcRow {
    #[serde(flatten)]
    report: PcReport,
    second_coefficient_residual: f64,
}

/// `0.5` is real, `1.2i` imaginary.
fn parse_q(s: &str) -> Result<PCParams, CliError> {
    let t = s.trim();
    let parse = |v: &str| v.trim().parse::<f64>().map_err(|_| CliError::Config(format!("cannot read q = {s:?}")));
    Ok(match t.strip_suffix('i') {
        Some(im) => PCParams::imaginary(parse(im)?)?,
        None => PCParams::real(parse(t)?)?,
    })
}

pub fn pc_verify(st: &Settings) -> Result<(), CliError> {
    let params: Vec<PCParams> = match (st.pc_q(), st.nu_list()) {
        (Some(q), _) => vec![parse_q(&q)?],
        (None, Some(nus)) => nus.iter().map(|&nu| PCParams::from_nu(nu)).collect::<Result<_, _>>()?,
        (None, None) => [0.05, 0.2, 0.5, 1.0, 2.0].iter().map(|&nu| PCParams::from_nu(nu)).collect::<Result<_, _>>()?,
    };
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for p in &params {
        let report = verify(p, &[1.0, 3.0], &[20.0, 40.0])?;
        if report.beta_product_residual > 1e-10 || report.jump_residuals.iter().any(|(_, v)| *v > 1e-10) {
            failures.push(format!("nu = {}", p.nu()));
        }
        eprintln!("nu = {}: beta12 beta21 - nu residual {:e}", p.nu(), report.beta_product_residual);
        rows.push(PcRow { second_coefficient_residual: second_coefficient_check(p, 40.0)?, report });
    }
    write_json(st.out().as_deref(), &rows)?;
    if !failures.is_empty() {
        return Err(CliError::Accuracy(format!("model problem checks failed for {}", failures.join(", "))));
    }
    Ok(())
}

#[derive(Serialize)]
struct SampleSidecar {
    run: RunInfo,
    sampler: edgerig::rmt_sampling::SamplerConfig,
    k_max: usize,
    provenance: edgerig::rmt_sampling::Provenance,
}

pub fn sample(st: &Settings) -> Result<(), CliError> {
    let sampler = st.sampler()?;
    let n = sampler.matrix_size();
    let k_max = st.k_max().unwrap_or(((n as f64).sqrt().floor() as usize).max(1));
    let s = sampler.sample(k_max, st.seed(), st.replica())?;
    let rows: Vec<Vec<String>> = s.points.iter().enumerate().map(|(i, x)| vec![(i + 1).to_string(), num(*x)]).collect();
    let out = st.out();
    write_csv(out.as_deref(), &["k", "x_k"], &rows)?;
    if let Some(p) = out {
        write_json(Some(&sidecar(&p)), &SampleSidecar { run: RunInfo::new("sample"), sampler, k_max, provenance: s.provenance })?;
    }
    Ok(())
}
