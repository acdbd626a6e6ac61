//! Experiment configuration: an optional TOML file, overridden by flags.

use std::path::{Path, PathBuf};

use clap::Args;
use edgerig::rmt_sampling::SamplerConfig;
use edgerig::ProcessSpec;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// TOML experiment file; flags override its values
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// airy, bessel, wright or meijer
    #[arg(long)]
    pub process: Option<String>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Meijer-G: number of nu parameters; ensembles: number of Ginibre factors
    #[arg(long)]
    pub r: Option<usize>,
    /// Meijer-G: number of mu parameters; pc-verify: the model parameter, `0.5` or `1.2i`
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    #[arg(long = "nu-list", alias = "nu", value_delimiter = ',', allow_hyphen_values = true)]
    pub nu_list: Option<Vec<f64>>,
    #[arg(long = "s-list", value_delimiter = ',', allow_hyphen_values = true)]
    pub s_list: Option<Vec<f64>>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub reps: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    pub k0: Option<Vec<usize>>,
    #[arg(long = "k-max")]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long)]
    pub jobs: Option<usize>,
    /// gue, lue or ginibre
    #[arg(long)]
    pub ensemble: Option<String>,
    /// kernel: wright-bessel or meijer-wright
    #[arg(long)]
    pub identity: Option<String>,
    #[arg(long)]
    pub replica: Option<u64>,
    /// Determinant refinement tolerance
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub process: ProcessSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub sampler: SamplerSection,
    #[serde(default)]
    pub rigidity: RigiditySection,
    #[serde(default)]
    pub output: OutputSection,
    #[serde(default)]
    pub tolerance: ToleranceSection,
    #[serde(default)]
    pub kernel: KernelSection,
    #[serde(default)]
    pub pc: PcSection,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessSection {
    pub kind: Option<String>,
    pub theta: Option<f64>,
    pub alpha: Option<f64>,
    pub r: Option<usize>,
    pub q: Option<usize>,
    /// Meijer-G numerator parameters.
    pub nu: Option<Vec<f64>>,
    /// Meijer-G denominator parameters.
    pub mu: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub s: Option<Vec<f64>>,
    pub nu: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSection {
    pub ensemble: Option<String>,
    pub n: Option<usize>,
    pub reps: Option<u64>,
    pub seed: Option<u64>,
    pub k_max: Option<usize>,
    pub jobs: Option<usize>,
    pub replica: Option<u64>,
    pub r: Option<usize>,
    pub alpha: Option<f64>,
    /// Multiplier of the `n lambda` Ginibre product scaling.
    pub calibration: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigiditySection {
    pub eps: Option<f64>,
    pub k0: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub out: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceSection {
    pub refine: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelSection {
    pub identity: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PcSection {
    pub q: Option<String>,
    pub nu: Option<Vec<f64>>,
}

pub fn load(path: &Path) -> Result<ExperimentConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Flag values layered over the file.
#[derive(Debug, Clone)]
pub struct Settings {
    pub flags: Flags,
    pub file: ExperimentConfig,
}

fn bad<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Config(msg.into()))
}

fn non_empty(name: &str, v: Vec<f64>) -> Result<Vec<f64>, CliError> {
    if v.is_empty() {
        return bad(format!("{name} must not be empty"));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return bad(format!("{name} must be finite"));
    }
    Ok(v)
}

impl Settings {
    pub fn new(flags: Flags) -> Result<Self, CliError> {
        let file = match &flags.config {
            Some(p) => load(p)?,
            None => ExperimentConfig::default(),
        };
        Ok(Settings { flags, file })
    }

    pub fn process_kind(&self) -> Option<String> {
        self.flags.process.clone().or_else(|| self.file.process.kind.clone()).map(|s| s.to_lowercase())
    }

    fn alpha(&self) -> Option<f64> {
        self.flags.alpha.or(self.file.process.alpha)
    }

    fn meijer_q(&self) -> Result<Option<usize>, CliError> {
        match &self.flags.q {
            Some(s) => s.parse::<usize>().map(Some).map_err(|_| CliError::Config(format!("--q must be a count for meijer, got {s}"))),
            None => Ok(self.file.process.q),
        }
    }

    pub fn process(&self) -> Result<ProcessSpec, CliError> {
        let Some(kind) = self.process_kind() else {
            return bad("no process given (--process or [process] kind)");
        };
        let alpha = self.alpha().unwrap_or(0.0);
        let spec = match kind.as_str() {
            "airy" => ProcessSpec::Airy,
            "bessel" => ProcessSpec::bessel(alpha)?,
            "wright" => {
                let Some(theta) = self.flags.theta.or(self.file.process.theta) else {
                    return bad("wright process needs --theta");
                };
                ProcessSpec::wright(theta, alpha)?
            }
            "meijer" | "meijer-g" => {
                let r = self.flags.r.or(self.file.process.r);
                let nu = match (&self.file.process.nu, r) {
                    (Some(nu), Some(r)) if nu.len() != r => return bad(format!("r = {r} but {} nu parameters given", nu.len())),
                    (Some(nu), _) => nu.clone(),
                    (None, Some(r)) => vec![0.0; r],
                    (None, None) => return bad("meijer process needs --r or [process] nu"),
                };
                let q = self.meijer_q()?;
                let mu = match (&self.file.process.mu, q) {
                    (Some(mu), Some(q)) if mu.len() != q => return bad(format!("q = {q} but {} mu parameters given", mu.len())),
                    (Some(mu), _) => mu.clone(),
                    (None, None) | (None, Some(0)) => Vec::new(),
                    (None, Some(_)) => return bad("meijer process with q > 0 needs [process] mu"),
                };
                ProcessSpec::meijer(nu, mu)?
            }
            other => return bad(format!("unknown process {other:?}")),
        };
        Ok(spec)
    }

    pub fn s_list(&self) -> Result<Vec<f64>, CliError> {
        match self.flags.s_list.clone().or_else(|| self.file.grid.s.clone()) {
            Some(v) => non_empty("s-list", v),
            None => bad("no s grid given (--s-list or [grid] s)"),
        }
    }

    pub fn nu_list(&self) -> Option<Vec<f64>> {
        self.flags.nu_list.clone().or_else(|| self.file.grid.nu.clone()).or_else(|| self.file.pc.nu.clone())
    }

    pub fn nu_list_required(&self) -> Result<Vec<f64>, CliError> {
        match self.nu_list() {
            Some(v) => non_empty("nu-list", v),
            None => bad("no nu grid given (--nu-list or [grid] nu)"),
        }
    }

    pub fn pc_q(&self) -> Option<String> {
        self.flags.q.clone().or_else(|| self.file.pc.q.clone())
    }

    pub fn tol(&self) -> Result<f64, CliError> {
        let t = self.flags.tol.or(self.file.tolerance.refine).unwrap_or(edgerig::fredholm::REFINE_TOL);
        if !(t > 0.0 && t.is_finite()) {
            return bad(format!("tolerance must be positive, got {t}"));
        }
        Ok(t)
    }

    pub fn n(&self) -> Option<usize> {
        self.flags.n.or(self.file.sampler.n)
    }

    pub fn reps(&self) -> u64 {
        self.flags.reps.or(self.file.sampler.reps).unwrap_or(1)
    }

    pub fn seed(&self) -> u64 {
        self.flags.seed.or(self.file.sampler.seed).unwrap_or(0)
    }

    pub fn replica(&self) -> u64 {
        self.flags.replica.or(self.file.sampler.replica).unwrap_or(0)
    }

    pub fn jobs(&self) -> Result<usize, CliError> {
        let j = self.flags.jobs.or(self.file.sampler.jobs).unwrap_or(1);
        if j == 0 {
            return bad("--jobs must be at least 1");
        }
        Ok(j)
    }

    pub fn k_max(&self) -> Option<usize> {
        self.flags.k_max.or(self.file.sampler.k_max)
    }

    pub fn eps(&self) -> Result<f64, CliError> {
        let e = self.flags.eps.or(self.file.rigidity.eps).unwrap_or(0.05);
        if !(e > 0.0 && e.is_finite()) {
            return bad(format!("eps must be positive, got {e}"));
        }
        Ok(e)
    }

    pub fn k0_list(&self) -> Result<Vec<usize>, CliError> {
        let v = self.flags.k0.clone().or_else(|| self.file.rigidity.k0.clone()).unwrap_or_else(|| vec![5]);
        if v.is_empty() || v.iter().any(|k| *k < 2) {
            return bad("k0 values must be at least 2");
        }
        Ok(v)
    }

    pub fn out(&self) -> Option<PathBuf> {
        self.flags.out.clone().or_else(|| self.file.output.out.clone())
    }

    pub fn svg(&self) -> Option<PathBuf> {
        self.flags.svg.clone().or_else(|| self.file.output.svg.clone())
    }

    pub fn identity(&self) -> Option<String> {
        self.flags.identity.clone().or_else(|| self.file.kernel.identity.clone())
    }

    /// The sampler, from `--ensemble` or else from the process.
    pub fn sampler(&self) -> Result<SamplerConfig, CliError> {
        let ensemble = match self.flags.ensemble.clone().or_else(|| self.file.sampler.ensemble.clone()) {
            Some(e) => e.to_lowercase(),
            None => match self.process_kind().as_deref() {
                Some("airy") => "gue".into(),
                Some("bessel") => "lue".into(),
                Some("meijer") | Some("meijer-g") => "ginibre".into(),
                _ => return bad("no ensemble given (--ensemble gue|lue|ginibre)"),
            },
        };
        let n = self.n().unwrap_or(1000);
        let alpha = self.flags.alpha.or(self.file.sampler.alpha).or(self.file.process.alpha).unwrap_or(0.0);
        let cfg = match ensemble.as_str() {
            "gue" => SamplerConfig::Gue { n },
            "lue" => SamplerConfig::Lue { n, alpha },
            "ginibre" | "ginibre-product" => {
                let r = self.flags.r.or(self.file.sampler.r).or(self.file.process.r).unwrap_or(1);
                SamplerConfig::GinibreProduct { n, r, factor: self.file.sampler.calibration }
            }
            other => return bad(format!("unknown ensemble {other:?}")),
        };
        if let Some(kind) = self.process_kind() {
            let target = cfg.target()?;
            if self.process()? != target {
                return bad(format!("ensemble {ensemble} approximates {}, not the requested {kind} process", target.label()));
            }
        }
        Ok(cfg)
    }
}

/// Provenance common to every sidecar.
#[derive(Debug, Clone, Serialize)]
pub struct RunInfo {
    pub tool: &'static str,
    pub version: &'static str,
    pub git_describe: &'static str,
    pub command: String,
}

impl RunInfo {
    pub fn new(command: &str) -> Self {
        RunInfo {
            tool: "edgerig",
            version: env!("CARGO_PKG_VERSION"),
            git_describe: env!("EDGERIG_GIT_DESCRIBE"),
            command: command.into(),
        }
    }
}
