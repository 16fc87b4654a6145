use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use ostat::envelopes::ProbabilityConstant;
use ostat::{BandKind, DistributionModel};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DistName {
    Uniform,
    Normal,
    Exponential,
    Laplace,
    Genexp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandName {
    Ratio,
    Additive,
    SupLogConcave,
    SupUniformWidth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerName {
    Spacings,
    Sort,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Lemma1,
    Lemma2,
    Theorem2,
    Theorem4,
    Metric,
    Sampler,
}

/// Every flag of every subcommand. A `--config` JSON file uses the same keys
/// (kebab-case); flags given on the command line take precedence.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Options {
    /// JSON file with default values for any of the flags below
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Distribution family
    #[arg(long, value_enum)]
    pub dist: Option<DistName>,
    /// Shape exponent of genexp
    #[arg(long)]
    pub p: Option<f64>,
    /// Location (normal mean, laplace location)
    #[arg(long, allow_hyphen_values = true)]
    pub loc: Option<f64>,
    /// Scale (normal sd, laplace scale)
    #[arg(long)]
    pub scale: Option<f64>,
    /// Exponential rate
    #[arg(long)]
    pub rate: Option<f64>,

    /// Sample size
    #[arg(long)]
    pub n: Option<usize>,
    /// Comma-separated sample sizes
    #[arg(long, value_delimiter = ',')]
    pub n_list: Option<Vec<usize>>,
    /// Number of Monte Carlo trials
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed (overrides OSTAT_SEED)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; results do not depend on it
    #[arg(long)]
    pub workers: Option<usize>,

    /// Band family
    #[arg(long, value_enum)]
    pub band: Option<BandName>,
    /// Ratio T, additive t, or the T of a sup-uniform-width band
    #[arg(long)]
    pub t: Option<f64>,
    /// Width constant of a sup-log-concave band
    #[arg(long)]
    pub c: Option<f64>,
    /// Width constant of a sup-uniform-width band
    #[arg(long)]
    pub k: Option<f64>,
    /// Probability constant of a sup-log-concave band
    #[arg(long)]
    pub c_prob: Option<f64>,
    /// Exponent of ln n in the sup-log-concave nominal coverage
    #[arg(long)]
    pub q: Option<f64>,
    /// Exponent p of the rate ln ln n / (ln n)^(1-1/p); defaults to the model's
    #[arg(long)]
    pub rate_p: Option<f64>,
    /// Extreme order statistics dropped on each side
    #[arg(long)]
    pub trim: Option<usize>,
    /// Quantile level of the sup deviation used for calibration
    #[arg(long)]
    pub target: Option<f64>,
    /// Sampler used by simulate
    #[arg(long, value_enum)]
    pub sampler: Option<SamplerName>,
    /// Verification suite
    #[arg(long, value_enum)]
    pub suite: Option<Suite>,

    /// Primary output file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// JSONL file for per-trial records
    #[arg(long)]
    pub records: Option<PathBuf>,
}

macro_rules! merge_fields {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $dst.$f.is_none() { $dst.$f = $src.$f.clone(); } )*
    };
}

impl Options {
    /// Fills unset flags from the `--config` file, then the seed from
    /// `env_seed`, then the default seed 0.
    pub fn resolve(mut self, env_seed: Option<&str>) -> Result<Self, CliError> {
        if let Some(path) = self.config.clone() {
            let text = std::fs::read_to_string(&path).map_err(|e| {
                CliError::Config(format!("cannot read config {}: {e}", path.display()))
            })?;
            let file: Options = serde_json::from_str(&text)
                .map_err(|e| CliError::Config(format!("invalid config {}: {e}", path.display())))?;
            merge_fields!(self, file; dist, p, loc, scale, rate, n, n_list, trials, seed,
                workers, band, t, c, k, c_prob, q, rate_p, trim, target, sampler, suite,
                out, records);
        }
        if self.seed.is_none() {
            if let Some(s) = env_seed {
                let seed = s.trim().parse().map_err(|_| {
                    CliError::Config(format!("OSTAT_SEED must be an unsigned integer, got {s:?}"))
                })?;
                self.seed = Some(seed);
            }
        }
        self.seed.get_or_insert(0);
        if self.workers == Some(0) {
            return Err(CliError::Config("--workers must be at least 1".into()));
        }
        Ok(self)
    }

    fn set_flags(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        macro_rules! check {
            ($($f:ident => $name:literal),*) => { $( if self.$f.is_some() { v.push($name); } )* };
        }
        check!(dist => "dist", p => "p", loc => "loc", scale => "scale", rate => "rate",
            n => "n", n_list => "n-list", trials => "trials", workers => "workers",
            band => "band", t => "t", c => "c", k => "k", c_prob => "c-prob", q => "q",
            rate_p => "rate-p", trim => "trim", target => "target", sampler => "sampler",
            suite => "suite", out => "out", records => "records");
        v
    }

    /// Rejects flags that the subcommand does not use.
    pub fn allow_only(&self, command: &str, allowed: &[&str]) -> Result<(), CliError> {
        const COMMON: [&str; 7] = ["dist", "p", "loc", "scale", "rate", "workers", "out"];
        for flag in self.set_flags() {
            if !COMMON.contains(&flag) && !allowed.contains(&flag) {
                return Err(CliError::Config(format!(
                    "--{flag} is not used by `{command}`"
                )));
            }
        }
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn model(&self, default: Option<DistName>) -> Result<DistributionModel, CliError> {
        let dist = self.dist.or(default).ok_or_else(|| {
            CliError::Config("missing --dist (uniform|normal|exponential|laplace|genexp)".into())
        })?;
        let reject = |flag: &str, set: bool| -> Result<(), CliError> {
            if set {
                Err(CliError::Config(format!(
                    "--{flag} does not apply to --dist {}",
                    dist_label(dist)
                )))
            } else {
                Ok(())
            }
        };
        let model = match dist {
            DistName::Uniform => {
                reject("p", self.p.is_some())?;
                reject("loc", self.loc.is_some())?;
                reject("scale", self.scale.is_some())?;
                reject("rate", self.rate.is_some())?;
                Ok(DistributionModel::uniform())
            }
            DistName::Normal => {
                reject("p", self.p.is_some())?;
                reject("rate", self.rate.is_some())?;
                DistributionModel::normal(self.loc.unwrap_or(0.0), self.scale.unwrap_or(1.0))
            }
            DistName::Exponential => {
                reject("p", self.p.is_some())?;
                reject("loc", self.loc.is_some())?;
                reject("scale", self.scale.is_some())?;
                DistributionModel::exponential(self.rate.unwrap_or(1.0))
            }
            DistName::Laplace => {
                reject("p", self.p.is_some())?;
                reject("rate", self.rate.is_some())?;
                DistributionModel::laplace(self.loc.unwrap_or(0.0), self.scale.unwrap_or(1.0))
            }
            DistName::Genexp => {
                reject("loc", self.loc.is_some())?;
                reject("scale", self.scale.is_some())?;
                reject("rate", self.rate.is_some())?;
                let p = self.p.ok_or_else(|| {
                    CliError::Config("--dist genexp needs --p <real >= 1>".into())
                })?;
                DistributionModel::genexp(p)
            }
        };
        model.map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn rate_p(&self, model: &DistributionModel) -> f64 {
        self.rate_p.unwrap_or_else(|| model.p_index())
    }

    pub fn band_kind(&self, model: &DistributionModel) -> Result<BandKind, CliError> {
        let band = self.band.ok_or_else(|| {
            CliError::Config(
                "missing --band (ratio|additive|sup-log-concave|sup-uniform-width)".into(),
            )
        })?;
        let need = |v: Option<f64>, flag: &str| {
            v.ok_or_else(|| CliError::Config(format!("--band {} needs --{flag}", band_label(band))))
        };
        Ok(match band {
            BandName::Ratio => BandKind::Ratio {
                t: need(self.t, "t")?,
            },
            BandName::Additive => BandKind::Additive {
                t: need(self.t, "t")?,
            },
            BandName::SupLogConcave => BandKind::SupLogConcave {
                p: self.rate_p(model),
                c: need(self.c, "c")?,
                prob: self.c_prob.map(|c_prob| ProbabilityConstant {
                    c_prob,
                    q: self.q.unwrap_or(1.0),
                }),
            },
            BandName::SupUniformWidth => BandKind::SupUniformWidth {
                k: need(self.k, "k")?,
                t: need(self.t, "t")?,
            },
        })
    }

    /// Resolved options as JSON, without paths or worker count, for data
    /// outputs that must not depend on either.
    pub fn data_json(&self) -> Value {
        let mut v = self.full_json();
        if let Value::Object(map) = &mut v {
            for key in ["workers", "out", "records"] {
                map.remove(key);
            }
        }
        v
    }

    /// All resolved options as JSON.
    pub fn full_json(&self) -> Value {
        let mut v = serde_json::to_value(self).expect("options serialize");
        if let Value::Object(map) = &mut v {
            map.retain(|_, x| !x.is_null());
        }
        v
    }

    pub fn outputs(&self) -> Vec<&Path> {
        self.out
            .iter()
            .chain(self.records.iter())
            .map(PathBuf::as_path)
            .collect()
    }
}

fn dist_label(d: DistName) -> &'static str {
    match d {
        DistName::Uniform => "uniform",
        DistName::Normal => "normal",
        DistName::Exponential => "exponential",
        DistName::Laplace => "laplace",
        DistName::Genexp => "genexp",
    }
}

fn band_label(b: BandName) -> &'static str {
    match b {
        BandName::Ratio => "ratio",
        BandName::Additive => "additive",
        BandName::SupLogConcave => "sup-log-concave",
        BandName::SupUniformWidth => "sup-uniform-width",
    }
}
