//! Per-index bands `[lower_i, upper_i]` around the reference points
//! `x*_i = F⁻¹(i/(n+1))`.
//!
//! Ratio and additive bands are built in uniform space and mapped through the
//! quantile function; endpoints clamped to 0 or 1 become `-inf`/`inf`.
//! Sup bands have constant width around the reference points.

use serde::{Deserialize, Serialize};

use crate::distributions::DistributionModel;
use crate::error::{domain, Error, Result};
use crate::montecarlo::{run_trials, ExperimentConfig};
use crate::stats::empirical_quantile;

/// Probability constant for the log-concave sup band: nominal coverage
/// `1 - c_prob (ln n)^(-q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityConstant {
    pub c_prob: f64,
    pub q: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BandKind {
    /// `T^-1 <= γ_i (n+1)/i <= T` and the mirrored upper-tail constraint.
    Ratio { t: f64 },
    /// `|γ_i - i/(n+1)| <= t`.
    Additive { t: f64 },
    /// Half-width `c · ln ln n / (ln n)^(1-1/p)`.
    SupLogConcave {
        p: f64,
        c: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prob: Option<ProbabilityConstant>,
    },
    /// Half-width `k · T`.
    SupUniformWidth { k: f64, t: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub n: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub reference: Vec<f64>,
    pub nominal_coverage: f64,
    pub kind: BandKind,
}

impl Envelope {
    /// Builds the band described by `kind`.
    pub fn build(model: &DistributionModel, n: usize, kind: BandKind) -> Result<Self> {
        match kind {
            BandKind::Ratio { t } => ratio_band(model, n, t),
            BandKind::Additive { t } => additive_band(model, n, t),
            BandKind::SupLogConcave { .. } | BandKind::SupUniformWidth { .. } => {
                sup_band(model, n, kind)
            }
        }
    }

    /// True when every `values[i]` for `i` in `range` lies in its closed
    /// interval.
    pub fn covers(&self, values: &[f64], range: std::ops::Range<usize>) -> bool {
        range
            .into_iter()
            .all(|i| self.lower[i] <= values[i] && values[i] <= self.upper[i])
    }

    /// Uniform-space position `i/(n+1)` of 0-based index `i`.
    pub fn q(&self, i: usize) -> f64 {
        (i + 1) as f64 / (self.n + 1) as f64
    }
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        Err(domain("n must be at least 1"))
    } else {
        Ok(())
    }
}

fn grid_q(n: usize) -> impl Iterator<Item = f64> {
    let denom = (n + 1) as f64;
    (1..=n).map(move |i| i as f64 / denom)
}

/// `F⁻¹(i/(n+1))` for `i = 1..=n`.
pub fn reference_points(model: &DistributionModel, n: usize) -> Result<Vec<f64>> {
    check_n(n)?;
    Ok(grid_q(n).map(|q| model.quantile_interior(q)).collect())
}

fn to_data_space(model: &DistributionModel, lo: f64, hi: f64) -> (f64, f64) {
    let lower = if lo <= 0.0 {
        f64::NEG_INFINITY
    } else {
        model.quantile_interior(lo)
    };
    let upper = if hi >= 1.0 {
        f64::INFINITY
    } else {
        model.quantile_interior(hi)
    };
    (lower, upper)
}

fn uniform_space_band(
    model: &DistributionModel,
    n: usize,
    nominal: f64,
    kind: BandKind,
    interval: impl Fn(f64) -> (f64, f64),
) -> Result<Envelope> {
    let reference = reference_points(model, n)?;
    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for q in grid_q(n) {
        let (lo, hi) = interval(q);
        // q lies in the exact interval; keep it there under rounding.
        let (lo, hi) = to_data_space(model, lo.min(q), hi.max(q));
        lower.push(lo);
        upper.push(hi);
    }
    Ok(Envelope {
        n,
        lower,
        upper,
        reference,
        nominal_coverage: nominal.clamp(0.0, 1.0),
        kind,
    })
}

/// `1 - 400 / sqrt(T)`, clamped at 0.
pub fn ratio_nominal(t: f64) -> f64 {
    (1.0 - 400.0 / t.sqrt()).max(0.0)
}

/// Ratio band for `T > 1` (`T = inf` gives the whole line).
pub fn ratio_band(model: &DistributionModel, n: usize, t: f64) -> Result<Envelope> {
    if !(t > 1.0) {
        return Err(domain(format!("ratio band needs T > 1, got {t}")));
    }
    uniform_space_band(model, n, ratio_nominal(t), BandKind::Ratio { t }, |q| {
        let lo = (q / t).max(1.0 - (1.0 - q) * t);
        let hi = (q * t).min(1.0 - (1.0 - q) / t);
        (lo, hi)
    })
}

/// `1 - 2 exp(-n t² / 5)`, clamped at 0.
pub fn additive_nominal(n: usize, t: f64) -> f64 {
    (1.0 - 2.0 * (-(n as f64) * t * t / 5.0).exp()).max(0.0)
}

/// Additive band `q ± t` for `0 < t < 1`.
pub fn additive_band(model: &DistributionModel, n: usize, t: f64) -> Result<Envelope> {
    if !(t > 0.0 && t < 1.0) {
        return Err(domain(format!("additive band needs 0 < t < 1, got {t}")));
    }
    uniform_space_band(
        model,
        n,
        additive_nominal(n, t),
        BandKind::Additive { t },
        |q| (q - t, q + t),
    )
}

/// `ln ln n / (ln n)^(1 - 1/p)`.
pub fn logconcave_rate(n: usize, p: f64) -> Result<f64> {
    if n < 16 {
        return Err(domain(format!("rate needs n >= 16, got {n}")));
    }
    if !(p >= 1.0) {
        return Err(domain(format!("rate needs p >= 1, got {p}")));
    }
    let l = (n as f64).ln();
    Ok(l.ln() / l.powf(1.0 - 1.0 / p))
}

fn positive_constant(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "sup band needs a positive finite constant {name}, got {v}"
        )))
    }
}

/// Constant-width band around the reference points.
pub fn sup_band(model: &DistributionModel, n: usize, kind: BandKind) -> Result<Envelope> {
    check_n(n)?;
    let (width, nominal) = match kind {
        BandKind::SupLogConcave { p, c, prob } => {
            positive_constant("c", c)?;
            let width = c * logconcave_rate(n, p)?;
            let nominal = match prob {
                Some(ProbabilityConstant { c_prob, q }) => 1.0 - c_prob * (n as f64).ln().powf(-q),
                None => 0.0,
            };
            (width, nominal)
        }
        BandKind::SupUniformWidth { k, t } => {
            positive_constant("k", k)?;
            if !(t > 1.0) {
                return Err(domain(format!("sup band needs T > 1, got {t}")));
            }
            (k * t, ratio_nominal(t))
        }
        _ => {
            return Err(Error::Config(
                "sup_band needs a sup_log_concave or sup_uniform_width kind".into(),
            ))
        }
    };
    let reference = reference_points(model, n)?;
    Ok(Envelope {
        n,
        lower: reference.iter().map(|x| x - width).collect(),
        upper: reference.iter().map(|x| x + width).collect(),
        reference,
        nominal_coverage: if nominal.is_nan() {
            0.0
        } else {
            nominal.clamp(0.0, 1.0)
        },
        kind,
    })
}

/// Result of calibrating the sup-band constant on simulated samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub p: f64,
    pub n_cal: usize,
    pub trials: u64,
    pub target_quantile: f64,
    pub quantile_sup_dev: f64,
    pub rate: f64,
    /// Width constant: `quantile_sup_dev / rate`.
    pub c: f64,
}

impl Calibration {
    /// Probability constant that makes the nominal coverage at `n_cal` equal
    /// to the target quantile: `(1 - target) (ln n_cal)^q`.
    pub fn probability_constant(&self, q: f64) -> ProbabilityConstant {
        ProbabilityConstant {
            c_prob: (1.0 - self.target_quantile) * (self.n_cal as f64).ln().powf(q),
            q,
        }
    }

    pub fn band_kind(&self, q: Option<f64>) -> BandKind {
        BandKind::SupLogConcave {
            p: self.p,
            c: self.c,
            prob: q.map(|q| self.probability_constant(q)),
        }
    }
}

/// Empirical `target_quantile` of the sup deviation at `n_cal` divided by
/// `logconcave_rate(n_cal, p)`. Trials use `master_seed` with indices
/// `0..trials`.
pub fn calibrate_constant(
    model: &DistributionModel,
    p: f64,
    n_cal: usize,
    trials: u64,
    target_quantile: f64,
    master_seed: u64,
    workers: Option<usize>,
) -> Result<Calibration> {
    if trials < 100 {
        return Err(domain(format!(
            "calibration needs at least 100 trials, got {trials}"
        )));
    }
    if !(0.0..=1.0).contains(&target_quantile) {
        return Err(domain(format!(
            "target quantile must lie in [0, 1], got {target_quantile}"
        )));
    }
    if p > model.p_index() {
        return Err(Error::Precondition(format!(
            "{model} is only {}-log-concave; rate with p = {p} does not apply",
            model.p_index()
        )));
    }
    let rate = logconcave_rate(n_cal, p)?;
    let config = ExperimentConfig {
        workers,
        ..ExperimentConfig::new(*model, n_cal, trials, master_seed)
    };
    let mut devs: Vec<f64> = run_trials(&config)?
        .records
        .iter()
        .map(|r| r.sup_dev)
        .collect();
    devs.sort_by(f64::total_cmp);
    let quantile_sup_dev = empirical_quantile(&devs, target_quantile);
    Ok(Calibration {
        p,
        n_cal,
        trials,
        target_quantile,
        quantile_sup_dev,
        rate,
        c: quantile_sup_dev / rate,
    })
}
