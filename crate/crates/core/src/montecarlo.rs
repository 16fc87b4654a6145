//! Reproducible Monte Carlo experiments over sorted samples.
//!
//! Trial `k` draws from the stream `(master_seed, k)`, and results are
//! collected in trial order, so reports are bit-identical for any number of
//! workers.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::DistributionModel;
use crate::envelopes::{logconcave_rate, reference_points, BandKind, Envelope};
use crate::error::{domain, Error, Result};
use crate::rng::SeedSpec;
use crate::sampler::{fill_uniform_order_stats, map_through_quantile};
use crate::stats::{empirical_quantile, wilson_interval, Z_99};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub model: DistributionModel,
    pub n: usize,
    pub trials: u64,
    /// Master seed; trial `k` uses `SeedSpec::new(seed, k)`.
    pub seed: u64,
    #[serde(default)]
    pub band: Option<BandKind>,
    /// Number of extreme order statistics dropped on each side.
    #[serde(default)]
    pub trim: Option<usize>,
    /// Worker threads; `None` uses the global pool. Never affects results.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(model: DistributionModel, n: usize, trials: u64, seed: u64) -> Self {
        ExperimentConfig {
            model,
            n,
            trials,
            seed,
            band: None,
            trim: None,
            workers: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::Config("n must be at least 1".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if let Some(w) = self.trim {
            if 2 * w >= self.n {
                return Err(Error::Config(format!(
                    "trim {w} too large for n = {}: need 2·trim < n",
                    self.n
                )));
            }
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        Ok(())
    }

    /// 0-based index range kept after trimming.
    pub fn index_range(&self) -> std::ops::Range<usize> {
        let w = self.trim.unwrap_or(0);
        w..self.n - w
    }
}

/// `ceil(ln ln n)`, at least 0.
pub fn default_trim(n: usize) -> usize {
    let v = (n as f64).ln().ln().ceil();
    if v.is_finite() && v > 0.0 {
        v as usize
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub sup_dev: f64,
    pub trimmed_sup_dev: Option<f64>,
    pub covered: Option<bool>,
}

impl TrialRecord {
    /// Sup deviation over the trimmed range when trimming is on.
    pub fn effective_sup_dev(&self) -> f64 {
        self.trimmed_sup_dev.unwrap_or(self.sup_dev)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub trials: u64,
    pub hits: u64,
    pub empirical: f64,
    pub wilson99: (f64, f64),
    pub nominal: f64,
}

impl CoverageReport {
    pub fn new(trials: u64, hits: u64, nominal: f64) -> Self {
        CoverageReport {
            trials,
            hits,
            empirical: hits as f64 / trials as f64,
            wilson99: wilson_interval(hits, trials, Z_99),
            nominal,
        }
    }

    /// Largest distance from the point estimate to a Wilson endpoint.
    pub fn wilson_half_width(&self) -> f64 {
        (self.empirical - self.wilson99.0).max(self.wilson99.1 - self.empirical)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationSummary {
    pub n: usize,
    pub trials: u64,
    pub median: f64,
    pub q90: f64,
    pub q99: f64,
    pub mean: f64,
    pub max: f64,
}

impl DeviationSummary {
    /// Summarizes per-trial values given in trial order.
    pub fn from_values(n: usize, values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(domain("no trials to summarize"));
        }
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(DeviationSummary {
            n,
            trials: values.len() as u64,
            median: empirical_quantile(&sorted, 0.5),
            q90: empirical_quantile(&sorted, 0.9),
            q99: empirical_quantile(&sorted, 0.99),
            mean,
            max: sorted[sorted.len() - 1],
        })
    }
}

/// Per-trial records of an experiment plus the band's nominal coverage.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRun {
    pub records: Vec<TrialRecord>,
    pub nominal: Option<f64>,
}

impl ExperimentRun {
    pub fn coverage(&self) -> Option<CoverageReport> {
        let nominal = self.nominal?;
        let hits = self
            .records
            .iter()
            .filter(|r| r.covered == Some(true))
            .count() as u64;
        Some(CoverageReport::new(
            self.records.len() as u64,
            hits,
            nominal,
        ))
    }

    pub fn deviation(&self, n: usize) -> Result<DeviationSummary> {
        let v: Vec<f64> = self
            .records
            .iter()
            .map(TrialRecord::effective_sup_dev)
            .collect();
        DeviationSummary::from_values(n, &v)
    }
}

pub(crate) fn in_pool<R: Send>(workers: Option<usize>, f: impl FnOnce() -> R + Send) -> Result<R> {
    match workers {
        None => Ok(f()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Config(format!("cannot start {k} workers: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

fn sup_abs_diff(x: &[f64], reference: &[f64]) -> f64 {
    x.iter()
        .zip(reference)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max)
}

/// Runs every trial of `config`, returning records in trial order.
pub fn run_trials(config: &ExperimentConfig) -> Result<ExperimentRun> {
    config.validate()?;
    let envelope = match config.band {
        Some(kind) => Some(Envelope::build(&config.model, config.n, kind)?),
        None => None,
    };
    let computed;
    let reference: &[f64] = match &envelope {
        Some(e) => &e.reference,
        None => {
            computed = reference_points(&config.model, config.n)?;
            &computed
        }
    };
    let range = config.index_range();
    let trimmed = config.trim.is_some();
    let (n, seed, model) = (config.n, config.seed, config.model);
    let records = in_pool(config.workers, || {
        (0..config.trials)
            .into_par_iter()
            .map_init(
                || Vec::with_capacity(n),
                |buf, trial| {
                    let mut stream = SeedSpec::new(seed, trial).stream();
                    fill_uniform_order_stats(buf, n, &mut stream);
                    map_through_quantile(&model, buf);
                    let sup_dev = sup_abs_diff(buf, reference);
                    let trimmed_sup_dev = trimmed
                        .then(|| sup_abs_diff(&buf[range.clone()], &reference[range.clone()]));
                    let covered = envelope.as_ref().map(|e| e.covers(buf, range.clone()));
                    TrialRecord {
                        trial,
                        sup_dev,
                        trimmed_sup_dev,
                        covered,
                    }
                },
            )
            .collect::<Vec<_>>()
    })?;
    if let Some(r) = records.iter().find(|r| !r.sup_dev.is_finite()) {
        return Err(Error::Numerical(format!(
            "non-finite sup deviation in trial {}",
            r.trial
        )));
    }
    Ok(ExperimentRun {
        records,
        nominal: envelope.map(|e| e.nominal_coverage),
    })
}

/// Fraction of trials in which every order statistic (within the trimmed
/// range) lies in its closed band interval.
pub fn coverage_experiment(config: &ExperimentConfig) -> Result<CoverageReport> {
    if config.band.is_none() {
        return Err(Error::Config("coverage experiment needs a band".into()));
    }
    run_trials(config)?
        .coverage()
        .ok_or_else(|| Error::Config("coverage experiment needs a band".into()))
}

/// Distribution of `max_i |x_(i) - x*_(i)|` over trials, on the trimmed range
/// when `trim` is set.
pub fn sup_deviation_experiment(config: &ExperimentConfig) -> Result<DeviationSummary> {
    run_trials(config)?.deviation(config.n)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrimComparison {
    pub omega: usize,
    pub full: DeviationSummary,
    pub trimmed: DeviationSummary,
    /// Whether the trimmed sup was at most the full sup in every trial.
    pub trimmed_never_exceeds: bool,
}

/// Trimmed and untrimmed sup deviations from the same samples.
pub fn trimmed_vs_full_experiment(
    model: &DistributionModel,
    n: usize,
    omega: usize,
    trials: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<TrimComparison> {
    let config = ExperimentConfig {
        trim: Some(omega),
        workers,
        ..ExperimentConfig::new(*model, n, trials, seed)
    };
    let run = run_trials(&config)?;
    let full: Vec<f64> = run.records.iter().map(|r| r.sup_dev).collect();
    let trimmed: Vec<f64> = run
        .records
        .iter()
        .map(TrialRecord::effective_sup_dev)
        .collect();
    Ok(TrimComparison {
        omega,
        full: DeviationSummary::from_values(n, &full)?,
        trimmed: DeviationSummary::from_values(n, &trimmed)?,
        trimmed_never_exceeds: full.iter().zip(&trimmed).all(|(f, t)| t <= f),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub n: usize,
    pub median_sup_dev: f64,
    pub rate: f64,
    pub ratio: f64,
}

/// Median sup deviation against `logconcave_rate(n, p)` for each `n`, all
/// with the same master seed.
pub fn rate_scaling_experiment(
    model: &DistributionModel,
    p: f64,
    n_list: &[usize],
    trials: u64,
    seed: u64,
    workers: Option<usize>,
) -> Result<Vec<RateRow>> {
    if p > model.p_index() {
        return Err(Error::Precondition(format!(
            "{model} is only {}-log-concave; rate with p = {p} does not apply",
            model.p_index()
        )));
    }
    if n_list.is_empty() {
        return Err(Error::Config("rate experiment needs at least one n".into()));
    }
    let rates = n_list
        .iter()
        .map(|&n| logconcave_rate(n, p))
        .collect::<Result<Vec<_>>>()?;
    n_list
        .iter()
        .zip(rates)
        .map(|(&n, rate)| {
            let config = ExperimentConfig {
                workers,
                ..ExperimentConfig::new(*model, n, trials, seed)
            };
            let median = sup_deviation_experiment(&config)?.median;
            Ok(RateRow {
                n,
                median_sup_dev: median,
                rate,
                ratio: median / rate,
            })
        })
        .collect()
}

/// `max ratio / min ratio` across rows.
pub fn ratio_spread(rows: &[RateRow]) -> f64 {
    let max = rows
        .iter()
        .map(|r| r.ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    let min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    max / min
}

/// Whether the median column strictly decreases down the rows.
pub fn medians_strictly_decreasing(rows: &[RateRow]) -> bool {
    rows.windows(2)
        .all(|w| w[1].median_sup_dev < w[0].median_sup_dev)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(model: DistributionModel, n: usize, trials: u64, seed: u64) -> ExperimentConfig {
        ExperimentConfig::new(model, n, trials, seed)
    }

    #[test]
    fn config_validation() {
        let m = DistributionModel::uniform();
        assert!(cfg(m, 10, 0, 0).validate().is_err());
        assert!(cfg(m, 0, 10, 0).validate().is_err());
        let mut c = cfg(m, 10, 10, 0);
        c.trim = Some(5);
        assert!(c.validate().is_err());
        c.trim = Some(4);
        assert!(c.validate().is_ok());
        assert_eq!(c.index_range(), 4..6);
        assert!(matches!(
            coverage_experiment(&cfg(m, 10, 10, 0)),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn default_trim_values() {
        assert_eq!(default_trim(10_000), 3);
        assert_eq!(default_trim(1000), 2);
        assert_eq!(default_trim(2), 0);
        assert_eq!(default_trim(1), 0);
    }

    #[test]
    fn whole_line_band_always_covers() {
        let mut c = cfg(DistributionModel::standard_normal(), 500, 200, 1);
        c.band = Some(BandKind::Ratio { t: f64::INFINITY });
        let r = coverage_experiment(&c).unwrap();
        assert_eq!(r.hits, 200);
        assert_eq!(r.empirical, 1.0);
        assert_eq!(r.nominal, 1.0);
    }

    #[test]
    fn additive_coverage_above_nominal() {
        let mut c = cfg(DistributionModel::uniform(), 2000, 1000, 2);
        c.band = Some(BandKind::Additive { t: 0.1 });
        let r = coverage_experiment(&c).unwrap();
        assert!(
            r.empirical >= r.nominal - 3.0 * r.wilson_half_width(),
            "{r:?}"
        );
        assert!(r.wilson99.0 <= r.empirical && r.empirical <= r.wilson99.1);
    }

    #[test]
    fn results_independent_of_worker_count() {
        let mut c = cfg(DistributionModel::laplace(0.0, 1.0).unwrap(), 300, 64, 9);
        c.band = Some(BandKind::Additive { t: 0.05 });
        c.trim = Some(2);
        c.workers = Some(1);
        let a = run_trials(&c).unwrap();
        c.workers = Some(3);
        let b = run_trials(&c).unwrap();
        assert_eq!(a, b);
        c.workers = None;
        assert_eq!(a, run_trials(&c).unwrap());
        assert!(a
            .records
            .iter()
            .enumerate()
            .all(|(i, r)| r.trial == i as u64));
    }

    #[test]
    fn widening_never_loses_hits() {
        let model = DistributionModel::exponential(1.0).unwrap();
        let mut prev: Option<Vec<bool>> = None;
        for t in [0.01, 0.02, 0.04, 0.08] {
            let mut c = cfg(model, 400, 200, 4);
            c.band = Some(BandKind::Additive { t });
            let covered: Vec<bool> = run_trials(&c)
                .unwrap()
                .records
                .iter()
                .map(|r| r.covered.unwrap())
                .collect();
            if let Some(p) = &prev {
                assert!(p.iter().zip(&covered).all(|(a, b)| !a || *b));
            }
            prev = Some(covered);
        }
        let mut prev_hits = 0;
        for t in [2.0, 10.0, 1e3, 1e6] {
            let mut c = cfg(model, 400, 200, 4);
            c.band = Some(BandKind::Ratio { t });
            let hits = coverage_experiment(&c).unwrap().hits;
            assert!(hits >= prev_hits);
            prev_hits = hits;
        }
    }

    #[test]
    fn uniform_sup_deviation_at_most_one() {
        let s = sup_deviation_experiment(&cfg(DistributionModel::uniform(), 50, 500, 5)).unwrap();
        assert!(s.max <= 1.0);
        assert!(s.median <= s.q90 && s.q90 <= s.q99 && s.q99 <= s.max);
    }

    #[test]
    fn trimming_is_a_subset_sup() {
        let m = DistributionModel::exponential(1.0).unwrap();
        let zero = trimmed_vs_full_experiment(&m, 500, 0, 100, 6, None).unwrap();
        assert_eq!(zero.full, zero.trimmed);
        let three = trimmed_vs_full_experiment(&m, 500, 3, 100, 6, None).unwrap();
        assert!(three.trimmed_never_exceeds);
        assert!(three.trimmed.median <= three.full.median);
        assert_eq!(three.full, zero.full);
    }

    #[test]
    fn rate_table_well_formed() {
        let m = DistributionModel::standard_normal();
        let rows = rate_scaling_experiment(&m, 2.0, &[100, 1000], 50, 7, None).unwrap();
        assert_eq!(rows.len(), 2);
        assert!(rows.iter().all(|r| r.ratio.is_finite() && r.ratio > 0.0));
        assert!(ratio_spread(&rows) >= 1.0);
        assert!(rate_scaling_experiment(&m, 2.0, &[10], 50, 7, None).is_err());
        let lap = DistributionModel::laplace(0.0, 1.0).unwrap();
        assert!(matches!(
            rate_scaling_experiment(&lap, 2.0, &[100], 50, 7, None),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn summary_from_values() {
        let s = DeviationSummary::from_values(3, &[3.0, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!(s.median, 2.0);
        assert_eq!(s.max, 4.0);
        assert_eq!(s.mean, 2.5);
        assert!(DeviationSummary::from_values(3, &[]).is_err());
    }
}
