//! Named verification suites run by `ostat verify`.

use ostat::montecarlo::{
    default_trim, medians_strictly_decreasing, rate_scaling_experiment, ratio_spread, run_trials,
    DeviationSummary, TrialRecord,
};
use ostat::sampler::{sample_order_stats, sample_uniform_order_stats, sort_oracle_sample};
use ostat::stats::ks_two_sample;
use ostat::theta::theta_distance;
use ostat::{BandKind, DistributionModel, ExperimentConfig, SeedSpec, ThetaParams};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::CliError;
use crate::options::{DistName, Options, Suite};

/// Mixed into the master seed for the sort-based reference sampler so its
/// streams differ from the spacings sampler's.
const ORACLE_SEED_SALT: u64 = 0x9e37_79b9_7f4a_7c15;

pub const METRIC_PS: [f64; 4] = [1.0, 1.5, 2.0, 4.0];
pub const TRIANGLE_RTOL: f64 = 1e-12;

pub struct SuiteOutcome {
    pub pass: bool,
    pub reason: String,
    pub summary: Value,
    pub records: Option<Vec<TrialRecord>>,
}

#[derive(Serialize)]
struct DeviationJson {
    median: f64,
    q90: f64,
    q99: f64,
    mean: f64,
    max: f64,
}

impl From<DeviationSummary> for DeviationJson {
    fn from(d: DeviationSummary) -> Self {
        DeviationJson {
            median: d.median,
            q90: d.q90,
            q99: d.q99,
            mean: d.mean,
            max: d.max,
        }
    }
}

pub fn suite_name(s: Suite) -> &'static str {
    match s {
        Suite::Lemma1 => "lemma1",
        Suite::Lemma2 => "lemma2",
        Suite::Theorem2 => "theorem2",
        Suite::Theorem4 => "theorem4",
        Suite::Metric => "metric",
        Suite::Sampler => "sampler",
    }
}

/// Fills suite defaults into `opts` and lists the flags the suite reads.
pub fn apply_defaults(suite: Suite, opts: &mut Options) -> &'static [&'static str] {
    match suite {
        Suite::Lemma1 => {
            opts.dist.get_or_insert(DistName::Uniform);
            opts.n.get_or_insert(100_000);
            opts.t.get_or_insert(1e6);
            opts.trials.get_or_insert(1000);
            &["suite", "n", "t", "trials", "trim", "records"]
        }
        Suite::Lemma2 => {
            opts.dist.get_or_insert(DistName::Uniform);
            opts.n.get_or_insert(2000);
            opts.t.get_or_insert(0.1);
            opts.trials.get_or_insert(5000);
            &["suite", "n", "t", "trials", "trim", "records"]
        }
        Suite::Theorem2 => {
            opts.dist.get_or_insert(DistName::Exponential);
            let n = *opts.n.get_or_insert(10_000);
            opts.trim.get_or_insert(default_trim(n));
            opts.trials.get_or_insert(500);
            &["suite", "n", "trim", "trials", "records"]
        }
        Suite::Theorem4 => {
            opts.dist.get_or_insert(DistName::Normal);
            opts.n_list.get_or_insert(vec![1000, 10_000, 100_000]);
            opts.trials.get_or_insert(200);
            &["suite", "n-list", "trials", "rate-p"]
        }
        Suite::Metric => {
            opts.trials.get_or_insert(100_000);
            &["suite", "trials"]
        }
        Suite::Sampler => {
            opts.dist.get_or_insert(DistName::Uniform);
            opts.n.get_or_insert(1000);
            opts.trials.get_or_insert(20_000);
            &["suite", "n", "trials"]
        }
    }
}

pub fn run_suite(suite: Suite, opts: &Options) -> Result<SuiteOutcome, CliError> {
    match suite {
        Suite::Lemma1 | Suite::Lemma2 => coverage_suite(suite, opts),
        Suite::Theorem2 => theorem2(opts),
        Suite::Theorem4 => theorem4(opts),
        Suite::Metric => metric(opts),
        Suite::Sampler => sampler(opts),
    }
}

fn experiment(opts: &Options, model: DistributionModel) -> ExperimentConfig {
    ExperimentConfig {
        trim: opts.trim,
        workers: opts.workers,
        ..ExperimentConfig::new(
            model,
            opts.n.unwrap_or(0),
            opts.trials.unwrap_or(0),
            opts.seed(),
        )
    }
}

fn coverage_suite(suite: Suite, opts: &Options) -> Result<SuiteOutcome, CliError> {
    let model = opts.model(None)?;
    let t = opts.t.unwrap_or(f64::NAN);
    let band = if suite == Suite::Lemma1 {
        BandKind::Ratio { t }
    } else {
        BandKind::Additive { t }
    };
    let config = ExperimentConfig {
        band: Some(band),
        ..experiment(opts, model)
    };
    let run = run_trials(&config)?;
    let coverage = run.coverage().expect("band present");
    let deviation = run.deviation(config.n)?;
    let floor = coverage.nominal - 3.0 * coverage.wilson_half_width();
    let pass = coverage.empirical >= floor;
    Ok(SuiteOutcome {
        pass,
        reason: format!(
            "empirical coverage {} against nominal {} (floor {floor})",
            coverage.empirical, coverage.nominal
        ),
        summary: json!({
            "coverage": coverage,
            "deviation": DeviationJson::from(deviation),
            "details": { "pass_floor": floor },
        }),
        records: Some(run.records),
    })
}

fn theorem2(opts: &Options) -> Result<SuiteOutcome, CliError> {
    let model = opts.model(None)?;
    let config = experiment(opts, model);
    let run = run_trials(&config)?;
    let full: Vec<f64> = run.records.iter().map(|r| r.sup_dev).collect();
    let trimmed: Vec<f64> = run
        .records
        .iter()
        .map(TrialRecord::effective_sup_dev)
        .collect();
    let full_s = DeviationSummary::from_values(config.n, &full)?;
    let trim_s = DeviationSummary::from_values(config.n, &trimmed)?;
    let subset = full.iter().zip(&trimmed).all(|(f, t)| t <= f);
    let pass = subset && trim_s.q90 < full_s.q90;
    Ok(SuiteOutcome {
        pass,
        reason: format!(
            "trimmed q90 {} vs full q90 {}; trimmed <= full in every trial: {subset}",
            trim_s.q90, full_s.q90
        ),
        summary: json!({
            "deviation": DeviationJson::from(trim_s),
            "details": {
                "full_deviation": DeviationJson::from(full_s),
                "trimmed_never_exceeds": subset,
            },
        }),
        records: Some(run.records),
    })
}

pub const RATE_SPREAD_LIMIT: f64 = 3.0;

fn theorem4(opts: &Options) -> Result<SuiteOutcome, CliError> {
    let model = opts.model(None)?;
    let p = opts.rate_p(&model);
    let n_list = opts.n_list.clone().unwrap_or_default();
    let rows = rate_scaling_experiment(
        &model,
        p,
        &n_list,
        opts.trials.unwrap_or(0),
        opts.seed(),
        opts.workers,
    )?;
    let decreasing = medians_strictly_decreasing(&rows);
    let spread = ratio_spread(&rows);
    Ok(SuiteOutcome {
        pass: decreasing && spread <= RATE_SPREAD_LIMIT,
        reason: format!("medians strictly decreasing: {decreasing}; ratio spread {spread}"),
        summary: json!({
            "details": {
                "rate_p": p,
                "rows": rows,
                "medians_strictly_decreasing": decreasing,
                "ratio_spread": spread,
            },
        }),
        records: None,
    })
}

/// Counts of metric-axiom failures over random triples.
#[derive(Debug, Default, Clone, Copy, Serialize)]
pub struct MetricViolations {
    pub triples: u64,
    pub symmetry: u64,
    pub identity: u64,
    pub triangle: u64,
    pub monotone: u64,
}

impl MetricViolations {
    pub fn total(&self) -> u64 {
        self.symmetry + self.identity + self.triangle + self.monotone
    }
}

fn open_uniform(s: &mut ostat::rng::TrialStream) -> f64 {
    loop {
        let u = s.uniform();
        if u > 0.0 {
            return u;
        }
    }
}

/// Checks symmetry, identity of indiscernibles, the triangle inequality and
/// the monotone structure of θ_p on `triples` random triples per `p`.
pub fn metric_axioms(p: f64, triples: u64, seed: u64) -> Result<MetricViolations, CliError> {
    let params = ThetaParams::new(p)?;
    let d = |x: f64, y: f64| theta_distance(&params, x, y);
    let mut s = SeedSpec::new(seed, p.to_bits()).stream();
    let mut v = MetricViolations {
        triples,
        ..Default::default()
    };
    for _ in 0..triples {
        let (x, y, z) = (
            open_uniform(&mut s),
            open_uniform(&mut s),
            open_uniform(&mut s),
        );
        let dxy = d(x, y)?;
        let dyz = d(y, z)?;
        let dxz = d(x, z)?;
        if dxy != d(y, x)? {
            v.symmetry += 1;
        }
        if d(x, x)? != 0.0 || (dxy == 0.0) != (x == y) {
            v.identity += 1;
        }
        if !(dxz <= (dxy + dyz) * (1.0 + TRIANGLE_RTOL)) {
            v.triangle += 1;
        }
        let mut w = [x, y, z];
        w.sort_by(f64::total_cmp);
        let [a, b, c] = w;
        if d(b, c)? > d(a, c)? || d(a, b)? > d(a, c)? {
            v.monotone += 1;
        }
    }
    Ok(v)
}

fn metric(opts: &Options) -> Result<SuiteOutcome, CliError> {
    let triples = opts.trials.unwrap_or(0);
    let mut per_p = Vec::new();
    let mut total = 0;
    for p in METRIC_PS {
        let v = metric_axioms(p, triples, opts.seed())?;
        total += v.total();
        per_p.push(json!({ "p": p, "violations": v }));
    }
    Ok(SuiteOutcome {
        pass: total == 0,
        reason: format!("{total} metric violations over {triples} triples per p"),
        summary: json!({ "details": { "per_p": per_p } }),
        records: None,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentCheck {
    pub index: usize,
    pub mean: f64,
    pub expected: f64,
    pub standard_error: f64,
    pub pass: bool,
}

/// Sample mean of uniform order statistics at `indices` (1-based) against
/// `i/(n+1)`, passing within 4 standard errors of the Beta law.
pub fn beta_moment_checks(
    n: usize,
    indices: &[usize],
    trials: u64,
    seed: u64,
) -> Result<Vec<MomentCheck>, CliError> {
    let mut sums = vec![0.0; indices.len()];
    for t in 0..trials {
        let mut s = SeedSpec::new(seed, t).stream();
        let sample = sample_uniform_order_stats(n, &mut s)?;
        for (acc, &i) in sums.iter_mut().zip(indices) {
            *acc += sample.values()[i - 1];
        }
    }
    let nf = n as f64;
    Ok(indices
        .iter()
        .zip(sums)
        .map(|(&i, sum)| {
            let fi = i as f64;
            let expected = fi / (nf + 1.0);
            let var = fi * (nf + 1.0 - fi) / ((nf + 1.0).powi(2) * (nf + 2.0));
            let standard_error = (var / trials as f64).sqrt();
            let mean = sum / trials as f64;
            MomentCheck {
                index: i,
                mean,
                expected,
                standard_error,
                pass: (mean - expected).abs() <= 4.0 * standard_error,
            }
        })
        .collect())
}

/// Draws of the `index`-th order statistic (1-based) of samples of size `n`
/// from the spacings sampler and from the sort-based reference sampler.
pub fn order_stat_draws(
    model: &DistributionModel,
    n: usize,
    index: usize,
    trials: u64,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut spacings = Vec::with_capacity(trials as usize);
    let mut sorted = Vec::with_capacity(trials as usize);
    for t in 0..trials {
        let mut s = SeedSpec::new(seed, t).stream();
        spacings.push(sample_order_stats(model, n, &mut s)?.values()[index - 1]);
        let mut s = SeedSpec::new(seed ^ ORACLE_SEED_SALT, t).stream();
        sorted.push(sort_oracle_sample(model, n, &mut s)?.values()[index - 1]);
    }
    Ok((spacings, sorted))
}

pub const KS_N: usize = 100;
pub const KS_TRIALS: u64 = 10_000;
pub const KS_ALPHA: f64 = 0.001;

fn sampler(opts: &Options) -> Result<SuiteOutcome, CliError> {
    let model = opts.model(None)?;
    let n = opts.n.unwrap_or(0);
    if n < 10 {
        return Err(CliError::Config("sampler suite needs --n >= 10".into()));
    }
    let indices = [1, n / 10, n / 2, n - n / 10, n];
    let moments = beta_moment_checks(n, &indices, opts.trials.unwrap_or(0), opts.seed())?;
    let (a, b) = order_stat_draws(&model, KS_N, KS_N / 2, KS_TRIALS, opts.seed())?;
    let ks = ks_two_sample(&a, &b, KS_ALPHA);
    let moments_ok = moments.iter().all(|m| m.pass);
    Ok(SuiteOutcome {
        pass: moments_ok && !ks.rejected,
        reason: format!(
            "beta moments within 4 SE: {moments_ok}; KS statistic {} vs critical {}",
            ks.statistic, ks.critical
        ),
        summary: json!({
            "details": {
                "beta_moments": moments,
                "ks": { "n": KS_N, "index": KS_N / 2, "trials": KS_TRIALS, "alpha": KS_ALPHA, "result": ks },
            },
        }),
        records: None,
    })
}
