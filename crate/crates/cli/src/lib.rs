//! The `ostat` command line: sorted samples, envelopes, verification suites,
//! calibration and rate tables.
//!
//! Exit status is 0 on success, 1 on configuration errors and 2 on runtime
//! errors or a failed verification.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use chrono::{SecondsFormat, Utc};
use clap::{Parser, Subcommand};
use ostat::envelopes::calibrate_constant;
use ostat::montecarlo::rate_scaling_experiment;
use ostat::sampler::{sample_order_stats, sort_oracle_sample};
use ostat::{Envelope, SeedSpec};
use serde_json::{json, Value};

mod error;
pub mod options;
pub mod output;
pub mod suites;

pub use error::CliError;
use options::{Options, SamplerName};
use output::{check_writable, manifest_path, write_atomic, RunManifest};

pub const SEED_ENV: &str = "OSTAT_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "ostat",
    version,
    about = "Order-statistic envelopes and concentration experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw one sorted sample (CSV: index,value)
    Simulate(Options),
    /// Build a band around the reference points (CSV: index,q,x_star,lower,upper)
    Envelope(Options),
    /// Run a named verification suite and report a JSON summary
    Verify(Options),
    /// Calibrate the width constant of the log-concave sup band
    Calibrate(Options),
    /// Median sup deviation against the log-concave rate across sample sizes
    Rate(Options),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Envelope(_) => "envelope",
            Command::Verify(_) => "verify",
            Command::Calibrate(_) => "calibrate",
            Command::Rate(_) => "rate",
        }
    }

    fn into_options(self) -> Options {
        match self {
            Command::Simulate(o)
            | Command::Envelope(o)
            | Command::Verify(o)
            | Command::Calibrate(o)
            | Command::Rate(o) => o,
        }
    }
}

/// What a subcommand produced: the primary document and optional records.
struct Produced {
    primary: String,
    records: Option<String>,
    failure: Option<String>,
}

impl Produced {
    fn data(primary: String) -> Self {
        Produced {
            primary,
            records: None,
            failure: None,
        }
    }
}

/// Runs the CLI with `OSTAT_SEED` taken from the process environment.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env_seed = std::env::var(SEED_ENV).ok();
    run_cli_with_env(argv, env_seed.as_deref(), out, err)
}

/// Runs the CLI with an explicit value standing in for `OSTAT_SEED`.
pub fn run_cli_with_env<I, T>(
    argv: I,
    env_seed: Option<&str>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    let _ = write!(err, "{e}");
                    1
                }
            };
        }
    };
    let started = Utc::now();
    let command = cli.command.name();
    match execute(cli.command, env_seed, out) {
        Ok((opts, failure)) => {
            if let Err(e) = write_manifest(command, &argv, &opts, started) {
                let _ = writeln!(err, "error: {e}");
                return e.exit_code();
            }
            match failure {
                Some(reason) => {
                    let e = CliError::Failed(reason);
                    let _ = writeln!(err, "error: {e}");
                    e.exit_code()
                }
                None => 0,
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(
    command: Command,
    env_seed: Option<&str>,
    out: &mut dyn Write,
) -> Result<(Options, Option<String>), CliError> {
    let produce: fn(&mut Options) -> Result<Produced, CliError> = match &command {
        Command::Simulate(_) => simulate,
        Command::Envelope(_) => envelope,
        Command::Verify(_) => verify,
        Command::Calibrate(_) => calibrate,
        Command::Rate(_) => rate,
    };
    let mut opts = command.into_options().resolve(env_seed)?;
    for path in opts.outputs() {
        check_writable(path)?;
    }
    let produced = produce(&mut opts)?;
    match &opts.out {
        Some(path) => write_atomic(path, produced.primary.as_bytes())?,
        None => out.write_all(produced.primary.as_bytes())?,
    }
    if let (Some(path), Some(records)) = (&opts.records, &produced.records) {
        write_atomic(path, records.as_bytes())?;
    }
    Ok((opts, produced.failure))
}

fn write_manifest(
    command: &str,
    argv: &[OsString],
    opts: &Options,
    started: chrono::DateTime<Utc>,
) -> Result<(), CliError> {
    let outputs: Vec<PathBuf> = opts.outputs().into_iter().map(PathBuf::from).collect();
    let Some(primary) = outputs.first() else {
        return Ok(());
    };
    let manifest = RunManifest {
        tool: "ostat",
        version: env!("CARGO_PKG_VERSION"),
        command: command.to_string(),
        argv: argv
            .iter()
            .map(|a| a.to_string_lossy().into_owned())
            .collect(),
        config: opts.full_json(),
        master_seed: opts.seed(),
        started: started.to_rfc3339_opts(SecondsFormat::Micros, true),
        finished: Utc::now().to_rfc3339_opts(SecondsFormat::Micros, true),
        outputs: outputs.clone(),
    };
    write_atomic(
        &manifest_path(primary),
        output::pretty_json(&manifest).as_bytes(),
    )
}

fn require<T: Copy>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("missing --{flag}")))
}

fn simulate(opts: &mut Options) -> Result<Produced, CliError> {
    opts.allow_only("simulate", &["n", "sampler"])?;
    let model = opts.model(None)?;
    let n = require(opts.n, "n")?;
    let sampler = *opts.sampler.get_or_insert(SamplerName::Spacings);
    let mut stream = SeedSpec::new(opts.seed(), 0).stream();
    let sample = match sampler {
        SamplerName::Spacings => sample_order_stats(&model, n, &mut stream)?,
        SamplerName::Sort => sort_oracle_sample(&model, n, &mut stream)?,
    };
    Ok(Produced::data(output::sample_csv(&sample)))
}

fn envelope(opts: &mut Options) -> Result<Produced, CliError> {
    opts.allow_only(
        "envelope",
        &["n", "band", "t", "c", "k", "c-prob", "q", "rate-p"],
    )?;
    let model = opts.model(None)?;
    let n = require(opts.n, "n")?;
    let kind = opts.band_kind(&model)?;
    let env = Envelope::build(&model, n, kind)?;
    Ok(Produced::data(output::envelope_csv(&env)))
}

fn verify(opts: &mut Options) -> Result<Produced, CliError> {
    let suite = opts.suite.ok_or_else(|| {
        CliError::Config("missing --suite (lemma1|lemma2|theorem2|theorem4|metric|sampler)".into())
    })?;
    let allowed = suites::apply_defaults(suite, opts);
    opts.allow_only("verify", allowed)?;
    let outcome = suites::run_suite(suite, opts)?;
    let mut summary = json!({
        "suite": suites::suite_name(suite),
        "pass": outcome.pass,
        "config": opts.data_json(),
    });
    if let (Value::Object(dst), Value::Object(src)) = (&mut summary, outcome.summary) {
        dst.extend(src);
    }
    if let Value::Object(map) = &mut summary {
        map.insert("reason".into(), Value::String(outcome.reason.clone()));
    }
    Ok(Produced {
        primary: output::pretty_json(&summary),
        records: outcome.records.as_deref().map(output::records_jsonl),
        failure: (!outcome.pass).then_some(outcome.reason),
    })
}

fn calibrate(opts: &mut Options) -> Result<Produced, CliError> {
    opts.allow_only("calibrate", &["n", "trials", "target", "rate-p", "q"])?;
    let model = opts.model(None)?;
    let n = *opts.n.get_or_insert(1000);
    let trials = *opts.trials.get_or_insert(500);
    let target = *opts.target.get_or_insert(0.9);
    let q = *opts.q.get_or_insert(1.0);
    let p = opts.rate_p(&model);
    opts.rate_p = Some(p);
    let cal = calibrate_constant(&model, p, n, trials, target, opts.seed(), opts.workers)?;
    let doc = json!({
        "config": opts.data_json(),
        "calibration": cal,
        "probability": cal.probability_constant(q),
        "band": cal.band_kind(Some(q)),
    });
    Ok(Produced::data(output::pretty_json(&doc)))
}

fn rate(opts: &mut Options) -> Result<Produced, CliError> {
    opts.allow_only("rate", &["n-list", "trials", "rate-p"])?;
    let model = opts.model(None)?;
    let n_list = opts
        .n_list
        .get_or_insert_with(|| vec![1000, 10_000, 100_000])
        .clone();
    let trials = *opts.trials.get_or_insert(200);
    let p = opts.rate_p(&model);
    let rows = rate_scaling_experiment(&model, p, &n_list, trials, opts.seed(), opts.workers)?;
    Ok(Produced::data(output::rate_csv(&rows)))
}
