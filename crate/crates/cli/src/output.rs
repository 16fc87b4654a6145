use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use ostat::montecarlo::{RateRow, TrialRecord};
use ostat::{Envelope, SortedSample};
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

/// Fails early when an output path cannot be created.
pub fn check_writable(path: &Path) -> Result<(), CliError> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !parent.is_dir() {
        return Err(CliError::Config(format!(
            "cannot write {}: directory {} does not exist",
            path.display(),
            parent.display()
        )));
    }
    if path.is_dir() {
        return Err(CliError::Config(format!(
            "cannot write {}: it is a directory",
            path.display()
        )));
    }
    Ok(())
}

/// Writes `bytes` to a temporary sibling, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let name = path
        .file_name()
        .ok_or_else(|| CliError::Config(format!("not a file path: {}", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(bytes).and_then(|_| f.sync_all()))
        .and_then(|_| fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = fs::remove_file(&tmp);
        return Err(CliError::Runtime(format!(
            "cannot write {}: {e}",
            path.display()
        )));
    }
    Ok(())
}

pub fn sample_csv(sample: &SortedSample) -> String {
    let mut s = String::from("index,value\n");
    for (i, v) in sample.values().iter().enumerate() {
        let _ = writeln!(s, "{},{}", i + 1, v);
    }
    s
}

pub fn envelope_csv(e: &Envelope) -> String {
    let mut s = String::from("index,q,x_star,lower,upper\n");
    for i in 0..e.n {
        let _ = writeln!(
            s,
            "{},{},{},{},{}",
            i + 1,
            e.q(i),
            e.reference[i],
            e.lower[i],
            e.upper[i]
        );
    }
    s
}

pub fn rate_csv(rows: &[RateRow]) -> String {
    let mut s = String::from("n,median_sup_dev,rate,ratio\n");
    for r in rows {
        let _ = writeln!(s, "{},{},{},{}", r.n, r.median_sup_dev, r.rate, r.ratio);
    }
    s
}

pub fn records_jsonl(records: &[TrialRecord]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r).expect("record serializes"));
        s.push('\n');
    }
    s
}

pub fn pretty_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("summary serializes");
    s.push('\n');
    s
}

#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub argv: Vec<String>,
    pub config: Value,
    pub master_seed: u64,
    /// RFC 3339, UTC.
    pub started: String,
    pub finished: String,
    pub outputs: Vec<PathBuf>,
}

pub fn manifest_path(primary: &Path) -> PathBuf {
    let mut name = primary
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".manifest.json");
    primary.with_file_name(name)
}
