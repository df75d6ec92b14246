//! Suite execution and the three output files.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use qauth_core::{run_suite, Suite, SuiteConfig, VerificationReport};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Experiment;

pub const SCHEMA_VERSION: u32 = 1;

pub struct Run {
    pub reports: Vec<VerificationReport>,
    pub suite_secs: BTreeMap<String, f64>,
    pub wall_secs: f64,
}

#[derive(Serialize)]
struct Summary {
    checks: usize,
    passed: usize,
    failed: usize,
}

/// `report.json`: everything here is a function of the command, config and seed.
#[derive(Serialize)]
struct ReportFile<'a> {
    schema_version: u32,
    command: &'a str,
    seed: u64,
    suites: Vec<&'static str>,
    config: &'a SuiteConfig,
    summary: Summary,
    reports: &'a [VerificationReport],
}

/// `metadata.json`: timings and host-dependent settings.
#[derive(Serialize)]
struct MetadataFile<'a> {
    schema_version: u32,
    qauth_version: &'static str,
    started_unix_secs: u64,
    jobs: usize,
    wall_secs: f64,
    suite_secs: &'a BTreeMap<String, f64>,
    check_secs: BTreeMap<&'a str, f64>,
}

pub fn run(exp: &Experiment) -> Result<Run, String> {
    let started_unix_secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
    let start = Instant::now();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(exp.jobs)
        .build()
        .map_err(|e| e.to_string())?;
    let results: Vec<(Suite, f64, qauth_core::Result<Vec<VerificationReport>>)> = pool.install(|| {
        exp.suites
            .par_iter()
            .map(|&suite| {
                let t = Instant::now();
                let r = run_suite(suite, &exp.config, exp.seed);
                (suite, t.elapsed().as_secs_f64(), r)
            })
            .collect()
    });
    let mut reports = Vec::new();
    let mut suite_secs = BTreeMap::new();
    for (suite, secs, r) in results {
        reports.extend(r.map_err(|e| format!("suite {suite}: {e}"))?);
        suite_secs.insert(suite.to_string(), secs);
    }
    reports.sort_by(|a, b| a.check.cmp(&b.check));
    let run = Run {
        reports,
        suite_secs,
        wall_secs: start.elapsed().as_secs_f64(),
    };
    write_outputs(exp, &run, started_unix_secs).map_err(|e| format!("writing {}: {e}", exp.out.display()))?;
    Ok(run)
}

fn write_outputs(exp: &Experiment, run: &Run, started_unix_secs: u64) -> std::io::Result<()> {
    fs::create_dir_all(&exp.out)?;
    let passed = run.reports.iter().filter(|r| r.pass).count();
    let report = ReportFile {
        schema_version: SCHEMA_VERSION,
        command: &exp.command,
        seed: exp.seed,
        suites: exp.suites.iter().map(|s| s.name()).collect(),
        config: &exp.config,
        summary: Summary {
            checks: run.reports.len(),
            passed,
            failed: run.reports.len() - passed,
        },
        reports: &run.reports,
    };
    write_json(&exp.out.join("report.json"), &report)?;
    let metadata = MetadataFile {
        schema_version: SCHEMA_VERSION,
        qauth_version: env!("CARGO_PKG_VERSION"),
        started_unix_secs,
        jobs: exp.jobs,
        wall_secs: run.wall_secs,
        suite_secs: &run.suite_secs,
        check_secs: run.reports.iter().map(|r| (r.check.as_str(), r.runtime_secs)).collect(),
    };
    write_json(&exp.out.join("metadata.json"), &metadata)?;
    write_csv(&exp.out.join("summary.csv"), &run.reports)
}

fn write_json(path: &Path, value: &impl Serialize) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)
}

fn write_csv(path: &Path, reports: &[VerificationReport]) -> std::io::Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["check", "params", "measured", "bound", "pass"])?;
    for r in reports {
        w.write_record([
            r.check.clone(),
            params(r),
            r.measured.to_string(),
            r.expected.to_string(),
            r.pass.to_string(),
        ])?;
    }
    w.flush()
}

fn params(r: &VerificationReport) -> String {
    r.params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

pub fn line(r: &VerificationReport) -> String {
    let status = if r.pass { "PASS" } else { "FAIL" };
    let stderr = r.stderr.map(|s| format!(" stderr={s:.3e}")).unwrap_or_default();
    format!(
        "{status} {:<44} measured={:.6e} expected={:.6e}{stderr} [{}]",
        r.check,
        r.measured,
        r.expected,
        params(r)
    )
}
