//! Acceptance criteria for a `qauth all` run, judged from its report files.
//! Each `criterion_*` returns the problems found; an empty list is a pass.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde_json::Value;

/// The files of one `qauth all` run.
pub struct Run {
    pub exit: u8,
    pub report_bytes: Vec<u8>,
    pub checks: BTreeMap<String, Value>,
    pub suite_secs: BTreeMap<String, f64>,
    pub check_secs: BTreeMap<String, f64>,
}

impl Run {
    /// Loads `report.json` and `metadata.json` from a finished run.
    pub fn load(out: &Path, exit: u8) -> std::io::Result<Self> {
        let report_bytes = fs::read(out.join("report.json"))?;
        let report: Value = serde_json::from_slice(&report_bytes)?;
        let meta: Value = serde_json::from_str(&fs::read_to_string(out.join("metadata.json"))?)?;
        let checks = report["reports"]
            .as_array()
            .map(|a| a.as_slice())
            .unwrap_or_default()
            .iter()
            .map(|c| (c["check"].as_str().unwrap_or_default().to_string(), c.clone()))
            .collect();
        Ok(Run {
            exit,
            report_bytes,
            checks,
            suite_secs: secs(&meta["suite_secs"]),
            check_secs: secs(&meta["check_secs"]),
        })
    }

    pub fn all_pass(&self) -> bool {
        self.checks.values().all(|c| c["pass"] == true)
    }
}

fn secs(v: &Value) -> BTreeMap<String, f64> {
    v.as_object()
        .into_iter()
        .flatten()
        .filter_map(|(k, v)| Some((k.clone(), v.as_f64()?)))
        .collect()
}

/// Collects the reasons one criterion fails.
struct Judge<'a> {
    run: &'a Run,
    problems: Vec<String>,
}

impl<'a> Judge<'a> {
    fn new(run: &'a Run) -> Self {
        Self {
            run,
            problems: Vec::new(),
        }
    }

    fn check(&mut self, name: &str) -> Option<&'a Value> {
        let c = self.run.checks.get(name);
        if c.is_none() {
            self.problems.push(format!("{name} missing"));
        }
        c
    }

    fn passes(&mut self, name: &str) -> Option<&'a Value> {
        let c = self.check(name)?;
        if c["pass"] != true {
            self.problems.push(format!(
                "{name} failed (measured {}, expected {})",
                c["measured"], c["expected"]
            ));
        }
        Some(c)
    }

    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.problems.push(what.into());
        }
    }

    fn at_most(&mut self, value: Option<f64>, limit: f64, what: &str) {
        match value {
            Some(v) if v <= limit => {}
            Some(v) => self.problems.push(format!("{what} = {v} exceeds {limit}")),
            None => self.problems.push(format!("{what} missing")),
        }
    }

    fn suite_secs(&self, suite: &str) -> Option<f64> {
        self.run.suite_secs.get(suite).copied()
    }

    fn check_secs(&self, names: &[&str]) -> Option<f64> {
        names.iter().map(|n| self.run.check_secs.get(*n).copied()).sum()
    }
}

fn param<'v>(c: &'v Value, key: &str) -> &'v str {
    c["params"][key].as_str().unwrap_or("")
}

pub fn criterion_1(run: &Run) -> Vec<String> {
    let mut j = Judge::new(run);
    for name in ["correctness.clifford", "correctness.trap"] {
        if let Some(c) = j.passes(name) {
            j.expect(c["samples"] == 50, format!("{name}: expected 50 trials"));
            j.expect(
                c["expected"] == 0.0 && c["tolerance"] == 1e-9,
                format!("{name}: tolerance is not 1e-9"),
            );
        }
    }
    if let Some(c) = j.check("correctness.clifford") {
        j.expect(
            param(c, "n") == "1" && param(c, "d") == "2",
            "clifford parameters are not (1, 2)",
        );
    }
    if let Some(c) = j.check("correctness.trap") {
        j.expect(param(c, "ec") == "trivial", "trap code is not the trivial n = 1 code");
    }
    let secs = j.suite_secs("correctness");
    j.at_most(secs, 10.0, "runtime");
    j.problems
}

pub fn criterion_2(run: &Run) -> Vec<String> {
    let mut j = Judge::new(run);
    for n in [1, 2] {
        let name = format!("lemma.pauli_twirl.n{n}");
        if let Some(c) = j.passes(&name) {
            j.expect(param(c, "inputs") == "20", format!("{name}: expected 20 inputs"));
            j.expect(c["tolerance"] == 1e-9, format!("{name}: tolerance is not 1e-9"));
            j.at_most(c["details"]["cross_residual"].as_f64(), 1e-9, "cross-term residual");
            j.at_most(c["details"]["diagonal_residual"].as_f64(), 1e-9, "P = P' residual");
        }
    }
    let secs = j.check_secs(&["lemma.pauli_twirl.n1", "lemma.pauli_twirl.n2"]);
    j.at_most(secs, 30.0, "runtime");
    j.problems
}

pub fn criterion_3(run: &Run) -> Vec<String> {
    let mut j = Judge::new(run);
    if let Some(c) = j.passes("lemma.clifford_twirl") {
        j.at_most(c["measured"].as_f64(), 1e-9, "sum norm");
    }
    let secs = j.check_secs(&["lemma.clifford_twirl"]);
    j.at_most(secs, 5.0, "runtime");
    j.problems
}

pub fn criterion_4(run: &Run) -> Vec<String> {
    let mut j = Judge::new(run);
    if let Some(c) = j.passes("lemma.clifford_randomization") {
        let table = c["details"]["table"].as_array().cloned().unwrap_or_default();
        let entries: Vec<&Value> = table.iter().flat_map(|row| row.as_array().unwrap().iter()).collect();
        j.expect(entries.len() == 9, format!("table has {} entries", entries.len()));
        j.expect(entries.iter().all(|&e| e == 8), "table entries differ from 8");
    }
    j.problems
}

pub fn criterion_5(run: &Run) -> Vec<String> {
    let mut j = Judge::new(run);
    if let Some(c) = j.passes("security.clifford.bound") {
        j.expect(
            param(c, "n") == "1" && param(c, "d") == "2",
            "parameters are not (1, 2)",
        );
        j.expect(param(c, "r_qubits") == "1", "reference is not one qubit");
        j.expect(c["expected"] == 0.75, "bound is not 0.75");
        j.expect(
            c["details"]["attacks"] == 50 + 63,
            "expected 50 Haar + 63 Pauli attacks",
        );
        j.expect(
            c["samples"].as_u64().unwrap_or(0) >= 10_000,
            "fewer than 10^4 key samples",
        );
        j.expect(c["stderr"].is_number(), "no standard error reported");
    }
    if let Some(c) = j.passes("security.clifford.pauli_closed_form") {
        j.expect(
            (c["expected"].as_f64().unwrap() - 5.0 / 21.0).abs() < 1e-15,
            "expected value is not 5/21",
        );
        j.expect(c["tolerance"] == 1e-6, "tolerance is not 1e-6");
        j.expect(c["details"]["attacks"] == 63, "not all 63 Pauli attacks");
    }
    if let Some(c) = j.passes("security.clifford.mc_agreement") {
        j.expect(c["expected"] == 3.0, "agreement threshold is not 3 sigma");
    }
    let secs = j.suite_secs("security_clifford");
    j.at_most(secs, 600.0, "runtime");
    j.problems
}

pub fn criterion_6(run: &Run) -> Vec<String> {
    let mut j = Judge::new(run);
    if let Some(c) = j.passes("security.trap.dense_bound") {
        j.expect(param(c, "keys") == "384", "dense key average is not over 384 keys");
        j.expect(
            c["details"]["attacks"] == 64 + 20,
            "expected 64 Pauli + 20 Haar attacks",
        );
    }
    if let Some(c) = j.passes("security.trap.dense_tight") {
        j.expect(c["tolerance"] == 1e-9, "tightness tolerance is not 1e-9");
    }
    if let Some(c) = j.passes("security.trap.symbolic_bound") {
        j.expect(
            param(c, "ec") == "five_qubit" && param(c, "t") == "1",
            "symbolic code is not the five-qubit code",
        );
        j.expect(c["details"]["attacks"] == 200, "expected 200 random Pauli attacks");
        j.expect(
            c["samples"].as_u64().unwrap_or(0) >= 10_000,
            "fewer than 10^4 permutations",
        );
    }
    let secs = j.suite_secs("security_trap");
    j.at_most(secs, 600.0, "runtime");
    j.problems
}

pub fn criterion_7(run: &Run) -> Vec<String> {
    let mut j = Judge::new(run);
    for name in ["security.clifford.oracle", "security.trap.oracle"] {
        if let Some(c) = j.passes(name) {
            j.expect(c["expected"] == 1e-9, format!("{name}: tolerance is not 1e-9"));
            j.expect(
                c["details"]["attacks_checked"].as_u64().unwrap_or(0) > 0,
                format!("{name}: nothing checked"),
            );
        }
    }
    j.problems
}

pub fn criterion_8(run: &Run) -> Vec<String> {
    let mut j = Judge::new(run);
    for n in [1, 2, 3] {
        for t in [0, 1] {
            for kind in ["compositions", "bound", "equality"] {
                let name = format!("eta.{kind}.n{n}.t{t}");
                if kind == "equality" && t >= n {
                    continue;
                }
                if let Some(c) = j.passes(&name) {
                    if kind != "equality" {
                        let mode = if n == 3 { "sampled" } else { "exhaustive" };
                        j.expect(param(c, "mode") == mode, format!("{name}: mode is not {mode}"));
                        if n == 3 {
                            j.expect(param(c, "paulis") == "500", format!("{name}: expected 500 Paulis"));
                        }
                    }
                }
            }
        }
    }
    if let Some(c) = j.passes("eta.chain") {
        j.expect(param(c, "n_max") == "50", "chain not checked up to n = 50");
    }
    let secs = j.suite_secs("eta");
    j.at_most(secs, 300.0, "runtime");
    j.problems
}

/// Byte-identical reports with consistent exit codes.
pub fn criterion_9(first: &Run, second: &Run) -> Vec<String> {
    let mut problems = Vec::new();
    if first.report_bytes != second.report_bytes {
        problems.push("report.json differs between runs".to_string());
    }
    if first.exit != second.exit {
        problems.push(format!("exit codes differ: {} vs {}", first.exit, second.exit));
    }
    let expected = if first.all_pass() { 0 } else { 1 };
    if first.exit != expected {
        problems.push(format!("exit code {} does not match the reports", first.exit));
    }
    problems
}

pub const TITLES: [&str; 9] = [
    "correctness of both codes",
    "Pauli twirl, n = 1, 2",
    "Clifford twirl, n = 1",
    "Clifford randomization table",
    "Clifford code gap <= 3/2^d at (1, 2)",
    "trap code gap <= (1/3)^(t+1)",
    "simulator and closed form agree to 1e-9",
    "permutation counts and their bound",
    "qauth all --seed 7 is byte-identical across runs",
];

/// Problems for criteria 1 to 9, in order.
pub fn judge(first: &Run, second: &Run) -> Vec<Vec<String>> {
    vec![
        criterion_1(first),
        criterion_2(first),
        criterion_3(first),
        criterion_4(first),
        criterion_5(first),
        criterion_6(first),
        criterion_7(first),
        criterion_8(first),
        criterion_9(first, second),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_with(checks: Value, exit: u8) -> Run {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path();
        let report = serde_json::json!({ "reports": checks });
        fs::write(dir.join("report.json"), serde_json::to_vec(&report).unwrap()).unwrap();
        fs::write(
            dir.join("metadata.json"),
            r#"{"suite_secs": {"correctness": 0.5}, "check_secs": {}}"#,
        )
        .unwrap();
        Run::load(dir, exit).unwrap()
    }

    #[test]
    fn missing_and_failing_checks_are_reported() {
        let checks = serde_json::json!([{
            "check": "correctness.clifford",
            "params": {"n": "1", "d": "2"},
            "measured": 0.5, "expected": 0.0, "tolerance": 1e-9, "samples": 50, "pass": false
        }]);
        let run = run_with(checks, 1);
        let problems = criterion_1(&run);
        assert!(problems.iter().any(|p| p.starts_with("correctness.clifford failed")));
        assert!(problems.iter().any(|p| p == "correctness.trap missing"));
        assert!(!problems.iter().any(|p| p.contains("runtime")));
    }

    #[test]
    fn reproducibility_compares_bytes_and_exit_codes() {
        let ok = serde_json::json!([{ "check": "a", "pass": true }]);
        let a = run_with(ok.clone(), 0);
        let b = run_with(ok, 0);
        assert!(criterion_9(&a, &b).is_empty());
        let c = run_with(serde_json::json!([{ "check": "a", "pass": false }]), 0);
        let problems = criterion_9(&a, &c);
        assert_eq!(problems.len(), 1);
        assert!(criterion_9(&c, &c).iter().any(|p| p.contains("does not match")));
    }
}
