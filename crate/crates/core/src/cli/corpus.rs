//! The built-in example corpus: manifests plus expected report values,
//! addressed by JSON pointers into each entry's report.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

use super::{run_manifest, CliError, Manifest, Report, RunConfig};

pub const MANIFESTS: &[&str] = &[
    include_str!("../../corpus/space_curves.json"),
    include_str!("../../corpus/five_lines.json"),
    include_str!("../../corpus/four_space.json"),
];

pub const EXPECTATIONS: &str = include_str!("../../corpus/expectations.json");

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Mismatch {
    pub path: String,
    pub expected: Value,
    pub computed: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusEntryOutcome {
    pub name: String,
    pub checks: usize,
    pub passed: bool,
    pub mismatches: Vec<Mismatch>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusOutcome {
    pub all_passed: bool,
    pub entries: Vec<CorpusEntryOutcome>,
}

impl CorpusOutcome {
    pub fn failures(&self) -> usize {
        self.entries.iter().filter(|e| !e.passed).count()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            if e.passed {
                let _ = writeln!(out, "PASS {} ({} checks)", e.name, e.checks);
            } else {
                let _ = writeln!(out, "FAIL {}", e.name);
                for m in &e.mismatches {
                    let computed = m
                        .computed
                        .as_ref()
                        .map_or_else(|| "missing".to_string(), Value::to_string);
                    let _ = writeln!(
                        out,
                        "  {}: expected {}, computed {computed}",
                        m.path, m.expected
                    );
                }
            }
        }
        let _ = writeln!(
            out,
            "{} of {} entries passed",
            self.entries.len() - self.failures(),
            self.entries.len()
        );
        out
    }
}

/// Runs `manifests` and compares every report against `expectations`, a
/// JSON object mapping entry names to `{pointer: value}` objects.
pub fn run_corpus(
    manifests: &[&str],
    expectations: &str,
    seed: Option<u64>,
) -> Result<(Report, CorpusOutcome), CliError> {
    let expected: BTreeMap<String, BTreeMap<String, Value>> =
        serde_json::from_str(expectations).map_err(|e| CliError::Schema(e.to_string()))?;
    let config = RunConfig {
        seed,
        timing: false,
    };
    let mut report = Report { entries: vec![] };
    for text in manifests {
        let m = Manifest::from_json(text)?;
        report.entries.extend(run_manifest(&m, &config)?.entries);
    }
    let mut outcomes = Vec::new();
    for e in &report.entries {
        let value = serde_json::to_value(e).expect("report serializes");
        let checks = expected.get(&e.name);
        let mismatches: Vec<Mismatch> = match checks {
            None => vec![Mismatch {
                path: String::new(),
                expected: Value::String("an expectation block".into()),
                computed: None,
            }],
            Some(checks) => checks
                .iter()
                .filter_map(|(path, want)| {
                    let got = value.pointer(path);
                    (got != Some(want)).then(|| Mismatch {
                        path: path.clone(),
                        expected: want.clone(),
                        computed: got.cloned(),
                    })
                })
                .collect(),
        };
        outcomes.push(CorpusEntryOutcome {
            name: e.name.clone(),
            checks: checks.map_or(0, BTreeMap::len),
            passed: mismatches.is_empty(),
            mismatches,
        });
    }
    for name in expected.keys() {
        if !report.entries.iter().any(|e| &e.name == name) {
            outcomes.push(CorpusEntryOutcome {
                name: name.clone(),
                checks: 0,
                passed: false,
                mismatches: vec![Mismatch {
                    path: String::new(),
                    expected: Value::String("a corpus entry".into()),
                    computed: None,
                }],
            });
        }
    }
    let all_passed = outcomes.iter().all(|o| o.passed);
    Ok((
        report,
        CorpusOutcome {
            all_passed,
            entries: outcomes,
        },
    ))
}

pub fn run_paper_corpus(seed: Option<u64>) -> Result<(Report, CorpusOutcome), CliError> {
    run_corpus(MANIFESTS, EXPECTATIONS, seed)
}

/// The JSON printed by the `corpus` command.
pub fn corpus_json(report: &Report, outcome: &CorpusOutcome) -> String {
    #[derive(Serialize)]
    struct Out<'a> {
        outcome: &'a CorpusOutcome,
        report: &'a Report,
    }
    serde_json::to_string_pretty(&Out { outcome, report }).expect("serializes") + "\n"
}
