//! Manifest runner, report emission, the built-in example corpus and the
//! standard-basis debugging command.

pub mod corpus;
pub mod manifest;
mod text;

use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curveinv::{
    curve_epsilon, curve_multiplicity, delta_reduced_certified, CurveInvariants, CurvePresentation,
    DeltaCertificate,
};
use crate::family::{
    analyze, CheckStatus, ErrorKind, FamilyAnalysis, FamilyError, FamilyOptions, HypothesisItem,
};
use crate::gb::{std_basis, Ideal};
use crate::poly::{MonomialOrder, VarSet};

pub use corpus::{run_corpus, run_paper_corpus, CorpusOutcome};
pub use manifest::{Entry, Manifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;
pub const EXIT_HYPOTHESIS: i32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CliError {
    #[error("I/O error: {0}")]
    Io(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("computation failed: {0}")]
    Computation(String),
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),
    #[error("corpus mismatch in {0} entr(y/ies)")]
    Mismatch(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) | CliError::Schema(_) | CliError::Parse(_) => EXIT_INPUT,
            CliError::Computation(_) => EXIT_COMPUTATION,
            CliError::Hypothesis(_) => EXIT_HYPOTHESIS,
            CliError::Mismatch(_) => EXIT_MISMATCH,
        }
    }

    pub(crate) fn from_family(e: FamilyError) -> Self {
        let msg = e.to_string();
        match e.kind() {
            ErrorKind::Input => CliError::Parse(msg),
            ErrorKind::Computation => CliError::Computation(msg),
            ErrorKind::Hypothesis => CliError::Hypothesis(msg),
        }
    }

    pub(crate) fn in_entry(self, name: &str) -> Self {
        let wrap = |m: String| format!("entry `{name}`: {m}");
        match self {
            CliError::Io(m) => CliError::Io(wrap(m)),
            CliError::Schema(m) => CliError::Schema(wrap(m)),
            CliError::Parse(m) => CliError::Parse(wrap(m)),
            CliError::Computation(m) => CliError::Computation(wrap(m)),
            CliError::Hypothesis(m) => CliError::Hypothesis(wrap(m)),
            other => other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(format!("unknown format `{s}` (expected json or text)")),
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunConfig {
    /// used by entries that do not fix their own seed
    pub seed: Option<u64>,
    /// adds wall-clock times, which makes the output non-reproducible
    pub timing: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveReport {
    pub invariants: CurveInvariants,
    pub delta_certificate: DeltaCertificate,
    pub epsilon_source: &'static str,
    pub hypotheses: Vec<HypothesisItem>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum EntryResult {
    Curve(CurveReport),
    Family(Box<FamilyAnalysis>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryReport {
    pub name: String,
    pub kind: &'static str,
    pub options: FamilyOptions,
    pub result: EntryResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<u128>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub entries: Vec<EntryReport>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        text::render(self)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.to_json(),
            Format::Text => self.to_text(),
        }
    }
}

fn analyze_curve(
    curve: &CurvePresentation,
    options: &FamilyOptions,
) -> Result<CurveReport, CliError> {
    let fam = |e: crate::curveinv::CurveError| CliError::from_family(FamilyError::Curve(e));
    let m = curve_multiplicity(curve).map_err(fam)?;
    let cert = delta_reduced_certified(curve.branches(), &options.jet).map_err(fam)?;
    let epsilon = curve_epsilon(curve).map_err(fam)?;
    let mut hypotheses = vec![HypothesisItem {
        item: "branches pairwise distinct",
        status: CheckStatus::Verified,
        detail: format!("jets compared to order {}", cert.jet_order),
    }];
    let source = if curve.decomposition().is_some() {
        hypotheses.push(HypothesisItem {
            item: "primary decomposition",
            status: CheckStatus::Verified,
            detail: "containments and local equality of the intersection checked".into(),
        });
        hypotheses.push(HypothesisItem {
            item: "listed primes are prime",
            status: CheckStatus::Asserted,
            detail: "primality is not tested".into(),
        });
        "decomposition"
    } else {
        hypotheses.push(HypothesisItem {
            item: "curve is reduced",
            status: CheckStatus::Asserted,
            detail: "no ideal given, epsilon taken as 0".into(),
        });
        "reduced"
    };
    Ok(CurveReport {
        invariants: CurveInvariants::from_parts(
            m,
            curve.branches().len() as u32,
            cert.delta,
            epsilon,
        ),
        delta_certificate: cert,
        epsilon_source: source,
        hypotheses,
    })
}

/// Analyzes one built entry.
pub fn analyze_entry(entry: &Entry, timing: bool) -> Result<EntryReport, CliError> {
    let start = Instant::now();
    let (name, kind, options, result) = match entry {
        Entry::Curve {
            name,
            curve,
            options,
        } => (
            name,
            "curve",
            *options,
            EntryResult::Curve(analyze_curve(curve, options).map_err(|e| e.in_entry(name))?),
        ),
        Entry::Family {
            name,
            family,
            options,
        } => (
            name,
            "family",
            *options,
            EntryResult::Family(Box::new(
                analyze(family, options)
                    .map_err(CliError::from_family)
                    .map_err(|e| e.in_entry(name))?,
            )),
        ),
    };
    Ok(EntryReport {
        name: name.clone(),
        kind,
        options,
        result,
        timing_ms: timing.then(|| start.elapsed().as_millis()),
    })
}

/// Builds and analyzes every entry of a manifest. Nothing is returned
/// unless every entry succeeds.
pub fn run_manifest(manifest: &Manifest, config: &RunConfig) -> Result<Report, CliError> {
    let entries = manifest.build(config.seed)?;
    let reports = entries
        .iter()
        .map(|e| analyze_entry(e, config.timing))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Report { entries: reports })
}

pub fn run(path: &Path, config: &RunConfig) -> Result<Report, CliError> {
    run_manifest(&Manifest::load(path)?, config)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StdInput {
    ring: Vec<String>,
    gens: Vec<String>,
}

/// Standard basis listing for the `std` command: the order, then one basis
/// element per line, largest leading monomial first.
pub fn debug_std(input_json: &str, order: &str) -> Result<String, CliError> {
    let input: StdInput =
        serde_json::from_str(input_json).map_err(|e| CliError::Schema(e.to_string()))?;
    let ord: MonomialOrder = order.parse().map_err(CliError::Schema)?;
    let ring = VarSet::new(&input.ring).map_err(|e| CliError::Schema(e.to_string()))?;
    let ideal = Ideal::parse(&ring, &input.gens).map_err(|e| CliError::Parse(e.to_string()))?;
    let sb = std_basis(&ideal, &ord).map_err(|e| CliError::Computation(e.to_string()))?;
    let mut out = format!("order: {ord}\n");
    for g in sb.basis() {
        out.push_str(&g.to_string());
        out.push('\n');
    }
    Ok(out)
}
