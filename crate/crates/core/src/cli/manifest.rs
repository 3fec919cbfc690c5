//! Manifest schema and its translation into presentations.
//!
//! Every polynomial is parsed and every decomposition verified while
//! building, so a manifest that loads is fully checked before any
//! invariant is computed.

use serde::Deserialize;

use crate::curveinv::{BranchParam, CurvePresentation, JetOptions};
use crate::family::{
    ut_ring, ComponentClass, FamilyComponent, FamilyMode, FamilyOptions, FamilyPresentation,
    GenericAssertions, SpecialFiber,
};
use crate::gb::Ideal;
use crate::localdim::PrimaryDecomposition;
use crate::poly::{parse_poly, Ring, VarSet};

use super::CliError;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub ring: Vec<String>,
    #[serde(default)]
    pub entries: Vec<EntrySpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EntryKind {
    Curve,
    Family,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EntrySpec {
    pub name: String,
    pub kind: EntryKind,
    pub body: serde_json::Value,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsSpec {
    pub jet_order: Option<usize>,
    pub degree_bound: Option<usize>,
    pub jet_cap: Option<usize>,
    pub degree_cap: Option<usize>,
    pub n_max: Option<u32>,
    pub seed: Option<u64>,
}

/// A branch either as a bare coordinate list or with a label.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum BranchSpec {
    Plain(Vec<String>),
    Labeled(LabeledBranch),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabeledBranch {
    pub label: String,
    pub param: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionSpec {
    pub primes: Vec<Vec<String>>,
    #[serde(default)]
    pub embedded: Option<Vec<String>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveBody {
    pub branches: Vec<BranchSpec>,
    #[serde(default)]
    pub ideal: Option<Vec<String>>,
    #[serde(default)]
    pub decomposition: Option<DecompositionSpec>,
    #[serde(default)]
    pub options: OptionsSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ComponentSpec {
    Plain(Vec<String>),
    Full(FullComponent),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FullComponent {
    pub label: String,
    #[serde(default)]
    pub param: Option<Vec<String>>,
    #[serde(default)]
    pub class: Option<ComponentClass>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecialFiberSpec {
    #[serde(default)]
    pub branches: Vec<BranchSpec>,
    pub ideal: Vec<String>,
    pub decomposition: DecompositionSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AssertionSpec {
    pub mu: i64,
    pub m: u32,
    pub r: u32,
    pub delta: i64,
    #[serde(default)]
    pub epsilon: u64,
    #[serde(default = "yes")]
    pub reduced: bool,
    #[serde(default)]
    pub note: Option<String>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyBody {
    #[serde(default = "parametrized")]
    pub mode: FamilyMode,
    pub components: Vec<ComponentSpec>,
    #[serde(default)]
    pub special_fiber: Option<SpecialFiberSpec>,
    #[serde(default)]
    pub generic_fiber_assertions: Option<AssertionSpec>,
    #[serde(default)]
    pub options: OptionsSpec,
}

fn parametrized() -> FamilyMode {
    FamilyMode::Parametrized
}

/// A manifest entry ready to be analyzed.
#[derive(Debug, Clone)]
pub enum Entry {
    Curve {
        name: String,
        curve: CurvePresentation,
        options: FamilyOptions,
    },
    Family {
        name: String,
        family: FamilyPresentation,
        options: FamilyOptions,
    },
}

impl Entry {
    pub fn name(&self) -> &str {
        match self {
            Entry::Curve { name, .. } | Entry::Family { name, .. } => name,
        }
    }
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Parses and validates every entry. `seed` is used where an entry does
    /// not fix its own.
    pub fn build(&self, seed: Option<u64>) -> Result<Vec<Entry>, CliError> {
        let ring = VarSet::new(&self.ring).map_err(|e| CliError::Schema(e.to_string()))?;
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::with_capacity(self.entries.len());
        for spec in &self.entries {
            if !seen.insert(spec.name.clone()) {
                return Err(CliError::Schema(format!(
                    "duplicate entry name `{}`",
                    spec.name
                )));
            }
            let ctx = |e: CliError| e.in_entry(&spec.name);
            let entry = match spec.kind {
                EntryKind::Curve => {
                    let body: CurveBody = serde_json::from_value(spec.body.clone())
                        .map_err(|e| ctx(CliError::Schema(e.to_string())))?;
                    build_curve(&spec.name, &ring, &body, seed).map_err(ctx)?
                }
                EntryKind::Family => {
                    let body: FamilyBody = serde_json::from_value(spec.body.clone())
                        .map_err(|e| ctx(CliError::Schema(e.to_string())))?;
                    build_family(&spec.name, &ring, &body, seed).map_err(ctx)?
                }
            };
            out.push(entry);
        }
        Ok(out)
    }
}

fn options(spec: &OptionsSpec, seed: Option<u64>) -> FamilyOptions {
    let d = FamilyOptions::default();
    FamilyOptions {
        jet: JetOptions {
            jet_order: spec.jet_order.unwrap_or(d.jet.jet_order),
            degree_bound: spec.degree_bound.unwrap_or(d.jet.degree_bound),
            jet_cap: spec.jet_cap.unwrap_or(d.jet.jet_cap),
            degree_cap: spec.degree_cap.unwrap_or(d.jet.degree_cap),
        },
        n_max: spec.n_max.unwrap_or(d.n_max),
        seed: spec.seed.or(seed).unwrap_or(d.seed),
    }
}

fn ideal(ring: &Ring, gens: &[String]) -> Result<Ideal, CliError> {
    Ideal::parse(ring, gens).map_err(|e| CliError::Parse(e.to_string()))
}

fn decomposition(
    ring: &Ring,
    target: &Ideal,
    spec: &DecompositionSpec,
) -> Result<PrimaryDecomposition, CliError> {
    let primes = spec
        .primes
        .iter()
        .map(|p| ideal(ring, p))
        .collect::<Result<Vec<_>, _>>()?;
    let embedded = spec.embedded.as_ref().map(|q| ideal(ring, q)).transpose()?;
    PrimaryDecomposition::new(target, primes, embedded).map_err(|e| CliError::Parse(e.to_string()))
}

fn branches(specs: &[BranchSpec]) -> Result<Vec<BranchParam>, CliError> {
    let u = VarSet::new(&["u"]).expect("one name");
    specs
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let (label, coords) = match b {
                BranchSpec::Plain(c) => (format!("b{}", i + 1), c),
                BranchSpec::Labeled(l) => (l.label.clone(), &l.param),
            };
            BranchParam::parse(label, &u, coords).map_err(|e| CliError::Parse(e.to_string()))
        })
        .collect()
}

fn build_curve(
    name: &str,
    ring: &Ring,
    body: &CurveBody,
    seed: Option<u64>,
) -> Result<Entry, CliError> {
    let bs = branches(&body.branches)?;
    if let Some(b) = bs.iter().find(|b| b.dim() != ring.len()) {
        return Err(CliError::Parse(format!(
            "branch `{}` has {} coordinates, ring has {}",
            b.label(),
            b.dim(),
            ring.len()
        )));
    }
    let i = body.ideal.as_ref().map(|g| ideal(ring, g)).transpose()?;
    let d = match (&i, &body.decomposition) {
        (Some(i), Some(spec)) => Some(decomposition(ring, i, spec)?),
        (None, Some(_)) => {
            return Err(CliError::Schema("a decomposition needs an ideal".into()));
        }
        _ => None,
    };
    let curve = CurvePresentation::new(bs, i, d).map_err(|e| CliError::Parse(e.to_string()))?;
    Ok(Entry::Curve {
        name: name.to_string(),
        curve,
        options: options(&body.options, seed),
    })
}

fn build_family(
    name: &str,
    ring: &Ring,
    body: &FamilyBody,
    seed: Option<u64>,
) -> Result<Entry, CliError> {
    let ut = ut_ring();
    let mut components = Vec::new();
    for (i, spec) in body.components.iter().enumerate() {
        let default_label = format!("X{}", i + 1);
        let (label, param, class) = match spec {
            ComponentSpec::Plain(p) => (default_label, Some(p), None),
            ComponentSpec::Full(f) => (f.label.clone(), f.param.as_ref(), f.class),
        };
        let comp = match (body.mode, param) {
            (FamilyMode::Parametrized, Some(p)) => {
                for s in p {
                    parse_poly(s, &ut).map_err(|e| CliError::Parse(format!("`{s}`: {e}")))?;
                }
                let c = FamilyComponent::parse(label, p).map_err(CliError::from_family)?;
                if class.is_some_and(|k| k != c.class()) {
                    return Err(CliError::Parse(format!(
                        "component `{}` is declared class {:?} but its parametrization gives {:?}",
                        c.label(),
                        class.unwrap(),
                        c.class()
                    )));
                }
                c
            }
            (FamilyMode::Parametrized, None) => {
                return Err(CliError::Schema(format!(
                    "component `{label}` needs a parametrization"
                )));
            }
            (FamilyMode::Declared, _) => {
                let Some(k) = class else {
                    return Err(CliError::Schema(format!(
                        "declared component `{label}` needs a class"
                    )));
                };
                FamilyComponent::declared(label, k)
            }
        };
        components.push(comp);
    }
    let special = match &body.special_fiber {
        Some(sf) => {
            let i = ideal(ring, &sf.ideal)?;
            let d = decomposition(ring, &i, &sf.decomposition)?;
            Some(SpecialFiber {
                branches: branches(&sf.branches)?,
                ideal: i,
                decomposition: d,
            })
        }
        None => None,
    };
    let generic = body
        .generic_fiber_assertions
        .as_ref()
        .map(|a| GenericAssertions {
            mu: a.mu,
            m: a.m,
            r: a.r,
            delta: a.delta,
            epsilon: a.epsilon,
            reduced: a.reduced,
            note: a.note.clone(),
        });
    let family = FamilyPresentation::new(ring, body.mode, components, special, generic)
        .map_err(CliError::from_family)?;
    Ok(Entry::Family {
        name: name.to_string(),
        family,
        options: options(&body.options, seed),
    })
}
