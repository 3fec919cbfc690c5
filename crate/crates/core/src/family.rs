//! One-parameter families of curves `X → T` with a section `σ(t) = (0, …, 0, t)`.
//!
//! A family is a union of surface components, each the image of
//! `(u, t) ↦ (n_1(u,t), …, n_N(u,t), t)`. Components containing the whole
//! section are class A; those meeting it only at the origin are class B.
//! For class A components the pullback ideal `J = <n_1, …, n_N>` in the
//! local ring at `(u, t) = (0, 0)` carries the multiplicities of the special
//! and the generic fibre along the section.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curveinv::{
    branch_multiplicity, curve_multiplicity, delta_reduced_certified, semigroup_gaps, BranchParam,
    CurveError, CurveInvariants, CurvePresentation, DeltaCertificate, JetOptions,
};
use crate::gb::{ideal_equal, ideal_intersect, std_basis, GbError, Ideal};
use crate::localdim::{
    check_radical_is_var, epsilon_from_decomposition, is_cohen_macaulay, vdim, LocalDimError,
    PrimaryDecomposition,
};
use crate::poly::{format_rational, MonomialOrder, PolyError, Polynomial, Rational, Ring, VarSet};

/// Broad class of a failure, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Computation,
    Hypothesis,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Gb(#[from] GbError),
    #[error(transparent)]
    LocalDim(#[from] LocalDimError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("invalid family: {0}")]
    Input(String),
    #[error("outside the standing hypotheses: {0}")]
    Hypothesis(String),
    #[error("non-generic sample: {0}")]
    NonGenericSample(String),
    #[error("generic samples disagree: {0}")]
    SampleDisagreement(String),
    #[error("epsilon of the special fibre cannot be determined: {0}")]
    EpsilonUnavailable(String),
    #[error(
        "epsilon routes disagree: decomposition gives {decomposition}, semigroups give {semigroup}"
    )]
    EpsilonMismatch { decomposition: u64, semigroup: u64 },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl FamilyError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            FamilyError::Poly(_) | FamilyError::Input(_) => ErrorKind::Input,
            FamilyError::Hypothesis(_) => ErrorKind::Hypothesis,
            FamilyError::LocalDim(LocalDimError::RadicalCheck { .. }) => ErrorKind::Hypothesis,
            FamilyError::LocalDim(LocalDimError::InvalidDecomposition(_))
            | FamilyError::Curve(
                CurveError::Poly(_)
                | CurveError::ZeroBranch(_)
                | CurveError::NotThroughOrigin(_)
                | CurveError::BadBranchRing(_)
                | CurveError::DimensionMismatch { .. }
                | CurveError::NoBranches
                | CurveError::BadOptions
                | CurveError::MissingDecomposition
                | CurveError::DecompositionMismatch
                | CurveError::BranchNotOnCurve(_),
            )
            | FamilyError::Curve(CurveError::LocalDim(LocalDimError::InvalidDecomposition(_))) => {
                ErrorKind::Input
            }
            _ => ErrorKind::Computation,
        }
    }
}

/// The ring `Q[u, t]` in which component parametrizations are written.
pub fn ut_ring() -> Ring {
    VarSet::new(&["u", "t"]).expect("two distinct names")
}

fn u_ring() -> Ring {
    VarSet::new(&["u"]).expect("one name")
}

const U: usize = 0;
const T: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ComponentClass {
    /// contains the whole section
    A,
    /// meets the section only at the origin
    B,
}

#[derive(Debug, Clone)]
pub struct FamilyComponent {
    label: String,
    param: Option<Vec<Polynomial>>,
    class: ComponentClass,
}

impl FamilyComponent {
    /// A component given by its parametrization in `u, t`; the class is
    /// read off `n(0, t)`.
    pub fn parametrized(
        label: impl Into<String>,
        param: Vec<Polynomial>,
    ) -> Result<Self, FamilyError> {
        let label = label.into();
        let ring = ut_ring();
        if param.is_empty() || param.iter().all(Polynomial::is_zero) {
            return Err(FamilyError::Input(format!(
                "component `{label}` is identically zero"
            )));
        }
        if param.iter().any(|p| p.ring() != &ring) {
            return Err(FamilyError::Input(format!(
                "component `{label}` must be written in u and t"
            )));
        }
        if param.iter().any(|p| !p.constant_term().is_zero()) {
            return Err(FamilyError::Input(format!(
                "component `{label}` does not pass through the origin"
            )));
        }
        let on_section = param
            .iter()
            .all(|p| p.substitute(U, &Rational::zero()).is_zero());
        let class = if on_section {
            ComponentClass::A
        } else {
            ComponentClass::B
        };
        Ok(FamilyComponent {
            label,
            param: Some(param),
            class,
        })
    }

    pub fn parse<S: AsRef<str>>(
        label: impl Into<String>,
        coords: &[S],
    ) -> Result<Self, FamilyError> {
        let ring = ut_ring();
        let param = coords
            .iter()
            .map(|s| crate::poly::parse_poly(s.as_ref(), &ring))
            .collect::<Result<Vec<_>, _>>()?;
        Self::parametrized(label, param)
    }

    /// A component known only by its class.
    pub fn declared(label: impl Into<String>, class: ComponentClass) -> Self {
        FamilyComponent {
            label: label.into(),
            param: None,
            class,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn class(&self) -> ComponentClass {
        self.class
    }

    pub fn param(&self) -> Option<&[Polynomial]> {
        self.param.as_deref()
    }

    /// Branch of the fibre over `t0` through `u = 0`.
    pub fn branch_at(&self, t0: &Rational) -> Result<BranchParam, FamilyError> {
        let param = self.require_param()?;
        let ring = u_ring();
        let comps = param
            .iter()
            .map(|p| p.substitute(T, t0).remap(&ring, &[Some(0), None]))
            .collect::<Result<Vec<_>, _>>()?;
        if comps.iter().all(Polynomial::is_zero) {
            return Err(FamilyError::Input(format!(
                "component `{}` has an identically zero fibre at t = {}",
                self.label,
                format_rational(t0)
            )));
        }
        Ok(BranchParam::new(self.label.clone(), comps)?)
    }

    fn require_param(&self) -> Result<&[Polynomial], FamilyError> {
        self.param.as_deref().ok_or_else(|| {
            FamilyError::Input(format!("component `{}` has no parametrization", self.label))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyMode {
    Parametrized,
    Declared,
}

/// Invariants of the generic fibre supplied as input rather than computed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GenericAssertions {
    pub mu: i64,
    pub m: u32,
    pub r: u32,
    pub delta: i64,
    pub epsilon: u64,
    pub reduced: bool,
    pub note: Option<String>,
}

impl GenericAssertions {
    fn invariants(&self) -> Result<CurveInvariants, FamilyError> {
        let delta_red = self.delta + self.epsilon as i64;
        if delta_red < 0 {
            return Err(FamilyError::Input("asserted delta is negative".into()));
        }
        let inv = CurveInvariants::from_parts(self.m, self.r, delta_red as u64, self.epsilon);
        if inv.mu != self.mu {
            return Err(FamilyError::Input(format!(
                "asserted generic data are inconsistent: mu = {} but 2*delta_red - r + 1 - 2*epsilon = {}",
                self.mu, inv.mu
            )));
        }
        if self.reduced && self.epsilon != 0 {
            return Err(FamilyError::Input(
                "asserted generic fibre is reduced but has epsilon > 0".into(),
            ));
        }
        Ok(inv)
    }
}

/// Ideal-theoretic data of the special fibre that a parametrization alone
/// does not give. In declared mode the branches are supplied too.
#[derive(Debug, Clone)]
pub struct SpecialFiber {
    pub branches: Vec<BranchParam>,
    pub ideal: Ideal,
    pub decomposition: PrimaryDecomposition,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FamilyOptions {
    pub jet: JetOptions,
    pub n_max: u32,
    pub seed: u64,
}

impl Default for FamilyOptions {
    fn default() -> Self {
        FamilyOptions {
            jet: JetOptions::default(),
            n_max: 32,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FamilyPresentation {
    ring: Ring,
    mode: FamilyMode,
    components: Vec<FamilyComponent>,
    special_fiber: Option<SpecialFiber>,
    generic: Option<GenericAssertions>,
}

impl FamilyPresentation {
    /// `ring` names the fibre coordinates `x_1, …, x_N`; `t` is implicit.
    pub fn new(
        ring: &Ring,
        mode: FamilyMode,
        components: Vec<FamilyComponent>,
        special_fiber: Option<SpecialFiber>,
        generic: Option<GenericAssertions>,
    ) -> Result<Self, FamilyError> {
        if components.is_empty() {
            return Err(FamilyError::Input("family has no components".into()));
        }
        for reserved in ["t", "elim_u"] {
            if ring.index_of(reserved).is_some() {
                return Err(FamilyError::Input(format!(
                    "`{reserved}` is reserved and cannot be a fibre coordinate"
                )));
            }
        }
        let mut seen = std::collections::HashSet::new();
        for c in &components {
            if !seen.insert(c.label.clone()) {
                return Err(FamilyError::Input(format!(
                    "duplicate component `{}`",
                    c.label
                )));
            }
        }
        match mode {
            FamilyMode::Parametrized => {
                for c in &components {
                    let p = c.require_param()?;
                    if p.len() != ring.len() {
                        return Err(FamilyError::Input(format!(
                            "component `{}` has {} coordinates, ring has {}",
                            c.label,
                            p.len(),
                            ring.len()
                        )));
                    }
                }
                if let Some(sf) = &special_fiber {
                    if !sf.branches.is_empty() {
                        return Err(FamilyError::Input(
                            "special fibre branches are derived from the parametrization".into(),
                        ));
                    }
                }
            }
            FamilyMode::Declared => {
                if generic.is_none() {
                    return Err(FamilyError::Input(
                        "declared mode needs generic fibre assertions".into(),
                    ));
                }
                match &special_fiber {
                    Some(sf) if !sf.branches.is_empty() => {}
                    _ => {
                        return Err(FamilyError::Input(
                            "declared mode needs special fibre branches".into(),
                        ))
                    }
                }
            }
        }
        if let Some(sf) = &special_fiber {
            if sf.ideal.ring() != ring {
                return Err(FamilyError::Input(
                    "special fibre ideal lives in another ring".into(),
                ));
            }
        }
        if let Some(g) = &generic {
            g.invariants()?;
        }
        Ok(FamilyPresentation {
            ring: ring.clone(),
            mode,
            components,
            special_fiber,
            generic,
        })
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn mode(&self) -> FamilyMode {
        self.mode
    }

    pub fn components(&self) -> &[FamilyComponent] {
        &self.components
    }

    pub fn special_fiber(&self) -> Option<&SpecialFiber> {
        self.special_fiber.as_ref()
    }

    pub fn generic_assertions(&self) -> Option<&GenericAssertions> {
        self.generic.as_ref()
    }

    /// The single-component family of component `j`, without overrides.
    pub fn component_family(&self, j: usize) -> Result<FamilyPresentation, FamilyError> {
        let c = self
            .components
            .get(j)
            .ok_or_else(|| FamilyError::Input(format!("no component {j}")))?;
        FamilyPresentation::new(
            &self.ring,
            FamilyMode::Parametrized,
            vec![c.clone()],
            None,
            None,
        )
    }

    fn class_a(&self) -> impl Iterator<Item = &FamilyComponent> {
        self.components
            .iter()
            .filter(|c| c.class == ComponentClass::A)
    }
}

/// `J = <n_1, …, n_N>` in `Q[u,t]`, certified to have radical `<u>` locally.
pub fn pullback_ideal(c: &FamilyComponent) -> Result<Ideal, FamilyError> {
    let param = c.require_param()?;
    let j = Ideal::new(&ut_ring(), param.to_vec())?;
    check_radical_is_var(&j, U)?;
    Ok(j)
}

/// `vdim(J + <t>)`, the multiplicity of the special fibre of the component.
pub fn special_multiplicity(j: &Ideal) -> Result<u64, FamilyError> {
    let t = Polynomial::var(j.ring(), T);
    vdim(&j.with([t])?)?
        .finite()
        .ok_or_else(|| FamilyError::Hypothesis("J + <t> has infinite colength".into()))
}

/// Multiplicity of the generic fibre along the section: the Hilbert–Samuel
/// multiplicity of `t` summed over the class A components.
pub fn generic_multiplicity(f: &FamilyPresentation, n_max: u32) -> Result<u64, FamilyError> {
    let mut total = 0;
    for c in f.class_a() {
        let j = pullback_ideal(c)?;
        total += crate::localdim::hs_multiplicity_of_param(&j, "t", n_max)?.value;
    }
    Ok(total)
}

/// The reduced fibre over `t0` at `σ(t0)`. The special fibre keeps every
/// component and picks up the ideal-theoretic override.
pub fn specialize_fiber(
    f: &FamilyPresentation,
    t0: &Rational,
) -> Result<CurvePresentation, FamilyError> {
    if f.mode != FamilyMode::Parametrized {
        return Err(FamilyError::Input(
            "fibres of a declared family are not derived".into(),
        ));
    }
    let special = t0.is_zero();
    let branches = f
        .components
        .iter()
        .filter(|c| special || c.class == ComponentClass::A)
        .map(|c| c.branch_at(t0))
        .collect::<Result<Vec<_>, _>>()?;
    match (special, &f.special_fiber) {
        (true, Some(sf)) => Ok(CurvePresentation::new(
            branches,
            Some(sf.ideal.clone()),
            Some(sf.decomposition.clone()),
        )?),
        _ => Ok(CurvePresentation::reduced(branches)?),
    }
}

/// Number of connected components of the generic fibre minus the section.
pub fn connectivity(f: &FamilyPresentation) -> u32 {
    let a = f.components.iter().any(|c| c.class == ComponentClass::A);
    let b = f
        .components
        .iter()
        .filter(|c| c.class == ComponentClass::B)
        .count();
    a as u32 + b as u32
}

/// Ideal of the image of one component in `Q[x_1, …, x_N, t]`, obtained by
/// eliminating `u` from `x_k - n_k(u, t)`.
fn component_image_ideal(c: &FamilyComponent, total: &Ring) -> Result<Ideal, FamilyError> {
    let param = c.require_param()?;
    let n = param.len();
    let mut names = vec!["elim_u".to_string()];
    names.extend(total.names().iter().cloned());
    let ext = VarSet::new(&names)?;
    let from_ut = [Some(0), Some(n + 1)];
    let gens = param
        .iter()
        .enumerate()
        .map(|(k, p)| Ok(&Polynomial::var(&ext, k + 1) - &p.remap(&ext, &from_ut)?))
        .collect::<Result<Vec<_>, PolyError>>()?;
    let gb = std_basis(
        &Ideal::new(&ext, gens)?,
        &MonomialOrder::Elimination { block: 1 },
    )?;
    let back: Vec<Option<usize>> = std::iter::once(None).chain((0..=n).map(Some)).collect();
    let kept = gb
        .basis()
        .iter()
        .filter(|g| g.degree_in(0) == 0)
        .map(|g| g.remap(total, &back))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Ideal::new(total, kept)?)
}

/// The ideal of the special fibre `X ∩ {t = 0}` computed from the
/// parametrizations: the image ideals of the components are intersected and
/// `t` is set to zero.
pub fn special_fiber_ideal(f: &FamilyPresentation) -> Result<Ideal, FamilyError> {
    if f.mode != FamilyMode::Parametrized {
        return Err(FamilyError::Input(
            "declared families have no parametrization".into(),
        ));
    }
    let mut names = f.ring.names().to_vec();
    names.push("t".into());
    let total = VarSet::new(&names)?;
    let mut ix = component_image_ideal(&f.components[0], &total)?;
    for c in &f.components[1..] {
        ix = ideal_intersect(&ix, &component_image_ideal(c, &total)?)?;
    }
    let t = f.ring.len();
    let down: Vec<Option<usize>> = (0..t).map(Some).chain(std::iter::once(None)).collect();
    let gens = ix
        .gens()
        .iter()
        .map(|g| g.substitute(t, &Rational::zero()).remap(&f.ring, &down))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Ideal::new(&f.ring, gens)?)
}

/// ε of the special fibre of a monomial one-component family.
///
/// With `A = O_X` spanned by the monomials `u^i t^j` of the image, the
/// nilradical of `A/tA` is `(A ∩ tQ[[u,t]])/tA`, which has one basis element
/// for every exponent in the semigroup of all `u`-exponents that is missing
/// from the semigroup of the `t`-free coordinates.
pub fn monomial_special_epsilon(f: &FamilyPresentation) -> Option<Result<u64, FamilyError>> {
    if f.components.len() != 1 || f.mode != FamilyMode::Parametrized {
        return None;
    }
    let c = &f.components[0];
    if c.class != ComponentClass::A {
        return None;
    }
    let mut free = Vec::new();
    let mut all = Vec::new();
    for p in c.param.as_ref()? {
        if p.is_zero() {
            continue;
        }
        let (m, _) = p.as_single_term()?;
        all.push(m.exp(U));
        if m.exp(T) == 0 {
            free.push(m.exp(U));
        }
    }
    let gf = free.iter().fold(0u32, |a, &x| a.gcd(&x));
    if gf != 1 {
        return Some(Err(FamilyError::Input(format!(
            "special fibre parametrization is not injective (exponent gcd {gf})"
        ))));
    }
    let g0 = semigroup_gaps(&free)?;
    let g1 = semigroup_gaps(&all)?;
    Some(Ok(g0 - g1))
}

/// Two distinct nonzero rationals with numerator and denominator below ten.
pub fn generic_samples(seed: u64) -> [Rational; 2] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let mut n: i64 = rng.gen_range(1..=9);
        if rng.gen_bool(0.5) {
            n = -n;
        }
        let d: i64 = rng.gen_range(1..=9);
        Rational::new(n.into(), d.into())
    };
    let a = draw(&mut rng);
    let mut b = draw(&mut rng);
    while b == a {
        b = draw(&mut rng);
    }
    [a, b]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Computed,
    Asserted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberInvariants {
    pub at: &'static str,
    pub provenance: Provenance,
    #[serde(flatten)]
    pub inv: CurveInvariants,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub t_samples_used: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_certificate: Option<DeltaCertificate>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentRecord {
    pub label: String,
    pub class: ComponentClass,
    /// pullback ideal and its lengths; class A components only
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pullback: Option<PullbackRecord>,
    pub special_branch_multiplicity: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PullbackRecord {
    pub ideal: Vec<String>,
    pub radical_power: u32,
    /// `vdim(J + <t>)`
    pub l: u64,
    /// Hilbert–Samuel multiplicity of `t` on `O/J`
    pub e: u64,
    pub hs_lengths: Vec<u64>,
    pub cohen_macaulay: bool,
    pub colon_equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CmRecord {
    pub label: String,
    pub cohen_macaulay: bool,
    pub l: u64,
    pub e: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Justification {
    pub claim: String,
    pub rule: &'static str,
    pub inputs: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub topologically_trivial: bool,
    pub whitney: bool,
    pub strong_simultaneous_resolution: bool,
    pub cm_by_component: Vec<CmRecord>,
    pub b0_generic_fiber: u32,
    pub justification: Vec<Justification>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Constancy {
    pub mu: bool,
    pub m: bool,
    pub delta: bool,
    pub r: bool,
}

/// Each criterion as evaluated; `None` where an input is unavailable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Criteria {
    pub trivial_by_mu_and_connectivity: bool,
    pub trivial_by_delta_and_branches: bool,
    pub whitney_by_mu_and_multiplicity: bool,
    pub whitney_by_cohen_macaulay: Option<bool>,
    pub multiplicity_constant_forces_connected: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Verified,
    Asserted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypothesisItem {
    pub item: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EpsilonRoutes {
    pub decomposition: Option<u64>,
    pub semigroup: Option<u64>,
}

/// Everything computed for one family.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyAnalysis {
    pub mode: FamilyMode,
    pub special: FiberInvariants,
    pub generic: FiberInvariants,
    pub special_epsilon_routes: EpsilonRoutes,
    pub components: Vec<ComponentRecord>,
    pub generic_multiplicity_along_section: Option<u64>,
    pub constancy: Constancy,
    pub criteria: Criteria,
    pub verdict: Verdict,
    pub hypotheses: Vec<HypothesisItem>,
}

fn inputs(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn special_epsilon(
    f: &FamilyPresentation,
    special: &CurvePresentation,
) -> Result<(u64, EpsilonRoutes), FamilyError> {
    let by_dec = match (special.ideal(), special.decomposition()) {
        (Some(i), Some(d)) => Some(epsilon_from_decomposition(i, d)?),
        _ => None,
    };
    let by_semigroup = monomial_special_epsilon(f).transpose()?;
    let routes = EpsilonRoutes {
        decomposition: by_dec,
        semigroup: by_semigroup,
    };
    match (by_dec, by_semigroup) {
        (Some(a), Some(b)) if a != b => Err(FamilyError::EpsilonMismatch {
            decomposition: a,
            semigroup: b,
        }),
        (Some(a), _) | (None, Some(a)) => Ok((a, routes)),
        (None, None) => Err(FamilyError::EpsilonUnavailable(
            "give the special fibre ideal with a primary decomposition".into(),
        )),
    }
}

fn curve_record(
    c: &CurvePresentation,
    epsilon: u64,
    opts: &JetOptions,
) -> Result<(CurveInvariants, DeltaCertificate), FamilyError> {
    let m = curve_multiplicity(c)?;
    let cert = delta_reduced_certified(c.branches(), opts)?;
    Ok((
        CurveInvariants::from_parts(m, c.branches().len() as u32, cert.delta, epsilon),
        cert,
    ))
}

/// Runs the whole pipeline and classifies the family.
pub fn analyze(
    f: &FamilyPresentation,
    opts: &FamilyOptions,
) -> Result<FamilyAnalysis, FamilyError> {
    let mut hypotheses = Vec::new();
    let mut trail = Vec::new();
    let b0 = connectivity(f);

    // standing hypothesis on the section, before anything expensive
    if f.mode == FamilyMode::Parametrized {
        for c in f.class_a() {
            pullback_ideal(c)?;
        }
    }
    if let (FamilyMode::Parametrized, Some(sf)) = (f.mode, &f.special_fiber) {
        let computed = special_fiber_ideal(f)?;
        if !ideal_equal(&computed, &sf.ideal, &crate::localdim::LOCAL)? {
            return Err(FamilyError::Input(format!(
                "special fibre ideal {} does not match the family, which gives {}",
                sf.ideal, computed
            )));
        }
        hypotheses.push(HypothesisItem {
            item: "special fibre ideal is the fibre of the parametrized family",
            status: CheckStatus::Verified,
            detail: "elimination of u, then t = 0, compared locally".into(),
        });
    }
    // special fibre
    let (special_curve, special_eps, eps_routes) = match f.mode {
        FamilyMode::Parametrized => {
            let curve = specialize_fiber(f, &Rational::zero())?;
            let (eps, routes) = special_epsilon(f, &curve)?;
            (curve, eps, routes)
        }
        FamilyMode::Declared => {
            let sf = f.special_fiber.as_ref().expect("validated");
            let curve = CurvePresentation::new(
                sf.branches.clone(),
                Some(sf.ideal.clone()),
                Some(sf.decomposition.clone()),
            )?;
            let eps = epsilon_from_decomposition(&sf.ideal, &sf.decomposition)?;
            let routes = EpsilonRoutes {
                decomposition: Some(eps),
                semigroup: None,
            };
            (curve, eps, routes)
        }
    };
    let (special_inv, special_cert) = curve_record(&special_curve, special_eps, &opts.jet)?;
    if special_curve.decomposition().is_some() {
        hypotheses.push(HypothesisItem {
            item: "special fibre primary decomposition",
            status: CheckStatus::Verified,
            detail: "containments and local equality of the intersection checked".into(),
        });
    }
    hypotheses.push(HypothesisItem {
        item: "special fibre branches pairwise distinct",
        status: CheckStatus::Verified,
        detail: format!("jets compared to order {}", special_cert.jet_order),
    });
    let special = FiberInvariants {
        at: "special",
        provenance: Provenance::Computed,
        inv: special_inv,
        t_samples_used: Vec::new(),
        delta_certificate: Some(special_cert),
    };

    // components and the pullback pipeline
    let mut components = Vec::new();
    let mut cm_by_component = Vec::new();
    let mut generic_m_along_section = None;
    if f.mode == FamilyMode::Parametrized {
        let mut e_total = 0u64;
        for c in &f.components {
            let special_branch = c.branch_at(&Rational::zero())?;
            let sm = branch_multiplicity(&special_branch)?;
            let pullback = if c.class == ComponentClass::A {
                let j = pullback_ideal(c)?;
                let k = check_radical_is_var(&j, U)?;
                let w = is_cohen_macaulay(&j, "t", opts.n_max)?;
                let hs = crate::localdim::hs_multiplicity_of_param(&j, "t", opts.n_max)?;
                if w.length != sm as u64 {
                    return Err(FamilyError::Internal(format!(
                        "component `{}`: colength of J + <t> is {} but the special branch has multiplicity {sm}",
                        c.label, w.length
                    )));
                }
                e_total += w.multiplicity;
                cm_by_component.push(CmRecord {
                    label: c.label.clone(),
                    cohen_macaulay: w.cohen_macaulay,
                    l: w.length,
                    e: w.multiplicity,
                });
                trail.push(Justification {
                    claim: format!(
                        "component `{}` is {}Cohen-Macaulay along the section",
                        c.label,
                        if w.cohen_macaulay { "" } else { "not " }
                    ),
                    rule: "cohen-macaulay/length-equals-multiplicity",
                    inputs: inputs(&[
                        ("l", w.length.to_string()),
                        ("e", w.multiplicity.to_string()),
                        ("colon_equal", w.colon_equal.to_string()),
                    ]),
                });
                Some(PullbackRecord {
                    ideal: j.gens().iter().map(|g| g.to_string()).collect(),
                    radical_power: k,
                    l: w.length,
                    e: w.multiplicity,
                    hs_lengths: hs.lengths,
                    cohen_macaulay: w.cohen_macaulay,
                    colon_equal: w.colon_equal,
                })
            } else {
                None
            };
            components.push(ComponentRecord {
                label: c.label.clone(),
                class: c.class,
                pullback,
                special_branch_multiplicity: Some(sm),
            });
        }
        generic_m_along_section = Some(e_total);
        hypotheses.push(HypothesisItem {
            item: "section is the preimage locus u = 0 of every class A component",
            status: CheckStatus::Verified,
            detail: "u^k in J and u divides every generator".into(),
        });
        hypotheses.push(HypothesisItem {
            item: "component classes",
            status: CheckStatus::Verified,
            detail: "read off n(0, t)".into(),
        });
    } else {
        for c in &f.components {
            components.push(ComponentRecord {
                label: c.label.clone(),
                class: c.class,
                pullback: None,
                special_branch_multiplicity: None,
            });
        }
        hypotheses.push(HypothesisItem {
            item: "component classes",
            status: CheckStatus::Asserted,
            detail: "declared in the manifest".into(),
        });
    }

    // generic fibre
    let generic = match f.mode {
        FamilyMode::Parametrized => {
            let eps = match &f.generic {
                Some(g) if !g.reduced => g.epsilon,
                _ => 0,
            };
            let samples = generic_samples(opts.seed);
            let mut records = Vec::new();
            for t0 in &samples {
                let curve = specialize_fiber(f, t0)?;
                for (b, c) in curve.branches().iter().zip(f.class_a()) {
                    let e = cm_by_component
                        .iter()
                        .find(|r| r.label == c.label)
                        .map(|r| r.e)
                        .expect("class A record");
                    if branch_multiplicity(b)? as u64 != e {
                        return Err(FamilyError::NonGenericSample(format!(
                            "component `{}` at t = {} has multiplicity {} but e = {e}",
                            c.label,
                            format_rational(t0),
                            branch_multiplicity(b)?
                        )));
                    }
                }
                records.push(curve_record(&curve, eps, &opts.jet)?);
            }
            if records[0].0 != records[1].0 {
                return Err(FamilyError::SampleDisagreement(format!(
                    "{:?} at t = {} versus {:?} at t = {}",
                    records[0].0,
                    format_rational(&samples[0]),
                    records[1].0,
                    format_rational(&samples[1])
                )));
            }
            let (inv, cert) = records.swap_remove(1);
            if let Some(g) = &f.generic {
                let asserted = g.invariants()?;
                if asserted != inv {
                    return Err(FamilyError::Input(format!(
                        "generic fibre assertions {asserted:?} contradict the computed {inv:?}"
                    )));
                }
            }
            hypotheses.push(HypothesisItem {
                item: "generic fibre invariants independent of the sample",
                status: CheckStatus::Verified,
                detail: format!(
                    "t = {} and t = {} agree",
                    format_rational(&samples[0]),
                    format_rational(&samples[1])
                ),
            });
            hypotheses.push(HypothesisItem {
                item: "generic fibre reduced",
                status: CheckStatus::Asserted,
                detail: match &f.generic {
                    Some(g) if !g.reduced => {
                        format!("declared non-reduced, epsilon = {}", g.epsilon)
                    }
                    _ => "epsilon of the generic fibre taken as 0".into(),
                },
            });
            FiberInvariants {
                at: "generic",
                provenance: Provenance::Computed,
                inv,
                t_samples_used: samples.iter().map(format_rational).collect(),
                delta_certificate: Some(cert),
            }
        }
        FamilyMode::Declared => {
            let g = f.generic.as_ref().expect("validated");
            hypotheses.push(HypothesisItem {
                item: "generic fibre invariants",
                status: CheckStatus::Asserted,
                detail: g
                    .note
                    .clone()
                    .unwrap_or_else(|| "declared in the manifest".into()),
            });
            FiberInvariants {
                at: "generic",
                provenance: Provenance::Asserted,
                inv: g.invariants()?,
                t_samples_used: Vec::new(),
                delta_certificate: None,
            }
        }
    };
    hypotheses.push(HypothesisItem {
        item: "family is reduced and equidimensional",
        status: CheckStatus::Asserted,
        detail: "not checked symbolically".into(),
    });
    hypotheses.push(HypothesisItem {
        item: "section and generic fibre off the section are smooth",
        status: CheckStatus::Asserted,
        detail: "not checked symbolically".into(),
    });

    let (s, g) = (&special.inv, &generic.inv);
    let constancy = Constancy {
        mu: s.mu == g.mu,
        m: s.m == g.m,
        delta: s.delta == g.delta,
        r: s.r == g.r,
    };

    let tt_mu = constancy.mu && b0 == 1;
    let tt_delta = constancy.delta && constancy.r;
    if tt_mu != tt_delta {
        return Err(FamilyError::Internal(format!(
            "triviality criteria disagree: mu/connectivity gives {tt_mu}, delta/branches gives {tt_delta}"
        )));
    }
    if constancy.m && b0 != 1 {
        return Err(FamilyError::Hypothesis(format!(
            "multiplicity is constant but the generic fibre has {b0} connected pieces"
        )));
    }
    let whitney_mu_m = constancy.mu && constancy.m;
    let all_cm = if f.mode == FamilyMode::Parametrized {
        Some(cm_by_component.iter().all(|r| r.cohen_macaulay))
    } else {
        None
    };
    let whitney_cm = match (tt_mu, all_cm) {
        (false, _) => Some(false),
        (true, cm) => cm,
    };
    if let Some(w) = whitney_cm {
        if w != whitney_mu_m {
            return Err(FamilyError::Internal(format!(
                "Whitney routes disagree: mu/m constancy gives {whitney_mu_m}, Cohen-Macaulay route gives {w}"
            )));
        }
    }
    if let Some(e) = generic_m_along_section {
        if e != g.m as u64 {
            return Err(FamilyError::Internal(format!(
                "generic multiplicity {e} from lengths differs from {} from branches",
                g.m
            )));
        }
    }
    let criteria = Criteria {
        trivial_by_mu_and_connectivity: tt_mu,
        trivial_by_delta_and_branches: tt_delta,
        whitney_by_mu_and_multiplicity: whitney_mu_m,
        whitney_by_cohen_macaulay: whitney_cm,
        multiplicity_constant_forces_connected: !constancy.m || b0 == 1,
    };

    trail.push(Justification {
        claim: format!("generic fibre has {b0} connected piece(s) off the section"),
        rule: "connectivity/component-classes",
        inputs: inputs(&[
            (
                "class_a",
                f.components
                    .iter()
                    .filter(|c| c.class == ComponentClass::A)
                    .count()
                    .to_string(),
            ),
            (
                "class_b",
                f.components
                    .iter()
                    .filter(|c| c.class == ComponentClass::B)
                    .count()
                    .to_string(),
            ),
        ]),
    });
    trail.push(Justification {
        claim: format!("topologically trivial: {tt_mu}"),
        rule: "topological-triviality/mu-constant-and-connected",
        inputs: inputs(&[
            ("mu_special", s.mu.to_string()),
            ("mu_generic", g.mu.to_string()),
            ("b0", b0.to_string()),
        ]),
    });
    trail.push(Justification {
        claim: format!("delta and branch count constant: {tt_delta}"),
        rule: "topological-triviality/delta-and-branches-constant",
        inputs: inputs(&[
            ("delta_special", s.delta.to_string()),
            ("delta_generic", g.delta.to_string()),
            ("r_special", s.r.to_string()),
            ("r_generic", g.r.to_string()),
        ]),
    });
    trail.push(Justification {
        claim: format!("Whitney equisingular: {whitney_mu_m}"),
        rule: "whitney/mu-and-multiplicity-constant",
        inputs: inputs(&[
            ("mu_constant", constancy.mu.to_string()),
            ("m_special", s.m.to_string()),
            ("m_generic", g.m.to_string()),
        ]),
    });
    trail.push(Justification {
        claim: match whitney_cm {
            Some(w) => format!("Whitney equisingular by the Cohen-Macaulay route: {w}"),
            None => "Cohen-Macaulay route unavailable without parametrizations".into(),
        },
        rule: "whitney/trivial-and-all-components-cohen-macaulay",
        inputs: inputs(&[
            ("topologically_trivial", tt_mu.to_string()),
            (
                "all_components_cm",
                all_cm.map_or_else(|| "unknown".into(), |b| b.to_string()),
            ),
        ]),
    });
    trail.push(Justification {
        claim: format!("strong simultaneous resolution: {whitney_mu_m}"),
        rule: "strong-simultaneous-resolution/equivalent-to-whitney",
        inputs: inputs(&[("whitney", whitney_mu_m.to_string())]),
    });
    if constancy.m {
        trail.push(Justification {
            claim: "constant multiplicity forces a connected generic fibre".into(),
            rule: "connectivity/multiplicity-constant",
            inputs: inputs(&[("b0", b0.to_string())]),
        });
    }

    let verdict = Verdict {
        topologically_trivial: tt_mu,
        whitney: whitney_mu_m,
        strong_simultaneous_resolution: whitney_mu_m,
        cm_by_component,
        b0_generic_fiber: b0,
        justification: trail,
    };
    debug_assert!(!verdict.whitney || verdict.topologically_trivial);
    Ok(FamilyAnalysis {
        mode: f.mode,
        special,
        generic,
        special_epsilon_routes: eps_routes,
        components,
        generic_multiplicity_along_section: generic_m_along_section,
        constancy,
        criteria,
        verdict,
        hypotheses,
    })
}

pub fn classify(f: &FamilyPresentation, opts: &FamilyOptions) -> Result<Verdict, FamilyError> {
    Ok(analyze(f, opts)?.verdict)
}
