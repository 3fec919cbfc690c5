//! Invariants of a curve germ at the origin computed from parametrizations
//! of its branches.
//!
//! The delta invariant is `dim n_*O / O`, where `n_*O = ⊕ Q[[u_i]]` is the
//! normalization. We truncate every branch at `u_i^J`, span the image of
//! `O` inside that finite-dimensional space, and certify the truncation is
//! harmless by checking that a conductor-sized tail `u_i^j` already lies in
//! the image.

use std::collections::{BTreeMap, HashMap};

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::gb::Ideal;
use crate::localdim::{epsilon_from_decomposition, LocalDimError, PrimaryDecomposition};
use crate::poly::{PolyError, Polynomial, Rational, Ring};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    LocalDim(#[from] LocalDimError),
    #[error("branch `{0}` is identically zero")]
    ZeroBranch(String),
    #[error("branch `{0}` does not pass through the origin")]
    NotThroughOrigin(String),
    #[error("branch `{0}` must be written in a single variable")]
    BadBranchRing(String),
    #[error("branch `{label}` has {got} coordinates, expected {expected}")]
    DimensionMismatch {
        label: String,
        expected: usize,
        got: usize,
    },
    #[error("curve has no branches")]
    NoBranches,
    #[error("branches `{0}` and `{1}` have identical jets")]
    IndistinguishableBranches(String, String),
    #[error(
        "delta did not stabilize within jet order {jet_order} and degree bound {degree_bound}"
    )]
    NoStabilization {
        jet_order: usize,
        degree_bound: usize,
    },
    #[error("jet order and degree bound must be at least 1")]
    BadOptions,
    #[error("branch `{0}` is not monomial")]
    NotMonomial(String),
    #[error("exponents of branch `{label}` have gcd {gcd}")]
    GcdNotOne { label: String, gcd: u32 },
    #[error("an ideal needs a primary decomposition to determine epsilon")]
    MissingDecomposition,
    #[error("decomposition does not belong to the given ideal")]
    DecompositionMismatch,
    #[error("{0}")]
    BranchNotOnCurve(String),
}

/// One branch `u ↦ (n_1(u), …, n_N(u))` with every `n_k(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchParam {
    label: String,
    components: Vec<Polynomial>,
}

impl BranchParam {
    pub fn new(label: impl Into<String>, components: Vec<Polynomial>) -> Result<Self, CurveError> {
        let label = label.into();
        if components.is_empty() || components.iter().all(Polynomial::is_zero) {
            return Err(CurveError::ZeroBranch(label));
        }
        let ring = components[0].ring().clone();
        if ring.len() != 1 || components.iter().any(|c| c.ring() != &ring) {
            return Err(CurveError::BadBranchRing(label));
        }
        if components.iter().any(|c| !c.constant_term().is_zero()) {
            return Err(CurveError::NotThroughOrigin(label));
        }
        Ok(BranchParam { label, components })
    }

    /// Parses each coordinate as a polynomial in `ring`, which must have
    /// exactly one variable.
    pub fn parse<S: AsRef<str>>(
        label: impl Into<String>,
        ring: &Ring,
        coords: &[S],
    ) -> Result<Self, CurveError> {
        let comps = coords
            .iter()
            .map(|s| crate::poly::parse_poly(s.as_ref(), ring))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(label, comps)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn components(&self) -> &[Polynomial] {
        &self.components
    }

    pub fn ring(&self) -> &Ring {
        self.components[0].ring()
    }

    pub fn dim(&self) -> usize {
        self.components.len()
    }

    /// Coefficients of `u^e`, `e < order`, for coordinate `k`.
    fn jet(&self, k: usize, order: usize) -> Vec<(usize, Rational)> {
        self.components[k]
            .terms()
            .map(|(m, c)| (m.exp(0) as usize, c.clone()))
            .filter(|(e, _)| *e < order)
            .collect()
    }
}

/// Lowest `u`-order over the coordinates.
pub fn branch_multiplicity(b: &BranchParam) -> Result<u32, CurveError> {
    b.components
        .iter()
        .filter_map(|c| c.min_exponent_in(0))
        .min()
        .ok_or_else(|| CurveError::ZeroBranch(b.label.clone()))
}

/// A reduced curve given by its branches, optionally with the ideal of a
/// non-reduced structure on it and that ideal's primary decomposition.
#[derive(Debug, Clone)]
pub struct CurvePresentation {
    branches: Vec<BranchParam>,
    ideal: Option<Ideal>,
    decomposition: Option<PrimaryDecomposition>,
}

impl CurvePresentation {
    pub fn new(
        branches: Vec<BranchParam>,
        ideal: Option<Ideal>,
        decomposition: Option<PrimaryDecomposition>,
    ) -> Result<Self, CurveError> {
        let Some(first) = branches.first() else {
            return Err(CurveError::NoBranches);
        };
        let n = first.dim();
        for b in &branches {
            if b.dim() != n {
                return Err(CurveError::DimensionMismatch {
                    label: b.label.clone(),
                    expected: n,
                    got: b.dim(),
                });
            }
        }
        match (&ideal, &decomposition) {
            (None, Some(_)) => return Err(CurveError::DecompositionMismatch),
            (Some(i), Some(d)) if d.target() != i => return Err(CurveError::DecompositionMismatch),
            (Some(_), None) => return Err(CurveError::MissingDecomposition),
            _ => {}
        }
        if let (Some(i), Some(d)) = (&ideal, &decomposition) {
            check_branches_on_curve(&branches, i, d)?;
        }
        Ok(CurvePresentation {
            branches,
            ideal,
            decomposition,
        })
    }

    pub fn reduced(branches: Vec<BranchParam>) -> Result<Self, CurveError> {
        Self::new(branches, None, None)
    }

    pub fn branches(&self) -> &[BranchParam] {
        &self.branches
    }

    pub fn ideal(&self) -> Option<&Ideal> {
        self.ideal.as_ref()
    }

    pub fn decomposition(&self) -> Option<&PrimaryDecomposition> {
        self.decomposition.as_ref()
    }
}

fn vanishes_on(ideal: &Ideal, b: &BranchParam) -> Result<bool, CurveError> {
    if ideal.ring().len() != b.dim() {
        return Err(CurveError::DimensionMismatch {
            label: b.label.clone(),
            expected: ideal.ring().len(),
            got: b.dim(),
        });
    }
    for g in ideal.gens() {
        if !g.compose(b.ring(), &b.components)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Every branch lies on the ideal and on some minimal prime, and every
/// minimal prime carries a branch.
fn check_branches_on_curve(
    branches: &[BranchParam],
    ideal: &Ideal,
    dec: &PrimaryDecomposition,
) -> Result<(), CurveError> {
    let mut used = vec![false; dec.primes().len()];
    for b in branches {
        if !vanishes_on(ideal, b)? {
            return Err(CurveError::BranchNotOnCurve(format!(
                "branch `{}` does not satisfy the ideal",
                b.label
            )));
        }
        let mut found = false;
        for (j, p) in dec.primes().iter().enumerate() {
            if vanishes_on(p, b)? {
                used[j] = true;
                found = true;
            }
        }
        if !found {
            return Err(CurveError::BranchNotOnCurve(format!(
                "branch `{}` lies on no minimal prime",
                b.label
            )));
        }
    }
    if let Some(j) = used.iter().position(|u| !u) {
        return Err(CurveError::BranchNotOnCurve(format!(
            "minimal prime {} contains no branch",
            j + 1
        )));
    }
    Ok(())
}

/// Multiplicity of the reduced curve: the sum over branches.
pub fn curve_multiplicity(c: &CurvePresentation) -> Result<u32, CurveError> {
    c.branches.iter().map(branch_multiplicity).sum()
}

/// Starting truncation and the caps on escalation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct JetOptions {
    pub jet_order: usize,
    pub degree_bound: usize,
    pub jet_cap: usize,
    pub degree_cap: usize,
}

impl Default for JetOptions {
    fn default() -> Self {
        JetOptions {
            jet_order: 24,
            degree_bound: 12,
            jet_cap: 64,
            degree_cap: 32,
        }
    }
}

/// A delta value together with the truncation that certified it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeltaCertificate {
    pub delta: u64,
    /// effective truncation order actually used
    pub jet_order: usize,
    pub degree_bound: usize,
    /// every `u_i^j` with `j >= conductor_bound` was found in the image
    pub conductor_bound: usize,
}

type SparseVec = BTreeMap<usize, Rational>;

/// Row space kept in semi-echelon form: each row is keyed by its lowest
/// index and has coefficient one there.
#[derive(Default)]
struct Echelon {
    rows: HashMap<usize, Vec<(usize, Rational)>>,
}

impl Echelon {
    fn reduce(&self, mut v: SparseVec) -> SparseVec {
        let mut cursor = 0;
        while let Some((&idx, c)) = v.range(cursor..).next() {
            if let Some(row) = self.rows.get(&idx) {
                let c = c.clone();
                for (j, rc) in row {
                    let e = v.entry(*j).or_insert_with(Rational::zero);
                    *e -= &c * rc;
                    if e.is_zero() {
                        v.remove(j);
                    }
                }
            }
            cursor = idx + 1;
        }
        v
    }

    /// Adds `v` if it is independent; returns the reduced vector then.
    fn insert(&mut self, v: SparseVec) -> Option<SparseVec> {
        let r = self.reduce(v);
        let (&pivot, c) = r.iter().next()?;
        let inv = c.recip();
        let row: Vec<(usize, Rational)> = r.iter().map(|(j, x)| (*j, x * &inv)).collect();
        self.rows.insert(pivot, row);
        Some(r)
    }

    fn contains(&self, v: SparseVec) -> bool {
        self.reduce(v).is_empty()
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }
}

struct Level {
    candidate: u64,
    certified: bool,
    conductor_bound: usize,
}

/// Monomials of degree above `degree` vanish modulo `u^(degree+1)` on every
/// branch, so truncating at `min(jet, degree + 1)` makes the span exact.
fn effective_jet(jet: usize, degree: usize) -> usize {
    jet.min(degree + 1)
}

fn analyze_level(branches: &[BranchParam], jet: usize, degree: usize) -> Level {
    let jet = effective_jet(jet, degree);
    let r = branches.len();
    let n = branches[0].dim();
    // jets[k][i]: coordinate k restricted to branch i
    let jets: Vec<Vec<Vec<(usize, Rational)>>> = (0..n)
        .map(|k| branches.iter().map(|b| b.jet(k, jet)).collect())
        .collect();
    let mul = |v: &SparseVec, k: usize| -> SparseVec {
        let mut out = SparseVec::new();
        for (idx, c) in v {
            let (i, e) = (idx / jet, idx % jet);
            for (ex, cx) in &jets[k][i] {
                if e + ex < jet {
                    let slot = out.entry(i * jet + e + ex).or_insert_with(Rational::zero);
                    *slot += c * cx;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    };

    let mut space = Echelon::default();
    let one: SparseVec = (0..r).map(|i| (i * jet, Rational::one())).collect();
    let mut layer = vec![space.insert(one).expect("nonzero")];
    for _ in 0..degree {
        let mut next = Vec::new();
        for v in &layer {
            for k in 0..n {
                if let Some(w) = space.insert(mul(v, k)) {
                    next.push(w);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }

    let candidate = (r * jet - space.rank()) as u64;
    let c = 2 * candidate as usize + 1;
    let m_max = branches
        .iter()
        .map(|b| branch_multiplicity(b).expect("validated") as usize)
        .max()
        .unwrap_or(1);
    let mut certified = jet >= c + m_max;
    if certified {
        'outer: for i in 0..r {
            for j in c..jet {
                if !space.contains(SparseVec::from([(i * jet + j, Rational::one())])) {
                    certified = false;
                    break 'outer;
                }
            }
        }
    }
    Level {
        candidate,
        certified,
        conductor_bound: c,
    }
}

fn check_distinct(branches: &[BranchParam], jet: usize) -> Result<(), CurveError> {
    for (a, ba) in branches.iter().enumerate() {
        for bb in &branches[a + 1..] {
            if (0..ba.dim()).all(|k| ba.jet(k, jet) == bb.jet(k, jet)) {
                return Err(CurveError::IndistinguishableBranches(
                    ba.label.clone(),
                    bb.label.clone(),
                ));
            }
        }
    }
    Ok(())
}

/// Delta of the reduced curve with the truncation that certified it.
///
/// Truncation levels double from the starting options until two
/// consecutive levels agree and the later one passes the conductor check.
pub fn delta_reduced_certified(
    branches: &[BranchParam],
    opts: &JetOptions,
) -> Result<DeltaCertificate, CurveError> {
    if branches.is_empty() {
        return Err(CurveError::NoBranches);
    }
    if opts.jet_order == 0 || opts.degree_bound == 0 {
        return Err(CurveError::BadOptions);
    }
    let n = branches[0].dim();
    for b in branches {
        if b.dim() != n {
            return Err(CurveError::DimensionMismatch {
                label: b.label.clone(),
                expected: n,
                got: b.dim(),
            });
        }
    }
    let mut jet = opts.jet_order.min(opts.jet_cap.max(1));
    let mut degree = opts.degree_bound.min(opts.degree_cap.max(1));
    check_distinct(branches, jet)?;
    let mut prev: Option<u64> = None;
    loop {
        let level = analyze_level(branches, jet, degree);
        if prev == Some(level.candidate) && level.certified {
            return Ok(DeltaCertificate {
                delta: level.candidate,
                jet_order: effective_jet(jet, degree),
                degree_bound: degree,
                conductor_bound: level.conductor_bound,
            });
        }
        prev = Some(level.candidate);
        let next = (
            (jet * 2).min(opts.jet_cap),
            (degree * 2).min(opts.degree_cap),
        );
        if next.0 <= jet && next.1 <= degree {
            return Err(CurveError::NoStabilization {
                jet_order: jet,
                degree_bound: degree,
            });
        }
        (jet, degree) = (next.0.max(jet), next.1.max(degree));
    }
}

pub fn delta_reduced(branches: &[BranchParam], opts: &JetOptions) -> Result<u64, CurveError> {
    Ok(delta_reduced_certified(branches, opts)?.delta)
}

/// Exponents of a branch whose nonzero coordinates are single monomials.
pub fn monomial_exponents(b: &BranchParam) -> Result<Vec<u32>, CurveError> {
    let mut out = Vec::new();
    for c in &b.components {
        if c.is_zero() {
            continue;
        }
        let (m, _) = c
            .as_single_term()
            .ok_or_else(|| CurveError::NotMonomial(b.label.clone()))?;
        out.push(m.exp(0));
    }
    Ok(out)
}

/// Number of gaps of the numerical semigroup generated by `gens`, which
/// must have gcd one.
pub fn semigroup_gaps(gens: &[u32]) -> Option<u64> {
    let g = gens.iter().fold(0u32, |acc, &x| acc.gcd(&x));
    if g != 1 {
        return None;
    }
    let a = *gens.iter().filter(|&&x| x > 0).min()? as usize;
    let mut member = vec![true];
    let mut run = 1usize;
    let mut gaps = 0u64;
    while run < a {
        let n = member.len();
        let inside = gens
            .iter()
            .any(|&x| x as usize <= n && x > 0 && member[n - x as usize]);
        member.push(inside);
        if inside {
            run += 1;
        } else {
            run = 0;
            gaps += 1;
        }
    }
    Some(gaps)
}

/// Gap count of the semigroup of a monomial branch, computed independently
/// of the jet machinery.
pub fn semigroup_delta_oracle(b: &BranchParam) -> Result<u64, CurveError> {
    let exps = monomial_exponents(b)?;
    let gcd = exps.iter().fold(0u32, |acc, &x| acc.gcd(&x));
    semigroup_gaps(&exps).ok_or(CurveError::GcdNotOne {
        label: b.label.clone(),
        gcd,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CurveInvariants {
    pub m: u32,
    pub r: u32,
    pub delta_red: u64,
    pub epsilon: u64,
    pub delta: i64,
    pub mu_red: i64,
    pub mu: i64,
}

impl CurveInvariants {
    /// Fills in the derived values from the primary ones.
    pub fn from_parts(m: u32, r: u32, delta_red: u64, epsilon: u64) -> Self {
        let mu_red = 2 * delta_red as i64 - r as i64 + 1;
        CurveInvariants {
            m,
            r,
            delta_red,
            epsilon,
            delta: delta_red as i64 - epsilon as i64,
            mu_red,
            mu: mu_red - 2 * epsilon as i64,
        }
    }
}

/// Epsilon of the presentation: zero when no ideal is attached.
pub fn curve_epsilon(c: &CurvePresentation) -> Result<u64, CurveError> {
    match (&c.ideal, &c.decomposition) {
        (Some(i), Some(d)) => Ok(epsilon_from_decomposition(i, d)?),
        (None, None) => Ok(0),
        _ => Err(CurveError::MissingDecomposition),
    }
}

pub fn invariants(c: &CurvePresentation, opts: &JetOptions) -> Result<CurveInvariants, CurveError> {
    let m = curve_multiplicity(c)?;
    let delta_red = delta_reduced(&c.branches, opts)?;
    let epsilon = curve_epsilon(c)?;
    Ok(CurveInvariants::from_parts(
        m,
        c.branches.len() as u32,
        delta_red,
        epsilon,
    ))
}
