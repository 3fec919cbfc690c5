//! Lengths of local quotient rings and the numbers derived from them.
//!
//! Everything here is computed at the origin: `vdim(I)` is the dimension of
//! `Q[x]_(x) / I` over the rationals, read off the leading ideal of a local
//! standard basis.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::gb::{
    ideal_equal, ideal_intersect, ideal_quotient, ideal_subset, ideal_sum, std_basis, GbError,
    Ideal,
};
use crate::poly::{Monomial, MonomialOrder, Polynomial, Ring};

pub const LOCAL: MonomialOrder = MonomialOrder::NegDegRevLex;

/// Highest power tried when certifying `u^k ∈ J`.
pub const RADICAL_POWER_CAP: u32 = 64;

/// Number of equal consecutive length differences that counts as stable.
const STABLE_RUN: usize = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalDimError {
    #[error(transparent)]
    Gb(#[from] GbError),
    #[error("invalid primary decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("decomposition was verified against a different ideal")]
    TargetMismatch,
    #[error("infinite length: {0}")]
    InfiniteLength(String),
    #[error("length differences did not stabilize up to n = {0}")]
    NoStabilization(u32),
    #[error("radical is not <{var}>: {reason}")]
    RadicalCheck { var: String, reason: String },
    #[error("`{0}` is not a parameter")]
    NotAParameter(String),
    #[error("ring must have exactly two variables including `{0}`")]
    BadRing(String),
    #[error(
        "Cohen-Macaulay tests disagree: length {length}, multiplicity {multiplicity}, \
         colon equal {colon_equal}"
    )]
    TestDisagreement {
        length: u64,
        multiplicity: u64,
        colon_equal: bool,
    },
}

/// A vector-space dimension that may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LengthValue {
    Finite(u64),
    Infinite,
}

impl LengthValue {
    pub fn finite(self) -> Option<u64> {
        match self {
            LengthValue::Finite(n) => Some(n),
            LengthValue::Infinite => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, LengthValue::Finite(_))
    }
}

impl fmt::Display for LengthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LengthValue::Finite(n) => write!(f, "{n}"),
            LengthValue::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for LengthValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            LengthValue::Finite(n) => s.serialize_u64(*n),
            LengthValue::Infinite => s.serialize_str("inf"),
        }
    }
}

/// Counts monomials outside the monomial ideal generated by `lead`.
pub fn count_standard_monomials(lead: &[Monomial], nvars: usize) -> LengthValue {
    if lead.iter().any(Monomial::is_one) {
        return LengthValue::Finite(0);
    }
    let mut bounds = vec![u32::MAX; nvars];
    for m in lead {
        if let Some(v) = m.pure_power_var() {
            bounds[v] = bounds[v].min(m.exp(v));
        }
    }
    if bounds.contains(&u32::MAX) {
        return LengthValue::Infinite;
    }
    if nvars == 0 {
        return LengthValue::Finite(1);
    }
    // odometer over the box [0, bounds)
    let mut e = vec![0u32; nvars];
    let mut count = 0u64;
    loop {
        let mono = Monomial::new(e.clone());
        if !lead.iter().any(|l| l.divides(&mono)) {
            count += 1;
        }
        let mut k = 0;
        loop {
            e[k] += 1;
            if e[k] < bounds[k] {
                break;
            }
            e[k] = 0;
            k += 1;
            if k == nvars {
                return LengthValue::Finite(count);
            }
        }
    }
}

/// `dim O/I·O` for the local ring `O` at the origin.
pub fn vdim(ideal: &Ideal) -> Result<LengthValue, LocalDimError> {
    let sb = std_basis(ideal, &LOCAL)?;
    Ok(count_standard_monomials(
        sb.lead_ideal(),
        ideal.ring().len(),
    ))
}

fn vdim_finite(ideal: &Ideal, what: &str) -> Result<u64, LocalDimError> {
    vdim(ideal)?
        .finite()
        .ok_or_else(|| LocalDimError::InfiniteLength(what.to_string()))
}

/// `I = P_1 ∩ … ∩ P_r ∩ Q`, checked by containment and local equality.
///
/// Primality of the `P_j` is taken on trust.
#[derive(Debug, Clone)]
pub struct PrimaryDecomposition {
    target: Ideal,
    primes: Vec<Ideal>,
    embedded: Option<Ideal>,
}

impl PrimaryDecomposition {
    pub fn new(
        target: &Ideal,
        primes: Vec<Ideal>,
        embedded: Option<Ideal>,
    ) -> Result<Self, LocalDimError> {
        let bad = |s: String| Err(LocalDimError::InvalidDecomposition(s));
        if primes.is_empty() {
            return bad("no minimal primes given".into());
        }
        for (j, p) in primes.iter().enumerate() {
            if p.ring() != target.ring() {
                return bad(format!("prime {} lives in another ring", j + 1));
            }
            if !ideal_subset(target, p, &LOCAL)? {
                return bad(format!("ideal is not contained in prime {}", j + 1));
            }
        }
        let mut meet = primes[0].clone();
        for p in &primes[1..] {
            meet = ideal_intersect(&meet, p)?;
        }
        if let Some(q) = &embedded {
            if q.ring() != target.ring() {
                return bad("embedded component lives in another ring".into());
            }
            if !ideal_subset(target, q, &LOCAL)? {
                return bad("ideal is not contained in the embedded component".into());
            }
            let sb = std_basis(q, &LOCAL)?;
            if sb.is_unit_ideal() || sb.corner_bound().is_none() {
                return bad("embedded component is not primary to the maximal ideal".into());
            }
            meet = ideal_intersect(&meet, q)?;
        }
        if !ideal_equal(&meet, target, &LOCAL)? {
            return bad("intersection of the components differs from the ideal".into());
        }
        Ok(PrimaryDecomposition {
            target: target.clone(),
            primes,
            embedded,
        })
    }

    pub fn target(&self) -> &Ideal {
        &self.target
    }

    pub fn primes(&self) -> &[Ideal] {
        &self.primes
    }

    pub fn embedded(&self) -> Option<&Ideal> {
        self.embedded.as_ref()
    }
}

/// `ε = vdim(Q) - vdim((P_1 ∩ … ∩ P_r) + Q)`, zero without an embedded
/// component.
pub fn epsilon_from_decomposition(
    ideal: &Ideal,
    dec: &PrimaryDecomposition,
) -> Result<u64, LocalDimError> {
    if ideal != &dec.target && !ideal_equal(ideal, &dec.target, &LOCAL)? {
        return Err(LocalDimError::TargetMismatch);
    }
    let Some(q) = &dec.embedded else {
        return Ok(0);
    };
    let mut meet = dec.primes[0].clone();
    for p in &dec.primes[1..] {
        meet = ideal_intersect(&meet, p)?;
    }
    let lq = vdim_finite(q, "embedded component")?;
    let lsum = vdim_finite(&ideal_sum(&meet, q)?, "(P_1 ∩ … ∩ P_r) + Q")?;
    Ok(lq - lsum)
}

fn split_ring(ring: &Ring, param: &str) -> Result<(usize, usize), LocalDimError> {
    let t = ring
        .index_of(param)
        .ok_or_else(|| LocalDimError::BadRing(param.to_string()))?;
    if ring.len() != 2 {
        return Err(LocalDimError::BadRing(param.to_string()));
    }
    Ok((1 - t, t))
}

/// Certifies `√J = <v>` in the local ring: some `v^k` (k ≤ 64) lies in `J`
/// and every generator is divisible by `v`.
pub fn check_radical_is_var(j: &Ideal, var: usize) -> Result<u32, LocalDimError> {
    let ring = j.ring();
    let name = ring.names()[var].clone();
    let fail = |reason: String| {
        Err(LocalDimError::RadicalCheck {
            var: name.clone(),
            reason,
        })
    };
    if j.is_zero() {
        return fail("zero ideal".into());
    }
    for g in j.gens() {
        if g.min_exponent_in(var).unwrap_or(0) == 0 {
            return fail(format!("generator {g} is not divisible by {name}"));
        }
    }
    let sb = std_basis(j, &LOCAL)?;
    for k in 1..=RADICAL_POWER_CAP {
        let vk = Polynomial::term(
            ring,
            Monomial::pure_power(ring.len(), var, k),
            num_traits::One::one(),
        );
        if sb.contains(&vk)? {
            return Ok(k);
        }
    }
    fail(format!(
        "no power {name}^k with k <= {RADICAL_POWER_CAP} lies in the ideal"
    ))
}

fn param_power(ring: &Ring, t: usize, n: u32) -> Polynomial {
    Polynomial::term(
        ring,
        Monomial::pure_power(ring.len(), t, n),
        num_traits::One::one(),
    )
}

/// Hilbert–Samuel multiplicity of the parameter ideal generated by `param`
/// in the one-dimensional ring `O_2 / J`, together with the lengths
/// `vdim(J + <t^n>)` that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HsMultiplicity {
    pub value: u64,
    pub lengths: Vec<u64>,
}

pub fn hs_multiplicity_of_param(
    j: &Ideal,
    param: &str,
    n_max: u32,
) -> Result<HsMultiplicity, LocalDimError> {
    let (u, t) = split_ring(j.ring(), param)?;
    check_radical_is_var(j, u)?;
    let mut lengths: Vec<u64> = Vec::new();
    for n in 1..=n_max {
        let jn = j.with([param_power(j.ring(), t, n)])?;
        let l = vdim(&jn)?
            .finite()
            .ok_or_else(|| LocalDimError::NotAParameter(param.to_string()))?;
        lengths.push(l);
        if lengths.len() > STABLE_RUN {
            let diffs: Vec<u64> = lengths[lengths.len() - STABLE_RUN - 1..]
                .windows(2)
                .map(|w| w[1] - w[0])
                .collect();
            if diffs.iter().all(|d| *d == diffs[0]) {
                if diffs[0] == 0 {
                    return Err(LocalDimError::NotAParameter(param.to_string()));
                }
                return Ok(HsMultiplicity {
                    value: diffs[0],
                    lengths,
                });
            }
        }
    }
    Err(LocalDimError::NoStabilization(n_max))
}

/// Outcome of the Cohen–Macaulay test on `O_2 / J` with parameter `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CmWitness {
    pub cohen_macaulay: bool,
    /// `vdim(J + <t>)`
    pub length: u64,
    /// `e((t), O_2/J)`
    pub multiplicity: u64,
    /// whether `(J : t) = J` locally
    pub colon_equal: bool,
}

/// Decides Cohen–Macaulayness by `length == multiplicity` and, separately,
/// by `t` being a nonzerodivisor. The two must agree.
pub fn is_cohen_macaulay(j: &Ideal, param: &str, n_max: u32) -> Result<CmWitness, LocalDimError> {
    let (_, t) = split_ring(j.ring(), param)?;
    let e = hs_multiplicity_of_param(j, param, n_max)?;
    let tp = param_power(j.ring(), t, 1);
    let length = vdim_finite(&j.with([tp.clone()])?, "J + <t>")?;
    let colon = ideal_quotient(j, &tp)?;
    let colon_equal = ideal_equal(&colon, j, &LOCAL)?;
    let by_length = length == e.value;
    if by_length != colon_equal {
        return Err(LocalDimError::TestDisagreement {
            length,
            multiplicity: e.value,
            colon_equal,
        });
    }
    Ok(CmWitness {
        cohen_macaulay: by_length,
        length,
        multiplicity: e.value,
        colon_equal,
    })
}
