use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use super::monomial::{degrevlex, revlex_tail};
use super::{Monomial, PolyError};

/// A monomial order on a fixed number of variables (first variable largest).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonomialOrder {
    /// Degree reverse lexicographic; a well-order.
    DegRevLex,
    /// Negative degree reverse lexicographic; `1 > x` for every variable.
    /// Realizes the localization at the origin.
    NegDegRevLex,
    /// Block order: the first `block` variables are eliminated. Monomials
    /// are compared by degrevlex on the block, then degrevlex on the rest.
    Elimination { block: usize },
}

impl MonomialOrder {
    pub fn is_local(&self) -> bool {
        matches!(self, MonomialOrder::NegDegRevLex)
    }

    pub fn is_global(&self) -> bool {
        !self.is_local()
    }

    /// Unchecked comparison; both monomials must have the same arity.
    pub fn cmp(&self, a: &Monomial, b: &Monomial) -> Ordering {
        match *self {
            MonomialOrder::DegRevLex => degrevlex(a, b),
            MonomialOrder::NegDegRevLex => b
                .degree()
                .cmp(&a.degree())
                .then_with(|| revlex_tail(a.exponents(), b.exponents())),
            MonomialOrder::Elimination { block } => {
                let (ab, ar) = a.exponents().split_at(block.min(a.len()));
                let (bb, br) = b.exponents().split_at(block.min(b.len()));
                let da: u32 = ab.iter().sum();
                let db: u32 = bb.iter().sum();
                da.cmp(&db)
                    .then_with(|| revlex_tail(ab, bb))
                    .then_with(|| {
                        let ra: u32 = ar.iter().sum();
                        let rb: u32 = br.iter().sum();
                        ra.cmp(&rb)
                    })
                    .then_with(|| revlex_tail(ar, br))
            }
        }
    }
}

/// Compares two monomials under `ord`, rejecting arity mismatches.
pub fn cmp_monomials(
    a: &Monomial,
    b: &Monomial,
    ord: &MonomialOrder,
) -> Result<Ordering, PolyError> {
    if a.len() != b.len() {
        return Err(PolyError::LengthMismatch(a.len(), b.len()));
    }
    Ok(ord.cmp(a, b))
}

impl fmt::Display for MonomialOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MonomialOrder::DegRevLex => write!(f, "degrevlex"),
            MonomialOrder::NegDegRevLex => write!(f, "negdegrevlex"),
            MonomialOrder::Elimination { block } => write!(f, "elimination:{block}"),
        }
    }
}

impl FromStr for MonomialOrder {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "degrevlex" | "dp" | "global" => Ok(MonomialOrder::DegRevLex),
            "negdegrevlex" | "ds" | "local" => Ok(MonomialOrder::NegDegRevLex),
            _ => {
                if let Some(k) = s.strip_prefix("elimination:") {
                    k.parse::<usize>()
                        .map(|block| MonomialOrder::Elimination { block })
                        .map_err(|e| format!("bad elimination block `{k}`: {e}"))
                } else {
                    Err(format!(
                        "unknown order `{s}` (expected degrevlex, negdegrevlex or elimination:<k>)"
                    ))
                }
            }
        }
    }
}
