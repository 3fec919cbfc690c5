//! Gröbner bases for global orders, Mora standard bases for the local
//! order, and the ideal operations built on them.
//!
//! Intersections and quotients are computed in the polynomial ring with
//! global orders. Localization at the origin is flat, so the results can be
//! consumed by local-order computations unchanged.

mod engine;

use std::fmt;

use thiserror::Error;

use crate::poly::{
    parse_poly, same_ring, Monomial, MonomialOrder, PolyError, Polynomial, Ring, VarSet,
};

use engine::{
    compute_basis, full_reduce, highest_corner_bound, minimalize, mora_nf, tail_reduce, TermList,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GbError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("basis computation exceeded {0} reduction steps")]
    IterationCap(usize),
    #[error("ideal quotient by the zero polynomial")]
    ZeroDivisor,
    #[error("order {order} does not fit a ring with {nvars} variables")]
    OrderArity { order: MonomialOrder, nvars: usize },
}

/// A list of generators in a fixed ring. Zero generators are dropped; the
/// rest are stored exactly as given.
#[derive(Clone, PartialEq, Eq)]
pub struct Ideal {
    ring: Ring,
    gens: Vec<Polynomial>,
}

impl Ideal {
    pub fn new(ring: &Ring, gens: Vec<Polynomial>) -> Result<Self, GbError> {
        for g in &gens {
            same_ring(ring, g.ring())?;
        }
        Ok(Ideal {
            ring: ring.clone(),
            gens: gens.into_iter().filter(|g| !g.is_zero()).collect(),
        })
    }

    pub fn parse<S: AsRef<str>>(ring: &Ring, gens: &[S]) -> Result<Self, GbError> {
        let polys = gens
            .iter()
            .map(|s| parse_poly(s.as_ref(), ring))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(ring, polys)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn gens(&self) -> &[Polynomial] {
        &self.gens
    }

    pub fn is_zero(&self) -> bool {
        self.gens.is_empty()
    }

    /// Adds generators.
    pub fn with(&self, extra: impl IntoIterator<Item = Polynomial>) -> Result<Self, GbError> {
        let mut gens = self.gens.clone();
        gens.extend(extra);
        Ideal::new(&self.ring, gens)
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.gens.iter().map(|g| g.to_string()).collect();
        write!(f, "<{}>", parts.join(", "))
    }
}

impl fmt::Debug for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ideal({} in {})", self, self.ring)
    }
}

/// A minimal basis of an ideal under a fixed order.
///
/// Global bases are fully reduced. Local bases are tail-reduced when the
/// ideal is primary to the maximal ideal (all tails can then be truncated
/// exactly); otherwise only minimalized.
#[derive(Clone, Debug)]
pub struct StandardBasis {
    ideal: Ideal,
    order: MonomialOrder,
    basis: Vec<Polynomial>,
    lead_ideal: Vec<Monomial>,
    internal: Vec<TermList>,
    corner: Option<u32>,
}

impl StandardBasis {
    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn basis(&self) -> &[Polynomial] {
        &self.basis
    }

    /// Leading monomials of the basis, largest first.
    pub fn lead_ideal(&self) -> &[Monomial] {
        &self.lead_ideal
    }

    /// Degree from which every monomial lies in the leading ideal, when the
    /// leading ideal has a pure power of each variable.
    pub fn corner_bound(&self) -> Option<u32> {
        self.corner
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.lead_ideal.iter().any(Monomial::is_one)
    }

    pub fn contains(&self, f: &Polynomial) -> Result<bool, GbError> {
        Ok(normal_form(f, self)?.is_zero())
    }
}

fn check_order(ring: &Ring, ord: &MonomialOrder) -> Result<(), GbError> {
    if let MonomialOrder::Elimination { block } = ord {
        if *block > ring.len() {
            return Err(GbError::OrderArity {
                order: *ord,
                nvars: ring.len(),
            });
        }
    }
    Ok(())
}

/// Computes a Gröbner basis (global order) or a Mora standard basis (local
/// order) of `ideal`. Output is deterministic.
pub fn std_basis(ideal: &Ideal, ord: &MonomialOrder) -> Result<StandardBasis, GbError> {
    check_order(&ideal.ring, ord)?;
    let gens: Vec<TermList> = ideal
        .gens
        .iter()
        .map(|g| TermList::from_poly(g, ord))
        .collect();
    let raw = compute_basis(&gens, ord)?;
    let mut internal = minimalize(raw, ord);
    let lead: Vec<Monomial> = internal.iter().map(|g| g.lm().clone()).collect();
    let corner = highest_corner_bound(&lead, ideal.ring.len());
    if ord.is_global() {
        internal = tail_reduce(&internal, ord, None)?;
    } else if let Some(d) = corner {
        internal = tail_reduce(&internal, ord, Some(d))?;
    }
    let basis = internal.iter().map(|g| g.to_poly(&ideal.ring)).collect();
    Ok(StandardBasis {
        ideal: ideal.clone(),
        order: *ord,
        basis,
        lead_ideal: lead,
        internal,
        corner,
    })
}

/// Normal form of `f` with respect to `b`.
///
/// Zero iff `f` lies in the ideal (in the localization, for the local
/// order). The result is fully reduced for global orders and for local
/// bases of finite colength; otherwise only its leading term is
/// guaranteed standard.
pub fn normal_form(f: &Polynomial, b: &StandardBasis) -> Result<Polynomial, GbError> {
    same_ring(&b.ideal.ring, f.ring())?;
    let t = TermList::from_poly(f, &b.order);
    let r = if b.order.is_global() {
        full_reduce(&t, &b.internal, &b.order, None)?
    } else if let Some(d) = b.corner {
        full_reduce(&t, &b.internal, &b.order, Some(d))?
    } else {
        let mut budget = 0;
        mora_nf(&t, &b.internal, &b.order, &mut budget)?
    };
    Ok(r.to_poly(&b.ideal.ring))
}

pub fn ideal_contains(ideal: &Ideal, f: &Polynomial, ord: &MonomialOrder) -> Result<bool, GbError> {
    std_basis(ideal, ord)?.contains(f)
}

pub fn ideal_sum(a: &Ideal, b: &Ideal) -> Result<Ideal, GbError> {
    same_ring(&a.ring, &b.ring)?;
    a.with(b.gens.iter().cloned())
}

fn fresh_name(ring: &Ring) -> String {
    let mut name = "elim_w".to_string();
    let mut k = 0;
    while ring.index_of(&name).is_some() {
        k += 1;
        name = format!("elim_w{k}");
    }
    name
}

/// `a ∩ b` via one auxiliary variable `w`: eliminate `w` from
/// `w·a + (1 - w)·b`.
pub fn ideal_intersect(a: &Ideal, b: &Ideal) -> Result<Ideal, GbError> {
    same_ring(&a.ring, &b.ring)?;
    let ring = &a.ring;
    if a.is_zero() || b.is_zero() {
        return Ideal::new(ring, vec![]);
    }
    let mut names = vec![fresh_name(ring)];
    names.extend(ring.names().iter().cloned());
    let ext = VarSet::new(&names)?;
    let shift: Vec<Option<usize>> = (0..ring.len()).map(|i| Some(i + 1)).collect();
    let w = Polynomial::var(&ext, 0);
    let one_minus_w = &Polynomial::one(&ext) - &w;
    let mut gens = Vec::new();
    for g in &a.gens {
        gens.push(&w * &g.remap(&ext, &shift)?);
    }
    for g in &b.gens {
        gens.push(&one_minus_w * &g.remap(&ext, &shift)?);
    }
    let ord = MonomialOrder::Elimination { block: 1 };
    let gb = std_basis(&Ideal::new(&ext, gens)?, &ord)?;
    let back: Vec<Option<usize>> = std::iter::once(None)
        .chain((0..ring.len()).map(Some))
        .collect();
    let kept = gb
        .basis
        .iter()
        .filter(|g| g.degree_in(0) == 0)
        .map(|g| g.remap(ring, &back))
        .collect::<Result<Vec<_>, _>>()?;
    Ideal::new(ring, kept)
}

/// `a : f = { g : g·f ∈ a }`, computed as `(a ∩ <f>) / f`.
pub fn ideal_quotient(a: &Ideal, f: &Polynomial) -> Result<Ideal, GbError> {
    same_ring(&a.ring, f.ring())?;
    if f.is_zero() {
        return Err(GbError::ZeroDivisor);
    }
    let fi = Ideal::new(&a.ring, vec![f.clone()])?;
    let meet = ideal_intersect(a, &fi)?;
    let gens = meet
        .gens
        .iter()
        .map(|g| g.div_exact(f))
        .collect::<Result<Vec<_>, _>>()?;
    Ideal::new(&a.ring, gens)
}

/// Mutual containment under `ord`.
pub fn ideal_equal(a: &Ideal, b: &Ideal, ord: &MonomialOrder) -> Result<bool, GbError> {
    Ok(ideal_subset(a, b, ord)? && ideal_subset(b, a, ord)?)
}

/// `a ⊆ b` under `ord`.
pub fn ideal_subset(a: &Ideal, b: &Ideal, ord: &MonomialOrder) -> Result<bool, GbError> {
    same_ring(&a.ring, &b.ring)?;
    let sb = std_basis(b, ord)?;
    for g in &a.gens {
        if !sb.contains(g)? {
            return Ok(false);
        }
    }
    Ok(true)
}
