//! Exact multivariate polynomials over the rationals.
//!
//! A [`VarSet`] fixes the variable names and their order. Polynomials keep
//! their terms in a `BTreeMap` keyed by [`Monomial`], whose `Ord` is
//! degrevlex, so equal polynomials are structurally equal.

mod monomial;
mod order;
mod parse;

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use monomial::Monomial;
pub use order::{cmp_monomials, MonomialOrder};
pub use parse::parse_poly;

pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),
    #[error("invalid variable name `{0}`")]
    InvalidVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("negative exponent at byte {0}")]
    NegativeExponent(usize),
    #[error("division by a non-constant or zero expression at byte {0}")]
    BadDivision(usize),
    #[error("polynomials belong to different rings ({0} vs {1})")]
    RingMismatch(String, String),
    #[error("monomials have {0} and {1} exponents")]
    LengthMismatch(usize, usize),
    #[error("polynomial is not exactly divisible")]
    NotDivisible,
}

/// Ordered list of distinct variable names.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct VarSet {
    names: Vec<String>,
}

/// Shared handle to a [`VarSet`].
pub type Ring = Arc<VarSet>;

impl VarSet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Result<Ring, PolyError> {
        let mut out: Vec<String> = Vec::with_capacity(names.len());
        for n in names {
            let n = n.as_ref();
            let valid = n
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && n.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(PolyError::InvalidVariable(n.to_string()));
            }
            if out.iter().any(|m| m == n) {
                return Err(PolyError::DuplicateVariable(n.to_string()));
            }
            out.push(n.to_string());
        }
        Ok(Arc::new(VarSet { names: out }))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }
}

impl fmt::Display for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.names.join(", "))
    }
}

pub(crate) fn same_ring(a: &Ring, b: &Ring) -> Result<(), PolyError> {
    if Arc::ptr_eq(a, b) || a == b {
        Ok(())
    } else {
        Err(PolyError::RingMismatch(a.to_string(), b.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

/// A polynomial with nonzero rational coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Polynomial {
    ring: Ring,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(ring: &Ring) -> Self {
        Polynomial {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Ring, c: Rational) -> Self {
        Self::term(ring, Monomial::one(ring.len()), c)
    }

    pub fn one(ring: &Ring) -> Self {
        Self::constant(ring, Rational::one())
    }

    pub fn from_int(ring: &Ring, c: i64) -> Self {
        Self::constant(ring, Rational::from_integer(BigInt::from(c)))
    }

    /// The variable at position `idx` of the ring.
    pub fn var(ring: &Ring, idx: usize) -> Self {
        assert!(idx < ring.len(), "variable index out of range");
        let mut e = vec![0; ring.len()];
        e[idx] = 1;
        Self::term(ring, Monomial::new(e), Rational::one())
    }

    pub fn var_named(ring: &Ring, name: &str) -> Result<Self, PolyError> {
        ring.index_of(name)
            .map(|i| Self::var(ring, i))
            .ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }

    pub fn term(ring: &Ring, m: Monomial, c: Rational) -> Self {
        assert_eq!(m.len(), ring.len(), "monomial arity does not match ring");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial {
            ring: ring.clone(),
            terms,
        }
    }

    /// Builds a polynomial from (monomial, coefficient) pairs, merging
    /// repeated monomials and dropping zeros.
    pub fn from_terms<I>(ring: &Ring, it: I) -> Self
    where
        I: IntoIterator<Item = (Monomial, Rational)>,
    {
        let mut p = Self::zero(ring);
        for (m, c) in it {
            assert_eq!(m.len(), ring.len(), "monomial arity does not match ring");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    /// The constant term (zero if absent).
    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::one(self.ring.len()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in ascending degrevlex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).max()
    }

    /// Lowest total degree of any term, `None` for zero.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::degree).min()
    }

    /// Leading term under `ord`.
    pub fn leading_term(&self, ord: &MonomialOrder) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|a, b| ord.cmp(a.0, b.0))
    }

    /// Degree in a single variable.
    pub fn degree_in(&self, idx: usize) -> u32 {
        self.terms.keys().map(|m| m.exp(idx)).max().unwrap_or(0)
    }

    /// Smallest exponent of variable `idx` across the terms.
    pub fn min_exponent_in(&self, idx: usize) -> Option<u32> {
        self.terms.keys().map(|m| m.exp(idx)).min()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn neg(&self) -> Self {
        self.scale(&-Rational::one())
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero(&self.ring);
        }
        Polynomial {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(a, x)| (a.mul(m), x * c)).collect(),
        }
    }

    pub fn try_add(&self, other: &Self) -> Result<Self, PolyError> {
        same_ring(&self.ring, &other.ring)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self, PolyError> {
        same_ring(&self.ring, &other.ring)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self, PolyError> {
        same_ring(&self.ring, &other.ring)?;
        let mut out = Self::zero(&self.ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one(&self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Substitutes `values[i]` for variable `i`. The values all live in a
    /// common target ring.
    pub fn compose(&self, target: &Ring, values: &[Polynomial]) -> Result<Self, PolyError> {
        if values.len() != self.ring.len() {
            return Err(PolyError::LengthMismatch(self.ring.len(), values.len()));
        }
        for v in values {
            same_ring(target, &v.ring)?;
        }
        // cache powers per variable
        let mut powers: Vec<Vec<Polynomial>> = values
            .iter()
            .map(|v| vec![Polynomial::one(target), v.clone()])
            .collect();
        let mut out = Polynomial::zero(target);
        for (m, c) in &self.terms {
            let mut t = Polynomial::constant(target, c.clone());
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &values[i];
                    powers[i].push(next);
                }
                t = &t * &powers[i][e as usize];
            }
            out = &out + &t;
        }
        Ok(out)
    }

    /// Substitutes a rational value for one variable, staying in the same ring.
    pub fn substitute(&self, idx: usize, value: &Rational) -> Self {
        let mut out = Self::zero(&self.ring);
        for (m, c) in &self.terms {
            let e = m.exp(idx);
            let mut e_vec = m.exponents().to_vec();
            e_vec[idx] = 0;
            let factor = if e == 0 {
                Rational::one()
            } else {
                num_traits::pow(value.clone(), e as usize)
            };
            out.add_term(Monomial::new(e_vec), c * factor);
        }
        out
    }

    /// Rewrites the polynomial in `target`, sending variable `i` to
    /// `map[i]`. Every variable that occurs must be mapped.
    pub fn remap(&self, target: &Ring, map: &[Option<usize>]) -> Result<Self, PolyError> {
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut e = vec![0u32; target.len()];
            for (i, &x) in m.exponents().iter().enumerate() {
                if x == 0 {
                    continue;
                }
                match map.get(i).copied().flatten() {
                    Some(j) => e[j] += x,
                    None => return Err(PolyError::UnknownVariable(self.ring.names()[i].clone())),
                }
            }
            out.add_term(Monomial::new(e), c.clone());
        }
        Ok(out)
    }

    /// Moves the polynomial into `target` by matching variable names.
    pub fn rename_into(&self, target: &Ring) -> Result<Self, PolyError> {
        let map: Vec<Option<usize>> = self
            .ring
            .names()
            .iter()
            .map(|n| target.index_of(n))
            .collect();
        self.remap(target, &map)
    }

    /// Exact division by `d` in the polynomial ring.
    pub fn div_exact(&self, d: &Polynomial) -> Result<Self, PolyError> {
        same_ring(&self.ring, &d.ring)?;
        let ord = MonomialOrder::DegRevLex;
        let (dm, dc) = match d.leading_term(&ord) {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return Err(PolyError::NotDivisible),
        };
        let mut rem = self.clone();
        let mut quo = Self::zero(&self.ring);
        while let Some((m, c)) = rem.leading_term(&ord).map(|(m, c)| (m.clone(), c.clone())) {
            let Some(q) = m.div(&dm) else {
                return Err(PolyError::NotDivisible);
            };
            let qc = c / &dc;
            rem = rem.try_sub(&d.mul_monomial(&q, &qc))?;
            quo.add_term(q, qc);
        }
        Ok(quo)
    }

    /// The same polynomial scaled to leading coefficient one under `ord`.
    pub fn monic(&self, ord: &MonomialOrder) -> Self {
        match self.leading_term(ord) {
            Some((_, c)) => {
                let inv = c.recip();
                self.scale(&inv)
            }
            None => self.clone(),
        }
    }

    /// Returns `Some((coefficient, monomial))` when the polynomial has a
    /// single term.
    pub fn as_single_term(&self) -> Option<(&Monomial, &Rational)> {
        if self.terms.len() == 1 {
            self.terms.iter().next()
        } else {
            None
        }
    }
}

pub fn poly_arith(a: &Polynomial, b: &Polynomial, op: ArithOp) -> Result<Polynomial, PolyError> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
    }
}

// Operator sugar. Panics on ring mismatch; use the `try_*` methods when
// the rings are not known to agree.
impl std::ops::Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.try_add(rhs).expect("ring mismatch")
    }
}

impl std::ops::Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.try_sub(rhs).expect("ring mismatch")
    }
}

impl std::ops::Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.try_mul(rhs).expect("ring mismatch")
    }
}

pub fn format_rational(c: &Rational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn format_monomial(names: &[String], m: &Monomial) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        match e {
            0 => {}
            1 => parts.push(names[i].clone()),
            _ => parts.push(format!("{}^{}", names[i], e)),
        }
    }
    parts.join("*")
}

impl fmt::Display for Polynomial {
    /// Renders terms from the largest degrevlex monomial down, in the
    /// grammar accepted by [`parse_poly`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let names = self.ring.names();
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = format_monomial(names, m);
            if mono.is_empty() {
                write!(f, "{}", format_rational(&abs))?;
            } else if abs.is_one() {
                write!(f, "{}", mono)?;
            } else {
                write!(f, "{}*{}", format_rational(&abs), mono)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Polynomial({} in {})", self, self.ring)
    }
}
