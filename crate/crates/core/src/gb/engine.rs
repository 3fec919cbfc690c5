//! Term-list polynomials sorted under a fixed order, and the Buchberger /
//! Mora drivers that work on them.

use std::collections::HashSet;

use num_traits::{One, Zero};

use crate::poly::{Monomial, MonomialOrder, Polynomial, Rational, Ring};

use super::GbError;

/// Hard ceiling on reduction steps for a single basis computation.
const STEP_CAP: usize = 5_000_000;

#[derive(Clone, Debug)]
pub(crate) struct TermList {
    /// Strictly descending under the order it was built with.
    pub terms: Vec<(Monomial, Rational)>,
}

impl TermList {
    pub fn from_poly(p: &Polynomial, ord: &MonomialOrder) -> Self {
        let mut terms: Vec<(Monomial, Rational)> =
            p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
        terms.sort_by(|a, b| ord.cmp(&b.0, &a.0));
        TermList { terms }
    }

    pub fn to_poly(&self, ring: &Ring) -> Polynomial {
        Polynomial::from_terms(ring, self.terms.iter().cloned())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn lead(&self) -> &(Monomial, Rational) {
        &self.terms[0]
    }

    pub fn lm(&self) -> &Monomial {
        &self.terms[0].0
    }

    pub fn ecart(&self) -> u32 {
        let top = self
            .terms
            .iter()
            .map(|(m, _)| m.degree())
            .max()
            .unwrap_or(0);
        top - self.lm().degree()
    }

    pub fn make_monic(&mut self) {
        if self.terms.is_empty() {
            return;
        }
        let inv = self.terms[0].1.recip();
        if inv.is_one() {
            return;
        }
        for t in &mut self.terms {
            t.1 *= &inv;
        }
    }

    /// `self - c * m * g`, dropping terms of degree `>= trunc` if given.
    pub fn sub_mul(
        &self,
        c: &Rational,
        m: &Monomial,
        g: &TermList,
        ord: &MonomialOrder,
        trunc: Option<u32>,
    ) -> TermList {
        let keep = |mono: &Monomial| trunc.is_none_or(|d| mono.degree() < d);
        let mut out = Vec::with_capacity(self.terms.len() + g.terms.len());
        let mut i = 0;
        let mut j = 0;
        let shifted: Vec<(Monomial, Rational)> = g
            .terms
            .iter()
            .map(|(gm, gc)| (gm.mul(m), -(gc * c)))
            .collect();
        while i < self.terms.len() || j < shifted.len() {
            let pick = if i == self.terms.len() {
                std::cmp::Ordering::Less
            } else if j == shifted.len() {
                std::cmp::Ordering::Greater
            } else {
                ord.cmp(&self.terms[i].0, &shifted[j].0)
            };
            match pick {
                std::cmp::Ordering::Greater => {
                    if keep(&self.terms[i].0) {
                        out.push(self.terms[i].clone());
                    }
                    i += 1;
                }
                std::cmp::Ordering::Less => {
                    if keep(&shifted[j].0) {
                        out.push(shifted[j].clone());
                    }
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    let s = &self.terms[i].1 + &shifted[j].1;
                    if !s.is_zero() && keep(&self.terms[i].0) {
                        out.push((self.terms[i].0.clone(), s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        TermList { terms: out }
    }
}

pub(crate) fn s_poly(f: &TermList, g: &TermList, ord: &MonomialOrder) -> TermList {
    let (fm, fc) = f.lead();
    let (gm, gc) = g.lead();
    let l = fm.lcm(gm);
    let a = l.div(fm).expect("lcm");
    let b = l.div(gm).expect("lcm");
    // gc * a * f - fc * b * g, scaled so the leading terms cancel
    let f_scaled = TermList {
        terms: f.terms.iter().map(|(m, c)| (m.mul(&a), c * gc)).collect(),
    };
    f_scaled.sub_mul(fc, &b, g, ord, None)
}

struct Counter(usize);

impl Counter {
    fn tick(&mut self) -> Result<(), GbError> {
        self.0 += 1;
        if self.0 > STEP_CAP {
            Err(GbError::IterationCap(STEP_CAP))
        } else {
            Ok(())
        }
    }
}

/// Full reduction of `f` by `basis`: afterwards no term of the result is
/// divisible by a leading monomial. For local orders a truncation degree
/// must be supplied (monomials of that degree lie in the ideal).
pub(crate) fn full_reduce(
    f: &TermList,
    basis: &[TermList],
    ord: &MonomialOrder,
    trunc: Option<u32>,
) -> Result<TermList, GbError> {
    debug_assert!(ord.is_global() || trunc.is_some());
    let mut counter = Counter(0);
    let mut h = match trunc {
        Some(d) => TermList {
            terms: f
                .terms
                .iter()
                .filter(|(m, _)| m.degree() < d)
                .cloned()
                .collect(),
        },
        None => f.clone(),
    };
    let mut done: Vec<(Monomial, Rational)> = Vec::new();
    while !h.is_zero() {
        counter.tick()?;
        let (m, c) = h.lead().clone();
        match basis.iter().find(|g| g.lm().divides(&m)) {
            Some(g) => {
                let q = m.div(g.lm()).expect("divides");
                let coef = &c / &g.lead().1;
                h = h.sub_mul(&coef, &q, g, ord, trunc);
            }
            None => {
                done.push((m, c));
                h.terms.remove(0);
            }
        }
    }
    Ok(TermList { terms: done })
}

/// Mora's weak normal form with ecart-driven reducer selection.
///
/// The result is zero iff `f` lies in the ideal generated by `basis` in the
/// localization; otherwise its leading monomial is not divisible by any
/// leading monomial of `basis`.
pub(crate) fn mora_nf(
    f: &TermList,
    basis: &[TermList],
    ord: &MonomialOrder,
    counter_budget: &mut usize,
) -> Result<TermList, GbError> {
    let mut h = f.clone();
    let mut extra: Vec<TermList> = Vec::new();
    while !h.is_zero() {
        *counter_budget += 1;
        if *counter_budget > STEP_CAP {
            return Err(GbError::IterationCap(STEP_CAP));
        }
        let lm = h.lm().clone();
        let best = basis
            .iter()
            .chain(extra.iter())
            .filter(|g| g.lm().divides(&lm))
            .min_by_key(|g| g.ecart())
            .cloned();
        let Some(g) = best else {
            return Ok(h);
        };
        if g.ecart() > h.ecart() {
            extra.push(h.clone());
        }
        let q = lm.div(g.lm()).expect("divides");
        let coef = &h.lead().1 / &g.lead().1;
        h = h.sub_mul(&coef, &q, &g, ord, None);
    }
    Ok(h)
}

#[derive(Clone, Debug)]
struct Pair {
    i: usize,
    j: usize,
    lcm: Monomial,
    seq: usize,
}

/// Computes a (not yet minimalized) Gröbner or standard basis.
pub(crate) fn compute_basis(
    gens: &[TermList],
    ord: &MonomialOrder,
) -> Result<Vec<TermList>, GbError> {
    let local = ord.is_local();
    let mut basis: Vec<TermList> = Vec::new();
    let mut pairs: Vec<Pair> = Vec::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();
    let mut seq = 0usize;
    let mut budget = 0usize;

    let mut push = |basis: &mut Vec<TermList>,
                    pairs: &mut Vec<Pair>,
                    pending: &mut HashSet<(usize, usize)>,
                    mut h: TermList| {
        h.make_monic();
        let k = basis.len();
        for (i, g) in basis.iter().enumerate() {
            pairs.push(Pair {
                i,
                j: k,
                lcm: g.lm().lcm(h.lm()),
                seq,
            });
            seq += 1;
            pending.insert((i, k));
        }
        basis.push(h);
    };

    for g in gens {
        let h = if local {
            mora_nf(g, &basis, ord, &mut budget)?
        } else {
            full_reduce(g, &basis, ord, None)?
        };
        if !h.is_zero() {
            push(&mut basis, &mut pairs, &mut pending, h);
        }
    }

    while !pairs.is_empty() {
        // normal strategy: smallest lcm degree, then insertion order
        let idx = pairs
            .iter()
            .enumerate()
            .min_by_key(|(_, p)| (p.lcm.degree(), p.seq))
            .map(|(k, _)| k)
            .unwrap();
        let p = pairs.remove(idx);
        pending.remove(&(p.i, p.j));

        let (fi, fj) = (&basis[p.i], &basis[p.j]);
        if fi.lm().is_coprime(fj.lm()) {
            continue;
        }
        if !local && chain_criterion(&p, &basis, &pending) {
            continue;
        }
        let s = s_poly(fi, fj, ord);
        let h = if local {
            mora_nf(&s, &basis, ord, &mut budget)?
        } else {
            full_reduce(&s, &basis, ord, None)?
        };
        if !h.is_zero() {
            push(&mut basis, &mut pairs, &mut pending, h);
        }
    }
    Ok(basis)
}

fn chain_criterion(p: &Pair, basis: &[TermList], pending: &HashSet<(usize, usize)>) -> bool {
    let key = |a: usize, b: usize| if a < b { (a, b) } else { (b, a) };
    basis.iter().enumerate().any(|(k, g)| {
        k != p.i
            && k != p.j
            && g.lm().divides(&p.lcm)
            && !pending.contains(&key(p.i, k))
            && !pending.contains(&key(p.j, k))
    })
}

/// Drops elements whose leading monomial is divisible by another's and
/// sorts the survivors by leading monomial, largest first.
pub(crate) fn minimalize(basis: Vec<TermList>, ord: &MonomialOrder) -> Vec<TermList> {
    let mut keep: Vec<TermList> = Vec::new();
    for (i, g) in basis.iter().enumerate() {
        let redundant = basis
            .iter()
            .enumerate()
            .any(|(j, h)| j != i && h.lm().divides(g.lm()) && (h.lm() != g.lm() || j < i));
        if !redundant {
            keep.push(g.clone());
        }
    }
    keep.sort_by(|a, b| ord.cmp(b.lm(), a.lm()));
    keep
}

/// Tail-reduces each element against the others (leading terms untouched).
pub(crate) fn tail_reduce(
    basis: &[TermList],
    ord: &MonomialOrder,
    trunc: Option<u32>,
) -> Result<Vec<TermList>, GbError> {
    let mut out = Vec::with_capacity(basis.len());
    for (i, g) in basis.iter().enumerate() {
        let others: Vec<TermList> = basis
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, h)| h.clone())
            .collect();
        let tail = TermList {
            terms: g.terms[1..].to_vec(),
        };
        let mut reduced = full_reduce(&tail, &others, ord, trunc)?;
        reduced.terms.insert(0, g.lead().clone());
        let mut r = reduced;
        r.make_monic();
        out.push(r);
    }
    Ok(out)
}

/// For a monomial ideal given by its minimal generators, a degree `D` such
/// that every monomial of degree `>= D` lies in it; `None` unless every
/// variable has a pure power among the generators.
pub(crate) fn highest_corner_bound(lead: &[Monomial], nvars: usize) -> Option<u32> {
    let mut pure = vec![None::<u32>; nvars];
    for m in lead {
        if m.is_one() {
            return Some(0);
        }
        if let Some(v) = m.pure_power_var() {
            let e = m.exp(v);
            pure[v] = Some(pure[v].map_or(e, |old| old.min(e)));
        }
    }
    let mut total = 0u32;
    for p in pure {
        total += p? - 1;
    }
    Some(total + 1)
}
