use std::cmp::Ordering;

/// Exponent vector over a fixed [`VarSet`](super::VarSet).
///
/// Absent variables are stored as zero entries of a dense vector; the
/// total degree is cached. The derived `Ord` is degrevlex with the first
/// variable largest.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial {
    exps: Vec<u32>,
    degree: u32,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        let degree = exps.iter().sum();
        Monomial { exps, degree }
    }

    pub fn one(nvars: usize) -> Self {
        Monomial {
            exps: vec![0; nvars],
            degree: 0,
        }
    }

    /// `x_idx^e` in a ring of `nvars` variables.
    pub fn pure_power(nvars: usize, idx: usize, e: u32) -> Self {
        let mut exps = vec![0; nvars];
        exps[idx] = e;
        Monomial { exps, degree: e }
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exps
    }

    pub fn exp(&self, idx: usize) -> u32 {
        self.exps[idx]
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_one(&self) -> bool {
        self.degree == 0
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.len(), other.len());
        Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
            degree: self.degree + other.degree,
        }
    }

    /// `self | other`.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.degree <= other.degree && self.exps.iter().zip(&other.exps).all(|(a, b)| a <= b)
    }

    /// `self / other` when `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        if !other.divides(self) {
            return None;
        }
        Some(Monomial {
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a - b)
                .collect(),
            degree: self.degree - other.degree,
        })
    }

    pub fn lcm(&self, other: &Monomial) -> Monomial {
        Monomial::new(
            self.exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    pub fn is_coprime(&self, other: &Monomial) -> bool {
        self.exps
            .iter()
            .zip(&other.exps)
            .all(|(a, b)| *a == 0 || *b == 0)
    }

    /// Index of the variable when this is a pure power `x_i^e`, e > 0.
    pub fn pure_power_var(&self) -> Option<usize> {
        let mut found = None;
        for (i, &e) in self.exps.iter().enumerate() {
            if e > 0 {
                if found.is_some() {
                    return None;
                }
                found = Some(i);
            }
        }
        found
    }
}

pub(crate) fn degrevlex(a: &Monomial, b: &Monomial) -> Ordering {
    a.degree
        .cmp(&b.degree)
        .then_with(|| revlex_tail(&a.exps, &b.exps))
}

/// Reverse lexicographic tie-break: the monomial with the smaller exponent
/// in the last differing variable is larger.
pub(crate) fn revlex_tail(a: &[u32], b: &[u32]) -> Ordering {
    for (x, y) in a.iter().zip(b).rev() {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o.reverse(),
        }
    }
    Ordering::Equal
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        degrevlex(self, other).then_with(|| self.exps.len().cmp(&other.exps.len()))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
