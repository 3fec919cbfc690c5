//! Helpers and independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_traits::{One, Zero};

use equising::curveinv::JetOptions;
use equising::family::{FamilyComponent, FamilyMode, FamilyOptions, FamilyPresentation};
use equising::poly::{Monomial, Polynomial, Rational, Ring, VarSet};

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn ring(names: &[&str]) -> Ring {
    VarSet::new(names).unwrap()
}

/// Caps wide enough for conductors of branches with exponents up to 40.
pub fn wide_jets() -> JetOptions {
    JetOptions {
        jet_cap: 8192,
        degree_cap: 8192,
        ..JetOptions::default()
    }
}

pub fn wide_options() -> FamilyOptions {
    FamilyOptions {
        jet: wide_jets(),
        ..FamilyOptions::default()
    }
}

/// The family `(u^a, u^b, t·u^c)` in `(x, y, z)`.
pub fn monomial_family(a: u32, b: u32, c: u32) -> FamilyPresentation {
    let xyz = ring(&["x", "y", "z"]);
    let tail = if c == 0 {
        "t".to_string()
    } else {
        format!("t*u^{c}")
    };
    let comp = FamilyComponent::parse("X", &[format!("u^{a}"), format!("u^{b}"), tail]).unwrap();
    FamilyPresentation::new(&xyz, FamilyMode::Parametrized, vec![comp], None, None).unwrap()
}

/// Monomials outside the ideal generated by `gens`, by walking the box cut
/// out by the pure powers. `None` when some variable has no pure power.
pub fn staircase_count(gens: &[Vec<u32>], nvars: usize) -> Option<u64> {
    if gens.iter().any(|g| g.iter().all(|&e| e == 0)) {
        return Some(0);
    }
    let mut bounds = Vec::with_capacity(nvars);
    for i in 0..nvars {
        let pure = gens
            .iter()
            .filter(|g| g.iter().enumerate().all(|(j, &e)| j == i || e == 0) && g[i] > 0)
            .map(|g| g[i])
            .min();
        bounds.push(pure?);
    }
    let mut count = 0;
    let mut exps = vec![0u32; nvars];
    loop {
        if !gens
            .iter()
            .any(|g| g.iter().zip(&exps).all(|(a, b)| a <= b))
        {
            count += 1;
        }
        let mut k = 0;
        loop {
            if k == nvars {
                return Some(count);
            }
            exps[k] += 1;
            if exps[k] < bounds[k] {
                break;
            }
            exps[k] = 0;
            k += 1;
        }
    }
}

/// All exponent vectors of total degree `d` in `n` variables.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return if d == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    for e in (0..=d).rev() {
        for mut rest in monomials_of_degree(n - 1, d - e) {
            rest.insert(0, e);
            out.push(rest);
        }
    }
    out
}

fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / rows[r][col].clone();
        for v in rows[r].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot) {
                    *x -= p * &f;
                }
            }
        }
        r += 1;
    }
    r
}

/// Whether the homogeneous `f` lies in the ideal of the homogeneous `gens`,
/// by solving `f = Σ g_i h_i` with `deg h_i = deg f - deg g_i` exactly.
pub fn brute_membership_homogeneous(gens: &[Polynomial], f: &Polynomial) -> bool {
    let ring = f.ring().clone();
    let n = ring.len();
    let Some(d) = f.total_degree() else {
        return true;
    };
    let targets = monomials_of_degree(n, d);
    let mut columns: Vec<Polynomial> = Vec::new();
    for g in gens {
        let Some(dg) = g.total_degree() else { continue };
        if dg > d {
            continue;
        }
        for m in monomials_of_degree(n, d - dg) {
            columns.push(g.mul_monomial(&Monomial::new(m), &Rational::one()));
        }
    }
    let matrix = |with_f: bool| -> Vec<Vec<Rational>> {
        targets
            .iter()
            .map(|t| {
                let t = Monomial::new(t.clone());
                let mut row: Vec<Rational> = columns.iter().map(|c| c.coefficient(&t)).collect();
                if with_f {
                    row.push(f.coefficient(&t));
                }
                row
            })
            .collect()
    };
    rank(matrix(false)) == rank(matrix(true))
}
