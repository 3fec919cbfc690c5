mod common;

use std::cmp::Ordering;

use num_integer::Integer;
use proptest::prelude::*;
use proptest::test_runner::RngSeed;

use common::*;
use equising::cli::{Entry, Manifest};
use equising::curveinv::curve_multiplicity;
use equising::curveinv::{
    delta_reduced, semigroup_delta_oracle, BranchParam, CurveError, CurveInvariants, JetOptions,
};
use equising::family::{
    analyze, generic_multiplicity, pullback_ideal, special_multiplicity, specialize_fiber,
    FamilyMode,
};
use equising::gb::{
    ideal_contains, ideal_intersect, ideal_quotient, normal_form, std_basis, Ideal,
};
use equising::localdim::{
    count_standard_monomials, hs_multiplicity_of_param, is_cohen_macaulay, vdim, LengthValue,
};
use equising::poly::{parse_poly, Monomial, MonomialOrder, Polynomial, Rational, Ring};

const ORDERS: [MonomialOrder; 3] = [
    MonomialOrder::DegRevLex,
    MonomialOrder::NegDegRevLex,
    MonomialOrder::Elimination { block: 1 },
];

fn coeff() -> impl Strategy<Value = Rational> {
    (prop_oneof![-6i64..=-1, 1i64..=6], 1i64..=3).prop_map(|(n, d)| rat(n, d))
}

fn poly_in(r: Ring, max_exp: u32, max_terms: usize) -> impl Strategy<Value = Polynomial> {
    let n = r.len();
    prop::collection::vec(
        (prop::collection::vec(0..=max_exp, n), coeff()),
        0..=max_terms,
    )
    .prop_map(move |terms| {
        Polynomial::from_terms(&r, terms.into_iter().map(|(e, c)| (Monomial::new(e), c)))
    })
}

fn xyz_poly() -> impl Strategy<Value = Polynomial> {
    poly_in(ring(&["x", "y", "z"]), 3, 4)
}

fn xy_poly() -> impl Strategy<Value = Polynomial> {
    poly_in(ring(&["x", "y"]), 2, 3)
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(0x0e75_1e6e),
        ..ProptestConfig::default()
    }
}

fn monomial3() -> impl Strategy<Value = Monomial> {
    prop::collection::vec(0u32..=5, 3).prop_map(Monomial::new)
}

/// A homogeneous polynomial of degree `d` in `x, y, z`.
fn homogeneous(d: u32) -> impl Strategy<Value = Polynomial> {
    let monos = monomials_of_degree(3, d);
    let k = monos.len();
    prop::collection::vec((0..k, coeff()), 1..=3).prop_map(move |picks| {
        let r = ring(&["x", "y", "z"]);
        Polynomial::from_terms(
            &r,
            picks
                .into_iter()
                .map(|(i, c)| (Monomial::new(monos[i].clone()), c)),
        )
    })
}

fn u_ring() -> Ring {
    ring(&["u"])
}

/// `u^a + c u^(a+k)`; the order is `a` whatever `c` is.
fn branch_coord(a: u32) -> impl Strategy<Value = Polynomial> {
    (
        1u32..=4,
        -3i64..=3,
        prop_oneof![Just(1i64), Just(-2), Just(3)],
    )
        .prop_map(move |(k, c, lead)| {
            Polynomial::from_terms(
                &u_ring(),
                [(a, lead), (a + k, c)]
                    .into_iter()
                    .map(|(e, c)| (Monomial::new(vec![e]), rat(c, 1))),
            )
        })
}

/// A plane branch whose coordinate orders are coprime, hence primitive:
/// a reparametrization through `u^k` would make both orders multiples of `k`.
fn planar_branch(label: &'static str) -> impl Strategy<Value = BranchParam> {
    planar_branch_up_to(label, 5, 7)
}

fn planar_branch_up_to(
    label: &'static str,
    a_max: u32,
    b_max: u32,
) -> impl Strategy<Value = BranchParam> {
    (1..=a_max, 1..=b_max)
        .prop_filter("coprime orders", |(a, b)| a.gcd(b) == 1)
        .prop_flat_map(|(a, b)| (branch_coord(a), branch_coord(b)))
        .prop_map(move |(x, y)| BranchParam::new(label, vec![x, y]).unwrap())
}

/// Multiplicity and normalized tangent direction of a branch.
fn tangent_cone(b: &BranchParam) -> (u32, Vec<Rational>) {
    let m = b
        .components()
        .iter()
        .filter_map(Polynomial::order)
        .min()
        .unwrap();
    let lead: Vec<Rational> = b
        .components()
        .iter()
        .map(|p| p.coefficient(&Monomial::new(vec![m])))
        .collect();
    let pivot = lead.iter().find(|c| **c != rat(0, 1)).unwrap().clone();
    (m, lead.into_iter().map(|c| c / pivot.clone()).collect())
}

fn moderate_jets() -> JetOptions {
    JetOptions {
        jet_cap: 256,
        degree_cap: 256,
        ..JetOptions::default()
    }
}

fn gcd_all(xs: &[u32]) -> u32 {
    xs.iter().fold(0, |g, &x| g.gcd(&x))
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn ring_laws(a in xyz_poly(), b in xyz_poly(), c in xyz_poly()) {
        let add = |p: &Polynomial, q: &Polynomial| p.try_add(q).unwrap();
        let mul = |p: &Polynomial, q: &Polynomial| p.try_mul(q).unwrap();
        prop_assert_eq!(add(&a, &b), add(&b, &a));
        prop_assert_eq!(mul(&a, &b), mul(&b, &a));
        prop_assert_eq!(add(&add(&a, &b), &c), add(&a, &add(&b, &c)));
        prop_assert_eq!(mul(&mul(&a, &b), &c), mul(&a, &mul(&b, &c)));
        prop_assert_eq!(mul(&a, &add(&b, &c)), add(&mul(&a, &b), &mul(&a, &c)));
        prop_assert!(a.try_sub(&a).unwrap().is_zero());
    }

    #[test]
    fn render_then_parse_is_identity(p in xyz_poly()) {
        let text = p.to_string();
        prop_assert_eq!(parse_poly(&text, p.ring()).unwrap(), p);
    }

    #[test]
    fn orders_are_total_and_multiplicative(a in monomial3(), b in monomial3(), c in monomial3()) {
        for ord in ORDERS {
            prop_assert_eq!(ord.cmp(&a, &b), ord.cmp(&b, &a).reverse());
            prop_assert_eq!(ord.cmp(&a, &b) == Ordering::Equal, a == b);
            if ord.cmp(&a, &b) == Ordering::Less {
                prop_assert_eq!(ord.cmp(&a.mul(&c), &b.mul(&c)), Ordering::Less);
                if ord.cmp(&b, &c) == Ordering::Less {
                    prop_assert_eq!(ord.cmp(&a, &c), Ordering::Less);
                }
            }
        }
    }

    #[test]
    fn membership_matches_linear_algebra(
        g1 in homogeneous(1), g2 in homogeneous(2), h in homogeneous(1),
        noise in homogeneous(3), inside in any::<bool>(),
    ) {
        prop_assume!(!g1.is_zero() && !g2.is_zero());
        let r = g1.ring().clone();
        let i = Ideal::new(&r, vec![g1.clone(), g2.clone()]).unwrap();
        let mut f = g2.try_mul(&h).unwrap();
        if !inside {
            f = f.try_add(&noise).unwrap();
        }
        let expected = brute_membership_homogeneous(i.gens(), &f);
        // for homogeneous data the local and global answers coincide
        for ord in [MonomialOrder::DegRevLex, MonomialOrder::NegDegRevLex] {
            prop_assert_eq!(ideal_contains(&i, &f, &ord).unwrap(), expected);
        }
    }

    #[test]
    fn intersection_is_the_common_part(
        a in xy_poly(), b in xy_poly(), c in xy_poly(), d in xy_poly(),
        p in xy_poly(), q in xy_poly(), f in xy_poly(),
    ) {
        let r = a.ring().clone();
        let i = Ideal::new(&r, vec![a, b]).unwrap();
        let j = Ideal::new(&r, vec![c, d]).unwrap();
        let k = ideal_intersect(&i, &j).unwrap();
        let ord = MonomialOrder::DegRevLex;
        for g in k.gens() {
            prop_assert!(ideal_contains(&i, g, &ord).unwrap());
            prop_assert!(ideal_contains(&j, g, &ord).unwrap());
        }
        let comb = |id: &Ideal, h: &Polynomial| id.gens().iter().fold(Polynomial::zero(&r), |acc, g| {
            acc.try_add(&g.try_mul(h).unwrap()).unwrap()
        });
        let prod = comb(&i, &p).try_mul(&comb(&j, &q)).unwrap();
        prop_assert!(ideal_contains(&k, &prod, &ord).unwrap());
        if ideal_contains(&i, &f, &ord).unwrap() && ideal_contains(&j, &f, &ord).unwrap() {
            prop_assert!(ideal_contains(&k, &f, &ord).unwrap());
        }
    }

    #[test]
    fn normal_form_is_idempotent(a in xyz_poly(), b in xyz_poly(), f in xyz_poly()) {
        let r = a.ring().clone();
        let i = Ideal::new(&r, vec![a, b]).unwrap();
        let sb = std_basis(&i, &MonomialOrder::DegRevLex).unwrap();
        let once = normal_form(&f, &sb).unwrap();
        prop_assert_eq!(normal_form(&once, &sb).unwrap(), once);
    }

    #[test]
    fn local_normal_form_is_idempotent_on_corpus(k in 0usize..64, f in poly_in(ring(&["u", "t"]), 5, 4)) {
        let ideals = corpus_local_ideals();
        let (name, j) = &ideals[k % ideals.len()];
        let sb = std_basis(j, &MonomialOrder::NegDegRevLex).unwrap();
        let f = f.rename_into(j.ring()).unwrap();
        let once = normal_form(&f, &sb).unwrap();
        prop_assert_eq!(normal_form(&once, &sb).unwrap(), once, "{}", name);
    }

    #[test]
    fn vdim_matches_staircase(
        nvars in 1usize..=3,
        pure in prop::collection::vec(prop::option::weighted(0.85, 1u32..=12), 3),
        extra in prop::collection::vec(prop::collection::vec(0u32..=6, 3), 0..=4),
    ) {
        let mut gens: Vec<Vec<u32>> = Vec::new();
        for (i, p) in pure.iter().take(nvars).enumerate() {
            if let Some(e) = p {
                let mut v = vec![0; nvars];
                v[i] = *e;
                gens.push(v);
            }
        }
        gens.extend(extra.iter().map(|e| e[..nvars].to_vec()).filter(|e| e.iter().sum::<u32>() <= 12));
        prop_assume!(!gens.is_empty());
        let names = ["x", "y", "z"];
        let r = ring(&names[..nvars]);
        let polys = gens.iter().map(|e| Polynomial::term(&r, Monomial::new(e.clone()), rat(1, 1))).collect();
        let i = Ideal::new(&r, polys).unwrap();
        let expected = staircase_count(&gens, nvars).map_or(LengthValue::Infinite, LengthValue::Finite);
        prop_assert_eq!(vdim(&i).unwrap(), expected);
        let lead: Vec<Monomial> = gens.iter().cloned().map(Monomial::new).collect();
        prop_assert_eq!(count_standard_monomials(&lead, nvars), expected);
    }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn jet_delta_matches_semigroup(exps in prop::collection::vec(1u32..=40, 1..=3)) {
        prop_assume!(gcd_all(&exps) == 1);
        let coords: Vec<String> = exps.iter().map(|e| format!("u^{e}")).collect();
        let b = BranchParam::parse("b", &u_ring(), &coords).unwrap();
        let oracle = semigroup_delta_oracle(&b).unwrap();
        prop_assert_eq!(delta_reduced(&[b], &wide_jets()).unwrap(), oracle);
    }

    #[test]
    fn delta_is_superadditive(b1 in planar_branch_up_to("b1", 3, 5), b2 in planar_branch_up_to("b2", 3, 5)) {
        // distinct germs for sure; equal ones would have infinite delta
        prop_assume!(tangent_cone(&b1) != tangent_cone(&b2));
        let opts = moderate_jets();
        let d1 = delta_reduced(std::slice::from_ref(&b1), &opts).unwrap();
        let d2 = delta_reduced(std::slice::from_ref(&b2), &opts).unwrap();
        let d12 = match delta_reduced(&[b1, b2], &opts) {
            Err(CurveError::IndistinguishableBranches(..)) => return Ok(()),
            other => other.unwrap(),
        };
        prop_assert!(d12 >= d1 + d2, "{d12} < {d1} + {d2}");
    }

    #[test]
    fn delta_ignores_linear_coordinates(
        b in planar_branch("b"),
        m in prop::collection::vec(-3i64..=3, 4),
    ) {
        prop_assume!(m[0] * m[3] - m[1] * m[2] != 0);
        let opts = moderate_jets();
        let before = delta_reduced(std::slice::from_ref(&b), &opts).unwrap();
        let c = b.components();
        let row = |p: i64, q: i64| {
            c[0].scale(&rat(p, 1)).try_add(&c[1].scale(&rat(q, 1))).unwrap()
        };
        let moved = BranchParam::new("b'", vec![row(m[0], m[1]), row(m[2], m[3])]).unwrap();
        prop_assert_eq!(delta_reduced(&[moved], &opts).unwrap(), before);
    }

    #[test]
    fn milnor_parity_for_one_branch(m in 1u32..=9, delta in 0u64..=40, eps in 0u64..=5) {
        let inv = CurveInvariants::from_parts(m, 1, delta, eps);
        prop_assert_eq!(inv.mu_red, 2 * delta as i64);
        prop_assert_eq!(inv.mu, 2 * inv.delta);
        prop_assert_eq!(inv.delta, delta as i64 - eps as i64);
    }
}

proptest! {
    #![proptest_config(config(40))]

    #[test]
    fn monomial_families_are_consistent(a in 1u32..=9, b in 1u32..=11, c in 1u32..=12, seed in 0u64..4) {
        let (a, b) = (a.min(b), a.max(b));
        prop_assume!(a.gcd(&b) == 1);
        let f = monomial_family(a, b, c);
        let opts = equising::family::FamilyOptions { seed, ..wide_options() };
        let an = analyze(&f, &opts).unwrap();

        // two Whitney routes
        prop_assert_eq!(an.criteria.whitney_by_cohen_macaulay, Some(an.criteria.whitney_by_mu_and_multiplicity));
        prop_assert_eq!(an.verdict.whitney, an.criteria.whitney_by_mu_and_multiplicity);
        prop_assert_eq!(an.criteria.trivial_by_mu_and_connectivity, an.criteria.trivial_by_delta_and_branches);

        // l >= e, equality exactly when t is a nonzerodivisor
        let j = pullback_ideal(&f.components()[0]).unwrap();
        let w = is_cohen_macaulay(&j, "t", opts.n_max).unwrap();
        prop_assert!(w.length >= w.multiplicity);
        prop_assert_eq!(w.length == w.multiplicity, w.colon_equal);
        prop_assert_eq!(w.cohen_macaulay, w.colon_equal);
        if w.length > w.multiplicity {
            prop_assert!(!an.verdict.whitney);
        }

        // multiplicity of the special fibre two ways
        let special = specialize_fiber(&f, &rat(0, 1)).unwrap();
        prop_assert_eq!(special_multiplicity(&j).unwrap(), curve_multiplicity(&special).unwrap() as u64);
        prop_assert_eq!(special_multiplicity(&j).unwrap(), a as u64);
        prop_assert_eq!(generic_multiplicity(&f, opts.n_max).unwrap(), an.generic.inv.m as u64);
    }
}

#[test]
fn sample_independence_across_seeds() {
    for (a, b, c) in [(3, 4, 1), (3, 4, 5), (2, 5, 1), (3, 7, 2)] {
        let f = monomial_family(a, b, c);
        let base = analyze(&f, &wide_options()).unwrap();
        for seed in 1..6 {
            let opts = equising::family::FamilyOptions {
                seed,
                ..wide_options()
            };
            let other = analyze(&f, &opts).unwrap();
            assert_eq!(
                other.generic.inv, base.generic.inv,
                "({a},{b},{c}) seed {seed}"
            );
            assert_eq!(other.verdict.whitney, base.verdict.whitney);
        }
    }
}

#[test]
fn hs_multiplicity_of_pure_powers() {
    let ut = ring(&["u", "t"]);
    for m in 1..=8 {
        let j = Ideal::parse(&ut, &[format!("u^{m}")]).unwrap();
        assert_eq!(hs_multiplicity_of_param(&j, "t", 32).unwrap().value, m);
    }
}

fn corpus_families() -> Vec<(String, equising::family::FamilyPresentation)> {
    let mut out = Vec::new();
    for text in equising::cli::corpus::MANIFESTS {
        for e in Manifest::from_json(text).unwrap().build(None).unwrap() {
            if let Entry::Family { name, family, .. } = e {
                out.push((name, family));
            }
        }
    }
    out
}

/// Pullback ideals from every parametrized corpus family.
fn corpus_local_ideals() -> &'static [(String, Ideal)] {
    static CACHE: std::sync::OnceLock<Vec<(String, Ideal)>> = std::sync::OnceLock::new();
    CACHE.get_or_init(collect_local_ideals)
}

fn collect_local_ideals() -> Vec<(String, Ideal)> {
    let mut out = Vec::new();
    for (name, f) in corpus_families() {
        if f.mode() != FamilyMode::Parametrized {
            continue;
        }
        for c in f.components() {
            if let Ok(j) = pullback_ideal(c) {
                out.push((format!("{name}/{}", c.label()), j));
            }
        }
    }
    out
}

#[test]
fn whitney_is_decided_componentwise() {
    let mut checked = 0;
    for (name, f) in corpus_families() {
        let all_a = f
            .components()
            .iter()
            .all(|c| c.class() == equising::family::ComponentClass::A);
        if f.mode() != FamilyMode::Parametrized || f.components().len() < 2 || !all_a {
            continue;
        }
        let whole = analyze(&f, &wide_options()).unwrap().verdict.whitney;
        let parts: Vec<bool> = (0..f.components().len())
            .map(|j| {
                let g = f.component_family(j).unwrap();
                analyze(&g, &wide_options()).unwrap().verdict.whitney
            })
            .collect();
        assert_eq!(whole, parts.iter().all(|&w| w), "{name}: {parts:?}");
        checked += 1;
    }
    assert!(checked >= 2, "only {checked} multi-component entries");
}

#[test]
fn quotient_membership_agrees_locally() {
    let ut = ring(&["u", "t"]);
    let t = Polynomial::var(&ut, 1);
    let local = MonomialOrder::NegDegRevLex;
    for (_, f) in corpus_families() {
        if f.mode() != FamilyMode::Parametrized {
            continue;
        }
        for c in f.components() {
            let Ok(j) = pullback_ideal(c) else { continue };
            let q = ideal_quotient(&j, &t).unwrap();
            for a in 0..6 {
                for b in 0..3 {
                    let g = Polynomial::term(&ut, Monomial::new(vec![a, b]), rat(1, 1))
                        .try_add(&Polynomial::term(
                            &ut,
                            Monomial::new(vec![a + 1, 0]),
                            rat(-2, 1),
                        ))
                        .unwrap();
                    let tg = g.try_mul(&t).unwrap();
                    assert_eq!(
                        ideal_contains(&q, &g, &local).unwrap(),
                        ideal_contains(&j, &tg, &local).unwrap(),
                        "{j} : t against {g}"
                    );
                }
            }
        }
    }
}
