//! Randomized algebraic properties, shared by the property tests and the
//! acceptance run. Each suite runs a fixed number of cases from a fixed seed.

use laxrec::diffpoly::{Selector, STRUCTURED_VERSION};
use laxrec::equivalence::{from_bkp, to_bkp, u_to_v, v_to_u};
use laxrec::psdo::PsDO;
use laxrec::{CoordinateMap, DiffPoly, Family, JetVariable, Monomial, Rational};
use num_bigint::BigInt;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

fn coeff() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4)
        .prop_filter("nonzero", |(n, _)| *n != 0)
        .prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
}

fn jet(families: &'static [Family]) -> impl Strategy<Value = JetVariable> {
    (prop::sample::select(families), 1u32..=3, 0u32..=2).prop_map(|(f, i, k)| JetVariable::new(f, i, k))
}

pub fn monomial(families: &'static [Family], max_eps: u32) -> impl Strategy<Value = Monomial> {
    (0..=max_eps, prop::collection::vec((jet(families), 1u32..=2), 1..=3)).prop_map(|(e, fs)| Monomial::from_parts(e, fs))
}

/// Sums of up to `max_terms` terms, every term with at least one jet factor.
pub fn poly(families: &'static [Family], max_terms: usize) -> impl Strategy<Value = DiffPoly> {
    prop::collection::vec((monomial(families, 2), coeff()), 0..=max_terms).prop_map(DiffPoly::from_terms)
}

/// Terms with at most two factors, each to the first power.
fn small_poly(families: &'static [Family]) -> impl Strategy<Value = DiffPoly> {
    let m = (0u32..=2, prop::collection::vec(jet(families), 1..=2))
        .prop_map(|(e, xs)| Monomial::from_parts(e, xs.into_iter().map(|x| (x, 1))));
    prop::collection::vec((m, coeff()), 0..=2).prop_map(DiffPoly::from_terms)
}

const F: &[Family] = &[Family::F];
const FV: &[Family] = &[Family::F, Family::V];

/// A windowed operator with a few polynomial coefficients.
fn operator() -> impl Strategy<Value = PsDO> {
    (0i64..=2, 1i64..=3, prop::collection::vec(poly(F, 2), 4)).prop_map(|(ceiling, depth, cs)| {
        let mut coeffs = vec![(ceiling, DiffPoly::one())];
        for (k, c) in cs.into_iter().enumerate() {
            coeffs.push((ceiling - 1 - k as i64, c));
        }
        PsDO::truncated(coeffs, ceiling - depth).expect("floor below ceiling")
    })
}

/// Restricts both operators to their common window and compares.
fn same_on_window(a: &PsDO, b: &PsDO) -> bool {
    let floor = match (a.floor(), b.floor()) {
        (Some(x), Some(y)) => x.max(y),
        (x, y) => match x.or(y) {
            Some(f) => f,
            None => return a == b,
        },
    };
    let (Ok(a), Ok(b)) = (a.raise_floor(floor), b.raise_floor(floor)) else {
        return true; // empty common window
    };
    a.coeffs().collect::<Vec<_>>() == b.coeffs().collect::<Vec<_>>()
}

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn check<S: Strategy>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S::Value: std::fmt::Debug,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

pub fn psdo_associativity(cases: u32) -> Result<(), String> {
    check(cases, (operator(), operator(), operator()), |(a, b, c)| {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert!(same_on_window(&left, &right));
        Ok(())
    })
}

pub fn dagger_anti_homomorphism(cases: u32) -> Result<(), String> {
    check(cases, (operator(), operator()), |(a, b)| {
        let left = a.compose(&b).unwrap().dagger().unwrap();
        let right = b.dagger().unwrap().compose(&a.dagger().unwrap()).unwrap();
        prop_assert!(same_on_window(&left, &right));
        prop_assert!(same_on_window(&a.dagger().unwrap().dagger().unwrap(), &a));
        Ok(())
    })
}

pub fn variational_kills_derivatives(cases: u32) -> Result<(), String> {
    check(cases, poly(FV, 4), |p| {
        let d = p.dx();
        for fam in [Family::F, Family::V] {
            for i in 1..=3 {
                prop_assert!(d.variational_derivative(fam, i).is_zero());
            }
        }
        prop_assert!(d.is_zero() || d.is_exact());
        Ok(())
    })
}

pub fn antiderivative_round_trip(cases: u32) -> Result<(), String> {
    check(cases, poly(FV, 4), |p| {
        prop_assert_eq!(p.dx().antiderivative().unwrap(), p.clone());
        prop_assert_eq!(p.antiderivative().map(|q| q.dx()).unwrap_or_else(|_| p.clone()), p);
        Ok(())
    })
}

pub fn substitution_homomorphism(cases: u32) -> Result<(), String> {
    check(cases, (small_poly(F), small_poly(F), small_poly(FV), small_poly(FV)), |(p, q, a, b)| {
        let map = CoordinateMap::new().with_rule(Family::F, 1, a).with_rule(Family::F, 2, b);
        let phi = |x: &DiffPoly| map.apply(x).unwrap();
        prop_assert_eq!(phi(&(&p * &q)), &phi(&p) * &phi(&q));
        prop_assert_eq!(phi(&(&p + &q)), &phi(&p) + &phi(&q));
        prop_assert_eq!(phi(&p.dx()), phi(&p).dx());
        Ok(())
    })
}

pub fn grading_additivity(cases: u32) -> Result<(), String> {
    check(cases, (monomial(FV, 3), monomial(FV, 3)), |(m, n)| {
        prop_assert_eq!(m.mul(&n).grading(), m.grading() + n.grading());
        let p = DiffPoly::term(Rational::from_integer(1.into()), m.clone());
        let g = m.grading();
        for (t, _) in p.dx().terms() {
            let h = t.grading();
            prop_assert_eq!(h.dx_deg, g.dx_deg + 1);
            prop_assert_eq!(h.weight_deg, g.weight_deg + 1);
            prop_assert_eq!(h.tilde_deg, g.tilde_deg);
        }
        Ok(())
    })
}

pub fn slice_partition(cases: u32) -> Result<(), String> {
    let selector = prop_oneof![
        (0u32..3).prop_map(Selector::EpsPower),
        (1u32..4).prop_map(Selector::TildeDegAtLeast),
        (1u32..4).prop_map(Selector::TopIndexAtMost),
    ];
    check(cases, (poly(FV, 6), selector.clone(), selector), |(p, s, t)| {
        let sel = s.and(t);
        let inside = p.extract_slice(&sel);
        let outside = p.extract_slice(&sel.clone().not());
        prop_assert_eq!(&inside + &outside, p.clone());
        prop_assert!(inside.terms().all(|(m, _)| sel.matches(m)));
        Ok(())
    })
}

pub fn serialization_round_trip(cases: u32) -> Result<(), String> {
    check(cases, poly(FV, 6), |p| {
        let json = p.to_json();
        let header = format!("{{\"version\":{STRUCTURED_VERSION},");
        prop_assert!(json.starts_with(&header));
        prop_assert_eq!(DiffPoly::from_json(&json).unwrap(), p.clone());
        prop_assert_eq!(p.to_string().parse::<DiffPoly>().unwrap(), p);
        Ok(())
    })
}

const V: &[Family] = &[Family::V];

/// Writing `v[1..3]` in `u` and then `u` back in `v` is the identity.
pub fn normalization_round_trip(cases: u32) -> Result<(), String> {
    let (fwd, inv) = (u_to_v(), v_to_u());
    check(cases, small_poly(V), move |p| {
        let there = fwd.apply(&p).unwrap();
        prop_assert_eq!(inv.apply(&there).unwrap(), p);
        Ok(())
    })
}

/// The `v <-> w` dictionary round-trips on polynomials whose `eps` power
/// equals their derivative count.
pub fn dictionary_round_trip(cases: u32) -> Result<(), String> {
    let balanced = small_poly(V).prop_map(|p| {
        DiffPoly::from_terms(p.into_terms().filter_map(|(m, c)| {
            let order: u32 = m.factors().iter().map(|(x, e)| x.order * e).sum();
            order.is_multiple_of(2).then(|| (Monomial::from_parts(order, m.factors().iter().copied()), c))
        }))
    });
    check(cases, (balanced, 1u32..=4, 1u32..=4), |(p, a, b)| {
        let w = to_bkp(&p, a, b).unwrap();
        prop_assert!(w.variables().iter().all(|x| x.family == Family::W && x.index % 2 == 1));
        prop_assert_eq!(from_bkp(&w, a, b).unwrap(), p);
        Ok(())
    })
}

pub type Suite = fn(u32) -> Result<(), String>;

/// Every suite with its name.
pub fn suites() -> Vec<(&'static str, Suite)> {
    vec![
        ("psdo associativity", psdo_associativity),
        ("dagger anti-homomorphism", dagger_anti_homomorphism),
        ("variational derivative kills dx", variational_kills_derivatives),
        ("antiderivative round trip", antiderivative_round_trip),
        ("substitution homomorphism", substitution_homomorphism),
        ("grading additivity and dx shift", grading_additivity),
        ("slice partition", slice_partition),
        ("serialization round trip", serialization_round_trip),
        ("u -> v normalization round trip", normalization_round_trip),
        ("v <-> w dictionary round trip", dictionary_round_trip),
    ]
}
