//! Seed polynomials of the spin DR hierarchy, the `u -> v` normalization,
//! and the dictionary between the `Q` system in `v` and BKP in `w`:
//!
//! ```text
//! v_a = -w[2a-1] / (2a-1),   t^b = (2b-1) T_(2b-1),   eps^2 = 2
//! ```
//!
//! Under this dictionary `R^BKP_{ab} = -(2a-1)(2b-1) Q_{ab}`: pulling
//! `d v_a / d t^b = dx Q_{ab}` through the linear change of variables gives
//! `d w[2a-1] / d T_(2b-1) = -(2a-1)(2b-1) dx Q_{ab}`.
//!
//! ```
//! use laxrec::equivalence::{fixture, to_bkp};
//!
//! let q22 = fixture("Q22").unwrap().poly;
//! let r22 = to_bkp(&q22, 2, 2).unwrap();
//! assert_eq!(r22.to_string(), "9/5 w[5] - w[3]^(2) + 1/5 w[1]^(4) + 3 w[1]^3 - 3 w[1] w[3] + 3 w[1] w[1]^(2)");
//! ```

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::coord::{CoordinateMap, EpsRule};
use crate::diffpoly::{rat, ratio, DiffPoly, Family, Rational};
use crate::error::{Error, Result};

/// A stored seed polynomial with a short description of where it comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fixture {
    pub name: &'static str,
    pub poly: DiffPoly,
    pub provenance: &'static str,
}

const FIXTURES: &[(&str, &str, &str)] = &[
    ("P11", "u[1]", "P_{a,1} = u_a (string equation), a = 1"),
    ("P21", "u[2]", "P_{a,1} = u_a (string equation), a = 2"),
    ("P31", "u[3]", "P_{a,1} = u_a (string equation), a = 3"),
    ("P12", "u[2] + 1/8 eps^2 u[1]^(2)", "P_{1,2}: genus 0 and 1 intersection numbers"),
    (
        "P13",
        "u[3] + 3/8 eps^2 u[2]^(2) + 1/12 eps^2 u[1]^(2) u[1] + 1/12 eps^2 u[1]^(1) u[1]^(1) + 37/1152 eps^4 u[1]^(4)",
        "P_{1,3}: intersection numbers up to genus 2",
    ),
    (
        "P22",
        "u[3] + u[1] u[2] + 1/3 u[1]^3 + 1/12 eps^2 u[2]^(2) + 1/24 eps^2 u[1] u[1]^(2) + 1/12 eps^2 u[1]^(1) u[1]^(1) + 7/5760 eps^4 u[1]^(4)",
        "P_{2,2}: intersection numbers up to genus 2",
    ),
    (
        "Q22",
        "v[3] + v[1] v[2] + 1/3 v[1]^3 - 1/6 eps^2 v[2]^(2) - 1/6 eps^2 v[1] v[1]^(2) + 1/180 eps^4 v[1]^(4)",
        "Q_{2,2}: normal form of the reduced spin DR hierarchy",
    ),
];

/// Every stored fixture, in a fixed order.
pub fn load_fixtures() -> Vec<Fixture> {
    FIXTURES
        .iter()
        .map(|(name, text, provenance)| Fixture {
            name,
            poly: text.parse().expect("fixture text is well formed"),
            provenance,
        })
        .collect()
}

pub fn fixture(name: &str) -> Option<Fixture> {
    load_fixtures().into_iter().find(|f| f.name == name)
}

/// `P_{a,b}` for the pairs with a stored value.
pub fn p_spin(a: u32, b: u32) -> Option<DiffPoly> {
    if b == 1 {
        return Some(DiffPoly::jet(Family::U, a, 0));
    }
    fixture(&format!("P{a}{b}")).map(|f| f.poly)
}

/// The forward map `v_b -> P_{1,b}(u)` for `b <= 3`; its triangular inverse
/// expresses `u` in terms of `v`.
pub fn u_to_v() -> CoordinateMap {
    let mut map = CoordinateMap::new();
    for b in 1..=3 {
        map.insert(Family::V, b, p_spin(1, b).expect("stored"));
    }
    map
}

/// `u_b` in terms of `v`, for `b <= 3`.
pub fn v_to_u() -> CoordinateMap {
    u_to_v().invert_triangular(Family::U).expect("the normalization is triangular")
}

/// `Q_{ab}` from the `u`-system `d u_i / d t^b = dx P_{i,b}`:
/// `dx Q_{ab} = d v_a / d t^b = sum d P_{1,a} / d u_i^(j) dx^(j+1) P_{i,b}`,
/// re-expressed in `v`.
pub fn q_from_p(a: u32, b: u32) -> Result<DiffPoly> {
    let p1a = p_spin(1, a).ok_or_else(|| Error::OutOfRange(format!("P_(1,{a}) is not stored")))?;
    let mut rates = BTreeMap::new();
    for v in p1a.variables() {
        if v.family == Family::U {
            let p = p_spin(v.index, b).ok_or_else(|| Error::OutOfRange(format!("P_({},{b}) is not stored", v.index)))?;
            rates.insert(v.index, p.dx());
        }
    }
    let dq = p1a.evolve(|fam, i| (fam == Family::U).then(|| rates.get(&i).cloned()).flatten(), None)?;
    v_to_u().apply(&dq)?.antiderivative()
}

fn odd(a: u32) -> i64 {
    2 * a as i64 - 1
}

/// `v_a -> -w[2a-1]/(2a-1)` together with `eps^2 = 2`.
pub fn v_to_w_map(max_index: u32) -> CoordinateMap {
    let mut map = CoordinateMap::new().with_eps(EpsRule::Specialize(rat(2))).strict();
    for a in 1..=max_index {
        map.insert(Family::V, a, DiffPoly::jet(Family::W, 2 * a - 1, 0).scale(&ratio(-1, odd(a))));
    }
    map
}

/// `w[2a-1] -> -(2a-1) v_a`, restoring `eps` from the derivative count.
pub fn w_to_v_map(max_index: u32) -> CoordinateMap {
    let mut map = CoordinateMap::new().with_eps(EpsRule::Restore(rat(2))).strict();
    for a in 1..=max_index {
        map.insert(Family::W, 2 * a - 1, DiffPoly::jet(Family::V, a, 0).scale(&rat(-odd(a))));
    }
    map
}

fn top_index(p: &DiffPoly, family: Family) -> u32 {
    p.variables().iter().filter(|v| v.family == family).map(|v| v.index).max().unwrap_or(0)
}

/// The BKP flow predicted by `Q_{ab}`: `-(2a-1)(2b-1) Q_{ab}` in `w`.
pub fn to_bkp(q: &DiffPoly, a: u32, b: u32) -> Result<DiffPoly> {
    let mapped = v_to_w_map(top_index(q, Family::V)).apply(q)?;
    Ok(mapped.scale(&rat(-odd(a) * odd(b))))
}

/// The `Q_{ab}` corresponding to a BKP flow `R^BKP_{ab}`.
pub fn from_bkp(r: &DiffPoly, a: u32, b: u32) -> Result<DiffPoly> {
    let top = top_index(r, Family::W);
    if let Some(v) = r.variables().into_iter().find(|v| v.family == Family::W && v.index % 2 == 0) {
        return Err(Error::UnmappedVariable(v));
    }
    let mapped = w_to_v_map(top.div_ceil(2)).apply(r)?;
    Ok(mapped.scale(&(Rational::from_integer((-1).into()) / rat(odd(a) * odd(b)))))
}

/// One comparison `R^BKP_{ab}` against the image of `Q_{ab}`.
#[derive(Clone, Debug, Serialize)]
pub struct Verification {
    pub alpha: u32,
    pub beta: u32,
    pub pass: bool,
    /// `R^BKP - to_bkp(Q)`, rendered; `"0"` on success.
    pub difference: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

pub fn verify_main(a: u32, b: u32, q: &DiffPoly, r_bkp: &DiffPoly) -> Verification {
    let start = Instant::now();
    let diff = match to_bkp(q, a, b) {
        Ok(image) => r_bkp - &image,
        Err(e) => return Verification { alpha: a, beta: b, pass: false, difference: e.to_string(), elapsed: start.elapsed() },
    };
    Verification { alpha: a, beta: b, pass: diff.is_zero(), difference: diff.to_string(), elapsed: start.elapsed() }
}
