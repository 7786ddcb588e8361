//! The BKP reduction of KP: the constraint `L^dagger = -d L d^-1` fixes every
//! even variable `f[2i]` in terms of the odd ones, and the odd flows of KP
//! restrict to a hierarchy in `f[1], f[3], f[5], ...`.
//!
//! Indices are kept literal: the BKP variables are `f[2a-1]` and
//! `w[2a-1]`, and `bkp_flow(i, k)` is the KP flow `S_{2i-1,2k-1}`.
//!
//! ```
//! use laxrec::bkp::BkpTable;
//!
//! let mut bkp = BkpTable::new();
//! assert_eq!(bkp.even_rule(2).to_string(), "-2 f[3]^(1) + f[1]^(3)");
//! assert_eq!(bkp.flow(1, 2).unwrap().to_string(), "3 f[3]^(1) - 2 f[1]^(3) + 6 f[1] f[1]^(1)");
//! ```

use std::collections::{BTreeMap, HashMap};

use crate::coord::CoordinateMap;
use crate::diffpoly::{binomial, rat, DiffPoly, Family, Rational};
use crate::error::{Error, Result};
use crate::kp::KpTable;
use crate::psdo::PsDO;

/// `B_0, ..., B_n` from `sum_{j=0}^{m} C(m+1, j) B_j = [m == 0]`, so `B_1 = -1/2`.
pub fn bernoulli(n: usize) -> Vec<Rational> {
    let mut b: Vec<Rational> = Vec::with_capacity(n + 1);
    for m in 0..=n {
        // C(m+1, m) B_m = [m == 0] - sum_{j<m} C(m+1, j) B_j
        let mut acc = if m == 0 { rat(1) } else { rat(0) };
        for (j, bj) in b.iter().enumerate() {
            acc -= binomial(m as i64 + 1, j as u32) * bj;
        }
        b.push(acc / rat(m as i64 + 1));
    }
    b
}

/// `f[2i]` in terms of odd variables, by the Bernoulli closed form
/// `sum_j C(2i, 2j-1) (1 - 2^(2j)) B_(2j) / j f[2i-2j+1]^(2j-1)`.
pub fn even_elimination(i: u32) -> DiffPoly {
    assert!(i >= 1);
    let b = bernoulli(2 * i as usize);
    let mut out = DiffPoly::zero();
    for j in 1..=i {
        let c = binomial(2 * i as i64, 2 * j - 1) * (rat(1) - rat(1i64 << (2 * j))) * &b[2 * j as usize]
            / rat(j as i64);
        out += DiffPoly::jet(Family::F, 2 * i - 2 * j + 1, 2 * j - 1).scale(&c);
    }
    out
}

/// `f[2i]` from the coefficient-wise form of the constraint,
/// `f[2i] = -i f[2i-1]' - 1/2 sum_{j=1}^{2i-2} C(2i-1, j-1) f[j]^(2i-j)`,
/// with the lower even variables eliminated recursively.
pub fn even_elimination_recursive(i: u32) -> DiffPoly {
    assert!(i >= 1);
    let mut rules = CoordinateMap::new();
    let mut last = DiffPoly::zero();
    for n in 1..=i {
        let mut raw = DiffPoly::jet(Family::F, 2 * n - 1, 1).scale(&rat(-(n as i64)));
        for j in 1..=(2 * n - 2) {
            let c = binomial(2 * n as i64 - 1, j - 1) * Rational::new(1.into(), (-2).into());
            raw += DiffPoly::jet(Family::F, j, 2 * n - j).scale(&c);
        }
        last = rules.apply(&raw).expect("non-strict substitution cannot fail");
        rules.insert(Family::F, 2 * n, last.clone());
    }
    last
}

/// The map `f[2i] -> even_elimination(i)` for `2i <= max_index`.
pub fn even_rules(max_index: u32) -> CoordinateMap {
    let mut map = CoordinateMap::new();
    for i in 1..=max_index / 2 {
        map.insert(Family::F, 2 * i, even_elimination(i));
    }
    map
}

/// `L^dagger + d o L o d^-1` with the even variables eliminated, known down to
/// `floor`. It vanishes identically on the reduction.
pub fn constraint_residual(floor: i64) -> Result<PsDO> {
    let evens = even_rules((-floor) as u32);
    let l = PsDO::lax(floor).map_coeffs(|c| evens.apply(c))?;
    let conj = PsDO::d_pow(1).compose(&l)?.compose(&PsDO::d_pow(-1))?;
    let res = l.dagger()?.add(&conj);
    Ok(res)
}

/// Memoized BKP objects on top of a [`KpTable`].
#[derive(Clone, Debug, Default)]
pub struct BkpTable {
    kp: KpTable,
    evens: CoordinateMap,
    even_max: u32,
    normals: BTreeMap<u32, DiffPoly>,
    inverse: Option<(u32, CoordinateMap)>,
    normal_flows: BTreeMap<(u32, u32), DiffPoly>,
}

fn check_index(name: &str, v: u32) -> Result<()> {
    if v == 0 {
        return Err(Error::OutOfRange(format!("{name} must be at least 1")));
    }
    Ok(())
}

impl BkpTable {
    /// Flows are computed in KP with all variables and reduced afterwards.
    pub fn new() -> Self {
        BkpTable { kp: KpTable::new(), ..BkpTable::default() }
    }

    /// See [`KpTable::with_margin`].
    pub fn with_margin(mut self, margin: u32) -> Self {
        self.kp = self.kp.with_margin(margin);
        self
    }

    /// Flows are computed from a Lax operator that is reduced up front. Gives
    /// the same objects as [`BkpTable::new`]; used as a cross-check.
    pub fn reduced_first(max_index: u32) -> Self {
        let evens = even_rules(max_index);
        BkpTable { kp: KpTable::with_lax_map(evens.clone()), evens, even_max: max_index, ..Default::default() }
    }

    /// `f[2i]` in odd variables.
    pub fn even_rule(&mut self, i: u32) -> DiffPoly {
        self.ensure_evens(2 * i);
        self.evens.rule(Family::F, 2 * i).cloned().expect("rule just ensured")
    }

    fn ensure_evens(&mut self, max_index: u32) {
        if max_index > self.even_max {
            for i in self.even_max / 2 + 1..=max_index / 2 {
                self.evens.insert(Family::F, 2 * i, even_elimination(i));
            }
            self.even_max = max_index;
        }
    }

    fn reduce(&mut self, p: &DiffPoly) -> Result<DiffPoly> {
        let top = p.variables().iter().filter(|v| v.family == Family::F).map(|v| v.index).max().unwrap_or(0);
        self.ensure_evens(top);
        self.evens.apply(p)
    }

    /// `S^BKP_{i,k}`: `S_{2i-1,2k-1}` with the even variables eliminated.
    pub fn flow(&mut self, i: u32, k: u32) -> Result<DiffPoly> {
        check_index("i", i)?;
        check_index("k", k)?;
        let s = self.kp.flow(2 * i - 1, 2 * k - 1)?;
        self.reduce(&s)
    }

    /// `w[2a-1]` in the odd `f` variables.
    pub fn normal(&mut self, a: u32) -> Result<DiffPoly> {
        check_index("alpha", a)?;
        if let Some(w) = self.normals.get(&a) {
            return Ok(w.clone());
        }
        let w = self.kp.normal(2 * a - 1)?;
        let w = self.reduce(&w)?;
        self.normals.insert(a, w.clone());
        Ok(w)
    }

    /// The map `f[2a-1] -> f_(2a-1)(w_odd)` for `a <= a_max`.
    pub fn inverse_normals(&mut self, a_max: u32) -> Result<CoordinateMap> {
        if let Some((n, map)) = &self.inverse {
            if *n >= a_max {
                return Ok(map.clone());
            }
        }
        let mut fwd = CoordinateMap::new();
        for a in 1..=a_max {
            fwd.insert(Family::W, 2 * a - 1, self.normal(a)?);
        }
        let inv = fwd.invert_triangular(Family::F)?;
        self.inverse = Some((a_max, inv.clone()));
        Ok(inv)
    }

    /// `f[2a-1]` in the odd `w` variables.
    pub fn inverse_normal(&mut self, a: u32) -> Result<DiffPoly> {
        check_index("alpha", a)?;
        let inv = self.inverse_normals(a)?;
        Ok(inv.rule(Family::F, 2 * a - 1).cloned().expect("rule just built"))
    }

    /// The time derivative `d p / d T_(2k-1)` of a polynomial in odd `f`.
    pub fn evolve(&mut self, p: &DiffPoly, k: u32) -> Result<DiffPoly> {
        let mut rates = HashMap::new();
        for v in p.variables() {
            if v.family == Family::F && !rates.contains_key(&v.index) {
                if v.index % 2 == 0 {
                    return Err(Error::OutOfRange(format!("even variable {v} in a BKP polynomial")));
                }
                rates.insert(v.index, self.flow(v.index.div_ceil(2), k)?);
            }
        }
        p.evolve(|fam, i| (fam == Family::F).then(|| rates.get(&i).cloned()).flatten(), None)
    }

    /// `R^BKP_{ab}`, defined by `d w[2a-1] / d T_(2b-1) = dx R^BKP_{ab}`.
    pub fn normal_flow(&mut self, a: u32, b: u32) -> Result<DiffPoly> {
        check_index("alpha", a)?;
        check_index("beta", b)?;
        if let Some(r) = self.normal_flows.get(&(a, b)) {
            return Ok(r.clone());
        }
        let w = self.normal(a)?;
        let dw = self.evolve(&w, b)?;
        let inv = self.inverse_normals(a + b - 1)?;
        let r = inv.apply(&dw)?.antiderivative()?;
        self.normal_flows.insert((a, b), r.clone());
        Ok(r)
    }
}
