//! The KP hierarchy `dL/dT_k = [(L^k)_+, L]` for `L = d + sum f[i] d^-i`.
//!
//! ```
//! use laxrec::kp::KpTable;
//!
//! let mut kp = KpTable::new();
//! assert_eq!(kp.flow(1, 3).unwrap().to_string(), "3 f[3]^(1) + 3 f[2]^(2) + f[1]^(3) + 6 f[1] f[1]^(1)");
//! assert_eq!(kp.normal(2).unwrap().to_string(), "2 f[2] + f[1]^(1)");
//! ```

use std::collections::{BTreeMap, HashMap};

use crate::coord::CoordinateMap;
use crate::diffpoly::{DiffPoly, Family};
use crate::error::{Error, Result};
use crate::psdo::{lax_bracket, PsDO};

/// Memoized KP objects: the flows `S_{i,k}`, the normal coordinates
/// `w_a = res L^a`, their inverse, and the normal-form flows `R_{ab}`.
///
/// A table optionally carries a substitution applied to the coefficients of
/// `L` before anything is computed; the BKP module uses it to build the
/// reduced Lax operator directly.
#[derive(Clone, Debug)]
pub struct KpTable {
    lax_map: Option<CoordinateMap>,
    margin: u32,
    brackets: HashMap<u32, PsDO>,
    flows: BTreeMap<(u32, u32), DiffPoly>,
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

impl Default for KpTable {
    fn default() -> Self {
        KpTable::new()
    }
}

impl KpTable {
    pub fn new() -> Self {
        KpTable {
            lax_map: None,
            margin: 1,
            brackets: HashMap::new(),
            flows: BTreeMap::new(),
            normals: BTreeMap::new(),
            inverse: None,
            normal_flows: BTreeMap::new(),
        }
    }

    /// Number of extra orders of `d^-1` kept below each requested flow
    /// coefficient (default 1). Any margin gives the same flows.
    pub fn with_margin(mut self, margin: u32) -> Self {
        self.margin = margin;
        self.flows.clear();
        self
    }

    /// A table whose Lax operator has `map` applied to its coefficients.
    pub fn with_lax_map(map: CoordinateMap) -> Self {
        KpTable { lax_map: Some(map), ..KpTable::new() }
    }

    /// The Lax operator known down to `floor`.
    pub fn lax(&self, floor: i64) -> Result<PsDO> {
        let l = PsDO::lax(floor);
        match &self.lax_map {
            None => Ok(l),
            Some(map) => l.map_coeffs(|c| map.apply(c)),
        }
    }

    fn bracket(&mut self, k: u32, floor: i64) -> Result<&PsDO> {
        let fresh = match self.brackets.get(&k) {
            Some(b) => b.floor().is_some_and(|f| f > floor),
            None => true,
        };
        if fresh {
            let l = self.lax(floor - k as i64)?;
            self.brackets.insert(k, lax_bracket(k, &l)?);
        }
        Ok(&self.brackets[&k])
    }

    /// `S_{i,k}`, the coefficient of `d^-i` in `[(L^k)_+, L]`.
    pub fn flow(&mut self, i: u32, k: u32) -> Result<DiffPoly> {
        check_index("i", i)?;
        check_index("k", k)?;
        if let Some(s) = self.flows.get(&(i, k)) {
            return Ok(s.clone());
        }
        let s = self.bracket(k, -(i as i64) - self.margin as i64)?.coeff(-(i as i64))?;
        self.flows.insert((i, k), s.clone());
        Ok(s)
    }

    /// `w_a = res L^a` in the `f` variables.
    pub fn normal(&mut self, a: u32) -> Result<DiffPoly> {
        check_index("alpha", a)?;
        if let Some(w) = self.normals.get(&a) {
            return Ok(w.clone());
        }
        let w = self.lax(-(a as i64) - 1)?.power(a)?.residue()?;
        self.normals.insert(a, w.clone());
        Ok(w)
    }

    /// The map `f[a] -> f_a(w)` for `a <= a_max`, by triangular inversion of
    /// `w_a = a f[a] + (terms in f[<a])`.
    pub fn inverse_normals(&mut self, a_max: u32) -> Result<CoordinateMap> {
        if let Some((n, map)) = &self.inverse {
            if *n >= a_max {
                return Ok(map.clone());
            }
        }
        let mut fwd = CoordinateMap::new();
        for a in 1..=a_max {
            fwd.insert(Family::W, a, self.normal(a)?);
        }
        let inv = fwd.invert_triangular(Family::F)?;
        self.inverse = Some((a_max, inv.clone()));
        Ok(inv)
    }

    /// The time derivative `d p / d T_k` of a polynomial in `f`.
    pub fn evolve(&mut self, p: &DiffPoly, k: u32) -> Result<DiffPoly> {
        let mut rates = HashMap::new();
        for v in p.variables() {
            if v.family == Family::F && !rates.contains_key(&v.index) {
                rates.insert(v.index, self.flow(v.index, k)?);
            }
        }
        p.evolve(|fam, i| (fam == Family::F).then(|| rates.get(&i).cloned()).flatten(), None)
    }

    /// `R_{ab}`, defined by `d w_a / d T_b = dx R_{ab}`, in the `w` variables.
    pub fn normal_flow(&mut self, a: u32, b: u32) -> Result<DiffPoly> {
        check_index("alpha", a)?;
        check_index("beta", b)?;
        if let Some(r) = self.normal_flows.get(&(a, b)) {
            return Ok(r.clone());
        }
        let w = self.normal(a)?;
        let dw = self.evolve(&w, b)?;
        let inv = self.inverse_normals(a + b)?;
        let r = inv.apply(&dw)?.antiderivative()?;
        self.normal_flows.insert((a, b), r.clone());
        Ok(r)
    }
}
