//! `dx`, partial and variational derivatives, anti-derivatives and the
//! chain rule along an evolutionary flow.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use num_traits::One;

use super::{rat, DiffPoly, Family, JetVariable, Rational};
use crate::error::{Error, Result};

impl DiffPoly {
    /// The total x-derivative, extended from `dx x[i]^(k) = x[i]^(k+1)` by
    /// the Leibniz rule. Undetermined constants and `eps` are constants.
    pub fn dx(&self) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in self.terms() {
            for &(v, e) in m.factors() {
                if v.is_constant() {
                    continue;
                }
                out.add_term(m.replace_one(v, v.derivative()), c * rat(e as i64));
            }
        }
        out
    }

    pub fn dx_n(&self, n: u32) -> DiffPoly {
        let mut p = self.clone();
        for _ in 0..n {
            p = p.dx();
        }
        p
    }

    /// Formal partial derivative with respect to a single jet variable.
    pub fn partial(&self, x: JetVariable) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m, c) in self.terms() {
            let e = m.exponent_of(x);
            if e == 0 {
                continue;
            }
            let mut n = m.clone();
            n.divide_var(x);
            out.add_term(n, c * rat(e as i64));
        }
        out
    }

    /// `sum_k (-dx)^k d/d x[index]^(k)`.
    pub fn variational_derivative(&self, family: Family, index: u32) -> DiffPoly {
        let Some(top) = self.max_order_of(family, index) else {
            return DiffPoly::zero();
        };
        let mut out = DiffPoly::zero();
        for k in 0..=top {
            let term = self.partial(JetVariable::new(family, index, k)).dx_n(k);
            if k % 2 == 0 {
                out += term;
            } else {
                out -= term;
            }
        }
        out
    }

    /// Exactness test: every variational derivative vanishes and there is
    /// no term free of jet variables.
    pub fn is_exact(&self) -> bool {
        if self.terms().any(|(m, _)| !m.has_jet_factors()) {
            return false;
        }
        let bases: std::collections::BTreeSet<(Family, u32)> = self
            .variables()
            .into_iter()
            .filter(|v| !v.is_constant())
            .map(|v| (v.family, v.index))
            .collect();
        bases.into_iter().all(|(f, i)| self.variational_derivative(f, i).is_zero())
    }

    /// The unique `q` with zero constant term and `dx q = self`.
    pub fn antiderivative(&self) -> Result<DiffPoly> {
        let (q, remainder) = integrate(self);
        if remainder.is_zero() {
            Ok(q)
        } else {
            Err(Error::NotExact { remainder })
        }
    }

    /// Time derivative along the flow `d x[i] / dt = rate(x, i)`.
    ///
    /// Derived variables evolve by `d x[i]^(k) / dt = dx^k rate(x, i)`.
    /// Terms with `eps` power above `max_eps` are dropped along the way.
    pub fn evolve(
        &self,
        rate: impl Fn(Family, u32) -> Option<DiffPoly>,
        max_eps: Option<u32>,
    ) -> Result<DiffPoly> {
        let mut cache: HashMap<JetVariable, DiffPoly> = HashMap::new();
        let mut out = DiffPoly::zero();
        for (m, c) in self.terms() {
            for &(v, e) in m.factors() {
                if v.is_constant() {
                    continue;
                }
                if let Entry::Vacant(slot) = cache.entry(v) {
                    let base = rate(v.family, v.index).ok_or(Error::UnmappedVariable(v.base()))?;
                    slot.insert(base.dx_n(v.order));
                }
                let mut rest = m.clone();
                rest.divide_var(v);
                if let Some(cap) = max_eps {
                    if rest.eps_power() > cap {
                        continue;
                    }
                }
                let factor = &cache[&v];
                let coeff = c * rat(e as i64);
                for (n, d) in factor.terms() {
                    if let Some(cap) = max_eps {
                        if rest.eps_power() + n.eps_power() > cap {
                            continue;
                        }
                    }
                    out.add_term(rest.mul(n), &coeff * d);
                }
            }
        }
        Ok(out)
    }
}

/// Splits `p` as `dx q + r`.
///
/// The reduction runs from the highest derivative order down. At order `n`
/// every term linear in a single order-`n` variable is integrated with the
/// Euler homotopy in the order-`n-1` variables; whatever is left at order
/// `n` afterwards cannot be a total derivative and is moved to `r`. The
/// algorithm is linear over the undetermined constants, so for symbolic input
/// the coefficients of `r` are exactly the exactness conditions. `r == 0`
/// iff `p` is a total derivative.
pub fn integrate(p: &DiffPoly) -> (DiffPoly, DiffPoly) {
    let mut rest = p.clone();
    let mut q = DiffPoly::zero();
    let mut remainder = DiffPoly::zero();
    loop {
        let Some(top) = rest.terms().filter_map(|(m, _)| m.max_order()).max() else {
            remainder += rest;
            break;
        };
        if top == 0 {
            remainder += rest;
            break;
        }
        let mut step = DiffPoly::zero();
        let mut blocked = DiffPoly::zero();
        for (m, c) in rest.terms() {
            if m.max_order() != Some(top) {
                continue;
            }
            let top_factors: Vec<_> = m.jet_factors().filter(|(v, _)| v.order == top).collect();
            match top_factors.as_slice() {
                [(v, 1)] => {
                    let lowered = JetVariable { order: top - 1, ..*v };
                    let m0 = m.replace_one(*v, lowered);
                    let k: u32 = m0.jet_factors().filter(|(w, _)| w.order == top - 1).map(|(_, e)| e).sum();
                    step.add_term(m0, c / rat(k as i64));
                }
                _ => blocked.add_term(m.clone(), c.clone()),
            }
        }
        rest -= step.dx();
        rest -= &blocked;
        remainder += blocked;
        let leftover = rest.filter(|m, _| m.max_order() == Some(top));
        rest -= &leftover;
        remainder += leftover;
        q += step;
    }
    (q, remainder)
}

/// Generalized binomial coefficient `C(n, p)` for any integer `n`.
pub fn binomial(n: i64, p: u32) -> Rational {
    let mut acc = Rational::one();
    for j in 0..p as i64 {
        acc = acc * rat(n - j) / rat(j + 1);
    }
    acc
}
