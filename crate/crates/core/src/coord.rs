//! Substitution of jet variables by differential polynomials.
//!
//! A [`CoordinateMap`] sends base variables `x[i]` to polynomials; the image
//! of a derived variable `x[i]^(k)` is `dx^k` of the base image, which makes
//! substitution a differential ring homomorphism.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Zero};

use crate::diffpoly::{DiffPoly, Family, JetVariable, Monomial, Rational};
use crate::error::{Error, Result};

/// What a map does with the dispersion parameter `eps`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum EpsRule {
    /// `eps` is left alone.
    #[default]
    Keep,
    /// `eps^2 = c`, so `eps^(2g)` becomes `c^g`. Odd powers are an error.
    Specialize(Rational),
    /// Inverse of [`EpsRule::Specialize`] on `eps`-free input: after
    /// substitution every monomial of jet order `2g` is multiplied by
    /// `(eps^2 / c)^g`. Odd orders are an error.
    Restore(Rational),
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoordinateMap {
    rules: BTreeMap<(Family, u32), DiffPoly>,
    eps: EpsRule,
    strict: bool,
}

impl CoordinateMap {
    /// The empty map. Unmapped variables pass through unchanged.
    pub fn new() -> Self {
        CoordinateMap::default()
    }

    /// Unmapped (non-constant) variables raise [`Error::UnmappedVariable`].
    pub fn strict(mut self) -> Self {
        self.strict = true;
        self
    }

    pub fn with_eps(mut self, eps: EpsRule) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_rule(mut self, family: Family, index: u32, image: DiffPoly) -> Self {
        self.insert(family, index, image);
        self
    }

    pub fn insert(&mut self, family: Family, index: u32, image: DiffPoly) {
        self.rules.insert((family, index), image);
    }

    pub fn rule(&self, family: Family, index: u32) -> Option<&DiffPoly> {
        self.rules.get(&(family, index))
    }

    pub fn rules(&self) -> impl Iterator<Item = (&(Family, u32), &DiffPoly)> {
        self.rules.iter()
    }

    pub fn eps_rule(&self) -> &EpsRule {
        &self.eps
    }

    /// Applies the map to `p`.
    pub fn apply(&self, p: &DiffPoly) -> Result<DiffPoly> {
        let mut images: HashMap<JetVariable, DiffPoly> = HashMap::new();
        let mut out = DiffPoly::zero();
        for (m, c) in p.terms() {
            let mut coeff = c.clone();
            let mut acc = DiffPoly::one();
            let mut keep = Monomial::one();
            match &self.eps {
                EpsRule::Specialize(val) if m.eps_power() > 0 => {
                    if m.eps_power() % 2 == 1 {
                        return Err(Error::OddEpsPower(m.eps_power()));
                    }
                    coeff *= pow_rat(val, m.eps_power() / 2);
                }
                _ => keep = Monomial::from_parts(m.eps_power(), []),
            }
            for &(v, e) in m.factors() {
                let Some(base) = self.rules.get(&(v.family, v.index)) else {
                    if self.strict && !v.is_constant() {
                        return Err(Error::UnmappedVariable(v.base()));
                    }
                    keep = keep.mul(&Monomial::from_parts(0, [(v, e)]));
                    continue;
                };
                let image = images.entry(v).or_insert_with(|| base.dx_n(v.order));
                for _ in 0..e {
                    acc = &acc * &*image;
                }
            }
            out += acc.mul_monomial(&keep, &coeff);
        }
        if let EpsRule::Restore(val) = &self.eps {
            out = restore_eps(&out, val)?;
        }
        Ok(out)
    }

    /// Inverts a triangular map.
    ///
    /// Every rule `(T, i)` must have the form `a x[i] + g` where `x` is the
    /// `source` family, `a` a nonzero rational, and `g` only involves
    /// `source` variables of index below `i` (any order), `eps`, and
    /// variables of other families. The inverse sends `(source, i)` to a
    /// polynomial in the `T` variables; `eps` is kept as is.
    pub fn invert_triangular(&self, source: Family) -> Result<CoordinateMap> {
        let mut inverse = CoordinateMap::new();
        for (&(target, index), image) in &self.rules {
            let lead = JetVariable::new(source, index, 0);
            let a = image.coefficient_of_var(lead);
            if a.is_zero() {
                return Err(Error::NotTriangular(lead));
            }
            let rest = image - &DiffPoly::var(lead).scale(&a);
            for v in rest.variables() {
                if v.family == source && v.index >= index {
                    return Err(Error::NotTriangular(v));
                }
            }
            let rest = inverse.apply(&rest)?;
            let missing = rest.variables().into_iter().find(|v| v.family == source);
            if let Some(v) = missing {
                return Err(Error::NotTriangular(v));
            }
            let img = (&DiffPoly::jet(target, index, 0) - &rest).scale(&(Rational::one() / a));
            inverse.insert(source, index, img);
        }
        Ok(inverse)
    }
}

fn pow_rat(x: &Rational, n: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..n {
        acc *= x;
    }
    acc
}

fn restore_eps(p: &DiffPoly, val: &Rational) -> Result<DiffPoly> {
    let mut out = DiffPoly::zero();
    for (m, c) in p.terms() {
        let order: u32 = m.jet_factors().map(|(v, e)| v.order * e).sum();
        if order % 2 == 1 {
            return Err(Error::OddEpsPower(order));
        }
        let scale = Rational::one() / pow_rat(val, order / 2);
        out.add_term(m.mul(&Monomial::from_parts(order, [])), c * scale);
    }
    Ok(out)
}

impl DiffPoly {
    /// Shorthand for [`CoordinateMap::apply`].
    pub fn substitute(&self, map: &CoordinateMap) -> Result<DiffPoly> {
        map.apply(self)
    }

    /// Replaces `eps^2` by `c`.
    pub fn specialize_eps(&self, c: &Rational) -> Result<DiffPoly> {
        CoordinateMap::new().with_eps(EpsRule::Specialize(c.clone())).apply(self)
    }
}

/// Scalar rescaling `x[i] -> s(i) y[j(i)]` between two families. Used for the
/// index-shifting maps between the `v` and `w` variables.
pub fn linear_relabel(
    from: Family,
    to: Family,
    indices: impl IntoIterator<Item = u32>,
    image: impl Fn(u32) -> (u32, Rational),
) -> CoordinateMap {
    let mut map = CoordinateMap::new();
    for i in indices {
        let (j, s) = image(i);
        map.insert(from, i, DiffPoly::jet(to, j, 0).scale(&s));
    }
    map
}
