//! Differential polynomials with exact rational coefficients.
//!
//! A [`DiffPoly`] is a finite sum of rational multiples of monomials in jet
//! variables `x[i]^(k)` (the `k`-th x-derivative of the dependent variable
//! `x[i]`) and the formal dispersion parameter `eps`. The family tag of a jet
//! variable is an open set of symbols; the families `f`, `u`, `v` and `w` are
//! the ones used by the hierarchies in this crate.
//!
//! Family [`Family::PARAM`] is special: its variables are undetermined
//! constants. They are annihilated by `dx`, carry no grading and are skipped by
//! every jet-level operation, which lets the reconstruction engine compute with
//! symbolic coefficients without a second polynomial type.

mod calculus;
mod slice;
mod structured;
mod text;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub use calculus::{binomial, integrate};
pub use slice::Selector;
pub use structured::{StructuredPoly, StructuredTerm, STRUCTURED_VERSION};

/// Exact rational numbers, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

/// Shorthand for an integer-valued [`Rational`].
pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Shorthand for `n / d`. Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Symbol tag of a family of dependent variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Family(pub char);

impl Family {
    pub const F: Family = Family('f');
    pub const U: Family = Family('u');
    pub const V: Family = Family('v');
    pub const W: Family = Family('w');
    /// Undetermined constants; see the module docs.
    pub const PARAM: Family = Family('c');

    pub fn is_constant(self) -> bool {
        self == Family::PARAM
    }

    /// Weight `deg` of `x[index]^(order)` for this family.
    ///
    /// The `u` and `v` families use `2 index + order`; every other family
    /// uses `index + 1 + order`.
    pub fn weight(self, index: u32, order: u32) -> i64 {
        match self.0 {
            'c' => 0,
            'u' | 'v' => 2 * index as i64 + order as i64,
            _ => index as i64 + 1 + order as i64,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The jet variable `family[index]^(order)`.
///
/// The derived ordering (family, then index, then order) is the canonical
/// variable order used everywhere in the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct JetVariable {
    pub family: Family,
    pub index: u32,
    pub order: u32,
}

impl JetVariable {
    pub fn new(family: Family, index: u32, order: u32) -> Self {
        assert!(index >= 1, "jet variable indices start at 1");
        JetVariable { family, index, order }
    }

    /// The undetermined constant with the given 1-based id.
    pub fn param(id: u32) -> Self {
        JetVariable::new(Family::PARAM, id, 0)
    }

    pub fn base(self) -> Self {
        JetVariable { order: 0, ..self }
    }

    pub fn derivative(self) -> Self {
        JetVariable { order: self.order + 1, ..self }
    }

    pub fn is_constant(self) -> bool {
        self.family.is_constant()
    }
}

impl fmt::Display for JetVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.order == 0 {
            write!(f, "{}[{}]", self.family, self.index)
        } else {
            write!(f, "{}[{}]^({})", self.family, self.index, self.order)
        }
    }
}

/// The three gradings of a monomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub struct GradingVector {
    /// Differential degree; `eps` counts as -1.
    pub dx_deg: i64,
    /// Weight `deg`, family dependent; `eps` counts as 0.
    pub weight_deg: i64,
    /// Number of jet factors.
    pub tilde_deg: i64,
}

impl Add for GradingVector {
    type Output = GradingVector;

    fn add(self, rhs: GradingVector) -> GradingVector {
        GradingVector {
            dx_deg: self.dx_deg + rhs.dx_deg,
            weight_deg: self.weight_deg + rhs.weight_deg,
            tilde_deg: self.tilde_deg + rhs.tilde_deg,
        }
    }
}

/// `eps^eps_power` times a product of jet variables.
///
/// Factors are sorted by the canonical variable order and never carry a zero
/// exponent. Monomials are ordered by ascending `eps` power and then by the
/// factor list in descending lexicographic order, so that in rendered output
/// the highest-index variables come first.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial {
    eps_power: u32,
    factors: Vec<(JetVariable, u32)>,
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.eps_power
            .cmp(&other.eps_power)
            .then_with(|| other.factors.cmp(&self.factors))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn from_parts(eps_power: u32, factors: impl IntoIterator<Item = (JetVariable, u32)>) -> Self {
        let mut m = Monomial { eps_power, factors: Vec::new() };
        for (v, e) in factors {
            m.multiply_var(v, e);
        }
        m
    }

    pub fn var(v: JetVariable) -> Self {
        Monomial { eps_power: 0, factors: vec![(v, 1)] }
    }

    pub fn eps_power(&self) -> u32 {
        self.eps_power
    }

    pub fn factors(&self) -> &[(JetVariable, u32)] {
        &self.factors
    }

    pub fn exponent_of(&self, v: JetVariable) -> u32 {
        match self.factors.binary_search_by(|(w, _)| w.cmp(&v)) {
            Ok(i) => self.factors[i].1,
            Err(_) => 0,
        }
    }

    fn multiply_var(&mut self, v: JetVariable, e: u32) {
        if e == 0 {
            return;
        }
        match self.factors.binary_search_by(|(w, _)| w.cmp(&v)) {
            Ok(i) => self.factors[i].1 += e,
            Err(i) => self.factors.insert(i, (v, e)),
        }
    }

    /// Divides by `v` once. The caller guarantees `v` divides the monomial.
    fn divide_var(&mut self, v: JetVariable) {
        let i = self
            .factors
            .binary_search_by(|(w, _)| w.cmp(&v))
            .expect("variable not present in monomial");
        if self.factors[i].1 == 1 {
            self.factors.remove(i);
        } else {
            self.factors[i].1 -= 1;
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < other.factors.len() {
            let (a, b) = (self.factors[i], other.factors[j]);
            match a.0.cmp(&b.0) {
                std::cmp::Ordering::Less => {
                    out.push(a);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a.0, a.1 + b.1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.factors[i..]);
        out.extend_from_slice(&other.factors[j..]);
        Monomial { eps_power: self.eps_power + other.eps_power, factors: out }
    }

    /// The monomial with `from` replaced once by `to`.
    pub(crate) fn replace_one(&self, from: JetVariable, to: JetVariable) -> Monomial {
        let mut m = self.clone();
        m.divide_var(from);
        m.multiply_var(to, 1);
        m
    }

    pub fn grading(&self) -> GradingVector {
        let mut g = GradingVector { dx_deg: -(self.eps_power as i64), ..Default::default() };
        for &(v, e) in &self.factors {
            if v.is_constant() {
                continue;
            }
            let e = e as i64;
            g.dx_deg += v.order as i64 * e;
            g.weight_deg += v.family.weight(v.index, v.order) * e;
            g.tilde_deg += e;
        }
        g
    }

    /// Highest index of a non-constant jet factor, or 0 for a constant.
    pub fn top_index(&self) -> u32 {
        self.jet_factors().map(|(v, _)| v.index).max().unwrap_or(0)
    }

    /// Highest derivative order of a non-constant jet factor.
    pub fn max_order(&self) -> Option<u32> {
        self.jet_factors().map(|(v, _)| v.order).max()
    }

    pub fn jet_factors(&self) -> impl Iterator<Item = &(JetVariable, u32)> {
        self.factors.iter().filter(|(v, _)| !v.is_constant())
    }

    pub fn has_jet_factors(&self) -> bool {
        self.jet_factors().next().is_some()
    }

    /// Splits into the part made of undetermined constants and the rest.
    pub fn split_params(&self) -> (Monomial, Monomial) {
        let (p, j): (Vec<_>, Vec<_>) = self.factors.iter().partition(|(v, _)| v.is_constant());
        (
            Monomial { eps_power: 0, factors: p },
            Monomial { eps_power: self.eps_power, factors: j },
        )
    }

    /// Total degree in undetermined constants.
    pub fn param_degree(&self) -> u32 {
        self.factors.iter().filter(|(v, _)| v.is_constant()).map(|(_, e)| e).sum()
    }
}

/// A differential polynomial: a finite map from monomials to nonzero rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct DiffPoly {
    terms: BTreeMap<Monomial, Rational>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly::default()
    }

    pub fn one() -> Self {
        DiffPoly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        DiffPoly::term(c, Monomial::one())
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut p = DiffPoly::zero();
        p.add_term(m, c);
        p
    }

    pub fn var(v: JetVariable) -> Self {
        DiffPoly::term(Rational::one(), Monomial::var(v))
    }

    /// `family[index]^(order)` as a polynomial.
    pub fn jet(family: Family, index: u32, order: u32) -> Self {
        DiffPoly::var(JetVariable::new(family, index, order))
    }

    pub fn eps_pow(e: u32) -> Self {
        DiffPoly::term(Rational::one(), Monomial::from_parts(e, []))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn into_terms(self) -> impl Iterator<Item = (Monomial, Rational)> {
        self.terms.into_iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Coefficient of a single jet variable to the first power.
    pub fn coefficient_of_var(&self, v: JetVariable) -> Rational {
        self.coefficient(&Monomial::var(v))
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = DiffPoly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn scale(&self, c: &Rational) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly { terms: self.terms.iter().map(|(m, d)| (m.clone(), d * c)).collect() }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> DiffPoly {
        if c.is_zero() {
            return DiffPoly::zero();
        }
        DiffPoly { terms: self.terms.iter().map(|(n, d)| (n.mul(m), d * c)).collect() }
    }

    /// Product, discarding every term whose `eps` power exceeds `max_eps`.
    pub fn mul_truncated(&self, other: &DiffPoly, max_eps: Option<u32>) -> DiffPoly {
        let mut out = DiffPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                if let Some(cap) = max_eps {
                    if m1.eps_power + m2.eps_power > cap {
                        continue;
                    }
                }
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> DiffPoly {
        let mut acc = DiffPoly::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Drops every term with `eps` power above `max_eps`.
    pub fn truncate_eps(&self, max_eps: u32) -> DiffPoly {
        self.filter(|m, _| m.eps_power <= max_eps)
    }

    pub fn filter(&self, mut keep: impl FnMut(&Monomial, &Rational) -> bool) -> DiffPoly {
        DiffPoly {
            terms: self
                .terms
                .iter()
                .filter(|(m, c)| keep(m, c))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// All jet variables occurring in the polynomial, constants included.
    pub fn variables(&self) -> std::collections::BTreeSet<JetVariable> {
        self.terms.keys().flat_map(|m| m.factors.iter().map(|(v, _)| *v)).collect()
    }

    /// Highest derivative order of `family[index]` present, if any.
    pub fn max_order_of(&self, family: Family, index: u32) -> Option<u32> {
        self.variables()
            .into_iter()
            .filter(|v| v.family == family && v.index == index)
            .map(|v| v.order)
            .max()
    }

    /// The common weight of all terms, or `None` if the polynomial is zero or
    /// not weight-homogeneous.
    pub fn homogeneous_weight(&self) -> Option<i64> {
        let mut it = self.terms.keys().map(|m| m.grading().weight_deg);
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    /// True if every monomial has even differential degree (`eps` counted as -1).
    pub fn has_even_dx_degree(&self) -> bool {
        self.terms.keys().all(|m| m.grading().dx_deg % 2 == 0)
    }

    pub fn max_eps_power(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.eps_power).max()
    }

    /// Groups terms by their jet part. Each value is a polynomial in the
    /// undetermined constants only.
    pub fn collect_by_jet_part(&self) -> BTreeMap<Monomial, DiffPoly> {
        let mut out: BTreeMap<Monomial, DiffPoly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let (params, jet) = m.split_params();
            out.entry(jet).or_default().add_term(params, c.clone());
        }
        out
    }

    pub fn param_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::param_degree).max().unwrap_or(0)
    }

    /// Largest absolute numerator or denominator among the coefficients.
    pub fn height(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.numer().abs().max(c.denom().clone()))
            .max()
            .unwrap_or_else(BigInt::zero)
    }
}

impl From<JetVariable> for DiffPoly {
    fn from(v: JetVariable) -> Self {
        DiffPoly::var(v)
    }
}

impl From<Rational> for DiffPoly {
    fn from(c: Rational) -> Self {
        DiffPoly::constant(c)
    }
}

impl AddAssign<&DiffPoly> for DiffPoly {
    fn add_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl AddAssign for DiffPoly {
    fn add_assign(&mut self, rhs: DiffPoly) {
        if self.terms.len() < rhs.terms.len() {
            let lhs = std::mem::replace(self, rhs);
            *self += &lhs;
            return;
        }
        for (m, c) in rhs.terms {
            self.add_term(m, c);
        }
    }
}

impl SubAssign<&DiffPoly> for DiffPoly {
    fn sub_assign(&mut self, rhs: &DiffPoly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl SubAssign for DiffPoly {
    fn sub_assign(&mut self, rhs: DiffPoly) {
        for (m, c) in rhs.terms {
            self.add_term(m, -c);
        }
    }
}

impl Add<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;

    fn add(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for DiffPoly {
    type Output = DiffPoly;

    fn add(mut self, rhs: DiffPoly) -> DiffPoly {
        self += rhs;
        self
    }
}

impl Sub<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;

    fn sub(self, rhs: &DiffPoly) -> DiffPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Sub for DiffPoly {
    type Output = DiffPoly;

    fn sub(mut self, rhs: DiffPoly) -> DiffPoly {
        self -= rhs;
        self
    }
}

impl Neg for &DiffPoly {
    type Output = DiffPoly;

    fn neg(self) -> DiffPoly {
        DiffPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
}

impl Neg for DiffPoly {
    type Output = DiffPoly;

    fn neg(mut self) -> DiffPoly {
        for c in self.terms.values_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

impl Mul<&DiffPoly> for &DiffPoly {
    type Output = DiffPoly;

    fn mul(self, rhs: &DiffPoly) -> DiffPoly {
        self.mul_truncated(rhs, None)
    }
}

impl Mul for DiffPoly {
    type Output = DiffPoly;

    fn mul(self, rhs: DiffPoly) -> DiffPoly {
        &self * &rhs
    }
}

impl Mul<&Rational> for &DiffPoly {
    type Output = DiffPoly;

    fn mul(self, rhs: &Rational) -> DiffPoly {
        self.scale(rhs)
    }
}

impl std::iter::Sum for DiffPoly {
    fn sum<I: Iterator<Item = DiffPoly>>(iter: I) -> DiffPoly {
        let mut acc = DiffPoly::zero();
        for p in iter {
            acc += p;
        }
        acc
    }
}
