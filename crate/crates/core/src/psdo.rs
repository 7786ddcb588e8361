//! Pseudo-differential operators `sum_n a_n d^n` with a certified window.
//!
//! A [`PsDO`] stores the coefficients of `d^n` for `floor <= n <= ceiling`.
//! Coefficients below the floor are *unknown*, not zero: every operation
//! computes the lowest exponent it can still certify and drops the rest. An
//! operator without a floor is *exact*: it is the finite sum of its stored
//! terms.
//!
//! ```
//! use laxrec::psdo::PsDO;
//!
//! let l = PsDO::lax(-4);
//! let l3 = l.power(3).unwrap();
//! assert_eq!(l3.residue().unwrap().to_string(), "3 f[3] + 3 f[2]^(1) + f[1]^(2) + 3 f[1]^2");
//! ```

use std::collections::BTreeMap;
use std::fmt;

use crate::diffpoly::{binomial, DiffPoly, Family};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PsDO {
    ceiling: i64,
    floor: Option<i64>,
    coeffs: BTreeMap<i64, DiffPoly>,
}

impl PsDO {
    /// The exact operator `sum coeffs[n] d^n`.
    pub fn exact(coeffs: impl IntoIterator<Item = (i64, DiffPoly)>) -> Self {
        let coeffs: BTreeMap<i64, DiffPoly> = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        let ceiling = coeffs.keys().next_back().copied().unwrap_or(0);
        PsDO { ceiling, floor: None, coeffs }
    }

    /// An operator known only at exponents `>= floor`.
    pub fn truncated(coeffs: impl IntoIterator<Item = (i64, DiffPoly)>, floor: i64) -> Result<Self> {
        PsDO::exact(coeffs).raise_floor(floor)
    }

    pub fn zero() -> Self {
        PsDO::exact([])
    }

    pub fn identity() -> Self {
        PsDO::exact([(0, DiffPoly::one())])
    }

    /// `d^n`, exactly.
    pub fn d_pow(n: i64) -> Self {
        PsDO::exact([(n, DiffPoly::one())])
    }

    /// Multiplication by a differential polynomial.
    pub fn multiplication(a: DiffPoly) -> Self {
        PsDO::exact([(0, a)])
    }

    /// The Lax operator `d + sum_{i >= 1} f[i] d^-i`, known down to `floor`.
    pub fn lax(floor: i64) -> Self {
        PsDO::lax_with(floor, |i| DiffPoly::jet(Family::F, i, 0))
    }

    /// The Lax operator with the coefficient of `d^-i` given by `coeff(i)`.
    pub fn lax_with(floor: i64, coeff: impl Fn(u32) -> DiffPoly) -> Self {
        assert!(floor <= 0, "a Lax operator needs floor <= 0");
        let mut coeffs = BTreeMap::new();
        coeffs.insert(1, DiffPoly::one());
        for i in 1..=(-floor) {
            let c = coeff(i as u32);
            if !c.is_zero() {
                coeffs.insert(-i, c);
            }
        }
        PsDO { ceiling: 1, floor: Some(floor), coeffs }
    }

    pub fn ceiling(&self) -> i64 {
        self.ceiling
    }

    /// `None` for exact operators.
    pub fn floor(&self) -> Option<i64> {
        self.floor
    }

    pub fn is_exact(&self) -> bool {
        self.floor.is_none()
    }

    /// Stored (nonzero) coefficients, exponents ascending.
    pub fn coeffs(&self) -> impl DoubleEndedIterator<Item = (i64, &DiffPoly)> {
        self.coeffs.iter().map(|(n, c)| (*n, c))
    }

    /// Coefficient of `d^n`, which must lie inside the certified window.
    pub fn coeff(&self, n: i64) -> Result<DiffPoly> {
        if let Some(floor) = self.floor {
            if n < floor {
                return Err(Error::InsufficientFloor { requested: n, floor });
            }
        }
        Ok(self.coeffs.get(&n).cloned().unwrap_or_default())
    }

    /// `res A`, the coefficient of `d^-1`.
    pub fn residue(&self) -> Result<DiffPoly> {
        match self.floor {
            Some(floor) if floor > -1 => Err(Error::ResidueBelowFloor { floor }),
            _ => self.coeff(-1),
        }
    }

    /// `A_+`, the terms with non-negative exponent. The result is exact.
    pub fn positive_part(&self) -> Result<PsDO> {
        if let Some(floor) = self.floor {
            if floor > 0 {
                return Err(Error::InsufficientFloor { requested: 0, floor });
            }
        }
        Ok(PsDO::exact(self.coeffs.range(0..).map(|(n, c)| (*n, c.clone()))))
    }

    /// Forgets everything below `floor`. Lowering the floor is an error.
    pub fn raise_floor(&self, floor: i64) -> Result<PsDO> {
        if let Some(f) = self.floor {
            if floor < f {
                return Err(Error::InsufficientFloor { requested: floor, floor: f });
            }
        }
        let ceiling = self.ceiling.max(self.coeffs.keys().next_back().copied().unwrap_or(floor));
        if floor > ceiling {
            return Err(Error::EmptyWindow { floor, ceiling });
        }
        Ok(PsDO { ceiling, floor: Some(floor), coeffs: self.coeffs.range(floor..).map(|(n, c)| (*n, c.clone())).collect() })
    }

    fn lowest(&self) -> i64 {
        self.coeffs.keys().next().copied().unwrap_or(self.ceiling)
    }

    /// Whether composing on the right of a `d^-k` term could produce an
    /// infinite series.
    fn has_nonconstant_coeffs(&self) -> bool {
        self.coeffs.values().any(|c| c.terms().any(|(m, _)| m.has_jet_factors()))
    }

    /// `a o b` by the Leibniz rule
    /// `(a d^k) o (b d^l) = sum_p C(k, p) a b^(p) d^(k + l - p)`.
    ///
    /// The result floor is `max(a.floor + b.ceiling, a.ceiling + b.floor)`,
    /// ignoring the terms for exact operands. When both operands are exact but
    /// the product is an infinite series, it is certified down to the sum of
    /// the lowest exponents.
    pub fn compose(&self, other: &PsDO) -> Result<PsDO> {
        let ceiling = self.ceiling + other.ceiling;
        let bounds = [self.floor.map(|f| f + other.ceiling), other.floor.map(|f| self.ceiling + f)];
        let floor = bounds.into_iter().flatten().max();
        let floor = match floor {
            Some(f) => Some(f),
            None if self.lowest() < 0 && other.has_nonconstant_coeffs() => Some(self.lowest() + other.lowest()),
            None => None,
        };
        if let Some(f) = floor {
            if f > ceiling {
                return Err(Error::EmptyWindow { floor: f, ceiling });
            }
        }
        let mut coeffs: BTreeMap<i64, DiffPoly> = BTreeMap::new();
        for (&l, b) in &other.coeffs {
            let constant = !b.terms().any(|(m, _)| m.has_jet_factors());
            let mut derivs = vec![b.clone()];
            for (&k, a) in &self.coeffs {
                let mut p = 0u32;
                loop {
                    let e = k + l - p as i64;
                    if floor.is_some_and(|f| e < f) || (k >= 0 && p as i64 > k) || (constant && p > 0) {
                        break;
                    }
                    if derivs.len() <= p as usize {
                        let next = derivs.last().unwrap().dx();
                        derivs.push(next);
                    }
                    let c = binomial(k, p);
                    if c != num_traits::Zero::zero() {
                        let term = (a * &derivs[p as usize]).scale(&c);
                        *coeffs.entry(e).or_default() += term;
                    }
                    p += 1;
                }
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(PsDO { ceiling, floor, coeffs })
    }

    /// `A^k` for `k >= 1`.
    pub fn power(&self, k: u32) -> Result<PsDO> {
        assert!(k >= 1, "powers start at 1");
        let mut acc = self.clone();
        for _ in 1..k {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    /// The adjoint `(sum a_n d^n)^dagger = sum (-d)^n o a_n`, on the same window.
    pub fn dagger(&self) -> Result<PsDO> {
        let floor = match self.floor {
            Some(f) => Some(f),
            None if self.lowest() < 0 && self.has_nonconstant_coeffs() => Some(self.lowest()),
            None => None,
        };
        let mut coeffs: BTreeMap<i64, DiffPoly> = BTreeMap::new();
        for (&n, a) in &self.coeffs {
            let sign = if n.rem_euclid(2) == 0 { 1 } else { -1 };
            let constant = !a.terms().any(|(m, _)| m.has_jet_factors());
            let mut deriv = a.clone();
            let mut p = 0u32;
            loop {
                let e = n - p as i64;
                if floor.is_some_and(|f| e < f) || (n >= 0 && e < 0) || (constant && p > 0) {
                    break;
                }
                let c = binomial(n, p) * crate::diffpoly::rat(sign);
                *coeffs.entry(e).or_default() += deriv.scale(&c);
                deriv = deriv.dx();
                p += 1;
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(PsDO { ceiling: self.ceiling, floor, coeffs })
    }

    fn add_within(&self, other: &PsDO) -> PsDO {
        let floor = match (self.floor, other.floor) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        let mut coeffs = self.coeffs.clone();
        for (&n, c) in &other.coeffs {
            *coeffs.entry(n).or_default() += c;
        }
        if let Some(f) = floor {
            coeffs.retain(|&n, _| n >= f);
        }
        coeffs.retain(|_, c| !c.is_zero());
        PsDO { ceiling: self.ceiling.max(other.ceiling), floor, coeffs }
    }

    pub fn add(&self, other: &PsDO) -> PsDO {
        self.add_within(other)
    }

    pub fn sub(&self, other: &PsDO) -> PsDO {
        self.add_within(&other.neg())
    }

    pub fn neg(&self) -> PsDO {
        PsDO { coeffs: self.coeffs.iter().map(|(n, c)| (*n, -c)).collect(), ..self.clone() }
    }

    /// Applies `f` to every coefficient (for example a substitution).
    pub fn map_coeffs(&self, mut f: impl FnMut(&DiffPoly) -> Result<DiffPoly>) -> Result<PsDO> {
        let mut coeffs = BTreeMap::new();
        for (&n, c) in &self.coeffs {
            let c = f(c)?;
            if !c.is_zero() {
                coeffs.insert(n, c);
            }
        }
        Ok(PsDO { coeffs, ..self.clone() })
    }

    /// Whether every certified coefficient vanishes.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// `[(L^k)_+, L]`.
///
/// Only `L` down to `d^(1-k)` enters `(L^k)_+`, so the power is taken on a
/// shortened copy. The result is certified down to `L.floor + k`.
pub fn lax_bracket(k: u32, l: &PsDO) -> Result<PsDO> {
    let short_floor = 1 - k as i64;
    let short = match l.floor() {
        Some(f) if f > short_floor => l.clone(),
        Some(_) => l.raise_floor(short_floor)?,
        None => l.clone(),
    };
    let p = short.power(k)?.positive_part()?;
    Ok(p.compose(l)?.sub(&l.compose(&p)?))
}

impl fmt::Display for PsDO {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c}) d^{n}")?;
        }
        if first {
            f.write_str("0")?;
        }
        match self.floor {
            Some(m) => write!(f, " [floor={m}]"),
            None => f.write_str(" [exact]"),
        }
    }
}
