//! A versioned, serde-friendly record form of [`DiffPoly`].
//!
//! Coefficients are stored as decimal strings so that arbitrarily large
//! rationals survive a JSON round trip.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{DiffPoly, Family, JetVariable, Monomial, Rational};
use crate::error::{Error, Result};

pub const STRUCTURED_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredPoly {
    pub version: u32,
    pub terms: Vec<StructuredTerm>,
}

/// One term: `coeff = [numerator, denominator]`, the `eps` power, and
/// factors as `(family, index, order, exponent)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StructuredTerm {
    pub coeff: [String; 2],
    pub eps: u32,
    pub factors: Vec<(String, u32, u32, u32)>,
}

impl From<&DiffPoly> for StructuredPoly {
    fn from(p: &DiffPoly) -> Self {
        let terms = p
            .terms()
            .map(|(m, c)| StructuredTerm {
                coeff: [c.numer().to_string(), c.denom().to_string()],
                eps: m.eps_power(),
                factors: m
                    .factors()
                    .iter()
                    .map(|(v, e)| (v.family.0.to_string(), v.index, v.order, *e))
                    .collect(),
            })
            .collect();
        StructuredPoly { version: STRUCTURED_VERSION, terms }
    }
}

impl TryFrom<&StructuredPoly> for DiffPoly {
    type Error = Error;

    fn try_from(s: &StructuredPoly) -> Result<Self> {
        if s.version != STRUCTURED_VERSION {
            return Err(Error::Version(s.version));
        }
        let bad = |msg: &str| Error::Parse { pos: 0, msg: msg.to_string() };
        let mut out = DiffPoly::zero();
        for t in &s.terms {
            let num: BigInt = t.coeff[0].parse().map_err(|_| bad("bad numerator"))?;
            let den: BigInt = t.coeff[1].parse().map_err(|_| bad("bad denominator"))?;
            if den.is_zero() {
                return Err(bad("zero denominator"));
            }
            let mut factors = Vec::with_capacity(t.factors.len());
            for (fam, index, order, exp) in &t.factors {
                let mut chars = fam.chars();
                let (Some(c), None) = (chars.next(), chars.next()) else {
                    return Err(bad("family tags are single characters"));
                };
                if *index == 0 {
                    return Err(bad("indices start at 1"));
                }
                factors.push((JetVariable::new(Family(c), *index, *order), *exp));
            }
            out.add_term(Monomial::from_parts(t.eps, factors), Rational::new(num, den));
        }
        Ok(out)
    }
}

impl DiffPoly {
    pub fn to_structured(&self) -> StructuredPoly {
        StructuredPoly::from(self)
    }

    pub fn from_structured(s: &StructuredPoly) -> Result<DiffPoly> {
        DiffPoly::try_from(s)
    }

    /// Structured form serialized as JSON.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_structured()).expect("structured polynomials always serialize")
    }

    pub fn from_json(s: &str) -> Result<DiffPoly> {
        let parsed: StructuredPoly =
            serde_json::from_str(s).map_err(|e| Error::Parse { pos: e.column(), msg: e.to_string() })?;
        DiffPoly::try_from(&parsed)
    }
}
