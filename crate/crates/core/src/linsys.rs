//! Exact linear systems over the rationals.
//!
//! Rows are cleared of denominators and reduced with fraction-free (Bareiss)
//! elimination over the integers; the pivot rows are then brought to reduced
//! echelon form in exact rationals. Pivots are chosen column by column in
//! index order, preferring the entry of smallest magnitude and then the
//! earliest row, so the result never depends on anything but the input.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::diffpoly::Rational;
use crate::error::{Error, Result};

/// `sum_j a_j x_j = b` for unknowns `x_0 .. x_(n-1)`.
#[derive(Clone, Debug, Default)]
pub struct LinearSystem {
    unknowns: usize,
    rows: Vec<(BTreeMap<usize, Rational>, Rational)>,
}

/// Outcome of [`LinearSystem::solve`] on a consistent system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub rank: usize,
    /// `Some` for every unknown that has the same value in all solutions.
    pub values: Vec<Option<Rational>>,
    /// A basis of the null space, one vector per free unknown.
    pub kernel: Vec<Vec<Rational>>,
}

impl Solution {
    pub fn is_unique(&self) -> bool {
        self.kernel.is_empty()
    }

    /// All values, or [`Error::NonUnique`] with the kernel basis.
    pub fn unique(&self, names: impl Fn(usize) -> String) -> Result<Vec<Rational>> {
        if self.is_unique() {
            return Ok(self.values.iter().map(|v| v.clone().expect("unique solution")).collect());
        }
        let kernel = self
            .kernel
            .iter()
            .map(|v| v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(j, c)| (j, format!("{c} {}", names(j)))).collect())
            .collect();
        Err(Error::NonUnique { free: self.kernel.len(), kernel })
    }
}

impl LinearSystem {
    pub fn new(unknowns: usize) -> Self {
        LinearSystem { unknowns, rows: Vec::new() }
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn push(&mut self, coeffs: impl IntoIterator<Item = (usize, Rational)>, rhs: Rational) {
        let mut row = BTreeMap::new();
        for (j, c) in coeffs {
            assert!(j < self.unknowns, "unknown index out of range");
            *row.entry(j).or_insert_with(Rational::zero) += c;
        }
        row.retain(|_, c| !c.is_zero());
        self.rows.push((row, rhs));
    }

    /// Integer rows `[a_0, .., a_(n-1), b]` with content 1 and a positive
    /// leading entry, deduplicated and sorted.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        let mut out: Vec<Vec<BigInt>> = Vec::with_capacity(self.rows.len());
        for (row, rhs) in &self.rows {
            let mut lcm = rhs.denom().clone();
            for c in row.values() {
                lcm = lcm.lcm(c.denom());
            }
            let mut v = vec![BigInt::zero(); self.unknowns + 1];
            for (&j, c) in row {
                v[j] = c.numer() * (&lcm / c.denom());
            }
            v[self.unknowns] = rhs.numer() * (&lcm / rhs.denom());
            let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if g.is_zero() {
                continue;
            }
            let lead_negative = v.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
            for x in &mut v {
                *x = &*x / &g;
                if lead_negative {
                    *x = -&*x;
                }
            }
            out.push(v);
        }
        out.sort();
        out.dedup();
        out
    }

    /// Solves the system exactly. Inconsistent systems give
    /// [`Error::NoSolution`].
    pub fn solve(&self) -> Result<Solution> {
        let n = self.unknowns;
        let mut m = self.integer_rows();
        let mut pivots: Vec<usize> = Vec::new();
        let mut r = 0;
        let mut prev = BigInt::one();
        for col in 0..n {
            let pick = (r..m.len())
                .filter(|&i| !m[i][col].is_zero())
                .min_by(|&a, &b| m[a][col].abs().cmp(&m[b][col].abs()).then(a.cmp(&b)));
            let Some(p) = pick else { continue };
            m.swap(r, p);
            for i in r + 1..m.len() {
                for j in col + 1..=n {
                    let v = &m[r][col] * &m[i][j] - &m[i][col] * &m[r][j];
                    m[i][j] = v / &prev;
                }
                m[i][col] = BigInt::zero();
            }
            prev = m[r][col].clone();
            pivots.push(col);
            r += 1;
            if r == m.len() {
                break;
            }
        }
        if m[r..].iter().any(|row| !row[n].is_zero()) {
            return Err(Error::NoSolution(format!("{} inconsistent equation(s) after elimination", m[r..].iter().filter(|row| !row[n].is_zero()).count())));
        }
        // Reduced echelon form on the pivot rows, in rationals.
        let mut e: Vec<Vec<Rational>> = m[..r]
            .iter()
            .map(|row| row.iter().map(|x| Rational::from_integer(x.clone())).collect())
            .collect();
        for (k, &col) in pivots.iter().enumerate().rev() {
            let inv = Rational::one() / &e[k][col];
            for x in e[k].iter_mut() {
                *x *= &inv;
            }
            let pivot_row = e[k].clone();
            for row in &mut e[..k] {
                if row[col].is_zero() {
                    continue;
                }
                let f = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_row) {
                    *x -= &f * p;
                }
            }
        }
        let is_pivot: Vec<bool> = (0..n).map(|j| pivots.contains(&j)).collect();
        let free: Vec<usize> = (0..n).filter(|&j| !is_pivot[j]).collect();
        let mut values = vec![None; n];
        for (k, &col) in pivots.iter().enumerate() {
            if free.iter().all(|&j| e[k][j].is_zero()) {
                values[col] = Some(e[k][n].clone());
            }
        }
        let kernel = free
            .iter()
            .map(|&f| {
                let mut v = vec![Rational::zero(); n];
                v[f] = Rational::one();
                for (k, &col) in pivots.iter().enumerate() {
                    v[col] = -e[k][f].clone();
                }
                v
            })
            .collect();
        Ok(Solution { rank: r, values, kernel })
    }
}
