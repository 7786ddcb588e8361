//! Reconstruction of the whole `Q` system from `Q_{2,2}`.
//!
//! The flows are `d v_a / d t^b = dx Q_{ab}` with `Q_{ab} = v[a+b-1] + ~Q_{ab}`.
//! Write `flow(P, F) = sum_{i,j} dP/dv_i^(j) dx^(j+1) F_i` for the derivative
//! of `P` along `d v_i / dt = dx F_i`. Commutativity of `t^2` with `t^q`
//! gives, for `p, q >= 1`,
//!
//! ```text
//! dx Q_{p+1,q} = dx Q_{p+q-1,2} + flow(~Q_{pq}, Q_{.,2}) - flow(~Q_{p2}, Q_{.,q})      (*)
//! ```
//!
//! * With `(p, q) = (2, a)` the right-hand side only involves `Q_{<=a,2}`;
//!   it must be a total derivative and its antiderivative is
//!   `Qc_a = Q_{a,3} - Q_{a+1,2}` ([`curly_q`]).
//! * Comparing `(*)` at `(a, 3)` and `(2, a+1)` eliminates `Q_{a+1,3}`:
//!   `flow(Qc_a, Q_{.,2}) - flow(~Q_{a2}, Q_{.,3}) = -flow(~Q_{22}, Q_{.,a+1})`.
//!   The still unknown `Q_{a+1,2}` enters both sides; it is replaced by its
//!   leading term `v[a+2]` throughout.
//!
//! [`reconstruct_step`] finds `Q_{a,2}` as the polynomial of the right shape
//! satisfying both conditions. It is solved one genus (power of `eps^2`) at a
//! time: at genus `g` the lower-genus part is numeric and the genus-`g`
//! coefficients are unknowns, so every constraint at `eps^(2g)` is affine in
//! them except at genus 0, where the few quadratic equations are handled by
//! repeated linear passes. Every stage certifies a unique solution.
//!
//! [`extend`] then produces `Q_{ab}` for `a, b >= 3` from `(*)` with
//! `(p, q) = (a-1, b)`.
//!
//! ```
//! use laxrec::reconstruct::{reconstruct_step, FlowTable, Options};
//!
//! let mut table = FlowTable::seeded();
//! let (q32, reports) = reconstruct_step(3, &mut table, Options::default()).unwrap();
//! assert!(reports.iter().all(|r| r.unknowns == r.rank));
//! assert_eq!(q32.truncate_eps(0).to_string(), "v[4] + v[2]^2 + v[1]^2 v[2] + v[1] v[3]");
//! ```

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::Serialize;

use crate::diffpoly::{integrate, rat, DiffPoly, Family, JetVariable, Monomial, Rational};
use crate::equivalence::fixture;
use crate::error::{Error, Result};
use crate::linsys::LinearSystem;

fn v(i: u32) -> DiffPoly {
    DiffPoly::jet(Family::V, i, 0)
}

fn tilde(q: &DiffPoly, a: u32, b: u32) -> DiffPoly {
    q - &v(a + b - 1)
}

/// `flow(P, F)`: the derivative of `p` along `d v_i / dt = dx F(i)`.
pub fn flow(p: &DiffPoly, rates: impl Fn(u32) -> Option<DiffPoly>, max_eps: Option<u32>) -> Result<DiffPoly> {
    p.evolve(|fam, i| if fam == Family::V { rates(i).map(|f| f.dx()) } else { None }, max_eps)
}

/// Known entries of the `Q` system.
#[derive(Clone, Debug)]
pub struct FlowTable {
    q2: BTreeMap<u32, DiffPoly>,
    curly: BTreeMap<u32, DiffPoly>,
    extended: BTreeMap<(u32, u32), DiffPoly>,
}

impl FlowTable {
    pub fn new(q22: DiffPoly) -> Self {
        FlowTable { q2: BTreeMap::from([(2, q22)]), curly: BTreeMap::new(), extended: BTreeMap::new() }
    }

    /// A table holding only the stored `Q_{2,2}`.
    pub fn seeded() -> Self {
        FlowTable::new(fixture("Q22").expect("stored fixture").poly)
    }

    /// Largest `a` with `Q_{a,2}` known.
    pub fn alpha_max(&self) -> u32 {
        self.q2.keys().copied().max().unwrap_or(1)
    }

    pub fn q2(&self, a: u32) -> Option<DiffPoly> {
        match a {
            0 => None,
            1 => Some(v(2)),
            _ => self.q2.get(&a).cloned(),
        }
    }

    /// `Q_{ab}` if it is known, using `Q_{a1} = Q_{1a} = v_a` and `Q_{2a} = Q_{a2}`.
    pub fn get(&self, a: u32, b: u32) -> Option<DiffPoly> {
        match (a, b) {
            (0, _) | (_, 0) => None,
            (1, b) => Some(v(b)),
            (a, 1) => Some(v(a)),
            (a, 2) => self.q2(a),
            (2, b) => self.q2(b),
            _ => self.extended.get(&(a, b)).cloned(),
        }
    }

    /// Every stored entry `Q_{ab}` with `a + b <= max_sum`, including the
    /// trivial ones.
    pub fn entries(&self, max_sum: u32) -> BTreeMap<(u32, u32), DiffPoly> {
        let mut out = BTreeMap::new();
        for a in 1..max_sum {
            for b in 1..=max_sum - a {
                if let Some(q) = self.get(a, b) {
                    out.insert((a, b), q);
                }
            }
        }
        out
    }
}

/// The exactness condition: `flow(~Q_{a2}, Q_{.,2}) - flow(~Q_{22}, Q_{.,a})`.
fn curly_rhs(a: u32, q2: &dyn Fn(u32) -> Option<DiffPoly>, max_eps: Option<u32>) -> Result<DiffPoly> {
    let missing = |i: u32| Error::OutOfRange(format!("Q_({i},2) is not known"));
    let qa = q2(a).ok_or_else(|| missing(a))?;
    let q22 = q2(2).ok_or_else(|| missing(2))?;
    let first = flow(&tilde(&qa, a, 2), q2, max_eps)?;
    let second = flow(&tilde(&q22, 2, 2), |i| match i {
        1 => Some(v(a)),
        2 => Some(qa.clone()),
        _ => None,
    }, max_eps)?;
    Ok(first - second)
}

/// `Qc_a = Q_{a,3} - Q_{a+1,2}`, computed from `Q_{<=a,2}`.
pub fn curly_q(a: u32, table: &FlowTable) -> Result<DiffPoly> {
    if a < 2 {
        return Err(Error::OutOfRange("curly_q needs alpha >= 2".into()));
    }
    curly_rhs(a, &|i| table.q2(i), None)?.antiderivative()
}

/// `route B - route A` of the elimination of `Q_{a+1,3}`.
fn elimination_residual(
    a: u32,
    q2: &dyn Fn(u32) -> Option<DiffPoly>,
    curly_lower: &BTreeMap<u32, DiffPoly>,
    curly_a: &DiffPoly,
    max_eps: Option<u32>,
) -> Result<DiffPoly> {
    let q3 = |i: u32| -> Option<DiffPoly> {
        match i {
            1 => Some(v(3)),
            2 => q2(3),
            i if i < a => Some(&q2(i + 1)? + curly_lower.get(&i)?),
            i if i == a => Some(&v(a + 2) + curly_a),
            _ => None,
        }
    };
    let qa = q2(a).ok_or_else(|| Error::OutOfRange(format!("Q_({a},2) is not known")))?;
    let q22 = q2(2).ok_or_else(|| Error::OutOfRange("Q_(2,2) is not known".into()))?;
    let route_b = flow(curly_a, |i| if i == a + 1 { Some(v(a + 2)) } else { q2(i) }, max_eps)?
        - flow(&tilde(&qa, a, 2), q3, max_eps)?;
    let route_a = -flow(&tilde(&q22, 2, 2), |i| match i {
        1 => Some(v(a + 1)),
        2 => Some(v(a + 2)),
        _ => None,
    }, max_eps)?;
    Ok(route_b - route_a)
}

/// All `eps^order` times a product of `v[i]^(j)` of total weight `weight`
/// and total derivative order `order`.
fn graded_monomials(weight: i64, order: u32) -> Vec<Monomial> {
    fn go(
        vars: &[(JetVariable, i64)],
        start: usize,
        weight: i64,
        order: u32,
        acc: &mut Vec<JetVariable>,
        out: &mut Vec<Vec<JetVariable>>,
    ) {
        if weight == 0 && order == 0 {
            if !acc.is_empty() {
                out.push(acc.clone());
            }
            return;
        }
        for (k, &(x, w)) in vars.iter().enumerate().skip(start) {
            if w <= weight && x.order <= order {
                acc.push(x);
                go(vars, k, weight - w, order - x.order, acc, out);
                acc.pop();
            }
        }
    }
    let mut vars = Vec::new();
    for i in 1..=(weight / 2) as u32 {
        for j in 0..=order {
            let w = Family::V.weight(i, j);
            if w <= weight {
                vars.push((JetVariable::new(Family::V, i, j), w));
            }
        }
    }
    let mut found = Vec::new();
    go(&vars, 0, weight, order, &mut Vec::new(), &mut found);
    let set: BTreeSet<Monomial> = found
        .into_iter()
        .map(|xs| {
            let mut counts: BTreeMap<JetVariable, u32> = BTreeMap::new();
            for x in xs {
                *counts.entry(x).or_default() += 1;
            }
            Monomial::from_parts(order, counts)
        })
        .collect();
    set.into_iter().collect()
}

/// The shape of `Q_{a,2}`: even `eps` powers matching the derivative count,
/// weight `2a+2`, at least one factor, and a fixed leading part.
#[derive(Clone, Debug)]
pub struct Ansatz {
    pub alpha: u32,
    /// Coefficients fixed in advance: `v[a+1]`, and with
    /// [`Options::pin_quadratic`] the genus-0 quadratic part
    /// `sum_{i=1}^{a-1} v_i v_(a+1-i)`.
    pub pinned: DiffPoly,
    basis: Vec<Vec<Monomial>>,
}

impl Ansatz {
    pub fn new(alpha: u32, options: Options) -> Self {
        let mut pinned = v(alpha + 1);
        if options.pin_quadratic {
            for i in 1..alpha {
                pinned += v(i) * v(alpha + 1 - i);
            }
        }
        let weight = 2 * alpha as i64 + 2;
        let basis = (0..=alpha)
            .map(|g| {
                graded_monomials(weight, 2 * g)
                    .into_iter()
                    .filter(|m| {
                        let quadratic_pinned = options.pin_quadratic && g == 0 && m.grading().tilde_deg == 2;
                        !quadratic_pinned && pinned.coefficient(m).is_zero()
                    })
                    .collect()
            })
            .collect();
        Ansatz { alpha, pinned, basis }
    }

    /// The unknown monomials at `eps^(2g)`.
    pub fn basis(&self, genus: u32) -> &[Monomial] {
        self.basis.get(genus as usize).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn unknowns(&self) -> usize {
        self.basis.iter().map(Vec::len).sum()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Options {
    /// Fix the genus-0 quadratic part of `Q_{a,2}` instead of solving for it.
    pub pin_quadratic: bool,
}

impl Default for Options {
    fn default() -> Self {
        Options { pin_quadratic: true }
    }
}

/// What one genus stage of [`reconstruct_step`] did.
#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub alpha: u32,
    pub genus: u32,
    pub unknowns: usize,
    /// Distinct linear equations in the first pass.
    pub rows: usize,
    /// Rank of the first pass.
    pub rank: usize,
    /// Linear passes until every unknown was fixed (genus 0 may need more
    /// than one), not counting the final check.
    pub passes: usize,
    /// Equations left out of the first pass for being nonlinear.
    pub nonlinear: usize,
    /// `a + 1 - g`, the index of the linear term fixed at this genus.
    pub gamma: u32,
    /// Coefficient of `eps^(2g) v[gamma]^(2g)` in the solution (`C_gamma`
    /// for `g >= 1`; the leading `v[a+1]` at genus 0).
    pub linear_coefficient: String,
    /// Genus parts of `Q_{2,2}` that entered the stage.
    pub seed_genera: Vec<u32>,
}

fn param(k: usize) -> Monomial {
    Monomial::var(JetVariable::param(k as u32 + 1))
}

/// Rows from the `eps^(2g)` part of `residual`; lower powers must vanish.
fn collect_equations(residual: &DiffPoly, genus: u32, eqs: &mut Vec<DiffPoly>) -> Result<()> {
    let top = 2 * genus;
    if let Some((m, _)) = residual.terms().find(|(m, _)| m.eps_power() < top) {
        return Err(Error::Inconsistent(format!("lower-genus residual survives at {m}")));
    }
    eqs.extend(residual.filter(|m, _| m.eps_power() == top).collect_by_jet_part().into_values());
    Ok(())
}

fn solve_stage(
    alpha: u32,
    genus: u32,
    lower: &DiffPoly,
    basis: &[Monomial],
    table: &FlowTable,
) -> Result<(DiffPoly, StageReport)> {
    let n = basis.len();
    let cap = Some(2 * genus);
    let lower = lower.truncate_eps(2 * genus);
    let mut values: Vec<Option<Rational>> = vec![None; n];
    let mut report = StageReport {
        alpha,
        genus,
        unknowns: n,
        rows: 0,
        rank: 0,
        passes: 0,
        nonlinear: 0,
        gamma: alpha + 1 - genus,
        linear_coefficient: String::new(),
        seed_genera: Vec::new(),
    };
    loop {
        let settled = values.iter().all(Option::is_some);
        let mut candidate = lower.clone();
        for (k, m) in basis.iter().enumerate() {
            match &values[k] {
                Some(c) => candidate.add_term(m.clone(), c.clone()),
                None => candidate.add_term(m.mul(&param(k)), rat(1)),
            }
        }
        let q2 = |i: u32| if i == alpha { Some(candidate.clone()) } else { table.q2(i) };
        let rhs = curly_rhs(alpha, &q2, cap)?;
        let (curly, remainder) = integrate(&rhs);
        let residual = elimination_residual(alpha, &q2, &table.curly, &curly, cap)?;
        let mut eqs = Vec::new();
        collect_equations(&remainder, genus, &mut eqs)?;
        collect_equations(&residual, genus, &mut eqs)?;

        let mut system = LinearSystem::new(n);
        let mut nonlinear = 0;
        for eq in &eqs {
            if eq.param_degree() > 1 {
                nonlinear += 1;
                continue;
            }
            let mut row = Vec::new();
            let mut constant = rat(0);
            for (m, c) in eq.terms() {
                match m.factors().first() {
                    None => constant += c,
                    Some((x, _)) => row.push((x.index as usize - 1, c.clone())),
                }
            }
            system.push(row, -constant);
        }
        let solution = system.solve().map_err(|e| match e {
            Error::NoSolution(msg) => Error::NoSolution(format!("Q_({alpha},2) at genus {genus}: {msg}")),
            e => e,
        })?;
        if report.passes == 0 {
            report.rows = system.rows();
            report.rank = solution.rank;
            report.nonlinear = nonlinear;
        }
        if settled {
            if nonlinear > 0 {
                return Err(Error::Inconsistent("nonlinear equations left after all unknowns are fixed".into()));
            }
            break;
        }
        report.passes += 1;
        let mut progress = false;
        for (k, val) in solution.values.iter().enumerate() {
            if values[k].is_none() {
                if let Some(val) = val {
                    values[k] = Some(val.clone());
                    progress = true;
                }
            }
        }
        if !progress {
            solution.unique(|j| basis[j].to_string())?;
            return Err(Error::NonUnique { free: values.iter().filter(|x| x.is_none()).count(), kernel: Vec::new() });
        }
    }
    let part = DiffPoly::from_terms(basis.iter().cloned().zip(values.into_iter().map(|x| x.expect("settled"))));
    let full = &lower + &part;
    let lead = Monomial::from_parts(2 * genus, [(JetVariable::new(Family::V, report.gamma, 2 * genus), 1)]);
    report.linear_coefficient = full.coefficient(&lead).to_string();
    let seed = table.q2(2).expect("seed");
    let genera: BTreeSet<u32> = seed.terms().map(|(m, _)| m.eps_power() / 2).filter(|&h| h <= genus).collect();
    report.seed_genera = genera.into_iter().collect();
    Ok((part, report))
}

/// Checks that `q` has the shape of a `Q` entry of the given weight: even
/// `eps` powers equal to the derivative count and at least one factor.
pub fn check_shape(q: &DiffPoly, weight: i64) -> Result<()> {
    for (m, _) in q.terms() {
        let g = m.grading();
        if m.eps_power() % 2 != 0 || g.dx_deg != 0 || g.tilde_deg < 1 || g.weight_deg != weight {
            return Err(Error::Inconsistent(format!("term {m} is outside the expected space (weight {weight})")));
        }
    }
    Ok(())
}

/// Determines `Q_{a,2}` from `Q_{<a,2}` and stores it in `table`.
pub fn reconstruct_step(alpha: u32, table: &mut FlowTable, options: Options) -> Result<(DiffPoly, Vec<StageReport>)> {
    if alpha < 3 {
        return Err(Error::OutOfRange("reconstruct_step needs alpha >= 3".into()));
    }
    if table.alpha_max() < alpha - 1 {
        return Err(Error::OutOfRange(format!("Q_({},2) must be known first", alpha - 1)));
    }
    for i in 3..alpha {
        if !table.curly.contains_key(&i) {
            let c = curly_q(i, table)?;
            table.curly.insert(i, c);
        }
    }
    let ansatz = Ansatz::new(alpha, options);
    let mut solved = ansatz.pinned.clone();
    let mut reports = Vec::new();
    for g in 0..=alpha {
        let (part, report) = solve_stage(alpha, g, &solved, ansatz.basis(g), table)?;
        solved += part;
        reports.push(report);
    }
    check_shape(&solved, 2 * alpha as i64 + 2)?;
    table.q2.insert(alpha, solved.clone());
    let c = curly_q(alpha, table)?;
    table.curly.insert(alpha, c);
    Ok((solved, reports))
}

/// `Q_{ab}` for `a, b >= 3` from `Q_{<=a+b-2,2}`; memoized in `table`.
pub fn extend(a: u32, b: u32, table: &mut FlowTable) -> Result<DiffPoly> {
    if let Some(q) = table.get(a, b) {
        return Ok(q);
    }
    if a < 3 || b < 3 {
        return Err(Error::OutOfRange(format!("Q_({a},{b}) needs Q_({},2)", a.max(b))));
    }
    let base = table
        .q2(a + b - 2)
        .ok_or_else(|| Error::OutOfRange(format!("Q_({a},{b}) needs Q_({},2)", a + b - 2)))?;
    let p = a - 1;
    let mut column = BTreeMap::new();
    for i in 1..=p {
        column.insert(i, extend(i, b, table)?);
    }
    let qp2 = table.q2(p).expect("p < a + b - 2");
    let rhs = flow(&tilde(&column[&p], p, b), |i| table.q2(i), None)?
        - flow(&tilde(&qp2, p, 2), |i| column.get(&i).cloned(), None)?;
    let q = base + rhs.antiderivative()?;
    check_shape(&q, 2 * (a + b) as i64 - 2)?;
    table.extended.insert((a, b), q.clone());
    Ok(q)
}

/// `d Q_{pq} / d t^r = d Q_{pr} / d t^q` for one triple.
#[derive(Clone, Debug, Serialize)]
pub struct AuditEntry {
    pub p: u32,
    pub q: u32,
    pub r: u32,
    pub pass: bool,
}

/// Commutativity of every pair of flows on every variable for which the
/// table has all the needed entries (`p + q + r <= max_sum + 1`).
pub fn commutativity_audit(table: &FlowTable, max_sum: u32) -> Result<Vec<AuditEntry>> {
    let mut out = Vec::new();
    for p in 1..max_sum {
        for q in 1..max_sum {
            for r in q + 1..max_sum {
                if p + q + r > max_sum + 1 {
                    continue;
                }
                let missing = || Error::OutOfRange(format!("audit ({p},{q},{r}) needs entries beyond the table"));
                let lhs = flow(&table.get(p, q).ok_or_else(missing)?, |i| table.get(i, r), None)?;
                let rhs = flow(&table.get(p, r).ok_or_else(missing)?, |i| table.get(i, q), None)?;
                out.push(AuditEntry { p, q, r, pass: lhs == rhs });
            }
        }
    }
    Ok(out)
}

/// The output of [`reconstruct_hierarchy`].
#[derive(Clone, Debug)]
pub struct Reconstruction {
    pub alpha_max: u32,
    pub table: FlowTable,
    pub reports: Vec<StageReport>,
    pub audit: Vec<AuditEntry>,
}

impl Reconstruction {
    /// Every `Q_{ab}` with `a + b <= alpha_max + 2`.
    pub fn entries(&self) -> BTreeMap<(u32, u32), DiffPoly> {
        self.table.entries(self.alpha_max + 2)
    }
}

/// All `Q_{a,2}` for `a <= alpha_max`, then every `Q_{ab}` with
/// `a + b <= alpha_max + 2`, followed by a full commutativity audit.
pub fn reconstruct_hierarchy(alpha_max: u32, options: Options) -> Result<Reconstruction> {
    if alpha_max < 2 {
        return Err(Error::OutOfRange("alpha_max must be at least 2".into()));
    }
    let mut table = FlowTable::seeded();
    let mut reports = Vec::new();
    for a in 3..=alpha_max {
        reports.extend(reconstruct_step(a, &mut table, options)?.1);
    }
    let max_sum = alpha_max + 2;
    for a in 3..max_sum {
        for b in 3..=max_sum - a {
            extend(a, b, &mut table)?;
        }
    }
    for a in 3..max_sum {
        for b in a + 1..=max_sum - a {
            if table.get(a, b) != table.get(b, a) {
                return Err(Error::Inconsistent(format!("Q_({a},{b}) and Q_({b},{a}) differ")));
            }
        }
    }
    let audit = commutativity_audit(&table, max_sum)?;
    if let Some(bad) = audit.iter().find(|e| !e.pass) {
        return Err(Error::Inconsistent(format!("flows t^{} and t^{} do not commute on v_{}", bad.q, bad.r, bad.p)));
    }
    Ok(Reconstruction { alpha_max, table, reports, audit })
}
