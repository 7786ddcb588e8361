//! The acceptance run: one line per criterion, non-zero exit if any fails.

#[path = "common/reference.rs"]
mod reference;
#[path = "../../core/tests/common/props.rs"]
mod props;

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use laxrec::bkp::{constraint_residual, BkpTable};
use laxrec::equivalence::{fixture, from_bkp, q_from_p, to_bkp, verify_main};
use laxrec::kp::KpTable;
use laxrec::reconstruct::{check_shape, curly_q, reconstruct_hierarchy, FlowTable, Options, Reconstruction};
use laxrec::{DiffPoly, Family, JetVariable, Monomial, Rational};
use num_bigint::BigInt;

type Outcome = Result<String, String>;

fn p(s: &str) -> DiffPoly {
    s.parse().unwrap_or_else(|e| panic!("bad transcription {s}: {e}"))
}

fn expect_eq(what: &str, got: &DiffPoly, want: &DiffPoly) -> Result<(), String> {
    if got == want {
        Ok(())
    } else {
        Err(format!("{what}: got {got}, expected {want}"))
    }
}

fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn v(i: u32, k: u32) -> JetVariable {
    JetVariable::new(Family::V, i, k)
}

struct Context {
    bkp: BkpTable,
    rec: Option<Reconstruction>,
}

fn golden_identities(ctx: &mut Context) -> Outcome {
    let mut kp = KpTable::new();
    let s13 = kp.flow(1, 3).map_err(|e| e.to_string())?;
    expect_eq("S_{1,3}", &s13, &p(reference::S13_CORRECTED))?;
    expect_eq("S_{1,3} - displayed", &(&s13 - &p(reference::S13_LITERAL)), &p("3 f[1] f[1]^(1)"))?;
    expect_eq("S_{3,3}", &kp.flow(3, 3).unwrap(), &p(reference::S33))?;
    for a in 1..=5 {
        expect_eq(&format!("w_{a}"), &kp.normal(a).unwrap(), &p(reference::W[a as usize - 1]))?;
    }
    let bkp = &mut ctx.bkp;
    expect_eq("f_2", &bkp.even_rule(1), &p(reference::F2))?;
    expect_eq("f_4", &bkp.even_rule(2), &p(reference::F4))?;
    expect_eq("S^BKP_{1,2}", &bkp.flow(1, 2).unwrap(), &p(reference::S13_BKP))?;
    let s22 = bkp.flow(2, 2).unwrap();
    expect_eq("S^BKP_{2,2}", &s22, &p(reference::S33_BKP_CORRECTED))?;
    if s22 == p(reference::S33_BKP_LITERAL) {
        return Err("S^BKP_{2,2} unexpectedly matches the literal f[5]^(5)".into());
    }
    for a in 1..=3 {
        expect_eq(&format!("BKP w_{}", 2 * a - 1), &bkp.normal(a).unwrap(), &p(reference::W_BKP[a as usize - 1]))?;
        expect_eq(&format!("BKP f_{}", 2 * a - 1), &bkp.inverse_normal(a).unwrap(), &p(reference::F_BKP[a as usize - 1]))?;
    }
    expect_eq("R^BKP_{2,2}", &bkp.normal_flow(2, 2).unwrap(), &p(reference::R22_BKP))?;
    Ok("S_{1,3} has 6 f[1] f[1]^(1) (literal transcription: 3); S^BKP_{2,2} starts 3 f[5]^(1) (literal transcription: f[5]^(5))".into())
}

fn equivalence_at_2_2(_: &mut Context) -> Outcome {
    let q22 = fixture("Q22").unwrap().poly;
    expect_eq("Q22 fixture", &q22, &p(reference::Q22))?;
    let image = to_bkp(&q22, 2, 2).map_err(|e| e.to_string())?;
    expect_eq("-9 Q22 mapped", &image, &p(reference::R22_BKP))?;
    let report = verify_main(2, 2, &q22, &p(reference::R22_BKP));
    if !report.pass {
        return Err(format!("verify_main(2,2) failed: {}", report.difference));
    }
    Ok("-9 Q22(v -> -w/(2a-1), eps^2 = 2) equals the transcribed R^BKP_{2,2}".into())
}

fn term(c: Rational, eps: u32, factors: &[(JetVariable, u32)]) -> DiffPoly {
    DiffPoly::term(c, Monomial::from_parts(eps, factors.iter().copied()))
}

/// The displays for the top-index `a-1` slice of `Q_{a,2}` and the top-index
/// `a` and `a+1` parts of `Q_{a,3} - Q_{a+1,2}`, in terms of the constants
/// `C_g`, the coefficient of `eps^(2a-2g+2) v_g^(2a-2g+2)` in `Q_{a,2}`.
fn linear_part_checks(table: &FlowTable, alpha: u32) -> Result<Rational, String> {
    let q = table.get(alpha, 2).unwrap();
    let c = |g: u32| {
        let k = 2 * (alpha - g + 1);
        q.coefficient(&Monomial::from_parts(k, [(v(g, k), 1)]))
    };
    let (ca, cb) = (c(alpha), c(alpha - 1));
    let top = |x: &DiffPoly, g: u32| x.filter(|m, _| m.top_index() == g);
    let b = alpha - 1;
    let two = if alpha == 3 { ratio(1, 1) } else { ratio(2, 1) };
    let three = &ca * ratio(3, 1) + ratio(1, 2);
    let mut want = term(two, 0, &[(v(2, 0), 1), (v(b, 0), 1)]);
    want += term(ratio(1, 1), 0, &[(v(1, 0), 2), (v(b, 0), 1)]);
    want += term(ca.clone(), 2, &[(v(1, 2), 1), (v(b, 0), 1)]);
    want += term(three.clone(), 2, &[(v(1, 1), 1), (v(b, 1), 1)]);
    want += term(&ca * ratio(2, 1) + ratio(1, 6), 2, &[(v(1, 0), 1), (v(b, 2), 1)]);
    let slice = top(&q, b).filter(|m, _| m.grading().tilde_deg >= 2);
    expect_eq(&format!("nonlinear top-index {b} part of Q_({alpha},2)"), &slice, &want)?;

    let qc = curly_q(alpha, table).map_err(|e| e.to_string())?;
    let shift = &ca + ratio(1, 6);
    let want = term(shift.clone(), 2, &[(v(alpha + 1, 2), 1)]);
    expect_eq(&format!("top-index {} part of Q_({alpha},3) - Q_({},2)", alpha + 1, alpha + 1), &top(&qc, alpha + 1), &want)?;

    let c4 = cb + &ca * &shift - ratio(1, 180);
    let mut want = term(ratio(1, 1), 0, &[(v(2, 0), 1), (v(alpha, 0), 1)]);
    want += term(shift, 2, &[(v(1, 2), 1), (v(alpha, 0), 1)]);
    want += term(three.clone(), 2, &[(v(1, 1), 1), (v(alpha, 1), 1)]);
    want += term(three, 2, &[(v(1, 0), 1), (v(alpha, 2), 1)]);
    want += term(c4, 4, &[(v(alpha, 4), 1)]);
    expect_eq(&format!("top-index {alpha} part of Q_({alpha},3) - Q_({},2)", alpha + 1), &top(&qc, alpha), &want)?;
    Ok(ca)
}

fn reconstruction(ctx: &mut Context) -> Outcome {
    let rec = reconstruct_hierarchy(5, Options::default()).map_err(|e| format!("reconstruction failed: {e}"))?;
    for r in &rec.reports {
        if r.rank != r.unknowns || r.passes > 1 {
            return Err(format!("stage ({}, g={}) not certified in one linear pass: {r:?}", r.alpha, r.genus));
        }
    }
    let entries = rec.entries();
    for ((a, b), q) in &entries {
        let r = ctx.bkp.normal_flow(*a, *b).map_err(|e| e.to_string())?;
        expect_eq(&format!("Q_({a},{b}) vs BKP"), q, &from_bkp(&r, *a, *b).unwrap())?;
        if !verify_main(*a, *b, q, &r).pass {
            return Err(format!("verify_main({a},{b}) failed"));
        }
    }
    let q32 = rec.table.get(3, 2).unwrap();
    expect_eq("quadratic genus-0 part of Q_(3,2)", &q32.filter(|m, _| m.eps_power() == 0 && m.grading().tilde_deg == 2), &p("v[1] v[3] + v[2]^2"))?;
    let mut constants = Vec::new();
    for alpha in 3..=5 {
        let ca = linear_part_checks(&rec.table, alpha)?;
        if ca != ratio(1 - alpha as i64, 6) {
            return Err(format!("C_{alpha} = {ca}, expected -(a-1)/6"));
        }
        constants.push(format!("C_{alpha} = {ca}"));
    }
    let free = reconstruct_hierarchy(5, Options { pin_quadratic: false }).map_err(|e| format!("unpinned run failed: {e}"))?;
    if free.entries() != entries {
        return Err("solving for the quadratic genus-0 part gives a different table".into());
    }
    let audit = rec.audit.len();
    let n = entries.len();
    let stages = rec.reports.len();
    ctx.rec = Some(rec);
    Ok(format!("{n} entries (a+b <= 7) equal the BKP pull-back; {stages} stages unique; {audit} commutativity checks; quadratic part also derivable; {}", constants.join(", ")))
}

fn properties(_: &mut Context) -> Outcome {
    let mut names = Vec::new();
    for (name, suite) in props::suites() {
        suite(200).map_err(|e| format!("{name}: {e}"))?;
        names.push(name);
    }
    Ok(format!("{} suites x 200 cases", names.len()))
}

fn commutativity(ctx: &mut Context) -> Outcome {
    let mut kp = KpTable::new();
    let mut count = 0;
    for i in 1..=3 {
        for k in 1..=5 {
            for l in k + 1..=5 {
                let a = kp.flow(i, k).unwrap();
                let b = kp.flow(i, l).unwrap();
                if kp.evolve(&a, l).unwrap() != kp.evolve(&b, k).unwrap() {
                    return Err(format!("KP flows T_{k}, T_{l} do not commute on f[{i}]"));
                }
                count += 1;
            }
        }
    }
    let bkp = &mut ctx.bkp;
    // Every pair of odd flows (T_(2k-1), T_(2l-1)) with 2k + 2l - 2 <= 12.
    for i in 1..=3 {
        for k in 1..=6 {
            for l in k + 1..=7 - k {
                let a = bkp.flow(i, k).unwrap();
                let b = bkp.flow(i, l).unwrap();
                if bkp.evolve(&a, l).unwrap() != bkp.evolve(&b, k).unwrap() {
                    return Err(format!("BKP flows T_{}, T_{} do not commute on f[{}]", 2 * k - 1, 2 * l - 1, 2 * i - 1));
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} flow pairs"))
}

fn constraint(_: &mut Context) -> Outcome {
    let r = constraint_residual(-11).map_err(|e| e.to_string())?;
    if r.is_zero() {
        Ok(format!("zero on d^1 .. d^{}", r.floor().unwrap_or(-11)))
    } else {
        Err(format!("residual {r}"))
    }
}

fn structure(ctx: &mut Context) -> Outcome {
    let mut count = 0;
    for a in 1..=6u32 {
        for b in 1..=7 - a {
            let r = ctx.bkp.normal_flow(a, b).unwrap();
            let weight = 2 * (a + b) as i64 - 2;
            if !r.has_even_dx_degree() || r.homogeneous_weight() != Some(weight) {
                return Err(format!("R^BKP_({a},{b}) has the wrong gradings"));
            }
            if r.variables().iter().any(|x| x.index % 2 == 0) {
                return Err(format!("R^BKP_({a},{b}) contains an even variable"));
            }
            let lead = r.coefficient_of_var(JetVariable::new(Family::W, 2 * a + 2 * b - 3, 0));
            let want = ratio(((2 * a - 1) * (2 * b - 1)) as i64, (2 * a + 2 * b - 3) as i64);
            if lead != want {
                return Err(format!("R^BKP_({a},{b}) leading coefficient {lead}, expected {want}"));
            }
            if r != ctx.bkp.normal_flow(b, a).unwrap() {
                return Err(format!("R^BKP_({a},{b}) is not symmetric"));
            }
            count += 1;
        }
    }
    let rec = ctx.rec.as_ref().ok_or("reconstruction unavailable")?;
    for ((a, b), q) in rec.entries() {
        check_shape(&q, 2 * (a + b) as i64 - 2).map_err(|e| format!("Q_({a},{b}): {e}"))?;
        if Some(&q) != rec.entries().get(&(b, a)) {
            return Err(format!("Q_({a},{b}) is not symmetric"));
        }
        count += 1;
    }
    Ok(format!("{count} polynomials"))
}

fn fixtures(_: &mut Context) -> Outcome {
    for (name, text) in [("P12", reference::P12), ("P13", reference::P13), ("P22", reference::P22), ("Q22", reference::Q22)] {
        expect_eq(name, &fixture(name).unwrap().poly, &p(text))?;
    }
    for beta in 2..=3 {
        let d = &fixture(&format!("P1{beta}")).unwrap().poly - &DiffPoly::jet(Family::U, beta, 0);
        let once = d.antiderivative().map_err(|_| format!("P_(1,{beta}) - u_{beta} is not in the image of dx"))?;
        once.antiderivative().map_err(|_| format!("P_(1,{beta}) - u_{beta} is not in the image of dx^2"))?;
    }
    for (name, w) in [("P12", 4), ("P13", 6), ("P22", 6), ("Q22", 6)] {
        let f = fixture(name).unwrap().poly;
        if f.homogeneous_weight() != Some(w) || !f.has_even_dx_degree() {
            return Err(format!("{name} has the wrong grading"));
        }
    }
    expect_eq("Q22 from P22", &q_from_p(2, 2).map_err(|e| e.to_string())?, &p(reference::Q22))?;
    Ok("P_(1,b) - u_b in im(dx^2) for b = 2, 3; u -> v turns P_(2,2) into Q_(2,2)".into())
}

fn run_cli(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_laxrec")).args(args).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("laxrec {} exited with {}", args.join(" "), out.status));
    }
    Ok(out.stdout)
}

fn cli_determinism(_: &mut Context) -> Outcome {
    let golden_dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/golden");
    let mut runs: Vec<(String, Vec<String>)> = reference::golden_commands()
        .into_iter()
        .map(|(name, args, _)| (name.to_string(), args.into_iter().map(String::from).collect()))
        .collect();
    runs.push(("verify_max_alpha_2".into(), ["verify", "--max-alpha", "2"].map(String::from).to_vec()));
    let mut count = 0;
    for (name, args) in &runs {
        for format in ["text", "structured"] {
            let mut full: Vec<&str> = args.iter().map(String::as_str).collect();
            full.extend(["--format", format]);
            let first = run_cli(&full)?;
            let second = run_cli(&full)?;
            if first != second {
                return Err(format!("{name} ({format}) differs between runs"));
            }
            if format == "text" {
                let golden = std::fs::read(format!("{golden_dir}/{name}.txt")).map_err(|e| e.to_string())?;
                if first != golden {
                    return Err(format!("{name} differs from its golden file"));
                }
            }
            count += 1;
        }
    }
    let table = ["reconstruct", "--max-alpha", "3"];
    if run_cli(&table)? != run_cli(&table)? {
        return Err("reconstruct output differs between runs".into());
    }
    Ok(format!("{} invocations run twice, byte-identical", count + 1))
}

type Criterion = (u32, &'static str, Duration, fn(&mut Context) -> Outcome);

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        (1, "golden identities", Duration::from_secs(10), golden_identities),
        (2, "equivalence at (2,2)", Duration::from_secs(1), equivalence_at_2_2),
        (3, "reconstruction vs Lax (a+b <= 7)", Duration::from_secs(600), reconstruction),
        (4, "property suites", Duration::from_secs(600), properties),
        (5, "flow commutativity", Duration::from_secs(300), commutativity),
        (6, "BKP constraint at floor -11", Duration::from_secs(30), constraint),
        (7, "structural properties", Duration::from_secs(600), structure),
        (8, "fixture sanity", Duration::from_secs(60), fixtures),
        (9, "CLI determinism", Duration::from_secs(600), cli_determinism),
    ];
    let mut ctx = Context { bkp: BkpTable::new(), rec: None };
    let mut failed = 0;
    for (n, title, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run(&mut ctx);
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(note) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}; {note}")),
            other => other,
        };
        match outcome {
            Ok(note) => println!("criterion {n} PASS  {title} ({elapsed:.2?}, limit {limit:?}): {note}"),
            Err(why) => {
                failed += 1;
                println!("criterion {n} FAIL  {title} ({elapsed:.2?}, limit {limit:?}): {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
