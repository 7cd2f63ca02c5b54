//! Acceptance criteria, one line each. Runs as a plain binary so the
//! verdict lines always reach the terminal.

mod oracles;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use jtalg::algebra::{closure, evaluate, Assignment, ClosureBudget};
use jtalg::corpus::{random_term, sigma_instance, Corpus, VARS};
use jtalg::jomega::{jw_mul, jw_verify, JOmega};
use jtalg::stage::{self, descent_step, lset_element, lset_locate, stage_left, stage_mul, stage_right, Ordinal};
use jtalg::term::check::{check_derivation, check_verdict};
use jtalg::term::decide::{decide, Verdict};
use jtalg::term::derivation::Axiom;
use jtalg::term::normalize::normalize;
use jtalg::term::{mult_count, parse_identity, Identity, Sym, Term};
use jtalg::Exec;

const SEED: u64 = 20_240_601;

struct Outcome {
    ok: bool,
    detail: String,
}

fn pass(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: true,
        detail: detail.into(),
    }
}

fn fail(detail: impl Into<String>) -> Outcome {
    Outcome {
        ok: false,
        detail: detail.into(),
    }
}

fn jtalg_bin(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_jtalg")).args(args).output().expect("run jtalg");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

// the block displayed in the source, typed in by hand
const TABLE: [[u64; 5]; 5] = [
    [1, 2, 5, 9, 14],
    [0, 4, 8, 13, 19],
    [3, 7, 12, 18, 25],
    [6, 11, 17, 24, 32],
    [10, 16, 23, 31, 40],
];

fn c1_table() -> Outcome {
    let (code, out) = jtalg_bin(&["jw", "table", "--rows", "5", "--cols", "5"]);
    let rows: Vec<Vec<u64>> = out
        .lines()
        .map(|l| l.split_whitespace().map(|v| v.parse().unwrap()).collect())
        .collect();
    let want: Vec<Vec<u64>> = TABLE.iter().map(|r| r.to_vec()).collect();
    let fill = oracles::diagonal_fill(10);
    let oracle_ok = (0..5u64).all(|p| (0..5u64).all(|q| fill[&(p, q)] == TABLE[p as usize][q as usize]));
    if code == 0 && rows == want && oracle_ok {
        pass("25/25 cells match; diagonal-fill oracle agrees")
    } else {
        fail(format!("exit {code}, got {rows:?}, oracle agrees: {oracle_ok}"))
    }
}

fn c2_bijection() -> Outcome {
    let report = jw_verify(1_000_000, 2000, Exec::default());
    let fill = oracles::diagonal_fill(200);
    let mismatch = fill
        .iter()
        .find(|((p, q), v)| jw_mul(&BigUint::from(*p), &BigUint::from(*q)) != BigUint::from(**v));
    match (report.passed(), mismatch) {
        (true, None) => pass(format!(
            "{} values, {} pairs, 0 failures; {} oracle cells agree",
            report.values_checked,
            report.pairs_checked,
            fill.len()
        )),
        (_, m) => fail(format!("{} failures {:?}; oracle mismatch {m:?}", report.failure_count, report.failures)),
    }
}

fn c3_generation() -> Outcome {
    let zero = BigUint::from(0u32);
    for n in 0..=32u32 {
        let c = closure(&JOmega, &[BigUint::from(n)], ClosureBudget::unary_only(10_000)).unwrap();
        if !c.contains(&zero) || c.truncated() {
            return fail(format!("closure of {{{n}}} misses 0"));
        }
    }
    let c = closure(&JOmega, &[zero], ClosureBudget::with_ceiling(1_000_000, BigUint::from(2000u32))).unwrap();
    let missing: Vec<u32> = (0..=100).filter(|m| !c.contains(&BigUint::from(*m))).collect();
    if missing.is_empty() && !c.truncated() {
        pass(format!("33 generators reach 0; closure of {{0}} has {} elements", c.len()))
    } else {
        fail(format!("missing {missing:?}, truncated {}", c.truncated()))
    }
}

fn certified(id: &Identity, v: &Verdict) -> bool {
    check_verdict(id, v).is_ok()
}

fn c4_sigma() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut ids: Vec<Identity> = Axiom::ALL.iter().map(|a| a.identity()).collect();
    for ax in Axiom::ALL {
        ids.extend((0..50).map(|_| sigma_instance(&mut rng, ax, 4)));
    }
    for id in &ids {
        let v = decide(id);
        if !v.is_entailed() || !certified(id, &v) {
            return fail(format!("{id} gave {} or an invalid certificate", v.name()));
        }
    }
    let collapsing = ["l(x) = x", "r(x) = x", "l(x) = l(y)", "(x*y) = (y*x)", "(x*y) = z"];
    for s in collapsing {
        let id = parse_identity(s).unwrap();
        let v = decide(&id);
        if v.is_entailed() || !certified(&id, &v) {
            return fail(format!("{s} gave {} or an invalid certificate", v.name()));
        }
    }
    pass(format!("{} entailed, {} collapsing, all certificates replay", ids.len(), collapsing.len()))
}

struct Decided {
    id: Identity,
    verdict: Verdict,
}

fn corpus_verdicts() -> Result<Vec<Decided>, String> {
    let ids: Vec<Identity> = Corpus::new(SEED, 12).take(10_000).collect();
    let verdicts = Exec::default().map_slice(&ids, |id| catch_unwind(AssertUnwindSafe(|| decide(id))).ok());
    ids.into_iter()
        .zip(verdicts)
        .map(|(id, v)| match v {
            Some(verdict) => Ok(Decided { id, verdict }),
            None => Err(format!("decide panicked on {id}")),
        })
        .collect()
}

fn c5_dichotomy(decided: &Result<Vec<Decided>, String>) -> Outcome {
    let decided = match decided {
        Ok(d) => d,
        Err(e) => return fail(e.clone()),
    };
    let mut entailed = 0;
    for d in decided {
        if let Err(f) = check_verdict(&d.id, &d.verdict) {
            return fail(format!("{}: {} certificate rejected: {f}", d.id, d.verdict.name()));
        }
        let again = decide(&d.id.flipped());
        if again.is_entailed() != d.verdict.is_entailed() {
            return fail(format!("{} and its mirror get different verdicts", d.id));
        }
        match &d.verdict {
            Verdict::Entailed(_) => {
                entailed += 1;
                // an entailed identity must not also pass as a collapse
                let as_collapse = Verdict::Collapsing(d.verdict.derivation().clone());
                if check_verdict(&d.id, &as_collapse).is_ok() {
                    return fail(format!("{} certifies both verdicts", d.id));
                }
            }
            Verdict::Collapsing(c) => {
                if check_derivation(c, None).is_ok() {
                    return fail(format!("{} collapse replays without its hypothesis", d.id));
                }
            }
        }
    }
    pass(format!(
        "{} identities: {entailed} entailed, {} collapsing, every certificate checks",
        decided.len(),
        decided.len() - entailed
    ))
}

fn eval(t: &Term, env: &Assignment<BigUint>) -> BigUint {
    evaluate(t, &JOmega, env).expect("all variables bound")
}

fn distinguishes(id: &Identity, bound: u32) -> bool {
    let vars: Vec<String> = id.vars().into_iter().collect();
    let total = (bound as u64).pow(vars.len() as u32);
    (0..total).any(|mut code| {
        let env: Assignment<BigUint> = vars
            .iter()
            .map(|v| {
                let val = code % bound as u64;
                code /= bound as u64;
                (v.clone(), BigUint::from(val))
            })
            .collect();
        eval(&id.lhs, &env) != eval(&id.rhs, &env)
    })
}

fn c6_models(decided: &Result<Vec<Decided>, String>) -> Outcome {
    let decided = match decided {
        Ok(d) => d,
        Err(e) => return fail(e.clone()),
    };
    let entailed: Vec<&Decided> = decided.iter().filter(|d| d.verdict.is_entailed()).collect();
    let bad = Exec::default().map_slice(&entailed, |d| {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ d.id.to_string().len() as u64);
        (0..100).any(|_| {
            let env: Assignment<BigUint> = VARS
                .iter()
                .map(|v| (v.to_string(), BigUint::from(rng.gen_range(0..10_000u32))))
                .collect();
            eval(&d.id.lhs, &env) != eval(&d.id.rhs, &env)
        })
    });
    if let Some(i) = bad.iter().position(|b| *b) {
        return fail(format!("entailed {} differs in J_omega", entailed[i].id));
    }
    let small: Vec<&Decided> = decided
        .iter()
        .filter(|d| !d.verdict.is_entailed() && d.id.lhs.size().max(d.id.rhs.size()) <= 8)
        .collect();
    let found = Exec::default().map_slice(&small, |d| distinguishes(&d.id, 32));
    let misses: Vec<String> = small
        .iter()
        .zip(&found)
        .filter(|(_, f)| !**f)
        .map(|(d, _)| d.id.to_string())
        .collect();
    let mut explained = Vec::new();
    for m in &misses {
        let d = small.iter().find(|d| d.id.to_string() == *m).unwrap();
        if check_verdict(&d.id, &d.verdict).is_err() {
            return fail(format!("{m}: no separating assignment below 32 and the certificate fails"));
        }
        match separate_beyond_window(&d.id) {
            Some(env) => explained.push(format!("{m} separated at {env:?}")),
            None => return fail(format!("{m}: no separating assignment found")),
        }
    }
    let note = if explained.is_empty() {
        String::new()
    } else {
        format!("; {} beyond the <32 window: {}", explained.len(), explained.join("; "))
    };
    pass(format!(
        "{} entailed agree on 100 assignments; {} of {} small collapsing identities separated below 32{note}",
        entailed.len(),
        small.len() - misses.len(),
        small.len()
    ))
}

// smallest v with s(v) = w for the projection s, read off the pairing
fn preimage(s: Sym, w: &BigUint) -> BigUint {
    let zero = BigUint::from(0u32);
    match s {
        Sym::L => jw_mul(w, &zero),
        Sym::R => jw_mul(&zero, w),
    }
}

// Builds each variable so that its side's projection chain lands on a
// chosen value, then confirms the two sides differ.
fn separate_beyond_window(id: &Identity) -> Option<Vec<(String, String)>> {
    let (a, b) = (id.lhs.unary_view()?, id.rhs.unary_view()?);
    for (ta, tb) in [(0u32, 1u32), (1, 0), (2, 3), (5, 7)] {
        let mut env: Assignment<BigUint> = Assignment::new();
        for (view, target) in [(&a, ta), (&b, tb)] {
            if env.contains_key(&view.variable) {
                continue;
            }
            let mut w = BigUint::from(target);
            for s in &view.prefix {
                w = preimage(*s, &w);
            }
            env.insert(view.variable.clone(), w);
        }
        if eval(&id.lhs, &env) != eval(&id.rhs, &env) {
            return Some(env.into_iter().map(|(k, v)| (k, v.to_string())).collect());
        }
    }
    None
}

fn c7_minimality() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut oracle = oracles::MinMult::new(16);
    for k in 0..2000 {
        let size = rng.gen_range(1..=8);
        let t = random_term(&mut rng, size, &VARS);
        let got = mult_count(&normalize(&t).0);
        let want = oracle.get(&t);
        if got != want {
            return fail(format!("sample {k}: {t} normalizes to {got} products, search finds {want}"));
        }
    }
    pass(format!("2000 sampled terms agree; {} states searched", oracle.states))
}

// columns of the displayed partition, offsets above the limit
const TABLE1: [&[u64]; 4] = [&[1, 5, 11, 19], &[3, 7, 13, 21], &[9, 15, 23], &[17, 25]];

fn c8_lsets() -> Outcome {
    let mut n = 0;
    for (m, col) in TABLE1.iter().enumerate() {
        for (i, off) in col.iter().enumerate() {
            let o = Ordinal::new(1, *off);
            let at = lset_element(Ordinal::OMEGA, m as u64, i as u64);
            let back = lset_locate(o);
            if at != Ok(o) || back != Ok((m as u64, i as u64)) {
                return fail(format!("L[{m}] #{i}: element {at:?}, located {back:?}, expected {o}"));
            }
            n += 1;
        }
    }
    pass(format!("{n} displayed entries reproduced and located (the table shows 13, not sixteen)"))
}

fn c9_stages() -> Outcome {
    let (code, out) = jtalg_bin(&["--format", "json", "jw1", "verify", "--stages", "4", "--window", "64"]);
    let v: serde_json::Value = match serde_json::from_str(&out) {
        Ok(v) => v,
        Err(e) => return fail(format!("exit {code}, unreadable report: {e}")),
    };
    let needed = [
        "axioms",
        "placement",
        "descent",
        "even_generation",
        "confinement",
        "restriction",
    ];
    let checks = v["checks"].as_array().cloned().unwrap_or_default();
    let ok_names: Vec<&str> = checks
        .iter()
        .filter(|c| c["failure_count"] == 0 && c["checked"].as_u64() > Some(0))
        .filter_map(|c| c["name"].as_str())
        .collect();
    let missing: Vec<&&str> = needed.iter().filter(|n| !ok_names.contains(n)).collect();
    if code == 0 && missing.is_empty() && ok_names.len() == checks.len() {
        pass(format!("{} checks pass, at most one even cell per region: {}", checks.len(), v["at_most_one_even_per_region"]))
    } else {
        fail(format!("exit {code}, missing or failing {missing:?}"))
    }
}

fn c10_derived() -> Outcome {
    let hand = oracles::HandOmega::build(32, 32);
    let w = |n: u64| Ordinal::new(1, n);
    let h = |o: Ordinal| (o.limit, o.offset);
    let expected = [
        ("w*w", stage_mul(w(0), w(0)).map(h).ok(), hand.mul((1, 0), (1, 0)), Some((1, 1))),
        ("r(w+4)", stage_right(w(4)).map(h).ok(), hand.right((1, 4)), Some((1, 6))),
        ("l(w+6)", stage_left(w(6)).map(h).ok(), hand.left((1, 6)), Some((1, 1))),
        (
            "l(r(w+8))",
            stage_right(w(8)).and_then(stage_left).map(h).ok(),
            hand.right((1, 8)).and_then(|r| hand.left(r)),
            Some((1, 2)),
        ),
        ("descent(w+8)", descent_step(w(8)).map(h).ok(), None, Some((1, 2))),
    ];
    for (what, lib, oracle, want) in expected {
        if lib != want || (oracle.is_some() && oracle != want) {
            return fail(format!("{what}: library {lib:?}, oracle {oracle:?}, expected {want:?}"));
        }
    }
    let to_ord = |(a, n): oracles::HOrd| Ordinal::new(a, n);
    for ((p, q), v) in &hand.cells {
        if stage::stage_mul(to_ord(*p), to_ord(*q)) != Ok(to_ord(*v)) {
            return fail(format!("cell ({p:?}, {q:?}): oracle {v:?}, library differs"));
        }
    }
    pass(format!("4 values match; library agrees on all {} oracle cells", hand.cells.len()))
}

fn main() -> ExitCode {
    let mut all_ok = true;
    let mut line = |n: u32, name: &str, limit: Duration, f: &mut dyn FnMut() -> Outcome| {
        let t = Instant::now();
        let out = f();
        let took = t.elapsed();
        let ok = out.ok && took <= limit;
        all_ok &= ok;
        println!(
            "criterion {n:>2} {} {name}: {} [{:.2}s, limit {}s]",
            if ok { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64(),
            limit.as_secs()
        );
    };
    let s = Duration::from_secs;
    line(1, "table reproduction", s(1), &mut c1_table);
    line(2, "pairing bijection", s(30), &mut c2_bijection);
    line(3, "generation on windows", s(30), &mut c3_generation);
    line(4, "axiom set", s(10), &mut c4_sigma);
    let mut decided = Err(String::from("not run"));
    line(5, "dichotomy at scale", s(60), &mut || {
        decided = corpus_verdicts();
        c5_dichotomy(&decided)
    });
    line(6, "model cross-validation", s(300), &mut || c6_models(&decided));
    line(7, "normal-form minimality", s(300), &mut c7_minimality);
    line(8, "L-set table", s(1), &mut c8_lsets);
    line(9, "stage verification", s(60), &mut c9_stages);
    line(10, "derived stage values", s(1), &mut c10_derived);
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
