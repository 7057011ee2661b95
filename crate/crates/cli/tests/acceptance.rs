//! One line per acceptance criterion. Exits non-zero if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use gengrass::comodule::{comodule_rank, freeness_certificate};
use gengrass::grassmann::quotient_mod_theta;
use gengrass::hull::{idempotent_system_check, projected_commutation_check, SignAssignment};
use gengrass::supertrace::{axiom_polys, derived_consequences, is_trace_identity};
use gengrass::{BaseRing, EpsMonomial, EpsPoly, GrassElem};
use gengrass_cli::eval::to_grass;
use gengrass_cli::expr::parse;
use gengrass_cli::suite::{power_witness, run_suite, SuiteName};
use num_bigint::BigInt;
use serde_json::Value;

const Z: BaseRing = BaseRing::Integers;
const Q: BaseRing = BaseRing::Rationals;
const SEED: u64 = 20240601;
const WORKERS: usize = 4;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn suite(name: SuiteName, ring: BaseRing, trials: usize) -> Result<(), String> {
    let rep = run_suite(name, ring, SEED, trials, WORKERS);
    ensure(rep.failures.is_empty(), || {
        let f = &rep.failures[0];
        format!("{} of {trials} {} trials failed; first (trial {}): {}", rep.failures.len(), name.as_str(), f.trial, f.message)
    })
}

/// `Σ c·θ^t·ε_S` from `(c, theta, indices)` triples.
fn eps_poly(ring: BaseRing, terms: &[(i64, bool, &[u32])]) -> EpsPoly {
    let mut p = EpsPoly::zero(ring);
    for &(c, theta, idx) in terms {
        p = &p + &EpsPoly::monomial(ring, ring.from_i64(c), EpsMonomial::new(theta, idx.to_vec()));
    }
    p
}

fn c1_sign_table() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_gengrass"))
        .args(["--format", "json", "signs", "--n", "3"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.success(), || format!("exit status {}", out.status))?;
    let v: Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let rows = v["details"]["signs"].as_array().ok_or("missing signs array")?;
    let table: [(&str, EpsPoly); 6] = [
        ("id", eps_poly(Z, &[(1, false, &[])])),
        ("(1 2)", eps_poly(Z, &[(1, false, &[]), (-1, false, &[1, 2])])),
        ("(2 3)", eps_poly(Z, &[(1, false, &[]), (-1, false, &[2, 3])])),
        (
            "(1 3)",
            eps_poly(Z, &[(1, false, &[]), (-1, false, &[1, 2]), (-1, false, &[2, 3]), (-1, false, &[1, 3]), (1, true, &[1, 2, 3])]),
        ),
        (
            "(1 2 3)",
            eps_poly(Z, &[(1, false, &[]), (-1, false, &[1, 2]), (-1, false, &[1, 3]), (1, true, &[1, 2, 3])]),
        ),
        (
            "(1 3 2)",
            eps_poly(Z, &[(1, false, &[]), (-1, false, &[1, 3]), (-1, false, &[2, 3]), (1, true, &[1, 2, 3])]),
        ),
    ];
    ensure(rows.len() == 6, || format!("{} rows", rows.len()))?;
    for (perm, want) in &table {
        let row = rows
            .iter()
            .find(|r| r["permutation"] == *perm)
            .ok_or_else(|| format!("no row for {perm}"))?;
        let text = row["esgn"].as_str().ok_or("esgn is not a string")?;
        let got = to_grass(&parse(text).map_err(|e| e.to_string())?, Z, false).map_err(|e| e.to_string())?;
        ensure(got == GrassElem::scalar(want.clone()), || format!("{perm}: got {text}, expected {want}"))?;
    }
    Ok("all six entries match".into())
}

fn c2_rank() -> Outcome {
    for ring in [Z, Q, BaseRing::Modular(2), BaseRing::Modular(3)] {
        for n in 1..=7 {
            let r = comodule_rank(n, ring).map_err(|e| e.to_string())?;
            ensure(r == 1 << (n - 1), || format!("rank {r} for n = {n} over {ring}"))?;
        }
    }
    Ok("rank 2^(n-1) for n = 1..7 over z, q, mod:2, mod:3".into())
}

fn c3_freeness() -> Outcome {
    for n in 1..=6 {
        let c = freeness_certificate(n).map_err(|e| e.to_string())?;
        let ones = c.diagonal.iter().all(|d| *d == BigInt::from(1));
        ensure(c.free && ones && c.diagonal.len() == 1 << (n - 1), || format!("n = {n}: diagonal {:?}", c.diagonal))?;
    }
    Ok("all-ones Smith diagonal for n = 1..6".into())
}

fn c4_grassmann() -> Outcome {
    suite(SuiteName::Grassmann, Z, 200)?;
    Ok("200 random triples satisfy all three identities".into())
}

fn c5_cocycle() -> Outcome {
    suite(SuiteName::Cocycle, Z, 500)?;
    Ok("500 random (w, s, t) satisfy both laws".into())
}

fn c6_idempotents() -> Outcome {
    for ring in [Q, BaseRing::Modular(5)] {
        for k in 1..=4u32 {
            let x: Vec<u32> = (1..=k).collect();
            let rep = idempotent_system_check(ring, &x).map_err(|e| e.to_string())?;
            ensure(rep.holds(), || format!("|X| = {k} over {ring}: {rep:?}"))?;
            if k <= 3 {
                for s in SignAssignment::all(&x) {
                    let ok = projected_commutation_check(ring, &s).map_err(|e| e.to_string())?;
                    ensure(ok, || format!("projected piece {s} over {ring}"))?;
                }
            }
        }
    }
    Ok("complete orthogonal system for |X| <= 4, projected pieces for |X| <= 3".into())
}

fn c7_involution_hull() -> Outcome {
    suite(SuiteName::Involution, Z, 200)?;
    suite(SuiteName::Hull, Q, 100)?;
    Ok("200 involutions, 100 hull factorizations".into())
}

fn c8_trace() -> Outcome {
    let (axioms, derived) = (axiom_polys(Z), derived_consequences(Z));
    ensure(axioms.len() == 4 && derived.len() == 3, || format!("{} axioms, {} consequences", axioms.len(), derived.len()))?;
    for (name, f) in axioms.into_iter().chain(derived) {
        ensure(is_trace_identity(&f).map_err(|e| e.to_string())?, || format!("{name} does not normalize to 0"))?;
    }
    suite(SuiteName::Trace, Z, 200)?;
    Ok("4 axioms, 3 consequences, 200 random consequences, 200 soundness checks".into())
}

fn c9_finite_field() -> Outcome {
    let f3 = BaseRing::Modular(3);
    suite(SuiteName::Power, f3, 50)?;
    let fixture: Value = serde_json::from_str(include_str!("fixtures/f3_witness.json")).map_err(|e| e.to_string())?;
    let w = power_witness(f3).map_err(|e| e.to_string())?.ok_or("no witness within the search bound")?;
    let field = |k: &str| fixture[k].as_str().unwrap_or_default().to_string();
    ensure(w.x.render() == field("x") && w.y.render() == field("y"), || format!("witness ({}, {}) differs from fixture", w.x, w.y))?;
    ensure(w.value.render() == field("value"), || format!("value {} differs from fixture", w.value))?;
    ensure(
        fixture["search_bound"].as_u64() == Some(w.bound as u64) && fixture["pairs_tried"].as_u64() == Some(w.tried as u64),
        || "search bound or position differs from fixture".into(),
    )?;
    // theta^3 - theta^9 = 2*theta - 16*theta = -14*theta = theta (mod 3).
    let expected = GrassElem::scalar(EpsPoly::theta(f3).scale(&f3.from_i64(-14)));
    ensure(w.value == expected, || format!("independent value {expected} differs from {}", w.value))?;
    Ok(format!(
        "vanishes on 50 projected samples; witness x = {}, y = {} gives {} ({} of {} pairs)",
        w.x, w.y, w.value, w.tried, w.bound
    ))
}

fn c10_mod_theta() -> Outcome {
    let f2 = BaseRing::Modular(2);
    for i in 1..=4 {
        let eps_i = EpsPoly::eps(Z, i);
        let sq = quotient_mod_theta(&GrassElem::scalar(&eps_i * &eps_i)).map_err(|e| e.to_string())?;
        ensure(sq.is_zero(), || format!("eps{i}^2 survives"))?;
        for j in 1..=4 {
            let (a, b) = (GrassElem::generator(Z, i), GrassElem::generator(Z, j));
            let lhs = quotient_mod_theta(&a.commutator(&b)).map_err(|e| e.to_string())?;
            let rhs = GrassElem::from_term(
                EpsPoly::monomial(f2, f2.one(), EpsMonomial::new(false, if i == j { vec![] } else { vec![i.min(j), i.max(j)] })),
                gengrass::Word::from_letters(&[i, j]),
            );
            let rhs = if i == j { GrassElem::zero(f2) } else { rhs };
            ensure(lhs == rhs, || format!("[e{i},e{j}] = {lhs}, expected {rhs}"))?;
        }
    }
    Ok("eps_i^2 = 0 and [e_i,e_j] = eps_i*eps_j*e_i*e_j for i, j <= 4".into())
}

type Criterion = (u32, Duration, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        (1, Duration::from_secs(1), c1_sign_table),
        (2, Duration::from_secs(60), c2_rank),
        (3, Duration::from_secs(60), c3_freeness),
        (4, Duration::from_secs(30), c4_grassmann),
        (5, Duration::from_secs(30), c5_cocycle),
        (6, Duration::from_secs(30), c6_idempotents),
        (7, Duration::from_secs(60), c7_involution_hull),
        (8, Duration::from_secs(120), c8_trace),
        (9, Duration::from_secs(120), c9_finite_field),
        (10, Duration::from_secs(5), c10_mod_theta),
    ];
    let mut failed = 0;
    for (k, limit, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let verdict = match outcome {
            Ok(msg) if elapsed <= limit => format!("PASS {msg}"),
            Ok(msg) => format!("FAIL over time limit {limit:?}: {msg}"),
            Err(msg) => format!("FAIL {msg}"),
        };
        if verdict.starts_with("FAIL") {
            failed += 1;
        }
        println!("criterion {k}: {verdict} [{:.2}s]", elapsed.as_secs_f64());
    }
    println!("acceptance: {} passed, {failed} failed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
