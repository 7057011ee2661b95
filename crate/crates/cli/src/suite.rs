//! Seeded randomized property suites. Trial `i` draws from its own ChaCha
//! stream, so results do not depend on how trials are split over workers.

use gengrass::comodule::NcPoly;
use gengrass::grassmann::{esgn, permute_words};
use gengrass::hull::{
    grassmann_involution, hull_eval_factorization, lambda_idempotent, SignAssignment,
};
use gengrass::supertrace::{eval_trace_poly, is_trace_identity, trace_normalize, SuperTraceContext, TracePoly};
use gengrass::{sample, BaseRing, EpsPoly, GrassElem, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SuiteName {
    /// `[x,[y,z]]`, `[x,u][v,z]+[x,v][u,z]` and `[x,y][y,z]` on random elements.
    Grassmann,
    /// Both cocycle laws of the generalized sign.
    Cocycle,
    /// `f** = f` on random graded polynomials.
    Involution,
    /// Hull evaluation factorization with 2×2 matrices.
    Hull,
    /// Random trace-axiom consequences vanish; normal forms evaluate equally.
    Trace,
    /// `x⁹y³ − x³y⁹` on the all-odd projection `Λ_s𝔊_X`.
    Power,
}

impl SuiteName {
    pub fn as_str(&self) -> &'static str {
        match self {
            SuiteName::Grassmann => "grassmann",
            SuiteName::Cocycle => "cocycle",
            SuiteName::Involution => "involution",
            SuiteName::Hull => "hull",
            SuiteName::Trace => "trace",
            SuiteName::Power => "power",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialFailure {
    pub trial: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuiteReport {
    pub trials: usize,
    pub failures: Vec<TrialFailure>,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.trials - self.failures.len()
    }
}

pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

pub fn run_suite(name: SuiteName, ring: BaseRing, seed: u64, trials: usize, workers: usize) -> SuiteReport {
    let workers = workers.clamp(1, trials.max(1));
    let mut results: Vec<(usize, Result<(), String>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w..trials)
                        .step_by(workers)
                        .map(|i| (i, run_trial(name, ring, &mut trial_rng(seed, i))))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    });
    results.sort_by_key(|(i, _)| *i);
    let failures = results
        .into_iter()
        .filter_map(|(trial, r)| r.err().map(|message| TrialFailure { trial, message }))
        .collect();
    SuiteReport { trials, failures }
}

fn check(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

pub fn run_trial(name: SuiteName, ring: BaseRing, rng: &mut ChaCha8Rng) -> Result<(), String> {
    match name {
        SuiteName::Grassmann => grassmann_trial(ring, rng),
        SuiteName::Cocycle => cocycle_trial(ring, rng),
        SuiteName::Involution => {
            let n = rng.gen_range(1..=5);
            let f = sample::graded_poly(rng, ring, n, 5);
            check(grassmann_involution(&grassmann_involution(&f)) == f, || "f** != f".into())
        }
        SuiteName::Hull => {
            let n = rng.gen_range(1..=4);
            let f = sample::graded_poly(rng, ring, n, 4);
            let mats: Vec<_> = (0..n).map(|_| sample::int_matrix(rng, ring, 2, 3)).collect();
            let words: Vec<_> = f
                .grades()
                .iter()
                .map(|g| sample::sword_of_grade(g, rng.gen_range(1..=2)))
                .collect();
            let ok = hull_eval_factorization(&f, &mats, &words).map_err(|e| e.to_string())?;
            check(ok, || format!("factorization fails for {}", f.poly()))
        }
        SuiteName::Trace => trace_trial(ring, rng),
        SuiteName::Power => power_trial(ring, rng),
    }
}

fn grassmann_trial(ring: BaseRing, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let mut draw = || sample::grass(rng, ring, 4, 3, 3, true);
    let (x, y, z, u, v) = (draw(), draw(), draw(), draw(), draw());
    check(x.commutator(&y.commutator(&z)).is_zero(), || format!("[x,[y,z]] != 0 at {x}; {y}; {z}"))?;
    let sum = &(&x.commutator(&u) * &v.commutator(&z)) + &(&x.commutator(&v) * &u.commutator(&z));
    check(sum.is_zero(), || format!("[x,u][v,z]+[x,v][u,z] != 0 at {x}; {u}; {v}; {z}"))?;
    check((&x.commutator(&y) * &y.commutator(&z)).is_zero(), || format!("[x,y][y,z] != 0 at {x}; {y}; {z}"))
}

fn cocycle_trial(ring: BaseRing, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let n = rng.gen_range(1..=6);
    let w: Vec<Word> = (0..n).map(|_| sample::word(rng, 6, 3)).collect();
    let s = sample::permutation(rng, n);
    let t = sample::permutation(rng, n);
    let err = |e: gengrass::AlgebraError| e.to_string();
    let lhs = esgn(ring, &w, &s.compose(&t)).map_err(err)?;
    let rhs = &esgn(ring, &w, &s).map_err(err)? * &esgn(ring, &permute_words(&w, &s), &t).map_err(err)?;
    check(lhs == rhs, || format!("cocycle law fails for {s}, {t}"))?;
    let gens: Vec<Word> = (1..=n as u32).map(Word::letter).collect();
    let lhs = esgn(ring, &gens, &s.compose(&t)).map_err(err)?;
    let rhs = &esgn(ring, &gens, &s).map_err(err)? * &esgn(ring, &gens, &t).map_err(err)?.phi_sigma(&s);
    check(lhs == rhs, || format!("twisted cocycle law fails for {s}, {t}"))
}

fn random_trace_poly(rng: &mut ChaCha8Rng, ring: BaseRing, n: u32) -> TracePoly {
    let letters: Vec<u32> = (1..=n).collect();
    let mut f = TracePoly::zero(ring);
    for _ in 0..3 {
        let t = sample::trace_term(rng, &letters, 2);
        f = f.add(&sample::term_poly(ring, t).scale(&sample::nonzero_scalar(rng, ring, 3)));
    }
    f
}

fn trace_trial(ring: BaseRing, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let err = |e: gengrass::AlgebraError| e.to_string();
    let g = sample::trace_consequence(rng, ring, 2);
    check(is_trace_identity(&g).map_err(err)?, || format!("consequence {g} does not normalize to 0"))?;
    let f = random_trace_poly(rng, ring, 3);
    let nf = trace_normalize(&f).map_err(err)?.to_trace_poly();
    let ctx = SuperTraceContext { size: 2 };
    let subs: Vec<_> = (0..3).map(|_| sample::grass_matrix(rng, ring, 2, 3)).collect();
    let lhs = eval_trace_poly(&f, &ctx, &subs).map_err(err)?;
    let rhs = eval_trace_poly(&nf, &ctx, &subs).map_err(err)?;
    check(lhs == rhs, || format!("evaluation of {f} differs from its normal form"))
}

/// `x⁹y³ − x³y⁹`.
pub fn power_poly(ring: BaseRing) -> NcPoly {
    let (x, y) = (NcPoly::var(ring, 1), NcPoly::var(ring, 2));
    x.pow(9).mul(&y.pow(3)).sub(&x.pow(3).mul(&y.pow(9)))
}

/// Generators indexed by `X = {1, 2, 3}`, all declared odd.
const POWER_X: [u32; 3] = [1, 2, 3];

fn power_trial(ring: BaseRing, rng: &mut ChaCha8Rng) -> Result<(), String> {
    let s = SignAssignment::new(&POWER_X, &POWER_X);
    let l = GrassElem::scalar(lambda_idempotent(ring, &s).map_err(|e| e.to_string())?);
    let x = &l * &sample::grass(rng, ring, 3, 3, 4, true);
    let y = &l * &sample::grass(rng, ring, 3, 3, 4, true);
    let v = power_poly(ring).evaluate(&[x.clone(), y.clone()]).map_err(|e| e.to_string())?;
    check(v.is_zero(), || format!("x^9*y^3 - x^3*y^9 = {v} at x = {x}, y = {y}"))
}

/// Small elements of `𝔊` over the ring, in search order: coefficient
/// monomials times words in `e₁, e₂`.
pub fn power_candidates(ring: BaseRing) -> Vec<GrassElem> {
    let e = |i| EpsPoly::eps(ring, i);
    let th = EpsPoly::theta(ring);
    let coeffs = vec![
        EpsPoly::one(ring),
        EpsPoly::from_i64(ring, 2),
        th.clone(),
        e(1),
        e(2),
        &th * &e(1),
        &e(1) * &e(2),
    ];
    let words = [vec![], vec![1], vec![2], vec![1, 2], vec![1, 1]];
    let mut out = Vec::new();
    for w in &words {
        for c in &coeffs {
            let x = GrassElem::from_term(c.clone(), Word::from_letters(w));
            if !x.is_zero() {
                out.push(x);
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct PowerWitness {
    pub x: GrassElem,
    pub y: GrassElem,
    pub value: GrassElem,
    /// Number of candidate pairs examined.
    pub tried: usize,
    pub bound: usize,
}

/// First pair of candidates, in lexicographic order, where `x⁹y³ − x³y⁹`
/// is nonzero in `𝔊`.
pub fn power_witness(ring: BaseRing) -> Result<Option<PowerWitness>, gengrass::AlgebraError> {
    let cands = power_candidates(ring);
    let f = power_poly(ring);
    let bound = cands.len() * cands.len();
    let mut tried = 0;
    for x in &cands {
        for y in &cands {
            tried += 1;
            let value = f.evaluate(&[x.clone(), y.clone()])?;
            if !value.is_zero() {
                return Ok(Some(PowerWitness {
                    x: x.clone(),
                    y: y.clone(),
                    value,
                    tried,
                    bound,
                }));
            }
        }
    }
    Ok(None)
}
