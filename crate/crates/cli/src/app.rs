use std::ffi::OsString;

use clap::{Parser, Subcommand, ValueEnum};
use gengrass::comodule::{
    comodule_rank, freeness_certificate, grassmann_normal_form, matrix_dump, psi, spanning_terms, NcPoly,
    MAX_ARITY,
};
use gengrass::grassmann::esgn_standard;
use gengrass::hull::{grassmann_involution, idempotent_system_check, projected_commutation_check, GradedPoly, SignAssignment};
use gengrass::supertrace::{trace_normalize, witness_search};
use gengrass::{AlgebraError, BaseRing, Grade, GrassElem, Permutation, Scalar};
use serde_json::{json, Value};

use crate::eval::{self, EvalError};
use crate::expr::{self, Expr};
use crate::suite::{run_suite, SuiteName};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPABILITY: i32 = 3;

/// Largest `|X|` accepted by `idempotents`.
pub const MAX_IDEMPOTENT_X: usize = 6;
/// Largest `|X|` for which `idempotents` also checks every projected piece.
pub const MAX_PROJECTED_X: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Parser, Debug)]
#[command(name = "gengrass", version, about = "Exact computations in the generalized Grassmann algebra")]
struct Cli {
    /// Base ring: z, q or mod:<m>.
    #[arg(long, global = true, default_value = "z", value_parser = parse_ring)]
    ring: BaseRing,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Use the truncated mode where e_i^2 = 0.
    #[arg(long, global = true)]
    truncated: bool,
    #[command(subcommand)]
    command: Command,
}

fn parse_ring(s: &str) -> Result<BaseRing, String> {
    s.parse().map_err(|e: AlgebraError| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Normal form of an element of the algebra.
    Normalize { expr: String },
    /// Decide whether a multilinear polynomial is an identity.
    CheckIdentity {
        expr: String,
        #[arg(long)]
        vars: usize,
        /// Evaluate at the generators instead (one-sided test).
        #[arg(long)]
        direct: bool,
    },
    /// Rank and freeness certificate of the sign co-module.
    Comodule {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dump_matrix: bool,
    },
    /// Generalized signs of all permutations of {1..n}.
    Signs {
        #[arg(long)]
        n: usize,
    },
    /// Check the idempotent system over X = {1..k}.
    Idempotents {
        #[arg(long = "X")]
        x: usize,
    },
    /// Decide a trace identity and print its standard form.
    TraceCheck { expr: String },
    /// Search for a matrix substitution on which a trace polynomial is nonzero.
    TraceWitness {
        expr: String,
        #[arg(long)]
        max_n: usize,
    },
    /// Grassmann involution of a graded multilinear polynomial.
    Involution {
        expr: String,
        #[arg(long)]
        vars: usize,
    },
    /// Run a seeded randomized property suite.
    Suite {
        #[arg(value_enum)]
        name: SuiteName,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Normalize { .. } => "normalize",
            Command::CheckIdentity { .. } => "check-identity",
            Command::Comodule { .. } => "comodule",
            Command::Signs { .. } => "signs",
            Command::Idempotents { .. } => "idempotents",
            Command::TraceCheck { .. } => "trace-check",
            Command::TraceWitness { .. } => "trace-witness",
            Command::Involution { .. } => "involution",
            Command::Suite { .. } => "suite",
        }
    }
}

/// Process result: exit code plus the text for each stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Output {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Report {
    code: i32,
    result: String,
    details: Value,
    text: Vec<String>,
}

impl Report {
    fn new(code: i32, result: impl Into<String>) -> Self {
        Report {
            code,
            result: result.into(),
            details: json!({}),
            text: Vec::new(),
        }
    }

    fn line(&mut self, s: impl Into<String>) {
        self.text.push(s.into());
    }

    fn detail(&mut self, key: &str, v: Value) {
        self.details[key] = v;
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Usage(message) => Failure { code: EXIT_USAGE, message },
            EvalError::Algebra(e) => e.into(),
        }
    }
}

impl From<AlgebraError> for Failure {
    fn from(e: AlgebraError) -> Self {
        Failure {
            code: algebra_exit_code(&e),
            message: e.to_string(),
        }
    }
}

impl From<expr::ParseError> for Failure {
    fn from(e: expr::ParseError) -> Self {
        usage(format!("parse error at {e}"))
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

/// Exit code for a library error.
pub fn algebra_exit_code(e: &AlgebraError) -> i32 {
    use AlgebraError::*;
    match e {
        NotMultilinear(_) | InvalidModulus(_) | UnknownRing(_) | ArityMismatch { .. } | InvalidPermutation(_)
        | GradeMismatch(_) | DimensionMismatch(_) => EXIT_USAGE,
        RingMismatch(..) | ModeMismatch | NotInvertible(..) | TwoNotInvertible(_) | UnsupportedRing(_)
        | UnsupportedGenerator(_) | ArityTooLarge(..) | PureTraceArgument(_) | Internal(_) => EXIT_CAPABILITY,
    }
}

pub fn run<I, T>(args: I) -> Output
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                Output {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: rendered,
                }
            } else {
                Output {
                    code: EXIT_OK,
                    stdout: rendered,
                    stderr: String::new(),
                }
            };
        }
    };
    let command = cli.command.name();
    let ring = cli.ring;
    match dispatch(&cli) {
        Ok(r) => {
            let stdout = match cli.format {
                Format::Text => r.text.join("\n") + "\n",
                Format::Json => {
                    let v = json!({
                        "command": command,
                        "ring": ring.to_string(),
                        "result": r.result,
                        "details": r.details,
                    });
                    serde_json::to_string_pretty(&v).expect("json") + "\n"
                }
            };
            Output {
                code: r.code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(f) => {
            let stdout = match cli.format {
                Format::Text => String::new(),
                Format::Json => {
                    let v = json!({
                        "command": command,
                        "ring": ring.to_string(),
                        "result": "error",
                        "details": { "exit_code": f.code, "message": f.message },
                    });
                    serde_json::to_string_pretty(&v).expect("json") + "\n"
                }
            };
            Output {
                code: f.code,
                stdout,
                stderr: format!("error: {}\n", f.message),
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<Report, Failure> {
    let ring = cli.ring;
    match &cli.command {
        Command::Normalize { expr } => normalize(expr, ring, cli.truncated),
        Command::CheckIdentity { expr, vars, direct } => check_identity(expr, ring, *vars, *direct, cli.truncated),
        Command::Comodule { n, dump_matrix } => comodule(*n, ring, *dump_matrix),
        Command::Signs { n } => signs(*n, ring),
        Command::Idempotents { x } => idempotents(*x, ring),
        Command::TraceCheck { expr } => trace_check(expr, ring),
        Command::TraceWitness { expr, max_n } => trace_witness(expr, ring, *max_n),
        Command::Involution { expr, vars } => involution(expr, ring, *vars),
        Command::Suite { name, trials, workers } => suite(*name, ring, cli.seed, *trials, *workers),
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Cycle notation, fixed points omitted; the identity is `id`.
pub fn cycle_notation(p: &Permutation) -> String {
    let n = p.degree();
    let mut seen = vec![false; n + 1];
    let mut out = String::new();
    for start in 1..=n {
        if seen[start] || p.apply(start) == start {
            continue;
        }
        let mut cycle = Vec::new();
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            cycle.push(i.to_string());
            i = p.apply(i);
        }
        out.push_str(&format!("({})", cycle.join(" ")));
    }
    if out.is_empty() {
        "id".to_string()
    } else {
        out
    }
}

fn parse_expr(text: &str) -> Result<Expr, Failure> {
    Ok(expr::parse(text)?)
}

fn check_vars(e: &Expr, n: usize) -> Result<(), Failure> {
    if n == 0 {
        return Err(usage("--vars must be at least 1"));
    }
    let m = e.max_var() as usize;
    if m > n {
        return Err(usage(format!("expression uses x{m} but --vars is {n}")));
    }
    Ok(())
}

fn normalize(text: &str, ring: BaseRing, truncated: bool) -> Result<Report, Failure> {
    let x = eval::to_grass(&parse_expr(text)?, ring, truncated)?;
    let mut r = Report::new(EXIT_OK, x.render());
    r.line(x.render());
    r.detail("value", json!(x.render()));
    r.detail("terms", json!(x.len()));
    r.detail("truncated", json!(truncated));
    Ok(r)
}

fn generators(ring: BaseRing, n: usize, truncated: bool) -> Vec<GrassElem> {
    (1..=n as u32)
        .map(|i| GrassElem::generator(ring, i).with_truncated(truncated))
        .collect()
}

fn check_identity(text: &str, ring: BaseRing, n: usize, direct: bool, truncated: bool) -> Result<Report, Failure> {
    let e = parse_expr(text)?;
    check_vars(&e, n)?;
    let grades = eval::grades_of(&e, n)?;
    let f: NcPoly = eval::to_nc(&e, ring, &grades)?;
    if direct {
        let v = f.evaluate(&generators(ring, n, truncated))?;
        let zero = v.is_zero();
        let result = if zero { "vanishes at generators" } else { "not an identity" };
        let mut r = Report::new(if zero { EXIT_OK } else { EXIT_NEGATIVE }, result);
        r.line(result);
        r.line(format!("value at generators: {v}"));
        if zero {
            r.line("conclusive: no");
        }
        r.detail("value", json!(v.render()));
        r.detail("conclusive", json!(!zero));
        return Ok(r);
    }
    if n > MAX_ARITY {
        return Err(AlgebraError::ArityTooLarge(n, MAX_ARITY).into());
    }
    let m = f.to_multilinear(n)?;
    let identity = m.is_identity();
    let image = psi(&m);
    let result = if identity { "identity" } else { "not an identity" };
    let mut r = Report::new(if identity { EXIT_OK } else { EXIT_NEGATIVE }, result);
    r.line(result);
    r.line(format!("psi: {image}"));
    r.detail("polynomial", json!(m.render()));
    r.detail("psi", json!(image.to_string()));
    r.detail("conclusive", json!(true));
    if m.is_plain() && (ring == BaseRing::Integers || ring.is_field()) {
        let nf = grassmann_normal_form(&m)?;
        let entries: Vec<Value> = nf
            .iter()
            .map(|(t, c)| json!({ "term": t.render(), "coefficient": ring.render(c) }))
            .collect();
        r.line(format!("normal form: {}", render_combination(ring, nf.iter().map(|(t, c)| (t.render(), c)))));
        r.detail("normal_form", Value::Array(entries));
    }
    Ok(r)
}

fn render_combination<'a>(ring: BaseRing, terms: impl Iterator<Item = (String, &'a Scalar)>) -> String {
    let mut s = String::new();
    for (t, c) in terms {
        let neg = ring.is_negative(c);
        let abs = if neg { ring.neg(c) } else { c.clone() };
        s.push_str(match (s.is_empty(), neg) {
            (true, true) => "-",
            (true, false) => "",
            (false, true) => " - ",
            (false, false) => " + ",
        });
        if !ring.is_one(&abs) {
            s.push_str(&format!("{}*", ring.render(&abs)));
        }
        s.push_str(&t);
    }
    if s.is_empty() {
        "0".to_string()
    } else {
        s
    }
}

fn comodule(n: usize, ring: BaseRing, dump: bool) -> Result<Report, Failure> {
    if n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let rank = comodule_rank(n, ring)?;
    let cert = freeness_certificate(n)?;
    let expected = 1usize << (n - 1);
    let ok = cert.holds() && rank == expected;
    let diagonal: Vec<String> = cert.diagonal.iter().map(|d| d.to_string()).collect();
    let basis: Vec<(String, String)> = spanning_terms(n)
        .iter()
        .map(|t| (t.render(), psi(&t.poly(ring)).to_string()))
        .collect();
    let mut r = Report::new(if ok { EXIT_OK } else { EXIT_NEGATIVE }, format!("rank {rank}"));
    r.line(format!("rank {rank}"));
    r.line(format!("free: {}", yes_no(cert.free)));
    r.line(format!("spans signs: {}", yes_no(cert.spans)));
    r.line(format!("smith diagonal: {}", diagonal.join(" ")));
    r.line("basis:");
    for (t, p) in &basis {
        r.line(format!("  {t} -> {p}"));
    }
    r.detail("rank", json!(rank));
    r.detail("expected_rank", json!(expected));
    r.detail("free", json!(cert.free));
    r.detail("spans", json!(cert.spans));
    r.detail("smith_diagonal", json!(diagonal));
    r.detail(
        "basis",
        Value::Array(basis.iter().map(|(t, p)| json!({ "term": t, "psi": p })).collect()),
    );
    if dump {
        let m = matrix_dump(n)?;
        r.line("sign matrix:");
        r.text.extend(m.lines().map(str::to_string));
        r.detail("matrix", json!(m));
    }
    Ok(r)
}

fn signs(n: usize, ring: BaseRing) -> Result<Report, Failure> {
    if n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    if n > MAX_ARITY {
        return Err(AlgebraError::ArityTooLarge(n, MAX_ARITY).into());
    }
    let mut r = Report::new(EXIT_OK, format!("{} signs", (1..=n).product::<usize>()));
    let mut entries = Vec::new();
    for p in Permutation::all(n) {
        let s = esgn_standard(ring, &p);
        let c = cycle_notation(&p);
        r.line(format!("{c}: {s}"));
        entries.push(json!({ "permutation": c, "images": p.images(), "esgn": s.to_string() }));
    }
    r.detail("signs", Value::Array(entries));
    Ok(r)
}

fn idempotents(k: usize, ring: BaseRing) -> Result<Report, Failure> {
    if k > MAX_IDEMPOTENT_X {
        return Err(AlgebraError::ArityTooLarge(k, MAX_IDEMPOTENT_X).into());
    }
    let x: Vec<u32> = (1..=k as u32).collect();
    let rep = idempotent_system_check(ring, &x)?;
    let mut r = Report::new(EXIT_OK, "");
    r.line(format!("idempotent: {}", yes_no(rep.idempotent)));
    r.line(format!("orthogonal: {}", yes_no(rep.orthogonal)));
    r.line(format!("sum is 1: {}", yes_no(rep.complete)));
    r.detail("idempotent", json!(rep.idempotent));
    r.detail("orthogonal", json!(rep.orthogonal));
    r.detail("complete", json!(rep.complete));
    let mut ok = rep.holds();
    if k <= MAX_PROJECTED_X {
        let mut pieces = Vec::new();
        let mut all = true;
        for s in SignAssignment::all(&x) {
            let holds = projected_commutation_check(ring, &s)?;
            all &= holds;
            pieces.push(json!({ "signs": s.to_string(), "holds": holds }));
            if !holds {
                r.line(format!("projected supercommutativity fails for {s}"));
            }
        }
        r.line(format!("projected supercommutativity: {}", yes_no(all)));
        r.detail("projected", json!(all));
        r.detail("pieces", Value::Array(pieces));
        ok &= all;
    } else {
        r.line("projected supercommutativity: skipped");
        r.detail("projected", Value::Null);
    }
    r.line(format!("complete system: {}", yes_no(ok)));
    r.detail("complete_system", json!(ok));
    r.result = format!("complete system: {}", yes_no(ok));
    r.code = if ok { EXIT_OK } else { EXIT_NEGATIVE };
    Ok(r)
}

fn trace_check(text: &str, ring: BaseRing) -> Result<Report, Failure> {
    let f = eval::to_trace(&parse_expr(text)?, ring)?;
    let sf = trace_normalize(&f)?;
    let identity = sf.is_zero();
    let result = if identity { "identity" } else { "not an identity" };
    let mut r = Report::new(if identity { EXIT_OK } else { EXIT_NEGATIVE }, result);
    r.line(result);
    r.line(format!("standard form: {sf}"));
    r.detail("input", json!(f.render()));
    r.detail("standard_form", json!(sf.render()));
    Ok(r)
}

fn trace_witness(text: &str, ring: BaseRing, max_n: usize) -> Result<Report, Failure> {
    let f = eval::to_trace(&parse_expr(text)?, ring)?;
    match witness_search(&f, max_n)? {
        Some(w) => {
            let mut r = Report::new(EXIT_OK, "witness found");
            r.line("witness found");
            r.line(format!("key: {}", w.key.render()));
            r.line(format!("matrix size: {}", w.size));
            let subs: Vec<String> = w.subs.iter().map(|m| m.render()).collect();
            for (i, m) in subs.iter().enumerate() {
                r.line(format!("x{} =", i + 1));
                r.text.extend(m.lines().map(|l| format!("  {l}")));
            }
            r.line("value =");
            r.text.extend(w.value.render().lines().map(|l| format!("  {l}")));
            r.detail("key", json!(w.key.render()));
            r.detail("size", json!(w.size));
            r.detail("substitution", json!(subs));
            r.detail("value", json!(w.value.render()));
            Ok(r)
        }
        None => {
            let identity = trace_normalize(&f)?.is_zero();
            let result = if identity {
                "identity, no witness exists".to_string()
            } else {
                format!("no witness up to size {max_n}")
            };
            let mut r = Report::new(EXIT_NEGATIVE, result.clone());
            r.line(result);
            r.detail("identity", json!(identity));
            r.detail("max_n", json!(max_n));
            Ok(r)
        }
    }
}

fn involution(text: &str, ring: BaseRing, n: usize) -> Result<Report, Failure> {
    let e = parse_expr(text)?;
    check_vars(&e, n)?;
    if n > MAX_ARITY {
        return Err(AlgebraError::ArityTooLarge(n, MAX_ARITY).into());
    }
    let grades = eval::grades_of(&e, n)?;
    let f = eval::to_nc(&e, ring, &grades)?.to_multilinear(n)?;
    let gs: Vec<Grade> = grades.values().map(|g| Grade::from_indices(g.iter().copied())).collect();
    let rendered: Vec<String> = gs.iter().map(|g| g.to_string()).collect();
    let g = GradedPoly::new(f, gs)?;
    let star = grassmann_involution(&g);
    let out = star.poly().render();
    let mut r = Report::new(EXIT_OK, out.clone());
    r.line(out.clone());
    r.detail("input", json!(g.poly().render()));
    r.detail("involution", json!(out));
    r.detail("grades", json!(rendered));
    Ok(r)
}

fn suite(name: SuiteName, ring: BaseRing, seed: u64, trials: usize, workers: usize) -> Result<Report, Failure> {
    if trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    let rep = run_suite(name, ring, seed, trials, workers);
    let ok = rep.failures.is_empty();
    let summary = format!("{}/{} passed", rep.passed(), rep.trials);
    let mut r = Report::new(if ok { EXIT_OK } else { EXIT_NEGATIVE }, summary.clone());
    r.line(format!("suite {}: {summary}", name.as_str()));
    for f in &rep.failures {
        r.line(format!("trial {}: {}", f.trial, f.message));
    }
    r.detail("suite", json!(name.as_str()));
    r.detail("seed", json!(seed));
    r.detail("trials", json!(rep.trials));
    r.detail("passed", json!(rep.passed()));
    r.detail(
        "failures",
        Value::Array(
            rep.failures
                .iter()
                .map(|f| json!({ "trial": f.trial, "message": f.message }))
                .collect(),
        ),
    );
    Ok(r)
}
