//! Reading parsed expressions as elements of the library's algebras.

use std::collections::BTreeMap;

use gengrass::comodule::NcPoly;
use gengrass::supertrace::TracePoly;
use gengrass::{AlgebraError, BaseRing, EpsPoly, GrassElem, PairSet, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;

use crate::expr::Expr;

#[derive(Debug)]
pub enum EvalError {
    /// The expression is outside what the command accepts.
    Usage(String),
    Algebra(AlgebraError),
}

impl From<AlgebraError> for EvalError {
    fn from(e: AlgebraError) -> Self {
        EvalError::Algebra(e)
    }
}

impl std::fmt::Display for EvalError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EvalError::Usage(m) => f.write_str(m),
            EvalError::Algebra(e) => write!(f, "{e}"),
        }
    }
}

type Result<T> = std::result::Result<T, EvalError>;

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(EvalError::Usage(msg.into()))
}

pub fn scalar(ring: BaseRing, e: &Expr) -> Option<Result<Scalar>> {
    match e {
        Expr::Int(n) => Some(Ok(ring.from_bigint(n))),
        Expr::Ratio(n, d) => Some(
            ring.from_rational(&BigRational::new(n.clone(), d.clone()))
                .map_err(EvalError::from),
        ),
        _ => None,
    }
}

/// `x_k` stands for `e_k`, so its grade is `{k}`; annotations must agree.
fn check_own_grade(index: u32, grade: &Option<Vec<u32>>) -> Result<()> {
    match grade {
        Some(g) if g != &vec![index] => usage(format!(
            "x{index} is evaluated at e{index}, whose grade is {{{index}}}; the annotation disagrees"
        )),
        _ => Ok(()),
    }
}

/// Value in `𝔊`, with `x_k ↦ e_k`.
pub fn to_grass(e: &Expr, ring: BaseRing, truncated: bool) -> Result<GrassElem> {
    let lift = |p: EpsPoly| GrassElem::scalar(p).with_truncated(truncated);
    let rec = |a: &Expr| to_grass(a, ring, truncated);
    Ok(match e {
        Expr::Int(_) | Expr::Ratio(..) => lift(EpsPoly::constant(ring, scalar(ring, e).expect("literal")?)),
        Expr::Theta => lift(EpsPoly::theta(ring)),
        Expr::Eps(k) => lift(EpsPoly::eps(ring, *k)),
        Expr::Gen(k) => GrassElem::generator(ring, *k).with_truncated(truncated),
        Expr::Var { index, grade } => {
            check_own_grade(*index, grade)?;
            GrassElem::generator(ring, *index).with_truncated(truncated)
        }
        Expr::Neg(a) => -&rec(a)?,
        Expr::Add(a, b) => rec(a)?.try_add(&rec(b)?)?,
        Expr::Sub(a, b) => rec(a)?.try_add(&-&rec(b)?)?,
        Expr::Mul(a, b) => rec(a)?.try_mul(&rec(b)?)?,
        Expr::Pow(a, k) => rec(a)?.pow(*k),
        Expr::Comm(a, b) => rec(a)?.commutator(&rec(b)?),
        Expr::SComm(a, b) => rec(a)?.scommutator(&rec(b)?),
        Expr::Tr(_) => return usage("Tr(...) is only available in trace-check and trace-witness"),
    })
}

/// A formal noncommutative polynomial. `grades` gives the grade of each
/// variable for supercommutators.
pub fn to_nc(e: &Expr, ring: BaseRing, grades: &BTreeMap<u32, Vec<u32>>) -> Result<NcPoly> {
    let rec = |a: &Expr| to_nc(a, ring, grades);
    Ok(match e {
        Expr::Int(_) | Expr::Ratio(..) => NcPoly::constant(EpsPoly::constant(ring, scalar(ring, e).expect("literal")?)),
        Expr::Theta => NcPoly::constant(EpsPoly::theta(ring)),
        Expr::Eps(k) => NcPoly::constant(EpsPoly::eps(ring, *k)),
        Expr::Gen(k) => return usage(format!("e{k} is a concrete generator; write polynomials in x1, x2, ...")),
        Expr::Var { index, .. } => NcPoly::var(ring, *index),
        Expr::Neg(a) => NcPoly::zero(ring).sub(&rec(a)?),
        Expr::Add(a, b) => rec(a)?.add(&rec(b)?),
        Expr::Sub(a, b) => rec(a)?.sub(&rec(b)?),
        Expr::Mul(a, b) => rec(a)?.mul(&rec(b)?),
        Expr::Pow(a, k) => rec(a)?.pow(*k),
        Expr::Comm(a, b) => rec(a)?.commutator(&rec(b)?),
        Expr::SComm(a, b) => formal_scommutator(&rec(a)?, &rec(b)?, grades),
        Expr::Tr(_) => return usage("Tr(...) is only available in trace-check and trace-witness"),
    })
}

fn word_grade(w: &[u32], grades: &BTreeMap<u32, Vec<u32>>) -> Vec<u32> {
    let mut odd: BTreeMap<u32, bool> = BTreeMap::new();
    for i in w {
        let g = grades.get(i).cloned().unwrap_or_else(|| vec![*i]);
        for k in g {
            *odd.entry(k).or_default() ^= true;
        }
    }
    odd.into_iter().filter(|(_, o)| *o).map(|(k, _)| k).collect()
}

fn formal_scommutator(a: &NcPoly, b: &NcPoly, grades: &BTreeMap<u32, Vec<u32>>) -> NcPoly {
    let ring = a.ring();
    let mut out = NcPoly::zero(ring);
    for (u, cu) in a.terms() {
        for (v, cv) in b.terms() {
            let mu = NcPoly::monomial(ring, u.clone()).scale_eps(cu);
            let mv = NcPoly::monomial(ring, v.clone()).scale_eps(cv);
            let mut p = PairSet::new();
            p.add_product(&word_grade(u, grades), &word_grade(v, grades));
            out = out.add(&mu.mul(&mv)).sub(&mv.mul(&mu).scale_eps(&p.exp(ring)));
        }
    }
    out
}

/// Grades of `x_1..x_n`: annotations where given, `{k}` otherwise.
pub fn grades_of(e: &Expr, n: usize) -> Result<BTreeMap<u32, Vec<u32>>> {
    let ann = e.annotations().map_err(EvalError::Usage)?;
    Ok((1..=n as u32)
        .map(|k| (k, ann.get(&k).cloned().unwrap_or_else(|| vec![k])))
        .collect())
}

/// A trace polynomial with plain coefficients.
pub fn to_trace(e: &Expr, ring: BaseRing) -> Result<TracePoly> {
    let rec = |a: &Expr| to_trace(a, ring);
    Ok(match e {
        Expr::Int(_) | Expr::Ratio(..) => TracePoly::constant(ring, scalar(ring, e).expect("literal")?),
        Expr::Theta | Expr::Eps(_) => return usage("trace polynomials take coefficients in the base ring only"),
        Expr::Gen(k) => return usage(format!("e{k} is a concrete generator; write trace polynomials in x1, x2, ...")),
        Expr::Var { index, grade } => {
            if grade.is_some() {
                return usage("grade annotations are not used by trace polynomials");
            }
            TracePoly::letter(ring, *index)
        }
        Expr::Neg(a) => rec(a)?.neg(),
        Expr::Add(a, b) => rec(a)?.add(&rec(b)?),
        Expr::Sub(a, b) => rec(a)?.sub(&rec(b)?),
        Expr::Mul(a, b) => rec(a)?.mul(&rec(b)?),
        Expr::Pow(a, k) => {
            let base = rec(a)?;
            (0..*k).fold(TracePoly::constant(ring, ring.one()), |acc, _| acc.mul(&base))
        }
        Expr::Comm(a, b) => rec(a)?.commutator(&rec(b)?),
        Expr::SComm(..) => return usage("supercommutators need grades; trace polynomials are ungraded"),
        Expr::Tr(a) => rec(a)?.trace(),
    })
}

/// Integer literal helper for tests and fixtures.
pub fn int(n: i64) -> Expr {
    Expr::Int(BigInt::from(n))
}
