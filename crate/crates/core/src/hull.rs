//! Idempotents `Λ_s`, the embedding of the free supercommutative algebra
//! into `𝔊`, matrices over the library rings, the Grassmann involution and
//! hull evaluation.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::coeff::EpsPoly;
use crate::comodule::MultilinearPoly;
use crate::error::AlgebraError;
use crate::grassmann::{esgn_supports, GrassElem, Grade, SElem, SWord, Word};
use crate::perm::Permutation;
use crate::scalar::{BaseRing, Scalar};

/// A sign `±1` for each index of a finite set `X`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SignAssignment(BTreeMap<u32, bool>);

impl SignAssignment {
    /// `odd` lists the indices sent to `−1`; the rest of `x` goes to `+1`.
    pub fn new(x: &[u32], odd: &[u32]) -> Self {
        let odd: BTreeSet<u32> = odd.iter().copied().collect();
        SignAssignment(x.iter().map(|&i| (i, odd.contains(&i))).collect())
    }

    pub fn support(&self) -> Vec<u32> {
        self.0.keys().copied().collect()
    }

    pub fn is_odd(&self, i: u32) -> bool {
        self.0.get(&i).copied().unwrap_or(false)
    }

    pub fn sign(&self, i: u32) -> Option<i8> {
        self.0.get(&i).map(|&odd| if odd { -1 } else { 1 })
    }

    /// All `2^|X|` assignments on `x`.
    pub fn all(x: &[u32]) -> Vec<SignAssignment> {
        (0u32..(1 << x.len()))
            .map(|mask| {
                SignAssignment(
                    x.iter()
                        .enumerate()
                        .map(|(k, &i)| (i, mask >> k & 1 == 1))
                        .collect(),
                )
            })
            .collect()
    }
}

impl fmt::Display for SignAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(i, odd)| format!("{i}:{}", if *odd { '-' } else { '+' }))
            .collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

fn half_theta_eps(ring: BaseRing, i: u32) -> Result<EpsPoly, AlgebraError> {
    let half = ring.half()?;
    Ok((&EpsPoly::theta(ring) * &EpsPoly::eps(ring, i)).scale(&half))
}

/// `Λ_s = ∏_{s(a)=−1} ½θε_a · ∏_{s(b)=+1} (1 − ½θε_b)`.
pub fn lambda_idempotent(ring: BaseRing, s: &SignAssignment) -> Result<EpsPoly, AlgebraError> {
    let mut acc = EpsPoly::one(ring);
    for (&i, &odd) in &s.0 {
        let h = half_theta_eps(ring, i)?;
        let factor = if odd { h } else { &EpsPoly::one(ring) - &h };
        acc = &acc * &factor;
    }
    if s.0.is_empty() {
        ring.half()?;
    }
    Ok(acc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IdempotentReport {
    pub idempotent: bool,
    pub orthogonal: bool,
    pub complete: bool,
}

impl IdempotentReport {
    pub fn holds(&self) -> bool {
        self.idempotent && self.orthogonal && self.complete
    }
}

/// Checks that `{Λ_s}` over all `s: X → {±1}` is a complete system of
/// orthogonal idempotents.
pub fn idempotent_system_check(ring: BaseRing, x: &[u32]) -> Result<IdempotentReport, AlgebraError> {
    let lambdas: Vec<EpsPoly> = SignAssignment::all(x)
        .iter()
        .map(|s| lambda_idempotent(ring, s))
        .collect::<Result<_, _>>()?;
    let idempotent = lambdas.iter().all(|l| &(l * l) == l);
    let mut orthogonal = true;
    for (i, a) in lambdas.iter().enumerate() {
        for b in &lambdas[i + 1..] {
            orthogonal &= (a * b).is_zero();
        }
    }
    let sum = lambdas.iter().fold(EpsPoly::zero(ring), |acc, l| &acc + l);
    Ok(IdempotentReport {
        idempotent,
        orthogonal,
        complete: sum.is_one(),
    })
}

/// On `Λ_s𝔊_X`: odd `Λ_se_a` anticommute (including with themselves) and
/// even `Λ_se_b` commute with every `Λ_se_c`.
pub fn projected_commutation_check(ring: BaseRing, s: &SignAssignment) -> Result<bool, AlgebraError> {
    let l = GrassElem::scalar(lambda_idempotent(ring, s)?);
    let x = s.support();
    let proj: BTreeMap<u32, GrassElem> = x
        .iter()
        .map(|&i| (i, &l * &GrassElem::generator(ring, i)))
        .collect();
    for &a in &x {
        for &c in &x {
            let (pa, pc) = (&proj[&a], &proj[&c]);
            let ok = if s.is_odd(a) && s.is_odd(c) {
                (&(pa * pc) + &(pc * pa)).is_zero()
            } else if !s.is_odd(a) {
                pa.commutator(pc).is_zero()
            } else {
                true
            };
            if !ok {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// An element of the free supercommutative algebra over `C` on generators
/// `e_i`, each odd or even by an explicit parity set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuperElem {
    ring: BaseRing,
    odd: BTreeSet<u32>,
    terms: BTreeMap<Word, Scalar>,
}

impl SuperElem {
    pub fn zero(ring: BaseRing, odd: &[u32]) -> Self {
        SuperElem {
            ring,
            odd: odd.iter().copied().collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn from_term(ring: BaseRing, odd: &[u32], c: Scalar, w: Word) -> Self {
        let mut out = SuperElem::zero(ring, odd);
        out.add_term(w, c);
        out
    }

    pub fn generator(ring: BaseRing, odd: &[u32], i: u32) -> Self {
        SuperElem::from_term(ring, odd, ring.one(), Word::letter(i))
    }

    pub fn ring(&self) -> BaseRing {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    fn add_term(&mut self, w: Word, c: Scalar) {
        if w.powers().iter().any(|&(i, a)| a >= 2 && self.odd.contains(&i)) {
            return;
        }
        let e = self.terms.entry(w.clone()).or_insert_with(|| self.ring.zero());
        *e = self.ring.add(e, &c);
        if self.ring.is_zero(e) {
            self.terms.remove(&w);
        }
    }

    fn check(&self, other: &SuperElem) -> Result<(), AlgebraError> {
        if self.ring != other.ring {
            return Err(AlgebraError::RingMismatch(self.ring, other.ring));
        }
        if self.odd != other.odd {
            return Err(AlgebraError::GradeMismatch("parity assignments differ".into()));
        }
        Ok(())
    }

    pub fn add(&self, other: &SuperElem) -> Result<SuperElem, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> SuperElem {
        let mut out = SuperElem::zero(self.ring, &[]);
        out.odd = self.odd.clone();
        for (w, v) in &self.terms {
            out.add_term(w.clone(), self.ring.mul(v, c));
        }
        out
    }

    pub fn mul(&self, other: &SuperElem) -> Result<SuperElem, AlgebraError> {
        self.check(other)?;
        let mut out = SuperElem::zero(self.ring, &[]);
        out.odd = self.odd.clone();
        for (u, cu) in &self.terms {
            for (v, cv) in &other.terms {
                let mut swaps = 0u32;
                for &(i, a) in u.powers() {
                    for &(j, b) in v.powers() {
                        if i > j && self.odd.contains(&i) && self.odd.contains(&j) {
                            swaps += a * b;
                        }
                    }
                }
                let (_, w) = u.mul(v);
                let mut c = self.ring.mul(cu, cv);
                if swaps % 2 == 1 {
                    c = self.ring.neg(&c);
                }
                out.add_term(w, c);
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u32) -> Result<SuperElem, AlgebraError> {
        let mut acc = SuperElem::from_term(self.ring, &[], self.ring.one(), Word::one());
        acc.odd = self.odd.clone();
        for _ in 0..e {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }
}

/// `φ(e_a) = ½θε_a e_a` for odd `a`, `φ(e_b) = (1 − ½θε_b)e_b` for even `b`.
pub fn phi_embed(x: &SuperElem) -> Result<GrassElem, AlgebraError> {
    let ring = x.ring;
    let mut out = GrassElem::zero(ring);
    for (w, c) in &x.terms {
        let mut t = GrassElem::scalar(EpsPoly::constant(ring, c.clone()));
        for &(i, a) in w.powers() {
            let h = half_theta_eps(ring, i)?;
            let coeff = if x.odd.contains(&i) { h } else { &EpsPoly::one(ring) - &h };
            let g = GrassElem::from_term(coeff, Word::letter(i));
            t = &t * &g.pow(a);
        }
        out = &out + &t;
    }
    Ok(out)
}

/// Minimal ring interface for matrix entries.
pub trait RingElement: Clone + PartialEq + fmt::Debug {
    fn zero_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn render(&self) -> String;
}

impl RingElement for EpsPoly {
    fn zero_like(&self) -> Self {
        EpsPoly::zero(self.ring())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        EpsPoly::is_zero(self)
    }
    fn render(&self) -> String {
        EpsPoly::render(self)
    }
}

impl RingElement for GrassElem {
    fn zero_like(&self) -> Self {
        GrassElem::zero(self.ring()).with_truncated(self.is_truncated())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        GrassElem::is_zero(self)
    }
    fn render(&self) -> String {
        GrassElem::render(self)
    }
}

impl RingElement for SElem {
    fn zero_like(&self) -> Self {
        SElem::zero(self.ring())
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        SElem::is_zero(self)
    }
    fn render(&self) -> String {
        SElem::render(self)
    }
}

/// A square matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    n: usize,
    entries: Vec<T>,
}

impl<T: RingElement> Matrix<T> {
    pub fn new(n: usize, entries: Vec<T>) -> Result<Self, AlgebraError> {
        if entries.len() != n * n || n == 0 {
            return Err(AlgebraError::DimensionMismatch(format!(
                "{} entries for a {n}x{n} matrix",
                entries.len()
            )));
        }
        Ok(Matrix { n, entries })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        assert!(n > 0, "empty matrix");
        Matrix {
            n,
            entries: (0..n * n).map(|k| f(k / n, k % n)).collect(),
        }
    }

    /// `c` on the diagonal, zero elsewhere.
    pub fn scalar(n: usize, c: &T) -> Self {
        Matrix::from_fn(n, |i, j| if i == j { c.clone() } else { c.zero_like() })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn map<U: RingElement>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            n: self.n,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    fn same_size(&self, other: &Matrix<T>) -> Result<(), AlgebraError> {
        if self.n != other.n {
            return Err(AlgebraError::DimensionMismatch(format!("{} vs {}", self.n, other.n)));
        }
        Ok(())
    }

    pub fn add(&self, other: &Matrix<T>) -> Result<Matrix<T>, AlgebraError> {
        self.same_size(other)?;
        Ok(Matrix {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a.add(b)).collect(),
        })
    }

    pub fn neg(&self) -> Matrix<T> {
        self.map(|e| e.neg())
    }

    pub fn sub(&self, other: &Matrix<T>) -> Result<Matrix<T>, AlgebraError> {
        self.add(&other.neg())
    }

    /// Multiplies every entry on the left by `c`.
    pub fn scale(&self, c: &T) -> Matrix<T> {
        self.map(|e| c.mul(e))
    }

    pub fn render(&self) -> String {
        (0..self.n)
            .map(|i| {
                let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).render()).collect();
                format!("[{}]", row.join(", "))
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

pub fn mat_mul<T: RingElement>(a: &Matrix<T>, b: &Matrix<T>) -> Result<Matrix<T>, AlgebraError> {
    a.same_size(b)?;
    let n = a.n;
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = a.get(0, 0).zero_like();
            for k in 0..n {
                let (x, y) = (a.get(i, k), b.get(k, j));
                if !x.is_zero() && !y.is_zero() {
                    acc = acc.add(&x.mul(y));
                }
            }
            entries.push(acc);
        }
    }
    Ok(Matrix { n, entries })
}

pub fn mat_trace<T: RingElement>(m: &Matrix<T>) -> T {
    (0..m.n).fold(m.get(0, 0).zero_like(), |acc, i| acc.add(m.get(i, i)))
}

/// A multilinear polynomial with `C[ε]` coefficients and a grade per
/// variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedPoly {
    poly: MultilinearPoly,
    grades: Vec<Grade>,
}

impl GradedPoly {
    pub fn new(poly: MultilinearPoly, grades: Vec<Grade>) -> Result<Self, AlgebraError> {
        if poly.arity() != grades.len() {
            return Err(AlgebraError::ArityMismatch {
                expected: poly.arity(),
                got: grades.len(),
            });
        }
        Ok(GradedPoly { poly, grades })
    }

    pub fn poly(&self) -> &MultilinearPoly {
        &self.poly
    }

    pub fn grades(&self) -> &[Grade] {
        &self.grades
    }

    fn supports(&self) -> Vec<Vec<u32>> {
        self.grades.iter().map(|g| g.support().to_vec()).collect()
    }

    /// `esgn_w(σ)` for the grades of this polynomial.
    pub fn sign(&self, sigma: &Permutation) -> EpsPoly {
        esgn_supports(self.poly.ring(), &self.supports(), sigma).expect("degree matches arity")
    }
}

/// `f* = Σ esgn_w(σ) a_σ x_{σ(1)}⋯x_{σ(n)}`.
pub fn grassmann_involution(f: &GradedPoly) -> GradedPoly {
    let ring = f.poly.ring();
    let terms: Vec<(Permutation, EpsPoly)> = f
        .poly
        .terms()
        .map(|(s, c)| (s.clone(), c * &f.sign(s)))
        .collect();
    GradedPoly {
        poly: MultilinearPoly::from_terms(ring, f.poly.arity(), terms).expect("same arity"),
        grades: f.grades.clone(),
    }
}

/// `Σ Mₖ ⊗ wₖ` with `C[ε]`-matrices over words of the free 𝔖-commutative
/// algebra, each matrix reduced by the annihilator of its word.
#[derive(Clone, Debug, PartialEq)]
pub struct HullElem {
    terms: BTreeMap<SWord, Matrix<EpsPoly>>,
}

impl HullElem {
    pub fn zero() -> Self {
        HullElem {
            terms: BTreeMap::new(),
        }
    }

    pub fn pure(m: Matrix<EpsPoly>, w: SWord) -> Self {
        let mut h = HullElem::zero();
        h.add_term(w, m);
        h
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SWord, &Matrix<EpsPoly>)> {
        self.terms.iter()
    }

    fn add_term(&mut self, w: SWord, m: Matrix<EpsPoly>) {
        let m = m.map(|c| SElem::reduce_coefficient(&w, c));
        let sum = match self.terms.remove(&w) {
            Some(old) => old
                .add(&m)
                .expect("hull entries share a size")
                .map(|c| SElem::reduce_coefficient(&w, c)),
            None => m,
        };
        if !sum.is_zero() {
            self.terms.insert(w, sum);
        }
    }

    pub fn add(&self, other: &HullElem) -> HullElem {
        let mut out = self.clone();
        for (w, m) in &other.terms {
            out.add_term(w.clone(), m.clone());
        }
        out
    }

    pub fn scale(&self, c: &EpsPoly) -> HullElem {
        let mut out = HullElem::zero();
        for (w, m) in &self.terms {
            out.add_term(w.clone(), m.map(|e| c * e));
        }
        out
    }

    /// `(M⊗u)(N⊗v) = MN ⊗ uv`.
    pub fn mul(&self, other: &HullElem) -> Result<HullElem, AlgebraError> {
        let mut out = HullElem::zero();
        for (u, m) in &self.terms {
            for (v, n) in &other.terms {
                let ring = m.get(0, 0).ring();
                let uv = &SElem::from_term(EpsPoly::one(ring), u.clone())
                    * &SElem::from_term(EpsPoly::one(ring), v.clone());
                let mn = mat_mul(m, n)?;
                for (w, c) in uv.terms() {
                    out.add_term(w.clone(), mn.map(|e| c * e));
                }
            }
        }
        Ok(out)
    }
}

/// Evaluates `f` at `aᵢ ⊗ wᵢ` in the hull and compares with
/// `f*(a₁, …, a_n) ⊗ w₁⋯w_n`.
pub fn hull_eval_factorization(
    f: &GradedPoly,
    mats: &[Matrix<EpsPoly>],
    words: &[SWord],
) -> Result<bool, AlgebraError> {
    let n = f.poly.arity();
    if mats.len() != n || words.len() != n {
        return Err(AlgebraError::ArityMismatch {
            expected: n,
            got: mats.len().min(words.len()),
        });
    }
    for (i, (w, g)) in words.iter().zip(&f.grades).enumerate() {
        if &w.grade() != g {
            return Err(AlgebraError::GradeMismatch(format!(
                "variable {} has grade {g} but its word has grade {}",
                i + 1,
                w.grade()
            )));
        }
    }
    let ring = f.poly.ring();
    let pure: Vec<HullElem> = mats
        .iter()
        .zip(words)
        .map(|(m, w)| HullElem::pure(m.clone(), w.clone()))
        .collect();
    let mut lhs = HullElem::zero();
    for (s, c) in f.poly.terms() {
        let mut t = pure[s.apply(1) - 1].clone();
        for k in 2..=n {
            t = t.mul(&pure[s.apply(k) - 1])?;
        }
        lhs = lhs.add(&t.scale(c));
    }

    let star = grassmann_involution(f);
    let size = mats[0].size();
    let mut fa = Matrix::scalar(size, &EpsPoly::zero(ring));
    for (s, c) in star.poly.terms() {
        let mut m = mats[s.apply(1) - 1].clone();
        for k in 2..=n {
            m = mat_mul(&m, &mats[s.apply(k) - 1])?;
        }
        fa = fa.add(&m.map(|e| c * e))?;
    }
    let mut prod = SElem::one(ring);
    for w in words {
        prod = &prod * &SElem::from_term(EpsPoly::one(ring), w.clone());
    }
    let mut rhs = HullElem::zero();
    for (w, c) in prod.terms() {
        rhs.add_term(w.clone(), fa.map(|e| c * e));
    }
    Ok(lhs == rhs)
}
