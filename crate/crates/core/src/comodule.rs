//! Multilinear polynomials, identity testing in `𝔊`, the `S_n`-module of
//! generalized signs and its freeness certificate.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::coeff::{EpsMonomial, EpsPoly};
use crate::error::AlgebraError;
use crate::grassmann::{esgn_standard, GrassElem};
use crate::linalg::{rank_mod_p, rank_rational, smith_normal_form};
use crate::perm::Permutation;
use crate::scalar::{is_prime, BaseRing, Scalar};

/// Largest arity accepted by the exhaustive `S_n` computations.
pub const MAX_ARITY: usize = 8;

fn guard(n: usize) -> Result<(), AlgebraError> {
    if n > MAX_ARITY {
        return Err(AlgebraError::ArityTooLarge(n, MAX_ARITY));
    }
    Ok(())
}

/// A noncommutative polynomial in `x₁, x₂, …` with `C[ε]` coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NcPoly {
    ring: BaseRing,
    terms: BTreeMap<Vec<u32>, EpsPoly>,
}

impl NcPoly {
    pub fn zero(ring: BaseRing) -> Self {
        NcPoly {
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: EpsPoly) -> Self {
        let mut p = NcPoly::zero(c.ring());
        p.add_term(Vec::new(), c);
        p
    }

    pub fn var(ring: BaseRing, i: u32) -> Self {
        let mut p = NcPoly::zero(ring);
        p.add_term(vec![i], EpsPoly::one(ring));
        p
    }

    pub fn monomial(ring: BaseRing, word: Vec<u32>) -> Self {
        let mut p = NcPoly::zero(ring);
        p.add_term(word, EpsPoly::one(ring));
        p
    }

    pub fn ring(&self) -> BaseRing {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &EpsPoly)> {
        self.terms.iter()
    }

    fn add_term(&mut self, w: Vec<u32>, c: EpsPoly) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(w).or_insert_with(|| EpsPoly::zero(c.ring()));
        *e = &*e + &c;
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn add(&self, other: &NcPoly) -> NcPoly {
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &NcPoly) -> NcPoly {
        self.add(&other.scale_eps(&EpsPoly::from_i64(self.ring, -1)))
    }

    pub fn mul(&self, other: &NcPoly) -> NcPoly {
        let mut out = NcPoly::zero(self.ring);
        for (u, cu) in &self.terms {
            for (v, cv) in &other.terms {
                let mut w = u.clone();
                w.extend_from_slice(v);
                out.add_term(w, cu * cv);
            }
        }
        out
    }

    pub fn scale_eps(&self, c: &EpsPoly) -> NcPoly {
        let mut out = NcPoly::zero(self.ring);
        for (w, v) in &self.terms {
            out.add_term(w.clone(), v * c);
        }
        out
    }

    pub fn commutator(&self, other: &NcPoly) -> NcPoly {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn pow(&self, e: u32) -> NcPoly {
        (0..e).fold(NcPoly::constant(EpsPoly::one(self.ring)), |acc, _| acc.mul(self))
    }

    /// Substitutes `x_i ↦ subs[i-1]`.
    pub fn substitute(&self, subs: &[NcPoly]) -> Result<NcPoly, AlgebraError> {
        let mut out = NcPoly::zero(self.ring);
        for (w, c) in &self.terms {
            let mut t = NcPoly::constant(c.clone());
            for &i in w {
                let s = subs
                    .get(i as usize - 1)
                    .ok_or(AlgebraError::ArityMismatch { expected: i as usize, got: subs.len() })?;
                t = t.mul(s);
            }
            out = out.add(&t);
        }
        Ok(out)
    }

    pub fn num_vars(&self) -> usize {
        self.terms
            .keys()
            .flat_map(|w| w.iter().copied())
            .max()
            .unwrap_or(0) as usize
    }

    /// Direct evaluation at elements of `𝔊`.
    pub fn evaluate(&self, subs: &[GrassElem]) -> Result<GrassElem, AlgebraError> {
        let mut out = GrassElem::zero(self.ring);
        if let Some(first) = subs.first() {
            out = out.with_truncated(first.is_truncated());
        }
        for (w, c) in &self.terms {
            let mut t = GrassElem::scalar(c.clone()).with_truncated(out.is_truncated());
            for &i in w {
                let s = subs
                    .get(i as usize - 1)
                    .ok_or(AlgebraError::ArityMismatch { expected: i as usize, got: subs.len() })?;
                t = t.try_mul(s)?;
            }
            out = out.try_add(&t)?;
        }
        Ok(out)
    }

    /// Reads the polynomial as an element of `P_n`.
    pub fn to_multilinear(&self, n: usize) -> Result<MultilinearPoly, AlgebraError> {
        let mut out = MultilinearPoly::zero(self.ring, n);
        for (w, c) in &self.terms {
            let images: Vec<usize> = w.iter().map(|&i| i as usize).collect();
            let sigma = Permutation::new(images).map_err(|_| {
                AlgebraError::NotMultilinear(format!(
                    "monomial {} is not a permutation of x1..x{n}",
                    render_word(w)
                ))
            })?;
            if sigma.degree() != n {
                return Err(AlgebraError::NotMultilinear(format!(
                    "monomial {} does not use each of x1..x{n} once",
                    render_word(w)
                )));
            }
            out.add_term(sigma, c.clone());
        }
        Ok(out)
    }

    pub fn render(&self) -> String {
        render_sum(self.terms.iter().map(|(w, c)| (render_word(w), c)))
    }
}

fn render_word(w: &[u32]) -> String {
    w.iter().map(|i| format!("x{i}")).collect::<Vec<_>>().join("*")
}

fn render_sum<'a>(terms: impl Iterator<Item = (String, &'a EpsPoly)>) -> String {
    let mut s = String::new();
    for (k, (mono, c)) in terms.enumerate() {
        let cs = c.render();
        let single = c.len() == 1;
        let (neg, body) = if single && cs.starts_with('-') {
            (true, cs[1..].to_string())
        } else {
            (false, cs)
        };
        if k == 0 {
            if neg {
                s.push('-');
            }
        } else {
            s.push_str(if neg { " - " } else { " + " });
        }
        let coeff = if single { body } else { format!("({body})") };
        if mono.is_empty() {
            s.push_str(&coeff);
        } else if coeff == "1" {
            s.push_str(&mono);
        } else {
            s.push_str(&format!("{coeff}*{mono}"));
        }
    }
    if s.is_empty() {
        "0".to_string()
    } else {
        s
    }
}

/// `Σ_σ a_σ x_{σ(1)}⋯x_{σ(n)}`, keyed by `σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearPoly {
    n: usize,
    ring: BaseRing,
    terms: BTreeMap<Permutation, EpsPoly>,
}

impl MultilinearPoly {
    pub fn zero(ring: BaseRing, n: usize) -> Self {
        MultilinearPoly {
            n,
            ring,
            terms: BTreeMap::new(),
        }
    }

    /// The single monomial `x_{σ(1)}⋯x_{σ(n)}`.
    pub fn monomial(ring: BaseRing, sigma: Permutation) -> Self {
        let mut p = MultilinearPoly::zero(ring, sigma.degree());
        p.add_term(sigma, EpsPoly::one(ring));
        p
    }

    pub fn from_terms(
        ring: BaseRing,
        n: usize,
        terms: impl IntoIterator<Item = (Permutation, EpsPoly)>,
    ) -> Result<Self, AlgebraError> {
        let mut p = MultilinearPoly::zero(ring, n);
        for (s, c) in terms {
            if s.degree() != n {
                return Err(AlgebraError::ArityMismatch { expected: n, got: s.degree() });
            }
            p.add_term(s, c);
        }
        Ok(p)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> BaseRing {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Permutation, &EpsPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, s: &Permutation) -> EpsPoly {
        self.terms
            .get(s)
            .cloned()
            .unwrap_or_else(|| EpsPoly::zero(self.ring))
    }

    /// Whether every coefficient is a constant of `C`.
    pub fn is_plain(&self) -> bool {
        self.terms
            .values()
            .all(|c| c.terms().all(|(m, _)| m.is_one()))
    }

    fn add_term(&mut self, s: Permutation, c: EpsPoly) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(s.clone()).or_insert_with(|| EpsPoly::zero(c.ring()));
        *e = &*e + &c;
        if e.is_zero() {
            self.terms.remove(&s);
        }
    }

    pub fn add(&self, other: &MultilinearPoly) -> Result<MultilinearPoly, AlgebraError> {
        if self.n != other.n {
            return Err(AlgebraError::ArityMismatch { expected: self.n, got: other.n });
        }
        let mut out = self.clone();
        for (s, c) in &other.terms {
            out.add_term(s.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale_eps(&self, c: &EpsPoly) -> MultilinearPoly {
        let mut out = MultilinearPoly::zero(self.ring, self.n);
        for (s, v) in &self.terms {
            out.add_term(s.clone(), v * c);
        }
        out
    }

    pub fn to_nc(&self) -> NcPoly {
        let mut p = NcPoly::zero(self.ring);
        for (s, c) in &self.terms {
            p.add_term(s.images().iter().map(|&i| i as u32).collect(), c.clone());
        }
        p
    }

    /// `Σ_σ a_σ · subs[σ(1)]⋯subs[σ(n)]`.
    pub fn evaluate(&self, subs: &[GrassElem]) -> Result<GrassElem, AlgebraError> {
        if subs.len() != self.n {
            return Err(AlgebraError::ArityMismatch { expected: self.n, got: subs.len() });
        }
        self.to_nc().evaluate(subs)
    }

    /// `f ∈ T(𝔊)` iff `f(e₁, …, e_n) = 0`.
    pub fn is_identity(&self) -> bool {
        psi(self).is_zero()
    }

    /// `π·x_{σ(1)}⋯x_{σ(n)} = x_{πσ(1)}⋯x_{πσ(n)}`.
    pub fn sn_act(&self, pi: &Permutation) -> MultilinearPoly {
        let mut out = MultilinearPoly::zero(self.ring, self.n);
        for (s, c) in &self.terms {
            out.add_term(pi.compose(s), c.clone());
        }
        out
    }

    pub fn render(&self) -> String {
        render_sum(self.terms.iter().map(|(s, c)| {
            let w: Vec<u32> = s.images().iter().map(|&i| i as u32).collect();
            (render_word(&w), c)
        }))
    }
}

impl fmt::Display for MultilinearPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// `ψ(f) = Σ a_σ esgn(σ)`, the coefficient of `e₁⋯e_n` in `f(e₁, …, e_n)`.
pub fn psi(f: &MultilinearPoly) -> EpsPoly {
    let mut out = EpsPoly::zero(f.ring);
    for (s, c) in &f.terms {
        out = &out + &(c * &esgn_standard(f.ring, s));
    }
    out
}

/// `π(λ) = esgn(π)·φ_π(λ)`.
pub fn sign_act(pi: &Permutation, lambda: &EpsPoly) -> EpsPoly {
    &esgn_standard(lambda.ring(), pi) * &lambda.phi_sigma(pi)
}

/// All monomials on `ε₁..ε_n` with `θ`-degree 0 or 1, in canonical order.
pub fn column_basis(n: usize) -> Vec<EpsMonomial> {
    let mut cols = Vec::with_capacity(2 << n);
    for theta in [false, true] {
        for mask in 0u32..(1 << n) {
            let eps: Vec<u32> = (0..n as u32).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
            cols.push(EpsMonomial::new(theta, eps));
        }
    }
    cols.sort();
    cols
}

fn column_index(cols: &[EpsMonomial]) -> HashMap<EpsMonomial, usize> {
    cols.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect()
}

fn integer_coordinates(p: &EpsPoly, index: &HashMap<EpsMonomial, usize>) -> Vec<i64> {
    let mut row = vec![0i64; index.len()];
    for (m, c) in p.terms() {
        let v = p.ring().to_bigint(c).expect("integral coefficient");
        row[index[m]] = i64::try_from(v).expect("small coefficient");
    }
    row
}

/// Integer coordinate rows of `esgn(σ)` for all of `S_n`, lexicographic.
pub fn sign_matrix(n: usize) -> Result<Vec<Vec<i64>>, AlgebraError> {
    guard(n)?;
    let cols = column_basis(n);
    let index = column_index(&cols);
    Ok(Permutation::all(n)
        .iter()
        .map(|s| integer_coordinates(&esgn_standard(BaseRing::Integers, s), &index))
        .collect())
}

/// Rank of the span of `{esgn(σ)}` inside `C[ε]` over the given ring.
pub fn comodule_rank(n: usize, ring: BaseRing) -> Result<usize, AlgebraError> {
    if n == 0 {
        return Err(AlgebraError::ArityMismatch { expected: 1, got: 0 });
    }
    let rows = sign_matrix(n)?;
    let width = 2 << n;
    match ring {
        BaseRing::Integers | BaseRing::Rationals => Ok(rank_rational(&rows, width)),
        BaseRing::Modular(p) if is_prime(p) => Ok(rank_mod_p(&rows, width, p)),
        other => Err(AlgebraError::UnsupportedRing(other)),
    }
}

/// Text dump of the sign matrix: one row per permutation.
pub fn matrix_dump(n: usize) -> Result<String, AlgebraError> {
    let rows = sign_matrix(n)?;
    let mut s = String::new();
    for (sigma, row) in Permutation::all(n).iter().zip(rows) {
        let entries: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        s.push_str(&format!("{sigma}: {}\n", entries.join(" ")));
    }
    Ok(s)
}

/// A spanning monomial `x_{i₁}⋯x_{i_m}[x_{j₁},x_{j₂}]⋯[x_{j_{2r−1}},x_{j_{2r}}]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpanningTerm {
    pub prefix: Vec<u32>,
    pub tail: Vec<u32>,
}

impl SpanningTerm {
    pub fn poly(&self, ring: BaseRing) -> MultilinearPoly {
        let n = self.prefix.len() + self.tail.len();
        let mut p = NcPoly::monomial(ring, self.prefix.clone());
        for pair in self.tail.chunks(2) {
            let c = NcPoly::var(ring, pair[0]).commutator(&NcPoly::var(ring, pair[1]));
            p = p.mul(&c);
        }
        p.to_multilinear(n).expect("spanning terms are multilinear")
    }

    pub fn render(&self) -> String {
        let mut parts: Vec<String> = self.prefix.iter().map(|i| format!("x{i}")).collect();
        parts.extend(self.tail.chunks(2).map(|p| format!("[x{},x{}]", p[0], p[1])));
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }
}

impl fmt::Display for SpanningTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// The `2^{n−1}` spanning terms: every even-size subset as a sorted tail.
pub fn spanning_terms(n: usize) -> Vec<SpanningTerm> {
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() % 2 == 1 {
            continue;
        }
        let (tail, prefix): (Vec<u32>, Vec<u32>) =
            (1..=n as u32).partition(|&i| mask >> (i - 1) & 1 == 1);
        out.push(SpanningTerm { prefix, tail });
    }
    out.sort();
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreenessCertificate {
    pub n: usize,
    /// Smith diagonal of the `ψ(spanning term)` coordinate matrix.
    pub diagonal: Vec<BigInt>,
    /// All diagonal entries are 1 and there are `2^{n−1}` of them.
    pub free: bool,
    /// Every `esgn(σ)` lies in the ℤ-span of the spanning images.
    pub spans: bool,
}

impl FreenessCertificate {
    pub fn holds(&self) -> bool {
        self.free && self.spans
    }
}

struct SpanningSystem {
    terms: Vec<SpanningTerm>,
    rows: Vec<Vec<BigInt>>,
    right_inverse: Option<Vec<Vec<BigInt>>>,
    diagonal: Vec<BigInt>,
    index: HashMap<EpsMonomial, usize>,
}

fn spanning_system(n: usize) -> Result<SpanningSystem, AlgebraError> {
    guard(n)?;
    let terms = spanning_terms(n);
    let cols = column_basis(n);
    let index = column_index(&cols);
    let rows: Vec<Vec<BigInt>> = terms
        .iter()
        .map(|t| {
            integer_coordinates(&psi(&t.poly(BaseRing::Integers)), &index)
                .into_iter()
                .map(BigInt::from)
                .collect()
        })
        .collect();
    let snf = smith_normal_form(&rows, cols.len());
    let free = snf.is_unimodular_rows(terms.len());
    Ok(SpanningSystem {
        right_inverse: free.then(|| snf.right_inverse()),
        diagonal: snf.diagonal,
        terms,
        rows,
        index,
    })
}

/// Certifies that `C[ε]_n` is free of rank `2^{n−1}` over every `C`.
pub fn freeness_certificate(n: usize) -> Result<FreenessCertificate, AlgebraError> {
    if n == 0 {
        return Err(AlgebraError::ArityMismatch { expected: 1, got: 0 });
    }
    let sys = spanning_system(n)?;
    let free = sys.right_inverse.is_some() && sys.diagonal.len() == 1 << (n - 1);
    let mut spans = free;
    if let Some(r) = &sys.right_inverse {
        for sigma in Permutation::all(n) {
            let y: Vec<BigInt> = integer_coordinates(&esgn_standard(BaseRing::Integers, &sigma), &sys.index)
                .into_iter()
                .map(BigInt::from)
                .collect();
            let x = vec_mat(&y, r);
            if vec_mat(&x, &sys.rows) != y {
                spans = false;
                break;
            }
        }
    }
    Ok(FreenessCertificate {
        n,
        diagonal: sys.diagonal,
        free,
        spans,
    })
}

fn vec_mat(x: &[BigInt], m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let width = m.first().map_or(0, |r| r.len());
    let mut out = vec![BigInt::zero(); width];
    for (xi, row) in x.iter().zip(m) {
        if xi.is_zero() {
            continue;
        }
        for (o, v) in out.iter_mut().zip(row) {
            if !v.is_zero() {
                *o += xi * v;
            }
        }
    }
    out
}

/// Coordinates of `f` modulo `T(𝔊)` in the spanning terms.
pub fn grassmann_normal_form(
    f: &MultilinearPoly,
) -> Result<BTreeMap<SpanningTerm, Scalar>, AlgebraError> {
    if !f.is_plain() {
        return Err(AlgebraError::UnsupportedRing(f.ring));
    }
    let ring = f.ring;
    let n = f.n;
    let sys = spanning_system(n)?;
    let r = sys
        .right_inverse
        .as_ref()
        .ok_or_else(|| AlgebraError::Internal(format!("spanning matrix for n={n} is not unimodular")))?;
    let y = psi(f);
    let mut y_vec = vec![ring.zero(); sys.index.len()];
    for (m, c) in y.terms() {
        y_vec[sys.index[m]] = c.clone();
    }
    let mut out = BTreeMap::new();
    let mut residual = f.clone();
    for (j, term) in sys.terms.iter().enumerate() {
        let mut acc = ring.zero();
        for (i, yi) in y_vec.iter().enumerate() {
            if !r[i][j].is_zero() && !ring.is_zero(yi) {
                acc = ring.add(&acc, &ring.mul(yi, &ring.from_bigint(&r[i][j])));
            }
        }
        if !ring.is_zero(&acc) {
            let b = term.poly(ring).scale_eps(&EpsPoly::constant(ring, ring.neg(&acc)));
            residual = residual.add(&b)?;
            out.insert(term.clone(), acc);
        }
    }
    if !residual.is_identity() {
        return Err(AlgebraError::Internal(format!(
            "normal form residual {residual} is not an identity"
        )));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const Z: BaseRing = BaseRing::Integers;

    fn x(i: u32) -> NcPoly {
        NcPoly::var(Z, i)
    }

    #[test]
    fn evaluation_examples() {
        let gens: Vec<GrassElem> = (1..=3).map(|i| GrassElem::generator(Z, i)).collect();
        let f = x(1).mul(&x(2)).to_multilinear(2).unwrap();
        assert_eq!(f.evaluate(&gens[..2]).unwrap().render(), "e1*e2");
        let c = x(1).commutator(&x(2)).to_multilinear(2).unwrap();
        assert_eq!(c.evaluate(&gens[..2]).unwrap().render(), "eps1*eps2*e1*e2");
        let g = x(1).commutator(&x(2).commutator(&x(3))).to_multilinear(3).unwrap();
        assert!(g.evaluate(&gens).unwrap().is_zero());
        assert!(g.is_identity());
        assert!(!c.is_identity());
        assert!(!x(1).to_multilinear(1).unwrap().is_identity());
        assert!(f.evaluate(&gens).is_err());
    }

    #[test]
    fn non_multilinear_is_rejected() {
        assert!(x(1).mul(&x(1)).to_multilinear(2).is_err());
        assert!(x(1).to_multilinear(2).is_err());
    }

    #[test]
    fn psi_examples() {
        let f = x(2).mul(&x(1)).to_multilinear(2).unwrap();
        assert_eq!(psi(&f).render(), "1 - eps1*eps2");
        let id = MultilinearPoly::monomial(Z, Permutation::identity(4));
        assert!(psi(&id).is_one());
        let t = Permutation::transposition(2, 1, 2).unwrap();
        assert_eq!(sign_act(&t, &EpsPoly::one(Z)).render(), "1 - eps1*eps2");
    }

    #[test]
    fn small_ranks() {
        assert_eq!(comodule_rank(1, Z).unwrap(), 1);
        assert_eq!(comodule_rank(3, Z).unwrap(), 4);
        assert_eq!(comodule_rank(3, BaseRing::Modular(2)).unwrap(), 4);
        assert!(comodule_rank(9, Z).is_err());
        assert!(comodule_rank(3, BaseRing::Modular(4)).is_err());
    }

    #[test]
    fn certificate_small() {
        for n in 1..=4 {
            let c = freeness_certificate(n).unwrap();
            assert!(c.holds(), "n={n}: {c:?}");
        }
    }

    #[test]
    fn normal_form_examples() {
        let f = x(2).mul(&x(1)).to_multilinear(2).unwrap();
        let nf = grassmann_normal_form(&f).unwrap();
        let rendered: Vec<(String, String)> =
            nf.iter().map(|(t, c)| (t.render(), Z.render(c))).collect();
        assert_eq!(
            rendered,
            vec![("[x1,x2]".to_string(), "-1".to_string()), ("x1*x2".to_string(), "1".to_string())]
        );
        let id = x(1).mul(&x(2)).mul(&x(3)).to_multilinear(3).unwrap();
        let nf = grassmann_normal_form(&id).unwrap();
        assert_eq!(nf.len(), 1);
        let g = x(1).commutator(&x(2).commutator(&x(3))).to_multilinear(3).unwrap();
        assert!(grassmann_normal_form(&g).unwrap().is_empty());
    }

    #[test]
    fn matrix_dump_shape() {
        let d = matrix_dump(2).unwrap();
        assert_eq!(d.lines().count(), 2);
        assert!(d.starts_with("[1 2]: 1 0 0 0 0 0 0 0"));
    }
}
