//! The coefficient ring `C[ε] = C[θ, ε₁, ε₂, …]` with `εᵢ² = θεᵢ` and `θ² = 2`.
//!
//! Every element is stored fully reduced: a monomial carries at most one
//! `θ` and a strictly increasing set of `ε` indices. As a `C`-module the
//! ring is free on these monomials, for every base ring `C`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::AlgebraError;
use crate::perm::Permutation;
use crate::scalar::{BaseRing, Scalar};

/// A reduced monomial `θ^d · ε_{i₁} ⋯ ε_{i_k}` with `d ∈ {0,1}`.
///
/// Ordering is `(theta_deg, eps_set)` with the set compared
/// lexicographically, which fixes the canonical term order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EpsMonomial {
    theta: bool,
    eps: Vec<u32>,
}

impl EpsMonomial {
    pub fn one() -> Self {
        EpsMonomial::default()
    }

    /// Builds a monomial from a raw θ flag and an index set; the set is
    /// sorted and must not repeat an index.
    pub fn new(theta: bool, mut eps: Vec<u32>) -> Self {
        eps.sort_unstable();
        assert!(
            eps.windows(2).all(|w| w[0] < w[1]),
            "repeated ε index in a reduced monomial"
        );
        assert!(eps.iter().all(|&i| i >= 1), "ε indices start at 1");
        EpsMonomial { theta, eps }
    }

    pub fn theta_deg(&self) -> u8 {
        self.theta as u8
    }

    pub fn has_theta(&self) -> bool {
        self.theta
    }

    pub fn eps(&self) -> &[u32] {
        &self.eps
    }

    pub fn is_one(&self) -> bool {
        !self.theta && self.eps.is_empty()
    }

    /// Product of two reduced monomials: returns `(k, m)` meaning `2^k · m`.
    /// Each colliding `εᵢ·εᵢ` becomes `θεᵢ`; each `θ²` becomes `2`.
    pub fn mul(&self, other: &EpsMonomial) -> (u32, EpsMonomial) {
        let mut theta_pow = self.theta as u32 + other.theta as u32;
        let mut eps = Vec::with_capacity(self.eps.len() + other.eps.len());
        let (a, b) = (&self.eps, &other.eps);
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    eps.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    eps.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    eps.push(a[i]);
                    theta_pow += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        eps.extend_from_slice(&a[i..]);
        eps.extend_from_slice(&b[j..]);
        (
            theta_pow / 2,
            EpsMonomial {
                theta: theta_pow % 2 == 1,
                eps,
            },
        )
    }

    fn render(&self) -> String {
        let mut parts = Vec::new();
        if self.theta {
            parts.push("theta".to_string());
        }
        parts.extend(self.eps.iter().map(|i| format!("eps{i}")));
        parts.join("*")
    }
}

/// An element of `C[ε]` in reduced form. No stored coefficient is zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EpsPoly {
    ring: BaseRing,
    terms: BTreeMap<EpsMonomial, Scalar>,
}

impl EpsPoly {
    pub fn zero(ring: BaseRing) -> Self {
        EpsPoly {
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: BaseRing) -> Self {
        EpsPoly::constant(ring, ring.one())
    }

    pub fn constant(ring: BaseRing, c: Scalar) -> Self {
        EpsPoly::monomial(ring, c, EpsMonomial::one())
    }

    pub fn from_i64(ring: BaseRing, c: i64) -> Self {
        EpsPoly::constant(ring, ring.from_i64(c))
    }

    pub fn monomial(ring: BaseRing, c: Scalar, m: EpsMonomial) -> Self {
        let mut terms = BTreeMap::new();
        if !ring.is_zero(&c) {
            terms.insert(m, c);
        }
        EpsPoly { ring, terms }
    }

    pub fn theta(ring: BaseRing) -> Self {
        EpsPoly::monomial(ring, ring.one(), EpsMonomial::new(true, vec![]))
    }

    pub fn eps(ring: BaseRing, i: u32) -> Self {
        EpsPoly::monomial(ring, ring.one(), EpsMonomial::new(false, vec![i]))
    }

    /// Sums arbitrary (monomial, coefficient) pairs, merging duplicates.
    pub fn from_terms(ring: BaseRing, terms: impl IntoIterator<Item = (EpsMonomial, Scalar)>) -> Self {
        let mut out = EpsPoly::zero(ring);
        for (m, c) in terms {
            out.add_term(m, &c);
        }
        out
    }

    pub fn ring(&self) -> BaseRing {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .iter()
                .all(|(m, c)| m.is_one() && self.ring.is_one(c))
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&EpsMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &EpsMonomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(|| self.ring.zero())
    }

    /// The constant term, as a scalar.
    pub fn constant_term(&self) -> Scalar {
        self.coefficient(&EpsMonomial::one())
    }

    /// Largest `ε` index occurring, or 0.
    pub fn max_index(&self) -> u32 {
        self.terms
            .keys()
            .filter_map(|m| m.eps.last().copied())
            .max()
            .unwrap_or(0)
    }

    pub(crate) fn add_term(&mut self, m: EpsMonomial, c: &Scalar) {
        if self.ring.is_zero(c) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = self.ring.add(o.get(), c);
                if self.ring.is_zero(&s) {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_ring(&self, other: &EpsPoly) -> Result<(), AlgebraError> {
        if self.ring != other.ring {
            return Err(AlgebraError::RingMismatch(self.ring, other.ring));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &EpsPoly) -> Result<EpsPoly, AlgebraError> {
        self.check_ring(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c);
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &EpsPoly) -> Result<EpsPoly, AlgebraError> {
        self.check_ring(other)?;
        let ring = self.ring;
        let mut out = EpsPoly::zero(ring);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let (k, m) = ma.mul(mb);
                let mut c = ring.mul(ca, cb);
                for _ in 0..k {
                    c = ring.add(&c, &c);
                }
                out.add_term(m, &c);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Scalar) -> EpsPoly {
        let mut out = EpsPoly::zero(self.ring);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), &self.ring.mul(v, c));
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> EpsPoly {
        let mut base = self.clone();
        let mut acc = EpsPoly::one(self.ring);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// `a ⊕ b = a + b − θab`. On elements with `x² = θx` this is again
    /// such an element, and `1 − θ(a ⊕ b) = (1 − θa)(1 − θb)`.
    pub fn oplus(&self, other: &EpsPoly) -> EpsPoly {
        let prod = &EpsPoly::theta(self.ring) * &(self * other);
        &(self + other) - &prod
    }

    /// Ring homomorphism fixing `θ` and sending `εᵢ ↦ image(i)`.
    pub fn substitute(&self, image: &dyn Fn(u32) -> EpsPoly) -> EpsPoly {
        let ring = self.ring;
        let mut out = EpsPoly::zero(ring);
        for (m, c) in &self.terms {
            let mut t = if m.theta {
                EpsPoly::theta(ring)
            } else {
                EpsPoly::one(ring)
            };
            for &i in &m.eps {
                t = &t * &image(i);
                if t.is_zero() {
                    break;
                }
            }
            out = &out + &t.scale(c);
        }
        out
    }

    /// `φ_σ`: renames `εᵢ ↦ ε_{σ(i)}`, fixing θ.
    pub fn phi_sigma(&self, sigma: &Permutation) -> EpsPoly {
        self.rename(|i| sigma.apply(i as usize) as u32)
    }

    /// Renames indices by an injective map and re-sorts each monomial.
    pub fn rename(&self, f: impl Fn(u32) -> u32) -> EpsPoly {
        let mut out = EpsPoly::zero(self.ring);
        for (m, c) in &self.terms {
            let eps: Vec<u32> = m.eps.iter().map(|&i| f(i)).collect();
            out.add_term(EpsMonomial::new(m.theta, eps), c);
        }
        out
    }

    /// Reduces modulo the ideal `(θεᵢ : i ∈ killed)`. A θ-monomial touching a
    /// killed index vanishes; a θ-free one survives only modulo 2, because
    /// `2εᵢ = θ·θεᵢ` lies in the ideal as well.
    pub fn kill(&self, killed: &[u32]) -> EpsPoly {
        if killed.is_empty() {
            return self.clone();
        }
        let mut out = EpsPoly::zero(self.ring);
        for (m, c) in &self.terms {
            let touches = m.eps.iter().any(|i| killed.binary_search(i).is_ok());
            if !touches {
                out.add_term(m.clone(), c);
            } else if !m.theta {
                out.add_term(m.clone(), &self.ring.reduce_mod2(c));
            }
        }
        out
    }

    /// Drops every θ-monomial and reduces coefficients into `C/2C`.
    pub fn mod_theta(&self) -> EpsPoly {
        let mut out = EpsPoly::zero(self.ring);
        for (m, c) in &self.terms {
            if !m.theta {
                out.add_term(m.clone(), &self.ring.reduce_mod2(c));
            }
        }
        out
    }

    /// Re-reads every coefficient in another ring through its integer or
    /// rational lift.
    pub fn change_ring(&self, ring: BaseRing) -> Result<EpsPoly, AlgebraError> {
        let mut out = EpsPoly::zero(ring);
        for (m, c) in &self.terms {
            let v = ring.from_rational(&self.ring.to_rational(c))?;
            out.add_term(m.clone(), &v);
        }
        Ok(out)
    }

    /// Canonical text rendering, e.g. `1 - eps1*eps2 + theta*eps1*eps2*eps3`.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (m, c)) in self.terms.iter().enumerate() {
            let neg = self.ring.is_negative(c);
            let abs = if neg { self.ring.neg(c) } else { c.clone() };
            if k == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let mono = m.render();
            if mono.is_empty() {
                s.push_str(&self.ring.render(&abs));
            } else if self.ring.is_one(&abs) {
                s.push_str(&mono);
            } else {
                s.push_str(&self.ring.render(&abs));
                s.push('*');
                s.push_str(&mono);
            }
        }
        s
    }
}

impl fmt::Display for EpsPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

// Operator forms panic on a ring mismatch; the `try_*` methods report it.
impl Add for &EpsPoly {
    type Output = EpsPoly;
    fn add(self, rhs: &EpsPoly) -> EpsPoly {
        self.try_add(rhs).expect("C[ε] addition")
    }
}

impl Sub for &EpsPoly {
    type Output = EpsPoly;
    fn sub(self, rhs: &EpsPoly) -> EpsPoly {
        self.try_add(&-rhs).expect("C[ε] subtraction")
    }
}

impl Neg for &EpsPoly {
    type Output = EpsPoly;
    fn neg(self) -> EpsPoly {
        let mut out = EpsPoly::zero(self.ring);
        for (m, c) in &self.terms {
            out.terms.insert(m.clone(), self.ring.neg(c));
        }
        out
    }
}

impl Mul for &EpsPoly {
    type Output = EpsPoly;
    fn mul(self, rhs: &EpsPoly) -> EpsPoly {
        self.try_mul(rhs).expect("C[ε] multiplication")
    }
}

/// A finite multiset of unordered index pairs `{i, j}`, kept modulo 2.
/// This is the argument of `exp`: `exp(Σ εᵢεⱼ)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct PairSet {
    pairs: std::collections::BTreeSet<(u32, u32)>,
}

impl PairSet {
    pub fn new() -> Self {
        PairSet::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut s = PairSet::new();
        for (i, j) in pairs {
            s.toggle(i, j);
        }
        s
    }

    pub fn toggle(&mut self, i: u32, j: u32) {
        let key = (i.min(j), i.max(j));
        if !self.pairs.remove(&key) {
            self.pairs.insert(key);
        }
    }

    /// Adds `ε_a · ε_b` where `a`, `b` are index supports (Z₂ vectors).
    pub fn add_product(&mut self, a: &[u32], b: &[u32]) {
        for &i in a {
            for &j in b {
                self.toggle(i, j);
            }
        }
    }

    pub fn merge(&mut self, other: &PairSet) {
        for &(i, j) in &other.pairs {
            self.toggle(i, j);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(u32, u32)> {
        self.pairs.iter()
    }

    /// `exp` of this pair sum: `∏ (1 − εᵢεⱼ)` over surviving pairs.
    pub fn exp(&self, ring: BaseRing) -> EpsPoly {
        let mut acc = EpsPoly::one(ring);
        for &(i, j) in &self.pairs {
            let pair = if i == j {
                EpsMonomial::new(true, vec![i])
            } else {
                EpsMonomial::new(false, vec![i, j])
            };
            // acc · (1 − m)
            let m = EpsPoly::monomial(ring, ring.one(), pair);
            acc = &acc - &(&acc * &m);
        }
        acc
    }
}

/// `exp` on a multiset of pairs; multiplicities are reduced mod 2 first
/// and a pair `{i, i}` stands for `εᵢ² = θεᵢ`.
pub fn exp_map(ring: BaseRing, pairs: &[(u32, u32)]) -> EpsPoly {
    PairSet::from_pairs(pairs.iter().copied()).exp(ring)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> BaseRing {
        BaseRing::Integers
    }

    fn e(i: u32) -> EpsPoly {
        EpsPoly::eps(z(), i)
    }

    #[test]
    fn defining_relations() {
        let th = EpsPoly::theta(z());
        assert_eq!(&e(1) * &e(1), &th * &e(1));
        assert_eq!(&th * &th, EpsPoly::from_i64(z(), 2));
        let lhs = &(&th * &e(1)) * &(&th * &e(2));
        assert_eq!(lhs, (&e(1) * &e(2)).scale(&z().from_i64(2)));
    }

    #[test]
    fn addition_cancels_and_doubles() {
        let one = EpsPoly::one(z());
        assert_eq!(&(&one + &e(1)) + &(-&e(1)), one);
        assert_eq!(&EpsPoly::zero(z()) + &e(3), e(3));
        let te = &EpsPoly::theta(z()) * &e(1);
        assert_eq!((&te + &te).render(), "2*theta*eps1");
    }

    #[test]
    fn exp_examples() {
        assert!(exp_map(z(), &[]).is_one());
        assert_eq!(exp_map(z(), &[(1, 2)]).render(), "1 - eps1*eps2");
        assert!(exp_map(z(), &[(1, 2), (2, 1)]).is_one());
        let d = exp_map(z(), &[(1, 1)]);
        assert_eq!(d.render(), "1 - theta*eps1");
        assert!((&d * &d).is_one());
    }

    #[test]
    fn ring_mismatch_is_reported() {
        let a = EpsPoly::one(z());
        let b = EpsPoly::one(BaseRing::Rationals);
        assert!(matches!(a.try_add(&b), Err(AlgebraError::RingMismatch(..))));
        assert!(a.try_mul(&b).is_err());
    }

    #[test]
    fn phi_sigma_renames() {
        let s = Permutation::from_cycles(2, &[&[1, 2]]).unwrap();
        let p = &e(1) * &e(2);
        assert_eq!(p.phi_sigma(&s), p);
        assert_eq!(e(1).phi_sigma(&s), e(2));
        assert_eq!(p.phi_sigma(&Permutation::identity(2)), p);
    }

    #[test]
    fn kill_rule_drops_theta_and_reduces_mod_two() {
        let th = EpsPoly::theta(z());
        let x = &(&(&th * &e(1)) + &e(1).scale(&z().from_i64(3))) + &e(2).scale(&z().from_i64(5));
        assert_eq!(x.kill(&[1]).render(), "eps1 + 5*eps2");
    }

    #[test]
    fn mod_two_ring_kills_theta_squared() {
        let f2 = BaseRing::Modular(2);
        let th = EpsPoly::theta(f2);
        assert!((&th * &th).is_zero());
    }
}
