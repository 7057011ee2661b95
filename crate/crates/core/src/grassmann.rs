//! The generalized Grassmann algebra `𝔊` over `C[ε]`, generalized signs,
//! substitution endomorphisms, and the free 𝔖-commutative algebra.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::coeff::{EpsPoly, PairSet};
use crate::error::AlgebraError;
use crate::perm::Permutation;
use crate::scalar::{BaseRing, Scalar};

/// A finitely supported `Z₂`-vector, stored as its sorted support.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Grade(Vec<u32>);

impl Grade {
    pub fn zero() -> Self {
        Grade(Vec::new())
    }

    /// Sum in `Z₂^⊕ℕ` of unit vectors; repeated indices cancel in pairs.
    pub fn from_indices(indices: impl IntoIterator<Item = u32>) -> Self {
        let mut set = BTreeSet::new();
        for i in indices {
            if !set.remove(&i) {
                set.insert(i);
            }
        }
        Grade(set.into_iter().collect())
    }

    pub fn support(&self) -> &[u32] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &Grade) -> Grade {
        Grade::from_indices(self.0.iter().chain(other.0.iter()).copied())
    }
}

impl fmt::Display for Grade {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// `ε_g` as a `Z₂` index vector; only ever used inside `exp`.
pub fn eps_of_grade(g: &Grade) -> Vec<u32> {
    g.0.clone()
}

/// A word `e_{i₁}^{a₁} ⋯ e_{i_k}^{a_k}` in normal (sorted) form.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<(u32, u32)>);

impl Word {
    pub fn one() -> Self {
        Word(Vec::new())
    }

    pub fn letter(i: u32) -> Self {
        assert!(i >= 1, "generator indices start at 1");
        Word(vec![(i, 1)])
    }

    /// The sorted word with the given letters, counted with multiplicity.
    pub fn from_letters(letters: &[u32]) -> Self {
        let mut m: BTreeMap<u32, u32> = BTreeMap::new();
        for &i in letters {
            assert!(i >= 1, "generator indices start at 1");
            *m.entry(i).or_default() += 1;
        }
        Word(m.into_iter().collect())
    }

    pub fn from_powers(powers: &[(u32, u32)]) -> Self {
        let mut m: BTreeMap<u32, u32> = BTreeMap::new();
        for &(i, a) in powers {
            assert!(i >= 1, "generator indices start at 1");
            *m.entry(i).or_default() += a;
        }
        Word(m.into_iter().filter(|&(_, a)| a > 0).collect())
    }

    pub fn powers(&self) -> &[(u32, u32)] {
        &self.0
    }

    /// Letters in order, repeated by multiplicity.
    pub fn letters(&self) -> Vec<u32> {
        self.0
            .iter()
            .flat_map(|&(i, a)| std::iter::repeat_n(i, a as usize))
            .collect()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, a)| a).sum()
    }

    pub fn multiplicity(&self, i: u32) -> u32 {
        self.0
            .iter()
            .find(|&&(j, _)| j == i)
            .map_or(0, |&(_, a)| a)
    }

    pub fn grade(&self) -> Grade {
        Grade(
            self.0
                .iter()
                .filter(|&&(_, a)| a % 2 == 1)
                .map(|&(i, _)| i)
                .collect(),
        )
    }

    /// Indices occurring at least twice.
    pub fn squared(&self) -> Vec<u32> {
        self.0
            .iter()
            .filter(|&&(_, a)| a >= 2)
            .map(|&(i, _)| i)
            .collect()
    }

    pub fn max_index(&self) -> u32 {
        self.0.last().map_or(0, |&(i, _)| i)
    }

    /// `u·v = exp(P)·(uv sorted)`; returns the pair set `P`.
    pub fn mul(&self, other: &Word) -> (PairSet, Word) {
        let mut pairs = PairSet::new();
        for &(i, a) in &self.0 {
            for &(j, b) in &other.0 {
                if i > j && (a * b) % 2 == 1 {
                    pairs.toggle(i, j);
                }
            }
        }
        let mut m: BTreeMap<u32, u32> = self.0.iter().copied().collect();
        for &(j, b) in &other.0 {
            *m.entry(j).or_default() += b;
        }
        (pairs, Word(m.into_iter().collect()))
    }

    pub fn render(&self) -> String {
        self.0
            .iter()
            .map(|&(i, a)| {
                if a == 1 {
                    format!("e{i}")
                } else {
                    format!("e{i}^{a}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// An element of `𝔊` (or of `𝔊/⟨eᵢ²⟩` in truncated mode).
///
/// Coefficients of a word containing `eᵢ²` live in `C[ε]/(θεᵢ)`; they are
/// stored reduced, so every θ-monomial touching `εᵢ` is absent and θ-free
/// monomials touching `εᵢ` carry coefficients reduced mod 2.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrassElem {
    ring: BaseRing,
    truncated: bool,
    terms: BTreeMap<Word, EpsPoly>,
}

impl GrassElem {
    pub fn zero(ring: BaseRing) -> Self {
        GrassElem {
            ring,
            truncated: false,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: BaseRing) -> Self {
        GrassElem::from_term(EpsPoly::one(ring), Word::one())
    }

    pub fn generator(ring: BaseRing, i: u32) -> Self {
        GrassElem::from_term(EpsPoly::one(ring), Word::letter(i))
    }

    pub fn scalar(c: EpsPoly) -> Self {
        GrassElem::from_term(c, Word::one())
    }

    pub fn from_term(c: EpsPoly, w: Word) -> Self {
        let mut out = GrassElem::zero(c.ring());
        out.add_term(w, c);
        out
    }

    pub fn from_terms(ring: BaseRing, terms: impl IntoIterator<Item = (Word, EpsPoly)>) -> Self {
        let mut out = GrassElem::zero(ring);
        for (w, c) in terms {
            out.add_term(w, c);
        }
        out
    }

    /// Same element viewed in (or out of) the `eᵢ² = 0` quotient.
    pub fn with_truncated(mut self, truncated: bool) -> Self {
        self.truncated = truncated;
        if truncated {
            self.terms.retain(|w, _| w.squared().is_empty());
        }
        self
    }

    pub fn ring(&self) -> BaseRing {
        self.ring
    }

    pub fn is_truncated(&self) -> bool {
        self.truncated
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &EpsPoly)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, w: &Word) -> EpsPoly {
        self.terms
            .get(w)
            .cloned()
            .unwrap_or_else(|| EpsPoly::zero(self.ring))
    }

    pub fn max_index(&self) -> u32 {
        self.terms
            .iter()
            .map(|(w, c)| w.max_index().max(c.max_index()))
            .max()
            .unwrap_or(0)
    }

    fn add_term(&mut self, w: Word, c: EpsPoly) {
        if self.truncated && !w.squared().is_empty() {
            return;
        }
        let squared = w.squared();
        let c = c.kill(&squared);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = (o.get() + &c).kill(&squared);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check(&self, other: &GrassElem) -> Result<(), AlgebraError> {
        if self.ring != other.ring {
            return Err(AlgebraError::RingMismatch(self.ring, other.ring));
        }
        if self.truncated != other.truncated {
            return Err(AlgebraError::ModeMismatch);
        }
        Ok(())
    }

    pub fn try_add(&self, other: &GrassElem) -> Result<GrassElem, AlgebraError> {
        self.check(other)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_mul(&self, other: &GrassElem) -> Result<GrassElem, AlgebraError> {
        self.check(other)?;
        let mut out = GrassElem {
            ring: self.ring,
            truncated: self.truncated,
            terms: BTreeMap::new(),
        };
        for (u, cu) in &self.terms {
            for (v, cv) in &other.terms {
                let (pairs, w) = u.mul(v);
                if self.truncated && !w.squared().is_empty() {
                    continue;
                }
                let mut c = cu * cv;
                if !pairs.is_empty() {
                    c = &c * &pairs.exp(self.ring);
                }
                out.add_term(w, c);
            }
        }
        Ok(out)
    }

    /// Multiplies every coefficient by a central element of `C[ε]`.
    pub fn scale_eps(&self, c: &EpsPoly) -> GrassElem {
        let mut out = GrassElem {
            ring: self.ring,
            truncated: self.truncated,
            terms: BTreeMap::new(),
        };
        for (w, v) in &self.terms {
            out.add_term(w.clone(), v * c);
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> GrassElem {
        self.scale_eps(&EpsPoly::constant(self.ring, c.clone()))
    }

    pub fn pow(&self, mut e: u32) -> GrassElem {
        let mut base = self.clone();
        let mut acc = GrassElem::one(self.ring).with_truncated(self.truncated);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Homogeneous components keyed by grade.
    pub fn components(&self) -> BTreeMap<Grade, GrassElem> {
        let mut out: BTreeMap<Grade, GrassElem> = BTreeMap::new();
        for (w, c) in &self.terms {
            let entry = out.entry(w.grade()).or_insert_with(|| GrassElem {
                ring: self.ring,
                truncated: self.truncated,
                terms: BTreeMap::new(),
            });
            entry.terms.insert(w.clone(), c.clone());
        }
        out
    }

    /// `[a, b] = ab − ba`.
    pub fn commutator(&self, other: &GrassElem) -> GrassElem {
        &(self * other) - &(other * self)
    }

    /// `{a, b} = ab − exp(ε_gε_h)ba`, extended bilinearly over components.
    pub fn scommutator(&self, other: &GrassElem) -> GrassElem {
        let mut out = GrassElem::zero(self.ring).with_truncated(self.truncated);
        for (g, a) in self.components() {
            for (h, b) in other.components() {
                let mut p = PairSet::new();
                p.add_product(g.support(), h.support());
                let term = &(&a * &b) - &(&b * &a).scale_eps(&p.exp(self.ring));
                out = &out + &term;
            }
        }
        out
    }

    /// Text rendering, e.g. `e1*e2 + (1 - eps1*eps2)*e2^2`.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (w, c)) in self.terms.iter().enumerate() {
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
            if w.is_one() {
                s.push_str(&body);
                continue;
            }
            let coeff = if single { body } else { format!("({body})") };
            if coeff == "1" {
                s.push_str(&w.render());
            } else {
                s.push_str(&coeff);
                s.push('*');
                s.push_str(&w.render());
            }
        }
        s
    }
}

impl fmt::Display for GrassElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for &GrassElem {
    type Output = GrassElem;
    fn add(self, rhs: &GrassElem) -> GrassElem {
        self.try_add(rhs).expect("𝔊 addition")
    }
}

impl Sub for &GrassElem {
    type Output = GrassElem;
    fn sub(self, rhs: &GrassElem) -> GrassElem {
        self.try_add(&-rhs).expect("𝔊 subtraction")
    }
}

impl Neg for &GrassElem {
    type Output = GrassElem;
    fn neg(self) -> GrassElem {
        GrassElem {
            ring: self.ring,
            truncated: self.truncated,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }
}

impl Mul for &GrassElem {
    type Output = GrassElem;
    fn mul(self, rhs: &GrassElem) -> GrassElem {
        self.try_mul(rhs).expect("𝔊 multiplication")
    }
}

/// Generalized sign of `σ` on index supports `ε_{w₁}, …, ε_{w_n}`:
/// `exp(Σ_{i<j, σ(i)>σ(j)} ε_{w_σ(i)} ε_{w_σ(j)})`.
pub fn esgn_supports(
    ring: BaseRing,
    supports: &[Vec<u32>],
    sigma: &Permutation,
) -> Result<EpsPoly, AlgebraError> {
    if sigma.degree() != supports.len() {
        return Err(AlgebraError::ArityMismatch {
            expected: supports.len(),
            got: sigma.degree(),
        });
    }
    let mut pairs = PairSet::new();
    for (i, j) in sigma.inversions() {
        let a = &supports[sigma.apply(i) - 1];
        let b = &supports[sigma.apply(j) - 1];
        pairs.add_product(a, b);
    }
    Ok(pairs.exp(ring))
}

/// `esgn_w(σ)` for a sequence of words.
pub fn esgn(ring: BaseRing, words: &[Word], sigma: &Permutation) -> Result<EpsPoly, AlgebraError> {
    let supports: Vec<Vec<u32>> = words.iter().map(|w| w.grade().0).collect();
    esgn_supports(ring, &supports, sigma)
}

/// `esgn` for the generator sequence `(e₁, …, e_n)`.
pub fn esgn_standard(ring: BaseRing, sigma: &Permutation) -> EpsPoly {
    let supports: Vec<Vec<u32>> = (1..=sigma.degree() as u32).map(|i| vec![i]).collect();
    esgn_supports(ring, &supports, sigma).expect("degrees agree")
}

/// `σ(w) = (w_{σ(1)}, …, w_{σ(n)})`.
pub fn permute_words(words: &[Word], sigma: &Permutation) -> Vec<Word> {
    (1..=words.len())
        .map(|i| words[sigma.apply(i) - 1].clone())
        .collect()
}

fn product(ring: BaseRing, words: &[Word]) -> GrassElem {
    words.iter().fold(GrassElem::one(ring), |acc, w| {
        &acc * &GrassElem::from_term(EpsPoly::one(ring), w.clone())
    })
}

/// Computes `w_{σ(1)}⋯w_{σ(n)}` by multiplication and checks it against
/// `esgn_w(σ)·w₁⋯w_n`.
pub fn reorder_product(
    ring: BaseRing,
    words: &[Word],
    sigma: &Permutation,
) -> Result<GrassElem, AlgebraError> {
    let lhs = product(ring, &permute_words(words, sigma));
    let rhs = product(ring, words).scale_eps(&esgn(ring, words, sigma)?);
    if lhs != rhs {
        return Err(AlgebraError::Internal(format!(
            "reordering {sigma} gave {lhs}, expected {rhs}"
        )));
    }
    Ok(lhs)
}

/// `ε`-image of a word under `η`: the ⊕-sum of its letters.
pub fn eps_image(ring: BaseRing, w: &Word) -> EpsPoly {
    w.letters()
        .iter()
        .fold(EpsPoly::zero(ring), |acc, &j| acc.oplus(&EpsPoly::eps(ring, j)))
}

/// `η_w`: `eᵢ ↦ wᵢ`, `εᵢ ↦ eps_image(wᵢ)`, `θ ↦ θ`.
pub fn eta_endomorphism(targets: &[Word], x: &GrassElem) -> Result<GrassElem, AlgebraError> {
    let ring = x.ring();
    let n = targets.len() as u32;
    if x.max_index() > n {
        return Err(AlgebraError::UnsupportedGenerator(x.max_index()));
    }
    let images: Vec<EpsPoly> = targets.iter().map(|w| eps_image(ring, w)).collect();
    let gens: Vec<GrassElem> = targets
        .iter()
        .map(|w| GrassElem::from_term(EpsPoly::one(ring), w.clone()).with_truncated(x.truncated))
        .collect();
    let mut out = GrassElem::zero(ring).with_truncated(x.truncated);
    for (w, c) in x.terms() {
        let c = c.substitute(&|i| images[i as usize - 1].clone());
        let mut t = GrassElem::scalar(c).with_truncated(x.truncated);
        for &(i, a) in w.powers() {
            t = &t * &gens[i as usize - 1].pow(a);
        }
        out = &out + &t;
    }
    Ok(out)
}

/// Target ring of the reduction modulo θ, i.e. `C/2C`.
pub fn mod_theta_ring(ring: BaseRing) -> Result<BaseRing, AlgebraError> {
    match ring {
        BaseRing::Integers => Ok(BaseRing::Modular(2)),
        BaseRing::Modular(m) if m % 2 == 0 => Ok(BaseRing::Modular(2)),
        other => Err(AlgebraError::UnsupportedRing(other)),
    }
}

/// Image in `𝔊/θ𝔊` over `C/2C`: θ-monomials dropped, coefficients mod 2.
pub fn quotient_mod_theta(x: &GrassElem) -> Result<GrassElem, AlgebraError> {
    let target = mod_theta_ring(x.ring())?;
    let mut out = GrassElem::zero(target).with_truncated(x.truncated);
    for (w, c) in x.terms() {
        let c = c.mod_theta().change_ring(target)?;
        out.add_term(w.clone(), c);
    }
    Ok(out)
}

/// `EpsPoly` image of the reduction modulo θ.
pub fn eps_mod_theta(c: &EpsPoly) -> Result<EpsPoly, AlgebraError> {
    let target = mod_theta_ring(c.ring())?;
    c.mod_theta().change_ring(target)
}

/// A generator `e_g^{(n)}` of the free 𝔖-commutative algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SGen {
    pub grade: Grade,
    pub n: u32,
}

impl SGen {
    pub fn new(grade: Grade, n: u32) -> Self {
        SGen { grade, n }
    }
}

/// A sorted word in the `SGen`s, with multiplicities.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SWord(Vec<(SGen, u32)>);

impl SWord {
    pub fn one() -> Self {
        SWord(Vec::new())
    }

    pub fn generator(g: SGen) -> Self {
        SWord(vec![(g, 1)])
    }

    pub fn powers(&self) -> &[(SGen, u32)] {
        &self.0
    }

    pub fn grade(&self) -> Grade {
        Grade::from_indices(
            self.0
                .iter()
                .filter(|(_, a)| a % 2 == 1)
                .flat_map(|(g, _)| g.grade.0.iter().copied()),
        )
    }

    fn squared_grades(&self) -> Vec<&Grade> {
        self.0
            .iter()
            .filter(|(g, a)| *a >= 2 && !g.grade.is_zero())
            .map(|(g, _)| &g.grade)
            .collect()
    }

    fn mul(&self, other: &SWord) -> (PairSet, SWord) {
        let mut pairs = PairSet::new();
        for (g, a) in &self.0 {
            for (h, b) in &other.0 {
                if g > h && (a * b) % 2 == 1 {
                    pairs.add_product(g.grade.support(), h.grade.support());
                }
            }
        }
        let mut m: BTreeMap<SGen, u32> = self.0.iter().cloned().collect();
        for (h, b) in &other.0 {
            *m.entry(h.clone()).or_default() += b;
        }
        (pairs, SWord(m.into_iter().collect()))
    }

    pub fn render(&self) -> String {
        self.0
            .iter()
            .map(|(g, a)| {
                let base = format!("s{}_{}", g.grade, g.n);
                if *a == 1 {
                    base
                } else {
                    format!("{base}^{a}")
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }
}

/// Reduces `c` modulo the annihilator `(θa_g : g squared)` of a word, where
/// `a_g = ⊕_{p∈g} ε_p`.
///
/// The ideal only depends on the `Z₂`-span of the squared grades. With a
/// reduced echelon basis `bₖ` (pivot `pₖ`) the substitution
/// `T: ε_{pₖ} ↦ a_{bₖ}` is an involutive automorphism carrying the ideal to
/// the monomial ideal `(θε_{pₖ})`, so `T ∘ kill ∘ T` is a normal form.
pub fn reduce_by_squares(c: &EpsPoly, squared: &[&Grade]) -> EpsPoly {
    let mut basis: Vec<(u32, BTreeSet<u32>)> = Vec::new();
    for g in squared {
        let mut v: BTreeSet<u32> = g.support().iter().copied().collect();
        for (p, b) in &basis {
            if v.contains(p) {
                v = v.symmetric_difference(b).copied().collect();
            }
        }
        if let Some(&p) = v.iter().next() {
            for (_, b) in basis.iter_mut() {
                if b.contains(&p) {
                    *b = b.symmetric_difference(&v).copied().collect();
                }
            }
            basis.push((p, v));
        }
    }
    if basis.is_empty() {
        return c.clone();
    }
    let mut pivots: Vec<u32> = basis.iter().map(|(p, _)| *p).collect();
    pivots.sort_unstable();
    if basis.iter().all(|(_, b)| b.len() == 1) {
        return c.kill(&pivots);
    }
    let ring = c.ring();
    let images: BTreeMap<u32, EpsPoly> = basis
        .iter()
        .map(|(p, b)| {
            let a = b
                .iter()
                .fold(EpsPoly::zero(ring), |acc, &q| acc.oplus(&EpsPoly::eps(ring, q)));
            (*p, a)
        })
        .collect();
    let t = |i: u32| images.get(&i).cloned().unwrap_or_else(|| EpsPoly::eps(ring, i));
    c.substitute(&t).kill(&pivots).substitute(&t)
}

/// An element of the free 𝔖-commutative algebra over `C[ε]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SElem {
    ring: BaseRing,
    terms: BTreeMap<SWord, EpsPoly>,
}

impl SElem {
    pub fn zero(ring: BaseRing) -> Self {
        SElem {
            ring,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(ring: BaseRing) -> Self {
        SElem::from_term(EpsPoly::one(ring), SWord::one())
    }

    pub fn generator(ring: BaseRing, g: SGen) -> Self {
        SElem::from_term(EpsPoly::one(ring), SWord::generator(g))
    }

    pub fn from_term(c: EpsPoly, w: SWord) -> Self {
        let mut out = SElem::zero(c.ring());
        out.add_term(w, c);
        out
    }

    pub fn ring(&self) -> BaseRing {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&SWord, &EpsPoly)> {
        self.terms.iter()
    }

    /// Normal form of a coefficient attached to `w`.
    pub fn reduce_coefficient(w: &SWord, c: &EpsPoly) -> EpsPoly {
        reduce_by_squares(c, &w.squared_grades())
    }

    fn add_term(&mut self, w: SWord, c: EpsPoly) {
        let c = SElem::reduce_coefficient(&w, &c);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = SElem::reduce_coefficient(o.key(), &(o.get() + &c));
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn try_add(&self, other: &SElem) -> Result<SElem, AlgebraError> {
        if self.ring != other.ring {
            return Err(AlgebraError::RingMismatch(self.ring, other.ring));
        }
        let mut out = self.clone();
        for (w, c) in &other.terms {
            out.add_term(w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn s_mul(&self, other: &SElem) -> Result<SElem, AlgebraError> {
        if self.ring != other.ring {
            return Err(AlgebraError::RingMismatch(self.ring, other.ring));
        }
        let mut out = SElem::zero(self.ring);
        for (u, cu) in &self.terms {
            for (v, cv) in &other.terms {
                let (pairs, w) = u.mul(v);
                let mut c = cu * cv;
                if !pairs.is_empty() {
                    c = &c * &pairs.exp(self.ring);
                }
                out.add_term(w, c);
            }
        }
        Ok(out)
    }

    pub fn scale_eps(&self, c: &EpsPoly) -> SElem {
        let mut out = SElem::zero(self.ring);
        for (w, v) in &self.terms {
            out.add_term(w.clone(), v * c);
        }
        out
    }

    pub fn components(&self) -> BTreeMap<Grade, SElem> {
        let mut out: BTreeMap<Grade, SElem> = BTreeMap::new();
        for (w, c) in &self.terms {
            out.entry(w.grade())
                .or_insert_with(|| SElem::zero(self.ring))
                .terms
                .insert(w.clone(), c.clone());
        }
        out
    }

    pub fn scommutator(&self, other: &SElem) -> SElem {
        let mut out = SElem::zero(self.ring);
        for (g, a) in self.components() {
            for (h, b) in other.components() {
                let mut p = PairSet::new();
                p.add_product(g.support(), h.support());
                let term = &(&a * &b) - &(&b * &a).scale_eps(&p.exp(self.ring));
                out = &out + &term;
            }
        }
        out
    }

    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        self.terms
            .iter()
            .map(|(w, c)| {
                if w.0.is_empty() {
                    format!("({c})")
                } else {
                    format!("({c})*{}", w.render())
                }
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

impl fmt::Display for SElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for &SElem {
    type Output = SElem;
    fn add(self, rhs: &SElem) -> SElem {
        self.try_add(rhs).expect("SElem addition")
    }
}

impl Neg for &SElem {
    type Output = SElem;
    fn neg(self) -> SElem {
        SElem {
            ring: self.ring,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), -c)).collect(),
        }
    }
}

impl Sub for &SElem {
    type Output = SElem;
    fn sub(self, rhs: &SElem) -> SElem {
        self.try_add(&-rhs).expect("SElem subtraction")
    }
}

impl Mul for &SElem {
    type Output = SElem;
    fn mul(self, rhs: &SElem) -> SElem {
        self.s_mul(rhs).expect("SElem multiplication")
    }
}
