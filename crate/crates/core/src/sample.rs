//! Seeded random inputs for the property suites.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::coeff::{EpsMonomial, EpsPoly};
use crate::comodule::MultilinearPoly;
use crate::grassmann::{GrassElem, Grade, SGen, SWord, Word};
use crate::hull::{GradedPoly, Matrix};
use crate::perm::Permutation;
use crate::scalar::{BaseRing, Scalar};
use crate::supertrace::{Atom, Term, TracePoly};

pub fn scalar<R: Rng>(rng: &mut R, ring: BaseRing, bound: i64) -> Scalar {
    ring.from_i64(rng.gen_range(-bound..=bound))
}

pub fn nonzero_scalar<R: Rng>(rng: &mut R, ring: BaseRing, bound: i64) -> Scalar {
    loop {
        let c = scalar(rng, ring, bound);
        if !ring.is_zero(&c) {
            return c;
        }
    }
}

/// A sum of up to `terms` monomials on `ε₁..ε_max`.
pub fn eps_poly<R: Rng>(rng: &mut R, ring: BaseRing, max_index: u32, terms: usize) -> EpsPoly {
    let mut p = EpsPoly::zero(ring);
    for _ in 0..rng.gen_range(0..=terms) {
        let eps: Vec<u32> = (1..=max_index).filter(|_| rng.gen_bool(0.35)).collect();
        let m = EpsMonomial::new(rng.gen_bool(0.3), eps);
        p = &p + &EpsPoly::monomial(ring, scalar(rng, ring, 3), m);
    }
    p
}

/// A word of length `1..=max_len` in `e₁..e_max`, letters may repeat.
pub fn word<R: Rng>(rng: &mut R, max_index: u32, max_len: usize) -> Word {
    let len = rng.gen_range(1..=max_len);
    let letters: Vec<u32> = (0..len).map(|_| rng.gen_range(1..=max_index)).collect();
    Word::from_letters(&letters)
}

/// A random element of `𝔊_X`, `X = {1..max_index}`. With `plain` the
/// coefficients are integers in `[-3, 3]`, otherwise small `C[ε]` values.
pub fn grass<R: Rng>(
    rng: &mut R,
    ring: BaseRing,
    max_index: u32,
    max_len: usize,
    terms: usize,
    plain: bool,
) -> GrassElem {
    let mut x = GrassElem::zero(ring);
    for _ in 0..rng.gen_range(1..=terms) {
        let c = if plain {
            EpsPoly::constant(ring, scalar(rng, ring, 3))
        } else {
            eps_poly(rng, ring, max_index, 2)
        };
        let w = if rng.gen_bool(0.15) {
            Word::one()
        } else {
            word(rng, max_index, max_len)
        };
        x = &x + &GrassElem::from_term(c, w);
    }
    x
}

pub fn permutation<R: Rng>(rng: &mut R, n: usize) -> Permutation {
    let mut images: Vec<usize> = (1..=n).collect();
    images.shuffle(rng);
    Permutation::new(images).expect("shuffled identity")
}

/// A multilinear polynomial with up to `terms` integer-coefficient monomials.
pub fn multilinear<R: Rng>(rng: &mut R, ring: BaseRing, n: usize, terms: usize) -> MultilinearPoly {
    let entries: Vec<(Permutation, EpsPoly)> = (0..rng.gen_range(1..=terms))
        .map(|_| {
            (
                permutation(rng, n),
                EpsPoly::constant(ring, nonzero_scalar(rng, ring, 3)),
            )
        })
        .collect();
    MultilinearPoly::from_terms(ring, n, entries).expect("arity matches")
}

/// Grades supported on `{1..max_index}`.
pub fn grade<R: Rng>(rng: &mut R, max_index: u32) -> Grade {
    Grade::from_indices((1..=max_index).filter(|_| rng.gen_bool(0.4)))
}

/// A graded multilinear polynomial with `C[ε]` coefficients.
pub fn graded_poly<R: Rng>(rng: &mut R, ring: BaseRing, n: usize, terms: usize) -> GradedPoly {
    let entries: Vec<(Permutation, EpsPoly)> = (0..rng.gen_range(1..=terms))
        .map(|_| (permutation(rng, n), eps_poly(rng, ring, 3, 2)))
        .collect();
    let poly = MultilinearPoly::from_terms(ring, n, entries).expect("arity matches");
    let grades = (0..n).map(|_| grade(rng, 3)).collect();
    GradedPoly::new(poly, grades).expect("arity matches")
}

/// A square matrix with integer entries in `[-bound, bound]`.
pub fn int_matrix<R: Rng>(rng: &mut R, ring: BaseRing, size: usize, bound: i64) -> Matrix<EpsPoly> {
    let entries = (0..size * size)
        .map(|_| EpsPoly::constant(ring, scalar(rng, ring, bound)))
        .collect();
    Matrix::new(size, entries).expect("square")
}

/// A matrix over `𝔊` with sparse single-term entries.
pub fn grass_matrix<R: Rng>(rng: &mut R, ring: BaseRing, size: usize, max_index: u32) -> Matrix<GrassElem> {
    let entries = (0..size * size)
        .map(|_| {
            if rng.gen_bool(0.4) {
                GrassElem::zero(ring)
            } else {
                grass(rng, ring, max_index, 2, 1, true)
            }
        })
        .collect();
    Matrix::new(size, entries).expect("square")
}

/// A word `e_g^{(n)}` in the free 𝔖-commutative algebra with grade `g`.
pub fn sword_of_grade(g: &Grade, n: u32) -> SWord {
    SWord::generator(SGen::new(g.clone(), n))
}

/// A multilinear trace monomial on `letters` (in random order) in which
/// every `F`-argument has a bare letter at its top level.
pub fn trace_term<R: Rng>(rng: &mut R, letters: &[u32], depth: u32) -> Term {
    let mut ls = letters.to_vec();
    ls.shuffle(rng);
    build_term(rng, &ls, depth, false)
}

fn build_term<R: Rng>(rng: &mut R, letters: &[u32], depth: u32, need_bare: bool) -> Term {
    loop {
        let mut atoms = Vec::new();
        let mut rest = letters;
        while !rest.is_empty() {
            let take = rng.gen_range(1..=rest.len());
            let (chunk, tail) = rest.split_at(take);
            rest = tail;
            if depth > 0 && rng.gen_bool(0.4) {
                atoms.push(Atom::Trace(build_term(rng, chunk, depth - 1, true)));
            } else {
                atoms.extend(chunk.iter().map(|&i| Atom::Letter(i)));
            }
        }
        if !need_bare || atoms.iter().any(|a| matches!(a, Atom::Letter(_))) {
            return Term(atoms);
        }
    }
}

pub fn term_poly(ring: BaseRing, t: Term) -> TracePoly {
    TracePoly::from_terms(ring, [(t, ring.one())])
}

/// A random multilinear element of the ideal generated by the trace
/// axioms: an axiom with monomials substituted for its letters, between
/// monomial contexts, times a scalar. Each of the `summands` pieces is
/// multilinear in its own letters.
pub fn trace_consequence<R: Rng>(rng: &mut R, ring: BaseRing, summands: usize) -> TracePoly {
    let axioms = crate::supertrace::axiom_polys(ring);
    let mut total = TracePoly::zero(ring);
    for _ in 0..summands {
        let (_, ax) = axioms.choose(rng).expect("axioms");
        let arity = ax.num_letters();
        let extra = rng.gen_range(0..=2u32);
        let mut pool: Vec<u32> = (1..=arity + extra + 2).collect();
        pool.shuffle(rng);
        let mut next = pool.into_iter();
        let mut subs = Vec::new();
        for _ in 0..arity {
            let mut ls = vec![next.next().expect("pool")];
            if rng.gen_bool(0.3) {
                ls.extend(next.next());
            }
            subs.push(term_poly(ring, substitution_term(rng, &ls)));
        }
        let mut piece = ax.substitute(&subs);
        let rest: Vec<u32> = next.collect();
        let split = rng.gen_range(0..=rest.len());
        if split > 0 {
            piece = term_poly(ring, trace_term(rng, &rest[..split], 1)).mul(&piece);
        }
        if split < rest.len() {
            piece = piece.mul(&term_poly(ring, trace_term(rng, &rest[split..], 1)));
        }
        total = total.add(&piece.scale(&nonzero_scalar(rng, ring, 3)));
    }
    total
}

// Substituted monomials keep a bare letter so no trace argument becomes a
// pure product of traces.
fn substitution_term<R: Rng>(rng: &mut R, letters: &[u32]) -> Term {
    let mut ls = letters.to_vec();
    ls.shuffle(rng);
    build_term(rng, &ls, 1, true)
}
