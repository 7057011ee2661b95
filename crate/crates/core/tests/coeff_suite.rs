use std::collections::BTreeMap;

use gengrass::{exp_map, sample, BaseRing, EpsMonomial, EpsPoly, Permutation, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const Z: BaseRing = BaseRing::Integers;
const RINGS: [BaseRing; 4] = [BaseRing::Integers, BaseRing::Rationals, BaseRing::Modular(5), BaseRing::Modular(6)];

fn poly(seed: u64, ring: BaseRing) -> EpsPoly {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample::eps_poly(&mut rng, ring, 4, 4)
}

proptest! {
    #[test]
    fn ring_axioms(a in any::<u64>(), b in any::<u64>(), c in any::<u64>(), r in 0usize..4) {
        let ring = RINGS[r];
        let (a, b, c) = (poly(a, ring), poly(b, ring), poly(c, ring));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a + &EpsPoly::zero(ring), a.clone());
        prop_assert_eq!(&a * &EpsPoly::one(ring), a.clone());
        prop_assert!((&a - &a).is_zero());
    }

    #[test]
    fn exp_squares_to_one_and_is_additive(
        p in proptest::collection::vec((1u32..5, 1u32..5), 0..6),
        q in proptest::collection::vec((1u32..5, 1u32..5), 0..6),
    ) {
        let ep = exp_map(Z, &p);
        prop_assert!((&ep * &ep).is_one());
        let mut pq = p.clone();
        pq.extend(&q);
        prop_assert_eq!(exp_map(Z, &pq), &ep * &exp_map(Z, &q));
    }

    #[test]
    fn phi_is_a_homomorphism(a in any::<u64>(), b in any::<u64>(), s in any::<u64>(), t in any::<u64>()) {
        let (a, b) = (poly(a, Z), poly(b, Z));
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let sigma = sample::permutation(&mut rng, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(t);
        let tau = sample::permutation(&mut rng, 4);
        prop_assert_eq!((&a * &b).phi_sigma(&sigma), &a.phi_sigma(&sigma) * &b.phi_sigma(&sigma));
        prop_assert_eq!(a.phi_sigma(&sigma.compose(&tau)), a.phi_sigma(&tau).phi_sigma(&sigma));
    }

    #[test]
    fn reducer_agrees_with_random_rule_order(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut raw: Vec<(i64, Vec<Sym>)> = Vec::new();
        for _ in 0..rng.gen_range(1..4) {
            let len = rng.gen_range(0..7);
            let syms = (0..len).map(|_| if rng.gen_bool(0.25) { Sym::Theta } else { Sym::Eps(rng.gen_range(1..4)) }).collect();
            raw.push((rng.gen_range(-3..=3), syms));
        }
        let expected = brute_force(&mut rng, &raw);
        let mut lib = EpsPoly::zero(Z);
        for (c, syms) in &raw {
            let mut t = EpsPoly::from_i64(Z, *c);
            for s in syms {
                t = &t * &match s { Sym::Theta => EpsPoly::theta(Z), Sym::Eps(i) => EpsPoly::eps(Z, *i) };
            }
            lib = &lib + &t;
        }
        let got: BTreeMap<(bool, Vec<u32>), i64> = lib
            .terms()
            .map(|(m, c)| ((m.has_theta(), m.eps().to_vec()), i64::try_from(Z.to_bigint(c).unwrap()).unwrap()))
            .collect();
        prop_assert_eq!(got, expected);
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Sym {
    Theta,
    Eps(u32),
}

// Applies ε_iε_i → θε_i and θθ → 2 to a raw word, picking rule sites at random.
fn brute_force(rng: &mut ChaCha8Rng, raw: &[(i64, Vec<Sym>)]) -> BTreeMap<(bool, Vec<u32>), i64> {
    let mut out: BTreeMap<(bool, Vec<u32>), i64> = BTreeMap::new();
    for (c, syms) in raw {
        let mut coeff = *c;
        let mut word = syms.clone();
        loop {
            let mut sites = Vec::new();
            for i in 0..word.len() {
                for j in i + 1..word.len() {
                    if word[i] == word[j] {
                        sites.push((i, j));
                    }
                }
            }
            let Some(&(i, j)) = sites.choose(rng) else { break };
            match word[i] {
                Sym::Theta => {
                    coeff *= 2;
                    word.remove(j);
                    word.remove(i);
                }
                Sym::Eps(_) => {
                    word.remove(j);
                    word.push(Sym::Theta);
                }
            }
        }
        let theta = word.contains(&Sym::Theta);
        let mut eps: Vec<u32> = word.iter().filter_map(|s| if let Sym::Eps(i) = s { Some(*i) } else { None }).collect();
        eps.sort_unstable();
        *out.entry((theta, eps)).or_insert(0) += coeff;
    }
    out.retain(|_, v| *v != 0);
    out
}

#[test]
fn documented_products() {
    let e = |i| EpsPoly::eps(Z, i);
    let th = EpsPoly::theta(Z);
    assert_eq!(&e(1) * &e(1), &th * &e(1));
    assert_eq!(&th * &th, EpsPoly::from_i64(Z, 2));
    assert_eq!(&(&th * &e(1)) * &(&th * &e(2)), (&e(1) * &e(2)).scale(&Z.from_i64(2)));
    let sum = &(&th * &e(1)) + &(&th * &e(1));
    assert_eq!(sum, EpsPoly::monomial(Z, Z.from_i64(2), EpsMonomial::new(true, vec![1])));
    assert!((&(&EpsPoly::one(Z) + &e(1)) - &e(1)).is_one());
}

#[test]
fn documented_exp_values() {
    assert!(exp_map(Z, &[]).is_one());
    assert_eq!(exp_map(Z, &[(1, 2)]), &EpsPoly::one(Z) - &(&EpsPoly::eps(Z, 1) * &EpsPoly::eps(Z, 2)));
    assert!(exp_map(Z, &[(1, 2), (2, 1)]).is_one());
    let one_minus = &EpsPoly::one(Z) - &(&EpsPoly::theta(Z) * &EpsPoly::eps(Z, 1));
    assert_eq!(exp_map(Z, &[(1, 1)]), one_minus);
    assert!((&one_minus * &one_minus).is_one());
}

#[test]
fn renaming_examples() {
    let t = Permutation::transposition(2, 1, 2).unwrap();
    let e12 = &EpsPoly::eps(Z, 1) * &EpsPoly::eps(Z, 2);
    assert_eq!(e12.phi_sigma(&t), e12);
    assert_eq!(EpsPoly::eps(Z, 1).phi_sigma(&t), EpsPoly::eps(Z, 2));
}

#[test]
fn rationals_are_canonical() {
    let q = BaseRing::Rationals;
    let half = q.half().unwrap();
    let two_quarters = q.from_rational(&BigRational::new(BigInt::from(-2), BigInt::from(-4))).unwrap();
    assert_eq!(half, two_quarters);
    if let Scalar::Rat(r) = q.add(&half, &q.from_i64(-1)) {
        assert_eq!(r.denom(), &BigInt::from(2));
        assert_eq!(r.numer(), &BigInt::from(-1));
    } else {
        panic!("rational expected");
    }
}

#[test]
fn mixed_rings_are_rejected() {
    let a = EpsPoly::one(Z);
    let b = EpsPoly::one(BaseRing::Rationals);
    assert!(a.try_add(&b).is_err());
    assert!(a.try_mul(&b).is_err());
}

#[test]
fn modular_scalars_wrap() {
    let m = BaseRing::Modular(5);
    assert!(m.is_zero(&m.from_i64(10)));
    assert_eq!(m.inv(&m.from_i64(2)), Some(m.from_i64(3)));
    assert!(!BaseRing::Modular(6).two_invertible());
    assert!(BaseRing::modular(1).is_err());
}
