use gengrass::grassmann::{
    eps_image, eps_of_grade, esgn, eta_endomorphism, permute_words, quotient_mod_theta, reorder_product,
};
use gengrass::{sample, BaseRing, EpsMonomial, EpsPoly, GrassElem, Grade, PairSet, SElem, SGen, SWord, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const Z: BaseRing = BaseRing::Integers;

fn e(i: u32) -> GrassElem {
    GrassElem::generator(Z, i)
}

fn eps(i: u32) -> EpsPoly {
    EpsPoly::eps(Z, i)
}

fn word_elem(letters: &[u32]) -> GrassElem {
    GrassElem::from_term(EpsPoly::one(Z), Word::from_letters(letters))
}

// Kill rule written out directly over ℤ.
fn oracle_kill(c: &EpsPoly, squared: &[u32]) -> EpsPoly {
    let mut out = EpsPoly::zero(Z);
    for (m, v) in c.terms() {
        let touches = m.eps().iter().any(|i| squared.contains(i));
        let v = Z.to_bigint(v).unwrap();
        let v = if !touches {
            v
        } else if m.has_theta() {
            continue;
        } else {
            ((v % 2) + 2) % 2
        };
        out = &out + &EpsPoly::monomial(Z, Z.from_bigint(&v), m.clone());
    }
    out
}

// Product of raw letter sequences by adjacent transpositions.
fn oracle_product(terms_a: &[(EpsPoly, Vec<u32>)], terms_b: &[(EpsPoly, Vec<u32>)]) -> Vec<(Vec<u32>, EpsPoly)> {
    let mut acc: std::collections::BTreeMap<Vec<u32>, EpsPoly> = Default::default();
    for (ca, a) in terms_a {
        for (cb, b) in terms_b {
            let mut seq: Vec<u32> = a.iter().chain(b).copied().collect();
            let mut c = ca * cb;
            let mut swapped = true;
            while swapped {
                swapped = false;
                for k in 0..seq.len().saturating_sub(1) {
                    if seq[k] > seq[k + 1] {
                        c = &c * &(&EpsPoly::one(Z) - &(&eps(seq[k]) * &eps(seq[k + 1])));
                        seq.swap(k, k + 1);
                        swapped = true;
                    }
                }
            }
            let entry = acc.entry(seq).or_insert_with(|| EpsPoly::zero(Z));
            *entry = &*entry + &c;
        }
    }
    acc.into_iter()
        .map(|(seq, c)| {
            let mut squared: Vec<u32> = seq.windows(2).filter(|w| w[0] == w[1]).map(|w| w[0]).collect();
            squared.dedup();
            let c = oracle_kill(&c, &squared);
            (seq, c)
        })
        .filter(|(_, c)| !c.is_zero())
        .collect()
}

fn raw_terms(x: &GrassElem) -> Vec<(EpsPoly, Vec<u32>)> {
    x.terms().map(|(w, c)| (c.clone(), w.letters())).collect()
}

#[test]
fn product_matches_transposition_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..300 {
        let plain = rng.gen_bool(0.5);
        let a = sample::grass(&mut rng, Z, 4, 3, 3, plain);
        let b = sample::grass(&mut rng, Z, 4, 3, 3, plain);
        let expected: Vec<(Vec<u32>, EpsPoly)> = oracle_product(&raw_terms(&a), &raw_terms(&b));
        let mut got: Vec<(Vec<u32>, EpsPoly)> = (&a * &b).terms().map(|(w, c)| (w.letters(), c.clone())).collect();
        got.sort_by(|x, y| x.0.cmp(&y.0));
        assert_eq!(got, expected, "{a} * {b}");
    }
}

#[test]
fn documented_products() {
    let e12 = &eps(1) * &eps(2);
    let one_minus = &EpsPoly::one(Z) - &e12;
    assert_eq!(&e(2) * &e(1), word_elem(&[1, 2]).scale_eps(&one_minus));
    let sq = GrassElem::from_term(EpsPoly::monomial(Z, Z.one(), EpsMonomial::new(true, vec![1])), Word::letter(1));
    assert!((&sq * &e(1)).is_zero());
    let x = sample::grass(&mut ChaCha8Rng::seed_from_u64(2), Z, 3, 2, 3, false);
    assert_eq!(&GrassElem::one(Z) * &x, x);
    assert_eq!(e(1).commutator(&e(2)), word_elem(&[1, 2]).scale_eps(&e12));
    assert!(e(1).commutator(&e(2).commutator(&e(3))).is_zero());
}

#[test]
fn monomials_supercommute() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let u = word_elem(&sample::word(&mut rng, 4, 3).letters());
        let v = word_elem(&sample::word(&mut rng, 4, 3).letters());
        assert!(u.scommutator(&v).is_zero(), "{u} {v}");
    }
}

fn triple(rng: &mut ChaCha8Rng) -> [GrassElem; 3] {
    [0, 1, 2].map(|_| sample::grass(rng, Z, 4, 3, 3, true))
}

#[test]
fn grassmann_identity_and_consequences() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..200 {
        let [x, y, z] = triple(&mut rng);
        assert!(x.commutator(&y.commutator(&z)).is_zero());
        let [u, v, _] = triple(&mut rng);
        let lhs = &(&x.commutator(&u) * &v.commutator(&z)) + &(&x.commutator(&v) * &u.commutator(&z));
        assert!(lhs.is_zero());
        assert!((&x.commutator(&y) * &y.commutator(&z)).is_zero());
    }
}

#[test]
fn squares_are_central() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let j = rng.gen_range(1..=4);
        let sq = word_elem(&[j, j]);
        let x = sample::grass(&mut rng, Z, 4, 3, 3, false);
        assert_eq!(&sq * &x, &x * &sq);
    }
}

#[test]
fn monomial_exchange() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..200 {
        let (a, b) = (sample::word(&mut rng, 4, 3), sample::word(&mut rng, 4, 3));
        let mut p = PairSet::new();
        p.add_product(&a.letters(), &b.letters());
        let (u, w) = (word_elem(&a.letters()), word_elem(&b.letters()));
        assert_eq!(&u * &w, (&w * &u).scale_eps(&p.exp(Z)));
    }
}

fn random_words(rng: &mut ChaCha8Rng, n: usize) -> Vec<Word> {
    (0..n).map(|_| sample::word(rng, 5, 2)).collect()
}

#[test]
fn sign_cocycle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..500 {
        let n = rng.gen_range(1..=6);
        let w = random_words(&mut rng, n);
        let s = sample::permutation(&mut rng, n);
        let t = sample::permutation(&mut rng, n);
        let lhs = esgn(Z, &w, &s.compose(&t)).unwrap();
        let rhs = &esgn(Z, &w, &s).unwrap() * &esgn(Z, &permute_words(&w, &s), &t).unwrap();
        assert_eq!(lhs, rhs);
        assert!((&lhs * &lhs).is_one());
        let gens: Vec<Word> = (1..=n as u32).map(Word::letter).collect();
        let lhs = esgn(Z, &gens, &s.compose(&t)).unwrap();
        let rhs = &esgn(Z, &gens, &s).unwrap() * &esgn(Z, &gens, &t).unwrap().phi_sigma(&s);
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn reordering_matches_signs() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let n = rng.gen_range(1..=4);
        let w = random_words(&mut rng, n);
        let s = sample::permutation(&mut rng, n);
        reorder_product(Z, &w, &s).unwrap();
    }
    let w = vec![Word::from_letters(&[1, 2]), Word::letter(3)];
    let t = gengrass::Permutation::transposition(2, 1, 2).unwrap();
    let got = reorder_product(Z, &w, &t).unwrap();
    let expected = word_elem(&[1, 2, 3]).scale_eps(&gengrass::exp_map(Z, &[(1, 3), (2, 3)]));
    assert_eq!(got, expected);
}

#[test]
fn documented_signs() {
    let gens: Vec<Word> = (1..=3).map(Word::letter).collect();
    let p = |c: &[&[usize]]| gengrass::Permutation::from_cycles(3, c).unwrap();
    assert!(esgn(Z, &gens, &p(&[])).unwrap().is_one());
    assert_eq!(esgn(Z, &gens, &p(&[&[1, 2]])).unwrap().render(), "1 - eps1*eps2");
    let e13 = esgn(Z, &gens, &p(&[&[1, 3]])).unwrap();
    let expected = &(&(&(&EpsPoly::one(Z) - &(&eps(1) * &eps(2))) - &(&eps(2) * &eps(3))) - &(&eps(1) * &eps(3)))
        + &(&EpsPoly::theta(Z) * &(&(&eps(1) * &eps(2)) * &eps(3)));
    assert_eq!(e13, expected);
}

#[test]
fn grades() {
    assert_eq!(eps_of_grade(&Word::from_letters(&[1, 2]).grade()), vec![1, 2]);
    assert!(eps_of_grade(&Word::from_letters(&[1, 1]).grade()).is_empty());
    assert_eq!(eps_of_grade(&Word::from_letters(&[1, 2, 2, 3]).grade()), vec![1, 3]);
}

#[test]
fn eta_is_a_homomorphism() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..60 {
        let targets = random_words(&mut rng, 3);
        let x = sample::grass(&mut rng, Z, 3, 2, 3, false);
        let y = sample::grass(&mut rng, Z, 3, 2, 3, false);
        let eta = |v: &GrassElem| eta_endomorphism(&targets, v).unwrap();
        assert_eq!(eta(&(&x * &y)), &eta(&x) * &eta(&y));
        assert_eq!(eta(&(&x + &y)), &eta(&x) + &eta(&y));
    }
}

#[test]
fn eta_examples() {
    let id: Vec<Word> = (1..=3).map(Word::letter).collect();
    assert_eq!(eta_endomorphism(&id, &e(1)).unwrap(), e(1));
    let t = vec![Word::from_letters(&[2, 3]), Word::letter(2), Word::letter(3)];
    let x = GrassElem::scalar(eps(1));
    let expected = &(&eps(2) + &eps(3)) - &(&EpsPoly::theta(Z) * &(&eps(2) * &eps(3)));
    assert_eq!(eta_endomorphism(&t, &x).unwrap(), GrassElem::scalar(expected.clone()));
    assert_eq!(eps_image(Z, &Word::from_letters(&[2, 3])), expected);
    assert!(eta_endomorphism(&id, &e(5)).is_err());
}

#[test]
fn oplus_keeps_the_square_relation() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..50 {
        let a = eps_image(Z, &sample::word(&mut rng, 4, 3));
        let b = eps_image(Z, &sample::word(&mut rng, 4, 3));
        for v in [&a, &b] {
            assert_eq!(v * v, &EpsPoly::theta(Z) * v);
        }
        let s = a.oplus(&b);
        assert_eq!(&s * &s, &EpsPoly::theta(Z) * &s);
    }
}

fn random_selem(rng: &mut ChaCha8Rng) -> SElem {
    let mut x = SElem::zero(Z);
    for _ in 0..rng.gen_range(1..=3) {
        let mut t = SElem::from_term(sample::eps_poly(rng, Z, 3, 2), SWord::one());
        for _ in 0..rng.gen_range(0..=3) {
            let g = SGen::new(sample::grade(rng, 3), rng.gen_range(1..=2));
            t = &t * &SElem::generator(Z, g);
        }
        x = &x + &t;
    }
    x
}

#[test]
fn free_s_commutative_algebra() {
    let g = SGen::new(Grade::from_indices([1]), 1);
    let h = SGen::new(Grade::from_indices([2]), 2);
    let (a, b) = (SElem::generator(Z, g.clone()), SElem::generator(Z, h.clone()));
    let ab = &a * &b;
    assert_eq!(&b * &a, ab.scale_eps(&gengrass::exp_map(Z, &[(1, 2)])));
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let (x, y, z) = (random_selem(&mut rng), random_selem(&mut rng), random_selem(&mut rng));
        assert!(x.scommutator(&y).is_zero());
        assert_eq!(&(&x * &y) * &z, &x * &(&y * &z));
        assert_eq!(&SElem::one(Z) * &x, x);
    }
}

#[test]
fn mod_theta_quotient_satisfies_the_extended_relations() {
    let f2 = BaseRing::Modular(2);
    for i in 1..=4 {
        let ei = GrassElem::generator(Z, i);
        let sq = quotient_mod_theta(&GrassElem::scalar(&eps(i) * &eps(i))).unwrap();
        assert!(sq.is_zero());
        for j in 1..=4 {
            let ej = GrassElem::generator(Z, j);
            let lhs = quotient_mod_theta(&ei.commutator(&ej)).unwrap();
            let rhs = quotient_mod_theta(&(&ei * &ej).scale_eps(&(&eps(i) * &eps(j)))).unwrap();
            assert_eq!(lhs, rhs);
            assert_eq!(lhs.ring(), f2);
        }
    }
    let x = GrassElem::from_term(EpsPoly::monomial(Z, Z.one(), EpsMonomial::new(true, vec![1])), Word::letter(1));
    assert!(quotient_mod_theta(&x).unwrap().is_zero());
}

#[test]
fn truncated_mode_drops_squares() {
    let a = e(1).with_truncated(true);
    assert!((&a * &a).is_zero());
    assert!(e(1).try_mul(&a).is_err());
}
