use gengrass::sample;
use gengrass::supertrace::{
    axiom_polys, cyclic_equalities, derived_consequences, eval_trace_poly, is_trace_identity,
    key_basis, key_coordinates, key_monomials, key_rank, model_image, standard_terms, trace_normalize,
    witness_search, BasisTerm, ModelKey,
    SuperTraceContext, TracePoly,
};
use gengrass::BaseRing;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const Z: BaseRing = BaseRing::Integers;

fn permutations(items: &[u32]) -> Vec<Vec<u32>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head);
            out.push(p);
        }
    }
    out
}

// Sets of canonical cycles covering `items`.
fn cycle_sets(items: &[u32]) -> Vec<Vec<Vec<u32>>> {
    let Some((&first, rest)) = items.split_first() else {
        return vec![vec![]];
    };
    let mut out = Vec::new();
    for mask in 0u32..(1 << rest.len()) {
        let inside: Vec<u32> = (0..rest.len()).filter(|b| mask >> b & 1 == 1).map(|b| rest[b]).collect();
        let outside: Vec<u32> = (0..rest.len()).filter(|b| mask >> b & 1 == 0).map(|b| rest[b]).collect();
        for tail in permutations(&inside) {
            let mut cyc = vec![first];
            cyc.extend(tail);
            for mut others in cycle_sets(&outside) {
                others.push(cyc.clone());
                others.sort();
                out.push(others);
            }
        }
    }
    out
}

fn all_keys(n: u32) -> Vec<ModelKey> {
    let letters: Vec<u32> = (1..=n).collect();
    let mut keys = Vec::new();
    for mask in 0u32..(1 << n) {
        let path_set: Vec<u32> = letters.iter().copied().filter(|i| mask >> (i - 1) & 1 == 1).collect();
        let rest: Vec<u32> = letters.iter().copied().filter(|i| mask >> (i - 1) & 1 == 0).collect();
        for path in permutations(&path_set) {
            for cycles in cycle_sets(&rest) {
                keys.push(ModelKey { path: path.clone(), cycles });
            }
        }
    }
    keys
}

#[test]
fn standard_terms_are_independent_for_up_to_four_letters() {
    for n in 1..=4 {
        for key in all_keys(n) {
            let (count, rank) = key_rank(&key).unwrap();
            assert_eq!(count, rank, "key {key:?}");
            for t in standard_terms(&key) {
                t.conformance().unwrap();
            }
        }
    }
}

#[test]
fn every_sampled_monomial_has_integral_coordinates() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..1500 {
        let n = rand::Rng::gen_range(&mut rng, 1..=4u32);
        let letters: Vec<u32> = (1..=n).collect();
        let t = sample::trace_term(&mut rng, &letters, 2);
        let f = sample::term_poly(Z, t);
        let nf = trace_normalize(&f).unwrap();
        nf.conformance().unwrap();
        assert_eq!(model_image(&nf.to_trace_poly()).unwrap(), model_image(&f).unwrap());
    }
}

#[test]
fn axioms_and_consequences_vanish() {
    for (name, f) in axiom_polys(Z).into_iter().chain(derived_consequences(Z)) {
        assert!(is_trace_identity(&f).unwrap(), "{name}");
    }
}

#[test]
fn random_axiom_consequences_vanish() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..60 {
        let f = sample::trace_consequence(&mut rng, Z, 2);
        assert!(is_trace_identity(&f).unwrap(), "{f}");
    }
}

#[test]
fn normalization_is_idempotent() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let f = random_poly(&mut rng, 4);
        let once = trace_normalize(&f).unwrap();
        let twice = trace_normalize(&once.to_trace_poly()).unwrap();
        assert_eq!(once, twice);
    }
}

fn random_poly(rng: &mut ChaCha8Rng, n: u32) -> TracePoly {
    let letters: Vec<u32> = (1..=n).collect();
    let mut f = TracePoly::zero(Z);
    for _ in 0..3 {
        let t = sample::trace_term(rng, &letters, 2);
        f = f.add(&sample::term_poly(Z, t).scale(&sample::nonzero_scalar(rng, Z, 3)));
    }
    f
}

#[test]
fn normal_form_agrees_under_matrix_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for size in [2usize, 3] {
        let ctx = SuperTraceContext { size };
        for _ in 0..40 {
            let f = random_poly(&mut rng, 3);
            let g = trace_normalize(&f).unwrap().to_trace_poly();
            let subs: Vec<_> = (0..3).map(|_| sample::grass_matrix(&mut rng, Z, size, 3)).collect();
            assert_eq!(
                eval_trace_poly(&f, &ctx, &subs).unwrap(),
                eval_trace_poly(&g, &ctx, &subs).unwrap()
            );
        }
    }
}

#[test]
fn estr_is_an_s_trace_on_homogeneous_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ctx = SuperTraceContext { size: 2 };
    let f = |i| TracePoly::letter(Z, i).trace();
    let x = |i| TracePoly::letter(Z, i);
    for (_, ax) in axiom_polys(Z) {
        for _ in 0..20 {
            let subs: Vec<_> = (0..3).map(|_| sample::grass_matrix(&mut rng, Z, 2, 3)).collect();
            assert!(eval_trace_poly(&ax, &ctx, &subs).unwrap().is_zero());
        }
    }
    let swallow = f(1).mul(&f(2)).sub(&x(1).mul(&f(2)).trace());
    let subs: Vec<_> = (0..2).map(|_| sample::grass_matrix(&mut rng, Z, 2, 3)).collect();
    assert!(eval_trace_poly(&swallow, &ctx, &subs).unwrap().is_zero());
}

#[test]
fn cyclic_equalities_vanish() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 1..=4 {
        for m in 0..=(4 - n) {
            for eq in cyclic_equalities(Z, n, m) {
                assert!(eq.is_zero());
                let ctx = SuperTraceContext { size: 2 };
                let subs: Vec<_> = (0..n + m).map(|_| sample::grass_matrix(&mut rng, Z, 2, 3)).collect();
                assert!(eval_trace_poly(&eq.trace(), &ctx, &subs).unwrap().is_zero());
            }
        }
    }
}

#[test]
fn witnesses_exist_for_non_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut found = 0;
    for _ in 0..40 {
        let f = random_poly(&mut rng, 3);
        if is_trace_identity(&f).unwrap() {
            assert!(witness_search(&f, 8).unwrap().is_none());
            continue;
        }
        let w = witness_search(&f, 8).unwrap().expect("schema witness");
        let ctx = SuperTraceContext { size: w.size };
        assert_eq!(eval_trace_poly(&f, &ctx, &w.subs).unwrap(), w.value);
        assert!(!w.value.is_zero());
        found += 1;
    }
    assert!(found > 0);
}

#[test]
fn non_identity_examples() {
    let x = |i| TracePoly::letter(Z, i);
    let f = x(1).trace().mul(&x(2)).sub(&x(2).mul(&x(1).trace()));
    assert!(!is_trace_identity(&f).unwrap());
    let w = witness_search(&f, 4).unwrap().unwrap();
    assert!(!w.value.is_zero());
    let g = x(1).mul(&x(2)).sub(&x(2).mul(&x(1)));
    assert!(witness_search(&g, 3).unwrap().is_some());
}

#[test]
fn every_monomial_of_small_keys_has_integral_coordinates() {
    for n in 1..=4 {
        for key in all_keys(n) {
            let basis = key_basis(&key).unwrap();
            for b in &basis {
                b.conformance().unwrap();
            }
            for t in key_monomials(&key) {
                let z = key_coordinates(&key, &t).unwrap();
                let mut g = TracePoly::zero(Z);
                for (b, zi) in basis.iter().zip(&z) {
                    g = g.add(&b.to_trace_poly(Z).scale(&Z.from_bigint(zi)));
                }
                let f = sample::term_poly(Z, t.clone());
                assert_eq!(model_image(&g).unwrap(), model_image(&f).unwrap(), "{}", t.render());
            }
        }
    }
}

#[test]
fn nested_example_is_outside_the_classical_span() {
    let x = |i| TracePoly::letter(Z, i);
    let f = x(2).mul(&x(1).trace()).mul(&x(3)).trace();
    let nf = trace_normalize(&f).unwrap();
    assert!(nf.terms().any(|(t, _)| matches!(t, BasisTerm::Nested(_))), "{nf}");
}

#[test]
fn model_pairs_are_reading_order_inversions() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..500 {
        let n = rand::Rng::gen_range(&mut rng, 1..=5u32);
        let letters: Vec<u32> = (1..=n).collect();
        let t = sample::trace_term(&mut rng, &letters, 2);
        let (key, pairs) = gengrass::supertrace::model_monomial(&t).unwrap();
        let mut canon = key.path.clone();
        canon.extend(key.cycles.iter().flatten());
        let rank = |x: u32| canon.iter().position(|&y| y == x).unwrap();
        let read = t.letters();
        let mut inv = Vec::new();
        for i in 0..read.len() {
            for j in i + 1..read.len() {
                if rank(read[i]) > rank(read[j]) {
                    inv.push((read[i].min(read[j]), read[i].max(read[j])));
                }
            }
        }
        inv.sort_unstable();
        let mut got: Vec<(u32, u32)> = pairs.pairs().copied().collect();
        got.sort_unstable();
        assert_eq!(got, inv, "{}", t.render());
    }
}
