use d3lab::boolfn::{make_majority, make_parity, TruthTable};
use d3lab::cnfmin::{min_cnf_size, CostCache, Mode};
use d3lab::coding::{
    average_length_over_permutations, count_bound_check, is_isolated, is_prefix_free, isolated_solutions,
    kraft_sum, ppz_decode_prefix, ppz_encode, width_params, width_reduce_decode, width_reduce_decode_prefix,
    width_reduce_encode,
};
use d3lab::constructions::{
    build_parity_blocks, canonical_parity_cnf, lupanov_depth3, lupanov_formula, parity_depth3, parity_depth3_bound,
};
use d3lab::duality::solve_duality;
use d3lab::extremal::{extremal_t, tau, count_min_hitting_sets, Family, Hypergraph};
use d3lab::formula::{Clause, CnfFormula, Literal};
use d3lab::sample::{planted_cnf, random_function, random_k_cnf, random_permutation};
use d3lab::Rational;
use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rat(p: usize, q: usize) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

#[test]
fn ppz_codes_are_prefix_free_up_to_ten_variables() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for n in 3..=10 {
        for _ in 0..4 {
            let phi = random_k_cnf(&mut rng, n, 3, 4 * n).unwrap();
            let pi = random_permutation(&mut rng, n);
            let sat: Vec<u32> = phi.to_truth_table().unwrap().ones().collect();
            let words: Vec<Vec<bool>> = sat.iter().map(|&x| ppz_encode(x, &phi, &pi).unwrap().bits).collect();
            assert!(is_prefix_free(&words));
            assert!(kraft_sum(&words) <= Rational::one());
            // decoding from a concatenated stream recovers the sequence
            let stream: Vec<bool> = words.iter().flatten().copied().collect();
            let mut pos = 0;
            for &x in &sat {
                let (y, used) = ppz_decode_prefix(&stream[pos..], &phi, &pi).unwrap();
                assert_eq!(y, x);
                pos += used;
            }
            assert_eq!(pos, stream.len());
        }
    }
}

#[test]
fn width_reduced_average_length_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    let mut checked = 0;
    while checked < 12 {
        let n = rng.gen_range(5..=7);
        let x = rng.gen_range(0..1u32 << n);
        // 8 clauses: s = 3, k = 5; the wide clauses have width 7 > k
        let phi = if n == 7 {
            planted_cnf(&mut rng, n, x, (2, 6), (7, 2), 5).unwrap()
        } else {
            planted_cnf(&mut rng, n, x, (2, 8), (n, 0), 0).unwrap()
        };
        if !is_isolated(&phi, x) {
            continue;
        }
        let (_, k) = width_params(&phi);
        let avg = average_length_over_permutations(x, &phi, width_reduce_encode).unwrap();
        // n - n/k + 1
        let bound = rat(n + 1, 1) - rat(n, k);
        assert!(avg <= bound, "avg {avg} > {bound} for {phi}");
        checked += 1;
    }
}

#[test]
fn width_reduced_codes_are_prefix_free() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut nonempty = 0;
    for _ in 0..40 {
        let x = rng.gen_range(0..1u32 << 10);
        let phi = planted_cnf(&mut rng, 10, x, (3, 50), (10, 6), 8).unwrap();
        let iso = isolated_solutions(&phi).unwrap();
        let pi = random_permutation(&mut rng, 10);
        let words: Vec<Vec<bool>> = iso
            .points
            .iter()
            .map(|&y| width_reduce_encode(y, &phi, &pi).unwrap().bits)
            .collect();
        assert!(is_prefix_free(&words));
        assert!(kraft_sum(&words) <= Rational::one());
        for (w, &y) in words.iter().zip(&iso.points) {
            assert_eq!(width_reduce_decode(w, &phi, &pi).unwrap(), y);
            // a proper prefix runs out of bits
            if !w.is_empty() {
                assert!(width_reduce_decode_prefix(&w[..w.len() - 1], &phi, &pi).is_err());
            }
        }
        nonempty += usize::from(!iso.is_empty());
    }
    assert!(nonempty >= 10);
}

#[test]
fn single_wide_clause_count() {
    // one clause of width n: every satisfying point has a satisfied
    // neighbour, so nothing is isolated for n ≥ 2
    for n in 2..=8 {
        let phi = CnfFormula::new(n, vec![Clause::new((0..n).map(Literal::pos)).unwrap()]).unwrap();
        let r = count_bound_check(&phi).unwrap();
        assert_eq!(r.count, 0);
        assert!(r.ok());
    }
}

#[test]
fn canonical_parity_cnf_is_optimal_for_small_n() {
    for n in 1..=4 {
        assert_eq!(min_cnf_size(&make_parity(n).unwrap()).unwrap().size, canonical_parity_cnf(n).unwrap().size());
    }
}

#[test]
fn block_approximator_counts() {
    for n in 1..=16 {
        for k in 1..=n.min(4) {
            let r = build_parity_blocks(n, k).unwrap();
            assert!(r.ok(), "n={n} k'={k}: {:?}", r.verdicts);
            assert_eq!(r.formula.to_truth_table().unwrap().ones_count(), 1 << (n - k));
        }
    }
}

#[test]
fn parity_depth3_with_square_root_blocks() {
    for n in [4usize, 9, 16] {
        let k = (n as f64).sqrt().ceil() as usize;
        let phi = parity_depth3(n, k).unwrap();
        assert_eq!(phi.to_truth_table().unwrap(), make_parity(n).unwrap());
        assert!(Rational::from_integer(BigInt::from(phi.size())) <= parity_depth3_bound(n, k));
    }
}

#[test]
fn lupanov_fuzz_with_and_without_pruning() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for n in [6, 7, 9] {
        for _ in 0..10 {
            let f = random_function(&mut rng, n).unwrap();
            let full = lupanov_depth3(&f, false).unwrap();
            assert!(full.ok(), "{:?}", full.verdicts);
            let pruned = lupanov_formula(&f, true).unwrap();
            assert_eq!(pruned.to_truth_table().unwrap(), f);
            assert!(pruned.size() <= full.size);
        }
    }
    // sparse functions leave some disjuncts empty
    let sparse = TruthTable::from_points(6, [5]).unwrap();
    assert!(lupanov_formula(&sparse, true).unwrap().size() < lupanov_formula(&sparse, false).unwrap().size());
}

#[test]
fn hitting_sets_are_accepted_inputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..200 {
        let n = rng.gen_range(1..=5);
        let edges: Vec<u32> = (0..rng.gen_range(1..=6)).map(|_| rng.gen_range(1..1u32 << n)).collect();
        let h = Hypergraph::new(n, edges).unwrap();
        let phi = h.to_monotone_cnf().unwrap();
        for s in 0..1u32 << n {
            assert_eq!(phi.eval(h.set_to_point(s)), h.hits(s));
        }
        assert_eq!(Hypergraph::from_monotone_cnf(&phi).unwrap(), h);
    }
}

#[test]
fn adding_superset_edges_is_lossless() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for _ in 0..200 {
        let n = rng.gen_range(2..=6);
        let base = Hypergraph::new(n, (0..rng.gen_range(1..=4)).map(|_| rng.gen_range(1..1u32 << n)))
            .unwrap()
            .antichain_normal_form();
        let e = base.edges()[rng.gen_range(0..base.len())];
        let superset = e | rng.gen_range(0..1u32 << n);
        let grown = Hypergraph::new(n, base.edges().iter().copied().chain([superset])).unwrap();
        assert_eq!(tau(&grown), tau(&base));
        assert_eq!(count_min_hitting_sets(&grown), count_min_hitting_sets(&base));
        let (tb, tg) = (count_min_hitting_sets(&base), count_min_hitting_sets(&grown));
        assert!(tg * base.len() as u64 <= tb * grown.len() as u64);
    }
}

#[test]
fn hypergraph_extremal_matches_majority_duality() {
    let cache = CostCache::in_memory();
    let r = extremal_t(3, 2, Family::Hypergraphs).unwrap();
    let d = solve_duality(&make_majority(3).unwrap(), Mode::Monotone, &cache).unwrap();
    // T(3,2) = C(3,2) / s*
    assert_eq!(r.ratio.unwrap(), Rational::from_integer(BigInt::from(3)) / d.s_star);
}

#[test]
fn graph_extremal_is_at_most_hypergraph_extremal() {
    for n in 2..=5 {
        for t in 1..n {
            let g = extremal_t(n, t, Family::Graphs).unwrap();
            let h = extremal_t(n, t, Family::Hypergraphs).unwrap();
            if let Some(gr) = g.ratio {
                assert!(gr <= h.ratio.clone().unwrap(), "n={n} tau={t}");
            }
        }
    }
}
