use d3lab::boolfn::{
    coordinate_permutation_generators, even_negation_generators, make_parity, InputPermutation, Slice, TruthTable,
};
use d3lab::formula::{restrict_formula, Clause, CnfFormula, DepthThreeFormula, Literal};
use d3lab::io::{parse_d3f, parse_dimacs, parse_truth_table, write_d3f, write_dimacs, write_truth_table};
use num_rational::Ratio;
use proptest::prelude::*;

fn table(n: usize) -> impl Strategy<Value = TruthTable> {
    let words = 1usize << n.saturating_sub(6);
    prop::collection::vec(any::<u64>(), words).prop_map(move |w| TruthTable::from_words(n, &w).unwrap())
}

fn input_permutation(n: usize) -> impl Strategy<Value = InputPermutation> {
    (Just((0..n).collect::<Vec<_>>()).prop_shuffle(), prop::collection::vec(any::<bool>(), n))
        .prop_map(|(sigma, negate)| InputPermutation::new(sigma, negate).unwrap())
}

fn clause(n: usize) -> impl Strategy<Value = Clause> {
    prop::collection::btree_map(0..n, any::<bool>(), 0..=n)
        .prop_map(|lits| Clause::new(lits.into_iter().map(|(v, b)| Literal::with_exponent(v, b))).unwrap())
}

fn cnf(n: usize, max_clauses: usize) -> impl Strategy<Value = CnfFormula> {
    prop::collection::vec(clause(n), 0..=max_clauses).prop_map(move |cs| CnfFormula::new(n, cs).unwrap())
}

proptest! {
    #[test]
    fn permutation_then_inverse_is_identity((f, pi) in (1usize..=8).prop_flat_map(|n| (table(n), input_permutation(n)))) {
        let back = f.apply_permutation(&pi).unwrap().apply_permutation(&pi.inverse()).unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn restriction_splits_evaluation(
        (phi, x, fixed) in (1usize..=12).prop_flat_map(|n| (cnf(n, 10), 0u32..1 << n, prop::collection::vec(any::<bool>(), n)))
    ) {
        let n = phi.n();
        let assignment: Vec<(usize, bool)> = (0..n)
            .filter(|&v| fixed[v])
            .map(|v| (v, d3lab::boolfn::var_value(n, x, v)))
            .collect();
        let restricted = restrict_formula(&phi, &assignment).unwrap();
        prop_assert_eq!(restricted.eval(x), phi.eval(x));
        // the restricted formula no longer mentions fixed variables
        for c in restricted.clauses() {
            prop_assert!(assignment.iter().all(|&(v, _)| !c.contains_var(v)));
        }
    }

    #[test]
    fn truth_table_matches_eval(phi in (1usize..=10).prop_flat_map(|n| cnf(n, 12))) {
        let t = phi.to_truth_table().unwrap();
        for x in 0..1u32 << phi.n() {
            prop_assert_eq!(t.get(x), phi.eval(x));
        }
    }

    #[test]
    fn depth3_size_ignores_order(parts in prop::collection::vec(cnf(4, 5), 0..5)) {
        let phi = DepthThreeFormula::new(4, parts.clone()).unwrap();
        let mut reversed = parts.clone();
        reversed.reverse();
        let psi = DepthThreeFormula::new(4, reversed).unwrap();
        prop_assert_eq!(phi.size(), parts.iter().map(CnfFormula::size).sum::<usize>());
        prop_assert_eq!(phi.size(), psi.size());
        prop_assert_eq!(phi.to_truth_table().unwrap(), psi.to_truth_table().unwrap());
    }

    #[test]
    fn file_formats_roundtrip(phi in (1usize..=7).prop_flat_map(|n| cnf(n, 8)), t in (0usize..=9).prop_flat_map(table)) {
        prop_assert_eq!(parse_dimacs(&write_dimacs(&phi)).unwrap(), phi.clone());
        let d3 = DepthThreeFormula::new(phi.n(), vec![phi.clone(), phi]).unwrap();
        prop_assert_eq!(parse_d3f(&write_d3f(&d3)).unwrap(), d3);
        prop_assert_eq!(parse_truth_table(&write_truth_table(&t)).unwrap(), t);
    }
}

#[test]
fn parity_is_invariant_under_its_symmetries() {
    for n in 1..=4 {
        let p = make_parity(n).unwrap();
        for g in even_negation_generators(n).iter().chain(&coordinate_permutation_generators(n)) {
            assert_eq!(p.apply_permutation(g).unwrap(), p);
        }
        // odd negations flip parity
        let flip = InputPermutation::negation(n, &[0]).unwrap();
        assert_eq!(p.apply_permutation(&flip).unwrap(), p.complement());
    }
}

/// Monotone functions on `n` variables, built as pairs `f0 ≤ f1` of
/// monotone functions on `n - 1` variables (`f0` where `x_1 = 0`).
fn monotone_functions(n: usize) -> Vec<TruthTable> {
    if n == 0 {
        return vec![TruthTable::constant(0, false).unwrap(), TruthTable::constant(0, true).unwrap()];
    }
    let smaller = monotone_functions(n - 1);
    let half = 1u32 << (n - 1);
    let mut out = Vec::new();
    for f0 in &smaller {
        for f1 in &smaller {
            if f0.implies(f1).unwrap() {
                out.push(TruthTable::from_fn(n, |x| if x & half == 0 { f0.get(x) } else { f1.get(x ^ half) }).unwrap());
            }
        }
    }
    out
}

#[test]
fn monotone_enumeration_matches_dedekind_numbers() {
    let counts: Vec<usize> = (0..=5).map(|n| monotone_functions(n).len()).collect();
    assert_eq!(counts, vec![2, 3, 6, 20, 168, 7581]);
    assert!(monotone_functions(4).iter().all(TruthTable::is_monotone));
}

#[test]
fn monotone_acceptance_grows_with_the_slice() {
    for n in 1..=5 {
        let slices: Vec<Slice> = (0..=n).map(|k| Slice::new(n, k).unwrap()).collect();
        for f in monotone_functions(n) {
            let fraction = |s: &Slice| Ratio::new(s.points().filter(|&x| f.get(x)).count() as u64, s.size());
            for k in 0..n {
                assert!(fraction(&slices[k]) <= fraction(&slices[k + 1]), "n={n} k={k} {f:?}");
            }
        }
    }
}
