//! Seeded random instances for fuzz campaigns.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boolfn::TruthTable;
use crate::error::{check_range, Result};
use crate::formula::{Clause, CnfFormula, Literal};

fn random_clause(rng: &mut impl Rng, n: usize, width: usize) -> Clause {
    Clause::new(
        sample(rng, n, width)
            .into_iter()
            .map(|v| Literal::with_exponent(v, rng.gen())),
    )
    .expect("distinct variables")
}

/// `m` clauses of exactly `k` distinct variables with random signs.
pub fn random_k_cnf(rng: &mut impl Rng, n: usize, k: usize, m: usize) -> Result<CnfFormula> {
    check_range("k", k, 1, n)?;
    let clauses = (0..m).map(|_| random_clause(rng, n, k)).collect();
    CnfFormula::new(n, clauses)
}

/// `m` clauses whose widths are drawn uniformly from `widths`.
pub fn random_cnf(rng: &mut impl Rng, n: usize, widths: &[usize], m: usize) -> Result<CnfFormula> {
    for &w in widths {
        check_range("width", w, 1, n)?;
    }
    let clauses = (0..m)
        .map(|_| {
            let w = widths[rng.gen_range(0..widths.len())];
            random_clause(rng, n, w)
        })
        .collect();
    CnfFormula::new(n, clauses)
}

/// A uniformly random function on `n` variables.
pub fn random_function(rng: &mut impl Rng, n: usize) -> Result<TruthTable> {
    let words: Vec<u64> = (0..1usize << n.saturating_sub(6)).map(|_| rng.gen()).collect();
    TruthTable::from_words(n, &words)
}

/// A uniformly random non-constant function with at most `max_ones`
/// ones, by rejection.
pub fn random_function_with_max_ones(rng: &mut impl Rng, n: usize, max_ones: usize) -> Result<TruthTable> {
    loop {
        let f = random_function(rng, n)?;
        if f.is_constant().is_none() && f.ones_count() <= max_ones {
            return Ok(f);
        }
    }
}

/// A uniformly random order of `0..n`.
pub fn random_permutation(rng: &mut impl Rng, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut pi: Vec<usize> = (0..n).collect();
    pi.shuffle(rng);
    pi
}

/// The identity order followed by `count - 1` random orders from `seed`.
pub fn seeded_permutations(seed: u64, n: usize, count: usize) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![(0..n).collect::<Vec<_>>()];
    while out.len() < count {
        out.push(random_permutation(&mut rng, n));
    }
    out
}

/// A CNF satisfied by the planted assignment `x` (a cube index):
/// `short.1` random clauses of width `short.0` true at `x`, and `wide.1`
/// clauses of width `wide.0` whose first `cut` literals are false at `x`
/// and whose remaining literals include at least one true at `x`.
pub fn planted_cnf(
    rng: &mut impl Rng,
    n: usize,
    x: u32,
    short: (usize, usize),
    wide: (usize, usize),
    cut: usize,
) -> Result<CnfFormula> {
    check_range("short width", short.0, 1, n)?;
    check_range("wide width", wide.0, 1, n)?;
    check_range("cut", cut, 0, wide.0 - 1)?;
    let mut clauses = Vec::with_capacity(short.1 + wide.1);
    while clauses.len() < short.1 {
        let c = random_clause(rng, n, short.0);
        if c.eval(n, x) {
            clauses.push(c);
        }
    }
    for _ in 0..wide.1 {
        let mut vars: Vec<usize> = sample(rng, n, wide.0).into_iter().collect();
        vars.sort_unstable();
        let value = |v: usize| crate::boolfn::var_value(n, x, v);
        let lits: Vec<Literal> = loop {
            let tail: Vec<bool> = (cut..wide.0).map(|_| rng.gen()).collect();
            if tail.iter().zip(&vars[cut..]).any(|(&b, &v)| b == value(v)) {
                break vars[..cut]
                    .iter()
                    .map(|&v| Literal::with_exponent(v, !value(v)))
                    .chain(vars[cut..].iter().zip(&tail).map(|(&v, &b)| Literal::with_exponent(v, b)))
                    .collect();
            }
        };
        clauses.push(Clause::new(lits)?);
    }
    CnfFormula::new(n, clauses)
}
