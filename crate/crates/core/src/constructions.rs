//! Explicit formula builders: parity CNFs, one-sided block approximators of
//! parity, block depth-3 parity, and the sphere-cover depth-3 formula for an
//! arbitrary function.
//!
//! Every `build_*` function checks its output exhaustively and returns a
//! [`ConstructionReport`] carrying the formula and the verdicts.

use num_bigint::BigInt;
use serde::Serialize;

use crate::boolfn::{make_parity, var_bit, var_value, TruthTable};
use crate::cnfmin::{CostCache, Mode};
use crate::coding::one_sided_parity_tradeoff;
use crate::duality::{build_cover_instance, Distribution, SubsetId};
use crate::error::{check_range, Error, Result};
use crate::formula::{Clause, CnfFormula, DepthThreeFormula, Literal};
use crate::io::{write_d3f, write_dimacs};
use crate::report::{point_string, rat, Relation, Verdict};
use crate::Rational;

pub const MAX_PARITY_VARS: usize = 20;
pub const MAX_SPHERE_DIM_LOG: usize = 4;
pub const LUPANOV_MIN_VARS: usize = 4;
pub const LUPANOV_MAX_VARS: usize = 12;
pub const MAX_APPROXIMATOR_VARS: usize = 5;

/// Clauses over `vars` that reject every assignment to `vars` whose parity
/// differs from `odd`.
fn block_parity_clauses(vars: &[usize], odd: bool) -> Vec<Clause> {
    let m = vars.len();
    (0..1u32 << m)
        .filter(|a| (a.count_ones() % 2 == 1) != odd)
        .map(|a| {
            // The clause excluding `a` holds x_v ≠ a_v for some v.
            Clause::new(
                vars.iter()
                    .enumerate()
                    .map(|(i, &v)| Literal::with_exponent(v, a >> i & 1 == 0)),
            )
            .expect("distinct variables")
        })
        .collect()
}

/// The `2^{n-1}` clauses excluding each even-weight point.
pub fn canonical_parity_cnf(n: usize) -> Result<CnfFormula> {
    check_range("n", n, 1, MAX_PARITY_VARS)?;
    let vars: Vec<usize> = (0..n).collect();
    CnfFormula::new(n, block_parity_clauses(&vars, true))
}

/// Block lengths for splitting `n` variables into `k` nearly equal blocks,
/// longer blocks first.
pub fn block_sizes(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|i| n / k + usize::from(i < n % k)).collect()
}

fn blocks(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut start = 0;
    block_sizes(n, k)
        .into_iter()
        .map(|len| {
            let b = (start..start + len).collect();
            start += len;
            b
        })
        .collect()
}

/// CNF accepting exactly the inputs whose first block has odd parity and
/// whose other blocks have even parity.
pub fn parity_block_approximator(n: usize, k: usize) -> Result<CnfFormula> {
    check_range("n", n, 1, MAX_PARITY_VARS)?;
    check_range("k'", k, 1, n)?;
    let clauses = blocks(n, k)
        .iter()
        .enumerate()
        .flat_map(|(i, b)| block_parity_clauses(b, i == 0))
        .collect();
    CnfFormula::new(n, clauses)
}

/// OR over odd patterns `z ∈ {0,1}^{n/k}` of the CNF checking that block
/// `i` has parity `z_i`.
pub fn parity_depth3(n: usize, k: usize) -> Result<DepthThreeFormula> {
    check_range("n", n, 1, MAX_PARITY_VARS)?;
    check_range("k", k, 1, n)?;
    if !n.is_multiple_of(k) {
        return Err(Error::BadParameter(format!("k = {k} does not divide n = {n}")));
    }
    let m = n / k;
    let blocks: Vec<Vec<usize>> = (0..m).map(|i| (i * k..(i + 1) * k).collect()).collect();
    let disjuncts = (0..1u32 << m)
        .filter(|z| z.count_ones() % 2 == 1)
        .map(|z| {
            let clauses = blocks
                .iter()
                .enumerate()
                .flat_map(|(i, b)| block_parity_clauses(b, z >> i & 1 == 1))
                .collect();
            CnfFormula::new(n, clauses)
        })
        .collect::<Result<Vec<_>>>()?;
    DepthThreeFormula::new(n, disjuncts)
}

/// Radius-one spheres around the kernel of the `d × 2^d` matrix whose
/// column `i` is `i` in binary. Points are cube indices over `D = 2^d`
/// variables (`y_1` most significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereCover {
    pub d: usize,
    pub dim: usize,
    pub centers: Vec<u32>,
}

impl SphereCover {
    /// `H y`: the XOR of the (0-based) coordinates set in `y`.
    pub fn syndrome(&self, y: u32) -> u32 {
        (0..self.dim)
            .filter(|&i| var_value(self.dim, y, i))
            .fold(0, |acc, i| acc ^ i as u32)
    }

    /// The points at distance exactly one from `a`.
    pub fn sphere(&self, a: u32) -> Vec<u32> {
        (0..self.dim).map(|i| a ^ var_bit(self.dim, i)).collect()
    }

    /// The center whose sphere contains `y`.
    pub fn center_of(&self, y: u32) -> u32 {
        y ^ var_bit(self.dim, self.syndrome(y) as usize)
    }

    /// CNF over `D` variables accepting exactly the sphere around `a`: some
    /// coordinate differs from `a`, and no two do.
    pub fn sphere_cnf(&self, a: u32) -> Result<CnfFormula> {
        let dim = self.dim;
        let differs = |i: usize| Literal::with_exponent(i, !var_value(dim, a, i));
        let agrees = |i: usize| Literal::with_exponent(i, var_value(dim, a, i));
        let mut clauses = vec![Clause::new((0..dim).map(differs))?];
        for i in 0..dim {
            for j in i + 1..dim {
                clauses.push(Clause::new([agrees(i), agrees(j)])?);
            }
        }
        CnfFormula::new(dim, clauses)
    }

    /// True iff every point of `{0,1}^D` lies in exactly one sphere.
    pub fn is_partition(&self) -> bool {
        let mut hits = vec![0u8; 1 << self.dim];
        for &a in &self.centers {
            for y in self.sphere(a) {
                hits[y as usize] += 1;
            }
        }
        hits.iter().all(|&h| h == 1)
    }
}

pub fn sphere_cover(d: usize) -> Result<SphereCover> {
    check_range("d", d, 1, MAX_SPHERE_DIM_LOG)?;
    let dim = 1 << d;
    let mut cover = SphereCover {
        d,
        dim,
        centers: Vec::new(),
    };
    cover.centers = (0..1u32 << dim).filter(|&y| cover.syndrome(y) == 0).collect();
    Ok(cover)
}

/// The clause `∨ y_i^{1-a_i}` over the `i` with `g(a ⊕ e_i) = 1`; it agrees
/// with `g` on the sphere around `a`.
pub fn critical_clause(g: &TruthTable, a: u32) -> Result<Clause> {
    let dim = g.n();
    if (a as u64) >= 1u64 << dim {
        return Err(Error::BadParameter(format!("center {a} has more than {dim} bits")));
    }
    Clause::new(
        (0..dim)
            .filter(|&i| g.get(a ^ var_bit(dim, i)))
            .map(|i| Literal::with_exponent(i, !var_value(dim, a, i))),
    )
}

/// A built formula of either depth.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Built {
    Cnf(CnfFormula),
    DepthThree(DepthThreeFormula),
}

impl Built {
    pub fn n(&self) -> usize {
        match self {
            Built::Cnf(phi) => phi.n(),
            Built::DepthThree(phi) => phi.n(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Built::Cnf(phi) => phi.size(),
            Built::DepthThree(phi) => phi.size(),
        }
    }

    pub fn to_truth_table(&self) -> Result<TruthTable> {
        match self {
            Built::Cnf(phi) => phi.to_truth_table(),
            Built::DepthThree(phi) => phi.to_truth_table(),
        }
    }

    /// DIMACS for CNFs, the d3f format for depth-3 formulas.
    pub fn to_text(&self) -> String {
        match self {
            Built::Cnf(phi) => write_dimacs(phi),
            Built::DepthThree(phi) => write_d3f(phi),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConstructionReport {
    pub kind: &'static str,
    pub n: usize,
    /// Builder parameters such as `k`, in a fixed order.
    pub params: Vec<(&'static str, usize)>,
    #[serde(skip)]
    pub formula: Built,
    pub size: usize,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub bound: Rational,
    pub verdicts: Vec<Verdict>,
}

impl ConstructionReport {
    pub fn ok(&self) -> bool {
        self.verdicts.iter().all(|v| v.ok)
    }
}

fn pow2(e: usize) -> Rational {
    Rational::from_integer(BigInt::from(1) << e)
}

fn equivalence(name: &str, got: &TruthTable, want: &TruthTable) -> Verdict {
    let diff = (0..1u32 << want.n()).filter(|&x| got.get(x) != want.get(x)).count();
    Verdict::checked(name, format!("{diff} differing inputs"), Relation::Eq, "0".into(), diff == 0)
}

pub fn build_parity_cnf(n: usize) -> Result<ConstructionReport> {
    let phi = canonical_parity_cnf(n)?;
    let bound = pow2(n - 1);
    let verdicts = vec![
        equivalence("computes Parity_n", &phi.to_truth_table()?, &make_parity(n)?),
        Verdict::eq("size == 2^(n-1)", &rat(phi.size()), &bound),
    ];
    Ok(ConstructionReport {
        kind: "parity-cnf",
        n,
        params: vec![],
        size: phi.size(),
        formula: Built::Cnf(phi),
        bound,
        verdicts,
    })
}

pub fn build_parity_blocks(n: usize, k: usize) -> Result<ConstructionReport> {
    let phi = parity_block_approximator(n, k)?;
    let bound = rat(k) * pow2(n.div_ceil(k) - 1);
    let t = phi.to_truth_table()?;
    let parity = make_parity(n)?;
    let one_sided = t.implies(&parity)?;
    let mut verdicts = vec![
        Verdict::le("size <= k'*2^(ceil(n/k')-1)", &rat(phi.size()), &bound),
        Verdict::eq("satisfying == 2^(n-k')", &rat(t.ones_count()), &pow2(n - k)),
        Verdict::checked(
            "one-sided under Parity_n",
            one_sided.to_string(),
            Relation::Eq,
            "true".into(),
            one_sided,
        ),
    ];
    if one_sided {
        verdicts.push(one_sided_parity_tradeoff(n, &phi)?.verdict);
    }
    Ok(ConstructionReport {
        kind: "parity-blocks",
        n,
        params: vec![("k'", k)],
        size: phi.size(),
        formula: Built::Cnf(phi),
        bound,
        verdicts,
    })
}

/// `(n/k)·2^{k+n/k-1}`.
pub fn parity_depth3_bound(n: usize, k: usize) -> Rational {
    rat(n / k) * pow2(k + n / k - 1)
}

pub fn build_parity_depth3(n: usize, k: usize) -> Result<ConstructionReport> {
    let phi = parity_depth3(n, k)?;
    let bound = parity_depth3_bound(n, k);
    let verdicts = vec![
        equivalence("computes Parity_n", &phi.to_truth_table()?, &make_parity(n)?),
        Verdict::le("size <= (n/k)*2^(k+n/k-1)", &rat(phi.size()), &bound),
    ];
    Ok(ConstructionReport {
        kind: "parity-d3",
        n,
        params: vec![("k", k)],
        size: phi.size(),
        formula: Built::DepthThree(phi),
        bound,
        verdicts,
    })
}

/// `d = ⌊log₂(n/2)⌋`.
pub fn lupanov_d(n: usize) -> usize {
    (n / 2).ilog2() as usize
}

/// Depth-3 formula for `f`: with `y` the first `D` variables and `z` the
/// rest, one disjunct per center `a`,
/// `φ_a(y) ∧ ∧_w (C_a^{f(·,w)}(y) ∨ ∨_j z_j^{1-w_j})`.
pub fn lupanov_formula(f: &TruthTable, prune: bool) -> Result<DepthThreeFormula> {
    let n = f.n();
    check_range("n", n, LUPANOV_MIN_VARS, LUPANOV_MAX_VARS)?;
    let cover = sphere_cover(lupanov_d(n))?;
    let dim = cover.dim;
    let rest = n - dim;
    let slices = (0..1u32 << rest)
        .map(|w| TruthTable::from_fn(dim, |y| f.get(y << rest | w)))
        .collect::<Result<Vec<_>>>()?;
    let mut disjuncts = Vec::with_capacity(cover.centers.len());
    for &a in &cover.centers {
        let mut clauses = cover.sphere_cnf(a)?.into_clauses();
        for (w, g) in slices.iter().enumerate() {
            let crit = critical_clause(g, a)?;
            let z = (0..rest).map(|j| Literal::with_exponent(dim + j, !var_value(rest, w as u32, j)));
            clauses.push(Clause::new(crit.literals().iter().copied().chain(z))?);
        }
        disjuncts.push(CnfFormula::new(n, clauses)?);
    }
    let phi = DepthThreeFormula::new(n, disjuncts)?;
    if prune {
        phi.prune_unsatisfiable()
    } else {
        Ok(phi)
    }
}

pub fn lupanov_depth3(f: &TruthTable, prune: bool) -> Result<ConstructionReport> {
    let n = f.n();
    let phi = lupanov_formula(f, prune)?;
    let dim = 1usize << lupanov_d(n);
    let per_disjunct = rat(dim * dim) + pow2(n - dim);
    let accounting = pow2(dim) * rat(dim) + pow2(n) / rat(dim);
    let bound = pow2(n + 3) / rat(n);
    let largest = phi.disjuncts().iter().map(CnfFormula::size).max().unwrap_or(0);
    let size = rat(phi.size());
    let verdicts = vec![
        equivalence("computes f", &phi.to_truth_table()?, f),
        Verdict::le("max disjunct <= D^2+2^(n-D)", &rat(largest), &per_disjunct),
        Verdict::le("size <= 2^D*D + 2^n/D", &size, &accounting),
        Verdict::le("size <= 2^(n+3)/n", &size, &bound),
    ];
    let mut params = vec![("D", dim)];
    if prune {
        params.push(("prune", 1));
    }
    Ok(ConstructionReport {
        kind: "lupanov",
        n,
        params,
        size: phi.size(),
        formula: Built::DepthThree(phi),
        bound,
        verdicts,
    })
}

/// A one-sided CNF approximator of `f` with its advantage.
#[derive(Debug, Clone, Serialize)]
pub struct UniversalApproximation {
    #[serde(skip)]
    pub phi: CnfFormula,
    pub size: usize,
    /// Indices into `f^-1(1)` (ascending) of the accepted points.
    #[serde(skip)]
    pub subset: SubsetId,
    pub accepted: Vec<String>,
    /// `Pr_{x ~ f^-1(1)}[φ(x) = 1]`.
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub epsilon: Rational,
    pub verdict: Verdict,
}

/// The column maximizing accepted mass per clause under the uniform
/// distribution on `f^-1(1)`, checked against `|φ| ≤ ε·2^{n+3}/n`.
pub fn universal_approximator(f: &TruthTable, cache: &CostCache) -> Result<UniversalApproximation> {
    let n = f.n();
    check_range("n", n, 1, MAX_APPROXIMATOR_VARS)?;
    let inst = build_cover_instance(f, Mode::General, cache)?;
    let mu = Distribution::uniform(n, inst.universe().iter().copied())?;
    let (_, subset) = inst.correlation(&mu)?;
    let column = inst
        .columns()
        .iter()
        .find(|c| c.subset == subset)
        .expect("argmax is a column");
    let phi = inst.column_witness(column)?;
    let epsilon = Rational::new(BigInt::from(subset.len()), BigInt::from(inst.universe().len()));
    let rhs = &epsilon * pow2(n + 3) / rat(n);
    let verdict = Verdict::le("|phi| <= eps*2^(n+3)/n", &rat(phi.size()), &rhs);
    let accepted = subset.points(inst.universe()).map(|x| point_string(n, x)).collect();
    Ok(UniversalApproximation {
        accepted,
        size: phi.size(),
        phi,
        subset,
        epsilon,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::make_majority;
    use ratlp::ratio;

    #[test]
    fn parity_cnf_examples() {
        let p2 = canonical_parity_cnf(2).unwrap();
        assert_eq!(p2.to_string(), "(x1 | x2) & (~x1 | ~x2)");
        for n in 1..=8 {
            let r = build_parity_cnf(n).unwrap();
            assert!(r.ok(), "{r:?}");
            assert_eq!(r.size, 1 << (n - 1));
        }
        assert!(canonical_parity_cnf(0).is_err());
    }

    #[test]
    fn block_split() {
        assert_eq!(block_sizes(9, 3), vec![3, 3, 3]);
        assert_eq!(block_sizes(10, 4), vec![3, 3, 2, 2]);
        assert_eq!(block_sizes(4, 1), vec![4]);
    }

    #[test]
    fn block_approximator_examples() {
        let r = build_parity_blocks(4, 2).unwrap();
        assert!(r.ok());
        assert_eq!(r.size, 4);
        let t = r.formula.to_truth_table().unwrap();
        assert_eq!(t.ones_count(), 4);
        assert_eq!(
            one_sided_parity_tradeoff(4, &parity_block_approximator(4, 2).unwrap()).unwrap().advantage,
            ratio(1, 2)
        );
        assert_eq!(parity_block_approximator(5, 1).unwrap(), canonical_parity_cnf(5).unwrap());
        let r = build_parity_blocks(9, 3).unwrap();
        assert!(r.ok());
        assert_eq!(r.size, 12);
        assert!(parity_block_approximator(3, 4).is_err());
    }

    #[test]
    fn parity_depth3_examples() {
        let r = build_parity_depth3(4, 2).unwrap();
        assert!(r.ok());
        match &r.formula {
            Built::DepthThree(phi) => {
                assert_eq!(phi.disjuncts().len(), 2);
                assert!(phi.disjuncts().iter().all(|d| d.size() == 4));
            }
            Built::Cnf(_) => unreachable!(),
        }
        assert_eq!(r.size, 8);
        assert_eq!(r.bound, rat(16));
        let single = parity_depth3(5, 5).unwrap();
        assert_eq!(single.disjuncts(), &[canonical_parity_cnf(5).unwrap()]);
        assert!(build_parity_depth3(9, 3).unwrap().ok());
        assert!(parity_depth3(5, 2).is_err());
    }

    #[test]
    fn sphere_cover_d1() {
        let c = sphere_cover(1).unwrap();
        let centers: Vec<String> = c.centers.iter().map(|&a| point_string(2, a)).collect();
        assert_eq!(centers, vec!["00", "10"]);
        let s00: Vec<String> = c.sphere(0b00).iter().map(|&y| point_string(2, y)).collect();
        assert_eq!(s00, vec!["10", "01"]);
        let s10: Vec<String> = c.sphere(0b10).iter().map(|&y| point_string(2, y)).collect();
        assert_eq!(s10, vec!["00", "11"]);
        assert!(c.is_partition());
    }

    #[test]
    fn sphere_covers_partition() {
        for d in 1..=4 {
            let c = sphere_cover(d).unwrap();
            assert_eq!(c.centers.len() * c.dim, 1 << c.dim);
            assert!(c.is_partition());
            for y in 0..1u32 << c.dim {
                assert!(c.sphere(c.center_of(y)).contains(&y));
            }
        }
        assert!(sphere_cover(0).is_err() && sphere_cover(5).is_err());
    }

    #[test]
    fn sphere_cnfs_accept_their_spheres() {
        for d in 1..=3 {
            let c = sphere_cover(d).unwrap();
            for &a in &c.centers {
                let phi = c.sphere_cnf(a).unwrap();
                assert!(phi.size() <= c.dim * c.dim);
                let sphere = c.sphere(a);
                for y in 0..1u32 << c.dim {
                    assert_eq!(phi.eval(y), sphere.contains(&y));
                }
            }
        }
    }

    #[test]
    fn critical_clause_examples() {
        let zero = TruthTable::constant(2, false).unwrap();
        assert!(critical_clause(&zero, 0).unwrap().is_empty());
        let one = TruthTable::constant(2, true).unwrap();
        assert_eq!(critical_clause(&one, 0b10).unwrap().to_string(), "(~x1 | x2)");
        let p2 = make_parity(2).unwrap();
        assert_eq!(critical_clause(&p2, 0).unwrap().to_string(), "(x1 | x2)");
        let c = sphere_cover(2).unwrap();
        let g = TruthTable::from_word(4, 0x6a3c).unwrap();
        for &a in &c.centers {
            let clause = critical_clause(&g, a).unwrap();
            for y in c.sphere(a) {
                assert_eq!(clause.eval(4, y), g.get(y));
            }
        }
    }

    #[test]
    fn lupanov_examples() {
        let r = lupanov_depth3(&make_parity(4).unwrap(), false).unwrap();
        assert!(r.ok(), "{:?}", r.verdicts);
        assert!(r.size <= 16);
        let zero = TruthTable::constant(5, false).unwrap();
        let r = lupanov_depth3(&zero, false).unwrap();
        assert!(r.ok());
        let Built::DepthThree(phi) = &r.formula else { unreachable!() };
        assert!(phi.disjuncts().iter().all(|d| d.to_truth_table().unwrap().ones_count() == 0));
        let pruned = lupanov_depth3(&zero, true).unwrap();
        assert_eq!(pruned.size, 0);
        assert!(lupanov_depth3(&make_parity(3).unwrap(), false).is_err());
    }

    #[test]
    fn lupanov_random_n8() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let words: Vec<u64> = (0..4).map(|_| rng.gen()).collect();
        let f = TruthTable::from_words(8, &words).unwrap();
        let r = lupanov_depth3(&f, false).unwrap();
        assert!(r.ok(), "{:?}", r.verdicts);
        assert_eq!(r.params, vec![("D", 4)]);
    }

    #[test]
    fn universal_approximator_examples() {
        let cache = CostCache::in_memory();
        let r = universal_approximator(&make_parity(4).unwrap(), &cache).unwrap();
        assert!(r.verdict.ok);
        assert!(r.phi.is_one_sided_under(&make_parity(4).unwrap()).unwrap());
        let point = TruthTable::from_points(4, [0b1011]).unwrap();
        let r = universal_approximator(&point, &cache).unwrap();
        assert_eq!((r.epsilon.clone(), r.size), (Rational::from_integer(1.into()), 4));
        assert!(r.verdict.ok);
        let r = universal_approximator(&make_majority(5).unwrap(), &cache).unwrap();
        assert!(r.verdict.ok);
    }
}
