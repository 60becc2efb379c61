//! Depth-3 size as a set-cover LP over CNF columns.
//!
//! The universe is `U = f^-1(1)`. There is one column per nonempty subset
//! `S ⊆ U` (upward-closed subsets only in monotone mode) whose cost is the
//! minimum (monotone) CNF size of `S`'s indicator. Any CNF `φ` that accepts
//! only inputs of `f` is dominated by the column for `φ^-1(1)`, and every
//! column is realized by a CNF, so this LP has the same optimum `s*` as the
//! LP over all one-sided CNFs. Integral covers are exactly depth-3 formulas.

use std::collections::{BTreeMap, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use ratlp::{Direction, LpProblem, Relation};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::boolfn::{automorphisms, var_bit, InputPermutation, TruthTable};
use crate::cnfmin::{cost_of_subset, min_cnf_for_mode, CostCache};
use crate::error::{check_cap, Error, Result};
use crate::formula::{CnfFormula, DepthThreeFormula};
use crate::report::{self, ln2_upper, ln_lower, rat, rational_string, Verdict};
use crate::Rational;

pub use crate::cnfmin::Mode;

/// Largest `|f^-1(1)|` for which all columns are enumerated.
pub const MAX_UNIVERSE: usize = 16;
/// Largest `|f^-1(1)|` for exact integral synthesis.
pub const MAX_EXACT_UNIVERSE: usize = 12;
/// Instances with more columns than this are solved by column generation.
const DIRECT_LP_COLUMNS: usize = 600;
const COLUMNS_PER_ROUND: usize = 64;

/// A subset of the universe; bit `i` stands for the `i`-th smallest input
/// of `f^-1(1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SubsetId(pub u32);

impl SubsetId {
    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0 >> i & 1 == 1
    }

    pub fn points<'a>(&self, universe: &'a [u32]) -> impl Iterator<Item = u32> + 'a {
        let m = self.0;
        universe.iter().enumerate().filter(move |(i, _)| m >> i & 1 == 1).map(|(_, &x)| x)
    }

    pub fn indicator(&self, n: usize, universe: &[u32]) -> Result<TruthTable> {
        TruthTable::from_points(n, self.points(universe))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Column {
    pub subset: SubsetId,
    pub cost: usize,
}

#[derive(Debug, Clone)]
pub struct CoverInstance {
    f: TruthTable,
    mode: Mode,
    universe: Vec<u32>,
    columns: Vec<Column>,
}

impl CoverInstance {
    pub fn f(&self) -> &TruthTable {
        &self.f
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn universe(&self) -> &[u32] {
        &self.universe
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    fn full(&self) -> u32 {
        low_mask(self.universe.len())
    }

    /// Position of `x` in the universe.
    pub fn index_of(&self, x: u32) -> Option<usize> {
        self.universe.binary_search(&x).ok()
    }

    /// Minimum (monotone) CNF computing exactly the column's subset.
    pub fn column_witness(&self, c: &Column) -> Result<CnfFormula> {
        let s = c.subset.indicator(self.f.n(), &self.universe)?;
        let w = min_cnf_for_mode(&s, self.mode)?.witness;
        debug_assert_eq!(w.size(), c.cost);
        Ok(w)
    }

    fn formula_of(&self, cols: &[usize]) -> Result<DepthThreeFormula> {
        let disjuncts = cols
            .iter()
            .map(|&j| self.column_witness(&self.columns[j]))
            .collect::<Result<Vec<_>>>()?;
        DepthThreeFormula::new(self.f.n(), disjuncts)
    }

    /// Per-universe weights scaled to integers over a common denominator.
    fn scaled(&self, weights: &[Rational]) -> (Vec<BigInt>, BigInt) {
        let l = weights.iter().fold(BigInt::one(), |acc, w| acc.lcm(w.denom()));
        let scaled = weights.iter().map(|w| w.numer() * (&l / w.denom())).collect();
        (scaled, l)
    }

    /// `Σ_{e∈S} w_e` for every column, via one pass over all masks.
    fn column_sums(&self, w: &[BigInt]) -> Vec<BigInt> {
        let m = self.universe.len();
        let mut by_mask = vec![BigInt::zero(); 1 << m];
        for mask in 1..1usize << m {
            let low = mask.trailing_zeros() as usize;
            by_mask[mask] = &by_mask[mask & (mask - 1)] + &w[low];
        }
        self.columns.iter().map(|c| by_mask[c.subset.0 as usize].clone()).collect()
    }

    /// `max_S μ(S)/cost(S)` over the columns, with the first maximizing column.
    pub fn correlation(&self, mu: &Distribution) -> Result<(Rational, SubsetId)> {
        let weights = self.weights_of(mu)?;
        let (w, l) = self.scaled(&weights);
        let sums = self.column_sums(&w);
        let mut best: Option<(usize, &BigInt)> = None;
        for (j, s) in sums.iter().enumerate() {
            let better = match best {
                None => true,
                // s / c_j > t / c_b
                Some((b, t)) => s * BigInt::from(self.columns[b].cost) > t * BigInt::from(self.columns[j].cost),
            };
            if better {
                best = Some((j, s));
            }
        }
        let (j, s) = best.expect("instances have at least one column");
        let value = Rational::new(s.clone(), l * BigInt::from(self.columns[j].cost));
        Ok((value, self.columns[j].subset))
    }

    /// Weights of `mu` in universe order; fails if `mu` leaves `f^-1(1)`.
    pub fn weights_of(&self, mu: &Distribution) -> Result<Vec<Rational>> {
        if mu.n() != self.f.n() {
            return Err(Error::DimensionMismatch {
                expected: self.f.n(),
                got: mu.n(),
            });
        }
        if let Some(x) = mu.support().find(|&x| !self.f.get(x)) {
            return Err(Error::BadDistribution(format!(
                "support point {} is outside f^-1(1)",
                report::point_string(mu.n(), x)
            )));
        }
        Ok(self.universe.iter().map(|&x| mu.weight(x)).collect())
    }
}

fn low_mask(m: usize) -> u32 {
    if m == 32 {
        u32::MAX
    } else {
        (1u32 << m) - 1
    }
}

/// Enumerates the columns of the set-cover instance for `f`.
pub fn build_cover_instance(f: &TruthTable, mode: Mode, cache: &CostCache) -> Result<CoverInstance> {
    if f.is_constant().is_some() {
        return Err(Error::ConstantFunction);
    }
    if mode == Mode::Monotone && !f.is_monotone() {
        return Err(Error::NotMonotone);
    }
    let n = f.n();
    let universe: Vec<u32> = f.ones().collect();
    let m = universe.len();
    check_cap("|f^-1(1)|", m, MAX_UNIVERSE)?;

    // Upward neighbours of each universe point, as universe masks.
    let up: Vec<u32> = universe
        .iter()
        .map(|&x| {
            (0..n)
                .filter(|&v| x & var_bit(n, v) == 0)
                .map(|v| universe.binary_search(&(x | var_bit(n, v))).map_or(0, |i| 1u32 << i))
                .fold(0, |a, b| a | b)
        })
        .collect();
    let upward_closed = |mask: u32| {
        let mut rest = mask;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            if up[i] & !mask != 0 {
                return false;
            }
            rest &= rest - 1;
        }
        true
    };

    let mut words = vec![0u64; if n <= 6 { 1 << m } else { 0 }];
    let mut columns = Vec::new();
    for mask in 1u32..=low_mask(m) {
        if n <= 6 {
            let low = mask.trailing_zeros() as usize;
            words[mask as usize] = words[(mask & (mask - 1)) as usize] | 1u64 << universe[low];
        }
        if mode == Mode::Monotone && !upward_closed(mask) {
            continue;
        }
        let cost = if n <= 6 {
            cache.cost_word(n, words[mask as usize], mode)?
        } else {
            let s = SubsetId(mask).indicator(n, &universe)?;
            cost_of_subset(f, &s, mode, cache)?
        };
        columns.push(Column {
            subset: SubsetId(mask),
            cost,
        });
    }
    Ok(CoverInstance {
        f: f.clone(),
        mode,
        universe,
        columns,
    })
}

/// Optimal primal and dual of the covering LP.
#[derive(Debug, Clone)]
pub struct DualSolution {
    pub s_star: Rational,
    /// Nonzero primal entries as (column index, value).
    pub primal: Vec<(usize, Rational)>,
    /// `y_e` for each universe element.
    pub dual: Vec<Rational>,
    /// Column-generation rounds (1 when solved directly).
    pub rounds: usize,
}

fn restricted_lp(inst: &CoverInstance, active: &[usize]) -> LpProblem {
    let objective = active.iter().map(|&j| rat(inst.columns[j].cost)).collect();
    let mut lp = LpProblem::new(Direction::Minimize, objective);
    for e in 0..inst.universe.len() {
        let coeffs = active
            .iter()
            .enumerate()
            .filter(|(_, &j)| inst.columns[j].subset.contains(e))
            .map(|(k, _)| (k, Rational::one()))
            .collect();
        lp.add_constraint(coeffs, Relation::Ge, Rational::one());
    }
    lp
}

/// Solves the covering LP exactly. Large instances start from the
/// singletons plus the whole universe and add columns of negative reduced
/// cost until none remain, so the final dual is feasible for every column.
pub fn solve_cover_lp(inst: &CoverInstance) -> Result<DualSolution> {
    let full = inst.full();
    let mut active: Vec<usize> = if inst.columns.len() <= DIRECT_LP_COLUMNS {
        (0..inst.columns.len()).collect()
    } else {
        inst.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| c.subset.len() == 1 || c.subset.0 == full)
            .map(|(j, _)| j)
            .collect()
    };
    let mut rounds = 0;
    loop {
        rounds += 1;
        let lp = restricted_lp(inst, &active);
        let sol = ratlp::solve(&lp)?;
        if !sol.is_optimal() || !ratlp::verify_certificate(&lp, &sol) {
            return Err(Error::BadParameter("covering LP did not reach a certified optimum".into()));
        }
        if active.len() < inst.columns.len() {
            let (y, l) = inst.scaled(&sol.dual);
            let sums = inst.column_sums(&y);
            let mut entering: Vec<(BigInt, usize)> = sums
                .iter()
                .enumerate()
                .filter_map(|(j, s)| {
                    let reduced = BigInt::from(inst.columns[j].cost) * &l - s;
                    reduced.is_negative().then_some((reduced, j))
                })
                .collect();
            if !entering.is_empty() {
                entering.sort();
                active.extend(entering.into_iter().take(COLUMNS_PER_ROUND).map(|(_, j)| j));
                active.sort_unstable();
                continue;
            }
        }
        let primal = sol
            .primal
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(k, v)| (active[k], v.clone()))
            .collect();
        return Ok(DualSolution {
            s_star: sol.objective,
            primal,
            dual: sol.dual,
            rounds,
        });
    }
}

/// Greedy integral cover: repeatedly take the column maximizing newly
/// covered elements per clause, ties to lower cost, then lower mask.
pub fn greedy_cover(inst: &CoverInstance) -> Vec<usize> {
    let mut rest = inst.full();
    let mut picked = Vec::new();
    while rest != 0 {
        let mut best: Option<(usize, u32)> = None;
        for (j, c) in inst.columns.iter().enumerate() {
            let gain = (c.subset.0 & rest).count_ones();
            if gain == 0 {
                continue;
            }
            let better = match best {
                None => true,
                Some((b, g)) => {
                    let cb = inst.columns[b].cost;
                    let lhs = gain as usize * cb;
                    let rhs = g as usize * c.cost;
                    lhs > rhs || (lhs == rhs && (c.cost, c.subset) < (cb, inst.columns[b].subset))
                }
            };
            if better {
                best = Some((j, gain));
            }
        }
        let (j, _) = best.expect("the full universe is always a column");
        rest &= !inst.columns[j].subset.0;
        picked.push(j);
    }
    picked
}

pub fn synthesize_greedy(inst: &CoverInstance) -> Result<DepthThreeFormula> {
    inst.formula_of(&greedy_cover(inst))
}

/// Minimum-cost integral cover by dynamic programming over subsets of the
/// universe: a cover is a partition of `U` into parts, each charged the
/// cheapest column containing it.
pub fn exact_cover(inst: &CoverInstance) -> Result<Vec<usize>> {
    let m = inst.universe.len();
    check_cap("|f^-1(1)| for exact synthesis", m, MAX_EXACT_UNIVERSE)?;
    let size = 1usize << m;
    const NONE: (usize, usize) = (usize::MAX, usize::MAX);
    let mut cheapest = vec![NONE; size];
    for (j, c) in inst.columns.iter().enumerate() {
        let slot = &mut cheapest[c.subset.0 as usize];
        *slot = (*slot).min((c.cost, j));
    }
    for bit in 0..m {
        for t in 0..size {
            if t >> bit & 1 == 0 {
                let above = cheapest[t | 1 << bit];
                if above < cheapest[t] {
                    cheapest[t] = above;
                }
            }
        }
    }
    let mut best = vec![usize::MAX; size];
    let mut choice = vec![0usize; size];
    best[0] = 0;
    for t in 1..size {
        let low = t & t.wrapping_neg();
        let rest = t ^ low;
        let mut sub = rest;
        loop {
            let part = sub | low;
            let (c, _) = cheapest[part];
            if c != usize::MAX && best[t ^ part] != usize::MAX {
                let total = c + best[t ^ part];
                if total < best[t] {
                    best[t] = total;
                    choice[t] = part;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
    }
    let mut t = size - 1;
    let mut cols = Vec::new();
    while t != 0 {
        let part = choice[t];
        cols.push(cheapest[part].1);
        t ^= part;
    }
    cols.sort_unstable();
    Ok(cols)
}

pub fn synthesize_exact(inst: &CoverInstance) -> Result<DepthThreeFormula> {
    inst.formula_of(&exact_cover(inst)?)
}

/// A probability distribution on the cube with exact weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    n: usize,
    weights: BTreeMap<u32, Rational>,
}

impl Distribution {
    pub fn new(n: usize, weights: impl IntoIterator<Item = (u32, Rational)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut total = Rational::zero();
        for (x, w) in weights {
            if n < 32 && x >= 1 << n {
                return Err(Error::BadDistribution(format!("point {x} outside the {n}-cube")));
            }
            if w.is_negative() {
                return Err(Error::BadDistribution(format!("negative weight {}", rational_string(&w))));
            }
            total += &w;
            if map.insert(x, w).is_some() {
                return Err(Error::BadDistribution(format!("point {x} listed twice")));
            }
        }
        if !total.is_one() {
            return Err(Error::BadDistribution(format!(
                "weights sum to {}, not 1",
                rational_string(&total)
            )));
        }
        map.retain(|_, w| !w.is_zero());
        Ok(Distribution { n, weights: map })
    }

    pub fn uniform(n: usize, points: impl IntoIterator<Item = u32>) -> Result<Self> {
        let points: Vec<u32> = points.into_iter().collect();
        if points.is_empty() {
            return Err(Error::BadDistribution("uniform over an empty set".into()));
        }
        let w = Rational::new(BigInt::one(), BigInt::from(points.len()));
        Self::new(n, points.into_iter().map(|x| (x, w.clone())))
    }

    pub fn point_mass(n: usize, x: u32) -> Result<Self> {
        Self::new(n, [(x, Rational::one())])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn weight(&self, x: u32) -> Rational {
        self.weights.get(&x).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.weights.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.weights.iter().map(|(&x, w)| (x, w))
    }

    /// `Pr_μ[t(x) = 1]`.
    pub fn mass(&self, t: &TruthTable) -> Rational {
        self.weights
            .iter()
            .filter(|(&x, _)| t.get(x))
            .fold(Rational::zero(), |acc, (_, w)| acc + w)
    }
}

/// `max_φ μ(φ^-1(1)) / |φ|` over one-sided CNFs, realized on the canonical
/// columns of `f`'s instance.
pub fn correlation_per_size(
    f: &TruthTable,
    mu: &Distribution,
    mode: Mode,
    cache: &CostCache,
) -> Result<(Rational, SubsetId)> {
    build_cover_instance(f, mode, cache)?.correlation(mu)
}

/// Averages `mu_star` over the group generated by `generators`. Since
/// `π(x)` is uniform on the orbit of `x` for uniform `π`, the result puts
/// `μ*(orbit)/|orbit|` on each orbit point.
pub fn symmetrize(mu_star: &Distribution, generators: &[InputPermutation], f: &TruthTable) -> Result<Distribution> {
    let n = f.n();
    if mu_star.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: mu_star.n(),
        });
    }
    for g in generators {
        if g.n() != n {
            return Err(Error::DimensionMismatch { expected: n, got: g.n() });
        }
        if &f.apply_permutation(g)? != f {
            return Err(Error::GroupDoesNotPreserve);
        }
    }
    if mu_star.support().any(|x| !f.get(x)) {
        return Err(Error::BadDistribution("support leaves f^-1(1)".into()));
    }
    let mut seen = BTreeMap::new();
    let mut out = Vec::new();
    for start in mu_star.support() {
        if seen.contains_key(&start) {
            continue;
        }
        let mut orbit = vec![start];
        seen.insert(start, ());
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for g in generators {
                let y = g.apply(x);
                if seen.insert(y, ()).is_none() {
                    orbit.push(y);
                    queue.push_back(y);
                }
            }
        }
        let mass = orbit.iter().fold(Rational::zero(), |acc, &x| acc + mu_star.weight(x));
        let each = mass / BigInt::from(orbit.len());
        out.extend(orbit.into_iter().map(|x| (x, each.clone())));
    }
    Distribution::new(n, out)
}

/// Both sides of a hard-distribution check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HardDistributionCheck {
    /// `1/s*`, the optimum over all distributions.
    pub cor: Rational,
    /// `D_μ(f)` for the candidate.
    pub cor_mu: Rational,
    pub argmax: SubsetId,
}

impl HardDistributionCheck {
    pub fn holds(&self) -> bool {
        self.cor == self.cor_mu
    }

    pub fn verdict(&self, name: &str) -> Verdict {
        Verdict::eq(name, &self.cor_mu, &self.cor)
    }
}

pub fn check_hard_distribution_on(inst: &CoverInstance, mu: &Distribution) -> Result<HardDistributionCheck> {
    let lp = solve_cover_lp(inst)?;
    let (cor_mu, argmax) = inst.correlation(mu)?;
    Ok(HardDistributionCheck {
        cor: lp.s_star.recip(),
        cor_mu,
        argmax,
    })
}

pub fn check_hard_distribution(
    f: &TruthTable,
    mu: &Distribution,
    mode: Mode,
    cache: &CostCache,
) -> Result<HardDistributionCheck> {
    check_hard_distribution_on(&build_cover_instance(f, mode, cache)?, mu)
}

/// True iff `D_μ(f)` equals `cor(f) = 1/s*` exactly.
pub fn verify_hard_distribution(f: &TruthTable, mu: &Distribution, mode: Mode, cache: &CostCache) -> Result<bool> {
    Ok(check_hard_distribution(f, mu, mode, cache)?.holds())
}

#[derive(Debug, Clone)]
pub struct DualityReport {
    pub f: TruthTable,
    pub mode: Mode,
    pub universe: Vec<u32>,
    pub columns: usize,
    pub lp_rounds: usize,
    pub s_star: Rational,
    /// `μ(e) = y_e / Σ y`, in universe order.
    pub mu: Vec<Rational>,
    /// `mu` averaged over the automorphisms of `f` (still optimal, and the
    /// canonical choice when the dual optimum is not unique).
    pub mu_symmetric: Vec<Rational>,
    pub cor: Rational,
    pub l3_lower: BigInt,
    /// Size of the witness; equal to `L3(f)` when `exact`.
    pub l3_upper: usize,
    pub exact: bool,
    pub witness: DepthThreeFormula,
    pub greedy_size: usize,
    pub verdicts: Vec<Verdict>,
}

impl DualityReport {
    pub fn ok(&self) -> bool {
        report::all_ok(&self.verdicts)
    }

    pub fn distribution(&self) -> Distribution {
        Distribution::new(self.f.n(), self.universe.iter().copied().zip(self.mu.iter().cloned()))
            .expect("normalized dual")
    }
}

impl Serialize for DualityReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = self.f.n();
        let mu: BTreeMap<String, String> = self
            .universe
            .iter()
            .zip(&self.mu)
            .map(|(&x, w)| (report::point_string(n, x), rational_string(w)))
            .collect();
        let mut st = s.serialize_struct("DualityReport", 13)?;
        st.serialize_field("f", &format!("n={} 0x{}", n, self.f.to_hex()))?;
        st.serialize_field("mode", &self.mode)?;
        st.serialize_field("universe_size", &self.universe.len())?;
        st.serialize_field("columns", &self.columns)?;
        st.serialize_field("s_star", &rational_string(&self.s_star))?;
        st.serialize_field("cor", &rational_string(&self.cor))?;
        st.serialize_field("mu", &mu)?;
        let mu_symmetric: BTreeMap<String, String> = self
            .universe
            .iter()
            .zip(&self.mu_symmetric)
            .map(|(&x, w)| (report::point_string(n, x), rational_string(w)))
            .collect();
        st.serialize_field("mu_symmetric", &mu_symmetric)?;
        st.serialize_field("l3_lower", &self.l3_lower.to_string())?;
        st.serialize_field("l3_upper", &self.l3_upper)?;
        st.serialize_field("l3_exact", &self.exact)?;
        st.serialize_field("greedy_size", &self.greedy_size)?;
        st.serialize_field("verdicts", &self.verdicts)?;
        st.end()
    }
}

/// `(1 + n·ln 2)·s*` with `ln 2` replaced by `0.6932`.
pub fn depth3_upper_bound(n: usize, s_star: &Rational) -> Rational {
    (Rational::one() + rat(n) * ln2_upper()) * s_star
}

/// `(1 + ln|U|)·s*` with `ln|U|` replaced by a rational lower bound, so a
/// pass certifies the true inequality.
pub fn greedy_upper_bound(universe: usize, s_star: &Rational) -> Rational {
    (Rational::one() + ln_lower(universe)) * s_star
}

/// Runs the whole pipeline: instance, LP, hard distribution, greedy and
/// (when `|U| ≤ 12`) exact synthesis, and the sandwich checks.
pub fn solve_duality(f: &TruthTable, mode: Mode, cache: &CostCache) -> Result<DualityReport> {
    let inst = build_cover_instance(f, mode, cache)?;
    solve_duality_on(&inst)
}

pub fn solve_duality_on(inst: &CoverInstance) -> Result<DualityReport> {
    let f = inst.f();
    let n = f.n();
    let lp = solve_cover_lp(inst)?;
    let s_star = lp.s_star.clone();
    let total = lp.dual.iter().fold(Rational::zero(), |acc, y| acc + y);
    let mu: Vec<Rational> = lp.dual.iter().map(|y| y / &total).collect();
    let cor = s_star.recip();
    let l3_lower = ratlp::ceil(&s_star);

    let greedy = greedy_cover(inst);
    let greedy_size: usize = greedy.iter().map(|&j| inst.columns[j].cost).sum();
    let exact = inst.universe.len() <= MAX_EXACT_UNIVERSE;
    let cols = if exact { exact_cover(inst)? } else { greedy };
    let witness = inst.formula_of(&cols)?;
    let l3_upper = witness.size();

    let raw = Distribution::new(n, inst.universe.iter().copied().zip(mu.iter().cloned()))?;
    let sym = if n <= 6 {
        let group = automorphisms(f, inst.mode() == Mode::General)?;
        symmetrize(&raw, &group, f)?
    } else {
        raw.clone()
    };
    let mu_symmetric: Vec<Rational> = inst.universe.iter().map(|&x| sym.weight(x)).collect();
    let (cor_raw, _) = inst.correlation(&raw)?;
    let (cor_sym, _) = inst.correlation(&sym)?;

    let mut verdicts = vec![
        Verdict::eq("sum of mu", &mu.iter().fold(Rational::zero(), |a, w| a + w), &Rational::one()),
        Verdict::eq("D_mu(f) == 1/s*", &cor_raw, &cor),
        Verdict::eq("D_mu_symmetric(f) == 1/s*", &cor_sym, &cor),
        Verdict::eq("sum of dual equals s*", &total, &s_star),
        Verdict::checked(
            "witness computes f",
            format!("0x{}", witness.to_truth_table()?.to_hex()),
            report::Relation::Eq,
            format!("0x{}", f.to_hex()),
            &witness.to_truth_table()? == f,
        ),
        Verdict::le("ceil(s*) <= L3", &Rational::from_integer(l3_lower.clone()), &rat(l3_upper)),
        Verdict::le(
            "greedy <= (1 + ln|U|) s*",
            &rat(greedy_size),
            &greedy_upper_bound(inst.universe.len(), &s_star),
        ),
    ];
    if exact {
        verdicts.push(Verdict::le(
            "L3 <= (1 + n ln 2) s*",
            &rat(l3_upper),
            &depth3_upper_bound(n, &s_star),
        ));
    }
    Ok(DualityReport {
        f: f.clone(),
        mode: inst.mode(),
        universe: inst.universe.clone(),
        columns: inst.columns.len(),
        lp_rounds: lp.rounds,
        s_star,
        mu,
        mu_symmetric,
        cor,
        l3_lower,
        l3_upper,
        exact,
        witness,
        greedy_size,
        verdicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{even_negation_generators, coordinate_permutation_generators, make_majority, make_parity, Slice};
    use ratlp::ratio;

    fn cache() -> CostCache {
        CostCache::in_memory()
    }

    #[test]
    fn parity2_instance() {
        let inst = build_cover_instance(&make_parity(2).unwrap(), Mode::General, &cache()).unwrap();
        let got: Vec<(u32, usize)> = inst.columns().iter().map(|c| (c.subset.0, c.cost)).collect();
        assert_eq!(got, vec![(0b01, 2), (0b10, 2), (0b11, 2)]);
    }

    #[test]
    fn or2_monotone_instance() {
        let or = make_majority(2).unwrap();
        let inst = build_cover_instance(&or, Mode::Monotone, &cache()).unwrap();
        // universe 01, 10, 11 → bits 0, 1, 2
        let got: Vec<(u32, usize)> = inst.columns().iter().map(|c| (c.subset.0, c.cost)).collect();
        assert_eq!(got, vec![(0b100, 2), (0b101, 1), (0b110, 1), (0b111, 1)]);
    }

    #[test]
    fn column_count_is_all_nonempty_subsets() {
        let f = TruthTable::from_points(3, [1, 2, 4, 6, 7]).unwrap();
        let inst = build_cover_instance(&f, Mode::General, &cache()).unwrap();
        assert_eq!(inst.columns().len(), 31);
        assert!(matches!(
            build_cover_instance(&TruthTable::constant(3, true).unwrap(), Mode::General, &cache()),
            Err(Error::ConstantFunction)
        ));
        assert!(matches!(
            build_cover_instance(&make_parity(6).unwrap(), Mode::General, &cache()),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn parity2_duality() {
        let r = solve_duality(&make_parity(2).unwrap(), Mode::General, &cache()).unwrap();
        assert_eq!(r.s_star, rat(2));
        assert_eq!(r.mu_symmetric, vec![ratio(1, 2), ratio(1, 2)]);
        assert_eq!(r.l3_upper, 2);
        assert_eq!(r.witness.disjuncts().len(), 1);
        assert!(r.ok(), "{:?}", r.verdicts);
    }

    #[test]
    fn or2_monotone_duality() {
        let r = solve_duality(&make_majority(2).unwrap(), Mode::Monotone, &cache()).unwrap();
        assert_eq!(r.s_star, rat(1));
        assert_eq!(r.l3_upper, 1);
        assert_eq!(r.witness.disjuncts()[0].to_string(), "(x1 | x2)");
        // every distribution on the universe gives the full clause probability 1
        assert_eq!(r.cor, rat(1));
    }

    #[test]
    fn parity4_cor_matches_uniform_odd() {
        let c = cache();
        let p4 = make_parity(4).unwrap();
        let r = solve_duality(&p4, Mode::General, &c).unwrap();
        let mu = Distribution::uniform(4, p4.ones()).unwrap();
        let (value, _) = correlation_per_size(&p4, &mu, Mode::General, &c).unwrap();
        assert_eq!(value, r.cor);
        assert!(r.ok(), "{:?}", r.verdicts);
        // oracle: brute-force max of |S|/(8 cost(S)) computed independently
        let inst = build_cover_instance(&p4, Mode::General, &c).unwrap();
        let mut best = Rational::zero();
        for col in inst.columns() {
            let s = col.subset.indicator(4, inst.universe()).unwrap();
            let cost = crate::cnfmin::min_cnf_size(&s).unwrap().size;
            best = best.max(Rational::new(BigInt::from(s.ones_count()), BigInt::from(8 * cost)));
        }
        assert_eq!(best, value);
    }

    #[test]
    fn correlation_examples() {
        let c = cache();
        let p2 = make_parity(2).unwrap();
        let mu = Distribution::uniform(2, p2.ones()).unwrap();
        let (v, arg) = correlation_per_size(&p2, &mu, Mode::General, &c).unwrap();
        assert_eq!(v, ratio(1, 2));
        assert_eq!(arg, SubsetId(0b11));
        // point mass: at least 1/cost of the singleton
        let f = make_majority(3).unwrap();
        let point = Distribution::point_mass(3, 0b011).unwrap();
        let (v, _) = correlation_per_size(&f, &point, Mode::General, &c).unwrap();
        assert!(v >= ratio(1, 3));
        let outside = Distribution::point_mass(3, 0).unwrap();
        assert!(correlation_per_size(&f, &outside, Mode::General, &c).is_err());
    }

    #[test]
    fn majority3_middle_slice_is_hard() {
        let c = cache();
        let m3 = make_majority(3).unwrap();
        let mu = Distribution::uniform(3, Slice::new(3, 2).unwrap().points()).unwrap();
        let r = solve_duality(&m3, Mode::Monotone, &c).unwrap();
        let (v, _) = correlation_per_size(&m3, &mu, Mode::Monotone, &c).unwrap();
        assert_eq!(v, r.cor);
    }

    #[test]
    fn greedy_examples() {
        let c = cache();
        let inst = build_cover_instance(&make_parity(2).unwrap(), Mode::General, &c).unwrap();
        assert_eq!(greedy_cover(&inst), vec![2]);
        let p3 = make_parity(3).unwrap();
        let inst = build_cover_instance(&p3, Mode::General, &c).unwrap();
        let d = synthesize_greedy(&inst).unwrap();
        assert_eq!(d.to_truth_table().unwrap(), p3);
        let s = solve_cover_lp(&inst).unwrap().s_star;
        assert!(rat(d.size()) <= greedy_upper_bound(4, &s));
    }

    #[test]
    fn exact_examples() {
        let c = cache();
        let inst = build_cover_instance(&make_parity(2).unwrap(), Mode::General, &c).unwrap();
        assert_eq!(synthesize_exact(&inst).unwrap().size(), 2);
        let point = TruthTable::from_points(3, [0b101]).unwrap();
        let inst = build_cover_instance(&point, Mode::General, &c).unwrap();
        assert_eq!(synthesize_exact(&inst).unwrap().size(), 3);
    }

    /// Independent oracle: minimum cover by trying all column subsets of
    /// increasing total cost (small instances only).
    fn brute_force_l3(inst: &CoverInstance) -> usize {
        let full = low_mask(inst.universe().len());
        let mut best = vec![usize::MAX; full as usize + 1];
        best[0] = 0;
        // unbounded knapsack-style relaxation over union masks
        loop {
            let mut changed = false;
            for m in 0..=full as usize {
                if best[m] == usize::MAX {
                    continue;
                }
                for c in inst.columns() {
                    let t = m | c.subset.0 as usize;
                    if best[m] + c.cost < best[t] {
                        best[t] = best[m] + c.cost;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        best[full as usize]
    }

    #[test]
    fn exact_matches_brute_force_on_n3() {
        let c = cache();
        for code in 1u64..255 {
            let f = TruthTable::from_word(3, code).unwrap();
            let inst = build_cover_instance(&f, Mode::General, &c).unwrap();
            let d = synthesize_exact(&inst).unwrap();
            assert_eq!(d.size(), brute_force_l3(&inst), "f = {f:?}");
            assert_eq!(d.to_truth_table().unwrap(), f);
        }
    }

    #[test]
    fn column_generation_matches_direct_solve() {
        let c = cache();
        // |U| = 10 → 1023 columns, above the direct threshold
        let f = TruthTable::from_points(4, [0, 3, 5, 6, 9, 10, 12, 15, 1, 14]).unwrap();
        let inst = build_cover_instance(&f, Mode::General, &c).unwrap();
        let cg = solve_cover_lp(&inst).unwrap();
        assert!(cg.rounds > 1);
        let all: Vec<usize> = (0..inst.columns().len()).collect();
        let direct = ratlp::solve(&restricted_lp(&inst, &all)).unwrap();
        assert_eq!(cg.s_star, direct.objective);
    }

    #[test]
    fn symmetrize_examples() {
        let p3 = make_parity(3).unwrap();
        let gens = even_negation_generators(3);
        let uniform = Distribution::uniform(3, p3.ones()).unwrap();
        assert_eq!(symmetrize(&uniform, &gens, &p3).unwrap(), uniform);
        let point = Distribution::point_mass(3, 0b100).unwrap();
        assert_eq!(symmetrize(&point, &gens, &p3).unwrap(), uniform);

        let m3 = make_majority(3).unwrap();
        let skewed = Distribution::new(3, [(0b011, ratio(1, 2)), (0b110, ratio(1, 4)), (0b111, ratio(1, 4))]).unwrap();
        let sym = symmetrize(&skewed, &coordinate_permutation_generators(3), &m3).unwrap();
        // weight class 2 carries 3/4 spread over three points, class 3 keeps 1/4
        for x in m3.ones() {
            assert_eq!(sym.weight(x), ratio(1, 4));
        }
        assert_eq!(sym.weight(0b101), sym.weight(0b011));
        let swap = InputPermutation::negation(3, &[0]).unwrap();
        assert!(matches!(symmetrize(&skewed, &[swap], &m3), Err(Error::GroupDoesNotPreserve)));
    }

    #[test]
    fn symmetrization_never_increases_correlation() {
        use rand::{Rng, SeedableRng};
        let c = cache();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let p3 = make_parity(3).unwrap();
        let inst = build_cover_instance(&p3, Mode::General, &c).unwrap();
        for _ in 0..20 {
            let raw: Vec<u64> = p3.ones().map(|_| rng.gen_range(0..10)).collect();
            let total: u64 = raw.iter().sum::<u64>().max(1);
            if raw.iter().sum::<u64>() == 0 {
                continue;
            }
            let mu_star = Distribution::new(
                3,
                p3.ones().zip(&raw).map(|(x, &w)| (x, Rational::new(BigInt::from(w), BigInt::from(total)))),
            )
            .unwrap();
            let mu = symmetrize(&mu_star, &even_negation_generators(3), &p3).unwrap();
            assert!(inst.correlation(&mu).unwrap().0 <= inst.correlation(&mu_star).unwrap().0);
        }
    }

    #[test]
    fn hard_distribution_examples() {
        let c = cache();
        let p3 = make_parity(3).unwrap();
        let uniform = Distribution::uniform(3, p3.ones()).unwrap();
        assert!(verify_hard_distribution(&p3, &uniform, Mode::General, &c).unwrap());
        let point = Distribution::point_mass(3, 0b001).unwrap();
        let check = check_hard_distribution(&p3, &point, Mode::General, &c).unwrap();
        assert!(check.cor_mu > check.cor);
        let m4 = make_majority(4).unwrap();
        let slice = Distribution::uniform(4, Slice::new(4, 2).unwrap().points()).unwrap();
        assert!(verify_hard_distribution(&m4, &slice, Mode::Monotone, &c).unwrap());
    }

    #[test]
    fn report_serializes_rationals_as_strings() {
        let r = solve_duality(&make_parity(2).unwrap(), Mode::General, &cache()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["s_star"], "2/1");
        assert_eq!(v["mu_symmetric"]["01"], "1/2");
        assert_eq!(v["l3_upper"], 2);
    }
}
