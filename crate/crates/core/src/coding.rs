//! Prefix-free encodings of isolated solutions.
//!
//! [`ppz_encode`] walks the variables in the order `π`. A variable is skipped
//! when the formula, restricted by the variables fixed so far, contains a
//! unit clause on it; otherwise its bit is written out. The width-reduced
//! encoder cuts every clause to its first `k = s + 2` literals (`s` the
//! number of index bits, `|φ| ≤ 2^s`): if the cut formula still accepts `x`
//! it writes `0` and PPZ-encodes `x` against the cut formula, otherwise it
//! writes `1`, the `s`-bit index of the first falsified cut clause, fixes
//! that clause's `k` variables and recurses. One permutation is used at
//! every level; fixed variables are simply skipped.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::boolfn::{make_parity, var_bit, MAX_VARS};
use crate::error::{check_range, Error, Result};
use crate::formula::CnfFormula;
use crate::report::{rat, rational_string, Relation, Verdict};
use crate::Rational;

/// Largest `n` for the exact isolated-solution counts.
pub const MAX_COUNT_VARS: usize = 20;
/// Largest `n` for averages over all `n!` permutations.
pub const MAX_PERMUTATION_SWEEP_VARS: usize = 9;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsolatedSolutionSet {
    pub n: usize,
    pub points: Vec<u32>,
}

impl IsolatedSolutionSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Satisfying assignments whose `n` neighbours are all falsifying.
pub fn isolated_solutions(phi: &CnfFormula) -> Result<IsolatedSolutionSet> {
    let n = phi.n();
    check_range("n", n, 0, MAX_VARS)?;
    let t = phi.to_truth_table()?;
    let points = t.ones().filter(|&x| (0..n).all(|v| !t.get(x ^ var_bit(n, v)))).collect();
    Ok(IsolatedSolutionSet { n, points })
}

pub fn is_isolated(phi: &CnfFormula, x: u32) -> bool {
    let n = phi.n();
    phi.eval(x) && (0..n).all(|v| !phi.eval(x ^ var_bit(n, v)))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CodeWord {
    pub bits: Vec<bool>,
    /// The variable order the word was produced under.
    pub perm: Vec<usize>,
}

impl CodeWord {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl fmt::Display for CodeWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.trim()
        .chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::BadParameter(format!("`{other}` is not a bit"))),
        })
        .collect()
}

/// Parses a 1-based permutation such as `2,1,3` into 0-based form.
pub fn parse_permutation(s: &str, n: usize) -> Result<Vec<usize>> {
    let pi = s
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .ok()
                .filter(|&v| v >= 1)
                .map(|v| v - 1)
                .ok_or_else(|| Error::BadParameter(format!("bad variable `{t}` in permutation")))
        })
        .collect::<Result<Vec<_>>>()?;
    check_permutation(&pi, n)?;
    Ok(pi)
}

fn check_permutation(pi: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    if pi.len() != n || pi.iter().any(|&v| v >= n || std::mem::replace(&mut seen[v], true)) {
        return Err(Error::BadParameter(format!("{pi:?} is not a permutation of {n} variables")));
    }
    Ok(())
}

/// Clause as variable masks (bit `v` for variable `v`): `(vars, positive)`.
type Masks = (u32, u32);

/// Converts a cube index to variable-bit form.
fn to_var_bits(n: usize, x: u32) -> u32 {
    (0..n).filter(|&v| x & var_bit(n, v) != 0).fold(0, |a, v| a | 1 << v)
}

fn from_var_bits(n: usize, xv: u32) -> u32 {
    (0..n).filter(|&v| xv >> v & 1 == 1).fold(0, |a, v| a | var_bit(n, v))
}

fn compile(phi: &CnfFormula) -> Vec<Masks> {
    phi.clauses()
        .iter()
        .map(|c| {
            c.literals().iter().fold((0, 0), |(vars, pos), l| {
                (vars | 1 << l.var, if l.negated { pos } else { pos | 1 << l.var })
            })
        })
        .collect()
}

/// A clause list with per-variable occurrence lists.
struct Indexed {
    clauses: Vec<Masks>,
    occ: Vec<Vec<usize>>,
}

impl Indexed {
    fn new(n: usize, clauses: Vec<Masks>) -> Self {
        let mut occ = vec![Vec::new(); n];
        for (i, &(vars, _)) in clauses.iter().enumerate() {
            for (v, list) in occ.iter_mut().enumerate() {
                if vars >> v & 1 == 1 {
                    list.push(i);
                }
            }
        }
        Indexed { clauses, occ }
    }

    /// Value forced on `v` by a unit clause under the partial assignment
    /// `(fixed, vals)`; an error if two units disagree.
    fn forced(&self, v: usize, fixed: u32, vals: u32) -> Result<Option<bool>> {
        let mut out = None;
        for &i in &self.occ[v] {
            let (vars, pos) = self.clauses[i];
            let satisfied = vars & fixed & !(vals ^ pos) != 0;
            if satisfied || vars & !fixed != 1 << v {
                continue;
            }
            let value = pos >> v & 1 == 1;
            match out {
                Some(prev) if prev != value => {
                    return Err(Error::MalformedCode(format!("x{} is forced both ways", v + 1)));
                }
                _ => out = Some(value),
            }
        }
        Ok(out)
    }
}

fn ppz_encode_core(ix: &Indexed, xv: u32, pi: &[usize], mut fixed: u32, out: &mut Vec<bool>) -> Result<()> {
    for &v in pi {
        if fixed >> v & 1 == 1 {
            continue;
        }
        let bit = xv >> v & 1 == 1;
        match ix.forced(v, fixed, xv)? {
            Some(value) => debug_assert_eq!(value, bit, "satisfying assignments agree with forced values"),
            None => out.push(bit),
        }
        fixed |= 1 << v;
    }
    Ok(())
}

/// Returns the completed assignment and the number of bits consumed.
fn ppz_decode_core(
    ix: &Indexed,
    bits: &[bool],
    pi: &[usize],
    mut fixed: u32,
    mut vals: u32,
) -> Result<(u32, usize)> {
    let mut used = 0;
    for &v in pi {
        if fixed >> v & 1 == 1 {
            continue;
        }
        let value = match ix.forced(v, fixed, vals)? {
            Some(value) => value,
            None => {
                let b = *bits
                    .get(used)
                    .ok_or_else(|| Error::MalformedCode("code ended early".into()))?;
                used += 1;
                b
            }
        };
        fixed |= 1 << v;
        if value {
            vals |= 1 << v;
        }
    }
    Ok((vals, used))
}

fn require_satisfying(phi: &CnfFormula, x: u32) -> Result<()> {
    if (x as u64) >= 1u64 << phi.n() {
        return Err(Error::BadParameter(format!("assignment {x} has more than {} bits", phi.n())));
    }
    if !phi.eval(x) {
        return Err(Error::NotSatisfying);
    }
    Ok(())
}

/// A PPZ coder for one formula, reusable across orders and assignments.
pub struct PpzCodec<'a> {
    phi: &'a CnfFormula,
    ix: Indexed,
}

impl<'a> PpzCodec<'a> {
    pub fn new(phi: &'a CnfFormula) -> Self {
        PpzCodec {
            phi,
            ix: Indexed::new(phi.n(), compile(phi)),
        }
    }

    /// PPZ code of a satisfying assignment `x` under variable order `pi`.
    pub fn encode(&self, x: u32, pi: &[usize]) -> Result<CodeWord> {
        let n = self.phi.n();
        check_permutation(pi, n)?;
        require_satisfying(self.phi, x)?;
        let mut bits = Vec::new();
        ppz_encode_core(&self.ix, to_var_bits(n, x), pi, 0, &mut bits)?;
        Ok(CodeWord {
            bits,
            perm: pi.to_vec(),
        })
    }

    /// Decodes a code from the front of `bits`; returns the assignment and
    /// the number of bits read.
    pub fn decode_prefix(&self, bits: &[bool], pi: &[usize]) -> Result<(u32, usize)> {
        let n = self.phi.n();
        check_permutation(pi, n)?;
        let (xv, used) = ppz_decode_core(&self.ix, bits, pi, 0, 0)?;
        let x = from_var_bits(n, xv);
        if !self.phi.eval(x) {
            return Err(Error::MalformedCode("decoded assignment falsifies the formula".into()));
        }
        Ok((x, used))
    }

    /// Decodes a complete code word.
    pub fn decode(&self, bits: &[bool], pi: &[usize]) -> Result<u32> {
        let (x, used) = self.decode_prefix(bits, pi)?;
        if used != bits.len() {
            return Err(Error::MalformedCode(format!("{} trailing bits", bits.len() - used)));
        }
        Ok(x)
    }
}

pub fn ppz_encode(x: u32, phi: &CnfFormula, pi: &[usize]) -> Result<CodeWord> {
    PpzCodec::new(phi).encode(x, pi)
}

pub fn ppz_decode_prefix(bits: &[bool], phi: &CnfFormula, pi: &[usize]) -> Result<(u32, usize)> {
    PpzCodec::new(phi).decode_prefix(bits, pi)
}

pub fn ppz_decode(bits: &[bool], phi: &CnfFormula, pi: &[usize]) -> Result<u32> {
    PpzCodec::new(phi).decode(bits, pi)
}

/// `s = ⌈log₂ max(|φ|, 1)⌉` and `k = s + 2`.
pub fn width_params(phi: &CnfFormula) -> (usize, usize) {
    let m = phi.size().max(1);
    let s = (usize::BITS - (m - 1).leading_zeros()) as usize;
    (s, s + 2)
}

/// One recursion level of the width-reduced encoder.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum TraceStep {
    /// A falsified cut clause: its index in the current formula and the
    /// variables (1-based) it fixed.
    Cut { index: usize, fixed: Vec<usize> },
    /// Final PPZ pass over the cut formula: bits written and variables forced.
    Ppz { emitted: usize, forced: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EncodingTrace {
    pub s: usize,
    pub k: usize,
    pub steps: Vec<TraceStep>,
}

/// Clauses of `φ` restricted by `(fixed, vals)`, in order.
fn restricted(clauses: &[Masks], fixed: u32, vals: u32) -> Vec<Masks> {
    clauses
        .iter()
        .filter(|&&(vars, pos)| vars & fixed & !(vals ^ pos) == 0)
        .map(|&(vars, pos)| (vars & !fixed, pos & !fixed))
        .collect()
}

/// First `k` literals of a clause (lowest variables first).
fn truncate(c: Masks, k: usize) -> Masks {
    let (vars, pos) = c;
    let mut keep = 0u32;
    let mut rest = vars;
    for _ in 0..k {
        if rest == 0 {
            break;
        }
        let low = rest & rest.wrapping_neg();
        keep |= low;
        rest ^= low;
    }
    (keep, pos & keep)
}

/// Lexicographic key of a clause: its literals `(var, negated)` in order.
fn literal_key(c: Masks) -> Vec<(u32, bool)> {
    let (vars, pos) = c;
    (0..32).filter(|&v| vars >> v & 1 == 1).map(|v| (v, pos >> v & 1 == 0)).collect()
}

fn falsifies(xv: u32, c: Masks) -> bool {
    let (vars, pos) = c;
    vars & !(xv ^ pos) == 0
}

/// Width-reduced code of an isolated solution, with its trace.
pub fn width_reduce_encode_traced(x: u32, phi: &CnfFormula, pi: &[usize]) -> Result<(CodeWord, EncodingTrace)> {
    let n = phi.n();
    check_permutation(pi, n)?;
    require_satisfying(phi, x)?;
    if !is_isolated(phi, x) {
        return Err(Error::NotIsolated);
    }
    let (s, k) = width_params(phi);
    let base = compile(phi);
    let xv = to_var_bits(n, x);
    let mut fixed = 0u32;
    let mut bits = Vec::new();
    let mut steps = Vec::new();
    loop {
        let current = restricted(&base, fixed, xv);
        let cut: Vec<Masks> = current.iter().map(|&c| truncate(c, k)).collect();
        let first_false = cut
            .iter()
            .enumerate()
            .filter(|(_, &c)| falsifies(xv, c))
            .min_by(|a, b| literal_key(*a.1).cmp(&literal_key(*b.1)).then(a.0.cmp(&b.0)));
        match first_false {
            None => {
                bits.push(false);
                let before = bits.len();
                ppz_encode_core(&Indexed::new(n, cut), xv, pi, fixed, &mut bits)?;
                let emitted = bits.len() - before;
                let free = n - fixed.count_ones() as usize;
                steps.push(TraceStep::Ppz {
                    emitted,
                    forced: free - emitted,
                });
                break;
            }
            Some((index, &(vars, _))) => {
                debug_assert_eq!(vars.count_ones() as usize, k);
                bits.push(true);
                bits.extend((0..s).rev().map(|b| index >> b & 1 == 1));
                fixed |= vars;
                steps.push(TraceStep::Cut {
                    index,
                    fixed: (0..n).filter(|&v| vars >> v & 1 == 1).map(|v| v + 1).collect(),
                });
            }
        }
    }
    Ok((
        CodeWord {
            bits,
            perm: pi.to_vec(),
        },
        EncodingTrace { s, k, steps },
    ))
}

pub fn width_reduce_encode(x: u32, phi: &CnfFormula, pi: &[usize]) -> Result<CodeWord> {
    Ok(width_reduce_encode_traced(x, phi, pi)?.0)
}

/// Decodes a width-reduced code from the front of `bits`.
pub fn width_reduce_decode_prefix(bits: &[bool], phi: &CnfFormula, pi: &[usize]) -> Result<(u32, usize)> {
    let n = phi.n();
    check_permutation(pi, n)?;
    let (s, k) = width_params(phi);
    let base = compile(phi);
    let mut fixed = 0u32;
    let mut vals = 0u32;
    let mut pos = 0;
    let read = |pos: &mut usize| -> Result<bool> {
        let b = *bits
            .get(*pos)
            .ok_or_else(|| Error::MalformedCode("code ended early".into()))?;
        *pos += 1;
        Ok(b)
    };
    loop {
        let current = restricted(&base, fixed, vals);
        let cut: Vec<Masks> = current.iter().map(|&c| truncate(c, k)).collect();
        if !read(&mut pos)? {
            let (xv, used) = ppz_decode_core(&Indexed::new(n, cut), &bits[pos..], pi, fixed, vals)?;
            pos += used;
            let x = from_var_bits(n, xv);
            if !phi.eval(x) {
                return Err(Error::MalformedCode("decoded assignment falsifies the formula".into()));
            }
            return Ok((x, pos));
        }
        let mut index = 0usize;
        for _ in 0..s {
            index = index << 1 | usize::from(read(&mut pos)?);
        }
        let &(vars, lit_pos) = cut
            .get(index)
            .ok_or_else(|| Error::MalformedCode(format!("clause index {index} out of range")))?;
        if vars.count_ones() as usize != k {
            return Err(Error::MalformedCode(format!("clause {index} has fewer than {k} literals")));
        }
        // Falsify every literal of the cut clause.
        fixed |= vars;
        vals |= vars & !lit_pos;
    }
}

pub fn width_reduce_decode(bits: &[bool], phi: &CnfFormula, pi: &[usize]) -> Result<u32> {
    let (x, used) = width_reduce_decode_prefix(bits, phi, pi)?;
    if used != bits.len() {
        return Err(Error::MalformedCode(format!("{} trailing bits", bits.len() - used)));
    }
    Ok(x)
}

/// True iff no word is a proper or equal prefix of another.
pub fn is_prefix_free(words: &[Vec<bool>]) -> bool {
    let mut sorted: Vec<&Vec<bool>> = words.iter().collect();
    sorted.sort();
    // In lexicographic order a prefix sorts immediately before some extension
    // of it, and then also before its successor in the list.
    sorted.windows(2).all(|w| !w[1].starts_with(w[0]))
}

/// `Σ 2^{-|w|}`.
pub fn kraft_sum(words: &[Vec<bool>]) -> Rational {
    words.iter().fold(Rational::zero(), |acc, w| {
        acc + Rational::new(BigInt::one(), BigInt::one() << w.len())
    })
}

/// Exact average of `encode(x, φ, π).len()` over all `n!` orders `π`.
pub fn average_length_over_permutations(
    x: u32,
    phi: &CnfFormula,
    encode: impl Fn(u32, &CnfFormula, &[usize]) -> Result<CodeWord>,
) -> Result<Rational> {
    let n = phi.n();
    check_range("n", n, 0, MAX_PERMUTATION_SWEEP_VARS)?;
    let mut total = 0u64;
    let mut count = 0u64;
    for pi in itertools::Itertools::permutations(0..n, n) {
        total += encode(x, phi, &pi)?.len() as u64;
        count += 1;
    }
    Ok(Rational::new(BigInt::from(total), BigInt::from(count.max(1))))
}

/// Isolated-solution count against `2^{n - n/(s+2) + 1}`.
#[derive(Debug, Clone, Serialize)]
pub struct CountBoundReport {
    pub n: usize,
    pub size: usize,
    pub s: usize,
    pub count: usize,
    /// The bound's exponent `n - n/(s+2) + 1`.
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub exponent: Rational,
    pub bound_approx: f64,
    pub verdict: Verdict,
}

impl CountBoundReport {
    pub fn ok(&self) -> bool {
        self.verdict.ok
    }
}

/// Compares `count ≤ 2^{n - n/(s+2) + 1}` exactly as
/// `count^{s+2} ≤ 2^{(n+1)(s+2) - n}`.
pub fn count_bound_check(phi: &CnfFormula) -> Result<CountBoundReport> {
    let n = phi.n();
    check_range("n", n, 0, MAX_COUNT_VARS)?;
    let count = isolated_solutions(phi)?.len();
    let (s, k) = width_params(phi);
    let lhs = BigUint::from(count).pow(k as u32);
    let rhs_exp = (n + 1) * k - n;
    let ok = lhs <= BigUint::one() << rhs_exp;
    let exponent = rat(n + 1) - Rational::new(BigInt::from(n), BigInt::from(k));
    let bound_approx = 2f64.powf(crate::report::approx(&exponent));
    Ok(CountBoundReport {
        n,
        size: phi.size(),
        s,
        count,
        verdict: Verdict::checked(
            "count^(s+2) <= 2^((n+1)(s+2)-n)",
            format!("{count}^{k}"),
            Relation::Le,
            format!("2^{rhs_exp}"),
            ok,
        ),
        exponent,
        bound_approx,
    })
}

/// Rational bracket `[lo, hi]` around `log₂ v` from the bit length of `v^q`.
fn log2_bracket(v: u64, q: u32) -> (Rational, Rational) {
    assert!(v >= 1);
    if v.is_power_of_two() {
        let e = rat(v.trailing_zeros() as usize);
        return (e.clone(), e);
    }
    let bits = BigUint::from(v).pow(q).bits();
    let qq = BigInt::from(q);
    (
        Rational::new(BigInt::from(bits - 1), qq.clone()),
        Rational::new(BigInt::from(bits), qq),
    )
}

#[derive(Debug, Clone, Serialize)]
pub struct TradeoffReport {
    pub n: usize,
    pub size: usize,
    pub satisfying: u64,
    /// `Pr_{x odd}[φ(x) = 1]`.
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub advantage: Rational,
    pub verdict: Verdict,
}

impl TradeoffReport {
    pub fn ok(&self) -> bool {
        self.verdict.ok
    }
}

/// Checks `advantage ≤ 2^{-n/(log₂|φ| + 3) + 2}` for a one-sided parity
/// approximator. With `c` satisfying inputs this is
/// `n ≤ (n + 1 - log₂ c)(log₂|φ| + 3)`, decided with certified brackets on
/// both logarithms.
pub fn one_sided_parity_tradeoff(n: usize, phi: &CnfFormula) -> Result<TradeoffReport> {
    if phi.n() != n {
        return Err(Error::DimensionMismatch { expected: n, got: phi.n() });
    }
    let parity = make_parity(n)?;
    if !phi.is_one_sided_under(&parity)? {
        return Err(Error::NotOneSided);
    }
    let c = phi.to_truth_table()?.ones_count() as u64;
    let advantage = Rational::new(BigInt::from(c), BigInt::one() << (n - 1));
    let m = phi.size() as u64;
    let (ok, lhs, rhs) = if c == 0 {
        (true, "0".to_string(), "positive bound".to_string())
    } else {
        let mut decided = None;
        for q in [64u32, 256, 1024, 4096] {
            let (c_lo, c_hi) = log2_bracket(c, q);
            let (m_lo, m_hi) = log2_bracket(m, q);
            let low = (rat(n + 1) - c_hi) * (m_lo + rat(3));
            let high = (rat(n + 1) - c_lo) * (m_hi + rat(3));
            if rat(n) <= low {
                decided = Some((true, low));
                break;
            }
            if rat(n) > high {
                decided = Some((false, high));
                break;
            }
        }
        match decided {
            Some((ok, side)) => (ok, n.to_string(), format!("(n+1-log2 c)(log2|phi|+3) ~ {}", rational_string(&side))),
            None => (false, n.to_string(), "undecided at 4096-fold precision".to_string()),
        }
    };
    Ok(TradeoffReport {
        n,
        size: phi.size(),
        satisfying: c,
        advantage,
        verdict: Verdict::checked("n <= (n+1-log2 c)(log2|phi|+3)", lhs, Relation::Le, rhs, ok),
    })
}

/// Counts, Kraft sums and prefix-freeness for both encoders under the given
/// orders.
#[derive(Debug, Clone, Serialize)]
pub struct AuditReport {
    pub count: CountBoundReport,
    pub permutations: usize,
    pub ppz_prefix_free: bool,
    pub width_reduced_prefix_free: bool,
    /// Largest Kraft sum over the orders, per encoder.
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub ppz_kraft_max: Rational,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub width_reduced_kraft_max: Rational,
    pub roundtrip: bool,
}

impl AuditReport {
    pub fn ok(&self) -> bool {
        self.count.ok()
            && self.ppz_prefix_free
            && self.width_reduced_prefix_free
            && self.ppz_kraft_max <= Rational::one()
            && self.width_reduced_kraft_max <= Rational::one()
            && self.roundtrip
    }
}

pub fn audit(phi: &CnfFormula, perms: &[Vec<usize>]) -> Result<AuditReport> {
    let count = count_bound_check(phi)?;
    let iso = isolated_solutions(phi)?;
    let mut report = AuditReport {
        count,
        permutations: perms.len(),
        ppz_prefix_free: true,
        width_reduced_prefix_free: true,
        ppz_kraft_max: Rational::zero(),
        width_reduced_kraft_max: Rational::zero(),
        roundtrip: true,
    };
    for pi in perms {
        let mut ppz = Vec::new();
        let mut wr = Vec::new();
        for &x in &iso.points {
            let a = ppz_encode(x, phi, pi)?;
            let b = width_reduce_encode(x, phi, pi)?;
            report.roundtrip &= ppz_decode(&a.bits, phi, pi)? == x && width_reduce_decode(&b.bits, phi, pi)? == x;
            ppz.push(a.bits);
            wr.push(b.bits);
        }
        report.ppz_prefix_free &= is_prefix_free(&ppz);
        report.width_reduced_prefix_free &= is_prefix_free(&wr);
        report.ppz_kraft_max = report.ppz_kraft_max.clone().max(kraft_sum(&ppz));
        report.width_reduced_kraft_max = report.width_reduced_kraft_max.clone().max(kraft_sum(&wr));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{Clause, Literal};
    use crate::io::parse_dimacs;
    use ratlp::ratio;

    fn xor2() -> CnfFormula {
        parse_dimacs("p cnf 2 2\n1 2 0\n-1 -2 0\n").unwrap()
    }

    fn parity_cnf(n: usize) -> CnfFormula {
        let clauses = (0..1u32 << n)
            .filter(|x| x.count_ones() % 2 == 0)
            .map(|x| Clause::excluding(n, x))
            .collect();
        CnfFormula::new(n, clauses).unwrap()
    }

    fn bits(s: &str) -> Vec<bool> {
        parse_bits(s).unwrap()
    }

    #[test]
    fn isolated_examples() {
        let p3 = parity_cnf(3);
        assert_eq!(isolated_solutions(&p3).unwrap().points, vec![1, 2, 4, 7]);
        assert!(isolated_solutions(&CnfFormula::top(1).unwrap()).unwrap().is_empty());
    }

    #[test]
    fn ppz_examples() {
        let c = ppz_encode(0b01, &xor2(), &[0, 1]).unwrap();
        assert_eq!(c.to_string(), "0");
        assert_eq!(ppz_decode(&bits("0"), &xor2(), &[0, 1]).unwrap(), 0b01);
        let top = CnfFormula::top(3).unwrap();
        let c = ppz_encode(0b110, &top, &[2, 0, 1]).unwrap();
        assert_eq!(c.to_string(), "011");
        assert_eq!(ppz_decode(&c.bits, &top, &[2, 0, 1]).unwrap(), 0b110);
        let units = parse_dimacs("p cnf 3 3\n1 0\n2 0\n3 0\n").unwrap();
        for pi in itertools::Itertools::permutations(0..3, 3) {
            let c = ppz_encode(0b111, &units, &pi).unwrap();
            assert!(c.is_empty());
            assert_eq!(ppz_decode(&c.bits, &units, &pi).unwrap(), 0b111);
        }
        assert!(matches!(ppz_encode(0b11, &xor2(), &[0, 1]), Err(Error::NotSatisfying)));
        assert!(ppz_encode(0b01, &xor2(), &[0, 0]).is_err());
    }

    #[test]
    fn ppz_decode_errors() {
        assert!(matches!(ppz_decode(&[], &xor2(), &[0, 1]), Err(Error::MalformedCode(_))));
        assert!(matches!(ppz_decode(&bits("01"), &xor2(), &[0, 1]), Err(Error::MalformedCode(_))));
        let contradictory = parse_dimacs("p cnf 2 2\n1 0\n-1 0\n").unwrap();
        assert!(matches!(ppz_decode(&[], &contradictory, &[0, 1]), Err(Error::MalformedCode(_))));
    }

    #[test]
    fn ppz_roundtrip_parity3_all_orders() {
        let p3 = parity_cnf(3);
        for pi in itertools::Itertools::permutations(0..3, 3) {
            let mut words = Vec::new();
            for x in isolated_solutions(&p3).unwrap().points {
                let c = ppz_encode(x, &p3, &pi).unwrap();
                assert_eq!(ppz_decode(&c.bits, &p3, &pi).unwrap(), x);
                words.push(c.bits);
            }
            assert!(is_prefix_free(&words));
            assert!(kraft_sum(&words) <= Rational::one());
        }
    }

    #[test]
    fn width_params_examples() {
        assert_eq!(width_params(&CnfFormula::top(2).unwrap()), (0, 2));
        assert_eq!(width_params(&xor2()), (1, 3));
        assert_eq!(width_params(&parity_cnf(4)), (3, 5));
        let five = parse_dimacs("p cnf 1 5\n1 0\n1 0\n1 0\n1 0\n1 0\n").unwrap();
        assert_eq!(width_params(&five), (3, 5));
    }

    #[test]
    fn width_reduce_plain_when_narrow() {
        let p3 = parity_cnf(3);
        // s = 2, k = 4 ≥ 3 = width: marker 0 then the PPZ code
        for x in [1u32, 2, 4, 7] {
            let c = width_reduce_encode(x, &p3, &[0, 1, 2]).unwrap();
            let plain = ppz_encode(x, &p3, &[0, 1, 2]).unwrap();
            assert!(!c.bits[0]);
            assert_eq!(&c.bits[1..], &plain.bits[..]);
            assert_eq!(width_reduce_decode(&c.bits, &p3, &[0, 1, 2]).unwrap(), x);
        }
    }

    /// `(x1 ∨ … ∨ x6) ∧ ∧_{i≤5} (¬xi ∨ ¬x6)`: |φ| = 6 so s = 3, k = 5.
    fn wide_example() -> CnfFormula {
        parse_dimacs("p cnf 6 6\n1 2 3 4 5 6 0\n-1 -6 0\n-2 -6 0\n-3 -6 0\n-4 -6 0\n-5 -6 0\n").unwrap()
    }

    #[test]
    fn width_reduce_cut_example() {
        let phi = wide_example();
        assert_eq!(width_params(&phi), (3, 5));
        let x = 0b000001;
        assert!(is_isolated(&phi, x));
        let pi: Vec<usize> = (0..6).collect();
        let (c, trace) = width_reduce_encode_traced(x, &phi, &pi).unwrap();
        // cut clause 0 to x1..x5, then x6 is forced by the unit left behind
        assert_eq!(c.to_string(), "10000");
        assert_eq!(
            trace.steps,
            vec![
                TraceStep::Cut { index: 0, fixed: vec![1, 2, 3, 4, 5] },
                TraceStep::Ppz { emitted: 0, forced: 1 },
            ]
        );
        assert_eq!(width_reduce_decode(&c.bits, &phi, &pi).unwrap(), x);
        assert!(matches!(width_reduce_encode(0b100000, &phi, &pi), Err(Error::NotIsolated)));
    }

    #[test]
    fn width_reduce_roundtrip_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(77);
        for _ in 0..30 {
            let n = rng.gen_range(4..=9);
            let m = rng.gen_range(1..=12);
            let clauses: Vec<Clause> = (0..m)
                .map(|_| {
                    let w = rng.gen_range(1..=n);
                    let mut vars: Vec<usize> = (0..n).collect();
                    for i in 0..w {
                        let j = rng.gen_range(i..n);
                        vars.swap(i, j);
                    }
                    Clause::new(vars[..w].iter().map(|&v| Literal::with_exponent(v, rng.gen()))).unwrap()
                })
                .collect();
            let phi = CnfFormula::new(n, clauses).unwrap();
            let mut pi: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                pi.swap(i, rng.gen_range(0..=i));
            }
            let iso = isolated_solutions(&phi).unwrap();
            let mut words = Vec::new();
            for &x in &iso.points {
                let c = width_reduce_encode(x, &phi, &pi).unwrap();
                assert_eq!(width_reduce_decode(&c.bits, &phi, &pi).unwrap(), x);
                words.push(c.bits);
            }
            assert!(is_prefix_free(&words));
            assert!(kraft_sum(&words) <= Rational::one());
        }
    }

    #[test]
    fn width_reduce_decoder_rejects_garbage() {
        let phi = wide_example();
        let pi: Vec<usize> = (0..6).collect();
        // index 1 points at a width-2 clause, not a width-5 cut clause
        assert!(matches!(width_reduce_decode(&bits("1001"), &phi, &pi), Err(Error::MalformedCode(_))));
        assert!(matches!(width_reduce_decode(&bits("1111"), &phi, &pi), Err(Error::MalformedCode(_))));
        assert!(matches!(width_reduce_decode(&bits("1"), &phi, &pi), Err(Error::MalformedCode(_))));
    }

    #[test]
    fn count_bound_examples() {
        let r = count_bound_check(&parity_cnf(4)).unwrap();
        assert_eq!((r.count, r.s), (8, 3));
        assert_eq!(r.exponent, ratio(21, 5));
        assert!(r.ok());
        assert!((r.bound_approx - 18.379).abs() < 0.01);
        let single = parse_dimacs("p cnf 3 1\n1 2 3 0\n").unwrap();
        let r = count_bound_check(&single).unwrap();
        assert_eq!(r.count, 0);
        assert!(r.ok());
    }

    #[test]
    fn prefix_free_and_kraft() {
        assert!(is_prefix_free(&[bits("0"), bits("10"), bits("11")]));
        assert!(!is_prefix_free(&[bits("0"), bits("01")]));
        assert!(!is_prefix_free(&[bits("0"), bits("1"), bits("0")]));
        assert!(!is_prefix_free(&[bits("0"), bits("1"), bits("00")]));
        assert!(!is_prefix_free(&[bits(""), bits("1")]));
        assert_eq!(kraft_sum(&[bits("0"), bits("10"), bits("11")]), Rational::one());
    }

    #[test]
    fn tradeoff_examples() {
        let p4 = parity_cnf(4);
        let r = one_sided_parity_tradeoff(4, &p4).unwrap();
        assert_eq!(r.advantage, Rational::one());
        assert!(r.ok());
        let contradiction = parse_dimacs("p cnf 3 2\n1 0\n-1 0\n").unwrap();
        let r = one_sided_parity_tradeoff(3, &contradiction).unwrap();
        assert_eq!(r.advantage, Rational::zero());
        assert!(r.ok());
        assert!(matches!(
            one_sided_parity_tradeoff(2, &CnfFormula::top(2).unwrap()),
            Err(Error::NotOneSided)
        ));
    }

    #[test]
    fn log2_brackets_contain_log() {
        for v in 1u64..200 {
            let (lo, hi) = log2_bracket(v, 64);
            let l = (v as f64).log2();
            assert!(crate::report::approx(&lo) <= l + 1e-12 && l <= crate::report::approx(&hi) + 1e-12);
        }
    }

    #[test]
    fn permutation_parsing() {
        assert_eq!(parse_permutation("2,1,3", 3).unwrap(), vec![1, 0, 2]);
        assert!(parse_permutation("1,1,3", 3).is_err());
        assert!(parse_permutation("0,1", 2).is_err());
    }
}
