//! Literals, clauses, CNF formulas and OR-of-CNF (depth-3) formulas.
//!
//! Assignments are `u32` cube indices using the bit convention of
//! [`crate::boolfn`]. Variables are 0-based internally; text output uses the
//! 1-based names `x1..xn`.

use std::cmp::Ordering;
use std::fmt;

use crate::boolfn::{var_bit, var_value, TruthTable, MAX_VARS};
use crate::error::{check_range, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub var: usize,
    pub negated: bool,
}

impl Literal {
    pub fn pos(var: usize) -> Self {
        Literal { var, negated: false }
    }

    pub fn neg(var: usize) -> Self {
        Literal { var, negated: true }
    }

    /// The literal `x_var^b`: `x` itself when `b = 1`, `¬x` when `b = 0`.
    pub fn with_exponent(var: usize, b: bool) -> Self {
        Literal { var, negated: !b }
    }

    pub fn eval(&self, n: usize, x: u32) -> bool {
        var_value(n, x, self.var) != self.negated
    }

    /// DIMACS encoding: `var + 1`, negative when negated.
    pub fn to_dimacs(&self) -> i64 {
        let v = self.var as i64 + 1;
        if self.negated {
            -v
        } else {
            v
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            write!(f, "~x{}", self.var + 1)
        } else {
            write!(f, "x{}", self.var + 1)
        }
    }
}

/// A disjunction of literals, sorted by variable with no repeats.
///
/// The derived order compares the literal sequences lexicographically, which
/// is the clause order used when picking "the first falsified clause".
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Clause {
    lits: Vec<Literal>,
}

impl Clause {
    /// Canonicalizes `lits`; fails on a tautology.
    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Result<Self> {
        let mut lits: Vec<Literal> = lits.into_iter().collect();
        lits.sort();
        lits.dedup();
        if let Some(w) = lits.windows(2).find(|w| w[0].var == w[1].var) {
            return Err(Error::Tautology(w[0].var + 1));
        }
        Ok(Clause { lits })
    }

    pub fn empty() -> Self {
        Clause { lits: Vec::new() }
    }

    /// The unique clause false exactly at `x` over all `n` variables.
    pub fn excluding(n: usize, x: u32) -> Self {
        Clause {
            lits: (0..n).map(|v| Literal::with_exponent(v, !var_value(n, x, v))).collect(),
        }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn width(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn is_monotone(&self) -> bool {
        self.lits.iter().all(|l| !l.negated)
    }

    pub fn contains_var(&self, var: usize) -> bool {
        self.lits.iter().any(|l| l.var == var)
    }

    pub fn max_var(&self) -> Option<usize> {
        self.lits.last().map(|l| l.var)
    }

    /// First `k` literals in canonical order.
    pub fn truncate(&self, k: usize) -> Clause {
        Clause {
            lits: self.lits.iter().take(k).copied().collect(),
        }
    }

    /// Index masks `(vars, positive)` for fast evaluation: the clause is true
    /// at `x` iff `(x ^ !positive) & vars != 0`.
    pub fn masks(&self, n: usize) -> (u32, u32) {
        let mut vars = 0;
        let mut pos = 0;
        for l in &self.lits {
            vars |= var_bit(n, l.var);
            if !l.negated {
                pos |= var_bit(n, l.var);
            }
        }
        (vars, pos)
    }

    pub fn eval(&self, n: usize, x: u32) -> bool {
        self.lits.iter().any(|l| l.eval(n, x))
    }

    /// The unique point of the subcube of falsifying assignments with all
    /// free variables at 0, plus the mask of the fixed variables.
    fn falsifying_cube(&self, n: usize) -> (u32, u32) {
        let (vars, pos) = self.masks(n);
        (vars & !pos, vars)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lits.is_empty() {
            return write!(f, "()");
        }
        write!(f, "(")?;
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    n: usize,
    clauses: Vec<Clause>,
}

impl CnfFormula {
    pub fn new(n: usize, clauses: Vec<Clause>) -> Result<Self> {
        check_range("n", n, 0, MAX_VARS)?;
        for c in &clauses {
            if let Some(v) = c.max_var() {
                if v >= n {
                    return Err(Error::BadParameter(format!("clause {c} mentions a variable beyond n = {n}")));
                }
            }
        }
        Ok(CnfFormula { n, clauses })
    }

    /// The empty conjunction (constant 1).
    pub fn top(n: usize) -> Result<Self> {
        Self::new(n, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn into_clauses(self) -> Vec<Clause> {
        self.clauses
    }

    /// `|φ|`, the number of clauses.
    pub fn size(&self) -> usize {
        self.clauses.len()
    }

    pub fn max_width(&self) -> usize {
        self.clauses.iter().map(Clause::width).max().unwrap_or(0)
    }

    pub fn eval(&self, x: u32) -> bool {
        self.clauses.iter().all(|c| c.eval(self.n, x))
    }

    /// Starts from the all-ones table and clears each clause's falsifying subcube.
    pub fn to_truth_table(&self) -> Result<TruthTable> {
        let mut t = TruthTable::constant(self.n, true)?;
        let full = (t.len() - 1) as u32;
        for c in &self.clauses {
            let (base, fixed) = c.falsifying_cube(self.n);
            let free = full & !fixed;
            let mut sub = free;
            loop {
                t.set(base | sub, false);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & free;
            }
        }
        Ok(t)
    }

    /// `φ^-1(1) ⊆ f^-1(1)`.
    pub fn is_one_sided_under(&self, f: &TruthTable) -> Result<bool> {
        if f.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: f.n(),
                got: self.n,
            });
        }
        self.to_truth_table()?.implies(f)
    }

    pub fn is_monotone(&self) -> bool {
        self.clauses.iter().all(Clause::is_monotone)
    }

    /// Applies a partial assignment, keeping the variable count. Satisfied
    /// clauses disappear and falsified literals are dropped.
    pub fn restrict(&self, assignment: &[(usize, bool)]) -> Result<Self> {
        let mut value: Vec<Option<bool>> = vec![None; self.n];
        for &(v, b) in assignment {
            check_range("variable", v, 0, self.n.saturating_sub(1))?;
            value[v] = Some(b);
        }
        let clauses = self
            .clauses
            .iter()
            .filter(|c| !c.lits.iter().any(|l| value[l.var] == Some(!l.negated)))
            .map(|c| Clause {
                lits: c.lits.iter().filter(|l| value[l.var].is_none()).copied().collect(),
            })
            .collect();
        Ok(CnfFormula { n: self.n, clauses })
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return write!(f, "1");
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Free-function form of [`CnfFormula::restrict`].
pub fn restrict_formula(phi: &CnfFormula, assignment: &[(usize, bool)]) -> Result<CnfFormula> {
    phi.restrict(assignment)
}

pub fn is_monotone_cnf(phi: &CnfFormula) -> bool {
    phi.is_monotone()
}

/// An OR of CNF formulas over a common variable set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DepthThreeFormula {
    n: usize,
    disjuncts: Vec<CnfFormula>,
}

impl DepthThreeFormula {
    pub fn new(n: usize, disjuncts: Vec<CnfFormula>) -> Result<Self> {
        check_range("n", n, 0, MAX_VARS)?;
        if let Some(bad) = disjuncts.iter().find(|d| d.n != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: bad.n,
            });
        }
        Ok(DepthThreeFormula { n, disjuncts })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn disjuncts(&self) -> &[CnfFormula] {
        &self.disjuncts
    }

    /// Sum of the disjuncts' clause counts.
    pub fn size(&self) -> usize {
        self.disjuncts.iter().map(CnfFormula::size).sum()
    }

    pub fn eval(&self, x: u32) -> bool {
        self.disjuncts.iter().any(|d| d.eval(x))
    }

    pub fn to_truth_table(&self) -> Result<TruthTable> {
        let mut t = TruthTable::constant(self.n, false)?;
        for d in &self.disjuncts {
            t = t.or(&d.to_truth_table()?)?;
        }
        Ok(t)
    }

    /// Drops disjuncts that accept nothing.
    pub fn prune_unsatisfiable(&self) -> Result<Self> {
        let mut kept = Vec::new();
        for d in &self.disjuncts {
            if d.to_truth_table()?.ones_count() > 0 {
                kept.push(d.clone());
            }
        }
        Ok(DepthThreeFormula { n: self.n, disjuncts: kept })
    }
}

impl fmt::Display for DepthThreeFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.disjuncts.is_empty() {
            return write!(f, "0");
        }
        for (i, d) in self.disjuncts.iter().enumerate() {
            if i > 0 {
                write!(f, " OR ")?;
            }
            write!(f, "[{d}]")?;
        }
        Ok(())
    }
}

/// Compares clauses by the lexicographic order of their first `k` literals.
pub fn cmp_truncated(a: &Clause, b: &Clause, k: usize) -> Ordering {
    a.lits.iter().take(k).cmp(b.lits.iter().take(k))
}
