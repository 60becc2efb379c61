//! Exact linear programming over the rationals.
//!
//! Problems are stated as an objective over nonnegative variables together
//! with a list of `≤`, `≥` or `=` rows. [`solve`] runs a two-phase revised
//! simplex with Bland's rule, so it never cycles and never rounds. Every
//! optimal answer carries a dual vector; [`verify_certificate`] re-checks
//! primal feasibility, dual feasibility and equality of the two objective
//! values from scratch.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use thiserror::Error;

mod simplex;

pub type Rational = BigRational;

/// Shorthand for an integer-valued rational.
pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

/// Shorthand for `num / den`.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LpError {
    #[error("constraint {row} references variable {var} but the problem has {num_vars} variables")]
    VariableOutOfRange { row: usize, var: usize, num_vars: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn flipped(self) -> Self {
        match self {
            Relation::Le => Relation::Ge,
            Relation::Ge => Relation::Le,
            Relation::Eq => Relation::Eq,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }
}

/// One row `Σ coeffs[k].1 · x[coeffs[k].0]  rel  rhs`, stored sparsely.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, Rational)>,
    pub relation: Relation,
    pub rhs: Rational,
}

impl Constraint {
    pub fn new(coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) -> Self {
        Constraint {
            coeffs,
            relation,
            rhs,
        }
    }

    fn lhs(&self, x: &[Rational]) -> Rational {
        self.coeffs
            .iter()
            .fold(Rational::zero(), |acc, (j, a)| acc + a * &x[*j])
    }
}

/// A linear program over variables `x ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub direction: Direction,
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
}

impl LpProblem {
    pub fn new(direction: Direction, objective: Vec<Rational>) -> Self {
        LpProblem {
            direction,
            objective,
            constraints: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, Rational)>, relation: Relation, rhs: Rational) {
        self.constraints.push(Constraint::new(coeffs, relation, rhs));
    }

    fn validate(&self) -> Result<(), LpError> {
        let num_vars = self.num_vars();
        for (row, c) in self.constraints.iter().enumerate() {
            if let Some((var, _)) = c.coeffs.iter().find(|(j, _)| *j >= num_vars) {
                return Err(LpError::VariableOutOfRange {
                    row,
                    var: *var,
                    num_vars,
                });
            }
        }
        Ok(())
    }

    pub fn objective_value(&self, x: &[Rational]) -> Rational {
        self.objective
            .iter()
            .zip(x)
            .fold(Rational::zero(), |acc, (c, v)| acc + c * v)
    }
}

impl fmt::Display for LpProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dir = match self.direction {
            Direction::Minimize => "minimize",
            Direction::Maximize => "maximize",
        };
        write!(f, "{dir}")?;
        for (j, c) in self.objective.iter().enumerate() {
            if !c.is_zero() {
                write!(f, " {c:+}*x{j}")?;
            }
        }
        writeln!(f)?;
        for c in &self.constraints {
            write!(f, "  ")?;
            for (j, a) in &c.coeffs {
                write!(f, " {a:+}*x{j}")?;
            }
            writeln!(f, " {} {}", c.relation.symbol(), c.rhs)?;
        }
        write!(f, "  x >= 0 ({} vars)", self.num_vars())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of [`solve`].
///
/// When `status` is [`Status::Optimal`], `primal` has one entry per variable,
/// `dual` one entry per constraint, and `objective` equals both
/// `c·primal` and `rhs·dual`. For the other statuses the vectors are empty.
///
/// Dual sign conventions follow the textbook dual of the stated problem: for
/// a minimization, `Aᵀy ≤ c` with `y ≥ 0` on `≥` rows and `y ≤ 0` on `≤`
/// rows; for a maximization, `Aᵀy ≥ c` with `y ≥ 0` on `≤` rows and `y ≤ 0`
/// on `≥` rows. Equality rows have free duals.
#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: Status,
    pub primal: Vec<Rational>,
    pub dual: Vec<Rational>,
    pub objective: Rational,
    pub pivots: usize,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }
}

pub fn solve(problem: &LpProblem) -> Result<LpSolution, LpError> {
    problem.validate()?;
    Ok(simplex::run(problem))
}

/// Exact optimality check of a claimed primal/dual pair.
pub fn verify_certificate(problem: &LpProblem, solution: &LpSolution) -> bool {
    if solution.status != Status::Optimal
        || solution.primal.len() != problem.num_vars()
        || solution.dual.len() != problem.constraints.len()
    {
        return false;
    }
    primal_feasible(problem, &solution.primal)
        && dual_feasible(problem, &solution.dual)
        && {
            let primal_obj = problem.objective_value(&solution.primal);
            let dual_obj = dual_objective(problem, &solution.dual);
            primal_obj == dual_obj && primal_obj == solution.objective
        }
}

pub fn primal_feasible(problem: &LpProblem, x: &[Rational]) -> bool {
    if x.len() != problem.num_vars() || x.iter().any(|v| v.is_negative()) {
        return false;
    }
    problem.constraints.iter().all(|c| {
        let lhs = c.lhs(x);
        match c.relation {
            Relation::Le => lhs <= c.rhs,
            Relation::Ge => lhs >= c.rhs,
            Relation::Eq => lhs == c.rhs,
        }
    })
}

pub fn dual_feasible(problem: &LpProblem, y: &[Rational]) -> bool {
    if y.len() != problem.constraints.len() {
        return false;
    }
    let maximize = problem.direction == Direction::Maximize;
    let signs_ok = problem.constraints.iter().zip(y).all(|(c, yi)| {
        let rel = if maximize { c.relation.flipped() } else { c.relation };
        match rel {
            Relation::Ge => !yi.is_negative(),
            Relation::Le => !yi.is_positive(),
            Relation::Eq => true,
        }
    });
    if !signs_ok {
        return false;
    }
    let mut aty = vec![Rational::zero(); problem.num_vars()];
    for (c, yi) in problem.constraints.iter().zip(y) {
        for (j, a) in &c.coeffs {
            aty[*j] += a * yi;
        }
    }
    aty.iter().zip(&problem.objective).all(|(lhs, cj)| {
        if maximize {
            lhs >= cj
        } else {
            lhs <= cj
        }
    })
}

pub fn dual_objective(problem: &LpProblem, y: &[Rational]) -> Rational {
    problem
        .constraints
        .iter()
        .zip(y)
        .fold(Rational::zero(), |acc, (c, yi)| acc + &c.rhs * yi)
}

/// `⌈q⌉` for a rational.
pub fn ceil(q: &Rational) -> BigInt {
    q.ceil().to_integer()
}
