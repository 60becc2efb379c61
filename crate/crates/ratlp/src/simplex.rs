//! Two-phase revised simplex over exact rationals.
//!
//! Rows are normalized to nonnegative right-hand sides, then every row gets a
//! slack (`≤`), a surplus plus an artificial (`≥`) or just an artificial
//! (`=`). The basis inverse is kept dense; it is only `m × m` and the
//! instances this crate serves have few rows and many columns. Entering and
//! leaving variables are chosen by Bland's rule.

use num_traits::{One, Signed, Zero};

use crate::{Direction, LpProblem, LpSolution, Rational, Relation, Status};

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Structural,
    Slack,
    Artificial,
}

struct Tableau {
    /// Sparse columns of the standard-form matrix.
    columns: Vec<Vec<(usize, Rational)>>,
    kinds: Vec<Kind>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    binv: Vec<Vec<Rational>>,
    values: Vec<Rational>,
    pivots: usize,
}

enum Outcome {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rows(&self) -> usize {
        self.rhs.len()
    }

    fn duals(&self, cost: &[Rational]) -> Vec<Rational> {
        let m = self.rows();
        let mut y = vec![Rational::zero(); m];
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = &cost[b];
            if cb.is_zero() {
                continue;
            }
            for (yi, entry) in y.iter_mut().zip(&self.binv[r]) {
                if !entry.is_zero() {
                    *yi += cb * entry;
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, cost: &[Rational], y: &[Rational]) -> Rational {
        let mut d = cost[j].clone();
        for (i, a) in &self.columns[j] {
            if !y[*i].is_zero() {
                d -= a * &y[*i];
            }
        }
        d
    }

    fn direction(&self, j: usize) -> Vec<Rational> {
        let m = self.rows();
        let mut u = vec![Rational::zero(); m];
        for (i, a) in &self.columns[j] {
            for (r, ur) in u.iter_mut().enumerate() {
                let b = &self.binv[r][*i];
                if !b.is_zero() {
                    *ur += b * a;
                }
            }
        }
        u
    }

    fn pivot(&mut self, row: usize, entering: usize, u: &[Rational]) {
        let pivot = u[row].clone();
        for v in self.binv[row].iter_mut() {
            if !v.is_zero() {
                *v /= &pivot;
            }
        }
        self.values[row] /= &pivot;
        let pivot_row = self.binv[row].clone();
        let pivot_value = self.values[row].clone();
        for (r, factor) in u.iter().enumerate() {
            if r == row || factor.is_zero() {
                continue;
            }
            for (v, p) in self.binv[r].iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *v -= factor * p;
                }
            }
            self.values[r] -= factor * &pivot_value;
        }
        self.basis[row] = entering;
        self.pivots += 1;
    }

    /// Primal simplex from the current (feasible) basis.
    fn optimize(&mut self, cost: &[Rational], may_enter: impl Fn(Kind) -> bool) -> Outcome {
        let n = self.columns.len();
        loop {
            let y = self.duals(cost);
            let mut in_basis = vec![false; n];
            for &b in &self.basis {
                in_basis[b] = true;
            }
            // Bland: lowest-index improving column.
            let entering = (0..n).find(|&j| {
                !in_basis[j] && may_enter(self.kinds[j]) && self.reduced_cost(j, cost, &y).is_negative()
            });
            let Some(entering) = entering else {
                return Outcome::Optimal;
            };
            let u = self.direction(entering);
            let mut leave: Option<(usize, Rational)> = None;
            for (r, ur) in u.iter().enumerate() {
                if !ur.is_positive() {
                    continue;
                }
                let ratio = &self.values[r] / ur;
                let better = match &leave {
                    None => true,
                    Some((lr, best)) => ratio < *best || (ratio == *best && self.basis[r] < self.basis[*lr]),
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((row, _)) = leave else {
                return Outcome::Unbounded;
            };
            self.pivot(row, entering, &u);
        }
    }

    /// Pivots degenerate artificial variables out of the basis where possible.
    fn expel_artificials(&mut self) {
        for row in 0..self.rows() {
            if self.kinds[self.basis[row]] != Kind::Artificial {
                continue;
            }
            let mut in_basis = vec![false; self.columns.len()];
            for &b in &self.basis {
                in_basis[b] = true;
            }
            let candidate = (0..self.columns.len()).find_map(|j| {
                if in_basis[j] || self.kinds[j] == Kind::Artificial {
                    return None;
                }
                let u = self.direction(j);
                (!u[row].is_zero()).then_some((j, u))
            });
            // No candidate: the row is a combination of the others and the
            // artificial stays basic at zero forever.
            if let Some((j, u)) = candidate {
                self.pivot(row, j, &u);
            }
        }
    }
}

pub(crate) fn run(problem: &LpProblem) -> LpSolution {
    let n = problem.num_vars();
    let m = problem.constraints.len();
    let maximize = problem.direction == Direction::Maximize;

    let mut columns: Vec<Vec<(usize, Rational)>> = vec![Vec::new(); n];
    let mut kinds = vec![Kind::Structural; n];
    let mut rhs = Vec::with_capacity(m);
    let mut negated = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);

    for (i, c) in problem.constraints.iter().enumerate() {
        let flip = c.rhs.is_negative();
        let relation = if flip {
            match c.relation {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            }
        } else {
            c.relation
        };
        for (j, a) in &c.coeffs {
            if a.is_zero() {
                continue;
            }
            let a = if flip { -a } else { a.clone() };
            columns[*j].push((i, a));
        }
        rhs.push(if flip { -&c.rhs } else { c.rhs.clone() });
        negated.push(flip);
        match relation {
            Relation::Le => {
                columns.push(vec![(i, Rational::one())]);
                kinds.push(Kind::Slack);
                basis.push(columns.len() - 1);
            }
            Relation::Ge => {
                columns.push(vec![(i, -Rational::one())]);
                kinds.push(Kind::Slack);
                columns.push(vec![(i, Rational::one())]);
                kinds.push(Kind::Artificial);
                basis.push(columns.len() - 1);
            }
            Relation::Eq => {
                columns.push(vec![(i, Rational::one())]);
                kinds.push(Kind::Artificial);
                basis.push(columns.len() - 1);
            }
        }
    }
    // Duplicate entries for one (row, var) pair would break the sparse
    // products; merge them.
    for col in columns.iter_mut().take(n) {
        col.sort_by_key(|(i, _)| *i);
        col.dedup_by(|later, earlier| {
            if later.0 == earlier.0 {
                earlier.1 += later.1.clone();
                true
            } else {
                false
            }
        });
        col.retain(|(_, a)| !a.is_zero());
    }

    let total = columns.len();
    let binv = (0..m)
        .map(|r| {
            (0..m)
                .map(|c| if r == c { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    let mut t = Tableau {
        columns,
        kinds,
        values: rhs.clone(),
        rhs,
        basis,
        binv,
        pivots: 0,
    };

    let infeasible = |pivots| LpSolution {
        status: Status::Infeasible,
        primal: Vec::new(),
        dual: Vec::new(),
        objective: Rational::zero(),
        pivots,
    };

    if t.kinds.contains(&Kind::Artificial) {
        let phase1: Vec<Rational> = t
            .kinds
            .iter()
            .map(|k| if *k == Kind::Artificial { Rational::one() } else { Rational::zero() })
            .collect();
        t.optimize(&phase1, |_| true);
        let infeasibility = t
            .basis
            .iter()
            .zip(&t.values)
            .filter(|(b, _)| t.kinds[**b] == Kind::Artificial)
            .fold(Rational::zero(), |acc, (_, v)| acc + v);
        if infeasibility.is_positive() {
            return infeasible(t.pivots);
        }
        t.expel_artificials();
    }

    let mut cost = vec![Rational::zero(); total];
    for (j, c) in problem.objective.iter().enumerate() {
        cost[j] = if maximize { -c } else { c.clone() };
    }
    match t.optimize(&cost, |k| k != Kind::Artificial) {
        Outcome::Unbounded => LpSolution {
            status: Status::Unbounded,
            primal: Vec::new(),
            dual: Vec::new(),
            objective: Rational::zero(),
            pivots: t.pivots,
        },
        Outcome::Optimal => {
            let mut primal = vec![Rational::zero(); n];
            for (&b, v) in t.basis.iter().zip(&t.values) {
                if b < n {
                    primal[b] = v.clone();
                }
            }
            let dual = t
                .duals(&cost)
                .into_iter()
                .zip(&negated)
                .map(|(y, &flip)| {
                    let y = if flip { -y } else { y };
                    if maximize {
                        -y
                    } else {
                        y
                    }
                })
                .collect();
            let objective = problem.objective_value(&primal);
            LpSolution {
                status: Status::Optimal,
                primal,
                dual,
                objective,
                pivots: t.pivots,
            }
        }
    }
}
