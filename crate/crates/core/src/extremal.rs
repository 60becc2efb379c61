//! Hitting sets of small hypergraphs and the extremal ratio
//! `T(n, τ) = max { t(F)/|F| : τ(F) = τ }`.
//!
//! Vertices are `0..n` internally and printed 1-based. A monotone CNF
//! accepts exactly the hitting sets of its clause hypergraph, which links
//! `T(n, ⌈n/2⌉)` to the monotone correlation of majority.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::binomial;
use serde::Serialize;

use crate::boolfn::{make_majority, var_bit};
use crate::cnfmin::{CostCache, Mode};
use crate::duality::solve_duality;
use crate::error::{check_range, Error, Result};
use crate::formula::{Clause, CnfFormula, Literal};
use crate::report::{ln2_upper, rat, Relation, Verdict};
use crate::Rational;

pub const MAX_HYPERGRAPH_VARS: usize = 20;
pub const MAX_ANTICHAIN_VARS: usize = 5;
pub const MAX_GRAPH_VARS: usize = 7;
pub const MAX_CORRESPONDENCE_VARS: usize = 4;

/// A family of distinct nonempty vertex sets, stored as sorted bitmasks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Hypergraph {
    n: usize,
    edges: Vec<u32>,
}

/// Vertex lists in ascending order, compared lexicographically.
fn edge_vertices(e: u32) -> Vec<usize> {
    (0..32).filter(|&v| e >> v & 1 == 1).collect()
}

fn cmp_edges(a: u32, b: u32) -> Ordering {
    edge_vertices(a).cmp(&edge_vertices(b))
}

impl Hypergraph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = u32>) -> Result<Self> {
        check_range("n", n, 0, MAX_HYPERGRAPH_VARS)?;
        let mut edges: Vec<u32> = edges.into_iter().collect();
        if edges.contains(&0) {
            return Err(Error::BadParameter("empty edge: no set hits it".into()));
        }
        if let Some(&e) = edges.iter().find(|&&e| (e as u64) >= 1u64 << n) {
            return Err(Error::BadParameter(format!("edge {e:#b} uses a vertex beyond {n}")));
        }
        edges.sort_by(|&a, &b| cmp_edges(a, b));
        edges.dedup();
        Ok(Hypergraph { n, edges })
    }

    /// Edges given as 1-based vertex lists.
    pub fn from_lists(n: usize, lists: &[Vec<usize>]) -> Result<Self> {
        let mut edges = Vec::with_capacity(lists.len());
        for list in lists {
            let mut e = 0u32;
            for &v in list {
                check_range("vertex", v, 1, n)?;
                e |= 1 << (v - 1);
            }
            edges.push(e);
        }
        Hypergraph::new(n, edges)
    }

    /// The clause hypergraph of a monotone CNF.
    pub fn from_monotone_cnf(phi: &CnfFormula) -> Result<Self> {
        if !phi.is_monotone() {
            return Err(Error::NotMonotone);
        }
        Hypergraph::new(
            phi.n(),
            phi.clauses()
                .iter()
                .map(|c| c.literals().iter().fold(0u32, |e, l| e | 1 << l.var)),
        )
    }

    pub fn to_monotone_cnf(&self) -> Result<CnfFormula> {
        let clauses = self
            .edges
            .iter()
            .map(|&e| Clause::new(edge_vertices(e).into_iter().map(Literal::pos)))
            .collect::<Result<Vec<_>>>()?;
        CnfFormula::new(self.n, clauses)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[u32] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Edges as 1-based vertex lists.
    pub fn edge_lists(&self) -> Vec<Vec<usize>> {
        self.edges
            .iter()
            .map(|&e| edge_vertices(e).into_iter().map(|v| v + 1).collect())
            .collect()
    }

    pub fn hits(&self, s: u32) -> bool {
        self.edges.iter().all(|&e| e & s != 0)
    }

    /// Drops every edge that strictly contains another edge.
    pub fn antichain_normal_form(&self) -> Self {
        let edges = self
            .edges
            .iter()
            .copied()
            .filter(|&e| !self.edges.iter().any(|&g| g != e && g & e == g))
            .collect();
        Hypergraph { n: self.n, edges }
    }

    pub fn is_antichain(&self) -> bool {
        self.antichain_normal_form().len() == self.len()
    }

    /// A vertex set as a cube index, `x_v = 1` iff `v ∈ s`.
    pub fn set_to_point(&self, s: u32) -> u32 {
        (0..self.n).filter(|&v| s >> v & 1 == 1).fold(0, |x, v| x | var_bit(self.n, v))
    }
}

impl fmt::Display for Hypergraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lists = self.edge_lists();
        let parts: Vec<String> = lists
            .iter()
            .map(|e| format!("{{{}}}", e.iter().map(usize::to_string).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Minimum hitting-set size by branch and bound: branch on the vertices of
/// the smallest unhit edge, pruning with a greedy packing of disjoint unhit
/// edges.
pub fn tau(h: &Hypergraph) -> usize {
    fn go(edges: &[u32], chosen: u32, depth: usize, best: &mut usize) {
        let unhit: Vec<u32> = edges.iter().copied().filter(|&e| e & chosen == 0).collect();
        let Some(&smallest) = unhit.iter().min_by_key(|e| e.count_ones()) else {
            *best = (*best).min(depth);
            return;
        };
        let mut used = 0u32;
        let mut packing = 0;
        for &e in &unhit {
            if e & used == 0 {
                used |= e;
                packing += 1;
            }
        }
        if depth + packing >= *best {
            return;
        }
        let mut rest = smallest;
        while rest != 0 {
            let v = rest & rest.wrapping_neg();
            rest ^= v;
            go(edges, chosen | v, depth + 1, best);
        }
    }
    let mut best = h.n + 1;
    go(&h.edges, 0, 0, &mut best);
    best
}

/// Visits the `k`-subsets of `0..n` as bitmasks.
fn for_each_subset(n: usize, k: usize, mut visit: impl FnMut(u32)) {
    if k == 0 {
        visit(0);
        return;
    }
    if k > n {
        return;
    }
    let mut s: u32 = (1 << k) - 1;
    let limit = 1u64 << n;
    while (s as u64) < limit {
        visit(s);
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
}

/// `t(F)`: the number of hitting sets of size `τ(F)`.
pub fn count_min_hitting_sets(h: &Hypergraph) -> u64 {
    let k = tau(h);
    let mut count = 0;
    for_each_subset(h.n, k, |s| count += u64::from(h.hits(s)));
    count
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Graphs,
    Hypergraphs,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "graphs" => Ok(Family::Graphs),
            "hypergraphs" => Ok(Family::Hypergraphs),
            other => Err(Error::BadParameter(format!("unknown family `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtremalReport {
    pub n: usize,
    pub tau: usize,
    pub family: Family,
    pub search_space: String,
    pub families_searched: u64,
    pub families_at_tau: u64,
    /// `None` when no family has `τ(F) = τ`.
    #[serde(serialize_with = "ser_opt_rational")]
    pub ratio: Option<Rational>,
    pub t: u64,
    pub edges: usize,
    pub witness: Option<Vec<Vec<usize>>>,
    pub verdicts: Vec<Verdict>,
}

fn ser_opt_rational<S: serde::Serializer>(q: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match q {
        Some(q) => crate::report::ser_rational(q, s),
        None => s.serialize_none(),
    }
}

impl ExtremalReport {
    pub fn ok(&self) -> bool {
        self.verdicts.iter().all(|v| v.ok)
    }

    pub fn witness_hypergraph(&self) -> Option<Hypergraph> {
        self.witness
            .as_ref()
            .map(|w| Hypergraph::from_lists(self.n, w).expect("witness edges are valid"))
    }
}

/// Candidate edges of the search space, in the order used for family masks.
fn candidate_edges(n: usize, family: Family) -> Vec<u32> {
    let mut edges: Vec<u32> = (1..1u32 << n)
        .filter(|e| family == Family::Hypergraphs || e.count_ones() == 2)
        .collect();
    edges.sort_by(|&a, &b| cmp_edges(a, b));
    edges
}

/// All antichains of candidate edges, as masks over the candidate list.
fn antichains(candidates: &[u32]) -> Vec<u64> {
    fn go(cands: &[u32], i: usize, mask: u64, chosen: &mut Vec<u32>, out: &mut Vec<u64>) {
        if i == cands.len() {
            out.push(mask);
            return;
        }
        go(cands, i + 1, mask, chosen, out);
        let e = cands[i];
        if chosen.iter().all(|&g| g & e != g && g & e != e) {
            chosen.push(e);
            go(cands, i + 1, mask | 1 << i, chosen, out);
            chosen.pop();
        }
    }
    let mut out = Vec::new();
    go(candidates, 0, 0, &mut Vec::new(), &mut out);
    out
}

/// Exact `T(n, τ)` over all graphs (`n ≤ 7`) or all antichains (`n ≤ 5`).
/// Ties go to the lexicographically smallest sorted edge list.
pub fn extremal_t(n: usize, tau_target: usize, family: Family) -> Result<ExtremalReport> {
    let cap = match family {
        Family::Graphs => MAX_GRAPH_VARS,
        Family::Hypergraphs => MAX_ANTICHAIN_VARS,
    };
    check_range("n", n, 1, cap)?;
    let cands = candidate_edges(n, family);
    // inside[c]: candidate edges contained in vertex set c; S hits F iff F
    // has no edge inside the complement of S.
    let full = (1u32 << n) - 1;
    let inside: Vec<u64> = (0..=full)
        .map(|c| {
            cands
                .iter()
                .enumerate()
                .filter(|(_, &e)| e & c == e)
                .fold(0u64, |m, (i, _)| m | 1 << i)
        })
        .collect();
    let by_size: Vec<Vec<u32>> = (0..=n)
        .map(|k| {
            let mut v = Vec::new();
            for_each_subset(n, k, |s| v.push(s));
            v
        })
        .collect();
    let (space, search_space): (Box<dyn Iterator<Item = u64>>, String) = match family {
        Family::Graphs => (
            Box::new(1..1u64 << cands.len()),
            format!("all {} nonempty graphs on {n} vertices", (1u64 << cands.len()) - 1),
        ),
        Family::Hypergraphs => {
            let all = antichains(&cands);
            let count = all.len() - 1;
            (
                Box::new(all.into_iter().filter(|&m| m != 0)),
                format!("all {count} nonempty antichains of nonempty subsets of [{n}]"),
            )
        }
    };
    let mut searched = 0;
    let mut at_tau = 0;
    let mut best: Option<(u64, usize, u64)> = None; // (t, |F|, mask)
    let lists = |mask: u64| -> Vec<Vec<usize>> {
        (0..cands.len())
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| edge_vertices(cands[i]).into_iter().map(|v| v + 1).collect())
            .collect()
    };
    for mask in space {
        searched += 1;
        // τ(F) = τ: no hitting set of size τ - 1, at least one of size τ.
        if tau_target > 0 && by_size[tau_target - 1].iter().any(|&s| mask & inside[(full & !s) as usize] == 0) {
            continue;
        }
        let Some(row) = by_size.get(tau_target) else { continue };
        let t = row.iter().filter(|&&s| mask & inside[(full & !s) as usize] == 0).count() as u64;
        if t == 0 {
            continue;
        }
        at_tau += 1;
        let m = mask.count_ones() as usize;
        let better = match best {
            None => true,
            Some((bt, bm, bmask)) => match (t * bm as u64).cmp(&(bt * m as u64)) {
                Ordering::Greater => true,
                Ordering::Less => false,
                Ordering::Equal => lists(mask) < lists(bmask),
            },
        };
        if better {
            best = Some((t, m, mask));
        }
    }
    let (ratio, t, edges, witness) = match best {
        Some((t, m, mask)) => (
            Some(Rational::new(BigInt::from(t), BigInt::from(m))),
            t,
            m,
            Some(lists(mask)),
        ),
        None => (None, 0, 0, None),
    };
    Ok(ExtremalReport {
        n,
        tau: tau_target,
        family,
        search_space,
        families_searched: searched,
        families_at_tau: at_tau,
        ratio,
        t,
        edges,
        witness,
        verdicts: Vec::new(),
    })
}

/// `T(n, ⌈n/2⌉)` against the monotone correlation of majority.
#[derive(Debug, Clone, Serialize)]
pub struct MajorityCorrespondence {
    pub n: usize,
    pub extremal: ExtremalReport,
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub t_value: Rational,
    /// `D⁺(Maj_n) = 1/s*` from the monotone cover LP.
    #[serde(serialize_with = "crate::report::ser_rational")]
    pub d_plus: Rational,
    pub l3_monotone: Option<usize>,
    pub verdicts: Vec<Verdict>,
}

impl MajorityCorrespondence {
    pub fn ok(&self) -> bool {
        self.verdicts.iter().all(|v| v.ok)
    }
}

pub fn majority_correspondence(n: usize, cache: &CostCache) -> Result<MajorityCorrespondence> {
    check_range("n", n, 1, MAX_CORRESPONDENCE_VARS)?;
    let half = n.div_ceil(2);
    let extremal = extremal_t(n, half, Family::Hypergraphs)?;
    let t_value = extremal.ratio.clone().expect("a matching-like family always has τ = ⌈n/2⌉");
    let duality = solve_duality(&make_majority(n)?, Mode::Monotone, cache)?;
    let d_plus = Rational::from_integer(1.into()) / &duality.s_star;
    let c = rat(binomial(n, half));
    let mut verdicts = vec![Verdict::eq("T == C(n,ceil(n/2))*D+", &t_value, &(&c * &d_plus))];
    verdicts.extend(duality.verdicts.iter().cloned());
    let l3_monotone = duality.exact.then_some(duality.l3_upper);
    if let Some(l3) = l3_monotone {
        let ratio = rat(l3) / &c;
        let lower = Rational::from_integer(1.into()) / &t_value;
        let upper = (Rational::from_integer(1.into()) + ln2_upper() * rat(n)) / &t_value;
        verdicts.push(Verdict::le("1/T <= L3+/C(n,ceil(n/2))", &lower, &ratio));
        verdicts.push(Verdict::le("L3+/C(n,ceil(n/2)) <= (1+ln2*n)/T", &ratio, &upper));
    }
    Ok(MajorityCorrespondence {
        n,
        extremal,
        t_value,
        d_plus,
        l3_monotone,
        verdicts,
    })
}

/// The perfect matching `{1,2}, {3,4}, …` on `n` vertices (`n` even).
pub fn perfect_matching(n: usize) -> Result<Hypergraph> {
    Hypergraph::new(n, (0..n / 2).map(|i| 0b11u32 << (2 * i)))
}

/// Graph-mode `T(n, n/2)`, checked to be attained by a perfect matching
/// with ratio `2^{n/2}/(n/2)`.
pub fn turan_bottom_fanin2(n: usize) -> Result<ExtremalReport> {
    if !n.is_multiple_of(2) || n == 0 {
        return Err(Error::BadParameter(format!("n = {n} must be even and positive")));
    }
    let mut report = extremal_t(n, n / 2, Family::Graphs)?;
    let matching = perfect_matching(n)?;
    let expected = Rational::new(BigInt::from(1u64 << (n / 2)), BigInt::from(n / 2));
    let matching_ratio = Rational::new(
        BigInt::from(count_min_hitting_sets(&matching)),
        BigInt::from(matching.len()),
    );
    let ratio = report.ratio.clone().unwrap_or_default();
    let witness_is_matching = report.witness_hypergraph().is_some_and(|w| {
        w.len() == n / 2 && w.edges().iter().fold(0u32, |acc, &e| acc | e).count_ones() as usize == n
    });
    report.verdicts = vec![
        Verdict::eq("T(n,n/2) == 2^(n/2)/(n/2)", &ratio, &expected),
        Verdict::eq("perfect matching ratio == T(n,n/2)", &matching_ratio, &ratio),
        Verdict::checked(
            "witness is a perfect matching",
            witness_is_matching.to_string(),
            Relation::Eq,
            "true".into(),
            witness_is_matching,
        ),
    ];
    Ok(report)
}
