//! The finite acceptance checks, one function per criterion.
//!
//! Each check is exhaustive or runs a seeded fuzz campaign and returns a
//! [`CriterionResult`] whose `detail` names the first failure, if any.

use std::cell::RefCell;

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::boolfn::{make_majority, make_parity, Slice, TruthTable};
use crate::cnfmin::{min_cnf_size, min_monotone_cnf, CostCache, Mode};
use crate::coding::{
    count_bound_check, isolated_solutions, kraft_sum, is_prefix_free, width_reduce_decode,
    width_reduce_encode_traced, PpzCodec, TraceStep,
};
use crate::constructions::{
    build_parity_blocks, build_parity_depth3, lupanov_depth3, universal_approximator,
};
use crate::duality::{check_hard_distribution, depth3_upper_bound, solve_duality, Distribution, DualityReport};
use crate::error::{Error, Result};
use crate::extremal::{majority_correspondence, turan_bottom_fanin2};
use crate::report::{rat, rational_string, Verdict};
use crate::sample::{
    planted_cnf, random_cnf, random_function, random_function_with_max_ones, random_k_cnf, random_permutation,
};
use crate::Rational;

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CriterionResult {
    /// `PASS <id> <name>: <detail>` or the same with `FAIL`.
    pub fn line(&self) -> String {
        let tag = if self.pass { "PASS" } else { "FAIL" };
        format!("{tag} {:>2} {}: {}", self.id, self.name, self.detail)
    }
}

pub const NAMES: [&str; 13] = [
    "duality-sandwich",
    "parity-cnf-tight",
    "parity-hard-distribution",
    "majority-hard-distribution",
    "hypergraph-correspondence",
    "turan-extremal",
    "coding-lemma",
    "width-reduction",
    "parity-approximation",
    "parity-depth3",
    "lupanov",
    "quine-monotone",
    "greedy-guarantee",
];

/// Shared state for a run: the cost cache, the seed, and the greedy
/// verdicts collected from the duality runs.
pub struct Suite {
    pub cache: CostCache,
    pub seed: u64,
    greedy: RefCell<Vec<(String, Verdict)>>,
    greedy_sources: RefCell<Vec<usize>>,
}

impl Suite {
    pub fn new(cache: CostCache, seed: u64) -> Self {
        Suite {
            cache,
            seed,
            greedy: RefCell::new(Vec::new()),
            greedy_sources: RefCell::new(Vec::new()),
        }
    }

    fn rng(&self, criterion: usize) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed ^ (criterion as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    fn duality(&self, label: String, f: &TruthTable, mode: Mode) -> Result<DualityReport> {
        let report = solve_duality(f, mode, &self.cache)?;
        if let Some(v) = report.verdicts.iter().find(|v| v.name.starts_with("greedy")) {
            self.greedy.borrow_mut().push((label, v.clone()));
        }
        Ok(report)
    }

    /// Runs one criterion by id (1-based).
    pub fn run(&self, id: usize) -> CriterionResult {
        let outcome = match id {
            1 => self.duality_sandwich(),
            2 => self.parity_cnf_tight(),
            3 => self.parity_hard_distribution(),
            4 => self.majority_hard_distribution(),
            5 => self.hypergraph_correspondence(),
            6 => self.turan_extremal(),
            7 => self.coding_lemma(),
            8 => self.width_reduction(),
            9 => self.parity_approximation(),
            10 => self.parity_depth3(),
            11 => self.lupanov(),
            12 => self.quine_monotone(),
            13 => self.greedy_guarantee(),
            _ => Err(Error::BadParameter(format!("no criterion {id}"))),
        };
        let (pass, detail) = match outcome {
            Ok(Ok(detail)) => (true, detail),
            Ok(Err(failure)) => (false, failure),
            Err(e) => (false, format!("error: {e}")),
        };
        if matches!(id, 1 | 3 | 4) && pass {
            self.greedy_sources.borrow_mut().push(id);
        }
        CriterionResult {
            id,
            name: NAMES.get(id.wrapping_sub(1)).copied().unwrap_or("unknown"),
            pass,
            detail,
        }
    }

    pub fn run_all(&self) -> Vec<CriterionResult> {
        (1..=NAMES.len()).map(|id| self.run(id)).collect()
    }

    /// Looks a criterion up by name or number.
    pub fn id_of(name: &str) -> Option<usize> {
        name.parse::<usize>()
            .ok()
            .filter(|id| (1..=NAMES.len()).contains(id))
            .or_else(|| NAMES.iter().position(|&n| n == name).map(|i| i + 1))
    }

    fn duality_sandwich(&self) -> Result<Outcome> {
        let mut checked = 0;
        for word in 1..255u64 {
            let f = TruthTable::from_word(3, word)?;
            let r = self.duality(format!("n=3 0x{word:02x}"), &f, Mode::General)?;
            if !r.exact {
                return Ok(Err(format!("0x{word:02x}: no exact L3")));
            }
            let l3 = rat(r.l3_upper);
            let lower = Rational::from_integer(r.l3_lower.clone());
            let upper = depth3_upper_bound(3, &r.s_star);
            if !(lower <= l3 && l3 <= upper && r.ok()) {
                return Ok(Err(format!(
                    "0x{word:02x}: ceil(s*)={} L3={} bound={} verdicts={:?}",
                    r.l3_lower,
                    r.l3_upper,
                    rational_string(&upper),
                    r.verdicts.iter().filter(|v| !v.ok).collect::<Vec<_>>()
                )));
            }
            checked += 1;
        }
        Ok(Ok(format!("{checked} functions: ceil(s*) <= L3 <= (1+3*0.6932)s*")))
    }

    fn parity_cnf_tight(&self) -> Result<Outcome> {
        let mut sizes = Vec::new();
        for n in 2..=4 {
            let size = min_cnf_size(&make_parity(n)?)?.size;
            if size != 1 << (n - 1) {
                return Ok(Err(format!("n={n}: min CNF size {size}")));
            }
            sizes.push(size.to_string());
        }
        Ok(Ok(format!("min CNF sizes {} for n=2,3,4", sizes.join(","))))
    }

    fn parity_hard_distribution(&self) -> Result<Outcome> {
        let mut parts = Vec::new();
        for n in 2..=4 {
            let f = make_parity(n)?;
            let mu = Distribution::uniform(n, f.ones())?;
            let check = check_hard_distribution(&f, &mu, Mode::General, &self.cache)?;
            let r = self.duality(format!("Parity_{n}"), &f, Mode::General)?;
            if !check.holds() || !r.ok() {
                return Ok(Err(format!(
                    "n={n}: cor={} cor_mu={}",
                    rational_string(&check.cor),
                    rational_string(&check.cor_mu)
                )));
            }
            parts.push(format!("n={n} cor={}", rational_string(&check.cor)));
        }
        Ok(Ok(format!("uniform-odd is hard: {}", parts.join(", "))))
    }

    fn majority_hard_distribution(&self) -> Result<Outcome> {
        let mut parts = Vec::new();
        for n in 2..=4 {
            let f = make_majority(n)?;
            let slice = Slice::new(n, n.div_ceil(2))?;
            let mu = Distribution::uniform(n, slice.points())?;
            let check = check_hard_distribution(&f, &mu, Mode::Monotone, &self.cache)?;
            let r = self.duality(format!("Maj_{n} monotone"), &f, Mode::Monotone)?;
            if !check.holds() || !r.ok() {
                return Ok(Err(format!(
                    "n={n}: cor={} cor_mu={}",
                    rational_string(&check.cor),
                    rational_string(&check.cor_mu)
                )));
            }
            parts.push(format!("n={n} cor+={}", rational_string(&check.cor)));
        }
        Ok(Ok(format!("middle slice is hard: {}", parts.join(", "))))
    }

    fn hypergraph_correspondence(&self) -> Result<Outcome> {
        let mut parts = Vec::new();
        for n in 2..=4 {
            let r = majority_correspondence(n, &self.cache)?;
            if !r.ok() {
                let bad: Vec<_> = r.verdicts.iter().filter(|v| !v.ok).collect();
                return Ok(Err(format!("n={n}: {bad:?}")));
            }
            parts.push(format!(
                "T({n},{})={} L3+={}",
                n.div_ceil(2),
                rational_string(&r.t_value),
                r.l3_monotone.map_or("?".into(), |v| v.to_string())
            ));
        }
        Ok(Ok(parts.join(", ")))
    }

    fn turan_extremal(&self) -> Result<Outcome> {
        let mut parts = Vec::new();
        for n in [2, 4, 6] {
            let r = turan_bottom_fanin2(n)?;
            let ratio = r.ratio.as_ref().map_or("none".into(), rational_string);
            if !r.ok() {
                return Ok(Err(format!("n={n}: ratio {ratio}, witness {:?}", r.witness)));
            }
            parts.push(format!("T({n},{})={ratio} over {} graphs", n / 2, r.families_searched));
        }
        Ok(Ok(format!("{}; perfect matchings attain all", parts.join(", "))))
    }

    fn coding_lemma(&self) -> Result<Outcome> {
        let mut rng = self.rng(7);
        let mut codes = 0u64;
        let mut solutions = 0;
        for i in 0..50 {
            let k = 2 + i % 2;
            let n = rng.gen_range(4..=8);
            let phi = loop {
                let m = rng.gen_range(n..=4 * n);
                let phi = random_k_cnf(&mut rng, n, k, m)?;
                if !isolated_solutions(&phi)?.is_empty() {
                    break phi;
                }
            };
            let iso = isolated_solutions(&phi)?.points;
            solutions += iso.len();
            let codec = PpzCodec::new(&phi);
            let mut totals = vec![0u64; iso.len()];
            let mut perms = 0u64;
            for pi in itertools::Itertools::permutations(0..n, n) {
                perms += 1;
                let mut words = Vec::with_capacity(iso.len());
                for (j, &x) in iso.iter().enumerate() {
                    let c = codec.encode(x, &pi)?;
                    if codec.decode(&c.bits, &pi)? != x {
                        return Ok(Err(format!("formula {i}: roundtrip failed for {x}")));
                    }
                    totals[j] += c.len() as u64;
                    codes += 1;
                    words.push(c.bits);
                }
                if !is_prefix_free(&words) || kraft_sum(&words) > Rational::one() {
                    return Ok(Err(format!("formula {i}: not prefix-free under {pi:?}")));
                }
            }
            // average ≤ n - n/k  ⇔  total·k ≤ (n·k - n)·perms
            for (j, &t) in totals.iter().enumerate() {
                if t * k as u64 > (n * k - n) as u64 * perms {
                    return Ok(Err(format!(
                        "formula {i} (n={n}, k={k}): average {}/{perms} exceeds n-n/k at {}",
                        t, iso[j]
                    )));
                }
            }
        }
        Ok(Ok(format!(
            "50 formulas, {solutions} isolated solutions, {codes} codes over all n! orders"
        )))
    }

    /// Half the formulas are uniform random; the other half plant a
    /// solution that falsifies the cut part of several wide clauses, so
    /// the cut branch of the codec is exercised.
    fn width_reduction(&self) -> Result<Outcome> {
        let mut rng = self.rng(8);
        let n = 12;
        let mut roundtrip_formulas = 0;
        let mut roundtrips = 0;
        let mut with_cuts = 0;
        let mut max_count = 0;
        for i in 0..100 {
            let phi = if i % 2 == 0 {
                let m = rng.gen_range(30..=60);
                random_cnf(&mut rng, n, &[3, 3, 3, 11], m)?
            } else {
                let x = rng.gen_range(0..1u32 << n);
                // 112 clauses: s = 7, k = 9
                planted_cnf(&mut rng, n, x, (3, 100), (12, 12), 9)?
            };
            let report = count_bound_check(&phi)?;
            if !report.ok() {
                return Ok(Err(format!("formula {i}: {:?}", report.verdict)));
            }
            max_count = max_count.max(report.count);
            let iso = isolated_solutions(&phi)?.points;
            if roundtrip_formulas == 20 || iso.is_empty() {
                continue;
            }
            roundtrip_formulas += 1;
            let pi = random_permutation(&mut rng, n);
            for x in iso {
                let (c, trace) = width_reduce_encode_traced(x, &phi, &pi)?;
                if width_reduce_decode(&c.bits, &phi, &pi)? != x {
                    return Ok(Err(format!("formula {i}: roundtrip failed for {x}")));
                }
                roundtrips += 1;
                if trace.steps.iter().any(|s| matches!(s, TraceStep::Cut { .. })) {
                    with_cuts += 1;
                }
            }
        }
        if roundtrip_formulas < 20 {
            return Ok(Err(format!("only {roundtrip_formulas} formulas had isolated solutions")));
        }
        Ok(Ok(format!(
            "100 formulas within 2^(n-n/(s+2)+1) (max count {max_count}); \
             {roundtrips} roundtrips on 20 formulas, {with_cuts} through cut steps"
        )))
    }

    fn parity_approximation(&self) -> Result<Outcome> {
        let mut checked = 0;
        for n in 1..=16 {
            for k in 1..=n.min(4) {
                let r = build_parity_blocks(n, k)?;
                if !r.ok() {
                    let bad: Vec<_> = r.verdicts.iter().filter(|v| !v.ok).collect();
                    return Ok(Err(format!("n={n} k'={k}: {bad:?}")));
                }
                checked += 1;
            }
        }
        Ok(Ok(format!("{checked} (n, k') pairs: size, count 2^(n-k'), one-sided, tradeoff")))
    }

    fn parity_depth3(&self) -> Result<Outcome> {
        let mut parts = Vec::new();
        let mut construction4 = 0;
        for (n, k) in [(4, 2), (9, 3), (16, 4)] {
            let r = build_parity_depth3(n, k)?;
            if !r.ok() {
                return Ok(Err(format!("n={n} k={k}: {:?}", r.verdicts)));
            }
            if n == 4 {
                construction4 = r.size;
            }
            parts.push(format!("({n},{k}) size {} <= {}", r.size, rational_string(&r.bound)));
        }
        let d = solve_duality(&make_parity(4)?, Mode::General, &self.cache)?;
        let ok = d.exact && BigInt::from(d.l3_upper) >= d.l3_lower && d.l3_upper <= construction4;
        let line = format!("ceil(s*)={} <= L3(Parity_4)={} <= {construction4}", d.l3_lower, d.l3_upper);
        if !ok {
            return Ok(Err(line));
        }
        parts.push(line);
        Ok(Ok(parts.join("; ")))
    }

    fn lupanov(&self) -> Result<Outcome> {
        let mut rng = self.rng(11);
        let mut largest = Vec::new();
        for n in 4..=6 {
            let mut max_size = 0;
            for i in 0..50 {
                let f = random_function(&mut rng, n)?;
                let r = lupanov_depth3(&f, false)?;
                if !r.ok() {
                    return Ok(Err(format!("n={n} sample {i}: {:?}", r.verdicts)));
                }
                max_size = max_size.max(r.size);
            }
            largest.push(format!("n={n} max size {max_size}"));
        }
        let mut targets = vec![("Parity_4".to_string(), make_parity(4)?), ("Maj_5".to_string(), make_majority(5)?)];
        for i in 0..20 {
            targets.push((format!("random #{i}"), random_function_with_max_ones(&mut rng, 5, 16)?));
        }
        for (label, f) in &targets {
            let a = universal_approximator(f, &self.cache)?;
            let one_sided = a.phi.is_one_sided_under(f)?;
            if !a.verdict.ok || !one_sided {
                return Ok(Err(format!("{label}: {:?}", a.verdict)));
            }
        }
        Ok(Ok(format!(
            "150 random f equivalent within 2^(n+3)/n ({}); {} approximators within eps*2^(n+3)/n",
            largest.join(", "),
            targets.len()
        )))
    }

    fn quine_monotone(&self) -> Result<Outcome> {
        let mut checked = 0;
        for n in 0..=4usize {
            for word in 0..1u64 << (1 << n) {
                let f = TruthTable::from_word(n, word)?;
                if !f.is_monotone() {
                    continue;
                }
                let general = min_cnf_size(&f)?.size;
                let monotone = min_monotone_cnf(&f)?.size;
                if general != monotone {
                    return Ok(Err(format!("n={n} 0x{word:x}: {general} != {monotone}")));
                }
                checked += 1;
            }
        }
        Ok(Ok(format!("{checked} monotone functions with n <= 4")))
    }

    fn greedy_guarantee(&self) -> Result<Outcome> {
        let ran: Vec<usize> = self.greedy_sources.borrow().clone();
        for id in [1, 3, 4] {
            if !ran.contains(&id) {
                let r = self.run(id);
                if !r.pass {
                    return Ok(Err(format!("criterion {id} failed: {}", r.detail)));
                }
            }
        }
        let log = self.greedy.borrow();
        if let Some((label, v)) = log.iter().find(|(_, v)| !v.ok) {
            return Ok(Err(format!("{label}: greedy {} > {}", v.lhs, v.rhs)));
        }
        Ok(Ok(format!("{} duality instances: greedy <= (1+ln|U|)s*", log.len())))
    }
}

/// `Ok(detail)` on success, `Err(detail)` on a failed check.
type Outcome = std::result::Result<String, String>;
