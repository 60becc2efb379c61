//! Exact unweighted minimum set cover by branch and bound.
//!
//! Columns and the universe are bitsets over cube points. The search
//! branches on the uncovered element with the fewest usable columns, skips
//! candidates whose remaining coverage is contained in another candidate's,
//! and bans each candidate after its branch. Lower bounds: a greedy set of
//! pairwise independent elements, and `⌈|R| / max coverage⌉`.

pub(crate) trait PointMask: Copy + Eq {
    const BITS: usize;
    fn empty() -> Self;
    fn and(self, other: Self) -> Self;
    fn or(self, other: Self) -> Self;
    fn and_not(self, other: Self) -> Self;
    fn count(self) -> u32;
    fn is_empty(self) -> bool;
    fn contains(self, i: usize) -> bool;
    fn bits(self) -> Vec<usize>;

    fn is_subset_of(self, other: Self) -> bool {
        self.and_not(other).is_empty()
    }
}

impl PointMask for u64 {
    const BITS: usize = 64;

    fn empty() -> Self {
        0
    }
    fn and(self, other: Self) -> Self {
        self & other
    }
    fn or(self, other: Self) -> Self {
        self | other
    }
    fn and_not(self, other: Self) -> Self {
        self & !other
    }
    fn count(self) -> u32 {
        self.count_ones()
    }
    fn is_empty(self) -> bool {
        self == 0
    }
    fn contains(self, i: usize) -> bool {
        self >> i & 1 == 1
    }
    fn bits(self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.count_ones() as usize);
        let mut w = self;
        while w != 0 {
            out.push(w.trailing_zeros() as usize);
            w &= w - 1;
        }
        out
    }
}

/// 1024 points, enough for ten variables.
pub(crate) const WIDE_WORDS: usize = 16;
pub(crate) type Wide = [u64; WIDE_WORDS];

impl PointMask for Wide {
    const BITS: usize = 64 * WIDE_WORDS;

    fn empty() -> Self {
        [0; WIDE_WORDS]
    }
    fn and(self, other: Self) -> Self {
        std::array::from_fn(|i| self[i] & other[i])
    }
    fn or(self, other: Self) -> Self {
        std::array::from_fn(|i| self[i] | other[i])
    }
    fn and_not(self, other: Self) -> Self {
        std::array::from_fn(|i| self[i] & !other[i])
    }
    fn count(self) -> u32 {
        self.iter().map(|w| w.count_ones()).sum()
    }
    fn is_empty(self) -> bool {
        self.iter().all(|&w| w == 0)
    }
    fn contains(self, i: usize) -> bool {
        self[i >> 6] >> (i & 63) & 1 == 1
    }
    fn bits(self) -> Vec<usize> {
        let mut out = Vec::new();
        for (wi, &w) in self.iter().enumerate() {
            let mut w = w;
            while w != 0 {
                out.push(wi * 64 + w.trailing_zeros() as usize);
                w &= w - 1;
            }
        }
        out
    }
}

struct Search<'a, M: PointMask> {
    cols: &'a [M],
    covers: Vec<Vec<u32>>,
    banned: Vec<bool>,
    chosen: Vec<usize>,
    best: Vec<usize>,
}

impl<M: PointMask> Search<'_, M> {
    fn lower_bound(&self, r: M, order: &[(usize, usize)]) -> usize {
        let mut blocked = M::empty();
        let mut independent = 0;
        for &(_, e) in order {
            if blocked.contains(e) {
                continue;
            }
            independent += 1;
            for &c in &self.covers[e] {
                if !self.banned[c as usize] {
                    blocked = blocked.or(self.cols[c as usize]);
                }
            }
        }
        let max_cover = self
            .cols
            .iter()
            .enumerate()
            .filter(|(c, _)| !self.banned[*c])
            .map(|(_, col)| col.and(r).count() as usize)
            .max()
            .unwrap_or(0);
        let counting = if max_cover == 0 {
            usize::MAX
        } else {
            (r.count() as usize).div_ceil(max_cover)
        };
        independent.max(counting)
    }

    fn run(&mut self, r: M) {
        if r.is_empty() {
            if self.chosen.len() < self.best.len() {
                self.best = self.chosen.clone();
            }
            return;
        }
        if self.chosen.len() + 1 >= self.best.len() {
            return;
        }
        let mut order = Vec::new();
        for e in r.bits() {
            let live = self.covers[e].iter().filter(|&&c| !self.banned[c as usize]).count();
            if live == 0 {
                return;
            }
            order.push((live, e));
        }
        order.sort_unstable();
        let lb = self.lower_bound(r, &order);
        if self.chosen.len().saturating_add(lb) >= self.best.len() {
            return;
        }
        let e = order[0].1;
        let mut cands: Vec<(usize, M)> = self.covers[e]
            .iter()
            .map(|&c| c as usize)
            .filter(|&c| !self.banned[c])
            .map(|c| (c, self.cols[c].and(r)))
            .collect();
        cands.sort_by(|a, b| b.1.count().cmp(&a.1.count()).then(a.0.cmp(&b.0)));
        let dominated: Vec<bool> = cands
            .iter()
            .enumerate()
            .map(|(i, (_, m))| {
                cands
                    .iter()
                    .enumerate()
                    .any(|(j, (_, o))| j != i && m.is_subset_of(*o) && (*m != *o || j < i))
            })
            .collect();
        let mut newly_banned = Vec::new();
        for ((c, m), skip) in cands.into_iter().zip(dominated) {
            if skip {
                continue;
            }
            self.chosen.push(c);
            self.run(r.and_not(m));
            self.chosen.pop();
            self.banned[c] = true;
            newly_banned.push(c);
        }
        for c in newly_banned {
            self.banned[c] = false;
        }
    }
}

fn greedy<M: PointMask>(universe: M, cols: &[M]) -> Option<Vec<usize>> {
    let mut r = universe;
    let mut picked = Vec::new();
    while !r.is_empty() {
        let (best, gain) = cols
            .iter()
            .enumerate()
            .map(|(i, c)| (i, c.and(r).count()))
            .fold((usize::MAX, 0), |acc, (i, g)| if g > acc.1 { (i, g) } else { acc });
        if gain == 0 {
            return None;
        }
        picked.push(best);
        r = r.and_not(cols[best]);
    }
    Some(picked)
}

/// Minimum number of columns whose union contains `universe`, as sorted
/// column indices, or `None` when no cover exists.
pub(crate) fn min_cover<M: PointMask>(universe: M, cols: &[M]) -> Option<Vec<usize>> {
    let greedy = greedy(universe, cols)?;
    let mut covers = vec![Vec::new(); M::BITS];
    for (i, c) in cols.iter().enumerate() {
        for e in c.and(universe).bits() {
            covers[e].push(i as u32);
        }
    }
    let mut search = Search {
        cols,
        covers,
        banned: vec![false; cols.len()],
        chosen: Vec::new(),
        best: greedy,
    };
    search.run(universe);
    let mut best = search.best;
    best.sort_unstable();
    Some(best)
}
