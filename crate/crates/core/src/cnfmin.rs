//! Exact minimum CNF size, prime implicates and the monotone variant.
//!
//! A CNF for `g` is a set of clauses whose falsifying subcubes cover
//! `g^-1(0)` and avoid `g^-1(1)`, so a minimum CNF is a minimum cover of
//! `g^-1(0)` by implicants of `¬g`; prime ones suffice. Cubes over `n`
//! variables are indexed in base 3 with digit `d_v` for variable `v`
//! (`0`/`1` fixes the variable, `2` leaves it free).

use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, OnceLock, RwLock};

use serde::{Deserialize, Serialize};

use crate::boolfn::{var_bit, TruthTable};
use crate::cover::{min_cover, PointMask, Wide, WIDE_WORDS};
use crate::error::{check_range, Error, Result};
use crate::formula::{Clause, CnfFormula, Literal};

pub const MAX_PRIME_VARS: usize = 14;
pub const MAX_MIN_CNF_VARS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    General,
    Monotone,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::General => "general",
            Mode::Monotone => "monotone",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Mode::General),
            "monotone" => Ok(Mode::Monotone),
            other => Err(Error::BadParameter(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeImplicateSet {
    pub n: usize,
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinCnf {
    pub size: usize,
    pub witness: CnfFormula,
}

/// Clause of the prime implicate whose falsifying cube is `digits`.
fn clause_of_cube(digits: &[u8]) -> Clause {
    Clause::new(
        digits
            .iter()
            .enumerate()
            .filter(|(_, &d)| d != 2)
            .map(|(v, &d)| Literal::with_exponent(v, d == 0)),
    )
    .expect("one literal per variable")
}

fn cube_digits(n: usize, mut t: usize) -> Vec<u8> {
    (0..n)
        .map(|_| {
            let d = (t % 3) as u8;
            t /= 3;
            d
        })
        .collect()
}

/// Ternary-indexed flags: cube `t` is an implicant of `h`.
fn implicant_table(h: &TruthTable) -> Vec<bool> {
    let n = h.n();
    let mut imp = vec![false; 3usize.pow(n as u32)];
    let mut digits = vec![0u8; n];
    for t in 0..imp.len() {
        if t > 0 {
            for d in digits.iter_mut() {
                if *d < 2 {
                    *d += 1;
                    break;
                }
                *d = 0;
            }
        }
        imp[t] = match digits.iter().position(|&d| d == 2) {
            None => {
                let x = (0..n).filter(|&v| digits[v] == 1).fold(0u32, |a, v| a | var_bit(n, v));
                h.get(x)
            }
            // Both halves precede `t` in index order.
            Some(v) => {
                let p = 3usize.pow(v as u32);
                imp[t - 2 * p] && imp[t - p]
            }
        };
    }
    imp
}

fn is_prime(imp: &[bool], n: usize, t: usize) -> bool {
    if !imp[t] {
        return false;
    }
    let mut rest = t;
    let mut p = 1;
    for _ in 0..n {
        let d = rest % 3;
        if d != 2 && imp[t + (2 - d) * p] {
            return false;
        }
        rest /= 3;
        p *= 3;
    }
    true
}

/// All prime implicates of `g`, as clauses in canonical order.
pub fn prime_implicates(g: &TruthTable) -> Result<PrimeImplicateSet> {
    check_range("n", g.n(), 0, MAX_PRIME_VARS)?;
    let n = g.n();
    let imp = implicant_table(&g.complement());
    let mut clauses: Vec<Clause> = (0..imp.len())
        .filter(|&t| is_prime(&imp, n, t))
        .map(|t| clause_of_cube(&cube_digits(n, t)))
        .collect();
    clauses.sort();
    Ok(PrimeImplicateSet { n, clauses })
}

/// Point masks of every cube for `n ≤ 6`, plus each cube's parents (one
/// fixed variable freed).
struct CubeTable {
    masks: Vec<u64>,
    parents: Vec<Vec<u32>>,
}

fn cube_table(n: usize) -> &'static CubeTable {
    static TABLES: [OnceLock<CubeTable>; 7] = [const { OnceLock::new() }; 7];
    TABLES[n].get_or_init(|| {
        let total = 3usize.pow(n as u32);
        let mut masks = vec![0u64; total];
        let mut parents = vec![Vec::new(); total];
        for t in 0..total {
            let digits = cube_digits(n, t);
            let mut p = 1;
            let mut lowest_free = None;
            for &d in &digits {
                if d == 2 && lowest_free.is_none() {
                    lowest_free = Some(p);
                }
                if d != 2 {
                    parents[t].push((t + (2 - d as usize) * p) as u32);
                }
                p *= 3;
            }
            masks[t] = match lowest_free {
                Some(p) => masks[t - 2 * p] | masks[t - p],
                None => {
                    let x = (0..n).filter(|&v| digits[v] == 1).fold(0u32, |a, v| a | var_bit(n, v));
                    1u64 << x
                }
            };
        }
        CubeTable { masks, parents }
    })
}

fn full_word(n: usize) -> u64 {
    if n == 6 {
        u64::MAX
    } else {
        (1u64 << (1 << n)) - 1
    }
}

/// Ternary indices of the prime implicants of `h` (`n ≤ 6`).
fn prime_cubes_word(n: usize, h: u64) -> Vec<usize> {
    let table = cube_table(n);
    let imp = |t: usize| table.masks[t] & !h == 0;
    (0..table.masks.len())
        .filter(|&t| imp(t) && table.parents[t].iter().all(|&p| !imp(p as usize)))
        .collect()
}

/// Minimum CNF size of the function whose table is `g` (`n ≤ 6`).
pub(crate) fn min_cnf_size_word(n: usize, g: u64) -> usize {
    min_cnf_word(n, g).len()
}

fn min_cnf_word(n: usize, g: u64) -> Vec<usize> {
    let h = !g & full_word(n);
    let primes = prime_cubes_word(n, h);
    let table = cube_table(n);
    let cols: Vec<u64> = primes.iter().map(|&t| table.masks[t]).collect();
    let chosen = min_cover(h, &cols).expect("primes cover their function");
    chosen.into_iter().map(|i| primes[i]).collect()
}

fn min_cnf_wide(g: &TruthTable) -> Vec<usize> {
    let n = g.n();
    let h = g.complement();
    let imp = implicant_table(&h);
    let primes: Vec<usize> = (0..imp.len()).filter(|&t| is_prime(&imp, n, t)).collect();
    let to_wide = |t: &TruthTable| -> Wide {
        let mut w = Wide::empty();
        w[..t.words().len()].copy_from_slice(t.words());
        w
    };
    let cols: Vec<Wide> = primes
        .iter()
        .map(|&t| {
            let digits = cube_digits(n, t);
            let cube = TruthTable::from_fn(n, |x| {
                digits.iter().enumerate().all(|(v, &d)| d == 2 || (x & var_bit(n, v) != 0) == (d == 1))
            })
            .expect("n checked");
            to_wide(&cube)
        })
        .collect();
    debug_assert!(h.words().len() <= WIDE_WORDS);
    let chosen = min_cover(to_wide(&h), &cols).expect("primes cover their function");
    chosen.into_iter().map(|i| primes[i]).collect()
}

/// Exact minimum CNF for `g` with a witness (`n ≤ 10`).
pub fn min_cnf_size(g: &TruthTable) -> Result<MinCnf> {
    check_range("n", g.n(), 0, MAX_MIN_CNF_VARS)?;
    let n = g.n();
    let cubes = if n <= 6 { min_cnf_word(n, g.as_word()) } else { min_cnf_wide(g) };
    let mut clauses: Vec<Clause> = cubes.iter().map(|&t| clause_of_cube(&cube_digits(n, t))).collect();
    clauses.sort();
    let witness = CnfFormula::new(n, clauses)?;
    Ok(MinCnf {
        size: witness.size(),
        witness,
    })
}

/// Zeros of `g` all of whose upward neighbours are ones.
fn maximal_zeros(g: &TruthTable) -> Vec<u32> {
    let n = g.n();
    g.zeros()
        .filter(|&z| (0..n).all(|v| z & var_bit(n, v) != 0 || g.get(z | var_bit(n, v))))
        .collect()
}

fn maximal_zero_count_word(n: usize, g: u64) -> usize {
    (0..1u32 << n)
        .filter(|&z| {
            g >> z & 1 == 0 && (0..n).all(|v| z & var_bit(n, v) != 0 || g >> (z | var_bit(n, v)) & 1 == 1)
        })
        .count()
}

/// The unique irredundant monotone CNF of a monotone `g`: one clause
/// `∨_{v: z_v = 0} x_v` per maximal zero `z`.
pub fn min_monotone_cnf(g: &TruthTable) -> Result<MinCnf> {
    if !g.is_monotone() {
        return Err(Error::NotMonotone);
    }
    let n = g.n();
    let mut clauses: Vec<Clause> = maximal_zeros(g)
        .into_iter()
        .map(|z| {
            Clause::new((0..n).filter(|&v| z & var_bit(n, v) == 0).map(Literal::pos)).expect("positive literals")
        })
        .collect();
    clauses.sort();
    let witness = CnfFormula::new(n, clauses)?;
    Ok(MinCnf {
        size: witness.size(),
        witness,
    })
}

/// Minimum (monotone) CNF witness for a subset, by mode.
pub fn min_cnf_for_mode(s: &TruthTable, mode: Mode) -> Result<MinCnf> {
    match mode {
        Mode::General => min_cnf_size(s),
        Mode::Monotone => min_monotone_cnf(s),
    }
}

type CacheKey = (u8, Mode, Vec<u64>);

/// Memo of subset costs, optionally backed by an append-only file with one
/// record `<n> <hex table> <mode> <size>` per line.
pub struct CostCache {
    map: RwLock<HashMap<CacheKey, u32>>,
    file: Option<Mutex<BufWriter<File>>>,
    path: Option<PathBuf>,
}

impl std::fmt::Debug for CostCache {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CostCache")
            .field("entries", &self.len())
            .field("path", &self.path)
            .finish()
    }
}

fn parse_record(line: &str) -> Option<(CacheKey, u32)> {
    let mut parts = line.split(' ');
    let n: usize = parts.next()?.parse().ok()?;
    let hex = parts.next()?;
    let mode: Mode = parts.next()?.parse().ok()?;
    let size: u32 = parts.next()?.parse().ok()?;
    if parts.next().is_some() || n > MAX_MIN_CNF_VARS {
        return None;
    }
    let t = crate::io::parse_truth_table(&format!("n={n}\n0x{hex}")).ok()?;
    Some(((n as u8, mode, t.words().to_vec()), size))
}

impl CostCache {
    pub fn in_memory() -> Self {
        CostCache {
            map: RwLock::new(HashMap::new()),
            file: None,
            path: None,
        }
    }

    /// Loads `path` (creating it if absent). Reading stops at the first
    /// malformed or unterminated record and the file is truncated there.
    pub fn open(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let mut file = OpenOptions::new().read(true).append(true).create(true).open(&path)?;
        let mut map = HashMap::new();
        let mut good_len = 0u64;
        {
            let mut reader = BufReader::new(&mut file);
            reader.seek(SeekFrom::Start(0))?;
            let mut line = String::new();
            loop {
                line.clear();
                let read = match reader.read_line(&mut line) {
                    Ok(r) => r,
                    Err(e) if e.kind() == std::io::ErrorKind::InvalidData => break,
                    Err(e) => return Err(e.into()),
                };
                if read == 0 || !line.ends_with('\n') {
                    break;
                }
                match parse_record(line.trim_end_matches('\n')) {
                    Some((k, v)) => {
                        map.insert(k, v);
                        good_len += read as u64;
                    }
                    None => break,
                }
            }
        }
        if file.metadata()?.len() != good_len {
            file.set_len(good_len)?;
        }
        Ok(CostCache {
            map: RwLock::new(map),
            file: Some(Mutex::new(BufWriter::new(file))),
            path: Some(path),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, s: &TruthTable, mode: Mode) -> Option<usize> {
        let key = (s.n() as u8, mode, s.words().to_vec());
        self.map.read().expect("cache lock").get(&key).map(|&v| v as usize)
    }

    pub fn insert(&self, s: &TruthTable, mode: Mode, size: usize) -> Result<()> {
        let key = (s.n() as u8, mode, s.words().to_vec());
        let fresh = self.map.write().expect("cache lock").insert(key, size as u32).is_none();
        if let (true, Some(file)) = (fresh, &self.file) {
            let mut w = file.lock().expect("cache file lock");
            writeln!(w, "{} {} {} {}", s.n(), s.to_hex(), mode.as_str(), size)?;
        }
        Ok(())
    }

    pub fn flush(&self) -> Result<()> {
        if let Some(file) = &self.file {
            file.lock().expect("cache file lock").flush()?;
        }
        Ok(())
    }

    /// Cached cost of a table given as a single word (`n ≤ 6`).
    pub(crate) fn cost_word(&self, n: usize, word: u64, mode: Mode) -> Result<usize> {
        let key = (n as u8, mode, vec![word]);
        if let Some(&v) = self.map.read().expect("cache lock").get(&key) {
            return Ok(v as usize);
        }
        let size = match mode {
            Mode::General => min_cnf_size_word(n, word),
            Mode::Monotone => maximal_zero_count_word(n, word),
        };
        self.insert(&TruthTable::from_word(n, word)?, mode, size)?;
        Ok(size)
    }
}

impl Drop for CostCache {
    fn drop(&mut self) {
        let _ = self.flush();
    }
}

/// Minimum (monotone) CNF size of the indicator `s` of a subset of `f^-1(1)`.
pub fn cost_of_subset(f: &TruthTable, s: &TruthTable, mode: Mode, cache: &CostCache) -> Result<usize> {
    if !s.implies(f)? {
        return Err(Error::NotSubset);
    }
    if mode == Mode::Monotone && !s.is_monotone() {
        return Err(Error::NotUpwardClosed);
    }
    if s.n() <= 6 {
        return cache.cost_word(s.n(), s.as_word(), mode);
    }
    if let Some(v) = cache.get(s, mode) {
        return Ok(v);
    }
    let size = min_cnf_for_mode(s, mode)?.size;
    cache.insert(s, mode, size)?;
    Ok(size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{make_majority, make_parity};

    fn lits(c: &Clause) -> Vec<i64> {
        c.literals().iter().map(Literal::to_dimacs).collect()
    }

    #[test]
    fn prime_implicate_examples() {
        let or = TruthTable::from_fn(2, |x| x != 0).unwrap();
        let p = prime_implicates(&or).unwrap();
        assert_eq!(p.clauses.iter().map(lits).collect::<Vec<_>>(), vec![vec![1, 2]]);
        let p = prime_implicates(&make_parity(2).unwrap()).unwrap();
        assert_eq!(p.clauses.iter().map(lits).collect::<Vec<_>>(), vec![vec![1, 2], vec![-1, -2]]);
        let p = prime_implicates(&make_majority(3).unwrap()).unwrap();
        assert_eq!(p.clauses.iter().map(lits).collect::<Vec<_>>(), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
    }

    #[test]
    fn prime_implicates_are_prime() {
        // oracle: implicate check by evaluation; primality by dropping literals
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..40 {
            let n = rng.gen_range(1..=5);
            let bits: Vec<bool> = (0..1 << n).map(|_| rng.gen_bool(0.7)).collect();
            let g = TruthTable::from_fn(n, |x| bits[x as usize]).unwrap();
            for c in prime_implicates(&g).unwrap().clauses {
                assert!(g.ones().all(|x| c.eval(n, x)));
                for i in 0..c.width() {
                    let weaker = Clause::new(c.literals().iter().enumerate().filter(|(j, _)| *j != i).map(|(_, l)| *l)).unwrap();
                    assert!(g.ones().any(|x| !weaker.eval(n, x)));
                }
            }
        }
    }

    #[test]
    fn min_cnf_examples() {
        assert_eq!(min_cnf_size(&make_parity(3).unwrap()).unwrap().size, 4);
        let one = min_cnf_size(&TruthTable::constant(3, true).unwrap()).unwrap();
        assert_eq!(one.size, 0);
        let point = TruthTable::from_points(3, [0b111]).unwrap();
        let m = min_cnf_size(&point).unwrap();
        assert_eq!(m.size, 3);
        assert_eq!(m.witness.clauses().iter().map(lits).collect::<Vec<_>>(), vec![vec![1], vec![2], vec![3]]);
        assert_eq!(min_cnf_size(&make_majority(3).unwrap()).unwrap().size, 3);
        let zero = min_cnf_size(&TruthTable::constant(2, false).unwrap()).unwrap();
        assert_eq!(zero.size, 1);
        assert!(zero.witness.clauses()[0].is_empty());
    }

    #[test]
    fn wide_path_matches_parity_bound() {
        let p7 = make_parity(7).unwrap();
        let m = min_cnf_size(&p7).unwrap();
        assert_eq!(m.size, 64);
        assert_eq!(m.witness.to_truth_table().unwrap(), p7);
        let maj7 = make_majority(7).unwrap();
        assert_eq!(min_cnf_size(&maj7).unwrap().size, 35);
    }

    #[test]
    fn monotone_examples() {
        let m = min_monotone_cnf(&make_majority(3).unwrap()).unwrap();
        assert_eq!(m.size, 3);
        assert_eq!(m.witness.to_truth_table().unwrap(), make_majority(3).unwrap());
        assert_eq!(min_monotone_cnf(&TruthTable::constant(3, true).unwrap()).unwrap().size, 0);
        assert!(matches!(min_monotone_cnf(&make_parity(2).unwrap()), Err(Error::NotMonotone)));
    }

    #[test]
    fn cost_of_subset_examples() {
        let cache = CostCache::in_memory();
        let p3 = make_parity(3).unwrap();
        assert_eq!(cost_of_subset(&p3, &p3, Mode::General, &cache).unwrap(), 4);
        let single = TruthTable::from_points(3, [0b100]).unwrap();
        assert_eq!(cost_of_subset(&p3, &single, Mode::General, &cache).unwrap(), 3);
        let m3 = make_majority(3).unwrap();
        let up = TruthTable::from_points(3, [0b110, 0b111]).unwrap();
        assert_eq!(cost_of_subset(&m3, &up, Mode::Monotone, &cache).unwrap(), 2);
        let w = min_monotone_cnf(&up).unwrap().witness;
        assert_eq!(w.clauses().iter().map(lits).collect::<Vec<_>>(), vec![vec![1], vec![2]]);
        assert!(matches!(cost_of_subset(&m3, &p3, Mode::General, &cache), Err(Error::NotSubset)));
        let not_up = TruthTable::from_points(3, [0b110]).unwrap();
        assert!(matches!(cost_of_subset(&m3, &not_up, Mode::Monotone, &cache), Err(Error::NotUpwardClosed)));
    }

    #[test]
    fn persistent_cache_roundtrip_and_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("costs.txt");
        let p3 = make_parity(3).unwrap();
        {
            let cache = CostCache::open(&path).unwrap();
            assert_eq!(cost_of_subset(&p3, &p3, Mode::General, &cache).unwrap(), 4);
            let p7 = make_parity(7).unwrap();
            cost_of_subset(&p7, &p7, Mode::General, &cache).unwrap();
        }
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("3 69 general 4\n"));
        std::fs::write(&path, format!("{text}3 9")).unwrap();
        let cache = CostCache::open(&path).unwrap();
        assert_eq!(cache.len(), 2);
        assert_eq!(cache.get(&p3, Mode::General), Some(4));
        assert_eq!(std::fs::read_to_string(&path).unwrap(), text);
    }
}
