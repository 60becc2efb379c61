//! Truth tables, named function families, slices and input permutations.
//!
//! A function on `n` variables is stored as `2^n` bits. Bit `i` holds `f(x)`
//! where `x_1` is the most significant bit of `i`: variable `v` (0-based,
//! i.e. `x_{v+1}`) sits at bit position `n - 1 - v` of the index. Every module
//! in the crate uses this convention, as do the text formats in [`crate::io`].

use std::fmt;

use num_integer::binomial;

use crate::error::{check_range, Error, Result};

pub const MAX_VARS: usize = 24;

/// Mask of the index bit that carries variable `var`.
#[inline]
pub fn var_bit(n: usize, var: usize) -> u32 {
    1 << (n - 1 - var)
}

/// Value of variable `var` in input `x`.
#[inline]
pub fn var_value(n: usize, x: u32, var: usize) -> bool {
    x & var_bit(n, var) != 0
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: usize,
    words: Vec<u64>,
}

impl TruthTable {
    pub fn constant(n: usize, value: bool) -> Result<Self> {
        check_range("n", n, 0, MAX_VARS)?;
        let len = 1usize << n;
        let mut words = vec![if value { u64::MAX } else { 0 }; len.div_ceil(64)];
        if value && len < 64 {
            words[0] = (1u64 << len) - 1;
        }
        Ok(TruthTable { n, words })
    }

    pub fn from_fn(n: usize, f: impl Fn(u32) -> bool) -> Result<Self> {
        let mut t = Self::constant(n, false)?;
        for x in 0..t.len() as u32 {
            if f(x) {
                t.set(x, true);
            }
        }
        Ok(t)
    }

    /// Indicator of a set of inputs.
    pub fn from_points(n: usize, points: impl IntoIterator<Item = u32>) -> Result<Self> {
        let mut t = Self::constant(n, false)?;
        for x in points {
            if x as usize >= t.len() {
                return Err(Error::BadParameter(format!("input {x} out of range for n = {n}")));
            }
            t.set(x, true);
        }
        Ok(t)
    }

    /// Builds a table from the low `2^n` bits of a word (`n ≤ 6`).
    pub fn from_word(n: usize, word: u64) -> Result<Self> {
        check_range("n", n, 0, 6)?;
        let len = 1usize << n;
        let word = if len == 64 { word } else { word & ((1u64 << len) - 1) };
        Ok(TruthTable { n, words: vec![word] })
    }

    /// Builds a table from its packed words; bits past `2^n` are ignored.
    pub fn from_words(n: usize, words: &[u64]) -> Result<Self> {
        let mut t = Self::constant(n, true)?;
        if words.len() != t.words.len() {
            return Err(Error::DimensionMismatch {
                expected: t.words.len(),
                got: words.len(),
            });
        }
        for (w, s) in t.words.iter_mut().zip(words) {
            *w &= s;
        }
        Ok(t)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of inputs, `2^n`.
    pub fn len(&self) -> usize {
        1 << self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// The whole table as one word; only meaningful for `n ≤ 6`.
    pub fn as_word(&self) -> u64 {
        debug_assert!(self.n <= 6);
        self.words[0]
    }

    #[inline]
    pub fn get(&self, x: u32) -> bool {
        let x = x as usize;
        self.words[x >> 6] >> (x & 63) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: u32, value: bool) {
        let x = x as usize;
        if value {
            self.words[x >> 6] |= 1 << (x & 63);
        } else {
            self.words[x >> 6] &= !(1 << (x & 63));
        }
    }

    pub fn ones_count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Inputs in `f^-1(1)`, ascending.
    pub fn ones(&self) -> impl Iterator<Item = u32> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros();
                w &= w - 1;
                Some((wi as u32) * 64 + b)
            })
        })
    }

    pub fn zeros(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.len() as u32).filter(|&x| !self.get(x))
    }

    pub fn is_constant(&self) -> Option<bool> {
        match self.ones_count() {
            0 => Some(false),
            c if c == self.len() => Some(true),
            _ => None,
        }
    }

    pub fn complement(&self) -> Self {
        let mut t = Self::constant(self.n, true).expect("n already validated");
        for (w, s) in t.words.iter_mut().zip(&self.words) {
            *w &= !s;
        }
        t
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        self.same_dims(other)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        Ok(TruthTable { n: self.n, words })
    }

    pub fn or(&self, other: &Self) -> Result<Self> {
        self.same_dims(other)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect();
        Ok(TruthTable { n: self.n, words })
    }

    /// `self^-1(1) ⊆ other^-1(1)`.
    pub fn implies(&self, other: &Self) -> Result<bool> {
        self.same_dims(other)?;
        Ok(self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0))
    }

    fn same_dims(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(())
    }

    pub fn is_monotone(&self) -> bool {
        (0..self.len() as u32).all(|x| {
            !self.get(x) || (0..self.n).all(|v| self.get(x | var_bit(self.n, v)))
        })
    }

    /// Fixes some variables and returns the table over the remaining ones,
    /// keeping their relative order.
    pub fn restrict(&self, assignment: &[(usize, bool)]) -> Result<Self> {
        let mut fixed_mask = 0u32;
        let mut fixed_vals = 0u32;
        for &(v, b) in assignment {
            check_range("variable", v, 0, self.n.saturating_sub(1))?;
            fixed_mask |= var_bit(self.n, v);
            if b {
                fixed_vals |= var_bit(self.n, v);
            }
        }
        let free: Vec<usize> = (0..self.n).filter(|&v| fixed_mask & var_bit(self.n, v) == 0).collect();
        let m = free.len();
        Self::from_fn(m, |y| {
            let mut x = fixed_vals;
            for (j, &v) in free.iter().enumerate() {
                if var_value(m, y, j) {
                    x |= var_bit(self.n, v);
                }
            }
            self.get(x)
        })
    }

    /// `result(x) = self(π(x))`.
    pub fn apply_permutation(&self, pi: &InputPermutation) -> Result<Self> {
        if pi.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: pi.n(),
            });
        }
        Self::from_fn(self.n, |x| self.get(pi.apply(x)))
    }

    /// `0`/`1` characters in index order.
    pub fn to_bit_string(&self) -> String {
        (0..self.len() as u32).map(|x| if self.get(x) { '1' } else { '0' }).collect()
    }

    /// The bit string read as a big-endian binary number, in hex.
    pub fn to_hex(&self) -> String {
        let bits = self.to_bit_string();
        let pad = (4 - bits.len() % 4) % 4;
        let padded: String = "0".repeat(pad) + &bits;
        padded
            .as_bytes()
            .chunks(4)
            .map(|c| {
                let v = c.iter().fold(0u32, |acc, &b| acc * 2 + u32::from(b == b'1'));
                char::from_digit(v, 16).expect("nibble")
            })
            .collect()
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n <= 6 {
            write!(f, "TruthTable(n={}, {})", self.n, self.to_bit_string())
        } else {
            write!(f, "TruthTable(n={}, 0x{})", self.n, self.to_hex())
        }
    }
}

pub fn make_parity(n: usize) -> Result<TruthTable> {
    check_range("n", n, 1, MAX_VARS)?;
    TruthTable::from_fn(n, |x| x.count_ones() % 2 == 1)
}

/// `Maj_n(x) = 1` iff the weight of `x` is at least `n/2`.
pub fn make_majority(n: usize) -> Result<TruthTable> {
    check_range("n", n, 1, MAX_VARS)?;
    TruthTable::from_fn(n, |x| 2 * x.count_ones() as usize >= n)
}

/// The weight-`k` layer `S^n_k` of the cube.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slice {
    pub n: usize,
    pub k: usize,
}

impl Slice {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        check_range("n", n, 1, MAX_VARS)?;
        check_range("k", k, 0, n)?;
        Ok(Slice { n, k })
    }

    pub fn size(&self) -> u64 {
        binomial(self.n as u64, self.k as u64)
    }

    pub fn points(&self) -> impl Iterator<Item = u32> + '_ {
        (0..1u32 << self.n).filter(move |x| x.count_ones() as usize == self.k)
    }

    pub fn contains(&self, x: u32) -> bool {
        x.count_ones() as usize == self.k
    }
}

/// A coordinate permutation combined with a negation mask.
///
/// Maps `x` to `y` with `y_j = x_{σ(j)} ⊕ b_j`. These maps form a group
/// under composition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InputPermutation {
    sigma: Vec<usize>,
    negate: Vec<bool>,
}

impl InputPermutation {
    pub fn new(sigma: Vec<usize>, negate: Vec<bool>) -> Result<Self> {
        let n = sigma.len();
        if negate.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: negate.len(),
            });
        }
        let mut seen = vec![false; n];
        for &s in &sigma {
            if s >= n || seen[s] {
                return Err(Error::BadParameter(format!("{sigma:?} is not a permutation")));
            }
            seen[s] = true;
        }
        Ok(InputPermutation { sigma, negate })
    }

    pub fn identity(n: usize) -> Self {
        InputPermutation {
            sigma: (0..n).collect(),
            negate: vec![false; n],
        }
    }

    pub fn swap(n: usize, a: usize, b: usize) -> Result<Self> {
        let mut sigma: Vec<usize> = (0..n).collect();
        if a >= n || b >= n {
            return Err(Error::BadParameter(format!("swap({a}, {b}) on {n} variables")));
        }
        sigma.swap(a, b);
        Self::new(sigma, vec![false; n])
    }

    pub fn negation(n: usize, vars: &[usize]) -> Result<Self> {
        let mut negate = vec![false; n];
        for &v in vars {
            if v >= n {
                return Err(Error::BadParameter(format!("variable {v} on {n} variables")));
            }
            negate[v] = !negate[v];
        }
        Self::new((0..n).collect(), negate)
    }

    pub fn n(&self) -> usize {
        self.sigma.len()
    }

    pub fn apply(&self, x: u32) -> u32 {
        let n = self.n();
        let mut y = 0;
        for j in 0..n {
            if var_value(n, x, self.sigma[j]) != self.negate[j] {
                y |= var_bit(n, j);
            }
        }
        y
    }

    /// `self.then(other)` maps `x` to `other(self(x))`.
    pub fn then(&self, other: &Self) -> Result<Self> {
        if self.n() != other.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: other.n(),
            });
        }
        let sigma = other.sigma.iter().map(|&j| self.sigma[j]).collect();
        let negate = (0..self.n())
            .map(|j| self.negate[other.sigma[j]] ^ other.negate[j])
            .collect();
        Ok(InputPermutation { sigma, negate })
    }

    pub fn inverse(&self) -> Self {
        let n = self.n();
        let mut sigma = vec![0; n];
        let mut negate = vec![false; n];
        for j in 0..n {
            sigma[self.sigma[j]] = j;
            negate[self.sigma[j]] = self.negate[j];
        }
        InputPermutation { sigma, negate }
    }
}

/// Generators of the group of maps negating an even number of coordinates.
pub fn even_negation_generators(n: usize) -> Vec<InputPermutation> {
    (1..n)
        .map(|v| InputPermutation::negation(n, &[0, v]).expect("in range"))
        .collect()
}

/// Adjacent transpositions, generating all coordinate permutations.
pub fn coordinate_permutation_generators(n: usize) -> Vec<InputPermutation> {
    (1..n)
        .map(|v| InputPermutation::swap(n, v - 1, v).expect("in range"))
        .collect()
}

/// Every input permutation (with negations when `with_negations`) that
/// leaves `f` unchanged. Exhaustive over `n!·2^n` maps, so `n ≤ 6`.
pub fn automorphisms(f: &TruthTable, with_negations: bool) -> Result<Vec<InputPermutation>> {
    let n = f.n();
    check_range("n", n, 0, 6)?;
    let masks: Vec<u32> = if with_negations { (0..1u32 << n).collect() } else { vec![0] };
    let mut out = Vec::new();
    for sigma in itertools::Itertools::permutations(0..n, n) {
        for &mask in &masks {
            let negate = (0..n).map(|v| mask >> v & 1 == 1).collect();
            let pi = InputPermutation::new(sigma.clone(), negate)?;
            if (0..f.len() as u32).all(|x| f.get(pi.apply(x)) == f.get(x)) {
                out.push(pi);
            }
        }
    }
    Ok(out)
}
