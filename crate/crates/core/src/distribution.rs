//! Exact corner marginals of the matrix distribution `D_f`.
//!
//! `D_f` is the law of the infinite random matrix `(f(x_i, y_j))` with rows
//! and columns drawn i.i.d. from `μ` and `ν`. It is represented here by its
//! top-left `k × k` marginals, which determine it by consistency. The
//! marginal is enumerated exactly: every `k`-tuple of x-atoms is paired with
//! every `k`-tuple of y-atoms and the product weight is accumulated onto the
//! resulting value matrix.

use std::collections::{BTreeMap, HashMap};
use std::ops::AddAssign;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::function::{FiniteFunction, Value};
use crate::ratio::{common_denominator, format_rational, scaled_numerators, sum, Rational};

/// Default cap on the number of enumerated tuples.
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// A `rows × cols` matrix of value labels, ordered row-major.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueMatrix<V> {
    rows: usize,
    cols: usize,
    cells: Vec<V>,
}

impl<V: Value> ValueMatrix<V> {
    pub fn new(rows: usize, cols: usize, cells: Vec<V>) -> Result<Self> {
        if cells.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                what: "matrix cells",
                expected: rows * cols,
                found: cells.len(),
            });
        }
        Ok(Self { rows, cols, cells })
    }

    pub fn from_rows(rows: Vec<Vec<V>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                what: "matrix row length",
                expected: m,
                found: rows.iter().map(Vec::len).find(|&l| l != m).unwrap_or(m),
            });
        }
        Self::new(n, m, rows.into_iter().flatten().collect())
    }

    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, row: usize, col: usize) -> &V {
        &self.cells[row * self.cols + col]
    }

    pub fn cells(&self) -> &[V] {
        &self.cells
    }

    pub fn row(&self, row: usize) -> &[V] {
        &self.cells[row * self.cols..(row + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<V>> {
        self.cells.chunks(self.cols.max(1)).map(<[V]>::to_vec).collect()
    }

    /// Entry `(i, j)` of the result is entry `(rows[i], cols[j])` of `self`.
    pub fn permuted(&self, rows: &[usize], cols: &[usize]) -> Self {
        let cells = rows
            .iter()
            .flat_map(|&i| cols.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.get(i, j).clone())
            .collect();
        Self {
            rows: rows.len(),
            cols: cols.len(),
            cells,
        }
    }

    /// Top-left `rows × cols` block.
    pub fn corner(&self, rows: usize, cols: usize) -> Self {
        let r: Vec<usize> = (0..rows).collect();
        let c: Vec<usize> = (0..cols).collect();
        self.permuted(&r, &c)
    }
}

/// Exact law of the top-left `k × k` corner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CornerDistribution<V = String> {
    k: usize,
    entries: BTreeMap<ValueMatrix<V>, Rational>,
}

impl<V: Value> CornerDistribution<V> {
    /// Validates sizes, positivity and total mass.
    pub fn new(k: usize, entries: BTreeMap<ValueMatrix<V>, Rational>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("corner size must be positive".into()));
        }
        for (m, p) in &entries {
            if m.n_rows() != k || m.n_cols() != k {
                return Err(Error::SizeMismatch {
                    left: k,
                    right: m.n_rows().max(m.n_cols()),
                });
            }
            if !p.is_positive() {
                return Err(Error::InvalidParameter(format!(
                    "corner probability {} is not positive",
                    format_rational(p)
                )));
            }
        }
        let total = sum(entries.values());
        if !total.is_one() {
            return Err(Error::WeightSum {
                sum: format_rational(&total),
            });
        }
        Ok(Self { k, entries })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &BTreeMap<ValueMatrix<V>, Rational> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Probability of `m`; zero off the support.
    pub fn probability(&self, m: &ValueMatrix<V>) -> Rational {
        self.entries.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ValueMatrix<V>, &Rational)> {
        self.entries.iter()
    }

    /// Law of the top-left `size × size` block.
    pub fn restrict(&self, size: usize) -> Result<Self> {
        if size == 0 || size > self.k {
            return Err(Error::SizeMismatch {
                left: self.k,
                right: size,
            });
        }
        let mut out: BTreeMap<ValueMatrix<V>, Rational> = BTreeMap::new();
        for (m, p) in &self.entries {
            *out.entry(m.corner(size, size)).or_insert_with(Rational::zero) += p;
        }
        Ok(Self { k: size, entries: out })
    }

    /// Empirical law of a list of `k × k` observations.
    pub fn empirical(k: usize, observations: impl IntoIterator<Item = ValueMatrix<V>>) -> Result<Self> {
        let mut counts: BTreeMap<ValueMatrix<V>, u64> = BTreeMap::new();
        let mut total = 0u64;
        for m in observations {
            *counts.entry(m).or_default() += 1;
            total += 1;
        }
        if total == 0 {
            return Err(Error::InvalidParameter("no observations".into()));
        }
        let entries = counts
            .into_iter()
            .map(|(m, c)| (m, Rational::new(c.into(), total.into())))
            .collect();
        Self::new(k, entries)
    }
}

/// Enumerates the exact `k × k` corner law of `D_f`.
///
/// Fails with [`Error::BudgetExceeded`] when `|X|^k · |Y|^k > budget`.
pub fn exact_corner_distribution<V: Value>(
    f: &FiniteFunction<V>,
    k: usize,
    budget: u64,
) -> Result<CornerDistribution<V>> {
    if k == 0 {
        return Err(Error::InvalidParameter("corner size must be positive".into()));
    }
    check_budget(&[f.n_rows(), f.n_cols()], k, budget)?;
    let (alphabet, codes) = encode(f.row_major());
    let (denominator, counts) = raw_corners(f, &codes, k);
    let entries = decode(counts, &alphabet, &denominator, |cells| ValueMatrix {
        rows: k,
        cols: k,
        cells,
    });
    Ok(CornerDistribution { k, entries })
}

/// Corner counts over the unreduced denominator `d_X^k · d_Y^k`, cells given
/// as codes.
fn raw_corners<V: Value>(f: &FiniteFunction<V>, codes: &[u32], k: usize) -> (BigUint, Vec<(Vec<u32>, BigUint)>) {
    let x = AxisWeights::new(f.x_space().weights());
    let y = AxisWeights::new(f.y_space().weights());
    let denominator = x.denominator.pow(k as u32) * y.denominator.pow(k as u32);
    let counts = if denominator.bits() <= 128 {
        accumulate_matrix::<u128>(codes, f.n_cols(), &x, &y, k)
    } else {
        accumulate_matrix::<BigUint>(codes, f.n_cols(), &x, &y, k)
    };
    (denominator, counts)
}

/// Exact equality of the `k × k` corner laws.
///
/// Compares integer counts over a shared alphabet instead of building both
/// distributions.
pub fn corner_distributions_equal<V: Value>(
    f: &FiniteFunction<V>,
    g: &FiniteFunction<V>,
    k: usize,
    budget: u64,
) -> Result<bool> {
    if k == 0 {
        return Err(Error::InvalidParameter("corner size must be positive".into()));
    }
    check_budget(&[f.n_rows(), f.n_cols()], k, budget)?;
    check_budget(&[g.n_rows(), g.n_cols()], k, budget)?;
    let both: Vec<V> = f.row_major().iter().chain(g.row_major()).cloned().collect();
    let (_, codes) = encode(&both);
    let (f_codes, g_codes) = codes.split_at(f.row_major().len());
    let (df, cf) = raw_corners(f, f_codes, k);
    let (dg, cg) = raw_corners(g, g_codes, k);
    if cf.len() != cg.len() {
        return Ok(false);
    }
    // p/df = q/dg  <=>  p·(l/df) = q·(l/dg) with l = lcm(df, dg)
    let l = df.lcm(&dg);
    let (sf, sg) = (&l / &df, &l / &dg);
    if l.bits() <= 128 {
        let (sf, sg) = (u128::try_from(&sf).expect("fits"), u128::try_from(&sg).expect("fits"));
        let small = |n: &BigUint| u128::try_from(n).expect("numerators are below the denominator");
        let lookup: HashMap<&[u32], u128> = cf.iter().map(|(key, n)| (key.as_slice(), small(n) * sf)).collect();
        return Ok(cg
            .iter()
            .all(|(key, n)| lookup.get(key.as_slice()) == Some(&(small(n) * sg))));
    }
    let lookup: HashMap<&[u32], BigUint> = cf.iter().map(|(key, n)| (key.as_slice(), n * &sf)).collect();
    Ok(cg.iter().all(|(key, n)| lookup.get(key.as_slice()) == Some(&(n * &sg))))
}

/// `½ Σ |d1(m) − d2(m)|` over the union of supports.
pub fn total_variation<V: Value>(d1: &CornerDistribution<V>, d2: &CornerDistribution<V>) -> Result<Rational> {
    if d1.k != d2.k {
        return Err(Error::SizeMismatch {
            left: d1.k,
            right: d2.k,
        });
    }
    let mut total = Rational::zero();
    for (m, p) in &d1.entries {
        total += (p - d2.probability(m)).abs();
    }
    for (m, q) in &d2.entries {
        if !d1.entries.contains_key(m) {
            total += q;
        }
    }
    Ok(total / Rational::from_integer(2.into()))
}

/// Least corner (in matrix order) whose probabilities differ, with both probabilities.
pub fn first_difference<V: Value>(
    d1: &CornerDistribution<V>,
    d2: &CornerDistribution<V>,
) -> Option<(ValueMatrix<V>, Rational, Rational)> {
    let mut keys: Vec<&ValueMatrix<V>> = d1.entries.keys().chain(d2.entries.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter().find_map(|m| {
        let (p, q) = (d1.probability(m), d2.probability(m));
        (p != q).then(|| (m.clone(), p, q))
    })
}

pub(crate) fn check_budget(sides: &[usize], k: usize, budget: u64) -> Result<()> {
    let required = sides
        .iter()
        .try_fold(1u128, |acc, &s| {
            (s as u128).checked_pow(k as u32).and_then(|p| acc.checked_mul(p))
        })
        .unwrap_or(u128::MAX);
    if required > budget as u128 {
        return Err(Error::BudgetExceeded { required, budget });
    }
    Ok(())
}

/// Sorted alphabet and per-cell codes into it.
pub(crate) fn encode<V: Value>(cells: &[V]) -> (Vec<V>, Vec<u32>) {
    let mut first_seen: FastMap<&V, u32> = FastMap::default();
    let provisional: Vec<u32> = cells
        .iter()
        .map(|v| {
            let next = first_seen.len() as u32;
            *first_seen.entry(v).or_insert(next)
        })
        .collect();
    let mut alphabet: Vec<(&V, u32)> = first_seen.into_iter().collect();
    alphabet.sort();
    let mut rank = vec![0u32; alphabet.len()];
    for (r, (_, id)) in alphabet.iter().enumerate() {
        rank[*id as usize] = r as u32;
    }
    let codes = provisional.into_iter().map(|id| rank[id as usize]).collect();
    (alphabet.into_iter().map(|(v, _)| v.clone()).collect(), codes)
}

pub(crate) fn decode<V: Value, K: Ord>(
    counts: Vec<(Vec<u32>, BigUint)>,
    alphabet: &[V],
    denominator: &BigUint,
    build: impl Fn(Vec<V>) -> K,
) -> BTreeMap<K, Rational> {
    let small = u128::try_from(denominator).ok();
    let denominator = BigInt::from(denominator.clone());
    counts
        .into_iter()
        .map(|(key, numer)| {
            let cells = key.iter().map(|&c| alphabet[c as usize].clone()).collect();
            // reducing in u128 is much cheaper than a BigInt gcd
            let p = match (small, u128::try_from(&numer)) {
                (Some(d), Ok(n)) => {
                    let g = n.gcd(&d);
                    Rational::new_raw(BigInt::from(n / g), BigInt::from(d / g))
                }
                _ => Rational::new(BigInt::from(numer), denominator.clone()),
            };
            (build(cells), p)
        })
        .collect()
}

/// Weights of one axis as integers over a common denominator.
pub(crate) struct AxisWeights {
    pub denominator: BigUint,
    pub numerators: Vec<BigUint>,
}

impl AxisWeights {
    pub fn new(weights: &[Rational]) -> Self {
        let denominator = common_denominator(weights);
        let numerators = scaled_numerators(weights, &denominator);
        Self {
            denominator,
            numerators,
        }
    }

    /// Every `k`-tuple of atoms in lexicographic order with its weight numerator.
    pub fn tuples<T: Numerator>(&self, k: usize) -> Vec<(T, Vec<usize>)> {
        let base: Vec<T> = self.numerators.iter().map(T::from_big).collect();
        let n = base.len();
        let mut out = Vec::with_capacity(n.pow(k as u32));
        let mut idx = vec![0usize; k];
        loop {
            let w = idx.iter().fold(T::one(), |acc, &i| acc.times(&base[i]));
            out.push((w, idx.clone()));
            let mut pos = k;
            loop {
                if pos == 0 {
                    return out;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < n {
                    break;
                }
                idx[pos] = 0;
            }
        }
    }
}

/// Integer accumulator for tuple weights.
pub(crate) trait Numerator: Clone + One + for<'a> AddAssign<&'a Self> {
    fn from_big(value: &BigUint) -> Self;
    fn into_big(self) -> BigUint;
    fn times(&self, other: &Self) -> Self;
}

impl Numerator for u128 {
    #[inline]
    fn times(&self, other: &Self) -> Self {
        self * other
    }

    fn from_big(value: &BigUint) -> Self {
        u128::try_from(value).expect("checked against the total denominator")
    }

    fn into_big(self) -> BigUint {
        BigUint::from(self)
    }
}

impl Numerator for BigUint {
    fn times(&self, other: &Self) -> Self {
        self * other
    }

    fn from_big(value: &BigUint) -> Self {
        value.clone()
    }

    fn into_big(self) -> BigUint {
        self
    }
}

fn accumulate_matrix<T: Numerator>(
    codes: &[u32],
    n_cols: usize,
    x: &AxisWeights,
    y: &AxisWeights,
    k: usize,
) -> Vec<(Vec<u32>, BigUint)> {
    let alphabet = codes.iter().max().map_or(1, |&c| c + 1);
    let bits = (u32::BITS - (alphabet - 1).leading_zeros()).max(1) as usize;
    if bits * k * k <= 128 {
        accumulate_packed::<T>(codes, n_cols, x, y, k, bits)
    } else {
        accumulate_unpacked::<T>(codes, n_cols, x, y, k)
    }
}

fn accumulate_unpacked<T: Numerator>(
    codes: &[u32],
    n_cols: usize,
    x: &AxisWeights,
    y: &AxisWeights,
    k: usize,
) -> Vec<(Vec<u32>, BigUint)> {
    let xs: Vec<(T, Vec<usize>)> = x.tuples(k);
    let ys: Vec<(T, Vec<usize>)> = y.tuples(k);
    let mut acc: FastMap<Vec<u32>, T> = FastMap::default();
    let mut key = vec![0u32; k * k];
    for (wx, rows) in &xs {
        for (wy, cols) in &ys {
            for (i, &r) in rows.iter().enumerate() {
                let base = r * n_cols;
                for (j, &c) in cols.iter().enumerate() {
                    key[i * k + j] = codes[base + c];
                }
            }
            let w = wx.times(wy);
            match acc.get_mut(key.as_slice()) {
                Some(slot) => *slot += &w,
                None => {
                    acc.insert(key.clone(), w);
                }
            }
        }
    }
    acc.into_iter().map(|(k, v)| (k, v.into_big())).collect()
}

/// Multiply-rotate hasher for in-memory interning tables. Not resistant to
/// adversarial keys, which is irrelevant for the data hashed here.
#[derive(Default, Clone, Copy)]
pub(crate) struct FastHasher(u64);

const FAST_SEED: u64 = 0x51_7c_c1_b7_27_22_0a_95;

impl FastHasher {
    #[inline]
    fn add(&mut self, word: u64) {
        self.0 = (self.0.rotate_left(5) ^ word).wrapping_mul(FAST_SEED);
    }
}

impl std::hash::Hasher for FastHasher {
    #[inline]
    fn finish(&self) -> u64 {
        crate::rng::mix64(self.0)
    }

    #[inline]
    fn write(&mut self, bytes: &[u8]) {
        let mut chunks = bytes.chunks_exact(8);
        for chunk in &mut chunks {
            self.add(u64::from_le_bytes(chunk.try_into().expect("8 bytes")));
        }
        let rest = chunks.remainder();
        if !rest.is_empty() {
            let mut buf = [0u8; 8];
            buf[..rest.len()].copy_from_slice(rest);
            self.add(u64::from_le_bytes(buf));
        }
    }

    #[inline]
    fn write_u8(&mut self, v: u8) {
        self.add(v as u64);
    }

    #[inline]
    fn write_u32(&mut self, v: u32) {
        self.add(v as u64);
    }

    #[inline]
    fn write_u64(&mut self, v: u64) {
        self.add(v);
    }

    #[inline]
    fn write_usize(&mut self, v: usize) {
        self.add(v as u64);
    }

    #[inline]
    fn write_u128(&mut self, v: u128) {
        self.add(v as u64);
        self.add((v >> 64) as u64);
    }
}

pub(crate) type FastMap<K, V> = HashMap<K, V, std::hash::BuildHasherDefault<FastHasher>>;

/// Fast path: each corner is packed into a `u128`, column `j` of the corner
/// occupying bits `[j·k·bits, (j+1)·k·bits)` with row `i` at offset `i·bits`.
fn accumulate_packed<T: Numerator>(
    codes: &[u32],
    n_cols: usize,
    x: &AxisWeights,
    y: &AxisWeights,
    k: usize,
    bits: usize,
) -> Vec<(Vec<u32>, BigUint)> {
    let xs: Vec<(T, Vec<usize>)> = x.tuples(k);
    let ys: Vec<(T, Vec<usize>)> = y.tuples(k);
    let column_width = bits * k;
    let mut acc: FastMap<u128, T> = FastMap::default();
    let mut column_codes = vec![0u128; n_cols];
    for (wx, rows) in &xs {
        // code of the k-vector (f(x_1, y), ..., f(x_k, y)) for every atom y
        for (y_atom, code) in column_codes.iter_mut().enumerate() {
            *code = rows.iter().enumerate().fold(0u128, |acc, (i, &r)| {
                acc | (codes[r * n_cols + y_atom] as u128) << (i * bits)
            });
        }
        for (wy, cols) in &ys {
            let key = cols
                .iter()
                .enumerate()
                .fold(0u128, |acc, (j, &c)| acc | column_codes[c] << (j * column_width));
            let w = wx.times(wy);
            match acc.get_mut(&key) {
                Some(slot) => *slot += &w,
                None => {
                    acc.insert(key, w);
                }
            }
        }
    }
    let mask = (1u128 << bits) - 1;
    acc.into_iter()
        .map(|(key, v)| {
            let cells = (0..k * k)
                .map(|cell| {
                    let (i, j) = (cell / k, cell % k);
                    ((key >> (j * column_width + i * bits)) & mask) as u32
                })
                .collect();
            (cells, v.into_big())
        })
        .collect()
}
