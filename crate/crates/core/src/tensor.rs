//! Functions of `n ≥ 2` variables and their exchangeable random arrays.
//!
//! The corner of size `k` is the `k × … × k` sub-array indexed by the first
//! `k` draws on every axis. Cells are stored row-major (last axis fastest).

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{One, Signed};

use crate::distribution::{check_budget, decode, encode, AxisWeights, FastMap, Numerator};
use crate::error::{Error, Result};
use crate::function::{FiniteFunction, Value};
use crate::measure::FiniteMeasureSpace;
use crate::ratio::{format_rational, sum, Rational};
use crate::rng::CounterRng;
use crate::sample::AtomSampler;

fn flat_index(shape: &[usize], index: &[usize]) -> usize {
    index.iter().zip(shape).fold(0, |acc, (&i, &s)| acc * s + i)
}

fn checked_cells(shape: &[usize]) -> Result<usize> {
    shape
        .iter()
        .try_fold(1usize, |acc, &s| acc.checked_mul(s))
        .ok_or_else(|| Error::InvalidParameter("tensor too large".into()))
}

/// `f : X_1 × … × X_n → V` on finite spaces, stored flat.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorFunction<V = String> {
    spaces: Vec<FiniteMeasureSpace>,
    shape: Vec<usize>,
    values: Vec<V>,
}

impl<V: Value> TensorFunction<V> {
    pub fn new(spaces: Vec<FiniteMeasureSpace>, values: Vec<V>) -> Result<Self> {
        if spaces.len() < 2 {
            return Err(Error::InvalidParameter(
                "a tensor function needs at least two axes".into(),
            ));
        }
        let shape: Vec<usize> = spaces.iter().map(FiniteMeasureSpace::len).collect();
        let cells = checked_cells(&shape)?;
        if values.len() != cells {
            return Err(Error::DimensionMismatch {
                what: "tensor cells",
                expected: cells,
                found: values.len(),
            });
        }
        Ok(Self { spaces, shape, values })
    }

    pub fn arity(&self) -> usize {
        self.spaces.len()
    }

    pub fn spaces(&self) -> &[FiniteMeasureSpace] {
        &self.spaces
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn value(&self, index: &[usize]) -> &V {
        &self.values[flat_index(&self.shape, index)]
    }
}

impl<V: Value> From<&FiniteFunction<V>> for TensorFunction<V> {
    fn from(f: &FiniteFunction<V>) -> Self {
        Self {
            spaces: vec![f.x_space().clone(), f.y_space().clone()],
            shape: vec![f.n_rows(), f.n_cols()],
            values: f.row_major().to_vec(),
        }
    }
}

/// An `arity`-dimensional cube of side `k` of value labels, row-major.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ValueTensor<V> {
    arity: usize,
    side: usize,
    cells: Vec<V>,
}

impl<V: Value> ValueTensor<V> {
    pub fn new(arity: usize, side: usize, cells: Vec<V>) -> Result<Self> {
        let expected = side
            .checked_pow(arity as u32)
            .ok_or_else(|| Error::InvalidParameter("tensor too large".into()))?;
        if cells.len() != expected {
            return Err(Error::DimensionMismatch {
                what: "tensor cells",
                expected,
                found: cells.len(),
            });
        }
        Ok(Self { arity, side, cells })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn cells(&self) -> &[V] {
        &self.cells
    }

    pub fn get(&self, index: &[usize]) -> &V {
        &self.cells[flat_index(&vec![self.side; self.arity], index)]
    }
}

/// Exact law of the size-`k` corner of an `arity`-dimensional array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorCornerDistribution<V = String> {
    arity: usize,
    k: usize,
    entries: BTreeMap<ValueTensor<V>, Rational>,
}

impl<V: Value> TensorCornerDistribution<V> {
    pub fn new(arity: usize, k: usize, entries: BTreeMap<ValueTensor<V>, Rational>) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParameter("corner size must be positive".into()));
        }
        for (t, p) in &entries {
            if t.arity != arity || t.side != k {
                return Err(Error::SizeMismatch { left: k, right: t.side });
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
        Ok(Self { arity, k, entries })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &BTreeMap<ValueTensor<V>, Rational> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn probability(&self, t: &ValueTensor<V>) -> Rational {
        self.entries.get(t).cloned().unwrap_or_default()
    }
}

/// Enumerates the exact size-`k` corner law of the array built from `f`.
///
/// Budget: `Π |X_a|^k` tuples.
pub fn exact_tensor_corner<V: Value>(
    f: &TensorFunction<V>,
    k: usize,
    budget: u64,
) -> Result<TensorCornerDistribution<V>> {
    if k == 0 {
        return Err(Error::InvalidParameter("corner size must be positive".into()));
    }
    check_budget(f.shape(), k, budget)?;
    let (alphabet, codes) = encode(f.values());
    let axes: Vec<AxisWeights> = f.spaces.iter().map(|s| AxisWeights::new(s.weights())).collect();
    let denominator = axes
        .iter()
        .fold(BigUint::one(), |acc, a| acc * a.denominator.pow(k as u32));
    let counts = if denominator.bits() <= 128 {
        accumulate_tensor::<u128>(&codes, &f.shape, &axes, k)
    } else {
        accumulate_tensor::<BigUint>(&codes, &f.shape, &axes, k)
    };
    let arity = f.arity();
    let entries = decode(counts, &alphabet, &denominator, |cells| ValueTensor {
        arity,
        side: k,
        cells,
    });
    Ok(TensorCornerDistribution { arity, k, entries })
}

fn accumulate_tensor<T: Numerator>(
    codes: &[u32],
    shape: &[usize],
    axes: &[AxisWeights],
    k: usize,
) -> Vec<(Vec<u32>, BigUint)> {
    let n = axes.len();
    let tuples: Vec<Vec<(T, Vec<usize>)>> = axes.iter().map(|a| a.tuples(k)).collect();
    let side_cells = k.pow(n as u32);
    let mut acc: FastMap<Vec<u32>, T> = FastMap::default();
    let mut choice = vec![0usize; n];
    let mut key = vec![0u32; side_cells];
    let mut corner_index = vec![0usize; n];
    let mut atom_index = vec![0usize; n];
    loop {
        // fill the corner for the current choice of per-axis tuples
        for (cell, slot) in key.iter_mut().enumerate() {
            let mut rest = cell;
            for a in (0..n).rev() {
                corner_index[a] = rest % k;
                rest /= k;
            }
            for a in 0..n {
                atom_index[a] = tuples[a][choice[a]].1[corner_index[a]];
            }
            *slot = codes[flat_index(shape, &atom_index)];
        }
        let w = (1..n).fold(tuples[0][choice[0]].0.clone(), |acc, a| {
            acc.times(&tuples[a][choice[a]].0)
        });
        match acc.get_mut(key.as_slice()) {
            Some(slot) => *slot += &w,
            None => {
                acc.insert(key.clone(), w);
            }
        }
        // odometer over tuple choices
        let mut a = n;
        loop {
            if a == 0 {
                return acc.into_iter().map(|(k, v)| (k, v.into_big())).collect();
            }
            a -= 1;
            choice[a] += 1;
            if choice[a] < tuples[a].len() {
                break;
            }
            choice[a] = 0;
        }
    }
}

/// A realization with `n` draws on every axis; axis `a` uses stream `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledTensor<V = String> {
    arity: usize,
    side: usize,
    values: Vec<V>,
    seed: u64,
}

impl<V: Value> SampledTensor<V> {
    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn side(&self) -> usize {
        self.side
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn get(&self, index: &[usize]) -> &V {
        &self.values[flat_index(&vec![self.side; self.arity], index)]
    }
}

/// Samples an `n × … × n` realization. Refuses more than `max_cells` cells.
pub fn sample_tensor<V: Value>(f: &TensorFunction<V>, n: usize, seed: u64, max_cells: u64) -> Result<SampledTensor<V>> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be positive".into()));
    }
    let arity = f.arity();
    let cells = (n as u128).checked_pow(arity as u32).unwrap_or(u128::MAX);
    if cells > max_cells as u128 {
        return Err(Error::BudgetExceeded {
            required: cells,
            budget: max_cells,
        });
    }
    let rng = CounterRng::new(seed);
    let draws: Vec<Vec<usize>> = f
        .spaces
        .iter()
        .enumerate()
        .map(|(a, s)| AtomSampler::new(s).draw_many(&rng, a as u64, n))
        .collect();
    let mut values = Vec::with_capacity(cells as usize);
    let mut index = vec![0usize; arity];
    let mut atoms = vec![0usize; arity];
    for cell in 0..cells as usize {
        let mut rest = cell;
        for a in (0..arity).rev() {
            index[a] = rest % n;
            rest /= n;
        }
        for a in 0..arity {
            atoms[a] = draws[a][index[a]];
        }
        values.push(f.value(&atoms).clone());
    }
    Ok(SampledTensor {
        arity,
        side: n,
        values,
        seed,
    })
}
