//! Finite realizations of the random matrix `(f(x_i, y_j))`.
//!
//! Draw `i` on axis `a` uses stream `a` of the counter-based generator at
//! index `i`, so every atom is a pure function of `(seed, axis, index)`.

use num_bigint::BigUint;

use crate::distribution::{AxisWeights, CornerDistribution, ValueMatrix};
use crate::error::{Error, Result};
use crate::function::{FiniteFunction, Value};
use crate::measure::FiniteMeasureSpace;
use crate::rng::CounterRng;

/// Exact categorical sampler over the atoms of a finite space.
#[derive(Debug, Clone)]
pub struct AtomSampler {
    denominator: BigUint,
    // cumulative numerators; atom i covers [cumulative[i-1], cumulative[i])
    cumulative: Vec<BigUint>,
    small: Option<(u64, Vec<u64>)>,
}

impl AtomSampler {
    pub fn new(space: &FiniteMeasureSpace) -> Self {
        let axis = AxisWeights::new(space.weights());
        let mut running = BigUint::from(0u32);
        let cumulative: Vec<BigUint> = axis
            .numerators
            .iter()
            .map(|n| {
                running += n;
                running.clone()
            })
            .collect();
        let small = u64::try_from(&axis.denominator).ok().map(|d| {
            (
                d,
                cumulative
                    .iter()
                    .map(|c| u64::try_from(c).expect("below denominator"))
                    .collect(),
            )
        });
        Self {
            denominator: axis.denominator,
            cumulative,
            small,
        }
    }

    pub fn draw(&self, rng: &CounterRng, stream: u64, index: u64) -> usize {
        match &self.small {
            Some((d, cumulative)) => {
                let u = rng.below(stream, index, *d);
                cumulative.partition_point(|&c| c <= u)
            }
            None => {
                let u = rng.below_big(stream, index, &self.denominator);
                self.cumulative.partition_point(|c| c <= &u)
            }
        }
    }

    /// Atoms for draws `0..count` of `stream`.
    pub fn draw_many(&self, rng: &CounterRng, stream: u64, count: usize) -> Vec<usize> {
        (0..count as u64).map(|i| self.draw(rng, stream, i)).collect()
    }
}

/// An `n_rows × n_cols` realization of the random matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampledMatrix<V = String> {
    n_rows: usize,
    n_cols: usize,
    values: Vec<V>,
    seed: u64,
    /// Sampled atom indices; kept for test oracles only.
    row_atoms: Vec<usize>,
    col_atoms: Vec<usize>,
}

impl<V: Value> SampledMatrix<V> {
    /// A matrix not produced by sampling (synthetic inputs, parsed files).
    pub fn from_values(n_rows: usize, n_cols: usize, values: Vec<V>) -> Result<Self> {
        if n_rows == 0 || n_cols == 0 {
            return Err(Error::InvalidParameter("matrix sides must be positive".into()));
        }
        if values.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch {
                what: "matrix cells",
                expected: n_rows * n_cols,
                found: values.len(),
            });
        }
        Ok(Self {
            n_rows,
            n_cols,
            values,
            seed: 0,
            row_atoms: Vec::new(),
            col_atoms: Vec::new(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn row_atoms(&self) -> &[usize] {
        &self.row_atoms
    }

    pub fn col_atoms(&self) -> &[usize] {
        &self.col_atoms
    }

    #[inline]
    pub fn value(&self, row: usize, col: usize) -> &V {
        &self.values[row * self.n_cols + col]
    }

    pub fn row(&self, row: usize) -> &[V] {
        &self.values[row * self.n_cols..(row + 1) * self.n_cols]
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn to_rows(&self) -> Vec<Vec<V>> {
        self.values.chunks(self.n_cols).map(<[V]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        let values = (0..self.n_cols)
            .flat_map(|j| (0..self.n_rows).map(move |i| (i, j)))
            .map(|(i, j)| self.value(i, j).clone())
            .collect();
        Self {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            values,
            seed: self.seed,
            row_atoms: self.col_atoms.clone(),
            col_atoms: self.row_atoms.clone(),
        }
    }
}

/// Draws `n` rows from `μ` and `n` columns from `ν` and evaluates `f`.
pub fn sample_matrix<V: Value>(f: &FiniteFunction<V>, n: usize, seed: u64) -> Result<SampledMatrix<V>> {
    if n == 0 {
        return Err(Error::InvalidParameter("sample size must be positive".into()));
    }
    let rng = CounterRng::new(seed);
    let row_atoms = AtomSampler::new(f.x_space()).draw_many(&rng, 0, n);
    let col_atoms = AtomSampler::new(f.y_space()).draw_many(&rng, 1, n);
    let values = row_atoms
        .iter()
        .flat_map(|&x| col_atoms.iter().map(move |&y| (x, y)))
        .map(|(x, y)| f.value(x, y).clone())
        .collect();
    Ok(SampledMatrix {
        n_rows: n,
        n_cols: n,
        values,
        seed,
        row_atoms,
        col_atoms,
    })
}

/// The `blocks` diagonal `k × k` blocks of `sample_matrix(f, k·blocks, seed)`,
/// computed without materializing the full matrix. Diagonal blocks use
/// disjoint rows and columns, so they are i.i.d. draws from the corner law.
pub fn diagonal_blocks<V: Value>(
    f: &FiniteFunction<V>,
    k: usize,
    blocks: usize,
    seed: u64,
) -> Result<Vec<ValueMatrix<V>>> {
    if k == 0 || blocks == 0 {
        return Err(Error::InvalidParameter("block size and count must be positive".into()));
    }
    let rng = CounterRng::new(seed);
    let rows = AtomSampler::new(f.x_space()).draw_many(&rng, 0, k * blocks);
    let cols = AtomSampler::new(f.y_space()).draw_many(&rng, 1, k * blocks);
    (0..blocks)
        .map(|b| {
            let cells = (0..k)
                .flat_map(|i| (0..k).map(move |j| (i, j)))
                .map(|(i, j)| f.value(rows[b * k + i], cols[b * k + j]).clone())
                .collect();
            ValueMatrix::new(k, k, cells)
        })
        .collect()
}

/// Empirical corner law from the diagonal blocks.
pub fn empirical_corner_distribution<V: Value>(
    f: &FiniteFunction<V>,
    k: usize,
    blocks: usize,
    seed: u64,
) -> Result<CornerDistribution<V>> {
    CornerDistribution::empirical(k, diagonal_blocks(f, k, blocks, seed)?)
}
