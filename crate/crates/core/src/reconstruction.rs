//! The individual canonical model: rebuilding a function from one sampled
//! matrix.
//!
//! Rows are grouped by their length-`n` prefix and columns likewise. Class
//! frequencies estimate the two measures, and each class pair carries the
//! empirical distribution of the labels in its block. For a typical sample
//! of a pure function, classes coincide with atoms once `n` separates them.

use std::collections::BTreeMap;
use std::ops::ControlFlow;

use num_traits::{One, Zero};

use crate::distribution::{encode, FastMap};
use crate::error::{Error, Result};
use crate::function::{FiniteFunction, Value};
use crate::measure::FiniteMeasureSpace;
use crate::ratio::{format_rational, rational, total_variation_aligned, Rational};
use crate::sample::{sample_matrix, SampledMatrix};
use crate::symmetry::value_isomorphisms;

/// Per-block values keyed by (row prefix, column prefix).
pub type BlockMap<V, T> = BTreeMap<(Vec<V>, Vec<V>), T>;

/// Weight distance with the row and column maps that achieve it.
pub type Matching = (Rational, Vec<usize>, Vec<usize>);

/// Default lower mass for classes subject to the homogeneity check.
pub fn default_min_class_mass() -> Rational {
    rational(1, 100)
}

fn check_depth(n: usize, side: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("depth must be positive".into()));
    }
    if n > side {
        return Err(Error::DepthExceedsMatrix { depth: n, size: side });
    }
    Ok(())
}

fn row_prefix<V: Value>(r: &SampledMatrix<V>, row: usize, n: usize) -> Vec<V> {
    r.row(row)[..n].to_vec()
}

fn col_prefix<V: Value>(r: &SampledMatrix<V>, col: usize, n: usize) -> Vec<V> {
    (0..n).map(|i| r.value(i, col).clone()).collect()
}

/// Sorted class prefixes, the class index of every line and class sizes.
fn classes<V: Value>(prefixes: Vec<Vec<V>>) -> (Vec<Vec<V>>, Vec<usize>, Vec<u64>) {
    let mut first_seen: FastMap<&[V], usize> = FastMap::default();
    let provisional: Vec<usize> = prefixes
        .iter()
        .map(|p| {
            let next = first_seen.len();
            *first_seen.entry(p.as_slice()).or_insert(next)
        })
        .collect();
    let mut keys: Vec<(&[V], usize)> = first_seen.into_iter().collect();
    keys.sort();
    let mut rank = vec![0; keys.len()];
    for (r, (_, id)) in keys.iter().enumerate() {
        rank[*id] = r;
    }
    let mut counts = vec![0u64; keys.len()];
    let assignment = provisional
        .into_iter()
        .map(|id| {
            counts[rank[id]] += 1;
            rank[id]
        })
        .collect();
    let keys = keys.into_iter().map(|(k, _)| k.to_vec()).collect();
    (keys, assignment, counts)
}

fn frequencies<V: Value>(keys: Vec<Vec<V>>, counts: &[u64], total: usize) -> BTreeMap<Vec<V>, Rational> {
    keys.into_iter()
        .zip(counts)
        .map(|(k, &c)| (k, rational(c as i64, total as i64)))
        .collect()
}

/// Empirical law of the row prefixes `(r[i][0..n])`, with denominator `N`.
pub fn empirical_row_measure<V: Value>(r: &SampledMatrix<V>, n: usize) -> Result<BTreeMap<Vec<V>, Rational>> {
    check_depth(n, r.n_cols())?;
    let (keys, _, counts) = classes((0..r.n_rows()).map(|i| row_prefix(r, i, n)).collect());
    Ok(frequencies(keys, &counts, r.n_rows()))
}

/// Empirical law of the column prefixes `(r[0..n][j])`.
pub fn empirical_col_measure<V: Value>(r: &SampledMatrix<V>, n: usize) -> Result<BTreeMap<Vec<V>, Rational>> {
    check_depth(n, r.n_rows())?;
    let (keys, _, counts) = classes((0..r.n_cols()).map(|j| col_prefix(r, j, n)).collect());
    Ok(frequencies(keys, &counts, r.n_cols()))
}

/// One block of the empirical model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointCell<V = String> {
    /// Fraction of all cells lying in the block.
    pub mass: Rational,
    /// Label frequencies inside the block.
    pub frequencies: BTreeMap<V, Rational>,
}

/// Row and column classes at depth `n` with their block statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpiricalModel<V = String> {
    pub depth: usize,
    pub row_classes: BTreeMap<Vec<V>, Rational>,
    pub col_classes: BTreeMap<Vec<V>, Rational>,
    pub joint: BlockMap<V, JointCell<V>>,
}

/// Above this many (block, label) counters the sparse path is used.
const DENSE_TABLE_LIMIT: usize = 1 << 24;

struct Blocks<V> {
    row_keys: Vec<Vec<V>>,
    col_keys: Vec<Vec<V>>,
    row_counts: Vec<u64>,
    col_counts: Vec<u64>,
    // label counts per (row class, column class), row-major
    labels: Vec<BTreeMap<V, u64>>,
}

fn blocks<V: Value>(r: &SampledMatrix<V>, n: usize) -> Result<Blocks<V>> {
    check_depth(n, r.n_cols().min(r.n_rows()))?;
    let (row_keys, row_of, row_counts) = classes((0..r.n_rows()).map(|i| row_prefix(r, i, n)).collect());
    let (col_keys, col_of, col_counts) = classes((0..r.n_cols()).map(|j| col_prefix(r, j, n)).collect());
    let width = col_keys.len();
    let (alphabet, codes) = encode(r.values());
    let table = row_keys.len() * width * alphabet.len();
    let labels: Vec<BTreeMap<V, u64>> = if table <= DENSE_TABLE_LIMIT {
        let mut dense = vec![0u64; table];
        for (i, &a) in row_of.iter().enumerate() {
            let base = a * width;
            let row = &codes[i * r.n_cols()..(i + 1) * r.n_cols()];
            for (&c, &code) in col_of.iter().zip(row) {
                dense[(base + c) * alphabet.len() + code as usize] += 1;
            }
        }
        dense
            .chunks(alphabet.len())
            .map(|block| {
                block
                    .iter()
                    .enumerate()
                    .filter(|(_, &k)| k > 0)
                    .map(|(v, &k)| (alphabet[v].clone(), k))
                    .collect()
            })
            .collect()
    } else {
        let mut labels = vec![BTreeMap::new(); row_keys.len() * width];
        for (i, &a) in row_of.iter().enumerate() {
            for (j, &code) in codes[i * r.n_cols()..(i + 1) * r.n_cols()].iter().enumerate() {
                *labels[a * width + col_of[j]]
                    .entry(alphabet[code as usize].clone())
                    .or_insert(0) += 1;
            }
        }
        labels
    };
    Ok(Blocks {
        row_keys,
        col_keys,
        row_counts,
        col_counts,
        labels,
    })
}

/// Frequency form of the empirical model. Every class pair has
/// `|A| · |B| ≥ 1` cells, so no block is empty.
pub fn empirical_joint<V: Value>(r: &SampledMatrix<V>, n: usize) -> Result<EmpiricalModel<V>> {
    let b = blocks(r, n)?;
    let cells = (r.n_rows() * r.n_cols()) as i64;
    let mut joint = BTreeMap::new();
    for (a, row_key) in b.row_keys.iter().enumerate() {
        for (c, col_key) in b.col_keys.iter().enumerate() {
            let size = (b.row_counts[a] * b.col_counts[c]) as i64;
            let frequencies = b.labels[a * b.col_keys.len() + c]
                .iter()
                .map(|(v, &k)| (v.clone(), rational(k as i64, size)))
                .collect();
            joint.insert(
                (row_key.clone(), col_key.clone()),
                JointCell {
                    mass: rational(size, cells),
                    frequencies,
                },
            );
        }
    }
    Ok(EmpiricalModel {
        depth: n,
        row_classes: frequencies(b.row_keys, &b.row_counts, r.n_rows()),
        col_classes: frequencies(b.col_keys, &b.col_counts, r.n_cols()),
        joint,
    })
}

/// Density form: the within-block mean of the numeric values, i.e. the
/// block's share of `Σ r[k][l] / N²` divided by its share of cells.
pub fn empirical_density<V: Value>(
    r: &SampledMatrix<V>,
    n: usize,
    numeric: impl Fn(&V) -> Option<Rational>,
) -> Result<BlockMap<V, Rational>> {
    let b = blocks(r, n)?;
    let mut out = BTreeMap::new();
    for (a, row_key) in b.row_keys.iter().enumerate() {
        for (c, col_key) in b.col_keys.iter().enumerate() {
            let mut total = Rational::zero();
            for (v, &k) in &b.labels[a * b.col_keys.len() + c] {
                let x = numeric(v).ok_or_else(|| Error::InvalidParameter(format!("label {v:?} is not numeric")))?;
                total += x * Rational::from_integer(k.into());
            }
            let size = Rational::from_integer((b.row_counts[a] * b.col_counts[c]).into());
            out.insert((row_key.clone(), col_key.clone()), total / size);
        }
    }
    Ok(out)
}

/// Builds the finite model at depth `n`: one atom per row class and per
/// column class, weighted by class frequency, with the majority label of
/// each block (ties go to the least label).
///
/// A block whose two classes both have mass at least `min_class_mass` must
/// have a majority share of at least `1 − min_class_mass`; otherwise the
/// depth is too small to separate classes and [`Error::AmbiguousCell`] is
/// returned.
pub fn reconstruct<V: Value>(r: &SampledMatrix<V>, n: usize, min_class_mass: &Rational) -> Result<FiniteFunction<V>> {
    if min_class_mass < &Rational::zero() || min_class_mass >= &Rational::one() {
        return Err(Error::InvalidParameter(format!(
            "min_class_mass {} must lie in [0, 1)",
            format_rational(min_class_mass)
        )));
    }
    let b = blocks(r, n)?;
    let threshold = Rational::one() - min_class_mass;
    let row_mass = |a: usize| rational(b.row_counts[a] as i64, r.n_rows() as i64);
    let col_mass = |c: usize| rational(b.col_counts[c] as i64, r.n_cols() as i64);
    let mut values = Vec::with_capacity(b.row_keys.len() * b.col_keys.len());
    for a in 0..b.row_keys.len() {
        for c in 0..b.col_keys.len() {
            let labels = &b.labels[a * b.col_keys.len() + c];
            // max_by_key keeps the last maximum; reversing label order makes it the least label
            let (label, &count) = labels
                .iter()
                .rev()
                .max_by_key(|(_, &k)| k)
                .expect("blocks are never empty");
            let size = b.row_counts[a] * b.col_counts[c];
            let share = rational(count as i64, size as i64);
            if row_mass(a) >= *min_class_mass && col_mass(c) >= *min_class_mass && share < threshold {
                return Err(Error::AmbiguousCell {
                    row_class: a,
                    col_class: c,
                    share: format_rational(&share),
                    threshold: format_rational(&threshold),
                });
            }
            values.push(label.clone());
        }
    }
    let space = |prefix: &str, counts: &[u64], total: usize| {
        FiniteMeasureSpace::new(
            (0..counts.len()).map(|i| format!("{prefix}{i}")).collect(),
            counts.iter().map(|&c| rational(c as i64, total as i64)).collect(),
        )
    };
    FiniteFunction::from_row_major(
        space("r", &b.row_counts, r.n_rows())?,
        space("c", &b.col_counts, r.n_cols())?,
        values,
    )
}

/// Smallest depth whose row and column class counts equal those of whole
/// rows and columns. Counts only grow with depth, so this is a binary search.
pub fn stable_depth<V: Value>(r: &SampledMatrix<V>) -> usize {
    let side = r.n_rows().min(r.n_cols());
    let counts = |n: usize| {
        let rows = classes((0..r.n_rows()).map(|i| row_prefix(r, i, n)).collect()).0.len();
        let cols = classes((0..r.n_cols()).map(|j| col_prefix(r, j, n)).collect()).0.len();
        (rows, cols)
    };
    let full = counts(side);
    let (mut lo, mut hi) = (1, side);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if counts(mid) == full {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Result of a sample → reconstruct → match round trip.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReconstructionReport<V = String> {
    pub reconstructed: FiniteFunction<V>,
    /// Values match the pure factor exactly under some bijection.
    pub values_match: bool,
    pub isomorphic_to_source: bool,
    /// Largest of the row and column weight distances under the best
    /// matching bijection; `1` when values do not match.
    pub weight_tv: Rational,
    pub depth_used: usize,
    /// Best matching maps from reconstructed classes to purified atoms.
    pub row_map: Option<Vec<usize>>,
    pub col_map: Option<Vec<usize>>,
}

/// Matches `reconstructed` to `target` by exact value isomorphism ignoring
/// weights, minimizing the weight distance.
pub fn match_reconstruction<V: Value>(
    reconstructed: &FiniteFunction<V>,
    target: &FiniteFunction<V>,
) -> Result<Option<Matching>> {
    let rows = vec![(); reconstructed.n_rows()];
    let cols = vec![(); reconstructed.n_cols()];
    let mut best: Option<Matching> = None;
    value_isomorphisms(reconstructed, target, (&rows, &rows), (&cols, &cols), |sigma, tau| {
        let mapped = |from: &FiniteMeasureSpace, to: &FiniteMeasureSpace, map: &[usize]| {
            let mut w = vec![Rational::zero(); to.len()];
            for (i, &t) in map.iter().enumerate() {
                w[t] = from.weight(i).clone();
            }
            total_variation_aligned(&w, to.weights())
        };
        let tv = mapped(reconstructed.x_space(), target.x_space(), sigma).max(mapped(
            reconstructed.y_space(),
            target.y_space(),
            tau,
        ));
        if best.as_ref().map_or(true, |(b, _, _)| tv < *b) {
            best = Some((tv, sigma.to_vec(), tau.to_vec()));
        }
        ControlFlow::Continue(())
    })?;
    Ok(best)
}

/// Samples `n_samples × n_samples` from `f`, reconstructs at `depth` and
/// compares with the pure factor of `f`.
pub fn reconstruction_check<V: Value>(
    f: &FiniteFunction<V>,
    n_samples: usize,
    depth: usize,
    seed: u64,
    tol: &Rational,
) -> Result<ReconstructionReport<V>> {
    reconstruction_check_with(f, n_samples, depth, seed, tol, &default_min_class_mass())
}

pub fn reconstruction_check_with<V: Value>(
    f: &FiniteFunction<V>,
    n_samples: usize,
    depth: usize,
    seed: u64,
    tol: &Rational,
    min_class_mass: &Rational,
) -> Result<ReconstructionReport<V>> {
    let r = sample_matrix(f, n_samples, seed)?;
    reconstruction_report(f, &r, depth, tol, min_class_mass)
}

/// Reconstructs from an already sampled `r` and compares with the pure
/// factor of `f`.
pub fn reconstruction_report<V: Value>(
    f: &FiniteFunction<V>,
    r: &SampledMatrix<V>,
    depth: usize,
    tol: &Rational,
    min_class_mass: &Rational,
) -> Result<ReconstructionReport<V>> {
    let reconstructed = reconstruct(r, depth, min_class_mass)?;
    let (target, _) = f.purify();
    let matched = match_reconstruction(&reconstructed, &target)?;
    Ok(match matched {
        Some((tv, row_map, col_map)) => ReconstructionReport {
            reconstructed,
            values_match: true,
            isomorphic_to_source: &tv <= tol,
            weight_tv: tv,
            depth_used: depth,
            row_map: Some(row_map),
            col_map: Some(col_map),
        },
        None => ReconstructionReport {
            reconstructed,
            values_match: false,
            isomorphic_to_source: false,
            weight_tv: Rational::one(),
            depth_used: depth,
            row_map: None,
            col_map: None,
        },
    })
}

/// Distance between the empirical law of consecutive row-prefix pairs
/// `(2i, 2i + 1)` and the product of the empirical prefix law with itself.
/// Small for i.i.d. rows.
pub fn definetti_diagnostic<V: Value>(r: &SampledMatrix<V>, n: usize) -> Result<Rational> {
    check_depth(n, r.n_cols())?;
    if r.n_rows() % 2 != 0 {
        return Err(Error::InvalidParameter("the number of rows must be even".into()));
    }
    let (_, of, counts) = classes((0..r.n_rows()).map(|i| row_prefix(r, i, n)).collect());
    let marginal: Vec<Rational> = counts.iter().map(|&c| rational(c as i64, r.n_rows() as i64)).collect();
    let pairs = r.n_rows() / 2;
    let mut joint: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for i in 0..pairs {
        *joint.entry((of[2 * i], of[2 * i + 1])).or_default() += 1;
    }
    // pairs outside the joint support contribute their full product mass
    let mut distance = Rational::zero();
    let mut covered = Rational::zero();
    for (&(a, b), &c) in &joint {
        let product = &marginal[a] * &marginal[b];
        let empirical = rational(c as i64, pairs as i64);
        distance += if empirical > product {
            empirical - &product
        } else {
            &product - empirical
        };
        covered += product;
    }
    distance += Rational::one() - covered;
    Ok(distance / Rational::from_integer(2.into()))
}

/// A matrix whose rows come in identical consecutive pairs, each pair drawn
/// from `f`. Fails the i.i.d. row check by construction.
pub fn duplicated_rows<V: Value>(f: &FiniteFunction<V>, n_samples: usize, seed: u64) -> Result<SampledMatrix<V>> {
    if n_samples % 2 != 0 {
        return Err(Error::InvalidParameter("the number of rows must be even".into()));
    }
    let base = sample_matrix(f, n_samples, seed)?;
    let values = (0..n_samples).flat_map(|i| base.row(i - i % 2).to_vec()).collect();
    SampledMatrix::from_values(n_samples, n_samples, values)
}
