//! Finite functions of two variables, purity and purification.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::measure::{FiniteMeasureSpace, MetricType};
use crate::ratio::{sum, Rational};

/// Bound collected by every value alphabet used in this crate.
pub trait Value: Clone + Eq + Ord + Hash + Debug {}

impl<T: Clone + Eq + Ord + Hash + Debug> Value for T {}

/// `f: (X, μ) × (Y, ν) → Z` on finite spaces, stored row-major.
///
/// Row `i` is `f_X(x_i) = f(x_i, ·)`; column `j` is `f_Y(y_j) = f(·, y_j)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteFunction<V = String> {
    x: FiniteMeasureSpace,
    y: FiniteMeasureSpace,
    values: Vec<V>,
}

impl<V: Value> FiniteFunction<V> {
    pub fn new(x: FiniteMeasureSpace, y: FiniteMeasureSpace, rows: Vec<Vec<V>>) -> Result<Self> {
        if rows.len() != x.len() {
            return Err(Error::DimensionMismatch {
                what: "value rows vs x atoms",
                expected: x.len(),
                found: rows.len(),
            });
        }
        if let Some(row) = rows.iter().find(|r| r.len() != y.len()) {
            return Err(Error::DimensionMismatch {
                what: "value columns vs y atoms",
                expected: y.len(),
                found: row.len(),
            });
        }
        Ok(Self {
            x,
            y,
            values: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_row_major(x: FiniteMeasureSpace, y: FiniteMeasureSpace, values: Vec<V>) -> Result<Self> {
        if values.len() != x.len() * y.len() {
            return Err(Error::DimensionMismatch {
                what: "value cells",
                expected: x.len() * y.len(),
                found: values.len(),
            });
        }
        Ok(Self { x, y, values })
    }

    pub fn x_space(&self) -> &FiniteMeasureSpace {
        &self.x
    }

    pub fn y_space(&self) -> &FiniteMeasureSpace {
        &self.y
    }

    pub fn n_rows(&self) -> usize {
        self.x.len()
    }

    pub fn n_cols(&self) -> usize {
        self.y.len()
    }

    #[inline]
    pub fn value(&self, row: usize, col: usize) -> &V {
        &self.values[row * self.y.len() + col]
    }

    pub fn row(&self, row: usize) -> &[V] {
        let m = self.y.len();
        &self.values[row * m..(row + 1) * m]
    }

    pub fn column(&self, col: usize) -> Vec<&V> {
        (0..self.n_rows()).map(|i| self.value(i, col)).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[V]> {
        self.values.chunks(self.y.len())
    }

    pub fn row_major(&self) -> &[V] {
        &self.values
    }

    pub fn to_rows(&self) -> Vec<Vec<V>> {
        self.rows().map(<[V]>::to_vec).collect()
    }

    pub fn map_values<W: Value>(&self, mut map: impl FnMut(&V) -> W) -> FiniteFunction<W> {
        FiniteFunction {
            x: self.x.clone(),
            y: self.y.clone(),
            values: self.values.iter().map(&mut map).collect(),
        }
    }

    /// Relabels atoms: row `i` of the result is row `row_order[i]` of
    /// `self`, column `j` is column `col_order[j]`. Weights travel with atoms.
    pub fn reordered(&self, row_order: &[usize], col_order: &[usize]) -> Self {
        let values = row_order
            .iter()
            .flat_map(|&i| col_order.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.value(i, j).clone())
            .collect();
        Self {
            x: self.x.reordered(row_order),
            y: self.y.reordered(col_order),
            values,
        }
    }

    pub fn transpose(&self) -> Self {
        let values = (0..self.n_cols())
            .flat_map(|j| (0..self.n_rows()).map(move |i| (i, j)))
            .map(|(i, j)| self.value(i, j).clone())
            .collect();
        Self {
            x: self.y.clone(),
            y: self.x.clone(),
            values,
        }
    }

    /// Pure iff no two rows and no two columns coincide.
    pub fn is_pure(&self) -> bool {
        let distinct_rows = {
            let mut seen = std::collections::HashSet::new();
            self.rows().all(|r| seen.insert(r))
        };
        distinct_rows && {
            let mut seen = std::collections::HashSet::new();
            (0..self.n_cols()).all(|j| seen.insert(self.column(j)))
        }
    }

    /// Quotient by equal rows, then by equal columns.
    ///
    /// Purified atoms keep the id of their first member and carry the summed
    /// weight of all members. Merging rows never separates columns, so the
    /// fixed order does not change the result.
    pub fn purify(&self) -> (FiniteFunction<V>, FactorMaps) {
        let (row_classes, row_projection) = group_identical((0..self.n_rows()).map(|i| self.row(i)));
        let merged_x = merge_atoms(&self.x, &row_classes);
        let row_merged: Vec<Vec<V>> = row_classes.iter().map(|c| self.row(c[0]).to_vec()).collect();

        let columns = (0..self.n_cols()).map(|j| row_merged.iter().map(|r| &r[j]).collect::<Vec<_>>());
        let (col_classes, col_projection) = group_identical(columns);
        let merged_y = merge_atoms(&self.y, &col_classes);
        let values = row_merged
            .iter()
            .flat_map(|r| col_classes.iter().map(move |c| r[c[0]].clone()))
            .collect();

        let pure = FiniteFunction {
            x: merged_x,
            y: merged_y,
            values,
        };
        (
            pure,
            FactorMaps {
                row_projection,
                col_projection,
            },
        )
    }

    /// The purification with every cell tagged by the metric types of the
    /// conditional measures on the row and column fibers.
    pub fn extended_pure_factor(&self) -> FiniteFunction<ExtendedValueLabel<V>> {
        let (pure, maps) = self.purify();
        let row_types = fiber_types(&self.x, &maps.row_projection, pure.n_rows());
        let col_types = fiber_types(&self.y, &maps.col_projection, pure.n_cols());
        let values = (0..pure.n_rows())
            .flat_map(|i| (0..pure.n_cols()).map(move |j| (i, j)))
            .map(|(i, j)| ExtendedValueLabel {
                base: pure.value(i, j).clone(),
                row_type: row_types[i].clone(),
                col_type: col_types[j].clone(),
            })
            .collect();
        FiniteFunction {
            x: pure.x,
            y: pure.y,
            values,
        }
    }
}

/// Projections from original atoms onto purified atoms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FactorMaps {
    pub row_projection: Vec<usize>,
    pub col_projection: Vec<usize>,
}

impl FactorMaps {
    /// Original atoms merged into each purified row atom, in original order.
    pub fn row_fibers(&self, purified_rows: usize) -> Vec<Vec<usize>> {
        fibers(&self.row_projection, purified_rows)
    }

    pub fn col_fibers(&self, purified_cols: usize) -> Vec<Vec<usize>> {
        fibers(&self.col_projection, purified_cols)
    }

    pub fn is_identity(&self) -> bool {
        self.row_projection.iter().enumerate().all(|(i, &p)| i == p)
            && self.col_projection.iter().enumerate().all(|(i, &p)| i == p)
    }
}

/// Cell value of the extended pure factor: `(f̄(x, y), m(μ_x), m(ν_y))`.
///
/// Ordered lexicographically by base value, then row type, then column type.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExtendedValueLabel<V = String> {
    pub base: V,
    pub row_type: MetricType,
    pub col_type: MetricType,
}

fn fibers(projection: &[usize], classes: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); classes];
    for (atom, &class) in projection.iter().enumerate() {
        out[class].push(atom);
    }
    out
}

fn fiber_types(space: &FiniteMeasureSpace, projection: &[usize], classes: usize) -> Vec<MetricType> {
    fibers(projection, classes)
        .into_iter()
        .map(|members| {
            let weights: Vec<Rational> = members.iter().map(|&a| space.weight(a).clone()).collect();
            let mass = sum(&weights);
            MetricType::from_unsorted(weights.into_iter().map(|w| w / &mass).collect())
        })
        .collect()
}

/// Groups equal items in order of first occurrence.
fn group_identical<K: Hash + Eq>(items: impl Iterator<Item = K>) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut index: HashMap<K, usize> = HashMap::new();
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut projection = Vec::new();
    for (i, item) in items.enumerate() {
        let next = classes.len();
        let class = *index.entry(item).or_insert(next);
        if class == next {
            classes.push(Vec::new());
        }
        classes[class].push(i);
        projection.push(class);
    }
    (classes, projection)
}

fn merge_atoms(space: &FiniteMeasureSpace, classes: &[Vec<usize>]) -> FiniteMeasureSpace {
    FiniteMeasureSpace::from_parts_unchecked(
        classes.iter().map(|c| space.atom_ids()[c[0]].clone()).collect(),
        classes
            .iter()
            .map(|c| sum(c.iter().map(|&a| space.weight(a))))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{constant, function, xor};
    use crate::ratio::rational;

    #[test]
    fn purity_examples() {
        assert!(xor().is_pure());
        assert!(!constant(2, 2, 0u8).is_pure());
        let equal_columns = function(&[(1, 2), (1, 2)], &[(1, 2), (1, 2)], &[&[0u8, 0], &[1, 1]]);
        assert!(!equal_columns.is_pure());
    }

    #[test]
    fn purify_merges_equal_columns() {
        let f = function(&[(1, 2), (1, 2)], &[(1, 2), (1, 2)], &[&[0u8, 0], &[1, 1]]);
        let (pure, maps) = f.purify();
        assert_eq!(pure.to_rows(), vec![vec![0], vec![1]]);
        assert_eq!(pure.y_space().weights(), [rational(1, 1)]);
        assert_eq!(pure.x_space().weights(), [rational(1, 2), rational(1, 2)]);
        assert_eq!(maps.col_projection, vec![0, 0]);
        assert_eq!(maps.row_projection, vec![0, 1]);
        assert!(pure.is_pure());
    }

    #[test]
    fn purify_keeps_pure_functions() {
        let f = xor();
        let (pure, maps) = f.purify();
        assert_eq!(pure, f);
        assert!(maps.is_identity());
    }

    #[test]
    fn purify_collapses_constants() {
        let (pure, _) = constant(2, 2, 0u8).purify();
        assert_eq!(pure.to_rows(), vec![vec![0]]);
        assert_eq!(pure.x_space().weights(), [rational(1, 1)]);
        assert_eq!(pure.y_space().weights(), [rational(1, 1)]);
    }

    #[test]
    fn purified_weights_are_pushforwards() {
        let f = function(
            &[(1, 6), (1, 3), (1, 2)],
            &[(1, 4), (1, 4), (1, 2)],
            &[&[0u8, 1, 0], &[2, 2, 2], &[0, 1, 0]],
        );
        let (pure, maps) = f.purify();
        for (a, members) in maps.row_fibers(pure.n_rows()).iter().enumerate() {
            let mass = sum(members.iter().map(|&i| f.x_space().weight(i)));
            assert_eq!(pure.x_space().weight(a), &mass);
        }
        for (b, members) in maps.col_fibers(pure.n_cols()).iter().enumerate() {
            let mass = sum(members.iter().map(|&j| f.y_space().weight(j)));
            assert_eq!(pure.y_space().weight(b), &mass);
        }
        assert_eq!(pure.to_rows(), vec![vec![0, 1], vec![2, 2]]);
    }

    #[test]
    fn extended_factor_of_pure_function_has_point_types() {
        let e = xor().extended_pure_factor();
        assert!(e
            .row_major()
            .iter()
            .all(|c| c.row_type == MetricType::point() && c.col_type == MetricType::point()));
    }

    #[test]
    fn extended_factor_records_merged_column_type() {
        let f = function(&[(1, 2), (1, 2)], &[(1, 3), (2, 3)], &[&[0u8, 0], &[1, 1]]);
        let e = f.extended_pure_factor();
        assert_eq!((e.n_rows(), e.n_cols()), (2, 1));
        let expected = MetricType::new(vec![rational(2, 3), rational(1, 3)]).unwrap();
        assert!(e.row_major().iter().all(|c| c.col_type == expected));
        assert!(e.row_major().iter().all(|c| c.row_type == MetricType::point()));
    }

    #[test]
    fn extended_factor_of_constant() {
        let e = constant(2, 2, 0u8).extended_pure_factor();
        let half = MetricType::new(vec![rational(1, 2), rational(1, 2)]).unwrap();
        assert_eq!(e.row_major().len(), 1);
        assert_eq!(e.value(0, 0).row_type, half);
        assert_eq!(e.value(0, 0).col_type, half);
    }

    #[test]
    fn dimension_checks() {
        let x = FiniteMeasureSpace::uniform(2).unwrap();
        let y = FiniteMeasureSpace::uniform(3).unwrap();
        assert!(FiniteFunction::new(x.clone(), y.clone(), vec![vec![0u8; 3]]).is_err());
        assert!(FiniteFunction::new(x.clone(), y.clone(), vec![vec![0u8; 3], vec![0u8; 2]]).is_err());
        assert!(FiniteFunction::from_row_major(x, y, vec![0u8; 5]).is_err());
    }

    #[test]
    fn transpose_swaps_axes() {
        let f = function(&[(1, 3), (2, 3)], &[(1, 1)], &[&[4u8], &[5]]);
        let t = f.transpose();
        assert_eq!(t.to_rows(), vec![vec![4, 5]]);
        assert_eq!(t.y_space(), f.x_space());
        assert_eq!(t.transpose(), f);
    }
}
