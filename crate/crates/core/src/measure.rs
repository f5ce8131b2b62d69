//! Finite probability spaces and Rokhlin's classification of functions in one
//! variable.
//!
//! A one-variable function is classified up to measure-preserving relabeling
//! of its domain by the law of its extended function `x ↦ (f(x), m_f(f(x)))`,
//! where `m_f(z)` is the metric type (sorted atom weights) of the conditional
//! measure on the fiber `{f = z}`.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Debug;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::ratio::{format_rational, sum, Rational};

/// Atoms with exact positive weights summing to one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiniteMeasureSpace {
    atom_ids: Vec<String>,
    weights: Vec<Rational>,
}

impl FiniteMeasureSpace {
    pub fn new(atom_ids: Vec<String>, weights: Vec<Rational>) -> Result<Self> {
        if atom_ids.len() != weights.len() {
            return Err(Error::DimensionMismatch {
                what: "atom ids vs weights",
                expected: weights.len(),
                found: atom_ids.len(),
            });
        }
        if weights.is_empty() {
            return Err(Error::EmptySpace);
        }
        for (index, w) in weights.iter().enumerate() {
            if !w.is_positive() {
                return Err(Error::NonPositiveWeight {
                    index,
                    weight: format_rational(w),
                });
            }
        }
        let total = sum(&weights);
        if !total.is_one() {
            return Err(Error::WeightSum {
                sum: format_rational(&total),
            });
        }
        let mut seen = HashSet::with_capacity(atom_ids.len());
        for id in &atom_ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateAtom(id.clone()));
            }
        }
        Ok(Self { atom_ids, weights })
    }

    /// Atoms labelled `"0"`, `"1"`, … in order.
    pub fn from_weights(weights: Vec<Rational>) -> Result<Self> {
        let ids = (0..weights.len()).map(|i| i.to_string()).collect();
        Self::new(ids, weights)
    }

    pub fn uniform(atoms: usize) -> Result<Self> {
        if atoms == 0 {
            return Err(Error::EmptySpace);
        }
        let w = Rational::new(1.into(), atoms.into());
        Self::from_weights(vec![w; atoms])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn atom_ids(&self) -> &[String] {
        &self.atom_ids
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn weight(&self, atom: usize) -> &Rational {
        &self.weights[atom]
    }

    /// Reorders atoms: atom `i` of the result is atom `order[i]` of `self`.
    pub fn reordered(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.len(), "order must cover every atom");
        Self {
            atom_ids: order.iter().map(|&i| self.atom_ids[i].clone()).collect(),
            weights: order.iter().map(|&i| self.weights[i].clone()).collect(),
        }
    }

    pub fn metric_type(&self) -> MetricType {
        MetricType::from_unsorted(self.weights.clone())
    }

    /// Builds a space from atoms whose weights are already known to be valid.
    pub(crate) fn from_parts_unchecked(atom_ids: Vec<String>, weights: Vec<Rational>) -> Self {
        debug_assert!(sum(&weights).is_one());
        Self { atom_ids, weights }
    }
}

/// Non-increasing sequence of atom weights of a probability measure.
///
/// Ordered lexicographically as a sequence of rationals.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MetricType(Vec<Rational>);

impl MetricType {
    /// Validates a sequence that is claimed to be a metric type.
    pub fn new(weights: Vec<Rational>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidMetricType("empty sequence".into()));
        }
        if let Some(w) = weights.iter().find(|w| !w.is_positive() || **w > Rational::one()) {
            return Err(Error::InvalidMetricType(format!(
                "weight {} outside (0, 1]",
                format_rational(w)
            )));
        }
        if weights.windows(2).any(|p| p[0] < p[1]) {
            return Err(Error::InvalidMetricType("weights are not non-increasing".into()));
        }
        let total = sum(&weights);
        if !total.is_one() {
            // Finite atomic spaces have no continuous part, so no deficit is allowed.
            return Err(Error::InvalidMetricType(format!(
                "weights sum to {}",
                format_rational(&total)
            )));
        }
        Ok(Self(weights))
    }

    pub(crate) fn from_unsorted(mut weights: Vec<Rational>) -> Self {
        weights.sort_unstable_by(|a, b| b.cmp(a));
        Self(weights)
    }

    /// The type of a single atom, `(1)`.
    pub fn point() -> Self {
        Self(vec![Rational::one()])
    }

    pub fn weights(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A function `f: X → Z` on a finite space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneVarFunction<V = String> {
    domain: FiniteMeasureSpace,
    values: Vec<V>,
}

impl<V: Clone + Ord + Debug> OneVarFunction<V> {
    pub fn new(domain: FiniteMeasureSpace, values: Vec<V>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::DimensionMismatch {
                what: "one-variable values",
                expected: domain.len(),
                found: values.len(),
            });
        }
        Ok(Self { domain, values })
    }

    pub fn domain(&self) -> &FiniteMeasureSpace {
        &self.domain
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    /// Precomposes with an atom reordering: atom `i` of the result is atom
    /// `order[i]` of `self`, carrying its weight and value.
    pub fn reordered(&self, order: &[usize]) -> Self {
        Self {
            domain: self.domain.reordered(order),
            values: order.iter().map(|&i| self.values[i].clone()).collect(),
        }
    }

    /// The fiber `{f = z}` with renormalized weights, atoms in domain order.
    pub fn conditional_measure(&self, value: &V) -> Result<FiniteMeasureSpace> {
        let fiber: Vec<usize> = (0..self.values.len()).filter(|&i| &self.values[i] == value).collect();
        if fiber.is_empty() {
            return Err(Error::ZeroMassValue {
                value: format!("{value:?}"),
            });
        }
        let mass = sum(fiber.iter().map(|&i| self.domain.weight(i)));
        Ok(FiniteMeasureSpace::from_parts_unchecked(
            fiber.iter().map(|&i| self.domain.atom_ids[i].clone()).collect(),
            fiber.iter().map(|&i| self.domain.weight(i) / &mass).collect(),
        ))
    }

    pub fn rokhlin_invariant(&self) -> RokhlinInvariant<V> {
        let mut fibers: BTreeMap<&V, Vec<Rational>> = BTreeMap::new();
        for (value, weight) in self.values.iter().zip(self.domain.weights()) {
            fibers.entry(value).or_default().push(weight.clone());
        }
        let mut entries = BTreeMap::new();
        for (value, weights) in fibers {
            let mass = sum(&weights);
            let conditional = weights.into_iter().map(|w| w / &mass).collect();
            *entries
                .entry((value.clone(), MetricType::from_unsorted(conditional)))
                .or_insert_with(Rational::zero) += mass;
        }
        RokhlinInvariant { entries }
    }

    /// True iff some weight-preserving bijection of atoms carries `self` to `other`.
    pub fn rokhlin_isomorphic(&self, other: &Self) -> bool {
        self.rokhlin_invariant() == other.rokhlin_invariant()
    }
}

/// Law of the extended function `x ↦ (f(x), m_f(f(x)))`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RokhlinInvariant<V = String> {
    entries: BTreeMap<(V, MetricType), Rational>,
}

impl<V: Ord> RokhlinInvariant<V> {
    pub fn entries(&self) -> &BTreeMap<(V, MetricType), Rational> {
        &self.entries
    }

    pub fn mass(&self, value: &V, metric_type: &MetricType) -> Option<&Rational>
    where
        V: Clone,
    {
        self.entries.get(&(value.clone(), metric_type.clone()))
    }

    pub fn total_mass(&self) -> Rational {
        sum(self.entries.values())
    }
}
