//! Named example functions and seeded random corpora.
//!
//! Used by the test suites, the acceptance run and the benchmarks.

use crate::function::{FiniteFunction, Value};
use crate::measure::FiniteMeasureSpace;
use crate::ratio::{rational, Rational};
use crate::rng::{streams, DetRng};

/// Builds a function from `(numerator, denominator)` weights and value rows.
///
/// Panics on invalid input; meant for literals in tests.
pub fn function<V: Value>(x: &[(i64, i64)], y: &[(i64, i64)], rows: &[&[V]]) -> FiniteFunction<V> {
    let space = |w: &[(i64, i64)]| {
        FiniteMeasureSpace::from_weights(w.iter().map(|&(n, d)| rational(n, d)).collect()).expect("valid weights")
    };
    FiniteFunction::new(space(x), space(y), rows.iter().map(|r| r.to_vec()).collect()).expect("valid dimensions")
}

/// `[[0,1],[1,0]]` on two uniform 2-atom spaces.
pub fn xor() -> FiniteFunction<u8> {
    function(&[(1, 2), (1, 2)], &[(1, 2), (1, 2)], &[&[0, 1], &[1, 0]])
}

/// `[[0,1],[1,0]]` with X weights (2/3, 1/3) and Y weights (3/4, 1/4).
///
/// Pure with trivial congruence group.
pub fn f_star() -> FiniteFunction<u8> {
    function(&[(2, 3), (1, 3)], &[(3, 4), (1, 4)], &[&[0, 1], &[1, 0]])
}

/// Constant function on uniform spaces.
pub fn constant<V: Value>(rows: usize, cols: usize, value: V) -> FiniteFunction<V> {
    FiniteFunction::new(
        FiniteMeasureSpace::uniform(rows).expect("rows > 0"),
        FiniteMeasureSpace::uniform(cols).expect("cols > 0"),
        vec![vec![value; cols]; rows],
    )
    .expect("valid dimensions")
}

/// `(i + j) mod n` on uniform spaces; its congruence group is cyclic of order `n`.
pub fn cyclic(n: usize) -> FiniteFunction<u8> {
    let rows: Vec<Vec<u8>> = (0..n).map(|i| (0..n).map(|j| ((i + j) % n) as u8).collect()).collect();
    FiniteFunction::new(
        FiniteMeasureSpace::uniform(n).expect("n > 0"),
        FiniteMeasureSpace::uniform(n).expect("n > 0"),
        rows,
    )
    .expect("valid dimensions")
}

/// Shape of randomly generated functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CorpusShape {
    pub max_rows: usize,
    pub max_cols: usize,
    pub max_denominator: usize,
    pub alphabet: u8,
}

impl Default for CorpusShape {
    fn default() -> Self {
        Self {
            max_rows: 4,
            max_cols: 4,
            max_denominator: 12,
            alphabet: 3,
        }
    }
}

/// Random weights `c_i / d` with `d ≤ max_denominator` and every `c_i ≥ 1`.
pub fn random_weights(rng: &mut DetRng, atoms: usize, max_denominator: usize) -> Vec<Rational> {
    assert!(atoms >= 1 && atoms <= max_denominator);
    let denominator = rng.range_inclusive(atoms, max_denominator);
    // atoms-1 distinct cut points in 1..denominator
    let mut cuts: Vec<usize> = (1..denominator).collect();
    rng.shuffle(&mut cuts);
    let mut cuts: Vec<usize> = cuts.into_iter().take(atoms - 1).collect();
    cuts.sort_unstable();
    cuts.push(denominator);
    let mut previous = 0;
    cuts.into_iter()
        .map(|c| {
            let part = c - previous;
            previous = c;
            rational(part as i64, denominator as i64)
        })
        .collect()
}

/// Random function of the given shape; not necessarily pure.
pub fn random_function(rng: &mut DetRng, shape: CorpusShape) -> FiniteFunction<u8> {
    let rows = rng.range_inclusive(1, shape.max_rows);
    let cols = rng.range_inclusive(1, shape.max_cols);
    let x = random_weights(rng, rows, shape.max_denominator);
    let y = random_weights(rng, cols, shape.max_denominator);
    let values: Vec<u8> = (0..rows * cols)
        .map(|_| rng.below(shape.alphabet as usize) as u8)
        .collect();
    FiniteFunction::from_row_major(
        FiniteMeasureSpace::from_weights(x).expect("valid weights"),
        FiniteMeasureSpace::from_weights(y).expect("valid weights"),
        values,
    )
    .expect("valid dimensions")
}

/// Random pure function: redraws until rows and columns are distinct.
pub fn random_pure_function(rng: &mut DetRng, shape: CorpusShape) -> FiniteFunction<u8> {
    loop {
        let f = random_function(rng, shape);
        if f.is_pure() {
            return f;
        }
    }
}

/// Random pure function whose weights are uniform on each axis, so that
/// non-trivial congruence groups are common.
pub fn random_symmetric_candidate(rng: &mut DetRng, shape: CorpusShape) -> FiniteFunction<u8> {
    loop {
        let rows = rng.range_inclusive(1, shape.max_rows);
        let cols = rng.range_inclusive(1, shape.max_cols);
        let values: Vec<u8> = (0..rows * cols).map(|_| rng.below(2) as u8).collect();
        let f = FiniteFunction::from_row_major(
            FiniteMeasureSpace::uniform(rows).expect("rows > 0"),
            FiniteMeasureSpace::uniform(cols).expect("cols > 0"),
            values,
        )
        .expect("valid dimensions");
        if f.is_pure() {
            return f;
        }
    }
}

/// Uniformly random permutation of `0..n`.
pub fn random_permutation(rng: &mut DetRng, n: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    rng.shuffle(&mut p);
    p
}

/// The shared test corpus: named fixtures, random pure functions, pure
/// functions with uniform weights (symmetry-rich) and unrestricted random
/// functions (mostly impure).
pub fn standard_corpus(seed: u64) -> Vec<FiniteFunction<u8>> {
    let shape = CorpusShape::default();
    let mut rng = DetRng::new(seed, streams::CORPUS);
    let mut corpus = vec![
        xor(),
        f_star(),
        constant(2, 2, 0),
        constant(1, 1, 0),
        function(&[(1, 2), (1, 2)], &[(1, 2), (1, 2)], &[&[0, 0], &[1, 1]]),
        function(&[(1, 2), (1, 2)], &[(1, 3), (2, 3)], &[&[0, 0], &[1, 1]]),
        cyclic(3),
    ];
    corpus.extend((0..20).map(|_| random_pure_function(&mut rng, shape)));
    corpus.extend((0..6).map(|_| random_symmetric_candidate(&mut rng, shape)));
    corpus.extend((0..6).map(|_| random_function(&mut rng, shape)));
    corpus
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn random_weights_are_valid() {
        let mut rng = DetRng::new(1, 0);
        for atoms in 1..=4 {
            for _ in 0..50 {
                let w = random_weights(&mut rng, atoms, 12);
                assert_eq!(w.len(), atoms);
                assert!(crate::ratio::sum(&w).is_one());
                assert!(w.iter().all(|v| v.denom() <= &12.into()));
            }
        }
    }

    #[test]
    fn corpus_is_deterministic() {
        assert_eq!(standard_corpus(3), standard_corpus(3));
        assert!(standard_corpus(3).iter().skip(7).take(26).all(|f| f.is_pure()));
    }
}
