//! Inputs shared by the benchmarks in `benches/`.

use matdist_core::fixtures::{random_pure_function, CorpusShape};
use matdist_core::rng::DetRng;
use matdist_core::FiniteFunction;

/// A pure function with `rows × cols` atoms, weights with denominators at
/// most 12 and a three-letter alphabet.
pub fn pure_function(rows: usize, cols: usize, seed: u64) -> FiniteFunction<u8> {
    let mut rng = DetRng::new(seed, 0);
    let shape = CorpusShape {
        max_rows: rows,
        max_cols: cols,
        max_denominator: 12,
        alphabet: 3,
    };
    // The generator draws sizes up to the maxima; keep the first full-size one.
    loop {
        let f = random_pure_function(&mut rng, shape);
        if f.n_rows() == rows && f.n_cols() == cols {
            return f;
        }
    }
}
