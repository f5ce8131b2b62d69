//! Classification of finite measurable functions of two or more variables.
//!
//! A function `f : X × Y → V` on finite probability spaces generates an
//! exchangeable random matrix `(f(x_i, y_j))`. This crate computes the
//! invariants that decide when two such functions generate the same matrix
//! law: Rokhlin invariants of one-variable slices, purification and the
//! extended pure factor, canonical forms, exact corner distributions,
//! reconstruction from a single sample and congruence groups.
//!
//! All weights and probabilities are exact rationals.
//!
//! ```
//! use matdist_core::ratio::rational;
//! use matdist_core::{congruence_group, corner_distributions_equal, FiniteFunction, FiniteMeasureSpace, DEFAULT_BUDGET};
//!
//! let x = FiniteMeasureSpace::from_weights(vec![rational(2, 3), rational(1, 3)])?;
//! let y = FiniteMeasureSpace::from_weights(vec![rational(3, 4), rational(1, 4)])?;
//! let f = FiniteFunction::new(x, y, vec![vec![0u8, 1], vec![1, 0]])?;
//!
//! let g = f.reordered(&[1, 0], &[1, 0]);
//! assert!(f.is_isomorphic(&g));
//! assert!(corner_distributions_equal(&f, &g, 3, DEFAULT_BUDGET)?);
//! assert!(congruence_group(&f)?.is_trivial());
//! # Ok::<(), matdist_core::Error>(())
//! ```

pub mod canonical;
pub mod distribution;
pub mod error;
pub mod fixtures;
pub mod function;
pub mod measure;
pub mod ratio;
pub mod reconstruction;
pub mod rng;
pub mod sample;
pub mod symmetry;
pub mod tensor;

pub use canonical::{CanonicalForm, IsomorphismWitness};
pub use distribution::{
    corner_distributions_equal, exact_corner_distribution, first_difference, total_variation, CornerDistribution,
    ValueMatrix, DEFAULT_BUDGET,
};
pub use error::{Error, Result};
pub use function::{ExtendedValueLabel, FactorMaps, FiniteFunction, Value};
pub use measure::{FiniteMeasureSpace, MetricType, OneVarFunction, RokhlinInvariant};
pub use ratio::{format_rational, parse_rational, Rational};
pub use reconstruction::{
    definetti_diagnostic, empirical_col_measure, empirical_joint, empirical_row_measure, reconstruct,
    reconstruction_check, EmpiricalModel, ReconstructionReport,
};
pub use rng::CounterRng;
pub use sample::{sample_matrix, SampledMatrix};
pub use symmetry::{
    collision_witness, congruence_group, empirical_simplicity_diagnostic, is_completely_pure, simplicity_decision,
    CollisionWitness, CongruenceGroup, SimplicityDiagnostic,
};
pub use tensor::{exact_tensor_corner, sample_tensor, TensorCornerDistribution, TensorFunction, ValueTensor};
