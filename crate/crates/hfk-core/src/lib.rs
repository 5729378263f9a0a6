//! Knot Floer homology of the lift of a knot to its cyclic branched covers,
//! computed from a grid diagram over GF(2).
//!
//! ```
//! use hfk_core::{pipeline, GridDiagram};
//!
//! let trefoil = GridDiagram::parse("n 5\nX 4 0 1 2 3\nO 1 2 3 4 0").unwrap();
//! let comp = pipeline::compute(&trefoil, 2, &Default::default()).unwrap();
//! assert_eq!(comp.group.factors, vec![3]);
//! ```

pub mod complex;
pub mod cover;
pub mod grading;
pub mod grid;
pub mod homology;
pub mod linalg;
pub mod pipeline;
pub mod poly;
pub mod store;

use num_bigint::BigInt;
use num_rational::Ratio;

pub use complex::{ComplexEngine, Generator};
pub use cover::{CwSurface, FiniteAbelian, H1Presentation, LiftedDiagram, SpinClass};
pub use grading::GradingModel;
pub use grid::{GridDiagram, WindingTable};
pub use poly::{AlexanderPolynomial, PoincarePolynomial};

/// Exact rational gradings.
pub type Rational = Ratio<i64>;
/// Arbitrary-precision integer matrices for presentations of H1.
pub type IntMatrix = linalg::Matrix<BigInt>;
pub type IntSnf = linalg::Snf<BigInt>;
/// Machine-word integer matrices for small exact problems.
pub type SmallIntMatrix = linalg::Matrix<i64>;
