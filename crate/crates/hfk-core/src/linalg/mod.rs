//! Exact linear algebra: Smith normal form over a Euclidean ring of integers
//! and rank computations over GF(2).

mod gf2;
mod matrix;
mod snf;
mod sparse;

pub use gf2::Gf2Matrix;
pub use matrix::Matrix;
pub use snf::{smith_normal_form, solve_minimal_multiple, Snf, SnfSolver};
pub use sparse::sparse_gf2_rank;

use std::fmt::Debug;

use num_integer::Integer;
use num_traits::Signed;

/// Integer-like scalars usable by the Smith normal form.
pub trait IntScalar: Integer + Signed + Clone + Debug {}

impl<T: Integer + Signed + Clone + Debug> IntScalar for T {}
