//! Exact sparse linear algebra over GF(2) and the rationals.

mod det;
mod field;
pub mod io;
mod matrix;
mod rational;
mod standard;

pub use det::{
    determinant, int_determinant, next_combination, scan_size, signed_entries, submatrix_determinant_scan,
    SubmatrixViolation,
};
pub(crate) use det::scan_entries_blocks;
pub use field::{BitRow, Field, FieldTag, Gf2};
pub use matrix::{ExactMatrix, Matrix, Rref};
pub use rational::Rat;
pub use standard::{Permutation, StandardForm};
