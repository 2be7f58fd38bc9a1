//! Dense numerical kernels shared by the model, spectrum and inversion code.

mod brent;
mod charpoly;
mod eigh;
mod expm;
mod matrix;
mod poly;
mod roots;

pub use brent::{brent_root, DEFAULT_TOL as BRENT_DEFAULT_TOL};
pub use charpoly::char_poly_of_matrix;
pub use eigh::{jacobi_eigh, EighResult};
pub use expm::expm;
pub use matrix::DenseMatrix;
pub use poly::{compensated_sum, product_of_shifts, weighted_partial_products, CompensatedSum, Poly};
pub use roots::{poly_roots, REAL_SNAP};
