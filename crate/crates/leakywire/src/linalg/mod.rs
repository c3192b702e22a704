//! Numerical kernels shared by every module: Gauss-Legendre quadrature,
//! a dense real-symmetric eigensolver (Householder tridiagonalization plus
//! implicit-shift QL), Sturm-sequence bisection for tridiagonal matrices,
//! sparse symmetric matrices, and a Lanczos solver for the lowest part of
//! the spectrum of large sparse operators.
//!
//! Complex Hermitian problems are handled everywhere through the real
//! doubling embedding `H = A + iB  ->  [[A, -B], [B, A]]`, which duplicates
//! every eigenvalue exactly once; [`HermMat::eigenvalues`] deduplicates the
//! pairs.

pub mod dense;
pub mod fourier;
pub mod lanczos;
pub mod quad;
pub mod sparse;
pub mod tridiagonal;

pub use dense::{sym_eigen, sym_eigenvalues, HermMat, SymMat};
pub use lanczos::{lowest_eigenpairs, LanczosOptions};
pub use quad::GaussLegendre;
pub use sparse::SparseSym;
