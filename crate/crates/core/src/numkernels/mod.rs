//! Dense numerical kernels, generic over the scalar type.

pub mod eig;
pub mod expm;
pub mod general_eig;
pub mod gramian;
pub mod matrix;
pub mod real;

pub use eig::{cholesky, cholesky_solve, solve_spd, symmetric_eig, SymmetricSpectrum};
pub use expm::expm;
pub use general_eig::{complex_eigenvalues, general_eig, GeneralEigen, C64};
pub use gramian::{expm_integral, expm_with_integral, finite_horizon_gramian};
pub use matrix::{dot, lu_solve, norm2, DenseMatrix};
pub use real::{phi1, Mp1024, Mp128, Mp2048, Mp256, Mp512, Mpf, Real};
