//! Dependency-free kernels for 4x4 complex linear algebra, low-degree
//! polynomials, peak location and quadrature.

mod expm;
mod matrix;
mod peaks;
mod poly;
mod quad;

pub use expm::{expm, expm_pade, Eigendecomposition, EIGENVECTOR_CONDITION_LIMIT};
pub use matrix::{invert4, ComplexMatrix4, CONDITION_LIMIT};
pub use peaks::{find_minima, find_peaks, parabolic_vertex, zero_crossings, Peak};
pub use poly::{
    char_poly, char_poly_complex, cubic_roots, quartic_eigenvalues, RealPolynomial, Root,
    REAL_ROOT_TOL, SYMMETRY_TOL,
};
pub use quad::{composite_grid, linspace, trapezoid};
