//! Small dense numerical kernels shared by every solver.

mod fft;
mod matrix;
mod ode;
mod poly;
mod roots;
mod svd;

pub use fft::{fft_magnitudes, Spectrum};
pub use matrix::{eigenvalues, DenseMatrix};
pub use ode::{integrate_ode, FnSystem, OdeSystem, Rk4, Trajectory};
pub use poly::{real_positive_roots, Polynomial};
pub use roots::{bisect, sign_changes};
pub use svd::{svd, Svd};

pub use num_complex::Complex64;
