//! Periodic-box spectral infrastructure.
//!
//! Real fields are carried as full complex Fourier coefficient sets with the
//! convention `f(x) = Σ_k ĉ(k) e^{ik·x}`; everything differential is diagonal
//! in that basis. Products are formed on the physical grid and dealiased by
//! the grid's mask (2/3 rule by default).
//!
//! Fields are immutable values: operators are pure maps producing new fields,
//! and inner loops may run data-parallel. Reductions used for reported norms
//! are evaluated in a fixed order so repeated runs reproduce output bitwise.

pub mod error;
pub mod fft;
pub mod field;
pub mod grid;
pub mod interp;
pub mod ops;
pub mod snapshot;
pub mod stokes;
pub mod tensor;

pub use error::{Result, SpectralError};
pub use field::{transform, PhysicalField, SpectralField};
pub use num_complex::Complex64;
pub use grid::{signed_alias, Grid};
pub use ops::{deriv, divergence, gradient, laplacian, leray_project, mollify, poisson_solve, product};
pub use stokes::{stokes_solve, Forcing, StokesStep};
pub use tensor::TensorField;
