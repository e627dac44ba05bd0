//! Exact Fourier-analytic treatment of kernel ridgeless regression on uniform
//! grids of the circle and the torus.
//!
//! For a shift-invariant kernel `K(x, x') = g(M (x - x' mod S¹))` sampled on the
//! grid `x_p = 2πp/N - π`, the kernel matrix is (block-)circulant and is
//! diagonalised by DFT vectors. Every quantity of interest (eigenvalues,
//! empirical eigenfunctions, the projection of a target onto the span of the
//! representers, and the three terms of the expected MSE of the interpolant)
//! reduces to statistics of the *N-hop subsequences* `G_ℓ = {G[mN + ℓ]}` of the
//! kernel's Fourier coefficients.
//!
//! The crate is `no_std` and only needs `alloc`. IO, dense linear algebra,
//! FFT-based solvers and Monte Carlo live in the companion `ridgeless` crate.
//!
//! Module map:
//!
//! * [`spectra`]: kernel families, Fourier coefficient tables, hop statistics
//! * [`model`]: grids, targets, DFT eigenstructure, projection onto the span
//! * [`mse`]: closed-form approximation / noise-free / noisy error terms
//! * [`assumptions`]: certification of the spectral scale, tail and head
//!   conditions and the resulting lower bounds

#![no_std]
// NaN must fail these checks, so comparisons are written negated
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
pub mod index;
pub mod numeric;

pub mod assumptions;
pub mod model;
pub mod mse;
pub mod spectra;

pub use error::{Error, Result};
pub use model::{EigenStructure, Grid, ProjectionResult, TargetSpec};
pub use mse::{ErrorTerms, MseReport};
pub use spectra::{Family, HopStats, HopTable, KernelSpec, Spectrum, TabulatedProfile};

pub use num_complex::Complex64;
