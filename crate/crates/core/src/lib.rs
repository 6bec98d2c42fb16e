//! Exact two-photon scattering off a two-level atom in a chiral
//! one-dimensional waveguide.
//!
//! Inputs are wavefunctions in the moving frame `x = r - c t`; the
//! scattering map is applied by integrating them against the one-photon
//! absorption kernel and the two-photon nonlinear kernel. A brute-force
//! lab-frame time stepper ([`oracle`]) is provided for cross-checks, and
//! [`correlations`] turns output wavefunctions into `G²(τ)` and `g²(τ)`.
//!
//! All numerics are generic over `f32`/`f64`; the aliases below fix `f64`.
//!
//! ```
//! use twophoton::{Grid, Params, Psi1, propagate::apply_one_photon};
//!
//! let params = Params::default();
//! let grid = Grid::aligned(-10.0, 20.0, 3001, &[0.0, 20.0]).unwrap();
//! let psi = Psi1::rectangular(20.0, grid.clone()).unwrap();
//! let out = apply_one_photon(&psi, &grid, &params).unwrap();
//! assert!((out.psi.norm() - 1.0).abs() < 1e-6);
//! ```

// `!(x > 0)` is how NaN gets rejected alongside non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod correlations;
pub mod error;
pub mod io;
pub mod kernels;
pub mod model;
pub mod oracle;
pub mod propagate;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use model::{
    norm1, norm2, assert_symmetry, Grid1D, LabState1, LabState2, PhysicalParams, PiecewiseConstant, Side,
    Wavefunction1, Wavefunction2,
};
pub use scalar::Scalar;

pub type Params = PhysicalParams<f64>;
pub type Grid = Grid1D<f64>;
pub type Psi1 = Wavefunction1<f64>;
pub type Psi2 = Wavefunction2<f64>;
pub type Complex64 = num_complex::Complex<f64>;
