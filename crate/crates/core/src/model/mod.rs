//! Units, grids and wavefunction containers shared by the rest of the crate.
//!
//! Coordinates are in the moving frame `x = r - c t` unless a type says
//! otherwise; free propagation is the identity there and the scattering map
//! is time independent.

mod grid;
mod lab;
mod wavefunction;

pub use grid::{Grid1D, Side, Slot};
pub use lab::{LabState1, LabState2};
pub use wavefunction::{PiecewiseConstant, Representation, Wavefunction1, Wavefunction2};

use crate::error::{Error, Result};
use crate::scalar::{lit, Scalar};

/// Dipole relaxation rate and propagation speed.
///
/// `c / gamma` is the only length scale of the problem. The coupling
/// constant `sqrt(c gamma / pi)` is derived on demand, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalParams<T> {
    gamma: T,
    c: T,
}

impl<T: Scalar> PhysicalParams<T> {
    pub fn new(gamma: T, c: T) -> Result<Self> {
        for (name, v) in [("gamma", gamma), ("c", c)] {
            if !v.is_finite() || v <= T::zero() {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be finite and positive, got {v}"),
                });
            }
        }
        Ok(Self { gamma, c })
    }

    pub fn gamma(&self) -> T {
        self.gamma
    }

    pub fn c(&self) -> T {
        self.c
    }

    /// `c / gamma`.
    pub fn relaxation_length(&self) -> T {
        self.c / self.gamma
    }

    /// `gamma / c`, the decay rate of every kernel per unit length.
    pub fn decay_per_length(&self) -> T {
        self.gamma / self.c
    }

    /// Field-atom coupling constant `sqrt(c gamma / pi)` of the k-space Hamiltonian.
    pub fn coupling_constant(&self) -> T {
        (self.c * self.gamma / T::PI()).sqrt()
    }

    /// `sqrt(2 gamma / c)`: amplitude emitted into the field per unit excitation.
    pub fn emission_coupling(&self) -> T {
        (lit::<T>(2.0) * self.gamma / self.c).sqrt()
    }

    /// `sqrt(2 gamma c)`: excitation rate per unit incoming field amplitude.
    pub fn absorption_coupling(&self) -> T {
        (lit::<T>(2.0) * self.gamma * self.c).sqrt()
    }
}

impl<T: Scalar> Default for PhysicalParams<T> {
    fn default() -> Self {
        Self { gamma: T::one(), c: T::one() }
    }
}

/// `∫|Ψ|² dx`.
pub fn norm1<T: Scalar>(psi: &Wavefunction1<T>) -> T {
    psi.norm()
}

/// `∫∫|Ψ|² dx1 dx2`.
pub fn norm2<T: Scalar>(psi: &Wavefunction2<T>) -> T {
    psi.norm()
}

/// Largest `|Ψ(x1,x2) - Ψ(x2,x1)|` over the stored grid.
pub fn assert_symmetry<T: Scalar>(psi: &Wavefunction2<T>) -> T {
    psi.max_asymmetry()
}
