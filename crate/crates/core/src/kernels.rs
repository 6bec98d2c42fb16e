//! Closed-form scattering kernels in the moving frame.
//!
//! The one-photon map is `δ(x - x') + smooth(x, x')`; the two-photon map is
//! the product of two one-photon maps plus a nonlinear correction that
//! removes simultaneous double absorption. Delta parts are never sampled:
//! [`crate::propagate`] applies them as copies.

use crate::error::{Error, Result};
use crate::model::PhysicalParams;
use crate::scalar::{lit, Scalar};

fn finite<T: Scalar>(xs: &[T]) -> Result<()> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite("kernel argument"))
    }
}

/// Absorption-reemission kernel: `-(2Γ/c) e^{-(Γ/c)(x' - x)}` for `x <= xp`, else 0.
pub fn eval_abs_kernel<T: Scalar>(x: T, xp: T, params: &PhysicalParams<T>) -> Result<T> {
    finite(&[x, xp])?;
    Ok(abs_kernel_unchecked(x, xp, params))
}

#[inline]
pub(crate) fn abs_kernel_unchecked<T: Scalar>(x: T, xp: T, params: &PhysicalParams<T>) -> T {
    if x > xp {
        return T::zero();
    }
    let k = params.decay_per_length();
    -lit::<T>(2.0) * k * (-k * (xp - x)).exp()
}

/// Nonlinear correction kernel:
/// `-(4Γ²/c²) e^{-(Γ/c)(x1' + x2' - x1 - x2)}` when both `x1` and `x2` lie
/// strictly below `min(x1', x2')`, else 0 (equality maps to 0).
pub fn eval_nonlin_kernel<T: Scalar>(
    x1: T,
    x2: T,
    x1p: T,
    x2p: T,
    params: &PhysicalParams<T>,
) -> Result<T> {
    finite(&[x1, x2, x1p, x2p])?;
    let lo = x1p.min(x2p);
    if !(x1 < lo && x2 < lo) {
        return Ok(T::zero());
    }
    let k = params.decay_per_length();
    // Sums commute exactly, so swapping either pair gives the same bits.
    // The exponent is non-positive on the support.
    Ok(-lit::<T>(4.0) * k * k * (-k * ((x1p + x2p) - (x1 + x2))).exp())
}

/// One-photon kernel split into its identity and smooth parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParts1<T> {
    params: PhysicalParams<T>,
}

impl<T: Scalar> KernelParts1<T> {
    pub fn new(params: PhysicalParams<T>) -> Self {
        Self { params }
    }

    /// The kernel always carries a `δ(x - x')` identity part.
    pub fn has_delta(&self) -> bool {
        true
    }

    pub fn smooth(&self, x: T, xp: T) -> Result<T> {
        eval_abs_kernel(x, xp, &self.params)
    }
}

/// Terms of the two-photon kernel. The four linear terms are products of
/// one-photon parts; `Nonlinear` is the double-absorption correction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TwoPhotonTerm {
    DeltaDelta,
    DeltaSmooth,
    SmoothDelta,
    SmoothSmooth,
    Nonlinear,
}

impl TwoPhotonTerm {
    pub const ALL: [TwoPhotonTerm; 5] = [
        TwoPhotonTerm::DeltaDelta,
        TwoPhotonTerm::DeltaSmooth,
        TwoPhotonTerm::SmoothDelta,
        TwoPhotonTerm::SmoothSmooth,
        TwoPhotonTerm::Nonlinear,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParts2<T> {
    params: PhysicalParams<T>,
}

impl<T: Scalar> KernelParts2<T> {
    pub fn new(params: PhysicalParams<T>) -> Self {
        Self { params }
    }

    /// Smooth factor of a term at `(x1, x2; x1', x2')`. For terms carrying a
    /// delta in one coordinate the returned value is the coefficient of that
    /// delta; `DeltaDelta` returns 1.
    pub fn smooth_factor(&self, term: TwoPhotonTerm, x1: T, x2: T, x1p: T, x2p: T) -> Result<T> {
        finite(&[x1, x2, x1p, x2p])?;
        let p = &self.params;
        Ok(match term {
            TwoPhotonTerm::DeltaDelta => T::one(),
            TwoPhotonTerm::DeltaSmooth => abs_kernel_unchecked(x2, x2p, p),
            TwoPhotonTerm::SmoothDelta => abs_kernel_unchecked(x1, x1p, p),
            TwoPhotonTerm::SmoothSmooth => {
                abs_kernel_unchecked(x1, x1p, p) * abs_kernel_unchecked(x2, x2p, p)
            }
            TwoPhotonTerm::Nonlinear => eval_nonlin_kernel(x1, x2, x1p, x2p, p)?,
        })
    }
}
