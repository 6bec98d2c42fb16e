//! Second-order correlation of the output field.
//!
//! A photon detected at moving-frame coordinate `x` arrives at the detector
//! at time `t = -x/c`, so the pair `(x + cτ, x)` describes two detection
//! events separated by the delay `τ`.

use crate::error::{Error, Result};
use crate::model::{PhysicalParams, Wavefunction2};
use crate::scalar::{from_usize, lit, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    /// `G²` in units of 1/time².
    Raw,
    /// Dimensionless `g²`.
    Normalized,
}

/// How `G²` is turned into `g²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Normalization<T> {
    /// Divide by the square of the long-pulse detection density `2c/L`.
    LongPulse { length: T },
    /// Divide by the product of the single-photon detection densities
    /// `2c ∫|Ψ(x, y)|² dy` at both detection coordinates.
    LocalDensity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationCurve<T> {
    pub tau: Vec<T>,
    pub values: Vec<T>,
    pub kind: CurveKind,
    pub anchor_x: T,
}

impl<T: Scalar> CorrelationCurve<T> {
    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    /// Largest `|v(τ_i) - v(τ_{n-1-i})|`, meaningful for a range symmetric about 0.
    pub fn max_asymmetry(&self) -> T {
        let n = self.values.len();
        (0..n / 2).fold(T::zero(), |m, i| m.max((self.values[i] - self.values[n - 1 - i]).abs()))
    }
}

fn amplitude_at<T: Scalar>(psi2: &Wavefunction2<T>, x: T, tau: T, params: &PhysicalParams<T>) -> Result<T> {
    let x1 = x + params.c() * tau;
    psi2.interpolate(x1, x).map(|v| v.norm_sqr()).ok_or_else(|| Error::OutsideGrid {
        x1: x1.to_f64().unwrap_or(f64::NAN),
        x2: x.to_f64().unwrap_or(f64::NAN),
    })
}

/// `G²(x, τ) = 2c²|Ψ(x + cτ, x)|²`, bilinearly interpolated between nodes.
pub fn second_order_correlation<T: Scalar>(
    psi2: &Wavefunction2<T>,
    x: T,
    tau: T,
    params: &PhysicalParams<T>,
) -> Result<T> {
    let c = params.c();
    Ok(lit::<T>(2.0) * c * c * amplitude_at(psi2, x, tau, params)?)
}

/// `g²(x, τ) = (L²/2)|Ψ(x + cτ, x)|²`, the long-pulse normalization.
pub fn normalized_g2<T: Scalar>(
    psi2: &Wavefunction2<T>,
    x: T,
    tau: T,
    length: T,
    params: &PhysicalParams<T>,
) -> Result<T> {
    check_length(length)?;
    Ok(length * length * lit(0.5) * amplitude_at(psi2, x, tau, params)?)
}

fn check_length<T: Scalar>(length: T) -> Result<()> {
    if !(length > T::zero()) || !length.is_finite() {
        return Err(Error::InvalidParameter {
            name: "length",
            reason: format!("must be finite and positive, got {length}"),
        });
    }
    Ok(())
}

/// Single-photon detection density `2c ∫|Ψ(x, y)|² dy` at every node.
fn node_densities<T: Scalar>(psi2: &Wavefunction2<T>, params: &PhysicalParams<T>) -> Vec<T> {
    let g = psi2.grid();
    let n = g.len();
    let w = g.without_breaks().node_weights();
    let two_c = lit::<T>(2.0) * params.c();
    (0..n)
        .map(|i| two_c * (0..n).fold(T::zero(), |acc, j| acc + w[j] * psi2.get(i, j).norm_sqr()))
        .collect()
}

fn density_at<T: Scalar>(psi2: &Wavefunction2<T>, dens: &[T], x: T) -> Result<T> {
    let (i, f) = psi2.grid().locate(x).ok_or(Error::OutsideGrid {
        x1: x.to_f64().unwrap_or(f64::NAN),
        x2: x.to_f64().unwrap_or(f64::NAN),
    })?;
    Ok(dens[i] * (T::one() - f) + dens[(i + 1).min(dens.len() - 1)] * f)
}

/// Uniform `τ` samples of `G²` (`normalization = None`) or `g²`.
pub fn correlation_slice<T: Scalar>(
    psi2: &Wavefunction2<T>,
    anchor_x: T,
    tau_range: (T, T),
    n_samples: usize,
    normalization: Option<Normalization<T>>,
    params: &PhysicalParams<T>,
) -> Result<CorrelationCurve<T>> {
    let (lo, hi) = tau_range;
    if n_samples == 0 || !(hi >= lo) {
        return Err(Error::InvalidParameter {
            name: "tau_range",
            reason: format!("need n ≥ 1 and min ≤ max, got [{lo}, {hi}] with n = {n_samples}"),
        });
    }
    let tau: Vec<T> = if n_samples == 1 {
        vec![lo]
    } else {
        let step = (hi - lo) / from_usize::<T>(n_samples - 1);
        (0..n_samples).map(|k| lo + step * from_usize::<T>(k)).collect()
    };
    let c = params.c();
    let dens = matches!(normalization, Some(Normalization::LocalDensity)).then(|| node_densities(psi2, params));
    let mut values = Vec::with_capacity(n_samples);
    for &t in &tau {
        let g2 = second_order_correlation(psi2, anchor_x, t, params)?;
        let v = match normalization {
            None => g2,
            Some(Normalization::LongPulse { length }) => {
                check_length(length)?;
                let d = lit::<T>(2.0) * c / length;
                g2 / (d * d)
            }
            Some(Normalization::LocalDensity) => {
                let d = dens.as_ref().expect("densities computed above");
                let prod = density_at(psi2, d, anchor_x + c * t)? * density_at(psi2, d, anchor_x)?;
                if prod > T::zero() {
                    g2 / prod
                } else {
                    T::zero()
                }
            }
        };
        values.push(v);
    }
    let kind = if normalization.is_some() { CurveKind::Normalized } else { CurveKind::Raw };
    Ok(CorrelationCurve { tau, values, kind, anchor_x })
}

/// Uniform `τ` samples of the long-pulse-normalized `g²`.
pub fn g2_slice<T: Scalar>(
    psi2: &Wavefunction2<T>,
    anchor_x: T,
    tau_range: (T, T),
    n_samples: usize,
    length: T,
    params: &PhysicalParams<T>,
) -> Result<CorrelationCurve<T>> {
    correlation_slice(psi2, anchor_x, tau_range, n_samples, Some(Normalization::LongPulse { length }), params)
}

/// Delays of interior local minima whose parabolic refinement falls below
/// `1e-6` times the curve maximum.
pub fn find_dip_zeros<T: Scalar>(curve: &CorrelationCurve<T>) -> Result<Vec<T>> {
    if curve.is_empty() {
        return Err(Error::EmptyCurve);
    }
    let v = &curve.values;
    let t = &curve.tau;
    let max = v.iter().copied().fold(T::zero(), T::max);
    let threshold = max * lit(1e-6);
    let half = lit::<T>(0.5);
    let mut zeros = Vec::new();
    let mut i = 1;
    while i + 1 < v.len() {
        if !(v[i] <= v[i - 1] && v[i] < v[i + 1]) {
            i += 1;
            continue;
        }
        let (a, b, c) = (v[i - 1], v[i], v[i + 1]);
        let h = t[i + 1] - t[i];
        let curv = a - lit::<T>(2.0) * b + c;
        let (shift, floor) = if curv > T::zero() {
            let s = half * (a - c) / curv;
            (s, b - lit::<T>(0.25) * (a - c) * s)
        } else {
            (T::zero(), b)
        };
        if floor < threshold {
            zeros.push(t[i] + shift * h);
        }
        i += 1;
    }
    Ok(zeros)
}
