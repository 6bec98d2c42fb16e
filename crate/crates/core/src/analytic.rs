//! Closed forms for a rectangular input pulse `1/sqrt(L)` on `[0, L]`.
//!
//! Every expression is grouped so that exponents are non-positive; the
//! textbook form of the nonlinear term multiplies `e^{(Γ/c)(x1+x2)}` by a
//! tiny square and overflows once `ΓL/c` exceeds a few hundred.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::PhysicalParams;
use crate::scalar::{cplx, lit, Scalar};

fn check_length<T: Scalar>(length: T) -> Result<()> {
    if !length.is_finite() || length <= T::zero() {
        return Err(Error::InvalidParameter {
            name: "length",
            reason: format!("pulse length must be positive, got {length}"),
        });
    }
    Ok(())
}

/// Process-resolved output amplitude at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessAmplitudes<T> {
    /// Both photons transmitted without absorption.
    pub p_i: Complex<T>,
    /// One photon transmitted, one absorbed and reemitted.
    pub p_ii: Complex<T>,
    /// Both photons absorbed and reemitted, including the nonlinear term.
    pub p_iii: Complex<T>,
    /// The nonlinear correction contained in `p_iii`.
    pub nonlin_part: Complex<T>,
}

impl<T: Scalar> ProcessAmplitudes<T> {
    pub fn total(&self) -> Complex<T> {
        self.p_i + self.p_ii + self.p_iii
    }
}

/// Scattered one-photon amplitude for the rectangular input.
pub fn rect_one_photon_out<T: Scalar>(x: T, length: T, params: &PhysicalParams<T>) -> Result<Complex<T>> {
    check_length(length)?;
    let k = params.decay_per_length();
    let two = lit::<T>(2.0);
    let s = length.sqrt();
    let v = if x < T::zero() {
        two / s * ((-k * (length - x)).exp() - (k * x).exp())
    } else if x <= length {
        (two * (-k * (length - x)).exp() - T::one()) / s
    } else {
        T::zero()
    };
    Ok(cplx(v))
}

/// Nonlinear correction for the rectangular two-photon input:
/// `-(4/L) e^{-(Γ/c)(M-x1)} e^{-(Γ/c)(M-x2)} (1 - e^{-(Γ/c)(L-M)})²` with
/// `M = max(0, x1, x2)`, for `x1, x2 <= L`; zero beyond.
pub fn rect_nonlin_out<T: Scalar>(x1: T, x2: T, length: T, params: &PhysicalParams<T>) -> Result<Complex<T>> {
    check_length(length)?;
    if x1 > length || x2 > length {
        return Ok(cplx(T::zero()));
    }
    let k = params.decay_per_length();
    let m = T::zero().max(x1).max(x2);
    let tail = T::one() - (-k * (length - m)).exp();
    let v = -lit::<T>(4.0) / length * (-k * (m - x1)).exp() * (-k * (m - x2)).exp() * tail * tail;
    Ok(cplx(v))
}

/// Full two-photon output: product of one-photon outputs plus the nonlinear term.
pub fn rect_two_photon_out<T: Scalar>(x1: T, x2: T, length: T, params: &PhysicalParams<T>) -> Result<Complex<T>> {
    let lin = rect_one_photon_out(x1, length, params)? * rect_one_photon_out(x2, length, params)?;
    Ok(lin + rect_nonlin_out(x1, x2, length, params)?)
}

/// Split of the output into the three interaction processes, valid on
/// `0 <= x_i <= L` only.
pub fn rect_process_amplitudes<T: Scalar>(
    x1: T,
    x2: T,
    length: T,
    params: &PhysicalParams<T>,
) -> Result<ProcessAmplitudes<T>> {
    check_length(length)?;
    for x in [x1, x2] {
        if !(x >= T::zero() && x <= length) {
            return Err(Error::OutsideDomain(format!(
                "process split is defined on 0 <= x <= {length}, got {x}"
            )));
        }
    }
    let k = params.decay_per_length();
    let inv = T::one() / length;
    let two = lit::<T>(2.0);
    let a1 = (-k * (length - x1)).exp();
    let a2 = (-k * (length - x2)).exp();
    let nonlin = rect_nonlin_out(x1, x2, length, params)?;
    Ok(ProcessAmplitudes {
        p_i: cplx(inv),
        p_ii: cplx(inv * (two * a1 - two) + inv * (two * a2 - two)),
        p_iii: cplx(lit::<T>(4.0) * inv * (a1 - T::one()) * (a2 - T::one())) + nonlin,
        nonlin_part: nonlin,
    })
}

/// Default plateau margin `2 c/Γ` below the trailing edge.
pub fn default_plateau_margin<T: Scalar>(params: &PhysicalParams<T>) -> T {
    lit::<T>(2.0) * params.relaxation_length()
}

/// Long-pulse output `1/L - (4/L) e^{-(Γ/c)|x1 - x2|}` inside the plateau.
pub fn longpulse_psi_out<T: Scalar>(x1: T, x2: T, length: T, params: &PhysicalParams<T>) -> Result<Complex<T>> {
    longpulse_psi_out_with_margin(x1, x2, length, default_plateau_margin(params), params)
}

/// As [`longpulse_psi_out`], with the plateau `0 < x_i < L - margin`.
pub fn longpulse_psi_out_with_margin<T: Scalar>(
    x1: T,
    x2: T,
    length: T,
    margin: T,
    params: &PhysicalParams<T>,
) -> Result<Complex<T>> {
    check_length(length)?;
    for x in [x1, x2] {
        if !(x > T::zero() && x < length - margin) {
            return Err(Error::OutsideDomain(format!(
                "long-pulse form needs 0 < x < {}, got {x}",
                length - margin
            )));
        }
    }
    let k = params.decay_per_length();
    let inv = T::one() / length;
    Ok(cplx(inv - lit::<T>(4.0) * inv * (-k * (x1 - x2).abs()).exp()))
}

/// Long-pulse normalized correlation `(1/2)(1 - 4 e^{-Γ|τ|})²`.
pub fn longpulse_g2<T: Scalar>(tau: T, params: &PhysicalParams<T>) -> T {
    let d = T::one() - lit::<T>(4.0) * (-params.gamma() * tau.abs()).exp();
    lit::<T>(0.5) * d * d
}

/// Delay `2 ln 2 / Γ` at which the long-pulse correlation vanishes.
pub fn longpulse_dip_delay<T: Scalar>(params: &PhysicalParams<T>) -> T {
    lit::<T>(2.0) * T::LN_2() / params.gamma()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> PhysicalParams<f64> {
        PhysicalParams::default()
    }

    // Reference values below were computed independently with 30-digit
    // arithmetic from the unsimplified closed forms.

    #[test]
    fn one_photon_branches() {
        let p = unit();
        let at = |x| rect_one_photon_out(x, 20.0, &p).unwrap().re;
        assert!((at(20.0) - 0.223_606_797_749_978_97).abs() < 1e-15);
        assert!((at(10.0) - (-0.223_586_494_284_154_44)).abs() < 1e-15);
        assert!((at(0.0) - (-0.223_606_796_828_203_05)).abs() < 1e-15);
        assert_eq!(at(20.5), 0.0);
        // Jump at the leading edge equals the input edge height 1/sqrt(L).
        let below = at(-1e-300);
        assert!((at(0.0) - below - 1.0 / 20f64.sqrt()).abs() < 1e-15);
        assert!((below - (-0.447_213_594_578_182)).abs() < 1e-15);
    }

    #[test]
    fn nonlinear_term_values() {
        let p = unit();
        let v = rect_nonlin_out(10.0, 10.0, 20.0, &p).unwrap().re;
        assert!((v - (-0.199_981_840_440_325_73)).abs() < 1e-15);
        let v = rect_nonlin_out(10.0, 12.0, 20.0, &p).unwrap().re;
        assert!((v - (-0.027_048_899_721_413_493)).abs() < 1e-15);
        assert_eq!(rect_nonlin_out(20.0 + 1e-9, 3.0, 20.0, &p).unwrap().re, 0.0);
        assert_eq!(
            rect_nonlin_out(3.0, 7.0, 20.0, &p).unwrap(),
            rect_nonlin_out(7.0, 3.0, 20.0, &p).unwrap()
        );
    }

    #[test]
    fn nonlinear_term_matches_unsimplified_form() {
        let p = unit();
        let l = 20.0f64;
        for &(a, b) in &[(-3.0, -1.5), (-2.0, 4.0), (5.0, 5.0), (12.0, 19.0), (0.0, 0.0)] {
            let m = 0f64.max(a).max(b);
            let naive = -4.0 / l * (a + b).exp() * ((-m).exp() - (-l).exp()).powi(2);
            let got = rect_nonlin_out(a, b, l, &p).unwrap().re;
            assert!((got - naive).abs() < 1e-14, "({a},{b}): {got} vs {naive}");
        }
    }

    #[test]
    fn long_pulses_do_not_overflow() {
        let p = unit();
        let v = rect_nonlin_out(1000.0, 1000.0, 2000.0, &p).unwrap().re;
        assert!((v - (-4.0 / 2000.0)).abs() < 1e-15);
        let v = rect_two_photon_out(999.0, 1000.0, 2000.0, &p).unwrap().re;
        assert!(v.is_finite());
    }

    #[test]
    fn two_photon_reference_points() {
        let p = unit();
        let v = rect_two_photon_out(10.0, 10.0, 20.0, &p).unwrap().re;
        assert!((v - (-0.149_990_920_014_047_5)).abs() < 1e-15);
        assert!((v + 3.0 / 20.0).abs() < 1e-4);
        let v = rect_two_photon_out(2.0, 12.0, 20.0, &p).unwrap().re;
        assert!((v - 0.049_957_378_320_251_175).abs() < 1e-15);
        assert!((v - 1.0 / 20.0).abs() < 1e-4);
        // (2, 18) sits on the plateau edge, where the linear factor has not
        // yet reached 1/sqrt(L).
        let v = rect_two_photon_out(2.0, 18.0, 20.0, &p).unwrap().re;
        assert!((v - 0.036_466_453_738_297_71).abs() < 1e-15);
    }

    #[test]
    fn sign_change_at_two_ln_two() {
        let p = unit();
        let d = longpulse_dip_delay(&p);
        let at = |s: f64| rect_two_photon_out(10.0, 10.0 + s, 20.0, &p).unwrap().re;
        assert!(at(d - 0.01) < 0.0 && at(d + 0.01) > 0.0);
    }

    #[test]
    fn process_split_sums_to_total() {
        let p = unit();
        for &(a, b) in &[(0.0, 0.0), (10.0, 10.0), (2.0, 18.0), (20.0, 3.0), (7.5, 7.6)] {
            let pa = rect_process_amplitudes(a, b, 20.0, &p).unwrap();
            let tot = rect_two_photon_out(a, b, 20.0, &p).unwrap();
            assert!((pa.total() - tot).norm() < 1e-12);
        }
        let pa = rect_process_amplitudes(10.0, 10.0, 20.0, &p).unwrap();
        assert_eq!(pa.p_i.re, 0.05);
        assert!((pa.p_ii.re + 0.2).abs() < 1e-4);
        assert!(pa.p_iii.re.abs() < 1e-12);
        assert!(rect_process_amplitudes(-0.1, 3.0, 20.0, &p).is_err());
        assert!(rect_process_amplitudes(3.0, 20.1, 20.0, &p).is_err());
    }

    #[test]
    fn long_pulse_limits() {
        let p = unit();
        assert!((longpulse_psi_out(5.0, 5.0, 20.0, &p).unwrap().re + 3.0 / 20.0).abs() < 1e-15);
        let d = longpulse_dip_delay(&p);
        assert!(longpulse_psi_out(5.0, 5.0 + d, 20.0, &p).unwrap().re.abs() < 1e-15);
        assert!((longpulse_psi_out(1.0, 17.9, 20.0, &p).unwrap().re - 0.05).abs() < 1e-8);
        assert!(longpulse_psi_out(1.0, 18.5, 20.0, &p).is_err());
        assert!(longpulse_psi_out(0.0, 5.0, 20.0, &p).is_err());

        assert!((longpulse_g2(0.0, &p) - 4.5).abs() < 1e-15);
        assert!(longpulse_g2(d, &p) < 1e-30);
        assert!((longpulse_g2(60.0, &p) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn long_pulse_deviation_bound() {
        let p = unit();
        let l = 40.0;
        for i in 1..37 {
            for j in 1..37 {
                let (a, b) = (i as f64, j as f64 + 0.5);
                let exact = rect_two_photon_out(a, b, l, &p).unwrap().re;
                let approx = longpulse_psi_out(a, b, l, &p).unwrap().re;
                let bound = 4.0 * (-(l - a.max(b))).exp() / l;
                assert!((exact - approx).abs() <= bound * (1.0 + 1e-9) + 1e-17);
            }
        }
    }

    #[test]
    fn g2_zeros_by_bisection() {
        let p = unit();
        // g2 touches zero, so bracket the sign change of 1 - 4e^{-τ} instead.
        let f = |t: f64| 1.0 - 4.0 * (-t).exp();
        let (mut lo, mut hi) = (0.0, 5.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) < 0.0 { lo = mid } else { hi = mid }
        }
        assert!((lo - longpulse_dip_delay(&p)).abs() < 1e-12);
        assert!(longpulse_g2(-lo, &p) < 1e-24);
    }

    #[test]
    fn rejects_bad_lengths() {
        let p = unit();
        assert!(rect_one_photon_out(0.0, 0.0, &p).is_err());
        assert!(rect_nonlin_out(0.0, 0.0, -1.0, &p).is_err());
    }
}
