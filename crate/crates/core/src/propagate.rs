//! Application of the scattering map to input wavefunctions.
//!
//! Piecewise-constant inputs are integrated in closed form cell by cell.
//! Sampled inputs are resampled onto the output grid and integrated against
//! the exponential kernels by product integration: the data are linearly
//! interpolated and the exponential weight is integrated exactly on each
//! cell, so the only discretization error is in the data itself.
//!
//! Both kernels reduce to one-dimensional tail integrals
//! `I(m) = ∫_m^∞ e^{-(Γ/c)(x'-m)} Ψ(x') dx'`, which are accumulated from
//! the right with non-positive exponents only.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{Grid1D, PhysicalParams, Side, Wavefunction1, Wavefunction2};
use crate::scalar::{czero, from_usize, lit, Scalar};

/// Non-fatal diagnostics attached to a propagation result.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// The output spacing exceeds the narrowest input cell.
    OutputCoarserThanInput { output_dx: f64, narrowest_cell: f64 },
    /// An input discontinuity inside the output range is not a tracked grid
    /// breakpoint, so norms on this grid carry a jump error.
    UntrackedBreakpoint { position: f64 },
}

#[derive(Debug, Clone)]
pub struct Propagated1<T> {
    pub psi: Wavefunction1<T>,
    pub warnings: Vec<Warning>,
}

#[derive(Debug, Clone)]
pub struct Propagated2<T> {
    pub psi: Wavefunction2<T>,
    pub warnings: Vec<Warning>,
}

/// Output of the full two-photon map with both of its parts.
#[derive(Debug, Clone)]
pub struct TwoPhotonOutput<T> {
    pub total: Wavefunction2<T>,
    pub linear: Wavefunction2<T>,
    pub nonlinear: Wavefunction2<T>,
    pub warnings: Vec<Warning>,
}

/// Output split by interaction process: (i) no absorption, (ii) exactly one
/// photon absorbed and reemitted, (iii) both absorbed, including the
/// nonlinear correction.
#[derive(Debug, Clone)]
pub struct ProcessGrids<T> {
    pub p_i: Wavefunction2<T>,
    pub p_ii: Wavefunction2<T>,
    pub p_iii: Wavefunction2<T>,
    pub nonlinear: Wavefunction2<T>,
}

/// Product-integration weights for one cell of width `h`:
/// `∫_0^h e^{-ks}(1 - s/h) ds` and `∫_0^h e^{-ks}(s/h) ds`, plus `e^{-kh}`.
#[derive(Debug, Clone, Copy)]
struct CellWeights<T> {
    w0: T,
    w1: T,
    decay: T,
}

impl<T: Scalar> CellWeights<T> {
    fn new(k: T, h: T) -> Self {
        let q = k * h;
        let one_minus = -(-q).exp_m1();
        // 1 - e^{-q}(1 + q), by series when cancellation would bite.
        let g = if q < lit(0.1) {
            let mut term = q * q / lit(2.0);
            let mut sum = term;
            for j in 3..20usize {
                term = -term * q / from_usize::<T>(j) * from_usize::<T>(j - 1) / from_usize::<T>(j - 2);
                sum = sum + term;
            }
            sum
        } else {
            one_minus - q * (-q).exp()
        };
        let w1 = g / (k * q);
        let w0 = one_minus / k - w1;
        Self { w0, w1, decay: (-q).exp() }
    }
}

/// Right-to-left tail integrals of linearly interpolated samples on a
/// uniform grid, zero beyond the last node.
fn tail_integrals<T: Scalar>(f: &[Complex<T>], w: &CellWeights<T>) -> Vec<Complex<T>> {
    let n = f.len();
    let mut out = vec![czero(); n];
    for i in (0..n.saturating_sub(1)).rev() {
        out[i] = out[i + 1] * w.decay + f[i] * w.w0 + f[i + 1] * w.w1;
    }
    out
}

/// Input samples and tail integrals of a one-photon factor on the output grid.
struct Factor<T> {
    grid: Grid1D<T>,
    below: Vec<Complex<T>>,
    at: Vec<Complex<T>>,
    above: Vec<Complex<T>>,
    tail: Vec<Complex<T>>,
    k: T,
}

impl<T: Scalar> Factor<T> {
    fn build(input: &Wavefunction1<T>, grid: &Grid1D<T>, params: &PhysicalParams<T>) -> Result<(Self, Vec<Warning>)> {
        let k = params.decay_per_length();
        let xs = grid.points();
        if let Some(pc) = input.piecewise_form() {
            let tail = xs
                .iter()
                .map(|&m| {
                    pc.cells().fold(czero(), |acc, (a, b, v)| {
                        if b <= m {
                            return acc;
                        }
                        let lo = a.max(m);
                        acc + v * (((-k * (lo - m)).exp() - (-k * (b - m)).exp()) / k)
                    })
                })
                .collect();
            let eval = |s| xs.iter().map(|&x| pc.eval(x, s)).collect::<Vec<_>>();
            let mut warnings = Vec::new();
            let narrowest = pc.cells().map(|(a, b, _)| b - a).fold(T::infinity(), T::min);
            if grid.dx() > narrowest {
                warnings.push(Warning::OutputCoarserThanInput {
                    output_dx: grid.dx().to_f64().unwrap_or(f64::NAN),
                    narrowest_cell: narrowest.to_f64().unwrap_or(f64::NAN),
                });
            }
            for &e in pc.edges() {
                if e > grid.x_min() && e < grid.x_max() {
                    let tracked = grid.node_index(e).is_some_and(|i| grid.breaks().contains(&i));
                    if !tracked {
                        warnings.push(Warning::UntrackedBreakpoint {
                            position: e.to_f64().unwrap_or(f64::NAN),
                        });
                    }
                }
            }
            let f = Self {
                grid: grid.clone(),
                below: eval(Side::Below),
                at: eval(Side::At),
                above: eval(Side::Above),
                tail,
                k,
            };
            return Ok((f, warnings));
        }

        if let Some((_, hi)) = input.support() {
            let hi = hi.min(input.grid().x_max());
            if hi > grid.x_max() + grid.dx() * lit(1e-9) {
                return Err(Error::GridDoesNotCoverInput(format!(
                    "input extends to {hi}, output grid ends at {}",
                    grid.x_max()
                )));
            }
        }
        let samples: Vec<_> = xs.iter().map(|&x| input.value_at(x)).collect();
        let tail = tail_integrals(&samples, &CellWeights::new(k, grid.dx()));
        let f = Self {
            grid: grid.clone(),
            below: samples.clone(),
            above: samples.clone(),
            at: samples,
            tail,
            k,
        };
        Ok((f, Vec::new()))
    }

    fn input(&self, i: usize, side: Side) -> Complex<T> {
        match side {
            Side::Below => self.below[i],
            Side::At => self.at[i],
            Side::Above => self.above[i],
        }
    }

    /// Absorption-reemission part of the one-photon output at node `i`.
    fn smooth(&self, i: usize) -> Complex<T> {
        self.tail[i] * (-lit::<T>(2.0) * self.k)
    }

    fn one_photon(&self) -> Result<Wavefunction1<T>> {
        Wavefunction1::from_node_fn(self.grid.clone(), |i, s| self.input(i, s) + self.smooth(i))
    }

    fn nonlinear(&self) -> Result<Wavefunction2<T>> {
        let xs = self.grid.points();
        let k = self.k;
        let c = -lit::<T>(4.0) * k * k;
        // i <= j, so the threshold max(x_i, x_j) is x_j.
        Wavefunction2::from_node_fn(self.grid.clone(), |i, _, j, _| {
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            let t = self.tail[j];
            t * t * (c * (-k * (xs[j] - xs[i])).exp())
        })
    }

    fn processes(&self) -> Result<ProcessGrids<T>> {
        let nonlinear = self.nonlinear()?;
        let g = self.grid.clone();
        let p_i = Wavefunction2::from_node_fn(g.clone(), |i, si, j, sj| self.input(i, si) * self.input(j, sj))?;
        let p_ii = Wavefunction2::from_node_fn(g.clone(), |i, si, j, sj| {
            self.input(i, si) * self.smooth(j) + self.smooth(i) * self.input(j, sj)
        })?;
        let smooth2 = Wavefunction2::from_node_fn(g, |i, _, j, _| self.smooth(i) * self.smooth(j))?;
        let p_iii = smooth2.try_add(&nonlinear)?;
        Ok(ProcessGrids { p_i, p_ii, p_iii, nonlinear })
    }
}

/// Resampled general two-photon input with its row tail integrals.
struct Field2<T> {
    grid: Grid1D<T>,
    f: Vec<Complex<T>>,
    weights: CellWeights<T>,
    k: T,
}

impl<T: Scalar> Field2<T> {
    fn build(input: &Wavefunction2<T>, grid: &Grid1D<T>, params: &PhysicalParams<T>) -> Result<Self> {
        let n = grid.len();
        let src = input.grid();
        // Largest coordinate carrying amplitude.
        let m = src.len();
        let mut hi: Option<usize> = None;
        for i in (0..m).rev() {
            if (0..m).any(|j| input.get(i, j) != czero()) {
                hi = Some(i);
                break;
            }
        }
        if let Some(i) = hi {
            let top = src.x((i + 1).min(m - 1));
            if top > grid.x_max() + grid.dx() * lit(1e-9) {
                return Err(Error::GridDoesNotCoverInput(format!(
                    "input extends to {top}, output grid ends at {}",
                    grid.x_max()
                )));
            }
        }
        let f = if src == grid {
            input.amp().to_vec()
        } else {
            let mut f = vec![czero(); n * n];
            for i in 0..n {
                for j in i..n {
                    let v = input.interpolate(grid.x(i), grid.x(j)).unwrap_or_else(czero);
                    f[i * n + j] = v;
                    f[j * n + i] = v;
                }
            }
            f
        };
        let k = params.decay_per_length();
        Ok(Self { grid: grid.clone(), f, weights: CellWeights::new(k, grid.dx()), k })
    }

    /// `A` applied along the second coordinate of every row, where
    /// `(A g)(x) = -2(Γ/c) ∫_x^∞ e^{-(Γ/c)(x'-x)} g(x') dx'`.
    fn smooth_rows(&self, data: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.grid.len();
        let s = -lit::<T>(2.0) * self.k;
        let mut out = vec![czero(); n * n];
        for r in 0..n {
            let t = tail_integrals(&data[r * n..(r + 1) * n], &self.weights);
            for (o, v) in out[r * n..(r + 1) * n].iter_mut().zip(t) {
                *o = v * s;
            }
        }
        out
    }

    fn transpose(&self, data: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.grid.len();
        let mut out = vec![czero(); n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = data[i * n + j];
            }
        }
        out
    }

    /// Returns `(A2 F, A1 F, A1 A2 F)`.
    fn linear_terms(&self) -> [Vec<Complex<T>>; 3] {
        let a2 = self.smooth_rows(&self.f);
        let a1 = self.transpose(&a2);
        let a12 = self.transpose(&self.smooth_rows(&a1));
        [a2, a1, a12]
    }

    fn nonlinear(&self) -> Result<Wavefunction2<T>> {
        let n = self.grid.len();
        let f = &self.f;
        let w = &self.weights;
        // Row tails R_r(j) are only needed at j = r and j = r + 1.
        let row_tail_from = |r: usize, start: usize| -> Complex<T> {
            let mut acc = czero();
            for j in (start..n - 1).rev() {
                acc = acc * w.decay + f[r * n + j] * w.w0 + f[r * n + j + 1] * w.w1;
            }
            acc
        };
        // q[i] = ∫∫_{[x_i,∞)²} e^{-k(u-x_i)} e^{-k(v-x_i)} F(u,v).
        let mut q = vec![czero(); n];
        for i in (0..n.saturating_sub(1)).rev() {
            let cell = f[i * n + i] * (w.w0 * w.w0)
                + (f[i * n + i + 1] + f[(i + 1) * n + i]) * (w.w0 * w.w1)
                + f[(i + 1) * n + i + 1] * (w.w1 * w.w1);
            let strip = (row_tail_from(i, i + 1) * w.w0 + row_tail_from(i + 1, i + 1) * w.w1) * w.decay;
            q[i] = q[i + 1] * (w.decay * w.decay) + cell + strip * lit::<T>(2.0);
        }
        let xs = self.grid.points();
        let k = self.k;
        let c = -lit::<T>(4.0) * k * k;
        Wavefunction2::from_node_fn(self.grid.without_breaks(), |i, _, j, _| {
            let (i, j) = if i <= j { (i, j) } else { (j, i) };
            q[j] * (c * (-k * (xs[j] - xs[i])).exp())
        })
    }
}

fn check_symmetric<T: Scalar>(input: &Wavefunction2<T>) -> Result<()> {
    let a = input.max_asymmetry();
    if a > T::zero() {
        return Err(Error::Asymmetric(a.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(())
}

/// `Ψ_out(x) = Ψ_in(x) + ∫_x^∞ u_abs(x, x') Ψ_in(x') dx'`.
pub fn apply_one_photon<T: Scalar>(
    input: &Wavefunction1<T>,
    out_grid: &Grid1D<T>,
    params: &PhysicalParams<T>,
) -> Result<Propagated1<T>> {
    let (factor, warnings) = Factor::build(input, out_grid, params)?;
    Ok(Propagated1 { psi: factor.one_photon()?, warnings })
}

/// Linear part: both photons scatter independently.
pub fn apply_two_photon_linear<T: Scalar>(
    input: &Wavefunction2<T>,
    out_grid: &Grid1D<T>,
    params: &PhysicalParams<T>,
) -> Result<Propagated2<T>> {
    check_symmetric(input)?;
    if let Some(f) = input.factor() {
        let out = apply_one_photon(f, out_grid, params)?;
        return Ok(Propagated2 { psi: Wavefunction2::product(&out.psi), warnings: out.warnings });
    }
    let field = Field2::build(input, out_grid, params)?;
    let [a2, a1, a12] = field.linear_terms();
    let raw = (0..field.f.len()).map(|p| field.f[p] + a2[p] + a1[p] + a12[p]).collect();
    Ok(Propagated2 {
        psi: Wavefunction2::symmetrized(out_grid.without_breaks(), raw)?,
        warnings: Vec::new(),
    })
}

/// Nonlinear correction: removes simultaneous double absorption.
pub fn apply_two_photon_nonlinear<T: Scalar>(
    input: &Wavefunction2<T>,
    out_grid: &Grid1D<T>,
    params: &PhysicalParams<T>,
) -> Result<Propagated2<T>> {
    check_symmetric(input)?;
    if let Some(f) = input.factor() {
        let (factor, warnings) = Factor::build(f, out_grid, params)?;
        return Ok(Propagated2 { psi: factor.nonlinear()?, warnings });
    }
    let field = Field2::build(input, out_grid, params)?;
    Ok(Propagated2 { psi: field.nonlinear()?, warnings: Vec::new() })
}

/// Full two-photon map, keeping the linear and nonlinear parts.
pub fn apply_two_photon<T: Scalar>(
    input: &Wavefunction2<T>,
    out_grid: &Grid1D<T>,
    params: &PhysicalParams<T>,
) -> Result<TwoPhotonOutput<T>> {
    let linear = apply_two_photon_linear(input, out_grid, params)?;
    let nonlinear = apply_two_photon_nonlinear(input, out_grid, params)?;
    let total = linear.psi.try_add(&nonlinear.psi)?;
    let mut warnings = linear.warnings;
    for w in nonlinear.warnings {
        if !warnings.contains(&w) {
            warnings.push(w);
        }
    }
    Ok(TwoPhotonOutput { total, linear: linear.psi, nonlinear: nonlinear.psi, warnings })
}

/// Output split into the three interaction processes on `out_grid`.
pub fn decompose_processes<T: Scalar>(
    input: &Wavefunction2<T>,
    out_grid: &Grid1D<T>,
    params: &PhysicalParams<T>,
) -> Result<ProcessGrids<T>> {
    check_symmetric(input)?;
    if let Some(f) = input.factor() {
        let (factor, _) = Factor::build(f, out_grid, params)?;
        return factor.processes();
    }
    let field = Field2::build(input, out_grid, params)?;
    let [a2, a1, a12] = field.linear_terms();
    let g = out_grid.without_breaks();
    let nonlinear = field.nonlinear()?;
    let p_i = Wavefunction2::symmetrized(g.clone(), field.f.clone())?;
    let p_ii = Wavefunction2::symmetrized(g.clone(), a2.iter().zip(&a1).map(|(a, b)| a + b).collect())?;
    let p_iii = Wavefunction2::symmetrized(g, a12)?.try_add(&nonlinear)?;
    Ok(ProcessGrids { p_i, p_ii, p_iii, nonlinear })
}

/// Output grid `[lo - 10 c/Γ, hi]` at spacing `0.01 c/Γ`, with the given
/// breakpoints pinned to nodes.
pub fn default_output_grid<T: Scalar>(
    support: (T, T),
    breakpoints: &[T],
    params: &PhysicalParams<T>,
) -> Result<Grid1D<T>> {
    let ell = params.relaxation_length();
    let lo = support.0 - lit::<T>(10.0) * ell;
    let hi = support.1;
    let dx = lit::<T>(0.01) * ell;
    let n = ((hi - lo) / dx).ceil().to_usize().unwrap_or(0) + 1;
    Grid1D::aligned(lo, hi, n, breakpoints)
}
