//! Lab-frame time stepping of the field–atom equations of motion.
//!
//! The field lives on a cell-centred grid in `r` with the atom on the
//! boundary between two cells. Time steps are `dt = dx / c`, so advection is
//! an exact one-cell shift; it is realized as a ring buffer so a step only
//! touches the cells at the atom. Per step the atom relaxes exactly and is
//! driven by the incoming cell, and the incoming cell gains the emission of
//! the atom as it was at the start of the step. That explicit emission makes
//! the scheme first order in `dx`.
//!
//! This integrator shares no code with the kernel evaluation and exists to
//! cross-check it.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::model::{Grid1D, LabState1, LabState2, PhysicalParams};
use crate::scalar::{czero, lit, Scalar};

/// Result of an evolution run.
#[derive(Debug, Clone)]
pub struct OracleRun<S, T> {
    pub state: S,
    pub steps: usize,
    /// Largest deviation of the total norm from its initial value along the
    /// trajectory, including anything that left the grid.
    pub norm_drift: T,
    trace: Option<Vec<(T, T)>>,
}

/// Per-step excitation probability, `(t, value)` after each step.
///
/// One photon: `|Ψ(E)|²`. Two photons: `∫|e(r)|² dr`.
pub fn excitation_trace<S, T>(run: &OracleRun<S, T>) -> Result<&[(T, T)]> {
    run.trace.as_deref().ok_or(Error::TracingDisabled)
}

/// Cell-centred lab grid on `[r_min, r_max]`; `r = 0` must be a cell edge.
pub fn lab_grid<T: Scalar>(r_min: T, r_max: T, dx: T) -> Result<Grid1D<T>> {
    if !(dx > T::zero()) || !dx.is_finite() {
        return Err(Error::InvalidParameter { name: "dx", reason: format!("must be positive, got {dx}") });
    }
    let n = ((r_max - r_min) / dx).round().to_usize().unwrap_or(0);
    if n < 2 {
        return Err(Error::InvalidGrid(format!("[{r_min}, {r_max}] holds fewer than two cells of {dx}")));
    }
    let half = dx * lit(0.5);
    let g = Grid1D::uniform(r_min + half, r_min + dx * lit::<T>(n as f64 - 0.5), n)?;
    atom_cell(&g)?;
    Ok(g)
}

/// Lab grid and time span for scattering a moving-frame input supported on
/// `[lo, hi]`: the input starts `5 c/Γ` upstream of the atom and the run
/// ends once its trailing edge is `15 c/Γ` downstream.
#[derive(Debug, Clone)]
pub struct OracleSetup<T> {
    pub grid: Grid1D<T>,
    pub t_initial: T,
    pub t_final: T,
}

impl<T: Scalar> OracleSetup<T> {
    pub fn for_support(lo: T, hi: T, dx: T, params: &PhysicalParams<T>) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::InvalidParameter { name: "support", reason: format!("empty interval [{lo}, {hi}]") });
        }
        let ell = params.relaxation_length();
        let cells = ((hi - lo + lit::<T>(5.0) * ell) / dx).ceil();
        let r_min = -cells * dx;
        let ct_i = r_min - lo;
        let ct_f = lit::<T>(15.0) * ell - lo;
        let r_max = hi + ct_f + lit::<T>(5.0) * ell;
        let grid = lab_grid(r_min, r_max, dx)?;
        Ok(Self { grid, t_initial: ct_i / params.c(), t_final: ct_f / params.c() })
    }
}

/// Index of the first cell downstream of the atom.
fn atom_cell<T: Scalar>(g: &Grid1D<T>) -> Result<usize> {
    let dx = g.dx();
    let edge = (g.x_min() - dx * lit(0.5)) / dx;
    let a = -edge.round();
    if (edge + a).abs() > lit(1e-6) || a < T::one() || a.to_usize().unwrap_or(0) >= g.len() {
        return Err(Error::Precondition(format!(
            "atom at r = 0 must sit on an interior cell edge of the lab grid starting at {}",
            g.x_min() - dx * lit(0.5)
        )));
    }
    Ok(a.to_usize().unwrap_or(0))
}

fn step_count<T: Scalar>(t0: T, t_final: T, dx: T, grid: &Grid1D<T>, params: &PhysicalParams<T>) -> Result<usize> {
    if !(dx > T::zero()) || !dx.is_finite() {
        return Err(Error::InvalidParameter { name: "dx", reason: format!("must be positive, got {dx}") });
    }
    if (grid.dx() - dx).abs() > dx * lit(1e-9) {
        return Err(Error::Precondition(format!("state grid spacing {} differs from dx = {dx}", grid.dx())));
    }
    if t_final < t0 || !t_final.is_finite() {
        return Err(Error::InvalidParameter {
            name: "t_final",
            reason: format!("{t_final} precedes the initial time {t0}"),
        });
    }
    // Rounded to whole steps.
    Ok((params.c() * (t_final - t0) / dx).round().to_usize().unwrap_or(0))
}

struct Coupling<T> {
    decay: T,
    drive: T,
    emit: T,
    dt: T,
}

impl<T: Scalar> Coupling<T> {
    fn new(dx: T, params: &PhysicalParams<T>) -> Self {
        let dt = dx / params.c();
        let g = params.gamma();
        let decay = (-g * dt).exp();
        Self {
            decay,
            drive: params.absorption_coupling() * (-(-g * dt).exp_m1()) / g,
            emit: params.emission_coupling(),
            dt,
        }
    }
}

pub fn evolve_one_photon<T: Scalar>(
    initial: &LabState1<T>,
    dx: T,
    t_final: T,
    params: &PhysicalParams<T>,
) -> Result<LabState1<T>> {
    Ok(run_one_photon(initial, dx, t_final, params, false)?.state)
}

pub fn evolve_one_photon_traced<T: Scalar>(
    initial: &LabState1<T>,
    dx: T,
    t_final: T,
    params: &PhysicalParams<T>,
) -> Result<OracleRun<LabState1<T>, T>> {
    run_one_photon(initial, dx, t_final, params, true)
}

fn run_one_photon<T: Scalar>(
    initial: &LabState1<T>,
    dx: T,
    t_final: T,
    params: &PhysicalParams<T>,
    traced: bool,
) -> Result<OracleRun<LabState1<T>, T>> {
    let grid = initial.grid().clone();
    let a = atom_cell(&grid)?;
    let steps = step_count(initial.t, t_final, dx, &grid, params)?;
    if initial.excited != czero() {
        return Err(Error::Precondition("the atom must start in its ground state".into()));
    }
    if initial.field()[a..].iter().any(|v| *v != czero()) {
        return Err(Error::Precondition("the initial field must vanish downstream of the atom".into()));
    }

    let n = grid.len();
    let cp = Coupling::new(dx, params);
    // buf[(j + n - s % n) % n] holds lab cell j after s steps.
    let mut buf = initial.field().to_vec();
    let mut e = czero::<T>();
    let norm0 = initial.total_norm();
    let mut norm = norm0;
    let mut drift = T::zero();
    let mut trace = traced.then(|| Vec::with_capacity(steps));

    for s in 0..steps {
        let off = s % n;
        let k = (a - 1 + n - off) % n;
        let u = buf[k];
        let out = u + e * cp.emit;
        let e_new = e * cp.decay - u * cp.drive;
        buf[k] = out;
        norm = norm + dx * (out.norm_sqr() - u.norm_sqr()) + e_new.norm_sqr() - e.norm_sqr();
        e = e_new;
        // Lab cell n-1 leaves the grid and its slot re-enters as cell 0.
        let gone = (n - 1 + n - off) % n;
        norm = norm - dx * buf[gone].norm_sqr();
        buf[gone] = czero();
        drift = drift.max((norm - norm0).abs());
        if let Some(tr) = trace.as_mut() {
            tr.push((initial.t + cp.dt * lit::<T>((s + 1) as f64), e.norm_sqr()));
        }
    }

    let off = steps % n;
    let field = (0..n).map(|j| buf[(j + n - off) % n]).collect();
    let t = initial.t + cp.dt * lit::<T>(steps as f64);
    let state = LabState1::new(t, grid, field, e)?;
    Ok(OracleRun { state, steps, norm_drift: drift, trace })
}

pub fn evolve_two_photon<T: Scalar>(
    initial: &LabState2<T>,
    dx: T,
    t_final: T,
    params: &PhysicalParams<T>,
) -> Result<LabState2<T>> {
    Ok(run_two_photon(initial, dx, t_final, params, false)?.state)
}

pub fn evolve_two_photon_traced<T: Scalar>(
    initial: &LabState2<T>,
    dx: T,
    t_final: T,
    params: &PhysicalParams<T>,
) -> Result<OracleRun<LabState2<T>, T>> {
    run_two_photon(initial, dx, t_final, params, true)
}

fn run_two_photon<T: Scalar>(
    initial: &LabState2<T>,
    dx: T,
    t_final: T,
    params: &PhysicalParams<T>,
    traced: bool,
) -> Result<OracleRun<LabState2<T>, T>> {
    let grid = initial.grid().clone();
    let a = atom_cell(&grid)?;
    let steps = step_count(initial.t, t_final, dx, &grid, params)?;
    let n = grid.len();
    if initial.excited1().iter().any(|v| *v != czero()) {
        return Err(Error::Precondition("the atom must start in its ground state".into()));
    }
    let f0 = initial.field2();
    if (0..n).any(|i| (a..n).any(|j| f0[i * n + j] != czero())) {
        return Err(Error::Precondition("the initial field must vanish downstream of the atom".into()));
    }
    if initial.max_asymmetry() > T::zero() {
        return Err(Error::Asymmetric(initial.max_asymmetry().to_f64().unwrap_or(f64::NAN)));
    }

    let cp = Coupling::new(dx, params);
    let two = lit::<T>(2.0);
    let dx2 = dx * dx;
    let mut phi = f0.to_vec();
    let mut e = vec![czero::<T>(); n];
    let mut e_old = vec![czero::<T>(); n];
    let norm0 = initial.total_norm();
    let mut norm = norm0;
    let mut e_norm = T::zero();
    let mut drift = T::zero();
    let mut trace = traced.then(|| Vec::with_capacity(steps));

    for s in 0..steps {
        let off = s % n;
        let k = (a - 1 + n - off) % n;
        e_old.copy_from_slice(&e);
        // Absorption from the photon arriving at the atom, other photon anywhere.
        for j in 0..n {
            e[j] = e_old[j] * cp.decay - phi[k * n + j] * cp.drive;
        }
        // Emission onto the line where either photon leaves the atom.
        let mut d_field = T::zero();
        for j in 0..n {
            if j == k {
                continue;
            }
            let old = phi[k * n + j];
            let new = old + e_old[j] * cp.emit;
            phi[k * n + j] = new;
            phi[j * n + k] = new;
            d_field = d_field + two * (new.norm_sqr() - old.norm_sqr());
        }
        let old = phi[k * n + k];
        let new = old + e_old[k] * (two * cp.emit);
        phi[k * n + k] = new;
        d_field = d_field + new.norm_sqr() - old.norm_sqr();

        let e_sq = e.iter().fold(T::zero(), |acc, v| acc + v.norm_sqr());
        norm = norm + dx2 * d_field + two * dx * (e_sq - e_norm);
        e_norm = e_sq;

        // The last lab row/column leaves the grid and re-enters as the first.
        let gone = (n - 1 + n - off) % n;
        let mut lost = T::zero();
        for j in 0..n {
            let w = if j == gone { T::one() } else { two };
            lost = lost + w * phi[gone * n + j].norm_sqr();
            phi[gone * n + j] = czero();
            phi[j * n + gone] = czero();
        }
        let le = e[gone].norm_sqr();
        e[gone] = czero();
        e_norm = e_norm - le;
        norm = norm - dx2 * lost - two * dx * le;

        drift = drift.max((norm - norm0).abs());
        if let Some(tr) = trace.as_mut() {
            tr.push((initial.t + cp.dt * lit::<T>((s + 1) as f64), e_norm * dx));
        }
    }

    let off = steps % n;
    let idx: Vec<usize> = (0..n).map(|j| (j + n - off) % n).collect();
    let mut field2 = vec![czero(); n * n];
    for i in 0..n {
        for j in 0..n {
            field2[i * n + j] = phi[idx[i] * n + idx[j]];
        }
    }
    let excited1 = idx.iter().map(|&k| e[k]).collect();
    let t = initial.t + cp.dt * lit::<T>(steps as f64);
    let state = LabState2::new(t, grid, field2, excited1)?;
    Ok(OracleRun { state, steps, norm_drift: drift, trace })
}

/// Relative L2 distance `‖a - b‖ / ‖b‖` over paired samples.
pub fn relative_l2<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> T {
    let (num, den) = a
        .iter()
        .zip(b)
        .fold((T::zero(), T::zero()), |(n, d), (x, y)| (n + (x - y).norm_sqr(), d + y.norm_sqr()));
    (num / den).sqrt()
}
