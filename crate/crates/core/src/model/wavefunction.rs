use num_complex::Complex;

use super::grid::{Grid1D, Side};
use crate::error::{Error, Result};
use crate::scalar::{cplx, czero, lit, Scalar};

/// Exact piecewise-constant amplitude: `values[k]` on `[edges[k], edges[k+1]]`.
///
/// Point values at interior edges belong to the cell on the right; the last
/// edge belongs to the last cell, so a single cell is a closed interval.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseConstant<T> {
    edges: Vec<T>,
    values: Vec<Complex<T>>,
}

impl<T: Scalar> PiecewiseConstant<T> {
    pub fn new(edges: Vec<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if edges.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::ShapeMismatch(format!(
                "{} edges for {} cells",
                edges.len(),
                values.len()
            )));
        }
        if edges.iter().any(|e| !e.is_finite()) {
            return Err(Error::NonFinite("cell edge"));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite("cell value"));
        }
        if edges.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter {
                name: "edges",
                reason: "must be strictly increasing".into(),
            });
        }
        Ok(Self { edges, values })
    }

    pub fn edges(&self) -> &[T] {
        &self.edges
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    /// Cells as `(lo, hi, value)`.
    pub fn cells(&self) -> impl Iterator<Item = (T, T, Complex<T>)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, v)| (self.edges[k], self.edges[k + 1], *v))
    }

    pub fn eval(&self, x: T, side: Side) -> Complex<T> {
        let n = self.values.len();
        let first = self.edges[0];
        let last = self.edges[n];
        match side {
            Side::Below if x <= first || x > last => return czero(),
            Side::Above if x < first || x >= last => return czero(),
            Side::At if x < first || x > last => return czero(),
            _ => {}
        }
        // Index of the first edge strictly greater than x.
        let upper = self.edges.partition_point(|e| *e <= x);
        let k = match side {
            Side::Below => {
                let upper_incl = self.edges.partition_point(|e| *e < x);
                upper_incl - 1
            }
            Side::At | Side::Above => upper.saturating_sub(1).min(n - 1),
        };
        self.values[k]
    }

    /// Closure of the nonzero cells.
    pub fn support(&self) -> Option<(T, T)> {
        let nz = |v: &Complex<T>| v.re != T::zero() || v.im != T::zero();
        let lo = self.values.iter().position(nz)?;
        let hi = self.values.iter().rposition(nz)?;
        Some((self.edges[lo], self.edges[hi + 1]))
    }

    pub fn norm(&self) -> T {
        self.cells()
            .fold(T::zero(), |acc, (a, b, v)| acc + v.norm_sqr() * (b - a))
    }

    pub fn scaled(&self, alpha: Complex<T>) -> Self {
        Self {
            edges: self.edges.clone(),
            values: self.values.iter().map(|v| v * alpha).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Representation<T> {
    Sampled,
    Piecewise(PiecewiseConstant<T>),
}

/// One-photon amplitude on a grid.
///
/// `amp` holds point values at the nodes. When the grid tracks breakpoints
/// and the function jumps there, `slots` additionally holds the one-sided
/// limits in the order of [`Grid1D::slots`], which is what norms integrate.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction1<T> {
    grid: Grid1D<T>,
    amp: Vec<Complex<T>>,
    slots: Option<Vec<Complex<T>>>,
    repr: Representation<T>,
}

fn check_finite<T: Scalar>(amp: &[Complex<T>]) -> Result<()> {
    if amp.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(Error::NonFinite("amplitude"));
    }
    Ok(())
}

impl<T: Scalar> Wavefunction1<T> {
    pub fn sampled(grid: Grid1D<T>, amp: Vec<Complex<T>>) -> Result<Self> {
        if amp.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} samples on a {}-point grid",
                amp.len(),
                grid.len()
            )));
        }
        check_finite(&amp)?;
        Ok(Self { grid, amp, slots: None, repr: Representation::Sampled })
    }

    pub fn zeros(grid: Grid1D<T>) -> Self {
        let amp = vec![czero(); grid.len()];
        Self { grid, amp, slots: None, repr: Representation::Sampled }
    }

    /// Samples a continuous function at the nodes.
    pub fn from_fn(grid: Grid1D<T>, f: impl Fn(T) -> Complex<T>) -> Result<Self> {
        let amp = grid.points().iter().map(|&x| f(x)).collect();
        Self::sampled(grid, amp)
    }

    /// Samples a function that may jump at the grid's breakpoints; `f` is
    /// asked for both one-sided limits there.
    pub fn from_sided_fn(grid: Grid1D<T>, f: impl Fn(T, Side) -> Complex<T>) -> Result<Self> {
        let xs = grid.points().to_vec();
        Self::from_node_fn(grid, |i, s| f(xs[i], s))
    }

    /// As [`Wavefunction1::from_sided_fn`], addressing nodes by index.
    pub fn from_node_fn(grid: Grid1D<T>, f: impl Fn(usize, Side) -> Complex<T>) -> Result<Self> {
        let amp: Vec<_> = (0..grid.len()).map(|i| f(i, Side::At)).collect();
        check_finite(&amp)?;
        let slots = if grid.breaks().is_empty() {
            None
        } else {
            let s: Vec<_> = grid.slots().iter().map(|s| f(s.index, s.side)).collect();
            check_finite(&s)?;
            Some(s)
        };
        Ok(Self { grid, amp, slots, repr: Representation::Sampled })
    }

    pub fn piecewise(grid: Grid1D<T>, pc: PiecewiseConstant<T>) -> Result<Self> {
        let mut psi = Self::from_sided_fn(grid, |x, s| pc.eval(x, s))?;
        psi.repr = Representation::Piecewise(pc);
        Ok(psi)
    }

    /// `1/sqrt(L)` on `[0, L]`, zero elsewhere; unit norm exactly.
    pub fn rectangular(length: T, grid: Grid1D<T>) -> Result<Self> {
        if !length.is_finite() || length <= T::zero() {
            return Err(Error::InvalidParameter {
                name: "length",
                reason: format!("must be positive, got {length}"),
            });
        }
        let pc = PiecewiseConstant::new(
            vec![T::zero(), length],
            vec![cplx(T::one() / length.sqrt())],
        )?;
        Self::piecewise(grid, pc)
    }

    /// Unit-norm Gaussian amplitude with intensity standard deviation `width`.
    pub fn gaussian(center: T, width: T, grid: Grid1D<T>) -> Result<Self> {
        if !width.is_finite() || width <= T::zero() {
            return Err(Error::InvalidParameter {
                name: "width",
                reason: format!("must be positive, got {width}"),
            });
        }
        let two = lit::<T>(2.0);
        let pre = (two * T::PI() * width * width).powf(lit(-0.25));
        Self::from_fn(grid, |x| {
            let d = (x - center) / width;
            cplx(pre * (-d * d / lit(4.0)).exp())
        })
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn amp(&self) -> &[Complex<T>] {
        &self.amp
    }

    pub fn representation(&self) -> &Representation<T> {
        &self.repr
    }

    pub fn piecewise_form(&self) -> Option<&PiecewiseConstant<T>> {
        match &self.repr {
            Representation::Piecewise(pc) => Some(pc),
            Representation::Sampled => None,
        }
    }

    /// One-sided samples aligned with the grid's slots, when jumps are tracked.
    pub fn slot_values(&self) -> Option<&[Complex<T>]> {
        self.slots.as_deref()
    }

    /// Samples in slot order, duplicating node values when no jumps are tracked.
    pub fn slot_samples(&self) -> Vec<Complex<T>> {
        match &self.slots {
            Some(s) => s.clone(),
            None => self.grid.slots().iter().map(|s| self.amp[s.index]).collect(),
        }
    }

    /// `∫|Ψ|²dx`: exact for piecewise-constant data, composite quadrature per
    /// jump-free segment otherwise.
    pub fn norm(&self) -> T {
        if let Representation::Piecewise(pc) = &self.repr {
            return pc.norm();
        }
        match &self.slots {
            Some(s) => weighted_sum(&self.grid.slot_weights(), s),
            None => weighted_sum(&self.grid.node_weights(), &self.amp),
        }
    }

    /// Closure of the region where the amplitude is nonzero.
    pub fn support(&self) -> Option<(T, T)> {
        if let Representation::Piecewise(pc) = &self.repr {
            return pc.support();
        }
        let nz = |v: &Complex<T>| v.re != T::zero() || v.im != T::zero();
        let lo = self.amp.iter().position(nz)?;
        let hi = self.amp.iter().rposition(nz)?;
        let n = self.grid.len();
        Some((self.grid.x(lo.saturating_sub(1)), self.grid.x((hi + 1).min(n - 1))))
    }

    /// Amplitude at an arbitrary position: exact for piecewise data, linear
    /// interpolation otherwise, zero outside the grid.
    pub fn value_at(&self, x: T) -> Complex<T> {
        if let Representation::Piecewise(pc) = &self.repr {
            return pc.eval(x, Side::At);
        }
        match self.grid.locate(x) {
            Some((i, f)) => self.amp[i] * (T::one() - f) + self.amp[i + 1] * f,
            None => czero(),
        }
    }

    pub fn scaled(&self, alpha: Complex<T>) -> Self {
        Self {
            grid: self.grid.clone(),
            amp: self.amp.iter().map(|v| v * alpha).collect(),
            slots: self.slots.as_ref().map(|s| s.iter().map(|v| v * alpha).collect()),
            repr: match &self.repr {
                Representation::Sampled => Representation::Sampled,
                Representation::Piecewise(pc) => Representation::Piecewise(pc.scaled(alpha)),
            },
        }
    }
}

fn weighted_sum<T: Scalar>(w: &[T], v: &[Complex<T>]) -> T {
    w.iter()
        .zip(v)
        .fold(T::zero(), |acc, (w, v)| acc + *w * v.norm_sqr())
}

/// Exchange-symmetric two-photon amplitude on a square grid.
///
/// Storage is the full `n × n` array, row-major with `x1` as the row. All
/// public constructors except [`Wavefunction2::from_raw_unchecked`] write
/// through a mirror so that `amp(x1,x2) == amp(x2,x1)` bit for bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Wavefunction2<T> {
    grid: Grid1D<T>,
    amp: Vec<Complex<T>>,
    slots: Option<Vec<Complex<T>>>,
    factor: Option<Wavefunction1<T>>,
}

fn mirrored<T: Scalar>(n: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Vec<Complex<T>> {
    let mut amp = vec![czero(); n * n];
    for i in 0..n {
        for j in i..n {
            let v = f(i, j);
            amp[i * n + j] = v;
            amp[j * n + i] = v;
        }
    }
    amp
}

impl<T: Scalar> Wavefunction2<T> {
    pub fn zeros(grid: Grid1D<T>) -> Self {
        let n = grid.len();
        Self { grid, amp: vec![czero(); n * n], slots: None, factor: None }
    }

    /// Samples `f` on the upper triangle and mirrors.
    pub fn from_fn(grid: Grid1D<T>, f: impl Fn(T, T) -> Complex<T>) -> Result<Self> {
        let n = grid.len();
        let amp = mirrored(n, |i, j| f(grid.x(i), grid.x(j)));
        check_finite(&amp)?;
        Ok(Self { grid, amp, slots: None, factor: None })
    }

    /// Like [`Wavefunction2::from_fn`] but also records one-sided limits on
    /// breakpoint lines of the grid.
    pub fn from_sided_fn(grid: Grid1D<T>, f: impl Fn(T, Side, T, Side) -> Complex<T>) -> Result<Self> {
        let xs = grid.points().to_vec();
        Self::from_node_fn(grid, |i, si, j, sj| f(xs[i], si, xs[j], sj))
    }

    /// As [`Wavefunction2::from_sided_fn`], addressing nodes by index. `f` is
    /// only called with `i <= j` (in slot order on breakpoint lines).
    pub fn from_node_fn(
        grid: Grid1D<T>,
        f: impl Fn(usize, Side, usize, Side) -> Complex<T>,
    ) -> Result<Self> {
        let n = grid.len();
        let amp = mirrored(n, |i, j| f(i, Side::At, j, Side::At));
        check_finite(&amp)?;
        let slots = if grid.breaks().is_empty() {
            None
        } else {
            let sl = grid.slots();
            let s = mirrored(sl.len(), |p, q| f(sl[p].index, sl[p].side, sl[q].index, sl[q].side));
            check_finite(&s)?;
            Some(s)
        };
        Ok(Self { grid, amp, slots, factor: None })
    }

    /// `Ψ(x1) Ψ(x2)`, kept in factored form.
    pub fn product(psi: &Wavefunction1<T>) -> Self {
        let grid = psi.grid().clone();
        let n = grid.len();
        let a = psi.amp();
        let amp = mirrored(n, |i, j| a[i] * a[j]);
        let slots = psi.slot_values().map(|s| mirrored(s.len(), |p, q| s[p] * s[q]));
        Self { grid, amp, slots, factor: Some(psi.clone()) }
    }

    /// Builds from a full array, replacing it by its symmetric part.
    pub fn symmetrized(grid: Grid1D<T>, raw: Vec<Complex<T>>) -> Result<Self> {
        let n = grid.len();
        if raw.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "{} samples for a {n}x{n} grid",
                raw.len()
            )));
        }
        check_finite(&raw)?;
        let half = lit::<T>(0.5);
        let amp = mirrored(n, |i, j| (raw[i * n + j] + raw[j * n + i]) * half);
        Ok(Self { grid, amp, slots: None, factor: None })
    }

    /// Stores the array as given, without symmetrizing. Propagation rejects
    /// such data unless it happens to be symmetric.
    pub fn from_raw_unchecked(grid: Grid1D<T>, raw: Vec<Complex<T>>) -> Result<Self> {
        let n = grid.len();
        if raw.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "{} samples for a {n}x{n} grid",
                raw.len()
            )));
        }
        check_finite(&raw)?;
        Ok(Self { grid, amp: raw, slots: None, factor: None })
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn amp(&self) -> &[Complex<T>] {
        &self.amp
    }

    pub fn get(&self, i1: usize, i2: usize) -> Complex<T> {
        self.amp[i1 * self.grid.len() + i2]
    }

    /// The one-photon factor when the state is `Ψ(x1)Ψ(x2)`.
    pub fn factor(&self) -> Option<&Wavefunction1<T>> {
        self.factor.as_ref()
    }

    pub fn slot_values(&self) -> Option<&[Complex<T>]> {
        self.slots.as_deref()
    }

    fn slot_samples(&self) -> Vec<Complex<T>> {
        if let Some(s) = &self.slots {
            return s.clone();
        }
        let n = self.grid.len();
        let sl = self.grid.slots();
        let m = sl.len();
        let mut out = Vec::with_capacity(m * m);
        for p in &sl {
            for q in &sl {
                out.push(self.amp[p.index * n + q.index]);
            }
        }
        out
    }

    pub fn norm(&self) -> T {
        if let Some(f) = &self.factor {
            let n1 = f.norm();
            return n1 * n1;
        }
        let (w, v) = match &self.slots {
            Some(s) => (self.grid.slot_weights(), s.as_slice()),
            None => (self.grid.node_weights(), self.amp.as_slice()),
        };
        let m = w.len();
        let mut acc = T::zero();
        for p in 0..m {
            let mut row = T::zero();
            for q in 0..m {
                row = row + w[q] * v[p * m + q].norm_sqr();
            }
            acc = acc + w[p] * row;
        }
        acc
    }

    pub fn max_asymmetry(&self) -> T {
        let n = self.grid.len();
        let mut worst = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.amp[i * n + j] - self.amp[j * n + i]).norm());
            }
        }
        worst
    }

    /// Bilinear interpolation; `None` outside the grid.
    pub fn interpolate(&self, x1: T, x2: T) -> Option<Complex<T>> {
        let (i, f) = self.grid.locate(x1)?;
        let (j, g) = self.grid.locate(x2)?;
        let one = T::one();
        let v = self.get(i, j) * ((one - f) * (one - g))
            + self.get(i + 1, j) * (f * (one - g))
            + self.get(i, j + 1) * ((one - f) * g)
            + self.get(i + 1, j + 1) * (f * g);
        Some(v)
    }

    pub fn scaled(&self, alpha: Complex<T>) -> Self {
        // (αa)(αb) = α²ab, so a scaled product is no longer a product of the scaled factor.
        Self {
            grid: self.grid.clone(),
            amp: self.amp.iter().map(|v| v * alpha).collect(),
            slots: self.slots.as_ref().map(|s| s.iter().map(|v| v * alpha).collect()),
            factor: None,
        }
    }

    /// Pointwise sum on a shared grid.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::ShapeMismatch("adding wavefunctions on different grids".into()));
        }
        let amp = self.amp.iter().zip(&other.amp).map(|(a, b)| a + b).collect();
        let slots = if self.slots.is_some() || other.slots.is_some() {
            let (a, b) = (self.slot_samples(), other.slot_samples());
            Some(a.iter().zip(&b).map(|(a, b)| a + b).collect())
        } else {
            None
        };
        Ok(Self { grid: self.grid.clone(), amp, slots, factor: None })
    }
}
