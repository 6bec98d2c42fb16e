use num_complex::Complex;

use super::grid::Grid1D;
use super::wavefunction::{Wavefunction1, Wavefunction2};
use super::PhysicalParams;
use crate::error::{Error, Result};
use crate::scalar::{czero, lit, Scalar};

/// One-photon state in the lab frame: field amplitude on a cell-centred
/// grid in `r` (atom at `r = 0`) plus the atomic excitation amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct LabState1<T> {
    pub t: T,
    grid: Grid1D<T>,
    field: Vec<Complex<T>>,
    pub excited: Complex<T>,
}

impl<T: Scalar> LabState1<T> {
    pub fn new(t: T, grid: Grid1D<T>, field: Vec<Complex<T>>, excited: Complex<T>) -> Result<Self> {
        if field.len() != grid.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} field samples on a {}-cell grid",
                field.len(),
                grid.len()
            )));
        }
        Ok(Self { t, grid, field, excited })
    }

    /// Lab field `ψ(r, t) = Ψ(r - c t)` for a moving-frame amplitude `Ψ`,
    /// with the atom in its ground state.
    pub fn from_moving_frame(
        grid: Grid1D<T>,
        t: T,
        params: &PhysicalParams<T>,
        psi: impl Fn(T) -> Complex<T>,
    ) -> Self {
        let ct = params.c() * t;
        let field = grid.points().iter().map(|&r| psi(r - ct)).collect();
        Self { t, grid, field, excited: czero() }
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn field(&self) -> &[Complex<T>] {
        &self.field
    }

    /// `∫|ψ|²dr + |Ψ(E)|²`, field integrated cell by cell.
    pub fn total_norm(&self) -> T {
        let dx = self.grid.dx();
        let f = self.field.iter().fold(T::zero(), |a, v| a + v.norm_sqr());
        f * dx + self.excited.norm_sqr()
    }

    /// The field re-expressed in moving-frame coordinates `x = r - c t`.
    pub fn to_moving_frame(&self, params: &PhysicalParams<T>) -> Result<Wavefunction1<T>> {
        let ct = params.c() * self.t;
        let g = Grid1D::uniform(
            self.grid.x_min() - ct,
            self.grid.x_max() - ct,
            self.grid.len(),
        )?;
        Wavefunction1::sampled(g, self.field.clone())
    }
}

/// Two-photon state in the lab frame.
///
/// `field2` is the symmetric amplitude `φ(r1, r2)` (row-major, `r1` rows);
/// `excited1[j]` is the amplitude for "atom excited, one photon in cell j".
/// There is deliberately no doubly-excited amplitude: a two-level atom
/// cannot hold two excitations.
#[derive(Debug, Clone, PartialEq)]
pub struct LabState2<T> {
    pub t: T,
    grid: Grid1D<T>,
    field2: Vec<Complex<T>>,
    excited1: Vec<Complex<T>>,
}

impl<T: Scalar> LabState2<T> {
    pub fn new(
        t: T,
        grid: Grid1D<T>,
        field2: Vec<Complex<T>>,
        excited1: Vec<Complex<T>>,
    ) -> Result<Self> {
        let n = grid.len();
        if field2.len() != n * n || excited1.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "two-photon state on a {n}-cell grid needs {} field and {n} excitation samples",
                n * n
            )));
        }
        Ok(Self { t, grid, field2, excited1 })
    }

    /// Lab field `φ(r1, r2, t) = Ψ(r1 - c t, r2 - c t)`, atom in the ground state.
    pub fn from_moving_frame(
        grid: Grid1D<T>,
        t: T,
        params: &PhysicalParams<T>,
        psi: impl Fn(T, T) -> Complex<T>,
    ) -> Self {
        let ct = params.c() * t;
        let n = grid.len();
        let mut field2 = vec![czero(); n * n];
        for i in 0..n {
            for j in i..n {
                let v = psi(grid.x(i) - ct, grid.x(j) - ct);
                field2[i * n + j] = v;
                field2[j * n + i] = v;
            }
        }
        Self { t, excited1: vec![czero(); n], grid, field2 }
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn field2(&self) -> &[Complex<T>] {
        &self.field2
    }

    pub fn excited1(&self) -> &[Complex<T>] {
        &self.excited1
    }

    /// `∫∫|φ|² + 2∫|e|²`; the factor 2 counts both photon labels of `e`.
    pub fn total_norm(&self) -> T {
        let dx = self.grid.dx();
        let f = self.field2.iter().fold(T::zero(), |a, v| a + v.norm_sqr());
        let e = self.excited1.iter().fold(T::zero(), |a, v| a + v.norm_sqr());
        f * dx * dx + lit::<T>(2.0) * e * dx
    }

    pub fn max_asymmetry(&self) -> T {
        let n = self.grid.len();
        let mut worst = T::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.field2[i * n + j] - self.field2[j * n + i]).norm());
            }
        }
        worst
    }

    pub fn to_moving_frame(&self, params: &PhysicalParams<T>) -> Result<Wavefunction2<T>> {
        let ct = params.c() * self.t;
        let g = Grid1D::uniform(
            self.grid.x_min() - ct,
            self.grid.x_max() - ct,
            self.grid.len(),
        )?;
        Wavefunction2::from_raw_unchecked(g, self.field2.clone())
    }
}
