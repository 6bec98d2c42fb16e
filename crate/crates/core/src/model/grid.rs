use crate::error::{Error, Result};
use crate::quadrature::segment_weights;
use crate::scalar::{from_usize, lit, Scalar};

/// Which one-sided limit to take at a tracked discontinuity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// Limit from smaller coordinates.
    Below,
    /// The point value under the closed-interval convention of the closed forms.
    At,
    /// Limit from larger coordinates.
    Above,
}

/// A quadrature sample position: a node, plus the side of a breakpoint it
/// represents when the node sits on one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Slot {
    pub index: usize,
    pub side: Side,
}

/// Uniform one-dimensional grid, optionally with nodes pinned to breakpoints.
///
/// Interior breakpoints split the grid into segments. Quadrature over a
/// segmented grid integrates each segment separately, so functions with
/// jumps at the breakpoints are integrated without jump error, provided the
/// caller supplies both one-sided limits (see [`Grid1D::slots`]).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D<T> {
    x_min: T,
    x_max: T,
    dx: T,
    points: Vec<T>,
    breaks: Vec<usize>,
}

impl<T: Scalar> Grid1D<T> {
    pub fn uniform(x_min: T, x_max: T, n: usize) -> Result<Self> {
        Self::validate(x_min, x_max, n)?;
        Ok(Self::build(x_min, x_max, n, &[]))
    }

    /// Builds a uniform grid on `[x_min, x_max]` whose nodes include every
    /// supplied breakpoint exactly.
    ///
    /// The point count is raised from `n` to the smallest count for which
    /// all breakpoints fall on nodes; fails if none exists below `16 n`.
    pub fn aligned(x_min: T, x_max: T, n: usize, breakpoints: &[T]) -> Result<Self> {
        Self::validate(x_min, x_max, n)?;
        let mut bps: Vec<T> = Vec::with_capacity(breakpoints.len());
        for &b in breakpoints {
            if !b.is_finite() {
                return Err(Error::NonFinite("breakpoint"));
            }
            if b < x_min || b > x_max {
                return Err(Error::InvalidGrid(format!(
                    "breakpoint {b} outside [{x_min}, {x_max}]"
                )));
            }
            bps.push(b);
        }
        let span = x_max - x_min;
        let tol_base = lit::<T>(1e-9).max(T::epsilon() * lit(64.0));
        let max_points = n.saturating_mul(16).max(n + 64);
        'search: for m in n..=max_points {
            let cells = from_usize::<T>(m - 1);
            let mut anchors = Vec::with_capacity(bps.len());
            for &b in &bps {
                let k = (b - x_min) / span * cells;
                let r = k.round();
                if (k - r).abs() > tol_base * T::one().max(r) {
                    continue 'search;
                }
                anchors.push((r.to_usize().unwrap_or(0), b));
            }
            return Ok(Self::build(x_min, x_max, m, &anchors));
        }
        let bad = bps.first().copied().unwrap_or(x_min);
        Err(Error::UnalignableBreakpoint {
            value: bad.to_f64().unwrap_or(f64::NAN),
            x_min: x_min.to_f64().unwrap_or(f64::NAN),
            x_max: x_max.to_f64().unwrap_or(f64::NAN),
            max_points,
        })
    }

    fn validate(x_min: T, x_max: T, n: usize) -> Result<()> {
        if !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::NonFinite("grid bounds"));
        }
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        if x_min >= x_max {
            return Err(Error::InvalidGrid(format!("x_min {x_min} >= x_max {x_max}")));
        }
        Ok(())
    }

    fn build(x_min: T, x_max: T, n: usize, pinned: &[(usize, T)]) -> Self {
        let dx = (x_max - x_min) / from_usize::<T>(n - 1);
        let mut anchors: Vec<(usize, T)> = vec![(0, x_min), (n - 1, x_max)];
        anchors.extend_from_slice(pinned);
        anchors.sort_by_key(|a| a.0);
        anchors.dedup_by_key(|a| a.0);

        // Each node is measured from its nearest anchor, so pinned values are exact.
        let mut points = Vec::with_capacity(n);
        let mut a = 0;
        for i in 0..n {
            while a + 1 < anchors.len() && anchors[a + 1].0 <= i {
                a += 1;
            }
            let (lo_i, lo_x) = anchors[a];
            let near = if a + 1 < anchors.len() && anchors[a + 1].0 - i < i - lo_i {
                anchors[a + 1]
            } else {
                (lo_i, lo_x)
            };
            let offset = if i >= near.0 {
                from_usize::<T>(i - near.0)
            } else {
                -from_usize::<T>(near.0 - i)
            };
            points.push(near.1 + offset * dx);
        }
        let breaks = anchors
            .iter()
            .map(|a| a.0)
            .filter(|&i| i > 0 && i < n - 1)
            .filter(|&i| pinned.iter().any(|p| p.0 == i))
            .collect();
        Self { x_min, x_max, dx, points, breaks }
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }
    pub fn x_max(&self) -> T {
        self.x_max
    }
    pub fn dx(&self) -> T {
        self.dx
    }
    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
    pub fn x(&self, i: usize) -> T {
        self.points[i]
    }
    pub fn points(&self) -> &[T] {
        &self.points
    }

    /// Indices of interior nodes pinned to breakpoints.
    pub fn breaks(&self) -> &[usize] {
        &self.breaks
    }

    /// The same nodes with breakpoint tracking dropped.
    pub fn without_breaks(&self) -> Self {
        Self { breaks: Vec::new(), ..self.clone() }
    }

    pub fn contains(&self, x: T) -> bool {
        let slack = self.dx * lit(1e-9);
        x >= self.x_min - slack && x <= self.x_max + slack
    }

    /// Index of the node equal to `x` (to within 1e-9 of a cell), if any.
    pub fn node_index(&self, x: T) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        let k = ((x - self.x_min) / self.dx).round();
        let i = k.to_usize()?.min(self.len() - 1);
        ((self.points[i] - x).abs() <= self.dx * lit(1e-9)).then_some(i)
    }

    /// Cell containing `x` and the fractional position inside it.
    pub fn locate(&self, x: T) -> Option<(usize, T)> {
        if !self.contains(x) {
            return None;
        }
        let n = self.len();
        let s = ((x - self.x_min) / self.dx).max(T::zero());
        let mut i = s.floor().to_usize().unwrap_or(0).min(n - 2);
        // Nodes are pinned to anchors, so correct a possible off-by-one.
        if x < self.points[i] && i > 0 {
            i -= 1;
        } else if x > self.points[i + 1] && i + 2 < n {
            i += 1;
        }
        let frac = ((x - self.points[i]) / (self.points[i + 1] - self.points[i]))
            .max(T::zero())
            .min(T::one());
        Some((i, frac))
    }

    /// Inclusive node ranges between consecutive interior breakpoints.
    pub fn segments(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.breaks.len() + 1);
        let mut start = 0;
        for &b in &self.breaks {
            out.push((start, b));
            start = b;
        }
        out.push((start, self.len() - 1));
        out
    }

    /// Quadrature sample positions: every node once, interior breakpoints
    /// twice (the limit from below closes one segment, the limit from above
    /// opens the next).
    pub fn slots(&self) -> Vec<Slot> {
        let mut out = Vec::with_capacity(self.len() + self.breaks.len());
        let segs = self.segments();
        let last = segs.len() - 1;
        for (s, &(a, b)) in segs.iter().enumerate() {
            for i in a..=b {
                let side = if i == a && s > 0 {
                    Side::Above
                } else if i == b && s < last {
                    Side::Below
                } else {
                    Side::At
                };
                out.push(Slot { index: i, side });
            }
        }
        out
    }

    /// Quadrature weights aligned with [`Grid1D::slots`].
    pub fn slot_weights(&self) -> Vec<T> {
        let mut out = Vec::with_capacity(self.len() + self.breaks.len());
        for (a, b) in self.segments() {
            out.extend(segment_weights::<T>(b - a + 1).into_iter().map(|w| w * self.dx));
        }
        out
    }

    /// Quadrature weights over the nodes, ignoring breakpoints.
    pub fn node_weights(&self) -> Vec<T> {
        segment_weights::<T>(self.len())
            .into_iter()
            .map(|w| w * self.dx)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_spacing() {
        let g = Grid1D::uniform(-1.0, 1.0, 5).unwrap();
        assert_eq!(g.points(), &[-1.0, -0.5, 0.0, 0.5, 1.0]);
        assert_eq!(g.dx(), 0.5);
        assert!(g.breaks().is_empty());
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid1D::uniform(0.0, 1.0, 1).is_err());
        assert!(Grid1D::uniform(1.0, 1.0, 4).is_err());
        assert!(Grid1D::uniform(f64::NAN, 1.0, 4).is_err());
    }

    #[test]
    fn breakpoints_land_on_nodes_exactly() {
        let g = Grid1D::aligned(-10.0, 20.0, 512, &[0.0, 20.0]).unwrap();
        assert_eq!(g.len(), 514);
        let i0 = g.node_index(0.0).unwrap();
        assert_eq!(g.x(i0), 0.0);
        assert_eq!(g.x(g.len() - 1), 20.0);
        assert_eq!(g.breaks(), &[i0]);

        let g = Grid1D::aligned(-3.7, 11.3, 200, &[0.0, 7.3]).unwrap();
        for b in [0.0, 7.3] {
            let i = g.node_index(b).unwrap();
            assert_eq!(g.x(i), b);
        }
        assert_eq!(g.breaks().len(), 2);
    }

    #[test]
    fn unalignable_breakpoint_is_rejected() {
        let irr = std::f64::consts::PI.sqrt() * 1e-3;
        assert!(matches!(
            Grid1D::aligned(0.0, 1.0, 3, &[irr]),
            Err(Error::UnalignableBreakpoint { .. })
        ));
    }

    #[test]
    fn slots_duplicate_interior_breakpoints() {
        let g = Grid1D::aligned(-1.0, 1.0, 5, &[0.0]).unwrap();
        let slots = g.slots();
        assert_eq!(slots.len(), 6);
        assert_eq!(slots[2], Slot { index: 2, side: Side::Below });
        assert_eq!(slots[3], Slot { index: 2, side: Side::Above });
        let w: f64 = g.slot_weights().iter().sum();
        assert!((w - 2.0).abs() < 1e-14);
    }

    #[test]
    fn locate_inside_cells() {
        let g = Grid1D::<f64>::uniform(0.0, 1.0, 11).unwrap();
        let (i, f) = g.locate(0.35).unwrap();
        assert_eq!(i, 3);
        assert!((f - 0.5).abs() < 1e-12);
        assert_eq!(g.locate(1.0).unwrap().0, 9);
        assert!(g.locate(1.5).is_none());
    }
}
