//! Composite quadrature weights on uniform nodes.
//!
//! Every weight vector returned here is for unit spacing; callers scale by
//! the grid step. Segments with six or more nodes use Gregory's end-corrected
//! trapezoid rule (exact for cubics), shorter segments fall back to the
//! closed Newton-Cotes rule of matching length.

use crate::scalar::{lit, Scalar};

/// Unit-spacing weights for `m` equally spaced nodes.
pub fn segment_weights<T: Scalar>(m: usize) -> Vec<T> {
    let w: Vec<f64> = match m {
        0 => Vec::new(),
        1 => vec![0.0],
        2 => vec![0.5, 0.5],
        3 => vec![1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0],
        4 => vec![3.0 / 8.0, 9.0 / 8.0, 9.0 / 8.0, 3.0 / 8.0],
        5 => vec![14.0 / 45.0, 64.0 / 45.0, 24.0 / 45.0, 64.0 / 45.0, 14.0 / 45.0],
        _ => {
            let mut w = vec![1.0; m];
            let ends = [3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0];
            for (k, &e) in ends.iter().enumerate() {
                w[k] = e;
                w[m - 1 - k] = e;
            }
            w
        }
    };
    w.into_iter().map(lit).collect()
}

/// Plain composite trapezoid weights for `m` nodes, unit spacing.
pub fn trapezoid_weights<T: Scalar>(m: usize) -> Vec<T> {
    let mut w = vec![T::one(); m];
    if m == 1 {
        w[0] = T::zero();
    } else if m > 1 {
        w[0] = lit(0.5);
        w[m - 1] = lit(0.5);
    }
    w
}
