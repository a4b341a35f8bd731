//! Dense complex LU with partial pivoting.
//!
//! Desk-scale systems only (a few hundred unknowns from the Birkhoff
//! truncation and small least-squares normal equations); no blocking or
//! structure exploitation.

use alloc::vec::Vec;

use crate::mat2::C64;

#[cfg(not(feature = "std"))]
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone, Copy)]
pub(crate) struct LuReport {
    pub min_pivot: f64,
    pub max_pivot: f64,
}

impl LuReport {
    /// Pivot-ratio proxy for the condition number.
    pub fn condition_proxy(&self) -> f64 {
        if self.min_pivot == 0.0 {
            f64::INFINITY
        } else {
            self.max_pivot / self.min_pivot
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct SingularMatrix;

/// Solve `a x = b` in place for `nrhs` right-hand sides.
///
/// `a` is n×n row-major and is destroyed; `rhs` holds the right-hand sides
/// row-major (`rhs[row * nrhs + col]`) and is overwritten with the solution.
pub(crate) fn solve_dense(
    a: &mut [C64],
    n: usize,
    rhs: &mut [C64],
    nrhs: usize,
) -> Result<LuReport, SingularMatrix> {
    debug_assert_eq!(a.len(), n * n);
    debug_assert_eq!(rhs.len(), n * nrhs);

    let scale = a.iter().map(|x| x.norm()).fold(0.0f64, f64::max);
    let tiny = f64::EPSILON * scale.max(1e-300) * n as f64;

    let mut min_pivot = f64::INFINITY;
    let mut max_pivot = 0.0f64;

    for col in 0..n {
        // Partial pivot.
        let mut best = col;
        let mut best_abs = a[col * n + col].norm();
        for row in (col + 1)..n {
            let v = a[row * n + col].norm();
            if v > best_abs {
                best = row;
                best_abs = v;
            }
        }
        if best_abs <= tiny {
            return Err(SingularMatrix);
        }
        if best != col {
            for j in 0..n {
                a.swap(col * n + j, best * n + j);
            }
            for j in 0..nrhs {
                rhs.swap(col * nrhs + j, best * nrhs + j);
            }
        }
        min_pivot = min_pivot.min(best_abs);
        max_pivot = max_pivot.max(best_abs);

        let pivot_inv = a[col * n + col].inv();
        for row in (col + 1)..n {
            let factor = a[row * n + col] * pivot_inv;
            if factor.norm() == 0.0 {
                continue;
            }
            a[row * n + col] = C64::new(0.0, 0.0);
            for j in (col + 1)..n {
                let v = a[col * n + j];
                a[row * n + j] -= factor * v;
            }
            for j in 0..nrhs {
                let v = rhs[col * nrhs + j];
                rhs[row * nrhs + j] -= factor * v;
            }
        }
    }

    // Back substitution.
    for col in (0..n).rev() {
        let pivot_inv = a[col * n + col].inv();
        for j in 0..nrhs {
            let mut s = rhs[col * nrhs + j];
            for k in (col + 1)..n {
                s -= a[col * n + k] * rhs[k * nrhs + j];
            }
            rhs[col * nrhs + j] = s * pivot_inv;
        }
    }

    Ok(LuReport { min_pivot, max_pivot })
}

/// Least squares via normal equations, for small fits:
/// minimizes ‖M x - y‖₂ with `M` (rows × cols) row-major.
pub(crate) fn lstsq(
    m: &[C64],
    rows: usize,
    cols: usize,
    y: &[C64],
) -> Result<Vec<C64>, SingularMatrix> {
    debug_assert_eq!(m.len(), rows * cols);
    debug_assert_eq!(y.len(), rows);
    let mut a = alloc::vec![C64::new(0.0, 0.0); cols * cols];
    let mut b = alloc::vec![C64::new(0.0, 0.0); cols];
    for i in 0..cols {
        for j in 0..cols {
            let mut s = C64::new(0.0, 0.0);
            for r in 0..rows {
                s += m[r * cols + i].conj() * m[r * cols + j];
            }
            a[i * cols + j] = s;
        }
        let mut s = C64::new(0.0, 0.0);
        for r in 0..rows {
            s += m[r * cols + i].conj() * y[r];
        }
        b[i] = s;
    }
    solve_dense(&mut a, cols, &mut b, 1)?;
    Ok(b)
}
