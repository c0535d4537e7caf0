//! Dense solve for the small Newton systems of the implicit integrators.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Solves `A x = b` in place (`a` row-major `n × n`, overwritten; `b` becomes `x`)
/// by Gaussian elimination with partial pivoting.
pub fn solve_in_place<T: Real>(a: &mut [T], b: &mut [T], n: usize) -> Result<()> {
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| {
                a[i * n + col].abs().partial_cmp(&a[j * n + col].abs()).unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(col);
        if a[piv * n + col] == T::zero() || !a[piv * n + col].is_finite() {
            return Err(Error::Evaluation("singular Newton matrix".into()));
        }
        if piv != col {
            for k in 0..n {
                a.swap(col * n + k, piv * n + k);
            }
            b.swap(col, piv);
        }
        let d = a[col * n + col];
        for i in col + 1..n {
            let f = a[i * n + col] / d;
            if f == T::zero() {
                continue;
            }
            for k in col..n {
                a[i * n + k] = a[i * n + k] - f * a[col * n + k];
            }
            b[i] = b[i] - f * b[col];
        }
    }
    for i in (0..n).rev() {
        let mut acc = b[i];
        for k in i + 1..n {
            acc = acc - a[i * n + k] * b[k];
        }
        b[i] = acc / a[i * n + i];
    }
    Ok(())
}
