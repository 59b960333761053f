use crate::error::{Error, Result};
use crate::model::C64;

const PIVOT_FLOOR: f64 = 1e-300;

/// Thomas elimination for a complex tridiagonal system.
///
/// `lower[i]` couples row `i` to `i - 1` (`lower[0]` is ignored), `upper[i]`
/// couples row `i` to `i + 1` (the last entry is ignored). `diag` and `rhs`
/// are used as scratch space and `rhs` holds the solution on return.
pub fn solve_in_place(lower: &[C64], diag: &mut [C64], upper: &[C64], rhs: &mut [C64]) -> Result<()> {
    let n = diag.len();
    for (len, _) in [(lower.len(), "lower"), (upper.len(), "upper"), (rhs.len(), "rhs")] {
        if len != n {
            return Err(Error::LengthMismatch { expected: n, found: len });
        }
    }
    if n == 0 {
        return Ok(());
    }
    check_pivot(0, diag[0])?;
    for i in 1..n {
        let w = lower[i] / diag[i - 1];
        diag[i] -= w * upper[i - 1];
        rhs[i] -= w * rhs[i - 1];
        check_pivot(i, diag[i])?;
    }
    rhs[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
    }
    Ok(())
}

fn check_pivot(row: usize, p: C64) -> Result<()> {
    let modulus = p.norm();
    if modulus.is_nan() || modulus < PIVOT_FLOOR {
        return Err(Error::SingularPivot { row, modulus });
    }
    Ok(())
}
