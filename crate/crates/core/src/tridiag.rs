//! Thomas algorithm for tridiagonal systems.

use crate::error::{FlowError, Result};

/// Solves `A x = rhs` in place for tridiagonal `A`.
///
/// `lower[i]` multiplies `x[i-1]` in row `i` (`lower[0]` is ignored),
/// `upper[i]` multiplies `x[i+1]` (the last entry is ignored).
pub fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &mut [f64],
) -> Result<()> {
    let n = rhs.len();
    if n == 0 || diag.len() != n || lower.len() != n || upper.len() != n {
        return Err(FlowError::Numerical(format!(
            "tridiagonal system with mismatched sizes {}/{}/{}/{}",
            lower.len(),
            diag.len(),
            upper.len(),
            n
        )));
    }
    let mut c = vec![0.0; n];
    let mut pivot = diag[0];
    if pivot == 0.0 || !pivot.is_finite() {
        return Err(FlowError::Numerical(
            "singular tridiagonal system at row 0".into(),
        ));
    }
    c[0] = upper[0] / pivot;
    rhs[0] /= pivot;
    for i in 1..n {
        pivot = diag[i] - lower[i] * c[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(FlowError::Numerical(format!(
                "singular tridiagonal system at row {i}"
            )));
        }
        c[i] = upper[i] / pivot;
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / pivot;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= c[i] * rhs[i + 1];
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_poisson_matrix() {
        // [-1 2 -1] with known solution
        let n = 20;
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin() + 2.0).collect();
        let lower = vec![-1.0; n];
        let diag = vec![2.0; n];
        let upper = vec![-1.0; n];
        let mut rhs: Vec<f64> = (0..n)
            .map(|i| {
                let left = if i > 0 { -x[i - 1] } else { 0.0 };
                let right = if i + 1 < n { -x[i + 1] } else { 0.0 };
                left + 2.0 * x[i] + right
            })
            .collect();
        solve_tridiagonal(&lower, &diag, &upper, &mut rhs).unwrap();
        for (a, b) in rhs.iter().zip(&x) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_pivot_is_reported() {
        let mut rhs = vec![1.0, 1.0];
        let err = solve_tridiagonal(&[0.0, 1.0], &[1.0, 1.0], &[1.0, 0.0], &mut rhs);
        assert!(matches!(err, Err(FlowError::Numerical(_))));
    }
}
