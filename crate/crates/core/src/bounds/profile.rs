//! The profile `f(r) = (1 - r²)²` on the unit interval and the constant
//! `λ(a, c)` with `f'' + (c/r) f' >= -λ f^{1+a}`.
//!
//! Substituting `x = 1/(1 - r²)` turns the inequality into `y(x) >= -λ` for
//! `y(x) = 8 x^{2+2a} - 4(3 + c) x^{1+2a}` on `[1, ∞)`, whose minimum sits at
//! the critical point `x* = (3 + c)(1 + 2a) / (4(1 + a))` or at `x = 1`.

use crate::geometry::Dimension;

/// `y(x) = 8 x^{2+2a} - 4 (3 + c) x^{1+2a}`.
pub fn profile_polynomial(a: f64, c: f64, x: f64) -> f64 {
    x.powf(1.0 + 2.0 * a) * (8.0 * x - 4.0 * (3.0 + c))
}

/// Critical point of [`profile_polynomial`] on `(0, ∞)`.
pub fn profile_critical_point(a: f64, c: f64) -> f64 {
    (3.0 + c) * (1.0 + 2.0 * a) / (4.0 * (1.0 + a))
}

/// Smallest admissible `λ = -min_{x >= 1} y(x)`. Always positive for
/// `a, c > 0`.
pub fn profile_lambda(a: f64, c: f64) -> f64 {
    let x_star = profile_critical_point(a, c);
    if x_star <= 1.0 {
        4.0 * (1.0 + c)
    } else {
        -profile_polynomial(a, c, x_star)
    }
}

/// `f, f', f''` of the profile `(1 - r²)²`.
pub fn profile_derivatives(r: f64) -> (f64, f64, f64) {
    let s = 1.0 - r * r;
    (s * s, -4.0 * r * s, -4.0 + 12.0 * r * r)
}

/// Largest value of `-λ f^{1+a} - f'' - (c/r) f'` over the `nodes` interior
/// points `r_i = i / (nodes + 1)` of `(0, 1)`. Nonpositive whenever
/// `lambda >= profile_lambda(a, c)`.
pub fn profile_inequality_violation(a: f64, c: f64, lambda: f64, nodes: usize) -> f64 {
    let step = 1.0 / (nodes as f64 + 1.0);
    (1..=nodes)
        .map(|i| {
            let r = i as f64 * step;
            let (f, df, d2f) = profile_derivatives(r);
            -lambda * f.powf(1.0 + a) - d2f - c / r * df
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Rate `C_m = (m - 1) λ / η` of the local lower bound
/// `u(·, t) >= inf u(·, 0) - C_m t`, with `λ = λ(1/η, (m-1)/tanh 1)`.
pub fn lower_bound_rate(dim: Dimension) -> f64 {
    let eta = dim.eta();
    let m = dim.mf();
    (m - 1.0) / eta * profile_lambda(1.0 / eta, (m - 1.0) / 1f64.tanh())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Dense scan of `-min y` over `[1, x_max]`.
    fn scanned_lambda(a: f64, c: f64, x_max: f64) -> f64 {
        let n = 200_000;
        (0..=n)
            .map(|i| 1.0 + (x_max - 1.0) * i as f64 / n as f64)
            .map(|x| -profile_polynomial(a, c, x))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    #[test]
    fn reference_lambda() {
        assert_relative_eq!(
            profile_lambda(1.0, 2.0),
            16875.0 / 512.0,
            max_relative = 1e-15
        );
        assert_eq!(profile_critical_point(1.0, 2.0), 15.0 / 8.0);
        assert!(profile_lambda(1.0, 2.0) <= 33.0);
    }

    #[test]
    fn endpoint_regime() {
        assert!(profile_critical_point(0.1, 0.1) <= 1.0);
        assert_relative_eq!(profile_lambda(0.1, 0.1), 4.4, max_relative = 1e-15);
    }

    #[test]
    fn closed_form_matches_scan() {
        for &(a, c) in &[
            (1.0, 2.0),
            (4.0, 2.0 / 1f64.tanh()),
            (2.0, 3.0 / 1f64.tanh()),
            (0.5, 0.3),
        ] {
            let scan = scanned_lambda(a, c, 100.0);
            let exact = profile_lambda(a, c);
            assert!(exact >= scan);
            assert_relative_eq!(exact, scan, max_relative = 1e-6);
        }
    }

    #[test]
    fn lambda_increases_with_drift() {
        for a in [0.5, 1.0, 4.0] {
            let values: Vec<f64> = (1..20)
                .map(|i| scanned_lambda(a, 0.25 * i as f64, 100.0))
                .collect();
            assert!(values.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn figure_parameters() {
        assert!(profile_inequality_violation(1.0, 2.0, 33.0, 10_000) <= 1e-10);
        assert!(profile_inequality_violation(1.0, 2.0, 30.0, 10_000) > 0.0);
    }

    #[test]
    fn boundary_is_never_violated() {
        // at r -> 1: f'' + c f' -> 8 > 0 = -λ f^{1+a}
        let r = 1.0 - 1e-9;
        let (f, df, d2f) = profile_derivatives(r);
        assert!(-33.0 * f.powi(2) - d2f - 2.0 / r * df < 0.0);
    }

    #[test]
    fn lower_bound_rates() {
        let c3 = lower_bound_rate(Dimension::new(3).unwrap());
        assert_relative_eq!(
            c3,
            8.0 * profile_lambda(4.0, 2.0 / 1f64.tanh()),
            max_relative = 1e-15
        );
        assert!(c3 > 7.0e4 && c3 < 8.0e4, "{c3}");
        let c4 = lower_bound_rate(Dimension::new(4).unwrap());
        assert_relative_eq!(
            c4,
            6.0 * profile_lambda(2.0, 3.0 / 1f64.tanh()),
            max_relative = 1e-15
        );
        for m in 3..12 {
            assert!(lower_bound_rate(Dimension::new(m).unwrap()) > 0.0);
        }
    }
}
