//! Cutoff functions and their curvature-type constants.

use crate::error::{FlowError, Result};
use crate::geometry::{Dimension, RadialGrid};

/// Radial cutoff profiles with closed-form derivatives.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CutoffProfile {
    /// `φ = ψ^p` where `ψ` is 1 on `[0, r0 - 1]`, 0 from `r0` on, and a
    /// descending quintic smoothstep in between.
    SmoothstepPower { r0: f64, p: f64 },
    /// `φ = 1 / cosh(ε r)`.
    InverseCosh { epsilon: f64 },
}

impl CutoffProfile {
    /// `(φ, φ', φ'')` at radius `r`.
    pub fn derivatives(&self, r: f64) -> (f64, f64, f64) {
        match *self {
            Self::SmoothstepPower { r0, p } => {
                let s = r - (r0 - 1.0);
                if s <= 0.0 {
                    return (1.0, 0.0, 0.0);
                }
                if s >= 1.0 {
                    return (0.0, 0.0, 0.0);
                }
                let psi = 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
                let dpsi = -30.0 * s * s * (1.0 - s) * (1.0 - s);
                let d2psi = -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
                (
                    psi.powf(p),
                    p * psi.powf(p - 1.0) * dpsi,
                    p * (p - 1.0) * psi.powf(p - 2.0) * dpsi * dpsi + p * psi.powf(p - 1.0) * d2psi,
                )
            }
            Self::InverseCosh { epsilon } => {
                let x = epsilon * r;
                let phi = 1.0 / x.cosh();
                let d1 = -epsilon * x.tanh() * phi;
                let d2 = epsilon * epsilon * (x.sinh().powi(2) - 1.0) / x.cosh().powi(3);
                (phi, d1, d2)
            }
        }
    }

    /// Closed-form `Δφ = φ'' + (m-1) coth(r) φ'`, with `m φ''(0)` at the origin.
    pub fn laplacian(&self, r: f64, dim: Dimension) -> f64 {
        let (_, d1, d2) = self.derivatives(r);
        let m = dim.mf();
        if r == 0.0 {
            return m * d2;
        }
        if let Self::InverseCosh { epsilon } = *self {
            // keep tanh(εr)/tanh(r) well conditioned for small r
            let phi = 1.0 / (epsilon * r).cosh();
            let ratio = (epsilon * r).tanh() / r.tanh();
            return d2 - (m - 1.0) * epsilon * ratio * phi;
        }
        d2 + (m - 1.0) / r.tanh() * d1
    }
}

/// Grid supremum of `(m+2)/(4φ) |∇φ|² - Δφ` over `{φ > 0}`, which bounds the
/// growth of `u` under the flow when localized with `φ`.
pub fn cutoff_constant(profile: &CutoffProfile, grid: RadialGrid, dim: Dimension) -> Result<f64> {
    match *profile {
        CutoffProfile::SmoothstepPower { p, .. } if p < 2.0 => Err(FlowError::Config(format!(
            "power p = {p} < 2 makes |∇φ|²/φ unbounded"
        ))),
        CutoffProfile::SmoothstepPower { .. } => {
            let m = dim.mf();
            Ok(grid
                .nodes()
                .filter_map(|r| {
                    let (phi, d1, _) = profile.derivatives(r);
                    (phi > 0.0)
                        .then(|| (m + 2.0) / (4.0 * phi) * d1 * d1 - profile.laplacian(r, dim))
                })
                .fold(0.0, f64::max))
        }
        CutoffProfile::InverseCosh { .. } => Err(FlowError::Config(
            "the cutoff constant is defined for smoothstep-power profiles".into(),
        )),
    }
}

/// Grid suprema of `|∇φ|² - ε² φ²` and `-Δφ - (ε² + (m-1)ε) φ` for
/// `φ = 1/cosh(ε r)`.
pub fn inverse_cosh_violations(
    epsilon: f64,
    grid: RadialGrid,
    dim: Dimension,
) -> Result<(f64, f64)> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(FlowError::Precondition(format!(
            "epsilon = {epsilon} must lie in (0, 1/2)"
        )));
    }
    let profile = CutoffProfile::InverseCosh { epsilon };
    let m = dim.mf();
    let mut gradient = f64::NEG_INFINITY;
    let mut laplacian = f64::NEG_INFINITY;
    for r in grid.nodes() {
        let (phi, d1, _) = profile.derivatives(r);
        gradient = gradient.max(d1 * d1 - epsilon * epsilon * phi * phi);
        let bound = (epsilon * epsilon + (m - 1.0) * epsilon) * phi;
        laplacian = laplacian.max(-profile.laplacian(r, dim) - bound);
    }
    Ok((gradient, laplacian))
}
