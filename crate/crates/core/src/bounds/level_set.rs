//! Integral of the Laplacian over a positivity set.
//!
//! For `f <= 0` on the boundary of a ball, `∫_{f > 0} Δf dμ` is a sum of
//! boundary fluxes `⟨∇f, ν⟩` across level sets where `f` decreases outward,
//! hence nonpositive.

use crate::error::{FlowError, Result};
use crate::geometry::{
    laplacian_radial, trapezoid_clipped, volume_density, Dimension, RadialField,
};

/// Intervals of `{f > 0}` with linearly interpolated end points.
pub fn positivity_intervals(f: &RadialField) -> Vec<(f64, f64)> {
    let grid = f.grid();
    let v = f.values();
    let h = grid.h();
    let mut out = Vec::new();
    let mut start = if v[0] > 0.0 { Some(0.0) } else { None };
    for i in 0..grid.n() {
        let (a, b) = (v[i], v[i + 1]);
        let crossing = || grid.node(i) + h * a / (a - b);
        match (a > 0.0, b > 0.0) {
            (false, true) => start = Some(if a == 0.0 { grid.node(i) } else { crossing() }),
            (true, false) => {
                let end = if b == 0.0 {
                    grid.node(i + 1)
                } else {
                    crossing()
                };
                out.push((start.take().expect("interval opened"), end));
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, grid.r_max()));
    }
    out
}

/// `∫_{f > 0} Δf dμ` with the discrete Laplacian, integrated over the
/// interpolated positivity set.
pub fn positive_set_laplacian_integral(f: &RadialField, dim: Dimension) -> Result<f64> {
    let outer = *f.values().last().expect("nonempty field");
    if outer > 0.0 {
        return Err(FlowError::Precondition(format!(
            "f must be nonpositive at the outer node, got {outer}"
        )));
    }
    let grid = *f.grid();
    let lap = laplacian_radial(f, dim);
    let density: Vec<f64> = lap
        .values()
        .iter()
        .enumerate()
        .map(|(i, l)| l * volume_density(grid.node(i), dim))
        .collect();
    let total: f64 = positivity_intervals(f)
        .into_iter()
        .map(|(a, b)| trapezoid_clipped(&grid, &density, a, b))
        .sum();
    Ok(dim.sphere_area() * total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::RadialGrid;

    fn dim3() -> Dimension {
        Dimension::new(3).unwrap()
    }

    #[test]
    fn empty_positive_set() {
        let g = RadialGrid::new(2.0, 100).unwrap();
        let f = RadialField::constant(g, -1.0).unwrap();
        assert!(positivity_intervals(&f).is_empty());
        assert_eq!(positive_set_laplacian_integral(&f, dim3()).unwrap(), 0.0);
    }

    #[test]
    fn central_bump_has_negative_integral() {
        let g = RadialGrid::new(1.2, 480).unwrap();
        let f = RadialField::from_fn(g, |r| (1.0 - r * r).powi(2) - 0.5).unwrap();
        let iv = positivity_intervals(&f);
        assert_eq!(iv.len(), 1);
        let exact_edge = (1.0 - 0.5f64.sqrt()).sqrt();
        assert!((iv[0].1 - exact_edge).abs() < 1e-4);
        // flux oracle: ω sinh²(ρ) f'(ρ) at the level set ρ
        let df = -4.0 * exact_edge * (1.0 - exact_edge * exact_edge);
        let flux = 4.0 * std::f64::consts::PI * exact_edge.sinh().powi(2) * df;
        let got = positive_set_laplacian_integral(&f, dim3()).unwrap();
        assert!(got < 0.0);
        assert!((got - flux).abs() < 1e-3 * flux.abs(), "{got} vs {flux}");
    }

    #[test]
    fn two_bumps() {
        let g = RadialGrid::new(4.0, 800).unwrap();
        let f = RadialField::from_fn(g, |r| {
            (-(r - 0.8f64).powi(2) / 0.05).exp() + (-(r - 2.5f64).powi(2) / 0.1).exp() - 0.3
        })
        .unwrap();
        assert_eq!(positivity_intervals(&f).len(), 2);
        assert!(positive_set_laplacian_integral(&f, dim3()).unwrap() <= 1e-3);
    }

    #[test]
    fn positive_boundary_is_rejected() {
        let g = RadialGrid::new(1.0, 10).unwrap();
        let f = RadialField::constant(g, 1.0).unwrap();
        assert!(matches!(
            positive_set_laplacian_integral(&f, dim3()),
            Err(FlowError::Precondition(_))
        ));
    }
}
