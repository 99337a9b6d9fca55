//! Conformal factors `g = u g_H` and their derived quantities.

use crate::error::{FlowError, Result};
use crate::geometry::{laplacian_radial, Dimension, RadialField, RadialGrid};

fn check_positive(field: &RadialField, what: &str) -> Result<()> {
    match field.values().iter().position(|&v| v <= 0.0) {
        Some(i) => Err(FlowError::Domain(format!(
            "{what} must be positive, node {i} has {}",
            field.values()[i]
        ))),
        None => Ok(()),
    }
}

/// Positive conformal factor `u` of a metric `g = u g_H`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalFactor(RadialField);

impl ConformalFactor {
    pub fn new(u: RadialField) -> Result<Self> {
        check_positive(&u, "conformal factor")?;
        Ok(Self(u))
    }

    pub fn constant(grid: RadialGrid, c: f64) -> Result<Self> {
        Self::new(RadialField::constant(grid, c)?)
    }

    pub fn field(&self) -> &RadialField {
        &self.0
    }

    pub fn into_field(self) -> RadialField {
        self.0
    }

    pub fn grid(&self) -> &RadialGrid {
        self.0.grid()
    }

    pub fn values(&self) -> &[f64] {
        self.0.values()
    }
}

/// Pressure `v = 1/u`.
#[derive(Clone, Debug, PartialEq)]
pub struct Pressure(RadialField);

impl Pressure {
    pub fn new(v: RadialField) -> Result<Self> {
        check_positive(&v, "pressure")?;
        Ok(Self(v))
    }

    pub fn field(&self) -> &RadialField {
        &self.0
    }

    pub fn values(&self) -> &[f64] {
        self.0.values()
    }

    /// The conformal factor `u = 1/v` this pressure belongs to.
    pub fn to_factor(&self) -> ConformalFactor {
        ConformalFactor(RadialField::from_raw(
            *self.0.grid(),
            self.0.values().iter().map(|v| 1.0 / v).collect(),
        ))
    }
}

/// `U = u^η`.
pub fn to_u_power(u: &ConformalFactor, dim: Dimension) -> RadialField {
    let eta = dim.eta();
    RadialField::from_raw(*u.grid(), u.values().iter().map(|v| v.powf(eta)).collect())
}

/// Inverse of [`to_u_power`]: `u = U^{1/η}`.
pub fn from_u_power(big_u: &RadialField, dim: Dimension) -> Result<ConformalFactor> {
    check_positive(big_u, "U")?;
    let inv = 1.0 / dim.eta();
    ConformalFactor::new(big_u.map(|v| v.powf(inv))?)
}

/// Scalar curvature of `g = u g_H`, computed from `U = u^η` as
/// `U^{-(m+2)/(m-2)} (R_H U - 4 (m-1)/(m-2) ΔU)`.
pub fn scalar_curvature(u: &ConformalFactor, dim: Dimension) -> RadialField {
    let big_u = to_u_power(u, dim);
    let lap = laplacian_radial(&big_u, dim);
    let m = dim.mf();
    let r_h = dim.background_curvature();
    let exponent = -(m + 2.0) / (m - 2.0);
    let coef = 4.0 * (m - 1.0) / (m - 2.0);
    let values = big_u
        .values()
        .iter()
        .zip(lap.values())
        .map(|(&uu, &l)| uu.powf(exponent) * (r_h * uu - coef * l))
        .collect();
    RadialField::from_raw(*u.grid(), values)
}

pub fn pressure(u: &ConformalFactor) -> Pressure {
    Pressure(RadialField::from_raw(
        *u.grid(),
        u.values().iter().map(|v| 1.0 / v).collect(),
    ))
}

/// Conformal factor of the flat metric in the Poincaré ball model,
/// `u(r) = sech^4(r/2) / 4`.
pub fn euclidean_factor(grid: RadialGrid) -> ConformalFactor {
    let values = grid
        .nodes()
        .map(|r| 0.25 * (0.5 * r).cosh().powi(-4))
        .collect();
    ConformalFactor(RadialField::from_raw(grid, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn dim(m: u32) -> Dimension {
        Dimension::new(m).unwrap()
    }

    fn grid() -> RadialGrid {
        RadialGrid::new(4.0, 200).unwrap()
    }

    #[test]
    fn power_map_examples() {
        let d = dim(3);
        let one = ConformalFactor::constant(grid(), 1.0).unwrap();
        assert!(to_u_power(&one, d).values().iter().all(|&v| v == 1.0));
        let sixteen = ConformalFactor::constant(grid(), 16.0).unwrap();
        for &v in to_u_power(&sixteen, d).values() {
            assert_relative_eq!(v, 2.0, max_relative = 1e-15);
        }
        let two = RadialField::constant(grid(), 2.0).unwrap();
        for &v in from_u_power(&two, d).unwrap().values() {
            assert_relative_eq!(v, 16.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn nonpositive_inputs_are_domain_errors() {
        let bad = RadialField::from_fn(grid(), |r| 1.0 - r).unwrap();
        assert!(matches!(
            ConformalFactor::new(bad.clone()),
            Err(FlowError::Domain(_))
        ));
        assert!(matches!(
            from_u_power(&bad, dim(3)),
            Err(FlowError::Domain(_))
        ));
        assert!(Pressure::new(bad).is_err());
    }

    #[test]
    fn hyperbolic_metric_has_curvature_minus_six() {
        let one = ConformalFactor::constant(grid(), 1.0).unwrap();
        for &r in scalar_curvature(&one, dim(3)).values() {
            assert_relative_eq!(r, -6.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn constant_factor_scales_curvature() {
        for m in [3, 4, 5, 6, 10] {
            for c in [0.1, 1.0, 3.5, 40.0] {
                let u = ConformalFactor::constant(grid(), c).unwrap();
                let expected = -f64::from(m * (m - 1)) / c;
                for &r in scalar_curvature(&u, dim(m)).values() {
                    assert_relative_eq!(r, expected, max_relative = 1e-12);
                }
            }
        }
    }

    #[test]
    fn euclidean_factor_profile() {
        let u = euclidean_factor(grid());
        assert_eq!(u.values()[0], 0.25);
        assert!(u.values().windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn euclidean_metric_is_flat() {
        let interior_max = |n: usize| {
            let g = RadialGrid::new(4.0, n).unwrap();
            let r = scalar_curvature(&euclidean_factor(g), dim(3));
            r.max_within(3.0).abs().max(r.min_within(3.0).abs())
        };
        let (e1, e2) = (interior_max(100), interior_max(200));
        assert!(e1 < 0.05, "{e1}");
        assert!(e1 / e2 > 3.5, "ratio {}", e1 / e2);
    }

    #[test]
    fn pressure_examples() {
        let one = ConformalFactor::constant(grid(), 1.0).unwrap();
        assert!(pressure(&one).values().iter().all(|&v| v == 1.0));
        let seven = ConformalFactor::constant(grid(), 7.0).unwrap();
        for &v in pressure(&seven).values() {
            assert_relative_eq!(v, 1.0 / 7.0, max_relative = 1e-15);
        }
        let u = euclidean_factor(grid());
        let back = pressure(&u).to_factor();
        for (a, b) in back.values().iter().zip(u.values()) {
            assert_relative_eq!(a, b, max_relative = 1e-15);
        }
    }
}
