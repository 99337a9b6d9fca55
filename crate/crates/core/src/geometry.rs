//! Radial calculus on hyperbolic space.
//!
//! Everything in this crate is rotationally symmetric about a fixed origin,
//! so a scalar function on `H^m` is a function of the geodesic radius `r`
//! only. In these coordinates the metric is `dr^2 + sinh^2(r) g_S`, which
//! gives
//!
//! ```text
//! Δf   = f'' + (m - 1) coth(r) f'
//! |∇f| = |f'|
//! dμ   = ω_{m-1} sinh^{m-1}(r) dr
//! ```
//!
//! where `ω_{m-1}` is the area of the unit `(m-1)`-sphere. The operators here
//! are second-order finite differences on a uniform grid in `r`. At the
//! origin a radial function is extended evenly, `f(-h) = f(h)`, which turns
//! the `coth(r) f'` term into its smooth limit `f''(0)`.

use std::f64::consts::PI;

use crate::error::{FlowError, Result};

/// Dimension `m >= 3` of the ambient hyperbolic space.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Dimension {
    m: u32,
}

impl Dimension {
    pub fn new(m: u32) -> Result<Self> {
        if m < 3 {
            return Err(FlowError::Config(format!(
                "dimension m = {m} must be at least 3"
            )));
        }
        Ok(Self { m })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `m` as a float.
    pub fn mf(&self) -> f64 {
        f64::from(self.m)
    }

    /// The exponent `η = (m - 2) / 4`. Exact in binary floating point.
    pub fn eta(&self) -> f64 {
        (self.mf() - 2.0) / 4.0
    }

    /// `m (m - 1)`, the growth rate of the pure scaling solution.
    pub fn growth_rate(&self) -> f64 {
        self.mf() * (self.mf() - 1.0)
    }

    /// Scalar curvature `-m (m - 1)` of the hyperbolic metric.
    pub fn background_curvature(&self) -> f64 {
        -self.growth_rate()
    }

    /// Area `ω_{m-1}` of the unit sphere `S^{m-1} ⊂ R^m`.
    pub fn sphere_area(&self) -> f64 {
        // ω_0 = 2, ω_1 = 2π, ω_k = 2π ω_{k-2} / (k - 1)
        let k = self.m - 1;
        let (mut area, mut j) = if k.is_multiple_of(2) {
            (2.0, 0)
        } else {
            (2.0 * PI, 1)
        };
        while j < k {
            j += 2;
            area *= 2.0 * PI / f64::from(j - 1);
        }
        area
    }
}

/// Uniform grid `r_i = i h`, `i = 0..=n`, on `[0, r_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialGrid {
    r_max: f64,
    n: usize,
}

pub const MIN_INTERVALS: usize = 8;

impl RadialGrid {
    pub fn new(r_max: f64, n: usize) -> Result<Self> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(FlowError::Config(format!(
                "grid radius {r_max} must be positive"
            )));
        }
        if n < MIN_INTERVALS {
            return Err(FlowError::Config(format!(
                "grid has {n} intervals, need at least {MIN_INTERVALS}"
            )));
        }
        Ok(Self { r_max, n })
    }

    /// Grid on `[0, r_max]` with spacing `h`; `r_max` must be a multiple of `h`.
    pub fn with_spacing(r_max: f64, h: f64) -> Result<Self> {
        if !(h.is_finite() && h > 0.0) {
            return Err(FlowError::Config(format!(
                "grid spacing {h} must be positive"
            )));
        }
        let n = (r_max / h).round();
        if (n * h - r_max).abs() > 1e-9 * r_max.max(1.0) {
            return Err(FlowError::Config(format!(
                "radius {r_max} is not a multiple of the spacing {h}"
            )));
        }
        Self::new(r_max, n as usize)
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Number of intervals.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of nodes, `n + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn h(&self) -> f64 {
        self.r_max / self.n as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        if i == self.n {
            self.r_max
        } else {
            i as f64 * self.h()
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |i| self.node(i))
    }

    /// Index of the node at radius `r`, if `r` is (up to round-off) a node.
    pub fn node_index(&self, r: f64) -> Option<usize> {
        let x = r / self.h();
        let i = x.round();
        if i < 0.0 || i as usize > self.n || (x - i).abs() > 1e-7 {
            None
        } else {
            Some(i as usize)
        }
    }

    /// Index of the last node with `r_i <= r` (clamped to the grid).
    pub fn last_node_at_or_below(&self, r: f64) -> usize {
        let x = r / self.h();
        let i = (x + 1e-9).floor().max(0.0) as usize;
        i.min(self.n)
    }

    /// The same spacing restricted to `[0, r_hi]`; `r_hi` must be a node.
    pub fn truncate(&self, r_hi: f64) -> Result<Self> {
        let j = self.node_index(r_hi).ok_or_else(|| {
            FlowError::Config(format!(
                "radius {r_hi} is not a node of the grid with spacing {}",
                self.h()
            ))
        })?;
        Self::new(r_hi, j)
    }
}

/// Samples of a radial function at the nodes of a [`RadialGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct RadialField {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl RadialField {
    pub fn new(grid: RadialGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(FlowError::Config(format!(
                "field has {} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(FlowError::Domain(format!(
                "non-finite value {} at node {i}",
                values[i]
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: RadialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().map(f).collect())
    }

    pub fn constant(grid: RadialGrid, c: f64) -> Result<Self> {
        Self::new(grid, vec![c; grid.len()])
    }

    pub(crate) fn from_raw(grid: RadialGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    /// Node-wise `f(r_i, v_i)`.
    pub fn map_with_radius(&self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| f(self.grid.node(i), v))
            .collect();
        Self::new(self.grid, values)
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.grid != other.grid {
            return Err(FlowError::Config("fields live on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        Self::new(self.grid, values)
    }

    /// The field restricted to `[0, r_hi]`; `r_hi` must be a node.
    pub fn restrict(&self, r_hi: f64) -> Result<Self> {
        let grid = self.grid.truncate(r_hi)?;
        Ok(Self::from_raw(grid, self.values[..grid.len()].to_vec()))
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Minimum over the nodes with `r_i <= r_hi`.
    pub fn min_within(&self, r_hi: f64) -> f64 {
        let j = self.grid.last_node_at_or_below(r_hi);
        self.values[..=j]
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// Maximum over the nodes with `r_i <= r_hi`.
    pub fn max_within(&self, r_hi: f64) -> f64 {
        let j = self.grid.last_node_at_or_below(r_hi);
        self.values[..=j]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `max_i |self_i - other_i|` over the nodes with `r_i <= r_hi`.
    pub fn sup_distance_within(&self, other: &Self, r_hi: f64) -> f64 {
        let j = self
            .grid
            .last_node_at_or_below(r_hi)
            .min(other.grid.last_node_at_or_below(r_hi));
        self.values[..=j]
            .iter()
            .zip(&other.values[..=j])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Coefficients `(lower, diagonal, upper)` of the discrete Laplacian at node
/// `i` of the grid, for `0 <= i < n`.
///
/// Node 0 uses the even extension, so its `lower` entry is folded into
/// `upper` and returned as 0.
pub(crate) fn laplacian_stencil(grid: &RadialGrid, dim: Dimension, i: usize) -> (f64, f64, f64) {
    let h = grid.h();
    let h2 = h * h;
    if i == 0 {
        let m = dim.mf();
        return (0.0, -2.0 * m / h2, 2.0 * m / h2);
    }
    let drift = (dim.mf() - 1.0) / grid.node(i).tanh() / (2.0 * h);
    (1.0 / h2 - drift, -2.0 / h2, 1.0 / h2 + drift)
}

/// Hyperbolic Laplace–Beltrami operator of a radial field.
///
/// Central differences in the interior, `m f''(0)` with the even extension
/// at the origin, and one-sided second-order differences at `r_max`.
pub fn laplacian_radial(f: &RadialField, dim: Dimension) -> RadialField {
    let grid = *f.grid();
    let v = f.values();
    let n = grid.n();
    let h = grid.h();
    let mut out = Vec::with_capacity(grid.len());
    let h2 = h * h;
    // difference form, so constants map to exactly zero
    out.push(2.0 * dim.mf() * (v[1] - v[0]) / h2);
    for i in 1..n {
        let drift = (dim.mf() - 1.0) / grid.node(i).tanh() / (2.0 * h);
        out.push(((v[i + 1] - v[i]) - (v[i] - v[i - 1])) / h2 + drift * (v[i + 1] - v[i - 1]));
    }
    let (d1, d2, d3) = (v[n] - v[n - 1], v[n - 1] - v[n - 2], v[n - 2] - v[n - 3]);
    let second = (2.0 * d1 - 3.0 * d2 + d3) / h2;
    let first = (3.0 * d1 - d2) / (2.0 * h);
    out.push(second + (dim.mf() - 1.0) / grid.r_max().tanh() * first);
    RadialField::from_raw(grid, out)
}

/// Radial derivative `f'`; zero at the origin by even symmetry.
pub fn gradient_radial(f: &RadialField) -> RadialField {
    let grid = *f.grid();
    let v = f.values();
    let n = grid.n();
    let h = grid.h();
    let mut out = Vec::with_capacity(grid.len());
    out.push(0.0);
    out.extend((1..n).map(|i| (v[i + 1] - v[i - 1]) / (2.0 * h)));
    out.push((3.0 * v[n] - 4.0 * v[n - 1] + v[n - 2]) / (2.0 * h));
    RadialField::from_raw(grid, out)
}

/// `sinh^{m-1}(r)`, the radial density of the hyperbolic volume.
pub fn volume_density(r: f64, dim: Dimension) -> f64 {
    r.sinh().powi(dim.m() as i32 - 1)
}

/// `∫ f dμ` over the annulus `r_lo <= r <= r_hi`.
///
/// The integrand `f sinh^{m-1}` is integrated exactly in its piecewise
/// linear interpolant, i.e. by the composite trapezoid rule with partial
/// cells at non-node endpoints.
pub fn integrate_radial(f: &RadialField, dim: Dimension, r_lo: f64, r_hi: f64) -> Result<f64> {
    let grid = *f.grid();
    let slack = 1e-12 * grid.r_max();
    if !(r_lo >= 0.0 && r_lo < r_hi && r_hi <= grid.r_max() + slack) {
        return Err(FlowError::Domain(format!(
            "interval [{r_lo}, {r_hi}] is not inside [0, {}]",
            grid.r_max()
        )));
    }
    let r_hi = r_hi.min(grid.r_max());
    let g: Vec<f64> = f
        .values()
        .iter()
        .enumerate()
        .map(|(i, &v)| v * volume_density(grid.node(i), dim))
        .collect();
    Ok(dim.sphere_area() * trapezoid_clipped(&grid, &g, r_lo, r_hi))
}

/// Integral over `[a, b]` of the piecewise linear interpolant of nodal
/// values `g`.
pub(crate) fn trapezoid_clipped(grid: &RadialGrid, g: &[f64], a: f64, b: f64) -> f64 {
    let h = grid.h();
    let first = grid.last_node_at_or_below(a);
    let mut total = 0.0;
    for i in first..grid.n() {
        let (r0, r1) = (grid.node(i), grid.node(i + 1));
        if r0 >= b {
            break;
        }
        let lo = r0.max(a);
        let hi = r1.min(b);
        if hi <= lo {
            continue;
        }
        let at = |r: f64| g[i] + (g[i + 1] - g[i]) * (r - r0) / h;
        total += 0.5 * (at(lo) + at(hi)) * (hi - lo);
    }
    total
}
