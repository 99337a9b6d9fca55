//! Compactly supported subsolutions of the fast diffusion equation
//! `∂W^{1+a}/∂t = b ΔW` on the unit ball, and a solver for that equation.
//!
//! The barrier is `V(r, t) = (h0^a - C t)^{1/a} (1 - r²)²` with
//! `C = a b λ / (a + 1)`; it vanishes identically at `t0 = h0^a / C`.

use crate::bounds::profile::{profile_derivatives, profile_lambda};
use crate::error::{FlowError, Result};
use crate::geometry::{
    integrate_radial, laplacian_radial, laplacian_stencil, Dimension, RadialField, RadialGrid,
};
use crate::solver::{advance_to, Timed};
use crate::tridiag::solve_tridiagonal;

/// Parameters of the barrier `V`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubsolutionParams {
    /// Exponent `a` of `W^{1+a}`.
    pub a: f64,
    /// Diffusion constant.
    pub b: f64,
    /// Drift constant of the profile inequality.
    pub c: f64,
    /// Initial height at the center.
    pub h0: f64,
    pub lambda: f64,
    /// Decay rate `a b λ / (a + 1)` of `h^a`.
    pub decay: f64,
    /// Extinction time `h0^a / decay`.
    pub t0: f64,
}

impl SubsolutionParams {
    pub fn new(a: f64, b: f64, c: f64, h0: f64, lambda: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c), ("h0", h0), ("lambda", lambda)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(FlowError::Config(format!("{name} = {v} must be positive")));
            }
        }
        let minimal = profile_lambda(a, c);
        if lambda < minimal * (1.0 - 1e-12) {
            return Err(FlowError::Config(format!(
                "lambda = {lambda} is below the admissible minimum {minimal}"
            )));
        }
        let decay = a * b * lambda / (a + 1.0);
        Ok(Self {
            a,
            b,
            c,
            h0,
            lambda,
            decay,
            t0: h0.powf(a) / decay,
        })
    }

    /// Parameters used to bound `U = u^η` from below along the flow:
    /// `a = 1/η`, `b = (m-1)(η+1)/η`, `c = (m-1)/tanh 1` and the smallest
    /// admissible `λ`.
    pub fn for_flow(dim: Dimension, h0: f64) -> Result<Self> {
        let eta = dim.eta();
        let m = dim.mf();
        let a = 1.0 / eta;
        let c = (m - 1.0) / 1f64.tanh();
        Self::new(
            a,
            (m - 1.0) * (eta + 1.0) / eta,
            c,
            h0,
            profile_lambda(a, c),
        )
    }

    /// Same barrier with a different (admissible) `λ`.
    pub fn with_lambda(&self, lambda: f64) -> Result<Self> {
        Self::new(self.a, self.b, self.c, self.h0, lambda)
    }

    /// Height `h(t) = (h0^a - C t)^{1/a}` at the center.
    pub fn height(&self, t: f64) -> f64 {
        (self.h0.powf(self.a) - self.decay * t)
            .max(0.0)
            .powf(1.0 / self.a)
    }

    /// Closed-form `∂/∂t V^{1+a}` at radius `r <= 1`.
    pub fn time_derivative_of_power(&self, r: f64, t: f64) -> f64 {
        let (f, _, _) = profile_derivatives(r);
        -self.b * self.lambda * self.height(t) * f.powf(1.0 + self.a)
    }
}

/// The barrier `V(·, t)` sampled on `grid`; zero outside the unit ball.
pub fn subsolution(params: &SubsolutionParams, grid: RadialGrid, t: f64) -> Result<RadialField> {
    if t < 0.0 {
        return Err(FlowError::Precondition(format!("time {t} is negative")));
    }
    if t >= params.t0 {
        return Err(FlowError::Extinction { t, t0: params.t0 });
    }
    let height = params.height(t);
    RadialField::from_fn(grid, |r| {
        if r < 1.0 {
            height * profile_derivatives(r).0
        } else {
            0.0
        }
    })
}

fn check_unit_grid(grid: &RadialGrid) -> Result<()> {
    if (grid.r_max() - 1.0).abs() > 1e-12 {
        return Err(FlowError::Config(format!(
            "barrier grids live on [0, 1], got [0, {}]",
            grid.r_max()
        )));
    }
    Ok(())
}

/// Largest value of `∂/∂t V^{1+a} - b ΔV` over the grid and the sampled
/// times, with `ΔV` from the discrete radial Laplacian.
pub fn subsolution_violation(
    params: &SubsolutionParams,
    grid: RadialGrid,
    dim: Dimension,
    samples: &[f64],
) -> Result<f64> {
    check_unit_grid(&grid)?;
    let mut worst = f64::NEG_INFINITY;
    for &t in samples {
        let v = subsolution(params, grid, t)?;
        let lap = laplacian_radial(&v, dim);
        for (i, r) in grid.nodes().enumerate() {
            let excess = params.time_derivative_of_power(r, t) - params.b * lap.values()[i];
            worst = worst.max(excess);
        }
    }
    Ok(worst)
}

/// `∫ max(V^{1+1/η} - U^{1+1/η}, 0) dμ` over the grid's ball.
pub fn barrier_excess_integral(
    big_u: &RadialField,
    barrier: &RadialField,
    dim: Dimension,
) -> Result<f64> {
    if big_u.grid() != barrier.grid() {
        return Err(FlowError::Config("U and V live on different grids".into()));
    }
    if let Some(i) = big_u.values().iter().position(|&v| v <= 0.0) {
        return Err(FlowError::Domain(format!("U must be positive, node {i}")));
    }
    let p = 1.0 + 1.0 / dim.eta();
    let excess = barrier.zip_with(big_u, |v, u| (v.powf(p) - u.powf(p)).max(0.0))?;
    integrate_radial(&excess, dim, 0.0, big_u.grid().r_max())
}

/// Solution of the fast diffusion equation at one time.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffusionState {
    pub t: f64,
    pub w: RadialField,
}

impl Timed for DiffusionState {
    fn time(&self) -> f64 {
        self.t
    }

    fn set_time(&mut self, t: f64) {
        self.t = t;
    }
}

#[derive(Clone, Debug)]
pub struct FastDiffusionRun {
    pub params: SubsolutionParams,
    pub states: Vec<DiffusionState>,
    /// First recorded time with `max W < EXTINCTION_LEVEL`, if reached.
    pub extinction_time: Option<f64>,
    pub halvings: u32,
}

/// Height below which a fast diffusion solution counts as extinct.
pub const EXTINCTION_LEVEL: f64 = 1e-8;

/// One linearly implicit step for `Z = W^{1+a}`:
/// `(1+a) W^a (W⁺ - W) = dt b ΔW⁺`, `W⁺ = 0` at `r = 1`.
fn diffusion_step(
    state: &DiffusionState,
    dt: f64,
    params: &SubsolutionParams,
    dim: Dimension,
) -> Result<DiffusionState> {
    let grid = *state.w.grid();
    let n = grid.n();
    let w = state.w.values();
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        let mass = (1.0 + params.a) * w[i].powf(params.a);
        let (lo, d, up) = laplacian_stencil(&grid, dim, i);
        let coef = dt * params.b;
        lower[i] = -coef * lo;
        diag[i] = mass - coef * d;
        upper[i] = -coef * up;
        rhs[i] = mass * w[i];
    }
    upper[n - 1] = 0.0;
    solve_tridiagonal(&lower, &diag, &upper, &mut rhs)?;
    if let Some(node) = rhs.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(FlowError::Stability {
            t: state.t,
            node,
            value: rhs[node],
        });
    }
    rhs.push(0.0);
    Ok(DiffusionState {
        t: state.t + dt,
        w: RadialField::from_raw(grid, rhs),
    })
}

/// Integrates `∂W^{1+a}/∂t = b ΔW` on the unit ball with `W(·, 0) = V(·, 0)`
/// and zero boundary values until extinction or `t_max`, recording every
/// step.
pub fn fast_diffusion_solve(
    params: &SubsolutionParams,
    grid: RadialGrid,
    dim: Dimension,
    dt: f64,
    t_max: f64,
) -> Result<FastDiffusionRun> {
    check_unit_grid(&grid)?;
    if !(dt > 0.0 && t_max > 0.0) {
        return Err(FlowError::Precondition(
            "dt and t_max must be positive".into(),
        ));
    }
    let mut state = DiffusionState {
        t: 0.0,
        w: subsolution(params, grid, 0.0)?,
    };
    let mut states = vec![state.clone()];
    let mut halvings = 0;
    let mut extinction_time = None;
    let steps = (t_max / dt).ceil() as usize;
    for i in 1..=steps {
        let target = (i as f64 * dt).min(t_max);
        state = advance_to(state, target, dt, &mut halvings, |s, h| {
            diffusion_step(s, h, params, dim)
        })?;
        states.push(state.clone());
        if state.w.max() < EXTINCTION_LEVEL {
            extinction_time = Some(state.t);
            break;
        }
    }
    Ok(FastDiffusionRun {
        params: *params,
        states,
        extinction_time,
        halvings,
    })
}

impl FastDiffusionRun {
    /// Largest `V - W` over recorded states before the barrier's extinction.
    pub fn barrier_excess(&self) -> Result<f64> {
        let mut worst = f64::NEG_INFINITY;
        for s in self.states.iter().filter(|s| s.t < self.params.t0) {
            let v = subsolution(&self.params, *s.w.grid(), s.t)?;
            let gap = v
                .values()
                .iter()
                .zip(s.w.values())
                .map(|(a, b)| a - b)
                .fold(f64::NEG_INFINITY, f64::max);
            worst = worst.max(gap);
        }
        Ok(worst)
    }
}
