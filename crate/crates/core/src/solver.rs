//! Time integration of the conformal flow on geodesic balls.
//!
//! The flow `∂u/∂t = -R_g u` for `g = u g_H` is a quasilinear parabolic
//! equation with diffusion coefficient `(m-1)/u`. It is advanced with a
//! semi-implicit scheme: the Laplacian is implicit with its coefficient
//! frozen at the old state, the remaining terms are explicit, so each step
//! costs one tridiagonal solve.
//!
//! The existence construction solves Dirichlet problems on an increasing
//! family of balls `B_k`, with initial data blended to the constant
//! `c_k = min_{B_k} u_0` near `∂B_k` and boundary values `c_k + m(m-1)t`,
//! and compares the resulting solutions on a fixed observation window.

use crate::conformal::{pressure, scalar_curvature, to_u_power, ConformalFactor, Pressure};
use crate::error::{FlowError, Result};
use crate::geometry::{
    gradient_radial, laplacian_radial, laplacian_stencil, volume_density, Dimension, RadialField,
    RadialGrid,
};
use crate::tridiag::solve_tridiagonal;

/// Maximum number of successive step-size halvings for one step.
pub const MAX_HALVINGS: u32 = 20;

/// Conformal factor at a point in time.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub t: f64,
    pub u: ConformalFactor,
}

/// Anything that carries a time stamp and can be stepped.
pub(crate) trait Timed {
    fn time(&self) -> f64;
    fn set_time(&mut self, t: f64);
}

impl Timed for FlowState {
    fn time(&self) -> f64 {
        self.t
    }

    fn set_time(&mut self, t: f64) {
        self.t = t;
    }
}

/// Right-hand side of `∂u/∂t = (m-1)(m + Δu/u + (m-6)/4 |∇u|²/u²)`.
pub fn rhs_u(u: &ConformalFactor, dim: Dimension) -> RadialField {
    let m = dim.mf();
    let lap = laplacian_radial(u.field(), dim);
    let grad = gradient_radial(u.field());
    let values = u
        .values()
        .iter()
        .zip(lap.values().iter().zip(grad.values()))
        .map(|(&v, (&l, &g))| (m - 1.0) * (m + l / v + 0.25 * (m - 6.0) * (g / v).powi(2)))
        .collect();
    RadialField::from_raw(*u.grid(), values)
}

/// Right-hand side of `∂U/∂t = (m-1)(mηU + ΔU) U^{-1/η}` for `U = u^η`.
pub fn rhs_u_power(big_u: &RadialField, dim: Dimension) -> Result<RadialField> {
    if let Some(i) = big_u.values().iter().position(|&v| v <= 0.0) {
        return Err(FlowError::Domain(format!("U must be positive, node {i}")));
    }
    let m = dim.mf();
    let eta = dim.eta();
    let lap = laplacian_radial(big_u, dim);
    let values = big_u
        .values()
        .iter()
        .zip(lap.values())
        .map(|(&v, &l)| (m - 1.0) * (m * eta * v + l) * v.powf(-1.0 / eta))
        .collect();
    Ok(RadialField::from_raw(*big_u.grid(), values))
}

/// Right-hand side of the pressure equation
/// `∂v/∂t = (m-1)(-m v² + v Δv - (m+2)/4 |∇v|²)` for `v = 1/u`.
pub fn rhs_pressure(v: &Pressure, dim: Dimension) -> RadialField {
    let m = dim.mf();
    let lap = laplacian_radial(v.field(), dim);
    let grad = gradient_radial(v.field());
    let values = v
        .values()
        .iter()
        .zip(lap.values().iter().zip(grad.values()))
        .map(|(&p, (&l, &g))| (m - 1.0) * (-m * p * p + p * l - 0.25 * (m + 2.0) * g * g))
        .collect();
    RadialField::from_raw(*v.field().grid(), values)
}

/// Right-hand side of the divergence form
/// `∂u^{η+1}/∂t = (m-1)(m(η+1) u^η + div(u^{-1} ∇u^{η+1}))`.
///
/// The divergence is a conservative flux difference on the half nodes,
/// with a finite-volume ball cell at the origin and a one-sided flux
/// derivative at the outer node.
pub fn rhs_divergence_form(u: &ConformalFactor, dim: Dimension) -> RadialField {
    let grid = *u.grid();
    let n = grid.n();
    let h = grid.h();
    let m = dim.mf();
    let eta = dim.eta();
    let q: Vec<f64> = u.values().iter().map(|v| v.powf(eta + 1.0)).collect();

    // flux_area[i] = sinh^{m-1}(r_{i+1/2}) F(r_{i+1/2}), F = u^{-1} q'
    let flux_area: Vec<f64> = (0..n)
        .map(|i| {
            let mid = (grid.node(i) + grid.node(i + 1)) / 2.0;
            let inv_u = 0.5 * (1.0 / u.values()[i] + 1.0 / u.values()[i + 1]);
            volume_density(mid, dim) * inv_u * (q[i + 1] - q[i]) / h
        })
        .collect();

    let mut div = Vec::with_capacity(grid.len());
    let rho = 0.5 * h;
    let cell = rho.powf(m) / m + (m - 1.0) / 6.0 * rho.powf(m + 2.0) / (m + 2.0);
    div.push(flux_area[0] / cell);
    for i in 1..n {
        div.push((flux_area[i] - flux_area[i - 1]) / cell_volume(grid.node(i), h, dim));
    }
    let d_flux = (2.0 * flux_area[n - 1] - 3.0 * flux_area[n - 2] + flux_area[n - 3]) / h;
    div.push(d_flux / volume_density(grid.r_max(), dim));

    let values = u
        .values()
        .iter()
        .zip(div)
        .map(|(&v, d)| (m - 1.0) * (m * (eta + 1.0) * v.powf(eta) + d))
        .collect();
    RadialField::from_raw(grid, values)
}

/// `∫ sinh^{m-1}` over `[r - h/2, r + h/2]` by five-point Gauss-Legendre,
/// exact on the leading power `r^{m-1}` for `m <= 10`.
fn cell_volume(r: f64, h: f64, dim: Dimension) -> f64 {
    let s70 = 70f64.sqrt();
    let inner = (5.0 - 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let outer = (5.0 + 2.0 * (10.0f64 / 7.0).sqrt()).sqrt() / 3.0;
    let rule = [
        (0.0, 128.0 / 225.0),
        (inner, (322.0 + 13.0 * s70) / 900.0),
        (-inner, (322.0 + 13.0 * s70) / 900.0),
        (outer, (322.0 - 13.0 * s70) / 900.0),
        (-outer, (322.0 - 13.0 * s70) / 900.0),
    ];
    0.5 * h
        * rule
            .iter()
            .map(|&(x, w)| w * volume_density(r + 0.5 * h * x, dim))
            .sum::<f64>()
}

/// Largest pairwise differences of `∂u/∂t` computed from the `u`, `U`,
/// pressure and divergence forms, over the nodes `r_1, ..., r_{n-1}`:
/// `[u vs U, u vs v, u vs divergence, U vs v]`.
pub fn form_residuals(u: &ConformalFactor, dim: Dimension) -> Result<[f64; 4]> {
    let eta = dim.eta();
    let direct = rhs_u(u, dim);
    let big_u = to_u_power(u, dim);
    let from_power = rhs_u_power(&big_u, dim)?;
    let from_pressure = rhs_pressure(&pressure(u), dim);
    let from_divergence = rhs_divergence_form(u, dim);
    let n = u.grid().n();
    let mut worst = [0.0f64; 4];
    for i in 1..n {
        let v = u.values()[i];
        let a = direct.values()[i];
        let b = from_power.values()[i] * v / (eta * big_u.values()[i]);
        let c = -from_pressure.values()[i] * v * v;
        let d = from_divergence.values()[i] / ((eta + 1.0) * v.powf(eta));
        for (slot, diff) in worst.iter_mut().zip([a - b, a - c, a - d, b - c]) {
            *slot = slot.max(diff.abs());
        }
    }
    Ok(worst)
}

/// Smooth cutoff `χ_k`: 1 on `[0, k-1]`, 0 on `[k-1/4, k]`, with a quintic
/// smoothstep transition in between.
pub fn exhaustion_cutoff(r: f64, k: f64) -> f64 {
    let start = k - 1.0;
    let end = k - 0.25;
    if r <= start {
        1.0
    } else if r >= end {
        0.0
    } else {
        let s = (r - start) / (end - start);
        1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s))
    }
}

/// Builds `(c_k, u_{0,k})` from raw initial data.
///
/// `c_k` is the grid minimum of `u0_raw` on `[0, k]` and
/// `u_{0,k} = (1 - χ_k) c_k + χ_k u0_raw`, returned on the grid truncated to
/// `[0, k]`.
pub fn build_initial_data(u0_raw: &ConformalFactor, k: f64) -> Result<(f64, ConformalFactor)> {
    if k <= 2.0 {
        return Err(FlowError::Precondition(format!(
            "ball radius k = {k} must exceed 2"
        )));
    }
    if k > u0_raw.grid().r_max() + 1e-9 {
        return Err(FlowError::Config(format!(
            "ball radius {k} exceeds the grid radius {}",
            u0_raw.grid().r_max()
        )));
    }
    let raw = u0_raw.field().restrict(k)?;
    let c_k = raw.min();
    let blended = raw.map_with_radius(|r, v| {
        let chi = exhaustion_cutoff(r, k);
        (1.0 - chi) * c_k + chi * v
    })?;
    Ok((c_k, ConformalFactor::new(blended)?))
}

/// Boundary value `φ_k(t) = c_k + m(m-1)t`.
pub fn boundary_value(c_k: f64, dim: Dimension, t: f64) -> f64 {
    c_k + dim.growth_rate() * t
}

/// Dirichlet problem on the geodesic ball `B_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct DirichletProblem {
    pub k: f64,
    pub u0k: ConformalFactor,
    pub c_k: f64,
    pub dim: Dimension,
    pub horizon: f64,
    /// Times at which states are recorded, in addition to `t = 0`. When
    /// `None` every accepted step is recorded.
    pub output_stamps: Option<Vec<f64>>,
}

impl DirichletProblem {
    /// Problem on `B_k` built from raw data sampled on a grid covering `[0, k]`.
    pub fn new(u0_raw: &ConformalFactor, k: f64, dim: Dimension, horizon: f64) -> Result<Self> {
        if !(horizon.is_finite() && horizon >= 0.0) {
            return Err(FlowError::Config(format!(
                "horizon {horizon} must be nonnegative"
            )));
        }
        let (c_k, u0k) = build_initial_data(u0_raw, k)?;
        Ok(Self {
            k,
            u0k,
            c_k,
            dim,
            horizon,
            output_stamps: None,
        })
    }

    pub fn with_output_stamps(mut self, stamps: Vec<f64>) -> Result<Self> {
        let sorted = stamps.windows(2).all(|w| w[0] < w[1]);
        let inside = stamps
            .iter()
            .all(|&s| s >= 0.0 && s <= self.horizon * (1.0 + 1e-12));
        if !sorted || !inside {
            return Err(FlowError::Config(
                "output stamps must be strictly increasing and lie in [0, T]".into(),
            ));
        }
        self.output_stamps = Some(stamps);
        Ok(self)
    }

    pub fn grid(&self) -> &RadialGrid {
        self.u0k.grid()
    }

    pub fn boundary_value(&self, t: f64) -> f64 {
        boundary_value(self.c_k, self.dim, t)
    }

    pub fn initial_state(&self) -> FlowState {
        FlowState {
            t: 0.0,
            u: self.u0k.clone(),
        }
    }
}

/// Recorded solution of a [`DirichletProblem`].
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub problem: DirichletProblem,
    pub states: Vec<FlowState>,
    /// Total number of step-size halvings that were needed.
    pub halvings: u32,
    pub dt: f64,
}

impl Trajectory {
    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn initial(&self) -> &FlowState {
        &self.states[0]
    }

    pub fn last(&self) -> &FlowState {
        self.states
            .last()
            .expect("trajectory holds the initial state")
    }

    pub fn dim(&self) -> Dimension {
        self.problem.dim
    }
}

/// Advances `state` by one semi-implicit step of size `dt`.
///
/// Solves
/// `u⁺ - dt (m-1)/u Δu⁺ = u + dt (m-1)(m + (m-6)/4 (u'/u)²)`
/// with `u⁺ = φ_k(t + dt)` at `r = k` and even symmetry at the origin.
pub fn step(state: &FlowState, dt: f64, problem: &DirichletProblem) -> Result<FlowState> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(FlowError::Precondition(format!(
            "time step {dt} must be positive"
        )));
    }
    let grid = *state.u.grid();
    if grid != *problem.grid() {
        return Err(FlowError::Config(
            "state and problem live on different grids".into(),
        ));
    }
    let dim = problem.dim;
    let m = dim.mf();
    let n = grid.n();
    let u = state.u.values();
    let grad = gradient_radial(state.u.field());
    let t_next = state.t + dt;

    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        let coef = dt * (m - 1.0) / u[i];
        let (lo, d, up) = laplacian_stencil(&grid, dim, i);
        lower[i] = -coef * lo;
        diag[i] = 1.0 - coef * d;
        upper[i] = -coef * up;
        let slope = grad.values()[i] / u[i];
        rhs[i] = u[i] + dt * (m - 1.0) * (m + 0.25 * (m - 6.0) * slope * slope);
    }
    let edge = problem.boundary_value(t_next);
    rhs[n - 1] -= upper[n - 1] * edge;
    upper[n - 1] = 0.0;
    solve_tridiagonal(&lower, &diag, &upper, &mut rhs)?;
    rhs.push(edge);

    if let Some(node) = rhs.iter().position(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(FlowError::Stability {
            t: state.t,
            node,
            value: rhs[node],
        });
    }
    Ok(FlowState {
        t: t_next,
        u: ConformalFactor::new(RadialField::from_raw(grid, rhs))?,
    })
}

/// Advances `state` to `target` with steps of at most `dt`, halving the
/// step on loss of positivity.
pub(crate) fn advance_to<S, F>(
    mut state: S,
    target: f64,
    dt: f64,
    halvings: &mut u32,
    mut stepper: F,
) -> Result<S>
where
    S: Timed,
    F: FnMut(&S, f64) -> Result<S>,
{
    let eps = 1e-12 * target.abs().max(1.0);
    while target - state.time() > eps {
        let mut trial = dt.min(target - state.time());
        let mut attempts = 0;
        let next = loop {
            match stepper(&state, trial) {
                Ok(next) => break next,
                Err(FlowError::Stability { t, node, .. }) => {
                    attempts += 1;
                    *halvings += 1;
                    if attempts > MAX_HALVINGS {
                        return Err(FlowError::FatalInstability {
                            t,
                            node,
                            halvings: MAX_HALVINGS,
                        });
                    }
                    trial *= 0.5;
                }
                Err(e) => return Err(e),
            }
        };
        state = next;
        if (target - state.time()).abs() <= eps {
            state.set_time(target);
        }
    }
    Ok(state)
}

/// Integrates a Dirichlet problem from `t = 0` to its horizon.
pub fn solve_dirichlet(problem: &DirichletProblem, dt: f64) -> Result<Trajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(FlowError::Precondition(format!(
            "time step {dt} must be positive"
        )));
    }
    let mut states = vec![problem.initial_state()];
    let mut halvings = 0;
    let mut state = problem.initial_state();
    let stepper = |s: &FlowState, h: f64| step(s, h, problem);

    match &problem.output_stamps {
        Some(stamps) => {
            for &stamp in stamps.iter().filter(|&&s| s > 0.0) {
                state = advance_to(state, stamp, dt, &mut halvings, stepper)?;
                states.push(state.clone());
            }
        }
        None => {
            let steps = (problem.horizon / dt).ceil() as usize;
            for i in 1..=steps {
                let target = (i as f64 * dt).min(problem.horizon);
                state = advance_to(state, target, dt, &mut halvings, stepper)?;
                states.push(state.clone());
            }
        }
    }
    Ok(Trajectory {
        problem: problem.clone(),
        states,
        halvings,
        dt,
    })
}

/// Parameters of an exhaustion run.
#[derive(Clone, Debug, PartialEq)]
pub struct ExhaustionSettings {
    pub dim: Dimension,
    /// Increasing ball radii.
    pub k_list: Vec<f64>,
    /// Radius of the observation window `B_{r_obs}`.
    pub r_obs: f64,
    pub horizon: f64,
    pub dt: f64,
}

impl ExhaustionSettings {
    pub fn validate(&self) -> Result<()> {
        if self.k_list.is_empty() {
            return Err(FlowError::Config("k_list is empty".into()));
        }
        if !self.k_list.windows(2).all(|w| w[0] < w[1]) {
            return Err(FlowError::Config(
                "k_list must be strictly increasing".into(),
            ));
        }
        if self.r_obs.is_nan() || self.r_obs <= 0.0 {
            return Err(FlowError::Config("r_obs must be positive".into()));
        }
        if self.k_list[0] < self.r_obs + 3.0 {
            return Err(FlowError::Config(format!(
                "observation radius {} exceeds k - 3 = {} for the smallest ball",
                self.r_obs,
                self.k_list[0] - 3.0
            )));
        }
        if !(self.dt > 0.0 && self.horizon > 0.0) {
            return Err(FlowError::Config("dt and horizon must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct ExhaustionResult {
    pub settings: ExhaustionSettings,
    /// One trajectory per ball, in the order of `k_list`.
    pub trajectories: Vec<Trajectory>,
    /// `d_k = sup |u_{k_next} - u_k|` over the window, consecutive pairs.
    pub sup_differences: Vec<f64>,
}

impl ExhaustionResult {
    /// The largest-ball trajectory.
    pub fn limit_candidate(&self) -> &Trajectory {
        self.trajectories.last().expect("nonempty k_list")
    }

    /// States of the limit candidate restricted to the observation window.
    pub fn window_states(&self) -> Result<Vec<FlowState>> {
        self.limit_candidate()
            .states
            .iter()
            .map(|s| {
                Ok(FlowState {
                    t: s.t,
                    u: ConformalFactor::new(s.u.field().restrict(self.settings.r_obs)?)?,
                })
            })
            .collect()
    }
}

/// Solves the Dirichlet problems on every ball of `settings.k_list` on the
/// grid of `u0_raw` and measures how the solutions differ on the window.
///
/// The balls are solved concurrently; they share no mutable state.
pub fn exhaustion_run(
    u0_raw: &ConformalFactor,
    settings: &ExhaustionSettings,
) -> Result<ExhaustionResult> {
    settings.validate()?;
    let steps = (settings.horizon / settings.dt).round().max(1.0) as usize;
    let stamps: Vec<f64> = (1..=steps)
        .map(|i| settings.horizon * i as f64 / steps as f64)
        .collect();

    let problems = settings
        .k_list
        .iter()
        .map(|&k| {
            DirichletProblem::new(u0_raw, k, settings.dim, settings.horizon)?
                .with_output_stamps(stamps.clone())
        })
        .collect::<Result<Vec<_>>>()?;

    let trajectories = std::thread::scope(|scope| {
        let handles: Vec<_> = problems
            .iter()
            .map(|p| scope.spawn(move || solve_dirichlet(p, settings.dt)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("solver thread panicked"))
            .collect::<Result<Vec<_>>>()
    })?;

    let sup_differences = trajectories
        .windows(2)
        .map(|pair| {
            pair[0]
                .states
                .iter()
                .zip(&pair[1].states)
                .map(|(a, b)| {
                    debug_assert_eq!(a.t, b.t);
                    a.u.field().sup_distance_within(b.u.field(), settings.r_obs)
                })
                .fold(0.0, f64::max)
        })
        .collect();

    Ok(ExhaustionResult {
        settings: settings.clone(),
        trajectories,
        sup_differences,
    })
}

/// `(t, r, u, U, R)` rows of a state, in radial order.
pub(crate) fn state_rows(state: &FlowState, dim: Dimension) -> impl Iterator<Item = [f64; 5]> + '_ {
    let big_u = to_u_power(&state.u, dim);
    let curvature = scalar_curvature(&state.u, dim);
    let grid = *state.u.grid();
    (0..grid.len()).map(move |i| {
        [
            state.t,
            grid.node(i),
            state.u.values()[i],
            big_u.values()[i],
            curvature.values()[i],
        ]
    })
}

/// Pressure of a state.
pub fn state_pressure(state: &FlowState) -> Pressure {
    pressure(&state.u)
}
