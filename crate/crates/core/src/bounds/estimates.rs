//! Pointwise a posteriori estimates evaluated along solver trajectories.
//!
//! Every function returns a signed worst-case violation: nonpositive means
//! the estimate holds on all recorded states.

use crate::bounds::barrier::{barrier_excess_integral, subsolution, SubsolutionParams};
use crate::conformal::to_u_power;
use crate::error::{FlowError, Result};
use crate::geometry::Dimension;
use crate::solver::{FlowState, Trajectory};

/// `m (m - 1) t + 1`, the flow starting from the hyperbolic metric itself.
pub fn scaling_solution(dim: Dimension, t: f64) -> f64 {
    dim.growth_rate() * t + 1.0
}

/// `a b / (a + c)`, the minimum over `t > 0` of `max{a t, b - c t}`.
pub fn minimax_lower(a: f64, b: f64, c: f64) -> f64 {
    a * b / (a + c)
}

/// Worst violations `(lower, upper)` of
/// `min u_{0,k} <= u(·, t) - m(m-1)t <= max u_{0,k}` on the whole ball.
pub fn sandwich_violations(traj: &Trajectory) -> (f64, f64) {
    let rate = traj.dim().growth_rate();
    let lo = traj.problem.u0k.field().min();
    let hi = traj.problem.u0k.field().max();
    let mut lower = f64::NEG_INFINITY;
    let mut upper = f64::NEG_INFINITY;
    for s in &traj.states {
        for &u in s.u.values() {
            let shifted = u - rate * s.t;
            lower = lower.max(lo - shifted);
            upper = upper.max(shifted - hi);
        }
    }
    (lower, upper)
}

fn check_inner_radius(traj: &Trajectory, r0: f64) -> Result<()> {
    let r_max = traj.problem.grid().r_max();
    if !(r0 > 1.0 && r0 <= r_max + 1e-9) {
        return Err(FlowError::Precondition(format!(
            "radius r0 = {r0} must satisfy 1 < r0 <= {r_max}"
        )));
    }
    Ok(())
}

/// `max (inf_{B_r0} u(·,0) - rate t - u)` over `B_{r0-1}` and all states.
pub fn lower_bound_violation(traj: &Trajectory, r0: f64, rate: f64) -> Result<f64> {
    check_inner_radius(traj, r0)?;
    let floor = traj.initial().u.field().min_within(r0);
    Ok(worst_within(&traj.states, r0 - 1.0, |t, u| {
        floor - rate * t - u
    }))
}

/// `max (u - sup_{B_r0} u(·,0) - (m-1)(m + c_m) t)` over `B_{r0-1}` and all
/// states.
pub fn upper_bound_violation(traj: &Trajectory, r0: f64, cutoff_constant: f64) -> Result<f64> {
    check_inner_radius(traj, r0)?;
    let m = traj.dim().mf();
    let ceiling = traj.initial().u.field().max_within(r0);
    let slope = (m - 1.0) * (m + cutoff_constant);
    Ok(worst_within(&traj.states, r0 - 1.0, |t, u| {
        u - ceiling - slope * t
    }))
}

/// The flow `U = u^η` compared with the centered barrier started at
/// `h0 = min_{B_r0} U(·, 0)`.
#[derive(Clone, Debug)]
pub struct BarrierComparison {
    pub params: SubsolutionParams,
    /// Recorded times before the barrier's extinction.
    pub times: Vec<f64>,
    /// `∫ (V^{1+a} - U^{1+a})_+ dμ` over the unit ball at each time.
    pub excess: Vec<f64>,
    /// `max (V - U)` over the unit ball and all compared times.
    pub domination_violation: f64,
}

impl BarrierComparison {
    /// Largest increase of the excess integral between consecutive times.
    pub fn max_increase(&self) -> f64 {
        self.excess
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
}

pub fn barrier_comparison(traj: &Trajectory, r0: f64) -> Result<BarrierComparison> {
    check_inner_radius(traj, r0)?;
    let dim = traj.dim();
    let h0 = to_u_power(&traj.initial().u, dim).min_within(r0);
    let params = SubsolutionParams::for_flow(dim, h0)?;
    let mut times = Vec::new();
    let mut excess = Vec::new();
    let mut domination_violation = f64::NEG_INFINITY;
    for s in traj.states.iter().filter(|s| s.t < params.t0) {
        let big_u = to_u_power(&s.u, dim).restrict(1.0)?;
        let v = subsolution(&params, *big_u.grid(), s.t)?;
        domination_violation = domination_violation.max(v.zip_with(&big_u, |a, b| a - b)?.max());
        times.push(s.t);
        excess.push(barrier_excess_integral(&big_u, &v, dim)?);
    }
    if times.is_empty() {
        return Err(FlowError::Precondition(
            "no recorded state precedes the barrier's extinction".into(),
        ));
    }
    Ok(BarrierComparison {
        params,
        times,
        excess,
        domination_violation,
    })
}

/// `max (m(m-1) t - u)`: how far the states dip below the completeness
/// bound `u >= m(m-1) t`.
pub fn completeness_violation(states: &[FlowState], dim: Dimension) -> f64 {
    let rate = dim.growth_rate();
    worst_within(states, f64::INFINITY, |t, u| rate * t - u)
}

/// `max |u - (m(m-1) t + 1)|` over all states.
pub fn scaling_deviation(traj: &Trajectory) -> f64 {
    let dim = traj.dim();
    worst_within(&traj.states, f64::INFINITY, |t, u| {
        (u - scaling_solution(dim, t)).abs()
    })
}

fn worst_within(states: &[FlowState], r_hi: f64, excess: impl Fn(f64, f64) -> f64) -> f64 {
    states
        .iter()
        .flat_map(|s| {
            let grid = *s.u.grid();
            let last = grid.last_node_at_or_below(r_hi);
            let excess = &excess;
            s.u.values()[..=last].iter().map(move |&u| excess(s.t, u))
        })
        .fold(f64::NEG_INFINITY, f64::max)
}
