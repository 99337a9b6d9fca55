//! Built-in verification suites at desk-scale default resolutions.

use std::cell::OnceCell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::barrier::{fast_diffusion_solve, subsolution_violation, SubsolutionParams};
use crate::bounds::cutoff::inverse_cosh_violations;
use crate::bounds::estimates::{
    barrier_comparison, completeness_violation, lower_bound_violation, sandwich_violations,
    scaling_deviation, upper_bound_violation,
};
use crate::bounds::level_set::positive_set_laplacian_integral;
use crate::bounds::profile::{lower_bound_rate, profile_inequality_violation, profile_lambda};
use crate::conformal::{euclidean_factor, to_u_power, ConformalFactor};
use crate::error::{FlowError, Result};
use crate::geometry::{Dimension, RadialField, RadialGrid};
use crate::harness::config::{IDENTITY_TOLERANCE, PDE_TOLERANCE};
use crate::harness::report::{CheckRecord, VerificationReport};
use crate::harness::scenario::{default_cutoff_constant, LOWER_BOUND_RADIUS, UPPER_BOUND_RADIUS};
use crate::solver::{
    exhaustion_run, form_residuals, solve_dirichlet, DirichletProblem, ExhaustionSettings,
    Trajectory,
};

/// Default spacing and step of the flow suites.
pub const SUITE_H: f64 = 0.02;
pub const SUITE_DT: f64 = 1e-3;
/// Seed of the randomized suites.
pub const SUITE_SEED: u64 = 20_240_601;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Lemma1,
    Lemma3,
    Lemma4,
    Lemma5,
    Lemma6,
    Lemma7,
    Rigidity,
    Theorem1,
    Fastdiff,
    Forms,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 11] = [
        "lemma1", "lemma3", "lemma4", "lemma5", "lemma6", "lemma7", "rigidity", "theorem1",
        "fastdiff", "forms", "all",
    ];

    const INDIVIDUAL: [Suite; 10] = [
        Self::Lemma1,
        Self::Lemma3,
        Self::Lemma4,
        Self::Lemma5,
        Self::Lemma6,
        Self::Lemma7,
        Self::Rigidity,
        Self::Theorem1,
        Self::Fastdiff,
        Self::Forms,
    ];

    pub fn parse(name: &str) -> Result<Self> {
        Self::NAMES
            .iter()
            .position(|&n| n == name)
            .map(|i| {
                if i < 10 {
                    Self::INDIVIDUAL[i]
                } else {
                    Self::All
                }
            })
            .ok_or_else(|| FlowError::Config(format!("unknown suite '{name}'")))
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::All => "all",
            s => {
                Self::NAMES[Self::INDIVIDUAL
                    .iter()
                    .position(|&x| x == s)
                    .expect("listed")]
            }
        }
    }
}

/// Shared euclidean-start run on `B_6`, `m = 3`, `T = 1`.
#[derive(Default)]
struct Context {
    euclidean: OnceCell<Trajectory>,
}

impl Context {
    fn euclidean(&self) -> Result<&Trajectory> {
        if let Some(t) = self.euclidean.get() {
            return Ok(t);
        }
        let traj = euclidean_run(dim(3), 6.0, 1.0, SUITE_DT)?;
        Ok(self.euclidean.get_or_init(|| traj))
    }
}

fn dim(m: u32) -> Dimension {
    Dimension::new(m).expect("m >= 3")
}

/// Dirichlet run on `B_k` from the flat metric with spacing [`SUITE_H`].
pub fn euclidean_run(dim: Dimension, k: f64, horizon: f64, dt: f64) -> Result<Trajectory> {
    let grid = RadialGrid::with_spacing(k, SUITE_H)?;
    let problem = DirichletProblem::new(&euclidean_factor(grid), k, dim, horizon)?;
    solve_dirichlet(&problem, dt)
}

fn record(id: &str, anchor: &str, violation: f64, tolerance: f64) -> CheckRecord {
    CheckRecord::new(id, anchor, violation, tolerance)
}

/// Runs a suite and collects its records into a report named after it.
pub fn run_suite(suite: Suite) -> Result<VerificationReport> {
    let ctx = Context::default();
    let suites: Vec<Suite> = match suite {
        Suite::All => Suite::INDIVIDUAL.to_vec(),
        s => vec![s],
    };
    let mut records = Vec::new();
    for s in suites {
        records.extend(suite_records(s, &ctx)?);
    }
    Ok(VerificationReport::new(suite.name(), records))
}

fn suite_records(suite: Suite, ctx: &Context) -> Result<Vec<CheckRecord>> {
    match suite {
        Suite::Lemma1 => sandwich_checks(ctx),
        Suite::Lemma3 => Ok(profile_checks()),
        Suite::Lemma4 => subsolution_checks(),
        Suite::Lemma5 => lower_bound_checks(ctx),
        Suite::Lemma6 => level_set_checks(),
        Suite::Lemma7 => upper_bound_checks(ctx),
        Suite::Rigidity => rigidity_checks(),
        Suite::Theorem1 => completeness_checks(),
        Suite::Fastdiff => fast_diffusion_checks(),
        Suite::Forms => form_agreement_checks(),
        Suite::All => unreachable!("expanded by run_suite"),
    }
}

fn sandwich_checks(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let (lo, hi) = sandwich_violations(ctx.euclidean()?);
    Ok(vec![
        record(
            "lemma1.lower",
            "inf u0 <= u(., t) - m(m-1)t",
            lo,
            PDE_TOLERANCE,
        ),
        record(
            "lemma1.upper",
            "u(., t) - m(m-1)t <= sup u0",
            hi,
            PDE_TOLERANCE,
        ),
    ])
}

fn profile_checks() -> Vec<CheckRecord> {
    let lambda = profile_lambda(1.0, 2.0);
    let outside = (32.958 - lambda).max(lambda - 32.961);
    let mut out = vec![
        record(
            "lemma3.lambda",
            "lambda(1, 2) in [32.958, 32.961]",
            outside,
            0.0,
        ),
        record(
            "lemma3.holds",
            "f'' + (c/r) f' >= -lambda f^{1+a}, a = 1, c = 2, lambda = 33",
            profile_inequality_violation(1.0, 2.0, 33.0, 10_000),
            IDENTITY_TOLERANCE,
        ),
        record(
            "lemma3.fails_below",
            "lambda = 30 violates the profile inequality",
            -profile_inequality_violation(1.0, 2.0, 30.0, 10_000),
            0.0,
        ),
    ];
    for (a, c) in [
        (1.0, 2.0),
        (4.0, 2.0 / 1f64.tanh()),
        (2.0, 3.0 / 1f64.tanh()),
    ] {
        let lambda = profile_lambda(a, c);
        let sharp = profile_inequality_violation(a, c, lambda, 10_000);
        let below = profile_inequality_violation(a, c, lambda * (1.0 - 1e-3), 10_000);
        out.push(record(
            &format!("lemma3.sharp(a={a:.3},c={c:.3})"),
            "violation <= 0 at lambda, > 0 at 0.999 lambda",
            sharp.max(-below),
            IDENTITY_TOLERANCE,
        ));
    }
    out
}

fn subsolution_checks() -> Result<Vec<CheckRecord>> {
    let grid = RadialGrid::new(1.0, 1000)?;
    [3, 4, 5]
        .into_iter()
        .map(|m| {
            let params = SubsolutionParams::for_flow(dim(m), 1.0)?;
            let samples: Vec<f64> = (0..50).map(|j| params.t0 * j as f64 / 50.0).collect();
            Ok(record(
                &format!("lemma4.subsolution(m={m})"),
                "d/dt V^{1+a} <= b Laplacian V",
                subsolution_violation(&params, grid, dim(m), &samples)?,
                1e-6,
            ))
        })
        .collect()
}

/// Fine-step run over `[0, 0.99 t0]` coupled with the centered barrier.
pub fn barrier_coupled_run(dim: Dimension) -> Result<Trajectory> {
    let grid = RadialGrid::with_spacing(6.0, SUITE_H)?;
    let u0 = euclidean_factor(grid);
    let h0 = to_u_power(&u0, dim).min_within(LOWER_BOUND_RADIUS);
    let t0 = SubsolutionParams::for_flow(dim, h0)?.t0;
    let problem = DirichletProblem::new(&u0, 6.0, dim, 0.99 * t0)?;
    solve_dirichlet(&problem, t0 / 100.0)
}

fn lower_bound_checks(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let rate = lower_bound_rate(dim(3));
    let lower = lower_bound_violation(ctx.euclidean()?, LOWER_BOUND_RADIUS, rate)?;
    let coupled = barrier_comparison(&barrier_coupled_run(dim(3))?, LOWER_BOUND_RADIUS)?;
    Ok(vec![
        record(
            "lemma5.lower_bound",
            "u(., t) >= inf_{B_2} u(., 0) - C_m t on B_1",
            lower,
            PDE_TOLERANCE,
        ),
        record(
            "lemma5.excess_monotone",
            "J(t) nonincreasing",
            coupled.max_increase(),
            1e-4,
        ),
        record(
            "lemma5.barrier",
            "V <= U on B_1 for t < t0",
            coupled.domination_violation,
            PDE_TOLERANCE,
        ),
    ])
}

/// Smooth radial function made of one to three Gaussian bumps minus an
/// offset, nonpositive at `r = grid.r_max()`.
pub fn random_bump_field(rng: &mut impl Rng, grid: RadialGrid) -> Result<RadialField> {
    let count = rng.gen_range(1..=3);
    let span = grid.r_max() - 2.0;
    let bumps: Vec<(f64, f64, f64)> = (0..count)
        .map(|_| {
            (
                rng.gen_range(0.2..2.0),
                rng.gen_range(0.0..span),
                rng.gen_range(0.1..0.6),
            )
        })
        .collect();
    let offset = rng.gen_range(0.05..0.9);
    RadialField::from_fn(grid, |r| {
        bumps
            .iter()
            .map(|&(amp, centre, width)| amp * (-((r - centre) / width).powi(2)).exp())
            .sum::<f64>()
            - offset
    })
}

fn level_set_checks() -> Result<Vec<CheckRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED);
    let grid = RadialGrid::with_spacing(5.0, 0.005)?;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..50 {
        let f = random_bump_field(&mut rng, grid)?;
        worst = worst.max(positive_set_laplacian_integral(&f, dim(3))?);
    }
    Ok(vec![record(
        "lemma6.random",
        "integral over {f > 0} of Laplacian f <= 0",
        worst,
        1e-3,
    )])
}

fn upper_bound_checks(ctx: &Context) -> Result<Vec<CheckRecord>> {
    let d = dim(3);
    let c_m = default_cutoff_constant(d, UPPER_BOUND_RADIUS)?;
    let violation = upper_bound_violation(ctx.euclidean()?, UPPER_BOUND_RADIUS, c_m)?;
    let profile = crate::bounds::cutoff::CutoffProfile::SmoothstepPower {
        r0: UPPER_BOUND_RADIUS,
        p: crate::harness::scenario::CUTOFF_POWER,
    };
    let coarse = crate::bounds::cutoff::cutoff_constant(
        &profile,
        RadialGrid::new(UPPER_BOUND_RADIUS, 400)?,
        d,
    )?;
    let fine = crate::bounds::cutoff::cutoff_constant(
        &profile,
        RadialGrid::new(UPPER_BOUND_RADIUS, 800)?,
        d,
    )?;
    Ok(vec![
        record(
            "lemma7.upper_bound",
            "u(., t) <= sup_{B_4} u(., 0) + (m-1)(m+c_m)t on B_3",
            violation,
            PDE_TOLERANCE,
        ),
        record(
            "lemma7.c_m_stable",
            "|c_m(h) - c_m(h/2)| <= 1% c_m",
            (coarse - fine).abs() / fine,
            0.01,
        ),
    ])
}

fn rigidity_checks() -> Result<Vec<CheckRecord>> {
    let grid = RadialGrid::with_spacing(8.0, SUITE_H)?;
    let problem = DirichletProblem::new(&ConformalFactor::constant(grid, 1.0)?, 8.0, dim(3), 1.0)?;
    let traj = solve_dirichlet(&problem, SUITE_DT)?;
    let mut out = vec![record(
        "rigidity.scaling",
        "u(., t) = m(m-1)t + 1",
        scaling_deviation(&traj),
        PDE_TOLERANCE,
    )];
    let far = RadialGrid::new(50.0, 5000)?;
    for m in [3, 5] {
        for eps in [0.05, 0.1, 0.4] {
            let (gradient, laplacian) = inverse_cosh_violations(eps, far, dim(m))?;
            out.push(record(
                &format!("rigidity.cutoff_gradient(m={m},eps={eps})"),
                "|grad phi|^2 <= eps^2 phi^2",
                gradient,
                1e-8,
            ));
            out.push(record(
                &format!("rigidity.cutoff_laplacian(m={m},eps={eps})"),
                "-Laplacian phi <= eps^2 phi + (m-1) eps phi",
                laplacian,
                1e-8,
            ));
        }
    }
    Ok(out)
}

fn completeness_checks() -> Result<Vec<CheckRecord>> {
    let grid = RadialGrid::with_spacing(10.0, SUITE_H)?;
    let settings = ExhaustionSettings {
        dim: dim(3),
        k_list: vec![6.0, 8.0, 10.0],
        r_obs: 3.0,
        horizon: 1.0,
        dt: SUITE_DT,
    };
    let result = exhaustion_run(&euclidean_factor(grid), &settings)?;
    let completeness = completeness_violation(&result.window_states()?, settings.dim);
    let d = &result.sup_differences;
    let growth = d
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    let strict = if growth < 0.0 {
        growth
    } else {
        growth.max(f64::MIN_POSITIVE)
    };
    Ok(vec![
        record(
            "theorem1.completeness",
            "u(., t) >= m(m-1)t on B_3 x [0, 1]",
            completeness,
            PDE_TOLERANCE,
        ),
        record("theorem1.cauchy", "d_k strictly decreasing", strict, 0.0),
    ])
}

fn fast_diffusion_checks() -> Result<Vec<CheckRecord>> {
    let grid = RadialGrid::new(1.0, 200)?;
    let mut out = Vec::new();
    for m in [3, 4, 5] {
        let params = SubsolutionParams::for_flow(dim(m), 1.0)?;
        let fine = fast_diffusion_solve(&params, grid, dim(m), params.t0 / 200.0, params.t0)?;
        let coarse = fast_diffusion_solve(&params, grid, dim(m), 1e-4, 1.0)?;
        let extinction = coarse.extinction_time.unwrap_or(1.0);
        out.push(record(
            &format!("fastdiff.dominates(m={m})"),
            "W >= V for t < t0",
            fine.barrier_excess()?.max(coarse.barrier_excess()?),
            PDE_TOLERANCE,
        ));
        out.push(record(
            &format!("fastdiff.extinction(m={m})"),
            "extinction time >= t0 - 2%",
            (0.98 * params.t0 - extinction) / params.t0,
            0.0,
        ));
    }
    Ok(out)
}

const ROUND_OFF_FLOOR: f64 = 1e-10;

/// Positive field `c0 + Σ a_j cos(k_j r)` with `c0` above the oscillation.
pub fn random_positive_field(rng: &mut impl Rng, grid: RadialGrid) -> Result<ConformalFactor> {
    let terms: Vec<(f64, f64)> = (0..rng.gen_range(1..=3))
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.2..2.0)))
        .collect();
    let c0 = terms.iter().map(|t| t.0.abs()).sum::<f64>() + rng.gen_range(0.5..3.0);
    ConformalFactor::new(RadialField::from_fn(grid, |r| {
        c0 + terms.iter().map(|&(a, k)| a * (k * r).cos()).sum::<f64>()
    })?)
}

fn form_agreement_checks() -> Result<Vec<CheckRecord>> {
    let mut rng = ChaCha8Rng::seed_from_u64(SUITE_SEED + 1);
    let mut worst_ratio = f64::INFINITY;
    for _ in 0..20 {
        let m = rng.gen_range(3..=7);
        let seed: u64 = rng.gen();
        let residuals = |n: usize| -> Result<[f64; 4]> {
            let mut field_rng = ChaCha8Rng::seed_from_u64(seed);
            let u = random_positive_field(&mut field_rng, RadialGrid::new(3.0, n)?)?;
            form_residuals(&u, dim(m))
        };
        let (coarse, fine) = (residuals(100)?, residuals(200)?);
        // forms that coincide identically (U = u at m = 6) leave round-off only
        for (c, f) in coarse
            .iter()
            .zip(&fine)
            .filter(|(c, _)| **c > ROUND_OFF_FLOOR)
        {
            worst_ratio = worst_ratio.min(c / f);
        }
    }
    Ok(vec![record(
        "forms.second_order",
        "u, U, v and divergence forms agree to O(h^2)",
        3.5 - worst_ratio,
        0.0,
    )])
}
