//! Running a configured scenario and evaluating its checks.

use std::path::{Path, PathBuf};

use crate::bounds::cutoff::{cutoff_constant, CutoffProfile};
use crate::bounds::estimates::{
    completeness_violation, lower_bound_violation, sandwich_violations, scaling_deviation,
    upper_bound_violation,
};
use crate::bounds::profile::lower_bound_rate;
use crate::error::Result;
use crate::geometry::{Dimension, RadialGrid};
use crate::harness::config::{CheckId, ScenarioConfig};
use crate::harness::output::{emit_report, emit_states_csv};
use crate::harness::report::{CheckRecord, ExhaustionSummary, SolverMeta, VerificationReport};
use crate::solver::{
    exhaustion_run, solve_dirichlet, DirichletProblem, ExhaustionResult, ExhaustionSettings,
    FlowState, Trajectory,
};

/// Radius of the lower-bound check ball.
pub const LOWER_BOUND_RADIUS: f64 = 2.0;
/// Radius of the upper-bound check ball, capped by the domain.
pub const UPPER_BOUND_RADIUS: f64 = 4.0;
/// Power of the default upper-bound cutoff.
pub const CUTOFF_POWER: f64 = 4.0;
/// Intervals per unit radius used to evaluate the cutoff constant.
const CUTOFF_RESOLUTION: usize = 200;

/// The default upper-bound cutoff on `B_r0` and its constant `c_m`.
pub fn default_cutoff_constant(dim: Dimension, r0: f64) -> Result<f64> {
    let profile = CutoffProfile::SmoothstepPower {
        r0,
        p: CUTOFF_POWER,
    };
    let n = (r0 * CUTOFF_RESOLUTION as f64).round() as usize;
    cutoff_constant(&profile, RadialGrid::new(r0, n)?, dim)
}

#[derive(Clone, Debug)]
pub enum ScenarioRun {
    Single(Trajectory),
    Exhaustion(ExhaustionResult),
}

impl ScenarioRun {
    /// The trajectory the pointwise checks run on: the largest ball for an
    /// exhaustion.
    pub fn trajectory(&self) -> &Trajectory {
        match self {
            Self::Single(t) => t,
            Self::Exhaustion(e) => e.limit_candidate(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScenarioOutcome {
    pub run: Option<ScenarioRun>,
    pub report: VerificationReport,
}

impl ScenarioOutcome {
    /// States at the configured output stamps.
    pub fn output_states(&self, config: &ScenarioConfig) -> Vec<FlowState> {
        let Some(run) = &self.run else {
            return Vec::new();
        };
        let stamps = config.output_stamps();
        let tol = 1e-9 * config.time.horizon;
        run.trajectory()
            .states
            .iter()
            .filter(|s| stamps.iter().any(|&t| (t - s.t).abs() <= tol))
            .cloned()
            .collect()
    }
}

/// Runs the scenario and evaluates the requested checks. A solver failure
/// yields a failed report rather than an error.
pub fn run_scenario(config: &ScenarioConfig) -> Result<ScenarioOutcome> {
    config.validate()?;
    let dim = config.dim();
    let u0 = config.initial_factor()?;
    let run = match &config.exhaustion {
        None => {
            let problem = DirichletProblem::new(&u0, config.grid.r_max, dim, config.time.horizon)?
                .with_output_stamps(config.output_stamps())?;
            solve_dirichlet(&problem, config.time.dt).map(ScenarioRun::Single)
        }
        Some(ex) => {
            let settings = ExhaustionSettings {
                dim,
                k_list: ex.k_list.clone(),
                r_obs: ex.r_obs,
                horizon: config.time.horizon,
                dt: config.time.dt,
            };
            exhaustion_run(&u0, &settings).map(ScenarioRun::Exhaustion)
        }
    };
    let run = match run {
        Ok(run) => run,
        Err(e) => {
            return Ok(ScenarioOutcome {
                run: None,
                report: VerificationReport::failed(&config.name, e),
            })
        }
    };

    let mut records = Vec::new();
    for check in &config.checks {
        let id = CheckId::parse(&check.id).expect("validated");
        let tolerance = check.tolerance.unwrap_or_else(|| id.default_tolerance());
        let violation = evaluate(id, &run, dim)?;
        records.push(CheckRecord::new(
            id.as_str(),
            id.anchor(),
            violation,
            tolerance,
        ));
    }
    let traj = run.trajectory();
    let mut report = VerificationReport::new(&config.name, records);
    report.solver = Some(SolverMeta {
        h: traj.problem.grid().h(),
        dt: traj.dt,
        halvings: match &run {
            ScenarioRun::Single(t) => t.halvings,
            ScenarioRun::Exhaustion(e) => e.trajectories.iter().map(|t| t.halvings).sum(),
        },
    });
    if let ScenarioRun::Exhaustion(e) = &run {
        report.exhaustion = Some(ExhaustionSummary {
            k_list: e.settings.k_list.clone(),
            r_obs: e.settings.r_obs,
            sup_differences: e.sup_differences.clone(),
        });
    }
    Ok(ScenarioOutcome {
        run: Some(run),
        report,
    })
}

fn evaluate(id: CheckId, run: &ScenarioRun, dim: Dimension) -> Result<f64> {
    let traj = run.trajectory();
    let k = traj.problem.k;
    Ok(match id {
        CheckId::Positivity => traj
            .states
            .iter()
            .map(|s| -s.u.field().min())
            .fold(f64::NEG_INFINITY, f64::max),
        CheckId::Lemma1 => {
            let (lo, hi) = sandwich_violations(traj);
            lo.max(hi)
        }
        CheckId::Lemma5 => lower_bound_violation(traj, LOWER_BOUND_RADIUS, lower_bound_rate(dim))?,
        CheckId::Lemma7 => {
            let r0 = UPPER_BOUND_RADIUS.min(k);
            upper_bound_violation(traj, r0, default_cutoff_constant(dim, r0)?)?
        }
        CheckId::Rigidity => scaling_deviation(traj),
        CheckId::Theorem1 => match run {
            ScenarioRun::Single(t) => completeness_violation(&t.states, dim),
            ScenarioRun::Exhaustion(e) => completeness_violation(&e.window_states()?, dim),
        },
        CheckId::Cauchy => match run {
            ScenarioRun::Exhaustion(e) => e
                .sup_differences
                .windows(2)
                .map(|w| w[1] - w[0])
                .fold(f64::NEG_INFINITY, f64::max),
            ScenarioRun::Single(_) => unreachable!("validated: cauchy needs an exhaustion"),
        },
    })
}

/// Paths written by [`run_to_dir`].
#[derive(Clone, Debug)]
pub struct ScenarioFiles {
    pub csv: Option<PathBuf>,
    pub report: PathBuf,
}

/// Runs a scenario and writes `<name>.csv` (when the solver completed) and
/// `<name>.report.json` into `dir`, creating it if needed.
pub fn run_to_dir(
    config: &ScenarioConfig,
    dir: &Path,
) -> Result<(VerificationReport, ScenarioFiles)> {
    let outcome = run_scenario(config)?;
    std::fs::create_dir_all(dir)?;
    let csv = match outcome.run {
        Some(_) => {
            let path = dir.join(format!("{}.csv", config.name));
            emit_states_csv(&outcome.output_states(config), config.dim(), &path)?;
            Some(path)
        }
        None => None,
    };
    let report = dir.join(format!("{}.report.json", config.name));
    emit_report(&outcome.report, &report)?;
    Ok((outcome.report, ScenarioFiles { csv, report }))
}
