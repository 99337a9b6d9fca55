//! Closed-form barriers and constants, and checks of the corresponding
//! estimates against numerical solutions.

pub mod barrier;
pub mod cutoff;
pub mod estimates;
pub mod level_set;
pub mod profile;

pub use barrier::{
    barrier_excess_integral, fast_diffusion_solve, subsolution, subsolution_violation,
    FastDiffusionRun, SubsolutionParams,
};
pub use cutoff::{cutoff_constant, inverse_cosh_violations, CutoffProfile};
pub use estimates::{
    barrier_comparison, completeness_violation, lower_bound_violation, minimax_lower,
    sandwich_violations, scaling_deviation, scaling_solution, upper_bound_violation,
    BarrierComparison,
};
pub use level_set::{positive_set_laplacian_integral, positivity_intervals};
pub use profile::{lower_bound_rate, profile_inequality_violation, profile_lambda};
