//! Pathwise processes on `[0, ∞)`: the increasing driver `A` with its time
//! change, step integrands and the exact Stieltjes engine, the pivot-space
//! jump path `h`, dual-valued drift densities with their size processes,
//! time-changed dyadic partition hierarchies, and composed scenarios
//! `v = Σ_i ∫ v_i* dA + h` with their regularity processes.

pub mod driver;
pub mod dual_step;
pub mod ensemble;
pub mod martingale;
pub mod partition;
pub mod path;
pub mod quad;
pub mod scenario;
pub mod step;
pub mod time_change;

pub use driver::{DensitySegment, IncreasingDriver, Window};
pub use dual_step::DualStepProcess;
pub use ensemble::{ensemble_martingale_check, EnsembleReport, MIN_ENSEMBLE};
pub use martingale::MartingalePath;
pub use partition::{build_partitions, step_approximation, PartitionHierarchy, Side};
pub use path::{HPath, ProjectedPath};
pub use quad::{gauss16, integrate_resolved};
pub use scenario::{random_family, random_scenario, RandomScenarioSpec, Scenario, ScenarioPath};
pub use step::{kappa, Convention, RoundingVariant, StepFunction, StepPath};
pub use time_change::{
    increment_target, lipschitz_slack, squared_increment_sums, substitution_check,
    SubstitutionReport,
};
