//! Scenario files, runs with collision audits, comparison tables and
//! run exports.

mod export;
mod report;
mod runner;
mod scenario;


pub use export::{export_run, read_trajectory_csv, trajectory_csv, ExportPaths};
pub use report::{compare, CompareOptions, ComparisonRow, ComparisonTable};
pub use runner::{collision_audit, run_scenario, ScenarioRun};
pub use scenario::{
    load_suite, CostKind, GeneratedGrid, PlannerKind, PlannerSpec, Scenario, ScenarioFile, TaskSpec, WorldSpec,
    SCENARIO_SCHEMA,
};
