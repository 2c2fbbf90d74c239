//! Reproduction harness: seeded instances, an instance file format, and an
//! experiment runner that emits traces and a summary table.

mod experiment;
mod instance;
mod rng;

pub use experiment::{
    run_experiment, run_on_lasso, run_on_saddle, support_recovered, write_trace, Experiment, ExperimentConfig,
    ExperimentError, ExperimentReport, SolverName, SummaryRow, SUPPORT_THRESHOLD, TRACE_HEADER,
};
pub use instance::{
    generate_lasso_instance, load_custom_instance, parse_instance, save_instance, sparse_truth, write_instance,
    GeneratedInstance, InstanceError, InstanceFile, InstanceKind, HEADER,
};
pub use rng::NormalStream;
