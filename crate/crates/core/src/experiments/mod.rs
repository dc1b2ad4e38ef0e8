//! Reproduction harness: training suites, the variance scan and resource
//! scans. Every work item owns a seed derived from the run's base seed, so
//! results do not depend on scheduling.

mod resources;
mod suite;
mod variance;

pub use resources::{run_resource_scan, ResourceFamily, ResourceRecord};
pub use suite::{
    run_training_suite, write_suite, CliquePolicy, ExperimentSpec, RunResult, SuiteResult, SuiteSummary, SummaryEntry,
};
pub use variance::{least_squares_slope, run_variance_scan, VarianceFamily, VarianceRecord, VarianceScanConfig, VarianceScanResult, VarianceSummary};

use crate::graph::{moralize, AnyGraph, UndirectedGraph};

/// Undirected view of a generated graph; DAGs are moralized.
pub(crate) fn undirected_view(g: AnyGraph) -> UndirectedGraph {
    match g {
        AnyGraph::Undirected(g) => g,
        AnyGraph::Directed(d) => moralize(&d),
    }
}

pub(crate) fn model_code(kind: crate::hamiltonian::ModelKind) -> u64 {
    kind as u64
}
