//! Source inference for the discrete-time SIS (susceptible-infected-
//! susceptible) epidemic model on graphs.
//!
//! The toolkit covers four layers:
//!
//! * [`graph`] — adjacency-list graphs, BFS utilities, minimal spanning
//!   subtrees of a snapshot, regular-tree generators.
//! * [`sis`] — the slotted SIS process itself: simulation, path validity,
//!   and exact path log-likelihoods.
//! * [`inference`] — most-likely infection paths: a closed-form schedule
//!   construction on trees and an exact max-product dynamic program on small
//!   general graphs.
//! * [`estimators`] — source estimators built on top: the Jordan infection
//!   center (optimal on regular trees), distance centrality, and an
//!   exhaustive likelihood oracle.
//!
//! [`experiments`] reproduces the regular-tree benchmark comparing the Jordan
//! center against distance centrality, and [`verify`] is a randomized
//! self-check suite for the structural claims the estimators rely on.

pub mod error;
pub mod estimators;
pub mod experiments;
pub mod graph;
pub mod inference;
pub mod seeding;
pub mod sis;
pub mod verify;

pub use error::{Error, Result};
pub use estimators::{
    distance_centrality, exhaustive_oracle_estimate, jordan_centers, Estimate, Method, TieBreak,
};
pub use experiments::{
    render_summary_csv, render_trials_csv, run_experiment, write_summary_csv, write_trials_csv,
    ExperimentConfig, SummaryStats, TrialRecord,
};
pub use graph::{parse_edge_list, regular_tree, to_edge_list, Graph, InfectedSet, NodeId};
pub use inference::{
    construct_most_likely_path, feasible_window, latest_schedule, max_path_log_likelihood,
    optimal_elapsed_time, viterbi_max_path, viterbi_max_path_scheduled, InfectionSchedule,
    MaxPathResult, TimeWindow,
    EXACT_MAX_NODES, EXACT_MAX_T,
};
pub use sis::{simulate, InfectionPath, NodeStates, SisParams};
pub use verify::{run_suite, Suite, SuiteOutcome};
