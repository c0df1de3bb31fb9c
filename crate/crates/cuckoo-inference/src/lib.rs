//! Placement feasibility for two-table cuckoo hashing, decided through an
//! implication graph over per-item table choices.
//!
//! The crate covers the d-dimensional generalization (each item claims `d`
//! slots per table), constructs legal placements when they exist, proves
//! infeasibility with concrete witness paths, evaluates the closed-form
//! failure bounds, and validates everything empirically with a reproducible
//! Monte Carlo harness cross-checked against independent oracles.

mod buckets;

pub mod bounds;
pub mod graph;
pub mod harness;
pub mod instance;
pub mod oracles;
pub mod rng;
pub mod stats;

pub use bounds::{
    bad_item_bound, bad_path_root_bound, edge_probability, edge_probability_cap, failure_bound,
    labeled_path_count_bound, BoundParams, BoundsError, CapacityRule,
};
pub use graph::{place_all, BadPathReport, InferenceGraph, NodeId};
pub use harness::{
    bad_path_lengths, census_to_csv, path_length_census, run_cell, run_sweep, summaries_to_csv,
    CellCensus, CellConfig, ExperimentConfig, HarnessError, TrialSummary,
};
pub use instance::{
    emit_instance, is_legal, parse_instance, sample_instance, Instance, ModelError, ParseError,
    PartialPlacement, Placement, Side,
};
pub use oracles::{
    brute_force_feasible, cross_validate, cross_validate_with_graph, implication_sat_feasible,
    CrossValidateReport, OracleError, OracleVerdict, BRUTE_FORCE_CAP,
};
pub use rng::{mix, splitmix64, uniform, Seed};
pub use stats::{wilson_interval, Z_95};
