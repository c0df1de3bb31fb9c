//! Monte Carlo estimation of failure probabilities against the closed-form
//! bounds.
//!
//! A *cell* fixes `(n, epsilon, d)` plus a capacity rule and samples many
//! independent instances. Per trial the harness runs the placement
//! algorithm, independently re-derives whether a bad item exists, and
//! asserts the two verdicts coincide — the correctness claim behind the
//! whole construction, restated as a runtime check on every single trial.
//! Failing trials additionally record the lengths of the witness paths found
//! at every bad node.
//!
//! Aggregation uses only integer counters (sums, maxima, histograms), so
//! results are bit-identical regardless of worker count or scheduling.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::bounds::{failure_bound, BoundParams, CapacityRule};
use crate::buckets::SlotIndex;
use crate::graph::{place_all_with_index, InferenceGraph, TraversalScratch};
use crate::instance::{sample_instance, Instance, Side};
use crate::rng::{mix, Seed};
use crate::stats::{wilson_interval, Z_95};

#[derive(thiserror::Error, Debug, PartialEq, Eq)]
pub enum HarnessError {
    #[error("trials must be ≥ 1")]
    ZeroTrials,
    #[error("every parameter grid must be nonempty")]
    EmptyGrid,
}

/// One experiment cell: the instance distribution being sampled.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct CellConfig {
    pub n: usize,
    pub epsilon: f64,
    pub d: usize,
    pub rule: CapacityRule,
}

impl CellConfig {
    pub fn table_size(&self) -> u32 {
        self.rule.table_size(self.n, self.epsilon, self.d)
    }
}

/// A full sweep: the Cartesian product of the grids, `trials` instances per
/// cell. `workers` only changes scheduling, never results (0 = library
/// default).
#[derive(Clone, PartialEq, Debug)]
pub struct ExperimentConfig {
    pub n_grid: Vec<usize>,
    pub epsilon_grid: Vec<f64>,
    pub d_grid: Vec<usize>,
    pub trials: u64,
    pub seed: Seed,
    pub rule: CapacityRule,
    pub workers: usize,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.trials == 0 {
            return Err(HarnessError::ZeroTrials);
        }
        if self.n_grid.is_empty() || self.epsilon_grid.is_empty() || self.d_grid.is_empty() {
            return Err(HarnessError::EmptyGrid);
        }
        Ok(())
    }

    /// Cells in emission order: `n` outermost, then `epsilon`, then `d`.
    pub fn cells(&self) -> Vec<CellConfig> {
        let mut out = Vec::new();
        for &n in &self.n_grid {
            for &epsilon in &self.epsilon_grid {
                for &d in &self.d_grid {
                    out.push(CellConfig {
                        n,
                        epsilon,
                        d,
                        rule: self.rule,
                    });
                }
            }
        }
        out
    }

    /// Sampling seed of the cell at `index` in [`Self::cells`] order. Any
    /// cell can be re-run in isolation by passing this seed to [`run_cell`].
    pub fn cell_seed(&self, index: usize) -> Seed {
        Seed(mix(self.seed, &[index as u64]))
    }
}

/// Aggregate record of one cell.
#[derive(Clone, PartialEq, Debug)]
pub struct TrialSummary {
    pub n: usize,
    pub m: u32,
    pub d: usize,
    pub epsilon: f64,
    pub trials: u64,
    /// Trials on which no legal placement exists.
    pub failures: u64,
    /// Trials on which some item was bad (must equal `failures`).
    pub bad_item_events: u64,
    pub rate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    /// The closed-form failure bound for this cell.
    pub bound: f64,
    pub max_path_len: u32,
    pub mean_path_len: f64,
}

/// Per-cell histogram of witness-path lengths over failing trials.
#[derive(Clone, PartialEq, Debug)]
pub struct CellCensus {
    pub n: usize,
    pub m: u32,
    pub d: usize,
    pub epsilon: f64,
    pub trials: u64,
    pub failures: u64,
    /// length -> number of bad-node roots whose witness had that length.
    pub histogram: BTreeMap<u32, u64>,
}

#[derive(Default, Clone)]
struct CellAccum {
    failures: u64,
    bad_item_events: u64,
    path_len_sum: u64,
    path_count: u64,
    path_max: u32,
    histogram: BTreeMap<u32, u64>,
}

impl CellAccum {
    fn merge(mut self, other: CellAccum) -> CellAccum {
        self.failures += other.failures;
        self.bad_item_events += other.bad_item_events;
        self.path_len_sum += other.path_len_sum;
        self.path_count += other.path_count;
        self.path_max = self.path_max.max(other.path_max);
        for (len, count) in other.histogram {
            *self.histogram.entry(len).or_insert(0) += count;
        }
        self
    }
}

/// Lengths of the basic bad paths found at every bad node of the instance.
/// Bad nodes where the exhaustive search finds no basic witness (the rare
/// forced-bridge structure) contribute nothing.
pub fn bad_path_lengths(inst: &Instance) -> Vec<u32> {
    let g = InferenceGraph::build(inst);
    let mut lengths = Vec::new();
    for v in g.nodes() {
        if let Some(report) = g.find_basic_bad_path(v) {
            lengths.push(report.len() as u32);
        }
    }
    lengths
}

fn run_trial(cell: &CellConfig, m: u32, seed: Seed, trial: u64) -> CellAccum {
    let inst = sample_instance(cell.n, m, cell.d, seed, trial)
        .expect("cell parameters are validated");
    let mut index = SlotIndex::build(&inst);
    let mut scratch = TraversalScratch::new(inst.n());

    // Independent per-item badness scan on the initial graph.
    let mut bad_item = false;
    for item in 0..inst.n() as u32 {
        if scratch.is_bad_node_fast(&inst, &index, item, Side::A0)
            && scratch.is_bad_node_fast(&inst, &index, item, Side::A1)
        {
            bad_item = true;
            break;
        }
    }

    let failed = place_all_with_index(&inst, &mut index, &mut scratch).is_none();
    // The two placement lemmas in one line: construction succeeds exactly
    // when no item is bad. A mismatch is a bug, never a sample.
    assert_eq!(
        failed, bad_item,
        "placement/badness mismatch on n={} m={} d={} seed={:?} trial={}",
        cell.n, m, cell.d, seed, trial
    );

    let mut acc = CellAccum {
        failures: u64::from(failed),
        bad_item_events: u64::from(bad_item),
        ..CellAccum::default()
    };
    if failed {
        for len in bad_path_lengths(&inst) {
            acc.path_len_sum += u64::from(len);
            acc.path_count += 1;
            acc.path_max = acc.path_max.max(len);
            *acc.histogram.entry(len).or_insert(0) += 1;
        }
    }
    acc
}

fn run_cell_accum(cell: &CellConfig, trials: u64, seed: Seed, workers: usize) -> (u32, CellAccum) {
    let m = cell.table_size();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    let acc = pool.install(|| {
        (0..trials)
            .into_par_iter()
            .map(|trial| run_trial(cell, m, seed, trial))
            .reduce(CellAccum::default, CellAccum::merge)
    });
    (m, acc)
}

/// Samples `trials` instances of one cell and summarizes failures against
/// the closed-form bound. Deterministic in `(cell, trials, seed)`.
pub fn run_cell(cell: &CellConfig, trials: u64, seed: Seed, workers: usize) -> TrialSummary {
    let (m, acc) = run_cell_accum(cell, trials, seed, workers);
    let params = BoundParams::new(cell.n, m, cell.epsilon, cell.d, cell.rule)
        .expect("rule-derived table size always validates");
    let (ci_lo, ci_hi) = wilson_interval(acc.failures, trials, Z_95);
    assert_eq!(acc.failures, acc.bad_item_events);
    TrialSummary {
        n: cell.n,
        m,
        d: cell.d,
        epsilon: cell.epsilon,
        trials,
        failures: acc.failures,
        bad_item_events: acc.bad_item_events,
        rate: acc.failures as f64 / trials as f64,
        ci_lo,
        ci_hi,
        bound: failure_bound(&params),
        max_path_len: acc.path_max,
        mean_path_len: if acc.path_count == 0 {
            0.0
        } else {
            acc.path_len_sum as f64 / acc.path_count as f64
        },
    }
}

/// Runs every cell of the sweep in grid order.
pub fn run_sweep(config: &ExperimentConfig) -> Result<Vec<TrialSummary>, HarnessError> {
    config.validate()?;
    Ok(config
        .cells()
        .iter()
        .enumerate()
        .map(|(idx, cell)| run_cell(cell, config.trials, config.cell_seed(idx), config.workers))
        .collect())
}

/// Runs the sweep collecting witness-path length histograms per cell.
pub fn path_length_census(config: &ExperimentConfig) -> Result<Vec<CellCensus>, HarnessError> {
    config.validate()?;
    Ok(config
        .cells()
        .iter()
        .enumerate()
        .map(|(idx, cell)| {
            let (m, acc) = run_cell_accum(cell, config.trials, config.cell_seed(idx), config.workers);
            assert_eq!(acc.failures, acc.bad_item_events);
            CellCensus {
                n: cell.n,
                m,
                d: cell.d,
                epsilon: cell.epsilon,
                trials: config.trials,
                failures: acc.failures,
                histogram: acc.histogram,
            }
        })
        .collect())
}

/// Formats a float with six significant digits, scientific notation.
fn sig6(x: f64) -> String {
    format!("{x:.5e}")
}

pub const CSV_HEADER: &str =
    "n,m,d,epsilon,trials,failures,rate,ci_lo,ci_hi,bound,max_path_len,mean_path_len";

/// Renders summaries as CSV: fixed schema, LF endings, floats with six
/// significant digits. Byte-stable for fixed inputs.
pub fn summaries_to_csv(rows: &[TrialSummary]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.n,
            r.m,
            r.d,
            sig6(r.epsilon),
            r.trials,
            r.failures,
            sig6(r.rate),
            sig6(r.ci_lo),
            sig6(r.ci_hi),
            sig6(r.bound),
            r.max_path_len,
            sig6(r.mean_path_len),
        ));
    }
    out
}

pub const CENSUS_CSV_HEADER: &str = "n,m,d,epsilon,trials,failures,path_len,count";

/// Renders census histograms as CSV, one row per `(cell, length)` pair.
pub fn census_to_csv(rows: &[CellCensus]) -> String {
    let mut out = String::from(CENSUS_CSV_HEADER);
    out.push('\n');
    for r in rows {
        for (&len, &count) in &r.histogram {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.n,
                r.m,
                r.d,
                sig6(r.epsilon),
                r.trials,
                r.failures,
                len,
                count
            ));
        }
    }
    out
}
