//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `cargo test --test acceptance -- --nocapture` to see them all).
//!
//! Every tolerance is pinned in code. Seeds are fixed so the suite is fully
//! deterministic; parallelism never changes any asserted value.

use cuckoo_inference::*;

fn verdict(criterion: u32, pass: bool, detail: &str) {
    println!(
        "criterion {criterion}: {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
}

/// Derives small dense instance parameters from a seeded stream.
fn sweep_params(seed: Seed, trial: u64, n_max: u64) -> (usize, u32, usize) {
    let n = (mix(seed, &[1, trial]) % (n_max + 1)) as usize;
    let m = 1 + (mix(seed, &[2, trial]) % 8) as u32;
    let d = 1 + (mix(seed, &[3, trial]) % 2) as usize;
    (n, m, d)
}

/// Criterion 1 — oracle equivalence, zero tolerance: brute force,
/// implication-SAT, constructive placement, and bad-item absence agree on
/// every instance across n in [0,10], m in [1,8], d in {1,2}.
#[test]
fn criterion_1_oracle_equivalence() {
    let seed = Seed(0xACCE_0001);
    let total = 10_000u64;
    let mut infeasible = 0u64;
    for trial in 0..total {
        let (n, m, d) = sweep_params(seed, trial, 10);
        let inst = sample_instance(n, m, d, seed, trial).unwrap();
        let report = cross_validate(&inst);
        if !report.agree() {
            verdict(1, false, &format!("disagreement at trial {trial}"));
            panic!("oracle disagreement:\n{report}");
        }
        if !report.placement_found {
            infeasible += 1;
        }
    }
    verdict(
        1,
        true,
        &format!("{total} instances, 4-way agreement everywhere ({infeasible} infeasible)"),
    );
}

/// Criterion 2 — structural invariants on all nodes of ≥ 1,000 random
/// instances with n ≤ 8, zero tolerance: edge symmetry, path reversal,
/// bad-node ⟺ basic-bad-path existence, witness-path validity.
///
/// The fourth invariant is checked exactly as stated. Note that the
/// completeness direction (bad node ⟹ rooted basic bad path) is falsified
/// by forced-bridge instances — see `forced_bridge_bad_node_roots_no_basic_
/// path_d1` in the graph module for a four-item instance where every
/// witness path from a bad node must reuse one bridge item. Such instances
/// arise in a double-digit percentage of this parameter range, so this
/// criterion fails; the true invariants it gestures at are pinned green in
/// `criterion_2_supplement_true_witness_invariants`.
#[test]
fn criterion_2_structural_invariants() {
    let seed = Seed(0xACCE_0002);
    let total = 1_000u64;
    let mut edge_symmetry_violations = 0u64;
    let mut path_reversal_violations = 0u64;
    let mut badness_iff_basic_violations = 0u64;
    let mut witness_validity_violations = 0u64;
    let mut first_counterexample = String::new();

    for trial in 0..total {
        let (n, m, d) = sweep_params(seed, trial, 8);
        let inst = sample_instance(n, m, d, seed, trial).unwrap();
        let g = InferenceGraph::build(&inst);
        let reach: Vec<Vec<NodeId>> = g.nodes().map(|v| g.reachable_set(v)).collect();
        let idx = |v: NodeId| v.item * 2 + v.side.index();

        for v in g.nodes() {
            for (w, _) in g.successors(v) {
                if v.item != w.item && !g.contains_edge(w.flip(), v.flip()) {
                    edge_symmetry_violations += 1;
                }
            }
            for w in g.nodes() {
                if reach[idx(v)].contains(&w.flip()) != reach[idx(w)].contains(&v.flip()) {
                    path_reversal_violations += 1;
                }
            }
            let found = g.find_basic_bad_path(v);
            if g.is_bad_node(v) != found.is_some() {
                badness_iff_basic_violations += 1;
                if first_counterexample.is_empty() {
                    first_counterexample = format!(
                        "node {v} is bad but roots no basic bad path; instance:\n{}",
                        emit_instance(&inst)
                    );
                }
            }
            if let Some(report) = found {
                if report.verify(&inst).is_err() {
                    witness_validity_violations += 1;
                }
            }
        }
    }

    let pass = edge_symmetry_violations == 0
        && path_reversal_violations == 0
        && badness_iff_basic_violations == 0
        && witness_validity_violations == 0;
    verdict(
        2,
        pass,
        &format!(
            "{total} instances: edge symmetry {edge_symmetry_violations}, path reversal \
             {path_reversal_violations}, bad-node ⟺ basic-bad-path {badness_iff_basic_violations}, \
             witness validity {witness_validity_violations} violations"
        ),
    );
    assert!(
        pass,
        "bad-node ⟺ basic-bad-path existence does not hold on this graph family: a bad \
         node whose entry and exit are forced through both copies of one bridge item roots \
         no basic bad path. First counterexample:\n{first_counterexample}"
    );
}

/// Green supplement to criterion 2: the invariant directions that actually
/// hold, at the same sample size and zero tolerance — witness soundness,
/// badness ⟺ (not-necessarily-basic) bad-path existence, and exactness of
/// the basic-path search against brute enumeration.
#[test]
fn criterion_2_supplement_true_witness_invariants() {
    fn basic_path_exists_by_enumeration(g: &InferenceGraph, v: NodeId) -> bool {
        fn go(g: &InferenceGraph, goal: NodeId, cur: NodeId, used: &mut Vec<usize>) -> bool {
            for (w, _) in g.successors(cur) {
                if w == goal {
                    return true;
                }
                if used.contains(&w.item) {
                    continue;
                }
                used.push(w.item);
                if go(g, goal, w, used) {
                    return true;
                }
                used.pop();
            }
            false
        }
        let mut used = vec![v.item];
        go(g, v.flip(), v, &mut used)
    }

    let seed = Seed(0xACCE_0002);
    let total = 1_000u64;
    let mut blocked_bad_nodes = 0u64;
    for trial in 0..total {
        let (n, m, d) = sweep_params(seed, trial, 8);
        let inst = sample_instance(n, m, d, seed, trial).unwrap();
        let g = InferenceGraph::build(&inst);
        for v in g.nodes() {
            let bad = g.is_bad_node(v);
            let reaches_own_flip = g.reachable_set(v).contains(&v.flip());
            assert_eq!(bad, reaches_own_flip, "badness ⟺ bad-path existence at {v}");
            let found = g.find_basic_bad_path(v);
            assert_eq!(
                found.is_some(),
                basic_path_exists_by_enumeration(&g, v),
                "witness search must be exact at {v}:\n{}",
                emit_instance(&inst)
            );
            match found {
                Some(report) => {
                    assert!(bad);
                    assert_eq!(report.verify(&inst), Ok(()));
                }
                None if bad => blocked_bad_nodes += 1,
                None => {}
            }
        }
    }
    verdict(
        2,
        true,
        &format!(
            "(supplement) soundness, bad ⟺ bad-path, and search exactness hold everywhere; \
             {blocked_bad_nodes} bad nodes had no basic witness, matching enumeration"
        ),
    );
}

/// Criterion 3 — the failure-probability bound at desk scale: n=1000,
/// eps=0.5, d=1, m=1500, 10,000 trials; Wilson 95% upper limit ≤ 0.036.
#[test]
fn criterion_3_failure_bound_desk_scale() {
    let cell = CellConfig {
        n: 1000,
        epsilon: 0.5,
        d: 1,
        rule: CapacityRule::Classic,
    };
    let s = run_cell(&cell, 10_000, Seed(0xACCE_0003), 0);
    assert_eq!(s.m, 1500);
    assert!(
        (s.bound - 0.036).abs() < 1e-12,
        "quoted constant drifted: {}",
        s.bound
    );
    let pass = s.ci_hi <= 0.036;
    verdict(
        3,
        pass,
        &format!(
            "failures {}/{} rate {:.4e}, Wilson hi {:.4e} ≤ bound 3.6e-2",
            s.failures, s.trials, s.rate, s.ci_hi
        ),
    );
    assert!(pass, "Wilson upper {} exceeds the bound 0.036", s.ci_hi);
}

/// Criterion 4 — failure rate scales down with n at fixed eps=0.5:
/// n ∈ {500, 1000, 2000}, 20,000 trials each, weakly decreasing within
/// confidence intervals (one-sided overlap allowed).
#[test]
fn criterion_4_one_over_n_scaling() {
    let seed = Seed(0xACCE_0004);
    let mut rows = Vec::new();
    for n in [500usize, 1000, 2000] {
        let cell = CellConfig {
            n,
            epsilon: 0.5,
            d: 1,
            rule: CapacityRule::Classic,
        };
        rows.push(run_cell(&cell, 20_000, seed, 0));
    }
    let mut pass = true;
    for w in rows.windows(2) {
        if w[1].ci_lo > w[0].ci_hi {
            pass = false;
        }
    }
    verdict(
        4,
        pass,
        &format!(
            "rates {:.4e} (n=500) ≥~ {:.4e} (n=1000) ≥~ {:.4e} (n=2000), intervals overlap or decrease",
            rows[0].rate, rows[1].rate, rows[2].rate
        ),
    );
    assert!(pass, "failure rate increased significantly with n: {rows:#?}");
}

/// Criterion 5 — d-dimensional capacity rule: d=2, eps=0.5, n=250, m=1500,
/// 10,000 trials; Wilson upper limit ≤ failure_bound(eps=0.5, n=250) = 0.144.
#[test]
fn criterion_5_d_dimensional_capacity() {
    let cell = CellConfig {
        n: 250,
        epsilon: 0.5,
        d: 2,
        rule: CapacityRule::DimensionSquared,
    };
    let s = run_cell(&cell, 10_000, Seed(0xACCE_0005), 0);
    assert_eq!(s.m, 1500);
    assert!(
        (s.bound - 0.144).abs() < 1e-12,
        "quoted constant drifted: {}",
        s.bound
    );
    let pass = s.ci_hi <= 0.144;
    verdict(
        5,
        pass,
        &format!(
            "failures {}/{} rate {:.4e}, Wilson hi {:.4e} ≤ bound 1.44e-1",
            s.failures, s.trials, s.rate, s.ci_hi
        ),
    );
    assert!(pass, "Wilson upper {} exceeds the bound 0.144", s.ci_hi);
}

/// Criterion 6 — per-edge collision probability: for (d,m) in
/// {(2,100),(3,100),(2,1000)}, the Monte Carlo intersection frequency of two
/// random d-vectors over 10^6 samples matches the exactly computed value
/// within 3 sigma, and the exact value never exceeds d^2/m.
#[test]
fn criterion_6_edge_probability() {
    let seed = Seed(0xACCE_0006);
    let samples = 1_000_000u64;
    let mut detail = String::new();
    for (case, (d, m)) in [(2usize, 100u32), (3, 100), (2, 1000)].into_iter().enumerate() {
        let exact = edge_probability(d, m);
        let cap = edge_probability_cap(d, m);
        assert!(exact <= cap, "exact {exact} exceeds cap {cap} at d={d} m={m}");
        let mut hits = 0u64;
        let mut a = [0u32; 3];
        let mut b = [0u32; 3];
        for s in 0..samples {
            for c in 0..d {
                a[c] = uniform(seed, &[case as u64, s, 0, c as u64], u64::from(m)) as u32;
                b[c] = uniform(seed, &[case as u64, s, 1, c as u64], u64::from(m)) as u32;
            }
            if a[..d].iter().any(|x| b[..d].contains(x)) {
                hits += 1;
            }
        }
        let freq = hits as f64 / samples as f64;
        let sigma = (exact * (1.0 - exact) / samples as f64).sqrt();
        let dev = (freq - exact).abs() / sigma;
        assert!(
            dev <= 3.0,
            "d={d} m={m}: freq {freq} vs exact {exact} is {dev:.2} sigma"
        );
        detail.push_str(&format!("(d={d},m={m}): {dev:.2}σ ≤ 3σ, {exact:.4e} ≤ {cap:.4e}; "));
    }
    verdict(6, true, detail.trim_end_matches("; "));
}

/// Criterion 7 — per-cell identity: failures = bad_item_events on every cell
/// of every experiment run, zero tolerance. (Each trial also asserts this
/// internally; criteria 3-5 and 8 would already have panicked on violation.)
#[test]
fn criterion_7_failures_equal_bad_item_events() {
    let config = ExperimentConfig {
        n_grid: vec![100, 200],
        epsilon_grid: vec![0.2, 0.5],
        d_grid: vec![1, 2],
        trials: 2_000,
        seed: Seed(0xACCE_0007),
        rule: CapacityRule::DimensionSquared,
        workers: 0,
    };
    let rows = run_sweep(&config).unwrap();
    let mut pass = true;
    for r in &rows {
        if r.failures != r.bad_item_events {
            pass = false;
        }
    }
    let total_failures: u64 = rows.iter().map(|r| r.failures).sum();
    verdict(
        7,
        pass,
        &format!(
            "{} cells × {} trials, failures = bad_item_events everywhere ({} failures total)",
            rows.len(),
            config.trials,
            total_failures
        ),
    );
    assert!(pass, "identity violated: {rows:#?}");
}

/// Criterion 8 — determinism: the full sweep at worker counts 1 and max
/// yields byte-identical CSV, and repeated runs are byte-identical.
#[test]
fn criterion_8_deterministic_csv() {
    let mut config = ExperimentConfig {
        n_grid: vec![200, 400],
        epsilon_grid: vec![0.5, 1.0],
        d_grid: vec![1, 2],
        trials: 1_500,
        seed: Seed(0xACCE_0008),
        rule: CapacityRule::DimensionSquared,
        workers: 1,
    };
    let csv_single = summaries_to_csv(&run_sweep(&config).unwrap());
    let csv_single_again = summaries_to_csv(&run_sweep(&config).unwrap());
    config.workers = 0; // library default: all cores
    let csv_parallel = summaries_to_csv(&run_sweep(&config).unwrap());
    let pass = csv_single == csv_parallel && csv_single == csv_single_again;
    verdict(
        8,
        pass,
        &format!(
            "8-cell sweep, {} bytes of CSV identical across reruns and worker counts 1/max",
            csv_single.len()
        ),
    );
    assert!(pass, "CSV differs across worker counts or reruns");
    assert!(csv_single.starts_with(
        "n,m,d,epsilon,trials,failures,rate,ci_lo,ci_hi,bound,max_path_len,mean_path_len\n"
    ));
}
