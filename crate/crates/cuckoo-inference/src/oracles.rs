//! Independent ground-truth deciders for placement feasibility.
//!
//! Two referees with deliberately different structure back-stop the graph
//! machinery. The exhaustive oracle walks the full side-assignment space
//! with occupancy bookkeeping and shares nothing with the inference graph.
//! The implication-SAT oracle encodes the side choice of each item as a
//! boolean variable, derives conflict clauses by a naive pairwise scan, and
//! decides satisfiability through strongly connected components.

use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::graph::{place_all, InferenceGraph, NodeId};
use crate::instance::{emit_instance, is_legal, Instance, Placement, Side};

/// Cap on exhaustive enumeration: 2^20 assignments with an O(n d) legality
/// check per branch keeps the full suite at desk scale.
pub const BRUTE_FORCE_CAP: usize = 20;

#[derive(thiserror::Error, Debug, PartialEq, Eq)]
pub enum OracleError {
    #[error("instance too large for brute force: n={n} exceeds cap {cap}")]
    TooLarge { n: usize, cap: usize },
}

/// Outcome of an exhaustive feasibility check.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OracleVerdict {
    pub feasible: bool,
    /// The lexicographically first legal assignment (`A0 < A1`, item order),
    /// when one exists.
    pub witness: Option<Placement>,
}

/// Decides feasibility by enumerating side assignments in lexicographic
/// order. Prefix branches that already collide are cut, which cannot change
/// the verdict or the first witness because adding items never removes a
/// conflict.
pub fn brute_force_feasible(inst: &Instance) -> Result<OracleVerdict, OracleError> {
    let n = inst.n();
    if n > BRUTE_FORCE_CAP {
        return Err(OracleError::TooLarge {
            n,
            cap: BRUTE_FORCE_CAP,
        });
    }
    let mut sides: Vec<Side> = Vec::with_capacity(n);
    let mut occupied: std::collections::HashSet<(Side, u32)> = std::collections::HashSet::new();

    fn search(
        inst: &Instance,
        item: usize,
        sides: &mut Vec<Side>,
        occupied: &mut std::collections::HashSet<(Side, u32)>,
    ) -> bool {
        if item == inst.n() {
            return true;
        }
        'side: for side in Side::BOTH {
            let slots = inst.hash_vector(item, side);
            let mut claimed = 0;
            for &slot in slots {
                if !occupied.insert((side, slot)) {
                    for &s in &slots[..claimed] {
                        occupied.remove(&(side, s));
                    }
                    continue 'side;
                }
                claimed += 1;
            }
            sides.push(side);
            if search(inst, item + 1, sides, occupied) {
                return true;
            }
            sides.pop();
            for &slot in slots {
                occupied.remove(&(side, slot));
            }
        }
        false
    }

    if search(inst, 0, &mut sides, &mut occupied) {
        let witness = Placement::new(sides);
        debug_assert!(is_legal(inst, &witness));
        Ok(OracleVerdict {
            feasible: true,
            witness: Some(witness),
        })
    } else {
        Ok(OracleVerdict {
            feasible: false,
            witness: None,
        })
    }
}

/// Decides feasibility as a 2-SAT problem: one variable per item (which
/// table it uses), a binary clause per same-side conflict, a unit clause per
/// self-conflicting vector. Satisfiable iff no variable shares a strongly
/// connected component with its own negation.
///
/// Conflicts are derived by a pairwise scan and components come from an
/// external library, so this referee shares neither the bucketing nor the
/// traversal code of the inference graph. It scales well past the brute
/// force cap.
pub fn implication_sat_feasible(inst: &Instance) -> bool {
    let n = inst.n();
    let mut g: DiGraph<(), ()> = DiGraph::with_capacity(2 * n, 0);
    for _ in 0..2 * n {
        g.add_node(());
    }
    // Literal (item, side) sits at index 2*item + side: "item occupies side".
    let lit = |item: usize, side: Side| NodeIndex::new(2 * item + side.index());
    for side in Side::BOTH {
        for i in 0..n {
            if inst.has_duplicate_coord(i, side) {
                g.add_edge(lit(i, side), lit(i, side.flip()), ());
            }
            for j in (i + 1)..n {
                if inst.collides_on(side, i, j) {
                    g.add_edge(lit(i, side), lit(j, side.flip()), ());
                    g.add_edge(lit(j, side), lit(i, side.flip()), ());
                }
            }
        }
    }
    let sccs = tarjan_scc(&g);
    let mut comp = vec![usize::MAX; 2 * n];
    for (id, scc) in sccs.iter().enumerate() {
        for &node in scc {
            comp[node.index()] = id;
        }
    }
    (0..n).all(|i| comp[2 * i] != comp[2 * i + 1])
}

/// Pairwise comparison of every feasibility decider on one instance.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CrossValidateReport {
    pub n: usize,
    /// `None` when the instance exceeds the brute force cap.
    pub brute_force: Option<bool>,
    pub implication_sat: bool,
    pub placement_found: bool,
    pub no_bad_item: bool,
    /// Directed edges present in a freshly built graph but absent from the
    /// graph that was checked (non-empty only when a caller supplied its own
    /// graph, e.g. a corrupted fixture).
    pub missing_edges: Vec<(NodeId, NodeId)>,
    /// Edges present in the checked graph but not justified by the instance.
    pub extra_edges: Vec<(NodeId, NodeId)>,
    /// Canonical instance text, kept when the deciders disagree so the case
    /// can be replayed.
    pub instance_text: Option<String>,
}

impl CrossValidateReport {
    pub fn agree(&self) -> bool {
        let reference = self.implication_sat;
        self.brute_force.is_none_or(|b| b == reference)
            && self.placement_found == reference
            && self.no_bad_item == reference
    }
}

impl fmt::Display for CrossValidateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.agree() {
            if self.n == 0 {
                write!(f, "agree (vacuous)")
            } else {
                write!(f, "agree")
            }
        } else {
            write!(
                f,
                "disagree: brute_force={:?} implication_sat={} placement_found={} no_bad_item={}",
                self.brute_force, self.implication_sat, self.placement_found, self.no_bad_item
            )?;
            if !self.missing_edges.is_empty() || !self.extra_edges.is_empty() {
                write!(
                    f,
                    "; graph differs from instance (missing {:?}, extra {:?})",
                    self.missing_edges, self.extra_edges
                )?;
            }
            if let Some(text) = &self.instance_text {
                write!(f, "\ninstance for reproduction:\n{text}")?;
            }
            Ok(())
        }
    }
}

/// Runs every decider on the instance and reports agreement. Brute force is
/// skipped above its cap; the remaining three must still agree.
pub fn cross_validate(inst: &Instance) -> CrossValidateReport {
    let g = InferenceGraph::build(inst);
    cross_validate_with_graph(inst, &g)
}

/// As [`cross_validate`], but judges badness on a caller-supplied graph and
/// reports any edges where that graph deviates from the instance. Lets tests
/// verify that a corrupted graph is caught rather than silently trusted.
pub fn cross_validate_with_graph(inst: &Instance, g: &InferenceGraph) -> CrossValidateReport {
    let n = inst.n();
    let brute_force = brute_force_feasible(inst).ok().map(|v| v.feasible);
    let implication_sat = implication_sat_feasible(inst);
    let placement_found = place_all(inst).is_some();
    let no_bad_item = (0..n).all(|i| !g.is_bad_item(i));

    let fresh = InferenceGraph::build(inst);
    let mut missing_edges = Vec::new();
    let mut extra_edges = Vec::new();
    for v in fresh.nodes() {
        for (w, _) in fresh.successors(v) {
            if !g.contains_edge(v, w) {
                missing_edges.push((v, w));
            }
        }
        for (w, _) in g.successors(v) {
            if !fresh.contains_edge(v, w) {
                extra_edges.push((v, w));
            }
        }
    }

    let mut report = CrossValidateReport {
        n,
        brute_force,
        implication_sat,
        placement_found,
        no_bad_item,
        missing_edges,
        extra_edges,
        instance_text: None,
    };
    if !report.agree() {
        report.instance_text = Some(emit_instance(inst));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::sample_instance;
    use crate::rng::Seed;

    fn inst1(m: u32, rows: &[(u32, u32)]) -> Instance {
        let rows: Vec<(Vec<u32>, Vec<u32>)> =
            rows.iter().map(|&(a, b)| (vec![a], vec![b])).collect();
        Instance::from_rows(m, 1, &rows).unwrap()
    }

    #[test]
    fn single_item_is_feasible() {
        let inst = inst1(1, &[(0, 0)]);
        let v = brute_force_feasible(&inst).unwrap();
        assert!(v.feasible);
        assert_eq!(v.witness.unwrap().sides(), &[Side::A0]);
    }

    #[test]
    fn three_item_full_collision_is_infeasible() {
        let inst = inst1(4, &[(0, 1), (0, 1), (0, 1)]);
        let v = brute_force_feasible(&inst).unwrap();
        assert!(!v.feasible);
        assert_eq!(v.witness, None);
        assert!(!implication_sat_feasible(&inst));
    }

    #[test]
    fn d2_witness_is_lexicographically_first() {
        let inst = Instance::from_rows(
            4,
            2,
            &[(vec![0, 1], vec![0, 1]), (vec![1, 2], vec![1, 2])],
        )
        .unwrap();
        let v = brute_force_feasible(&inst).unwrap();
        assert!(v.feasible);
        assert_eq!(v.witness.unwrap().sides(), &[Side::A0, Side::A1]);
    }

    #[test]
    fn cap_is_enforced_with_explicit_message() {
        let inst = sample_instance(BRUTE_FORCE_CAP + 1, 64, 1, Seed(5), 0).unwrap();
        let err = brute_force_feasible(&inst).unwrap_err();
        assert_eq!(
            err,
            OracleError::TooLarge {
                n: BRUTE_FORCE_CAP + 1,
                cap: BRUTE_FORCE_CAP
            }
        );
        assert!(err.to_string().contains("cap 20"));
    }

    #[test]
    fn empty_formula_is_satisfiable() {
        let inst = inst1(8, &[(0, 1), (2, 3)]);
        assert!(implication_sat_feasible(&inst));
        let empty = Instance::new(3, 1, vec![]).unwrap();
        assert!(implication_sat_feasible(&empty));
    }

    #[test]
    fn unit_clauses_from_duplicate_coords() {
        // Both sides self-conflicting: unsatisfiable with a single item.
        let inst = Instance::from_rows(4, 2, &[(vec![3, 3], vec![2, 2])]).unwrap();
        assert!(!implication_sat_feasible(&inst));
        assert!(!brute_force_feasible(&inst).unwrap().feasible);
        // Only one side self-conflicting: the other side works.
        let inst = Instance::from_rows(4, 2, &[(vec![3, 3], vec![1, 2])]).unwrap();
        assert!(implication_sat_feasible(&inst));
    }

    #[test]
    fn cross_validate_agrees_on_random_instances() {
        for trial in 0..500u64 {
            let n = (trial % 11) as usize;
            let m = 1 + (trial % 8) as u32;
            let d = 1 + (trial % 2) as usize;
            let inst = sample_instance(n, m, d, Seed(0xC0FFEE), trial).unwrap();
            let report = cross_validate(&inst);
            assert!(report.agree(), "{report}");
            if n == 0 {
                assert_eq!(report.to_string(), "agree (vacuous)");
            }
        }
    }

    #[test]
    fn corrupted_graph_is_caught_with_culprit_edge() {
        // Single item whose vectors are self-conflicting on both sides:
        // infeasible, and badness hinges on each self-edge.
        let inst = Instance::from_rows(4, 2, &[(vec![3, 3], vec![2, 2])]).unwrap();
        let mut g = InferenceGraph::build(&inst);
        let from = NodeId::new(0, Side::A0);
        let to = NodeId::new(0, Side::A1);
        assert!(g.remove_edge(from, to));
        let report = cross_validate_with_graph(&inst, &g);
        assert!(!report.agree());
        assert_eq!(report.missing_edges, vec![(from, to)]);
        assert!(report.extra_edges.is_empty());
        assert!(report.instance_text.is_some());
        assert!(report.to_string().contains("disagree"));
    }

    #[test]
    fn verdict_is_invariant_under_item_reordering() {
        for trial in 0..200u64 {
            let n = 6;
            let inst = sample_instance(n, 4, 1, Seed(77), trial).unwrap();
            let verdict = brute_force_feasible(&inst).unwrap().feasible;
            // Reverse the items.
            let rows: Vec<(Vec<u32>, Vec<u32>)> = (0..n)
                .rev()
                .map(|i| {
                    (
                        inst.hash_vector(i, Side::A0).to_vec(),
                        inst.hash_vector(i, Side::A1).to_vec(),
                    )
                })
                .collect();
            let reversed = Instance::from_rows(4, 1, &rows).unwrap();
            assert_eq!(brute_force_feasible(&reversed).unwrap().feasible, verdict);
        }
    }
}
