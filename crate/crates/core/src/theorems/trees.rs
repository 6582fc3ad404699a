//! Downward trees with the root-two-or-three assignment.

use std::collections::{HashMap, VecDeque};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::corpus::random_downward_tree;
use super::{
    aggregate, isomorphic_to_own, state_map_json, ClaimId, Limits, Stats, Verdict,
    VerificationReport,
};
use crate::graph::{OrientedGraph, VertexId};
use crate::iso::{IsoMapping, IsoMode};
use crate::pebbling::{step, tree_assignment};
use crate::{Assignment, AssignmentGraph, Pebbles};

/// One random tree instance: the tree, its root count, and leaf counts.
#[derive(Clone, Debug)]
pub struct TreeInstance {
    pub tree: OrientedGraph,
    pub root_pebbles: Pebbles,
    pub leaf_pebbles: Vec<(VertexId, Pebbles)>,
}

impl TreeInstance {
    pub fn assignment(&self) -> Assignment {
        tree_assignment(&self.tree, self.root_pebbles, &self.leaf_pebbles)
            .expect("generated instances are valid")
    }
}

/// `count` seeded random trees on `2..=max_vertices` vertices with 2 or 3
/// root pebbles and leaf counts up to `leaf_cap`.
pub fn random_tree_instances(
    count: usize,
    max_vertices: usize,
    leaf_cap: Pebbles,
    seed: u64,
) -> Vec<TreeInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=max_vertices.max(2));
            let tree = random_downward_tree(&mut rng, n);
            let root_pebbles = rng.gen_range(2..=3);
            let leaf_pebbles = tree
                .sinks()
                .into_iter()
                .map(|v| (v, rng.gen_range(0..=leaf_cap)))
                .collect();
            TreeInstance { tree, root_pebbles, leaf_pebbles }
        })
        .collect()
}

/// The state reached by pebbling from the root down the unique path to each
/// vertex, indexed by vertex.
fn path_states(tree: &OrientedGraph, root: VertexId, s0: &Assignment) -> Option<Vec<Assignment>> {
    let mut state: Vec<Option<Assignment>> = vec![None; tree.vertex_count()];
    state[root.0] = Some(s0.clone());
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &(from, to) in tree.edges() {
            if from != v {
                continue;
            }
            let mut next = state[v.0].clone()?;
            step(&mut next, from, to).ok()?;
            state[to.0] = Some(next);
            queue.push_back(to);
        }
    }
    state.into_iter().collect()
}

/// The map `v -> A_v` as a directed mapping into `ag`, if every `A_v` is a
/// state of `ag` and the map is an isomorphism.
fn explicit_map(tree: &OrientedGraph, root: VertexId, s0: &Assignment, ag: &AssignmentGraph) -> Option<IsoMapping> {
    let index: HashMap<&Assignment, usize> = ag.states().iter().enumerate().map(|(i, s)| (s, i)).collect();
    let map = path_states(tree, root, s0)?
        .iter()
        .map(|s| index.get(s).map(|&i| VertexId(i)))
        .collect::<Option<Vec<_>>>()?;
    let m = IsoMapping::new(IsoMode::Directed, map);
    m.verify(tree, &ag.as_oriented_graph()).then_some(m)
}

pub fn verify_thm_5_1(
    tree: &OrientedGraph,
    root_pebbles: Pebbles,
    leaf_pebbles: &[(VertexId, Pebbles)],
    limits: &Limits,
) -> VerificationReport {
    let claim = ClaimId::Thm5_1;
    let start = Instant::now();
    let Some(root) = tree.is_downward_tree() else {
        return VerificationReport::new(claim, claim.statement(), Verdict::HypothesisNotMet)
            .note("not a downward tree");
    };
    let s0 = match tree_assignment(tree, root_pebbles, leaf_pebbles) {
        Ok(s) => s,
        Err(e) => {
            return VerificationReport::new(claim, claim.statement(), Verdict::HypothesisNotMet)
                .note(e.to_string())
        }
    };
    let (ag, iso) = match isomorphic_to_own(tree, &s0, limits) {
        Ok(x) => x,
        Err(e) => {
            return VerificationReport::new(claim, claim.statement(), Verdict::BudgetExceeded)
                .on(tree, &s0)
                .note(e.to_string())
        }
    };
    let explicit = explicit_map(tree, root, &s0, &ag);
    let verdict = match (&iso, &explicit) {
        (Some(_), Some(_)) => Verdict::Holds,
        _ => Verdict::Counterexample,
    };
    let mut w = json!({
        "found_isomorphism": iso.is_some(),
        "path_state_map_is_isomorphism": explicit.is_some(),
    });
    if let Some(m) = &explicit {
        w["path_state_map"] = state_map_json(tree, &ag, m);
    }
    VerificationReport::new(claim, claim.statement(), verdict)
        .on(tree, &s0)
        .witness(w)
        .stats(Stats::one(ag.state_count()))
        .timed(start)
}

/// Reads the tree hypothesis off an arbitrary instance: a downward tree with
/// 2 or 3 pebbles on the root and one on every other internal vertex.
pub fn verify_thm_5_1_instance(g: &OrientedGraph, s0: &Assignment, limits: &Limits) -> VerificationReport {
    let claim = ClaimId::Thm5_1;
    let not_met = |why: &str| {
        VerificationReport::new(claim, claim.statement(), Verdict::HypothesisNotMet)
            .on(g, s0)
            .note(why)
            .stats(Stats { instances_scanned: 1, ..Stats::default() })
    };
    let Some(root) = g.is_downward_tree() else { return not_met("not a downward tree") };
    let r = s0.get(root);
    if !(r == 2 || r == 3) {
        return not_met("the root needs 2 or 3 pebbles");
    }
    if !g.vertices().all(|v| v == root || g.is_sink(v) || s0.get(v) == 1) {
        return not_met("every internal vertex below the root needs exactly 1 pebble");
    }
    let leaves: Vec<_> = g.sinks().into_iter().filter(|&v| v != root).map(|v| (v, s0.get(v))).collect();
    verify_thm_5_1(g, r, &leaves, limits)
}

pub(crate) fn thm_5_1_instance(g: &OrientedGraph, s0: &Assignment, limits: &Limits) -> Verdict {
    verify_thm_5_1_instance(g, s0, limits).verdict
}

pub fn thm_5_1_random_batch(
    count: usize,
    max_vertices: usize,
    seed: u64,
    limits: &Limits,
) -> VerificationReport {
    let start = Instant::now();
    let reports = random_tree_instances(count, max_vertices, 9, seed)
        .iter()
        .map(|t| verify_thm_5_1(&t.tree, t.root_pebbles, &t.leaf_pebbles, limits))
        .collect();
    aggregate(
        ClaimId::Thm5_1,
        format!(
            "{} ({count} random trees up to {max_vertices} vertices, seed {seed})",
            ClaimId::Thm5_1.statement()
        ),
        reports,
    )
    .timed(start)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{oriented_complete_bipartite, oriented_path};

    #[test]
    fn paths_and_stars() {
        let l = Limits::default();
        let p = oriented_path(3).unwrap();
        assert_eq!(verify_thm_5_1(&p, 2, &[], &l).verdict, Verdict::Holds);
        let s = oriented_complete_bipartite(1, 4).unwrap();
        let r = verify_thm_5_1(&s, 3, &[(VertexId(2), 7)], &l);
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.witness.unwrap()["path_state_map"]["a1"], "3,0,7,0,0");
    }

    #[test]
    fn non_trees_do_not_meet_the_hypothesis() {
        let k = oriented_complete_bipartite(2, 1).unwrap();
        assert_eq!(verify_thm_5_1(&k, 2, &[], &Limits::default()).verdict, Verdict::HypothesisNotMet);
    }

    #[test]
    fn random_batch_is_seeded() {
        let a = random_tree_instances(5, 8, 9, 3);
        let b = random_tree_instances(5, 8, 9, 3);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.tree, y.tree);
            assert_eq!(x.assignment(), y.assignment());
        }
        let r = thm_5_1_random_batch(20, 10, 7, &Limits::default());
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(r.stats.instances_scanned, 20);
    }
}
