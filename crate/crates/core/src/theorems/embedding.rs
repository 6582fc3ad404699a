//! Extending an induced undirected copy of `G` in `[S_G]` to a graph `H`
//! with `H = [S_H]` as undirected graphs.

use std::time::Instant;

use serde_json::json;

use super::{ClaimId, Limits, Stats, TheoremError, Verdict, VerificationReport};
use crate::assignment_graph::{build_with, BuildError};
use crate::graph::{OrientedGraph, VertexId};
use crate::iso::{find_induced_undirected_embedding, undirected_isomorphic};
use crate::Assignment;

/// Orients the shadow of `[S_G]` into `H`: the embedded copy of `G` keeps
/// `G`'s orientation, edges with one end on the copy point at it, and the
/// remaining edges keep the assignment graph's direction (lower state index
/// to higher). `sH` is `s0` on the copy and 0 elsewhere.
pub fn construct_thm_8_1(
    g: &OrientedGraph,
    s0: &Assignment,
    limits: &Limits,
) -> Result<(OrientedGraph, Assignment, VerificationReport), TheoremError> {
    let claim = ClaimId::Thm8_1;
    let start = Instant::now();
    let budget_err = |e: BuildError| match e {
        BuildError::Pebbling(p) => TheoremError::Pebbling(p),
        other => TheoremError::Precondition(other.to_string()),
    };
    let ag = build_with(g, s0, &limits.build_options()).map_err(budget_err)?;
    let shadow = ag.as_oriented_graph();
    let emb = find_induced_undirected_embedding(g, &shadow, limits.search_budget)?
        .ok_or(TheoremError::EmbeddingNotFound)?;

    let n = shadow.vertex_count();
    let mut preimage: Vec<Option<VertexId>> = vec![None; n];
    for v in g.vertices() {
        preimage[emb.image(v).0] = Some(v);
    }
    let edges: Vec<(usize, usize)> = shadow
        .edges()
        .iter()
        .map(|&(x, y)| match (preimage[x.0], preimage[y.0]) {
            (Some(u), Some(v)) => {
                if g.has_edge(u, v) {
                    (x.0, y.0)
                } else {
                    (y.0, x.0)
                }
            }
            (Some(_), None) => (y.0, x.0),
            (None, Some(_)) => (x.0, y.0),
            (None, None) => (x.0.min(y.0), x.0.max(y.0)),
        })
        .collect();
    let names: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let h = OrientedGraph::from_indices(names, edges)?;
    let sh = Assignment::from_counts(
        (0..n).map(|i| preimage[i].map_or(0, |v| s0.get(v))).collect(),
    );

    let report = match build_with(&h, &sh, &limits.build_options()) {
        Err(e) => VerificationReport::new(claim, claim.statement(), Verdict::BudgetExceeded)
            .on(&h, &sh)
            .note(e.to_string()),
        Ok(agh) => {
            let same_size = agh.state_count() == ag.state_count();
            let iso = undirected_isomorphic(&h, &agh.as_oriented_graph());
            let verdict =
                if same_size && iso.is_some() { Verdict::Holds } else { Verdict::Counterexample };
            let copy: serde_json::Map<String, serde_json::Value> = g
                .vertices()
                .map(|v| (g.name(v).to_owned(), json!(h.name(emb.image(v)))))
                .collect();
            VerificationReport::new(claim, claim.statement(), verdict)
                .on(&h, &sh)
                .witness(json!({
                    "copy_of_g": copy,
                    "states_of_g": ag.state_count(),
                    "states_of_h": agh.state_count(),
                    "undirected_isomorphism": iso.map(|m| m.witness(&h, &agh.as_oriented_graph()).to_value()),
                }))
                .stats(Stats {
                    states_built: (ag.state_count() + agh.state_count()) as u64,
                    instances_scanned: 1,
                    ..Stats::default()
                })
        }
    };
    Ok((h, sh, report.timed(start)))
}

/// Runs the construction; a graph with no induced copy in its assignment
/// graph does not meet the hypothesis.
pub fn verify_thm_8_1(g: &OrientedGraph, s0: &Assignment, limits: &Limits) -> VerificationReport {
    let claim = ClaimId::Thm8_1;
    match construct_thm_8_1(g, s0, limits) {
        Ok((_, _, r)) => r,
        Err(TheoremError::EmbeddingNotFound) => {
            VerificationReport::new(claim, claim.statement(), Verdict::HypothesisNotMet)
                .on(g, s0)
                .note("no induced undirected copy of G in [S_G]")
                .stats(Stats { instances_scanned: 1, ..Stats::default() })
        }
        Err(e) => VerificationReport::new(claim, claim.statement(), Verdict::BudgetExceeded)
            .on(g, s0)
            .note(e.to_string())
            .stats(Stats { instances_scanned: 1, ..Stats::default() }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{downward_cycle, oriented_path};

    fn a(g: &OrientedGraph, c: &[u64]) -> Assignment {
        Assignment::from_u64s(g, c).unwrap()
    }

    #[test]
    fn paths_extend_to_themselves() {
        let l = Limits::default();
        let p = oriented_path(3).unwrap();
        let (h, sh, r) = construct_thm_8_1(&p, &a(&p, &[2, 1, 0]), &l).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert_eq!(h.vertex_count(), 3);
        assert_eq!(sh.total(), 3);
        let p2 = oriented_path(2).unwrap();
        let (h, _, r) = construct_thm_8_1(&p2, &a(&p2, &[2, 0]), &l).unwrap();
        assert_eq!((h.vertex_count(), r.verdict), (2, Verdict::Holds));
    }

    #[test]
    fn four_cycle_with_four_on_top() {
        let c = downward_cycle(4).unwrap();
        let (h, sh, r) = construct_thm_8_1(&c, &a(&c, &[4, 0, 0, 0]), &Limits::default()).unwrap();
        assert_eq!(h.vertex_count(), 7);
        assert_eq!(sh.total(), 4);
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn missing_copy_is_reported() {
        // one state, two vertices: nothing to embed into
        let g = OrientedGraph::new(&["a", "b"], &[("a", "b")]).unwrap();
        let r = verify_thm_8_1(&g, &a(&g, &[0, 0]), &Limits::default());
        assert_eq!(r.verdict, Verdict::HypothesisNotMet);
    }
}
