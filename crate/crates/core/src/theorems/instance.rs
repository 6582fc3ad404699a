//! Checkers that decide a claim on one graph and assignment.

use std::time::Instant;

use serde_json::json;

use super::{
    isomorphic_to_own, state_map_json, traversal_json, ClaimId, Limits, Stats, Verdict,
    VerificationReport,
};
use crate::assignment_graph::{self, build_with, contains_downward_4_cycle, BuildError};
use crate::graph::OrientedGraph;
use crate::pebbling::{self, movable_vertices, PebbleCount};
use crate::{Assignment, AssignmentGraph};

fn budget_report<C: PebbleCount>(
    claim: ClaimId,
    g: &OrientedGraph,
    s0: &pebbling::Assignment<C>,
    e: BuildError,
) -> VerificationReport {
    VerificationReport::new(claim, claim.statement(), Verdict::BudgetExceeded)
        .on(g, s0)
        .note(e.to_string())
        .stats(Stats { instances_scanned: 1, ..Stats::default() })
}

/// Shared gate of the claims about `G = [S_G]`: builds the assignment graph
/// and reports full traversability and isomorphism.
struct Gate {
    ag: AssignmentGraph,
    fully_traversable: bool,
    iso: Option<crate::IsoMapping>,
}

fn gate(g: &OrientedGraph, s0: &Assignment, limits: &Limits) -> Result<Gate, BuildError> {
    let (ag, iso) = isomorphic_to_own(g, s0, limits)?;
    Ok(Gate { fully_traversable: ag.is_fully_traversable(), ag, iso })
}

fn gate_notes(r: VerificationReport, gt: &Gate) -> VerificationReport {
    r.note(format!(
        "fully traversable: {}, isomorphic to its assignment graph: {}",
        gt.fully_traversable,
        gt.iso.is_some()
    ))
}

pub fn verify_prop_1_1(g: &OrientedGraph, s0: &Assignment, limits: &Limits) -> VerificationReport {
    let claim = ClaimId::Prop1_1;
    let start = Instant::now();
    let gt = match gate(g, s0, limits) {
        Ok(gt) => gt,
        Err(e) => return budget_report(claim, g, s0, e),
    };
    let stats = Stats::one(gt.ag.state_count());
    let counts = gt.ag.traversal_counts();
    let Some(iso) = gt.iso.as_ref().filter(|_| gt.fully_traversable) else {
        return gate_notes(
            VerificationReport::new(claim, claim.statement(), Verdict::HypothesisNotMet),
            &gt,
        )
        .on(g, s0)
        .witness(json!({ "traversal_counts": traversal_json(g, &counts) }))
        .stats(stats)
        .timed(start);
    };
    let verdict = if counts.iter().all(|&c| c == 1) { Verdict::Holds } else { Verdict::Counterexample };
    VerificationReport::new(claim, claim.statement(), verdict)
        .on(g, s0)
        .witness(json!({
            "traversal_counts": traversal_json(g, &counts),
            "isomorphism": state_map_json(g, &gt.ag, iso),
        }))
        .stats(stats)
        .timed(start)
}

pub fn verify_cor_1_1(g: &OrientedGraph, s0: &Assignment, limits: &Limits) -> VerificationReport {
    let claim = ClaimId::Cor1_1;
    let start = Instant::now();
    if g.vertex_count() <= 1 {
        return VerificationReport::new(claim, claim.statement(), Verdict::HypothesisNotMet)
            .on(g, s0)
            .note("the graph has a single vertex")
            .stats(Stats { instances_scanned: 1, ..Stats::default() });
    }
    let gt = match gate(g, s0, limits) {
        Ok(gt) => gt,
        Err(e) => return budget_report(claim, g, s0, e),
    };
    let stats = Stats::one(gt.ag.state_count());
    if !(gt.fully_traversable && gt.iso.is_some()) {
        return gate_notes(
            VerificationReport::new(claim, claim.statement(), Verdict::HypothesisNotMet),
            &gt,
        )
        .on(g, s0)
        .stats(stats)
        .timed(start);
    }
    let heavy: Vec<_> = g.vertices().filter(|&v| s0.get(v) > 3).collect();
    if heavy.is_empty() {
        return VerificationReport::new(claim, claim.statement(), Verdict::Holds)
            .on(g, s0)
            .witness(json!({ "max_pebbles": s0.max() }))
            .stats(stats)
            .timed(start);
    }
    let names: Vec<&str> = heavy.iter().map(|&v| g.name(v)).collect();
    let mut r = VerificationReport::new(claim, claim.statement(), Verdict::Counterexample)
        .on(g, s0)
        .witness(json!({ "vertices_above_three": names, "max_pebbles": s0.max() }));
    if heavy.iter().all(|&v| g.is_sink(v)) {
        r = r.note(
            "discrepancy: every vertex above three pebbles has valence 0; the argument for this \
             bound only covers vertices that can move, and sinks may carry any count",
        );
    }
    r.stats(stats).timed(start)
}

pub fn verify_cor_1_2(g: &OrientedGraph, s0: &Assignment, limits: &Limits) -> VerificationReport {
    let claim = ClaimId::Cor1_2;
    let start = Instant::now();
    let gt = match gate(g, s0, limits) {
        Ok(gt) => gt,
        Err(e) => return budget_report(claim, g, s0, e),
    };
    let stats = Stats::one(gt.ag.state_count());
    let counts = gt.ag.traversal_counts();
    if gt.fully_traversable || gt.iso.is_none() {
        return gate_notes(
            VerificationReport::new(claim, claim.statement(), Verdict::HypothesisNotMet),
            &gt,
        )
        .on(g, s0)
        .stats(stats)
        .timed(start);
    }
    let max = counts.iter().copied().max().unwrap_or(0);
    let verdict = if max >= 2 { Verdict::Holds } else { Verdict::Counterexample };
    let mut r = VerificationReport::new(claim, claim.statement(), verdict)
        .on(g, s0)
        .witness(json!({ "traversal_counts": traversal_json(g, &counts), "max_traversal": max }));
    if verdict == Verdict::Counterexample && g.edge_count() == 0 {
        r = r.note(
            "discrepancy: the graph has no edges, so it is never fully traversable and no edge \
             can be traversed twice; the edge-counting argument needs at least one edge",
        );
    }
    r.stats(stats).timed(start)
}

/// Whether some state reachable from the root has two movable vertices or
/// a 2-movable vertex with at least four pebbles. Returns the first such
/// state in build order.
pub fn reachable_thm_2_1_condition<C: PebbleCount>(
    g: &OrientedGraph,
    ag: &assignment_graph::AssignmentGraph<C>,
) -> Option<usize> {
    ag.states().iter().position(|s| state_condition(g, s).is_some())
}

/// The right-hand side on one state: two movable vertices, or one 2-movable
/// vertex with at least four pebbles.
fn state_condition<C: PebbleCount>(
    g: &OrientedGraph,
    s: &pebbling::Assignment<C>,
) -> Option<serde_json::Value> {
    let movable = movable_vertices(g, s);
    if movable.len() >= 2 {
        let names: Vec<&str> = movable.iter().take(2).map(|&v| g.name(v)).collect();
        return Some(json!({ "two_movable": names }));
    }
    movable
        .iter()
        .find(|&&v| g.valence(v).unwrap_or(0) >= 2 && s.get(v) >= C::lit(4))
        .map(|&v| json!({ "two_movable_with_four": g.name(v) }))
}

/// Computes both sides of the downward 4-cycle characterization on the
/// initial assignment and reports whether they agree.
///
/// Generic in the pebble count so large batches can use one-byte states.
pub fn check_thm_2_1<C: PebbleCount>(
    g: &OrientedGraph,
    s0: &pebbling::Assignment<C>,
    limits: &Limits,
) -> VerificationReport {
    let claim = ClaimId::Thm2_1;
    let start = Instant::now();
    let ag = match build_with(g, s0, &limits.build_options()) {
        Ok(ag) => ag,
        Err(e) => return budget_report(claim, g, s0, e),
    };
    let lhs = ag.downward_4_cycle();
    let rhs = state_condition(g, s0);
    let reachable = reachable_thm_2_1_condition(g, &ag);
    let verdict =
        if lhs.is_some() == rhs.is_some() { Verdict::Holds } else { Verdict::Counterexample };
    let cycle = lhs.map(|c| c.iter().map(|s| ag.states()[s.0].to_string()).collect::<Vec<_>>());
    let mut r = VerificationReport::new(claim, claim.statement(), verdict)
        .on(g, s0)
        .witness(json!({
            "downward_4_cycle": cycle,
            "initial_condition": rhs,
            "reachable_condition_state": reachable.map(|i| ag.states()[i].to_string()),
        }))
        .stats(Stats::one(ag.state_count()));
    if verdict == Verdict::Counterexample && lhs.is_some() == reachable.is_some() {
        r = r.note(
            "discrepancy: the sides disagree on the initial assignment but agree when the \
             condition is read over every reachable state",
        );
    }
    r.timed(start)
}

pub fn verify_thm_2_2(g: &OrientedGraph, s0: &Assignment, limits: &Limits) -> VerificationReport {
    let claim = ClaimId::Thm2_2;
    let start = Instant::now();
    let cycle = contains_downward_4_cycle(g);
    let gt = match gate(g, s0, limits) {
        Ok(gt) => gt,
        Err(e) => return budget_report(claim, g, s0, e),
    };
    let stats = Stats::one(gt.ag.state_count());
    let Some(cycle) = cycle.filter(|_| gt.fully_traversable) else {
        return VerificationReport::new(claim, claim.statement(), Verdict::HypothesisNotMet)
            .on(g, s0)
            .note(format!(
                "contains a downward 4-cycle: {}, fully traversable: {}",
                cycle.is_some(),
                gt.fully_traversable
            ))
            .stats(stats)
            .timed(start);
    };
    let names: Vec<&str> = cycle.iter().map(|&v| g.name(v)).collect();
    let mut w = json!({ "downward_4_cycle": names });
    let verdict = match &gt.iso {
        None => Verdict::Holds,
        Some(m) => {
            w["isomorphism"] = state_map_json(g, &gt.ag, m);
            Verdict::Counterexample
        }
    };
    VerificationReport::new(claim, claim.statement(), verdict)
        .on(g, s0)
        .witness(w)
        .stats(stats)
        .timed(start)
}

pub fn verify_thm_4_1(g: &OrientedGraph, s0: &Assignment, limits: &Limits) -> VerificationReport {
    let claim = ClaimId::Thm4_1;
    let start = Instant::now();
    let gt = match gate(g, s0, limits) {
        Ok(gt) => gt,
        Err(e) => return budget_report(claim, g, s0, e),
    };
    let stats = Stats::one(gt.ag.state_count());
    let cyclic = g.underlying_has_cycle();
    if !(gt.fully_traversable && cyclic) {
        return VerificationReport::new(claim, claim.statement(), Verdict::HypothesisNotMet)
            .on(g, s0)
            .note(format!(
                "fully traversable: {}, shadow has a cycle: {}",
                gt.fully_traversable, cyclic
            ))
            .stats(stats)
            .timed(start);
    }
    let (verdict, w) = match &gt.iso {
        None => (Verdict::Holds, json!({ "states": gt.ag.state_count() })),
        Some(m) => (Verdict::Counterexample, json!({ "isomorphism": state_map_json(g, &gt.ag, m) })),
    };
    VerificationReport::new(claim, claim.statement(), verdict)
        .on(g, s0)
        .witness(w)
        .stats(stats)
        .timed(start)
}
