//! Exhaustive scans over bounded instance spaces.

use std::collections::BTreeSet;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use super::corpus::{assignment_at, graphs_up_to};
use super::{
    aggregate, quick_iso, ClaimId, ClassificationResult, ClassifiedPair, Limits,
    Stats, TheoremError, Verdict, VerificationReport,
};
use crate::graph::{downward_cycle, OrientedGraph};
use crate::iso::{canonical_form_colored, CanonicalForm};
use crate::{Assignment, Pebbles};

/// The six `(top; left, right)` assignments on the downward 4-cycle with
/// `G = [S_G]`, left at most right, bottom arbitrary.
pub const COR_2_1_FAMILIES: [(Pebbles, Pebbles, Pebbles); 6] =
    [(0, 2, 2), (1, 2, 2), (0, 2, 3), (1, 2, 3), (0, 3, 3), (1, 3, 3)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TraversableFilter {
    Yes,
    No,
    #[default]
    Any,
}

impl TraversableFilter {
    fn admits(self, ft: bool) -> bool {
        match self {
            TraversableFilter::Yes => ft,
            TraversableFilter::No => !ft,
            TraversableFilter::Any => true,
        }
    }
}

impl std::str::FromStr for TraversableFilter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "yes" => Ok(TraversableFilter::Yes),
            "no" => Ok(TraversableFilter::No),
            "any" => Ok(TraversableFilter::Any),
            _ => Err(format!("expected yes, no or any, got `{s}`")),
        }
    }
}

fn free_vertices(g: &OrientedGraph) -> Vec<usize> {
    g.vertices().filter(|&v| !g.is_sink(v)).map(|v| v.0).collect()
}

fn instance_count(free: usize, cap: Pebbles) -> usize {
    (cap as usize + 1).pow(free as u32)
}

/// Automorphisms of `g` as plain permutations.
fn automorphism_perms(g: &OrientedGraph) -> Vec<Vec<usize>> {
    g.automorphisms().iter().map(|m| m.as_slice().iter().map(|v| v.0).collect()).collect()
}

/// Whether `counts` is the lexicographically smallest assignment in its
/// orbit under the automorphisms.
fn is_orbit_minimum(counts: &[Pebbles], auts: &[Vec<usize>]) -> bool {
    let mut image = vec![0; counts.len()];
    auts.iter().all(|p| {
        for (i, &c) in counts.iter().enumerate() {
            image[p[i]] = c;
        }
        counts <= image.as_slice()
    })
}

fn classified(g: &OrientedGraph, s: &Assignment, ft: bool) -> ClassifiedPair {
    ClassifiedPair {
        graph: g.clone(),
        counts: g
            .vertices()
            .map(|v| if g.is_sink(v) { None } else { Some(s.get(v)) })
            .collect(),
        fully_traversable: ft,
    }
}

/// Every graph in `graphs` against every sink-normalized assignment with
/// non-sink counts up to `cap`; keeps the pairs with `G = [S_G]` that pass
/// `filter`, one per automorphism orbit.
fn classify_graphs(
    graphs: &[OrientedGraph],
    vertex_cap: usize,
    cap: Pebbles,
    filter: TraversableFilter,
) -> ClassificationResult {
    let per_graph: Vec<(Vec<ClassifiedPair>, u64, u64)> = graphs
        .par_iter()
        .map(|g| {
            let free = free_vertices(g);
            let auts = automorphism_perms(g);
            let mut found = Vec::new();
            let (mut scanned, mut states) = (0u64, 0u64);
            for i in 0..instance_count(free.len(), cap) {
                let s = assignment_at(g.vertex_count(), &free, cap, i);
                scanned += 1;
                let (built, hit) = quick_iso(g, &s);
                states += built as u64;
                if let Some((ag, _)) = hit {
                    let ft = ag.is_fully_traversable();
                    if filter.admits(ft) && is_orbit_minimum(s.counts(), &auts) {
                        found.push(classified(g, &s, ft));
                    }
                }
            }
            (found, scanned, states)
        })
        .collect();
    let mut out = ClassificationResult {
        vertex_cap,
        pebble_cap: cap,
        pairs: Vec::new(),
        instances_scanned: 0,
        states_built: 0,
    };
    for (pairs, scanned, states) in per_graph {
        out.pairs.extend(pairs);
        out.instances_scanned += scanned;
        out.states_built += states;
    }
    out
}

/// Assignments on the downward 4-cycle `r, l1, s1, b` with `G = [S_G]`,
/// non-sink counts up to `cap`, modulo the left/right swap.
pub fn classify_downward_4_cycle(cap: Pebbles) -> ClassificationResult {
    classify_graphs(&[downward_cycle(4).unwrap()], 4, cap, TraversableFilter::Any)
}

/// The `(top, left, right)` triples of a 4-cycle classification.
fn cycle_triples(c: &ClassificationResult) -> BTreeSet<(Pebbles, Pebbles, Pebbles)> {
    c.pairs
        .iter()
        .map(|p| (p.counts[0].unwrap(), p.counts[1].unwrap(), p.counts[2].unwrap()))
        .collect()
}

/// Compares the 4-cycle classification at `cap` with the six listed
/// families and checks that none of them has a movable root.
pub fn verify_cor_2_1(cap: Pebbles) -> Result<(VerificationReport, ClassificationResult), TheoremError> {
    let claim = ClaimId::Cor2_1;
    if cap < 4 {
        return Err(TheoremError::Precondition(format!(
            "pebble cap {cap} is below 4; the families are only convincing past the bound of three"
        )));
    }
    let start = Instant::now();
    let c = classify_downward_4_cycle(cap);
    let found = cycle_triples(&c);
    let expected: BTreeSet<_> = COR_2_1_FAMILIES.iter().copied().collect();
    let movable_root = found.iter().any(|&(top, _, _)| top >= 2);
    let verdict =
        if found == expected && !movable_root { Verdict::Holds } else { Verdict::Counterexample };
    let fmt = |s: &BTreeSet<(Pebbles, Pebbles, Pebbles)>| {
        s.iter().map(|(t, l, r)| format!("({t};{l},{r})")).collect::<Vec<_>>()
    };
    let missing: BTreeSet<_> = expected.difference(&found).copied().collect();
    let extra: BTreeSet<_> = found.difference(&expected).copied().collect();
    let mut r = VerificationReport::new(claim, format!("{} (pebble cap {cap})", claim.statement()), verdict)
        .witness(json!({
            "families": fmt(&found),
            "missing": fmt(&missing),
            "unexpected": fmt(&extra),
            "movable_root": movable_root,
        }))
        .stats(Stats {
            states_built: c.states_built,
            instances_scanned: c.instances_scanned,
            ..Stats::default()
        });
    if let Some(&(t, l, s)) = extra.iter().next() {
        let g = downward_cycle(4).unwrap();
        r = r.on(&g, &Assignment::from_counts(vec![t, l, s, 0]));
    }
    Ok((r.timed(start), c))
}

pub(crate) fn cor_2_1_instance(g: &OrientedGraph, s0: &Assignment, _limits: &Limits) -> Verdict {
    let c = downward_cycle(4).unwrap();
    if *g != c {
        return Verdict::HypothesisNotMet;
    }
    let (t, l, r) = (s0.counts()[0], s0.counts()[1], s0.counts()[2]);
    let listed = COR_2_1_FAMILIES.contains(&(t, l.min(r), l.max(r)));
    let iso = quick_iso(g, s0).1.is_some();
    if iso == listed {
        Verdict::Holds
    } else {
        Verdict::Counterexample
    }
}

/// Scans every assignment with non-sink counts up to `cap` on the downward
/// `k`-cycle; holds iff none gives `G = [S_G]`.
pub fn verify_thm_3_1(k: usize, cap: Pebbles) -> Result<VerificationReport, TheoremError> {
    let claim = ClaimId::Thm3_1;
    if k <= 4 || k % 2 != 0 {
        return Err(TheoremError::Precondition(format!(
            "k must be even and greater than 4, got {k}"
        )));
    }
    let start = Instant::now();
    let g = downward_cycle(k)?;
    let free = free_vertices(&g);
    let total = instance_count(free.len(), cap);
    let per: Vec<(u64, Option<usize>)> = (0..total)
        .into_par_iter()
        .map(|i| {
            let s = assignment_at(g.vertex_count(), &free, cap, i);
            let (states, hit) = quick_iso(&g, &s);
            (states as u64, hit.map(|_| i))
        })
        .collect();
    let states: u64 = per.iter().map(|p| p.0).sum();
    let hits: Vec<usize> = per.iter().filter_map(|p| p.1).collect();
    let verdict = if hits.is_empty() { Verdict::Holds } else { Verdict::Counterexample };
    let mut r = VerificationReport::new(
        claim,
        format!("{} (k = {k}, pebble cap {cap})", claim.statement()),
        verdict,
    )
    .witness(json!({ "isomorphic_assignments": hits.len(), "k": k }))
    .stats(Stats { states_built: states, instances_scanned: total as u64, ..Stats::default() });
    if let Some(&i) = hits.first() {
        r = r.on(&g, &assignment_at(g.vertex_count(), &free, cap, i));
    }
    Ok(r.timed(start))
}

pub(crate) fn thm_3_1_instance(g: &OrientedGraph, s0: &Assignment, _limits: &Limits) -> Verdict {
    let k = g.vertex_count();
    match downward_cycle(k) {
        Ok(c) if k > 4 && c == *g => {
            if quick_iso(g, s0).1.is_some() {
                Verdict::Counterexample
            } else {
                Verdict::Holds
            }
        }
        _ => Verdict::HypothesisNotMet,
    }
}

/// Every oriented graph on at most `vertex_cap` vertices (one per
/// isomorphism class) with every sink-normalized assignment of non-sink
/// counts up to `cap`; keeps the pairs with `G = [S_G]` that pass `filter`.
pub fn classify_fully_traversable(
    vertex_cap: usize,
    cap: Pebbles,
    filter: TraversableFilter,
) -> ClassificationResult {
    classify_graphs(&graphs_up_to(vertex_cap), vertex_cap, cap, filter)
}

/// Key for comparing `(graph, assignment)` pairs up to relabelling.
fn pair_key(g: &OrientedGraph, counts: &[Option<Pebbles>]) -> CanonicalForm {
    let colors: Vec<u64> = counts.iter().map(|c| c.map_or(u64::MAX, u64::from)).collect();
    canonical_form_colored(g, &colors)
}

/// Downward trees on `2..=vertex_cap` vertices with 2 or 3 (at most `cap`)
/// pebbles on the root, one on other internal vertices and any count on
/// leaves, generated from parent arrays and deduplicated.
pub fn downward_tree_family(vertex_cap: usize, cap: Pebbles) -> Vec<ClassifiedPair> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for n in 2..=vertex_cap {
        // parent[i] < i for every non-root vertex i
        let mut parent = vec![0usize; n];
        loop {
            let edges: Vec<(usize, usize)> = (1..n).map(|i| (parent[i], i)).collect();
            let names = (0..n).map(|i| format!("t{i}")).collect();
            let g = OrientedGraph::from_indices(names, edges).unwrap();
            let has_child: Vec<bool> = (0..n).map(|v| (1..n).any(|i| parent[i] == v)).collect();
            for root in [2, 3].into_iter().filter(|&r| r <= cap) {
                let counts: Vec<Option<Pebbles>> = (0..n)
                    .map(|v| match (v, has_child[v]) {
                        (0, _) => Some(root),
                        (_, true) => Some(1),
                        (_, false) => None,
                    })
                    .collect();
                if seen.insert(pair_key(&g, &counts)) {
                    out.push(ClassifiedPair { graph: g.clone(), counts, fully_traversable: true });
                }
            }
            // next parent array in odometer order
            let mut i = n - 1;
            while i >= 1 && parent[i] + 1 >= i {
                parent[i] = 0;
                i -= 1;
            }
            if i == 0 {
                break;
            }
            parent[i] += 1;
        }
    }
    out
}

/// Compares the fully traversable classification with the downward tree
/// family, both keyed by coloured canonical form.
pub fn verify_sec_6(
    vertex_cap: usize,
    cap: Pebbles,
) -> (VerificationReport, ClassificationResult) {
    let claim = ClaimId::Sec6;
    let start = Instant::now();
    let c = classify_fully_traversable(vertex_cap, cap, TraversableFilter::Yes);
    let found: BTreeSet<CanonicalForm> = c.pairs.iter().map(|p| pair_key(&p.graph, &p.counts)).collect();
    let family = downward_tree_family(vertex_cap, cap);
    let expected: BTreeSet<CanonicalForm> =
        family.iter().map(|p| pair_key(&p.graph, &p.counts)).collect();
    let verdict = if found == expected && found.len() == c.pairs.len() {
        Verdict::Holds
    } else {
        Verdict::Counterexample
    };
    let extra: Vec<&ClassifiedPair> =
        c.pairs.iter().filter(|p| !expected.contains(&pair_key(&p.graph, &p.counts))).collect();
    let missing: Vec<&ClassifiedPair> =
        family.iter().filter(|p| !found.contains(&pair_key(&p.graph, &p.counts))).collect();
    let mut r = VerificationReport::new(
        claim,
        format!("{} (vertex cap {vertex_cap}, pebble cap {cap})", claim.statement()),
        verdict,
    )
    .witness(json!({
        "found": c.pairs.len(),
        "tree_family": family.len(),
        "unexpected": extra.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
        "missing": missing.iter().map(|p| p.to_json()).collect::<Vec<_>>(),
    }))
    .stats(Stats {
        states_built: c.states_built,
        instances_scanned: c.instances_scanned,
        ..Stats::default()
    });
    if let Some(p) = extra.first().or(missing.first()) {
        r = r.on(&p.graph, &p.assignment());
    }
    (r.timed(start), c)
}

pub(crate) fn sec_6_instance(g: &OrientedGraph, s0: &Assignment, _limits: &Limits) -> Verdict {
    let hit = quick_iso(g, s0).1;
    let member_found = hit.is_some_and(|(ag, _)| ag.is_fully_traversable());
    let in_family = g.is_downward_tree().is_some_and(|root| {
        g.edge_count() > 0
            && g.vertices().all(|v| {
                let c = s0.get(v);
                if v == root {
                    c == 2 || c == 3
                } else {
                    g.is_sink(v) || c == 1
                }
            })
    });
    if member_found == in_family {
        Verdict::Holds
    } else {
        Verdict::Counterexample
    }
}

/// Runs a per-instance claim over every graph on at most `vertex_cap`
/// vertices with every sink-normalized assignment up to `cap`.
pub fn scan_corpus(
    claim: ClaimId,
    vertex_cap: usize,
    cap: Pebbles,
    limits: &Limits,
) -> VerificationReport {
    let start = Instant::now();
    let graphs = graphs_up_to(vertex_cap);
    let reports: Vec<Vec<VerificationReport>> = graphs
        .par_iter()
        .map(|g| {
            let free = free_vertices(g);
            (0..instance_count(free.len(), cap))
                .map(|i| {
                    let s = assignment_at(g.vertex_count(), &free, cap, i);
                    verify_instance(claim, g, &s, limits)
                })
                .collect()
        })
        .collect();
    aggregate(
        claim,
        format!("{} (all graphs up to {vertex_cap} vertices, pebble cap {cap})", claim.statement()),
        reports.into_iter().flatten().collect(),
    )
    .timed(start)
}

/// Full report for `claim` on one instance. Claims without a dedicated
/// per-instance checker report the verdict of [`instance_verdict`].
pub fn verify_instance(
    claim: ClaimId,
    g: &OrientedGraph,
    s: &Assignment,
    limits: &Limits,
) -> VerificationReport {
    use super::*;
    match claim {
        ClaimId::Prop1_1 => verify_prop_1_1(g, s, limits),
        ClaimId::Cor1_1 => verify_cor_1_1(g, s, limits),
        ClaimId::Cor1_2 => verify_cor_1_2(g, s, limits),
        ClaimId::Thm2_1 => check_thm_2_1(g, s, limits),
        ClaimId::Thm2_2 => verify_thm_2_2(g, s, limits),
        ClaimId::Thm4_1 => verify_thm_4_1(g, s, limits),
        ClaimId::Thm8_1 => verify_thm_8_1(g, s, limits),
        ClaimId::Thm5_1 => verify_thm_5_1_instance(g, s, limits),
        other => VerificationReport::new(other, other.statement(), instance_verdict(other, g, s, limits))
            .on(g, s)
            .stats(Stats { instances_scanned: 1, ..Stats::default() }),
    }
}
