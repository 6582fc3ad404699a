//! Oriented paths, their products, and the bipartite construction.

use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::corpus::assignment_at;
use super::{
    aggregate, isomorphic_to_own, quick_iso, state_map_json, ClaimId, Limits, Stats,
    TheoremError, Verdict, VerificationReport,
};
use crate::assignment_graph::build_with;
use crate::graph::{oriented_complete_bipartite, oriented_path, OrientedGraph};
use crate::iso::find_subgraph;
use crate::pebbling::{almost_simple_assignment, product_simple_assignment};
use crate::{AlmostSimple, Assignment, PathFactor, Pebbles};

/// Checks `G = [S_G]` and wraps the outcome as holds or counterexample.
fn iso_report(
    claim: ClaimId,
    description: String,
    g: &OrientedGraph,
    s0: &Assignment,
    limits: &Limits,
) -> VerificationReport {
    match isomorphic_to_own(g, s0, limits) {
        Ok((ag, iso)) => {
            let stats = Stats::one(ag.state_count());
            let (verdict, w) = match &iso {
                Some(m) => (Verdict::Holds, json!({ "isomorphism": state_map_json(g, &ag, m) })),
                None => (
                    Verdict::Counterexample,
                    json!({ "states": ag.state_count(), "transitions": ag.transition_count() }),
                ),
            };
            VerificationReport::new(claim, description, verdict).on(g, s0).witness(w).stats(stats)
        }
        Err(e) => VerificationReport::new(claim, description, Verdict::BudgetExceeded)
            .on(g, s0)
            .note(e.to_string()),
    }
}

fn not_met(claim: ClaimId, description: String, why: String) -> VerificationReport {
    VerificationReport::new(claim, description, Verdict::HypothesisNotMet)
        .note(why)
        .stats(Stats { instances_scanned: 1, ..Stats::default() })
}

/// `factors` lists `(n_i, source pebbles)`; every other vertex outside the
/// designated copies gets `rest` (0 or 1) pebbles.
pub fn verify_thm_7_1(
    factors: &[(usize, Pebbles)],
    rest: Pebbles,
    limits: &Limits,
) -> Result<VerificationReport, TheoremError> {
    let start = Instant::now();
    let fs = factors
        .iter()
        .map(|&(n, src)| PathFactor::simple(n, src))
        .collect::<Result<Vec<_>, _>>()?;
    let (g, s0) = product_simple_assignment(&fs, 0, rest)?;
    let dims: Vec<String> = factors.iter().map(|(n, s)| format!("P{n}({s})")).collect();
    let desc = format!("{} ({}, rest {rest})", ClaimId::Thm7_1.statement(), dims.join(" x "));
    Ok(iso_report(ClaimId::Thm7_1, desc, &g, &s0, limits).timed(start))
}

/// Every product of `1..=max_factors` paths with lengths `1..=max_len`,
/// each source carrying 2 or 3, with 0 or 1 on the remaining vertices.
pub fn thm_7_1_suite(max_factors: usize, max_len: usize, limits: &Limits) -> VerificationReport {
    let start = Instant::now();
    let mut cases: Vec<(Vec<(usize, Pebbles)>, Pebbles)> = Vec::new();
    for r in 1..=max_factors {
        let choices = max_len * 2;
        for mut code in 0..choices.pow(r as u32) {
            let mut fs = Vec::with_capacity(r);
            for _ in 0..r {
                let c = code % choices;
                code /= choices;
                fs.push((c / 2 + 1, 2 + (c % 2) as Pebbles));
            }
            for rest in 0..=1 {
                cases.push((fs.clone(), rest));
            }
        }
    }
    let reports = cases
        .par_iter()
        .map(|(fs, rest)| verify_thm_7_1(fs, *rest, limits).expect("suite parameters are valid"))
        .collect();
    aggregate(
        ClaimId::Thm7_1,
        format!(
            "{} (up to {max_factors} factors of length up to {max_len})",
            ClaimId::Thm7_1.statement()
        ),
        reports,
    )
    .timed(start)
}

/// `k` pebbles next to the sink of `P_n`, `m` on the sink, and `others`
/// (0 or 1) on the remaining vertices in path order.
pub fn verify_lemma_7_1(
    n: usize,
    k: Pebbles,
    m: Pebbles,
    others: &[bool],
    limits: &Limits,
) -> Result<VerificationReport, TheoremError> {
    let claim = ClaimId::Lem7_1;
    let start = Instant::now();
    let desc = format!("{} (n = {n}, k = {k})", claim.statement());
    let path = oriented_path(n)?;
    let s0 = almost_simple_assignment(
        &path,
        &AlmostSimple::NearSink { heavy: k, sink: m, others: others.to_vec() },
    )?;
    if n != k as usize / 2 + 1 {
        return Ok(not_met(claim, desc, format!("n = {n} but floor(k/2) + 1 = {}", k / 2 + 1)));
    }
    Ok(iso_report(claim, desc, &path, &s0, limits).timed(start))
}

fn bit_vectors(len: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1usize << len).map(move |b| (0..len).map(|i| b >> (len - 1 - i) & 1 == 1).collect())
}

/// `k` in `2..=max_k` with `n = floor(k/2) + 1` and every 0/1 pattern on the
/// other vertices.
pub fn lemma_7_1_suite(max_k: Pebbles, limits: &Limits) -> VerificationReport {
    let start = Instant::now();
    let mut reports = Vec::new();
    for k in 2..=max_k {
        let n = k as usize / 2 + 1;
        for others in bit_vectors(n - 2) {
            reports.push(verify_lemma_7_1(n, k, 0, &others, limits).expect("valid parameters"));
        }
    }
    aggregate(
        ClaimId::Lem7_1,
        format!("{} (k up to {max_k})", ClaimId::Lem7_1.statement()),
        reports,
    )
    .timed(start)
}

/// `heavy` (4 or 5) pebbles at 0-based `position` of `P_n`, none on the next
/// vertex, `others` on the remaining non-sink vertices and `sink` on the
/// sink. The traversed-edge count is computed and must equal `n - 2`.
pub fn verify_lemma_7_2(
    n: usize,
    position: usize,
    heavy: Pebbles,
    others: &[bool],
    sink: Pebbles,
    limits: &Limits,
) -> Result<VerificationReport, TheoremError> {
    let claim = ClaimId::Lem7_2;
    let start = Instant::now();
    let desc = format!("{} (n = {n}, heavy {heavy} at position {position})", claim.statement());
    let path = oriented_path(n)?;
    let params = AlmostSimple::HeavyGap { position, heavy, sink, others: others.to_vec() };
    let s0 = almost_simple_assignment(&path, &params)?;
    let ag = match build_with(&path, &s0, &limits.build_options()) {
        Ok(ag) => ag,
        Err(e) => {
            return Ok(VerificationReport::new(claim, desc, Verdict::BudgetExceeded)
                .on(&path, &s0)
                .note(e.to_string()))
        }
    };
    let traversed = ag.traversal_counts().iter().filter(|&&c| c > 0).count();
    if traversed + 2 != n {
        return Ok(not_met(claim, desc, format!("{traversed} edges traversed, need {}", n - 2))
            .on(&path, &s0));
    }
    Ok(iso_report(claim, desc, &path, &s0, limits).timed(start))
}

/// Every heavy placement on `P_n` for `n` in `3..=max_n`; instances failing
/// the traversal gate come back as hypothesis-not-met.
pub fn lemma_7_2_suite(max_n: usize, limits: &Limits) -> VerificationReport {
    let start = Instant::now();
    let mut reports = Vec::new();
    for n in 3..=max_n {
        for p in 0..n - 2 {
            for heavy in [4, 5] {
                for others in bit_vectors(n - 3) {
                    reports.push(
                        verify_lemma_7_2(n, p, heavy, &others, 0, limits).expect("valid parameters"),
                    );
                }
            }
        }
    }
    aggregate(
        ClaimId::Lem7_2,
        format!("{} (n up to {max_n})", ClaimId::Lem7_2.statement()),
        reports,
    )
    .timed(start)
}

fn factor_label(f: &PathFactor) -> String {
    let n = f.path.vertex_count();
    match &f.params {
        AlmostSimple::Simple { source, .. } => format!("P{n} simple({source})"),
        AlmostSimple::NearSink { heavy, .. } => format!("P{n} near-sink({heavy})"),
        AlmostSimple::HeavyGap { position, heavy, .. } => format!("P{n} gap({heavy}@{position})"),
    }
}

/// Product of almost simple paths; gated on every factor being isomorphic
/// to its own assignment graph.
pub fn verify_cor_7_1(
    factors: &[PathFactor],
    rest: Pebbles,
    limits: &Limits,
) -> Result<VerificationReport, TheoremError> {
    let claim = ClaimId::Cor7_1;
    let start = Instant::now();
    let labels: Vec<String> = factors.iter().map(factor_label).collect();
    let desc = format!("{} ({}, rest {rest})", claim.statement(), labels.join(" x "));
    for (f, label) in factors.iter().zip(&labels) {
        let a = almost_simple_assignment(&f.path, &f.params)?;
        if quick_iso(&f.path, &a).1.is_none() {
            return Ok(not_met(claim, desc, format!("factor {label} is not isomorphic to its assignment graph")));
        }
    }
    let (g, s0) = product_simple_assignment(factors, 0, rest)?;
    Ok(iso_report(claim, desc, &g, &s0, limits).timed(start))
}

/// Every almost simple assignment on paths of length `1..=max_len` with
/// near-sink counts up to `max_heavy`.
pub fn almost_simple_pool(max_len: usize, max_heavy: Pebbles) -> Vec<PathFactor> {
    let mut pool = Vec::new();
    for n in 1..=max_len {
        let path = oriented_path(n).unwrap();
        let mut push = |params| pool.push(PathFactor { path: path.clone(), params });
        for source in [2, 3] {
            push(AlmostSimple::Simple { source, sink: 0 });
        }
        if n >= 2 {
            for heavy in 2..=max_heavy {
                for others in bit_vectors(n - 2) {
                    push(AlmostSimple::NearSink { heavy, sink: 0, others });
                }
            }
        }
        for position in 0..n.saturating_sub(2) {
            for heavy in [4, 5] {
                for others in bit_vectors(n - 3) {
                    push(AlmostSimple::HeavyGap { position, heavy, sink: 0, others });
                }
            }
        }
    }
    pool
}

/// Every product of one or two factors from [`almost_simple_pool`].
pub fn cor_7_1_suite(max_len: usize, max_heavy: Pebbles, limits: &Limits) -> VerificationReport {
    let start = Instant::now();
    let pool = almost_simple_pool(max_len, max_heavy);
    let mut cases: Vec<Vec<PathFactor>> = pool.iter().map(|f| vec![f.clone()]).collect();
    for a in &pool {
        for b in &pool {
            cases.push(vec![a.clone(), b.clone()]);
        }
    }
    let reports = cases
        .par_iter()
        .map(|fs| verify_cor_7_1(fs, 0, limits).expect("pool parameters are valid"))
        .collect();
    aggregate(
        ClaimId::Cor7_1,
        format!(
            "{} (one or two factors, length up to {max_len})",
            ClaimId::Cor7_1.statement()
        ),
        reports,
    )
    .timed(start)
}

/// Builds `G = [S_K]` for the oriented `K_{n,m}` with `pebbles[i]` (2 or 3)
/// on each `a_i`, looks for `K_{n,m}` inside `G`, then searches assignments
/// on `G` with non-sink counts up to `search_cap` for one with `G = [S_G]`.
///
/// The search is bounded: budget-exceeded means nothing was found under the
/// cap, not that no such assignment exists.
pub fn verify_thm_7_2(
    n: usize,
    m: usize,
    pebbles: &[Pebbles],
    search_cap: Pebbles,
    limits: &Limits,
) -> Result<VerificationReport, TheoremError> {
    let claim = ClaimId::Thm7_2;
    let start = Instant::now();
    if pebbles.len() != n || pebbles.iter().any(|&p| p != 2 && p != 3) {
        return Err(TheoremError::Precondition(format!(
            "need {n} source counts, each 2 or 3, got {pebbles:?}"
        )));
    }
    let desc = format!("{} (n = {n}, m = {m}, search cap {search_cap})", claim.statement());
    let k = oriented_complete_bipartite(n, m)?;
    let mut counts = pebbles.to_vec();
    counts.resize(n + m, 0);
    let sk = Assignment::from_counts(counts);
    let ag = match build_with(&k, &sk, &limits.build_options()) {
        Ok(ag) => ag,
        Err(e) => {
            return Ok(VerificationReport::new(claim, desc, Verdict::BudgetExceeded)
                .on(&k, &sk)
                .note(e.to_string()))
        }
    };
    let g = ag.as_oriented_graph();
    let mut stats = Stats::one(ag.state_count());

    let embedded = match find_subgraph(&k, &g, limits.search_budget) {
        Ok(e) => e,
        Err(e) => {
            return Ok(VerificationReport::new(claim, desc, Verdict::BudgetExceeded)
                .note(format!("subgraph search: {e}"))
                .stats(stats))
        }
    };
    let Some(embedded) = embedded else {
        return Ok(VerificationReport::new(claim, desc, Verdict::Counterexample)
            .note("K_{n,m} does not occur in the constructed graph")
            .stats(stats));
    };
    let sub: serde_json::Map<String, Value> = k
        .vertices()
        .map(|v| (k.name(v).to_owned(), json!(ag.states()[embedded.image(v).0].to_string())))
        .collect();

    let free: Vec<usize> = g.vertices().filter(|&v| !g.is_sink(v)).map(|v| v.0).collect();
    let total = (search_cap as usize + 1)
        .checked_pow(free.len() as u32)
        .filter(|&t| t as u64 <= limits.search_budget)
        .ok_or_else(|| {
            TheoremError::Precondition(format!(
                "{} free vertices with cap {search_cap} exceed the search budget",
                free.len()
            ))
        })?;
    let hit = (0..total).into_par_iter().find_first(|&i| {
        let s = assignment_at(g.vertex_count(), &free, search_cap, i);
        quick_iso(&g, &s).1.is_some()
    });
    stats.instances_scanned += hit.map_or(total, |i| i + 1) as u64;
    let base = json!({
        "constructed_states": ag.state_count(),
        "source_assignment": sk.to_string(),
        "bipartite_copy": sub,
    });
    let Some(i) = hit else {
        return Ok(VerificationReport::new(claim, desc, Verdict::BudgetExceeded)
            .witness(base)
            .note(format!(
                "no assignment with non-sink counts up to {search_cap} gives G = [S_G]; the search \
                 is bounded and this is not a refutation"
            ))
            .stats(stats)
            .timed(start));
    };
    let s = assignment_at(g.vertex_count(), &free, search_cap, i);
    let mut w = base;
    w["assignment"] = json!(s.to_string());
    Ok(VerificationReport::new(claim, desc, Verdict::Holds).on(&g, &s).witness(w).stats(stats).timed(start))
}
