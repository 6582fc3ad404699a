//! Executable checks of the classification results.
//!
//! Per-instance checkers take a graph and an assignment and return a
//! [`VerificationReport`]. Scans enumerate instance spaces (all small oriented
//! graphs, all bounded assignments, seeded random batches) and fold the
//! per-instance verdicts into one report. Scans run on the current rayon pool
//! and collect in input order, so their output does not depend on the number
//! of worker threads.
//!
//! Every scan fixes valence-0 vertices at zero pebbles: a sink never moves,
//! so its count cannot change the shape of the assignment graph. Results
//! report such counts as `"any"`.

use std::fmt;
use std::str::FromStr;
use std::time::Duration;

use serde::{Serialize, Serializer};
use serde_json::{json, Value};
use thiserror::Error;

use crate::assignment_graph::{build_with, BuildError, BuildOptions, DEFAULT_STATE_BUDGET};
use crate::format::{parse_instance, write_instance};
use crate::graph::{GraphError, OrientedGraph};
use crate::iso::{digraph_isomorphic, IsoError, IsoMapping};
use crate::pebbling::{self, PebbleCount, PebblingError};
use crate::{Assignment, AssignmentGraph, Pebbles};

pub mod corpus;
mod embedding;
mod instance;
mod paths;
mod scans;
mod trees;

pub use embedding::{construct_thm_8_1, verify_thm_8_1};
pub use instance::{
    check_thm_2_1, reachable_thm_2_1_condition, verify_cor_1_1, verify_cor_1_2, verify_prop_1_1,
    verify_thm_2_2, verify_thm_4_1,
};
pub use paths::{
    almost_simple_pool, cor_7_1_suite, lemma_7_1_suite, lemma_7_2_suite, thm_7_1_suite,
    verify_cor_7_1, verify_lemma_7_1, verify_lemma_7_2, verify_thm_7_1, verify_thm_7_2,
};
pub use scans::{
    classify_downward_4_cycle, classify_fully_traversable, downward_tree_family, scan_corpus,
    verify_cor_2_1, verify_instance, verify_sec_6, verify_thm_3_1, TraversableFilter, COR_2_1_FAMILIES,
};
pub use trees::{
    random_tree_instances, thm_5_1_random_batch, verify_thm_5_1, verify_thm_5_1_instance, TreeInstance,
};

#[derive(Debug, Error)]
pub enum TheoremError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Pebbling(#[from] PebblingError),
    #[error(transparent)]
    Search(#[from] IsoError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("the graph is not an induced undirected subgraph of its assignment graph")]
    EmbeddingNotFound,
    #[error("unknown claim `{0}`; valid ids: {list}", list = ClaimId::id_list())]
    UnknownClaim(String),
}

/// Budgets shared by every checker.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    /// Largest assignment graph a checker may build.
    pub state_budget: usize,
    /// Node expansions allowed to one embedding or subgraph search.
    pub search_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { state_budget: DEFAULT_STATE_BUDGET, search_budget: 10_000_000 }
    }
}

impl Limits {
    pub(crate) fn build_options(&self) -> BuildOptions {
        BuildOptions { state_budget: self.state_budget }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Counterexample,
    HypothesisNotMet,
    BudgetExceeded,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::Counterexample => "counterexample",
            Verdict::HypothesisNotMet => "hypothesis-not-met",
            Verdict::BudgetExceeded => "budget-exceeded",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

macro_rules! claims {
    ($($variant:ident => $id:literal, $desc:literal;)*) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum ClaimId {
            $($variant,)*
        }

        impl ClaimId {
            pub const ALL: &'static [ClaimId] = &[$(ClaimId::$variant,)*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $(ClaimId::$variant => $id,)*
                }
            }

            /// One-line statement of the claim being checked.
            pub fn statement(self) -> &'static str {
                match self {
                    $(ClaimId::$variant => $desc,)*
                }
            }
        }

        impl FromStr for ClaimId {
            type Err = TheoremError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($id => Ok(ClaimId::$variant),)*
                    other => Err(TheoremError::UnknownClaim(other.to_owned())),
                }
            }
        }
    };
}

claims! {
    Prop1_1 => "prop-1.1", "fully traversable and G = [S_G] imply every edge is traversed exactly once";
    Cor1_1 => "cor-1.1", "on more than one vertex, fully traversable and G = [S_G] imply no vertex holds more than three pebbles";
    Cor1_2 => "cor-1.2", "not fully traversable and G = [S_G] imply some edge is traversed more than once";
    Thm2_1 => "thm-2.1", "[S_G] has a downward 4-cycle iff G has two movable vertices or a 2-movable vertex with at least four pebbles";
    Thm2_2 => "thm-2.2", "a graph containing a downward 4-cycle with a fully traversable assignment is not isomorphic to [S_G]";
    Cor2_1 => "cor-2.1", "on the downward 4-cycle exactly six assignment families give G = [S_G]";
    Thm3_1 => "thm-3.1", "no assignment on a downward k-cycle with k > 4 gives G = [S_G]";
    Thm4_1 => "thm-4.1", "a fully traversable assignment on a graph whose shadow has a cycle never gives G = [S_G]";
    Thm5_1 => "thm-5.1", "a downward tree with 2 or 3 pebbles on the root and 1 on every other non-sink vertex has T = [S_T]";
    Sec6 => "sec-6", "fully traversable G = [S_G] happens exactly for downward trees with the tree assignment";
    Thm7_1 => "thm-7.1", "a product of oriented paths with a simple pebbling has G = [S_G]";
    Lem7_1 => "lem-7.1", "k pebbles next to the sink of P_n with n = floor(k/2) + 1 give P_n = [S_P]";
    Lem7_2 => "lem-7.2", "a 4-or-5 heavy vertex followed by an empty one gives P_n = [S_P] when exactly n - 2 edges are traversed";
    Cor7_1 => "cor-7.1", "a product of paths with almost simple pebblings, each isomorphic to its own assignment graph, has G = [S_G]";
    Thm7_2 => "thm-7.2", "some G = [S_G] contains the oriented K_{n,m}";
    Thm8_1 => "thm-8.1", "an induced undirected copy of G in [S_G] extends to H with H = [S_H] as undirected graphs";
}

impl ClaimId {
    pub fn id_list() -> String {
        ClaimId::ALL.iter().map(|c| c.as_str()).collect::<Vec<_>>().join(", ")
    }

    /// Claims decided from a single graph and assignment.
    pub fn is_per_instance(self) -> bool {
        matches!(
            self,
            ClaimId::Prop1_1
                | ClaimId::Cor1_1
                | ClaimId::Cor1_2
                | ClaimId::Thm2_1
                | ClaimId::Thm2_2
                | ClaimId::Thm4_1
                | ClaimId::Thm8_1
        )
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for ClaimId {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Stats {
    pub states_built: u64,
    pub instances_scanned: u64,
    /// Not serialized, so reports stay byte-identical across runs.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl Stats {
    pub(crate) fn one(states: usize) -> Self {
        Stats { states_built: states as u64, instances_scanned: 1, wall_time: Duration::ZERO }
    }

    pub(crate) fn absorb(&mut self, other: &Stats) {
        self.states_built += other.states_built;
        self.instances_scanned += other.instances_scanned;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport {
    pub claim: ClaimId,
    pub description: String,
    /// The checked (or offending) instance in the graph text format.
    pub instance: Option<String>,
    pub verdict: Verdict,
    pub witness: Option<Value>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub stats: Stats,
}

impl VerificationReport {
    pub(crate) fn new(claim: ClaimId, description: impl Into<String>, verdict: Verdict) -> Self {
        VerificationReport {
            claim,
            description: description.into(),
            instance: None,
            verdict,
            witness: None,
            notes: Vec::new(),
            stats: Stats::default(),
        }
    }

    pub(crate) fn on<C: PebbleCount>(mut self, g: &OrientedGraph, a: &pebbling::Assignment<C>) -> Self {
        self.instance = Some(write_instance(g, a));
        self
    }

    pub(crate) fn witness(mut self, w: Value) -> Self {
        self.witness = Some(w);
        self
    }

    pub(crate) fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }

    pub(crate) fn stats(mut self, s: Stats) -> Self {
        self.stats = s;
        self
    }

    pub(crate) fn timed(mut self, start: std::time::Instant) -> Self {
        self.stats.wall_time = start.elapsed();
        self
    }

    pub fn passed(&self) -> bool {
        matches!(self.verdict, Verdict::Holds | Verdict::HypothesisNotMet)
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("reports serialize")
    }

    /// Plain-text rendering; omits wall time so output is reproducible.
    pub fn to_table(&self) -> String {
        let mut rows = vec![
            ("claim", self.claim.to_string()),
            ("verdict", self.verdict.to_string()),
            ("description", self.description.clone()),
            ("instances", self.stats.instances_scanned.to_string()),
            ("states built", self.stats.states_built.to_string()),
        ];
        for n in &self.notes {
            rows.push(("note", n.clone()));
        }
        if let Some(w) = &self.witness {
            rows.push(("witness", w.to_string()));
        }
        let mut out = String::new();
        for (k, v) in rows {
            out.push_str(&format!("{k:<13} {v}\n"));
        }
        if let Some(inst) = &self.instance {
            out.push_str("instance:\n");
            for line in inst.lines() {
                out.push_str("  ");
                out.push_str(line);
                out.push('\n');
            }
        }
        out
    }
}

/// Re-runs the per-instance check behind a report on its embedded instance.
///
/// Returns `None` when the report carries no instance.
pub fn replay(report: &VerificationReport, limits: &Limits) -> Option<Verdict> {
    let text = report.instance.as_ref()?;
    let inst = parse_instance::<Pebbles>(text).ok()?;
    Some(instance_verdict(report.claim, &inst.graph, &inst.assignment, limits))
}

/// The verdict of `claim` restricted to one instance. Scan claims reduce to
/// the isomorphism question their scan asks of each instance.
pub fn instance_verdict(
    claim: ClaimId,
    g: &OrientedGraph,
    s0: &Assignment,
    limits: &Limits,
) -> Verdict {
    match claim {
        ClaimId::Prop1_1 => verify_prop_1_1(g, s0, limits).verdict,
        ClaimId::Cor1_1 => verify_cor_1_1(g, s0, limits).verdict,
        ClaimId::Cor1_2 => verify_cor_1_2(g, s0, limits).verdict,
        ClaimId::Thm2_1 => check_thm_2_1(g, s0, limits).verdict,
        ClaimId::Thm2_2 => verify_thm_2_2(g, s0, limits).verdict,
        ClaimId::Thm4_1 => verify_thm_4_1(g, s0, limits).verdict,
        ClaimId::Thm8_1 => verify_thm_8_1(g, s0, limits).verdict,
        ClaimId::Thm3_1 => scans::thm_3_1_instance(g, s0, limits),
        ClaimId::Sec6 => scans::sec_6_instance(g, s0, limits),
        ClaimId::Cor2_1 => scans::cor_2_1_instance(g, s0, limits),
        ClaimId::Thm5_1 => trees::thm_5_1_instance(g, s0, limits),
        ClaimId::Thm7_1
        | ClaimId::Lem7_1
        | ClaimId::Lem7_2
        | ClaimId::Cor7_1
        | ClaimId::Thm7_2 => match isomorphic_to_own(g, s0, limits) {
            Ok((_, Some(_))) => Verdict::Holds,
            Ok((_, None)) => Verdict::Counterexample,
            Err(_) => Verdict::BudgetExceeded,
        },
    }
}

/// One `(graph, assignment)` pair found by a classification scan.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassifiedPair {
    pub graph: OrientedGraph,
    /// `None` marks a valence-0 vertex whose count is arbitrary.
    pub counts: Vec<Option<Pebbles>>,
    pub fully_traversable: bool,
}

impl ClassifiedPair {
    pub fn to_json(&self) -> Value {
        let assignment: serde_json::Map<String, Value> = self
            .graph
            .names()
            .iter()
            .zip(&self.counts)
            .map(|(n, c)| (n.clone(), c.map_or_else(|| json!("any"), |c| json!(c))))
            .collect();
        json!({
            "graph": crate::format::write_graph(&self.graph),
            "assignment": assignment,
            "fully_traversable": self.fully_traversable,
        })
    }

    /// Counts with sinks at zero.
    pub fn assignment(&self) -> Assignment {
        Assignment::from_counts(self.counts.iter().map(|c| c.unwrap_or(0)).collect())
    }

    fn short(&self) -> String {
        self.counts
            .iter()
            .map(|c| c.map_or_else(|| "*".to_owned(), |c| c.to_string()))
            .collect::<Vec<_>>()
            .join(",")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationResult {
    pub vertex_cap: usize,
    pub pebble_cap: Pebbles,
    pub pairs: Vec<ClassifiedPair>,
    pub instances_scanned: u64,
    pub states_built: u64,
}

impl ClassificationResult {
    pub fn to_json(&self) -> Value {
        json!({
            "vertex_cap": self.vertex_cap,
            "pebble_cap": self.pebble_cap,
            "instances_scanned": self.instances_scanned,
            "states_built": self.states_built,
            "pairs": self.pairs.iter().map(ClassifiedPair::to_json).collect::<Vec<_>>(),
        })
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{} pairs (vertex cap {}, pebble cap {}, {} instances scanned)\n",
            self.pairs.len(),
            self.vertex_cap,
            self.pebble_cap,
            self.instances_scanned
        );
        for p in &self.pairs {
            let edges: Vec<String> = p
                .graph
                .edges()
                .iter()
                .map(|&(u, v)| format!("{}{}", p.graph.name(u), p.graph.name(v)))
                .collect();
            out.push_str(&format!(
                "  n={} edges=[{}] counts=({}) ft={}\n",
                p.graph.vertex_count(),
                edges.join(" "),
                p.short(),
                p.fully_traversable
            ));
        }
        out
    }
}

/// Builds `[S_G]` and checks `G = [S_G]` as directed graphs.
pub(crate) fn isomorphic_to_own(
    g: &OrientedGraph,
    s0: &Assignment,
    limits: &Limits,
) -> Result<(AssignmentGraph, Option<IsoMapping>), BuildError> {
    let ag = build_with(g, s0, &limits.build_options())?;
    let iso = iso_with_built(g, &ag);
    Ok((ag, iso))
}

pub(crate) fn iso_with_built(g: &OrientedGraph, ag: &AssignmentGraph) -> Option<IsoMapping> {
    if ag.state_count() != g.vertex_count() || ag.transition_count() != g.edge_count() {
        return None;
    }
    digraph_isomorphic(g, &ag.as_oriented_graph())
}

/// Cheap variant for scans: a build that outgrows `|V|` states cannot be
/// isomorphic, so the budget is cut to `|V| + 1`.
pub(crate) fn quick_iso(
    g: &OrientedGraph,
    s0: &Assignment,
) -> (usize, Option<(AssignmentGraph, IsoMapping)>) {
    let opts = BuildOptions { state_budget: g.vertex_count() + 1 };
    match build_with(g, s0, &opts) {
        Ok(ag) => {
            let states = ag.state_count();
            (states, iso_with_built(g, &ag).map(|m| (ag, m)))
        }
        Err(_) => (g.vertex_count() + 1, None),
    }
}

/// `{vertex name: state}` for a mapping from `g` into `ag`.
pub(crate) fn state_map_json(g: &OrientedGraph, ag: &AssignmentGraph, m: &IsoMapping) -> Value {
    let map: serde_json::Map<String, Value> = g
        .vertices()
        .map(|v| (g.name(v).to_owned(), json!(ag.states()[m.image(v).0].to_string())))
        .collect();
    Value::Object(map)
}

pub(crate) fn traversal_json(g: &OrientedGraph, counts: &[usize]) -> Value {
    let map: serde_json::Map<String, Value> = g
        .edges()
        .iter()
        .zip(counts)
        .map(|(&(u, v), &c)| (format!("{}->{}", g.name(u), g.name(v)), json!(c)))
        .collect();
    Value::Object(map)
}

/// Folds per-instance reports into one: any counterexample wins, then any
/// exhausted budget, then any instance that met the hypothesis.
pub fn aggregate(
    claim: ClaimId,
    description: impl Into<String>,
    reports: Vec<VerificationReport>,
) -> VerificationReport {
    let mut stats = Stats::default();
    let mut tally = [0u64; 4];
    let mut first: [Option<usize>; 4] = [None; 4];
    for (i, r) in reports.iter().enumerate() {
        stats.absorb(&r.stats);
        let k = r.verdict as usize;
        tally[k] += 1;
        first[k].get_or_insert(i);
    }
    let verdict = if tally[Verdict::Counterexample as usize] > 0 {
        Verdict::Counterexample
    } else if tally[Verdict::BudgetExceeded as usize] > 0 {
        Verdict::BudgetExceeded
    } else if tally[Verdict::Holds as usize] > 0 {
        Verdict::Holds
    } else {
        Verdict::HypothesisNotMet
    };
    let mut out = VerificationReport::new(claim, description, verdict).stats(stats);
    let mut w = json!({
        "holds": tally[0],
        "counterexample": tally[1],
        "hypothesis_not_met": tally[2],
        "budget_exceeded": tally[3],
    });
    if let Some(i) = first[verdict as usize].filter(|_| verdict != Verdict::HypothesisNotMet) {
        let r = &reports[i];
        out.instance = r.instance.clone();
        w["first"] = r.witness.clone().unwrap_or(Value::Null);
        out.notes = r.notes.clone();
    }
    out.witness = Some(w);
    out
}
