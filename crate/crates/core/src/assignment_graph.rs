//! The assignment graph: every pebbling state reachable from an initial
//! assignment, with one labelled transition per legal move.
//!
//! States are identified by their exact pebble distribution, so two move
//! sequences that end in the same distribution reach the same state. The
//! builder is a breadth-first closure that tries moves in the graph's edge
//! declaration order, which fixes the state numbering.

use std::fmt::{self, Write as _};

use indexmap::IndexSet;
use rustc_hash::FxBuildHasher;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Edge, OrientedGraph, VertexId};
use crate::pebbling::{Assignment, PebbleCount, PebblingError};

pub const DEFAULT_STATE_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct StateId(pub usize);

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BuildError {
    #[error("more than {0} states; input is beyond the configured state budget")]
    StateBudgetExceeded(usize),
    #[error(transparent)]
    Pebbling(#[from] PebblingError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    pub state_budget: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { state_budget: DEFAULT_STATE_BUDGET }
    }
}

/// One pebbling move between two states.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub from: StateId,
    pub to: StateId,
    /// The edge of the pebbled graph that the move travels along.
    pub label: Edge,
    /// Declaration index of `label` in the pebbled graph.
    pub label_index: usize,
}

#[derive(Clone, Debug)]
pub struct AssignmentGraph<C> {
    states: Vec<Assignment<C>>,
    transitions: Vec<Transition>,
    // transitions leaving state s are first[s]..first[s + 1], in move order
    first: Vec<usize>,
    edge_count: usize,
}

pub fn build<C: PebbleCount>(
    g: &OrientedGraph,
    s0: &Assignment<C>,
) -> Result<AssignmentGraph<C>, BuildError> {
    build_with(g, s0, &BuildOptions::default())
}

pub fn build_with<C: PebbleCount>(
    g: &OrientedGraph,
    s0: &Assignment<C>,
    opts: &BuildOptions,
) -> Result<AssignmentGraph<C>, BuildError> {
    if s0.len() != g.vertex_count() {
        return Err(PebblingError::LengthMismatch { expected: g.vertex_count(), found: s0.len() }
            .into());
    }
    let budget = opts.state_budget.max(1);
    let two = C::lit(2);
    // insertion order doubles as the state id
    let mut seen: IndexSet<Assignment<C>, FxBuildHasher> =
        IndexSet::with_capacity_and_hasher(32, FxBuildHasher);
    seen.insert(s0.clone());
    let mut first = Vec::with_capacity(33);
    first.push(0);
    let mut transitions = Vec::with_capacity(64);
    // the state being expanded; each move is applied and undone in place
    let mut cur: Vec<C> = s0.counts().to_vec();
    // BFS: ids are handed out in queue order, so the frontier is a cursor
    let mut s = 0;
    while s < seen.len() {
        cur.copy_from_slice(seen[s].counts());
        for (e, &(v, w)) in g.edges().iter().enumerate() {
            let (here, there) = (cur[v.0], cur[w.0]);
            if here < two {
                continue;
            }
            cur[v.0] = here - two;
            cur[w.0] = there.checked_add(&C::one()).ok_or(PebblingError::CountOverflow(w))?;
            // counts are stored inline, so probing with an owned key is free
            let (t, fresh) = seen.insert_full(Assignment::from_slice(&cur));
            cur[v.0] = here;
            cur[w.0] = there;
            if fresh && t == budget {
                return Err(BuildError::StateBudgetExceeded(budget));
            }
            transitions.push(Transition {
                from: StateId(s),
                to: StateId(t),
                label: (v, w),
                label_index: e,
            });
        }
        first.push(transitions.len());
        s += 1;
    }
    let states = seen.into_iter().collect();
    Ok(AssignmentGraph { states, transitions, first, edge_count: g.edge_count() })
}

impl<C: PebbleCount> AssignmentGraph<C> {
    fn leaving(&self, s: usize) -> &[Transition] {
        &self.transitions[self.first[s]..self.first[s + 1]]
    }

    /// The initial assignment.
    pub fn root(&self) -> StateId {
        StateId(0)
    }

    pub fn states(&self) -> &[Assignment<C>] {
        &self.states
    }

    pub fn state(&self, id: StateId) -> &Assignment<C> {
        &self.states[id.0]
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    /// Transitions in discovery order.
    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn successors(&self, id: StateId) -> impl Iterator<Item = &Transition> + '_ {
        self.leaving(id.0).iter()
    }

    pub fn out_degree(&self, id: StateId) -> usize {
        self.leaving(id.0).len()
    }

    /// States with no legal move.
    pub fn terminal_states(&self) -> Vec<StateId> {
        (0..self.states.len()).filter(|&s| self.leaving(s).is_empty()).map(StateId).collect()
    }

    /// Number of transitions labelled with each edge of the pebbled graph,
    /// indexed by edge declaration order.
    pub fn traversal_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.edge_count];
        for t in &self.transitions {
            counts[t.label_index] += 1;
        }
        counts
    }

    /// At least one edge, and every edge labels some transition.
    pub fn is_fully_traversable(&self) -> bool {
        self.edge_count > 0 && self.traversal_counts().iter().all(|&c| c > 0)
    }

    /// A downward 4-cycle `A->B, A->C, B->D, C->D` among the states, found
    /// without materializing [`Self::as_oriented_graph`]. Returns the first
    /// witness in state order, matching [`contains_downward_4_cycle`] on
    /// the converted graph.
    pub fn downward_4_cycle(&self) -> Option<[StateId; 4]> {
        let n = self.states.len();
        let targets = |s: usize| -> Vec<usize> {
            let mut t: Vec<usize> = self.leaving(s).iter().map(|t| t.to.0).collect();
            t.sort_unstable();
            t
        };
        // stamp[d] == b + 1 marks d as a successor of the current b
        let mut stamp = vec![0usize; n];
        for a in 0..n {
            let kids = targets(a);
            for (i, &b) in kids.iter().enumerate() {
                let below_b = targets(b);
                for &d in &below_b {
                    stamp[d] = b + 1;
                }
                for &c in &kids[i + 1..] {
                    let hit = targets(c).into_iter().filter(|&d| stamp[d] == b + 1).min();
                    if let Some(d) = hit {
                        return Some([StateId(a), StateId(b), StateId(c), StateId(d)]);
                    }
                }
            }
        }
        None
    }

    /// Forgets labels and pebbles; vertex `i` is named after state `i`.
    pub fn as_oriented_graph(&self) -> OrientedGraph {
        let names = (0..self.states.len()).map(|i| i.to_string()).collect();
        let edges = self.transitions.iter().map(|t| (t.from.0, t.to.0)).collect();
        OrientedGraph::from_indices(names, edges).expect("assignment graphs are oriented")
    }

    fn sorted_transitions(&self) -> Vec<&Transition> {
        let mut ts: Vec<&Transition> = self.transitions.iter().collect();
        ts.sort_by_key(|t| (t.from, t.to, t.label));
        ts
    }

    /// Graphviz rendering. Nodes in state order labelled with their pebble
    /// vector; edges sorted by `(from, to, label)` and labelled `v->w`.
    pub fn to_dot(&self, g: &OrientedGraph) -> String {
        let mut s = String::from("digraph assignment_graph {\n");
        for (i, a) in self.states.iter().enumerate() {
            let _ = writeln!(s, "  {i} [label=\"{a}\"];");
        }
        for t in self.sorted_transitions() {
            let _ = writeln!(
                s,
                "  {} -> {} [label=\"{}->{}\"];",
                t.from,
                t.to,
                dot_escape(g.name(t.label.0)),
                dot_escape(g.name(t.label.1))
            );
        }
        s.push_str("}\n");
        s
    }

    /// JSON view: vertex names, state vectors, sorted transitions.
    pub fn to_json(&self, g: &OrientedGraph) -> serde_json::Value {
        #[derive(Serialize)]
        struct View<'a, C> {
            vertices: &'a [String],
            root: usize,
            states: &'a [Assignment<C>],
            edges: Vec<(usize, usize, String)>,
            traversal_counts: Vec<(String, usize)>,
            fully_traversable: bool,
        }
        let counts = self.traversal_counts();
        let view = View {
            vertices: g.names(),
            root: 0,
            states: &self.states,
            edges: self
                .sorted_transitions()
                .into_iter()
                .map(|t| (t.from.0, t.to.0, format!("{}->{}", g.name(t.label.0), g.name(t.label.1))))
                .collect(),
            traversal_counts: g
                .edges()
                .iter()
                .zip(counts)
                .map(|(&(u, v), c)| (format!("{}->{}", g.name(u), g.name(v)), c))
                .collect(),
            fully_traversable: self.is_fully_traversable(),
        };
        serde_json::to_value(view).expect("assignment graph serializes")
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Traversal count of every edge of `ag`'s pebbled graph.
pub fn traversal_counts<C: PebbleCount>(ag: &AssignmentGraph<C>) -> Vec<usize> {
    ag.traversal_counts()
}

pub fn is_fully_traversable<C: PebbleCount>(
    g: &OrientedGraph,
    s0: &Assignment<C>,
) -> Result<bool, BuildError> {
    Ok(build(g, s0)?.is_fully_traversable())
}

/// A downward 4-cycle `A->B, A->C, B->D, C->D` with `B != C`, if present.
/// The first witness in vertex order is returned.
pub fn contains_downward_4_cycle(h: &OrientedGraph) -> Option<[VertexId; 4]> {
    for a in 0..h.vertex_count() {
        let kids = h.out_of(a);
        for (i, &b) in kids.iter().enumerate() {
            for &c in &kids[i + 1..] {
                // both lists are sorted; walk them together
                let (bo, co) = (h.out_of(b), h.out_of(c));
                let (mut x, mut y) = (0, 0);
                while x < bo.len() && y < co.len() {
                    match bo[x].cmp(&co[y]) {
                        std::cmp::Ordering::Less => x += 1,
                        std::cmp::Ordering::Greater => y += 1,
                        std::cmp::Ordering::Equal => {
                            return Some([VertexId(a), VertexId(b), VertexId(c), VertexId(bo[x])]);
                        }
                    }
                }
            }
        }
    }
    None
}
