//! Independent oracles shared by the integration suites. Nothing here calls
//! into the builder; each check recomputes from the move rule directly.

#![allow(dead_code)]

use std::collections::BTreeSet;

use pebblab::assignment_graph::AssignmentGraph;
use pebblab::{OrientedGraph, PebbleCount};

/// Widest graph the array oracle handles.
pub const MAX_N: usize = 6;


/// Plain edge list as index pairs.
pub fn edge_pairs(g: &OrientedGraph) -> Vec<(usize, usize)> {
    g.edges().iter().map(|&(v, w)| (v.0, w.0)).collect()
}

/// One byte per vertex, vertex `i` in byte `i`.
pub fn pack(c: &[u8]) -> u64 {
    c.iter().enumerate().fold(0, |k, (i, &x)| k | (x as u64) << (8 * i))
}

/// Largest count per vertex the dense enumerator indexes.
pub const DENSE_CAP: u8 = 8;
const BASE: usize = DENSE_CAP as usize + 1;

/// Depth-first enumeration of every reachable state over a dense table
/// indexed by the counts read as base-9 digits. A state is marked with the
/// current generation, so the table is never cleared between runs. Counts
/// are read from the packed form to avoid divisions.
pub struct DenseClosure {
    mark: Vec<u32>,
    generation: u32,
    pow: [usize; MAX_N],
    stack: Vec<(u64, usize)>,
    states: usize,
}

impl Default for DenseClosure {
    fn default() -> Self {
        let mut pow = [1; MAX_N];
        for i in 1..MAX_N {
            pow[i] = pow[i - 1] * BASE;
        }
        DenseClosure { mark: vec![0; BASE.pow(MAX_N as u32)], generation: 0, pow, stack: Vec::new(), states: 0 }
    }
}

impl DenseClosure {
    fn index(&self, c: &[u8]) -> Option<usize> {
        let mut k = 0;
        for (i, &x) in c.iter().enumerate() {
            if x > DENSE_CAP {
                return None;
            }
            k += x as usize * self.pow[i];
        }
        Some(k)
    }

    /// Explores from `s`, which must have at most [`DENSE_CAP`] pebbles in
    /// total. Returns the number of (state, legal move) pairs, which is the
    /// number of transitions in the assignment graph.
    pub fn run(&mut self, edges: &[(usize, usize)], s: &[u8]) -> usize {
        assert!(s.iter().map(|&x| x as u32).sum::<u32>() <= DENSE_CAP as u32);
        self.generation += 1;
        let g = self.generation;
        let root = self.index(s).unwrap();
        self.mark[root] = g;
        self.states = 1;
        self.stack.push((pack(s), root));
        let mut moves = 0;
        while let Some((p, k)) = self.stack.pop() {
            for &(v, w) in edges {
                if (p >> (8 * v)) & 0xff >= 2 {
                    let t = k - 2 * self.pow[v] + self.pow[w];
                    moves += 1;
                    if self.mark[t] != g {
                        self.mark[t] = g;
                        self.states += 1;
                        self.stack.push((p - (2 << (8 * v)) + (1 << (8 * w)), t));
                    }
                }
            }
        }
        moves
    }

    /// States reached by the last run.
    pub fn len(&self) -> usize {
        self.states
    }

    pub fn contains(&self, c: &[u8]) -> bool {
        self.index(c).is_some_and(|k| self.mark[k] == self.generation)
    }
}

/// Same enumeration over arbitrary-length vectors, with every transition
/// recorded as `(from, to, edge index)`.
pub fn naive_closure_vec(
    edges: &[(usize, usize)],
    s: Vec<u64>,
) -> (BTreeSet<Vec<u64>>, BTreeSet<(Vec<u64>, Vec<u64>, usize)>) {
    fn go(
        edges: &[(usize, usize)],
        s: Vec<u64>,
        states: &mut BTreeSet<Vec<u64>>,
        moves: &mut BTreeSet<(Vec<u64>, Vec<u64>, usize)>,
    ) {
        if !states.insert(s.clone()) {
            return;
        }
        for (e, &(v, w)) in edges.iter().enumerate() {
            if s[v] >= 2 {
                let mut t = s.clone();
                t[v] -= 2;
                t[w] += 1;
                moves.insert((s.clone(), t.clone(), e));
                go(edges, t, states, moves);
            }
        }
    }
    let mut states = BTreeSet::new();
    let mut moves = BTreeSet::new();
    go(edges, s, &mut states, &mut moves);
    (states, moves)
}

pub fn counts_u64<C: PebbleCount>(s: &pebblab::pebbling::Assignment<C>) -> Vec<u64> {
    s.to_u64s()
}

/// Full structural comparison of a built graph against the vector oracle.
pub fn matches_oracle<C: PebbleCount>(g: &OrientedGraph, ag: &AssignmentGraph<C>) -> Result<(), String> {
    let root = ag.state(ag.root()).to_u64s();
    let (states, moves) = naive_closure_vec(&edge_pairs(g), root);
    let built: BTreeSet<Vec<u64>> = ag.states().iter().map(|s| s.to_u64s()).collect();
    if built.len() != ag.state_count() {
        return Err("duplicate states in build".into());
    }
    if built != states {
        return Err(format!("state sets differ: {} built, {} expected", built.len(), states.len()));
    }
    let built_moves: BTreeSet<(Vec<u64>, Vec<u64>, usize)> = ag
        .transitions()
        .iter()
        .map(|t| (ag.state(t.from).to_u64s(), ag.state(t.to).to_u64s(), t.label_index))
        .collect();
    if built_moves.len() != ag.transition_count() || built_moves != moves {
        return Err("transition sets differ".into());
    }
    Ok(())
}

/// Each transition removes exactly one pebble in total.
pub fn is_graded<C: PebbleCount>(ag: &AssignmentGraph<C>) -> bool {
    ag.transitions().iter().all(|t| ag.state(t.from).total() == ag.state(t.to).total() + 1)
}

/// The root is the only state without incoming transitions.
pub fn has_unique_source<C: PebbleCount>(ag: &AssignmentGraph<C>) -> bool {
    let mut indeg = vec![0usize; ag.state_count()];
    for t in ag.transitions() {
        indeg[t.to.0] += 1;
    }
    let sources: Vec<usize> = (0..indeg.len()).filter(|&i| indeg[i] == 0).collect();
    sources == [ag.root().0]
}

/// Two-colours the undirected shadow with a parity union-find: each
/// transition joins its ends with opposite colours.
pub fn is_bipartite<C: PebbleCount>(ag: &AssignmentGraph<C>) -> bool {
    let mut up: Vec<(usize, bool)> = (0..ag.state_count()).map(|i| (i, false)).collect();
    ag.transitions().iter().all(|t| join_opposite(&mut up, t.from.0, t.to.0))
}

// parent and parity-to-parent per state; false when x and y already share a colour
fn join_opposite(up: &mut [(usize, bool)], x: usize, y: usize) -> bool {
    fn find(up: &mut [(usize, bool)], x: usize) -> (usize, bool) {
        let (p, par) = up[x];
        if p == x {
            return (x, false);
        }
        let (root, rest) = find(up, p);
        up[x] = (root, par ^ rest);
        (root, par ^ rest)
    }
    let (a, pa) = find(up, x);
    let (b, pb) = find(up, y);
    if a == b {
        return pa != pb;
    }
    up[a] = (b, !(pa ^ pb));
    true
}

/// Legality of every transition against the move rule, grading, the unique
/// source and bipartiteness in one pass, for the exhaustive sweep. Buffers
/// are reused across calls.
#[derive(Default)]
pub struct StructureCheck {
    key: Vec<u64>,
    indeg: Vec<u32>,
}

impl StructureCheck {
    pub fn run(&mut self, ag: &AssignmentGraph<u8>) -> Result<(), &'static str> {
        self.key.clear();
        self.key.extend(ag.states().iter().map(|s| pack(s.counts())));
        self.indeg.clear();
        self.indeg.resize(self.key.len(), 0);
        // byte sums of packed keys, parity doubles as a two-colouring
        let total = |k: u64| k.to_le_bytes().iter().map(|&b| b as u32).sum::<u32>();
        for t in ag.transitions() {
            let (v, w) = (t.label.0 .0, t.label.1 .0);
            let (a, b) = (self.key[t.from.0], self.key[t.to.0]);
            if (a >> (8 * v)) & 0xff < 2 || b != a - (2 << (8 * v)) + (1 << (8 * w)) {
                return Err("illegal transition");
            }
            let (ta, tb) = (total(a), total(b));
            if ta != tb + 1 {
                return Err("grading");
            }
            if ta % 2 == tb % 2 {
                return Err("bipartiteness");
            }
            self.indeg[t.to.0] += 1;
        }
        if self.indeg.iter().enumerate().any(|(i, &d)| (d == 0) != (i == ag.root().0)) {
            return Err("source");
        }
        Ok(())
    }
}

/// Every assignment on `n` vertices with total at most `total`.
pub fn bounded_total_counts(n: usize, total: u8) -> Vec<Vec<u8>> {
    fn rec(i: usize, n: usize, left: u8, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for c in 0..=left {
            cur[i] = c;
            rec(i + 1, n, left - c, cur, out);
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(0, n, total, &mut vec![0; n], &mut out);
    out
}
