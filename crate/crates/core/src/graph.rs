//! Finite simple oriented graphs.
//!
//! Vertices are positional: a [`VertexId`] is the index of the vertex in
//! declaration order, and every set-valued output is emitted in that order.
//! Names are kept only for display and for the text format.

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::iso::{self, IsoMapping, IsoMode};

#[derive(
    Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize,
)]
pub struct VertexId(pub usize);

impl VertexId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An oriented edge `(from, to)`.
pub type Edge = (VertexId, VertexId);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("self-loop on vertex `{0}`")]
    SelfLoop(String),
    #[error("edges `{0}`->`{1}` and `{1}`->`{0}` are both present")]
    BidirectionalEdge(String, String),
    #[error("edge `{0}`->`{1}` declared twice")]
    DuplicateEdge(String, String),
    #[error("edge endpoint `{0}` is not a declared vertex")]
    UnknownEndpoint(String),
    #[error("vertex {0} is not in the graph")]
    UnknownVertex(VertexId),
    #[error("downward cycle length must be even and at least 4, got {0}")]
    InvalidK(usize),
    #[error("path must have at least one vertex, got {0}")]
    InvalidN(usize),
    #[error("complete bipartite parts must be non-empty, got ({0}, {1})")]
    InvalidSize(usize, usize),
    #[error("cartesian product factor {0} has no vertices")]
    EmptyFactor(usize),
}

/// A finite simple oriented graph: no self-loops and no pair of opposite
/// edges.
#[derive(Clone)]
pub struct OrientedGraph {
    names: Vec<String>,
    edges: Vec<Edge>,
    // sorted targets, with the declaration index of each edge alongside
    out: Vec<Vec<usize>>,
    out_eid: Vec<Vec<usize>>,
    // sorted sources
    inc: Vec<Vec<usize>>,
}

impl PartialEq for OrientedGraph {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.edges == other.edges
    }
}

impl Eq for OrientedGraph {}

impl fmt::Debug for OrientedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges: Vec<String> = self
            .edges
            .iter()
            .map(|&(u, v)| format!("{}->{}", self.names[u.0], self.names[v.0]))
            .collect();
        f.debug_struct("OrientedGraph")
            .field("vertices", &self.names)
            .field("edges", &edges)
            .finish()
    }
}

impl OrientedGraph {
    /// Builds a graph from vertex names and name pairs.
    pub fn new<S: AsRef<str>>(vertices: &[S], edges: &[(S, S)]) -> Result<Self, GraphError> {
        let names: Vec<String> = vertices.iter().map(|s| s.as_ref().to_owned()).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.as_str(), i).is_some() {
                return Err(GraphError::DuplicateVertex(name.clone()));
            }
        }
        let lookup = |s: &S| {
            index
                .get(s.as_ref())
                .copied()
                .ok_or_else(|| GraphError::UnknownEndpoint(s.as_ref().to_owned()))
        };
        let pairs = edges
            .iter()
            .map(|(a, b)| Ok((lookup(a)?, lookup(b)?)))
            .collect::<Result<Vec<_>, GraphError>>()?;
        Self::from_indices(names, pairs)
    }

    /// Builds a graph from vertex names and index pairs.
    pub fn from_indices(names: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        let n = names.len();
        {
            let mut seen = HashSet::with_capacity(n);
            for name in &names {
                if !seen.insert(name.as_str()) {
                    return Err(GraphError::DuplicateVertex(name.clone()));
                }
            }
        }
        let mut out: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        let mut inc: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut seen = HashSet::with_capacity(edges.len());
        for (i, &(u, v)) in edges.iter().enumerate() {
            for x in [u, v] {
                if x >= n {
                    return Err(GraphError::UnknownEndpoint(format!("#{x}")));
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(names[u].clone()));
            }
            if seen.contains(&(v, u)) {
                return Err(GraphError::BidirectionalEdge(names[v].clone(), names[u].clone()));
            }
            if !seen.insert((u, v)) {
                return Err(GraphError::DuplicateEdge(names[u].clone(), names[v].clone()));
            }
            out[u].push((v, i));
            inc[v].push(u);
        }
        for list in &mut out {
            list.sort_unstable();
        }
        let out_eid = out.iter().map(|l| l.iter().map(|&(_, e)| e).collect()).collect();
        let out = out.into_iter().map(|l| l.into_iter().map(|(w, _)| w).collect()).collect();
        for list in &mut inc {
            list.sort_unstable();
        }
        let edges = edges.into_iter().map(|(u, v)| (VertexId(u), VertexId(v))).collect();
        Ok(OrientedGraph { names, edges, out, out_eid, inc })
    }

    /// A graph on `n` vertices named `0..n` with no edges.
    pub fn edgeless(n: usize) -> Self {
        Self::from_indices((0..n).map(|i| i.to_string()).collect(), Vec::new())
            .expect("edgeless graph is valid")
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> impl ExactSizeIterator<Item = VertexId> + '_ {
        (0..self.names.len()).map(VertexId)
    }

    /// Edges in declaration order.
    #[inline]
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v.0]
    }

    pub fn find(&self, name: &str) -> Option<VertexId> {
        self.names.iter().position(|n| n == name).map(VertexId)
    }

    #[inline]
    pub fn contains(&self, v: VertexId) -> bool {
        v.0 < self.names.len()
    }

    fn check(&self, v: VertexId) -> Result<(), GraphError> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(GraphError::UnknownVertex(v))
        }
    }

    /// Out-degree of `v`.
    pub fn valence(&self, v: VertexId) -> Result<usize, GraphError> {
        self.check(v)?;
        Ok(self.out[v.0].len())
    }

    pub fn in_degree(&self, v: VertexId) -> Result<usize, GraphError> {
        self.check(v)?;
        Ok(self.inc[v.0].len())
    }

    /// Out-neighbours of vertex index `v`, sorted.
    pub(crate) fn out_of(&self, v: usize) -> &[usize] {
        &self.out[v]
    }

    /// In-neighbours of vertex index `v`, sorted.
    pub(crate) fn in_of(&self, v: usize) -> &[usize] {
        &self.inc[v]
    }

    #[inline]
    pub(crate) fn out_degree_of(&self, v: usize) -> usize {
        self.out[v].len()
    }

    #[inline]
    pub(crate) fn in_degree_of(&self, v: usize) -> usize {
        self.inc[v].len()
    }

    /// Declaration index of edge `(u, v)`, if present.
    pub fn edge_index(&self, u: VertexId, v: VertexId) -> Option<usize> {
        let list = self.out.get(u.0)?;
        list.binary_search(&v.0).ok().map(|i| self.out_eid[u.0][i])
    }

    #[inline]
    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.has_edge_ix(u.0, v.0)
    }

    #[inline]
    pub(crate) fn has_edge_ix(&self, u: usize, v: usize) -> bool {
        self.out[u].binary_search(&v).is_ok()
    }

    /// Adjacent in the undirected shadow.
    #[inline]
    pub fn adjacent(&self, u: VertexId, v: VertexId) -> bool {
        self.has_edge_ix(u.0, v.0) || self.has_edge_ix(v.0, u.0)
    }

    /// Vertices with in-degree 0.
    pub fn sources(&self) -> Vec<VertexId> {
        self.vertices().filter(|v| self.inc[v.0].is_empty()).collect()
    }

    /// Vertices with valence 0.
    pub fn sinks(&self) -> Vec<VertexId> {
        self.vertices().filter(|v| self.out[v.0].is_empty()).collect()
    }

    pub fn is_sink(&self, v: VertexId) -> bool {
        self.out[v.0].is_empty()
    }

    pub fn max_valence(&self) -> usize {
        self.out.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// True iff the undirected shadow contains a cycle.
    pub fn underlying_has_cycle(&self) -> bool {
        let mut dsu = Dsu::new(self.vertex_count());
        self.edges.iter().any(|&(u, v)| !dsu.union(u.0, v.0))
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return true;
        }
        let mut dsu = Dsu::new(n);
        let mut parts = n;
        for &(u, v) in &self.edges {
            if dsu.union(u.0, v.0) {
                parts -= 1;
            }
        }
        parts == 1
    }

    /// The root of the graph if it is a downward directed rooted tree: the
    /// shadow is a tree and every edge points away from the root.
    pub fn is_downward_tree(&self) -> Option<VertexId> {
        let n = self.vertex_count();
        if n == 0 || self.edge_count() != n - 1 || !self.is_connected() {
            return None;
        }
        let mut root = None;
        for v in self.vertices() {
            match self.inc[v.0].len() {
                0 if root.is_none() => root = Some(v),
                1 => {}
                _ => return None,
            }
        }
        root
    }

    /// A downward tree in which no vertex has valence above one.
    pub fn is_oriented_path(&self) -> bool {
        self.is_downward_tree().is_some() && self.max_valence() <= 1
    }

    /// Vertices of an oriented path from source to sink.
    pub fn path_order(&self) -> Option<Vec<VertexId>> {
        let mut v = self.is_downward_tree()?;
        if self.max_valence() > 1 {
            return None;
        }
        let mut order = Vec::with_capacity(self.vertex_count());
        order.push(v);
        while let Some(&w) = self.out[v.0].first() {
            v = VertexId(w);
            order.push(v);
        }
        Some(order)
    }

    /// Applies a vertex permutation: vertex `i` of `self` becomes vertex
    /// `perm[i]` of the result. Names travel with their vertices.
    pub fn relabel(&self, perm: &[usize]) -> OrientedGraph {
        assert_eq!(perm.len(), self.vertex_count());
        let mut names = vec![String::new(); perm.len()];
        for (i, &p) in perm.iter().enumerate() {
            names[p] = self.names[i].clone();
        }
        let edges = self.edges.iter().map(|&(u, v)| (perm[u.0], perm[v.0])).collect();
        OrientedGraph::from_indices(names, edges).expect("relabeling preserves validity")
    }

    /// Same vertex set, every edge reversed.
    pub fn reversed(&self) -> OrientedGraph {
        let edges = self.edges.iter().map(|&(u, v)| (v.0, u.0)).collect();
        OrientedGraph::from_indices(self.names.clone(), edges).expect("reversal preserves validity")
    }

    /// Every edge-preserving bijection of the graph onto itself.
    pub fn automorphisms(&self) -> Vec<IsoMapping> {
        iso::all_isomorphisms(self, self, IsoMode::Directed)
    }
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}

/// A `k`-cycle oriented as two directed paths of length `k/2` from a single
/// source `r` to a single sink `b`.
///
/// Vertex order is `r, l1.., s1.., b`; for `k = 4` that is `r, l1, s1, b`.
pub fn downward_cycle(k: usize) -> Result<OrientedGraph, GraphError> {
    if k < 4 || k % 2 != 0 {
        return Err(GraphError::InvalidK(k));
    }
    let side = k / 2 - 1;
    let mut names = vec!["r".to_owned()];
    names.extend((1..=side).map(|i| format!("l{i}")));
    names.extend((1..=side).map(|i| format!("s{i}")));
    names.push("b".to_owned());
    let bottom = names.len() - 1;
    let left = |i: usize| i;
    let right = |i: usize| side + i;
    let mut edges = vec![(0, left(1)), (0, right(1))];
    for i in 1..side {
        edges.push((left(i), left(i + 1)));
    }
    edges.push((left(side), bottom));
    for i in 1..side {
        edges.push((right(i), right(i + 1)));
    }
    edges.push((right(side), bottom));
    OrientedGraph::from_indices(names, edges)
}

/// `a1 -> a2 -> ... -> an`.
pub fn oriented_path(n: usize) -> Result<OrientedGraph, GraphError> {
    if n == 0 {
        return Err(GraphError::InvalidN(n));
    }
    let names = (1..=n).map(|i| format!("a{i}")).collect();
    OrientedGraph::from_indices(names, (1..n).map(|i| (i - 1, i)).collect())
}

/// Parts `a1..an` and `b1..bm` with every edge `(ai, bj)`.
pub fn oriented_complete_bipartite(n: usize, m: usize) -> Result<OrientedGraph, GraphError> {
    if n == 0 || m == 0 {
        return Err(GraphError::InvalidSize(n, m));
    }
    let mut names: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
    names.extend((1..=m).map(|j| format!("b{j}")));
    let edges = (0..n).flat_map(|i| (0..m).map(move |j| (i, n + j))).collect();
    OrientedGraph::from_indices(names, edges)
}

/// Index of the product vertex with the given factor coordinates. The first
/// coordinate is the most significant.
pub fn product_vertex(dims: &[usize], coords: &[usize]) -> VertexId {
    debug_assert_eq!(dims.len(), coords.len());
    VertexId(
        dims.iter()
            .zip(coords)
            .fold(0, |acc, (&d, &c)| {
                debug_assert!(c < d);
                acc * d + c
            }),
    )
}

/// The Cartesian product of oriented graphs.
///
/// Vertices are coordinate tuples in lexicographic order, named by joining
/// the factor names with commas. Two tuples are joined when they differ in
/// exactly one coordinate along an edge of that factor, oriented as that
/// factor edge.
pub fn cartesian_product(factors: &[OrientedGraph]) -> Result<OrientedGraph, GraphError> {
    if let Some(i) = factors.iter().position(|g| g.vertex_count() == 0) {
        return Err(GraphError::EmptyFactor(i));
    }
    if factors.is_empty() {
        return Err(GraphError::EmptyFactor(0));
    }
    let dims: Vec<usize> = factors.iter().map(OrientedGraph::vertex_count).collect();
    let total: usize = dims.iter().product();
    // out-lists in declaration order, per factor
    let decl_out: Vec<Vec<Vec<usize>>> = factors
        .iter()
        .map(|g| {
            let mut out = vec![Vec::new(); g.vertex_count()];
            for &(u, v) in g.edges() {
                out[u.0].push(v.0);
            }
            out
        })
        .collect();

    let mut names = Vec::with_capacity(total);
    let mut edges = Vec::new();
    let mut coords = vec![0usize; dims.len()];
    for idx in 0..total {
        let name: Vec<&str> = coords
            .iter()
            .zip(factors)
            .map(|(&c, g)| g.names[c].as_str())
            .collect();
        names.push(name.join(","));
        for (i, out) in decl_out.iter().enumerate() {
            for &w in &out[coords[i]] {
                let mut next = coords.clone();
                next[i] = w;
                edges.push((idx, product_vertex(&dims, &next).0));
            }
        }
        // advance the mixed-radix counter
        for i in (0..dims.len()).rev() {
            coords[i] += 1;
            if coords[i] < dims[i] {
                break;
            }
            coords[i] = 0;
        }
    }
    OrientedGraph::from_indices(names, edges)
}
