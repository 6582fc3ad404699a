//! Pebbling assignments and the oriented pebbling move.
//!
//! An [`Assignment`] is generic over its pebble count type `C`; any unsigned
//! primitive integer works. Moves use checked arithmetic, so a narrow `C`
//! reports overflow instead of wrapping.

use std::fmt;
use std::hash::Hash;

use num_traits::{CheckedAdd, PrimInt, Unsigned};
use serde::Serialize;
use smallvec::SmallVec;
use thiserror::Error;

use crate::graph::{cartesian_product, product_vertex, Edge, GraphError, OrientedGraph, VertexId};

/// Pebble count scalar.
pub trait PebbleCount:
    PrimInt + Unsigned + CheckedAdd + Hash + fmt::Debug + fmt::Display + Default + Serialize + Send + Sync + 'static
{
    /// Lossless conversion from a small literal; panics when out of range.
    fn lit(n: u64) -> Self {
        Self::from(n).unwrap_or_else(|| panic!("{n} does not fit the pebble count type"))
    }

    fn to_u64_lossless(self) -> u64 {
        self.to_u64().expect("unsigned counts fit in u64")
    }
}

impl<T> PebbleCount for T where
    T: PrimInt + Unsigned + CheckedAdd + Hash + fmt::Debug + fmt::Display + Default + Serialize + Send + Sync + 'static
{
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PebblingError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("assignment has {found} counts but the graph has {expected} vertices")]
    LengthMismatch { expected: usize, found: usize },
    #[error("illegal move {from}->{to}: {reason}")]
    IllegalMove { from: VertexId, to: VertexId, reason: &'static str },
    #[error("pebble count overflow on vertex {0}")]
    CountOverflow(VertexId),
    #[error("graph is not an oriented path")]
    NotAPath,
    #[error("graph is not a downward rooted tree")]
    NotADownwardTree,
    #[error("source must carry 2 or 3 pebbles, got {0}")]
    BadSourceCount(u64),
    #[error("root must carry 2 or 3 pebbles, got {0}")]
    BadRootCount(u64),
    #[error("vertex {0} is not a valence-0 vertex of the tree")]
    NotALeaf(VertexId),
    #[error("invalid almost simple parameters: {0}")]
    BadVariantParams(String),
}

/// A pebble count for every vertex of a graph, in vertex order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Assignment<C> {
    // inline up to eight vertices, which covers every exhaustive sweep
    counts: SmallVec<[C; 8]>,
}

impl<C: PebbleCount> Assignment<C> {
    pub fn new(g: &OrientedGraph, counts: Vec<C>) -> Result<Self, PebblingError> {
        if counts.len() != g.vertex_count() {
            return Err(PebblingError::LengthMismatch {
                expected: g.vertex_count(),
                found: counts.len(),
            });
        }
        Ok(Assignment { counts: counts.into() })
    }

    /// No graph check; the caller guarantees the length.
    pub fn from_counts(counts: Vec<C>) -> Self {
        Assignment { counts: counts.into() }
    }

    pub fn from_slice(counts: &[C]) -> Self {
        Assignment { counts: SmallVec::from_slice(counts) }
    }

    pub fn zeros(g: &OrientedGraph) -> Self {
        Assignment { counts: SmallVec::from_elem(C::zero(), g.vertex_count()) }
    }

    /// Counts from small integers; panics when one does not fit `C`.
    pub fn from_u64s(g: &OrientedGraph, counts: &[u64]) -> Result<Self, PebblingError> {
        Self::new(g, counts.iter().map(|&c| C::lit(c)).collect())
    }

    #[inline]
    pub fn get(&self, v: VertexId) -> C {
        self.counts[v.0]
    }

    #[inline]
    pub fn counts(&self) -> &[C] {
        &self.counts
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|c| c.to_u64_lossless()).sum()
    }

    pub fn max(&self) -> C {
        self.counts.iter().copied().max().unwrap_or_else(C::zero)
    }

    /// Copy with `v` set to `c`.
    pub fn with(&self, v: VertexId, c: C) -> Self {
        let mut counts = self.counts.clone();
        counts[v.0] = c;
        Assignment { counts }
    }

    /// The assignment seen through a vertex permutation: the count of vertex
    /// `i` moves to position `perm[i]`.
    pub fn permuted(&self, perm: &[VertexId]) -> Self {
        let mut counts = self.counts.clone();
        for (i, p) in perm.iter().enumerate() {
            counts[p.0] = self.counts[i];
        }
        Assignment { counts }
    }

    pub fn convert<D: PebbleCount>(&self) -> Option<Assignment<D>> {
        let counts = self
            .counts
            .iter()
            .map(|c| D::from(*c))
            .collect::<Option<SmallVec<[D; 8]>>>()?;
        Some(Assignment { counts })
    }

    pub fn to_u64s(&self) -> Vec<u64> {
        self.counts.iter().map(|c| c.to_u64_lossless()).collect()
    }

    pub(crate) fn counts_mut(&mut self) -> &mut [C] {
        &mut self.counts
    }
}

/// Comma-separated counts in vertex order, e.g. `2,1,0`.
impl<C: fmt::Display> fmt::Display for Assignment<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl<C: fmt::Debug> fmt::Debug for Assignment<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c:?}")?;
        }
        f.write_str(")")
    }
}

fn check_len<C: PebbleCount>(g: &OrientedGraph, a: &Assignment<C>) -> Result<(), PebblingError> {
    if a.len() == g.vertex_count() {
        Ok(())
    } else {
        Err(PebblingError::LengthMismatch { expected: g.vertex_count(), found: a.len() })
    }
}

/// At least two pebbles and somewhere to send them.
pub fn is_movable<C: PebbleCount>(
    g: &OrientedGraph,
    a: &Assignment<C>,
    v: VertexId,
) -> Result<bool, PebblingError> {
    check_len(g, a)?;
    Ok(g.valence(v)? >= 1 && a.get(v) >= C::lit(2))
}

/// Movable with valence at least `n`.
pub fn is_n_movable<C: PebbleCount>(
    g: &OrientedGraph,
    a: &Assignment<C>,
    v: VertexId,
    n: usize,
) -> Result<bool, PebblingError> {
    Ok(is_movable(g, a, v)? && g.valence(v)? >= n)
}

pub fn movable_vertices<C: PebbleCount>(g: &OrientedGraph, a: &Assignment<C>) -> Vec<VertexId> {
    g.vertices()
        .filter(|&v| !g.is_sink(v) && a.get(v) >= C::lit(2))
        .collect()
}

/// Every edge `(v, w)` with at least two pebbles on `v`, in edge declaration
/// order.
pub fn legal_moves<C: PebbleCount>(g: &OrientedGraph, a: &Assignment<C>) -> Vec<Edge> {
    let two = C::lit(2);
    g.edges().iter().copied().filter(|&(v, _)| a.get(v) >= two).collect()
}

/// Removes two pebbles from `v` and adds one to `w`.
pub fn apply_move<C: PebbleCount>(
    g: &OrientedGraph,
    a: &Assignment<C>,
    (v, w): Edge,
) -> Result<Assignment<C>, PebblingError> {
    check_len(g, a)?;
    if !g.contains(v) || !g.contains(w) || !g.has_edge(v, w) {
        return Err(PebblingError::IllegalMove { from: v, to: w, reason: "no such edge" });
    }
    let mut next = a.clone();
    step(&mut next, v, w)?;
    Ok(next)
}

/// In-place move without the edge check.
#[inline]
pub(crate) fn step<C: PebbleCount>(a: &mut Assignment<C>, v: VertexId, w: VertexId) -> Result<(), PebblingError> {
    let two = C::lit(2);
    let counts = a.counts_mut();
    if counts[v.0] < two {
        return Err(PebblingError::IllegalMove { from: v, to: w, reason: "fewer than two pebbles" });
    }
    let gained = counts[w.0].checked_add(&C::one()).ok_or(PebblingError::CountOverflow(w))?;
    counts[v.0] = counts[v.0] - two;
    counts[w.0] = gained;
    Ok(())
}

/// Two or three pebbles on the source, one on every interior vertex and
/// `sink_pebbles` on the sink of an oriented path.
///
/// On the one-vertex path the source is also the sink; the sink count wins.
pub fn simple_assignment<C: PebbleCount>(
    path: &OrientedGraph,
    source_pebbles: C,
    sink_pebbles: C,
) -> Result<Assignment<C>, PebblingError> {
    let order = path.path_order().ok_or(PebblingError::NotAPath)?;
    check_two_or_three(source_pebbles).map_err(PebblingError::BadSourceCount)?;
    let mut counts = vec![C::one(); path.vertex_count()];
    counts[order[0].0] = source_pebbles;
    counts[order[order.len() - 1].0] = sink_pebbles;
    Ok(Assignment { counts: counts.into() })
}

fn check_two_or_three<C: PebbleCount>(c: C) -> Result<(), u64> {
    let c = c.to_u64_lossless();
    if c == 2 || c == 3 {
        Ok(())
    } else {
        Err(c)
    }
}

/// Two or three pebbles on the root, one on every other vertex with non-zero
/// valence, and the requested count (default 0) on each valence-0 vertex.
pub fn tree_assignment<C: PebbleCount>(
    tree: &OrientedGraph,
    root_pebbles: C,
    leaf_pebbles: &[(VertexId, C)],
) -> Result<Assignment<C>, PebblingError> {
    let root = tree.is_downward_tree().ok_or(PebblingError::NotADownwardTree)?;
    check_two_or_three(root_pebbles).map_err(PebblingError::BadRootCount)?;
    let mut counts: Vec<C> = tree
        .vertices()
        .map(|v| if tree.is_sink(v) { C::zero() } else { C::one() })
        .collect();
    counts[root.0] = root_pebbles;
    for &(v, c) in leaf_pebbles {
        if !tree.contains(v) || !tree.is_sink(v) || v == root {
            return Err(PebblingError::NotALeaf(v));
        }
        counts[v.0] = c;
    }
    Ok(Assignment { counts: counts.into() })
}

/// Parameters of an almost simple path assignment. Positions are 0-based
/// along the path from the source; `others` lists the 0/1 choice for each
/// remaining non-sink vertex in path order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlmostSimple<C> {
    Simple { source: C, sink: C },
    /// `heavy` pebbles on the vertex adjacent to the sink.
    NearSink { heavy: C, sink: C, others: Vec<bool> },
    /// Four or five pebbles at `position`, none on the next vertex.
    HeavyGap { position: usize, heavy: C, sink: C, others: Vec<bool> },
}

impl<C: PebbleCount> AlmostSimple<C> {
    pub fn sink(&self) -> C {
        match self {
            AlmostSimple::Simple { sink, .. }
            | AlmostSimple::NearSink { sink, .. }
            | AlmostSimple::HeavyGap { sink, .. } => *sink,
        }
    }
}

pub fn almost_simple_assignment<C: PebbleCount>(
    path: &OrientedGraph,
    params: &AlmostSimple<C>,
) -> Result<Assignment<C>, PebblingError> {
    let order = path.path_order().ok_or(PebblingError::NotAPath)?;
    let n = order.len();
    let bad = |msg: String| PebblingError::BadVariantParams(msg);
    let along = |slots: Vec<C>| {
        let mut counts = vec![C::zero(); n];
        for (v, c) in order.iter().zip(slots) {
            counts[v.0] = c;
        }
        Assignment { counts: counts.into() }
    };
    let bit = |b: bool| if b { C::one() } else { C::zero() };
    match params {
        AlmostSimple::Simple { source, sink } => simple_assignment(path, *source, *sink),
        AlmostSimple::NearSink { heavy, sink, others } => {
            if n < 2 {
                return Err(bad("path has no vertex adjacent to the sink".into()));
            }
            if others.len() != n - 2 {
                return Err(bad(format!("expected {} other choices, got {}", n - 2, others.len())));
            }
            let mut slots: Vec<C> = others.iter().map(|&b| bit(b)).collect();
            slots.push(*heavy);
            slots.push(*sink);
            Ok(along(slots))
        }
        AlmostSimple::HeavyGap { position, heavy, sink, others } => {
            let p = *position;
            // the heavy vertex and its successor must both be non-sink
            if n < 3 || p + 1 >= n - 1 {
                return Err(bad(format!(
                    "position {p} needs a non-sink successor on a path of {n} vertices"
                )));
            }
            let h = heavy.to_u64_lossless();
            if h != 4 && h != 5 {
                return Err(bad(format!("heavy vertex must carry 4 or 5 pebbles, got {h}")));
            }
            if others.len() != n - 3 {
                return Err(bad(format!("expected {} other choices, got {}", n - 3, others.len())));
            }
            let mut rest = others.iter();
            let mut slots = Vec::with_capacity(n);
            for i in 0..n - 1 {
                slots.push(if i == p {
                    *heavy
                } else if i == p + 1 {
                    C::zero()
                } else {
                    bit(*rest.next().unwrap())
                });
            }
            slots.push(*sink);
            Ok(along(slots))
        }
    }
}

/// One factor of a product assignment.
#[derive(Clone, Debug)]
pub struct PathFactor<C> {
    pub path: OrientedGraph,
    pub params: AlmostSimple<C>,
}

impl<C: PebbleCount> PathFactor<C> {
    /// `P_n` with a simple assignment.
    pub fn simple(n: usize, source: C) -> Result<Self, PebblingError> {
        Ok(PathFactor {
            path: crate::graph::oriented_path(n)?,
            params: AlmostSimple::Simple { source, sink: C::zero() },
        })
    }
}

/// Product of paths with each factor's assignment laid on its designated
/// copy: coordinate `i` varies while every other coordinate sits at its sink.
///
/// The copies meet only at the all-sinks vertex, which gets `shared_sink`.
/// Every other vertex gets `rest`, which must be 0 or 1.
pub fn product_simple_assignment<C: PebbleCount>(
    factors: &[PathFactor<C>],
    shared_sink: C,
    rest: C,
) -> Result<(OrientedGraph, Assignment<C>), PebblingError> {
    if rest > C::one() {
        return Err(PebblingError::BadVariantParams(format!(
            "remaining vertices take 0 or 1 pebbles, got {rest}"
        )));
    }
    let graphs: Vec<OrientedGraph> = factors.iter().map(|f| f.path.clone()).collect();
    let g = cartesian_product(&graphs)?;
    let dims: Vec<usize> = graphs.iter().map(OrientedGraph::vertex_count).collect();
    let sinks: Vec<usize> = factors
        .iter()
        .map(|f| f.path.path_order().map(|o| o[o.len() - 1].0).ok_or(PebblingError::NotAPath))
        .collect::<Result<_, _>>()?;
    let mut counts = vec![rest; g.vertex_count()];
    for (i, f) in factors.iter().enumerate() {
        let a = almost_simple_assignment(&f.path, &f.params)?;
        let mut coords = sinks.clone();
        for v in f.path.vertices() {
            coords[i] = v.0;
            counts[product_vertex(&dims, &coords).0] = a.get(v);
        }
    }
    counts[product_vertex(&dims, &sinks).0] = shared_sink;
    Ok((g, Assignment { counts: counts.into() }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{downward_cycle, oriented_complete_bipartite, oriented_path};

    type A = Assignment<u32>;

    fn v(i: usize) -> VertexId {
        VertexId(i)
    }

    #[test]
    fn movability() {
        let g = downward_cycle(4).unwrap();
        let a = A::from_u64s(&g, &[0, 2, 0, 10]).unwrap();
        assert!(is_movable(&g, &a, v(1)).unwrap());
        assert!(!is_movable(&g, &a, v(3)).unwrap());
        let ones = A::from_u64s(&g, &[1, 1, 1, 1]).unwrap();
        assert!(g.vertices().all(|x| !is_movable(&g, &ones, x).unwrap()));
        assert!(is_movable(&g, &a, v(7)).is_err());

        let root4 = A::from_u64s(&g, &[4, 0, 0, 0]).unwrap();
        assert!(is_n_movable(&g, &root4, v(0), 2).unwrap());
        let side2 = A::from_u64s(&g, &[0, 2, 0, 0]).unwrap();
        assert!(!is_n_movable(&g, &side2, v(1), 2).unwrap());
        for x in g.vertices() {
            assert_eq!(is_n_movable(&g, &a, x, 1).unwrap(), is_movable(&g, &a, x).unwrap());
        }
    }

    #[test]
    fn legal_move_lists() {
        let g = downward_cycle(4).unwrap();
        let sides = A::from_u64s(&g, &[0, 2, 2, 0]).unwrap();
        assert_eq!(legal_moves(&g, &sides), vec![(v(1), v(3)), (v(2), v(3))]);
        let ones = A::from_u64s(&g, &[1, 1, 1, 1]).unwrap();
        assert!(legal_moves(&g, &ones).is_empty());
        let root = A::from_u64s(&g, &[4, 0, 0, 0]).unwrap();
        assert_eq!(legal_moves(&g, &root), vec![(v(0), v(1)), (v(0), v(2))]);
    }

    #[test]
    fn moves() {
        let p3 = oriented_path(3).unwrap();
        let a = A::from_u64s(&p3, &[2, 1, 7]).unwrap();
        assert_eq!(apply_move(&p3, &a, (v(0), v(1))).unwrap().to_u64s(), vec![0, 2, 7]);

        let g = downward_cycle(4).unwrap();
        let r = A::from_u64s(&g, &[4, 0, 0, 0]).unwrap();
        let next = apply_move(&g, &r, (v(0), v(1))).unwrap();
        assert_eq!(next.to_u64s(), vec![2, 1, 0, 0]);
        assert_eq!(next.total() + 1, r.total());

        let one = A::from_u64s(&g, &[1, 0, 0, 0]).unwrap();
        assert!(matches!(
            apply_move(&g, &one, (v(0), v(1))),
            Err(PebblingError::IllegalMove { .. })
        ));
        assert!(matches!(
            apply_move(&g, &r, (v(0), v(3))),
            Err(PebblingError::IllegalMove { .. })
        ));
    }

    #[test]
    fn narrow_counts_report_overflow() {
        let p2 = oriented_path(2).unwrap();
        let a = Assignment::<u8>::from_u64s(&p2, &[2, 255]).unwrap();
        assert_eq!(
            apply_move(&p2, &a, (v(0), v(1))),
            Err(PebblingError::CountOverflow(v(1)))
        );
    }

    #[test]
    fn simple_assignments() {
        let p3 = oriented_path(3).unwrap();
        assert_eq!(simple_assignment(&p3, 2u32, 0).unwrap().to_u64s(), vec![2, 1, 0]);
        let p2 = oriented_path(2).unwrap();
        assert_eq!(simple_assignment(&p2, 3u32, 5).unwrap().to_u64s(), vec![3, 5]);
        assert_eq!(simple_assignment(&p3, 4u32, 0), Err(PebblingError::BadSourceCount(4)));
        assert_eq!(
            simple_assignment(&downward_cycle(4).unwrap(), 2u32, 0),
            Err(PebblingError::NotAPath)
        );
        for n in 2..8 {
            let p = oriented_path(n).unwrap();
            let a = simple_assignment(&p, 3u32, 9).unwrap();
            assert_eq!(movable_vertices(&p, &a), vec![v(0)]);
        }
    }

    #[test]
    fn tree_assignments() {
        let p3 = oriented_path(3).unwrap();
        assert_eq!(tree_assignment(&p3, 2u32, &[]).unwrap().to_u64s(), vec![2, 1, 0]);
        let star = oriented_complete_bipartite(1, 3).unwrap();
        let leaves = [(v(1), 7u32), (v(2), 7), (v(3), 7)];
        assert_eq!(tree_assignment(&star, 3u32, &leaves).unwrap().to_u64s(), vec![3, 7, 7, 7]);
        assert_eq!(
            tree_assignment(&downward_cycle(4).unwrap(), 2u32, &[]),
            Err(PebblingError::NotADownwardTree)
        );
        assert_eq!(tree_assignment(&p3, 1u32, &[]), Err(PebblingError::BadRootCount(1)));
        assert_eq!(tree_assignment(&p3, 2u32, &[(v(1), 4)]), Err(PebblingError::NotALeaf(v(1))));
    }

    #[test]
    fn almost_simple_variants() {
        let p3 = oriented_path(3).unwrap();
        let near = AlmostSimple::NearSink { heavy: 4u32, sink: 6, others: vec![true] };
        assert_eq!(almost_simple_assignment(&p3, &near).unwrap().to_u64s(), vec![1, 4, 6]);

        let p4 = oriented_path(4).unwrap();
        let gap = AlmostSimple::HeavyGap { position: 0, heavy: 4u32, sink: 6, others: vec![false] };
        assert_eq!(almost_simple_assignment(&p4, &gap).unwrap().to_u64s(), vec![4, 0, 0, 6]);

        // the sink has no following vertex, nor does the vertex before it
        for position in [2, 3] {
            let bad = AlmostSimple::HeavyGap { position, heavy: 4u32, sink: 0, others: vec![false] };
            assert!(matches!(
                almost_simple_assignment(&p4, &bad),
                Err(PebblingError::BadVariantParams(_))
            ));
        }
        let heavy6 = AlmostSimple::HeavyGap { position: 0, heavy: 6u32, sink: 0, others: vec![false] };
        assert!(almost_simple_assignment(&p4, &heavy6).is_err());
        let short = AlmostSimple::NearSink { heavy: 4u32, sink: 0, others: vec![] };
        assert!(almost_simple_assignment(&p3, &short).is_err());
    }

    #[test]
    fn product_assignments() {
        let f = |s| PathFactor::simple(2, s).unwrap();
        let (g, a) = product_simple_assignment(&[f(2u32), f(2)], 0, 0).unwrap();
        // (a1,a1) (a1,a2) (a2,a1) (a2,a2)
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(a.to_u64s(), vec![0, 2, 2, 0]);
        let (_, a) = product_simple_assignment(&[f(3u32), f(3)], 0, 0).unwrap();
        assert_eq!(a.to_u64s(), vec![0, 3, 3, 0]);

        let single = PathFactor::simple(4, 2u32).unwrap();
        let (g, a) = product_simple_assignment(&[single.clone()], 0, 0).unwrap();
        assert_eq!(g, single.path);
        assert_eq!(a.to_u64s(), vec![2, 1, 1, 0]);

        let (_, a) = product_simple_assignment(
            &[PathFactor::simple(3, 2u32).unwrap(), PathFactor::simple(2, 3).unwrap()],
            5,
            1,
        )
        .unwrap();
        // coords (i, j): copy 1 is (*, a2), copy 2 is (a3, *)
        assert_eq!(a.to_u64s(), vec![1, 2, 1, 1, 3, 5]);
        assert!(product_simple_assignment(&[f(2u32)], 0, 2).is_err());
    }

    #[test]
    fn permuted_assignment_follows_vertices() {
        let g = downward_cycle(4).unwrap();
        let a = A::from_u64s(&g, &[1, 2, 3, 4]).unwrap();
        let perm = [v(0), v(2), v(1), v(3)];
        assert_eq!(a.permuted(&perm).to_u64s(), vec![1, 3, 2, 4]);
    }
}
