//! Instance generators: every oriented graph up to isomorphism on a few
//! vertices, bounded assignments, and seeded random graphs and trees.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::OrientedGraph;
use crate::iso::{canonical_labeling, CanonicalForm};
use crate::{Assignment, Pebbles};

fn letters(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| if i < 26 { ((b'a' + i as u8) as char).to_string() } else { format!("v{i}") })
        .collect()
}

/// Relabels `g` into its canonical vertex order with names `a, b, c, ...`
/// and edges sorted.
pub fn canonical_representative(g: &OrientedGraph) -> (CanonicalForm, OrientedGraph) {
    let (form, perm) = canonical_labeling(g, None);
    let mut edges: Vec<(usize, usize)> =
        g.edges().iter().map(|&(u, v)| (perm[u.0], perm[v.0])).collect();
    edges.sort_unstable();
    let rep = OrientedGraph::from_indices(letters(g.vertex_count()), edges)
        .expect("relabelling keeps the graph oriented");
    (form, rep)
}

/// All oriented graphs on exactly `n` vertices, one per isomorphism class,
/// in canonical-form order.
///
/// Built by extension: deleting the last vertex of any `n`-vertex graph
/// leaves an `(n-1)`-vertex graph, so joining a new vertex to every class
/// representative in each of the `3^(n-1)` ways (absent, outgoing, incoming
/// per old vertex) reaches every class.
pub fn enumerate_oriented_graphs(n: usize) -> Vec<OrientedGraph> {
    if n == 0 {
        return vec![OrientedGraph::edgeless(0)];
    }
    let mut reps = vec![OrientedGraph::from_indices(letters(1), vec![]).unwrap()];
    for size in 2..=n {
        let old = size - 1;
        let patterns = 3usize.pow(old as u32);
        let mut found: BTreeMap<CanonicalForm, OrientedGraph> = BTreeMap::new();
        for r in &reps {
            let base: Vec<(usize, usize)> = r.edges().iter().map(|&(u, v)| (u.0, v.0)).collect();
            for mut p in 0..patterns {
                let mut edges = base.clone();
                for i in 0..old {
                    match p % 3 {
                        1 => edges.push((i, old)),
                        2 => edges.push((old, i)),
                        _ => {}
                    }
                    p /= 3;
                }
                let g = OrientedGraph::from_indices(letters(size), edges).unwrap();
                let (form, rep) = canonical_representative(&g);
                found.entry(form).or_insert(rep);
            }
        }
        reps = found.into_values().collect();
    }
    reps
}

/// Graphs on `1..=max_n` vertices, smallest first.
pub fn graphs_up_to(max_n: usize) -> Vec<OrientedGraph> {
    (1..=max_n).flat_map(enumerate_oriented_graphs).collect()
}

/// Every assignment with counts in `0..=cap` on non-sink vertices and zero
/// on sinks, in lexicographic order of the non-sink counts.
pub fn bounded_assignments(g: &OrientedGraph, cap: Pebbles) -> Vec<Assignment> {
    let free: Vec<usize> = g.vertices().filter(|&v| !g.is_sink(v)).map(|v| v.0).collect();
    let total = (cap as usize + 1).pow(free.len() as u32);
    (0..total).map(|i| assignment_at(g.vertex_count(), &free, cap, i)).collect()
}

/// The `index`-th assignment of [`bounded_assignments`], with the first
/// free vertex as the most significant digit.
pub(crate) fn assignment_at(n: usize, free: &[usize], cap: Pebbles, mut index: usize) -> Assignment {
    let base = cap as usize + 1;
    let mut counts = vec![0; n];
    for &v in free.iter().rev() {
        counts[v] = (index % base) as Pebbles;
        index /= base;
    }
    Assignment::from_counts(counts)
}

/// Each unordered pair becomes an edge with probability `density`, oriented
/// by a fair coin. Vertices are named `a, b, ...`.
pub fn random_oriented_graph<R: Rng>(rng: &mut R, n: usize, density: f64) -> OrientedGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                edges.push(if rng.gen_bool(0.5) { (i, j) } else { (j, i) });
            }
        }
    }
    OrientedGraph::from_indices(letters(n), edges).unwrap()
}

pub fn random_assignment<R: Rng>(rng: &mut R, n: usize, cap: Pebbles) -> Assignment {
    Assignment::from_counts((0..n).map(|_| rng.gen_range(0..=cap)).collect())
}

/// A random downward tree on `n` vertices: each vertex after the first picks
/// an earlier parent, then vertex positions and edge order are shuffled so
/// the root is not always first.
pub fn random_downward_tree<R: Rng>(rng: &mut R, n: usize) -> OrientedGraph {
    let mut pos: Vec<usize> = (0..n).collect();
    pos.shuffle(rng);
    let mut edges: Vec<(usize, usize)> =
        (1..n).map(|i| (pos[rng.gen_range(0..i)], pos[i])).collect();
    edges.shuffle(rng);
    let names = (0..n).map(|i| format!("t{i}")).collect();
    OrientedGraph::from_indices(names, edges).unwrap()
}
