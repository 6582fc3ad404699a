//! Isomorphism, induced embedding and canonical forms for oriented graphs.
//!
//! All searches are backtracking over a connectivity-first vertex order with
//! candidates drawn from the neighbourhood of an already-mapped anchor. The
//! bijective modes additionally prune with colour refinement computed jointly
//! over both graphs, seeded by `(in-degree, out-degree, distance from the
//! sources)` for directed checks and by degree for undirected ones.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BinaryHeap, HashMap, VecDeque};
use std::fmt;

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::graph::{OrientedGraph, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsoMode {
    /// Bijection preserving oriented edges in both directions.
    Directed,
    /// Bijection preserving adjacency of the undirected shadows.
    Undirected,
    /// Injection whose image induces the source's shadow in the target's.
    InducedEmbedding,
    /// Injection mapping every oriented edge onto an oriented edge.
    Subgraph,
}

impl IsoMode {
    fn is_bijective(self) -> bool {
        matches!(self, IsoMode::Directed | IsoMode::Undirected)
    }

    fn is_directed(self) -> bool {
        matches!(self, IsoMode::Directed | IsoMode::Subgraph)
    }
}

impl fmt::Display for IsoMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IsoMode::Directed => "directed",
            IsoMode::Undirected => "undirected",
            IsoMode::InducedEmbedding => "induced-embedding",
            IsoMode::Subgraph => "subgraph",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IsoError {
    #[error("search gave up after {0} node expansions")]
    SearchBudgetExceeded(u64),
}

/// A vertex map from a source graph into a target graph.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IsoMapping {
    mode: IsoMode,
    map: Vec<VertexId>,
}

impl IsoMapping {
    pub fn new(mode: IsoMode, map: Vec<VertexId>) -> Self {
        IsoMapping { mode, map }
    }

    pub fn identity(g: &OrientedGraph) -> Self {
        IsoMapping { mode: IsoMode::Directed, map: g.vertices().collect() }
    }

    pub fn mode(&self) -> IsoMode {
        self.mode
    }

    pub fn image(&self, v: VertexId) -> VertexId {
        self.map[v.0]
    }

    pub fn as_slice(&self) -> &[VertexId] {
        &self.map
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.map.iter().enumerate().all(|(i, v)| v.0 == i)
    }

    /// `v -> other(self(v))`.
    pub fn then(&self, other: &IsoMapping) -> IsoMapping {
        IsoMapping {
            mode: self.mode,
            map: self.map.iter().map(|&v| other.map[v.0]).collect(),
        }
    }

    /// Inverse of a bijection onto `0..len`.
    pub fn inverse(&self) -> Option<IsoMapping> {
        let mut inv = vec![None; self.map.len()];
        for (i, &v) in self.map.iter().enumerate() {
            let slot = inv.get_mut(v.0)?;
            if slot.is_some() {
                return None;
            }
            *slot = Some(VertexId(i));
        }
        Some(IsoMapping { mode: self.mode, map: inv.into_iter().collect::<Option<_>>()? })
    }

    /// Rechecks the map edge by edge in its own mode.
    pub fn verify(&self, g: &OrientedGraph, h: &OrientedGraph) -> bool {
        let n = g.vertex_count();
        if self.map.len() != n || self.map.iter().any(|v| !h.contains(*v)) {
            return false;
        }
        let mut used = vec![false; h.vertex_count()];
        for v in &self.map {
            if std::mem::replace(&mut used[v.0], true) {
                return false;
            }
        }
        let f = |v: VertexId| self.map[v.0];
        match self.mode {
            IsoMode::Directed => {
                n == h.vertex_count()
                    && g.edge_count() == h.edge_count()
                    && g.edges().iter().all(|&(u, v)| h.has_edge(f(u), f(v)))
            }
            IsoMode::Undirected => {
                n == h.vertex_count()
                    && g.edge_count() == h.edge_count()
                    && g.edges().iter().all(|&(u, v)| h.adjacent(f(u), f(v)))
            }
            IsoMode::Subgraph => g.edges().iter().all(|&(u, v)| h.has_edge(f(u), f(v))),
            IsoMode::InducedEmbedding => g.vertices().all(|u| {
                g.vertices()
                    .skip(u.0 + 1)
                    .all(|v| g.adjacent(u, v) == h.adjacent(f(u), f(v)))
            }),
        }
    }

    /// Serializable view naming source and target vertices.
    pub fn witness<'a>(&'a self, g: &'a OrientedGraph, h: &'a OrientedGraph) -> Witness<'a> {
        Witness { mapping: self, source: g, target: h }
    }
}

/// JSON witness: `{"mode": ..., "map": {source name: target name, ...}}`
/// with entries in source vertex order.
pub struct Witness<'a> {
    mapping: &'a IsoMapping,
    source: &'a OrientedGraph,
    target: &'a OrientedGraph,
}

struct NameMap<'a>(&'a Witness<'a>);

impl Serialize for NameMap<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let w = self.0;
        let mut m = serializer.serialize_map(Some(w.mapping.len()))?;
        for (i, v) in w.mapping.map.iter().enumerate() {
            m.serialize_entry(w.source.name(VertexId(i)), w.target.name(*v))?;
        }
        m.end()
    }
}

impl Serialize for Witness<'_> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Witness", 2)?;
        s.serialize_field("mode", &self.mapping.mode)?;
        s.serialize_field("map", &NameMap(self))?;
        s.end()
    }
}

impl Witness<'_> {
    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("witness serializes")
    }
}

/// A witness `g ≅ h` as oriented graphs, if one exists.
pub fn digraph_isomorphic(g: &OrientedGraph, h: &OrientedGraph) -> Option<IsoMapping> {
    first_match(g, h, IsoMode::Directed, None).expect("unbudgeted search")
}

/// A witness that the undirected shadows of `g` and `h` are isomorphic.
pub fn undirected_isomorphic(g: &OrientedGraph, h: &OrientedGraph) -> Option<IsoMapping> {
    first_match(g, h, IsoMode::Undirected, None).expect("unbudgeted search")
}

/// Finds an injection making the shadow of `g` an induced subgraph of the
/// shadow of `h`. `budget` caps node expansions.
pub fn find_induced_undirected_embedding(
    g: &OrientedGraph,
    h: &OrientedGraph,
    budget: u64,
) -> Result<Option<IsoMapping>, IsoError> {
    first_match(g, h, IsoMode::InducedEmbedding, Some(budget))
}

/// Finds `g` as a (not necessarily induced) oriented subgraph of `h`.
pub fn find_subgraph(
    g: &OrientedGraph,
    h: &OrientedGraph,
    budget: u64,
) -> Result<Option<IsoMapping>, IsoError> {
    first_match(g, h, IsoMode::Subgraph, Some(budget))
}

/// Every isomorphism `g -> h` in the given bijective mode.
pub fn all_isomorphisms(g: &OrientedGraph, h: &OrientedGraph, mode: IsoMode) -> Vec<IsoMapping> {
    assert!(mode.is_bijective());
    let mut found = Vec::new();
    if let Some(mut m) = Matcher::new(g, h, mode, None) {
        m.run(|map| {
            found.push(IsoMapping::new(mode, map.iter().map(|&w| VertexId(w)).collect()));
            true
        })
        .expect("unbudgeted search");
    }
    found
}

fn first_match(
    g: &OrientedGraph,
    h: &OrientedGraph,
    mode: IsoMode,
    budget: Option<u64>,
) -> Result<Option<IsoMapping>, IsoError> {
    let Some(mut m) = Matcher::new(g, h, mode, budget) else {
        return Ok(None);
    };
    let mut found = None;
    m.run(|map| {
        found = Some(IsoMapping::new(mode, map.iter().map(|&w| VertexId(w)).collect()));
        false
    })?;
    if let Some(f) = &found {
        assert!(f.verify(g, h), "matcher produced an invalid {mode} witness");
    }
    Ok(found)
}

const NONE: usize = usize::MAX;

#[derive(Clone, Copy)]
enum Anchor {
    None,
    /// Candidates are out-neighbours of the anchor's image.
    OutOf(usize),
    /// Candidates are in-neighbours of the anchor's image.
    InOf(usize),
    /// Candidates are shadow neighbours of the anchor's image.
    NbrOf(usize),
}

struct Matcher<'a> {
    g: &'a OrientedGraph,
    h: &'a OrientedGraph,
    mode: IsoMode,
    order: Vec<usize>,
    anchors: Vec<Anchor>,
    gcolor: Vec<u32>,
    hcolor: Vec<u32>,
    by_color: HashMap<u32, Vec<usize>>,
    g_nbrs: Vec<Vec<usize>>,
    h_nbrs: Vec<Vec<usize>>,
    map: Vec<usize>,
    inv: Vec<usize>,
    budget: Option<u64>,
    expansions: u64,
}

impl<'a> Matcher<'a> {
    fn new(
        g: &'a OrientedGraph,
        h: &'a OrientedGraph,
        mode: IsoMode,
        budget: Option<u64>,
    ) -> Option<Self> {
        let (n, hn) = (g.vertex_count(), h.vertex_count());
        if mode.is_bijective() {
            if n != hn || g.edge_count() != h.edge_count() {
                return None;
            }
        } else if n > hn || g.edge_count() > h.edge_count() {
            return None;
        }
        let shadow = |x: &OrientedGraph| -> Vec<Vec<usize>> {
            (0..x.vertex_count())
                .map(|v| {
                    let mut l: Vec<usize> = x.out_of(v).iter().chain(x.in_of(v)).copied().collect();
                    l.sort_unstable();
                    l
                })
                .collect()
        };
        let (g_nbrs, h_nbrs) = if mode.is_directed() {
            (Vec::new(), Vec::new())
        } else {
            (shadow(g), shadow(h))
        };

        let (gcolor, hcolor) = if mode.is_bijective() {
            let directed = mode == IsoMode::Directed;
            let init = |x: &OrientedGraph| initial_colors(x, directed, None);
            let mut cs = refine_joint(&[g, h], directed, vec![init(g), init(h)]);
            let hc = cs.pop().unwrap();
            let gc = cs.pop().unwrap();
            let hist = |c: &[u32]| {
                let mut s = c.to_vec();
                s.sort_unstable();
                s
            };
            if hist(&gc) != hist(&hc) {
                return None;
            }
            (gc, hc)
        } else {
            (vec![0; n], vec![0; hn])
        };
        let mut by_color: HashMap<u32, Vec<usize>> = HashMap::new();
        for (w, &c) in hcolor.iter().enumerate() {
            by_color.entry(c).or_default().push(w);
        }

        let class_size = |v: usize| by_color.get(&gcolor[v]).map_or(0, Vec::len);
        let degree = |v: usize| g.out_degree_of(v) + g.in_degree_of(v);
        let order = search_order(g, &class_size, &degree);
        let mut pos = vec![NONE; n];
        for (i, &v) in order.iter().enumerate() {
            pos[v] = i;
        }
        let anchors = order
            .iter()
            .map(|&v| {
                let earliest = |it: &mut dyn Iterator<Item = usize>| {
                    it.filter(|&u| pos[u] < pos[v]).min_by_key(|&u| pos[u])
                };
                let out = earliest(&mut g.out_of(v).iter().copied());
                let inc = earliest(&mut g.in_of(v).iter().copied());
                let pick = match (out, inc) {
                    (Some(a), Some(b)) if pos[b] < pos[a] => (b, false),
                    (Some(a), _) => (a, true),
                    (None, Some(b)) => (b, false),
                    (None, None) => return Anchor::None,
                };
                match (mode.is_directed(), pick) {
                    // v -> u in g, so the candidate must point at f(u)
                    (true, (u, true)) => Anchor::InOf(u),
                    (true, (u, false)) => Anchor::OutOf(u),
                    (false, (u, _)) => Anchor::NbrOf(u),
                }
            })
            .collect();

        Some(Matcher {
            g,
            h,
            mode,
            order,
            anchors,
            gcolor,
            hcolor,
            by_color,
            g_nbrs,
            h_nbrs,
            map: vec![NONE; n],
            inv: vec![NONE; hn],
            budget,
            expansions: 0,
        })
    }

    fn candidates(&self, depth: usize) -> &[usize] {
        let v = self.order[depth];
        match self.anchors[depth] {
            Anchor::OutOf(u) => self.h.out_of(self.map[u]),
            Anchor::InOf(u) => self.h.in_of(self.map[u]),
            Anchor::NbrOf(u) => &self.h_nbrs[self.map[u]],
            Anchor::None => self
                .by_color
                .get(&self.gcolor[v])
                .map_or(&[][..], Vec::as_slice),
        }
    }

    fn feasible(&self, v: usize, w: usize) -> bool {
        if self.inv[w] != NONE || self.gcolor[v] != self.hcolor[w] {
            return false;
        }
        let (g, h) = (self.g, self.h);
        match self.mode {
            IsoMode::Directed => {
                let mut outs = 0;
                for &u in g.out_of(v) {
                    let fu = self.map[u];
                    if fu != NONE {
                        if !h.has_edge_ix(w, fu) {
                            return false;
                        }
                        outs += 1;
                    }
                }
                let mut ins = 0;
                for &u in g.in_of(v) {
                    let fu = self.map[u];
                    if fu != NONE {
                        if !h.has_edge_ix(fu, w) {
                            return false;
                        }
                        ins += 1;
                    }
                }
                h.out_of(w).iter().filter(|&&x| self.inv[x] != NONE).count() == outs
                    && h.in_of(w).iter().filter(|&&x| self.inv[x] != NONE).count() == ins
            }
            IsoMode::Subgraph => {
                g.out_degree_of(v) <= h.out_degree_of(w)
                    && g.in_degree_of(v) <= h.in_degree_of(w)
                    && g.out_of(v).iter().all(|&u| self.map[u] == NONE || h.has_edge_ix(w, self.map[u]))
                    && g.in_of(v)
                        .iter()
                        .all(|&u| self.map[u] == NONE || h.has_edge_ix(self.map[u], w))
            }
            IsoMode::Undirected | IsoMode::InducedEmbedding => {
                if self.g_nbrs[v].len() > self.h_nbrs[w].len() {
                    return false;
                }
                let mut mapped = 0;
                for &u in &self.g_nbrs[v] {
                    let fu = self.map[u];
                    if fu != NONE {
                        if self.h_nbrs[w].binary_search(&fu).is_err() {
                            return false;
                        }
                        mapped += 1;
                    }
                }
                self.h_nbrs[w].iter().filter(|&&x| self.inv[x] != NONE).count() == mapped
            }
        }
    }

    /// Calls `on_match` with each complete map; stops when it returns false.
    fn run(&mut self, mut on_match: impl FnMut(&[usize]) -> bool) -> Result<(), IsoError> {
        let n = self.order.len();
        if n == 0 {
            on_match(&self.map);
            return Ok(());
        }
        let mut next = vec![0usize; n];
        let mut depth = 0usize;
        loop {
            let v = self.order[depth];
            let mut chosen = None;
            {
                let cands = self.candidates(depth);
                let mut i = next[depth];
                while i < cands.len() {
                    let w = cands[i];
                    i += 1;
                    if self.feasible(v, w) {
                        chosen = Some(w);
                        break;
                    }
                }
                next[depth] = i;
            }
            match chosen {
                Some(w) => {
                    self.expansions += 1;
                    if let Some(b) = self.budget {
                        if self.expansions > b {
                            return Err(IsoError::SearchBudgetExceeded(b));
                        }
                    }
                    self.map[v] = w;
                    self.inv[w] = v;
                    if depth + 1 == n {
                        let keep_going = on_match(&self.map);
                        self.map[v] = NONE;
                        self.inv[w] = NONE;
                        if !keep_going {
                            return Ok(());
                        }
                    } else {
                        depth += 1;
                        next[depth] = 0;
                    }
                }
                None => {
                    if depth == 0 {
                        return Ok(());
                    }
                    depth -= 1;
                    let u = self.order[depth];
                    let fu = self.map[u];
                    self.map[u] = NONE;
                    self.inv[fu] = NONE;
                }
            }
        }
    }
}

/// Connectivity-first order: repeatedly take the vertex with the most
/// already-ordered neighbours, then the smallest candidate class, then the
/// highest degree, then the lowest index.
fn search_order(
    g: &OrientedGraph,
    class_size: &dyn Fn(usize) -> usize,
    degree: &dyn Fn(usize) -> usize,
) -> Vec<usize> {
    let n = g.vertex_count();
    let mut conn = vec![0usize; n];
    let mut done = vec![false; n];
    let key = |v: usize, c: usize| (c, Reverse(class_size(v)), degree(v), Reverse(v));
    let mut heap: BinaryHeap<_> = (0..n).map(|v| key(v, 0)).collect();
    let mut order = Vec::with_capacity(n);
    while let Some((c, _, _, Reverse(v))) = heap.pop() {
        if done[v] || c != conn[v] {
            continue;
        }
        done[v] = true;
        order.push(v);
        for u in g.out_of(v).iter().chain(g.in_of(v)).copied() {
            if !done[u] {
                conn[u] += 1;
                heap.push(key(u, conn[u]));
            }
        }
    }
    order
}

/// Distance from the nearest in-degree-0 vertex along oriented edges;
/// `u32::MAX` when unreachable.
fn source_levels(g: &OrientedGraph) -> Vec<u32> {
    let n = g.vertex_count();
    let mut level = vec![u32::MAX; n];
    let mut queue = VecDeque::new();
    for v in 0..n {
        if g.in_degree_of(v) == 0 {
            level[v] = 0;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in g.out_of(v) {
            if level[w] == u32::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            }
        }
    }
    level
}

fn initial_colors(g: &OrientedGraph, directed: bool, user: Option<&[u64]>) -> Vec<Vec<u64>> {
    let levels = if directed { source_levels(g) } else { Vec::new() };
    (0..g.vertex_count())
        .map(|v| {
            let mut c = Vec::with_capacity(4);
            if let Some(u) = user {
                c.push(u[v]);
            }
            if directed {
                c.extend([
                    g.in_degree_of(v) as u64,
                    g.out_degree_of(v) as u64,
                    u64::from(levels[v]),
                ]);
            } else {
                c.push((g.in_degree_of(v) + g.out_degree_of(v)) as u64);
            }
            c
        })
        .collect()
}

/// Ranks keys in sorted order, so equal keys share a colour and colour
/// numbering is independent of vertex labels.
fn rank_all<K: Ord>(keys: Vec<Vec<K>>) -> (Vec<Vec<u32>>, usize) {
    let mut table: BTreeMap<&K, u32> = BTreeMap::new();
    for k in keys.iter().flatten() {
        table.insert(k, 0);
    }
    for (i, slot) in table.values_mut().enumerate() {
        *slot = i as u32;
    }
    let classes = table.len();
    let ranked = keys
        .iter()
        .map(|ks| ks.iter().map(|k| table[k]).collect())
        .collect();
    (ranked, classes)
}

/// 1-dimensional Weisfeiler-Leman refinement over several graphs at once so
/// that colours are comparable between them.
fn refine_joint<K: Ord>(
    graphs: &[&OrientedGraph],
    directed: bool,
    init: Vec<Vec<K>>,
) -> Vec<Vec<u32>> {
    let (mut colors, mut classes) = rank_all(init);
    loop {
        let sigs: Vec<Vec<(u32, Vec<u32>, Vec<u32>)>> = graphs
            .iter()
            .zip(&colors)
            .map(|(g, c)| {
                (0..g.vertex_count())
                    .map(|v| {
                        let mut outs: Vec<u32> = g.out_of(v).iter().map(|&w| c[w]).collect();
                        let mut ins: Vec<u32> = g.in_of(v).iter().map(|&w| c[w]).collect();
                        if !directed {
                            outs.append(&mut ins);
                        }
                        outs.sort_unstable();
                        ins.sort_unstable();
                        (c[v], outs, ins)
                    })
                    .collect()
            })
            .collect();
        let (next, next_classes) = rank_all(sigs);
        colors = next;
        if next_classes == classes {
            return colors;
        }
        classes = next_classes;
    }
}

/// Byte encoding equal for two graphs iff they are isomorphic as oriented
/// graphs.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalForm(Vec<u8>);

impl CanonicalForm {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Debug for CanonicalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalForm({})", self.to_hex())
    }
}

pub fn canonical_form(g: &OrientedGraph) -> CanonicalForm {
    canonical_labeling(g, None).0
}

/// Canonical form of a vertex-coloured graph; isomorphisms must preserve
/// `colors`.
pub fn canonical_form_colored(g: &OrientedGraph, colors: &[u64]) -> CanonicalForm {
    canonical_labeling(g, Some(colors)).0
}

/// Canonical form together with the labeling that produced it: vertex `v`
/// of `g` sits at position `perm[v]` of the canonical graph.
pub fn canonical_labeling(g: &OrientedGraph, colors: Option<&[u64]>) -> (CanonicalForm, Vec<usize>) {
    let n = g.vertex_count();
    if let Some(c) = colors {
        assert_eq!(c.len(), n, "one colour per vertex");
    }
    let user: Vec<u64> = colors.map_or_else(|| vec![0; n], <[u64]>::to_vec);
    let init = initial_colors(g, true, Some(&user));
    let start = refine_joint(&[g], true, vec![init]).pop().unwrap();

    // vertices with identical in- and out-neighbourhoods are interchangeable
    let mut twin_ids: HashMap<(&[usize], &[usize]), usize> = HashMap::new();
    let twin: Vec<usize> = (0..n)
        .map(|v| {
            let next = twin_ids.len();
            *twin_ids.entry((g.out_of(v), g.in_of(v))).or_insert(next)
        })
        .collect();

    let mut search = CanonSearch { g, user: &user, twin: &twin, best: None };
    search.descend(start);
    let (form, perm) = search.best.unwrap_or_else(|| (encode(g, &user, &[]), Vec::new()));
    (CanonicalForm(form), perm)
}

struct CanonSearch<'a> {
    g: &'a OrientedGraph,
    user: &'a [u64],
    twin: &'a [usize],
    best: Option<(Vec<u8>, Vec<usize>)>,
}

impl CanonSearch<'_> {
    fn descend(&mut self, colors: Vec<u32>) {
        let n = colors.len();
        let mut counts = vec![0usize; n];
        for &c in &colors {
            counts[c as usize] += 1;
        }
        let Some(target) = counts.iter().position(|&k| k > 1) else {
            let perm: Vec<usize> = colors.iter().map(|&c| c as usize).collect();
            let code = encode(self.g, self.user, &perm);
            let better = match &self.best {
                None => true,
                Some((b, _)) => code.cmp(b) == Ordering::Less,
            };
            if better {
                self.best = Some((code, perm));
            }
            return;
        };
        let mut tried_twins = Vec::new();
        for v in (0..n).filter(|&v| colors[v] as usize == target) {
            if tried_twins.contains(&self.twin[v]) {
                continue;
            }
            tried_twins.push(self.twin[v]);
            let keyed: Vec<Vec<(u32, u8)>> =
                vec![(0..n).map(|x| (colors[x], u8::from(x != v))).collect()];
            let (ranked, _) = rank_all(keyed);
            let refined = refine_joint(&[self.g], true, ranked).pop().unwrap();
            self.descend(refined);
        }
    }
}

fn encode(g: &OrientedGraph, user: &[u64], perm: &[usize]) -> Vec<u8> {
    let n = g.vertex_count();
    let mut inv = vec![0usize; n];
    for (v, &p) in perm.iter().enumerate() {
        inv[p] = v;
    }
    let mut out = Vec::with_capacity(4 + 8 * n + (n * n).div_ceil(8));
    out.extend_from_slice(&(n as u32).to_be_bytes());
    for &v in &inv {
        out.extend_from_slice(&user[v].to_be_bytes());
    }
    let mut byte = 0u8;
    let mut bits = 0;
    for i in 0..n {
        for j in 0..n {
            byte = (byte << 1) | u8::from(g.has_edge_ix(inv[i], inv[j]));
            bits += 1;
            if bits == 8 {
                out.push(byte);
                byte = 0;
                bits = 0;
            }
        }
    }
    if bits > 0 {
        out.push(byte << (8 - bits));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{downward_cycle, oriented_complete_bipartite, oriented_path};

    fn perms(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![Vec::new()];
        }
        let mut all = Vec::new();
        for p in perms(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                all.push(q);
            }
        }
        all
    }

    fn brute_force_automorphisms(g: &OrientedGraph) -> usize {
        perms(g.vertex_count())
            .into_iter()
            .filter(|p| {
                g.edges()
                    .iter()
                    .all(|&(u, v)| g.has_edge(VertexId(p[u.0]), VertexId(p[v.0])))
            })
            .count()
    }

    #[test]
    fn automorphism_counts_match_brute_force() {
        let cases = [
            (downward_cycle(4).unwrap(), 2),
            (oriented_path(5).unwrap(), 1),
            (oriented_complete_bipartite(2, 2).unwrap(), 4),
            (oriented_complete_bipartite(1, 3).unwrap(), 6),
            (OrientedGraph::edgeless(4), 24),
            (downward_cycle(6).unwrap(), 2),
        ];
        for (g, expected) in cases {
            assert_eq!(brute_force_automorphisms(&g), expected);
            let auts = g.automorphisms();
            assert_eq!(auts.len(), expected, "{g:?}");
            assert!(auts.iter().any(IsoMapping::is_identity));
            for a in &auts {
                assert!(a.verify(&g, &g));
                assert!(auts.contains(&a.inverse().unwrap()));
                for b in &auts {
                    assert!(auts.contains(&a.then(b)));
                }
            }
        }
    }

    #[test]
    fn directed_vs_undirected() {
        let d4 = downward_cycle(4).unwrap();
        let cyclic =
            OrientedGraph::new(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d"), ("d", "a")])
                .unwrap();
        assert!(digraph_isomorphic(&d4, &cyclic).is_none());
        assert!(undirected_isomorphic(&d4, &cyclic).is_some());

        let p3 = oriented_path(3).unwrap();
        let k12 = oriented_complete_bipartite(1, 2).unwrap();
        assert!(undirected_isomorphic(&p3, &k12).is_some());
        assert!(digraph_isomorphic(&p3, &k12).is_none());
        assert!(undirected_isomorphic(&p3, &oriented_path(4).unwrap()).is_none());

        let id = digraph_isomorphic(&d4, &d4).unwrap();
        assert!(id.is_identity());
    }

    #[test]
    fn reversed_path_is_same_shadow() {
        let p = oriented_path(4).unwrap();
        let r = p.reversed();
        // a reversed path is still a path, so directed iso holds too
        assert!(digraph_isomorphic(&p, &r).is_some());
        let k = oriented_complete_bipartite(1, 3).unwrap();
        assert!(digraph_isomorphic(&k, &k.reversed()).is_none());
        assert!(undirected_isomorphic(&k, &k.reversed()).is_some());
    }

    #[test]
    fn canonical_forms() {
        let g = downward_cycle(6).unwrap();
        let a = g.relabel(&[5, 4, 3, 2, 1, 0]);
        let b = g.relabel(&[2, 0, 1, 5, 3, 4]);
        assert_eq!(canonical_form(&a), canonical_form(&b));
        assert_ne!(
            canonical_form(&downward_cycle(4).unwrap()),
            canonical_form(&oriented_complete_bipartite(2, 2).unwrap())
        );
        let e1 = OrientedGraph::new::<&str>(&["x", "y", "z"], &[]).unwrap();
        assert_eq!(canonical_form(&e1), canonical_form(&OrientedGraph::edgeless(3)));
    }

    #[test]
    fn colored_forms_respect_colors() {
        let g = downward_cycle(4).unwrap();
        let a = canonical_form_colored(&g, &[0, 2, 3, 0]);
        let b = canonical_form_colored(&g, &[0, 3, 2, 0]);
        let c = canonical_form_colored(&g, &[1, 2, 3, 0]);
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn embeddings() {
        let p3 = oriented_path(3).unwrap();
        let p2 = oriented_path(2).unwrap();
        let tri = OrientedGraph::new(&["a", "b", "c"], &[("a", "b"), ("b", "c"), ("a", "c")]).unwrap();
        let d4 = downward_cycle(4).unwrap();
        assert!(find_induced_undirected_embedding(&p3, &p3, 1000).unwrap().is_some());
        assert!(find_induced_undirected_embedding(&p2, &d4, 1000).unwrap().is_some());
        assert!(find_induced_undirected_embedding(&tri, &d4, 1000).unwrap().is_none());
        // P_3's shadow sits inside the 4-cycle, but P_4 cannot be induced there
        assert!(find_induced_undirected_embedding(&p3, &d4, 1000).unwrap().is_some());
        assert!(
            find_induced_undirected_embedding(&oriented_path(4).unwrap(), &d4, 1000)
                .unwrap()
                .is_none()
        );
        assert!(find_subgraph(&oriented_complete_bipartite(2, 1).unwrap(), &d4, 1000)
            .unwrap()
            .is_some());
        assert!(find_subgraph(&oriented_complete_bipartite(1, 2).unwrap(), &d4, 1000)
            .unwrap()
            .is_some());
        assert!(find_subgraph(&oriented_path(3).unwrap().reversed(), &d4, 1000).unwrap().is_some());
    }

    #[test]
    fn embedding_budget() {
        let big = OrientedGraph::edgeless(30);
        let small = OrientedGraph::edgeless(3);
        let with_edge = oriented_path(2).unwrap();
        assert!(find_induced_undirected_embedding(&small, &big, 2).is_err());
        assert_eq!(
            find_induced_undirected_embedding(&with_edge, &big, 10_000).unwrap(),
            None
        );
    }

    #[test]
    fn witness_json_keeps_source_order() {
        let g = oriented_path(3).unwrap();
        let h = g.relabel(&[2, 1, 0]);
        let m = digraph_isomorphic(&g, &h).unwrap();
        let s = serde_json::to_string(&m.witness(&g, &h)).unwrap();
        assert_eq!(s, r#"{"mode":"directed","map":{"a1":"a1","a2":"a2","a3":"a3"}}"#);
    }
}
