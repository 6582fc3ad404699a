//! Line-oriented text format for graphs and pebbling assignments.
//!
//! ```text
//! # downward 4-cycle with four pebbles on the root
//! v r 4
//! v l
//! v s
//! v b
//! e r l
//! e r s
//! e l b
//! e s b
//! ```
//!
//! `#` starts a comment. `v <name> [pebbles]` declares a vertex, `e <from>
//! <to>` an oriented edge. A missing pebble count means 0. Writers emit
//! vertices first, then edges, in declaration order, always with counts.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::OrientedGraph;
use crate::pebbling::{Assignment, PebbleCount};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ParseError {
    ParseError { line, message: message.into() }
}

/// A parsed graph with its assignment. `has_counts` records whether any
/// vertex line carried a count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance<C> {
    pub graph: OrientedGraph,
    pub assignment: Assignment<C>,
    pub has_counts: bool,
}

pub fn parse_instance<C: PebbleCount>(text: &str) -> Result<Instance<C>, ParseError> {
    let mut names: Vec<String> = Vec::new();
    let mut counts: Vec<C> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut pending: Vec<(usize, String, String)> = Vec::new();
    let mut has_counts = false;

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let mut words = content.split_whitespace();
        let Some(tag) = words.next() else { continue };
        let args: Vec<&str> = words.collect();
        match tag {
            "v" => {
                let (name, count) = match args.as_slice() {
                    [name] => (*name, None),
                    [name, c] => (*name, Some(*c)),
                    _ => return Err(err(line, "expected `v <name> [pebbles]`")),
                };
                if index.contains_key(name) {
                    return Err(err(line, format!("duplicate vertex `{name}`")));
                }
                let count = match count {
                    None => C::zero(),
                    Some(c) => {
                        has_counts = true;
                        let n: u64 = c
                            .parse()
                            .map_err(|_| err(line, format!("invalid pebble count `{c}`")))?;
                        C::from(n).ok_or_else(|| err(line, format!("pebble count {n} is too large")))?
                    }
                };
                index.insert(name.to_owned(), names.len());
                names.push(name.to_owned());
                counts.push(count);
            }
            "e" => match args.as_slice() {
                [a, b] => pending.push((line, (*a).to_owned(), (*b).to_owned())),
                _ => return Err(err(line, "expected `e <from> <to>`")),
            },
            other => return Err(err(line, format!("unknown directive `{other}`"))),
        }
    }

    let mut seen = HashSet::new();
    for (line, a, b) in pending {
        let look = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| err(line, format!("edge endpoint `{s}` is not a declared vertex")))
        };
        let (u, v) = (look(&a)?, look(&b)?);
        if u == v {
            return Err(err(line, format!("self-loop on vertex `{a}`")));
        }
        if seen.contains(&(v, u)) {
            return Err(err(line, format!("edges `{a}`->`{b}` and `{b}`->`{a}` are both present")));
        }
        if !seen.insert((u, v)) {
            return Err(err(line, format!("edge `{a}`->`{b}` declared twice")));
        }
        edges.push((line, u, v));
    }

    let graph = OrientedGraph::from_indices(names, edges.iter().map(|&(_, u, v)| (u, v)).collect())
        .map_err(|e| err(0, e.to_string()))?;
    Ok(Instance { graph, assignment: Assignment::from_counts(counts), has_counts })
}

pub fn parse_graph(text: &str) -> Result<OrientedGraph, ParseError> {
    parse_instance::<u64>(text).map(|i| i.graph)
}

pub fn write_graph(g: &OrientedGraph) -> String {
    let mut s = String::new();
    for v in g.vertices() {
        let _ = writeln!(s, "v {}", g.name(v));
    }
    write_edges(&mut s, g);
    s
}

pub fn write_instance<C: PebbleCount>(g: &OrientedGraph, a: &Assignment<C>) -> String {
    let mut s = String::new();
    for v in g.vertices() {
        let _ = writeln!(s, "v {} {}", g.name(v), a.get(v));
    }
    write_edges(&mut s, g);
    s
}

fn write_edges(s: &mut String, g: &OrientedGraph) {
    for &(u, v) in g.edges() {
        let _ = writeln!(s, "e {} {}", g.name(u), g.name(v));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::downward_cycle;

    #[test]
    fn parses_the_documented_example() {
        let text = "# diamond\nv r 4\nv l\nv s\nv b  # bottom\ne r l\ne r s\ne l b\ne s b\n";
        let inst = parse_instance::<u32>(text).unwrap();
        assert_eq!(inst.graph.vertex_count(), 4);
        assert_eq!(inst.graph.edge_count(), 4);
        assert_eq!(inst.assignment.to_u64s(), vec![4, 0, 0, 0]);
        assert!(inst.has_counts);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = parse_graph("v a\nv b\ne a\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = parse_graph("v a\nv b\ne a b\ne b a\n").unwrap_err();
        assert_eq!(e.line, 4);
        let e = parse_graph("v a\ne a z\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_graph("v a\nv a\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = parse_instance::<u8>("v a 300\n").unwrap_err();
        assert_eq!(e.line, 1);
        assert_eq!(parse_graph("x y\n").unwrap_err().line, 1);
    }

    #[test]
    fn round_trip() {
        let g = downward_cycle(6).unwrap();
        assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g);
        let a = Assignment::<u32>::from_u64s(&g, &[3, 1, 0, 2, 0, 9]).unwrap();
        let text = write_instance(&g, &a);
        let back = parse_instance::<u32>(&text).unwrap();
        assert_eq!((back.graph, back.assignment), (g, a));
    }
}
