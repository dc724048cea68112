//! Graph serialization.
//!
//! Text form: a header line `n m`, then `m` lines `u v` with `u < v` in
//! lexicographic order. JSON form: `{"n": .., "edges": [[u, v], ..]}`.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rooted::RootedGraph;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt::Write as _;

#[derive(Serialize, Deserialize)]
struct GraphRepr {
    n: usize,
    edges: Vec<[usize; 2]>,
}

impl Serialize for Graph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GraphRepr { n: self.n(), edges: self.edges().map(|(a, b)| [a, b]).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = GraphRepr::deserialize(d)?;
        Graph::from_edges(repr.n, repr.edges.into_iter().map(|[a, b]| (a, b))).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
struct RootedRepr {
    n: usize,
    root: usize,
    edges: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    colors: Option<Vec<u32>>,
}

impl Serialize for RootedGraph {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RootedRepr {
            n: self.len(),
            root: self.root(),
            edges: self.edges().into_iter().map(|(a, b)| [a, b]).collect(),
            colors: self.colors().map(<[u32]>::to_vec),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for RootedGraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = RootedRepr::deserialize(d)?;
        let pairs: Vec<_> = repr.edges.into_iter().map(|[a, b]| (a, b)).collect();
        let g = RootedGraph::new(repr.n, repr.root, &pairs).map_err(serde::de::Error::custom)?;
        match repr.colors {
            Some(c) => g.with_colors(c).map_err(serde::de::Error::custom),
            None => Ok(g),
        }
    }
}

pub fn to_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.edge_count());
    for (a, b) in g.edges() {
        writeln!(out, "{a} {b}").unwrap();
    }
    out
}

pub fn parse_edge_list(text: &str) -> Result<Graph> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("empty input".into()))?;
    let nums = |line: &str| -> Result<(usize, usize)> {
        let mut it = line.split_whitespace().map(|t| t.parse::<usize>().map_err(|e| Error::Parse(format!("{line:?}: {e}"))));
        match (it.next(), it.next(), it.next()) {
            (Some(a), Some(b), None) => Ok((a?, b?)),
            _ => Err(Error::Parse(format!("expected two integers, got {line:?}"))),
        }
    };
    let (n, m) = nums(header)?;
    let edges = lines.map(nums).collect::<Result<Vec<_>>>()?;
    if edges.len() != m {
        return Err(Error::Parse(format!("header announces {m} edges, found {}", edges.len())));
    }
    let g = Graph::from_edges(n, edges).map_err(|e| Error::Parse(e.to_string()))?;
    if g.edge_count() != m {
        return Err(Error::Parse("duplicate edges".into()));
    }
    Ok(g)
}

pub fn to_json(g: &Graph) -> String {
    serde_json::to_string(g).expect("graph serializes")
}

pub fn parse_json(text: &str) -> Result<Graph> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Accepts either form, telling them apart by the first non-blank character.
pub fn parse_graph(text: &str) -> Result<Graph> {
    if text.trim_start().starts_with('{') {
        parse_json(text)
    } else {
        parse_edge_list(text)
    }
}
