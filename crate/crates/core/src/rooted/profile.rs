use crate::error::Result;
use crate::graph::{Explorer, Graph};
use crate::rooted::{canon_rooted_graph_with, canon_unrooted, CanonCode, CanonConfig, RootedGraph};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

/// Multiset of canonical codes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Profile(pub BTreeMap<CanonCode, usize>);

impl Profile {
    pub fn insert(&mut self, code: CanonCode) {
        *self.0.entry(code).or_insert(0) += 1;
    }

    pub fn total(&self) -> usize {
        self.0.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.0.len()
    }

    pub fn multiplicity(&self, code: &CanonCode) -> usize {
        self.0.get(code).copied().unwrap_or(0)
    }

    /// Codes whose multiplicities differ, with `(self, other)` counts.
    pub fn difference(&self, other: &Profile) -> Vec<(CanonCode, usize, usize)> {
        let mut out = Vec::new();
        for (c, &m) in &self.0 {
            let o = other.multiplicity(c);
            if o != m {
                out.push((c.clone(), m, o));
            }
        }
        for (c, &o) in &other.0 {
            if !self.0.contains_key(c) {
                out.push((c.clone(), 0, o));
            }
        }
        out.sort();
        out
    }
}

impl FromIterator<CanonCode> for Profile {
    fn from_iter<I: IntoIterator<Item = CanonCode>>(iter: I) -> Self {
        let mut p = Profile::default();
        iter.into_iter().for_each(|c| p.insert(c));
        p
    }
}

pub fn profile(entries: &[RootedGraph]) -> Result<Profile> {
    profile_with(entries, &CanonConfig::default())
}

pub fn profile_with(entries: &[RootedGraph], cfg: &CanonConfig) -> Result<Profile> {
    entries.iter().map(|g| canon_rooted_graph_with(g, cfg)).collect()
}

/// Profile of the depth-r neighborhoods of the given vertices of `g`.
pub fn vertex_profile(g: &Graph, vertices: impl IntoIterator<Item = usize>, r: usize, cfg: &CanonConfig) -> Result<Profile> {
    let mut ex = Explorer::new(g.n());
    vertices.into_iter().map(|v| canon_rooted_graph_with(&ex.neighborhood(g, v, r).0, cfg)).collect()
}

pub fn graph_profile(g: &Graph, r: usize, cfg: &CanonConfig) -> Result<Profile> {
    vertex_profile(g, 0..g.n(), r, cfg)
}

/// Multiset of root-free codes of the connected components of `g`.
pub fn component_codes(g: &Graph, cfg: &CanonConfig) -> Result<Profile> {
    g.components()
        .into_iter()
        .map(|comp| {
            let sub = g.induced(&comp);
            let rg = RootedGraph::new(sub.n(), 0, &sub.edges().collect::<Vec<_>>())?;
            canon_unrooted(&rg, cfg)
        })
        .collect()
}
