//! Non-identifiability certificates: search for a blocking configuration,
//! the cut-attach surgery and exact verification of both profile claims.
//!
//! A line `w' = x_0, …, x_{L-1} = w` is a pendant path of `L` vertices whose
//! end `w` is adjacent to `v`, so that `dist(v, w') = L`.

use crate::error::{Error, Result};
use crate::graph::{Explorer, Graph};
use crate::rooted::{
    binary_below, canon_rooted_graph_with, canon_tree, spine_event, CanonCode, CanonConfig, Profile, RootedTree,
};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingCertificate {
    pub v: usize,
    pub u: usize,
    pub w: usize,
    pub w_prime: usize,
    /// Line vertices from `w` to `w'`.
    pub line: Vec<usize>,
    pub r: usize,
    #[serde(rename = "L")]
    pub l: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub r_profile_equal: bool,
    pub deep_profile_differs: bool,
    /// Codes whose multiplicity differs at depth `r`, as `(code, before, after)`.
    pub r_differences: Vec<(CanonCode, usize, usize)>,
    /// Same at depth `2(r+L)`.
    pub deep_differences: Vec<(CanonCode, usize, usize)>,
}

fn check(r: usize, l: usize) -> Result<()> {
    if !(r > l && l >= 1) {
        return Err(Error::InvalidParameter(format!("need r > L >= 1, got r={r}, L={l}")));
    }
    Ok(())
}

/// Tree spanned by `vertices` (a connected acyclic vertex set) rooted at `root`.
fn rooted_tree(g: &Graph, root: usize, skip: &[usize]) -> RootedTree {
    let mut parents: Vec<Option<usize>> = vec![None];
    let mut order = vec![root];
    let mut index: HashMap<usize, usize> = HashMap::from([(root, 0)]);
    let mut head = 0;
    while head < order.len() {
        let x = order[head];
        for &y in g.neighbors(x) {
            if !skip.contains(&y) && !index.contains_key(&y) {
                index.insert(y, order.len());
                order.push(y);
                parents.push(Some(head));
            }
        }
        head += 1;
    }
    RootedTree::from_parents(&parents).expect("tree component")
}

/// Pendant lines of `L` vertices ending at a leaf, as `(v, [w, …, w'])`.
fn lines(g: &Graph, comp: &[usize], l: usize) -> Vec<(usize, Vec<usize>)> {
    let mut out = Vec::new();
    for &leaf in comp {
        if g.degree(leaf) != 1 {
            continue;
        }
        let mut path = vec![leaf];
        let mut prev = leaf;
        let mut cur = g.neighbors(leaf)[0];
        let mut ok = true;
        while path.len() < l {
            if g.degree(cur) != 2 {
                ok = false;
                break;
            }
            path.push(cur);
            let next = g.neighbors(cur).iter().copied().find(|&y| y != prev).unwrap();
            prev = cur;
            cur = next;
        }
        if ok {
            path.reverse();
            out.push((cur, path));
        }
    }
    out
}

/// First blocking configuration in vertex order (smallest `v`, then `w'`, then `u`).
pub fn find_blocking(g: &Graph, r: usize, l: usize) -> Result<Option<BlockingCertificate>> {
    check(r, l)?;
    let depth = 2 * r;
    let trees: Vec<Vec<usize>> = g
        .components()
        .into_iter()
        .filter(|c| c.iter().map(|&x| g.degree(x)).sum::<usize>() / 2 + 1 == c.len())
        .collect();
    // candidate C_u roots by the code of their depth-2r restriction
    let mut index: HashMap<CanonCode, Vec<(usize, usize)>> = HashMap::new();
    for (ci, comp) in trees.iter().enumerate() {
        if comp.len() <= depth {
            continue;
        }
        for &u in comp {
            let t = rooted_tree(g, u, &[]);
            let h = t.height();
            if h >= depth && h <= depth + l && binary_below(&t, depth) {
                index.entry(canon_tree(&t.restrict(depth), None)).or_default().push((u, ci));
            }
        }
    }
    let mut candidates = Vec::new();
    for (ci, comp) in trees.iter().enumerate() {
        if comp.len() <= depth + l {
            continue;
        }
        for (v, line) in lines(g, comp, l) {
            candidates.push((v, *line.last().unwrap(), line, ci));
        }
    }
    candidates.sort();
    for (v, w_prime, line, ci) in candidates {
        let tv = rooted_tree(g, v, &line);
        let h = tv.height();
        if h < depth || h > depth + l || !binary_below(&tv, depth) {
            continue;
        }
        let Some(us) = index.get(&canon_tree(&tv.restrict(depth), None)) else { continue };
        let mut us: Vec<_> = us.iter().filter(|&&(_, cu)| cu != ci).map(|&(u, _)| u).collect();
        us.sort_unstable();
        for u in us {
            if spine_event(&tv, &rooted_tree(g, u, &[]), depth, l) {
                return Ok(Some(BlockingCertificate { v, u, w: line[0], w_prime, line, r, l }));
            }
        }
    }
    Ok(None)
}

/// Moves the line: removes `(w, v)` and adds `(w, u)`.
pub fn cut_attach(g: &Graph, cert: &BlockingCertificate) -> Result<Graph> {
    if cert.u == cert.v {
        return Err(Error::InvalidCertificate("u equals v".into()));
    }
    if cert.u >= g.n() || cert.v >= g.n() || cert.w >= g.n() {
        return Err(Error::InvalidCertificate("vertex out of range".into()));
    }
    if !g.has_edge(cert.w, cert.v) {
        return Err(Error::InvalidCertificate(format!("edge ({}, {}) absent", cert.w, cert.v)));
    }
    if g.has_edge(cert.w, cert.u) || cert.w == cert.u {
        return Err(Error::InvalidCertificate(format!("edge ({}, {}) already present", cert.w, cert.u)));
    }
    let (a, b) = (cert.w.min(cert.v), cert.w.max(cert.v));
    let edges = g.edges().filter(|&e| e != (a, b)).chain(std::iter::once((cert.w, cert.u)));
    Graph::from_edges(g.n(), edges)
}

fn affected(g: &Graph, cert: &BlockingCertificate) -> Vec<usize> {
    let mut vs: Vec<usize> = Vec::new();
    let mut ex = Explorer::new(g.n());
    for root in [cert.v, cert.u] {
        vs.extend(ex.neighborhood(g, root, g.n()).1);
    }
    vs.sort_unstable();
    vs.dedup();
    vs
}

fn local_profile(g: &Graph, vertices: &[usize], r: usize, cfg: &CanonConfig) -> Result<Profile> {
    let mut ex = Explorer::new(g.n());
    vertices.iter().map(|&v| canon_rooted_graph_with(&ex.neighborhood(g, v, r).0, cfg)).collect()
}

/// Compares depth-`r` and depth-`2(r+L)` profiles before and after the surgery.
/// Only the components of `u` and `v` can change, so only their vertices are profiled.
pub fn verify_certificate(g: &Graph, cert: &BlockingCertificate, r: usize, l: usize) -> Result<VerifyReport> {
    let h = cut_attach(g, cert)?;
    let cfg = CanonConfig::unbounded();
    let vs = affected(g, cert);
    let deep = 2 * (r + l);
    let r_differences = local_profile(g, &vs, r, &cfg)?.difference(&local_profile(&h, &vs, r, &cfg)?);
    let deep_differences = local_profile(g, &vs, deep, &cfg)?.difference(&local_profile(&h, &vs, deep, &cfg)?);
    Ok(VerifyReport {
        r_profile_equal: r_differences.is_empty(),
        deep_profile_differs: !deep_differences.is_empty(),
        r_differences,
        deep_differences,
    })
}
