//! Canonical byte codes for rooted trees and rooted graphs.
//!
//! Trees use the bottom-up parenthesis encoding with sorted child codes.
//! Graphs first peel off hanging trees (folded into vertex labels), then run
//! color refinement with individualization on the remaining core and keep the
//! lexicographically least edge list over all search leaves.

use crate::error::{Error, Result};
use crate::rooted::{RootedGraph, RootedTree};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CanonCode(Vec<u8>);

impl CanonCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        CanonCode(bytes)
    }

    pub fn to_hex(&self) -> String {
        hex::encode(&self.0)
    }

    pub fn from_hex(s: &str) -> Result<Self> {
        hex::decode(s).map(CanonCode).map_err(|e| Error::Parse(e.to_string()))
    }
}

impl fmt::Debug for CanonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonCode({})", self.to_hex())
    }
}

impl fmt::Display for CanonCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl Serialize for CanonCode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for CanonCode {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        CanonCode::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonConfig {
    /// Largest cyclomatic number accepted.
    pub max_complexity: usize,
    /// Search nodes allowed in the individualization tree.
    pub node_budget: usize,
}

impl Default for CanonConfig {
    fn default() -> Self {
        CanonConfig { max_complexity: 12, node_budget: 1_000_000 }
    }
}

impl CanonConfig {
    pub fn unbounded() -> Self {
        CanonConfig { max_complexity: usize::MAX, ..Default::default() }
    }
}

const COLORED: u8 = b'#';

fn node_code(color: Option<u32>, mut kids: Vec<Vec<u8>>) -> Vec<u8> {
    kids.sort_unstable();
    let len = 2 + if color.is_some() { 4 } else { 0 } + kids.iter().map(Vec::len).sum::<usize>();
    let mut code = Vec::with_capacity(len);
    code.push(b'(');
    if let Some(c) = color {
        code.extend_from_slice(&c.to_be_bytes());
    }
    for k in kids {
        code.extend_from_slice(&k);
    }
    code.push(b')');
    code
}

/// Parenthesis code of a rooted tree; `colors` is indexed by tree vertex.
pub fn canon_tree(t: &RootedTree, colors: Option<&[u32]>) -> CanonCode {
    let mut codes: Vec<Vec<u8>> = vec![Vec::new(); t.len()];
    for v in (0..t.len()).rev() {
        let kids = t.children(v).map(|c| std::mem::take(&mut codes[c])).collect();
        codes[v] = node_code(colors.map(|c| c[v]), kids);
    }
    let root = std::mem::take(&mut codes[0]);
    match colors {
        Some(_) => CanonCode([&[COLORED][..], &root].concat()),
        None => CanonCode(root),
    }
}

pub fn canon_rooted_graph(g: &RootedGraph) -> Result<CanonCode> {
    canon_rooted_graph_with(g, &CanonConfig::default())
}

pub fn canon_rooted_graph_with(g: &RootedGraph, cfg: &CanonConfig) -> Result<CanonCode> {
    Ok(canonical_form(g, cfg)?.0)
}

/// Code plus a canonical relabeling: vertex `v` of `g` becomes `perm[v]`, and
/// isomorphic inputs relabel to identical graphs.
pub fn canonical_form(g: &RootedGraph, cfg: &CanonConfig) -> Result<(CanonCode, Vec<usize>)> {
    let comp = g.complexity()?;
    if comp > cfg.max_complexity {
        return Err(Error::ComplexityExceeded(cfg.max_complexity));
    }
    let colors = g.colors();
    let s = strip(g);
    let mut out = vec![b'T'];
    if colors.is_some() {
        out.push(COLORED);
    }
    if s.core.len() == 1 {
        out.extend_from_slice(&s.label[g.root()]);
        let perm = s.order(&[g.root()], g.len());
        return Ok((CanonCode(out), perm));
    }
    out[0] = b'G';
    let nc = s.core.len();
    let mut local = vec![usize::MAX; g.len()];
    for (i, &v) in s.core.iter().enumerate() {
        local[v] = i;
    }
    let adj: Vec<Vec<usize>> = s
        .core
        .iter()
        .map(|&v| g.neighbors(v).iter().filter(|&&y| local[y] != usize::MAX).map(|&y| local[y]).collect())
        .collect();
    let mut keys: Vec<(bool, usize, &[u8], usize)> =
        s.core.iter().enumerate().map(|(i, &v)| (v != g.root(), g.depth(v), &s.label[v][..], i)).collect();
    keys.sort_unstable();
    let mut initial = vec![0u32; nc];
    let mut rank = 0;
    for w in 0..nc {
        if w > 0 && (keys[w].0, keys[w].1, keys[w].2) != (keys[w - 1].0, keys[w - 1].1, keys[w - 1].2) {
            rank += 1;
        }
        initial[keys[w].3] = rank;
    }
    let mut ir = Ir::new(&adj, cfg.node_budget);
    ir.search(initial)?;
    let best = ir.best_colors;
    let mut by_pos = vec![0; nc];
    for (i, &c) in best.iter().enumerate() {
        by_pos[c as usize] = i;
    }
    varint(&mut out, nc);
    for &i in &by_pos {
        let label = &s.label[s.core[i]];
        varint(&mut out, label.len());
        out.extend_from_slice(label);
    }
    let edges = ir.best.unwrap();
    varint(&mut out, edges.len());
    for (a, b) in edges {
        varint(&mut out, a as usize);
        varint(&mut out, b as usize);
    }
    let core_order: Vec<usize> = by_pos.iter().map(|&i| s.core[i]).collect();
    Ok((CanonCode(out), s.order(&core_order, g.len())))
}

fn varint(out: &mut Vec<u8>, mut x: usize) {
    loop {
        let b = (x & 0x7f) as u8;
        x >>= 7;
        if x == 0 {
            out.push(b);
            return;
        }
        out.push(b | 0x80);
    }
}

/// Result of peeling hanging trees off a rooted graph.
struct Stripped {
    core: Vec<usize>,
    /// Hanging children per vertex, sorted by code.
    hang: Vec<Vec<usize>>,
    /// Subtree code for peeled vertices, label code for core vertices.
    label: Vec<Vec<u8>>,
}

fn strip(g: &RootedGraph) -> Stripped {
    let n = g.len();
    let colors = g.colors();
    let mut deg: Vec<usize> = (0..n).map(|v| g.neighbors(v).len()).collect();
    let mut removed = vec![false; n];
    let mut hang: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut label: Vec<Vec<u8>> = vec![Vec::new(); n];
    let mut queue: Vec<usize> = (0..n).filter(|&v| v != g.root() && deg[v] <= 1).collect();
    let finish = |v: usize, hang: &mut Vec<Vec<usize>>, label: &mut Vec<Vec<u8>>| {
        let mut kids = std::mem::take(&mut hang[v]);
        kids.sort_by(|&a, &b| label[a].cmp(&label[b]));
        let codes = kids.iter().map(|&k| label[k].clone()).collect();
        label[v] = node_code(colors.map(|c| c[v]), codes);
        hang[v] = kids;
    };
    while let Some(x) = queue.pop() {
        removed[x] = true;
        finish(x, &mut hang, &mut label);
        let p = g.neighbors(x).iter().copied().find(|&y| !removed[y]).expect("peeled vertex keeps one neighbor");
        hang[p].push(x);
        deg[p] -= 1;
        if p != g.root() && deg[p] == 1 {
            queue.push(p);
        }
    }
    let core: Vec<usize> = (0..n).filter(|&v| !removed[v]).collect();
    for &v in &core {
        finish(v, &mut hang, &mut label);
    }
    Stripped { core, hang, label }
}

impl Stripped {
    /// Core vertices in the given order, then hanging trees in preorder.
    fn order(&self, core_order: &[usize], n: usize) -> Vec<usize> {
        let mut perm = vec![usize::MAX; n];
        let mut next = 0;
        for &v in core_order {
            perm[v] = next;
            next += 1;
        }
        let mut stack: Vec<usize> = Vec::new();
        for &v in core_order {
            stack.extend(self.hang[v].iter().rev());
            while let Some(x) = stack.pop() {
                perm[x] = next;
                next += 1;
                stack.extend(self.hang[x].iter().rev());
            }
        }
        debug_assert_eq!(next, n);
        perm
    }
}

/// Equitable refinement; returns the number of cells. Colors end up dense.
pub(crate) fn refine(adj: &[Vec<usize>], colors: &mut [u32]) -> usize {
    let n = colors.len();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut cells = usize::MAX;
    let mut sig: Vec<Vec<u32>> = vec![Vec::new(); n];
    loop {
        for v in 0..n {
            let s = &mut sig[v];
            s.clear();
            s.extend(adj[v].iter().map(|&y| colors[y]));
            s.sort_unstable();
        }
        idx.sort_unstable_by(|&a, &b| colors[a].cmp(&colors[b]).then_with(|| sig[a].cmp(&sig[b])));
        let mut next = vec![0u32; n];
        let mut rank = 0u32;
        for w in 0..n {
            if w > 0 {
                let (a, b) = (idx[w - 1], idx[w]);
                if colors[a] != colors[b] || sig[a] != sig[b] {
                    rank += 1;
                }
            }
            next[idx[w]] = rank;
        }
        let count = if n == 0 { 0 } else { rank as usize + 1 };
        colors.copy_from_slice(&next);
        if count == cells {
            return count;
        }
        cells = count;
    }
}

struct Ir<'a> {
    adj: &'a [Vec<usize>],
    edges: Vec<(usize, usize)>,
    budget: usize,
    nodes: usize,
    best: Option<Vec<(u32, u32)>>,
    best_colors: Vec<u32>,
}

impl<'a> Ir<'a> {
    fn new(adj: &'a [Vec<usize>], budget: usize) -> Self {
        let mut edges = Vec::new();
        for (a, l) in adj.iter().enumerate() {
            edges.extend(l.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        Ir { adj, edges, budget, nodes: 0, best: None, best_colors: Vec::new() }
    }

    fn search(&mut self, mut colors: Vec<u32>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::ComplexityExceeded(self.budget));
        }
        let n = colors.len();
        let cells = refine(self.adj, &mut colors);
        if cells == n {
            let mut e: Vec<(u32, u32)> = self
                .edges
                .iter()
                .map(|&(a, b)| {
                    let (x, y) = (colors[a], colors[b]);
                    (x.min(y), x.max(y))
                })
                .collect();
            e.sort_unstable();
            if self.best.as_ref().is_none_or(|b| e < *b) {
                self.best = Some(e);
                self.best_colors = colors;
            }
            return Ok(());
        }
        let mut size = vec![0usize; cells];
        for &c in &colors {
            size[c as usize] += 1;
        }
        let target = size.iter().position(|&s| s > 1).unwrap() as u32;
        let members: Vec<usize> = (0..n).filter(|&v| colors[v] == target).collect();
        let mut reps: Vec<usize> = Vec::new();
        for &v in &members {
            if !reps.iter().any(|&u| self.twins(u, v)) {
                reps.push(v);
            }
        }
        for v in reps {
            let next: Vec<u32> =
                colors.iter().enumerate().map(|(y, &c)| 2 * c + u32::from(c == target && y != v)).collect();
            self.search(next)?;
        }
        Ok(())
    }

    fn twins(&self, u: usize, v: usize) -> bool {
        let a = self.adj[u].iter().filter(|&&x| x != v);
        let b = self.adj[v].iter().filter(|&&x| x != u);
        a.eq(b)
    }
}

/// Root-free code: the least rooted code over the smallest refinement cell.
pub fn canon_unrooted(g: &RootedGraph, cfg: &CanonConfig) -> Result<CanonCode> {
    let mut colors: Vec<u32> = match g.colors() {
        Some(c) => c.to_vec(),
        None => vec![0; g.len()],
    };
    let cells = refine(g.adjacency(), &mut colors);
    let mut size = vec![0usize; cells];
    for &c in &colors {
        size[c as usize] += 1;
    }
    let target = (0..cells).min_by_key(|&c| (size[c], c)).unwrap() as u32;
    let mut best: Option<CanonCode> = None;
    for v in (0..g.len()).filter(|&v| colors[v] == target) {
        let code = canon_rooted_graph_with(&g.reroot(v), cfg)?;
        if best.as_ref().is_none_or(|b| code < *b) {
            best = Some(code);
        }
    }
    let mut out = vec![b'U'];
    out.extend_from_slice(best.unwrap().as_bytes());
    Ok(CanonCode(out))
}
