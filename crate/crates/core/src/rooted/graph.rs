use crate::error::{Error, Result};
use crate::graph::EdgeSet;
use crate::rooted::RootedTree;
use std::collections::VecDeque;

/// A connected graph with a distinguished root, optional vertex colors and
/// per-vertex distance from the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedGraph {
    root: usize,
    adj: Vec<Vec<usize>>,
    colors: Option<Vec<u32>>,
    depth: Vec<u32>,
}

fn bfs_depths(adj: &[Vec<usize>], root: usize) -> Vec<u32> {
    let mut depth = vec![u32::MAX; adj.len()];
    depth[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for &y in &adj[x] {
            if depth[y] == u32::MAX {
                depth[y] = depth[x] + 1;
                queue.push_back(y);
            }
        }
    }
    depth
}

impl RootedGraph {
    pub fn new(n: usize, root: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if root >= n {
            return Err(Error::InvalidParameter(format!("root {root} out of range for {n} vertices")));
        }
        let edges = EdgeSet::new(n, pairs.iter().copied())?;
        let mut adj = vec![Vec::new(); n];
        for (a, b) in edges.iter() {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj.iter_mut().for_each(|l| l.sort_unstable());
        let depth = bfs_depths(&adj, root);
        if depth.contains(&u32::MAX) {
            return Err(Error::Disconnected);
        }
        Ok(RootedGraph { root, adj, colors: None, depth })
    }

    /// Trusted constructor: `adj` sorted and symmetric, `depth` consistent.
    pub(crate) fn from_parts(root: usize, adj: Vec<Vec<usize>>, colors: Option<Vec<u32>>, depth: Vec<u32>) -> Self {
        debug_assert_eq!(depth, bfs_depths(&adj, root));
        RootedGraph { root, adj, colors, depth }
    }

    pub fn single() -> Self {
        RootedGraph { root: 0, adj: vec![Vec::new()], colors: None, depth: vec![0] }
    }

    pub fn with_colors(mut self, colors: Vec<u32>) -> Result<Self> {
        if colors.len() != self.len() {
            return Err(Error::InvalidParameter(format!("{} colors for {} vertices", colors.len(), self.len())));
        }
        self.colors = Some(colors);
        Ok(self)
    }

    pub fn from_tree(t: &RootedTree) -> Self {
        let mut adj = vec![Vec::new(); t.len()];
        for v in 1..t.len() {
            let p = t.parent(v).unwrap();
            adj[p].push(v);
            adj[v].push(p);
        }
        adj.iter_mut().for_each(|l| l.sort_unstable());
        let depth = (0..t.len()).map(|v| t.level(v) as u32).collect();
        RootedGraph { root: 0, adj, colors: None, depth }
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    pub fn colors(&self) -> Option<&[u32]> {
        self.colors.as_deref()
    }

    pub fn depth(&self, v: usize) -> usize {
        self.depth[v] as usize
    }

    pub fn max_depth(&self) -> usize {
        self.depth.iter().copied().max().unwrap_or(0) as usize
    }

    /// True when no vertex sits at depth `r`, i.e. `N_r = N_{r-1}` for a depth-r neighborhood.
    pub fn is_degenerate(&self, r: usize) -> bool {
        self.max_depth() < r
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count());
        for (a, l) in self.adj.iter().enumerate() {
            out.extend(l.iter().filter(|&&b| b > a).map(|&b| (a, b)));
        }
        out
    }

    pub fn complexity(&self) -> Result<usize> {
        // Connectivity is a type invariant, so only the formula remains.
        Ok(self.edge_count() + 1 - self.len())
    }

    pub fn is_tree(&self) -> bool {
        self.edge_count() + 1 == self.len()
    }

    /// Induced subgraph on vertices of depth at most `k`; relative order of ids is kept.
    pub fn restrict(&self, k: usize) -> RootedGraph {
        let keep: Vec<usize> = (0..self.len()).filter(|&v| self.depth(v) <= k).collect();
        if keep.len() == self.len() {
            return self.clone();
        }
        let mut map = vec![usize::MAX; self.len()];
        for (i, &v) in keep.iter().enumerate() {
            map[v] = i;
        }
        let adj = keep
            .iter()
            .map(|&v| self.adj[v].iter().filter(|&&y| map[y] != usize::MAX).map(|&y| map[y]).collect())
            .collect();
        let colors = self.colors.as_ref().map(|c| keep.iter().map(|&v| c[v]).collect());
        let depth = keep.iter().map(|&v| self.depth[v]).collect();
        RootedGraph { root: map[self.root], adj, colors, depth }
    }

    /// Same graph with a new root.
    pub fn reroot(&self, root: usize) -> RootedGraph {
        let depth = bfs_depths(&self.adj, root);
        RootedGraph { root, adj: self.adj.clone(), colors: self.colors.clone(), depth }
    }

    /// Renames vertex `v` to `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> RootedGraph {
        let n = self.len();
        let mut adj = vec![Vec::new(); n];
        let mut depth = vec![0; n];
        let mut colors = self.colors.as_ref().map(|_| vec![0; n]);
        for v in 0..n {
            let mut l: Vec<usize> = self.adj[v].iter().map(|&y| perm[y]).collect();
            l.sort_unstable();
            adj[perm[v]] = l;
            depth[perm[v]] = self.depth[v];
            if let (Some(out), Some(src)) = (colors.as_mut(), self.colors.as_ref()) {
                out[perm[v]] = src[v];
            }
        }
        RootedGraph { root: perm[self.root], adj, colors, depth }
    }

    /// The tree itself when acyclic, in breadth-first normal form.
    pub fn to_tree(&self) -> Option<RootedTree> {
        if !self.is_tree() {
            return None;
        }
        let mut parents = vec![None; self.len()];
        for v in 0..self.len() {
            if v != self.root {
                parents[v] = self.adj[v].iter().copied().find(|&y| self.depth[y] + 1 == self.depth[v]);
            }
        }
        Some(RootedTree::from_parents(&parents).expect("tree structure"))
    }
}
