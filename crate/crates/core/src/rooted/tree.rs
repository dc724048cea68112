use crate::error::{Error, Result};
use std::ops::Range;

/// Rooted unordered tree stored in breadth-first normal form: vertex 0 is the
/// root, levels are contiguous and the children of each vertex are a
/// contiguous block.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootedTree {
    parent: Vec<u32>,
    level: Vec<u32>,
    first_child: Vec<u32>,
    degree: Vec<u32>,
}

const NONE: u32 = u32::MAX;

impl RootedTree {
    pub fn single() -> Self {
        RootedTree { parent: vec![NONE], level: vec![0], first_child: vec![1], degree: vec![0] }
    }

    /// Builds from breadth-first offspring counts. Vertices past the end of
    /// `counts` are leaves.
    pub fn from_offspring(counts: &[u32]) -> Result<Self> {
        let mut parent = vec![NONE];
        let mut level = vec![0u32];
        let mut first_child = Vec::new();
        let mut degree = Vec::new();
        let mut v = 0;
        while v < parent.len() {
            let d = counts.get(v).copied().unwrap_or(0);
            first_child.push(parent.len() as u32);
            degree.push(d);
            for _ in 0..d {
                parent.push(v as u32);
                level.push(level[v] + 1);
            }
            v += 1;
        }
        if counts.len() > parent.len() {
            return Err(Error::InvalidParameter("offspring sequence longer than tree".into()));
        }
        Ok(RootedTree { parent, level, first_child, degree })
    }

    /// Builds from a parent array; exactly one entry must be `None`.
    pub fn from_parents(parents: &[Option<usize>]) -> Result<Self> {
        let n = parents.len();
        let mut roots = parents.iter().enumerate().filter(|(_, p)| p.is_none()).map(|(i, _)| i);
        let root = roots.next().ok_or_else(|| Error::InvalidParameter("no root".into()))?;
        if roots.next().is_some() {
            return Err(Error::InvalidParameter("more than one root".into()));
        }
        let mut children = vec![Vec::new(); n];
        for (v, p) in parents.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(Error::InvalidParameter(format!("parent {p} out of range")));
                }
                children[p].push(v);
            }
        }
        let mut order = vec![root];
        let mut counts = Vec::with_capacity(n);
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            counts.push(children[v].len() as u32);
            order.extend_from_slice(&children[v]);
            i += 1;
        }
        if order.len() != n {
            return Err(Error::InvalidParameter("parent array contains a cycle".into()));
        }
        Self::from_offspring(&counts)
    }

    /// Path with `len` edges.
    pub fn path(len: usize) -> Self {
        let mut counts = vec![1u32; len];
        counts.push(0);
        Self::from_offspring(&counts).unwrap()
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        (self.parent[v] != NONE).then(|| self.parent[v] as usize)
    }

    pub fn level(&self, v: usize) -> usize {
        self.level[v] as usize
    }

    pub fn degree(&self, v: usize) -> usize {
        self.degree[v] as usize
    }

    pub fn children(&self, v: usize) -> Range<usize> {
        let s = self.first_child[v] as usize;
        s..s + self.degree[v] as usize
    }

    pub fn height(&self) -> usize {
        *self.level.last().unwrap() as usize
    }

    pub fn level_counts(&self) -> Vec<usize> {
        let mut out = vec![0; self.height() + 1];
        for &l in &self.level {
            out[l as usize] += 1;
        }
        out
    }

    pub fn level_count(&self, l: usize) -> usize {
        self.level_counts().get(l).copied().unwrap_or(0)
    }

    /// Number of vertices on levels `0..=r` (a prefix of the vertex order).
    pub fn prefix_len(&self, r: usize) -> usize {
        self.level.partition_point(|&l| (l as usize) <= r)
    }

    pub fn offspring(&self) -> &[u32] {
        &self.degree
    }

    pub fn restrict(&self, r: usize) -> RootedTree {
        let keep = self.prefix_len(r);
        let counts: Vec<u32> = (0..keep).map(|v| if self.level(v) < r { self.degree[v] } else { 0 }).collect();
        Self::from_offspring(&counts).unwrap()
    }

    pub fn subtree_sizes(&self) -> Vec<usize> {
        let mut size = vec![1usize; self.len()];
        for v in (1..self.len()).rev() {
            size[self.parent[v] as usize] += size[v];
        }
        size
    }

    /// Removes the subtree below `v` (inclusive); `v` must not be the root.
    pub fn without_subtree(&self, v: usize) -> RootedTree {
        let mut drop = vec![false; self.len()];
        drop[v] = true;
        for x in v + 1..self.len() {
            if let Some(p) = self.parent(x) {
                drop[x] |= drop[p];
            }
        }
        let kept: Vec<usize> = (0..self.len()).filter(|&x| !drop[x]).collect();
        let mut map = vec![usize::MAX; self.len()];
        for (i, &x) in kept.iter().enumerate() {
            map[x] = i;
        }
        let parents: Vec<Option<usize>> = kept.iter().map(|&x| self.parent(x).map(|p| map[p])).collect();
        Self::from_parents(&parents).unwrap()
    }
}
