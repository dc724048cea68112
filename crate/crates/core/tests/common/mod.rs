//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use shotgun::graph::Graph;
use shotgun::rooted::{RootedGraph, RootedTree};

/// Bit index of the pair `i < j` among the pairs of `0..n`.
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = (i.min(j), i.max(j));
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            out.push((i, j));
        }
    }
    out
}

pub fn mask_edges(n: usize, mask: u64) -> Vec<(usize, usize)> {
    pairs(n).into_iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, p)| p).collect()
}

pub fn mask_connected(n: usize, mask: u64) -> bool {
    let ps = pairs(n);
    let mut seen = 1u32;
    loop {
        let mut grown = seen;
        for (b, &(i, j)) in ps.iter().enumerate() {
            if mask >> b & 1 == 1 && (seen >> i & 1 == 1 || seen >> j & 1 == 1) {
                grown |= 1 << i | 1 << j;
            }
        }
        if grown == seen {
            return seen.count_ones() as usize == n;
        }
        seen = grown;
    }
}

/// All permutations of `0..n` fixing 0.
pub fn root_fixing_perms(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for v in 1..used.len() {
            if !used[v] {
                used[v] = true;
                cur.push(v);
                rec(cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    let mut used = vec![false; n];
    used[0] = true;
    rec(&mut vec![0], &mut used, &mut out);
    out
}

/// Minimum image of an edge mask over all root-fixing relabelings, computed
/// with per-permutation lookup tables over 7-bit chunks of the mask.
pub struct BruteCanon {
    chunks: usize,
    tables: Vec<u64>,
    perms: usize,
}

impl BruteCanon {
    pub fn new(n: usize) -> Self {
        let m = n * (n - 1) / 2;
        let chunks = m.div_ceil(7).max(1);
        let ps = pairs(n);
        let perms = root_fixing_perms(n);
        let mut tables = vec![0u64; perms.len() * chunks * 128];
        for (p, perm) in perms.iter().enumerate() {
            for c in 0..chunks {
                for x in 0..128usize {
                    let mut img = 0u64;
                    for k in 0..7 {
                        let b = 7 * c + k;
                        if x >> k & 1 == 1 && b < m {
                            let (i, j) = ps[b];
                            img |= 1 << pair_index(n, perm[i], perm[j]);
                        }
                    }
                    tables[(p * chunks + c) * 128 + x] = img;
                }
            }
        }
        BruteCanon { chunks, tables, perms: perms.len() }
    }

    pub fn canon(&self, mask: u64) -> u64 {
        let mut best = u64::MAX;
        let parts: Vec<usize> = (0..self.chunks).map(|c| (mask >> (7 * c) & 127) as usize).collect();
        for p in 0..self.perms {
            let base = p * self.chunks * 128;
            let mut img = 0;
            for (c, &x) in parts.iter().enumerate() {
                img |= self.tables[base + c * 128 + x];
            }
            best = best.min(img);
        }
        best
    }
}

/// All labeled trees on `n` vertices (Prüfer sequences), as parent arrays rooted at 0.
pub fn labeled_trees(n: usize) -> Vec<Vec<Option<usize>>> {
    if n == 1 {
        return vec![vec![None]];
    }
    if n == 2 {
        return vec![vec![None, Some(0)]];
    }
    let mut out = Vec::new();
    let total = n.pow(n as u32 - 2);
    for code in 0..total {
        let mut seq = Vec::with_capacity(n - 2);
        let mut c = code;
        for _ in 0..n - 2 {
            seq.push(c % n);
            c /= n;
        }
        let mut degree = vec![1usize; n];
        for &s in &seq {
            degree[s] += 1;
        }
        let mut edges = Vec::with_capacity(n - 1);
        for &s in &seq {
            let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
            edges.push((leaf, s));
            degree[leaf] -= 1;
            degree[s] -= 1;
        }
        let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
        edges.push((rest[0], rest[1]));
        let g = Graph::from_edges(n, edges).unwrap();
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            for &y in g.neighbors(x) {
                if !seen[y] {
                    seen[y] = true;
                    parent[y] = Some(x);
                    stack.push(y);
                }
            }
        }
        out.push(parent);
    }
    out
}

pub fn parents_mask(n: usize, parents: &[Option<usize>]) -> u64 {
    parents.iter().enumerate().filter_map(|(v, p)| p.map(|p| 1u64 << pair_index(n, v, p))).fold(0, |a, b| a | b)
}

/// All ordered (plane) trees with `n` vertices, as parent arrays in preorder.
pub fn ordered_trees(n: usize) -> Vec<Vec<Option<usize>>> {
    // Dyck words of length 2(n-1): '(' descends to a new child, ')' climbs.
    let mut out = Vec::new();
    fn rec(n: usize, open: usize, close: usize, word: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
        if open == n - 1 && close == n - 1 {
            out.push(word.clone());
            return;
        }
        if open < n - 1 {
            word.push(true);
            rec(n, open + 1, close, word, out);
            word.pop();
        }
        if close < open {
            word.push(false);
            rec(n, open, close + 1, word, out);
            word.pop();
        }
    }
    let mut words = Vec::new();
    rec(n, 0, 0, &mut Vec::new(), &mut words);
    for w in words {
        let mut parent = vec![None];
        let mut stack = vec![0];
        for step in w {
            if step {
                let v = parent.len();
                parent.push(Some(*stack.last().unwrap()));
                stack.push(v);
            } else {
                stack.pop();
            }
        }
        out.push(parent);
    }
    out
}

pub fn rooted_from_mask(n: usize, mask: u64) -> RootedGraph {
    RootedGraph::new(n, 0, &mask_edges(n, mask)).unwrap()
}

pub fn tree_from_parents(p: &[Option<usize>]) -> RootedTree {
    RootedTree::from_parents(p).unwrap()
}

/// Exhaustive enumeration of unordered rooted tree classes up to size `k`,
/// one representative each, by brute-force canonical deduplication.
pub fn rooted_tree_classes(k: usize) -> Vec<RootedTree> {
    use std::collections::HashSet;
    let mut out = Vec::new();
    for n in 1..=k {
        let brute = BruteCanon::new(n);
        let mut seen = HashSet::new();
        for p in labeled_trees(n) {
            if seen.insert(brute.canon(parents_mask(n, &p))) {
                out.push(tree_from_parents(&p));
            }
        }
    }
    out
}
