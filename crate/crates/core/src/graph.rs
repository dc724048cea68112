//! Ambient graphs: compact adjacency storage, Erdős–Rényi sampling,
//! neighborhood extraction and the bridge / block decomposition.

use crate::error::{Error, Result};
use crate::rng;
use crate::rooted::RootedGraph;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

/// Sorted, deduplicated list of unordered pairs stored as `(min, max)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EdgeSet(Vec<(usize, usize)>);

impl EdgeSet {
    pub fn new(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut v = Vec::new();
        for (a, b) in pairs {
            if a >= n || b >= n {
                return Err(Error::InvalidParameter(format!("edge ({a},{b}) out of range for n={n}")));
            }
            if a == b {
                return Err(Error::InvalidParameter(format!("self-loop at {a}")));
            }
            v.push((a.min(b), a.max(b)));
        }
        v.sort_unstable();
        v.dedup();
        Ok(EdgeSet(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[(usize, usize)] {
        &self.0
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.0.binary_search(&(a.min(b), a.max(b))).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.0.iter().copied()
    }
}

/// Undirected simple graph on `0..n` in compressed adjacency form.
/// Every neighbor list is strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<usize>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { offsets: vec![0; n + 1], targets: Vec::new() }
    }

    pub fn from_edges(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Ok(Self::from_edge_set(n, &EdgeSet::new(n, pairs)?))
    }

    pub fn from_edge_set(n: usize, edges: &EdgeSet) -> Self {
        let mut deg = vec![0usize; n];
        for (a, b) in edges.iter() {
            deg[a] += 1;
            deg[b] += 1;
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for d in &deg {
            offsets.push(offsets.last().unwrap() + d);
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0; offsets[n]];
        // Lexicographic edge order keeps each list sorted without a second pass.
        for (a, b) in edges.iter() {
            targets[fill[a]] = b;
            fill[a] += 1;
            targets[fill[b]] = a;
            fill[b] += 1;
        }
        Graph { offsets, targets }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |a| self.neighbors(a).iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }

    pub fn edge_set(&self) -> EdgeSet {
        EdgeSet(self.edges().collect())
    }

    /// Connected components as sorted vertex lists, ordered by minimum vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut queue = VecDeque::new();
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            queue.push_back(s);
            let mut comp = Vec::new();
            while let Some(x) = queue.pop_front() {
                comp.push(x);
                for &y in self.neighbors(x) {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Subgraph induced on `vertices` (given in the order that fixes new ids).
    pub fn induced(&self, vertices: &[usize]) -> Graph {
        let mut local = std::collections::HashMap::with_capacity(vertices.len());
        for (i, &x) in vertices.iter().enumerate() {
            local.insert(x, i);
        }
        let mut pairs = Vec::new();
        for (i, &x) in vertices.iter().enumerate() {
            for y in self.neighbors(x) {
                if let Some(&j) = local.get(y) {
                    if i < j {
                        pairs.push((i, j));
                    }
                }
            }
        }
        Graph::from_edges(vertices.len(), pairs).expect("induced edges are valid")
    }
}

/// Output of [`generate_er`].
#[derive(Clone, Debug)]
pub struct ErSample {
    pub graph: Graph,
    pub p: f64,
    /// Set when `lambda / n > 1` forced the edge probability to 1.
    pub clamped: bool,
}

const SKIP_THRESHOLD: usize = 10_000;

/// Samples G(n, λ/n). Per-pair coin flips below 10⁴ vertices, geometric
/// skipping over the pair sequence above.
pub fn generate_er(n: usize, lambda: f64, seed: u64) -> Result<ErSample> {
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::InvalidParameter(format!("lambda must be positive and finite, got {lambda}")));
    }
    let raw = lambda / n as f64;
    let clamped = raw > 1.0;
    let p = raw.min(1.0);
    let mut rng = rng::stream(seed, 0);
    let mut pairs = Vec::new();
    if p >= 1.0 {
        for a in 0..n {
            for b in a + 1..n {
                pairs.push((a, b));
            }
        }
    } else if n < SKIP_THRESHOLD {
        for a in 0..n {
            for b in a + 1..n {
                if rng.random::<f64>() < p {
                    pairs.push((a, b));
                }
            }
        }
    } else {
        let log_q = (-p).ln_1p();
        let (mut v, mut w): (usize, i64) = (1, -1);
        while v < n {
            let u: f64 = rng.random();
            w += 1 + ((1.0 - u).ln() / log_q).floor() as i64;
            while w >= v as i64 && v < n {
                w -= v as i64;
                v += 1;
            }
            if v < n {
                pairs.push((w as usize, v));
            }
        }
        pairs.sort_unstable();
    }
    let edges = EdgeSet(pairs);
    Ok(ErSample { graph: Graph::from_edge_set(n, &edges), p, clamped })
}

/// Reusable breadth-first explorer; avoids an O(n) clear per extraction.
pub struct Explorer {
    stamp: Vec<u32>,
    local: Vec<usize>,
    round: u32,
}

impl Explorer {
    pub fn new(n: usize) -> Self {
        Explorer { stamp: vec![0; n], local: vec![0; n], round: 0 }
    }

    fn bump(&mut self) {
        self.round = self.round.wrapping_add(1);
        if self.round == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.round = 1;
        }
    }

    /// `N_r(v)` with local ids in BFS order (root is 0) and the global id of each local vertex.
    pub fn neighborhood(&mut self, g: &Graph, v: usize, r: usize) -> (RootedGraph, Vec<usize>) {
        self.bump();
        let round = self.round;
        let mut order = vec![v];
        let mut depth = vec![0u32];
        self.stamp[v] = round;
        self.local[v] = 0;
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            let d = depth[head];
            head += 1;
            if d as usize >= r {
                continue;
            }
            for &y in g.neighbors(x) {
                if self.stamp[y] != round {
                    self.stamp[y] = round;
                    self.local[y] = order.len();
                    order.push(y);
                    depth.push(d + 1);
                }
            }
        }
        let mut adj = vec![Vec::new(); order.len()];
        for (i, &x) in order.iter().enumerate() {
            for &y in g.neighbors(x) {
                if self.stamp[y] == round {
                    adj[i].push(self.local[y]);
                }
            }
            adj[i].sort_unstable();
        }
        (RootedGraph::from_parts(0, adj, None, depth), order)
    }

    /// True iff no vertex lies at distance exactly `r` from `v`.
    pub fn is_degenerate(&mut self, g: &Graph, v: usize, r: usize) -> bool {
        self.bump();
        let round = self.round;
        let mut frontier = vec![v];
        self.stamp[v] = round;
        for _ in 0..r {
            let mut next = Vec::new();
            for &x in &frontier {
                for &y in g.neighbors(x) {
                    if self.stamp[y] != round {
                        self.stamp[y] = round;
                        next.push(y);
                    }
                }
            }
            if next.is_empty() {
                return true;
            }
            frontier = next;
        }
        false
    }
}

pub fn neighborhood(g: &Graph, v: usize, r: usize) -> RootedGraph {
    Explorer::new(g.n()).neighborhood(g, v, r).0
}

pub fn component(g: &Graph, v: usize) -> RootedGraph {
    neighborhood(g, v, g.n())
}

pub fn is_degenerate(g: &Graph, v: usize, r: usize) -> bool {
    Explorer::new(g.n()).is_degenerate(g, v, r)
}

/// Cyclomatic number `|E| - |V| + 1` of a connected rooted graph.
pub fn complexity(h: &RootedGraph) -> Result<usize> {
    h.complexity()
}

/// Edges lying on no cycle, by one iterative low-link pass.
pub fn bridges(g: &Graph) -> EdgeSet {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut out = Vec::new();
    let mut time = 0;
    // (vertex, parent, next neighbor index)
    let mut stack: Vec<(usize, usize, usize)> = Vec::new();
    for s in 0..n {
        if disc[s] != usize::MAX {
            continue;
        }
        disc[s] = time;
        low[s] = time;
        time += 1;
        stack.push((s, usize::MAX, 0));
        while let Some(top) = stack.last_mut() {
            let (x, parent, idx) = *top;
            if idx < g.degree(x) {
                top.2 += 1;
                let y = g.neighbors(x)[idx];
                if y == parent {
                    continue;
                }
                if disc[y] == usize::MAX {
                    disc[y] = time;
                    low[y] = time;
                    time += 1;
                    stack.push((y, x, 0));
                } else {
                    low[x] = low[x].min(disc[y]);
                }
            } else {
                stack.pop();
                if parent != usize::MAX {
                    low[parent] = low[parent].min(low[x]);
                    if low[x] > disc[parent] {
                        out.push((parent.min(x), parent.max(x)));
                    }
                }
            }
        }
    }
    out.sort_unstable();
    EdgeSet(out)
}

/// A connected piece of an ambient graph, in global vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Piece {
    pub vertices: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
}

impl Piece {
    /// The piece as a rooted graph on local ids (sorted global order), rooted at its minimum vertex.
    pub fn to_rooted(&self) -> RootedGraph {
        let local = |x: usize| self.vertices.binary_search(&x).expect("edge endpoint in piece");
        let pairs: Vec<_> = self.edges.iter().map(|&(a, b)| (local(a), local(b))).collect();
        RootedGraph::new(self.vertices.len(), 0, &pairs).expect("pieces are connected")
    }
}

#[derive(Clone, Debug)]
pub struct Decomposition {
    /// Components of the bridge subgraph (vertices without bridges are in none).
    pub bridging_trees: Vec<Piece>,
    /// Components of the non-bridge subgraph.
    pub blocks: Vec<Piece>,
    /// Per vertex: lies in a bridging-tree and has a neighbor outside it.
    pub internal_boundary: Vec<bool>,
    /// Per vertex: index of its bridging-tree, if any.
    pub tree_of: Vec<Option<usize>>,
}

fn edge_components(n: usize, edges: &[(usize, usize)]) -> (Vec<Piece>, Vec<Option<usize>>) {
    let g = Graph::from_edges(n, edges.iter().copied()).expect("valid edges");
    let mut which = vec![None; n];
    let mut pieces = Vec::new();
    for comp in g.components() {
        if comp.len() < 2 {
            continue;
        }
        let id = pieces.len();
        let mut pe = Vec::new();
        for &x in &comp {
            which[x] = Some(id);
            for &y in g.neighbors(x) {
                if x < y {
                    pe.push((x, y));
                }
            }
        }
        pe.sort_unstable();
        pieces.push(Piece { vertices: comp, edges: pe });
    }
    (pieces, which)
}

pub fn bridging_trees_and_blocks(g: &Graph) -> Decomposition {
    let n = g.n();
    let br = bridges(g);
    let rest: Vec<_> = g.edges().filter(|&(a, b)| !br.contains(a, b)).collect();
    let (bridging_trees, tree_of) = edge_components(n, br.as_slice());
    let (blocks, block_of) = edge_components(n, &rest);
    let internal_boundary = (0..n).map(|v| tree_of[v].is_some() && block_of[v].is_some()).collect();
    Decomposition { bridging_trees, blocks, internal_boundary, tree_of }
}

pub const DEFAULT_ARM_BUDGET: usize = 1_000_000;

/// Two paths of length `r` from `v` meeting only at `v`.
pub fn has_two_r_arms(g: &Graph, v: usize, r: usize) -> Result<bool> {
    has_two_r_arms_with_budget(g, v, r, DEFAULT_ARM_BUDGET)
}

pub fn has_two_r_arms_with_budget(g: &Graph, v: usize, r: usize, budget: usize) -> Result<bool> {
    if r == 0 {
        return Err(Error::InvalidParameter("arm length must be at least 1".into()));
    }
    let (nb, globals) = Explorer::new(g.n()).neighborhood(g, v, r);
    let mut search = ArmSearch { g: &nb, used: vec![false; globals.len()], r, nodes: 0, budget };
    search.used[0] = true;
    search.first(0, 0)
}

struct ArmSearch<'a> {
    g: &'a RootedGraph,
    used: Vec<bool>,
    r: usize,
    nodes: usize,
    budget: usize,
}

impl ArmSearch<'_> {
    fn tick(&mut self) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExhausted(self.budget));
        }
        Ok(())
    }

    /// Extends the first arm; on completion looks for a disjoint second arm.
    fn first(&mut self, x: usize, len: usize) -> Result<bool> {
        self.tick()?;
        if len == self.r {
            return self.second(0, 0);
        }
        for &y in self.g.neighbors(x) {
            if !self.used[y] {
                self.used[y] = true;
                let found = self.first(y, len + 1)?;
                self.used[y] = false;
                if found {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    fn second(&mut self, x: usize, len: usize) -> Result<bool> {
        self.tick()?;
        if len == self.r {
            return Ok(true);
        }
        for &y in self.g.neighbors(x) {
            if !self.used[y] {
                self.used[y] = true;
                let found = self.second(y, len + 1)?;
                self.used[y] = false;
                if found {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i))).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
    }

    #[test]
    fn adjacency_is_sorted_and_symmetric() {
        let g = Graph::from_edges(5, [(3, 1), (0, 4), (1, 0), (4, 3), (1, 3)]).unwrap();
        assert_eq!(g.edge_count(), 4);
        for v in 0..5 {
            assert!(g.neighbors(v).windows(2).all(|w| w[0] < w[1]));
            for &u in g.neighbors(v) {
                assert!(g.has_edge(u, v));
            }
        }
        assert!(Graph::from_edges(3, [(1, 1)]).is_err());
        assert!(Graph::from_edges(3, [(1, 3)]).is_err());
    }

    #[test]
    fn er_edge_cases() {
        assert!(generate_er(0, 1.0, 1).is_err());
        assert!(generate_er(5, f64::NAN, 1).is_err());
        assert!(generate_er(5, f64::INFINITY, 1).is_err());
        for seed in 0..20 {
            assert!(generate_er(2, 1.3, seed).unwrap().graph.edge_count() <= 1);
        }
        let k5 = generate_er(5, 5.0, 3).unwrap();
        assert_eq!(k5.graph.edge_count(), 10);
        let k5 = generate_er(5, 7.5, 3).unwrap();
        assert!(k5.clamped);
        assert_eq!(k5.graph.edge_count(), 10);
        assert!(!generate_er(100, 1.0, 3).unwrap().clamped);
    }

    #[test]
    fn er_is_reproducible() {
        for n in [50, 20_000] {
            let a = generate_er(n, 1.0, 42).unwrap().graph;
            let b = generate_er(n, 1.0, 42).unwrap().graph;
            let c = generate_er(n, 1.0, 43).unwrap().graph;
            assert_eq!(a, b);
            assert_ne!(a, c);
        }
    }

    #[test]
    fn skipping_sampler_mean_edge_count() {
        // E = C(n,2) * p, sd ≈ sqrt(E); average of 10 graphs within 4 sd of the mean.
        let n = 20_000usize;
        let mean = (n * (n - 1) / 2) as f64 * 1.5 / n as f64;
        let total: usize = (0..10).map(|s| generate_er(n, 1.5, s).unwrap().graph.edge_count()).sum();
        let avg = total as f64 / 10.0;
        assert!((avg - mean).abs() < 4.0 * (mean / 10.0).sqrt(), "avg {avg} mean {mean}");
    }

    #[test]
    fn neighborhood_examples() {
        let g = path(3);
        let n0 = neighborhood(&g, 1, 0);
        assert_eq!((n0.len(), n0.edge_count()), (1, 0));
        let n1 = neighborhood(&g, 1, 1);
        assert_eq!((n1.len(), n1.edge_count()), (3, 2));
        // triangle a=0,b=1,c=2 with pendant d=3 on a
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (0, 2), (0, 3)]).unwrap();
        let n = neighborhood(&g, 0, 1);
        assert_eq!((n.len(), n.edge_count()), (4, 4));
    }

    #[test]
    fn component_matches_full_neighborhood() {
        let g = Graph::from_edges(9, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (6, 7)]).unwrap();
        let c = component(&g, 2);
        assert_eq!((c.len(), c.edge_count()), (5, 5));
        assert_eq!(component(&g, 5).len(), 1);
        for v in 0..9 {
            let a = component(&g, v);
            let b = neighborhood(&g, v, 9);
            assert_eq!(a.edges(), b.edges());
        }
    }

    #[test]
    fn bridge_examples() {
        assert_eq!(bridges(&path(6)).len(), 5);
        assert!(bridges(&cycle(6)).is_empty());
        // theta: 0 and 1 joined through 2, 3, 4
        let theta = Graph::from_edges(5, [(0, 2), (2, 1), (0, 3), (3, 1), (0, 4), (4, 1)]).unwrap();
        assert!(bridges(&theta).is_empty());
    }

    fn lollipop() -> Graph {
        // triangle 0,1,2 with path 0-3-4-5
        Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (0, 3), (3, 4), (4, 5)]).unwrap()
    }

    #[test]
    fn decomposition_examples() {
        let d = bridging_trees_and_blocks(&path(5));
        assert_eq!((d.bridging_trees.len(), d.blocks.len()), (1, 0));
        let d = bridging_trees_and_blocks(&cycle(5));
        assert_eq!((d.bridging_trees.len(), d.blocks.len()), (0, 1));
        let d = bridging_trees_and_blocks(&lollipop());
        assert_eq!(d.blocks.len(), 1);
        assert_eq!(d.blocks[0].vertices, vec![0, 1, 2]);
        assert_eq!(d.bridging_trees.len(), 1);
        assert_eq!(d.bridging_trees[0].vertices, vec![0, 3, 4, 5]);
        let flagged: Vec<_> = (0..6).filter(|&v| d.internal_boundary[v]).collect();
        assert_eq!(flagged, vec![0]);
    }

    #[test]
    fn arm_examples() {
        for r in 1..5 {
            assert!(has_two_r_arms(&path(2 * r + 1), r, r).unwrap());
            assert!(!has_two_r_arms(&path(2 * r + 1), r + 1, r).unwrap());
            let c = cycle(2 * r + 1);
            assert!((0..2 * r + 1).all(|v| has_two_r_arms(&c, v, r).unwrap()));
        }
        let star = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(!has_two_r_arms(&star, 0, 2).unwrap());
        assert!(has_two_r_arms(&star, 0, 1).unwrap());
        // even cycle of length 2r: the two arms would share the antipode
        assert!(!has_two_r_arms(&cycle(6), 0, 3).unwrap());
        assert!(matches!(has_two_r_arms_with_budget(&cycle(9), 0, 4, 3), Err(Error::BudgetExhausted(3))));
    }

    #[test]
    fn degeneracy() {
        let g = Graph::empty(3);
        assert!(is_degenerate(&g, 1, 1));
        let p = path(4);
        assert!(!is_degenerate(&p, 0, 3));
        assert!(is_degenerate(&p, 0, 4));
        assert!(is_degenerate(&p, 1, 3));
    }
}
