//! Per-instance correctness conditions for reconstruction: admissibility,
//! strong admissibility, and the two-source reduced breadth-first search with
//! its statistics.

use crate::error::{Error, Result};
use crate::graph::{bridges, has_two_r_arms_with_budget, Explorer, Graph, DEFAULT_ARM_BUDGET};
use crate::pgw::{self, GwParams};
use crate::reconstruct::{
    bad_component_families, build_profile, classify_good, dedup_families, good_depth, preprocess_degenerate, psi_code,
    Goodness,
};
use crate::rooted::{canon_rooted_graph_with, CanonCode, CanonConfig, Profile, RootedTree};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap, HashSet};

/// Search tree of one side: `vertices[i]` has parent `vertices[parent[i]]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutTree {
    pub vertices: Vec<usize>,
    pub parent: Vec<Option<usize>>,
    pub level: Vec<usize>,
}

impl CutTree {
    pub fn tree(&self) -> RootedTree {
        RootedTree::from_parents(&self.parent).expect("search tree")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedBfsTrace {
    pub u: usize,
    pub v: usize,
    pub r: usize,
    /// `A_t(u)` for `t = 0..=r`, each sorted.
    pub active_u: Vec<Vec<usize>>,
    pub active_v: Vec<Vec<usize>>,
    /// `R_t` for `t = 0..=r` (`R_0` is empty).
    pub removed: Vec<Vec<usize>>,
    pub cut_u: CutTree,
    pub cut_v: CutTree,
    /// Edges `(y, w)` with `y` in `A_t(u)` and `w` in `R_{t+1}`.
    pub grafts_u: Vec<(usize, usize)>,
    pub grafts_v: Vec<(usize, usize)>,
}

impl ReducedBfsTrace {
    pub fn active_le(&self, side_u: bool) -> Vec<usize> {
        let a = if side_u { &self.active_u } else { &self.active_v };
        a.iter().flatten().copied().collect()
    }

    pub fn removed_le(&self) -> Vec<usize> {
        self.removed.iter().flatten().copied().collect()
    }
}

/// Simultaneous search from `u` and `v` in which vertices reached from both
/// sides in the same step are removed instead of explored.
pub fn reduced_bfs(g: &Graph, u: usize, v: usize, r: usize) -> Result<ReducedBfsTrace> {
    if u == v || u >= g.n() || v >= g.n() {
        return Err(Error::InvalidParameter(format!("need distinct vertices below {}, got {u} and {v}", g.n())));
    }
    // 0 unexplored, 1 active/explored for u, 2 for v, 3 removed
    let mut state = vec![0u8; g.n()];
    state[u] = 1;
    state[v] = 2;
    let mut active_u = vec![vec![u]];
    let mut active_v = vec![vec![v]];
    let mut removed = vec![Vec::new()];
    let mut cut_u = CutTree { vertices: vec![u], parent: vec![None], level: vec![0] };
    let mut cut_v = CutTree { vertices: vec![v], parent: vec![None], level: vec![0] };
    let mut index: HashMap<usize, usize> = HashMap::from([(u, 0), (v, 0)]);
    let (mut grafts_u, mut grafts_v) = (Vec::new(), Vec::new());
    for t in 0..r {
        let (au, av) = (&active_u[t], &active_v[t]);
        if au.is_empty() && av.is_empty() {
            break;
        }
        let reach = |a: &[usize]| -> HashSet<usize> {
            a.iter().flat_map(|&x| g.neighbors(x).iter().copied()).filter(|&w| state[w] == 0).collect()
        };
        let (hu, hv) = (reach(au), reach(av));
        let mut rt: Vec<usize> = hu.intersection(&hv).copied().collect();
        let mut nu: Vec<usize> = hu.difference(&hv).copied().collect();
        let mut nv: Vec<usize> = hv.difference(&hu).copied().collect();
        rt.sort_unstable();
        nu.sort_unstable();
        nv.sort_unstable();
        for (a, next, cut, grafts) in [(au, &nu, &mut cut_u, &mut grafts_u), (av, &nv, &mut cut_v, &mut grafts_v)] {
            // parent of a new vertex is its least neighbor in the current level
            for &y in next {
                let p = *a.iter().find(|&&x| g.has_edge(x, y)).unwrap();
                index.insert(y, cut.vertices.len());
                cut.parent.push(Some(index[&p]));
                cut.vertices.push(y);
                cut.level.push(t + 1);
            }
            for &x in a {
                grafts.extend(rt.iter().filter(|&&w| g.has_edge(x, w)).map(|&w| (x, w)));
            }
        }
        for &w in &nu {
            state[w] = 1;
        }
        for &w in &nv {
            state[w] = 2;
        }
        for &w in &rt {
            state[w] = 3;
        }
        active_u.push(nu);
        active_v.push(nv);
        removed.push(rt);
    }
    while active_u.len() <= r {
        active_u.push(Vec::new());
        active_v.push(Vec::new());
        removed.push(Vec::new());
    }
    Ok(ReducedBfsTrace { u, v, r, active_u, active_v, removed, cut_u, cut_v, grafts_u, grafts_v })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct XiLambdaStats {
    pub xi1: usize,
    pub xi2: usize,
    pub lambda1_u: usize,
    pub lambda1_v: usize,
    pub lambda2_u: usize,
    pub lambda2_v: usize,
    pub lambda3: usize,
    pub r_removed: usize,
}

impl XiLambdaStats {
    pub fn xi(&self) -> usize {
        self.xi1 + self.xi2
    }

    pub fn lambda(&self) -> usize {
        self.lambda1_u + self.lambda1_v + self.lambda2_u + self.lambda2_v + self.lambda3
    }
}

fn ball(g: &Graph, v: usize, r: usize, ex: &mut Explorer) -> HashSet<usize> {
    ex.neighborhood(g, v, r).1.into_iter().collect()
}

fn count_into(g: &Graph, x: usize, set: &HashSet<usize>) -> usize {
    g.neighbors(x).iter().filter(|y| set.contains(y)).count()
}

pub fn xi_lambda_stats(g: &Graph, trace: &ReducedBfsTrace, r: usize) -> XiLambdaStats {
    let r = r.min(trace.r);
    let au_all: HashSet<usize> = trace.active_u[..=r].iter().flatten().copied().collect();
    let av_all: HashSet<usize> = trace.active_v[..=r].iter().flatten().copied().collect();
    let rem_all: HashSet<usize> = trace.removed[..=r].iter().flatten().copied().collect();
    let mut s = XiLambdaStats::default();
    for t in 0..=r {
        let av: HashSet<usize> = trace.active_v[t].iter().copied().collect();
        s.xi1 += trace.active_u[t].iter().map(|&x| count_into(g, x, &av)).sum::<usize>();
    }
    // U_t: vertices not yet reached at step t
    let mut reached: HashSet<usize> = HashSet::from([trace.u, trace.v]);
    for t in 0..r {
        let au: HashSet<usize> = trace.active_u[t].iter().copied().collect();
        let av: HashSet<usize> = trace.active_v[t].iter().copied().collect();
        let candidates: HashSet<usize> =
            au.iter().chain(&av).flat_map(|&x| g.neighbors(x).iter().copied()).filter(|w| !reached.contains(w)).collect();
        s.xi2 += candidates.iter().map(|&w| count_into(g, w, &au) * count_into(g, w, &av)).sum::<usize>();
        reached.extend(trace.active_u[t + 1].iter().chain(&trace.active_v[t + 1]).chain(&trace.removed[t + 1]));
    }
    s.r_removed = rem_all.len();
    let comp = |set: &HashSet<usize>| -> usize {
        let e: usize = set.iter().map(|&x| count_into(g, x, set)).sum::<usize>() / 2;
        (e + 1).saturating_sub(set.len())
    };
    s.lambda1_u = comp(&au_all);
    s.lambda1_v = comp(&av_all);
    let mut ex = Explorer::new(g.n());
    let removed_balls: Vec<HashSet<usize>> = rem_all.iter().map(|&w| ball(g, w, r, &mut ex)).collect();
    let mut lambda2 = |side: &[Vec<usize>], root: usize, all: &HashSet<usize>| -> usize {
        let mut total = 0;
        for t in 0..=r {
            let later: HashSet<usize> = side[t..=r].iter().flatten().copied().collect();
            total += trace.removed[t].iter().map(|&w| count_into(g, w, &later)).sum::<usize>();
        }
        let own = ball(g, root, r, &mut ex);
        for bw in &removed_balls {
            let target: HashSet<usize> = bw
                .iter()
                .filter(|y| own.contains(y) && !au_all.contains(y) && !av_all.contains(y) && !rem_all.contains(y))
                .copied()
                .collect();
            total += all.iter().map(|&x| count_into(g, x, &target)).sum::<usize>();
        }
        total
    };
    s.lambda2_u = lambda2(&trace.active_u, trace.u, &au_all);
    s.lambda2_v = lambda2(&trace.active_v, trace.v, &av_all);
    // two removed vertices joined outside the explored sets
    let nu = ball(g, trace.u, r, &mut ex);
    let nv = ball(g, trace.v, r, &mut ex);
    let allowed = |x: usize| (nu.contains(&x) || nv.contains(&x)) && !au_all.contains(&x) && !av_all.contains(&x);
    let edge_ok = |a: usize, b: usize| (nu.contains(&a) && nu.contains(&b)) || (nv.contains(&a) && nv.contains(&b));
    let mut seen: HashSet<usize> = HashSet::new();
    'outer: for &w in &rem_all {
        if seen.contains(&w) {
            continue;
        }
        seen.insert(w);
        let mut stack = vec![w];
        while let Some(x) = stack.pop() {
            for &y in g.neighbors(x) {
                if allowed(y) && edge_ok(x, y) && seen.insert(y) {
                    if rem_all.contains(&y) {
                        s.lambda3 = 1;
                        break 'outer;
                    }
                    stack.push(y);
                }
            }
        }
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AuxNode {
    /// A vertex of the cut tree.
    Cut(usize),
    /// Copy of a removed vertex, root of a grafted tree.
    Graft(usize),
    /// Other grafted vertices.
    Infinity,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxTree {
    pub nodes: Vec<AuxNode>,
    pub parent: Vec<Option<usize>>,
}

impl AuxTree {
    pub fn tree(&self) -> RootedTree {
        RootedTree::from_parents(&self.parent).expect("auxiliary tree")
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Deletes every grafted subtree, giving back the cut tree's vertices and parents.
    pub fn strip(&self) -> CutTree {
        let mut out = CutTree { vertices: Vec::new(), parent: Vec::new(), level: Vec::new() };
        let mut map = HashMap::new();
        for (i, node) in self.nodes.iter().enumerate() {
            if let AuxNode::Cut(x) = node {
                let p = self.parent[i].map(|p| map[&p]);
                map.insert(i, out.vertices.len());
                out.level.push(p.map_or(0, |p: usize| out.level[p] + 1));
                out.vertices.push(*x);
                out.parent.push(p);
            }
        }
        out
    }
}

fn graft<R: Rng + ?Sized>(cut: &CutTree, grafts: &[(usize, usize)], params: &GwParams, rng: &mut R) -> AuxTree {
    let mut nodes: Vec<AuxNode> = cut.vertices.iter().map(|&x| AuxNode::Cut(x)).collect();
    let mut parent = cut.parent.clone();
    let index: HashMap<usize, usize> = cut.vertices.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    for &(y, w) in grafts {
        let t = pgw::sample(params, rng).tree;
        let base = nodes.len();
        for k in 0..t.len() {
            nodes.push(if k == 0 { AuxNode::Graft(w) } else { AuxNode::Infinity });
            parent.push(Some(t.parent(k).map_or(index[&y], |p| base + p)));
        }
    }
    AuxTree { nodes, parent }
}

/// Enlarges both cut trees by grafting an independent tree at a copy of
/// every removed vertex adjacent to a cut-tree vertex, in trace order.
pub fn build_aux_tree<R: Rng + ?Sized>(trace: &ReducedBfsTrace, params: &GwParams, rng: &mut R) -> Result<(AuxTree, AuxTree)> {
    params.validate()?;
    let a = graft(&trace.cut_u, &trace.grafts_u, params, rng);
    let b = graft(&trace.cut_v, &trace.grafts_v, params, rng);
    Ok((a, b))
}

/// Vertices of components that contain no degenerate vertex.
pub fn nondegenerate_vertices(g: &Graph, r: usize) -> Vec<usize> {
    let mut ex = Explorer::new(g.n());
    let mut out: Vec<usize> = g
        .components()
        .into_iter()
        .filter(|c| c.iter().all(|&v| !ex.is_degenerate(g, v, r)))
        .flatten()
        .collect();
    out.sort_unstable();
    out
}

/// Goodness of the vertices of the non-degenerate components, indexed by vertex (`None` outside).
fn ground_goodness(g: &Graph, r: usize, rho: f64, cfg: &CanonConfig) -> Result<(Goodness, Vec<Option<usize>>)> {
    let s = good_depth(r, rho)?;
    let kept = nondegenerate_vertices(g, r);
    let mut ex = Explorer::new(g.n());
    let codes = kept.iter().map(|&v| canon_rooted_graph_with(&ex.neighborhood(g, v, s).0, cfg)).collect::<Result<_>>()?;
    let mut pos = vec![None; g.n()];
    for (i, &v) in kept.iter().enumerate() {
        pos[v] = Some(i);
    }
    Ok((Goodness::from_codes(s, codes), pos))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    pub good: usize,
    pub bad: usize,
    /// Codes of `D(C)` over the true bad components.
    pub ground_truth: Profile,
    /// Codes of the deduplicated records recovered from the profile.
    pub recovered: Profile,
    pub differences: Vec<(CanonCode, usize, usize)>,
}

/// Compares the bad-component codes of `g` with those the reconstruction would recover.
pub fn check_admissibility(g: &Graph, r: usize, rho: f64, cfg: &CanonConfig) -> Result<AdmissibilityReport> {
    let (goodness, pos) = ground_goodness(g, r, rho, cfg)?;
    let is_bad = |v: usize| pos[v].is_some_and(|i| !goodness.good[i]);
    let mut ground = Profile::default();
    let mut seen = vec![false; g.n()];
    for start in 0..g.n() {
        if seen[start] || !is_bad(start) {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut head = 0;
        let mut boundary: BTreeMap<usize, usize> = BTreeMap::new();
        while head < comp.len() {
            let x = comp[head];
            head += 1;
            for &y in g.neighbors(x) {
                if is_bad(y) {
                    if !seen[y] {
                        seen[y] = true;
                        comp.push(y);
                    }
                } else {
                    let l = goodness.label(&goodness.codes[pos[y].unwrap()]).unwrap();
                    boundary.insert(l, y);
                }
            }
        }
        let interior = comp.len();
        let mut id: HashMap<usize, usize> = comp.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        for (j, &y) in boundary.values().enumerate() {
            id.insert(y, interior + j);
        }
        let mut edges = Vec::new();
        for (i, &x) in comp.iter().enumerate() {
            for y in g.neighbors(x) {
                let j = id[y];
                if j >= interior || i < j {
                    edges.push((i, j));
                }
            }
        }
        let labels: Vec<usize> = boundary.keys().copied().collect();
        ground.insert(psi_code(interior, &labels, &edges, cfg)?);
    }
    let p = build_profile(g, r, rho)?;
    let (kept, _) = preprocess_degenerate(&p, cfg)?;
    let pg = classify_good(&kept, cfg)?;
    let recovered: Profile = dedup_families(&bad_component_families(&kept, &pg, cfg)?).into_iter().map(|d| d.d_code).collect();
    let differences = ground.difference(&recovered);
    Ok(AdmissibilityReport {
        admissible: differences.is_empty(),
        good: goodness.good_count(),
        bad: goodness.good.iter().filter(|&&b| !b).count(),
        ground_truth: ground,
        recovered,
        differences,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrongAdmissibilityReport {
    pub condition1_ok: bool,
    pub condition2_ok: bool,
    /// A search exceeded its budget; counted as a failure.
    pub indeterminate: bool,
    pub strongly_admissible: bool,
    /// Bad vertices violating the cycle/tree condition.
    pub condition1_witnesses: Vec<usize>,
    /// Vertices on short cycles in components with too many of them.
    pub condition2_witnesses: Vec<usize>,
    pub log_r: usize,
}

pub const DEFAULT_CYCLE_BUDGET: usize = 1_000_000;

/// Simple cycles through `v` inside `ball`, stopping after `limit`; each cycle is
/// returned once as a vertex sequence starting at `v`.
fn cycles_through(
    g: &Graph,
    v: usize,
    inside: &HashSet<usize>,
    max_len: usize,
    limit: usize,
    budget: &mut usize,
) -> Result<Vec<Vec<usize>>> {
    fn go(
        g: &Graph,
        inside: &HashSet<usize>,
        path: &mut Vec<usize>,
        on: &mut HashSet<usize>,
        max_len: usize,
        limit: usize,
        budget: &mut usize,
        out: &mut Vec<Vec<usize>>,
    ) -> Result<()> {
        if *budget == 0 {
            return Err(Error::BudgetExhausted(DEFAULT_CYCLE_BUDGET));
        }
        *budget -= 1;
        let x = *path.last().unwrap();
        for &y in g.neighbors(x) {
            if out.len() >= limit {
                return Ok(());
            }
            if y == path[0] && path.len() >= 3 && path[1] < x {
                out.push(path.clone());
            } else if !on.contains(&y) && inside.contains(&y) && path.len() < max_len {
                path.push(y);
                on.insert(y);
                go(g, inside, path, on, max_len, limit, budget, out)?;
                on.remove(&y);
                path.pop();
            }
        }
        Ok(())
    }
    let mut out = Vec::new();
    let mut path = vec![v];
    let mut on = HashSet::from([v]);
    go(g, inside, &mut path, &mut on, max_len, limit, budget, &mut out)?;
    Ok(out)
}

/// Checks the bridging-tree clause: the component of `v` after deleting the
/// cycle's edges consists of bridges, has height at most `l` from `v`, and only
/// `v` touches anything outside it.
fn tree_clause(g: &Graph, v: usize, cycle: &[usize], br: &crate::graph::EdgeSet, l: usize) -> bool {
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let on_cycle: HashSet<(usize, usize)> = (0..cycle.len()).map(|i| key(cycle[i], cycle[(i + 1) % cycle.len()])).collect();
    let mut depth: HashMap<usize, usize> = HashMap::from([(v, 0)]);
    let mut queue = std::collections::VecDeque::from([v]);
    while let Some(x) = queue.pop_front() {
        for &y in g.neighbors(x) {
            if on_cycle.contains(&key(x, y)) {
                if x != v {
                    return false;
                }
                continue;
            }
            if !br.contains(x, y) {
                return false;
            }
            if !depth.contains_key(&y) {
                let d = depth[&x] + 1;
                if d > l {
                    return false;
                }
                depth.insert(y, d);
                queue.push_back(y);
            }
        }
    }
    true
}

/// Strong admissibility, evaluated over the non-degenerate components with
/// goodness taken among their vertices. `log r` is the natural log rounded down.
pub fn check_strong_admissibility(
    g: &Graph,
    r: usize,
    rho: f64,
    l: usize,
    cfg: &CanonConfig,
) -> Result<StrongAdmissibilityReport> {
    let s = good_depth(r, rho)?;
    let (goodness, pos) = ground_goodness(g, r, rho, cfg)?;
    let br = bridges(g);
    let mut ex = Explorer::new(g.n());
    let mut indeterminate = false;
    let mut w1 = Vec::new();
    for v in 0..g.n() {
        if !pos[v].is_some_and(|i| !goodness.good[i]) {
            continue;
        }
        let inside = ball(g, v, s, &mut ex);
        let mut budget = DEFAULT_CYCLE_BUDGET;
        let cycles = match cycles_through(g, v, &inside, usize::MAX, 2, &mut budget) {
            Ok(c) => c,
            Err(_) => {
                indeterminate = true;
                w1.push(v);
                continue;
            }
        };
        let arms = match has_two_r_arms_with_budget(g, v, s, DEFAULT_ARM_BUDGET) {
            Ok(a) => a,
            Err(_) => {
                indeterminate = true;
                w1.push(v);
                continue;
            }
        };
        if !arms && cycles.is_empty() {
            continue;
        }
        let ok = cycles.len() == 1 && cycles[0].len() <= l && tree_clause(g, v, &cycles[0], &br, l);
        if !ok {
            w1.push(v);
        }
    }
    let log_r = (r as f64).ln().floor() as usize;
    let mut w2 = Vec::new();
    let kept: HashSet<usize> = (0..g.n()).filter(|&v| pos[v].is_some()).collect();
    for comp in g.components() {
        if !kept.contains(&comp[0]) || l < 4 {
            continue;
        }
        let inside: HashSet<usize> = comp.iter().copied().collect();
        let mut short = Vec::new();
        for &x in &comp {
            if g.neighbors(x).iter().all(|&y| br.contains(x, y)) {
                continue;
            }
            let mut budget = DEFAULT_CYCLE_BUDGET;
            match cycles_through(g, x, &inside, l - 1, 1, &mut budget) {
                Ok(c) if !c.is_empty() => short.push(x),
                Ok(_) => {}
                Err(_) => {
                    indeterminate = true;
                    short.push(x);
                }
            }
        }
        if short.len() > log_r {
            w2.extend(short);
        }
    }
    let condition1_ok = w1.is_empty();
    let condition2_ok = w2.is_empty();
    Ok(StrongAdmissibilityReport {
        condition1_ok,
        condition2_ok,
        indeterminate,
        strongly_admissible: condition1_ok && condition2_ok && !indeterminate,
        condition1_witnesses: w1,
        condition2_witnesses: w2,
        log_r,
    })
}

/// Distribution of `Xi` over pairs with isomorphic surviving `(r+1)`-neighborhoods.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct XiFrequency {
    pub pairs: usize,
    /// `histogram[k]` counts pairs with `Xi = k`; the last bucket collects larger values.
    pub histogram: Vec<usize>,
    pub lambda_zero: usize,
}

impl XiFrequency {
    pub fn fraction_above_two(&self) -> f64 {
        if self.pairs == 0 {
            return 0.0;
        }
        self.histogram.iter().skip(3).sum::<usize>() as f64 / self.pairs as f64
    }
}

pub fn xi_frequency(g: &Graph, r: usize, cfg: &CanonConfig, max_pairs: usize) -> Result<XiFrequency> {
    let mut ex = Explorer::new(g.n());
    let mut classes: BTreeMap<CanonCode, Vec<usize>> = BTreeMap::new();
    for v in 0..g.n() {
        if ex.is_degenerate(g, v, r) {
            continue;
        }
        classes.entry(canon_rooted_graph_with(&ex.neighborhood(g, v, r + 1).0, cfg)?).or_default().push(v);
    }
    let mut out = XiFrequency { histogram: vec![0; 6], ..Default::default() };
    'done: for members in classes.values() {
        for (i, &u) in members.iter().enumerate() {
            for &v in &members[i + 1..] {
                if out.pairs >= max_pairs {
                    break 'done;
                }
                let st = xi_lambda_stats(g, &reduced_bfs(g, u, v, r)?, r);
                out.pairs += 1;
                out.histogram[st.xi().min(5)] += 1;
                if st.lambda() == 0 {
                    out.lambda_zero += 1;
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn fixture() -> Graph {
        Graph::from_edges(6, [(0, 1), (0, 2), (1, 3), (2, 4), (3, 4), (4, 5)]).unwrap()
    }

    #[test]
    fn pinned_trace() {
        let g = fixture();
        let tr = reduced_bfs(&g, 0, 1, 3).unwrap();
        assert_eq!(tr.active_u, vec![vec![0], vec![2], vec![], vec![]]);
        assert_eq!(tr.active_v, vec![vec![1], vec![3], vec![], vec![]]);
        assert_eq!(tr.removed, vec![vec![], vec![], vec![4], vec![]]);
        assert_eq!(tr.grafts_u, vec![(2, 4)]);
        assert_eq!(tr.grafts_v, vec![(3, 4)]);
        assert_eq!(tr.cut_u.vertices, vec![0, 2]);
        assert_eq!(tr.cut_u.parent, vec![None, Some(0)]);
        let st = xi_lambda_stats(&g, &tr, 3);
        assert_eq!(
            st,
            XiLambdaStats { xi1: 1, xi2: 1, lambda1_u: 0, lambda1_v: 0, lambda2_u: 0, lambda2_v: 0, lambda3: 0, r_removed: 1 }
        );
    }

    #[test]
    fn far_apart_is_plain_bfs() {
        let g = Graph::from_edges(8, [(0, 1), (1, 2), (1, 3), (4, 5), (5, 6), (6, 7)]).unwrap();
        let tr = reduced_bfs(&g, 0, 4, 3).unwrap();
        assert!(tr.removed.iter().all(Vec::is_empty));
        assert_eq!(tr.cut_u.vertices, vec![0, 1, 2, 3]);
        assert_eq!(tr.cut_v.vertices, vec![4, 5, 6, 7]);
        assert_eq!(xi_lambda_stats(&g, &tr, 3), XiLambdaStats::default());
        let mut rng = stream(1, 0);
        let (a, b) = build_aux_tree(&tr, &GwParams::binomial(8, 1.0), &mut rng).unwrap();
        assert_eq!(a.strip(), tr.cut_u);
        assert_eq!(b.len(), tr.cut_v.vertices.len());
    }

    #[test]
    fn grafting_accounting() {
        let g = fixture();
        let tr = reduced_bfs(&g, 0, 1, 3).unwrap();
        let params = GwParams::binomial(6, 1.0);
        let mut rng = stream(9, 0);
        let (a, b) = build_aux_tree(&tr, &params, &mut rng).unwrap();
        let mut rng = stream(9, 0);
        let t1 = pgw::sample(&params, &mut rng).tree.len();
        let t2 = pgw::sample(&params, &mut rng).tree.len();
        assert_eq!(a.len(), 2 + t1);
        assert_eq!(b.len(), 2 + t2);
        assert_eq!(a.strip(), tr.cut_u);
        assert_eq!(b.strip(), tr.cut_v);
        assert_eq!(a.nodes[2], AuxNode::Graft(4));
        assert_eq!(a.parent[2], Some(1));
        assert_eq!(a.tree().len(), a.len());
    }

    #[test]
    fn swap_symmetry() {
        let g = crate::graph::generate_er(40, 2.0, 5).unwrap().graph;
        for (u, v) in [(0, 1), (3, 17), (5, 30)] {
            let a = reduced_bfs(&g, u, v, 4).unwrap();
            let b = reduced_bfs(&g, v, u, 4).unwrap();
            assert_eq!(a.active_u, b.active_v);
            assert_eq!(a.removed, b.removed);
            assert_eq!(a.cut_u, b.cut_v);
            let (sa, sb) = (xi_lambda_stats(&g, &a, 4), xi_lambda_stats(&g, &b, 4));
            assert_eq!((sa.xi1, sa.xi2, sa.lambda3), (sb.xi1, sb.xi2, sb.lambda3));
            assert_eq!((sa.lambda1_u, sa.lambda2_u), (sb.lambda1_v, sb.lambda2_v));
        }
    }

    #[test]
    fn rejects_equal_roots() {
        assert!(reduced_bfs(&fixture(), 2, 2, 3).is_err());
    }

    #[test]
    fn tree_strongly_admissible() {
        // long path: bad vertices come in mirror pairs, no cycles
        let g = Graph::from_edges(20, (1..20).map(|i| (i - 1, i))).unwrap();
        let rep = check_strong_admissibility(&g, 5, 0.6, 3, &CanonConfig::default()).unwrap();
        assert_eq!(rep.condition2_witnesses, Vec::<usize>::new());
        assert!(rep.condition2_ok);
    }

    #[test]
    fn triangle_depends_on_l() {
        // two copies of a triangle with long tails on two corners; every vertex
        // has a twin, so all are bad, and the bare corner (2) has a trivial tree
        let mut e = Vec::new();
        let mut next = 0;
        for _ in 0..2 {
            let base = next;
            e.extend([(base, base + 1), (base + 1, base + 2), (base + 2, base)]);
            next += 3;
            for root in [base, base + 1] {
                let mut prev = root;
                for _ in 0..8 {
                    e.push((prev, next));
                    prev = next;
                    next += 1;
                }
            }
        }
        let g = Graph::from_edges(next, e).unwrap();
        let cfg = CanonConfig::default();
        let (gd, pos) = ground_goodness(&g, 6, 0.5, &cfg).unwrap();
        assert!(!gd.good[pos[2].unwrap()]);
        let strict = check_strong_admissibility(&g, 6, 0.5, 2, &cfg).unwrap();
        let loose = check_strong_admissibility(&g, 6, 0.5, 3, &cfg).unwrap();
        assert!(strict.condition1_witnesses.contains(&2));
        assert!(!loose.condition1_witnesses.contains(&2));
        // the tailed corners have trees of height 8
        assert!(loose.condition1_witnesses.contains(&0));
    }

    #[test]
    fn bowtie_fails() {
        // two triangles sharing vertex 0, embedded symmetrically so 0 is bad
        // through a mirrored twin elsewhere
        let bow = [(0, 1), (1, 2), (2, 0), (0, 3), (3, 4), (4, 0)];
        let mut e: Vec<(usize, usize)> = bow.to_vec();
        e.extend(bow.iter().map(|&(a, b)| (a + 5, b + 5)));
        // long tails keep both copies non-degenerate
        let mut next = 10;
        for root in [1, 6] {
            let mut prev = root;
            for _ in 0..10 {
                e.push((prev, next));
                prev = next;
                next += 1;
            }
        }
        let g = Graph::from_edges(next, e).unwrap();
        let rep = check_strong_admissibility(&g, 5, 0.4, 5, &CanonConfig::default()).unwrap();
        assert!(rep.condition1_witnesses.contains(&0));
        assert!(rep.condition1_witnesses.contains(&5));
        assert!(!rep.strongly_admissible);
    }

    #[test]
    fn admissibility_examples() {
        let cfg = CanonConfig::default();
        // every vertex degenerate: both sides empty
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        assert!(check_admissibility(&g, 5, 0.5, &cfg).unwrap().admissible);
        // a long cycle is all bad with no good boundary: never recovered
        let c = Graph::from_edges(30, (0..30).map(|i| (i, (i + 1) % 30))).unwrap();
        let rep = check_admissibility(&c, 6, 0.5, &cfg).unwrap();
        assert!(!rep.admissible);
        assert_eq!(rep.ground_truth.total(), 1);
        assert_eq!(rep.recovered.total(), 0);
    }

    #[test]
    fn long_bad_chain_is_invisible() {
        // goods of degree 3, 4, 5 with a chain of 4 bad vertices between the first two;
        // at r = 5, s = 1 neither end sees the other inside N_{r-1}
        let mut e = Vec::new();
        let mut next = 3;
        let mut prev = 0;
        for _ in 0..4 {
            e.push((prev, next));
            prev = next;
            next += 1;
        }
        e.push((prev, 1));
        e.extend([(1, next), (next, 2)]);
        next += 1;
        for (v, k) in [(0, 2), (1, 2), (2, 3)] {
            for _ in 0..k {
                e.push((v, next));
                next += 1;
            }
        }
        e.extend([(2, next), (next, next + 1), (next + 1, next + 2)]);
        let g = Graph::from_edges(next + 3, e).unwrap();
        let rep = check_admissibility(&g, 5, 0.2, &CanonConfig::default()).unwrap();
        assert!(!rep.admissible);
    }
}
