//! Recovery of a graph, up to isomorphism, from its multiset of depth-`r`
//! neighborhoods.
//!
//! Every decision is made from the neighborhood structures alone. Entries are
//! processed in order of their canonical codes, and good vertices are labeled by
//! their depth-`s` codes with `s = ceil(rho * r)`, so the ordering used for
//! deduplication is code order.

use crate::error::{Error, Result};
use crate::graph::{Explorer, Graph};
use crate::rooted::{
    canon_rooted_graph_with, canon_unrooted, component_codes, CanonCode, CanonConfig, RootedGraph,
};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

/// Depth at which goodness is decided, after checking `1 <= ceil(rho r) <= r - 2`.
pub fn good_depth(r: usize, rho: f64) -> Result<usize> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::InvalidParameter(format!("rho must lie in (0, 1), got {rho}")));
    }
    let s = (rho * r as f64 - 1e-9).ceil().max(0.0) as usize;
    if s < 1 || s + 2 > r {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= ceil(rho r) <= r - 2, got ceil({rho} * {r}) = {s}; raise r or lower rho"
        )));
    }
    Ok(s)
}

/// Original vertex ids, kept apart from the entries and never read by the pipeline.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AuditTable(Vec<usize>);

#[derive(Clone, Debug, PartialEq)]
pub struct NeighborhoodProfile {
    pub r: usize,
    pub rho: f64,
    entries: Vec<RootedGraph>,
    audit: AuditTable,
}

impl NeighborhoodProfile {
    pub fn new(r: usize, rho: f64, entries: Vec<RootedGraph>, audit_ids: Vec<usize>) -> Result<Self> {
        good_depth(r, rho)?;
        if audit_ids.len() != entries.len() {
            return Err(Error::InvalidParameter("one audit id per entry required".into()));
        }
        Ok(NeighborhoodProfile { r, rho, entries, audit: AuditTable(audit_ids) })
    }

    pub fn entries(&self) -> &[RootedGraph] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn audit_ids(&self) -> &[usize] {
        &self.audit.0
    }

    pub fn with_audit_ids(mut self, ids: Vec<usize>) -> Result<Self> {
        if ids.len() != self.entries.len() {
            return Err(Error::InvalidParameter("one audit id per entry required".into()));
        }
        self.audit = AuditTable(ids);
        Ok(self)
    }

    fn subset(&self, keep: &[usize]) -> Self {
        NeighborhoodProfile {
            r: self.r,
            rho: self.rho,
            entries: keep.iter().map(|&i| self.entries[i].clone()).collect(),
            audit: AuditTable(keep.iter().map(|&i| self.audit.0[i]).collect()),
        }
    }
}

pub fn build_profile(g: &Graph, r: usize, rho: f64) -> Result<NeighborhoodProfile> {
    good_depth(r, rho)?;
    let mut ex = Explorer::new(g.n());
    let entries = (0..g.n()).map(|v| ex.neighborhood(g, v, r).0).collect();
    NeighborhoodProfile::new(r, rho, entries, (0..g.n()).collect())
}

fn entry_codes(p: &NeighborhoodProfile, cfg: &CanonConfig) -> Result<Vec<CanonCode>> {
    p.entries.iter().map(|e| canon_rooted_graph_with(e, cfg)).collect()
}

/// Removes the components of degenerate roots together with a matching
/// multiset of entries, returning the remaining profile and the components.
pub fn preprocess_degenerate(
    p: &NeighborhoodProfile,
    cfg: &CanonConfig,
) -> Result<(NeighborhoodProfile, Vec<RootedGraph>)> {
    let r = p.r;
    let codes = entry_codes(p, cfg)?;
    let mut remaining: BTreeMap<CanonCode, VecDeque<usize>> = BTreeMap::new();
    for (i, c) in codes.iter().enumerate() {
        remaining.entry(c.clone()).or_default().push_back(i);
    }
    let degenerate: Vec<CanonCode> =
        remaining.iter().filter(|(_, ix)| p.entries[ix[0]].is_degenerate(r)).map(|(c, _)| c.clone()).collect();
    let mut components = Vec::new();
    for code in degenerate {
        while let Some(&i) = remaining.get(&code).and_then(|ix| ix.front()) {
            let comp = p.entries[i].clone();
            let mut need: BTreeMap<CanonCode, usize> = BTreeMap::new();
            for u in 0..comp.len() {
                *need.entry(canon_rooted_graph_with(&comp.reroot(u).restrict(r), cfg)?).or_insert(0) += 1;
            }
            for (c, k) in need {
                let ix = remaining.get_mut(&c).ok_or(Error::MatchFailure)?;
                if ix.len() < k {
                    return Err(Error::MatchFailure);
                }
                ix.drain(..k);
            }
            components.push(comp);
        }
    }
    let mut keep: Vec<usize> = remaining.into_values().flatten().collect();
    keep.sort_unstable();
    Ok((p.subset(&keep), components))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Goodness {
    pub depth: usize,
    /// Depth-`s` root code of every entry.
    pub codes: Vec<CanonCode>,
    pub good: Vec<bool>,
    /// Good codes in increasing order; a good vertex's label is its position here.
    pub good_codes: Vec<CanonCode>,
    /// Entry index of each label.
    pub good_entry: Vec<usize>,
    label: HashMap<CanonCode, usize>,
}

impl Goodness {
    pub fn label(&self, code: &CanonCode) -> Option<usize> {
        self.label.get(code).copied()
    }

    pub fn good_count(&self) -> usize {
        self.good_codes.len()
    }

    /// Builds labels from per-vertex (or per-entry) depth-`s` codes.
    pub fn from_codes(depth: usize, codes: Vec<CanonCode>) -> Self {
        let mut count: HashMap<&CanonCode, usize> = HashMap::new();
        for c in &codes {
            *count.entry(c).or_insert(0) += 1;
        }
        let good: Vec<bool> = codes.iter().map(|c| count[c] == 1).collect();
        let mut order: Vec<usize> = (0..codes.len()).filter(|&i| good[i]).collect();
        order.sort_by(|&a, &b| codes[a].cmp(&codes[b]));
        let good_codes: Vec<CanonCode> = order.iter().map(|&i| codes[i].clone()).collect();
        let label = good_codes.iter().enumerate().map(|(l, c)| (c.clone(), l)).collect();
        Goodness { depth, codes, good, good_codes, good_entry: order, label }
    }
}

/// A root is good iff its depth-`ceil(rho r)` code occurs exactly once.
pub fn classify_good(p: &NeighborhoodProfile, cfg: &CanonConfig) -> Result<Goodness> {
    let s = good_depth(p.r, p.rho)?;
    let codes = p.entries.iter().map(|e| canon_rooted_graph_with(&e.restrict(s), cfg)).collect::<Result<_>>()?;
    Ok(Goodness::from_codes(s, codes))
}

/// `D(C)` for a bad component `C` with its good boundary, up to isomorphisms
/// fixing the good labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BadComponentRecord {
    pub d_code: CanonCode,
    /// Labels of the boundary vertices, increasing.
    pub boundary: Vec<usize>,
    pub boundary_codes: Vec<CanonCode>,
    /// Label of the good vertex whose neighborhood produced the record.
    pub source: usize,
    /// Position of the record within its source's list.
    pub source_index: usize,
    /// Number of bad vertices.
    pub interior: usize,
    /// Edges of `D(C)`; ids below `interior` are bad vertices, `interior + j` is `boundary[j]`.
    pub edges: Vec<(usize, usize)>,
}

/// Canonical code of `D(C)` with boundary vertices colored by `label + 1`.
/// With a nonempty boundary the least label is a canonical root; otherwise
/// the component is isolated and gets a root-free code.
pub(crate) fn psi_code(
    interior: usize,
    boundary: &[usize],
    edges: &[(usize, usize)],
    cfg: &CanonConfig,
) -> Result<CanonCode> {
    let n = interior + boundary.len();
    if boundary.is_empty() {
        return canon_unrooted(&RootedGraph::new(n, 0, edges)?, cfg);
    }
    let root = interior + (0..boundary.len()).min_by_key(|&j| boundary[j]).unwrap();
    let colors = (0..n).map(|v| if v < interior { 0 } else { boundary[v - interior] as u32 + 1 }).collect();
    canon_rooted_graph_with(&RootedGraph::new(n, root, edges)?.with_colors(colors)?, cfg)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Class {
    Outside,
    Good(usize),
    Bad,
}

/// Classification of the vertices of one good vertex's entry.
struct Scan<'a> {
    h: &'a RootedGraph,
    r: usize,
    goodness: &'a Goodness,
    cfg: &'a CanonConfig,
    class: Vec<Option<Class>>,
}

impl<'a> Scan<'a> {
    fn new(h: &'a RootedGraph, r: usize, goodness: &'a Goodness, cfg: &'a CanonConfig) -> Self {
        Scan { h, r, goodness, cfg, class: vec![None; h.len()] }
    }

    /// Ball of radius `s` around `z`, or `None` when it reaches depth `r`,
    /// i.e. when it is not contained in `N_{r-1}` of the root.
    fn ball(&self, z: usize) -> Option<RootedGraph> {
        let s = self.goodness.depth;
        let mut local: HashMap<usize, usize> = HashMap::from([(z, 0)]);
        let mut order = vec![z];
        let mut depth = vec![0u32];
        let mut head = 0;
        while head < order.len() {
            let x = order[head];
            if self.h.depth(x) >= self.r {
                return None;
            }
            let d = depth[head];
            head += 1;
            if d as usize == s {
                continue;
            }
            for &y in self.h.neighbors(x) {
                if let std::collections::hash_map::Entry::Vacant(e) = local.entry(y) {
                    e.insert(order.len());
                    order.push(y);
                    depth.push(d + 1);
                }
            }
        }
        let adj = order
            .iter()
            .map(|&x| {
                let mut l: Vec<usize> = self.h.neighbors(x).iter().filter_map(|y| local.get(y).copied()).collect();
                l.sort_unstable();
                l
            })
            .collect();
        Some(RootedGraph::from_parts(0, adj, None, depth))
    }

    fn class(&mut self, z: usize) -> Result<Class> {
        if let Some(c) = self.class[z] {
            return Ok(c);
        }
        let c = match self.ball(z) {
            None => Class::Outside,
            Some(b) => match self.goodness.label(&canon_rooted_graph_with(&b, self.cfg)?) {
                Some(l) => Class::Good(l),
                None => Class::Bad,
            },
        };
        self.class[z] = Some(c);
        Ok(c)
    }

    fn good_neighbors(&mut self) -> Result<Vec<usize>> {
        let root = self.h.root();
        let mut out = Vec::new();
        for &y in self.h.neighbors(root) {
            if let Class::Good(l) = self.class(y)? {
                out.push(l);
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Bad components inside the entry whose boundary is good, visible and contains the root.
    fn family(&mut self, source: usize) -> Result<Vec<BadComponentRecord>> {
        let h = self.h;
        let mut visited = vec![false; h.len()];
        let mut out = Vec::new();
        for &start in h.neighbors(h.root()) {
            if visited[start] || self.class(start)? != Class::Bad {
                continue;
            }
            visited[start] = true;
            let mut comp = vec![start];
            let mut boundary: BTreeSet<usize> = BTreeSet::new();
            let mut ok = true;
            let mut head = 0;
            while head < comp.len() {
                let x = comp[head];
                head += 1;
                for &y in h.neighbors(x) {
                    if visited[y] {
                        continue;
                    }
                    match self.class(y)? {
                        Class::Bad => {
                            visited[y] = true;
                            comp.push(y);
                        }
                        Class::Good(_) => {
                            boundary.insert(y);
                        }
                        Class::Outside => ok = false,
                    }
                }
            }
            if !ok {
                continue;
            }
            let mut bnd: Vec<(usize, usize)> = boundary
                .iter()
                .map(|&y| match self.class[y] {
                    Some(Class::Good(l)) => (l, y),
                    _ => unreachable!(),
                })
                .collect();
            bnd.sort_unstable();
            let mut id: HashMap<usize, usize> = comp.iter().enumerate().map(|(i, &x)| (x, i)).collect();
            let interior = comp.len();
            for (j, &(_, y)) in bnd.iter().enumerate() {
                id.insert(y, interior + j);
            }
            let mut edges = Vec::new();
            for (i, &x) in comp.iter().enumerate() {
                for y in h.neighbors(x) {
                    let j = id[y];
                    if j >= interior || i < j {
                        edges.push((i, j));
                    }
                }
            }
            let labels: Vec<usize> = bnd.iter().map(|&(l, _)| l).collect();
            out.push(BadComponentRecord {
                d_code: psi_code(interior, &labels, &edges, self.cfg)?,
                boundary_codes: labels.iter().map(|&l| self.goodness.good_codes[l].clone()).collect(),
                boundary: labels,
                source,
                source_index: out.len(),
                interior,
                edges,
            });
        }
        Ok(out)
    }
}

/// The lists `D_{x,b}` for every good label `x`.
pub fn bad_component_families(
    p: &NeighborhoodProfile,
    goodness: &Goodness,
    cfg: &CanonConfig,
) -> Result<Vec<Vec<BadComponentRecord>>> {
    goodness
        .good_entry
        .iter()
        .enumerate()
        .map(|(x, &e)| Scan::new(&p.entries[e], p.r, goodness, cfg).family(x))
        .collect()
}

/// Keeps a record of `D_{x,b}` unless a smaller boundary label `y` also has it in `D_{y,b}`.
pub fn dedup_families(families: &[Vec<BadComponentRecord>]) -> Vec<BadComponentRecord> {
    let sets: Vec<BTreeSet<&CanonCode>> = families.iter().map(|f| f.iter().map(|d| &d.d_code).collect()).collect();
    families
        .iter()
        .enumerate()
        .flat_map(|(x, fam)| {
            let sets = &sets;
            fam.iter().filter(move |d| d.boundary.iter().all(|&y| y >= x || !sets[y].contains(&d.d_code))).cloned()
        })
        .collect()
}

/// The surviving records across all good vertices.
pub fn extract_bad_components(
    p: &NeighborhoodProfile,
    goodness: &Goodness,
    cfg: &CanonConfig,
) -> Result<Vec<BadComponentRecord>> {
    Ok(dedup_families(&bad_component_families(p, goodness, cfg)?))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconstructionStats {
    pub good: usize,
    pub bad: usize,
    pub degenerate_components: usize,
    pub bad_components: usize,
    pub surviving_records: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionResult {
    /// Good vertices first (by label), then record interiors, then the degenerate components.
    pub graph_prime: Graph,
    pub degenerate_components: Vec<RootedGraph>,
    pub stats: ReconstructionStats,
    pub success: Option<bool>,
}

/// Builds the graph: good-good edges read at depth one, a fresh copy of every
/// record's interior, then the degenerate components as separate components.
pub fn assemble(
    p: &NeighborhoodProfile,
    goodness: &Goodness,
    records: &[BadComponentRecord],
    components: &[RootedGraph],
    cfg: &CanonConfig,
) -> Result<ReconstructionResult> {
    let gcount = goodness.good_count();
    let mut claims: BTreeSet<(usize, usize)> = BTreeSet::new();
    for (x, &e) in goodness.good_entry.iter().enumerate() {
        for y in Scan::new(&p.entries[e], p.r, goodness, cfg).good_neighbors()? {
            claims.insert((x, y));
        }
    }
    let mut edges = Vec::new();
    for &(x, y) in &claims {
        if !claims.contains(&(y, x)) || x == y {
            return Err(Error::InconsistentAdjacency);
        }
        if x < y {
            edges.push((x, y));
        }
    }
    let mut n = gcount;
    for d in records {
        let map = |v: usize| if v < d.interior { n + v } else { d.boundary[v - d.interior] };
        edges.extend(d.edges.iter().map(|&(a, b)| (map(a), map(b))));
        n += d.interior;
    }
    for c in components {
        edges.extend(c.edges().into_iter().map(|(a, b)| (n + a, n + b)));
        n += c.len();
    }
    let stats = ReconstructionStats {
        good: gcount,
        bad: goodness.good.iter().filter(|&&g| !g).count(),
        degenerate_components: components.len(),
        bad_components: 0,
        surviving_records: records.len(),
    };
    Ok(ReconstructionResult {
        graph_prime: Graph::from_edges(n, edges)?,
        degenerate_components: components.to_vec(),
        stats,
        success: None,
    })
}

/// Runs the whole pipeline on a profile.
pub fn reconstruct(p: &NeighborhoodProfile, cfg: &CanonConfig) -> Result<ReconstructionResult> {
    let (kept, components) = preprocess_degenerate(p, cfg)?;
    let goodness = classify_good(&kept, cfg)?;
    let families = bad_component_families(&kept, &goodness, cfg)?;
    let records = dedup_families(&families);
    let mut result = assemble(&kept, &goodness, &records, &components, cfg)?;
    result.stats.bad_components = families.iter().map(Vec::len).sum();
    Ok(result)
}

/// Compares the multisets of component codes of `g` and of the reconstruction.
pub fn verify_reconstruction(g: &Graph, result: &ReconstructionResult, cfg: &CanonConfig) -> Result<bool> {
    if g.n() != result.graph_prime.n() || g.edge_count() != result.graph_prime.edge_count() {
        return Ok(false);
    }
    Ok(component_codes(g, cfg)? == component_codes(&result.graph_prime, cfg)?)
}

const MAGIC: &[u8; 4] = b"SGPF";
const VERSION: u32 = 1;

/// Binary container: magic, version, `r`, `rho`, entry count, then per entry
/// the audit id, the canonical code and the edge list. Integers little-endian.
pub fn encode_profile(p: &NeighborhoodProfile, cfg: &CanonConfig) -> Result<Vec<u8>> {
    let codes = entry_codes(p, cfg)?;
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(p.r as u32).to_le_bytes());
    out.extend_from_slice(&p.rho.to_le_bytes());
    out.extend_from_slice(&(p.len() as u32).to_le_bytes());
    for ((e, code), &id) in p.entries.iter().zip(&codes).zip(&p.audit.0) {
        out.extend_from_slice(&(id as u64).to_le_bytes());
        out.extend_from_slice(&(code.as_bytes().len() as u32).to_le_bytes());
        out.extend_from_slice(code.as_bytes());
        let edges = e.edges();
        for x in [e.len(), e.root(), edges.len()] {
            out.extend_from_slice(&(x as u32).to_le_bytes());
        }
        for (a, b) in edges {
            out.extend_from_slice(&(a as u32).to_le_bytes());
            out.extend_from_slice(&(b as u32).to_le_bytes());
        }
    }
    Ok(out)
}

struct Reader<'a>(&'a [u8]);

impl Reader<'_> {
    fn take(&mut self, k: usize) -> Result<&[u8]> {
        if self.0.len() < k {
            return Err(Error::Parse("truncated profile container".into()));
        }
        let (a, b) = self.0.split_at(k);
        self.0 = b;
        Ok(a)
    }

    fn u32(&mut self) -> Result<usize> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()) as usize)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }
}

/// Inverse of [`encode_profile`]; every stored code is checked against its structure.
pub fn decode_profile(bytes: &[u8], cfg: &CanonConfig) -> Result<NeighborhoodProfile> {
    let mut rd = Reader(bytes);
    if rd.take(4)? != MAGIC {
        return Err(Error::Parse("not a profile container".into()));
    }
    if rd.u32()? != VERSION as usize {
        return Err(Error::Parse("unsupported container version".into()));
    }
    let r = rd.u32()?;
    let rho = f64::from_bits(rd.u64()?);
    let count = rd.u32()?;
    let mut entries = Vec::with_capacity(count.min(1 << 20));
    let mut ids = Vec::with_capacity(count.min(1 << 20));
    for _ in 0..count {
        ids.push(rd.u64()? as usize);
        let k = rd.u32()?;
        let code = CanonCode::from_bytes(rd.take(k)?.to_vec());
        let (n, root, m) = (rd.u32()?, rd.u32()?, rd.u32()?);
        let edges = (0..m).map(|_| Ok((rd.u32()?, rd.u32()?))).collect::<Result<Vec<_>>>()?;
        let e = RootedGraph::new(n, root, &edges).map_err(|e| Error::Parse(e.to_string()))?;
        if canon_rooted_graph_with(&e, cfg)? != code {
            return Err(Error::Parse("stored code does not match its structure".into()));
        }
        entries.push(e);
    }
    if !rd.0.is_empty() {
        return Err(Error::Parse("trailing bytes in profile container".into()));
    }
    NeighborhoodProfile::new(r, rho, entries, ids)
}
