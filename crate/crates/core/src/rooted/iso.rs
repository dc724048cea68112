//! Fast isomorphism tests on breadth-first trees by shape interning, plus the
//! `~_r` relation and the spine event.

use crate::rooted::RootedTree;
use std::collections::HashMap;

/// Assigns a small integer to every distinct multiset of child shapes.
/// Shape 0 is the bare leaf.
pub struct ShapeInterner {
    map: HashMap<Vec<u32>, u32>,
    buf: Vec<u32>,
}

impl Default for ShapeInterner {
    fn default() -> Self {
        Self::new()
    }
}

impl ShapeInterner {
    pub fn new() -> Self {
        let mut map = HashMap::new();
        map.insert(Vec::new(), 0);
        ShapeInterner { map, buf: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Drops all shapes once the table grows past `limit`. Ids issued earlier become meaningless.
    pub fn trim(&mut self, limit: usize) {
        if self.map.len() > limit {
            *self = Self::new();
        }
    }

    fn intern_buf(&mut self) -> u32 {
        self.buf.sort_unstable();
        if let Some(&id) = self.map.get(&self.buf) {
            return id;
        }
        let id = self.map.len() as u32;
        self.map.insert(self.buf.clone(), id);
        id
    }

    /// Shape id of every vertex of `t|_r` (index = vertex). Level-r vertices are leaves.
    pub fn shapes(&mut self, t: &RootedTree, r: usize, out: &mut Vec<u32>) {
        let keep = t.prefix_len(r);
        out.clear();
        out.resize(keep, 0);
        for v in (0..keep).rev() {
            if t.level(v) < r && t.degree(v) > 0 {
                self.buf.clear();
                self.buf.extend(t.children(v).map(|c| out[c]));
                out[v] = self.intern_buf();
            }
        }
    }

    pub fn root_shape(&mut self, t: &RootedTree, r: usize) -> u32 {
        let mut out = Vec::new();
        self.shapes(t, r, &mut out);
        out[0]
    }
}

/// `t1|_r ≅ t2|_r` (no height requirement).
pub fn restricted_iso(t1: &RootedTree, t2: &RootedTree, r: usize) -> bool {
    let mut s = ShapeInterner::new();
    s.root_shape(t1, r) == s.root_shape(t2, r)
}

pub fn tree_iso(t1: &RootedTree, t2: &RootedTree) -> bool {
    t1.len() == t2.len() && restricted_iso(t1, t2, t1.height().max(t2.height()))
}

/// `T ~_r T'`: both heights at least `r` and the depth-r restrictions agree.
pub fn sim_r(t1: &RootedTree, t2: &RootedTree, r: usize) -> bool {
    t1.height().min(t2.height()) >= r && restricted_iso(t1, t2, r)
}

/// Every vertex strictly below level `r` has 0 or 2 children.
pub fn binary_below(t: &RootedTree, r: usize) -> bool {
    (t.prefix_len(r)..t.len()).all(|v| matches!(t.degree(v), 0 | 2))
}

/// A root path `v_0..v_{r-L}` with `|T_{v_{i-1}} \ T_{v_i}| <= L` at each step.
pub fn has_light_spine(t: &RootedTree, r: usize, l: usize) -> bool {
    if r < l {
        return false;
    }
    let size = t.subtree_sizes();
    fn dfs(t: &RootedTree, size: &[usize], v: usize, left: usize, l: usize) -> bool {
        left == 0 || t.children(v).any(|c| size[v] - size[c] <= l && dfs(t, size, c, left - 1, l))
    }
    dfs(t, &size, 0, r - l, l)
}

/// The spine event for `(t1, t2; r, L)`.
pub fn spine_event(t1: &RootedTree, t2: &RootedTree, r: usize, l: usize) -> bool {
    let (h1, h2) = (t1.height(), t2.height());
    h1 != h2
        && h1.max(h2) <= r + l
        && h1.min(h2) >= r
        && binary_below(t1, r)
        && binary_below(t2, r)
        && restricted_iso(t1, t2, r)
        && has_light_spine(t1, r, l)
}
