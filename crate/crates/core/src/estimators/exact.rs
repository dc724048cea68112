use crate::error::{Error, Result};
use crate::pgw::mu_k;
use crate::rooted::{RootedTree, ShapeInterner};
use serde::{Deserialize, Serialize};

/// Extinction probability of PGW(λ): 1 for λ ≤ 1, otherwise the root of
/// `x = e^{-λ+λx}` in (0, 1) by bisection.
pub fn extinction_q(lambda: f64) -> Result<f64> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::InvalidParameter(format!("lambda must be positive and finite, got {lambda}")));
    }
    if lambda <= 1.0 {
        return Ok(1.0);
    }
    let f = |x: f64| (-lambda + lambda * x).exp() - x;
    // f > 0 at 0 and f < 0 just below 1; walk toward 1 until the sign flips.
    let mut hi = 0.5;
    while f(hi) >= 0.0 {
        hi = (1.0 + hi) / 2.0;
    }
    let mut lo = 0.0;
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub(crate) struct LnFact(Vec<f64>);

impl LnFact {
    pub(crate) fn new() -> Self {
        LnFact(vec![0.0])
    }

    pub(crate) fn get(&mut self, k: usize) -> f64 {
        while self.0.len() <= k {
            let n = self.0.len();
            let last = *self.0.last().unwrap();
            self.0.push(last + (n as f64).ln());
        }
        self.0[k]
    }
}

/// Log-probability that a PGW(λ) tree agrees with `t` up to depth `r`:
/// vertices above level `r` must match their child multisets exactly, level-r
/// vertices are unconstrained. With `r > height` this is the full tree probability.
pub(crate) fn log_restricted_prob(
    lambda: f64,
    t: &RootedTree,
    r: usize,
    interner: &mut ShapeInterner,
    shapes: &mut Vec<u32>,
    lnf: &mut LnFact,
) -> f64 {
    interner.shapes(t, r, shapes);
    let keep = shapes.len();
    let ln_lambda = lambda.ln();
    let mut total = 0.0;
    let mut buf: Vec<u32> = Vec::new();
    for v in 0..keep {
        if t.level(v) >= r {
            continue;
        }
        let d = t.degree(v);
        total += d as f64 * ln_lambda - lambda;
        if d > 1 {
            buf.clear();
            buf.extend(t.children(v).map(|c| shapes[c]));
            buf.sort_unstable();
            let mut run = 1;
            for i in 1..=buf.len() {
                if i < buf.len() && buf[i] == buf[i - 1] {
                    run += 1;
                } else {
                    total -= lnf.get(run);
                    run = 1;
                }
            }
        }
    }
    total
}

/// `P(T ~ τ)` for a PGW(λ) tree, via the child-multiset recursion
/// `μ_d · d!/∏ m! · ∏ P(child)`.
pub fn tree_prob(lambda: f64, tau: &RootedTree) -> f64 {
    let mut interner = ShapeInterner::new();
    let mut shapes = Vec::new();
    let r = tau.height() + 1;
    log_restricted_prob(lambda, tau, r, &mut interner, &mut shapes, &mut LnFact::new()).exp()
}

/// An unordered rooted tree class given by the multiset of its child classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeClass {
    pub size: usize,
    /// Indices of child classes, non-increasing.
    pub children: Vec<u32>,
}

/// All unordered rooted tree classes with at most `k` vertices, ordered by
/// size. Each class is generated once, as a non-increasing multiset of
/// smaller classes.
pub fn enumerate_tree_classes(k: usize) -> Result<Vec<TreeClass>> {
    if k > 16 {
        return Err(Error::EnumerationTooLarge(k));
    }
    let mut classes = vec![TreeClass { size: 1, children: Vec::new() }];
    if k == 0 {
        classes.clear();
        return Ok(classes);
    }
    for n in 2..=k {
        let mut fresh = Vec::new();
        let mut cur = Vec::new();
        compose(&classes, n - 1, classes.len(), &mut cur, &mut fresh);
        classes.extend(fresh.into_iter().map(|children| TreeClass { size: n, children }));
    }
    Ok(classes)
}

fn compose(classes: &[TreeClass], remaining: usize, bound: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if remaining == 0 {
        out.push(cur.clone());
        return;
    }
    for i in (0..bound).rev() {
        if classes[i].size <= remaining {
            cur.push(i as u32);
            compose(classes, remaining - classes[i].size, i + 1, cur, out);
            cur.pop();
        }
    }
}

impl TreeClass {
    /// Materializes class `idx` of `classes` as a tree.
    pub fn build(classes: &[TreeClass], idx: usize) -> RootedTree {
        let mut parents = vec![None];
        let mut stack = vec![(idx, 0usize)];
        while let Some((c, at)) = stack.pop() {
            for &child in &classes[c].children {
                let v = parents.len();
                parents.push(Some(at));
                stack.push((child as usize, v));
            }
        }
        RootedTree::from_parents(&parents).unwrap()
    }
}

/// Probability of every class in `classes` under PGW(λ).
pub fn class_probs(lambda: f64, classes: &[TreeClass]) -> Vec<f64> {
    let mut lnf = LnFact::new();
    let mut probs: Vec<f64> = Vec::with_capacity(classes.len());
    for c in classes {
        let d = c.children.len();
        let mut lp = d as f64 * lambda.ln() - lambda;
        let mut run = 1;
        for i in 1..=d {
            if i < d && c.children[i] == c.children[i - 1] {
                run += 1;
            } else {
                lp -= lnf.get(run);
                run = 1;
            }
        }
        let mut p = lp.exp();
        for &ch in &c.children {
            p *= probs[ch as usize];
        }
        probs.push(p);
    }
    probs
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesEstimate {
    pub partial_sum: f64,
    /// Contribution of trees of size `i + 1` at index `i`.
    pub terms_by_size: Vec<f64>,
    pub max_size: usize,
}

impl SeriesEstimate {
    /// Ten times the last size increment, a heuristic bound on the tail.
    pub fn tail_allowance(&self) -> f64 {
        10.0 * self.terms_by_size.last().copied().unwrap_or(0.0)
    }
}

/// `γ_λ = Σ_τ P(T ~ τ)²` summed over tree classes with at most `k` vertices.
pub fn gamma_series(lambda: f64, k: usize) -> Result<SeriesEstimate> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::InvalidParameter(format!("lambda must be positive and finite, got {lambda}")));
    }
    let classes = enumerate_tree_classes(k)?;
    let probs = class_probs(lambda, &classes);
    let mut terms = vec![0.0; k];
    for (c, p) in classes.iter().zip(&probs) {
        terms[c.size - 1] += p * p;
    }
    Ok(SeriesEstimate { partial_sum: terms.iter().sum(), terms_by_size: terms, max_size: k })
}

/// `P(T ~ T', |T| ≤ L)` exactly, by class enumeration.
pub fn prob_a_exact(lambda: f64, l: usize) -> Result<f64> {
    Ok(gamma_series(lambda, l)?.partial_sum)
}

/// `α = λ² γ`; errors unless `γ ∈ (0, 1)` and `α < 1`.
pub fn alpha(lambda: f64, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!("gamma must lie in (0, 1), got {gamma}")));
    }
    let a = lambda * lambda * gamma;
    if a >= 1.0 {
        return Err(Error::InvalidGamma(a));
    }
    Ok(a)
}

/// `r_* = log n / log(1/α)`.
pub fn threshold_r(n: usize, lambda: f64, gamma: f64) -> Result<f64> {
    let a = alpha(lambda, gamma)?;
    Ok((n as f64).ln() / (1.0 / a).ln())
}

/// `Σ_{k ≥ 1} μ_k²` truncated at `k = 60`.
pub fn p1_closed_form(lambda: f64) -> f64 {
    (1..=60).map(|k| mu_k(lambda, k).powi(2)).sum()
}
