//! Monte-Carlo estimators over independent PGW pairs.
//!
//! Two families are provided. Indicator estimators sample both trees,
//! growing them level by level in lockstep so that mismatching level counts
//! end a pair early. Conditional estimators sample only `T` and integrate `T'`
//! out exactly: given `T`, the probability that `T'|_r ≅ T|_r` is a product of
//! Poisson point masses and multinomial factors. They have the same mean and
//! far smaller variance for the rare events at larger `r`.

use crate::error::{Error, Result};
use crate::estimators::exact::{log_restricted_prob, LnFact};
use crate::pgw::{LevelGrower, OffspringSampler, Offspring};
use crate::rng::{self, Stream};
use crate::rooted::{binary_below, has_light_spine, RootedTree, ShapeInterner};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub workers: usize,
    /// Per-tree size cap; pairs exceeding it are truncated.
    pub max_size: usize,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        McConfig { samples, seed, workers: 4, max_size: 1_000_000 }
    }

    pub fn with_workers(mut self, w: usize) -> Self {
        self.workers = w.max(1);
        self
    }

    fn check(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::InvalidParameter("samples must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// Samples entering the mean (truncated ones excluded where applicable).
    pub samples: u64,
    pub excluded_truncated: u64,
    pub seed: u64,
    pub workers: usize,
}

/// Running sums for one scalar.
#[derive(Clone, Copy, Debug, Default)]
pub struct Moments {
    pub n: u64,
    pub sum: f64,
    pub sum_sq: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        self.sum += x;
        self.sum_sq += x * x;
    }

    pub fn merge(&mut self, o: &Moments) {
        self.n += o.n;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }

    pub fn mean(&self) -> f64 {
        if self.n == 0 { 0.0 } else { self.sum / self.n as f64 }
    }

    /// Sample variance of one observation.
    pub fn var(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let m = self.mean();
        ((self.sum_sq - self.n as f64 * m * m) / (self.n - 1) as f64).max(0.0)
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 { 0.0 } else { (self.var() / self.n as f64).sqrt() }
    }
}

fn run_workers<A, F>(cfg: &McConfig, f: F) -> Vec<A>
where
    A: Send,
    F: Fn(&mut Stream, u64) -> A + Sync,
{
    rng::split_counts(cfg.samples, cfg.workers)
        .into_par_iter()
        .enumerate()
        .map(|(i, count)| f(&mut rng::stream(cfg.seed, i as u64), count))
        .collect()
}

/// Outcome of one indicator trial.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Trial {
    Hit,
    Miss,
    Truncated,
}

fn indicator<F>(cfg: &McConfig, trial: F) -> Result<McEstimate>
where
    F: Fn(&mut PairSampler, &mut Stream) -> Trial + Sync,
{
    cfg.check()?;
    let parts = run_workers(cfg, |rng, count| {
        let mut ps = PairSampler::default();
        let (mut hits, mut kept, mut trunc) = (0u64, 0u64, 0u64);
        for _ in 0..count {
            match trial(&mut ps, rng) {
                Trial::Hit => {
                    hits += 1;
                    kept += 1;
                }
                Trial::Miss => kept += 1,
                Trial::Truncated => trunc += 1,
            }
            ps.interner.trim(1 << 20);
        }
        (hits, kept, trunc)
    });
    let (hits, kept, trunc) = parts.iter().fold((0, 0, 0), |a, p| (a.0 + p.0, a.1 + p.1, a.2 + p.2));
    let mean = if kept == 0 { 0.0 } else { hits as f64 / kept as f64 };
    let std_error = if kept == 0 { 0.0 } else { (mean * (1.0 - mean) / kept as f64).sqrt() };
    Ok(McEstimate { mean, std_error, samples: kept, excluded_truncated: trunc, seed: cfg.seed, workers: cfg.workers })
}

#[derive(Default)]
struct PairSampler {
    a: LevelGrower,
    b: LevelGrower,
    interner: ShapeInterner,
    sa: Vec<u32>,
    sb: Vec<u32>,
}

/// How far a lockstep pair got.
enum Lockstep {
    /// Level counts differ at some level `< depth`.
    Differ,
    /// Both trees died out at the same level, with equal counts throughout.
    Extinct,
    /// Equal level counts through `depth`, level `depth` nonempty.
    Reached,
    Truncated,
}

impl PairSampler {
    fn lockstep(&mut self, s: &OffspringSampler, rng: &mut Stream, depth: usize, cap: usize) -> Lockstep {
        self.a.reset();
        self.b.reset();
        for _ in 0..depth {
            let (Some(x), Some(y)) = (self.a.grow(s, rng, cap), self.b.grow(s, rng, cap)) else {
                return Lockstep::Truncated;
            };
            if x != y {
                return Lockstep::Differ;
            }
            if x == 0 {
                return Lockstep::Extinct;
            }
        }
        Lockstep::Reached
    }

    fn same_shape(&mut self, r: usize) -> bool {
        let (ta, tb) = (self.a.tree(), self.b.tree());
        self.interner.shapes(&ta, r, &mut self.sa);
        self.interner.shapes(&tb, r, &mut self.sb);
        self.sa[0] == self.sb[0]
    }
}

fn poisson(lambda: f64) -> Result<OffspringSampler> {
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::InvalidParameter(format!("lambda must be positive and finite, got {lambda}")));
    }
    Ok(OffspringSampler::new(lambda, Offspring::Poisson))
}

/// `γ_λ = P(T ≅ T')`. Pairs passing the size cap count as non-isomorphic and
/// are reported in `excluded_truncated` (they are not removed from the denominator).
pub fn gamma_mc(lambda: f64, cfg: &McConfig) -> Result<McEstimate> {
    let s = poisson(lambda)?;
    let cap = cfg.max_size;
    let mut est = indicator(cfg, |ps, rng| match ps.lockstep(&s, rng, usize::MAX, cap) {
        Lockstep::Extinct => {
            if ps.same_shape(usize::MAX) {
                Trial::Hit
            } else {
                Trial::Miss
            }
        }
        Lockstep::Truncated => Trial::Truncated,
        _ => Trial::Miss,
    })?;
    // truncated pairs are scored as misses
    let total = est.samples + est.excluded_truncated;
    est.mean = est.mean * est.samples as f64 / total as f64;
    est.std_error = (est.mean * (1.0 - est.mean) / total as f64).sqrt();
    est.samples = total;
    Ok(est)
}

/// `g_r = P(T|_r ≅ T'|_r)`.
pub fn g_r_mc(lambda: f64, r: usize, cfg: &McConfig) -> Result<McEstimate> {
    let s = poisson(lambda)?;
    indicator(cfg, |ps, rng| match ps.lockstep(&s, rng, r, cfg.max_size) {
        Lockstep::Differ => Trial::Miss,
        Lockstep::Truncated => Trial::Truncated,
        _ => {
            if ps.same_shape(r) {
                Trial::Hit
            } else {
                Trial::Miss
            }
        }
    })
}

/// `𝔭_r = P(T ~_r T')`.
pub fn p_r_mc(lambda: f64, r: usize, cfg: &McConfig) -> Result<McEstimate> {
    let s = poisson(lambda)?;
    indicator(cfg, |ps, rng| match ps.lockstep(&s, rng, r, cfg.max_size) {
        Lockstep::Reached => {
            if ps.same_shape(r) {
                Trial::Hit
            } else {
                Trial::Miss
            }
        }
        Lockstep::Truncated => Trial::Truncated,
        _ => Trial::Miss,
    })
}

/// `P(T ≅ T', |T| ≤ L)`.
pub fn prob_a_mc(lambda: f64, l: usize, cfg: &McConfig) -> Result<McEstimate> {
    let s = poisson(lambda)?;
    indicator(cfg, |ps, rng| match ps.lockstep(&s, rng, usize::MAX, l) {
        Lockstep::Extinct => {
            if ps.same_shape(usize::MAX) {
                Trial::Hit
            } else {
                Trial::Miss
            }
        }
        _ => Trial::Miss,
    })
}

fn check_spine_params(r: usize, l: usize) -> Result<()> {
    if !(r > l && l >= 1) {
        return Err(Error::InvalidParameter(format!("need r > L >= 1, got r={r}, L={l}")));
    }
    Ok(())
}

/// Frequency of the spine event `ℰ(T, T'; r, L)`.
pub fn p_r_l_mc(lambda: f64, r: usize, l: usize, cfg: &McConfig) -> Result<McEstimate> {
    check_spine_params(r, l)?;
    let s = poisson(lambda)?;
    let depth = r + l + 1;
    indicator(cfg, |ps, rng| {
        match ps.lockstep(&s, rng, r, cfg.max_size) {
            Lockstep::Reached => {}
            Lockstep::Truncated => return Trial::Truncated,
            _ => return Trial::Miss,
        }
        if !ps.same_shape(r) {
            return Trial::Miss;
        }
        for _ in r..depth {
            if ps.a.grow(&s, rng, cfg.max_size).is_none() || ps.b.grow(&s, rng, cfg.max_size).is_none() {
                return Trial::Truncated;
            }
        }
        let (ta, tb) = (ps.a.tree(), ps.b.tree());
        if crate::rooted::spine_event(&ta, &tb, r, l) {
            Trial::Hit
        } else {
            Trial::Miss
        }
    })
}

/// Per-depth results of the conditional estimator for `𝔭_r` and `g_r`.
#[derive(Clone, Debug)]
pub struct DepthProfile {
    pub p: Vec<Moments>,
    pub g: Vec<Moments>,
    /// Sums of `p_r · p_{r-1}`, `g_r · p_{r-1}` and `p_r · g_r`, index `r`.
    pub cross_pp: Vec<f64>,
    pub cross_gp: Vec<f64>,
    pub cross_pg: Vec<f64>,
    pub samples: u64,
    pub excluded_truncated: u64,
}

impl DepthProfile {
    fn new(r_max: usize) -> Self {
        DepthProfile {
            p: vec![Moments::default(); r_max + 1],
            g: vec![Moments::default(); r_max + 1],
            cross_pp: vec![0.0; r_max + 1],
            cross_gp: vec![0.0; r_max + 1],
            cross_pg: vec![0.0; r_max + 1],
            samples: 0,
            excluded_truncated: 0,
        }
    }

    fn merge(&mut self, o: &DepthProfile) {
        for r in 0..self.p.len() {
            self.p[r].merge(&o.p[r]);
            self.g[r].merge(&o.g[r]);
            self.cross_pp[r] += o.cross_pp[r];
            self.cross_gp[r] += o.cross_gp[r];
            self.cross_pg[r] += o.cross_pg[r];
        }
        self.samples += o.samples;
        self.excluded_truncated += o.excluded_truncated;
    }

    /// Sample covariance of two per-draw quantities from their cross sum.
    pub fn cov(&self, cross: f64, a: &Moments, b: &Moments) -> f64 {
        let n = a.n as f64;
        if a.n < 2 {
            return 0.0;
        }
        (cross - n * a.mean() * b.mean()) / (n - 1.0)
    }

    pub fn estimate(&self, m: &Moments, cfg: &McConfig) -> McEstimate {
        McEstimate {
            mean: m.mean(),
            std_error: m.std_error(),
            samples: m.n,
            excluded_truncated: self.excluded_truncated,
            seed: cfg.seed,
            workers: cfg.workers,
        }
    }
}

/// Conditional estimator of `𝔭_r` and `g_r` for all `r ≤ r_max` from one set
/// of draws of `T`: each draw contributes `P(T'|_r ≅ T|_r | T)`, multiplied by
/// `1{H(T) ≥ r}` for `𝔭_r`.
pub fn depth_profile_conditional(lambda: f64, r_max: usize, cfg: &McConfig) -> Result<DepthProfile> {
    cfg.check()?;
    let s = poisson(lambda)?;
    let parts = run_workers(cfg, |rng, count| {
        let mut out = DepthProfile::new(r_max);
        let mut grower = LevelGrower::default();
        let mut interner = ShapeInterner::new();
        let mut shapes = Vec::new();
        let mut lnf = LnFact::new();
        let mut pv = vec![0.0; r_max + 1];
        let mut gv = vec![0.0; r_max + 1];
        for _ in 0..count {
            grower.reset();
            let mut truncated = false;
            for _ in 0..r_max {
                match grower.grow(&s, rng, cfg.max_size) {
                    None => {
                        truncated = true;
                        break;
                    }
                    Some(0) => break,
                    Some(_) => {}
                }
            }
            if truncated {
                out.excluded_truncated += 1;
                continue;
            }
            out.samples += 1;
            let t = grower.tree();
            let h = t.height();
            for r in 0..=r_max {
                let f = if r == 0 {
                    1.0
                } else {
                    log_restricted_prob(lambda, &t, r, &mut interner, &mut shapes, &mut lnf).exp()
                };
                gv[r] = f;
                pv[r] = if h >= r { f } else { 0.0 };
                out.p[r].push(pv[r]);
                out.g[r].push(gv[r]);
                out.cross_pg[r] += pv[r] * gv[r];
                if r > 0 {
                    out.cross_pp[r] += pv[r] * pv[r - 1];
                    out.cross_gp[r] += gv[r] * pv[r - 1];
                }
            }
            interner.trim(1 << 20);
        }
        out
    });
    let mut total = DepthProfile::new(r_max);
    parts.iter().for_each(|p| total.merge(p));
    Ok(total)
}

pub fn p_r_conditional(lambda: f64, r: usize, cfg: &McConfig) -> Result<McEstimate> {
    let d = depth_profile_conditional(lambda, r, cfg)?;
    Ok(d.estimate(&d.p[r], cfg))
}

pub fn g_r_conditional(lambda: f64, r: usize, cfg: &McConfig) -> Result<McEstimate> {
    let d = depth_profile_conditional(lambda, r, cfg)?;
    Ok(d.estimate(&d.g[r], cfg))
}

/// Conditional estimates of `𝔭_{r,L}` for `r ∈ r_min..=r_max` from shared draws of `T`.
#[derive(Clone, Debug)]
pub struct SpineProfile {
    pub r_min: usize,
    pub l: usize,
    /// Index `r - r_min`.
    pub p: Vec<Moments>,
    /// Cross sums of `p_{r,L} · p_{r-1,L}`, index `r - r_min` (first entry unused).
    pub cross: Vec<f64>,
    pub samples: u64,
    pub excluded_truncated: u64,
}

impl SpineProfile {
    pub fn get(&self, r: usize) -> &Moments {
        &self.p[r - self.r_min]
    }

    /// `p_{r,L} / p_{r-1,L}` with a delta-method standard error using the
    /// covariance of the shared draws.
    pub fn ratio(&self, r: usize) -> (f64, f64) {
        let (a, b) = (self.get(r), self.get(r - 1));
        let n = a.n as f64;
        let (ma, mb) = (a.mean(), b.mean());
        let cov = (self.cross[r - self.r_min] - n * ma * mb) / (n - 1.0);
        let ratio = ma / mb;
        let var = (a.var() / (mb * mb) + ma * ma * b.var() / mb.powi(4) - 2.0 * ma * cov / mb.powi(3)) / n;
        (ratio, var.max(0.0).sqrt())
    }
}

/// `P(H(T') - r ≤ h` and every vertex below level `r` binary `)` per level-r
/// vertex, for `h = 0..=l`.
fn binary_height_cdf(lambda: f64, l: usize) -> Vec<f64> {
    let m0 = (-lambda).exp();
    let m2 = lambda * lambda / 2.0 * m0;
    let mut out = vec![m0];
    let mut b = m0;
    for _ in 1..=l {
        out.push((-lambda * (1.0 - b)).exp());
        b = m0 + m2 * b * b;
    }
    out
}

/// Conditional estimator of the spine-event probability: draws `T` to depth
/// `r_max + L + 1`, checks the `T`-side clauses, and integrates `T'` exactly.
pub fn p_r_l_conditional(lambda: f64, r_min: usize, r_max: usize, l: usize, cfg: &McConfig) -> Result<SpineProfile> {
    check_spine_params(r_min, l)?;
    cfg.check()?;
    let s = poisson(lambda)?;
    let cdf = binary_height_cdf(lambda, l);
    let span = r_max - r_min + 1;
    let parts = run_workers(cfg, |rng, count| {
        let mut p = vec![Moments::default(); span];
        let mut cross = vec![0.0; span];
        let (mut kept, mut trunc) = (0u64, 0u64);
        let mut grower = LevelGrower::default();
        let mut interner = ShapeInterner::new();
        let mut shapes = Vec::new();
        let mut lnf = LnFact::new();
        let mut vals = vec![0.0; span];
        for _ in 0..count {
            grower.reset();
            let mut truncated = false;
            for _ in 0..r_max + l + 1 {
                match grower.grow(&s, rng, cfg.max_size) {
                    None => {
                        truncated = true;
                        break;
                    }
                    Some(0) => break,
                    Some(_) => {}
                }
            }
            if truncated {
                trunc += 1;
                continue;
            }
            kept += 1;
            let t = grower.tree();
            let h = t.height();
            for (i, r) in (r_min..=r_max).enumerate() {
                vals[i] = spine_weight(lambda, &t, h, r, l, &cdf, &mut interner, &mut shapes, &mut lnf);
                p[i].push(vals[i]);
                if i > 0 {
                    cross[i] += vals[i] * vals[i - 1];
                }
            }
            interner.trim(1 << 20);
        }
        (p, cross, kept, trunc)
    });
    let mut out = SpineProfile {
        r_min,
        l,
        p: vec![Moments::default(); span],
        cross: vec![0.0; span],
        samples: 0,
        excluded_truncated: 0,
    };
    for (p, cross, kept, trunc) in &parts {
        for i in 0..span {
            out.p[i].merge(&p[i]);
            out.cross[i] += cross[i];
        }
        out.samples += kept;
        out.excluded_truncated += trunc;
    }
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn spine_weight(
    lambda: f64,
    t: &RootedTree,
    h: usize,
    r: usize,
    l: usize,
    cdf: &[f64],
    interner: &mut ShapeInterner,
    shapes: &mut Vec<u32>,
    lnf: &mut LnFact,
) -> f64 {
    if h < r || h > r + l || !binary_below(t, r) || !has_light_spine(t, r, l) {
        return 0.0;
    }
    let z = t.level_count(r) as i32;
    let rel = h - r;
    let at = |k: usize| cdf[k].powi(z);
    let below = if rel == 0 { 0.0 } else { at(rel - 1) };
    let t_prime = at(l) - (at(rel) - below);
    log_restricted_prob(lambda, t, r, interner, shapes, lnf).exp() * t_prime
}
