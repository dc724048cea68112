//! Galton–Watson trees with Poisson(λ) or Binomial(n, λ/n) offspring.

use crate::error::{Error, Result};
use crate::rooted::RootedTree;
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Offspring {
    Poisson,
    Binomial { trials: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GwParams {
    pub lambda: f64,
    pub offspring: Offspring,
    pub max_depth: usize,
    pub max_size: usize,
}

impl GwParams {
    pub fn poisson(lambda: f64) -> Self {
        GwParams { lambda, offspring: Offspring::Poisson, max_depth: 64, max_size: 1_000_000 }
    }

    pub fn binomial(trials: u64, lambda: f64) -> Self {
        GwParams { offspring: Offspring::Binomial { trials }, ..Self::poisson(lambda) }
    }

    pub fn with_max_depth(mut self, d: usize) -> Self {
        self.max_depth = d;
        self
    }

    pub fn with_max_size(mut self, s: usize) -> Self {
        self.max_size = s;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda <= 0.0 {
            return Err(Error::InvalidParameter(format!("lambda must be positive, got {}", self.lambda)));
        }
        if self.max_size == 0 {
            return Err(Error::InvalidParameter("max_size must be at least 1".into()));
        }
        if let Offspring::Binomial { trials } = self.offspring {
            if trials == 0 || self.lambda > trials as f64 {
                return Err(Error::InvalidParameter("binomial offspring needs lambda/n <= 1".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Truncation {
    /// Vertices exist at `max_depth`; their offspring were not drawn.
    Depth,
    /// Generation stopped once the size passed `max_size`.
    Size,
}

#[derive(Clone, Debug)]
pub struct GwSample {
    pub tree: RootedTree,
    pub truncation: Option<Truncation>,
}

impl GwSample {
    pub fn truncated(&self) -> bool {
        self.truncation.is_some()
    }
}

/// Offspring draws for one law.
#[derive(Clone, Debug)]
pub enum OffspringSampler {
    Poisson { lambda: f64, p0: f64 },
    Binomial(Binomial),
}

impl OffspringSampler {
    pub fn new(lambda: f64, offspring: Offspring) -> Self {
        match offspring {
            Offspring::Poisson => OffspringSampler::Poisson { lambda, p0: (-lambda).exp() },
            Offspring::Binomial { trials } => {
                OffspringSampler::Binomial(Binomial::new(trials, lambda / trials as f64).expect("valid binomial"))
            }
        }
    }

    /// Poisson by sequential inversion (λ stays small throughout).
    #[inline]
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        match self {
            OffspringSampler::Poisson { lambda, p0 } => {
                let u: f64 = rng.random();
                let (mut k, mut p, mut cdf) = (0u32, *p0, *p0);
                while u > cdf && k < 1000 {
                    k += 1;
                    p *= lambda / k as f64;
                    cdf += p;
                    if p == 0.0 {
                        break;
                    }
                }
                k
            }
            OffspringSampler::Binomial(b) => b.sample(rng) as u32,
        }
    }
}

/// Breadth-first sampler that can be grown one level at a time.
#[derive(Clone, Debug, Default)]
pub struct LevelGrower {
    /// Offspring counts of the vertices already expanded, in BFS order.
    pub counts: Vec<u32>,
    /// Total vertices generated so far.
    pub size: usize,
    /// Start index of each generated level.
    pub level_start: Vec<usize>,
}

impl LevelGrower {
    pub fn reset(&mut self) {
        self.counts.clear();
        self.size = 1;
        self.level_start.clear();
        self.level_start.push(0);
    }

    pub fn levels(&self) -> usize {
        self.level_start.len()
    }

    /// Size of the deepest generated level.
    pub fn frontier(&self) -> usize {
        self.size - *self.level_start.last().unwrap()
    }

    /// Draws offspring for the deepest level; returns the new level's size.
    /// Stops early (returning `None`) once the total size passes `cap`.
    pub fn grow<R: Rng + ?Sized>(&mut self, s: &OffspringSampler, rng: &mut R, cap: usize) -> Option<usize> {
        let start = *self.level_start.last().unwrap();
        let before = self.size;
        for _ in start..before {
            let d = s.draw(rng);
            self.counts.push(d);
            self.size += d as usize;
            if self.size > cap {
                return None;
            }
        }
        self.level_start.push(before);
        Some(self.size - before)
    }

    pub fn tree(&self) -> RootedTree {
        RootedTree::from_offspring(&self.counts).expect("consistent offspring counts")
    }
}

pub fn sample<R: Rng + ?Sized>(params: &GwParams, rng: &mut R) -> GwSample {
    let s = OffspringSampler::new(params.lambda, params.offspring);
    let mut g = LevelGrower::default();
    g.reset();
    let mut depth = 0;
    loop {
        if g.frontier() == 0 {
            return GwSample { tree: g.tree(), truncation: None };
        }
        if depth == params.max_depth {
            return GwSample { tree: g.tree(), truncation: Some(Truncation::Depth) };
        }
        if g.grow(&s, rng, params.max_size).is_none() {
            // any prefix of a breadth-first offspring sequence is a valid tree
            let mut counts = g.counts.clone();
            let mut total = 1 + counts.iter().map(|&c| c as usize).sum::<usize>();
            while total > params.max_size {
                total -= counts.pop().unwrap() as usize;
            }
            let tree = RootedTree::from_offspring(&counts).expect("prefix of a valid sequence");
            return GwSample { tree, truncation: Some(Truncation::Size) };
        }
        depth += 1;
    }
}

fn ln_factorial(k: u64) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

/// Poisson point mass `λ^k e^{-λ} / k!`.
pub fn mu_k(lambda: f64, k: u64) -> f64 {
    if k == 0 {
        return (-lambda).exp();
    }
    (k as f64 * lambda.ln() - lambda - ln_factorial(k)).exp()
}
