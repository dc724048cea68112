use crate::error::{Error, Result};
use crate::estimators::exact::{alpha, gamma_series};
use crate::estimators::mc::{depth_profile_conditional, McConfig};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub r: usize,
    pub p_hat: f64,
    pub se: f64,
    pub g_hat: f64,
    pub g_se: f64,
    /// `p̂_r / α̂^r`.
    pub ratio: f64,
    /// `λ² ĝ_r p̂_{r-1} − λ⁴ ĝ_r p̂_{r-1}²`.
    pub lower: f64,
    /// `λ² ĝ_r p̂_{r-1}`.
    pub upper: f64,
    /// Standard errors of `p̂_r − lower` and `p̂_r − upper`.
    pub sigma_lower: f64,
    pub sigma_upper: f64,
    /// Standard error of `p̂_r − p̂_{r-1}`.
    pub sigma_step: f64,
    /// `p̂_r` outside `[lower − 3σ, upper + 3σ]`.
    pub flag: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayTable {
    pub lambda: f64,
    pub alpha_hat: f64,
    pub samples: u64,
    pub excluded_truncated: u64,
    pub seed: u64,
    pub workers: usize,
    pub rows: Vec<DecayRow>,
}

impl DecayTable {
    pub const CSV_HEADER: &'static str = "r,p_hat,se,g_hat,g_se,ratio,lower,upper,sigma_lower,sigma_upper,flag";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for w in &self.rows {
            out.push_str(&format!(
                "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{}\n",
                w.r, w.p_hat, w.se, w.g_hat, w.g_se, w.ratio, w.lower, w.upper, w.sigma_lower, w.sigma_upper, w.flag
            ));
        }
        out
    }

    /// Rows whose `p̂_r` exceeds `p̂_{r-1}` by more than three standard errors.
    pub fn monotonicity_violations(&self) -> Vec<usize> {
        self.rows
            .windows(2)
            .filter(|w| w[1].p_hat - w[0].p_hat > 3.0 * w[1].sigma_step)
            .map(|w| w[1].r)
            .collect()
    }
}

/// Decay table for `r = 0..=r_max` from the conditional estimator, with
/// `α̂` taken from the size-12 series for `γ`.
pub fn decay_diagnostics(lambda: f64, r_max: usize, cfg: &McConfig) -> Result<DecayTable> {
    if r_max > 20 {
        return Err(Error::InvalidParameter(format!("r_max must be at most 20, got {r_max}")));
    }
    let alpha_hat = alpha(lambda, gamma_series(lambda, 12)?.partial_sum)?;
    let d = depth_profile_conditional(lambda, r_max, cfg)?;
    let l2 = lambda * lambda;
    let mut rows = vec![DecayRow {
        r: 0,
        p_hat: 1.0,
        se: 0.0,
        g_hat: 1.0,
        g_se: 0.0,
        ratio: 1.0,
        lower: 1.0,
        upper: 1.0,
        sigma_lower: 0.0,
        sigma_upper: 0.0,
        sigma_step: 0.0,
        flag: false,
    }];
    for r in 1..=r_max {
        let (p, q, g) = (&d.p[r], &d.p[r - 1], &d.g[r]);
        let (pm, qm, gm) = (p.mean(), q.mean(), g.mean());
        let c_pq = d.cov(d.cross_pp[r], p, q);
        let c_gq = d.cov(d.cross_gp[r], g, q);
        let c_pg = d.cov(d.cross_pg[r], p, g);
        let n = p.n as f64;
        // variance of p_r − (a·g_r + b·p_{r-1}) per draw, linearized
        let lin = |a: f64, b: f64| {
            let v = p.var() + a * a * g.var() + b * b * q.var() + 2.0 * a * b * c_gq - 2.0 * a * c_pg - 2.0 * b * c_pq;
            (v.max(0.0) / n).sqrt()
        };
        let upper = l2 * gm * qm;
        let lower = upper - l2 * l2 * gm * qm * qm;
        let sigma_upper = lin(l2 * qm, l2 * gm);
        let sigma_lower = lin(l2 * qm - l2 * l2 * qm * qm, l2 * gm - 2.0 * l2 * l2 * gm * qm);
        let sigma_step = lin(0.0, 1.0);
        rows.push(DecayRow {
            r,
            p_hat: pm,
            se: p.std_error(),
            g_hat: gm,
            g_se: g.std_error(),
            ratio: pm / alpha_hat.powi(r as i32),
            lower,
            upper,
            sigma_lower,
            sigma_upper,
            sigma_step,
            flag: pm < lower - 3.0 * sigma_lower || pm > upper + 3.0 * sigma_upper,
        });
    }
    Ok(DecayTable {
        lambda,
        alpha_hat,
        samples: d.samples,
        excluded_truncated: d.excluded_truncated,
        seed: cfg.seed,
        workers: cfg.workers,
        rows,
    })
}
