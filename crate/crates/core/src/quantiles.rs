//! Weissman-type extreme quantile estimators,
//! `Q̂(1-p) = Q̂(1-k/n) · (k/(np))^ξ̂`, with the anchor taken from the
//! Kaplan–Meier curve of the claims, from an expert quantile function, or a
//! geometric mix of both.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::estimators::{hill_censored, perturbed_estimator, Penalty};
use crate::model::{CensoredSample, Observation};
use crate::survival::{kaplan_meier, KmCurve};

/// Source of the anchor quantile `Q̂(1-t)` for a tail probability `t`.
pub trait AnchorQuantile {
    fn upper_quantile(&self, tail: f64) -> Result<f64>;
}

impl AnchorQuantile for KmCurve {
    fn upper_quantile(&self, tail: f64) -> Result<f64> {
        KmCurve::upper_quantile(self, tail)
    }
}

impl<F> AnchorQuantile for F
where
    F: Fn(f64) -> Result<f64>,
{
    fn upper_quantile(&self, tail: f64) -> Result<f64> {
        self(tail)
    }
}

/// Empirical quantiles of fully observed values, e.g. the ultimates.
#[derive(Debug, Clone)]
pub struct EmpiricalQuantiles {
    sample: CensoredSample,
    curve: KmCurve,
}

impl EmpiricalQuantiles {
    pub fn new(values: &[f64]) -> Result<Self> {
        let sample = CensoredSample::new(values.iter().map(|&z| Observation::closed(z)).collect())?;
        let curve = kaplan_meier(&sample);
        Ok(Self { sample, curve })
    }

    pub fn len(&self) -> usize {
        self.sample.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sample.is_empty()
    }

    /// Ordinary Hill estimate `H_k` of `ξ` from the top `k` values.
    pub fn hill_xi(&self, k: usize) -> Result<f64> {
        Ok(self.sample.top_k(k)?.hill_statistic())
    }
}

impl AnchorQuantile for EmpiricalQuantiles {
    fn upper_quantile(&self, tail: f64) -> Result<f64> {
        self.curve.upper_quantile(tail)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QuantileKind {
    Mle,
    Expert,
    Combined,
    Ultimates,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantileEstimate {
    /// Exceedance probability.
    pub p: f64,
    pub k: usize,
    pub value: f64,
    pub kind: QuantileKind,
    /// The anchor `Q̂(1-k/n)`.
    pub anchor: f64,
    /// `false` when `np >= k`: the factor `(k/(np))^ξ̂` no longer extrapolates
    /// and the asymptotic justification does not apply.
    pub extrapolating: bool,
}

fn check_setup(k: usize, n: usize, p: f64) -> Result<()> {
    if k == 0 || k >= n {
        return Err(Error::KOutOfRange { k, n });
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("p must lie in (0,1), got {p}")));
    }
    Ok(())
}

/// `k/(np)`.
pub fn extrapolation_ratio(k: usize, n: usize, p: f64) -> f64 {
    k as f64 / (n as f64 * p)
}

/// `anchor · (k/(np))^xi`.
pub fn weissman_extrapolate(anchor: f64, k: usize, n: usize, p: f64, xi: f64) -> f64 {
    anchor * extrapolation_ratio(k, n, p).powf(xi)
}

fn estimate(kind: QuantileKind, anchor: f64, k: usize, n: usize, p: f64, xi: f64) -> QuantileEstimate {
    QuantileEstimate {
        p,
        k,
        value: weissman_extrapolate(anchor, k, n, p, xi),
        kind,
        anchor,
        extrapolating: (n as f64) * p < k as f64,
    }
}

/// `Q̂^KM(1-k/n) · (k/(np))^(1/α̂^MLE_k)` with a precomputed curve.
pub fn weissman_mle_with_curve(sample: &CensoredSample, curve: &KmCurve, k: usize, p: f64) -> Result<QuantileEstimate> {
    let n = sample.len();
    check_setup(k, n, p)?;
    let xi = hill_censored(&sample.top_k(k)?)?.xi_hat;
    let anchor = curve.upper_quantile(k as f64 / n as f64)?;
    Ok(estimate(QuantileKind::Mle, anchor, k, n, p, xi))
}

/// Weissman estimator with the censored Hill index and Kaplan–Meier anchor.
pub fn weissman_mle(sample: &CensoredSample, k: usize, p: f64) -> Result<QuantileEstimate> {
    weissman_mle_with_curve(sample, &kaplan_meier(sample), k, p)
}

/// Pure expert estimator `Q̂^EX(1-k/n) · (k/(np))^(1/β)`.
pub fn weissman_expert(
    expert: &dyn AnchorQuantile,
    beta: f64,
    k: usize,
    n: usize,
    p: f64,
) -> Result<QuantileEstimate> {
    check_setup(k, n, p)?;
    check_positive("beta", beta)?;
    let anchor = expert.upper_quantile(k as f64 / n as f64)?;
    Ok(estimate(QuantileKind::Expert, anchor, k, n, p, 1.0 / beta))
}

/// Combined estimator at `λ = 1`:
///
/// ```text
/// [Q̂^KM(1-k/n)(k/(np))^(1/α̂^MLE)]^p̂ · [Q̂^EX(1-k/n)(k/(np))^(1/β)]^(1-p̂)
/// ```
///
/// Without an expert anchor this is `Q̂^KM(1-k/n) · (k/(np))^(1/α̂^P_k)`.
/// When `p̂_k = 0` the data branch carries no weight and is skipped.
pub fn weissman_combined_with_curve(
    sample: &CensoredSample,
    curve: &KmCurve,
    k: usize,
    p: f64,
    beta: f64,
    expert: Option<&dyn AnchorQuantile>,
) -> Result<QuantileEstimate> {
    let n = sample.len();
    check_setup(k, n, p)?;
    check_positive("beta", beta)?;
    let view = sample.top_k(k)?;
    let tail = k as f64 / n as f64;
    let Some(expert) = expert else {
        let est = perturbed_estimator(&view, &Penalty::new(1.0)?.with_beta(beta)?)?;
        let anchor = curve.upper_quantile(tail)?;
        return Ok(estimate(QuantileKind::Combined, anchor, k, n, p, est.xi_hat));
    };
    let p_hat = view.p_hat();
    let expert_anchor = expert.upper_quantile(tail)?;
    let expert_branch = weissman_extrapolate(expert_anchor, k, n, p, 1.0 / beta);
    if p_hat == 0.0 {
        return Ok(QuantileEstimate {
            value: expert_branch,
            anchor: expert_anchor,
            kind: QuantileKind::Combined,
            ..estimate(QuantileKind::Combined, expert_anchor, k, n, p, 1.0 / beta)
        });
    }
    let xi_mle = hill_censored(&view)?.xi_hat;
    let km_anchor = curve.upper_quantile(tail)?;
    let data_branch = weissman_extrapolate(km_anchor, k, n, p, xi_mle);
    let value = (p_hat * data_branch.ln() + (1.0 - p_hat) * expert_branch.ln()).exp();
    let anchor = (p_hat * km_anchor.ln() + (1.0 - p_hat) * expert_anchor.ln()).exp();
    Ok(QuantileEstimate {
        p,
        k,
        value,
        kind: QuantileKind::Combined,
        anchor,
        extrapolating: (n as f64) * p < k as f64,
    })
}

pub fn weissman_combined(
    sample: &CensoredSample,
    k: usize,
    p: f64,
    beta: f64,
    expert: Option<&dyn AnchorQuantile>,
) -> Result<QuantileEstimate> {
    weissman_combined_with_curve(sample, &kaplan_meier(sample), k, p, beta, expert)
}

/// Expert-only estimate from the ultimates:
/// `Q̂^ULT(1-k/n) · (k/(np))^(H^U_k)`.
pub fn weissman_ultimates(ultimates: &EmpiricalQuantiles, k: usize, p: f64) -> Result<QuantileEstimate> {
    let n = ultimates.len();
    check_setup(k, n, p)?;
    let xi = ultimates.hill_xi(k)?;
    let anchor = ultimates.upper_quantile(k as f64 / n as f64)?;
    Ok(estimate(QuantileKind::Ultimates, anchor, k, n, p, xi))
}
