//! Asymptotic normality of `1/α̂^P_k` under the Hall class.
//!
//! With `r₁ = (1-p)(1-λ)`, `r₂ = (1-p)/β` and `δ = lim √k (k/n)^(ν*/α_c)`,
//!
//! ```text
//! √k (1/α̂^P_k - (λα₂/β + 1)/(λα₂ + α))  →  N(𝓜, 𝓥)
//! ```
//!
//! The limit is the delta-method image of three independent normal limits:
//! the Hill statistic `H_k`, and the censored fractions entering the
//! numerator and denominator. Writing `g(λ) = λ/β + (1-λ)/α_c`,
//!
//! ```text
//! 𝓥 = 1/(α_c²(1-r₁)²) + g(λ)² p(1-p)/(1-r₁)⁴
//! ```
//!
//! which is the same quantity as `(λ/(β(1-λ)) + 1/α_c)²(1-λ)²` in the
//! unsimplified form, but has no removable singularity at `λ = 1`.
//!
//! The mean carries the factor `(1-λ)` on the censored-fraction term that the
//! denominator contributes; see [`theorem1_mean`].

use serde::{Deserialize, Serialize};

use crate::distributions::CombinedHallParams;
use crate::error::{check_positive, Error, Result};
use crate::estimators::hill_censored;
use crate::model::CensoredSample;

/// Everything the asymptotic formulas depend on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRegime {
    pub hall: CombinedHallParams,
    pub k: usize,
    pub n: usize,
    pub delta: f64,
    pub lambda: f64,
    pub beta: f64,
}

impl AsymptoticRegime {
    /// Regime at finite `(k, n)` with the plug-in `δ = √k (k/n)^(ν*/α_c)`.
    pub fn at(hall: CombinedHallParams, k: usize, n: usize, lambda: f64, beta: f64) -> Result<Self> {
        let delta = delta_of(k, n, &hall)?;
        Self::with_delta(hall, k, n, delta, lambda, beta)
    }

    pub fn with_delta(
        hall: CombinedHallParams,
        k: usize,
        n: usize,
        delta: f64,
        lambda: f64,
        beta: f64,
    ) -> Result<Self> {
        if k == 0 || k >= n {
            return Err(Error::KOutOfRange { k, n });
        }
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(Error::InvalidRegime(format!("delta must be nonnegative, got {delta}")));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidRegime(format!("lambda must be nonnegative, got {lambda}")));
        }
        check_positive("beta", beta)?;
        Ok(Self { hall, k, n, delta, lambda, beta })
    }

    pub fn r1(&self) -> f64 {
        (1.0 - self.hall.p) * (1.0 - self.lambda)
    }

    pub fn r2(&self) -> f64 {
        (1.0 - self.hall.p) / self.beta
    }

    /// `g(λ) = λ/β + (1-λ)/α_c`, the sensitivity of `1/α̂^P` to the censored
    /// fraction (up to the factor `(1-r₁)⁻²`).
    pub fn g(&self) -> f64 {
        self.lambda / self.beta + (1.0 - self.lambda) / self.hall.alpha_c
    }

    /// Centering `(λα₂/β + 1)/(λα₂ + α)` of `1/α̂^P_k`.
    pub fn target(&self) -> f64 {
        let h = &self.hall;
        (self.lambda * h.alpha2 / self.beta + 1.0) / (self.lambda * h.alpha2 + h.alpha)
    }

    /// Order of the neglected bias term, `(k/n)^(ν*/α_c)`; zero without a
    /// second-order term.
    pub fn remainder_scale(&self) -> f64 {
        match self.hall.second_order {
            None => 0.0,
            Some(so) => (self.k as f64 / self.n as f64).powf(so.nu_star / self.hall.alpha_c),
        }
    }

    fn check_r1(&self) -> Result<f64> {
        let r1 = self.r1();
        if r1 >= 1.0 {
            return Err(Error::InvalidRegime(format!("r1 = {r1} >= 1")));
        }
        Ok(r1)
    }
}

/// `√k (k/n)^(ν*/α_c)`, or 0 for a tail without second-order term.
pub fn delta_of(k: usize, n: usize, hall: &CombinedHallParams) -> Result<f64> {
    if k == 0 || k >= n {
        return Err(Error::KOutOfRange { k, n });
    }
    Ok(match hall.second_order {
        None => 0.0,
        Some(so) => (k as f64).sqrt() * (k as f64 / n as f64).powf(so.nu_star / hall.alpha_c),
    })
}

/// Common factor `δ ν* C^(-ν*/α_c) / (α_c + ν*)` of the second-order means.
fn bias_scale(hall: &CombinedHallParams, delta: f64) -> Option<(f64, f64, f64)> {
    let so = hall.second_order?;
    let scale = delta * so.nu_star * hall.c.powf(-so.nu_star / hall.alpha_c) / (hall.alpha_c + so.nu_star);
    Some((scale, so.d_star, so.d_over_alpha_star))
}

/// Asymptotic mean `𝓜` of `√k(1/α̂^P_k - target)`:
///
/// ```text
/// 𝓜 = -δν*C^(-ν*/α_c)/((1-r₁)(α_c+ν*)) · [ D*/α_c
///        + p(1-p)(D/α)* α_c (λ/β + (λr₂ + 1/α_c)(1-λ)/(1-r₁)) ]
/// ```
///
/// The `(1-λ)` factor comes from the limit of the censored fraction weighted
/// by `(1-λ)` in the denominator of `1/α̂^P_k`.
pub fn theorem1_mean(regime: &AsymptoticRegime) -> Result<f64> {
    let r1 = regime.check_r1()?;
    let Some((scale, d_star, d_over_alpha)) = bias_scale(&regime.hall, regime.delta) else {
        return Ok(0.0);
    };
    let h = &regime.hall;
    let lam = regime.lambda;
    let sensitivity = lam / regime.beta + (lam * regime.r2() + 1.0 / h.alpha_c) * (1.0 - lam) / (1.0 - r1);
    let bracket = d_star / h.alpha_c + h.p * (1.0 - h.p) * d_over_alpha * h.alpha_c * sensitivity;
    Ok(-scale * bracket / (1.0 - r1))
}

/// Asymptotic mean of `√k(1/α̂^MLE_k - 1/α)`:
/// `-δν*C^(-ν*/α_c)/(α_c+ν*) · [D*/α + (α₂/α)(D/α)*]`.
pub fn mle_asymptotic_mean(hall: &CombinedHallParams, delta: f64) -> f64 {
    match bias_scale(hall, delta) {
        None => 0.0,
        Some((scale, d_star, d_over_alpha)) => {
            -scale * (d_star / hall.alpha + hall.alpha2 / hall.alpha * d_over_alpha)
        }
    }
}

/// Asymptotic variance `𝓥`, in the form that is finite at `λ = 1`.
pub fn theorem1_variance(regime: &AsymptoticRegime) -> Result<f64> {
    let r1 = regime.check_r1()?;
    let h = &regime.hall;
    let one_m = 1.0 - r1;
    let g = regime.g();
    Ok(1.0 / (h.alpha_c * h.alpha_c * one_m * one_m) + g * g * h.p * (1.0 - h.p) / one_m.powi(4))
}

/// `𝓥` evaluated term by term in its unsimplified form; undefined at `λ = 1`.
pub fn theorem1_variance_unsimplified(regime: &AsymptoticRegime) -> Result<f64> {
    let r1 = regime.check_r1()?;
    if regime.lambda == 1.0 {
        return Err(Error::InvalidRegime("unsimplified variance is singular at lambda = 1".into()));
    }
    let h = &regime.hall;
    let lam = regime.lambda;
    let inner = lam / (regime.beta * (1.0 - lam)) + 1.0 / h.alpha_c;
    Ok(1.0 / (h.alpha_c.powi(2) * (1.0 - r1).powi(2))
        + inner * inner * (1.0 - lam).powi(2) * h.p * (1.0 - h.p) / (1.0 - r1).powi(4))
}

/// Leading asymptotic bias of `1/α̂^P_k` as an estimator of `1/α`:
/// `(λα₂/β + 1)/(λα₂ + α) - 1/α`. The `O((k/n)^(ν*/α_c))` remainder is
/// available as [`AsymptoticRegime::remainder_scale`].
pub fn theorem1_bias(regime: &AsymptoticRegime) -> f64 {
    regime.target() - 1.0 / regime.hall.alpha
}

/// Variance of `1/α̂^P_k` at `λ = 1`, `β = α`: `1/(k p α_c²)`.
pub fn combination_variance(k: usize, p: f64, alpha_c: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("p must lie in (0,1], got {p}")));
    }
    check_positive("alpha_c", alpha_c)?;
    Ok(1.0 / (k as f64 * p * alpha_c * alpha_c))
}

/// Variance of `1/α̂^MLE_k`: `1/(k p α²)`.
pub fn mle_variance(k: usize, p: f64, alpha: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter(format!("p must lie in (0,1], got {p}")));
    }
    check_positive("alpha", alpha)?;
    Ok(1.0 / (k as f64 * p * alpha * alpha))
}

/// `(𝓑 + 𝓜/√k)² + 𝓥/k`.
pub fn amse(regime: &AsymptoticRegime) -> Result<f64> {
    let k = regime.k as f64;
    let bias = theorem1_bias(regime) + theorem1_mean(regime)? / k.sqrt();
    Ok(bias * bias + theorem1_variance(regime)? / k)
}

/// Grid point minimizing [`amse`]; ties go to the smaller `λ`.
pub fn minimize_amse_over_lambda(regime: &AsymptoticRegime, grid: &[f64]) -> Result<f64> {
    let mut best: Option<(f64, f64)> = None;
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    for lam in sorted {
        let r = AsymptoticRegime { lambda: lam, ..*regime };
        let value = amse(&r)?;
        if best.is_none_or(|(_, b)| value < b) {
            best = Some((lam, value));
        }
    }
    best.map(|(lam, _)| lam).ok_or(Error::EmptyGrid)
}

/// Plug-in tail indices from data: `α̂_c` is the ordinary Hill estimator of the
/// observed `Z` (censoring ignored), `α̂` the censored Hill estimator and
/// `α̂₂ = α̂_c - α̂`.
pub fn plug_in_tail_indices(sample: &CensoredSample, k: usize) -> Result<(f64, f64, f64)> {
    let view = sample.top_k(k)?;
    let alpha_c = 1.0 / view.hill_statistic();
    let alpha = hill_censored(&view)?.alpha_hat;
    Ok((alpha_c, alpha, alpha_c - alpha))
}
