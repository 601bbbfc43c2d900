//! Gamma-prior reading of the entropy penalty, and the Bayesian benchmark
//! estimators for censored tails.
//!
//! The entropy-penalized likelihood is proportional to a gamma density in `α`,
//! so `α̂^P` is the mode of a gamma posterior whose prior hyper-parameters are
//! built from the censored points only.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::estimators::{Penalty, TailSums};
use crate::model::{EstimatorKind, TailEstimate, TailView};
use crate::special::ln_gamma_interval_mass;

/// Gamma distribution in shape/rate form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaParams {
    pub shape: f64,
    pub rate: f64,
}

impl GammaParams {
    /// Accepts `rate = 0` (improper flat prior); everything else positive.
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        check_positive("shape", shape)?;
        if !(rate.is_finite() && rate >= 0.0) {
            return Err(Error::InvalidParameter(format!("rate must be nonnegative, got {rate}")));
        }
        Ok(Self { shape, rate })
    }

    pub fn mean(&self) -> Result<f64> {
        self.check_rate()?;
        Ok(self.shape / self.rate)
    }

    fn check_rate(&self) -> Result<()> {
        if self.rate > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter("gamma rate is zero".into()))
        }
    }
}

/// Prior hyper-parameters `α₀ = Σλ_i(1-ε_i) + 1`, `β₀ = Σλ_i(1-ε_i)/β_i`.
pub fn prior_hyperparams(view: &TailView<'_>, penalty: &Penalty) -> Result<GammaParams> {
    let s = TailSums::collect(view, penalty)?;
    Ok(GammaParams { shape: s.lambda + 1.0, rate: s.lambda_over_beta })
}

/// Posterior `α* = Σ(ε_i + λ_i(1-ε_i)) + 1`, `β* = Σ(λ_i(1-ε_i)/β_i + log(z_i/t))`.
pub fn posterior_params(view: &TailView<'_>, penalty: &Penalty) -> Result<GammaParams> {
    let s = TailSums::collect(view, penalty)?;
    Ok(GammaParams { shape: s.uncensored + s.lambda + 1.0, rate: s.lambda_over_beta + s.log_spacings })
}

/// `(shape - 1)/rate`. Needs `shape >= 1` and a positive rate.
pub fn prior_mode(params: &GammaParams) -> Result<f64> {
    params.check_rate()?;
    if params.shape < 1.0 {
        return Err(Error::InvalidParameter(format!("mode needs shape >= 1, got {}", params.shape)));
    }
    Ok((params.shape - 1.0) / params.rate)
}

/// `shape / rate²`.
pub fn prior_variance(params: &GammaParams) -> Result<f64> {
    params.check_rate()?;
    Ok(params.shape / (params.rate * params.rate))
}

/// Gamma parameters with mean `beta` and variance `sigma2`:
/// `a = β²/σ²`, `b = β/σ²`.
pub fn moment_match(beta: f64, sigma2: f64) -> Result<GammaParams> {
    check_positive("beta", beta)?;
    check_positive("sigma2", sigma2)?;
    Ok(GammaParams { shape: beta * beta / sigma2, rate: beta / sigma2 })
}

/// Posterior mean under a Gamma(a, b) prior: `(a + Σε) / (b + Σlog)`.
/// `a = b = 0` gives back the censored Hill estimator.
pub fn bayes_gamma_estimator(view: &TailView<'_>, prior: &GammaParams) -> Result<TailEstimate> {
    let s = TailSums::unpenalized(view);
    let num = prior.shape + s.uncensored;
    let den = prior.rate + s.log_spacings;
    if den <= 0.0 {
        return Err(Error::DegenerateLogSpacing);
    }
    if num <= 0.0 {
        return Err(Error::NoUncensoredExceedance { exceedances: s.k });
    }
    Ok(TailEstimate::new(EstimatorKind::BayesGamma, num / den, view, None))
}

/// Estimator under the maximal data information prior:
/// `[1 + Σε + √((1+Σε)² + 4Σlog)] / (2Σlog)`.
pub fn bayes_mdi_estimator(view: &TailView<'_>) -> Result<TailEstimate> {
    let s = TailSums::unpenalized(view);
    if s.log_spacings <= 0.0 {
        return Err(Error::DegenerateLogSpacing);
    }
    let m = 1.0 + s.uncensored;
    let alpha = (m + (m * m + 4.0 * s.log_spacings).sqrt()) / (2.0 * s.log_spacings);
    Ok(TailEstimate::new(EstimatorKind::BayesMdi, alpha, view, None))
}

/// Posterior mean of `α` under a uniform prior on `[b1, b2]` (use
/// `f64::INFINITY` for an open upper end):
///
/// ```text
/// (m+1)/S · [P(m+2, b2 S) - P(m+2, b1 S)] / [P(m+1, b2 S) - P(m+1, b1 S)]
/// ```
///
/// with `m = Σε`, `S = Σlog`, and `P` the regularized lower incomplete gamma.
/// Both differences are taken in log space.
pub fn uniform_prior_posterior_mean(view: &TailView<'_>, b1: f64, b2: f64) -> Result<TailEstimate> {
    if !(b1 >= 0.0 && b2 > b1) {
        return Err(Error::InvalidParameter(format!("need 0 <= b1 < b2, got [{b1}, {b2}]")));
    }
    let s = TailSums::unpenalized(view);
    if s.log_spacings <= 0.0 {
        return Err(Error::DegenerateLogSpacing);
    }
    let m = s.uncensored;
    let sl = s.log_spacings;
    if !(b1 * sl < b2 * sl) {
        return Err(Error::IntervalMassUnderflow { b1, b2 });
    }
    let upper = ln_gamma_interval_mass(m + 2.0, b1 * sl, b2 * sl);
    let lower = ln_gamma_interval_mass(m + 1.0, b1 * sl, b2 * sl);
    if !upper.is_finite() || !lower.is_finite() {
        return Err(Error::IntervalMassUnderflow { b1, b2 });
    }
    let alpha = (m + 1.0) / sl * (upper - lower).exp();
    Ok(TailEstimate::new(EstimatorKind::UniformPrior, alpha, view, None))
}
