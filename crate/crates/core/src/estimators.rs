//! Point estimators of the tail index from censored data with expert
//! information on the censored points.
//!
//! Every estimator works on a [`TailView`]: the `k` largest order statistics
//! with threshold `Z^(k+1)`, the exceedances of a fixed level `u`, or the whole
//! sample with threshold `x0`. The estimators depend on the data only through
//! the sums collected in [`TailSums`].
//!
//! The penalized likelihood is
//!
//! ```text
//! log L^P(α) = Σ ε_i log f_α(z_i) + Σ (1-ε_i) log F̄_α(z_i) - Σ λ_i (1-ε_i) D_i(α)
//! ```
//!
//! with `λ_i = λ ω_i` and `D_i` one of the three [`PenaltyKind`]s. Each
//! penalty has a closed-form maximizer; [`numeric_mle_oracle`] finds the same
//! maximizer by root bracketing on the per-observation score and is used to
//! check the closed forms.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};
use crate::model::{EstimatorKind, TailEstimate, TailView};

/// Dissimilarity between the model tail index and the expert's.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PenaltyKind {
    /// `D(β, α) = α/β - 1 - log(α/β)`: entropy of the expert density relative
    /// to the model. Leads to the perturbed estimator.
    EntropyGtoF,
    /// `D(α, β) = β/α - 1 - log(β/α)`. Leads to the flipped estimator.
    EntropyFtoG,
    /// `(α - β)² / 2`.
    Squared,
}

impl PenaltyKind {
    pub fn value(&self, alpha: f64, beta: f64) -> f64 {
        match self {
            Self::EntropyGtoF => relative_entropy_unchecked(beta, alpha),
            Self::EntropyFtoG => relative_entropy_unchecked(alpha, beta),
            Self::Squared => 0.5 * (alpha - beta) * (alpha - beta),
        }
    }

    /// `dD/dα`.
    pub fn derivative(&self, alpha: f64, beta: f64) -> f64 {
        match self {
            Self::EntropyGtoF => 1.0 / beta - 1.0 / alpha,
            Self::EntropyFtoG => 1.0 / alpha - beta / (alpha * alpha),
            Self::Squared => alpha - beta,
        }
    }
}

/// Strength of the penalty and where the expert tail indices come from.
///
/// `weights` are indexed by the input position of each observation in the
/// sample; `beta`, when set, replaces every per-observation expert index.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Penalty {
    pub lambda: f64,
    pub weights: Option<Vec<f64>>,
    pub beta: Option<f64>,
}

impl Penalty {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!("lambda must be nonnegative, got {lambda}")));
        }
        Ok(Self { lambda, weights: None, beta: None })
    }

    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        check_positive("beta", beta)?;
        self.beta = Some(beta);
        Ok(self)
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(Error::InvalidParameter(format!("weights must be nonnegative, got {w}")));
        }
        self.weights = Some(weights);
        Ok(self)
    }

    fn weight(&self, view: &TailView<'_>, i: usize) -> Result<f64> {
        match &self.weights {
            None => Ok(1.0),
            Some(w) => {
                let idx = view.indices()[i];
                w.get(idx).copied().ok_or_else(|| {
                    Error::InvalidParameter(format!("no weight for observation {idx} ({} weights)", w.len()))
                })
            }
        }
    }

    /// `λ_i = λ ω_i` for entry `i` of the view.
    pub fn lambda_i(&self, view: &TailView<'_>, i: usize) -> Result<f64> {
        Ok(self.lambda * self.weight(view, i)?)
    }

    pub fn beta_i(&self, view: &TailView<'_>, i: usize) -> Result<f64> {
        match self.beta {
            Some(b) => Ok(b),
            None => view.beta(i),
        }
    }
}

/// Sufficient statistics of a view under a penalty. Censored entries with
/// `λ_i = 0` never look up their expert index.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TailSums {
    pub k: usize,
    /// `Σ ε_i`
    pub uncensored: f64,
    /// `Σ log(Z_i / threshold)`
    pub log_spacings: f64,
    /// `Σ λ_i (1-ε_i)`
    pub lambda: f64,
    /// `Σ λ_i (1-ε_i) / β_i`
    pub lambda_over_beta: f64,
    /// `Σ λ_i (1-ε_i) β_i`
    pub lambda_times_beta: f64,
}

impl TailSums {
    pub fn collect(view: &TailView<'_>, penalty: &Penalty) -> Result<Self> {
        let mut s = TailSums { k: view.k(), ..Default::default() };
        for (i, obs) in view.entries().iter().enumerate() {
            s.log_spacings += view.log_spacing(i);
            if obs.uncensored {
                s.uncensored += 1.0;
                continue;
            }
            let lam = penalty.lambda_i(view, i)?;
            if lam == 0.0 {
                continue;
            }
            let beta = penalty.beta_i(view, i)?;
            s.lambda += lam;
            s.lambda_over_beta += lam / beta;
            s.lambda_times_beta += lam * beta;
        }
        Ok(s)
    }

    /// Sums without any penalty: only `Σε` and the log-spacings.
    pub fn unpenalized(view: &TailView<'_>) -> Self {
        TailSums {
            k: view.k(),
            uncensored: view.n_uncensored() as f64,
            log_spacings: view.sum_log_spacings(),
            ..Default::default()
        }
    }
}

fn relative_entropy_unchecked(beta: f64, alpha: f64) -> f64 {
    let r = alpha / beta;
    r - 1.0 - r.ln()
}

/// Relative entropy between Pareto densities with indices `beta` (reference)
/// and `alpha`, sharing a scale: `α/β - 1 - log(α/β)`.
pub fn relative_entropy(beta: f64, alpha: f64) -> Result<f64> {
    check_positive("beta", beta)?;
    check_positive("alpha", alpha)?;
    Ok(relative_entropy_unchecked(beta, alpha))
}

/// Log-likelihood of one observation at threshold `t`, before penalization.
fn censored_term(z: f64, uncensored: bool, t: f64, alpha: f64) -> f64 {
    if uncensored {
        alpha.ln() + alpha * t.ln() - (alpha + 1.0) * z.ln()
    } else {
        alpha * (t.ln() - z.ln())
    }
}

/// The penalized log-likelihood of the view's entries, with the view's
/// threshold playing the role of the scale.
pub fn penalized_log_likelihood(view: &TailView<'_>, kind: PenaltyKind, penalty: &Penalty, alpha: f64) -> Result<f64> {
    check_positive("alpha", alpha)?;
    let t = view.threshold();
    let mut total = 0.0;
    for (i, obs) in view.entries().iter().enumerate() {
        total += censored_term(obs.z, obs.uncensored, t, alpha);
        if !obs.uncensored {
            let lam = penalty.lambda_i(view, i)?;
            if lam > 0.0 {
                total -= lam * kind.value(alpha, penalty.beta_i(view, i)?);
            }
        }
    }
    Ok(total)
}

/// Derivative of [`penalized_log_likelihood`] in `α`, summed term by term.
pub fn penalized_score(view: &TailView<'_>, kind: PenaltyKind, penalty: &Penalty, alpha: f64) -> Result<f64> {
    check_positive("alpha", alpha)?;
    let t = view.threshold();
    let mut total = 0.0;
    for (i, obs) in view.entries().iter().enumerate() {
        let spacing = (obs.z / t).ln();
        if obs.uncensored {
            total += 1.0 / alpha - spacing;
        } else {
            total -= spacing;
            let lam = penalty.lambda_i(view, i)?;
            if lam > 0.0 {
                total -= lam * kind.derivative(alpha, penalty.beta_i(view, i)?);
            }
        }
    }
    Ok(total)
}

fn hill_from_sums(s: &TailSums) -> Result<f64> {
    if s.uncensored == 0.0 {
        return Err(Error::NoUncensoredExceedance { exceedances: s.k });
    }
    if s.log_spacings <= 0.0 {
        return Err(Error::DegenerateLogSpacing);
    }
    Ok(s.uncensored / s.log_spacings)
}

/// Hill estimator adapted for censoring: `Σε / Σ log(Z/threshold)`, which in
/// order-statistics form is `p̂_k / H_k`.
pub fn hill_censored(view: &TailView<'_>) -> Result<TailEstimate> {
    let alpha = hill_from_sums(&TailSums::unpenalized(view))?;
    Ok(TailEstimate::new(EstimatorKind::Mle, alpha, view, None))
}

/// Closed-form maximizer of the entropy-penalized likelihood:
///
/// ```text
/// α̂^P = Σ(ε_i + λ_i(1-ε_i)) / Σ(log(Z_i/t) + λ_i(1-ε_i)/β_i)
/// ```
///
/// At `λ = 0` this is [`hill_censored`]; as `λ → ∞` it tends to the weighted
/// harmonic mean of the expert indices. It stays finite when every entry is
/// censored as long as `λ > 0`.
pub fn perturbed_estimator(view: &TailView<'_>, penalty: &Penalty) -> Result<TailEstimate> {
    let s = TailSums::collect(view, penalty)?;
    let num = s.uncensored + s.lambda;
    if num == 0.0 {
        return Err(Error::NoUncensoredExceedance { exceedances: s.k });
    }
    let den = s.log_spacings + s.lambda_over_beta;
    if den <= 0.0 {
        return Err(Error::DegenerateLogSpacing);
    }
    Ok(TailEstimate::new(EstimatorKind::Perturbed, num / den, view, Some(penalty.lambda)))
}

/// Positive root of `a x² + b x - c = 0` with `a, c >= 0`, computed without
/// cancellation. Falls back to `c / b` when `a = 0`.
fn positive_root(a: f64, b: f64, c: f64) -> Option<f64> {
    let disc = (b * b + 4.0 * a * c).sqrt();
    let root = if b > 0.0 {
        2.0 * c / (b + disc)
    } else if a > 0.0 {
        (disc - b) / (2.0 * a)
    } else {
        return None;
    };
    (root.is_finite() && root > 0.0).then_some(root)
}

/// Maximizer of the likelihood penalized by `D(α, β) = β/α - 1 - log(β/α)`:
/// the positive root of `Σlog·α² - (Σε - Σλ_i(1-ε_i))·α - Σλ_iβ_i(1-ε_i) = 0`.
/// Tends to the weighted arithmetic mean of the expert indices as `λ → ∞`.
pub fn flipped_estimator(view: &TailView<'_>, penalty: &Penalty) -> Result<TailEstimate> {
    let s = TailSums::collect(view, penalty)?;
    if s.log_spacings <= 0.0 {
        return Err(Error::DegenerateLogSpacing);
    }
    let alpha = positive_root(s.log_spacings, s.lambda - s.uncensored, s.lambda_times_beta)
        .ok_or(Error::NoUncensoredExceedance { exceedances: s.k })?;
    Ok(TailEstimate::new(EstimatorKind::Flipped, alpha, view, Some(penalty.lambda)))
}

/// Maximizer of the likelihood penalized by `(α - β)²/2`: the positive root of
/// `λ̄α² + (Σlog - Σλ_iβ_i(1-ε_i))α - Σε = 0` with `λ̄ = Σλ_i(1-ε_i)`.
/// Without penalized censored entries this is [`hill_censored`].
pub fn squared_penalty_estimator(view: &TailView<'_>, penalty: &Penalty) -> Result<TailEstimate> {
    let s = TailSums::collect(view, penalty)?;
    if s.lambda == 0.0 {
        let alpha = hill_from_sums(&s)?;
        return Ok(TailEstimate::new(EstimatorKind::Squared, alpha, view, Some(penalty.lambda)));
    }
    let alpha = positive_root(s.lambda, s.log_spacings - s.lambda_times_beta, s.uncensored)
        .ok_or(Error::NoUncensoredExceedance { exceedances: s.k })?;
    Ok(TailEstimate::new(EstimatorKind::Squared, alpha, view, Some(penalty.lambda)))
}

/// Weighted arithmetic and harmonic means of the expert indices over the
/// censored entries, with weights `ω_i` from the penalty (`λ` cancels).
pub fn expert_means(view: &TailView<'_>, penalty: &Penalty) -> Result<(f64, f64)> {
    let (mut w_sum, mut wb_sum, mut w_over_b) = (0.0, 0.0, 0.0);
    for (i, obs) in view.entries().iter().enumerate() {
        if obs.uncensored {
            continue;
        }
        let w = penalty.weight(view, i)?;
        if w == 0.0 {
            continue;
        }
        let b = penalty.beta_i(view, i)?;
        w_sum += w;
        wb_sum += w * b;
        w_over_b += w / b;
    }
    if w_sum == 0.0 {
        return Err(Error::NoCensored);
    }
    Ok((wb_sum / w_sum, w_sum / w_over_b))
}

/// Dispatches to the closed form that maximizes the given penalty.
pub fn closed_form(view: &TailView<'_>, kind: PenaltyKind, penalty: &Penalty) -> Result<TailEstimate> {
    match kind {
        PenaltyKind::EntropyGtoF => perturbed_estimator(view, penalty),
        PenaltyKind::EntropyFtoG => flipped_estimator(view, penalty),
        PenaltyKind::Squared => squared_penalty_estimator(view, penalty),
    }
}

/// Maximizes the penalized log-likelihood numerically: brackets the sign
/// change of the score starting from `[1e-8, 1e3]` times a Hill-type guess,
/// widening geometrically, then bisects to full double precision.
pub fn numeric_mle_oracle(view: &TailView<'_>, kind: PenaltyKind, penalty: &Penalty) -> Result<f64> {
    let score = |a: f64| penalized_score(view, kind, penalty, a);
    let sl = view.sum_log_spacings();
    let guess = if sl > 0.0 { view.k().max(1) as f64 / sl } else { 1.0 };
    let (mut lo, mut hi) = (guess * 1e-8, guess * 1e3);
    let mut widen = 0;
    while score(lo)? <= 0.0 {
        lo *= 1e-3;
        widen += 1;
        if widen > 60 || lo < 1e-280 {
            return Err(Error::NoInteriorMaximum);
        }
    }
    widen = 0;
    while score(hi)? >= 0.0 {
        hi *= 1e3;
        widen += 1;
        if widen > 60 || !hi.is_finite() {
            return Err(Error::NoInteriorMaximum);
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if score(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CensoredSample, Observation};
    use std::f64::consts::E;

    /// `Z = (e³, e², e)`, indicators `(1, 0, 1)`, β = 2 on the open claim.
    fn fixture() -> CensoredSample {
        CensoredSample::new(vec![
            Observation::closed(E.powi(3)),
            Observation::open(E * E, Some(2.0)),
            Observation::closed(E),
        ])
        .unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1e-300)
    }

    #[test]
    fn relative_entropy_values() {
        assert_eq!(relative_entropy(3.0, 3.0).unwrap(), 0.0);
        assert!((relative_entropy(1.0, 2.0).unwrap() - (1.0 - 2f64.ln())).abs() < 1e-15);
        assert!((relative_entropy(2.0, 1.0).unwrap() - (0.5 - 1.0 - 0.5f64.ln())).abs() < 1e-15);
        assert!(relative_entropy(0.0, 1.0).is_err());
        assert!(relative_entropy(1.0, -1.0).is_err());
    }

    #[test]
    fn relative_entropy_matches_integral() {
        // ∫_{x0}^∞ log(g/f) g with x0 = 1, after substituting x = e^t.
        for (alpha, beta) in [(2.0f64, 1.0f64), (1.0, 2.0), (0.7, 3.1)] {
            let g = |x: f64| beta * x.powf(-beta - 1.0);
            let f = |x: f64| alpha * x.powf(-alpha - 1.0);
            let integrand = |t: f64| {
                let x = t.exp();
                (g(x) / f(x)).ln() * g(x) * x
            };
            let (a, b, m) = (0.0, 60.0 / beta.min(alpha), 20_000);
            let h = (b - a) / m as f64;
            let mut s = integrand(a) + integrand(b);
            for i in 1..m {
                s += integrand(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
            }
            let quad = s * h / 3.0;
            assert!((quad - relative_entropy(beta, alpha).unwrap()).abs() < 1e-8, "{alpha} {beta}");
        }
    }

    #[test]
    fn log_likelihood_hand_values() {
        let s = CensoredSample::new(vec![Observation::closed(E)]).unwrap().with_x0(1.0).unwrap();
        let v = s.scale_view().unwrap();
        let ll = penalized_log_likelihood(&v, PenaltyKind::EntropyGtoF, &Penalty::new(0.0).unwrap(), 1.0).unwrap();
        assert!((ll + 2.0).abs() < 1e-15);

        let s = CensoredSample::new(vec![Observation::open(E, Some(2.0))]).unwrap().with_x0(1.0).unwrap();
        let v = s.scale_view().unwrap();
        let ll = penalized_log_likelihood(&v, PenaltyKind::EntropyGtoF, &Penalty::new(3.0).unwrap(), 2.0).unwrap();
        assert!((ll + 2.0).abs() < 1e-15);
    }

    #[test]
    fn lambda_zero_gives_plain_censored_likelihood() {
        let s = fixture();
        let v = s.top_k(2).unwrap();
        let pen = Penalty::new(0.0).unwrap();
        for kind in [PenaltyKind::EntropyGtoF, PenaltyKind::EntropyFtoG, PenaltyKind::Squared] {
            let ll = penalized_log_likelihood(&v, kind, &pen, 0.8).unwrap();
            // e³ uncensored, e² censored, threshold e
            let expected = 0.8f64.ln() + 0.8 - 1.8 * 3.0 + 0.8 * (1.0 - 2.0);
            assert!((ll - expected).abs() < 1e-14);
        }
    }

    #[test]
    fn hill_censored_fixture() {
        let s = fixture();
        let est = hill_censored(&s.top_k(2).unwrap()).unwrap();
        assert!((est.alpha_hat - 1.0 / 3.0).abs() < 1e-15);
        assert!((est.xi_hat - 3.0).abs() < 1e-14);
        assert_eq!(est.p_hat, 0.5);
        assert_eq!(est.k, 2);

        let est = hill_censored(&s.top_k(1).unwrap()).unwrap();
        assert!((est.alpha_hat - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hill_censored_needs_an_uncensored_exceedance() {
        let s = CensoredSample::new(vec![
            Observation::open(9.0, Some(1.0)),
            Observation::open(5.0, Some(1.0)),
            Observation::closed(2.0),
        ])
        .unwrap();
        let v = s.top_k(2).unwrap();
        assert_eq!(hill_censored(&v).unwrap_err(), Error::NoUncensoredExceedance { exceedances: 2 });
        // the perturbed estimator stays finite once λ > 0
        let est = perturbed_estimator(&v, &Penalty::new(1.0).unwrap()).unwrap();
        assert!(est.alpha_hat.is_finite() && est.alpha_hat > 0.0);
    }

    #[test]
    fn perturbed_fixture_values() {
        let s = fixture();
        let v = s.top_k(2).unwrap();
        let est = perturbed_estimator(&v, &Penalty::new(1.0).unwrap()).unwrap();
        assert!((est.alpha_hat - 4.0 / 7.0).abs() < 1e-15);
        let est0 = perturbed_estimator(&v, &Penalty::new(0.0).unwrap()).unwrap();
        assert_eq!(est0.alpha_hat, hill_censored(&v).unwrap().alpha_hat);
        let big = perturbed_estimator(&v, &Penalty::new(1e12).unwrap()).unwrap();
        assert!((big.alpha_hat - 2.0).abs() < 1e-9);
    }

    #[test]
    fn flipped_fixture_values() {
        let s = fixture();
        let v = s.top_k(2).unwrap();
        let est = flipped_estimator(&v, &Penalty::new(1.0).unwrap()).unwrap();
        assert!((est.alpha_hat - 24f64.sqrt() / 6.0).abs() < 1e-15);
        let est0 = flipped_estimator(&v, &Penalty::new(0.0).unwrap()).unwrap();
        assert!((est0.alpha_hat - 1.0 / 3.0).abs() < 1e-15);

        let s = CensoredSample::new(vec![
            Observation::closed(50.0),
            Observation::open(20.0, Some(1.0)),
            Observation::open(10.0, Some(3.0)),
            Observation::closed(2.0),
        ])
        .unwrap();
        let est = flipped_estimator(&s.top_k(3).unwrap(), &Penalty::new(1e12).unwrap()).unwrap();
        assert!((est.alpha_hat - 2.0).abs() < 1e-9);
    }

    #[test]
    fn squared_fixture_values() {
        let s = CensoredSample::new(vec![Observation::open(E, Some(2.0))]).unwrap().with_x0(1.0).unwrap();
        let est = squared_penalty_estimator(&s.scale_view().unwrap(), &Penalty::new(1.0).unwrap()).unwrap();
        assert!((est.alpha_hat - 1.0).abs() < 1e-15);

        let s = fixture();
        let v = s.top_k(2).unwrap();
        let hill = hill_censored(&v).unwrap().alpha_hat;
        let tiny = squared_penalty_estimator(&v, &Penalty::new(1e-14).unwrap()).unwrap();
        assert!((tiny.alpha_hat - hill).abs() < 1e-12);
        let zero = squared_penalty_estimator(&v, &Penalty::new(0.0).unwrap()).unwrap();
        assert_eq!(zero.alpha_hat, hill);
    }

    #[test]
    fn expert_means_values() {
        let s = CensoredSample::new(vec![
            Observation::closed(50.0),
            Observation::open(20.0, Some(1.0)),
            Observation::open(10.0, Some(3.0)),
            Observation::closed(2.0),
        ])
        .unwrap();
        let v = s.top_k(3).unwrap();
        let (am, hm) = expert_means(&v, &Penalty::new(1.0).unwrap()).unwrap();
        assert!((am - 2.0).abs() < 1e-15);
        assert!((hm - 1.5).abs() < 1e-15);
        let (am, hm) = expert_means(&v, &Penalty::new(1.0).unwrap().with_beta(2.0).unwrap()).unwrap();
        assert_eq!((am, hm), (2.0, 2.0));

        let s = CensoredSample::from_parts(&[3.0, 2.0, 1.0], &[true; 3], None).unwrap();
        assert_eq!(expert_means(&s.top_k(2).unwrap(), &Penalty::new(1.0).unwrap()), Err(Error::NoCensored));
    }

    #[test]
    fn missing_beta_is_an_error_only_when_penalized() {
        let s = CensoredSample::new(vec![
            Observation::closed(30.0),
            Observation::open(20.0, None),
            Observation::closed(2.0),
        ])
        .unwrap();
        let v = s.top_k(2).unwrap();
        assert_eq!(
            perturbed_estimator(&v, &Penalty::new(1.0).unwrap()).unwrap_err(),
            Error::MissingBeta { index: 1 }
        );
        assert!(perturbed_estimator(&v, &Penalty::new(0.0).unwrap()).is_ok());
        assert!(perturbed_estimator(&v, &Penalty::new(1.0).unwrap().with_beta(2.0).unwrap()).is_ok());
    }

    #[test]
    fn weights_scale_lambda_per_observation() {
        let s = CensoredSample::new(vec![
            Observation::open(40.0, Some(1.0)),
            Observation::closed(30.0),
            Observation::open(20.0, Some(4.0)),
            Observation::closed(2.0),
        ])
        .unwrap();
        let v = s.top_k(3).unwrap();
        let pen = Penalty::new(2.0).unwrap().with_weights(vec![0.5, 9.0, 2.0, 9.0]).unwrap();
        let sums = TailSums::collect(&v, &pen).unwrap();
        assert!((sums.lambda - 5.0).abs() < 1e-15);
        assert!((sums.lambda_over_beta - (1.0 + 1.0)).abs() < 1e-15);
        assert!((sums.lambda_times_beta - (1.0 + 16.0)).abs() < 1e-15);
    }

    #[test]
    fn oracle_agrees_on_fixture() {
        let s = fixture();
        let v = s.top_k(2).unwrap();
        let pen = Penalty::new(1.0).unwrap();
        for kind in [PenaltyKind::EntropyGtoF, PenaltyKind::EntropyFtoG, PenaltyKind::Squared] {
            let closed = closed_form(&v, kind, &pen).unwrap().alpha_hat;
            let num = numeric_mle_oracle(&v, kind, &pen).unwrap();
            assert!(close(num, closed, 1e-10), "{kind:?}: {num} vs {closed}");
        }
        let num = numeric_mle_oracle(&v, PenaltyKind::EntropyGtoF, &Penalty::new(0.0).unwrap()).unwrap();
        assert!(close(num, 1.0 / 3.0, 1e-10));
    }

    #[test]
    fn oracle_matches_exact_pareto_mle() {
        let s = CensoredSample::from_parts(&[1.3, 4.0, 2.2, 9.5, 1.1], &[true, false, true, true, false], None)
            .unwrap()
            .with_x0(1.0)
            .unwrap();
        let v = s.scale_view().unwrap();
        let closed = 3.0 / [1.3f64, 4.0, 2.2, 9.5, 1.1].iter().map(|z| z.ln()).sum::<f64>();
        let num = numeric_mle_oracle(&v, PenaltyKind::EntropyGtoF, &Penalty::new(0.0).unwrap()).unwrap();
        assert!(close(num, closed, 1e-10));
        assert!(close(hill_censored(&v).unwrap().alpha_hat, closed, 1e-14));
    }

    #[test]
    fn oracle_reports_missing_interior_maximum() {
        let s = CensoredSample::new(vec![
            Observation::open(9.0, Some(1.0)),
            Observation::open(5.0, Some(1.0)),
            Observation::closed(2.0),
        ])
        .unwrap();
        let v = s.top_k(2).unwrap();
        assert_eq!(
            numeric_mle_oracle(&v, PenaltyKind::EntropyGtoF, &Penalty::new(0.0).unwrap()),
            Err(Error::NoInteriorMaximum)
        );
    }

    #[test]
    fn score_is_the_derivative_of_the_likelihood() {
        let s = fixture();
        let v = s.top_k(2).unwrap();
        let pen = Penalty::new(0.7).unwrap();
        for kind in [PenaltyKind::EntropyGtoF, PenaltyKind::EntropyFtoG, PenaltyKind::Squared] {
            for a in [0.3, 1.0, 2.5] {
                let h = 1e-6 * a;
                let fd = (penalized_log_likelihood(&v, kind, &pen, a + h).unwrap()
                    - penalized_log_likelihood(&v, kind, &pen, a - h).unwrap())
                    / (2.0 * h);
                let sc = penalized_score(&v, kind, &pen, a).unwrap();
                assert!((fd - sc).abs() < 1e-6 * (1.0 + sc.abs()), "{kind:?} {a}: {fd} {sc}");
            }
        }
    }

    #[test]
    fn fixed_threshold_form() {
        let s = CensoredSample::from_parts(&[1.0, 2.0, 4.0, 8.0], &[true, false, true, true], None).unwrap();
        let v = s.above(1.5).unwrap();
        let est = hill_censored(&v).unwrap();
        let expected = 2.0 / ((2.0f64 / 1.5).ln() + (4.0f64 / 1.5).ln() + (8.0f64 / 1.5).ln());
        assert!((est.alpha_hat - expected).abs() < 1e-15);
    }
}
