//! Censored observations and their order-statistics views.
//!
//! A [`CensoredSample`] keeps its observations in input order and, alongside,
//! a descending view `Z^(1) >= ... >= Z^(n)` in which the censoring indicator
//! and the expert tail index travel with each value. Ties keep input order.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};

/// One claim: observed size, whether it is fully observed, and the expert
/// tail index attached to it when it is still open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub z: f64,
    /// The indicator ε: `true` for a closed (uncensored) claim.
    pub uncensored: bool,
    pub beta: Option<f64>,
}

impl Observation {
    pub fn closed(z: f64) -> Self {
        Self { z, uncensored: true, beta: None }
    }

    pub fn open(z: f64, beta: Option<f64>) -> Self {
        Self { z, uncensored: false, beta }
    }

    /// ε as a number.
    #[inline]
    pub fn epsilon(&self) -> f64 {
        if self.uncensored {
            1.0
        } else {
            0.0
        }
    }

    fn validate(&self, index: usize) -> Result<()> {
        if !(self.z.is_finite() && self.z > 0.0) {
            return Err(Error::InvalidObservation {
                index,
                reason: format!("z must be positive and finite, got {}", self.z),
            });
        }
        if let Some(b) = self.beta {
            if !(b.is_finite() && b > 0.0) {
                return Err(Error::InvalidObservation {
                    index,
                    reason: format!("beta must be positive and finite, got {b}"),
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CensoredSample {
    observations: Vec<Observation>,
    x0: Option<f64>,
    fallback_beta: Option<f64>,
    sorted: Vec<Observation>,
    sorted_index: Vec<usize>,
}

impl CensoredSample {
    pub fn new(observations: Vec<Observation>) -> Result<Self> {
        if observations.is_empty() {
            return Err(Error::EmptySample);
        }
        for (i, obs) in observations.iter().enumerate() {
            obs.validate(i)?;
        }
        let mut sorted_index: Vec<usize> = (0..observations.len()).collect();
        // sort_by is stable: equal values keep their input order.
        sorted_index.sort_by(|&a, &b| observations[b].z.total_cmp(&observations[a].z));
        let sorted = sorted_index.iter().map(|&i| observations[i]).collect();
        Ok(Self { observations, x0: None, fallback_beta: None, sorted, sorted_index })
    }

    /// Builds a sample from parallel slices; `betas` may be shorter than `z`
    /// only when empty.
    pub fn from_parts(z: &[f64], uncensored: &[bool], betas: Option<&[f64]>) -> Result<Self> {
        if z.len() != uncensored.len() {
            return Err(Error::InvalidParameter(format!(
                "z has {} entries but the indicator has {}",
                z.len(),
                uncensored.len()
            )));
        }
        if let Some(b) = betas {
            if b.len() != z.len() {
                return Err(Error::InvalidParameter(format!(
                    "z has {} entries but beta has {}",
                    z.len(),
                    b.len()
                )));
            }
        }
        let obs = z
            .iter()
            .zip(uncensored)
            .enumerate()
            .map(|(i, (&z, &unc))| Observation {
                z,
                uncensored: unc,
                beta: if unc { None } else { betas.map(|b| b[i]) },
            })
            .collect();
        Self::new(obs)
    }

    pub fn with_x0(mut self, x0: f64) -> Result<Self> {
        check_positive("x0", x0)?;
        self.x0 = Some(x0);
        Ok(self)
    }

    /// Expert tail index used for censored observations that carry none.
    pub fn with_fallback_beta(mut self, beta: f64) -> Result<Self> {
        check_positive("fallback beta", beta)?;
        self.fallback_beta = Some(beta);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.observations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.observations.is_empty()
    }

    pub fn x0(&self) -> Option<f64> {
        self.x0
    }

    pub fn fallback_beta(&self) -> Option<f64> {
        self.fallback_beta
    }

    /// Observations in input order.
    pub fn observations(&self) -> &[Observation] {
        &self.observations
    }

    /// Descending order statistics with indicators and betas carried along.
    pub fn order_statistics(&self) -> &[Observation] {
        &self.sorted
    }

    /// Input index of each order statistic.
    pub fn order_indices(&self) -> &[usize] {
        &self.sorted_index
    }

    pub fn censored_fraction(&self) -> f64 {
        let open = self.observations.iter().filter(|o| !o.uncensored).count();
        open as f64 / self.len() as f64
    }

    /// The `k` largest observations with the random threshold `Z^(k+1)`.
    pub fn top_k(&self, k: usize) -> Result<TailView<'_>> {
        let n = self.len();
        if k == 0 || k >= n {
            return Err(Error::KOutOfRange { k, n });
        }
        Ok(TailView {
            threshold: self.sorted[k].z,
            entries: &self.sorted[..k],
            indices: &self.sorted_index[..k],
            fallback_beta: self.fallback_beta,
        })
    }

    /// Exceedances strictly above a deterministic threshold `u`.
    pub fn above(&self, u: f64) -> Result<TailView<'_>> {
        check_positive("threshold", u)?;
        let m = self.sorted.partition_point(|o| o.z > u);
        Ok(TailView {
            threshold: u,
            entries: &self.sorted[..m],
            indices: &self.sorted_index[..m],
            fallback_beta: self.fallback_beta,
        })
    }

    /// Whole sample against the known scale `x0` (exact-Pareto regime).
    pub fn scale_view(&self) -> Result<TailView<'_>> {
        let x0 = self
            .x0
            .ok_or_else(|| Error::InvalidParameter("exact-Pareto estimators need x0".into()))?;
        if let Some((index, o)) = self.observations.iter().enumerate().find(|(_, o)| o.z < x0) {
            return Err(Error::BelowScale { index, z: o.z, x0 });
        }
        Ok(TailView {
            threshold: x0,
            entries: &self.sorted,
            indices: &self.sorted_index,
            fallback_beta: self.fallback_beta,
        })
    }

    /// Multiplies every size by `c`, keeping indicators, betas, and `x0` in step.
    pub fn rescaled(&self, c: f64) -> Result<Self> {
        check_positive("scale factor", c)?;
        let obs = self.observations.iter().map(|o| Observation { z: o.z * c, ..*o }).collect();
        let mut out = Self::new(obs)?;
        out.x0 = self.x0.map(|x| x * c);
        out.fallback_beta = self.fallback_beta;
        Ok(out)
    }
}

/// Observations above a threshold: either the top `k` order statistics with
/// threshold `Z^(k+1)`, the exceedances of a fixed level, or the whole sample
/// against `x0`. Entries are in descending order.
#[derive(Debug, Clone, Copy)]
pub struct TailView<'a> {
    threshold: f64,
    entries: &'a [Observation],
    indices: &'a [usize],
    fallback_beta: Option<f64>,
}

impl<'a> TailView<'a> {
    pub fn k(&self) -> usize {
        self.entries.len()
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn entries(&self) -> &'a [Observation] {
        self.entries
    }

    /// Input index of each entry in the originating sample.
    pub fn indices(&self) -> &'a [usize] {
        self.indices
    }

    pub fn n_uncensored(&self) -> usize {
        self.entries.iter().filter(|o| o.uncensored).count()
    }

    pub fn n_censored(&self) -> usize {
        self.k() - self.n_uncensored()
    }

    /// Fraction of uncensored entries, `p̂_k`.
    pub fn p_hat(&self) -> f64 {
        if self.entries.is_empty() {
            return 0.0;
        }
        self.n_uncensored() as f64 / self.k() as f64
    }

    pub fn log_spacing(&self, i: usize) -> f64 {
        (self.entries[i].z / self.threshold).ln()
    }

    /// `Σ log(Z^(i)/threshold)`.
    pub fn sum_log_spacings(&self) -> f64 {
        (0..self.k()).map(|i| self.log_spacing(i)).sum()
    }

    /// `H_k`, the uncensored Hill statistic of the entries.
    pub fn hill_statistic(&self) -> f64 {
        self.sum_log_spacings() / self.k() as f64
    }

    /// Expert tail index for entry `i`, falling back to the sample-wide value.
    pub fn beta(&self, i: usize) -> Result<f64> {
        self.entries[i]
            .beta
            .or(self.fallback_beta)
            .ok_or(Error::MissingBeta { index: self.indices[i] })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    Mle,
    Perturbed,
    Flipped,
    Squared,
    BayesGamma,
    BayesMdi,
    UniformPrior,
    ExpertAm,
    ExpertHm,
}

impl EstimatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Mle => "mle",
            Self::Perturbed => "perturbed",
            Self::Flipped => "flipped",
            Self::Squared => "squared",
            Self::BayesGamma => "bayes_gamma",
            Self::BayesMdi => "bayes_mdi",
            Self::UniformPrior => "uniform_prior",
            Self::ExpertAm => "expert_am",
            Self::ExpertHm => "expert_hm",
        }
    }
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "mle" | "hill" => Self::Mle,
            "perturbed" => Self::Perturbed,
            "flipped" => Self::Flipped,
            "squared" => Self::Squared,
            "bayes_gamma" | "bg" => Self::BayesGamma,
            "bayes_mdi" | "bm" => Self::BayesMdi,
            "uniform_prior" => Self::UniformPrior,
            "expert_am" => Self::ExpertAm,
            "expert_hm" => Self::ExpertHm,
            other => return Err(Error::InvalidParameter(format!("unknown estimator {other:?}"))),
        })
    }
}

/// A tail-index estimate together with the extreme value index `ξ̂ = 1/α̂`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub alpha_hat: f64,
    pub xi_hat: f64,
    pub p_hat: f64,
    pub k: usize,
    pub kind: EstimatorKind,
    pub lambda: Option<f64>,
}

impl TailEstimate {
    pub(crate) fn new(kind: EstimatorKind, alpha_hat: f64, view: &TailView<'_>, lambda: Option<f64>) -> Self {
        Self { alpha_hat, xi_hat: alpha_hat.recip(), p_hat: view.p_hat(), k: view.k(), kind, lambda }
    }
}
