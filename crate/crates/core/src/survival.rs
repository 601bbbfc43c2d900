//! Kaplan–Meier product-limit estimator over claim sizes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::CensoredSample;

/// One distinct observed size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KmStep {
    pub z: f64,
    /// Observations with size `>= z`.
    pub at_risk: usize,
    /// Uncensored observations equal to `z`.
    pub events: usize,
    /// Censored observations equal to `z`.
    pub censored: usize,
    /// `Ŝ(z)`, the survival just after `z`.
    pub survival: f64,
}

/// Right-continuous step function `Ŝ(z) = Π_{z_i <= z} (1 - d_i/n_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmCurve {
    steps: Vec<KmStep>,
}

/// Builds the product-limit curve. At tied sizes, events are taken before
/// censorings (censored claims at `z` still count as at risk at `z`).
///
/// Survival is tracked as `S_anchor · remaining / at_risk_at_anchor`, with a
/// new anchor after every censored removal. This is the product limit
/// rearranged so that an uncensored sample reproduces the empirical survival
/// function to the last bit.
pub fn kaplan_meier(sample: &CensoredSample) -> KmCurve {
    let mut ascending: Vec<(f64, bool)> = sample.observations().iter().map(|o| (o.z, o.uncensored)).collect();
    ascending.sort_by(|a, b| a.0.total_cmp(&b.0));

    let n = ascending.len();
    let mut steps = Vec::new();
    let (mut anchor_s, mut anchor_n) = (1.0f64, n);
    let mut remaining = n;
    let mut current = 1.0f64;
    let mut i = 0;
    while i < n {
        let z = ascending[i].0;
        let mut j = i;
        let (mut events, mut censored) = (0, 0);
        while j < n && ascending[j].0 == z {
            if ascending[j].1 {
                events += 1;
            } else {
                censored += 1;
            }
            j += 1;
        }
        let at_risk = remaining;
        remaining -= events;
        if events > 0 {
            current = if remaining == 0 { 0.0 } else { anchor_s * remaining as f64 / anchor_n as f64 };
        }
        let survival = current;
        steps.push(KmStep { z, at_risk, events, censored, survival });
        if censored > 0 {
            remaining -= censored;
            anchor_s = survival;
            anchor_n = remaining;
        }
        i = j;
    }
    KmCurve { steps }
}

impl KmCurve {
    pub fn steps(&self) -> &[KmStep] {
        &self.steps
    }

    /// `Ŝ(z)`.
    pub fn survival_at(&self, z: f64) -> f64 {
        let idx = self.steps.partition_point(|s| s.z <= z);
        if idx == 0 {
            1.0
        } else {
            self.steps[idx - 1].survival
        }
    }

    /// Lowest survival level reached.
    pub fn floor(&self) -> f64 {
        self.steps.last().map_or(1.0, |s| s.survival)
    }

    /// Smallest `z` with `Ŝ(z) <= tail`, i.e. the quantile at level `1 - tail`.
    /// The comparison allows a relative slack of 1e-12 for rounding in the
    /// product.
    pub fn upper_quantile(&self, tail: f64) -> Result<f64> {
        if !(tail > 0.0 && tail < 1.0) {
            return Err(Error::InvalidParameter(format!("tail probability must lie in (0,1), got {tail}")));
        }
        let limit = tail * (1.0 + 1e-12);
        self.steps
            .iter()
            .find(|s| s.survival <= limit)
            .map(|s| s.z)
            .ok_or(Error::QuantileOutOfReach { q: 1.0 - tail, floor: self.floor() })
    }

    /// Generalized inverse: smallest `z` with `1 - Ŝ(z) >= q`.
    pub fn quantile(&self, q: f64) -> Result<f64> {
        if !(q > 0.0 && q < 1.0) {
            return Err(Error::InvalidParameter(format!("quantile level must lie in (0,1), got {q}")));
        }
        self.upper_quantile(1.0 - q)
    }
}

/// Quantile of a Kaplan–Meier curve at level `q`.
pub fn km_quantile(curve: &KmCurve, q: f64) -> Result<f64> {
    curve.quantile(q)
}
