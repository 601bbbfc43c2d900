//! Monte Carlo study harness: censored sample generation, simulated expert
//! opinions, bias/MSE tables over `k`, and the empirical checks behind the
//! asymptotic theory.
//!
//! Replicate `r` draws from `ChaCha8Rng` seeded with the study seed on stream
//! `r`, so results do not depend on how replicates are scheduled.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::asymptotics::AsymptoticRegime;
use crate::bayes::{bayes_gamma_estimator, bayes_mdi_estimator, moment_match};
use crate::distributions::{combine_hall, HeavyTail, TailDistribution};
use crate::error::{check_positive, Error, Result};
use crate::estimators::{hill_censored, perturbed_estimator, Penalty};
use crate::model::{CensoredSample, EstimatorKind, Observation, TailView};
use crate::quantiles::weissman_extrapolate;
use crate::survival::kaplan_meier;

/// Estimators evaluated in every replicate of a study.
pub const STUDY_ESTIMATORS: [EstimatorKind; 4] =
    [EstimatorKind::Mle, EstimatorKind::Perturbed, EstimatorKind::BayesGamma, EstimatorKind::BayesMdi];

pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replicate);
    rng
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub dist_x: TailDistribution,
    pub dist_l: TailDistribution,
    pub n: usize,
    pub n_sim: usize,
    pub k_grid: Vec<usize>,
    pub p: f64,
    pub expert_noise_sd: f64,
    pub bg_sigma2: f64,
    pub lambda: f64,
    pub seed: u64,
}

/// `5..=⌊3n/4⌋`, clipped to `[1, n-1]`.
pub fn default_k_grid(n: usize) -> Vec<usize> {
    let hi = (3 * n / 4).min(n.saturating_sub(1));
    let lo = if hi >= 5 { 5 } else { 1 };
    (lo..=hi).collect()
}

impl StudyConfig {
    pub fn new(dist_x: TailDistribution, dist_l: TailDistribution) -> Self {
        Self {
            dist_x,
            dist_l,
            n: 200,
            n_sim: 1000,
            k_grid: default_k_grid(200),
            p: 0.005,
            expert_noise_sd: 0.2,
            bg_sigma2: 0.04,
            lambda: 1.0,
            seed: 0,
        }
    }

    /// Sets `n` and resets the `k` grid to its default for that size.
    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self.k_grid = default_k_grid(n);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InvalidParameter(format!("n must be at least 2, got {}", self.n)));
        }
        if self.k_grid.is_empty() {
            return Err(Error::EmptyGrid);
        }
        if let Some(&k) = self.k_grid.iter().find(|&&k| k == 0 || k >= self.n) {
            return Err(Error::KOutOfRange { k, n: self.n });
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::InvalidParameter(format!("p must lie in (0,1), got {}", self.p)));
        }
        if !(self.expert_noise_sd.is_finite() && self.expert_noise_sd >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "expert noise sd must be nonnegative, got {}",
                self.expert_noise_sd
            )));
        }
        check_positive("bg_sigma2", self.bg_sigma2)?;
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!("lambda must be nonnegative, got {}", self.lambda)));
        }
        Ok(())
    }
}

/// `Z = min(X, L)`, `ε = 1{X <= L}` with independent `X` and `L`.
pub fn generate_censored<R: Rng + ?Sized>(
    dist_x: &TailDistribution,
    dist_l: &TailDistribution,
    n: usize,
    rng: &mut R,
) -> Result<CensoredSample> {
    let obs = (0..n)
        .map(|_| {
            let x = dist_x.sample_one(rng);
            let l = dist_l.sample_one(rng);
            if x <= l {
                Observation::closed(x)
            } else {
                Observation::open(l, None)
            }
        })
        .collect();
    CensoredSample::new(obs)
}

/// Expert tail index `β`: `1/β ~ N(ξ, sd²)` conditioned to be positive.
pub fn draw_expert<R: Rng + ?Sized>(xi_true: f64, sd: f64, rng: &mut R) -> Result<f64> {
    check_positive("xi", xi_true)?;
    if sd == 0.0 {
        return Ok(1.0 / xi_true);
    }
    let normal = Normal::new(xi_true, sd).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    loop {
        let d = normal.sample(rng);
        if d > 0.0 {
            return Ok(1.0 / d);
        }
    }
}

/// Appendix-style averages over the top `k`:
/// `V_k = (1/k) Σ (1-ε)(1-λ)` and `W_k = (1/k) Σ (1-ε)/β`.
pub fn empirical_vk_wk(sample: &CensoredSample, k: usize, lambda: f64, beta: f64) -> Result<(f64, f64)> {
    check_positive("beta", beta)?;
    let view = sample.top_k(k)?;
    let censored = view.n_censored() as f64 / k as f64;
    Ok((censored * (1.0 - lambda), censored / beta))
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    count: usize,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, e: f64) {
        self.count += 1;
        self.sum += e;
        self.sum_sq += e * e;
    }

    fn merge(&mut self, other: &Moments) {
        self.count += other.count;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
    }

    fn bias(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.sum / self.count as f64
        }
    }

    fn mse(&self) -> f64 {
        if self.count == 0 {
            f64::NAN
        } else {
            self.sum_sq / self.count as f64
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Cell {
    xi: Moments,
    q: Moments,
}

/// One `(estimator, k)` cell of a study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyRow {
    pub estimator: EstimatorKind,
    pub k: usize,
    pub bias_xi: f64,
    pub mse_xi: f64,
    pub bias_q: f64,
    pub mse_q: f64,
    /// Replicates where the tail-index estimator failed.
    pub n_fail: usize,
    /// Replicates without a quantile estimate (estimator or anchor failure).
    pub n_fail_q: usize,
    pub log_mse_xi: f64,
    pub log_mse_q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub config: StudyConfig,
    pub xi_true: f64,
    pub q_true: f64,
    pub rows: Vec<StudyRow>,
}

pub const STUDY_CSV_HEADER: &str = "estimator,k,bias_xi,mse_xi,bias_q,mse_q,n_fail,n_fail_q,log_mse_xi,log_mse_q";

/// Shortest decimal that round-trips; empty for non-finite values.
fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:?}")
    } else {
        String::new()
    }
}

impl StudyResult {
    pub fn row(&self, estimator: EstimatorKind, k: usize) -> Option<&StudyRow> {
        self.rows.iter().find(|r| r.estimator == estimator && r.k == k)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(STUDY_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                r.estimator,
                r.k,
                fmt_num(r.bias_xi),
                fmt_num(r.mse_xi),
                fmt_num(r.bias_q),
                fmt_num(r.mse_q),
                r.n_fail,
                r.n_fail_q,
                fmt_num(r.log_mse_xi),
                fmt_num(r.log_mse_q),
            );
        }
        out
    }
}

fn estimate_xi(kind: EstimatorKind, view: &TailView<'_>, config: &StudyConfig, beta: f64) -> Result<f64> {
    let est = match kind {
        EstimatorKind::Mle => hill_censored(view)?,
        EstimatorKind::Perturbed => perturbed_estimator(view, &Penalty::new(config.lambda)?.with_beta(beta)?)?,
        EstimatorKind::BayesGamma => bayes_gamma_estimator(view, &moment_match(beta, config.bg_sigma2)?)?,
        EstimatorKind::BayesMdi => bayes_mdi_estimator(view)?,
        other => return Err(Error::InvalidParameter(format!("{other} is not part of the study"))),
    };
    Ok(est.xi_hat)
}

fn run_replicate(config: &StudyConfig, replicate: u64, xi_true: f64, q_true: f64) -> Vec<Cell> {
    let mut cells = vec![Cell::default(); STUDY_ESTIMATORS.len() * config.k_grid.len()];
    let mut rng = replicate_rng(config.seed, replicate);
    let (sample, beta) = match generate_censored(&config.dist_x, &config.dist_l, config.n, &mut rng)
        .and_then(|s| Ok((s, draw_expert(xi_true, config.expert_noise_sd, &mut rng)?)))
    {
        Ok(pair) => pair,
        Err(_) => return cells,
    };
    let Ok(sample) = sample.with_fallback_beta(beta) else {
        return cells;
    };
    let curve = kaplan_meier(&sample);
    let n = sample.len();
    for (ki, &k) in config.k_grid.iter().enumerate() {
        let Ok(view) = sample.top_k(k) else { continue };
        let anchor = curve.upper_quantile(k as f64 / n as f64).ok();
        for (ei, &kind) in STUDY_ESTIMATORS.iter().enumerate() {
            let cell = &mut cells[ei * config.k_grid.len() + ki];
            let Ok(xi) = estimate_xi(kind, &view, config, beta) else { continue };
            cell.xi.push(xi - xi_true);
            if let Some(a) = anchor {
                cell.q.push(weissman_extrapolate(a, k, n, config.p, xi) - q_true);
            }
        }
    }
    cells
}

#[cfg(feature = "parallel")]
fn map_replicates<T, F>(n_sim: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n_sim as u64).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn map_replicates<T, F>(n_sim: usize, f: F) -> Vec<T>
where
    F: Fn(u64) -> T,
{
    (0..n_sim as u64).map(f).collect()
}

/// Runs the full study. Replicates in which an estimator fails are excluded
/// from that estimator's cell and counted.
pub fn run_study(config: &StudyConfig) -> Result<StudyResult> {
    config.validate()?;
    let xi_true = config.dist_x.xi();
    let q_true = config.dist_x.quantile(1.0 - config.p)?;
    let per_replicate = map_replicates(config.n_sim, |r| run_replicate(config, r, xi_true, q_true));

    let width = config.k_grid.len();
    let mut totals = vec![Cell::default(); STUDY_ESTIMATORS.len() * width];
    for cells in &per_replicate {
        for (t, c) in totals.iter_mut().zip(cells) {
            t.xi.merge(&c.xi);
            t.q.merge(&c.q);
        }
    }

    let mut rows = Vec::with_capacity(totals.len());
    for (ei, &estimator) in STUDY_ESTIMATORS.iter().enumerate() {
        for (ki, &k) in config.k_grid.iter().enumerate() {
            let c = &totals[ei * width + ki];
            rows.push(StudyRow {
                estimator,
                k,
                bias_xi: c.xi.bias(),
                mse_xi: c.xi.mse(),
                bias_q: c.q.bias(),
                mse_q: c.q.mse(),
                n_fail: config.n_sim - c.xi.count,
                n_fail_q: config.n_sim - c.q.count,
                log_mse_xi: c.xi.mse().ln(),
                log_mse_q: c.q.mse().ln(),
            });
        }
    }
    Ok(StudyResult { config: config.clone(), xi_true, q_true, rows })
}

/// Replicates of `√k (1/α̂^P_k - target)` for checking the asymptotic
/// normality result, where `target = (λα₂/β + 1)/(λα₂ + α)`.
///
/// Only the `k + 1` largest observations of each sample are kept, which is
/// all the estimator looks at.
#[allow(clippy::too_many_arguments)]
pub fn perturbed_normalized_errors(
    dist_x: &TailDistribution,
    dist_l: &TailDistribution,
    n: usize,
    k: usize,
    lambda: f64,
    beta: f64,
    n_rep: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let hall = combine_hall(&dist_x.hall_params(), &dist_l.hall_params());
    let target = AsymptoticRegime::at(hall, k, n, lambda, beta)?.target();
    let penalty = Penalty::new(lambda)?.with_beta(beta)?;
    let root_k = (k as f64).sqrt();
    map_replicates(n_rep, |r| {
        let mut rng = replicate_rng(seed, r);
        let mut pairs: Vec<(f64, bool)> = (0..n)
            .map(|_| {
                let x = dist_x.sample_one(&mut rng);
                let l = dist_l.sample_one(&mut rng);
                (x.min(l), x <= l)
            })
            .collect();
        pairs.select_nth_unstable_by(k, |a, b| b.0.total_cmp(&a.0));
        pairs.truncate(k + 1);
        let (z, eps): (Vec<f64>, Vec<bool>) = pairs.into_iter().unzip();
        let sample = CensoredSample::from_parts(&z, &eps, None)?;
        let est = perturbed_estimator(&sample.top_k(k)?, &penalty)?;
        Ok(root_k * (1.0 / est.alpha_hat - target))
    })
    .into_iter()
    .collect()
}

/// Settings for a synthetic claims portfolio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PortfolioConfig {
    /// Claims per cohort.
    pub n_per_cohort: usize,
    /// True extreme value index of the claim sizes (Pareto, scale 1).
    pub xi: f64,
    /// Target censoring fraction of each cohort, oldest first.
    pub cohort_censoring: Vec<f64>,
    /// Common scale of claims and censoring levels in each cohort; empty
    /// means 1 throughout. Larger scales put a cohort further into the tail.
    pub cohort_scale: Vec<f64>,
    /// Value written in the `beta` column as `1/expert_xi`.
    pub expert_xi: f64,
    /// Log-scale noise of the ultimates on open claims.
    pub ultimate_noise_sd: f64,
    pub seed: u64,
}

impl Default for PortfolioConfig {
    fn default() -> Self {
        Self {
            n_per_cohort: 500,
            xi: 0.5,
            cohort_censoring: vec![0.3, 0.9],
            cohort_scale: vec![1.0, 4.0],
            expert_xi: 0.5,
            ultimate_noise_sd: 0.1,
            seed: 0,
        }
    }
}

/// One row of a claims file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PortfolioClaim {
    pub z: f64,
    pub uncensored: bool,
    pub beta: f64,
    /// Expert projection of the final size; equal to `z` for closed claims.
    pub ultimate: f64,
    /// 1-based cohort index.
    pub cohort: u32,
}

/// Pareto claims with independent Pareto censoring. A cohort with censoring
/// fraction `c` uses a censoring tail index `α₂ = α c/(1-c)`, so that
/// `P(L < X) = c` at every level. Claims and censoring levels of a cohort
/// share its scale.
pub fn synthetic_portfolio(config: &PortfolioConfig) -> Result<Vec<PortfolioClaim>> {
    check_positive("xi", config.xi)?;
    check_positive("expert_xi", config.expert_xi)?;
    if !(config.ultimate_noise_sd.is_finite() && config.ultimate_noise_sd >= 0.0) {
        return Err(Error::InvalidParameter("ultimate noise sd must be nonnegative".into()));
    }
    let alpha = 1.0 / config.xi;
    let x = TailDistribution::pareto_xi(config.xi)?;
    let noise = Normal::new(0.0, config.ultimate_noise_sd).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    if !config.cohort_scale.is_empty() && config.cohort_scale.len() != config.cohort_censoring.len() {
        return Err(Error::InvalidParameter(format!(
            "{} cohort scales for {} cohorts",
            config.cohort_scale.len(),
            config.cohort_censoring.len()
        )));
    }
    let mut claims = Vec::with_capacity(config.n_per_cohort * config.cohort_censoring.len());
    for (ci, &c) in config.cohort_censoring.iter().enumerate() {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::InvalidParameter(format!("censoring fraction must lie in (0,1), got {c}")));
        }
        let l = TailDistribution::pareto_xi(1.0 / (alpha * c / (1.0 - c)))?;
        let scale = config.cohort_scale.get(ci).copied().unwrap_or(1.0);
        check_positive("cohort scale", scale)?;
        let mut rng = replicate_rng(config.seed, ci as u64);
        for _ in 0..config.n_per_cohort {
            let xv = scale * x.sample_one(&mut rng);
            let lv = scale * l.sample_one(&mut rng);
            let shock: f64 = noise.sample(&mut rng);
            let (z, uncensored, ultimate) =
                if xv <= lv { (xv, true, xv) } else { (lv, false, (xv * shock.exp()).max(lv)) };
            claims.push(PortfolioClaim { z, uncensored, beta: 1.0 / config.expert_xi, ultimate, cohort: ci as u32 + 1 });
        }
    }
    Ok(claims)
}
