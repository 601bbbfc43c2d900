//! The work behind each subcommand, separated from argument parsing.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tailbridge::bayes::{bayes_gamma_estimator, bayes_mdi_estimator, moment_match, uniform_prior_posterior_mean, GammaParams};
use tailbridge::estimators::expert_means;
use tailbridge::quantiles::{
    weissman_combined_with_curve, weissman_mle_with_curve, weissman_ultimates, AnchorQuantile, EmpiricalQuantiles,
};
use tailbridge::simulation::{run_study, StudyConfig, StudyResult};
use tailbridge::{
    closed_form, hill_censored, kaplan_meier, CensoredSample, Error, EstimatorKind, Penalty, PenaltyKind, TailEstimate,
};

use crate::claims::{fmt_cell, fmt_num, ClaimsFile};
use crate::error::CliError;

/// Sorts library errors into bad input (exit 2) and estimation failures (exit 3).
pub fn from_core(e: Error) -> CliError {
    match e {
        Error::InvalidObservation { .. }
        | Error::MissingBeta { .. }
        | Error::KOutOfRange { .. }
        | Error::BelowScale { .. }
        | Error::InvalidParameter(_)
        | Error::InvalidRegime(_)
        | Error::EmptyGrid
        | Error::EmptySample => CliError::input(e),
        _ => CliError::estimation(e),
    }
}

#[derive(Debug, Clone)]
pub struct EstimateOptions {
    pub k: usize,
    pub estimator: EstimatorKind,
    pub lambda: f64,
    pub beta: Option<f64>,
    pub bg_sigma2: f64,
    pub bg_shape: Option<f64>,
    pub bg_rate: Option<f64>,
    pub b1: f64,
    pub b2: f64,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            k: 1,
            estimator: EstimatorKind::Perturbed,
            lambda: 1.0,
            beta: None,
            bg_sigma2: 0.04,
            bg_shape: None,
            bg_rate: None,
            b1: 0.0,
            b2: f64::INFINITY,
        }
    }
}

fn penalty(lambda: f64, beta: Option<f64>) -> Result<Penalty, CliError> {
    let p = Penalty::new(lambda).map_err(from_core)?;
    match beta {
        Some(b) => p.with_beta(b).map_err(from_core),
        None => Ok(p),
    }
}

fn check_k(k: usize, n: usize) -> Result<(), CliError> {
    if k == 0 || k >= n {
        return Err(CliError::input(format!("k must lie in [1, {}], got {k}", n.saturating_sub(1))));
    }
    Ok(())
}

pub fn estimate(file: &ClaimsFile, opts: &EstimateOptions) -> Result<TailEstimate, CliError> {
    use EstimatorKind::*;
    let needs_beta = match opts.estimator {
        Perturbed | Flipped | Squared => opts.lambda > 0.0,
        ExpertAm | ExpertHm => true,
        BayesGamma => opts.bg_shape.is_none() || opts.bg_rate.is_none(),
        Mle | BayesMdi | UniformPrior => false,
    };
    if needs_beta {
        if opts.estimator == BayesGamma {
            if opts.beta.is_none() {
                return Err(CliError::input("bayes_gamma needs --beta or both --bg-shape and --bg-rate"));
            }
        } else {
            file.require_betas(opts.beta)?;
        }
    }
    let sample = file.sample()?;
    check_k(opts.k, sample.len())?;
    let view = sample.top_k(opts.k).map_err(from_core)?;
    let pen = penalty(opts.lambda, opts.beta)?;
    let est = match opts.estimator {
        Mle => hill_censored(&view),
        Perturbed => closed_form(&view, PenaltyKind::EntropyGtoF, &pen),
        Flipped => closed_form(&view, PenaltyKind::EntropyFtoG, &pen),
        Squared => closed_form(&view, PenaltyKind::Squared, &pen),
        BayesGamma => {
            let prior = match (opts.bg_shape, opts.bg_rate) {
                (Some(a), Some(b)) => GammaParams::new(a, b),
                _ => moment_match(opts.beta.unwrap_or(f64::NAN), opts.bg_sigma2),
            }
            .map_err(from_core)?;
            bayes_gamma_estimator(&view, &prior)
        }
        BayesMdi => bayes_mdi_estimator(&view),
        UniformPrior => uniform_prior_posterior_mean(&view, opts.b1, opts.b2),
        ExpertAm | ExpertHm => expert_means(&view, &pen).map(|(am, hm)| {
            let alpha_hat = if opts.estimator == ExpertAm { am } else { hm };
            TailEstimate {
                alpha_hat,
                xi_hat: 1.0 / alpha_hat,
                p_hat: view.p_hat(),
                k: view.k(),
                kind: opts.estimator,
                lambda: None,
            }
        }),
    };
    est.map_err(from_core)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HillRow {
    pub k: usize,
    pub xi_mle: Option<f64>,
    pub xi_perturbed: Option<f64>,
    pub p_hat: f64,
    pub xi_ultimates: Option<f64>,
}

/// Resolves `[kmin, kmax]` against the sample size, `kmax` defaulting to `n-1`.
fn k_range(kmin: usize, kmax: Option<usize>, n: usize) -> Result<(usize, usize), CliError> {
    if n < 2 {
        return Err(CliError::estimation(format!("need at least 2 claims, got {n}")));
    }
    let kmax = kmax.unwrap_or(n - 1);
    if kmin == 0 || kmax >= n || kmin > kmax {
        return Err(CliError::input(format!("need 1 <= kmin <= kmax <= {}, got [{kmin}, {kmax}]", n - 1)));
    }
    Ok((kmin, kmax))
}

pub fn hillplot(
    file: &ClaimsFile,
    kmin: usize,
    kmax: Option<usize>,
    lambda: f64,
    beta: Option<f64>,
) -> Result<Vec<HillRow>, CliError> {
    if lambda > 0.0 {
        file.require_betas(beta)?;
    }
    let sample = file.sample()?;
    let (kmin, kmax) = k_range(kmin, kmax, sample.len())?;
    let pen = penalty(lambda, beta)?;
    let ult = match file.ultimates() {
        Some(u) => Some(EmpiricalQuantiles::new(&u).map_err(from_core)?),
        None => None,
    };
    (kmin..=kmax)
        .map(|k| {
            let view = sample.top_k(k).map_err(from_core)?;
            Ok(HillRow {
                k,
                xi_mle: hill_censored(&view).ok().map(|e| e.xi_hat),
                xi_perturbed: closed_form(&view, PenaltyKind::EntropyGtoF, &pen).ok().map(|e| e.xi_hat),
                p_hat: view.p_hat(),
                xi_ultimates: ult.as_ref().and_then(|u| u.hill_xi(k).ok()),
            })
        })
        .collect()
}

pub fn write_hillplot<W: Write>(rows: &[HillRow], with_ultimates: bool, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["k", "xi_mle", "xi_perturbed", "p_hat"];
    if with_ultimates {
        header.push("xi_ultimates");
    }
    w.write_record(&header).map_err(CliError::io)?;
    for r in rows {
        let mut rec = vec![r.k.to_string(), fmt_cell(r.xi_mle), fmt_cell(r.xi_perturbed), fmt_num(r.p_hat)];
        if with_ultimates {
            rec.push(fmt_cell(r.xi_ultimates));
        }
        w.write_record(&rec).map_err(CliError::io)?;
    }
    w.flush().map_err(CliError::io)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantileRow {
    pub k: usize,
    pub q_km: Option<f64>,
    pub q_ultimates: Option<f64>,
    pub q_combined: Option<f64>,
}

/// Expert index for the combined estimator at `k`: the global `β` if given,
/// otherwise the harmonic mean of the row betas of the open claims in the
/// top `k`, which leaves `α̂^P` at `λ = 1` unchanged.
fn combined_beta(sample: &CensoredSample, k: usize, beta: Option<f64>) -> Option<f64> {
    if let Some(b) = beta {
        return Some(b);
    }
    let view = sample.top_k(k).ok()?;
    if view.n_censored() == 0 {
        // the expert branch carries no weight
        return Some(1.0);
    }
    expert_means(&view, &Penalty::default()).ok().map(|(_, hm)| hm)
}

pub fn quantile(
    file: &ClaimsFile,
    p: f64,
    kmin: usize,
    kmax: Option<usize>,
    beta: Option<f64>,
) -> Result<Vec<QuantileRow>, CliError> {
    if !(p > 0.0 && p < 1.0) {
        return Err(CliError::input(format!("p must lie in (0,1), got {p}")));
    }
    file.require_betas(beta)?;
    let sample = file.sample()?;
    let (kmin, kmax) = k_range(kmin, kmax, sample.len())?;
    let curve = kaplan_meier(&sample);
    let ult = match file.ultimates() {
        Some(u) => Some(EmpiricalQuantiles::new(&u).map_err(from_core)?),
        None => None,
    };
    let expert = ult.as_ref().map(|u| u as &dyn AnchorQuantile);
    Ok((kmin..=kmax)
        .map(|k| QuantileRow {
            k,
            q_km: weissman_mle_with_curve(&sample, &curve, k, p).ok().map(|q| q.value),
            q_ultimates: ult.as_ref().and_then(|u| weissman_ultimates(u, k, p).ok()).map(|q| q.value),
            q_combined: combined_beta(&sample, k, beta)
                .and_then(|b| weissman_combined_with_curve(&sample, &curve, k, p, b, expert).ok())
                .map(|q| q.value),
        })
        .collect())
}

pub fn write_quantiles<W: Write>(rows: &[QuantileRow], with_ultimates: bool, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["k", "q_km"];
    if with_ultimates {
        header.push("q_ultimates");
    }
    header.push("q_combined");
    w.write_record(&header).map_err(CliError::io)?;
    for r in rows {
        let mut rec = vec![r.k.to_string(), fmt_cell(r.q_km)];
        if with_ultimates {
            rec.push(fmt_cell(r.q_ultimates));
        }
        rec.push(fmt_cell(r.q_combined));
        w.write_record(&rec).map_err(CliError::io)?;
    }
    w.flush().map_err(CliError::io)
}

pub fn simulate(config: &StudyConfig) -> Result<StudyResult, CliError> {
    config.validate().map_err(from_core)?;
    run_study(config).map_err(from_core)
}

/// Paths written by [`split_validate`].
pub fn split_paths(prefix: &Path) -> (PathBuf, PathBuf) {
    let with = |suffix: &str| {
        let mut s = prefix.as_os_str().to_owned();
        s.push(suffix);
        PathBuf::from(s)
    };
    (with(".full.csv"), with(".reduced.csv"))
}

/// Hill plots of the full file and of the cohorts up to `cutoff`, written as
/// `PREFIX.full.csv` and `PREFIX.reduced.csv`.
pub fn split_validate(
    file: &ClaimsFile,
    cutoff: f64,
    kmin: usize,
    kmax: Option<usize>,
    lambda: f64,
    beta: Option<f64>,
    prefix: &Path,
) -> Result<(PathBuf, PathBuf), CliError> {
    let reduced = file.cohort_at_most(cutoff)?;
    if reduced.rows.len() < 2 {
        return Err(CliError::estimation(format!(
            "only {} claims in cohorts up to {cutoff}",
            reduced.rows.len()
        )));
    }
    let full_rows = hillplot(file, kmin, kmax, lambda, beta)?;
    let red_kmax = kmax.map(|k| k.min(reduced.rows.len() - 1));
    let red_rows = hillplot(&reduced, kmin.min(reduced.rows.len() - 1), red_kmax, lambda, beta)?;
    let (full_path, red_path) = split_paths(prefix);
    let create = |p: &Path| {
        std::fs::File::create(p).map_err(|e| CliError::input(format!("cannot write {}: {e}", p.display())))
    };
    write_hillplot(&full_rows, file.has_ultimate, create(&full_path)?)?;
    write_hillplot(&red_rows, file.has_ultimate, create(&red_path)?)?;
    Ok((full_path, red_path))
}
