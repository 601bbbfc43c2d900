//! Browser bindings for the demo page. Every export takes plain numbers and
//! returns a JSON string, either the plot data or `{"error": "..."}`.

use serde::Serialize;
use tailbridge::asymptotics::{amse, theorem1_bias, theorem1_variance, AsymptoticRegime};
use tailbridge::quantiles::{weissman_combined_with_curve, weissman_mle_with_curve};
use tailbridge::simulation::{generate_censored, replicate_rng};
use tailbridge::{
    combine_hall, hill_censored, kaplan_meier, perturbed_estimator, CensoredSample, HallParams, HeavyTail, Penalty,
    TailDistribution,
};
use wasm_bindgen::prelude::wasm_bindgen;

fn to_json<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v).unwrap_or_else(|e| error_json(&e.to_string())),
        Err(e) => error_json(&e),
    }
}

fn error_json(msg: &str) -> String {
    serde_json::json!({ "error": msg }).to_string()
}

fn synthetic_sample(n: usize, xi: f64, censor_xi: f64, seed: u64) -> Result<CensoredSample, String> {
    if n < 10 {
        return Err("n must be at least 10".into());
    }
    let x = TailDistribution::pareto_xi(xi).map_err(|e| e.to_string())?;
    let l = TailDistribution::pareto_xi(censor_xi).map_err(|e| e.to_string())?;
    generate_censored(&x, &l, n, &mut replicate_rng(seed, 0)).map_err(|e| e.to_string())
}

#[derive(Debug, Serialize)]
pub struct HillPlot {
    pub k: Vec<usize>,
    pub xi_mle: Vec<Option<f64>>,
    pub xi_perturbed: Vec<Option<f64>>,
    pub p_hat: Vec<f64>,
    pub xi_true: f64,
    pub censored_fraction: f64,
}

pub fn hill_plot_data(
    n: usize,
    xi: f64,
    censor_xi: f64,
    lambda: f64,
    beta: f64,
    seed: u64,
) -> Result<HillPlot, String> {
    let sample = synthetic_sample(n, xi, censor_xi, seed)?;
    let pen = Penalty::new(lambda).and_then(|p| p.with_beta(beta)).map_err(|e| e.to_string())?;
    let mut out = HillPlot {
        k: Vec::new(),
        xi_mle: Vec::new(),
        xi_perturbed: Vec::new(),
        p_hat: Vec::new(),
        xi_true: xi,
        censored_fraction: sample.censored_fraction(),
    };
    for k in 5..n {
        let view = sample.top_k(k).map_err(|e| e.to_string())?;
        out.k.push(k);
        out.xi_mle.push(hill_censored(&view).ok().map(|e| e.xi_hat));
        out.xi_perturbed.push(perturbed_estimator(&view, &pen).ok().map(|e| e.xi_hat));
        out.p_hat.push(view.p_hat());
    }
    Ok(out)
}

/// Censored Hill plot of a simulated Pareto sample with Pareto censoring,
/// next to the perturbed estimator with expert index `beta`.
#[wasm_bindgen]
pub fn hill_plot(n: usize, xi: f64, censor_xi: f64, lambda: f64, beta: f64, seed: u64) -> String {
    to_json(hill_plot_data(n, xi, censor_xi, lambda, beta, seed))
}

#[derive(Debug, Serialize)]
pub struct QuantilePlot {
    pub k: Vec<usize>,
    pub q_km: Vec<Option<f64>>,
    pub q_combined: Vec<Option<f64>>,
    pub q_true: f64,
}

pub fn quantile_plot_data(
    n: usize,
    xi: f64,
    censor_xi: f64,
    beta: f64,
    p: f64,
    seed: u64,
) -> Result<QuantilePlot, String> {
    let sample = synthetic_sample(n, xi, censor_xi, seed)?;
    let truth = TailDistribution::pareto_xi(xi)
        .and_then(|d| d.quantile(1.0 - p))
        .map_err(|e| e.to_string())?;
    let curve = kaplan_meier(&sample);
    let mut out = QuantilePlot { k: Vec::new(), q_km: Vec::new(), q_combined: Vec::new(), q_true: truth };
    for k in 5..n {
        out.k.push(k);
        out.q_km.push(weissman_mle_with_curve(&sample, &curve, k, p).ok().map(|q| q.value));
        out.q_combined.push(weissman_combined_with_curve(&sample, &curve, k, p, beta, None).ok().map(|q| q.value));
    }
    Ok(out)
}

/// Weissman estimates of the `1-p` quantile over `k` for the same kind of
/// simulated sample as [`hill_plot`].
#[wasm_bindgen]
pub fn quantile_plot(n: usize, xi: f64, censor_xi: f64, beta: f64, p: f64, seed: u64) -> String {
    to_json(quantile_plot_data(n, xi, censor_xi, beta, p, seed))
}

#[derive(Debug, Serialize)]
pub struct AmseCurve {
    pub lambda: Vec<f64>,
    pub amse: Vec<f64>,
    pub variance: Vec<f64>,
    pub bias: Vec<f64>,
    pub best_lambda: f64,
}

pub fn amse_curve_data(alpha: f64, alpha2: f64, beta: f64, k: usize, steps: usize) -> Result<AmseCurve, String> {
    if steps < 2 {
        return Err("need at least 2 grid steps".into());
    }
    let hx = HallParams::new(1.0, alpha, None).map_err(|e| e.to_string())?;
    let hl = HallParams::new(1.0, alpha2, None).map_err(|e| e.to_string())?;
    let hall = combine_hall(&hx, &hl);
    let mut out = AmseCurve { lambda: Vec::new(), amse: Vec::new(), variance: Vec::new(), bias: Vec::new(), best_lambda: 0.0 };
    let mut best = f64::INFINITY;
    for i in 0..steps {
        let lambda = i as f64 / (steps - 1) as f64;
        let regime = AsymptoticRegime::with_delta(hall, k, usize::MAX, 0.0, lambda, beta).map_err(|e| e.to_string())?;
        let a = amse(&regime).map_err(|e| e.to_string())?;
        out.lambda.push(lambda);
        out.amse.push(a);
        out.variance.push(theorem1_variance(&regime).map_err(|e| e.to_string())? / k as f64);
        out.bias.push(theorem1_bias(&regime));
        if a < best {
            best = a;
            out.best_lambda = lambda;
        }
    }
    Ok(out)
}

/// Asymptotic MSE of `1/α̂^P` over `λ ∈ [0,1]` for Pareto claims and
/// censoring, split into squared bias and variance.
#[wasm_bindgen]
pub fn amse_curve(alpha: f64, alpha2: f64, beta: f64, k: usize, steps: usize) -> String {
    to_json(amse_curve_data(alpha, alpha2, beta, k, steps))
}
