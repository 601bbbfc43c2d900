//! Acceptance suite. Each test prints one line
//! `criterion N [PASS|FAIL] <name>: <details>` and then asserts.
//!
//! Run with `cargo test -p tailbridge-cli --test acceptance -- --nocapture`.

use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use tailbridge::asymptotics::{theorem1_variance, AsymptoticRegime};
use tailbridge::bayes::{posterior_params, uniform_prior_posterior_mean};
use tailbridge::distributions::SecondOrder;
use tailbridge::estimators::{expert_means, flipped_estimator, numeric_mle_oracle};
use tailbridge::quantiles::weissman_mle;
use tailbridge::simulation::{perturbed_normalized_errors, replicate_rng, run_study, StudyConfig};
use tailbridge::special::regularized_lower;
use tailbridge::{
    closed_form, combine_hall, hill_censored, kaplan_meier, perturbed_estimator, BurrDist, CensoredSample,
    EstimatorKind, FrechetDist, HallParams, HeavyTail, ParetoDist, Penalty, PenaltyKind, TailDistribution,
};

fn report(id: u32, name: &str, pass: bool, detail: String) {
    println!("criterion {id:>2} [{}] {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {id} failed: {detail}");
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

struct Fixture {
    sample: CensoredSample,
    weights: Vec<f64>,
    k: usize,
    lambda: f64,
}

/// Random sample with `n <= 50`, per-claim expert indices and weights, and a
/// `k` whose top block holds at least one closed claim (and an open one when
/// `need_open`).
fn random_fixture(rng: &mut ChaCha8Rng, need_open: bool) -> Fixture {
    loop {
        let n = rng.random_range(3..=50);
        let z: Vec<f64> = (0..n).map(|_| rng.random_range(0.0f64..8.0).exp()).collect();
        let eps: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let beta: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..5.0)).collect();
        let weights = (0..n).map(|_| rng.random_range(0.1..3.0)).collect();
        let k = rng.random_range(1..n);
        let lambda = rng.random_range(-5.0f64..5.0).exp();
        let sample = CensoredSample::from_parts(&z, &eps, Some(&beta)).unwrap();
        let view = sample.top_k(k).unwrap();
        if view.n_uncensored() == 0 || (need_open && view.n_censored() == 0) {
            continue;
        }
        return Fixture { sample, weights, k, lambda };
    }
}

#[test]
fn criterion_01_oracle_equivalence() {
    let start = Instant::now();
    let mut rng = replicate_rng(101, 0);
    let mut worst: f64 = 0.0;
    let mut failures = 0;
    for _ in 0..1000 {
        let f = random_fixture(&mut rng, false);
        let view = f.sample.top_k(f.k).unwrap();
        let pen = Penalty::new(f.lambda).unwrap().with_weights(f.weights.clone()).unwrap();
        let mle = hill_censored(&view).unwrap().alpha_hat;
        let mle_oracle = numeric_mle_oracle(&view, PenaltyKind::EntropyGtoF, &Penalty::new(0.0).unwrap()).unwrap();
        worst = worst.max(rel(mle, mle_oracle));
        for kind in [PenaltyKind::EntropyGtoF, PenaltyKind::EntropyFtoG, PenaltyKind::Squared] {
            match (closed_form(&view, kind, &pen), numeric_mle_oracle(&view, kind, &pen)) {
                (Ok(est), Ok(oracle)) => worst = worst.max(rel(est.alpha_hat, oracle)),
                _ => failures += 1,
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    report(
        1,
        "closed forms match numeric maximizers",
        worst < 1e-8 && failures == 0 && secs < 10.0,
        format!("1000 fixtures x 4 estimators, max rel err {worst:.2e} (tol 1e-8), {failures} failures, {secs:.2} s"),
    );
}

#[test]
fn criterion_02_bridging_limits() {
    let mut rng = replicate_rng(102, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let f = random_fixture(&mut rng, true);
        let view = f.sample.top_k(f.k).unwrap();
        let pen = |lam: f64| Penalty::new(lam).unwrap().with_weights(f.weights.clone()).unwrap();
        let mle = hill_censored(&view).unwrap().alpha_hat;
        let (am, hm) = expert_means(&view, &pen(1.0)).unwrap();
        let errs = [
            (perturbed_estimator(&view, &pen(1e-10)).unwrap().alpha_hat - mle).abs(),
            (perturbed_estimator(&view, &pen(1e10)).unwrap().alpha_hat - hm).abs(),
            (flipped_estimator(&view, &pen(1e-10)).unwrap().alpha_hat - mle).abs(),
            (flipped_estimator(&view, &pen(1e10)).unwrap().alpha_hat - am).abs(),
        ];
        worst = errs.iter().fold(worst, |w, &e| w.max(e));
    }
    report(
        2,
        "small/large lambda limits",
        worst < 1e-6,
        format!("1000 fixtures, max abs err over the four limits {worst:.2e} (tol 1e-6)"),
    );
}

#[test]
fn criterion_03_combination_identity() {
    let mut rng = replicate_rng(103, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let f = random_fixture(&mut rng, false);
        let beta = rng.random_range(0.2..5.0);
        let view = f.sample.top_k(f.k).unwrap();
        let p_hat = view.p_hat();
        let ap = perturbed_estimator(&view, &Penalty::new(1.0).unwrap().with_beta(beta).unwrap()).unwrap().alpha_hat;
        let am = hill_censored(&view).unwrap().alpha_hat;
        worst = worst.max(rel(1.0 / ap, p_hat / am + (1.0 - p_hat) / beta));
    }
    report(3, "combination at lambda = 1", worst < 1e-12, format!("1000 fixtures, max rel err {worst:.2e} (tol 1e-12)"));
}

#[test]
fn criterion_04_posterior_mode_identity() {
    let mut rng = replicate_rng(104, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let f = random_fixture(&mut rng, false);
        let view = f.sample.top_k(f.k).unwrap();
        let pen = Penalty::new(f.lambda).unwrap().with_weights(f.weights.clone()).unwrap();
        let post = posterior_params(&view, &pen).unwrap();
        let ap = perturbed_estimator(&view, &pen).unwrap().alpha_hat;
        worst = worst.max(rel((post.shape - 1.0) / post.rate, ap));
    }
    report(4, "posterior mode equals perturbed estimate", worst < 1e-12, format!("1000 fixtures, max rel err {worst:.2e} (tol 1e-12)"));
}

#[test]
fn criterion_05_variance_identities() {
    let mut rng = replicate_rng(105, 0);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a = rng.random_range(0.2..5.0);
        let a2 = rng.random_range(0.2..5.0);
        let so = |rng: &mut ChaCha8Rng| SecondOrder { d: rng.random_range(-2.0..2.0), nu: rng.random_range(0.2..3.0) };
        let h = combine_hall(
            &HallParams::new(rng.random_range(0.5..2.0), a, Some(so(&mut rng))).unwrap(),
            &HallParams::new(rng.random_range(0.5..2.0), a2, Some(so(&mut rng))).unwrap(),
        );
        let beta = rng.random_range(0.2..5.0);
        let delta = rng.random_range(0.0..2.0);
        let v0 = theorem1_variance(&AsymptoticRegime::with_delta(h, 100, 10_000, delta, 0.0, beta).unwrap()).unwrap();
        let v1 = theorem1_variance(&AsymptoticRegime::with_delta(h, 100, 10_000, delta, 1.0, a).unwrap()).unwrap();
        worst = worst.max(rel(v0, 1.0 / (h.p * a * a))).max(rel(v1, 1.0 / (h.p * h.alpha_c * h.alpha_c)));
    }
    report(5, "variance at lambda = 0 and at lambda = 1, beta = alpha", worst < 1e-12, format!("100 points, max rel err {worst:.2e} (tol 1e-12)"));
}

#[test]
fn criterion_06_asymptotic_normality_monte_carlo() {
    let x = TailDistribution::Pareto(ParetoDist::new(1.0, 1.0).unwrap());
    let (n, k, reps) = (50_000, 1000, 2000);
    let start = Instant::now();
    let errs = perturbed_normalized_errors(&x, &x, n, k, 1.0, 1.0, reps, 606).unwrap();
    let m = errs.len() as f64;
    let mean = errs.iter().sum::<f64>() / m;
    let var = errs.iter().map(|e| (e - mean).powi(2)).sum::<f64>() / (m - 1.0);
    let se = (var / m).sqrt();
    let hall = combine_hall(&x.hall_params(), &x.hall_params());
    let v_theory = theorem1_variance(&AsymptoticRegime::at(hall, k, n, 1.0, 1.0).unwrap()).unwrap();
    let pass = mean.abs() <= 3.0 * se && rel(var, v_theory) <= 0.10 && (v_theory - 0.5).abs() < 1e-15;
    report(
        6,
        "sqrt(k)(1/alpha_P - 1/2) mean and variance",
        pass,
        format!(
            "N={reps}: mean {mean:.4} (3 SE = {:.4}), variance {var:.4} vs theory {v_theory} (rel {:.3}, tol 0.10), {:.1} s",
            3.0 * se,
            rel(var, v_theory),
            start.elapsed().as_secs_f64()
        ),
    );
}

#[test]
fn criterion_07_simulation_ordering() {
    let burr = TailDistribution::Burr(BurrDist::new(1.0, 2.0, 0.5).unwrap());
    let frechet = TailDistribution::Frechet(FrechetDist::new(1.0).unwrap());
    let mut details = Vec::new();
    let mut pass = true;
    for (name, d) in [("burr(1,2,1/2)", burr), ("frechet(1)", frechet)] {
        assert!((d.xi() - 1.0).abs() < 1e-15);
        let mut config = StudyConfig::new(d, d);
        config.seed = 7_2024;
        let res = run_study(&config).unwrap();
        let mut worst_ratio: f64 = 0.0;
        let mut violations = Vec::new();
        for k in 10..=100 {
            let mle = res.row(EstimatorKind::Mle, k).unwrap().mse_xi;
            let pert = res.row(EstimatorKind::Perturbed, k).unwrap().mse_xi;
            worst_ratio = worst_ratio.max(pert / mle);
            if !(pert <= mle) {
                violations.push(k);
            }
        }
        pass &= violations.is_empty();
        details.push(format!("{name}: max MSE(P)/MSE(MLE) {worst_ratio:.3}, violations at k={violations:?}"));
    }
    report(7, "MSE(perturbed) <= MSE(MLE) for k in [10,100]", pass, details.join("; "));
}

#[test]
fn criterion_08_weissman_quantile() {
    let x = ParetoDist::new(1.0, 2.0).unwrap();
    let truth = 0.005f64.powf(-0.5);
    let mut est: Vec<f64> = (0..500u64)
        .map(|r| {
            let mut rng = replicate_rng(808, r);
            let z = x.sample(2000, &mut rng);
            let s = CensoredSample::from_parts(&z, &vec![true; z.len()], None).unwrap();
            weissman_mle(&s, 200, 0.005).unwrap().value
        })
        .collect();
    est.sort_by(f64::total_cmp);
    let median = 0.5 * (est[249] + est[250]);
    report(
        8,
        "median Weissman estimate of Q(0.995)",
        rel(median, truth) <= 0.15,
        format!("median {median:.4} vs {truth:.4} (rel {:.4}, tol 0.15)", rel(median, truth)),
    );
}

#[test]
fn criterion_09_kaplan_meier() {
    let mut rng = replicate_rng(909, 0);
    let mut exact = true;
    for _ in 0..200 {
        let n = rng.random_range(1..=60);
        // coarse values so that ties occur
        let z: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(1..=20u32))).collect();
        let s = CensoredSample::from_parts(&z, &vec![true; n], None).unwrap();
        let curve = kaplan_meier(&s);
        for t in (0..=21).map(f64::from) {
            let above = z.iter().filter(|&&v| v > t).count() as f64 / n as f64;
            exact &= curve.survival_at(t) == above;
        }
    }
    let s = CensoredSample::from_parts(&[1.0, 2.0, 3.0, 4.0], &[true, false, true, true], None).unwrap();
    let got: Vec<f64> = kaplan_meier(&s).steps().iter().map(|st| st.survival).collect();
    let hand = [0.75, 0.75, 0.375, 0.0];
    let hand_err = got.iter().zip(hand).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    report(
        9,
        "Kaplan-Meier",
        exact && hand_err <= 1e-15 && got.len() == 4,
        format!("empirical equality on 200 uncensored samples: {exact}; hand fixture max err {hand_err:.1e} (tol 1e-15)"),
    );
}

/// Posterior mean of `α` under the density `α^m e^{-αS}` on `[b1, b2]` by
/// composite Simpson quadrature.
fn truncated_posterior_mean(m: f64, s: f64, b1: f64, b2: f64) -> f64 {
    let panels = 200_000;
    let h = (b2 - b1) / panels as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..=panels {
        let a = b1 + h * i as f64;
        let w = if i == 0 || i == panels { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
        let dens = a.powf(m) * (-a * s).exp();
        num += w * a * dens;
        den += w * dens;
    }
    num / den
}

#[test]
fn criterion_10_incomplete_gamma_and_uniform_prior() {
    let gamma_err = [0.1f64, 1.0, 10.0]
        .iter()
        .map(|&v| (regularized_lower(1.0, v) - (1.0 - (-v).exp())).abs())
        .fold(0.0, f64::max);
    // two closed claims with log-spacings 1.5 and 0.5 over the threshold 1
    let s = CensoredSample::from_parts(&[1.5f64.exp(), 0.5f64.exp(), 1.0], &[true, true, true], None).unwrap();
    let view = s.top_k(2).unwrap();
    assert_eq!(view.n_uncensored(), 2);
    assert!((view.sum_log_spacings() - 2.0).abs() < 1e-15);
    let got = uniform_prior_posterior_mean(&view, 0.5, 3.0).unwrap().alpha_hat;
    let oracle = truncated_posterior_mean(2.0, 2.0, 0.5, 3.0);
    let err = (got - oracle).abs();
    report(
        10,
        "incomplete gamma and uniform-prior posterior mean",
        gamma_err <= 1e-12 && err <= 1e-6,
        format!("max |P(1,v) - (1-e^-v)| {gamma_err:.1e} (tol 1e-12); posterior mean {got:.10} vs quadrature {oracle:.10} (err {err:.1e}, tol 1e-6)"),
    );
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tailbridge"))
}

fn run_ok(cmd: &mut Command) {
    let out = cmd.output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<Option<f64>> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i].parse().ok()).collect()
}

fn mean_gap(path: &Path, kmax: usize) -> f64 {
    let (h, rows) = read_csv(path);
    let mle = column(&h, &rows, "xi_mle");
    let pert = column(&h, &rows, "xi_perturbed");
    let gaps: Vec<f64> = mle
        .iter()
        .zip(&pert)
        .zip(column(&h, &rows, "k"))
        .filter(|(_, k)| k.unwrap() as usize <= kmax)
        .filter_map(|((a, b), _)| Some((a.as_ref()? - b.as_ref()?).abs()))
        .collect();
    gaps.iter().sum::<f64>() / gaps.len() as f64
}

#[test]
fn criterion_11_cli_case_study_substitute() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let portfolio = d.join("portfolio.csv");
    run_ok(bin().args(["synth", "--n-per-cohort", "837", "--censoring", "0.6", "--xi", "0.48", "--seed", "11", "--out"]).arg(&portfolio));
    let (h, rows) = read_csv(&portfolio);
    let censored = rows.iter().filter(|r| r[1] == "0").count() as f64 / rows.len() as f64;

    let hill = d.join("hill.csv");
    run_ok(bin().args(["hillplot", "--input"]).arg(&portfolio).args(["--lambda", "1", "--beta", "2.0833", "--out"]).arg(&hill));
    let (hh, hrows) = read_csv(&hill);
    let quant = d.join("quant.csv");
    run_ok(bin().args(["quantile", "--input"]).arg(&portfolio).args(["--p", "0.005", "--beta", "2.0833", "--out"]).arg(&quant));
    let (qh, qrows) = read_csv(&quant);
    let schema_ok = h == ["z", "status", "beta", "ultimate", "cohort"]
        && hh == ["k", "xi_mle", "xi_perturbed", "p_hat", "xi_ultimates"]
        && qh == ["k", "q_km", "q_ultimates", "q_combined"]
        && hrows.len() == rows.len() - 1
        && qrows.len() == rows.len() - 1
        && column(&hh, &hrows, "xi_perturbed").iter().all(Option::is_some);

    // two cohorts, 30% and 90% censored: about 60% overall, 30% in the early one
    let split_input = d.join("cohorts.csv");
    run_ok(bin().args(["synth", "--n-per-cohort", "500", "--censoring", "0.3,0.9", "--xi", "0.5", "--seed", "5", "--out"]).arg(&split_input));
    let prefix = d.join("split");
    run_ok(bin().args(["split-validate", "--input"]).arg(&split_input).args(["--cutoff", "1", "--out"]).arg(&prefix));
    let full = d.join("split.full.csv");
    let reduced = d.join("split.reduced.csv");
    let same_schema = read_csv(&full).0 == read_csv(&reduced).0;
    let (gap_full, gap_reduced) = (mean_gap(&full, 250), mean_gap(&reduced, 250));

    report(
        11,
        "CLI end to end on synthetic portfolios",
        schema_ok && (censored - 0.6).abs() < 0.05 && same_schema && gap_reduced < gap_full,
        format!(
            "portfolio censoring {censored:.3}, schemas ok: {schema_ok}; split schemas equal: {same_schema}; \
             mean |xi_mle - xi_perturbed| for k <= 250: full {gap_full:.4}, reduced {gap_reduced:.4}"
        ),
    );
}
