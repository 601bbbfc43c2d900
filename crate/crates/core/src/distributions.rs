//! The heavy-tailed families used in the simulation study, with their
//! Hall-class second-order expansions
//! `F̄(x) = C x^(-α) (1 + D x^(-ν) (1 + o(1)))`.

use rand::Rng;
use rand_distr::{Distribution, Open01};
use serde::{Deserialize, Serialize};

use crate::error::{check_positive, Error, Result};

/// Second-order term `D x^(-ν)` of a Hall-class tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecondOrder {
    pub d: f64,
    pub nu: f64,
}

/// First- and second-order tail constants. `second_order` is `None` for an
/// exact Pareto tail, which has no finite `ν`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HallParams {
    pub c: f64,
    pub alpha: f64,
    pub second_order: Option<SecondOrder>,
}

impl HallParams {
    pub fn new(c: f64, alpha: f64, second_order: Option<SecondOrder>) -> Result<Self> {
        check_positive("C", c)?;
        check_positive("alpha", alpha)?;
        if let Some(so) = second_order {
            check_positive("nu", so.nu)?;
            if !so.d.is_finite() {
                return Err(Error::InvalidParameter(format!("D must be finite, got {}", so.d)));
            }
        }
        Ok(Self { c, alpha, second_order })
    }

    /// `D`, zero when there is no second-order term.
    pub fn d(&self) -> f64 {
        self.second_order.map_or(0.0, |s| s.d)
    }
}

/// Second-order constants of the censored variable `Z = min(X, L)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombinedSecondOrder {
    pub nu_star: f64,
    pub d_star: f64,
    pub d_over_alpha_star: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombinedHallParams {
    pub c: f64,
    /// Tail index of `X`.
    pub alpha: f64,
    /// Tail index of the censoring variable `L`.
    pub alpha2: f64,
    pub alpha_c: f64,
    /// Asymptotic probability of non-censoring, `α/(α+α₂)`.
    pub p: f64,
    pub second_order: Option<CombinedSecondOrder>,
}

/// Combines the tails of `X` and of the censoring variable `L`.
pub fn combine_hall(x: &HallParams, l: &HallParams) -> CombinedHallParams {
    let alpha_c = x.alpha + l.alpha;
    let second_order = match (x.second_order, l.second_order) {
        (None, None) => None,
        (Some(sx), None) => Some(CombinedSecondOrder {
            nu_star: sx.nu,
            d_star: sx.d,
            d_over_alpha_star: sx.d / x.alpha,
        }),
        (None, Some(sl)) => Some(CombinedSecondOrder {
            nu_star: sl.nu,
            d_star: sl.d,
            d_over_alpha_star: -sl.d / l.alpha,
        }),
        (Some(sx), Some(sl)) => Some(if sx.nu < sl.nu {
            CombinedSecondOrder { nu_star: sx.nu, d_star: sx.d, d_over_alpha_star: sx.d / x.alpha }
        } else if sl.nu < sx.nu {
            CombinedSecondOrder { nu_star: sl.nu, d_star: sl.d, d_over_alpha_star: -sl.d / l.alpha }
        } else {
            CombinedSecondOrder {
                nu_star: sx.nu,
                d_star: sx.d + sl.d,
                d_over_alpha_star: sx.d / x.alpha - sl.d / l.alpha,
            }
        }),
    };
    CombinedHallParams {
        c: x.c * l.c,
        alpha: x.alpha,
        alpha2: l.alpha,
        alpha_c,
        p: x.alpha / alpha_c,
        second_order,
    }
}

/// Common interface of the catalog families.
pub trait HeavyTail {
    /// `P(X > x)`.
    fn survival(&self, x: f64) -> f64;

    /// Generalized inverse of the distribution function at level `q`.
    fn quantile(&self, q: f64) -> Result<f64>;

    fn hall_params(&self) -> HallParams;

    fn tail_index(&self) -> f64 {
        self.hall_params().alpha
    }

    /// Extreme value index `ξ = 1/α`.
    fn xi(&self) -> f64 {
        self.tail_index().recip()
    }

    /// Draw from the survival level `s ∈ (0,1)`: `F̄⁻¹(s)`.
    fn from_survival_level(&self, s: f64) -> f64;

    fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64
    where
        Self: Sized,
    {
        let s: f64 = Open01.sample(rng);
        self.from_survival_level(s)
    }

    fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<f64>
    where
        Self: Sized,
    {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }
}

fn check_level(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("quantile level must lie in (0,1), got {q}")))
    }
}

/// Exact Pareto, `F̄(x) = (x0/x)^α` for `x >= x0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParetoDist {
    pub x0: f64,
    pub alpha: f64,
}

impl ParetoDist {
    pub fn new(x0: f64, alpha: f64) -> Result<Self> {
        check_positive("x0", x0)?;
        check_positive("alpha", alpha)?;
        Ok(Self { x0, alpha })
    }
}

impl HeavyTail for ParetoDist {
    fn survival(&self, x: f64) -> f64 {
        if x <= self.x0 {
            1.0
        } else {
            (self.x0 / x).powf(self.alpha)
        }
    }

    fn quantile(&self, q: f64) -> Result<f64> {
        check_level(q)?;
        Ok(self.from_survival_level(1.0 - q))
    }

    fn hall_params(&self) -> HallParams {
        HallParams { c: self.x0.powf(self.alpha), alpha: self.alpha, second_order: None }
    }

    fn from_survival_level(&self, s: f64) -> f64 {
        self.x0 * s.powf(-1.0 / self.alpha)
    }
}

/// Burr, `F̄(x) = (η/(η + x^τ))^λ`; tail index `λτ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BurrDist {
    pub eta: f64,
    pub lam: f64,
    pub tau: f64,
}

impl BurrDist {
    pub fn new(eta: f64, lam: f64, tau: f64) -> Result<Self> {
        check_positive("eta", eta)?;
        check_positive("lambda", lam)?;
        check_positive("tau", tau)?;
        Ok(Self { eta, lam, tau })
    }
}

impl HeavyTail for BurrDist {
    fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        (self.eta / (self.eta + x.powf(self.tau))).powf(self.lam)
    }

    fn quantile(&self, q: f64) -> Result<f64> {
        check_level(q)?;
        Ok(self.from_survival_level(1.0 - q))
    }

    fn hall_params(&self) -> HallParams {
        HallParams {
            c: self.eta.powf(self.lam),
            alpha: self.lam * self.tau,
            second_order: Some(SecondOrder { d: -self.lam * self.eta, nu: self.tau }),
        }
    }

    fn from_survival_level(&self, s: f64) -> f64 {
        // s^(-1/λ) - 1 loses precision for s near 1; exp_m1 keeps it.
        let t = (-s.ln() / self.lam).exp_m1();
        (self.eta * t).powf(1.0 / self.tau)
    }
}

/// Fréchet, `F̄(x) = 1 - exp(-x^(-α))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrechetDist {
    pub alpha: f64,
}

impl FrechetDist {
    pub fn new(alpha: f64) -> Result<Self> {
        check_positive("alpha", alpha)?;
        Ok(Self { alpha })
    }
}

impl HeavyTail for FrechetDist {
    fn survival(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        -(-x.powf(-self.alpha)).exp_m1()
    }

    fn quantile(&self, q: f64) -> Result<f64> {
        check_level(q)?;
        Ok((-q.ln()).powf(-1.0 / self.alpha))
    }

    fn hall_params(&self) -> HallParams {
        HallParams { c: 1.0, alpha: self.alpha, second_order: Some(SecondOrder { d: -0.5, nu: self.alpha }) }
    }

    fn from_survival_level(&self, s: f64) -> f64 {
        // F = 1 - s; x = (-ln F)^(-1/α)
        (-(-s).ln_1p()).powf(-1.0 / self.alpha)
    }
}

/// Any member of the catalog, for configuration and dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TailDistribution {
    Pareto(ParetoDist),
    Burr(BurrDist),
    Frechet(FrechetDist),
}

impl TailDistribution {
    pub fn pareto_xi(xi: f64) -> Result<Self> {
        check_positive("xi", xi)?;
        Ok(Self::Pareto(ParetoDist::new(1.0, 1.0 / xi)?))
    }

    pub fn frechet_xi(xi: f64) -> Result<Self> {
        check_positive("xi", xi)?;
        Ok(Self::Frechet(FrechetDist::new(1.0 / xi)?))
    }

    pub fn name(&self) -> String {
        match self {
            Self::Pareto(d) => format!("pareto(x0={}, alpha={})", d.x0, d.alpha),
            Self::Burr(d) => format!("burr(eta={}, lambda={}, tau={})", d.eta, d.lam, d.tau),
            Self::Frechet(d) => format!("frechet(alpha={})", d.alpha),
        }
    }
}

impl HeavyTail for TailDistribution {
    fn survival(&self, x: f64) -> f64 {
        match self {
            Self::Pareto(d) => d.survival(x),
            Self::Burr(d) => d.survival(x),
            Self::Frechet(d) => d.survival(x),
        }
    }

    fn quantile(&self, q: f64) -> Result<f64> {
        match self {
            Self::Pareto(d) => d.quantile(q),
            Self::Burr(d) => d.quantile(q),
            Self::Frechet(d) => d.quantile(q),
        }
    }

    fn hall_params(&self) -> HallParams {
        match self {
            Self::Pareto(d) => d.hall_params(),
            Self::Burr(d) => d.hall_params(),
            Self::Frechet(d) => d.hall_params(),
        }
    }

    fn from_survival_level(&self, s: f64) -> f64 {
        match self {
            Self::Pareto(d) => d.from_survival_level(s),
            Self::Burr(d) => d.from_survival_level(s),
            Self::Frechet(d) => d.from_survival_level(s),
        }
    }
}
