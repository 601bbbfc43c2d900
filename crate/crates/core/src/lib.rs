//! Tail-index estimation for randomly right-censored heavy-tailed data,
//! combining the censored Hill estimator with expert opinion on the tail of
//! the censored points through a penalized likelihood.
//!
//! The main entry points are [`CensoredSample::top_k`] to pick the tail,
//! the closed-form estimators in [`estimators`], their Bayesian reading in
//! [`bayes`], asymptotic formulas in [`asymptotics`], Weissman quantiles in
//! [`quantiles`] and the Monte Carlo harness in [`simulation`].

pub mod asymptotics;
pub mod bayes;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod model;
pub mod quantiles;
pub mod simulation;
pub mod special;
pub mod survival;

pub use distributions::{combine_hall, BurrDist, FrechetDist, HallParams, HeavyTail, ParetoDist, TailDistribution};
pub use error::{Error, Result};
pub use estimators::{
    closed_form, flipped_estimator, hill_censored, perturbed_estimator, squared_penalty_estimator, Penalty,
    PenaltyKind,
};
pub use model::{CensoredSample, EstimatorKind, Observation, TailEstimate, TailView};
pub use survival::{kaplan_meier, KmCurve};
