//! Probabilities that capping the invested amount at current wealth never
//! matters, or matters all the time, evaluated on a yearly grid.
//!
//! Both are products of one normal probability per year `t = 1, ..., T-1`.
//! The factors are marginal probabilities, so the products are heuristics for
//! the joint events; [`mc_prob_no_effect`] and [`mc_prob_fully_constrained`]
//! estimate the joint events directly for comparison.

use rayon::prelude::*;

use crate::distribution::normal_cdf;
use crate::error::{Error, Result};
use crate::market::{gbm_step, GaussianStream, MarketParams};
use crate::strategies::raw_optimal_amount;

fn yearly_horizon(market: &MarketParams) -> Result<usize> {
    let t = market.horizon();
    if (t - t.round()).abs() > 1e-9 || t.round() < 2.0 {
        return Err(Error::domain("T", t, "integers >= 2 (yearly steps)"));
    }
    Ok(t.round() as usize)
}

fn check_inputs(alpha: f64, x0: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::param("alpha", alpha, "must be positive"));
    }
    if !(x0 > 0.0 && x0.is_finite()) {
        return Err(Error::param("x0", x0, "must be positive"));
    }
    Ok(())
}

/// Factors `Φ((C_t + θ)/√(t+1))` for `t = 0, ..., T-2`, with
/// `C_t = (α/θ)X₀e^{rT} + θt - 1/σ`.
pub fn no_effect_factors(market: &MarketParams, alpha: f64, x0: f64) -> Result<Vec<f64>> {
    check_inputs(alpha, x0)?;
    let n = yearly_horizon(market)?;
    let theta = market.theta();
    let base = alpha / theta * x0 * market.growth() - 1.0 / market.sigma();
    Ok((0..n - 1)
        .map(|t| {
            let t = t as f64;
            let c = base + theta * t;
            normal_cdf((c + theta) / (t + 1.0).sqrt())
        })
        .collect())
}

/// Factors `Φ(Ã_t/(σ√(t+1)))` for `t = 0, ..., T-2`, with
/// `Ã_t = ln(θ/(σαX₀)) - r(T-t-1) + (μ - σ²/2)(t+1)`.
pub fn fully_constrained_factors(market: &MarketParams, alpha: f64, x0: f64) -> Result<Vec<f64>> {
    check_inputs(alpha, x0)?;
    let n = yearly_horizon(market)?;
    let sigma = market.sigma();
    let log_ratio = (market.theta() / (sigma * alpha * x0)).ln();
    let drift = market.mu() - 0.5 * sigma * sigma;
    let horizon = n as f64;
    Ok((0..n - 1)
        .map(|t| {
            let s = t as f64 + 1.0;
            let a = log_ratio - market.r() * (horizon - s) + drift * s;
            normal_cdf(a / (sigma * s.sqrt()))
        })
        .collect())
}

/// Probability that the cap never binds, for `X₀` at or above the initial
/// optimal amount.
pub fn prob_no_effect(market: &MarketParams, alpha: f64, x0: f64) -> Result<f64> {
    check_inputs(alpha, x0)?;
    if x0 < raw_optimal_amount(market, alpha, 0.0) {
        return Err(Error::domain("x0", x0, "[optimal amount at t = 0, inf)"));
    }
    Ok(no_effect_factors(market, alpha, x0)?.iter().product())
}

/// Probability that the cap binds at every date, for `X₀` at or below the
/// initial optimal amount.
pub fn prob_fully_constrained(market: &MarketParams, alpha: f64, x0: f64) -> Result<f64> {
    check_inputs(alpha, x0)?;
    if x0 > raw_optimal_amount(market, alpha, 0.0) {
        return Err(Error::domain("x0", x0, "(0, optimal amount at t = 0]"));
    }
    Ok(fully_constrained_factors(market, alpha, x0)?
        .iter()
        .product())
}

/// Both products with their factors, evaluated whether or not the wealth
/// condition of each holds.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictionProbabilities {
    pub p_no_effect: f64,
    pub p_fully_constrained: f64,
    pub no_effect_factors: Vec<f64>,
    pub fully_constrained_factors: Vec<f64>,
    /// Optimal amount at `t = 0`, the wealth threshold of both conditions.
    pub threshold: f64,
    pub x0: f64,
}

impl RestrictionProbabilities {
    pub fn no_effect_applies(&self) -> bool {
        self.x0 >= self.threshold
    }

    pub fn fully_constrained_applies(&self) -> bool {
        self.x0 <= self.threshold
    }
}

pub fn restriction_probabilities(
    market: &MarketParams,
    alpha: f64,
    x0: f64,
) -> Result<RestrictionProbabilities> {
    let no_effect = no_effect_factors(market, alpha, x0)?;
    let fully = fully_constrained_factors(market, alpha, x0)?;
    Ok(RestrictionProbabilities {
        p_no_effect: no_effect.iter().product(),
        p_fully_constrained: fully.iter().product(),
        no_effect_factors: no_effect,
        fully_constrained_factors: fully,
        threshold: raw_optimal_amount(market, alpha, 0.0),
        x0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitRow {
    pub market: MarketParams,
    pub theta: f64,
    pub p_no_effect: f64,
    pub p_fully_constrained: f64,
    pub no_effect_applies: bool,
    pub fully_constrained_applies: bool,
}

/// Tabulates both probabilities along a sweep of markets whose `θ` is
/// monotone.
pub fn limit_diagnostics(sweep: &[MarketParams], alpha: f64, x0: f64) -> Result<Vec<LimitRow>> {
    if sweep.is_empty() {
        return Err(Error::EmptyInput("market sweep"));
    }
    let thetas: Vec<f64> = sweep.iter().map(MarketParams::theta).collect();
    let rising = thetas.windows(2).all(|w| w[1] >= w[0]);
    let falling = thetas.windows(2).all(|w| w[1] <= w[0]);
    if !(rising || falling) {
        return Err(Error::param("theta", f64::NAN, "sweep must be monotone"));
    }
    sweep
        .iter()
        .map(|m| {
            let rp = restriction_probabilities(m, alpha, x0)?;
            Ok(LimitRow {
                market: *m,
                theta: m.theta(),
                p_no_effect: rp.p_no_effect,
                p_fully_constrained: rp.p_fully_constrained,
                no_effect_applies: rp.no_effect_applies(),
                fully_constrained_applies: rp.fully_constrained_applies(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

fn estimate<F>(
    market: &MarketParams,
    samples: usize,
    seed: u64,
    event: F,
) -> Result<MonteCarloEstimate>
where
    F: Fn(&mut GaussianStream, usize) -> bool + Sync,
{
    if samples == 0 {
        return Err(Error::param("samples", 0.0, "needs at least one path"));
    }
    let n = yearly_horizon(market)?;
    let hits = (0..samples as u64)
        .into_par_iter()
        .filter(|&i| event(&mut GaussianStream::new(seed, i), n))
        .count();
    let p = hits as f64 / samples as f64;
    Ok(MonteCarloEstimate {
        estimate: p,
        std_error: (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
    })
}

/// Share of unconstrained optimal paths whose wealth stays at or above the
/// optimal amount at every year `1, ..., T-1`.
pub fn mc_prob_no_effect(
    market: &MarketParams,
    alpha: f64,
    x0: f64,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    check_inputs(alpha, x0)?;
    let theta = market.theta();
    let horizon = market.horizon();
    estimate(market, samples, seed, |rng, n| {
        let mut w = 0.0;
        (1..n).all(|t| {
            w += rng.standard_normal();
            let t = t as f64;
            let disc = (market.r() * (t - horizon)).exp();
            let wealth = x0 * (market.r() * t).exp()
                + t * theta * theta / alpha * disc
                + theta / alpha * disc * w;
            wealth >= raw_optimal_amount(market, alpha, t)
        })
    })
}

/// Share of pure-stock paths whose wealth stays below the optimal amount at
/// every year `1, ..., T-1`.
pub fn mc_prob_fully_constrained(
    market: &MarketParams,
    alpha: f64,
    x0: f64,
    samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    check_inputs(alpha, x0)?;
    estimate(market, samples, seed, |rng, n| {
        let mut wealth = x0;
        (1..n).all(|t| {
            wealth = gbm_step(market, wealth, 1.0, rng.standard_normal());
            wealth < raw_optimal_amount(market, alpha, t as f64)
        })
    })
}
