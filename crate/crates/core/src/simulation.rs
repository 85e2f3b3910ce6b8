//! Seeded Monte Carlo with discrete self-financing rebalancing.
//!
//! The stock follows its exact log-normal solution and the shadow wealth its
//! exact closed form, both driven by the same Brownian path. Only the traded
//! wealth carries discretization error: the amount in the stock is fixed at
//! the left end of each step and the rest earns the risk-free rate.
//!
//! Path `i` draws from stream `i` of the master seed, so results do not depend
//! on the number of threads.

use rayon::prelude::*;

use crate::distribution::TerminalLaw;
use crate::error::{Error, Result};
use crate::market::{gbm_step, GaussianStream, MarketParams};
use crate::scenario::Scenario;
use crate::strategies::{
    apply_cap, call_fraction_at, put_fraction_at, raw_call_price, raw_put_price,
    raw_strategy_amount, Bounds, StrategyKind, StrategySpec,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub samples: usize,
    /// Rebalancing interval in years.
    pub step_width: f64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(samples: usize, step_width: f64, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::param("s", 0.0, "needs at least one path"));
        }
        if !(step_width > 0.0 && step_width.is_finite()) {
            return Err(Error::param("h", step_width, "must be positive"));
        }
        Ok(Self {
            samples,
            step_width,
            seed,
        })
    }

    /// Number of rebalancing steps, `T/h` rounded to the nearest integer.
    pub fn steps(&self, horizon: f64) -> Result<usize> {
        if self.step_width > horizon {
            return Err(Error::param("h", self.step_width, "must not exceed T"));
        }
        let n = (horizon / self.step_width).round();
        if !(1.0..=1e8).contains(&n) {
            return Err(Error::param("h", self.step_width, "gives an unusable grid"));
        }
        Ok(n as usize)
    }
}

/// One simulated trajectory on the grid `0, dt, ..., T`.
///
/// `invested` has one entry per rebalancing date, so one less than the other
/// columns: nothing is traded at `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct PathRecord {
    pub times: Vec<f64>,
    pub stock: Vec<f64>,
    pub shadow: Vec<f64>,
    pub invested: Vec<f64>,
    pub wealth: Vec<f64>,
}

impl PathRecord {
    pub fn terminal_wealth(&self) -> f64 {
        *self.wealth.last().expect("paths are never empty")
    }

    pub fn terminal_shadow(&self) -> f64 {
        *self.shadow.last().expect("paths are never empty")
    }

    fn push(&mut self, t: f64, stock: f64, shadow: f64, invested: Option<f64>, wealth: f64) {
        self.times.push(t);
        self.stock.push(stock);
        self.shadow.push(shadow);
        if let Some(a) = invested {
            self.invested.push(a);
        }
        self.wealth.push(wealth);
    }
}

/// Final values of one path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalOutcome {
    pub wealth: f64,
    pub shadow: f64,
    pub stock: f64,
    /// Brownian motion at `T`.
    pub brownian: f64,
}

struct Engine<'a> {
    market: &'a MarketParams,
    alpha: f64,
    bounds: &'a Bounds,
    kind: StrategyKind,
    cap: bool,
    x0: f64,
    shadow0: f64,
    n: usize,
    dt: f64,
    seed: u64,
}

impl<'a> Engine<'a> {
    fn new(scenario: &'a Scenario, spec: &StrategySpec, config: &SimConfig) -> Result<Self> {
        spec.check(scenario.bounds())?;
        let shadow0 = scenario.shadow_x0()?;
        let market = scenario.market();
        let n = config.steps(market.horizon())?;
        Ok(Self {
            market,
            alpha: scenario.investor().alpha(),
            bounds: scenario.bounds(),
            kind: spec.kind,
            cap: spec.cap_investment,
            x0: scenario.investor().x0(),
            shadow0,
            n,
            dt: market.horizon() / n as f64,
            seed: config.seed,
        })
    }

    fn shadow_at(&self, t: f64, w: f64) -> f64 {
        let m = self.market;
        let theta = m.theta();
        let disc = (m.r() * (t - m.horizon())).exp();
        self.shadow0 * (m.r() * t).exp()
            + t * theta * theta / self.alpha * disc
            + theta / self.alpha * disc * w
    }

    /// Runs path `index`, reporting `(t, stock, shadow, invested, wealth)` at
    /// each grid date; `invested` is `None` at `T`.
    fn run<F>(&self, index: u64, mut visit: F) -> TerminalOutcome
    where
        F: FnMut(f64, f64, f64, Option<f64>, f64),
    {
        let mut rng = GaussianStream::new(self.seed, index);
        let growth = (self.market.r() * self.dt).exp() - 1.0;
        let mut w = 0.0;
        let mut stock = 1.0;
        let mut shadow = self.shadow0;
        let mut wealth = self.x0;
        for i in 0..self.n {
            let t = i as f64 * self.dt;
            let raw =
                raw_strategy_amount(self.kind, self.market, self.alpha, self.bounds, t, shadow);
            let invested = apply_cap(self.cap, raw, wealth);
            visit(t, stock, shadow, Some(invested), wealth);
            let dw = rng.increment(self.dt);
            let next_stock = gbm_step(self.market, stock, self.dt, dw);
            wealth += invested * (next_stock / stock - 1.0) + (wealth - invested) * growth;
            stock = next_stock;
            w += dw;
            shadow = self.shadow_at((i + 1) as f64 * self.dt, w);
        }
        visit(self.market.horizon(), stock, shadow, None, wealth);
        TerminalOutcome {
            wealth,
            shadow,
            stock,
            brownian: w,
        }
    }
}

/// Simulates `config.samples` full paths.
pub fn simulate(
    scenario: &Scenario,
    spec: &StrategySpec,
    config: &SimConfig,
) -> Result<Vec<PathRecord>> {
    let engine = Engine::new(scenario, spec, config)?;
    let n = engine.n;
    Ok((0..config.samples as u64)
        .into_par_iter()
        .map(|index| {
            let mut rec = PathRecord {
                times: Vec::with_capacity(n + 1),
                stock: Vec::with_capacity(n + 1),
                shadow: Vec::with_capacity(n + 1),
                invested: Vec::with_capacity(n),
                wealth: Vec::with_capacity(n + 1),
            };
            engine.run(index, |t, s, x, inv, w| rec.push(t, s, x, inv, w));
            rec
        })
        .collect())
}

/// Full record of the single path `index`, identical to entry `index` of
/// [`simulate`] with the same configuration.
pub fn simulate_path(
    scenario: &Scenario,
    spec: &StrategySpec,
    config: &SimConfig,
    index: u64,
) -> Result<PathRecord> {
    let engine = Engine::new(scenario, spec, config)?;
    let n = engine.n;
    let mut rec = PathRecord {
        times: Vec::with_capacity(n + 1),
        stock: Vec::with_capacity(n + 1),
        shadow: Vec::with_capacity(n + 1),
        invested: Vec::with_capacity(n),
        wealth: Vec::with_capacity(n + 1),
    };
    engine.run(index, |t, s, x, inv, w| rec.push(t, s, x, inv, w));
    Ok(rec)
}

/// Same as [`simulate`] but keeps only the final values of each path.
pub fn simulate_terminal(
    scenario: &Scenario,
    spec: &StrategySpec,
    config: &SimConfig,
) -> Result<Vec<TerminalOutcome>> {
    let engine = Engine::new(scenario, spec, config)?;
    Ok((0..config.samples as u64)
        .into_par_iter()
        .map(|index| engine.run(index, |_, _, _, _, _| {}))
        .collect())
}

/// Option on the shadow terminal wealth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptionLeg {
    /// Pays `(K - X̃_T)^+`.
    Put(f64),
    /// Pays `(X̃_T - K)^+`.
    Call(f64),
}

impl OptionLeg {
    pub fn payoff(&self, shadow_t: f64) -> f64 {
        match *self {
            OptionLeg::Put(k) => (k - shadow_t).max(0.0),
            OptionLeg::Call(k) => (shadow_t - k).max(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HedgeOutcome {
    pub portfolio: f64,
    pub payoff: f64,
}

impl HedgeOutcome {
    pub fn error(&self) -> f64 {
        self.portfolio - self.payoff
    }
}

/// Delta hedge of `leg` started from its time-zero price. At each rebalancing
/// date the stock position is the replicating fraction times the option's
/// price at `(t, X̃_t)`; the rest of the portfolio earns the risk-free rate.
pub fn simulate_hedge(
    scenario: &Scenario,
    leg: OptionLeg,
    config: &SimConfig,
) -> Result<Vec<HedgeOutcome>> {
    let shadow0 = scenario.shadow_x0()?;
    let unconstrained = scenario.without_bounds().with_shadow(shadow0);
    let spec = StrategySpec::new(StrategyKind::Unconstrained, false);
    let engine = Engine::new(&unconstrained, &spec, config)?;
    let market = scenario.market();
    let alpha = scenario.investor().alpha();
    let theta = market.theta();
    type Price = fn(&MarketParams, f64, f64, f64, f64) -> f64;
    type Fraction = fn(&MarketParams, f64, f64) -> f64;
    let (price, fraction): (Price, Fraction) = match leg {
        OptionLeg::Put(_) => (raw_put_price, put_fraction_at),
        OptionLeg::Call(_) => (raw_call_price, call_fraction_at),
    };
    let k = match leg {
        OptionLeg::Put(k) | OptionLeg::Call(k) => k,
    };
    let growth = (market.r() * engine.dt).exp() - 1.0;
    Ok((0..config.samples as u64)
        .into_par_iter()
        .map(|index| {
            let mut rng = GaussianStream::new(engine.seed, index);
            let mut value = price(market, alpha, k, 0.0, shadow0);
            let mut shadow = shadow0;
            let mut w = 0.0;
            for i in 0..engine.n {
                let t = i as f64 * engine.dt;
                let tau = market.horizon() - t;
                let d = (k - shadow * (market.r() * tau).exp()) * alpha / (tau.sqrt() * theta);
                let invested = fraction(market, t, d) * price(market, alpha, k, t, shadow);
                let dw = rng.increment(engine.dt);
                let gross = gbm_step(market, 1.0, engine.dt, dw);
                value += invested * (gross - 1.0) + (value - invested) * growth;
                w += dw;
                shadow = engine.shadow_at((i + 1) as f64 * engine.dt, w);
            }
            HedgeOutcome {
                portfolio: value,
                payoff: leg.payoff(shadow),
            }
        })
        .collect())
}

pub fn mean_absolute_error(outcomes: &[HedgeOutcome]) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::EmptyInput("hedge outcomes"));
    }
    Ok(outcomes.iter().map(|o| o.error().abs()).sum::<f64>() / outcomes.len() as f64)
}

/// Continuous-time target of the terminal wealth: the shadow terminal wealth
/// clamped to the bounds.
pub fn terminal_target(bounds: &Bounds, shadow_t: f64) -> f64 {
    let mut x = shadow_t;
    if let Some(k) = bounds.k_lower() {
        x = x.max(k);
    }
    if let Some(k) = bounds.k_upper() {
        x = x.min(k);
    }
    x
}

/// Mean absolute gap between simulated terminal wealth and its
/// continuous-time target, used as the measured discretization band.
pub fn discretization_band(outcomes: &[TerminalOutcome], bounds: &Bounds) -> Result<f64> {
    if outcomes.is_empty() {
        return Err(Error::EmptyInput("terminal outcomes"));
    }
    let total: f64 = outcomes
        .iter()
        .map(|o| (o.wealth - terminal_target(bounds, o.shadow)).abs())
        .sum();
    Ok(total / outcomes.len() as f64)
}

/// Tolerance `3(θ/α)√h` around the bounds for discretely rebalanced terminal
/// wealth. The hedging error of the kinked payoffs has spread of order
/// `(θ/α)√h`.
pub fn bound_tolerance(market: &MarketParams, alpha: f64, step_width: f64) -> f64 {
    3.0 * market.theta() / alpha * step_width.sqrt()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    /// `bins + 1` edges.
    pub edges: Vec<f64>,
    /// Fraction of values per bin.
    pub mass: Vec<f64>,
}

/// Fractions of terminal values at or beyond a bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundMass {
    pub bound: f64,
    /// Within `1e-6 * max(1, |K|)` of the bound or past it.
    pub tight: f64,
    /// Same, with the discretization band added to the tolerance.
    pub banded: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistributionSummary {
    pub samples: usize,
    pub probabilities: Vec<f64>,
    pub quantiles: Vec<f64>,
    pub ml_mean: f64,
    pub ml_sd: f64,
    pub histogram: Histogram,
    pub at_lower: Option<BoundMass>,
    pub at_upper: Option<BoundMass>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummaryOptions {
    pub bins: usize,
    /// Extra distance from a bound still counted as sitting on it.
    pub discretization_band: f64,
}

impl Default for SummaryOptions {
    fn default() -> Self {
        Self {
            bins: 50,
            discretization_band: 0.0,
        }
    }
}

/// Empirical quantile with linear interpolation between order statistics,
/// on data sorted ascending.
pub fn empirical_quantile(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptyInput("sample"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::domain("p", p, "[0, 1]"));
    }
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

fn histogram(sorted: &[f64], bins: usize) -> Histogram {
    let lo = sorted[0];
    let hi = sorted[sorted.len() - 1];
    if hi <= lo {
        return Histogram {
            edges: vec![lo, hi],
            mass: vec![1.0],
        };
    }
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
    let mut counts = vec![0usize; bins];
    for &v in sorted {
        let i = (((v - lo) / width) as usize).min(bins - 1);
        counts[i] += 1;
    }
    let n = sorted.len() as f64;
    Histogram {
        edges,
        mass: counts.into_iter().map(|c| c as f64 / n).collect(),
    }
}

fn tight_band(k: f64) -> f64 {
    1e-6 * k.abs().max(1.0)
}

/// Empirical quantiles, normal maximum-likelihood fit, histogram and bound
/// masses of a set of terminal values.
pub fn summarize(
    values: &[f64],
    probabilities: &[f64],
    bounds: &Bounds,
    options: &SummaryOptions,
) -> Result<DistributionSummary> {
    if values.is_empty() {
        return Err(Error::EmptyInput("terminal values"));
    }
    if options.bins == 0 {
        return Err(Error::param("bins", 0.0, "must be positive"));
    }
    if !(options.discretization_band >= 0.0) {
        return Err(Error::param(
            "band",
            options.discretization_band,
            "must be non-negative",
        ));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let quantiles = probabilities
        .iter()
        .map(|&p| empirical_quantile(&sorted, p))
        .collect::<Result<Vec<_>>>()?;
    let n = sorted.len() as f64;
    let ml_mean = sorted.iter().sum::<f64>() / n;
    let ml_sd = (sorted.iter().map(|v| (v - ml_mean).powi(2)).sum::<f64>() / n).sqrt();
    let share = |pred: &dyn Fn(f64) -> bool| sorted.iter().filter(|&&v| pred(v)).count() as f64 / n;
    let band = options.discretization_band;
    let at_lower = bounds.k_lower().map(|k| {
        let tb = tight_band(k);
        BoundMass {
            bound: k,
            tight: share(&|v| v <= k + tb),
            banded: share(&|v| v <= k + tb + band),
        }
    });
    let at_upper = bounds.k_upper().map(|k| {
        let tb = tight_band(k);
        BoundMass {
            bound: k,
            tight: share(&|v| v >= k - tb),
            banded: share(&|v| v >= k - tb - band),
        }
    });
    Ok(DistributionSummary {
        samples: sorted.len(),
        probabilities: probabilities.to_vec(),
        quantiles,
        histogram: histogram(&sorted, options.bins),
        ml_mean,
        ml_sd,
        at_lower,
        at_upper,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileDeviation {
    pub p: f64,
    pub theoretical: f64,
    pub empirical: f64,
    /// `(empirical - theoretical) / theoretical`; `None` when the theoretical
    /// quantile is zero.
    pub relative: Option<f64>,
}

/// Signed relative deviation of each empirical quantile from the law's.
pub fn deviation_report(
    summary: &DistributionSummary,
    law: &TerminalLaw,
) -> Result<Vec<QuantileDeviation>> {
    summary
        .probabilities
        .iter()
        .zip(&summary.quantiles)
        .map(|(&p, &empirical)| {
            let theoretical = law.quantile(p)?;
            Ok(QuantileDeviation {
                p,
                theoretical,
                empirical,
                relative: (theoretical != 0.0).then(|| (empirical - theoretical) / theoretical),
            })
        })
        .collect()
}
