//! Closed-form strategies: the unconstrained optimum, option prices and
//! replicating fractions for the floor and the cap, and the combined amounts.
//!
//! Prices are written through the partial expectation `f(d) = Φ(d)d + φ(d)`:
//! the put is `scale · f(d_l)` and the call `scale · f(-d_u)` with
//! `scale = (θ√τ/α)e^{-rτ}` and `τ = T - t`.

use crate::error::{Error, Result};
use crate::market::{InvestorParams, MarketParams};
use crate::normal::{cdf_over_partial_expectation, partial_expectation};
use crate::scenario::Scenario;

/// Optional floor and cap on terminal wealth.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Bounds {
    k_lower: Option<f64>,
    k_upper: Option<f64>,
}

impl Bounds {
    pub fn new(k_lower: Option<f64>, k_upper: Option<f64>) -> Result<Self> {
        if let Some(k) = k_lower {
            if !k.is_finite() {
                return Err(Error::InvalidBounds(format!("K_l = {k} is not finite")));
            }
        }
        if let Some(k) = k_upper {
            if !k.is_finite() {
                return Err(Error::InvalidBounds(format!("K_u = {k} is not finite")));
            }
        }
        if let (Some(l), Some(u)) = (k_lower, k_upper) {
            if l >= u {
                return Err(Error::InvalidBounds(format!(
                    "K_l = {l} must be below K_u = {u}"
                )));
            }
        }
        Ok(Self { k_lower, k_upper })
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn lower(k: f64) -> Result<Self> {
        Self::new(Some(k), None)
    }

    pub fn upper(k: f64) -> Result<Self> {
        Self::new(None, Some(k))
    }

    pub fn both(k_lower: f64, k_upper: f64) -> Result<Self> {
        Self::new(Some(k_lower), Some(k_upper))
    }

    pub fn k_lower(&self) -> Option<f64> {
        self.k_lower
    }

    pub fn k_upper(&self) -> Option<f64> {
        self.k_upper
    }

    pub fn is_unconstrained(&self) -> bool {
        self.k_lower.is_none() && self.k_upper.is_none()
    }

    /// The strategy kind these bounds call for.
    pub fn kind(&self) -> StrategyKind {
        match (self.k_lower, self.k_upper) {
            (None, None) => StrategyKind::Unconstrained,
            (Some(_), None) => StrategyKind::LowerBounded,
            (None, Some(_)) => StrategyKind::UpperBounded,
            (Some(_), Some(_)) => StrategyKind::DoublyBounded,
        }
    }

    /// Checks the bounds against the forward value of the initial wealth:
    /// the floor must lie strictly below `X₀e^{rT}` and the cap at or above it.
    pub fn validate(&self, market: &MarketParams, investor: &InvestorParams) -> Result<()> {
        let forward = investor.x0() * market.growth();
        if let Some(l) = self.k_lower {
            if l >= forward {
                return Err(Error::InvalidBounds(format!(
                    "K_l = {l} must be below X0*e^(rT) = {forward}"
                )));
            }
        }
        if let Some(u) = self.k_upper {
            if u < forward {
                return Err(Error::InvalidBounds(format!(
                    "K_u = {u} must be at least X0*e^(rT) = {forward}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StrategyKind {
    Unconstrained,
    LowerBounded,
    UpperBounded,
    DoublyBounded,
}

impl StrategyKind {
    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::Unconstrained => "unconstrained",
            StrategyKind::LowerBounded => "lower",
            StrategyKind::UpperBounded => "upper",
            StrategyKind::DoublyBounded => "doubly",
        }
    }
}

/// Which strategy to follow and whether the invested amount is capped at
/// current wealth.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StrategySpec {
    pub kind: StrategyKind,
    pub cap_investment: bool,
}

impl StrategySpec {
    pub fn new(kind: StrategyKind, cap_investment: bool) -> Self {
        Self {
            kind,
            cap_investment,
        }
    }

    /// The uncapped strategy matching the scenario's bounds.
    pub fn for_bounds(bounds: &Bounds) -> Self {
        Self::new(bounds.kind(), false)
    }

    pub fn capped(mut self) -> Self {
        self.cap_investment = true;
        self
    }

    /// Each kind needs exactly the bounds it hedges.
    pub fn check(&self, bounds: &Bounds) -> Result<()> {
        if self.kind != bounds.kind() {
            return Err(Error::StrategyMismatch(format!(
                "{} strategy with {} bounds",
                self.kind.name(),
                bounds.kind().name()
            )));
        }
        Ok(())
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::param("alpha", alpha, "must be positive"));
    }
    Ok(())
}

/// Amount held in the stock by the unconstrained optimum,
/// `(θ/(ασ)) e^{-r(T-t)}`. It does not depend on wealth.
pub fn optimal_amount(market: &MarketParams, alpha: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    market.check_time(t)?;
    Ok(raw_optimal_amount(market, alpha, t))
}

#[inline]
pub(crate) fn raw_optimal_amount(market: &MarketParams, alpha: f64, t: f64) -> f64 {
    market.theta() / (alpha * market.sigma()) * market.discount_to_horizon(t)
}

/// Value function `V(t, x) = -exp(-αx e^{r(T-t)} - θ²(T-t)/2)`.
pub fn value_function(market: &MarketParams, alpha: f64, t: f64, x: f64) -> Result<f64> {
    check_alpha(alpha)?;
    market.check_time(t)?;
    let tau = market.horizon() - t;
    let theta = market.theta();
    Ok(-(-alpha * x * (market.r() * tau).exp() - 0.5 * theta * theta * tau).exp())
}

/// HJB residual `V_t + r x V_x - θ²V_x²/(2V_xx)` of the closed-form value
/// function, using central differences with steps `dt_fd` and `dx_fd`.
pub fn hjb_residual(
    market: &MarketParams,
    alpha: f64,
    t: f64,
    x: f64,
    dt_fd: f64,
    dx_fd: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    let terms = hjb_terms_with(market, t, x, dt_fd, dx_fd, |s, y| {
        value_function(market, alpha, s, y).unwrap_or(f64::NAN)
    })?;
    Ok(terms.residual())
}

/// The three HJB terms evaluated by finite differences on `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HjbTerms {
    pub v_t: f64,
    pub drift: f64,
    pub control: f64,
}

impl HjbTerms {
    pub fn residual(&self) -> f64 {
        self.v_t + self.drift + self.control
    }

    /// Residual divided by the largest term in magnitude.
    pub fn relative_residual(&self) -> f64 {
        let scale = self.v_t.abs().max(self.drift.abs()).max(self.control.abs());
        if scale == 0.0 {
            return 0.0;
        }
        self.residual().abs() / scale
    }
}

/// Finite-difference HJB terms for an arbitrary candidate value function.
pub fn hjb_terms_with<F>(
    market: &MarketParams,
    t: f64,
    x: f64,
    dt_fd: f64,
    dx_fd: f64,
    v: F,
) -> Result<HjbTerms>
where
    F: Fn(f64, f64) -> f64,
{
    if !(dt_fd > 0.0 && dt_fd.is_finite()) {
        return Err(Error::param("dt_fd", dt_fd, "must be positive"));
    }
    if !(dx_fd > 0.0 && dx_fd.is_finite()) {
        return Err(Error::param("dx_fd", dx_fd, "must be positive"));
    }
    if !(t - dt_fd >= 0.0 && t + dt_fd <= market.horizon()) {
        return Err(Error::domain("t", t, "(dt_fd, T - dt_fd)"));
    }
    let v_t = (v(t + dt_fd, x) - v(t - dt_fd, x)) / (2.0 * dt_fd);
    let up = v(t, x + dx_fd);
    let mid = v(t, x);
    let down = v(t, x - dx_fd);
    let v_x = (up - down) / (2.0 * dx_fd);
    let v_xx = (up - 2.0 * mid + down) / (dx_fd * dx_fd);
    if v_xx == 0.0 {
        return Err(Error::param("dx_fd", dx_fd, "second difference vanishes"));
    }
    let theta = market.theta();
    Ok(HjbTerms {
        v_t,
        drift: market.r() * x * v_x,
        control: -0.5 * theta * theta * v_x * v_x / v_xx,
    })
}

fn moneyness(market: &MarketParams, alpha: f64, k: f64, t: f64, shadow_x: f64) -> Result<f64> {
    check_alpha(alpha)?;
    market.check_before_horizon(t)?;
    Ok(raw_moneyness(market, alpha, k, t, shadow_x))
}

#[inline]
fn raw_moneyness(market: &MarketParams, alpha: f64, k: f64, t: f64, shadow_x: f64) -> f64 {
    let tau = market.horizon() - t;
    (k - shadow_x * (market.r() * tau).exp()) * alpha / (tau.sqrt() * market.theta())
}

/// Standardized moneyness of the floor, `d_l = (K_l - X̃e^{r(T-t)})α/(√(T-t)θ)`.
pub fn d_lower(
    market: &MarketParams,
    alpha: f64,
    k_lower: f64,
    t: f64,
    shadow_x: f64,
) -> Result<f64> {
    moneyness(market, alpha, k_lower, t, shadow_x)
}

/// Standardized moneyness of the cap, same form as [`d_lower`] with `K_u`.
pub fn d_upper(
    market: &MarketParams,
    alpha: f64,
    k_upper: f64,
    t: f64,
    shadow_x: f64,
) -> Result<f64> {
    moneyness(market, alpha, k_upper, t, shadow_x)
}

#[inline]
fn price_scale(market: &MarketParams, alpha: f64, tau: f64) -> f64 {
    market.theta() * tau.sqrt() / alpha * (-market.r() * tau).exp()
}

/// Price at `t` of the claim paying `(K_l - X̃_T)^+`. At `t = T` the payoff
/// itself is returned.
pub fn put_price(
    market: &MarketParams,
    alpha: f64,
    k_lower: f64,
    t: f64,
    shadow_x: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    market.check_time(t)?;
    if t == market.horizon() {
        return Ok((k_lower - shadow_x).max(0.0));
    }
    Ok(raw_put_price(market, alpha, k_lower, t, shadow_x))
}

pub(crate) fn raw_put_price(
    market: &MarketParams,
    alpha: f64,
    k: f64,
    t: f64,
    shadow_x: f64,
) -> f64 {
    let tau = market.horizon() - t;
    let d = raw_moneyness(market, alpha, k, t, shadow_x);
    price_scale(market, alpha, tau) * partial_expectation(d)
}

/// Price at `t` of the claim paying `(X̃_T - K_u)^+`. At `t = T` the payoff
/// itself is returned.
pub fn call_price(
    market: &MarketParams,
    alpha: f64,
    k_upper: f64,
    t: f64,
    shadow_x: f64,
) -> Result<f64> {
    check_alpha(alpha)?;
    market.check_time(t)?;
    if t == market.horizon() {
        return Ok((shadow_x - k_upper).max(0.0));
    }
    Ok(raw_call_price(market, alpha, k_upper, t, shadow_x))
}

pub(crate) fn raw_call_price(
    market: &MarketParams,
    alpha: f64,
    k: f64,
    t: f64,
    shadow_x: f64,
) -> f64 {
    let tau = market.horizon() - t;
    let d = raw_moneyness(market, alpha, k, t, shadow_x);
    price_scale(market, alpha, tau) * partial_expectation(-d)
}

/// Fraction of the put's value held in the stock by its replicating
/// portfolio, `-Φ(d_l)/(σ√(T-t) f(d_l))`. Always negative.
pub fn put_replication_fraction(
    market: &MarketParams,
    alpha: f64,
    k_lower: f64,
    t: f64,
    shadow_x: f64,
) -> Result<f64> {
    let d = moneyness(market, alpha, k_lower, t, shadow_x)?;
    Ok(put_fraction_at(market, t, d))
}

/// Fraction of the call's value held in the stock by its replicating
/// portfolio, `Φ(-d_u)/(σ√(T-t) f(-d_u))`. Always positive.
pub fn call_replication_fraction(
    market: &MarketParams,
    alpha: f64,
    k_upper: f64,
    t: f64,
    shadow_x: f64,
) -> Result<f64> {
    let d = moneyness(market, alpha, k_upper, t, shadow_x)?;
    Ok(call_fraction_at(market, t, d))
}

/// Put replicating fraction as a function of the moneyness `d` directly.
pub fn put_fraction_at(market: &MarketParams, t: f64, d: f64) -> f64 {
    let tau = market.horizon() - t;
    -cdf_over_partial_expectation(d) / (market.sigma() * tau.sqrt())
}

/// Call replicating fraction as a function of the moneyness `d` directly.
pub fn call_fraction_at(market: &MarketParams, t: f64, d: f64) -> f64 {
    let tau = market.horizon() - t;
    cdf_over_partial_expectation(-d) / (market.sigma() * tau.sqrt())
}

/// Amount invested in the stock at `(t, X̃_t)` with current wealth `wealth`.
///
/// The lower-bounded strategy adds the put's stock position to the optimum,
/// the upper-bounded one subtracts the call's, the doubly bounded does both.
/// With `cap_investment` the amount never exceeds current wealth.
pub fn strategy_amount(
    spec: &StrategySpec,
    scenario: &Scenario,
    t: f64,
    shadow_x: f64,
    wealth: f64,
) -> Result<f64> {
    spec.check(scenario.bounds())?;
    let market = scenario.market();
    market.check_before_horizon(t)?;
    if spec.kind != StrategyKind::Unconstrained {
        scenario.shadow_x0()?;
    }
    let amount = raw_strategy_amount(
        spec.kind,
        market,
        scenario.investor().alpha(),
        scenario.bounds(),
        t,
        shadow_x,
    );
    Ok(apply_cap(spec.cap_investment, amount, wealth))
}

#[inline]
pub(crate) fn apply_cap(cap: bool, amount: f64, wealth: f64) -> f64 {
    if cap && amount > wealth {
        wealth
    } else {
        amount
    }
}

/// Uncapped amount without validation, for the simulation inner loop.
pub(crate) fn raw_strategy_amount(
    kind: StrategyKind,
    market: &MarketParams,
    alpha: f64,
    bounds: &Bounds,
    t: f64,
    shadow_x: f64,
) -> f64 {
    let mut amount = raw_optimal_amount(market, alpha, t);
    if matches!(
        kind,
        StrategyKind::LowerBounded | StrategyKind::DoublyBounded
    ) {
        let k = bounds.k_lower().unwrap_or(f64::NEG_INFINITY);
        let d = raw_moneyness(market, alpha, k, t, shadow_x);
        amount += raw_put_price(market, alpha, k, t, shadow_x) * put_fraction_at(market, t, d);
    }
    if matches!(
        kind,
        StrategyKind::UpperBounded | StrategyKind::DoublyBounded
    ) {
        let k = bounds.k_upper().unwrap_or(f64::INFINITY);
        let d = raw_moneyness(market, alpha, k, t, shadow_x);
        amount -= raw_call_price(market, alpha, k, t, shadow_x) * call_fraction_at(market, t, d);
    }
    amount
}
