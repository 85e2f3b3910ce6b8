//! Shadow initial wealth from the budget constraint.
//!
//! The constrained terminal wealth is the unconstrained optimum started from
//! a fictitious wealth `X̃₀`, plus a put on the floor and minus a call on the
//! cap. Its price must equal the real initial wealth, which pins `X̃₀` down.
//! The budget gap has slope `Φ(d_u) - Φ(d_l)` in `X̃₀`, strictly between 0
//! and 1, so the root is unique.

use crate::error::{Error, Result};
use crate::market::MarketParams;
use crate::scenario::Scenario;
use crate::strategies::{raw_call_price, raw_put_price, Bounds};

const MAX_ITERATIONS: usize = 400;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowSolution {
    pub shadow_x0: f64,
    /// Budget mismatch at `shadow_x0`.
    pub residual: f64,
    pub iterations: usize,
}

/// Value at time zero of the bounded terminal wealth started from `candidate`,
/// minus the real initial wealth.
pub fn budget_gap(scenario: &Scenario, candidate: f64) -> f64 {
    gap(
        scenario.market(),
        scenario.investor().alpha(),
        scenario.bounds(),
        scenario.investor().x0(),
        candidate,
    )
}

fn gap(market: &MarketParams, alpha: f64, bounds: &Bounds, x0: f64, candidate: f64) -> f64 {
    let mut value = candidate - x0;
    if let Some(k) = bounds.k_lower() {
        value += raw_put_price(market, alpha, k, 0.0, candidate);
    }
    if let Some(k) = bounds.k_upper() {
        value -= raw_call_price(market, alpha, k, 0.0, candidate);
    }
    value
}

/// Residual tolerance used by [`solve_shadow`].
pub fn tolerance(x0: f64) -> f64 {
    1e-9 * x0.max(1.0)
}

/// Finds the shadow value by bracketing and then mixing secant steps with
/// bisection.
pub fn solve_shadow(scenario: &Scenario) -> Result<ShadowSolution> {
    let market = scenario.market();
    let alpha = scenario.investor().alpha();
    let x0 = scenario.investor().x0();
    let bounds = scenario.bounds();
    scenario.bounds().validate(market, scenario.investor())?;
    let f = |x: f64| gap(market, alpha, bounds, x0, x);
    let tol = tolerance(x0);

    if bounds.is_unconstrained() {
        return Ok(ShadowSolution {
            shadow_x0: x0,
            residual: 0.0,
            iterations: 0,
        });
    }

    let put0 = bounds
        .k_lower()
        .map_or(0.0, |k| raw_put_price(market, alpha, k, 0.0, x0));
    let call0 = bounds
        .k_upper()
        .map_or(0.0, |k| raw_call_price(market, alpha, k, 0.0, x0));
    let mut lo = x0 - put0 + call0 - 1.0;
    let mut hi = x0 + call0 + 1.0;
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);

    let limit = 1e3 * x0.abs() * (market.r().abs() * market.horizon()).exp();
    let mut step = (hi - lo).max(1.0);
    let mut iterations = 0;
    while f_lo > 0.0 || f_hi < 0.0 {
        iterations += 1;
        if f_lo > 0.0 {
            lo -= step;
            f_lo = f(lo);
        }
        if f_hi < 0.0 {
            hi += step;
            f_hi = f(hi);
        }
        step *= 2.0;
        if hi - lo > limit || !(f_lo.is_finite() && f_hi.is_finite()) {
            return Err(Error::SolverFailure(format!(
                "no sign change within a bracket of width {limit:.6e}"
            )));
        }
    }
    if f_lo == 0.0 {
        return Ok(ShadowSolution {
            shadow_x0: lo,
            residual: 0.0,
            iterations,
        });
    }
    if f_hi == 0.0 {
        return Ok(ShadowSolution {
            shadow_x0: hi,
            residual: 0.0,
            iterations,
        });
    }

    let mut best = if f_lo.abs() < f_hi.abs() {
        (lo, f_lo)
    } else {
        (hi, f_hi)
    };
    let mut bisect_next = false;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        // polish well past the tolerance while the bracket allows it
        if best.1.abs() <= 1e-3 * tol {
            break;
        }
        let width = hi - lo;
        let mut x = if bisect_next {
            0.5 * (lo + hi)
        } else {
            lo - f_lo * width / (f_hi - f_lo)
        };
        if !(x > lo && x < hi) {
            x = 0.5 * (lo + hi);
        }
        if x <= lo || x >= hi {
            // bracket exhausted at floating point resolution
            break;
        }
        let fx = f(x);
        if fx.abs() < best.1.abs() {
            best = (x, fx);
        }
        if fx < 0.0 {
            lo = x;
            f_lo = fx;
        } else if fx > 0.0 {
            hi = x;
            f_hi = fx;
        } else {
            best = (x, 0.0);
            break;
        }
        // fall back to bisection whenever the secant stalls on one side
        bisect_next = !bisect_next && hi - lo > 0.5 * width;
    }

    if best.1.abs() > tol {
        return Err(Error::SolverFailure(format!(
            "budget residual {:.3e} above tolerance {tol:.3e}",
            best.1
        )));
    }
    Ok(ShadowSolution {
        shadow_x0: best.0,
        residual: best.1,
        iterations,
    })
}

/// Cap that offsets the floor so that the shadow value equals the initial
/// wealth: `2X₀e^{rT} - K_l`.
pub fn balanced_upper_bound(x0: f64, market: &MarketParams, k_lower: f64) -> Result<f64> {
    let k_upper = 2.0 * x0 * market.growth() - k_lower;
    if !(k_upper > k_lower) {
        return Err(Error::InvalidBounds(format!(
            "balanced cap {k_upper} is not above K_l = {k_lower}"
        )));
    }
    Ok(k_upper)
}
