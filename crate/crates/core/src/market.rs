//! Market and investor parameters, bond and stock dynamics, the state price
//! density and reproducible Gaussian increments.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Black–Scholes market with one bond and one stock.
///
/// The rate may be zero or negative; only the risk premium `mu - r` has to be
/// positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarketParams {
    r: f64,
    mu: f64,
    sigma: f64,
    horizon: f64,
}

impl MarketParams {
    pub fn new(r: f64, mu: f64, sigma: f64, horizon: f64) -> Result<Self> {
        if !r.is_finite() {
            return Err(Error::param("r", r, "must be finite"));
        }
        if !mu.is_finite() {
            return Err(Error::param("mu", mu, "must be finite"));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::param("sigma", sigma, "must be positive"));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::param("T", horizon, "must be positive"));
        }
        if mu <= r {
            return Err(Error::param("mu", mu, "must exceed the risk-free rate"));
        }
        Ok(Self {
            r,
            mu,
            sigma,
            horizon,
        })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Terminal time `T` in years.
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// Market price of risk `(mu - r) / sigma`, always positive.
    pub fn theta(&self) -> f64 {
        (self.mu - self.r) / self.sigma
    }

    /// `e^{-r(T-t)}`.
    pub fn discount_to_horizon(&self, t: f64) -> f64 {
        (-self.r * (self.horizon - t)).exp()
    }

    /// Forward value factor `e^{rT}`.
    pub fn growth(&self) -> f64 {
        (self.r * self.horizon).exp()
    }

    pub(crate) fn check_time(&self, t: f64) -> Result<()> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::domain("t", t, "[0, T]"));
        }
        Ok(())
    }

    pub(crate) fn check_before_horizon(&self, t: f64) -> Result<()> {
        if !(t >= 0.0 && t < self.horizon) {
            return Err(Error::domain("t", t, "[0, T)"));
        }
        Ok(())
    }
}

/// Exponential-utility investor: risk aversion and initial wealth.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvestorParams {
    alpha: f64,
    x0: f64,
}

impl InvestorParams {
    pub fn new(alpha: f64, x0: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::param("alpha", alpha, "must be positive"));
        }
        if !(x0 > 0.0 && x0.is_finite()) {
            return Err(Error::param("x0", x0, "must be positive"));
        }
        Ok(Self { alpha, x0 })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }
}

/// Bond price `B(t) = e^{rt}` with `B(0) = 1`.
pub fn bond_price(market: &MarketParams, t: f64) -> Result<f64> {
    market.check_time(t)?;
    Ok((market.r * t).exp())
}

/// Exact log-normal stock update over `dt` given the Brownian increment.
pub fn stock_step(market: &MarketParams, s_t: f64, dt: f64, dw: f64) -> Result<f64> {
    if !(s_t > 0.0) {
        return Err(Error::param("s_t", s_t, "must be positive"));
    }
    if !(dt > 0.0) {
        return Err(Error::param("dt", dt, "must be positive"));
    }
    Ok(gbm_step(market, s_t, dt, dw))
}

#[inline]
pub(crate) fn gbm_step(market: &MarketParams, s_t: f64, dt: f64, dw: f64) -> f64 {
    let sigma = market.sigma;
    s_t * ((market.mu - 0.5 * sigma * sigma) * dt + sigma * dw).exp()
}

/// Exponential utility `U(x) = -e^{-alpha x}`.
pub fn utility(alpha: f64, x: f64) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(Error::param("alpha", alpha, "must be positive"));
    }
    Ok(-(-alpha * x).exp())
}

/// State price density `H(t) = exp(-(r + θ²/2) t - θ W_t)`.
pub fn state_price_density(market: &MarketParams, t: f64, w_t: f64) -> Result<f64> {
    market.check_time(t)?;
    let theta = market.theta();
    Ok((-(market.r + 0.5 * theta * theta) * t - theta * w_t).exp())
}

/// Standard normal draws for one simulated path.
///
/// Each `(seed, stream_id)` pair selects its own ChaCha8 stream, so a path's
/// increments do not depend on which thread produces them or in what order.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl GaussianStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    pub fn standard_normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.rng)
    }

    /// Brownian increment over a step of length `dt`.
    pub fn increment(&mut self, dt: f64) -> f64 {
        dt.sqrt() * self.standard_normal()
    }
}
