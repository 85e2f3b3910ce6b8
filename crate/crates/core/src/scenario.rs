use crate::error::{Error, Result};
use crate::market::{InvestorParams, MarketParams};
use crate::shadow::{solve_shadow, ShadowSolution};
use crate::strategies::Bounds;

/// Market, investor and bounds together with the shadow initial wealth once
/// it is known.
///
/// Without bounds the shadow value is the initial wealth itself and is set on
/// construction. With bounds it stays unresolved until [`Scenario::resolved`]
/// or [`Scenario::with_shadow`] is called.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    market: MarketParams,
    investor: InvestorParams,
    bounds: Bounds,
    shadow: Option<f64>,
}

impl Scenario {
    pub fn new(market: MarketParams, investor: InvestorParams, bounds: Bounds) -> Result<Self> {
        bounds.validate(&market, &investor)?;
        let shadow = bounds.is_unconstrained().then_some(investor.x0());
        Ok(Self {
            market,
            investor,
            bounds,
            shadow,
        })
    }

    pub fn unconstrained(market: MarketParams, investor: InvestorParams) -> Self {
        Self {
            market,
            investor,
            bounds: Bounds::none(),
            shadow: Some(investor.x0()),
        }
    }

    /// Solves the budget constraint and stores the shadow value.
    pub fn resolved(self) -> Result<Self> {
        Ok(self.resolve()?.0)
    }

    /// Like [`Scenario::resolved`] but also hands back the solver report.
    pub fn resolve(self) -> Result<(Self, ShadowSolution)> {
        let solution = solve_shadow(&self)?;
        Ok((self.with_shadow(solution.shadow_x0), solution))
    }

    /// Sets the shadow value directly, e.g. from a previous solve.
    pub fn with_shadow(mut self, shadow_x0: f64) -> Self {
        self.shadow = Some(shadow_x0);
        self
    }

    /// The same market and investor with the bounds removed.
    pub fn without_bounds(&self) -> Self {
        Self::unconstrained(self.market, self.investor)
    }

    pub fn market(&self) -> &MarketParams {
        &self.market
    }

    pub fn investor(&self) -> &InvestorParams {
        &self.investor
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn shadow_x0(&self) -> Result<f64> {
        self.shadow.ok_or(Error::UnresolvedShadow)
    }

    pub fn is_resolved(&self) -> bool {
        self.shadow.is_some()
    }
}
