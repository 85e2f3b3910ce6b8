//! Terminal-wealth laws. Unconstrained terminal wealth is normal; bounds turn
//! the tails into probability masses sitting exactly on the floor and the cap.

pub use crate::normal::{normal_cdf, normal_pdf, normal_quantile};

use crate::error::{Error, Result};
use crate::scenario::Scenario;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TerminalLaw {
    /// Mean of the shadow terminal wealth, `X̃₀e^{rT} + Tθ²/α`.
    pub mean: f64,
    /// Standard deviation of the shadow terminal wealth, `θ√T/α`.
    pub sd: f64,
    pub mass_lower: f64,
    pub mass_upper: f64,
    pub k_lower: Option<f64>,
    pub k_upper: Option<f64>,
}

pub fn terminal_law(scenario: &Scenario) -> Result<TerminalLaw> {
    let shadow = scenario.shadow_x0()?;
    let market = scenario.market();
    let alpha = scenario.investor().alpha();
    let theta = market.theta();
    let t = market.horizon();
    let mean = shadow * market.growth() + t * theta * theta / alpha;
    let sd = theta * t.sqrt() / alpha;
    let k_lower = scenario.bounds().k_lower();
    let k_upper = scenario.bounds().k_upper();
    Ok(TerminalLaw {
        mean,
        sd,
        mass_lower: k_lower.map_or(0.0, |k| normal_cdf((k - mean) / sd)),
        mass_upper: k_upper.map_or(0.0, |k| normal_cdf((mean - k) / sd)),
        k_lower,
        k_upper,
    })
}

impl TerminalLaw {
    /// Right-continuous distribution function.
    pub fn cdf(&self, x: f64) -> f64 {
        if self.k_lower.is_some_and(|k| x < k) {
            return 0.0;
        }
        if self.k_upper.is_some_and(|k| x >= k) {
            return 1.0;
        }
        normal_cdf((x - self.mean) / self.sd)
    }

    /// Smallest `x` with `cdf(x) >= p`.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        let z = normal_quantile(p)?;
        let mut q = self.mean + self.sd * z;
        if let Some(k) = self.k_lower {
            if p <= self.mass_lower {
                return Ok(k);
            }
            q = q.max(k);
        }
        if let Some(k) = self.k_upper {
            if p >= 1.0 - self.mass_upper {
                return Ok(k);
            }
            q = q.min(k);
        }
        Ok(q)
    }

    pub fn support(&self) -> (f64, f64) {
        (
            self.k_lower.unwrap_or(f64::NEG_INFINITY),
            self.k_upper.unwrap_or(f64::INFINITY),
        )
    }

    /// Whether the `p`-quantile lies strictly between the bounds.
    pub fn is_interior(&self, p: f64) -> bool {
        p > self.mass_lower && p < 1.0 - self.mass_upper
    }
}

pub fn quantile(law: &TerminalLaw, p: f64) -> Result<f64> {
    law.quantile(p)
}

/// Shift of the interior quantiles caused by the bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileShift {
    /// `(X̃₀ - X₀)e^{rT}`.
    pub predicted: f64,
    /// Difference of the two quantiles at `p`, when neither is clamped.
    pub observed: Option<f64>,
}

pub fn quantile_shift(
    constrained: &Scenario,
    unconstrained: &Scenario,
    p: f64,
) -> Result<QuantileShift> {
    if constrained.market() != unconstrained.market()
        || constrained.investor() != unconstrained.investor()
    {
        return Err(Error::StrategyMismatch(
            "scenarios differ in market or investor parameters".into(),
        ));
    }
    if !unconstrained.bounds().is_unconstrained() {
        return Err(Error::StrategyMismatch(
            "reference scenario carries bounds".into(),
        ));
    }
    let law_c = terminal_law(constrained)?;
    let law_u = terminal_law(unconstrained)?;
    let qc = law_c.quantile(p)?;
    let qu = law_u.quantile(p)?;
    let predicted =
        (constrained.shadow_x0()? - unconstrained.shadow_x0()?) * constrained.market().growth();
    Ok(QuantileShift {
        predicted,
        observed: law_c.is_interior(p).then_some(qc - qu),
    })
}
