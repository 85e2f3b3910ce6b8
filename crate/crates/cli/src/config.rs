//! Scenario files.
//!
//! A scenario is a TOML document with `[market]`, `[investor]`, `[bounds]`,
//! `[sim]` and `[strategy]` sections. Unknown keys are rejected.
//!
//! ```toml
//! [market]
//! r = 0.01
//! mu = 0.03
//! sigma = 0.1
//! T = 20
//!
//! [investor]
//! alpha = 0.0001
//! x0 = 1000          # or "optimal" for the initial optimal amount
//!
//! [bounds]
//! k_lower = 800
//!
//! [sim]
//! s = 3000
//! h = "1/49"         # years, as a number or a fraction
//! seed = 42
//! probabilities = [0.25, 0.5, 0.75, 0.95]
//!
//! [strategy]
//! kind = "lower"     # unconstrained | lower | upper | doubly
//! cap_investment = false
//! ```

use std::path::Path;

use serde::Deserialize;

use boundwealth::simulation::SimConfig;
use boundwealth::strategies::optimal_amount;
use boundwealth::{Bounds, InvestorParams, MarketParams, Scenario, StrategyKind, StrategySpec};

use crate::error::CliError;

pub const DEFAULT_PROBABILITIES: [f64; 4] = [0.25, 0.5, 0.75, 0.95];

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub market: MarketSection,
    pub investor: InvestorSection,
    #[serde(default)]
    pub bounds: BoundsSection,
    pub sim: Option<SimSection>,
    pub strategy: Option<StrategySection>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketSection {
    pub r: f64,
    pub mu: f64,
    pub sigma: f64,
    #[serde(rename = "T")]
    pub horizon: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvestorSection {
    pub alpha: f64,
    pub x0: Wealth,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Wealth {
    Amount(f64),
    Keyword(String),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSection {
    pub k_lower: Option<f64>,
    pub k_upper: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    pub s: usize,
    pub h: StepWidth,
    pub seed: Option<u64>,
    pub probabilities: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum StepWidth {
    Years(f64),
    Fraction(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrategySection {
    pub kind: KindName,
    #[serde(default)]
    pub cap_investment: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KindName {
    Unconstrained,
    Lower,
    Upper,
    Doubly,
}

impl From<KindName> for StrategyKind {
    fn from(k: KindName) -> Self {
        match k {
            KindName::Unconstrained => StrategyKind::Unconstrained,
            KindName::Lower => StrategyKind::LowerBounded,
            KindName::Upper => StrategyKind::UpperBounded,
            KindName::Doubly => StrategyKind::DoublyBounded,
        }
    }
}

impl StepWidth {
    pub fn years(&self) -> Result<f64, CliError> {
        match self {
            StepWidth::Years(h) => Ok(*h),
            StepWidth::Fraction(text) => {
                let bad = || CliError::Config(format!("cannot read step width {text:?}"));
                let (num, den) = text.split_once('/').ok_or_else(bad)?;
                let num: f64 = num.trim().parse().map_err(|_| bad())?;
                let den: f64 = den.trim().parse().map_err(|_| bad())?;
                if den == 0.0 {
                    return Err(bad());
                }
                Ok(num / den)
            }
        }
    }
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    pub fn market(&self) -> Result<MarketParams, CliError> {
        let m = &self.market;
        Ok(MarketParams::new(m.r, m.mu, m.sigma, m.horizon)?)
    }

    pub fn investor(&self) -> Result<InvestorParams, CliError> {
        let market = self.market()?;
        let alpha = self.investor.alpha;
        let x0 = match &self.investor.x0 {
            Wealth::Amount(x) => *x,
            Wealth::Keyword(k) if k == "optimal" => optimal_amount(&market, alpha, 0.0)?,
            Wealth::Keyword(k) => {
                return Err(CliError::Config(format!(
                    "x0 must be a number or \"optimal\", got {k:?}"
                )))
            }
        };
        Ok(InvestorParams::new(alpha, x0)?)
    }

    pub fn bounds(&self) -> Result<Bounds, CliError> {
        Ok(Bounds::new(self.bounds.k_lower, self.bounds.k_upper)?)
    }

    /// Validated scenario; the shadow value is still unresolved when bounds
    /// are present.
    pub fn scenario(&self) -> Result<Scenario, CliError> {
        Ok(Scenario::new(
            self.market()?,
            self.investor()?,
            self.bounds()?,
        )?)
    }

    /// The strategy section if present, otherwise the uncapped strategy for
    /// the bounds. A stated kind has to match the bounds.
    pub fn strategy(&self) -> Result<StrategySpec, CliError> {
        let bounds = self.bounds()?;
        let spec = match &self.strategy {
            Some(s) => StrategySpec::new(s.kind.into(), s.cap_investment),
            None => StrategySpec::for_bounds(&bounds),
        };
        spec.check(&bounds)?;
        Ok(spec)
    }

    pub fn sim_section(&self) -> Result<&SimSection, CliError> {
        self.sim
            .as_ref()
            .ok_or_else(|| CliError::Config("this command needs a [sim] section".into()))
    }

    /// Simulation settings; a seed is mandatory.
    pub fn sim_config(&self) -> Result<SimConfig, CliError> {
        let sim = self.sim_section()?;
        let seed = sim
            .seed
            .ok_or_else(|| CliError::Config("[sim] needs a seed".into()))?;
        Ok(SimConfig::new(sim.s, sim.h.years()?, seed)?)
    }

    pub fn probabilities(&self) -> Result<Vec<f64>, CliError> {
        let probs = self
            .sim
            .as_ref()
            .and_then(|s| s.probabilities.clone())
            .unwrap_or_else(|| DEFAULT_PROBABILITIES.to_vec());
        if probs.is_empty() {
            return Err(CliError::Config("probabilities list is empty".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
            return Err(CliError::Config(format!(
                "probability {p} is outside (0, 1)"
            )));
        }
        Ok(probs)
    }
}
