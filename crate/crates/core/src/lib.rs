//! Optimal exponential-utility investment in a Black–Scholes market, with and
//! without floors and caps on terminal wealth.
//!
//! The crate provides the closed-form strategies and option replication
//! formulas, a solver for the shadow initial wealth, the theoretical
//! terminal-wealth laws, a seeded Monte Carlo engine and closed-form
//! probabilities for the effect of capping the invested amount at wealth.

pub mod analytics;
pub mod distribution;
pub mod error;
pub mod market;
mod normal;
pub mod scenario;
pub mod shadow;
pub mod simulation;
pub mod strategies;

pub use error::{Error, Result};
pub use market::{GaussianStream, InvestorParams, MarketParams};
pub use scenario::Scenario;
pub use strategies::{Bounds, StrategyKind, StrategySpec};
