//! The subcommands. Each returns its CSV output as a string so the binary and
//! the tests share one code path.
//!
//! CSV conventions: comma separated, LF line endings, a fixed header, and
//! fixed-point numbers with six decimals (twelve for histogram masses).

use std::fmt::Write as _;

use boundwealth::analytics::{
    mc_prob_fully_constrained, mc_prob_no_effect, restriction_probabilities,
};
use boundwealth::distribution::terminal_law;
use boundwealth::simulation::{
    deviation_report, simulate_path, simulate_terminal, summarize, Histogram, SummaryOptions,
};
use boundwealth::strategies::{
    call_price, call_replication_fraction, d_lower, d_upper, optimal_amount, put_price,
    put_replication_fraction, strategy_amount,
};
use boundwealth::{Scenario, StrategySpec};

use crate::config::ScenarioFile;
use crate::error::CliError;

pub fn num(x: f64) -> String {
    format!("{x:.6}")
}

fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn resolved(
    file: &ScenarioFile,
) -> Result<(Scenario, Option<boundwealth::shadow::ShadowSolution>), CliError> {
    let scenario = file.scenario()?;
    if scenario.is_resolved() {
        return Ok((scenario, None));
    }
    let (scenario, solution) = scenario.resolve()?;
    Ok((scenario, Some(solution)))
}

/// Shadow initial wealth and the budget residual at it.
pub fn cmd_shadow(file: &ScenarioFile) -> Result<String, CliError> {
    let (scenario, solution) = resolved(file)?;
    let mut out = String::from("shadow_x0,residual,iterations\n");
    let (residual, iterations) = solution.map_or((0.0, 0), |s| (s.residual, s.iterations));
    writeln!(
        out,
        "{},{:.3e},{}",
        num(scenario.shadow_x0()?),
        residual,
        iterations
    )
    .unwrap();
    Ok(out)
}

/// Theoretical and empirical terminal-wealth quantiles with the relative
/// deviation between them.
pub fn cmd_quantiles(file: &ScenarioFile) -> Result<String, CliError> {
    let (scenario, _) = resolved(file)?;
    let spec = file.strategy()?;
    let config = file.sim_config()?;
    let probabilities = file.probabilities()?;
    let law = terminal_law(&scenario)?;
    let outcomes = simulate_terminal(&scenario, &spec, &config)?;
    let values: Vec<f64> = outcomes.iter().map(|o| o.wealth).collect();
    let summary = summarize(
        &values,
        &probabilities,
        scenario.bounds(),
        &SummaryOptions::default(),
    )?;
    let mut out = String::from("p,theoretical,empirical,deviation\n");
    for d in deviation_report(&summary, &law)? {
        writeln!(
            out,
            "{},{},{},{}",
            num(d.p),
            num(d.theoretical),
            num(d.empirical),
            opt_num(d.relative)
        )
        .unwrap();
    }
    Ok(out)
}

#[derive(Debug, Clone, Default)]
pub struct SimulateOptions {
    /// Index of the path to dump step by step.
    pub dump_path: Option<u64>,
    /// Number of histogram bins, when a histogram is wanted.
    pub histogram_bins: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct SimulateOutput {
    pub terminal: String,
    pub path: Option<String>,
    pub histogram: Option<String>,
}

/// Per-path terminal values, optionally with one full path and a histogram
/// of terminal wealth.
pub fn cmd_simulate(
    file: &ScenarioFile,
    options: &SimulateOptions,
) -> Result<SimulateOutput, CliError> {
    let (scenario, _) = resolved(file)?;
    let spec = file.strategy()?;
    let config = file.sim_config()?;
    let outcomes = simulate_terminal(&scenario, &spec, &config)?;
    let mut terminal = String::from("path,wealth,shadow,stock\n");
    for (i, o) in outcomes.iter().enumerate() {
        writeln!(
            terminal,
            "{i},{},{},{}",
            num(o.wealth),
            num(o.shadow),
            num(o.stock)
        )
        .unwrap();
    }

    let path = match options.dump_path {
        Some(index) => {
            if index >= config.samples as u64 {
                return Err(CliError::Config(format!(
                    "path {index} does not exist with s = {}",
                    config.samples
                )));
            }
            let rec = simulate_path(&scenario, &spec, &config, index)?;
            let mut csv = String::from("t,stock,shadow,invested,wealth\n");
            for i in 0..rec.times.len() {
                let invested = rec.invested.get(i).copied();
                writeln!(
                    csv,
                    "{},{},{},{},{}",
                    num(rec.times[i]),
                    num(rec.stock[i]),
                    num(rec.shadow[i]),
                    opt_num(invested),
                    num(rec.wealth[i])
                )
                .unwrap();
            }
            Some(csv)
        }
        None => None,
    };

    let histogram = match options.histogram_bins {
        Some(bins) => {
            let values: Vec<f64> = outcomes.iter().map(|o| o.wealth).collect();
            let opts = SummaryOptions {
                bins,
                ..SummaryOptions::default()
            };
            let summary = summarize(&values, &[0.5], scenario.bounds(), &opts)?;
            Some(histogram_csv(&summary.histogram))
        }
        None => None,
    };

    Ok(SimulateOutput {
        terminal,
        path,
        histogram,
    })
}

fn histogram_csv(h: &Histogram) -> String {
    let mut csv = String::from("lower,upper,mass\n");
    for (i, m) in h.mass.iter().enumerate() {
        writeln!(csv, "{},{},{:.12}", num(h.edges[i]), num(h.edges[i + 1]), m).unwrap();
    }
    csv
}

/// Closed-form probabilities that capping the investment at wealth never
/// binds or always binds, next to Monte Carlo estimates when the scenario has
/// a `[sim]` section.
pub fn cmd_probability(file: &ScenarioFile) -> Result<String, CliError> {
    let market = file.market()?;
    let investor = file.investor()?;
    let (alpha, x0) = (investor.alpha(), investor.x0());
    let rp = restriction_probabilities(&market, alpha, x0)?;
    let mc = match &file.sim {
        Some(_) => {
            let config = file.sim_config()?;
            Some((
                mc_prob_no_effect(&market, alpha, x0, config.samples, config.seed)?,
                mc_prob_fully_constrained(&market, alpha, x0, config.samples, config.seed)?,
            ))
        }
        None => None,
    };
    let mut out = String::from("result,formula,applies,monte_carlo,std_error\n");
    let rows = [
        (
            "no_effect",
            rp.p_no_effect,
            rp.no_effect_applies(),
            mc.map(|m| m.0),
        ),
        (
            "fully_constrained",
            rp.p_fully_constrained,
            rp.fully_constrained_applies(),
            mc.map(|m| m.1),
        ),
    ];
    for (name, formula, applies, estimate) in rows {
        writeln!(
            out,
            "{name},{},{applies},{},{}",
            num(formula),
            opt_num(estimate.map(|e| e.estimate)),
            opt_num(estimate.map(|e| e.std_error))
        )
        .unwrap();
    }
    Ok(out)
}

/// Option prices, replicating fractions and the stock held by each
/// replicating portfolio at `(t, X̃)`, followed by the strategy's amount.
/// `shadow` defaults to the resolved shadow value carried forward to `t`
/// at the risk-free rate.
pub fn cmd_price(file: &ScenarioFile, t: f64, shadow: Option<f64>) -> Result<String, CliError> {
    let (scenario, _) = resolved(file)?;
    let market = scenario.market();
    let alpha = scenario.investor().alpha();
    let x = match shadow {
        Some(x) => x,
        None => scenario.shadow_x0()? * (market.r() * t).exp(),
    };
    let mut out = String::from("item,strike,d,price,fraction,stock_amount\n");
    writeln!(
        out,
        "optimal,,,,,{}",
        num(optimal_amount(market, alpha, t)?)
    )
    .unwrap();
    if let Some(k) = scenario.bounds().k_lower() {
        let p = put_price(market, alpha, k, t, x)?;
        let f = put_replication_fraction(market, alpha, k, t, x)?;
        let d = d_lower(market, alpha, k, t, x)?;
        writeln!(
            out,
            "put,{},{},{},{},{}",
            num(k),
            num(d),
            num(p),
            num(f),
            num(p * f)
        )
        .unwrap();
    }
    if let Some(k) = scenario.bounds().k_upper() {
        let c = call_price(market, alpha, k, t, x)?;
        let f = call_replication_fraction(market, alpha, k, t, x)?;
        let d = d_upper(market, alpha, k, t, x)?;
        writeln!(
            out,
            "call,{},{},{},{},{}",
            num(k),
            num(d),
            num(c),
            num(f),
            num(c * f)
        )
        .unwrap();
    }
    let spec = StrategySpec::for_bounds(scenario.bounds());
    let amount = strategy_amount(&spec, &scenario, t, x, f64::INFINITY)?;
    writeln!(out, "strategy,,,,,{}", num(amount)).unwrap();
    Ok(out)
}
