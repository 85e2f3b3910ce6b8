//! Golden cases shared by the golden tests and the acceptance suite.

#![allow(dead_code)]

use std::path::PathBuf;

use boundwealth_cli::commands::{
    cmd_price, cmd_probability, cmd_quantiles, cmd_shadow, cmd_simulate, SimulateOptions,
};
use boundwealth_cli::{CliError, ScenarioFile};

/// `(scenario, output)` pairs; each has a checked-in `golden/<scenario>.<output>.csv`.
pub const CASES: &[(&str, &str)] = &[
    ("unconstrained", "shadow"),
    ("unconstrained", "quantiles"),
    ("unconstrained", "price"),
    ("floor_1000", "shadow"),
    ("floor_1000", "quantiles"),
    ("floor_1000", "price"),
    ("floor_100", "quantiles"),
    ("floor_800", "shadow"),
    ("floor_800", "quantiles"),
    ("floor_800", "simulate"),
    ("floor_800", "simulate-path"),
    ("floor_800", "simulate-histogram"),
    ("collar_1500", "shadow"),
    ("collar_1500", "quantiles"),
    ("collar_1500", "price"),
    ("collar_balanced", "shadow"),
    ("capped_unconstrained", "quantiles"),
    ("restriction", "probability"),
];

/// The CLI crate directory; also reached from sibling crates that include
/// this module.
pub fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .expect("crates directory")
        .join("cli")
}

pub fn scenario_path(name: &str) -> PathBuf {
    crate_dir().join("scenarios").join(format!("{name}.toml"))
}

pub fn golden_path(name: &str, output: &str) -> PathBuf {
    crate_dir()
        .join("tests")
        .join("golden")
        .join(format!("{name}.{output}.csv"))
}

pub fn render(name: &str, output: &str) -> Result<String, CliError> {
    let file = ScenarioFile::load(&scenario_path(name))?;
    match output {
        "shadow" => cmd_shadow(&file),
        "quantiles" => cmd_quantiles(&file),
        "price" => cmd_price(&file, 0.0, None),
        "probability" => cmd_probability(&file),
        "simulate" => Ok(cmd_simulate(&file, &SimulateOptions::default())?.terminal),
        "simulate-path" => {
            let opts = SimulateOptions {
                dump_path: Some(0),
                histogram_bins: None,
            };
            Ok(cmd_simulate(&file, &opts)?.path.expect("path requested"))
        }
        "simulate-histogram" => {
            let opts = SimulateOptions {
                dump_path: None,
                histogram_bins: Some(20),
            };
            Ok(cmd_simulate(&file, &opts)?
                .histogram
                .expect("histogram requested"))
        }
        other => panic!("unknown golden output {other}"),
    }
}

/// Names of the golden cases whose regenerated output differs from the
/// checked-in file, or whose file is missing.
pub fn mismatched_goldens() -> Vec<String> {
    CASES
        .iter()
        .filter_map(|&(name, output)| {
            let expected = std::fs::read(golden_path(name, output)).ok();
            let actual = render(name, output).ok().map(String::into_bytes);
            match (expected, actual) {
                (Some(e), Some(a)) if e == a => None,
                _ => Some(format!("{name}.{output}")),
            }
        })
        .collect()
}
