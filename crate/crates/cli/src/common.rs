use std::path::Path;

use macc_core::caching::PlacementError;
use macc_core::combinatorics::Rational;
use macc_core::converse::{decimal_string, ConverseError};
use macc_core::delivery::DeliveryError;
use macc_core::topology::{CombProfile, TopologyError};

/// Command failures mapped onto the exit-code contract:
/// validation problems exit 2, violated invariants exit 3.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Invariant(String),
}

impl Failure {
    pub fn validation(msg: impl Into<String>) -> Self {
        Failure::Validation(msg.into())
    }

    pub fn invariant(msg: impl Into<String>) -> Self {
        Failure::Invariant(msg.into())
    }
}

impl From<TopologyError> for Failure {
    fn from(e: TopologyError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<PlacementError> for Failure {
    fn from(e: PlacementError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<DeliveryError> for Failure {
    fn from(e: DeliveryError) -> Self {
        match e {
            DeliveryError::DecodeFailure { .. } => Failure::Invariant(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<ConverseError> for Failure {
    fn from(e: ConverseError) -> Self {
        Failure::Validation(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

/// Parses a comma-separated per-level profile like `0,0,1,0,0`.
pub fn parse_profile(s: &str, lambda_caches: u32) -> Result<CombProfile, Failure> {
    let per_level: Vec<u64> = s
        .split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| Failure::validation(format!("bad profile entry {part:?}")))
        })
        .collect::<Result<_, _>>()?;
    Ok(CombProfile::new(lambda_caches, per_level)?)
}

/// Exact rational with a decimal rendering, for reports.
pub fn rational_json(r: &Rational) -> serde_json::Value {
    serde_json::json!({
        "num": r.numer().to_string(),
        "den": r.denom().to_string(),
        "decimal": decimal_string(r),
    })
}

/// Writes to the path, or to stdout when no path is given.
pub fn write_text(path: Option<&Path>, content: &str) -> Result<(), Failure> {
    match path {
        Some(p) => {
            std::fs::write(p, content)?;
            Ok(())
        }
        None => {
            print!("{content}");
            if !content.ends_with('\n') {
                println!();
            }
            Ok(())
        }
    }
}
