//! Command-line front end for the adiabatic search simulator: single runs,
//! parameter sweeps, equal-cost comparisons and oracle checks, with CSV and
//! JSON outputs.

pub mod commands;
pub mod config;
pub mod error;

pub use config::{RunConfig, SweepSpec, SweepVariable};
pub use error::{CliError, Result};

/// Environment variable overriding the full-space oracle dimension cap.
pub const ORACLE_CAP_ENV: &str = "ADIA_ORACLE_CAP";

/// Oracle cap from `ADIA_ORACLE_CAP`, falling back to the library default.
pub fn oracle_cap() -> Result<usize> {
    parse_oracle_cap(std::env::var(ORACLE_CAP_ENV).ok().as_deref())
}

fn parse_oracle_cap(value: Option<&str>) -> Result<usize> {
    match value {
        None => Ok(adiasearch::DEFAULT_ORACLE_CAP),
        Some(text) => match text.trim().parse::<usize>() {
            Ok(cap) if cap >= 2 => Ok(cap),
            _ => Err(CliError::config(format!(
                "{ORACLE_CAP_ENV} must be an integer >= 2, got {text:?}"
            ))),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cap_parsing() {
        assert_eq!(parse_oracle_cap(None).unwrap(), 512);
        assert_eq!(parse_oracle_cap(Some(" 1024 ")).unwrap(), 1024);
        assert_eq!(parse_oracle_cap(Some("lots")).unwrap_err().exit_code(), 2);
        assert!(parse_oracle_cap(Some("1")).is_err());
    }
}
