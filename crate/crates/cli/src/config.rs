//! Run configuration: a TOML file with the flag names as keys, overridden by flags.

use std::fmt;
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Output {
    Json,
    Tsv,
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Output::Json => "json",
            Output::Tsv => "tsv",
        })
    }
}

/// Every key optional; used both for the config file and for parsed flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Partial {
    pub p: Option<u32>,
    pub n: Option<usize>,
    #[serde(rename = "N")]
    pub prec: Option<u32>,
    #[serde(rename = "D")]
    pub deg: Option<usize>,
    pub m: Option<usize>,
    pub f: Option<String>,
    pub seed: Option<u64>,
    pub output: Option<Output>,
    pub char_p: Option<bool>,
}

impl Partial {
    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    /// Values in `over` win.
    pub fn overlay(self, over: Partial) -> Partial {
        Partial {
            p: over.p.or(self.p),
            n: over.n.or(self.n),
            prec: over.prec.or(self.prec),
            deg: over.deg.or(self.deg),
            m: over.m.or(self.m),
            f: over.f.or(self.f),
            seed: over.seed.or(self.seed),
            output: over.output.or(self.output),
            char_p: over.char_p.or(self.char_p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunConfig {
    pub p: u32,
    pub n: usize,
    #[serde(rename = "N")]
    pub prec: u32,
    #[serde(rename = "D")]
    pub deg: usize,
    pub m: usize,
    pub f: String,
    pub seed: u64,
    pub output: Output,
    pub char_p: bool,
}

pub const MAX_P: u32 = 13;
pub const MAX_N: usize = 3;
pub const MAX_M: usize = 4;
pub const MAX_PREC: u32 = 64;
pub const MAX_DEG: usize = 16;

fn is_prime(p: u32) -> bool {
    p >= 2 && (2..p).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

impl RunConfig {
    pub fn resolve(p: Partial) -> Result<Self, CliError> {
        let cfg = RunConfig {
            p: p.p.unwrap_or(2),
            n: p.n.unwrap_or(1),
            prec: p.prec.unwrap_or(8),
            deg: p.deg.unwrap_or(6),
            m: p.m.unwrap_or(1),
            f: p.f.unwrap_or_else(|| "standard".into()),
            seed: p.seed.unwrap_or(0),
            output: p.output.unwrap_or(Output::Json),
            char_p: p.char_p.unwrap_or(false),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Usage(msg));
        if !is_prime(self.p) || self.p > MAX_P {
            return bad(format!("p = {} must be a prime at most {MAX_P}", self.p));
        }
        if !(1..=MAX_N).contains(&self.n) {
            return bad(format!("n = {} must lie in 1..={MAX_N}", self.n));
        }
        if !(1..=MAX_M).contains(&self.m) {
            return bad(format!("m = {} must lie in 1..={MAX_M}", self.m));
        }
        if !(1..=MAX_PREC).contains(&self.prec) {
            return bad(format!("N = {} must lie in 1..={MAX_PREC}", self.prec));
        }
        if !(1..=MAX_DEG).contains(&self.deg) {
            return bad(format!("D = {} must lie in 1..={MAX_DEG}", self.deg));
        }
        Ok(())
    }

    /// One-line summary for TSV headers.
    pub fn header(&self, command: &str) -> String {
        format!(
            "# lubin-tate {command} p={} n={} N={} D={} m={} f={} char_p={} seed={}",
            self.p, self.n, self.prec, self.deg, self.m, self.f, self.char_p, self.seed
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: Partial = toml::from_str("p = 3\nN = 10\nseed = 7\n").unwrap();
        let flags = Partial { p: Some(5), ..Partial::default() };
        let cfg = RunConfig::resolve(file.overlay(flags)).unwrap();
        assert_eq!((cfg.p, cfg.prec, cfg.seed), (5, 10, 7));
    }

    #[test]
    fn bounds() {
        for bad in ["p = 4", "p = 17", "n = 4", "m = 5", "N = 65", "D = 17", "m = 0"] {
            let p: Partial = toml::from_str(bad).unwrap();
            assert!(RunConfig::resolve(p).is_err(), "{bad}");
        }
    }

    #[test]
    fn unknown_key_rejected() {
        assert!(toml::from_str::<Partial>("q = 2").is_err());
    }
}
