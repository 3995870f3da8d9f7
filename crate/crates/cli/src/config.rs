//! Suite configuration files.

use std::fmt;

use clap::ValueEnum;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use weilhecke::heckeops::Convention;
use weilhecke::scalars::{is_prime, parse_fraction};
use weilhecke::{EvenLattice, FqModule, Fraction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// Closed form of the Weil action against its triple sum.
    Thm52,
    /// Closed-form coefficients b_s against their direct sums.
    Thm54,
    Ramanujan,
    Relation,
    Multiplicativity,
    PuIdentity,
    /// Finding a counterexample is the expected outcome.
    Falsifier,
    /// Vector-valued operator against the scalar Hecke operator on a unimodular lattice.
    Classical,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = self.to_possible_value().expect("no skipped variants");
        f.write_str(v.get_name())
    }
}

/// An integer or the word "all".
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Range {
    One(u32),
    Word(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PuMode {
    /// 𝒫∘𝒰 on the theta series.
    Pu,
    /// 𝒰∘𝒫 on an input of the form 𝒰F.
    UpSupported,
    /// 𝒰∘𝒫 on the theta series of the scaled lattice; a difference is expected.
    UpUnsupported,
}

/// The expansion the operator checks run on.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InputKind {
    #[default]
    Theta,
    /// Integer coefficients drawn from a seeded generator on every admissible exponent.
    Random,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseConfig {
    pub suite: Suite,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Range>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convention: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<PuMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shift: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<InputKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    #[serde(default = "default_id")]
    pub id: String,
    pub cases: Vec<CaseConfig>,
}

fn default_id() -> String {
    "custom".into()
}

pub const DEFAULT_GRID: &str = include_str!("../configs/default_grid.json");

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed config at line {line} column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("case {index} ({suite}): {message}")]
    Case { index: usize, suite: Suite, message: String },
}

impl SuiteConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let cfg: SuiteConfig = serde_json::from_str(text).map_err(|e| ConfigError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        for (i, c) in cfg.cases.iter().enumerate() {
            c.validate().map_err(|message| ConfigError::Case {
                index: i,
                suite: c.suite,
                message,
            })?;
        }
        Ok(cfg)
    }

    pub fn load(path: Option<&std::path::Path>) -> Result<Self, ConfigError> {
        match path {
            None => Self::parse(DEFAULT_GRID),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| ConfigError::Io {
                    path: p.display().to_string(),
                    message: e.to_string(),
                })?;
                Self::parse(&text)
            }
        }
    }
}

impl CaseConfig {
    pub fn lattice(&self) -> Result<EvenLattice, String> {
        match (&self.lattice, &self.gram) {
            (Some(name), None) => EvenLattice::by_name(name).ok_or_else(|| format!("unknown lattice {name:?}")),
            (None, Some(g)) => EvenLattice::new(g.clone(), None).map_err(|e| e.to_string()),
            (Some(_), Some(_)) => Err("give either lattice or gram, not both".into()),
            (None, None) => Err("missing lattice".into()),
        }
    }

    pub fn precision(&self) -> Result<Fraction, String> {
        let s = self.precision.as_deref().ok_or("missing precision")?;
        let q = parse_fraction(s).map_err(|e| e.to_string())?;
        if q <= Fraction::from_integer(0.into()) {
            return Err("precision must be positive".into());
        }
        Ok(q)
    }

    pub fn convention(&self) -> Result<Convention, String> {
        match &self.convention {
            None => Ok(Convention::SELECTED),
            Some(s) => Convention::parse(s).map_err(|e| e.to_string()),
        }
    }

    pub fn need<T: Copy>(&self, v: Option<T>, what: &str) -> Result<T, String> {
        v.ok_or_else(|| format!("missing {what}"))
    }

    /// The s values requested, checked against 1 ≤ s ≤ max.
    pub fn s_values(&self, max: u32) -> Result<Vec<u32>, String> {
        match &self.s {
            None => Err("missing s".into()),
            Some(Range::Word(w)) if w == "all" => Ok((1..=max).collect()),
            Some(Range::Word(w)) => Err(format!("s must be an integer or \"all\", got {w:?}")),
            Some(Range::One(s)) if (1..=max).contains(s) => Ok(vec![*s]),
            Some(Range::One(s)) => Err(format!("s = {s} outside [1, {max}]")),
        }
    }

    fn odd_prime(&self) -> Result<u64, String> {
        let p = self.need(self.p, "p")?;
        if p == 2 || !is_prime(p) {
            return Err(format!("p = {p} must be an odd prime"));
        }
        Ok(p)
    }

    fn prime(&self) -> Result<u64, String> {
        let p = self.need(self.p, "p")?;
        if !is_prime(p) {
            return Err(format!("p = {p} is not prime"));
        }
        Ok(p)
    }

    fn positive_l(&self, min: u32) -> Result<u32, String> {
        let l = self.need(self.l, "l")?;
        if l < min {
            return Err(format!("l must be at least {min}"));
        }
        Ok(l)
    }

    /// Checks the preconditions of the operations the case invokes.
    pub fn validate(&self) -> Result<(), String> {
        let lat = self.lattice()?;
        self.convention()?;
        match self.suite {
            Suite::Thm52 => {
                self.odd_prime()?;
                let l = self.positive_l(1)?;
                self.s_values(2 * l - 1)?;
            }
            Suite::Thm54 => {
                self.odd_prime()?;
                let l = self.positive_l(1)?;
                self.s_values(2 * l - 1)?;
                self.precision()?;
                if !lat.is_positive_definite() {
                    return Err("theta input needs a positive definite lattice".into());
                }
            }
            Suite::Ramanujan => {
                self.odd_prime()?;
                let l = self.positive_l(1)?;
                self.s_values(2 * l - 1)?;
            }
            Suite::Falsifier => {
                self.odd_prime()?;
                let s = self.s_values(u32::MAX)?;
                if s.len() != 1 {
                    return Err("the falsifier takes a single s".into());
                }
                let lambda = self.lambda.as_ref().ok_or("missing lambda")?;
                let shift = self.shift.as_ref().ok_or("missing shift")?;
                if lambda.len() != lat.rank() || shift.len() != lat.rank() {
                    return Err("lambda and shift must match the lattice rank".into());
                }
                for x in lambda {
                    parse_fraction(x).map_err(|e| e.to_string())?;
                }
            }
            Suite::Relation => {
                self.prime()?;
                self.positive_l(2)?;
                self.precision()?;
            }
            Suite::Multiplicativity => {
                let m = self.need(self.m, "m")?;
                let n = self.need(self.n, "n")?;
                if m == 0 || n == 0 || m.gcd(&n) != 1 {
                    return Err(format!("m = {m} and n = {n} must be positive and coprime"));
                }
                self.precision()?;
            }
            Suite::PuIdentity => {
                let n = self.need(self.n, "n")?;
                if n == 0 {
                    return Err("n must be positive".into());
                }
                self.need(self.mode, "mode")?;
                self.precision()?;
            }
            Suite::Classical => {
                let n = self.need(self.n, "n")?;
                if n == 0 {
                    return Err("n must be positive".into());
                }
                self.precision()?;
                let trivial = FqModule::build(&lat, 1).map(|m| m.order() == 1).unwrap_or(false);
                if !trivial {
                    return Err("the scalar comparison needs a unimodular lattice".into());
                }
            }
        }
        if self.input == Some(InputKind::Random) {
            if !matches!(self.suite, Suite::Relation | Suite::Multiplicativity) {
                return Err("random input is only offered for relation and multiplicativity".into());
            }
            self.need(self.seed, "seed")?;
        }
        if !matches!(self.suite, Suite::Thm52 | Suite::Ramanujan | Suite::Falsifier) && !lat.is_positive_definite() {
            return Err("theta input needs a positive definite lattice".into());
        }
        Ok(())
    }
}
