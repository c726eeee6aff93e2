//! Experiment configuration and its flat `key = value` file form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::lemma_suite::LemmaScope;
use super::HarnessError;
use crate::congest::CongestionPolicy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Naive,
    Single,
    Many,
    Gossip,
    EstimateMix,
    LemmaSuite,
}

impl FromStr for Algorithm {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "naive" => Self::Naive,
            "single" => Self::Single,
            "many" => Self::Many,
            "gossip" => Self::Gossip,
            "estimate-mix" => Self::EstimateMix,
            "lemma-suite" => Self::LemmaSuite,
            other => return Err(HarnessError::Config(format!("unknown algorithm {other:?}"))),
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Naive => "naive",
            Self::Single => "single",
            Self::Many => "many",
            Self::Gossip => "gossip",
            Self::EstimateMix => "estimate-mix",
            Self::LemmaSuite => "lemma-suite",
        })
    }
}

/// Where the walk length comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TauSource {
    /// Dense-oracle dynamic mixing bound over the horizon.
    Oracle,
    /// `⌈n² ln n⌉`.
    Worstcase,
    Value(u64),
}

impl FromStr for TauSource {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "oracle" => Ok(Self::Oracle),
            "worstcase" => Ok(Self::Worstcase),
            v => v.parse().map(Self::Value).map_err(|_| {
                HarnessError::Config(format!(
                    "tau must be oracle, worstcase or an integer, got {v:?}"
                ))
            }),
        }
    }
}

impl fmt::Display for TauSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Oracle => f.write_str("oracle"),
            Self::Worstcase => f.write_str("worstcase"),
            Self::Value(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub schedule: String,
    pub algo: Algorithm,
    pub tau: TauSource,
    pub lambda_c: f64,
    /// Explicit short-walk length, overriding `lambda_c`.
    pub lambda: Option<u64>,
    /// Walk counts or token counts; one sweep per entry.
    pub ks: Vec<usize>,
    pub seeds: u64,
    pub seed_base: u64,
    pub bandwidth: Option<u64>,
    pub policy: CongestionPolicy,
    /// Dynamic diameter; computed from the schedule when absent.
    pub phi: Option<u64>,
    /// Rounds over which oracle quantities are taken.
    pub horizon: u64,
    pub source: usize,
    /// Monte-Carlo trials per lemma-suite census.
    pub trials: u64,
    pub suite: LemmaScope,
    pub out: Option<String>,
    pub oracle: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schedule: "static:K4".into(),
            algo: Algorithm::Single,
            tau: TauSource::Oracle,
            lambda_c: 1.0,
            lambda: None,
            ks: vec![1],
            seeds: 1,
            seed_base: 0,
            bandwidth: None,
            policy: CongestionPolicy::Strict,
            phi: None,
            horizon: 256,
            source: 0,
            trials: 200,
            suite: LemmaScope::All,
            out: None,
            oracle: false,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T, HarnessError> {
    v.parse()
        .map_err(|_| HarnessError::Config(format!("{key}: cannot parse {v:?}")))
}

fn parse_opt<T: FromStr>(key: &str, v: &str) -> Result<Option<T>, HarnessError> {
    if v.is_empty() || v == "auto" {
        Ok(None)
    } else {
        parse_num(key, v).map(Some)
    }
}

fn show_opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "auto".to_string(), T::to_string)
}

impl ExperimentConfig {
    /// Applies one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), HarnessError> {
        let v = value.trim();
        match key.trim() {
            "schedule" => self.schedule = v.to_string(),
            "algo" => self.algo = v.parse()?,
            "tau" => self.tau = v.parse()?,
            "lambda_c" | "lambda-c" => self.lambda_c = parse_num(key, v)?,
            "lambda" => self.lambda = parse_opt(key, v)?,
            "k" => {
                self.ks = v
                    .split(',')
                    .map(|x| parse_num(key, x.trim()))
                    .collect::<Result<_, _>>()?;
                if self.ks.is_empty() || self.ks.contains(&0) {
                    return Err(HarnessError::Config("k must list positive integers".into()));
                }
            }
            "seeds" => self.seeds = parse_num(key, v)?,
            "seed_base" | "seed-base" => self.seed_base = parse_num(key, v)?,
            "bandwidth" => self.bandwidth = parse_opt(key, v)?,
            "policy" => self.policy = v.parse().map_err(HarnessError::Config)?,
            "phi" => self.phi = parse_opt(key, v)?,
            "horizon" => self.horizon = parse_num(key, v)?,
            "source" => self.source = parse_num(key, v)?,
            "trials" => self.trials = parse_num(key, v)?,
            "suite" => self.suite = v.parse()?,
            "out" => self.out = (!v.is_empty()).then(|| v.to_string()),
            "oracle" => self.oracle = parse_num(key, v)?,
            other => return Err(HarnessError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Parses the file form; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut c = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!("line {}: expected key = value", i + 1))
            })?;
            c.set(k, v)?;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn to_text(&self) -> String {
        let ks: Vec<String> = self.ks.iter().map(usize::to_string).collect();
        [
            format!("schedule = {}", self.schedule),
            format!("algo = {}", self.algo),
            format!("tau = {}", self.tau),
            format!("lambda_c = {:?}", self.lambda_c),
            format!("lambda = {}", show_opt(&self.lambda)),
            format!("k = {}", ks.join(",")),
            format!("seeds = {}", self.seeds),
            format!("seed_base = {}", self.seed_base),
            format!("bandwidth = {}", show_opt(&self.bandwidth)),
            format!("policy = {}", self.policy),
            format!("phi = {}", show_opt(&self.phi)),
            format!("horizon = {}", self.horizon),
            format!("source = {}", self.source),
            format!("trials = {}", self.trials),
            format!("suite = {}", self.suite),
            format!("out = {}", self.out.as_deref().unwrap_or("")),
            format!("oracle = {}", self.oracle),
        ]
        .join("\n")
            + "\n"
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.schedule.trim().is_empty() {
            return Err(HarnessError::Config("schedule is required".into()));
        }
        if !(self.lambda_c.is_finite() && self.lambda_c > 0.0) {
            return Err(HarnessError::Config("lambda_c must be positive".into()));
        }
        if self.seeds == 0 {
            return Err(HarnessError::Config("seeds must be positive".into()));
        }
        if self.horizon == 0 {
            return Err(HarnessError::Config("horizon must be positive".into()));
        }
        Ok(())
    }
}
