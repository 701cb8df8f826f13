//! Run configuration assembled from an optional key=value file and flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::Serialize;

use super::HarnessError;
use crate::algebra::{parse_rational, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Commute,
    Mirror,
    Critical,
    Eigen,
    ClassicalLimit,
    Virasoro,
    All,
}

impl Task {
    pub const SUITE: [Task; 6] = [
        Task::Commute,
        Task::Mirror,
        Task::Critical,
        Task::Eigen,
        Task::ClassicalLimit,
        Task::Virasoro,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Task::Commute => "commute",
            Task::Mirror => "mirror",
            Task::Critical => "critical",
            Task::Eigen => "eigen",
            Task::ClassicalLimit => "classical-limit",
            Task::Virasoro => "virasoro",
            Task::All => "all",
        }
    }
}

impl fmt::Display for Task {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Task {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Task::SUITE
            .iter()
            .chain(std::iter::once(&Task::All))
            .find(|t| t.name() == s)
            .copied()
            .ok_or_else(|| HarnessError::InvalidInput(format!("unknown task {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

impl FromStr for Format {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(HarnessError::InvalidInput(format!("format must be json or text, got {s:?}"))),
        }
    }
}

/// Unset options fall back to per-task defaults.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub task: Task,
    pub n: Option<usize>,
    pub lambda: Option<Vec<Rational>>,
    pub q: Option<Vec<Rational>>,
    pub hbar: Option<Rational>,
    pub order: Option<usize>,
    pub window: Option<usize>,
    pub tol: Option<f64>,
    pub chart: Option<Vec<usize>>,
    pub output: Option<PathBuf>,
    pub format: Format,
    pub seed: u64,
    pub timing: bool,
    /// The invocation, echoed into the report.
    pub command: Vec<String>,
}

impl RunConfig {
    pub fn new(task: Task) -> Self {
        RunConfig {
            task,
            n: None,
            lambda: None,
            q: None,
            hbar: None,
            order: None,
            window: None,
            tol: None,
            chart: None,
            output: None,
            format: Format::Json,
            seed: 0,
            timing: true,
            command: Vec::new(),
        }
    }

    /// Builds a config from string values keyed by flag name; later
    /// sources in `layers` override earlier ones.
    pub fn from_layers(task: Task, layers: &[BTreeMap<String, String>]) -> Result<Self, HarnessError> {
        let mut merged = BTreeMap::new();
        for layer in layers {
            for (k, v) in layer {
                merged.insert(k.clone(), v.clone());
            }
        }
        let mut c = RunConfig::new(task);
        for (key, value) in &merged {
            let v = value.trim();
            match key.as_str() {
                "n" => c.n = Some(parse_usize(key, v)?),
                "lambda" => c.lambda = Some(parse_rational_list(key, v)?),
                "q" => c.q = Some(parse_rational_list(key, v)?),
                "hbar" => c.hbar = Some(parse_one(key, v)?),
                "order" => c.order = Some(parse_usize(key, v)?),
                "window" => c.window = Some(parse_usize(key, v)?),
                "tol" => c.tol = Some(parse_f64(key, v)?),
                "chart" => {
                    c.chart = Some(
                        v.split(',')
                            .map(|s| parse_usize(key, s.trim()))
                            .collect::<Result<_, _>>()?,
                    )
                }
                "output" => c.output = Some(PathBuf::from(v)),
                "format" => c.format = v.parse()?,
                "seed" => c.seed = v.parse().map_err(|_| bad(key, v))?,
                "no-timing" => c.timing = !parse_bool(key, v)?,
                _ => return Err(HarnessError::InvalidInput(format!("unknown option {key:?}"))),
            }
        }
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.n == Some(0) {
            return Err(HarnessError::InvalidInput("n must be at least 1".into()));
        }
        if let Some(l) = &self.lambda {
            let s = l.iter().fold(Rational::zero(), |a, b| a + b);
            if !s.is_zero() {
                return Err(HarnessError::InvalidInput(format!("Σλ = {s}, expected 0")));
            }
        }
        if let Some(q) = &self.q {
            if q.iter().any(|x| !x.is_positive()) {
                return Err(HarnessError::InvalidInput("q must be positive".into()));
            }
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return Err(HarnessError::InvalidInput("tol must be positive".into()));
            }
        }
        Ok(())
    }
}

fn bad(key: &str, v: &str) -> HarnessError {
    HarnessError::InvalidInput(format!("cannot parse {key} = {v:?}"))
}

fn parse_usize(key: &str, v: &str) -> Result<usize, HarnessError> {
    v.parse().map_err(|_| bad(key, v))
}

fn parse_f64(key: &str, v: &str) -> Result<f64, HarnessError> {
    v.parse().map_err(|_| bad(key, v))
}

fn parse_bool(key: &str, v: &str) -> Result<bool, HarnessError> {
    match v {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(bad(key, v)),
    }
}

fn parse_one(key: &str, v: &str) -> Result<Rational, HarnessError> {
    parse_rational(v).map_err(|_| bad(key, v))
}

fn parse_rational_list(key: &str, v: &str) -> Result<Vec<Rational>, HarnessError> {
    v.split(',').map(|s| parse_one(key, s.trim())).collect()
}

/// key = value lines; blank lines and `#` comments are skipped.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, HarnessError> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::InvalidInput(format!("config line {}: expected key = value", i + 1)))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    fn layer(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect()
    }

    #[test]
    fn flags_override_file() {
        let file = parse_config_file("n = 2\n# comment\nlambda = 1/4, 1/8, -3/8\nseed=5\n").unwrap();
        let flags = layer(&[("n", "1"), ("lambda", "1/2,-1/2")]);
        let c = RunConfig::from_layers(Task::Critical, &[file, flags]).unwrap();
        assert_eq!(c.n, Some(1));
        assert_eq!(c.lambda, Some(vec![rat(1, 2), rat(-1, 2)]));
        assert_eq!(c.seed, 5);
    }

    #[test]
    fn lambda_must_sum_to_zero() {
        let e = RunConfig::from_layers(Task::Critical, &[layer(&[("lambda", "1/3,1/3,1/3")])]);
        assert!(matches!(e, Err(HarnessError::InvalidInput(_))));
    }

    #[test]
    fn unknown_keys_and_tasks() {
        assert!(RunConfig::from_layers(Task::All, &[layer(&[("colour", "red")])]).is_err());
        assert!("bogus".parse::<Task>().is_err());
        assert_eq!("classical-limit".parse::<Task>().unwrap(), Task::ClassicalLimit);
        assert!(parse_config_file("no equals sign").is_err());
    }
}
