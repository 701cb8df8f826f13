//! Verification reports, residual summaries and their JSON/text encodings.

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::config::Format;
use super::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    /// value ≤ tolerance
    Upper,
    /// value ≥ tolerance
    Lower,
}

/// One named quantity compared against its tolerance. Exact checks use a
/// mismatch count with tolerance 0.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub bound: Bound,
    pub ok: bool,
}

impl Residual {
    pub fn upper(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Residual {
            name: name.into(),
            value,
            tolerance,
            bound: Bound::Upper,
            ok: value <= tolerance,
        }
    }

    pub fn lower(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Residual {
            name: name.into(),
            value,
            tolerance,
            bound: Bound::Lower,
            ok: value >= tolerance,
        }
    }

    pub fn exact(name: impl Into<String>, mismatches: usize) -> Self {
        Self::upper(name, mismatches as f64, 0.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResidualSummary {
    /// Over upper-bound checks only.
    pub max: f64,
    pub median: f64,
    pub count: usize,
    pub checks: Vec<Residual>,
}

impl ResidualSummary {
    pub fn new(checks: Vec<Residual>) -> Self {
        let mut v: Vec<f64> = checks
            .iter()
            .filter(|c| c.bound == Bound::Upper)
            .map(|c| c.value)
            .collect();
        v.sort_by(f64::total_cmp);
        let median = match v.len() {
            0 => 0.0,
            l if l % 2 == 1 => v[l / 2],
            l => 0.5 * (v[l / 2 - 1] + v[l / 2]),
        };
        ResidualSummary {
            max: v.last().copied().unwrap_or(0.0),
            median,
            count: checks.len(),
            checks,
        }
    }

    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub task: String,
    pub params: Map<String, Value>,
    pub results: Vec<Value>,
    pub residuals: ResidualSummary,
    pub pass: bool,
    pub runtime_ms: u64,
    pub version: String,
    pub command: Vec<String>,
    pub warnings: Vec<String>,
}

impl VerificationReport {
    pub fn emit(&self, format: Format) -> Result<String, HarnessError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).map_err(|e| HarnessError::Io(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Text => Ok(to_text(&serde_json::to_value(self).map_err(|e| HarnessError::Io(e.to_string()))?)),
        }
    }

    pub fn from_json(s: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(s).map_err(|e| HarnessError::InvalidInput(e.to_string()))
    }

    pub fn from_text(s: &str) -> Result<Self, HarnessError> {
        serde_json::from_value(from_text(s)?).map_err(|e| HarnessError::InvalidInput(e.to_string()))
    }
}

fn plain_key(k: &str) -> bool {
    !k.is_empty() && k.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn push_key(path: &str, k: &str) -> String {
    let seg = if plain_key(k) { k.to_string() } else { Value::String(k.to_string()).to_string() };
    if path.is_empty() {
        seg
    } else {
        format!("{path}.{seg}")
    }
}

fn flatten(path: &str, v: &Value, out: &mut String) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, x) in m {
                flatten(&push_key(path, k), x, out);
            }
        }
        Value::Array(a) if !a.is_empty() => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{path}[{i}]"), x, out);
            }
        }
        leaf => {
            out.push_str(path);
            out.push_str(" = ");
            out.push_str(&leaf.to_string());
            out.push('\n');
        }
    }
}

/// One `path = json` line per leaf, e.g. `residuals.checks[0].ok = true`.
pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    flatten("", v, &mut out);
    out
}

#[derive(Debug, PartialEq)]
enum Seg {
    Key(String),
    Index(usize),
}

/// Splits a line into its path segments and the remaining `= json` part.
fn parse_path(line: &str) -> Result<(Vec<Seg>, &str), HarnessError> {
    let bad = || HarnessError::InvalidInput(format!("malformed text line {line:?}"));
    let b = line.as_bytes();
    let mut segs = Vec::new();
    let mut i = 0;
    loop {
        match b.get(i) {
            Some(b'[') => {
                let close = line[i..].find(']').ok_or_else(bad)? + i;
                segs.push(Seg::Index(line[i + 1..close].parse().map_err(|_| bad())?));
                i = close + 1;
            }
            Some(b'"') => {
                let mut de = serde_json::Deserializer::from_str(&line[i..]).into_iter::<String>();
                let k = de.next().ok_or_else(bad)?.map_err(|_| bad())?;
                i += de.byte_offset();
                segs.push(Seg::Key(k));
            }
            Some(b'.') if !segs.is_empty() => i += 1,
            Some(b' ') => break,
            Some(_) => {
                let end = line[i..]
                    .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_' || c == '-'))
                    .map_or(line.len(), |e| e + i);
                if end == i {
                    return Err(bad());
                }
                segs.push(Seg::Key(line[i..end].to_string()));
                i = end;
            }
            None => return Err(bad()),
        }
    }
    let rest = line[i..].strip_prefix(" = ").ok_or_else(bad)?;
    Ok((segs, rest))
}

fn insert(slot: &mut Value, segs: &[Seg], leaf: Value) -> Result<(), HarnessError> {
    let Some((first, rest)) = segs.split_first() else {
        *slot = leaf;
        return Ok(());
    };
    match first {
        Seg::Key(k) => {
            if slot.is_null() {
                *slot = Value::Object(Map::new());
            }
            let m = slot
                .as_object_mut()
                .ok_or_else(|| HarnessError::InvalidInput(format!("key {k:?} under a non-object")))?;
            insert(m.entry(k.clone()).or_insert(Value::Null), rest, leaf)
        }
        Seg::Index(idx) => {
            if slot.is_null() {
                *slot = Value::Array(Vec::new());
            }
            let a = slot
                .as_array_mut()
                .ok_or_else(|| HarnessError::InvalidInput(format!("index {idx} under a non-array")))?;
            if *idx > a.len() {
                return Err(HarnessError::InvalidInput(format!("index {idx} out of order")));
            }
            if *idx == a.len() {
                a.push(Value::Null);
            }
            insert(&mut a[*idx], rest, leaf)
        }
    }
}

pub fn from_text(text: &str) -> Result<Value, HarnessError> {
    let mut root = Value::Null;
    for line in text.lines().filter(|l| !l.trim().is_empty()) {
        let (segs, rest) = parse_path(line)?;
        let leaf: Value =
            serde_json::from_str(rest).map_err(|e| HarnessError::InvalidInput(format!("{line:?}: {e}")))?;
        insert(&mut root, &segs, leaf)?;
    }
    Ok(root)
}
