//! Per-iteration trace records and their CSV / JSON-lines renderings.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// The column chosen at one iteration: an index into the game matrix, or
/// the registry slot of an implicit column (rendered `@slot`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColumnTag {
    Index(usize),
    Implicit(usize),
}

impl fmt::Display for ColumnTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnTag::Index(j) => write!(f, "{j}"),
            ColumnTag::Implicit(k) => write!(f, "@{k}"),
        }
    }
}

impl FromStr for ColumnTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Trace(format!("bad column tag {s:?}"));
        match s.strip_prefix('@') {
            Some(k) => k.parse().map(ColumnTag::Implicit).map_err(|_| bad()),
            None => s.parse().map(ColumnTag::Index).map_err(|_| bad()),
        }
    }
}

impl Serialize for ColumnTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            ColumnTag::Index(j) => serializer.serialize_u64(*j as u64),
            ColumnTag::Implicit(_) => serializer.collect_str(self),
        }
    }
}

impl<'de> Deserialize<'de> for ColumnTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct TagVisitor;
        impl Visitor<'_> for TagVisitor {
            type Value = ColumnTag;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a column index or an \"@slot\" tag")
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ColumnTag, E> {
                Ok(ColumnTag::Index(v as usize))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ColumnTag, E> {
                usize::try_from(v).map(ColumnTag::Index).map_err(E::custom)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<ColumnTag, E> {
                v.parse().map_err(E::custom)
            }
        }
        deserializer.deserialize_any(TagVisitor)
    }
}

/// One boosting iteration. `r`, `gamma`, `alpha` and `j` describe step `t`;
/// `s`, `g`, `mu` and `log_f` are evaluated at `λ_{t+1}`, after the step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: usize,
    pub j: ColumnTag,
    pub r: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub s: f64,
    pub g: f64,
    pub mu: f64,
    #[serde(rename = "logF")]
    pub log_f: f64,
}

/// Trace rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceFormat {
    Csv,
    JsonLines,
}

impl FromStr for TraceFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(TraceFormat::Csv),
            "jsonl" | "json" => Ok(TraceFormat::JsonLines),
            other => Err(Error::Config(format!("unknown trace format {other:?}"))),
        }
    }
}

fn io_err(e: impl fmt::Display) -> Error {
    Error::Trace(e.to_string())
}

/// Writes records with a header row (CSV) or one object per line (JSONL).
pub fn write_trace<W: Write>(out: W, records: &[IterationRecord], format: TraceFormat) -> Result<()> {
    match format {
        TraceFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for rec in records {
                w.serialize(rec).map_err(io_err)?;
            }
            w.flush().map_err(io_err)
        }
        TraceFormat::JsonLines => {
            let mut out = out;
            for rec in records {
                serde_json::to_writer(&mut out, rec).map_err(io_err)?;
                out.write_all(b"\n").map_err(io_err)?;
            }
            out.flush().map_err(io_err)
        }
    }
}

pub fn read_trace<R: BufRead>(input: R, format: TraceFormat) -> Result<Vec<IterationRecord>> {
    match format {
        TraceFormat::Csv => csv::Reader::from_reader(input)
            .deserialize()
            .map(|r| r.map_err(io_err))
            .collect(),
        TraceFormat::JsonLines => input
            .lines()
            .filter(|l| l.as_ref().map_or(true, |l| !l.trim().is_empty()))
            .map(|l| {
                let l = l.map_err(io_err)?;
                serde_json::from_str(&l).map_err(io_err)
            })
            .collect(),
    }
}

/// Checks the record invariants: consecutive `t`, `gamma = tanh⁻¹ r`,
/// `alpha ≥ 0` and strictly increasing `s` whenever `alpha > 0`.
pub fn validate_trace(records: &[IterationRecord]) -> Result<()> {
    let mut prev_s = 0.0;
    for (k, rec) in records.iter().enumerate() {
        if k > 0 && rec.t != records[k - 1].t + 1 {
            return Err(Error::Trace(format!("record {k}: t = {} is not consecutive", rec.t)));
        }
        if (rec.gamma - rec.r.atanh()).abs() > 1e-12 * rec.gamma.abs().max(1.0) {
            return Err(Error::Trace(format!("record t = {}: gamma != atanh(r)", rec.t)));
        }
        if !(rec.alpha >= 0.0) {
            return Err(Error::Trace(format!("record t = {}: negative step {}", rec.t, rec.alpha)));
        }
        if rec.alpha > 0.0 && !(rec.s > prev_s) {
            return Err(Error::Trace(format!("record t = {}: s did not increase", rec.t)));
        }
        prev_s = rec.s;
    }
    Ok(())
}
