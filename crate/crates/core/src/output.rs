//! File formats: comma-separated step logs, JSON cell summaries and stable
//! configuration fingerprints.

use std::io::Write;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::engine::{Aggregate, ExperimentConfig, RunSummary, StepRecord};
use crate::error::{Error, Result};

/// Version of the summary and manifest layouts.
pub const SCHEMA_VERSION: u32 = 1;

/// Column names of every step log, in order.
pub const STEP_LOG_HEADER: [&str; 27] = [
    "run",
    "step",
    "episode",
    "row_state",
    "col_state",
    "row_action",
    "col_action",
    "row_reward",
    "col_reward",
    "row_reference",
    "col_reference",
    "row_epsilon",
    "col_epsilon",
    "row_explored",
    "col_explored",
    "row_eu_0",
    "row_eu_1",
    "row_cpt_0",
    "row_cpt_1",
    "col_eu_0",
    "col_eu_1",
    "col_cpt_0",
    "col_cpt_1",
    "row_changed",
    "col_changed",
    "row_l2",
    "col_l2",
];

fn opt_f64(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

fn values(v: &Option<Vec<f64>>, a: usize) -> String {
    opt_f64(v.as_ref().and_then(|v| v.get(a).copied()))
}

fn row_fields(r: &StepRecord) -> [String; 27] {
    let [row, col] = &r.agents;
    [
        r.run.to_string(),
        r.step.to_string(),
        r.episode.to_string(),
        row.state_id.to_string(),
        col.state_id.to_string(),
        r.joint.0.to_string(),
        r.joint.1.to_string(),
        r.rewards.0.to_string(),
        r.rewards.1.to_string(),
        opt_f64(row.reference),
        opt_f64(col.reference),
        row.epsilon.to_string(),
        col.epsilon.to_string(),
        flag(row.explored),
        flag(col.explored),
        values(&row.eu_values, 0),
        values(&row.eu_values, 1),
        values(&row.cpt_values, 0),
        values(&row.cpt_values, 1),
        values(&col.eu_values, 0),
        values(&col.eu_values, 1),
        values(&col.cpt_values, 0),
        values(&col.cpt_values, 1),
        row.changed.map(flag).unwrap_or_default(),
        col.changed.map(flag).unwrap_or_default(),
        opt_f64(row.l2),
        opt_f64(col.l2),
    ]
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::io("step log", source),
        other => Error::Config(format!("step log: {other:?}")),
    }
}

/// Streams step records as comma-separated rows.
pub struct StepLogWriter<W: Write> {
    inner: csv::Writer<W>,
}

impl<W: Write> StepLogWriter<W> {
    /// Writes the header immediately.
    pub fn new(writer: W) -> Result<Self> {
        let mut inner = csv::Writer::from_writer(writer);
        inner.write_record(STEP_LOG_HEADER).map_err(csv_error)?;
        Ok(Self { inner })
    }

    pub fn write<'a>(&mut self, records: impl IntoIterator<Item = &'a StepRecord>) -> Result<()> {
        for r in records {
            self.inner.write_record(row_fields(r)).map_err(csv_error)?;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<W> {
        self.inner
            .into_inner()
            .map_err(|e| Error::io("step log", std::io::Error::other(e.to_string())))
    }
}

/// Full step log as bytes.
pub fn step_log_bytes<'a>(records: impl IntoIterator<Item = &'a StepRecord>) -> Result<Vec<u8>> {
    let mut w = StepLogWriter::new(Vec::new())?;
    w.write(records)?;
    w.finish()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// JSON with object keys sorted at every level.
pub fn canonical_json<T: Serialize>(value: &T) -> Result<String> {
    // serde_json::Value keeps objects in a BTreeMap, so a round trip sorts
    Ok(serde_json::to_string(&serde_json::to_value(value)?)?)
}

/// Stable hash of the canonical form of a configuration.
pub fn config_fingerprint(config: &ExperimentConfig) -> Result<String> {
    Ok(sha256_hex(canonical_json(config)?.as_bytes()))
}

/// Contents of one cell's summary file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub schema_version: u32,
    pub cell: String,
    pub fingerprint: String,
    pub config: ExperimentConfig,
    /// Records kept in the step log: every step or the final window of
    /// each run.
    pub log_scope: LogScope,
    pub runs: Vec<RunSummary>,
    pub aggregate: Aggregate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LogScope {
    /// Only the trailing window of each run.
    #[default]
    Window,
    Full,
}

impl std::str::FromStr for LogScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "window" => Ok(LogScope::Window),
            "full" => Ok(LogScope::Full),
            _ => Err(Error::UnknownName {
                kind: "log scope",
                name: s.to_string(),
            }),
        }
    }
}
