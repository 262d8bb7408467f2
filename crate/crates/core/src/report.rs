//! JSON/CSV report envelopes shared by the CLI commands.

use serde::{Serialize, Serializer};
use serde_json::Value;

use crate::error::{HeisError, Result};
use crate::graph::Graph;

/// Serializes an energy, writing non-finite values as the strings `"inf"`,
/// `"-inf"` or `"nan"` (plain JSON has no encoding for them).
pub fn ser_energy<S: Serializer>(e: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if e.is_finite() {
        s.serialize_f64(*e)
    } else {
        s.serialize_str(&fmt_energy(*e))
    }
}

pub fn fmt_energy(e: f64) -> String {
    if e.is_nan() {
        "nan".into()
    } else if e == f64::INFINITY {
        "inf".into()
    } else if e == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{e}")
    }
}

/// JSON value for an energy, following [`ser_energy`].
pub fn energy_value(e: f64) -> Value {
    if e.is_finite() {
        Value::from(e)
    } else {
        Value::from(fmt_energy(e))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: Value,
    pub tolerances: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct GraphSummary {
    pub spec: String,
    pub vertex_count: usize,
    pub edge_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice_dimension: Option<usize>,
}

impl GraphSummary {
    pub fn of(spec: &str, g: &Graph) -> Self {
        GraphSummary {
            spec: spec.to_string(),
            vertex_count: g.vertex_count(),
            edge_count: g.edge_count(),
            lattice_dimension: g.lattice().map(|l| l.d),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub meta: Meta,
    pub graph: Option<GraphSummary>,
    pub results: Value,
}

impl Report {
    pub fn new(command: &str, config: Value, tolerances: Value, graph: Option<GraphSummary>, results: Value) -> Self {
        Report {
            meta: Meta {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                command: command.to_string(),
                config,
                tolerances,
            },
            graph,
            results,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| HeisError::Numerical(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

/// Renders a header row and records as CSV.
pub fn to_csv(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| HeisError::Io(std::io::Error::other(e));
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| HeisError::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
