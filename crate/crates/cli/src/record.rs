use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use randmatch::{write_graph, Graph};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFingerprint {
    pub n: usize,
    pub m: usize,
    /// SHA-256 of the canonical edge-list text.
    pub sha256: String,
}

impl GraphFingerprint {
    pub fn of(g: &Graph) -> Self {
        let digest = Sha256::digest(write_graph(g).as_bytes());
        GraphFingerprint { n: g.n(), m: g.m(), sha256: format!("{digest:x}") }
    }
}

/// Self-describing output of one command. Everything except `wall_nanos`
/// is a function of the arguments and the graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub subcommand: String,
    /// Arguments as given, program name excluded.
    pub command: Vec<String>,
    pub version: String,
    pub graph: Option<GraphFingerprint>,
    pub params: Value,
    pub result: Value,
    pub wall_nanos: u64,
}

impl ExperimentRecord {
    /// The record minus its timing, for reproducibility comparisons.
    pub fn outcome(&self) -> (&Value, &Value, &Option<GraphFingerprint>) {
        (&self.params, &self.result, &self.graph)
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        _ => v.to_string(),
    }
}

/// Flat CSV: one line per row object, each prefixed with the subcommand and
/// graph hash. Nested values are written as JSON text.
pub fn to_csv(record: &ExperimentRecord, rows: &[Value]) -> csv::Result<String> {
    let subcommand = record.subcommand.clone();
    let hash = record.graph.as_ref().map(|g| g.sha256.clone()).unwrap_or_default();
    let empty = Map::new();
    let header: Vec<&String> = rows.first().and_then(Value::as_object).unwrap_or(&empty).keys().collect();

    let mut w = csv::Writer::from_writer(Vec::new());
    let mut head = vec!["command".to_string(), "graph_sha256".to_string()];
    head.extend(header.iter().map(|k| k.to_string()));
    w.write_record(&head)?;
    for row in rows {
        let obj = row.as_object().unwrap_or(&empty);
        let mut line = vec![subcommand.clone(), hash.clone()];
        line.extend(header.iter().map(|k| obj.get(*k).map(cell).unwrap_or_default()));
        w.write_record(&line)?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
