//! JSONL row schemas shared by the simulator, the judge client, and the
//! command-line pipeline: labels and per-method predictions, one JSON
//! object per line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preference::MethodId;

/// A labeled comparison. `label` is 1 when the first response is preferred
/// and 0 when the second is; absent labels are resolved from the mean of
/// the per-annotator judgments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelRow {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub human_judgments: Option<Vec<f64>>,
}

impl LabelRow {
    pub fn resolved_label(&self) -> Option<f64> {
        self.label.or_else(|| {
            self.human_judgments.as_ref().and_then(|votes| {
                if votes.is_empty() {
                    None
                } else {
                    Some(votes.iter().sum::<f64>() / votes.len() as f64)
                }
            })
        })
    }
}

/// One method's preference value for one comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRow {
    pub id: String,
    pub method: MethodId,
    pub value: f64,
}

pub fn read_jsonl<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    let file = File::open(path.as_ref())?;
    let reader = BufReader::new(file);
    let mut rows = Vec::new();
    for (index, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = serde_json::from_str(&line).map_err(|err| Error::Jsonl {
            line: index + 1,
            message: err.to_string(),
        })?;
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_jsonl<T: Serialize>(path: impl AsRef<Path>, rows: &[T]) -> Result<()> {
    let file = File::create(path.as_ref())?;
    let mut writer = BufWriter::new(file);
    for row in rows {
        let line = serde_json::to_string(row).map_err(|err| Error::Jsonl {
            line: 0,
            message: err.to_string(),
        })?;
        writer.write_all(line.as_bytes())?;
        writer.write_all(b"\n")?;
    }
    writer.flush()?;
    Ok(())
}
