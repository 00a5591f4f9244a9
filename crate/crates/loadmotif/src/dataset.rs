//! Aligned-dataset cache: JSON lines, a header object followed by one
//! `DaySeries` per line in (household, date) order.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use loadmotif_core::{Dataset, DaySeries};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::{Error, Result, TOOL};

pub const DATASET_FORMAT: &str = "loadmotif-dataset";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub format: String,
    pub version: u32,
    pub tool: String,
    /// Effective configuration of the producing command.
    pub config: Value,
}

pub fn write_dataset(data: &Dataset, config: Value, out: &mut impl Write) -> std::io::Result<()> {
    let header = Header {
        format: DATASET_FORMAT.into(),
        version: 1,
        tool: TOOL.into(),
        config,
    };
    serde_json::to_writer(&mut *out, &header)?;
    out.write_all(b"\n")?;
    for day in data.days() {
        serde_json::to_writer(&mut *out, day)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn save_dataset(data: &Dataset, config: Value, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_dataset(data, config, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_dataset(input: impl BufRead, path: &Path) -> Result<(Header, Dataset)> {
    let mut lines = input.lines().enumerate();
    let header: Header = match lines.next() {
        Some((_, line)) => {
            let line = line.map_err(|e| Error::io(path, e))?;
            serde_json::from_str(&line).map_err(|e| Error::format(path, 1, format!("bad header: {e}")))?
        }
        None => return Err(Error::format(path, 1, "empty dataset file")),
    };
    if header.format != DATASET_FORMAT {
        return Err(Error::format(path, 1, format!("not a dataset cache (format '{}')", header.format)));
    }
    let mut data = Dataset::new();
    for (i, line) in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let day: DaySeries = serde_json::from_str(&line).map_err(|e| Error::format(path, i + 1, e.to_string()))?;
        day.validate().map_err(|e| Error::format(path, i + 1, e.to_string()))?;
        data.insert(day).map_err(|e| Error::format(path, i + 1, e.to_string()))?;
    }
    Ok((header, data))
}

pub fn load_dataset(path: &Path) -> Result<(Header, Dataset)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset(BufReader::new(file), path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    #[test]
    fn round_trip() {
        let days = (1..=3).map(|d| {
            DaySeries::new(
                "h1",
                NaiveDate::from_ymd_opt(2011, 3, d).unwrap(),
                (0..288).map(|k| k as f64 * 0.1 + d as f64).collect(),
            )
            .unwrap()
        });
        let data = Dataset::from_days(days).unwrap();
        let mut buf = Vec::new();
        write_dataset(&data, serde_json::json!({"k": 1}), &mut buf).unwrap();
        let (header, back) = read_dataset(buf.as_slice(), Path::new("x")).unwrap();
        assert_eq!(header.tool, TOOL);
        assert_eq!(back, data);
    }

    #[test]
    fn rejects_short_series() {
        let text = format!(
            "{}\n{}\n",
            r#"{"format":"loadmotif-dataset","version":1,"tool":"t","config":null}"#,
            r#"{"household":"h1","date":"2011-03-01","readings":[1,2,3]}"#
        );
        let err = read_dataset(text.as_bytes(), Path::new("c.jsonl")).unwrap_err();
        assert!(err.to_string().starts_with("c.jsonl:2:"), "{err}");
    }
}
