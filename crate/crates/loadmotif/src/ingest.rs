//! Delimited meter-reading input and the ingest pipeline (parse, align,
//! label, filter).

use std::collections::BTreeSet;
use std::io::{BufRead, Read};
use std::path::Path;

use chrono::{DateTime, NaiveDate, NaiveDateTime, Utc};
use loadmotif_core::align::{align_to_grid, filter_days, AlignConfig, RawReading};
use loadmotif_core::{Dataset, DayLabel};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CsvOptions {
    pub delimiter: u8,
    pub has_header: bool,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            delimiter: b',',
            has_header: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowError {
    /// 1-based line in the input.
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParsedReadings {
    /// Sorted by (household, timestamp).
    pub readings: Vec<RawReading>,
    pub errors: Vec<RowError>,
    pub rows: usize,
}

fn parse_timestamp(s: &str) -> Option<DateTime<Utc>> {
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Some(t.with_timezone(&Utc));
    }
    ["%Y-%m-%dT%H:%M:%S", "%Y-%m-%d %H:%M:%S"]
        .iter()
        .find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
        .map(|t| t.and_utc())
}

/// Reads `household_id,timestamp,watts` rows. Bad rows are collected in
/// [`ParsedReadings::errors`] with their line number; a repeated timestamp for
/// a household keeps the first row and reports the others.
pub fn parse_readings(input: impl Read, options: &CsvOptions) -> ParsedReadings {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(options.delimiter)
        .has_headers(options.has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input);

    let mut out = ParsedReadings::default();
    let mut lines = Vec::new();
    for record in reader.records() {
        out.rows += 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                let line = e.position().map_or(0, |p| p.line());
                out.errors.push(RowError {
                    line,
                    message: e.to_string(),
                });
                continue;
            }
        };
        let line = record.position().map_or(0, |p| p.line());
        let fail = |message: String| RowError { line, message };
        if record.len() != 3 {
            out.errors.push(fail(format!("expected 3 fields, found {}", record.len())));
            continue;
        }
        let Some(timestamp) = parse_timestamp(&record[1]) else {
            out.errors.push(fail(format!("unparseable timestamp '{}'", &record[1])));
            continue;
        };
        let power = match record[2].parse::<f64>() {
            Ok(p) if p.is_finite() && p >= 0.0 => p,
            Ok(p) => {
                out.errors.push(fail(format!("power {p} W is negative or not finite")));
                continue;
            }
            Err(_) => {
                out.errors.push(fail(format!("unparseable power '{}'", &record[2])));
                continue;
            }
        };
        if record[0].is_empty() {
            out.errors.push(fail("empty household id".into()));
            continue;
        }
        out.readings.push(RawReading::new(&record[0], timestamp, power));
        lines.push(line);
    }

    let mut order: Vec<usize> = (0..out.readings.len()).collect();
    order.sort_by(|&a, &b| {
        let (ra, rb) = (&out.readings[a], &out.readings[b]);
        (&ra.household, ra.timestamp, lines[a]).cmp(&(&rb.household, rb.timestamp, lines[b]))
    });
    let mut sorted: Vec<RawReading> = Vec::with_capacity(order.len());
    for i in order {
        let r = &out.readings[i];
        if let Some(prev) = sorted.last() {
            if prev.household == r.household && prev.timestamp == r.timestamp {
                out.errors.push(RowError {
                    line: lines[i],
                    message: format!("duplicate timestamp {} for household {}", r.timestamp, r.household),
                });
                continue;
            }
        }
        sorted.push(r.clone());
    }
    out.readings = sorted;
    out.errors.sort_by_key(|e| e.line);
    out
}

/// Holiday calendar: one ISO date per line; blank lines and `#` comments skipped.
pub fn parse_holidays(input: impl BufRead, path: &Path) -> Result<BTreeSet<NaiveDate>> {
    let mut dates = BTreeSet::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let text = line.trim();
        if text.is_empty() || text.starts_with('#') {
            continue;
        }
        let date = NaiveDate::parse_from_str(text, "%Y-%m-%d")
            .map_err(|e| Error::format(path, i + 1, format!("bad date '{text}': {e}")))?;
        dates.insert(date);
    }
    Ok(dates)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct IngestSummary {
    pub rows: usize,
    pub rows_rejected: usize,
    pub households: usize,
    pub days_kept: usize,
    pub days_incomplete: usize,
    pub days_filtered: usize,
}

/// Aligns every household (in parallel) and applies the day-label filter when
/// `wanted` is non-empty.
pub fn build_dataset(
    parsed: &ParsedReadings,
    align: &AlignConfig,
    wanted: &BTreeSet<DayLabel>,
    holidays: &BTreeSet<NaiveDate>,
) -> Result<(Dataset, IngestSummary)> {
    let mut groups: Vec<&[RawReading]> = Vec::new();
    let mut start = 0;
    let readings = &parsed.readings;
    for i in 1..=readings.len() {
        if i == readings.len() || readings[i].household != readings[start].household {
            groups.push(&readings[start..i]);
            start = i;
        }
    }
    let aligned = groups
        .par_iter()
        .map(|g| align_to_grid(g, align))
        .collect::<Result<Vec<_>, _>>()?;

    let mut summary = IngestSummary {
        rows: parsed.rows,
        rows_rejected: parsed.errors.len(),
        ..IngestSummary::default()
    };
    let mut data = Dataset::new();
    for outcome in aligned {
        summary.days_incomplete += outcome.discarded_days;
        for day in outcome.days {
            data.insert(day)?;
        }
    }
    let before = data.day_count();
    let data = if wanted.is_empty() {
        let mut data = data;
        for day in data.days_mut() {
            day.labels = loadmotif_core::align::labels_for(day.date, holidays);
        }
        data
    } else {
        filter_days(data, wanted, holidays)
    };
    summary.days_filtered = before - data.day_count();
    summary.days_kept = data.day_count();
    summary.households = data.household_count();
    Ok((data, summary))
}
