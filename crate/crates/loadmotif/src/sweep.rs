//! Parameter sweeps: mine and score every grid point, rank the points, and
//! write the summary and plot-data tables.

use std::io::{BufRead, Write};
use std::time::{Duration, Instant};

use loadmotif_core::evaluate::{evaluate_catalog, rank_points, EvalConfig, Measure, PointEvaluation, RegionConfig};
use loadmotif_core::mine::{mine_dataset, BandScheme, FilterConfig};
use loadmotif_core::{Dataset, Normalization, ParameterSet, RangeMode, Variant};
use rayon::prelude::*;
use serde::Serialize;

pub const ALPHABETS: [usize; 3] = [5, 7, 9];
pub const MOTIF_LENGTHS: [usize; 4] = [4, 6, 9, 12];

/// The 72-point comparison grid, alphabets {5, 7, 9} x lengths {4, 6, 9, 12}
/// in every block, all compressed:
///
/// - both variants x both normalizations under appliance bands (48 points);
/// - the difference variant normalized within the window under no banding
///   and per-house banding (24 points).
pub fn standard_grid() -> Vec<ParameterSet> {
    let mut grid = Vec::with_capacity(72);
    let mut block = |variant, normalization, range_mode| {
        for alphabet_size in ALPHABETS {
            for motif_len in MOTIF_LENGTHS {
                grid.push(ParameterSet {
                    alphabet_size,
                    motif_len,
                    variant,
                    normalization,
                    compression: true,
                    range_mode,
                });
            }
        }
    };
    for variant in [Variant::Difference, Variant::Raw] {
        for normalization in [Normalization::WithinWindow, Normalization::WithinHousehold] {
            block(variant, normalization, RangeMode::Appliance);
        }
    }
    for range_mode in [RangeMode::None, RangeMode::PerHouse] {
        block(Variant::Difference, Normalization::WithinWindow, range_mode);
    }
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepEntry {
    pub params: ParameterSet,
    pub result: Result<PointEvaluation, String>,
    #[serde(skip)]
    pub wall_time: Duration,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub eval: EvalConfig,
    pub entries: Vec<SweepEntry>,
    /// Entry indices, best first.
    pub ranking: Vec<usize>,
}

impl SweepReport {
    pub fn best(&self) -> Option<&SweepEntry> {
        self.ranking.first().map(|&i| &self.entries[i]).filter(|e| e.result.is_ok())
    }

    pub fn failures(&self) -> impl Iterator<Item = (&ParameterSet, &str)> {
        self.entries
            .iter()
            .filter_map(|e| e.result.as_ref().err().map(|m| (&e.params, m.as_str())))
    }
}

/// Mines and scores each grid point in parallel. A failing point is recorded
/// and the sweep carries on.
pub fn run_sweep(
    data: &Dataset,
    grid: &[ParameterSet],
    filters: &FilterConfig,
    cutoffs: &[f64],
    eval: &EvalConfig,
) -> SweepReport {
    let entries: Vec<SweepEntry> = grid
        .par_iter()
        .map(|params| {
            let started = Instant::now();
            let scheme = BandScheme {
                mode: params.range_mode,
                cutoffs: cutoffs.to_vec(),
            };
            let result = mine_dataset(data, params, filters, &scheme)
                .map(|catalog| evaluate_catalog(&catalog, eval))
                .map_err(|e| e.to_string());
            SweepEntry {
                params: *params,
                result,
                wall_time: started.elapsed(),
            }
        })
        .collect();
    let scored: Vec<_> = entries
        .iter()
        .map(|e| (e.params, e.result.as_ref().ok().map(|r| r.combined_score)))
        .collect();
    SweepReport {
        eval: eval.clone(),
        ranking: rank_points(&scored),
        entries,
    }
}

fn fmt_value(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Header line of every table: `# <tool> <config json>`.
pub fn write_comment_header(out: &mut impl Write, kind: &str, config: &serde_json::Value) -> std::io::Result<()> {
    writeln!(out, "# {} {} {}", crate::TOOL, kind, config)
}

/// Region rows `measure,x,y,z`, then curve rows
/// `param_set_id,measure,rank,mean_value,in_region` for every successful point
/// in grid order. Undefined ranks leave `mean_value` empty.
pub fn emit_plot_data(report: &SweepReport, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "# regions: measure,x,y,z")?;
    for r in &report.eval.regions {
        writeln!(out, "{},{},{},{}", r.measure, r.x, r.y, r.z)?;
    }
    writeln!(out, "# curves: param_set_id,measure,rank,mean_value,in_region")?;
    for entry in &report.entries {
        let Ok(result) = &entry.result else { continue };
        let id = entry.params.id();
        for m in &result.measures {
            for p in &m.curve.points {
                let inside = p.rank <= m.region.z && p.mean.is_some_and(|v| m.region.contains(v));
                writeln!(out, "{id},{},{},{},{inside}", m.region.measure, p.rank, fmt_value(p.mean))?;
            }
        }
    }
    Ok(())
}

/// `param_set_id,mean_region_score,<one score per measure>,status` sorted by
/// the ranking; failed points at the end with their error.
pub fn emit_summary(report: &SweepReport, out: &mut impl Write) -> std::io::Result<()> {
    let measures: Vec<&str> = report.eval.regions.iter().map(|r| r.measure.as_str()).collect();
    writeln!(out, "param_set_id,mean_region_score,{},status", measures.join(","))?;
    for &i in &report.ranking {
        let entry = &report.entries[i];
        match &entry.result {
            Ok(r) => {
                let scores: Vec<String> = r.measures.iter().map(|m| m.score.to_string()).collect();
                writeln!(out, "{},{},{},ok", entry.params.id(), r.combined_score, scores.join(","))?;
            }
            Err(e) => {
                let blanks = vec![""; measures.len()].join(",");
                writeln!(out, "{},,{},\"failed: {}\"", entry.params.id(), blanks, e.replace('"', "'"))?;
            }
        }
    }
    Ok(())
}

/// Per-point wall time in milliseconds, grid order.
pub fn emit_timings(report: &SweepReport, out: &mut impl Write) -> std::io::Result<()> {
    writeln!(out, "param_set_id,wall_ms")?;
    for e in &report.entries {
        writeln!(out, "{},{:.3}", e.params.id(), e.wall_time.as_secs_f64() * 1e3)?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum PlotRow {
    Region(RegionConfig),
    Curve {
        params_id: String,
        measure: Measure,
        rank: usize,
        mean: Option<f64>,
        in_region: bool,
    },
}

/// Reads back what [`emit_plot_data`] wrote.
pub fn parse_plot_data(input: impl BufRead) -> Result<Vec<PlotRow>, String> {
    let mut rows = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| e.to_string())?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        let bad = |what: &str| format!("line {}: {what}: {line}", i + 1);
        let f: Vec<&str> = line.split(',').collect();
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad("bad number"));
        match f.len() {
            4 => rows.push(PlotRow::Region(RegionConfig {
                measure: f[0].parse().map_err(|e: String| bad(&e))?,
                x: num(f[1])?,
                y: num(f[2])?,
                z: f[3].parse().map_err(|_| bad("bad z"))?,
            })),
            5 => rows.push(PlotRow::Curve {
                params_id: f[0].to_string(),
                measure: f[1].parse().map_err(|e: String| bad(&e))?,
                rank: f[2].parse().map_err(|_| bad("bad rank"))?,
                mean: if f[3].is_empty() { None } else { Some(num(f[3])?) },
                in_region: f[4].parse().map_err(|_| bad("bad flag"))?,
            }),
            _ => return Err(bad("unexpected column count")),
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn standard_grid_has_72_distinct_points() {
        let grid = standard_grid();
        assert_eq!(grid.len(), 72);
        assert_eq!(grid.iter().collect::<BTreeSet<_>>().len(), 72);
        assert!(grid.contains(&ParameterSet::default()));
        assert!(grid.iter().all(|p| p.validate().is_ok()));
    }

    #[test]
    fn region_rows_match_defaults() {
        let report = SweepReport {
            eval: EvalConfig::default(),
            entries: vec![],
            ranking: vec![],
        };
        let mut buf = Vec::new();
        emit_plot_data(&report, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(rows, vec!["per_day,2,0.3,3", "unique_days,65,10,3", "pct_days,90,20,3"]);
    }
}
