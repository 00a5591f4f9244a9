//! Run configuration file (TOML). Every key is optional; missing keys take the
//! defaults below, and command-line flags override both.
//!
//! ```toml
//! [ingest]
//! delimiter = ","
//! header = false
//! max_gap_minutes = 30
//! utc_offset_minutes = 0
//! labels = ["working-day"]
//! holidays = "uk-holidays.txt"
//!
//! [params]
//! alphabet_size = 5
//! motif_len = 6
//! variant = "difference"
//! normalization = "within_window"
//! compression = true
//! range_mode = "appliance"
//!
//! [filters]
//! min_range = 100.0
//! middle_prefix_len = 2
//!
//! [bands]
//! cutoffs = [300.0, 1000.0, 3000.0, 5000.0, 60000.0]
//!
//! [region.per_day]
//! x = 2.0
//! y = 0.3
//! z = 3
//!
//! [sweep]
//! grid = "standard"
//! extend_to = 10
//! measures = ["per_day", "unique_days", "pct_days"]
//!
//! [run]
//! seed = 7
//! threads = 0
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use loadmotif_core::evaluate::{EvalConfig, Measure, RegionConfig};
use loadmotif_core::mine::{FilterConfig, APPLIANCE_CUTOFFS};
use loadmotif_core::ParameterSet;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IngestSection {
    pub delimiter: char,
    pub header: bool,
    pub max_gap_minutes: i64,
    pub utc_offset_minutes: i64,
    pub labels: Vec<String>,
    pub holidays: Option<PathBuf>,
}

impl Default for IngestSection {
    fn default() -> Self {
        IngestSection {
            delimiter: ',',
            header: false,
            max_gap_minutes: 30,
            utc_offset_minutes: 0,
            labels: vec!["working-day".into()],
            holidays: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BandsSection {
    pub cutoffs: Vec<f64>,
}

impl Default for BandsSection {
    fn default() -> Self {
        BandsSection {
            cutoffs: APPLIANCE_CUTOFFS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionOverride {
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub z: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSection {
    /// `standard`, `default` (the single default parameter set) or `custom`.
    pub grid: String,
    /// Used when `grid = "custom"`.
    pub points: Vec<ParameterSet>,
    pub extend_to: usize,
    pub measures: Vec<Measure>,
    /// Per-measure weights for the combined score, in `measures` order.
    pub weights: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        SweepSection {
            grid: "standard".into(),
            points: Vec::new(),
            extend_to: 10,
            measures: Measure::ALL.to_vec(),
            weights: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSection {
    pub seed: u64,
    /// 0 means one worker per core.
    pub threads: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub ingest: IngestSection,
    pub params: ParameterSet,
    pub filters: FilterConfig,
    pub bands: BandsSection,
    pub region: BTreeMap<Measure, RegionOverride>,
    pub sweep: SweepSection,
    pub run: RunSection,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|m| Error::format(path, 0, m))
    }

    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    /// Interest regions for `measures`, defaults with any overrides applied.
    pub fn regions(&self, measures: &[Measure]) -> Result<Vec<RegionConfig>> {
        measures
            .iter()
            .map(|&m| {
                let mut r = RegionConfig::default_for(m);
                if let Some(o) = self.region.get(&m) {
                    r.x = o.x.unwrap_or(r.x);
                    r.y = o.y.unwrap_or(r.y);
                    r.z = o.z.unwrap_or(r.z);
                }
                r.validate()?;
                Ok(r)
            })
            .collect()
    }

    pub fn eval_config(&self, measures: &[Measure]) -> Result<EvalConfig> {
        Ok(EvalConfig {
            regions: self.regions(measures)?,
            extend_to: self.sweep.extend_to,
            weights: self.sweep.weights.clone(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use loadmotif_core::{RangeMode, Variant};

    #[test]
    fn empty_file_is_the_default_method() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c.params, ParameterSet::default());
        assert_eq!(c.filters, FilterConfig::default());
        assert_eq!(c.bands.cutoffs, vec![300.0, 1000.0, 3000.0, 5000.0, 60000.0]);
        assert_eq!(c.regions(&Measure::ALL).unwrap(), RegionConfig::defaults());
    }

    #[test]
    fn overrides_apply() {
        let c = RunConfig::parse(
            r#"
            [params]
            variant = "raw"
            range_mode = "per_house"
            [region.per_day]
            x = 3.0
            "#,
        )
        .unwrap();
        assert_eq!(c.params.variant, Variant::Raw);
        assert_eq!(c.params.range_mode, RangeMode::PerHouse);
        assert_eq!(c.params.alphabet_size, 5);
        let r = c.regions(&[Measure::PerDay]).unwrap();
        assert_eq!((r[0].x, r[0].y, r[0].z), (3.0, 0.3, 3));
    }

    #[test]
    fn unknown_keys_are_errors() {
        assert!(RunConfig::parse("[params]\nalphabet = 5\n").is_err());
    }

    #[test]
    fn inverted_region_is_rejected() {
        let c = RunConfig::parse("[region.pct_days]\ny = 95.0\n").unwrap();
        assert!(c.regions(&Measure::ALL).is_err());
    }
}
