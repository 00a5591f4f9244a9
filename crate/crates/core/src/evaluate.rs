//! Frequency measures over each household's most common motifs, rank curves
//! averaged across households, and interest-region scoring.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::mine::{HouseholdMotifs, MotifCatalog, MotifKey, Occurrence};
use crate::{Error, ParameterSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Occurrences divided by the household's day count.
    PerDay,
    /// Distinct dates carrying the motif.
    UniqueDays,
    /// Distinct dates as a percentage of the household's day count.
    PctDays,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::PerDay, Measure::UniqueDays, Measure::PctDays];

    pub fn as_str(self) -> &'static str {
        match self {
            Measure::PerDay => "per_day",
            Measure::UniqueDays => "unique_days",
            Measure::PctDays => "pct_days",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Measure::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| alloc::format!("unknown measure '{s}', expected per_day, unique_days or pct_days"))
    }
}

/// Interest region for one measure: values in `[y, x]` over ranks `1..=z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionConfig {
    pub measure: Measure,
    pub x: f64,
    pub y: f64,
    pub z: usize,
}

impl RegionConfig {
    pub fn default_for(measure: Measure) -> Self {
        let (x, y) = match measure {
            Measure::PerDay => (2.0, 0.3),
            Measure::UniqueDays => (65.0, 10.0),
            Measure::PctDays => (90.0, 20.0),
        };
        RegionConfig { measure, x, y, z: 3 }
    }

    pub fn defaults() -> Vec<RegionConfig> {
        Measure::ALL.into_iter().map(RegionConfig::default_for).collect()
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.y < self.x && self.z >= 1 {
            Ok(())
        } else {
            Err(Error::BadRegion {
                x: self.x,
                y: self.y,
                z: self.z,
            })
        }
    }

    /// Both bounds inclusive.
    pub fn contains(&self, value: f64) -> bool {
        self.y <= value && value <= self.x
    }
}

/// A household's motifs by descending occurrence count, ties by (band, word);
/// at most `z` entries.
pub fn top_motifs(household: &HouseholdMotifs, z: usize) -> Vec<(&MotifKey, &[Occurrence])> {
    let mut ranked: Vec<_> = household
        .motifs
        .iter()
        .map(|(k, v)| (k, v.as_slice()))
        .collect();
    ranked.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(z);
    ranked
}

pub fn measure_value(occurrences: &[Occurrence], day_count: usize, measure: Measure) -> f64 {
    assert!(day_count >= 1, "household must contribute at least one day");
    let unique = || occurrences.iter().map(|o| o.date).collect::<BTreeSet<_>>().len() as f64;
    match measure {
        Measure::PerDay => occurrences.len() as f64 / day_count as f64,
        Measure::UniqueDays => unique(),
        Measure::PctDays => 100.0 * unique() / day_count as f64,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankPoint {
    pub rank: usize,
    /// `None` when no household has a motif at this rank.
    pub mean: Option<f64>,
    /// Households that have a motif at this rank.
    pub households: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankCurve {
    pub params_id: String,
    pub measure: Measure,
    pub points: Vec<RankPoint>,
}

impl RankCurve {
    pub fn value(&self, rank: usize) -> Option<f64> {
        self.points.get(rank.checked_sub(1)?).and_then(|p| p.mean)
    }
}

/// Mean measure value at ranks `1..=ranks`, over the households that have a
/// motif at each rank.
pub fn rank_curve(catalog: &MotifCatalog, measure: Measure, ranks: usize) -> RankCurve {
    let mut sums = alloc::vec![0.0; ranks];
    let mut counts = alloc::vec![0usize; ranks];
    for household in catalog.households.values() {
        for (i, (_, occurrences)) in top_motifs(household, ranks).into_iter().enumerate() {
            sums[i] += measure_value(occurrences, household.day_count, measure);
            counts[i] += 1;
        }
    }
    let points = (0..ranks)
        .map(|i| RankPoint {
            rank: i + 1,
            mean: (counts[i] > 0).then(|| sums[i] / counts[i] as f64),
            households: counts[i],
        })
        .collect();
    RankCurve {
        params_id: catalog.params.id(),
        measure,
        points,
    }
}

/// Fraction of ranks `1..=z` whose mean lies inside the region; undefined
/// ranks count as outside.
pub fn region_score(curve: &RankCurve, region: &RegionConfig) -> f64 {
    let inside = (1..=region.z)
        .filter(|&r| curve.value(r).is_some_and(|v| region.contains(v)))
        .count();
    inside as f64 / region.z as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalConfig {
    pub regions: Vec<RegionConfig>,
    /// Ranks computed for plotting; scoring only looks at `z`.
    pub extend_to: usize,
    /// One weight per region for the combined score; equal weights when empty.
    #[serde(default)]
    pub weights: Vec<f64>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            regions: RegionConfig::defaults(),
            extend_to: 10,
            weights: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureResult {
    pub region: RegionConfig,
    pub curve: RankCurve,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointEvaluation {
    pub params: ParameterSet,
    pub measures: Vec<MeasureResult>,
    pub combined_score: f64,
}

pub fn evaluate_catalog(catalog: &MotifCatalog, config: &EvalConfig) -> PointEvaluation {
    let measures: Vec<MeasureResult> = config
        .regions
        .iter()
        .map(|region| {
            let curve = rank_curve(catalog, region.measure, config.extend_to.max(region.z));
            let score = region_score(&curve, region);
            MeasureResult {
                region: *region,
                curve,
                score,
            }
        })
        .collect();
    let combined_score = combine(measures.iter().map(|m| m.score), &config.weights);
    PointEvaluation {
        params: catalog.params,
        measures,
        combined_score,
    }
}

fn combine(scores: impl Iterator<Item = f64>, weights: &[f64]) -> f64 {
    let (mut total, mut weight_sum) = (0.0, 0.0);
    for (i, s) in scores.enumerate() {
        let w = weights.get(i).copied().unwrap_or(1.0);
        total += w * s;
        weight_sum += w;
    }
    if weight_sum > 0.0 {
        total / weight_sum
    } else {
        0.0
    }
}

/// Orders grid points best first: higher combined score, then smaller
/// alphabet, then shorter motif, then grid position. Points without a score
/// (failed runs) go last.
pub fn rank_points(points: &[(ParameterSet, Option<f64>)]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        let (pa, sa) = &points[a];
        let (pb, sb) = &points[b];
        let by_score = match (sa, sb) {
            (Some(x), Some(y)) => y.partial_cmp(x).unwrap_or(Ordering::Equal),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        };
        by_score
            .then(pa.alphabet_size.cmp(&pb.alphabet_size))
            .then(pa.motif_len.cmp(&pb.motif_len))
            .then(a.cmp(&b))
    });
    order
}
