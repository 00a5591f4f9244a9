//! Sliding-window motif mining.
//!
//! Every window of `motif_len` consecutive readings inside one day is
//! symbolized, checked against the interest filters, assigned a power band and
//! stored under its (band, word) key. Windows never cross midnight because they
//! are cut from a single [`DaySeries`].

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::symbolize::{compress, letter_for, symbolize_window, HouseholdScale};
use crate::{DaySeries, Dataset, Error, Normalization, ParameterSet, RangeMode, SymbolWord, Variant};

/// Number of equal-width bands in [`RangeMode::PerHouse`].
pub const PER_HOUSE_BANDS: usize = 5;
/// Appliance band upper edges in watts.
pub const APPLIANCE_CUTOFFS: [f64; 5] = [300.0, 1000.0, 3000.0, 5000.0, 60000.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowView<'a> {
    pub household: &'a str,
    pub date: NaiveDate,
    pub start_slot: usize,
    pub readings: &'a [f64],
}

/// `(start, window)` pairs with stride one; `len - motif_len + 1` of them.
pub fn sliding_windows(readings: &[f64], motif_len: usize) -> impl Iterator<Item = (usize, &[f64])> {
    readings.windows(motif_len).enumerate()
}

pub fn extract_windows(day: &DaySeries, motif_len: usize) -> impl Iterator<Item = WindowView<'_>> {
    sliding_windows(day.readings(), motif_len).map(move |(start_slot, readings)| WindowView {
        household: &day.household,
        date: day.date,
        start_slot,
        readings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindowRanges {
    /// max - min of the readings.
    pub window_range: f64,
    /// max - min of the adjacent differences.
    pub diff_range: f64,
}

pub fn window_ranges(readings: &[f64]) -> WindowRanges {
    let span = |it: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if lo.is_finite() {
            hi - lo
        } else {
            0.0
        }
    };
    WindowRanges {
        window_range: span(&mut readings.iter().copied()),
        diff_range: span(&mut readings.windows(2).map(|w| w[1] - w[0])),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    /// Windows whose readings span less than this many watts are noise.
    pub min_range: f64,
    /// Words starting with at least this many middle letters are shifted copies.
    pub middle_prefix_len: usize,
}

impl Default for FilterConfig {
    fn default() -> Self {
        FilterConfig {
            min_range: 100.0,
            middle_prefix_len: 2,
        }
    }
}

impl FilterConfig {
    pub fn validate(&self) -> Result<(), Error> {
        if self.min_range > 0.0 {
            Ok(())
        } else {
            Err(Error::BadMinRange(self.min_range))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rejection {
    BelowMinRange,
    MiddlePrefix,
    MonotoneIncreasing,
    MonotoneDecreasing,
}

impl Rejection {
    pub fn as_str(self) -> &'static str {
        match self {
            Rejection::BelowMinRange => "below_min_range",
            Rejection::MiddlePrefix => "middle_prefix",
            Rejection::MonotoneIncreasing => "monotone_increasing",
            Rejection::MonotoneDecreasing => "monotone_decreasing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Interesting,
    Rejected(Rejection),
}

impl Verdict {
    pub fn is_interesting(self) -> bool {
        self == Verdict::Interesting
    }
}

/// Applies the interest filters to an uncompressed word.
///
/// Rules are checked in order: minimum range, leading middle letters, then
/// one-directional shape. For the raw variant the shape is the letter
/// sequence itself; for the difference variant a letter above the middle is an
/// increase and one below is a decrease.
pub fn is_interesting(word: &SymbolWord, window_range: f64, variant: Variant, filters: &FilterConfig) -> Verdict {
    if window_range < filters.min_range {
        return Verdict::Rejected(Rejection::BelowMinRange);
    }
    let letters = word.letters();
    let middle = word.middle();
    let prefix = filters.middle_prefix_len;
    if prefix > 0 && letters.len() >= prefix && letters[..prefix].iter().all(|&l| l == middle) {
        return Verdict::Rejected(Rejection::MiddlePrefix);
    }
    let (rises, falls) = match variant {
        Variant::Raw => letters.windows(2).fold((0, 0), |(r, f), w| {
            (r + usize::from(w[1] > w[0]), f + usize::from(w[1] < w[0]))
        }),
        Variant::Difference => letters.iter().fold((0, 0), |(r, f), &l| {
            (r + usize::from(l > middle), f + usize::from(l < middle))
        }),
    };
    match (rises, falls) {
        (r, 0) if r > 0 => Verdict::Rejected(Rejection::MonotoneIncreasing),
        (0, f) if f > 0 => Verdict::Rejected(Rejection::MonotoneDecreasing),
        _ => Verdict::Interesting,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BandScheme {
    pub mode: RangeMode,
    /// Upper band edges for [`RangeMode::Appliance`].
    pub cutoffs: Vec<f64>,
}

impl BandScheme {
    pub fn new(mode: RangeMode) -> Self {
        BandScheme {
            mode,
            cutoffs: APPLIANCE_CUTOFFS.to_vec(),
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let ascending = self.cutoffs.windows(2).all(|w| w[0] < w[1]);
        if self.cutoffs.is_empty() || !ascending || self.cutoffs[0] <= 0.0 {
            return Err(Error::BadCutoffs);
        }
        Ok(())
    }
}

/// Smallest and largest window range among a household's windows that pass
/// the minimum-range filter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HouseStats {
    pub min_range: f64,
    pub max_range: f64,
}

impl HouseStats {
    fn observe(stats: &mut Option<HouseStats>, range: f64) {
        match stats {
            Some(s) => {
                s.min_range = s.min_range.min(range);
                s.max_range = s.max_range.max(range);
            }
            None => {
                *stats = Some(HouseStats {
                    min_range: range,
                    max_range: range,
                })
            }
        }
    }
}

/// Band index of a window range, or `None` when ranges are ignored.
///
/// Per-house bands split `[min, max]` into five equal widths (boundaries go
/// to the upper band, the maximum to the last). Appliance bands pick the first
/// cutoff at or above the range.
pub fn band_for(window_range: f64, scheme: &BandScheme, house: Option<&HouseStats>) -> Result<Option<u8>, Error> {
    match scheme.mode {
        RangeMode::None => Ok(None),
        RangeMode::PerHouse => {
            let stats = house.expect("per-house banding needs house statistics");
            let width = stats.max_range - stats.min_range;
            if width <= 0.0 {
                return Ok(Some(0));
            }
            let position = ((window_range - stats.min_range) / width).clamp(0.0, 1.0);
            Ok(Some(letter_for(position, PER_HOUSE_BANDS)))
        }
        RangeMode::Appliance => scheme
            .cutoffs
            .iter()
            .position(|&c| c >= window_range)
            .map(|i| Some(i as u8))
            .ok_or(Error::RangeAboveCutoffs {
                range: window_range,
                limit: scheme.cutoffs.last().copied().unwrap_or(0.0),
            }),
    }
}

/// Identity of a motif within one mining run. Orders by band, then word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MotifKey {
    pub band: Option<u8>,
    pub word: SymbolWord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Occurrence {
    pub date: NaiveDate,
    pub start_slot: usize,
    pub window_range: f64,
    pub diff_range: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct HouseholdMotifs {
    /// Days the household contributed, whether or not they held motifs.
    pub day_count: usize,
    pub motifs: BTreeMap<MotifKey, Vec<Occurrence>>,
}

impl HouseholdMotifs {
    pub fn occurrence_count(&self) -> usize {
        self.motifs.values().map(Vec::len).sum()
    }
}

/// Motifs of every household mined under one parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct MotifCatalog {
    pub params: ParameterSet,
    pub filters: FilterConfig,
    pub bands: BandScheme,
    pub households: BTreeMap<String, HouseholdMotifs>,
}

impl MotifCatalog {
    pub fn new(params: ParameterSet, filters: FilterConfig, bands: BandScheme) -> Self {
        MotifCatalog {
            params,
            filters,
            bands,
            households: BTreeMap::new(),
        }
    }

    /// Folds another catalog of the same run into this one. Occurrence lists
    /// stay sorted by (date, slot), so the result does not depend on merge order.
    pub fn merge(&mut self, other: MotifCatalog) {
        for (id, theirs) in other.households {
            let ours = self.households.entry(id).or_default();
            ours.day_count += theirs.day_count;
            for (key, occurrences) in theirs.motifs {
                let list = ours.motifs.entry(key).or_default();
                list.extend(occurrences);
                list.sort_by(|a, b| (a.date, a.start_slot).cmp(&(b.date, b.start_slot)));
            }
        }
    }

    pub fn motif_count(&self) -> usize {
        self.households.values().map(|h| h.motifs.len()).sum()
    }

    pub fn occurrence_count(&self) -> usize {
        self.households.values().map(HouseholdMotifs::occurrence_count).sum()
    }
}

struct Candidate {
    word: SymbolWord,
    date: NaiveDate,
    start_slot: usize,
    window_range: f64,
    diff_range: f64,
}

/// Mines one household's days. `days` must belong to a single household.
pub fn mine_household(
    days: &[DaySeries],
    params: &ParameterSet,
    filters: &FilterConfig,
    scheme: &BandScheme,
) -> Result<HouseholdMotifs, Error> {
    let scale = match params.normalization {
        Normalization::WithinWindow => None,
        Normalization::WithinHousehold => Some(HouseholdScale::from_readings(
            days.iter().flat_map(|d| d.readings().iter()),
        )),
    };

    let mut stats: Option<HouseStats> = None;
    let mut candidates = Vec::new();
    let mut scaled = Vec::new();
    for day in days {
        let day_err = |e: Error| Error::InDay {
            household: day.household.clone(),
            date: day.date,
            source: Box::new(e),
        };
        if let Some(scale) = scale {
            scaled.clear();
            scaled.extend(day.readings().iter().map(|&r| scale.apply(r)));
        }
        for window in extract_windows(day, params.motif_len) {
            let ranges = window_ranges(window.readings);
            if ranges.window_range < filters.min_range {
                continue;
            }
            HouseStats::observe(&mut stats, ranges.window_range);
            let input = match scale {
                Some(_) => &scaled[window.start_slot..window.start_slot + params.motif_len],
                None => window.readings,
            };
            let word = symbolize_window(input, params.variant, params.normalization, params.alphabet_size)
                .map_err(day_err)?;
            if !is_interesting(&word, ranges.window_range, params.variant, filters).is_interesting() {
                continue;
            }
            candidates.push(Candidate {
                word,
                date: day.date,
                start_slot: window.start_slot,
                window_range: ranges.window_range,
                diff_range: ranges.diff_range,
            });
        }
    }

    let mut motifs: BTreeMap<MotifKey, Vec<Occurrence>> = BTreeMap::new();
    for c in candidates {
        let band = band_for(c.window_range, scheme, stats.as_ref()).map_err(|e| Error::InDay {
            household: days[0].household.clone(),
            date: c.date,
            source: Box::new(e),
        })?;
        let word = if params.compression { compress(&c.word) } else { c.word };
        motifs.entry(MotifKey { band, word }).or_default().push(Occurrence {
            date: c.date,
            start_slot: c.start_slot,
            window_range: c.window_range,
            diff_range: c.diff_range,
        });
    }
    Ok(HouseholdMotifs {
        day_count: days.len(),
        motifs,
    })
}

pub fn validate_run(params: &ParameterSet, filters: &FilterConfig, scheme: &BandScheme) -> Result<(), Error> {
    params.validate()?;
    filters.validate()?;
    if scheme.mode == RangeMode::Appliance {
        scheme.validate()?;
    }
    Ok(())
}

/// Mines every household serially.
pub fn mine_dataset(
    data: &Dataset,
    params: &ParameterSet,
    filters: &FilterConfig,
    scheme: &BandScheme,
) -> Result<MotifCatalog, Error> {
    let mut scheme = scheme.clone();
    scheme.mode = params.range_mode;
    validate_run(params, filters, &scheme)?;
    let mut catalog = MotifCatalog::new(*params, *filters, scheme);
    for (id, days) in data.households() {
        let motifs = mine_household(days, params, filters, &catalog.bands)?;
        catalog.households.insert(String::from(id), motifs);
    }
    Ok(catalog)
}
