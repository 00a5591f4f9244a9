//! Resampling raw power readings onto the 5-minute grid, and day-type filtering.
//!
//! A raw reading is the average power held from the previous reading's
//! timestamp up to its own. Each grid cell receives the time-weighted mean of
//! the readings overlapping it, so the energy of any run of whole cells equals
//! the raw energy over the same span.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use chrono::{DateTime, Datelike, NaiveDate, Utc, Weekday};
use serde::{Deserialize, Serialize};

use crate::series::{Dataset, DayLabel, DaySeries, SLOTS_PER_DAY, SLOT_SECONDS};
use crate::Error;

const DAY_SECONDS: i64 = SLOTS_PER_DAY as i64 * SLOT_SECONDS;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawReading {
    pub household: String,
    pub timestamp: DateTime<Utc>,
    /// Watts.
    pub power: f64,
}

impl RawReading {
    pub fn new(household: impl Into<String>, timestamp: DateTime<Utc>, power: f64) -> Self {
        RawReading {
            household: household.into(),
            timestamp,
            power,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignConfig {
    /// Longest interval between readings before the days it touches are voided.
    pub max_gap_secs: i64,
    /// Offset of local time from UTC; days start at local midnight.
    pub utc_offset_secs: i64,
}

impl Default for AlignConfig {
    fn default() -> Self {
        AlignConfig {
            max_gap_secs: 30 * 60,
            utc_offset_secs: 0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AlignOutcome {
    pub days: Vec<DaySeries>,
    /// Days that received some readings but had an uncovered cell or a long gap.
    pub discarded_days: usize,
}

struct DayCells {
    energy: [f64; SLOTS_PER_DAY],
    covered: [i64; SLOTS_PER_DAY],
}

impl DayCells {
    fn new() -> Self {
        DayCells {
            energy: [0.0; SLOTS_PER_DAY],
            covered: [0; SLOTS_PER_DAY],
        }
    }

    fn complete(&self) -> bool {
        self.covered.iter().all(|&c| c == SLOT_SECONDS)
    }
}

/// Aligns one household's readings (sorted, strictly increasing timestamps)
/// to the grid. Only complete days are returned, in date order.
pub fn align_to_grid(readings: &[RawReading], config: &AlignConfig) -> Result<AlignOutcome, Error> {
    let Some(first) = readings.first() else {
        return Ok(AlignOutcome::default());
    };
    for (index, pair) in readings.windows(2).enumerate() {
        if pair[1].household != first.household {
            return Err(Error::MixedHouseholds {
                first: first.household.clone(),
                other: pair[1].household.clone(),
            });
        }
        if pair[1].timestamp <= pair[0].timestamp {
            return Err(Error::UnsortedReadings {
                household: first.household.clone(),
                index: index + 1,
            });
        }
    }

    let mut cells: BTreeMap<i64, DayCells> = BTreeMap::new();
    let mut voided: BTreeSet<i64> = BTreeSet::new();
    let local = |r: &RawReading| r.timestamp.timestamp() + config.utc_offset_secs;

    for pair in readings.windows(2) {
        let (start, end) = (local(&pair[0]), local(&pair[1]));
        if end - start > config.max_gap_secs {
            for day in start.div_euclid(DAY_SECONDS)..=(end - 1).div_euclid(DAY_SECONDS) {
                voided.insert(day);
            }
            continue;
        }
        let power = pair[1].power;
        for cell in start.div_euclid(SLOT_SECONDS)..=(end - 1).div_euclid(SLOT_SECONDS) {
            let lo = start.max(cell * SLOT_SECONDS);
            let hi = end.min((cell + 1) * SLOT_SECONDS);
            let day = cell.div_euclid(SLOTS_PER_DAY as i64);
            let slot = cell.rem_euclid(SLOTS_PER_DAY as i64) as usize;
            let acc = cells.entry(day).or_insert_with(DayCells::new);
            acc.energy[slot] += power * ((hi - lo) as f64 / SLOT_SECONDS as f64);
            acc.covered[slot] += hi - lo;
        }
    }

    let mut outcome = AlignOutcome::default();
    for (day, acc) in cells {
        if voided.contains(&day) || !acc.complete() {
            outcome.discarded_days += 1;
            continue;
        }
        let series = DaySeries::new(first.household.clone(), date_of_day(day), acc.energy.to_vec())?;
        outcome.days.push(series);
    }
    Ok(outcome)
}

fn date_of_day(day: i64) -> NaiveDate {
    DateTime::from_timestamp(day * DAY_SECONDS, 0)
        .expect("day index within chrono range")
        .date_naive()
}

fn day_of_date(date: NaiveDate) -> i64 {
    date.and_hms_opt(0, 0, 0)
        .expect("midnight exists")
        .and_utc()
        .timestamp()
        .div_euclid(DAY_SECONDS)
}

/// Inverse of [`align_to_grid`] for already-aligned days: one reading stamped at
/// the end of every cell, plus a start marker before each run of consecutive
/// days. Feeding the result back through `align_to_grid` reproduces the days.
pub fn to_raw_readings(days: &[DaySeries], config: &AlignConfig) -> Vec<RawReading> {
    let mut out = Vec::with_capacity(days.len() * (SLOTS_PER_DAY + 1));
    let mut previous: Option<i64> = None;
    for day in days {
        let index = day_of_date(day.date);
        let day_start = index * DAY_SECONDS - config.utc_offset_secs;
        let stamp = |secs: i64| DateTime::from_timestamp(secs, 0).expect("timestamp in range");
        if previous != Some(index - 1) {
            out.push(RawReading::new(day.household.clone(), stamp(day_start), day.readings()[0]));
        }
        for (slot, &power) in day.readings().iter().enumerate() {
            let end = day_start + (slot as i64 + 1) * SLOT_SECONDS;
            out.push(RawReading::new(day.household.clone(), stamp(end), power));
        }
        previous = Some(index);
    }
    out
}

/// Day-type labels: weekends, listed holidays, and working days otherwise.
pub fn labels_for(date: NaiveDate, holidays: &BTreeSet<NaiveDate>) -> BTreeSet<DayLabel> {
    let mut labels = BTreeSet::new();
    if matches!(date.weekday(), Weekday::Sat | Weekday::Sun) {
        labels.insert(DayLabel::Weekend);
    } else if !holidays.contains(&date) {
        labels.insert(DayLabel::WorkingDay);
    }
    if holidays.contains(&date) {
        labels.insert(DayLabel::Holiday);
    }
    labels
}

/// Relabels every day against `holidays` and keeps the days carrying all of
/// `wanted`.
pub fn filter_days(mut data: Dataset, wanted: &BTreeSet<DayLabel>, holidays: &BTreeSet<NaiveDate>) -> Dataset {
    for day in data.days_mut() {
        day.labels = labels_for(day.date, holidays);
    }
    data.retain_days(|day| wanted.is_subset(&day.labels));
    data
}
