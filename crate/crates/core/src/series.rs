//! Day-level containers for aligned readings.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::Error;

/// Readings per day on the 5-minute grid.
pub const SLOTS_PER_DAY: usize = 288;
/// Width of one grid cell.
pub const SLOT_SECONDS: i64 = 300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DayLabel {
    /// Monday to Friday and not a listed holiday.
    WorkingDay,
    Weekend,
    Holiday,
}

impl DayLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            DayLabel::WorkingDay => "working-day",
            DayLabel::Weekend => "weekend",
            DayLabel::Holiday => "holiday",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "working-day" => Some(DayLabel::WorkingDay),
            "weekend" => Some(DayLabel::Weekend),
            "holiday" => Some(DayLabel::Holiday),
            _ => None,
        }
    }
}

/// One household-day of 288 mean powers (W), slot 0 starting at midnight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DaySeries {
    pub household: String,
    pub date: NaiveDate,
    readings: Vec<f64>,
    #[serde(default)]
    pub labels: BTreeSet<DayLabel>,
}

impl DaySeries {
    pub fn new(household: impl Into<String>, date: NaiveDate, readings: Vec<f64>) -> Result<Self, Error> {
        validate_readings(&readings)?;
        Ok(DaySeries {
            household: household.into(),
            date,
            readings,
            labels: BTreeSet::new(),
        })
    }

    pub fn readings(&self) -> &[f64] {
        &self.readings
    }

    /// Re-checks the invariants, for values that arrived through deserialization.
    pub fn validate(&self) -> Result<(), Error> {
        validate_readings(&self.readings)
    }
}

fn validate_readings(readings: &[f64]) -> Result<(), Error> {
    if readings.len() != SLOTS_PER_DAY {
        return Err(Error::BadDayLength(readings.len()));
    }
    if let Some((slot, &value)) = readings
        .iter()
        .enumerate()
        .find(|(_, v)| !v.is_finite() || **v < 0.0)
    {
        return Err(Error::BadReading { slot, value });
    }
    Ok(())
}

/// Household id to that household's days, each list sorted by date.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    households: BTreeMap<String, Vec<DaySeries>>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_days(days: impl IntoIterator<Item = DaySeries>) -> Result<Self, Error> {
        let mut data = Dataset::new();
        for day in days {
            data.insert(day)?;
        }
        Ok(data)
    }

    /// Adds a day, keeping the household's list sorted. Rejects a second day
    /// with the same (household, date).
    pub fn insert(&mut self, day: DaySeries) -> Result<(), Error> {
        let days = self.households.entry(day.household.clone()).or_default();
        match days.binary_search_by(|d| d.date.cmp(&day.date)) {
            Ok(_) => Err(Error::DuplicateDay {
                household: day.household,
                date: day.date,
            }),
            Err(pos) => {
                days.insert(pos, day);
                Ok(())
            }
        }
    }

    pub fn households(&self) -> impl Iterator<Item = (&str, &[DaySeries])> {
        self.households.iter().map(|(k, v)| (k.as_str(), v.as_slice()))
    }

    pub fn household(&self, id: &str) -> Option<&[DaySeries]> {
        self.households.get(id).map(Vec::as_slice)
    }

    pub fn household_count(&self) -> usize {
        self.households.len()
    }

    pub fn day_count(&self) -> usize {
        self.households.values().map(Vec::len).sum()
    }

    pub fn days(&self) -> impl Iterator<Item = &DaySeries> {
        self.households.values().flatten()
    }

    pub fn days_mut(&mut self) -> impl Iterator<Item = &mut DaySeries> {
        self.households.values_mut().flatten()
    }

    /// Drops households left with no days.
    pub fn retain_days(&mut self, mut keep: impl FnMut(&DaySeries) -> bool) {
        for days in self.households.values_mut() {
            days.retain(&mut keep);
        }
        self.households.retain(|_, days| !days.is_empty());
    }

    pub fn into_days(self) -> impl Iterator<Item = DaySeries> {
        self.households.into_values().flatten()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn date(d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(2011, 3, d).unwrap()
    }

    #[test]
    fn rejects_short_day() {
        assert_eq!(
            DaySeries::new("h1", date(1), vec![0.0; 287]),
            Err(Error::BadDayLength(287))
        );
    }

    #[test]
    fn rejects_negative_reading() {
        let mut r = vec![1.0; 288];
        r[7] = -1.0;
        assert!(matches!(
            DaySeries::new("h1", date(1), r),
            Err(Error::BadReading { slot: 7, .. })
        ));
    }

    #[test]
    fn dataset_sorts_and_rejects_duplicates() {
        let mut data = Dataset::new();
        data.insert(DaySeries::new("h1", date(3), vec![1.0; 288]).unwrap()).unwrap();
        data.insert(DaySeries::new("h1", date(1), vec![1.0; 288]).unwrap()).unwrap();
        let dup = data.insert(DaySeries::new("h1", date(3), vec![2.0; 288]).unwrap());
        assert!(matches!(dup, Err(Error::DuplicateDay { .. })));
        let dates: Vec<_> = data.household("h1").unwrap().iter().map(|d| d.date).collect();
        assert_eq!(dates, vec![date(1), date(3)]);
    }
}
