use std::collections::BTreeSet;

use chrono::{DateTime, NaiveDate, Utc};
use loadmotif_core::align::{align_to_grid, filter_days, to_raw_readings, AlignConfig, RawReading};
use loadmotif_core::{Dataset, DayLabel, SLOTS_PER_DAY};
use proptest::prelude::*;

const DAY: i64 = 86_400;

fn midnight() -> i64 {
    NaiveDate::from_ymd_opt(2011, 3, 1)
        .unwrap()
        .and_hms_opt(0, 0, 0)
        .unwrap()
        .and_utc()
        .timestamp()
}

fn at(secs: i64) -> DateTime<Utc> {
    DateTime::from_timestamp(secs, 0).unwrap()
}

fn stream(stamps: &[i64], powers: &[f64]) -> Vec<RawReading> {
    stamps.iter().zip(powers).map(|(&t, &p)| RawReading::new("h1", at(t), p)).collect()
}

/// Energy in joules over `[lo, hi)` of a step stream where each reading holds
/// its power since the previous timestamp.
fn raw_energy(stamps: &[i64], powers: &[f64], lo: i64, hi: i64) -> f64 {
    let mut total = 0.0;
    for i in 1..stamps.len() {
        let a = stamps[i - 1].max(lo);
        let b = stamps[i].min(hi);
        if b > a {
            total += powers[i] * (b - a) as f64;
        }
    }
    total
}

/// Irregular stream covering whole days from 2011-03-01, intervals under the gap limit.
fn irregular(seed_steps: &[i64], seed_powers: &[f64], days: i64) -> (Vec<i64>, Vec<f64>) {
    let start = midnight();
    let mut t = start - seed_steps[0];
    let mut stamps = vec![t];
    let mut powers = vec![0.0];
    let mut i = 0;
    while t < start + days * DAY {
        t += seed_steps[i % seed_steps.len()];
        stamps.push(t);
        powers.push(seed_powers[i % seed_powers.len()]);
        i += 1;
    }
    (stamps, powers)
}

#[test]
fn split_reading_matches_second_by_second_integration() {
    let start = midnight();
    let marker = |h: i64, m: i64| start + h * 3600 + m * 60;
    let mut stamps = vec![start];
    let mut t = marker(0, 2);
    while t <= marker(23, 57) {
        stamps.push(t);
        t += 300;
    }
    stamps.push(start + DAY);
    let load_start = marker(13, 2);
    let load_end = marker(13, 7);
    let powers: Vec<f64> = stamps
        .iter()
        .map(|&s| if s > load_start && s <= load_end { 600.0 } else { 0.0 })
        .collect();

    let out = align_to_grid(&stream(&stamps, &powers), &AlignConfig::default()).unwrap();
    assert_eq!(out.days.len(), 1);
    let grid = out.days[0].readings();

    // Power at second `s` is that of the first reading stamped after it.
    let power_at = |s: i64| {
        let i = stamps.iter().position(|&t| t > s).unwrap();
        powers[i]
    };
    for cell in 0..SLOTS_PER_DAY {
        let base = start + cell as i64 * 300;
        let mean = (0..300).map(|k| power_at(base + k)).sum::<f64>() / 300.0;
        assert!((grid[cell] - mean).abs() < 1e-9, "cell {cell}: {} vs {mean}", grid[cell]);
    }
    let c = 13 * 12;
    assert_eq!((grid[c], grid[c + 1]), (360.0, 240.0));
    assert_eq!((grid[c] + grid[c + 1]) * 300.0, 600.0 * 300.0);
}

#[test]
fn aligned_constant_is_a_fixed_point() {
    let start = midnight();
    let stamps: Vec<i64> = (0..=288).map(|k| start + k * 300).collect();
    let out = align_to_grid(&stream(&stamps, &[500.0; 289]), &AlignConfig::default()).unwrap();
    assert_eq!(out.days[0].readings(), &[500.0; 288][..]);
}

#[test]
fn working_day_filter_examples() {
    let days = ["2011-03-01", "2011-03-05", "2011-04-25"].map(|d| {
        let date: NaiveDate = d.parse().unwrap();
        loadmotif_core::DaySeries::new("h1", date, vec![1.0; 288]).unwrap()
    });
    let data = Dataset::from_days(days).unwrap();
    let holidays = BTreeSet::from(["2011-04-25".parse().unwrap()]);
    let kept = filter_days(data, &BTreeSet::from([DayLabel::WorkingDay]), &holidays);
    let dates: Vec<String> = kept.days().map(|d| d.date.to_string()).collect();
    assert_eq!(dates, vec!["2011-03-01"]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn hourly_energy_is_conserved(
        steps in prop::collection::vec(1i64..1500, 1..40),
        powers in prop::collection::vec(0.0..4000.0f64, 1..40),
        days in 1i64..3,
    ) {
        let (stamps, powers) = irregular(&steps, &powers, days);
        let out = align_to_grid(&stream(&stamps, &powers), &AlignConfig::default()).unwrap();
        prop_assert_eq!(out.days.len() as i64, days);
        prop_assert!(out.discarded_days <= 2);
        for (d, day) in out.days.iter().enumerate() {
            prop_assert_eq!(day.readings().len(), SLOTS_PER_DAY);
            let day_start = midnight() + d as i64 * DAY;
            for hour in 0..24 {
                let lo = day_start + hour * 3600;
                let expected = raw_energy(&stamps, &powers, lo, lo + 3600);
                let got: f64 = day.readings()[hour as usize * 12..][..12].iter().sum::<f64>() * 300.0;
                let tol = 1e-9 * expected.abs().max(1.0);
                prop_assert!((got - expected).abs() <= tol, "hour {} got {} want {}", hour, got, expected);
            }
        }
    }

    #[test]
    fn realigning_aligned_output_is_exact(
        steps in prop::collection::vec(1i64..1500, 1..40),
        powers in prop::collection::vec(0.0..4000.0f64, 1..40),
        days in 1i64..3,
        offset_minutes in -720i64..=720,
    ) {
        let config = AlignConfig { utc_offset_secs: offset_minutes * 60, ..AlignConfig::default() };
        let (stamps, powers) = irregular(&steps, &powers, days);
        let once = align_to_grid(&stream(&stamps, &powers), &config).unwrap();
        let twice = align_to_grid(&to_raw_readings(&once.days, &config), &config).unwrap();
        prop_assert_eq!(twice.days, once.days);
        prop_assert_eq!(twice.discarded_days, 0);
    }

    #[test]
    fn emitted_days_always_have_288_readings(
        steps in prop::collection::vec(1i64..4000, 1..40),
        powers in prop::collection::vec(0.0..4000.0f64, 1..40),
        days in 1i64..4,
    ) {
        let (stamps, powers) = irregular(&steps, &powers, days);
        let out = align_to_grid(&stream(&stamps, &powers), &AlignConfig::default()).unwrap();
        for day in &out.days {
            prop_assert_eq!(day.readings().len(), SLOTS_PER_DAY);
            prop_assert!(day.readings().iter().all(|v| v.is_finite() && *v >= 0.0));
        }
    }
}
