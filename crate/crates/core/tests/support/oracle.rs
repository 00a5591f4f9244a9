//! Straight-line reference implementations used to cross-check the library.
//! Nothing here calls into the crate's symbolizer, filters or banding.
#![allow(dead_code)]

use chrono::NaiveDate;
use loadmotif_core::mine::MotifCatalog;
use loadmotif_core::{Normalization, ParameterSet, RangeMode, Variant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Row = (String, Option<u8>, NaiveDate, usize);

/// Counts the boundaries `i / k` at or below `v`.
pub fn letter(v: f64, k: usize) -> u8 {
    let mut n = 0;
    for i in 1..k {
        if v >= i as f64 / k as f64 {
            n += 1;
        }
    }
    n
}

pub fn word_string(letters: &[u8]) -> String {
    letters.iter().map(|&l| (b'a' + l) as char).collect()
}

/// Letters of one window. `scale` is the household (min, max) when
/// normalizing within the household.
pub fn window_letters(w: &[f64], variant: Variant, scale: Option<(f64, f64)>, k: usize) -> Vec<u8> {
    let to_unit = |v: f64, lo: f64, hi: f64| if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
    let mut values = Vec::new();
    match (variant, scale) {
        (Variant::Raw, None) => {
            let mut lo = w[0];
            let mut hi = w[0];
            for &v in w {
                if v < lo {
                    lo = v;
                }
                if v > hi {
                    hi = v;
                }
            }
            for &v in w {
                values.push(to_unit(v, lo, hi));
            }
        }
        (Variant::Raw, Some((lo, hi))) => {
            for &v in w {
                values.push(to_unit(v, lo, hi));
            }
        }
        (Variant::Difference, None) => {
            let mut d = Vec::new();
            for i in 0..w.len() - 1 {
                d.push(w[i + 1] - w[i]);
            }
            let mut peak = 0.0f64;
            for &x in &d {
                if x.abs() > peak {
                    peak = x.abs();
                }
            }
            for &x in &d {
                let s = if peak > 0.0 { x / peak } else { 0.0 };
                values.push((s + 1.0) / 2.0);
            }
        }
        (Variant::Difference, Some((lo, hi))) => {
            for i in 0..w.len() - 1 {
                let a = to_unit(w[i], lo, hi);
                let b = to_unit(w[i + 1], lo, hi);
                values.push((b - a + 1.0) / 2.0);
            }
        }
    }
    values.iter().map(|&v| letter(v, k)).collect()
}

/// `None` when the word is kept, otherwise the rule that rejected it.
pub fn verdict(letters: &[u8], k: usize, range: f64, variant: Variant, min_range: f64, prefix: usize) -> Option<&'static str> {
    if range < min_range {
        return Some("below_min_range");
    }
    let mid = (k / 2) as u8;
    if prefix > 0 && letters.len() >= prefix {
        let mut all_mid = true;
        for &l in &letters[..prefix] {
            if l != mid {
                all_mid = false;
            }
        }
        if all_mid {
            return Some("middle_prefix");
        }
    }
    let mut up = false;
    let mut down = false;
    match variant {
        Variant::Raw => {
            for i in 1..letters.len() {
                if letters[i] > letters[i - 1] {
                    up = true;
                }
                if letters[i] < letters[i - 1] {
                    down = true;
                }
            }
        }
        Variant::Difference => {
            for &l in letters {
                if l > mid {
                    up = true;
                }
                if l < mid {
                    down = true;
                }
            }
        }
    }
    if up && !down {
        return Some("monotone_increasing");
    }
    if down && !up {
        return Some("monotone_decreasing");
    }
    None
}

fn squeeze(letters: &[u8]) -> Vec<u8> {
    let mut out: Vec<u8> = Vec::new();
    for &l in letters {
        if out.last() != Some(&l) {
            out.push(l);
        }
    }
    out
}

/// Every kept window of one household as (word, band, date, start slot), sorted.
pub fn mine(days: &[(NaiveDate, Vec<f64>)], p: &ParameterSet, min_range: f64, prefix: usize, cutoffs: &[f64]) -> Vec<Row> {
    let scale = match p.normalization {
        Normalization::WithinWindow => None,
        Normalization::WithinHousehold => {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for (_, r) in days {
                for &v in r {
                    lo = lo.min(v);
                    hi = hi.max(v);
                }
            }
            Some((lo, hi))
        }
    };

    let mut kept = Vec::new();
    let mut range_lo = f64::INFINITY;
    let mut range_hi = f64::NEG_INFINITY;
    for (date, readings) in days {
        for start in 0..=readings.len() - p.motif_len {
            let w = &readings[start..start + p.motif_len];
            let mut lo = w[0];
            let mut hi = w[0];
            for &v in w {
                lo = lo.min(v);
                hi = hi.max(v);
            }
            let range = hi - lo;
            if range < min_range {
                continue;
            }
            range_lo = range_lo.min(range);
            range_hi = range_hi.max(range);
            let letters = window_letters(w, p.variant, scale, p.alphabet_size);
            if verdict(&letters, p.alphabet_size, range, p.variant, min_range, prefix).is_some() {
                continue;
            }
            kept.push((letters, range, *date, start));
        }
    }

    let mut rows = Vec::new();
    for (letters, range, date, start) in kept {
        let band = match p.range_mode {
            RangeMode::None => None,
            RangeMode::Appliance => {
                let mut b = 0;
                while cutoffs[b] < range {
                    b += 1;
                }
                Some(b as u8)
            }
            RangeMode::PerHouse => {
                if range_hi > range_lo {
                    let pos = (range - range_lo) / (range_hi - range_lo);
                    let mut b = 0u8;
                    for i in 1..5 {
                        if pos >= i as f64 / 5.0 {
                            b += 1;
                        }
                    }
                    Some(b)
                } else {
                    Some(0)
                }
            }
        };
        let letters = if p.compression { squeeze(&letters) } else { letters };
        rows.push((word_string(&letters), band, date, start));
    }
    rows.sort();
    rows
}

pub fn catalog_rows(catalog: &MotifCatalog, household: &str) -> Vec<Row> {
    let mut rows = Vec::new();
    if let Some(h) = catalog.households.get(household) {
        for (key, occurrences) in &h.motifs {
            for o in occurrences {
                rows.push((key.word.to_string(), key.band, o.date, o.start_slot));
            }
        }
    }
    rows.sort();
    rows
}

/// A day of household-like load: base, appliance runs of random level and
/// length, and small noise.
pub fn random_day(rng: &mut ChaCha8Rng) -> Vec<f64> {
    let base = rng.random_range(100.0..300.0);
    let mut out = Vec::with_capacity(288);
    let mut extra = 0.0;
    let mut left = 0usize;
    for _ in 0..288 {
        if left == 0 {
            extra = if rng.random_bool(0.3) {
                [150.0, 400.0, 1200.0, 2500.0, 3500.0][rng.random_range(0..5)] * rng.random_range(0.8..1.2)
            } else {
                0.0
            };
            left = rng.random_range(1..8);
        }
        left -= 1;
        out.push((base + extra + rng.random_range(-15.0..15.0_f64)).max(0.0));
    }
    out
}

pub fn random_days(seed: u64, count: usize) -> Vec<(NaiveDate, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = NaiveDate::from_ymd_opt(2011, 3, 1).unwrap();
    (0..count)
        .map(|i| (first + chrono::Days::new(i as u64), random_day(&mut rng)))
        .collect()
}

pub fn all_settings() -> Vec<ParameterSet> {
    let mut out = Vec::new();
    for alphabet_size in [5, 7, 9] {
        for motif_len in [4, 6, 9, 12] {
            for variant in [Variant::Raw, Variant::Difference] {
                for normalization in [Normalization::WithinWindow, Normalization::WithinHousehold] {
                    for range_mode in [RangeMode::None, RangeMode::PerHouse, RangeMode::Appliance] {
                        for compression in [true, false] {
                            out.push(ParameterSet {
                                alphabet_size,
                                motif_len,
                                variant,
                                normalization,
                                compression,
                                range_mode,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}
