//! Window symbolization: difference series, normalization, equal-width binning
//! and run-length compression of symbol words.
//!
//! Values are normalized by min-max (not z-normalized), so the bins are
//! equal-width over `[0, 1]` rather than the Gaussian breakpoints of classic
//! SAX. Every reading becomes one letter; there is no PAA step.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// The readings themselves.
    Raw,
    /// Differences between adjacent readings.
    Difference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    WithinWindow,
    WithinHousehold,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeMode {
    None,
    PerHouse,
    Appliance,
}

macro_rules! str_enum {
    ($ty:ty { $($variant:ident => $name:literal),+ $(,)? }) => {
        impl $ty {
            pub fn as_str(self) -> &'static str {
                match self { $(Self::$variant => $name),+ }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $ty {
            type Err = String;

            fn from_str(s: &str) -> Result<Self, String> {
                match s {
                    $($name => Ok(Self::$variant),)+
                    _ => Err(alloc::format!(
                        "unknown value '{}', expected one of: {}",
                        s,
                        [$($name),+].join(", ")
                    )),
                }
            }
        }
    };
}

str_enum!(Variant { Raw => "raw", Difference => "difference" });
str_enum!(Normalization { WithinWindow => "within_window", WithinHousehold => "within_household" });
str_enum!(RangeMode { None => "none", PerHouse => "per_house", Appliance => "appliance" });

/// Every knob that shapes one mining run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParameterSet {
    pub alphabet_size: usize,
    /// Window length in 5-minute slots.
    pub motif_len: usize,
    pub variant: Variant,
    pub normalization: Normalization,
    pub compression: bool,
    pub range_mode: RangeMode,
}

impl Default for ParameterSet {
    /// Appliance bands, difference series, compressed, normalized within the
    /// window, 6 readings, 5 letters.
    fn default() -> Self {
        ParameterSet {
            alphabet_size: 5,
            motif_len: 6,
            variant: Variant::Difference,
            normalization: Normalization::WithinWindow,
            compression: true,
            range_mode: RangeMode::Appliance,
        }
    }
}

impl ParameterSet {
    pub fn validate(&self) -> Result<(), Error> {
        if !(3..=26).contains(&self.alphabet_size) {
            return Err(Error::AlphabetOutOfRange(self.alphabet_size));
        }
        if self.alphabet_size % 2 == 0 {
            return Err(Error::EvenAlphabet(self.alphabet_size));
        }
        if self.motif_len < 2 {
            return Err(Error::MotifTooShort(self.motif_len));
        }
        if self.motif_len > crate::SLOTS_PER_DAY {
            return Err(Error::MotifTooLong(self.motif_len));
        }
        Ok(())
    }

    /// Stable identifier, e.g. `a5.m6.difference.within_window.compressed.appliance`.
    pub fn id(&self) -> String {
        alloc::format!(
            "a{}.m{}.{}.{}.{}.{}",
            self.alphabet_size,
            self.motif_len,
            self.variant,
            self.normalization,
            if self.compression { "compressed" } else { "uncompressed" },
            self.range_mode
        )
    }

    /// Letters in a word before compression.
    pub fn word_len(&self) -> usize {
        match self.variant {
            Variant::Raw => self.motif_len,
            Variant::Difference => self.motif_len - 1,
        }
    }
}

/// Letters are stored as bin indices; `0` prints as `a`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SymbolWord {
    letters: Vec<u8>,
    alphabet_size: u8,
}

impl SymbolWord {
    pub fn new(letters: Vec<u8>, alphabet_size: usize) -> Self {
        assert!(!letters.is_empty(), "symbol word must not be empty");
        assert!(
            letters.iter().all(|&l| (l as usize) < alphabet_size),
            "letter outside alphabet of size {alphabet_size}"
        );
        SymbolWord {
            letters,
            alphabet_size: alphabet_size as u8,
        }
    }

    pub fn parse(s: &str, alphabet_size: usize) -> Result<Self, String> {
        let letters = s
            .bytes()
            .map(|b| match b {
                b'a'..=b'z' if ((b - b'a') as usize) < alphabet_size => Ok(b - b'a'),
                _ => Err(alloc::format!("'{s}' is not a word over {alphabet_size} letters")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if letters.is_empty() {
            return Err(String::from("empty symbol word"));
        }
        Ok(SymbolWord::new(letters, alphabet_size))
    }

    pub fn letters(&self) -> &[u8] {
        &self.letters
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size as usize
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn middle(&self) -> u8 {
        self.alphabet_size / 2
    }
}

impl fmt::Display for SymbolWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &l in &self.letters {
            fmt::Write::write_char(f, (b'a' + l) as char)?;
        }
        Ok(())
    }
}

impl Serialize for SymbolWord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

pub fn difference_series(window: &[f64]) -> Vec<f64> {
    assert!(window.len() >= 2, "difference series needs at least two readings");
    window.windows(2).map(|w| w[1] - w[0]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizeMode {
    /// `(v - min) / (max - min)` into `[0, 1]`; a constant input maps to 0.5.
    MinMaxUnit,
    /// `v / max|v|` into `[-1, 1]`; all zeros stay zero.
    SymmetricUnit,
}

pub fn normalize_values(values: &[f64], mode: NormalizeMode) -> Vec<f64> {
    match mode {
        NormalizeMode::MinMaxUnit => {
            let (min, max) = min_max(values);
            values.iter().map(|&v| unit(v, min, max)).collect()
        }
        NormalizeMode::SymmetricUnit => {
            let peak = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
            if peak == 0.0 {
                values.iter().map(|_| 0.0).collect()
            } else {
                values.iter().map(|&v| v / peak).collect()
            }
        }
    }
}

/// Min-max scaling over everything a household recorded in the analysis period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HouseholdScale {
    pub min: f64,
    pub max: f64,
}

impl HouseholdScale {
    pub fn from_readings<'a>(readings: impl IntoIterator<Item = &'a f64>) -> Self {
        let (min, max) = readings
            .into_iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        HouseholdScale { min, max }
    }

    pub fn apply(&self, reading: f64) -> f64 {
        unit(reading, self.min, self.max)
    }
}

pub fn normalize_household(readings: &[f64]) -> Vec<f64> {
    let scale = HouseholdScale::from_readings(readings);
    readings.iter().map(|&r| scale.apply(r)).collect()
}

fn min_max(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

fn unit(v: f64, min: f64, max: f64) -> f64 {
    if max > min {
        (v - min) / (max - min)
    } else {
        0.5
    }
}

/// Bin index of `value` in `[0, 1]` split into `alphabet_size` equal-width
/// bins. A value on a boundary `i / alphabet_size` goes to the upper bin, and
/// 1.0 goes to the last bin.
pub fn letter_for(value: f64, alphabet_size: usize) -> u8 {
    let k = alphabet_size;
    let mut letter = ((value * k as f64) as usize).min(k - 1);
    while letter + 1 < k && value >= (letter + 1) as f64 / k as f64 {
        letter += 1;
    }
    while letter > 0 && value < letter as f64 / k as f64 {
        letter -= 1;
    }
    letter as u8
}

/// One letter per value. Values must lie in `[0, 1]`.
pub fn symbolize(normalized: &[f64], alphabet_size: usize) -> Result<SymbolWord, Error> {
    if alphabet_size % 2 == 0 {
        return Err(Error::EvenAlphabet(alphabet_size));
    }
    if !(3..=26).contains(&alphabet_size) {
        return Err(Error::AlphabetOutOfRange(alphabet_size));
    }
    let letters = normalized
        .iter()
        .map(|&v| {
            if (0.0..=1.0).contains(&v) {
                Ok(letter_for(v, alphabet_size))
            } else {
                Err(Error::ValueOutOfRange(v))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SymbolWord::new(letters, alphabet_size))
}

/// Maps `[-1, 1]` onto `[0, 1]` so that zero change lands on 0.5.
pub fn symmetric_to_unit(v: f64) -> f64 {
    (v + 1.0) / 2.0
}

/// Symbolizes one window under `variant` and `normalization`.
///
/// For [`Normalization::WithinWindow`] `window` holds watts; for
/// [`Normalization::WithinHousehold`] it holds readings already scaled by
/// [`HouseholdScale`] and is not normalized again.
pub fn symbolize_window(
    window: &[f64],
    variant: Variant,
    normalization: Normalization,
    alphabet_size: usize,
) -> Result<SymbolWord, Error> {
    let values: Vec<f64> = match (variant, normalization) {
        (Variant::Raw, Normalization::WithinWindow) => normalize_values(window, NormalizeMode::MinMaxUnit),
        (Variant::Raw, Normalization::WithinHousehold) => window.to_vec(),
        (Variant::Difference, Normalization::WithinWindow) => {
            normalize_values(&difference_series(window), NormalizeMode::SymmetricUnit)
                .into_iter()
                .map(symmetric_to_unit)
                .collect()
        }
        (Variant::Difference, Normalization::WithinHousehold) => difference_series(window)
            .into_iter()
            .map(symmetric_to_unit)
            .collect(),
    };
    symbolize(&values, alphabet_size)
}

/// Collapses runs of equal adjacent letters.
pub fn compress(word: &SymbolWord) -> SymbolWord {
    let mut letters = word.letters.clone();
    letters.dedup();
    SymbolWord {
        letters,
        alphabet_size: word.alphabet_size,
    }
}
