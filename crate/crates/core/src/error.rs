use alloc::string::String;

use chrono::NaiveDate;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet size must be odd so that 'no change' maps to a single middle letter (got {0})")]
    EvenAlphabet(usize),
    #[error("alphabet size must be between 3 and 26 (got {0})")]
    AlphabetOutOfRange(usize),
    #[error("motif length must be at least 2 (got {0})")]
    MotifTooShort(usize),
    #[error("motif length {0} exceeds the 288 readings of a day")]
    MotifTooLong(usize),
    #[error("value {0} lies outside the normalized range [0, 1]")]
    ValueOutOfRange(f64),
    #[error("day series must hold exactly 288 readings (got {0})")]
    BadDayLength(usize),
    #[error("reading {value} W at slot {slot} is negative or not finite")]
    BadReading { slot: usize, value: f64 },
    #[error("duplicate day {date} for household {household}")]
    DuplicateDay { household: String, date: NaiveDate },
    #[error("band cutoffs must be positive and strictly ascending")]
    BadCutoffs,
    #[error("window range {range} W exceeds the top appliance cutoff {limit} W")]
    RangeAboveCutoffs { range: f64, limit: f64 },
    #[error("household {household}, {date}: {source}")]
    InDay {
        household: String,
        date: NaiveDate,
        #[source]
        source: alloc::boxed::Box<Error>,
    },
    #[error("region needs Y < X and Z >= 1 (got X={x}, Y={y}, Z={z})")]
    BadRegion { x: f64, y: f64, z: usize },
    #[error("readings for household {household} are not strictly increasing at index {index}")]
    UnsortedReadings { household: String, index: usize },
    #[error("align_to_grid expects one household, found {first} and {other}")]
    MixedHouseholds { first: String, other: String },
    #[error("minimum range must be positive (got {0})")]
    BadMinRange(f64),
}
