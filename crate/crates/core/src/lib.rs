//! Motif mining over 5-minute electricity-meter readings.
//!
//! The crate is `no_std` (it needs `alloc`) and carries the whole algorithmic
//! pipeline:
//!
//! - [`align`] resamples raw power readings onto an exact 5-minute grid while
//!   conserving energy, and labels/filters days by type.
//! - [`symbolize`] turns a window of readings into a symbol word (raw or
//!   difference series, normalized within the window or the household).
//! - [`mine`] slides windows over each day, drops uninteresting windows, assigns
//!   power bands and builds a [`mine::MotifCatalog`].
//! - [`evaluate`] ranks each household's motifs, computes the frequency
//!   measures, averages them into rank curves and scores curves against an
//!   interest region.
//!
//! File formats, synthetic data, parallel sweeps and the command-line tool live
//! in the `loadmotif` crate.
#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod align;
pub mod error;
pub mod evaluate;
pub mod mine;
pub mod series;
pub mod symbolize;

pub use error::Error;
pub use series::{Dataset, DayLabel, DaySeries, SLOTS_PER_DAY, SLOT_SECONDS};
pub use symbolize::{Normalization, ParameterSet, RangeMode, SymbolWord, Variant};
