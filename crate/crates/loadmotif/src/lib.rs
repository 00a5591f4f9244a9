//! File formats, synthetic households, parallel sweeps and the `loadmotif`
//! command-line tool built on [`loadmotif_core`].

pub mod catalog;
pub mod config;
pub mod dataset;
pub mod error;
pub mod ingest;
pub mod sweep;
pub mod synth;

pub use error::{Error, Result};

/// Tool name and version written into every output header.
pub const TOOL: &str = concat!("loadmotif ", env!("CARGO_PKG_VERSION"));

/// Runs `f` on a pool of `threads` workers, or on rayon's global pool when
/// `threads` is zero.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    if threads == 0 {
        return f();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
        .install(f)
}
