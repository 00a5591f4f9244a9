//! Catalog files and parallel mining.
//!
//! A catalog file is JSON lines. The first line is a header carrying the
//! parameter set, filters, band scheme and each household's day count; every
//! further line is one `(household, word, band)` motif with its occurrences.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use loadmotif_core::mine::{
    mine_household, validate_run, BandScheme, FilterConfig, HouseholdMotifs, MotifCatalog, MotifKey, Occurrence,
};
use loadmotif_core::{Dataset, ParameterSet, SymbolWord};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result, TOOL};

pub const CATALOG_FORMAT: &str = "loadmotif-catalog";

/// Mines households in parallel; the result is identical to
/// [`loadmotif_core::mine::mine_dataset`].
pub fn mine_parallel(
    data: &Dataset,
    params: &ParameterSet,
    filters: &FilterConfig,
    scheme: &BandScheme,
) -> Result<MotifCatalog, loadmotif_core::Error> {
    let mut scheme = scheme.clone();
    scheme.mode = params.range_mode;
    validate_run(params, filters, &scheme)?;
    let households: Vec<(&str, &[loadmotif_core::DaySeries])> = data.households().collect();
    let mined = households
        .par_iter()
        .map(|(id, days)| mine_household(days, params, filters, &scheme).map(|m| (id.to_string(), m)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut catalog = MotifCatalog::new(*params, *filters, scheme);
    catalog.households.extend(mined);
    Ok(catalog)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HouseholdDays {
    pub id: String,
    pub days: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogHeader {
    pub format: String,
    pub version: u32,
    pub tool: String,
    pub params_id: String,
    pub params: ParameterSet,
    pub filters: FilterConfig,
    pub bands: BandScheme,
    pub households: Vec<HouseholdDays>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotifLine {
    pub household: String,
    pub word: String,
    pub band: Option<u8>,
    pub occurrences: Vec<Occurrence>,
}

pub fn write_catalog(catalog: &MotifCatalog, out: &mut impl Write) -> std::io::Result<()> {
    let header = CatalogHeader {
        format: CATALOG_FORMAT.into(),
        version: 1,
        tool: TOOL.into(),
        params_id: catalog.params.id(),
        params: catalog.params,
        filters: catalog.filters,
        bands: catalog.bands.clone(),
        households: catalog
            .households
            .iter()
            .map(|(id, h)| HouseholdDays {
                id: id.clone(),
                days: h.day_count,
            })
            .collect(),
    };
    serde_json::to_writer(&mut *out, &header)?;
    out.write_all(b"\n")?;
    for (id, household) in &catalog.households {
        for (key, occurrences) in &household.motifs {
            let line = MotifLine {
                household: id.clone(),
                word: key.word.to_string(),
                band: key.band,
                occurrences: occurrences.clone(),
            };
            serde_json::to_writer(&mut *out, &line)?;
            out.write_all(b"\n")?;
        }
    }
    Ok(())
}

pub fn save_catalog(catalog: &MotifCatalog, path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_catalog(catalog, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_catalog(input: impl BufRead, path: &Path) -> Result<MotifCatalog> {
    let mut lines = input.lines().enumerate();
    let header: CatalogHeader = match lines.next() {
        Some((_, line)) => {
            let line = line.map_err(|e| Error::io(path, e))?;
            serde_json::from_str(&line).map_err(|e| Error::format(path, 1, format!("bad header: {e}")))?
        }
        None => return Err(Error::format(path, 1, "empty catalog file")),
    };
    if header.format != CATALOG_FORMAT {
        return Err(Error::format(path, 1, format!("not a catalog (format '{}')", header.format)));
    }
    let mut households: BTreeMap<String, HouseholdMotifs> = header
        .households
        .iter()
        .map(|h| {
            (
                h.id.clone(),
                HouseholdMotifs {
                    day_count: h.days,
                    motifs: BTreeMap::new(),
                },
            )
        })
        .collect();
    for (i, line) in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |m: String| Error::format(path, i + 1, m);
        let motif: MotifLine = serde_json::from_str(&line).map_err(|e| bad(e.to_string()))?;
        let word = SymbolWord::parse(&motif.word, header.params.alphabet_size).map_err(bad)?;
        let household = households
            .get_mut(&motif.household)
            .ok_or_else(|| bad(format!("household '{}' missing from header", motif.household)))?;
        household.motifs.insert(
            MotifKey {
                band: motif.band,
                word,
            },
            motif.occurrences,
        );
    }
    let mut catalog = MotifCatalog::new(header.params, header.filters, header.bands);
    catalog.households = households;
    Ok(catalog)
}

pub fn load_catalog(path: &Path) -> Result<MotifCatalog> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_catalog(BufReader::new(file), path)
}
