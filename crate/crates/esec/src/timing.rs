//! Timing tables as CSV.

use std::io::{Read, Write};
use std::path::Path;

use esec_core::chaining::{validate_table, ActionTiming};

use crate::error::{Error, Result};

/// Header: `name,dur_mean,dur_sd,esec_mean,esec_sd,sec_mean,sec_sd`.
pub fn read_timings_from(reader: impl Read) -> Result<Vec<ActionTiming>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let table = rdr
        .deserialize()
        .collect::<std::result::Result<Vec<ActionTiming>, _>>()?;
    validate_table(&table)?;
    Ok(table)
}

pub fn read_timings(path: &Path) -> Result<Vec<ActionTiming>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_timings_from(file)
}

pub fn write_timings_to(writer: impl Write, table: &[ActionTiming]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for t in table {
        w.serialize(t)?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))
}
