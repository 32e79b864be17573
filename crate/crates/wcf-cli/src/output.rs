//! Output formatting: JSON with full binary64 round-trip, CSV with 12
//! significant digits.

use clap::ValueEnum;
use serde::Serialize;

use wcf_core::Error;

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub fn to_json<T: Serialize>(doc: &T) -> Result<String, Error> {
    let mut s = serde_json::to_string_pretty(doc)
        .map_err(|e| Error::invalid(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Scientific notation with 12 significant digits.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}
