//! External class-number tables: CSV with header `label,disc,h,structure`.

use std::collections::HashSet;
use std::io::Read;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IngestedClassRecord {
    pub label: String,
    pub disc: i64,
    pub h: u64,
    /// Invariant factors, if the table gives them (`d1.d2.….dr`, `1` for
    /// the trivial group).
    pub structure: Option<Vec<u64>>,
}

pub fn ingest_class_numbers(path: &Path) -> Result<Vec<IngestedClassRecord>> {
    parse_class_numbers(std::fs::File::open(path)?)
}

pub fn parse_class_numbers<R: Read>(input: R) -> Result<Vec<IngestedClassRecord>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(input);
    let header = reader.headers().map_err(|e| parse_error(1, e))?.clone();
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names.len() < 3 || names[..3] != ["label", "disc", "h"] || names.get(3).is_some_and(|s| *s != "structure") {
        return Err(Error::Parse { line: 1, message: format!("expected header label,disc,h,structure, got {names:?}") });
    }
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let line = i as u64 + 2;
        let row = row.map_err(|e| parse_error(line, e))?;
        let record = parse_row(&row, line)?;
        if !seen.insert(record.disc) {
            return Err(Error::DuplicateDiscriminant(record.disc));
        }
        out.push(record);
    }
    Ok(out)
}

fn parse_error(line: u64, e: impl std::fmt::Display) -> Error {
    Error::Parse { line, message: e.to_string() }
}

fn parse_row(row: &csv::StringRecord, line: u64) -> Result<IngestedClassRecord> {
    if !(3..=4).contains(&row.len()) {
        return Err(parse_error(line, format!("expected 3 or 4 fields, got {}", row.len())));
    }
    let label = row[0].trim().to_string();
    let disc: i64 = row[1].trim().parse().map_err(|e| parse_error(line, format!("disc: {e}")))?;
    let h: u64 = row[2].trim().parse().map_err(|e| parse_error(line, format!("h: {e}")))?;
    if disc == 0 {
        return Err(parse_error(line, "discriminant must be nonzero"));
    }
    if h == 0 {
        return Err(parse_error(line, "class number must be at least 1"));
    }
    let structure = match row.get(3).map(str::trim).filter(|s| !s.is_empty()) {
        None => None,
        Some(s) => {
            let parts = s
                .split('.')
                .map(|p| p.trim().parse::<u64>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|e| parse_error(line, format!("structure: {e}")))?;
            let divisors: Vec<u64> = parts.into_iter().filter(|&d| d != 1).collect();
            if divisors.contains(&0) || divisors.windows(2).any(|w| w[1] % w[0] != 0) {
                return Err(parse_error(line, format!("structure {s} is not a divisibility chain")));
            }
            if divisors.iter().product::<u64>() != h {
                return Err(parse_error(line, format!("structure {s} has order different from h = {h}")));
            }
            Some(divisors)
        }
    };
    Ok(IngestedClassRecord { label, disc, h, structure })
}
