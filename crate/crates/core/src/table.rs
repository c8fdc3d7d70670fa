//! Numeric CSV tables: comma-separated, optional header row, `#` comments.

use crate::error::{Error, Result};

/// Rows of at least `min_cols` numbers. A first record that does not parse
/// as numbers is taken as the header.
pub fn parse_numeric_table(text: &str, min_cols: usize) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Parse(e.to_string()))?;
        if record.iter().all(str::is_empty) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) if row.len() >= min_cols => rows.push(row),
            Ok(row) => {
                return Err(Error::Parse(format!(
                    "record {}: expected {min_cols} columns, found {}",
                    i + 1,
                    row.len()
                )))
            }
            Err(_) if i == 0 => continue,
            Err(e) => return Err(Error::Parse(format!("record {}: {e}", i + 1))),
        }
    }
    if rows.is_empty() {
        return Err(Error::Parse("table has no numeric rows".into()));
    }
    Ok(rows)
}

/// Column `j` of a parsed table.
pub fn column(rows: &[Vec<f64>], j: usize) -> Vec<f64> {
    rows.iter().map(|r| r.get(j).copied().unwrap_or(0.0)).collect()
}
