//! Record rendering: JSON lines or CSV with a header row.

use serde::Serialize;

use wallseries::eigen::EigenLevel;

use crate::settings::Format;
use crate::CliError;

/// Splits the fractional digits into blocks of five separated by spaces.
pub fn group_digits(s: &str) -> String {
    let Some((int, frac)) = s.split_once('.') else {
        return s.to_string();
    };
    let blocks: Vec<&str> = frac
        .as_bytes()
        .chunks(5)
        .map(|c| std::str::from_utf8(c).expect("ascii digits"))
        .collect();
    format!("{int}.{}", blocks.join(" "))
}

/// Inverse of [`group_digits`].
pub fn ungroup_digits(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

pub fn paper_style(level: &EigenLevel) -> EigenLevel {
    let mut out = level.clone();
    out.energy = group_digits(&level.energy);
    out.upper = group_digits(&level.upper);
    out.lower = level.lower.as_deref().map(group_digits);
    out
}

pub fn render<T: Serialize>(rows: &[T], format: Format) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let mut out = String::new();
            for row in rows {
                out.push_str(&serde_json::to_string(row).map_err(CliError::io)?);
                out.push('\n');
            }
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for row in rows {
                w.serialize(row).map_err(CliError::io)?;
            }
            let bytes = w.into_inner().map_err(CliError::io)?;
            String::from_utf8(bytes).map_err(CliError::io)
        }
    }
}
