//! Closing-price CSV ingestion: header `date,close`, ISO-8601 dates.

use std::fs;
use std::path::Path;

use trendlens_core::corpus::PriceSeries;
use trendlens_core::time::UtcDate;

use crate::error::Error;
use crate::io::csvx;

pub fn load_prices(path: &Path) -> Result<PriceSeries, Error> {
    let content = fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read prices {}: {e}", path.display())))?;
    let mut lines = content.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == "date,close" => {}
        other => {
            return Err(Error::input(format!(
                "price csv must start with header 'date,close', got {:?}",
                other.map(|(_, l)| l).unwrap_or("")
            )))
        }
    }
    let mut entries = Vec::new();
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields = csvx::split(line);
        if fields.len() != 2 {
            return Err(Error::input(format!(
                "line {}: expected 2 fields, got {}",
                idx + 1,
                fields.len()
            )));
        }
        let date = UtcDate::parse(fields[0].trim())
            .map_err(|e| Error::input(format!("line {}: {e}", idx + 1)))?;
        let close: f64 = fields[1]
            .trim()
            .parse()
            .map_err(|e| Error::input(format!("line {}: bad price: {e}", idx + 1)))?;
        entries.push((date, close));
    }
    Ok(PriceSeries::new(entries)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(content: &str) -> tempfile::NamedTempFile {
        let file = tempfile::NamedTempFile::new().unwrap();
        fs::write(file.path(), content).unwrap();
        file
    }

    #[test]
    fn two_row_csv_parses() {
        let file = write("date,close\n2022-03-01,230.5\n2022-03-02,231.75\n");
        let series = load_prices(file.path()).unwrap();
        assert_eq!(series.entries.len(), 2);
        assert_eq!(series.entries[0].1, 230.5);
        assert_eq!(series.entries[1].0.to_string(), "2022-03-02");
    }

    #[test]
    fn negative_price_rejected() {
        let file = write("date,close\n2022-03-01,-1.0\n");
        assert!(load_prices(file.path()).is_err());
    }

    #[test]
    fn unsorted_dates_rejected() {
        let file = write("date,close\n2022-03-02,1.0\n2022-03-01,2.0\n");
        assert!(load_prices(file.path()).is_err());
    }

    #[test]
    fn missing_header_rejected() {
        let file = write("2022-03-01,1.0\n");
        assert!(load_prices(file.path()).is_err());
    }
}
