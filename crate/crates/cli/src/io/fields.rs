//! Thematic-field config files: one `name: (kw OR kw) kw ...` query per
//! line, `#` comments and blank lines skipped.

use std::fs;
use std::path::Path;

use trendlens_core::corpus::ThematicField;

use crate::error::Error;

pub fn load_fields(path: &Path) -> Result<Vec<ThematicField>, Error> {
    let content = fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read fields {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        out.push(ThematicField::parse_line(trimmed, idx + 1)?);
    }
    if out.is_empty() {
        return Err(Error::input(format!(
            "no thematic fields in {}",
            path.display()
        )));
    }
    Ok(out)
}
