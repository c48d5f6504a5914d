//! Report files, written to a temporary file and renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use netbell_core::sampling::RoundRecord;
use netbell_core::ReportRow;
use serde::Serialize;

/// File-name stem from a scenario name, e.g. `star(3)` to `star-3`.
pub fn slug(name: &str) -> String {
    let mut out = String::new();
    for ch in name.chars() {
        if ch.is_ascii_alphanumeric() {
            out.push(ch.to_ascii_lowercase());
        } else if !out.ends_with('-') {
            out.push('-');
        }
    }
    out.trim_matches('-').to_string()
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).with_context(|| format!("creating a file in {}", dir.display()))?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).with_context(|| format!("renaming into {}", path.display()))?;
    Ok(())
}

pub struct Writer {
    dir: PathBuf,
}

impl Writer {
    pub fn new(dir: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&dir).with_context(|| format!("creating output directory {}", dir.display()))?;
        Ok(Writer { dir })
    }

    pub fn json<T: Serialize>(&self, stem: &str, value: &T) -> Result<PathBuf> {
        let path = self.dir.join(format!("{stem}.json"));
        let mut text = serde_json::to_vec_pretty(value)?;
        text.push(b'\n');
        write_atomic(&path, &text)?;
        Ok(path)
    }

    /// Report rows under the frozen header.
    pub fn rows(&self, stem: &str, rows: &[ReportRow]) -> Result<PathBuf> {
        let path = self.dir.join(format!("{stem}.csv"));
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.write_record(netbell_core::CSV_COLUMNS)?;
        for row in rows {
            w.serialize(row)?;
        }
        write_atomic(&path, &w.into_inner()?)?;
        Ok(path)
    }

    /// One line per round: round, settings bits, outcomes.
    pub fn rounds(&self, stem: &str, records: &[RoundRecord]) -> Result<PathBuf> {
        let path = self.dir.join(format!("{stem}.csv"));
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["round", "x", "y", "outcomes"])?;
        let bits = |v: &[u8]| v.iter().map(|b| b.to_string()).collect::<String>();
        for r in records {
            let outcomes = r.outcomes.iter().map(|o| o.to_string()).collect::<Vec<_>>().join(" ");
            w.write_record([r.round.to_string(), bits(&r.x), bits(&r.y), outcomes])?;
        }
        write_atomic(&path, &w.into_inner()?)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slugs() {
        assert_eq!(slug("star(3)"), "star-3");
        assert_eq!(slug("ghz-split(4,2)"), "ghz-split-4-2");
        assert_eq!(slug("Example A"), "example-a");
    }
}
