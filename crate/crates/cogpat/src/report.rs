//! Artifact writing: JSON reports and CSV tables in the output directory.

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::formats::{self, FormatError};

/// Output directory plus the list of files written so far.
#[derive(Debug)]
pub struct Artifacts {
    dir: PathBuf,
    written: Vec<PathBuf>,
}

impl Artifacts {
    pub fn new(dir: &Path) -> Self {
        Self {
            dir: dir.to_path_buf(),
            written: Vec::new(),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<PathBuf, FormatError> {
        let path = self.dir.join(name);
        formats::save(value, &path)?;
        self.written.push(path.clone());
        Ok(path)
    }

    pub fn csv<R: AsRef<[String]>>(&mut self, name: &str, header: &[&str], rows: &[R]) -> Result<PathBuf, FormatError> {
        let path = self.dir.join(name);
        let err = |e: csv::Error| FormatError::Write {
            path: path.clone(),
            source: std::io::Error::other(e),
        };
        let mut w = csv::Writer::from_path(&path).map_err(err)?;
        w.write_record(header).map_err(err)?;
        for r in rows {
            w.write_record(r.as_ref()).map_err(err)?;
        }
        w.flush().map_err(|source| FormatError::Write {
            path: path.clone(),
            source,
        })?;
        self.written.push(path.clone());
        Ok(path)
    }
}

/// Shortest round-tripping decimal for a float (`3` for `3.0`).
pub fn num(x: f64) -> String {
    format!("{x}")
}
