use std::io::Write;
use std::path::{Path, PathBuf};

use tempfile::NamedTempFile;

use crate::CliError;

/// Output files of one run. Nothing reaches its destination until every
/// file has been written to a temporary sibling.
#[derive(Default)]
pub struct Outputs {
    files: Vec<(PathBuf, Vec<u8>)>,
}

impl Outputs {
    pub fn add(&mut self, path: &Path, contents: impl Into<Vec<u8>>) -> Result<(), CliError> {
        if self.files.iter().any(|(p, _)| p == path) {
            return Err(CliError::new(format!("{}: used for more than one output", path.display())));
        }
        self.files.push((path.to_path_buf(), contents.into()));
        Ok(())
    }

    pub fn commit(self) -> Result<(), CliError> {
        let mut staged = Vec::with_capacity(self.files.len());
        for (path, contents) in self.files {
            let err = |e: std::io::Error| CliError::new(format!("{}: {e}", path.display()));
            let dir = match path.parent() {
                Some(p) if !p.as_os_str().is_empty() => p,
                _ => Path::new("."),
            };
            let mut tmp = NamedTempFile::new_in(dir).map_err(err)?;
            tmp.write_all(&contents).map_err(err)?;
            tmp.as_file().sync_all().map_err(err)?;
            staged.push((path, tmp));
        }
        for (path, tmp) in staged {
            tmp.persist(&path)
                .map_err(|e| CliError::new(format!("{}: {}", path.display(), e.error)))?;
        }
        Ok(())
    }
}
