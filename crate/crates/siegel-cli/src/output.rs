//! Output-file plumbing: config-echo headers and atomic writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::{CliError, CliResult, FORMAT_VERSION, OUT_DIR_ENV};

/// A `#`-prefixed header echoing the full run configuration.
pub struct Header {
    lines: Vec<String>,
}

impl Header {
    pub fn new(command: &str) -> Self {
        Self {
            lines: vec![format!("# {FORMAT_VERSION}"), format!("# command = {command}")],
        }
    }

    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) -> &mut Self {
        self.lines.push(format!("# {key} = {value}"));
        self
    }

    pub fn columns(&mut self, columns: &str) -> &mut Self {
        self.lines.push(format!("# columns = {columns}"));
        self
    }

    pub fn comment(&mut self, text: &str) -> &mut Self {
        self.lines.push(format!("# {text}"));
        self
    }

    pub fn render(&self) -> String {
        let mut s = self.lines.join("\n");
        s.push('\n');
        s
    }
}

/// Relative paths land in `SIEGEL_OUT_DIR` when it is set.
pub fn resolve_out_path(path: &Path) -> PathBuf {
    if path.is_absolute() {
        return path.to_path_buf();
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) => PathBuf::from(dir).join(path),
        None => path.to_path_buf(),
    }
}

/// Write via a temp file in the target directory, then rename into place.
pub fn write_atomic(path: &Path, contents: &str) -> CliResult<()> {
    let path = resolve_out_path(path);
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::Io(format!("temp file in {}: {e}", dir.display())))?;
    tmp.write_all(contents.as_bytes())
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    tmp.persist(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(())
}
