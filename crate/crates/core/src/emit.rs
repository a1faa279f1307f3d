//! Shared file-emission helpers: locale-independent float formatting and
//! atomic writes (temp file + rename in the destination directory).

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Scientific notation with 12 significant digits; byte-stable across runs.
pub fn fmt_float_12sig(value: f64) -> String {
    format!("{value:.11e}")
}

/// Write a file atomically: contents land under the final name via rename,
/// never as a partially written file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let to_io_err = |source: std::io::Error| Error::Io {
        path: path.display().to_string(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => std::path::PathBuf::from("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(to_io_err)?;
    tmp.write_all(contents).map_err(to_io_err)?;
    tmp.flush().map_err(to_io_err)?;
    tmp.persist(path).map_err(|e| to_io_err(e.error))?;
    Ok(())
}
