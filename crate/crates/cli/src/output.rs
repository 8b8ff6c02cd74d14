//! File writers. Every data file gets a `<file>.json` sidecar describing how
//! it was produced; nothing time- or host-dependent goes into either file.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

#[derive(Debug, Serialize)]
pub struct Sidecar {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub format: String,
    pub data_file: String,
    pub parameters: Value,
    pub tolerances: Value,
    pub summary: Value,
}

impl Sidecar {
    pub fn new(command: &'static str, format: &str, data_file: &Path) -> Self {
        Self {
            tool: "spats",
            version: env!("CARGO_PKG_VERSION"),
            command,
            format: format.to_string(),
            data_file: data_file
                .file_name()
                .map(|f| f.to_string_lossy().into_owned())
                .unwrap_or_default(),
            parameters: Value::Null,
            tolerances: Value::Null,
            summary: Value::Null,
        }
    }
}

pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

/// Writes the data file through `fill`, then the sidecar.
pub fn write_with_sidecar<F>(out: &Path, sidecar: &Sidecar, fill: F) -> CliResult<()>
where
    F: FnOnce(&mut dyn Write) -> std::io::Result<()>,
{
    let file = File::create(out).map_err(|e| CliError::io(out, e))?;
    let mut writer = BufWriter::new(file);
    fill(&mut writer).map_err(|e| CliError::io(out, e))?;
    writer.flush().map_err(|e| CliError::io(out, e))?;

    let side = sidecar_path(out);
    let mut text = serde_json::to_string_pretty(sidecar).expect("sidecar serializes");
    text.push('\n');
    std::fs::write(&side, text).map_err(|e| CliError::io(&side, e))
}

/// One JSON object per line.
pub fn write_jsonl<T: Serialize>(w: &mut dyn Write, rows: &[T]) -> std::io::Result<()> {
    for row in rows {
        serde_json::to_writer(&mut *w, row)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Fixed 17-significant-digit rendering used in every CSV column.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}
