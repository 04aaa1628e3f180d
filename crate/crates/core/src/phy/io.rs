//! Frame and symbol stream files.
//!
//! Frames are JSON lines `{"id": "...", "hex": "..."}`. Symbol streams are
//! one byte (0x00 or 0x01) per symbol with a `<name>.json` sidecar.

use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::framing::{Frame, SYMBOL_RATE_BAUD};
use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct FrameRecord {
    id: String,
    hex: String,
}

/// Reads JSON-lines frames. Blank lines are skipped; errors carry the
/// 1-based line number.
pub fn read_frames<R: BufRead>(reader: R) -> Result<Vec<Frame>> {
    let mut frames = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse { line: line_no, msg };
        let rec: FrameRecord =
            serde_json::from_str(&line).map_err(|e| parse_err(e.to_string()))?;
        let payload = hex::decode(rec.hex.trim()).map_err(|e| parse_err(format!("bad hex: {e}")))?;
        let frame = Frame::new(rec.id, payload).map_err(|e| parse_err(e.to_string()))?;
        frames.push(frame);
    }
    Ok(frames)
}

pub fn write_frames<W: Write>(mut writer: W, frames: &[Frame]) -> Result<()> {
    for f in frames {
        let rec = FrameRecord {
            id: f.id.clone(),
            hex: hex::encode(&f.payload),
        };
        serde_json::to_writer(&mut writer, &rec)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymbolSidecar {
    pub symbol_rate_baud: u64,
}

impl Default for SymbolSidecar {
    fn default() -> Self {
        Self {
            symbol_rate_baud: SYMBOL_RATE_BAUD as u64,
        }
    }
}

/// `foo.sym` -> `foo.sym.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".json");
    PathBuf::from(os)
}

pub fn write_symbols(path: &Path, symbols: &[u8], sidecar: &SymbolSidecar) -> Result<()> {
    fs::write(path, symbols.iter().map(|&s| s & 1).collect::<Vec<u8>>())?;
    fs::write(sidecar_path(path), serde_json::to_vec_pretty(sidecar)?)?;
    Ok(())
}

pub fn read_symbols(path: &Path) -> Result<(Vec<u8>, SymbolSidecar)> {
    let symbols = fs::read(path)?;
    if let Some(pos) = symbols.iter().position(|&b| b > 1) {
        return Err(Error::Parse {
            line: pos + 1,
            msg: format!("symbol byte {:#04x} is not 0x00/0x01", symbols[pos]),
        });
    }
    let sidecar = match fs::read(sidecar_path(path)) {
        Ok(bytes) => serde_json::from_slice(&bytes)?,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => SymbolSidecar::default(),
        Err(e) => return Err(e.into()),
    };
    Ok((symbols, sidecar))
}
