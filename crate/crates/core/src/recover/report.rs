//! JSON decode report.

use serde::{Deserialize, Serialize};

use super::pipeline::{CodeCounts, DecodeOutput};
use crate::phy::framing::Frame;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub id: String,
    pub hex: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub byte_error_mask: Option<Vec<bool>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportStats {
    /// Outside frames, `1 - fraction of ones` of the descrambled bits.
    pub ber: f64,
    /// Only known when ground truth is available.
    pub ser: Option<f64>,
    /// Fraction of codes that were not valid as received.
    pub cer: f64,
    pub codes: CodeCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LfsrReport {
    /// Register that generates the keystream for the first received bit.
    pub state: u16,
    #[serde(rename = "N")]
    pub n: usize,
    pub region: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub frames: Vec<FrameReport>,
    pub stats: ReportStats,
    pub lfsr: LfsrReport,
}

pub fn frame_id(i: usize) -> String {
    format!("rx-{i:04}")
}

/// Recovered frames in file form, ids assigned in order.
pub fn recovered_frames(out: &DecodeOutput) -> Vec<Frame> {
    out.frames
        .iter()
        .enumerate()
        .filter(|(_, f)| !f.bytes.is_empty())
        .map(|(i, f)| Frame {
            id: frame_id(i),
            payload: f.bytes.clone(),
        })
        .collect()
}

pub fn build_report(out: &DecodeOutput, ser: Option<f64>) -> DecodeReport {
    let frames = out
        .frames
        .iter()
        .enumerate()
        .map(|(i, f)| FrameReport {
            id: frame_id(i),
            hex: hex::encode(&f.bytes),
            byte_error_mask: f.has_errors().then(|| f.byte_error_mask.clone()),
        })
        .collect();
    let idle = out.idle_bits();
    let ber = if idle.is_empty() {
        0.0
    } else {
        1.0 - idle.iter().map(|&b| f64::from(b)).sum::<f64>() / idle.len() as f64
    };
    let counts = out.counts();
    let cer = if counts.total() == 0 {
        0.0
    } else {
        (counts.corrected + counts.invalid_uncorrectable) as f64 / counts.total() as f64
    };
    DecodeReport {
        frames,
        stats: ReportStats {
            ber,
            ser,
            cer,
            codes: counts,
        },
        lfsr: LfsrReport {
            state: out.sync.state_at_zero.bits(),
            n: out.sync.sequences,
            region: [out.sync.region.0, out.sync.region.1],
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::demod::ConfidentSymbols;
    use crate::phy::framing::{encode_stream, WireConfig};
    use crate::recover::pipeline::{decode_symbols, DecodeConfig};
    use serde_json::Value;

    #[test]
    fn report_shape() {
        let f = Frame::new("a", vec![0xAB; 3]).unwrap();
        let enc = encode_stream(&[f], &WireConfig::default()).unwrap();
        let out = decode_symbols(&ConfidentSymbols::certain(enc.symbols), &DecodeConfig::default()).unwrap();
        let v: Value = serde_json::to_value(build_report(&out, None)).unwrap();
        assert_eq!(v["frames"][0]["hex"], "ababab");
        assert_eq!(v["frames"][0]["id"], "rx-0000");
        assert!(v["frames"][0].get("byte_error_mask").is_none());
        assert_eq!(v["stats"]["ber"], 0.0);
        assert!(v["stats"]["ser"].is_null());
        assert_eq!(v["stats"]["codes"]["invalid_uncorrectable"], 0);
        assert_eq!(v["lfsr"]["N"], 11);
        assert!(v["lfsr"]["region"].is_array());
    }
}
