//! Stand-alone decoder for Version 1-L grids, in either orientation.
//!
//! This is the scanner stand-in used to accept or reject constructed
//! symbols, so it stays strict about function patterns and lenient about
//! anything after the declared characters.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{parse_payload, BitString, CodecError, Mode};
use crate::format::{apply_format_mask, bch_decode, EcLevel, FormatError, FormatWord};
use crate::grid::{CellCoord, ModuleGrid};
use crate::masks::MaskId;
use crate::rscode::{bits_to_bytes, rs_decode, RsError, DATA_CODEWORDS, TOTAL_CODEWORDS};
use crate::symbol::{read_codeword_bits, read_format};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Straight,
    Transposed,
}

impl fmt::Display for Orientation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Orientation::Straight => "straight",
            Orientation::Transposed => "transposed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("function pattern mismatch at {} cell(s), first at {first:?}", count)]
    FunctionPattern { first: CellCoord, count: usize },
    #[error("format information unreadable: {0}")]
    Format(FormatError),
    #[error("error correction level {0} is not supported for decoding")]
    UnsupportedEcLevel(EcLevel),
    #[error("Reed-Solomon decoding failed: {0}")]
    ReedSolomon(RsError),
    #[error("payload parse failed: {0}")]
    Payload(CodecError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecodeReport {
    pub text: String,
    pub mode: Mode,
    pub mask_id: MaskId,
    pub ec_level: EcLevel,
    pub format_distance: u32,
    /// Which format copy was trusted (1 or 2).
    pub format_copy: u8,
    pub corrected_bytes: Vec<usize>,
    pub orientation: Orientation,
    pub codewords: Vec<u8>,
}

/// Decode both format copies and reconcile them: a copy that fails loses;
/// otherwise the smaller BCH distance wins, copy 1 on ties.
pub fn read_format_info(grid: &ModuleGrid) -> Result<(FormatWord, u32, u8), FormatError> {
    let (w1, w2) = read_format(grid);
    let d1 = bch_decode(apply_format_mask(w1));
    let d2 = bch_decode(apply_format_mask(w2));
    let (info, dist, copy) = match (d1, d2) {
        (Ok((i1, e1)), Ok((i2, e2))) => {
            if e2 < e1 {
                (i2, e2, 2)
            } else {
                (i1, e1, 1)
            }
        }
        (Ok((i, e)), Err(_)) => (i, e, 1),
        (Err(_), Ok((i, e))) => (i, e, 2),
        (Err(e), Err(_)) => return Err(e),
    };
    Ok((FormatWord::from_info(info), dist, copy))
}

pub fn decode_grid(
    grid: &ModuleGrid,
    orientation: Orientation,
) -> Result<DecodeReport, DecodeError> {
    let view = match orientation {
        Orientation::Straight => grid.clone(),
        Orientation::Transposed => grid.transposed(),
    };
    let bad = view.function_pattern_mismatches();
    if let Some(&first) = bad.first() {
        return Err(DecodeError::FunctionPattern {
            first,
            count: bad.len(),
        });
    }
    let (format, format_distance, format_copy) =
        read_format_info(&view).map_err(DecodeError::Format)?;
    if format.ec != EcLevel::L {
        return Err(DecodeError::UnsupportedEcLevel(format.ec));
    }
    let bits = read_codeword_bits(&view, format.mask);
    let received: [u8; TOTAL_CODEWORDS] = bits_to_bytes(&bits).try_into().unwrap();
    let corrected = rs_decode(&received).map_err(DecodeError::ReedSolomon)?;
    let payload = BitString::from_bytes(&corrected.data[..DATA_CODEWORDS]);
    let parsed = parse_payload(&payload).map_err(DecodeError::Payload)?;
    Ok(DecodeReport {
        text: parsed.text,
        mode: parsed.mode,
        mask_id: format.mask,
        ec_level: format.ec,
        format_distance,
        format_copy,
        corrected_bytes: corrected.corrected,
        orientation,
        codewords: received.to_vec(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A (straight)",
            Side::B => "B (mirrored)",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("side {side}: {source}")]
    Decode { side: Side, source: DecodeError },
    #[error("side {side}: expected {expected:?}, decoded {found:?}")]
    Mismatch {
        side: Side,
        expected: String,
        found: String,
    },
}

impl VerifyError {
    pub fn side(&self) -> Side {
        match self {
            VerifyError::Decode { side, .. } | VerifyError::Mismatch { side, .. } => *side,
        }
    }
}

/// Decode both orientations and compare against the expected messages.
pub fn verify_double_sided(
    grid: &ModuleGrid,
    msg_a: &str,
    msg_b: &str,
) -> Result<(DecodeReport, DecodeReport), VerifyError> {
    let mut reports = Vec::with_capacity(2);
    for (side, orientation, expected) in [
        (Side::A, Orientation::Straight, msg_a),
        (Side::B, Orientation::Transposed, msg_b),
    ] {
        let report = decode_grid(grid, orientation)
            .map_err(|source| VerifyError::Decode { side, source })?;
        if report.text != expected {
            return Err(VerifyError::Mismatch {
                side,
                expected: expected.to_string(),
                found: report.text,
            });
        }
        reports.push(report);
    }
    let b = reports.pop().unwrap();
    let a = reports.pop().unwrap();
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codec::Segment;
    use crate::grid::{data_placement_order, function_pattern_grid};
    use crate::symbol::encode_symbol;

    fn hello(mask: u8) -> ModuleGrid {
        encode_symbol(
            &[Segment::new(Mode::Alphanumeric, "HELLO")],
            MaskId::new(mask).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn decodes_single_sided_hello() {
        let r = decode_grid(&hello(0), Orientation::Straight).unwrap();
        assert_eq!(r.text, "HELLO");
        assert!(r.corrected_bytes.is_empty());
        assert_eq!(r.format_distance, 0);
    }

    #[test]
    fn corrects_three_corrupted_codewords() {
        let mut g = hello(2);
        let order = data_placement_order();
        for byte in [1usize, 9, 22] {
            g.flip(order[byte * 8 + 3]);
        }
        let r = decode_grid(&g, Orientation::Straight).unwrap();
        assert_eq!(r.text, "HELLO");
        assert_eq!(r.corrected_bytes, vec![1, 9, 22]);
    }

    #[test]
    fn four_corrupted_codewords_fail() {
        let mut g = hello(2);
        let order = data_placement_order();
        for byte in [0usize, 5, 9, 22] {
            g.flip(order[byte * 8]);
        }
        assert!(decode_grid(&g, Orientation::Straight).is_err());
    }

    #[test]
    fn all_light_data_region_is_rejected() {
        let mut g = function_pattern_grid();
        crate::symbol::write_format(
            &mut g,
            FormatWord::new(EcLevel::L, MaskId::new(0).unwrap()).on_grid(),
        );
        for &c in data_placement_order() {
            g.set(c, false);
        }
        assert!(decode_grid(&g, Orientation::Straight).is_err());
    }

    #[test]
    fn broken_finder_is_reported() {
        let mut g = hello(0);
        g.flip(CellCoord::new(3, 3).unwrap());
        assert!(matches!(
            decode_grid(&g, Orientation::Straight),
            Err(DecodeError::FunctionPattern { count: 1, .. })
        ));
    }

    #[test]
    fn format_copy_reconciliation_prefers_closer_copy() {
        let mut g = hello(0);
        let pos = crate::grid::format_positions();
        g.flip(pos.copy1[0]);
        g.flip(pos.copy1[4]);
        let (w, d, copy) = read_format_info(&g).unwrap();
        assert_eq!(w.mask.value(), 0);
        assert_eq!((d, copy), (0, 2));
    }

    #[test]
    fn orientation_consistency() {
        let g = hello(3);
        let direct = decode_grid(&g.transposed(), Orientation::Straight);
        let via = decode_grid(&g, Orientation::Transposed);
        assert_eq!(direct.map(|r| r.text), via.map(|r| r.text));
    }

    #[test]
    fn single_sided_grid_fails_as_double_sided() {
        let err = verify_double_sided(&hello(0), "HELLO", "WORLD").unwrap_err();
        assert_eq!(err.side(), Side::B);
    }
}
