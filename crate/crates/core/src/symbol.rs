//! Reading and writing codeword bits and format words on a grid, plus the
//! ordinary single-sided Version 1-L encoder.

use crate::codec::{assemble_payload, CodecError, Segment};
use crate::format::{EcLevel, FormatWord};
use crate::gf2::BitVec;
use crate::grid::{
    data_placement_order, format_positions, function_pattern_grid, ModuleGrid, REGION_BITS,
};
use crate::masks::{mask_bit, MaskId};
use crate::rscode::{bytes_to_bits, rs_codeword, DATA_CODEWORDS};

/// Draw a 15-bit on-grid word into both format areas.
pub fn write_format(grid: &mut ModuleGrid, word: u16) {
    let pos = format_positions();
    for k in 0..15 {
        let bit = (word >> (14 - k)) & 1 == 1;
        grid.set(pos.copy1[k], bit);
        grid.set(pos.copy2[k], bit);
    }
}

/// The two drawn format words, copy 1 first.
pub fn read_format(grid: &ModuleGrid) -> (u16, u16) {
    let pos = format_positions();
    let read = |cells: &[crate::grid::CellCoord; 15]| {
        cells
            .iter()
            .fold(0u16, |acc, &c| (acc << 1) | grid.get(c) as u16)
    };
    (read(&pos.copy1), read(&pos.copy2))
}

/// Place 208 codeword bits in zigzag order, applying `mask`.
pub fn write_codeword_bits(grid: &mut ModuleGrid, bits: &BitVec, mask: MaskId) {
    assert_eq!(bits.len(), REGION_BITS);
    for (i, &c) in data_placement_order().iter().enumerate() {
        grid.set(c, bits.get(i) ^ mask_bit(mask, c));
    }
}

/// Read 208 codeword bits in zigzag order, removing `mask`.
pub fn read_codeword_bits(grid: &ModuleGrid, mask: MaskId) -> BitVec {
    let mut out = BitVec::zeros(REGION_BITS);
    for (i, &c) in data_placement_order().iter().enumerate() {
        if grid.get(c) ^ mask_bit(mask, c) {
            out.set(i, true);
        }
    }
    out
}

/// Encode `segments` as an ordinary Version 1-L symbol with the given mask.
pub fn encode_symbol(segments: &[Segment], mask: MaskId) -> Result<ModuleGrid, CodecError> {
    let payload = assemble_payload(segments, true)?;
    let data: [u8; DATA_CODEWORDS] = payload
        .bits
        .to_bytes()
        .try_into()
        .expect("padded payload is 19 bytes");
    let bits = bytes_to_bits(&rs_codeword(&data));
    let mut grid = function_pattern_grid();
    write_codeword_bits(&mut grid, &bits, mask);
    write_format(&mut grid, FormatWord::new(EcLevel::L, mask).on_grid());
    Ok(grid)
}
