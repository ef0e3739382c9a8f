//! The eight data masks and how they behave under transposition.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::grid::CellCoord;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct MaskId(u8);

impl MaskId {
    pub fn new(id: u8) -> Option<Self> {
        (id < 8).then_some(MaskId(id))
    }

    pub fn all() -> impl Iterator<Item = MaskId> {
        (0..8).map(MaskId)
    }

    pub fn value(self) -> u8 {
        self.0
    }

    /// True when the mask reads the same on the reflected grid.
    pub fn is_symmetric(self) -> bool {
        matches!(self.0, 0 | 3 | 5 | 6 | 7)
    }
}

impl TryFrom<u8> for MaskId {
    type Error = String;

    fn try_from(v: u8) -> Result<Self, Self::Error> {
        MaskId::new(v).ok_or_else(|| format!("mask id {v} out of range 0..=7"))
    }
}

impl From<MaskId> for u8 {
    fn from(m: MaskId) -> u8 {
        m.0
    }
}

impl fmt::Debug for MaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MaskId({})", self.0)
    }
}

impl fmt::Display for MaskId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Whether mask `m` inverts the module at `c`.
pub fn mask_bit(m: MaskId, c: CellCoord) -> bool {
    let (i, j) = (c.row(), c.col());
    match m.0 {
        0 => (i + j) % 2 == 0,
        1 => i % 2 == 0,
        2 => j % 3 == 0,
        3 => (i + j) % 3 == 0,
        4 => (i / 2 + j / 3) % 2 == 0,
        5 => (i * j) % 2 + (i * j) % 3 == 0,
        6 => ((i * j) % 2 + (i * j) % 3) % 2 == 0,
        7 => ((i + j) % 2 + (i * j) % 3) % 2 == 0,
        _ => unreachable!("MaskId is always < 8"),
    }
}

/// Masks whose pattern equals its own transpose over the full matrix.
pub fn symmetric_masks() -> Vec<MaskId> {
    MaskId::all()
        .filter(|&m| all_coords().all(|c| mask_bit(m, c) == mask_bit(m, c.transpose())))
        .collect()
}

fn all_coords() -> impl Iterator<Item = CellCoord> {
    (0..crate::grid::SIZE)
        .flat_map(|r| (0..crate::grid::SIZE).map(move |c| CellCoord::new(r, c).unwrap()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(r: usize, c: usize) -> CellCoord {
        CellCoord::new(r, c).unwrap()
    }

    #[test]
    fn mask_zero_checkerboard() {
        let m0 = MaskId::new(0).unwrap();
        assert!(mask_bit(m0, at(0, 0)));
        assert!(!mask_bit(m0, at(0, 1)));
    }

    #[test]
    fn mask_one_depends_on_row_only() {
        let m1 = MaskId::new(1).unwrap();
        let first = mask_bit(m1, at(5, 0));
        assert!((0..21).all(|c| mask_bit(m1, at(5, c)) == first));
    }

    #[test]
    fn five_symmetric_masks() {
        let sym = symmetric_masks();
        assert_eq!(sym.len(), 5);
        assert!(sym.contains(&MaskId::new(0).unwrap()));
        assert!(!sym.contains(&MaskId::new(1).unwrap()));
        for m in MaskId::all() {
            assert_eq!(m.is_symmetric(), sym.contains(&m), "mask {m}");
        }
    }

    #[test]
    fn asymmetric_masks_differ_somewhere() {
        for m in MaskId::all().filter(|m| !m.is_symmetric()) {
            assert!(all_coords().any(|c| mask_bit(m, c) != mask_bit(m, c.transpose())));
        }
    }

    #[test]
    fn out_of_range_id_rejected() {
        assert!(MaskId::new(8).is_none());
        assert!(MaskId::try_from(9u8).is_err());
    }
}
