//! Version 1 matrix geometry.
//!
//! Everything here is fixed by the symbol size: the function patterns, the
//! zigzag order in which codeword bits are laid out, the two copies of the
//! format information and the reflection about the main diagonal that turns
//! the straight reading into the mirrored one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Modules per side of a Version 1 symbol.
pub const SIZE: usize = 21;
/// Payload bits in a Version 1-L symbol (19 codewords).
pub const DATA_BITS: usize = 152;
/// Error correction bits in a Version 1-L symbol (7 codewords).
pub const ECC_BITS: usize = 56;
/// Cells that carry codeword bits.
pub const REGION_BITS: usize = DATA_BITS + ECC_BITS;
/// The always-dark module.
pub const DARK_MODULE: CellCoord = CellCoord { row: 13, col: 8 };

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GridError {
    #[error("payload length {0} exceeds {DATA_BITS} bits")]
    PayloadTooLong(usize),
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellCoord {
    pub row: u8,
    pub col: u8,
}

impl CellCoord {
    pub fn new(row: usize, col: usize) -> Option<Self> {
        (row < SIZE && col < SIZE).then_some(CellCoord {
            row: row as u8,
            col: col as u8,
        })
    }

    pub const fn transpose(self) -> Self {
        CellCoord {
            row: self.col,
            col: self.row,
        }
    }

    pub fn row(self) -> usize {
        self.row as usize
    }

    pub fn col(self) -> usize {
        self.col as usize
    }
}

impl fmt::Debug for CellCoord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.row, self.col)
    }
}

/// Reflection about the main diagonal.
pub fn transpose_map(c: CellCoord) -> CellCoord {
    c.transpose()
}

/// A 21×21 module matrix. `true` is dark.
///
/// `fixed` marks function patterns and both format areas; the remaining 208
/// cells form the data region.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ModuleGrid {
    cells: [[bool; SIZE]; SIZE],
    fixed: [[bool; SIZE]; SIZE],
}

impl ModuleGrid {
    /// All-light grid with the Version 1 fixity template.
    pub fn blank() -> Self {
        ModuleGrid {
            cells: [[false; SIZE]; SIZE],
            fixed: template().fixed,
        }
    }

    pub fn from_cells(cells: [[bool; SIZE]; SIZE]) -> Self {
        ModuleGrid {
            cells,
            fixed: template().fixed,
        }
    }

    pub fn get(&self, c: CellCoord) -> bool {
        self.cells[c.row()][c.col()]
    }

    pub fn set(&mut self, c: CellCoord, dark: bool) {
        self.cells[c.row()][c.col()] = dark;
    }

    pub fn flip(&mut self, c: CellCoord) {
        self.cells[c.row()][c.col()] ^= true;
    }

    pub fn is_fixed(&self, c: CellCoord) -> bool {
        self.fixed[c.row()][c.col()]
    }

    pub fn cells(&self) -> &[[bool; SIZE]; SIZE] {
        &self.cells
    }

    /// The grid as seen after reflection about the main diagonal.
    pub fn transposed(&self) -> Self {
        let mut out = self.clone();
        for r in 0..SIZE {
            for c in 0..SIZE {
                out.cells[r][c] = self.cells[c][r];
            }
        }
        out
    }

    pub fn dark_count(&self) -> usize {
        self.cells.iter().flatten().filter(|&&b| b).count()
    }

    /// Cells whose value differs from the function-pattern template
    /// (format areas are not checked).
    pub fn function_pattern_mismatches(&self) -> Vec<CellCoord> {
        let t = template();
        all_cells()
            .filter(|&c| t.role(c) == CellRole::Function && self.get(c) != t.get(c))
            .collect()
    }

    /// Overwrite every function-pattern cell with the template value.
    pub fn stamp_function_patterns(&mut self) {
        let t = template();
        for c in all_cells() {
            if t.role(c) == CellRole::Function {
                self.set(c, t.get(c));
            }
        }
    }
}

impl fmt::Debug for ModuleGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.cells {
            let line: String = row.iter().map(|&b| if b { '#' } else { '.' }).collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum CellRole {
    Function,
    Format,
    Data,
}

struct Template {
    grid: ModuleGrid,
    roles: [[CellRole; SIZE]; SIZE],
    fixed: [[bool; SIZE]; SIZE],
}

impl Template {
    fn role(&self, c: CellCoord) -> CellRole {
        self.roles[c.row()][c.col()]
    }

    fn get(&self, c: CellCoord) -> bool {
        self.grid.get(c)
    }
}

/// Every cell of the grid, row by row.
pub fn all_cells() -> impl Iterator<Item = CellCoord> {
    (0..SIZE).flat_map(|r| (0..SIZE).map(move |c| CellCoord::new(r, c).unwrap()))
}

fn template() -> &'static Template {
    static TEMPLATE: OnceLock<Template> = OnceLock::new();
    TEMPLATE.get_or_init(|| {
        let mut cells = [[false; SIZE]; SIZE];
        let mut roles = [[CellRole::Data; SIZE]; SIZE];

        // Finders plus their one-module separators.
        for (r0, c0) in [(0usize, 0usize), (0, SIZE - 7), (SIZE - 7, 0)] {
            for dr in -1i32..=7 {
                for dc in -1i32..=7 {
                    let (r, c) = (r0 as i32 + dr, c0 as i32 + dc);
                    if !(0..SIZE as i32).contains(&r) || !(0..SIZE as i32).contains(&c) {
                        continue;
                    }
                    let (r, c) = (r as usize, c as usize);
                    let dist = (dr - 3).abs().max((dc - 3).abs());
                    cells[r][c] = dist != 2 && dist != 4;
                    roles[r][c] = CellRole::Function;
                }
            }
        }
        // Timing patterns.
        for i in 8..SIZE - 8 {
            cells[6][i] = i % 2 == 0;
            cells[i][6] = i % 2 == 0;
            roles[6][i] = CellRole::Function;
            roles[i][6] = CellRole::Function;
        }
        cells[DARK_MODULE.row()][DARK_MODULE.col()] = true;
        roles[DARK_MODULE.row()][DARK_MODULE.col()] = CellRole::Function;

        let positions = format_positions();
        for c in positions.copy1.iter().chain(positions.copy2.iter()) {
            roles[c.row()][c.col()] = CellRole::Format;
        }

        let mut fixed = [[false; SIZE]; SIZE];
        for r in 0..SIZE {
            for c in 0..SIZE {
                fixed[r][c] = roles[r][c] != CellRole::Data;
            }
        }
        Template {
            grid: ModuleGrid { cells, fixed },
            roles,
            fixed,
        }
    })
}

/// The Version 1 template: finders, separators, timing patterns and the dark
/// module drawn; format areas fixed but light; the data region light.
pub fn function_pattern_grid() -> ModuleGrid {
    template().grid.clone()
}

/// Whether `c` is one of the 208 data-region cells.
pub fn is_data_cell(c: CellCoord) -> bool {
    template().role(c) == CellRole::Data
}

/// Whether `c` belongs to either copy of the format information.
pub fn is_format_cell(c: CellCoord) -> bool {
    template().role(c) == CellRole::Format
}

/// Whether `c` belongs to a finder, separator, timing pattern or the dark module.
pub fn is_function_cell(c: CellCoord) -> bool {
    template().role(c) == CellRole::Function
}

struct Placement {
    order: Vec<CellCoord>,
    index: [[Option<u8>; SIZE]; SIZE],
}

fn placement() -> &'static Placement {
    static PLACEMENT: OnceLock<Placement> = OnceLock::new();
    PLACEMENT.get_or_init(|| {
        let mut order = Vec::with_capacity(REGION_BITS);
        // Two-column strips from the right edge, alternating upward and
        // downward, stepping over the vertical timing column.
        let mut right = SIZE as i32 - 1;
        let mut upward = true;
        while right >= 1 {
            if right == 6 {
                right = 5;
            }
            for step in 0..SIZE {
                let row = if upward { SIZE - 1 - step } else { step };
                for col in [right as usize, right as usize - 1] {
                    let c = CellCoord::new(row, col).unwrap();
                    if is_data_cell(c) {
                        order.push(c);
                    }
                }
            }
            upward = !upward;
            right -= 2;
        }
        assert_eq!(order.len(), REGION_BITS);
        let mut index = [[None; SIZE]; SIZE];
        for (i, c) in order.iter().enumerate() {
            index[c.row()][c.col()] = Some(i as u8);
        }
        Placement { order, index }
    })
}

/// Data-region cells in codeword bit order: indices `0..152` hold the
/// payload codewords MSB first, `152..208` the error correction codewords.
pub fn data_placement_order() -> &'static [CellCoord] {
    &placement().order
}

/// Inverse of [`data_placement_order`].
pub fn placement_index(c: CellCoord) -> Option<usize> {
    placement().index[c.row()][c.col()].map(usize::from)
}

/// Bit index, in the mirrored reading, of the bit stored at grid cell `c`.
pub fn mirrored_index(c: CellCoord) -> Option<usize> {
    placement_index(c.transpose())
}

/// Grid cells of the two format copies, each listed from bit 14 down to bit 0
/// so that element `k` holds character `k` of the 15-bit string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormatPositions {
    pub copy1: [CellCoord; 15],
    pub copy2: [CellCoord; 15],
}

#[allow(clippy::needless_range_loop)]
pub fn format_positions() -> FormatPositions {
    let at = |r: usize, c: usize| CellCoord::new(r, c).unwrap();
    // Indexed by bit number first, then reversed to MSB-first.
    let mut copy1 = [at(0, 0); 15];
    let mut copy2 = [at(0, 0); 15];
    for i in 0..6 {
        copy1[i] = at(i, 8);
    }
    copy1[6] = at(7, 8);
    copy1[7] = at(8, 8);
    copy1[8] = at(8, 7);
    for i in 9..15 {
        copy1[i] = at(8, 14 - i);
    }
    for i in 0..8 {
        copy2[i] = at(8, SIZE - 1 - i);
    }
    for i in 8..15 {
        copy2[i] = at(SIZE - 15 + i, 8);
    }
    copy1.reverse();
    copy2.reverse();
    FormatPositions { copy1, copy2 }
}

/// Zones of the overlap between the straight and mirrored layouts.
///
/// With P = payload prefix and E = error correction region of each side:
/// `a` = P_A ∩ P_B, `b` = P_A only, `c` = P_A ∩ E_B, `d` = P_B only,
/// `e` = P_B ∩ E_A, `f` = E_A only, `g` = none, `h` = E_B only,
/// `i` = E_A ∩ E_B. Zones `a`, `c`, `e` and `i` are constrained by both sides.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Zone {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
}

impl Zone {
    pub const ALL: [Zone; 9] = [
        Zone::A,
        Zone::B,
        Zone::C,
        Zone::D,
        Zone::E,
        Zone::F,
        Zone::G,
        Zone::H,
        Zone::I,
    ];
    pub const CONFLICTING: [Zone; 4] = [Zone::A, Zone::C, Zone::E, Zone::I];

    pub fn is_conflicting(self) -> bool {
        Zone::CONFLICTING.contains(&self)
    }

    pub fn label(self) -> char {
        (b'a' + self as u8) as char
    }
}

/// A cell constrained by both readings.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConflictCell {
    pub cell: CellCoord,
    pub zone: Zone,
    pub side_a_bit: usize,
    pub side_b_bit: usize,
}

impl ConflictCell {
    pub fn side_a_byte(&self) -> usize {
        self.side_a_bit / 8
    }

    pub fn side_b_byte(&self) -> usize {
        self.side_b_bit / 8
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapPartition {
    pub len_a: usize,
    pub len_b: usize,
    zones: BTreeMap<Zone, Vec<CellCoord>>,
    conflicts: Vec<ConflictCell>,
}

impl OverlapPartition {
    pub fn zone(&self, z: Zone) -> &[CellCoord] {
        self.zones.get(&z).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn zone_of(&self, c: CellCoord) -> Option<Zone> {
        self.zones
            .iter()
            .find(|(_, cells)| cells.contains(&c))
            .map(|(z, _)| *z)
    }

    pub fn conflicts(&self) -> &[ConflictCell] {
        &self.conflicts
    }

    /// Side-A codeword indices touched by a conflicting cell.
    pub fn conflict_bytes_a(&self) -> BTreeSet<usize> {
        self.conflicts
            .iter()
            .map(ConflictCell::side_a_byte)
            .collect()
    }

    /// Side-B codeword indices touched by a conflicting cell.
    pub fn conflict_bytes_b(&self) -> BTreeSet<usize> {
        self.conflicts
            .iter()
            .map(ConflictCell::side_b_byte)
            .collect()
    }

    /// Cells whose payload bits are pinned by both sides.
    pub fn payload_intersection(&self) -> usize {
        self.zone(Zone::A).len()
    }
}

/// Classify the data region against payload prefixes of `len_a` bits read
/// straight and `len_b` bits read mirrored.
pub fn overlap_partition(len_a: usize, len_b: usize) -> Result<OverlapPartition, GridError> {
    for len in [len_a, len_b] {
        if len > DATA_BITS {
            return Err(GridError::PayloadTooLong(len));
        }
    }
    let mut zones: BTreeMap<Zone, Vec<CellCoord>> =
        Zone::ALL.iter().map(|&z| (z, Vec::new())).collect();
    let mut conflicts = Vec::new();
    for (a_bit, &cell) in data_placement_order().iter().enumerate() {
        let b_bit = mirrored_index(cell).expect("data region is closed under transposition");
        let payload_a = a_bit < len_a;
        let ecc_a = a_bit >= DATA_BITS;
        let payload_b = b_bit < len_b;
        let ecc_b = b_bit >= DATA_BITS;
        let zone = match (payload_a, ecc_a, payload_b, ecc_b) {
            (true, _, true, _) => Zone::A,
            (true, _, _, true) => Zone::C,
            (true, _, _, _) => Zone::B,
            (_, true, true, _) => Zone::E,
            (_, true, _, true) => Zone::I,
            (_, true, _, _) => Zone::F,
            (_, _, true, _) => Zone::D,
            (_, _, _, true) => Zone::H,
            _ => Zone::G,
        };
        zones.get_mut(&zone).unwrap().push(cell);
        if zone.is_conflicting() {
            conflicts.push(ConflictCell {
                cell,
                zone,
                side_a_bit: a_bit,
                side_b_bit: b_bit,
            });
        }
    }
    Ok(OverlapPartition {
        len_a,
        len_b,
        zones,
        conflicts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(r: usize, c: usize) -> CellCoord {
        CellCoord::new(r, c).unwrap()
    }

    #[test]
    fn template_dimensions_and_region() {
        let g = function_pattern_grid();
        assert_eq!(g.cells().len(), 21);
        assert!(g.cells().iter().all(|r| r.len() == 21));
        let free = all_cells().filter(|&c| !g.is_fixed(c)).count();
        assert_eq!(free, 208);
        assert!(g.get(DARK_MODULE));
        assert_eq!(DARK_MODULE, at(13, 8));
    }

    #[test]
    fn finder_shape() {
        let g = function_pattern_grid();
        let rows: Vec<String> = (0..8)
            .map(|r| {
                (0..8)
                    .map(|c| if g.get(at(r, c)) { '#' } else { '.' })
                    .collect()
            })
            .collect();
        assert_eq!(
            rows,
            [
                "#######.", "#.....#.", "#.###.#.", "#.###.#.", "#.###.#.", "#.....#.", "#######.",
                "........"
            ]
        );
    }

    #[test]
    fn timing_alternates() {
        let g = function_pattern_grid();
        for i in 8..13 {
            assert_eq!(g.get(at(6, i)), i % 2 == 0);
            assert_eq!(g.get(at(i, 6)), i % 2 == 0);
        }
    }

    #[test]
    fn placement_starts_bottom_right_and_skips_timing_column() {
        let order = data_placement_order();
        assert_eq!(order.len(), 208);
        assert_eq!(order[0], at(20, 20));
        assert_eq!(order[1], at(20, 19));
        assert_eq!(order[2], at(19, 20));
        assert!(order.iter().all(|c| c.col != 6));
        let unique: BTreeSet<_> = order.iter().collect();
        assert_eq!(unique.len(), 208);
    }

    #[test]
    fn transpose_examples() {
        assert_eq!(transpose_map(at(0, 0)), at(0, 0));
        assert_eq!(transpose_map(at(13, 8)), at(8, 13));
        assert_eq!(transpose_map(at(20, 0)), at(0, 20));
    }

    #[test]
    fn format_copy1_maps_onto_itself_reversed() {
        let p = format_positions();
        for k in 0..15 {
            assert_eq!(p.copy1[k].transpose(), p.copy1[14 - k]);
        }
    }

    #[test]
    fn format_copy2_maps_onto_itself_reversed_except_dark_module() {
        let p = format_positions();
        for k in 0..15 {
            if k == 7 {
                assert_eq!(p.copy2[k].transpose(), DARK_MODULE);
            } else {
                assert_eq!(p.copy2[k].transpose(), p.copy2[14 - k]);
            }
        }
        // Character 7 of the string is bit index 7, the middle bit.
        assert_eq!(
            p.copy2.iter().position(|&c| c == DARK_MODULE.transpose()),
            Some(7)
        );
        let distinct: BTreeSet<_> = p.copy1.iter().chain(p.copy2.iter()).collect();
        assert_eq!(distinct.len(), 30);
    }

    #[test]
    fn overlap_counts() {
        let full = overlap_partition(152, 152).unwrap();
        assert_eq!(full.zone(Zone::A).len(), 100);
        let short = overlap_partition(41, 41).unwrap();
        assert_eq!(short.payload_intersection(), 4);
        let empty = overlap_partition(0, 0).unwrap();
        for z in [Zone::A, Zone::B, Zone::C, Zone::D, Zone::E] {
            assert!(empty.zone(z).is_empty());
        }
        assert!(!empty.zone(Zone::I).is_empty());
        assert_eq!(
            overlap_partition(153, 0).unwrap_err(),
            GridError::PayloadTooLong(153)
        );
    }

    #[test]
    fn short_payload_intersection_is_the_mode_indicator() {
        let p = overlap_partition(41, 41).unwrap();
        let mut pairs: Vec<_> = p
            .conflicts()
            .iter()
            .filter(|c| c.zone == Zone::A)
            .map(|c| (c.side_a_bit, c.side_b_bit))
            .collect();
        pairs.sort();
        assert_eq!(pairs, vec![(0, 0), (1, 2), (2, 1), (3, 3)]);
    }

    #[test]
    fn zone_equations_hold() {
        let p = overlap_partition(41, 41).unwrap();
        let set = |zs: &[Zone]| -> BTreeSet<CellCoord> {
            zs.iter().flat_map(|&z| p.zone(z).iter().copied()).collect()
        };
        let order = data_placement_order();
        let data_a: BTreeSet<_> = order[..DATA_BITS].iter().copied().collect();
        let data_b: BTreeSet<_> = order[..DATA_BITS].iter().map(|c| c.transpose()).collect();
        let ecc_a: BTreeSet<_> = order[DATA_BITS..].iter().copied().collect();
        let ecc_b: BTreeSet<_> = order[DATA_BITS..].iter().map(|c| c.transpose()).collect();
        use Zone::*;
        assert_eq!(set(&[A, B, C, D, G, H]), data_a);
        assert_eq!(set(&[A, D, E, B, G, F]), data_b);
        assert_eq!(set(&[F, I, E]), ecc_a);
        assert_eq!(set(&[H, I, C]), ecc_b);
    }
}
