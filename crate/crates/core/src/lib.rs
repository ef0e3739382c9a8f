//! Double-sided QR codes: Version 1-L symbols that decode to one message as
//! printed and to another when the grid is transposed (viewed from behind
//! and rotated).
//!
//! The building blocks are an ordinary Version 1-L encoder and decoder
//! ([`codec`], [`rscode`], [`symbol`], [`verify`]) plus the pieces that make
//! a grid readable both ways: the cell geometry in [`grid`], a format word
//! that reads acceptably reversed ([`format`]), and the GF(2) constructions
//! in [`mirror`].

pub mod codec;
pub mod format;
pub mod gf2;
pub mod grid;
pub mod masks;
pub mod mirror;
pub mod render;
pub mod rscode;
pub mod symbol;
pub mod verify;

pub use codec::{Mode, Segment};
pub use format::{EcLevel, FormatWord, MirrorFormat};
pub use grid::{CellCoord, ModuleGrid};
pub use masks::MaskId;
pub use verify::{decode_grid, verify_double_sided, DecodeReport, Orientation, Side};
