//! Text renderings of a grid: ASCII art, plain PBM (P1) and SVG, plus a
//! PBM reader for round trips and for exchanging images with other tools.

use std::fmt::Write as _;

use thiserror::Error;

use crate::grid::{ModuleGrid, SIZE};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PbmError {
    #[error("not a plain PBM stream (expected magic P1)")]
    BadMagic,
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("unexpected byte {0:?} in raster")]
    BadPixel(char),
    #[error("raster has {found} pixels, header declares {expected}")]
    WrongPixelCount { expected: usize, found: usize },
    #[error("image is {width}x{height}, expected a square")]
    NotSquare { width: usize, height: usize },
    #[error("no dark modules found")]
    Empty,
    #[error("symbol spans {0} pixels, not a multiple of {SIZE}")]
    Indivisible(usize),
}

/// Two characters per module; `quiet` light modules of border on each side.
pub fn to_ascii(grid: &ModuleGrid, quiet: usize) -> String {
    let side = SIZE + 2 * quiet;
    let mut out = String::with_capacity(side * (2 * side + 1));
    for r in 0..side {
        for c in 0..side {
            out.push_str(if module_at(grid, quiet, r, c) {
                "##"
            } else {
                "  "
            });
        }
        out.push('\n');
    }
    out
}

fn module_at(grid: &ModuleGrid, quiet: usize, r: usize, c: usize) -> bool {
    let inside = |v: usize| v >= quiet && v < quiet + SIZE;
    inside(r) && inside(c) && grid.cells()[r - quiet][c - quiet]
}

/// Plain PBM, dark = 1. Each raster row starts a new line; rows wider than
/// 70 pixels wrap to stay within the format's line length.
pub fn to_pbm(grid: &ModuleGrid, scale: usize, quiet: usize) -> Vec<u8> {
    assert!(scale >= 1, "scale must be at least 1");
    let side = (SIZE + 2 * quiet) * scale;
    let mut out = format!("P1\n{side} {side}\n");
    for y in 0..side {
        let row: String = (0..side)
            .map(|x| {
                if module_at(grid, quiet, y / scale, x / scale) {
                    '1'
                } else {
                    '0'
                }
            })
            .collect();
        for chunk in row.as_bytes().chunks(70) {
            out.push_str(std::str::from_utf8(chunk).unwrap());
            out.push('\n');
        }
    }
    out.into_bytes()
}

fn tokens(bytes: &[u8]) -> impl Iterator<Item = (usize, &[u8])> {
    // Header tokens: whitespace separated, `#` comments to end of line.
    let mut pos = 0;
    std::iter::from_fn(move || {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        if pos >= bytes.len() {
            return None;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() && bytes[pos] != b'#' {
            pos += 1;
        }
        Some((pos, &bytes[start..pos]))
    })
}

/// Read a plain PBM and sample it back into a module grid.
///
/// The symbol is located by the bounding box of dark pixels (the three
/// finders pin its corners), so any quiet zone width is accepted. Each
/// module becomes dark when most of its pixels are.
pub fn parse_pbm(bytes: &[u8]) -> Result<ModuleGrid, PbmError> {
    let mut toks = tokens(bytes);
    let (_, magic) = toks.next().ok_or(PbmError::BadMagic)?;
    if magic != b"P1" {
        return Err(PbmError::BadMagic);
    }
    let mut dim = || -> Result<(usize, usize), PbmError> {
        let (end, t) = toks
            .next()
            .ok_or_else(|| PbmError::BadHeader("missing dimension".into()))?;
        let v = std::str::from_utf8(t)
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| {
                PbmError::BadHeader(format!("bad dimension {:?}", String::from_utf8_lossy(t)))
            })?;
        Ok((end, v))
    };
    let (_, width) = dim()?;
    let (raster_start, height) = dim()?;
    if width != height {
        return Err(PbmError::NotSquare { width, height });
    }

    let mut pixels = Vec::with_capacity(width * height);
    let mut in_comment = false;
    for &b in &bytes[raster_start..] {
        match b {
            b'\n' | b'\r' => in_comment = false,
            _ if in_comment => {}
            b'#' => in_comment = true,
            b'0' => pixels.push(false),
            b'1' => pixels.push(true),
            b if b.is_ascii_whitespace() => {}
            other => return Err(PbmError::BadPixel(other as char)),
        }
    }
    if pixels.len() != width * height {
        return Err(PbmError::WrongPixelCount {
            expected: width * height,
            found: pixels.len(),
        });
    }

    let px = |x: usize, y: usize| pixels[y * width + x];
    let (mut min_x, mut min_y, mut max_x, mut max_y) = (usize::MAX, usize::MAX, 0, 0);
    for y in 0..height {
        for x in 0..width {
            if px(x, y) {
                min_x = min_x.min(x);
                min_y = min_y.min(y);
                max_x = max_x.max(x);
                max_y = max_y.max(y);
            }
        }
    }
    if min_x == usize::MAX {
        return Err(PbmError::Empty);
    }
    let span_x = max_x - min_x + 1;
    let span_y = max_y - min_y + 1;
    if span_x != span_y {
        return Err(PbmError::NotSquare {
            width: span_x,
            height: span_y,
        });
    }
    if span_x % SIZE != 0 {
        return Err(PbmError::Indivisible(span_x));
    }
    let scale = span_x / SIZE;
    let mut cells = [[false; SIZE]; SIZE];
    for (r, row) in cells.iter_mut().enumerate() {
        for (c, cell) in row.iter_mut().enumerate() {
            let mut dark = 0;
            for dy in 0..scale {
                for dx in 0..scale {
                    dark += px(min_x + c * scale + dx, min_y + r * scale + dy) as usize;
                }
            }
            *cell = 2 * dark > scale * scale;
        }
    }
    Ok(ModuleGrid::from_cells(cells))
}

/// SVG 1.1 with one unit square per dark module and a `quiet`-module border
/// inside the view box.
pub fn to_svg(grid: &ModuleGrid, quiet: usize) -> String {
    let side = SIZE + 2 * quiet;
    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    let _ = writeln!(
        out,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" viewBox=\"0 0 {side} {side}\" shape-rendering=\"crispEdges\">"
    );
    for (r, row) in grid.cells().iter().enumerate() {
        for (c, &dark) in row.iter().enumerate() {
            if dark {
                let _ = writeln!(
                    out,
                    "  <rect x=\"{}\" y=\"{}\" width=\"1\" height=\"1\"/>",
                    c + quiet,
                    r + quiet
                );
            }
        }
    }
    out.push_str("</svg>\n");
    out
}
