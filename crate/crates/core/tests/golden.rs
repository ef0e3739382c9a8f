//! Comparisons against frozen grids.
//!
//! `segno_*.txt` and `zxing_*.txt` grids come from independent encoders
//! (see scripts/reference_grids.py). The `.pbm` double-sided symbols were read
//! back by OpenCV and ZXing-C++ in both orientations before being frozen
//! (scripts/external_check.py).

use std::path::PathBuf;

use duplex_qr::codec::{Mode, Segment};
use duplex_qr::grid::{CellCoord, ModuleGrid, SIZE};
use duplex_qr::masks::MaskId;
use duplex_qr::mirror::{construct_double_sided, Method, MirrorOptions};
use duplex_qr::render::{parse_pbm, to_pbm};
use duplex_qr::symbol::encode_symbol;
use duplex_qr::verify::{decode_grid, verify_double_sided, Orientation};

fn golden(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn parse_text_grid(text: &str) -> ModuleGrid {
    let mut cells = [[false; SIZE]; SIZE];
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), SIZE);
    for (r, line) in rows.iter().enumerate() {
        assert_eq!(line.len(), SIZE);
        for (c, ch) in line.chars().enumerate() {
            cells[r][c] = ch == '1';
        }
    }
    ModuleGrid::from_cells(cells)
}

fn first_difference(a: &ModuleGrid, b: &ModuleGrid) -> Option<CellCoord> {
    (0..SIZE)
        .flat_map(|r| (0..SIZE).map(move |c| CellCoord::new(r, c).unwrap()))
        .find(|&c| a.get(c) != b.get(c))
}

#[test]
fn encoder_matches_reference_grids() {
    let mut checked = 0;
    for entry in std::fs::read_dir(golden("")).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_str().unwrap().to_string();
        let Some(stem) = ["segno_", "zxing_"]
            .iter()
            .find_map(|p| name.strip_prefix(p))
            .and_then(|s| s.strip_suffix(".txt"))
        else {
            continue;
        };
        let parts: Vec<&str> = stem.split('_').collect();
        let mode: Mode = parts[0].parse().unwrap();
        let mask = MaskId::new(parts[1].parse().unwrap()).unwrap();
        let bytes: Vec<u8> = (0..parts[2].len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&parts[2][i..i + 2], 16).unwrap())
            .collect();
        let text = String::from_utf8(bytes).unwrap();

        let expected = parse_text_grid(&std::fs::read_to_string(&path).unwrap());
        let ours = encode_symbol(&[Segment::new(mode, text.clone())], mask).unwrap();
        assert_eq!(first_difference(&ours, &expected), None, "{name}");
        let r = decode_grid(&expected, Orientation::Straight).unwrap();
        assert_eq!(r.text, text);
        assert_eq!(r.mask_id, mask);
        checked += 1;
    }
    assert!(checked >= 17, "only {checked} reference grids found");
}

fn check_double_sided(file: &str, a: &str, b: &str, options: &MirrorOptions) {
    let frozen = parse_pbm(&std::fs::read(golden(file)).unwrap()).unwrap();
    let (grid, _) = construct_double_sided(a, b, options).unwrap();
    assert_eq!(first_difference(&grid, &frozen), None, "{file} drifted");
    assert_eq!(to_pbm(&grid, 1, 4), std::fs::read(golden(file)).unwrap());
    let (ra, rb) = verify_double_sided(&frozen, a, b).unwrap();
    assert!(ra.corrected_bytes.len() <= 3 && rb.corrected_bytes.len() <= 3);
}

#[test]
fn harry_bovik_is_frozen() {
    check_double_sided(
        "harry_bovik.pbm",
        "HARRY",
        "BOVIK",
        &MirrorOptions::default(),
    );
}

#[test]
fn eight_eleven_pair_is_frozen() {
    check_double_sided(
        "double88_qr-code-v1l.pbm",
        "DOUBLE88",
        "QR-CODE-V1L",
        &MirrorOptions::default(),
    );
}

#[test]
fn brute_force_two_char_pair_is_frozen() {
    let options = MirrorOptions {
        method: Method::Brute,
        trials: 1_000_000,
        seed: 0,
        ..MirrorOptions::default()
    };
    let (_, report) = construct_double_sided("HI", "OK", &options).unwrap();
    assert_eq!(report.trials, Some(317_538));
    check_double_sided("hi_ok_brute_seed0.pbm", "HI", "OK", &options);
}
