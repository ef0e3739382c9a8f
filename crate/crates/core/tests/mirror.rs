//! End-to-end checks of the double-sided construction.

use duplex_qr::codec::Mode;
use duplex_qr::format::{EcLevel, MIDDLE_BIT};
use duplex_qr::grid::{data_placement_order, overlap_partition, ModuleGrid};
use duplex_qr::mirror::{
    brute_force_search, build_constraint_system, construct_double_sided, message_bits,
    mirror_format, side_views, solve_gf2, ConstructionError, FreeBitPolicy, Method, MirrorOptions,
};
use duplex_qr::verify::{decode_grid, read_format_info, verify_double_sided, Orientation};
use proptest::prelude::*;

fn analytic() -> MirrorOptions {
    MirrorOptions {
        method: Method::Analytic,
        ..MirrorOptions::default()
    }
}

fn cells(grid: &ModuleGrid) -> Vec<bool> {
    data_placement_order()
        .iter()
        .map(|&c| grid.get(c))
        .collect()
}

#[test]
fn selected_witness_reads_both_ways() {
    let f = mirror_format().unwrap();
    assert_eq!(f.witness_string(), "101100010001101");
    assert!(f.witness >> MIDDLE_BIT & 1 == 1);
    for (word, dist) in [
        (f.straight, f.straight_distance),
        (f.mirrored, f.mirrored_distance),
    ] {
        assert_eq!(word.ec, EcLevel::L);
        assert!(word.mask.is_symmetric());
        assert!(dist <= 3);
    }
}

#[test]
fn identical_numeric_messages_need_no_errors() {
    let (grid, report) = construct_double_sided("12345", "12345", &analytic()).unwrap();
    assert!(report.allocation.as_ref().unwrap().is_empty());
    assert!(report.side_a_corrections.is_empty());
    assert!(report.side_b_corrections.is_empty());
    let (a, b) = verify_double_sided(&grid, "12345", "12345").unwrap();
    assert!(a.corrected_bytes.is_empty() && b.corrected_bytes.is_empty());
}

#[test]
fn identical_alphanumeric_messages_still_decode() {
    let (grid, report) = construct_double_sided("HELLO", "HELLO", &analytic()).unwrap();
    // The mode indicator 0010 is not its own transpose, so at least one
    // codeword has to be sacrificed.
    assert!(!report.allocation.unwrap().is_empty());
    let (a, b) = verify_double_sided(&grid, "HELLO", "HELLO").unwrap();
    assert!(a.corrected_bytes.len() <= 3 && b.corrected_bytes.len() <= 3);
}

#[test]
fn five_by_five_is_feasible() {
    for (a, b) in [
        ("HARRY", "BOVIK"),
        ("ABCDE", "VWXYZ"),
        ("12345", "67890"),
        ("hello", "world"),
    ] {
        let (grid, _) =
            construct_double_sided(a, b, &analytic()).unwrap_or_else(|e| panic!("{a}/{b}: {e}"));
        verify_double_sided(&grid, a, b).unwrap();
    }
}

#[test]
fn solutions_satisfy_every_row() {
    let (_, report) = construct_double_sided("HARRY", "BOVIK", &analytic()).unwrap();
    let alloc = report.allocation.unwrap();
    let (_, a) = message_bits("HARRY", None, true).unwrap();
    let (_, b) = message_bits("BOVIK", None, true).unwrap();
    let cs = build_constraint_system(&a, &b, &mirror_format().unwrap(), &alloc).unwrap();
    for i in 0..cs.system.nrows() {
        assert!(
            cs.system.row(i).0.iter_ones().next().is_some(),
            "row {i} is empty"
        );
    }
    for policy in [FreeBitPolicy::Zeros, FreeBitPolicy::Random(7)] {
        let sol = solve_gf2(&cs.system, &policy).unwrap();
        assert!(cs.system.is_satisfied_by(&sol.assignment));
        assert_eq!(report.free_vars, Some(sol.free_variable_count));
    }
}

#[test]
fn mirrored_view_matches_the_transposed_decoder() {
    let (grid, _) = construct_double_sided("HARRY", "BOVIK", &analytic()).unwrap();
    let (view_a, view_b) = side_views(&mirror_format().unwrap()).unwrap();
    let x = cells(&grid);
    let straight = decode_grid(&grid, Orientation::Straight).unwrap();
    let transposed = decode_grid(&grid, Orientation::Transposed).unwrap();
    assert_eq!(view_a.read_codeword(&x).to_vec(), straight.codewords);
    assert_eq!(view_b.read_codeword(&x).to_vec(), transposed.codewords);
}

#[test]
fn brute_force_is_deterministic() {
    let f = mirror_format().unwrap();
    let (_, a) = message_bits("HI", None, true).unwrap();
    let (_, b) = message_bits("OK", None, true).unwrap();
    let run = || match brute_force_search(&a, &b, &f, 3000, 11).unwrap() {
        Ok(hit) => (Some(hit.trial), Some(hit.grid), None),
        Err(miss) => (None, None, miss.best),
    };
    assert_eq!(run(), run());
}

#[test]
fn brute_force_gives_up_on_long_pairs() {
    let f = mirror_format().unwrap();
    let (_, a) = message_bits("ABCDEFGHIJK", None, true).unwrap();
    let (_, b) = message_bits("LMNOPQRSTUV", None, true).unwrap();
    let miss = brute_force_search(&a, &b, &f, 200, 0).unwrap().unwrap_err();
    assert_eq!(miss.trials, 200);
    assert!(!miss.best.unwrap().within_budget());
}

#[test]
fn infeasible_pair_reports_capacity() {
    let err = construct_double_sided("ABCDEFGHIJK", "LMNOPQRSTUVW", &analytic()).unwrap_err();
    assert_eq!(err.stage(), "capacity");
    let ConstructionError::Infeasible(diag) = err else {
        unreachable!()
    };
    assert_eq!(diag.payload_bits, [78, 83]);
    assert_eq!(diag.allocations_tried, diag.allocations_total);
    assert!(diag.allocations_total > 0);
    assert_eq!(
        diag.conflicting_cells,
        overlap_partition(78, 83).unwrap().conflicts().len()
    );
}

#[test]
fn oversized_message_is_a_message_error() {
    let err = construct_double_sided(&"A".repeat(26), "B", &analytic()).unwrap_err();
    assert_eq!(err.stage(), "message");
}

#[test]
fn single_cell_flips_never_panic() {
    let (grid, _) = construct_double_sided("HARRY", "BOVIK", &analytic()).unwrap();
    for &c in data_placement_order() {
        let mut g = grid.clone();
        g.set(c, !g.get(c));
        for o in [Orientation::Straight, Orientation::Transposed] {
            let _ = decode_grid(&g, o);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn constructions_stay_within_budget(a in "[A-Z0-9 ]{1,8}", b in "[A-Z0-9 ]{1,8}") {
        let opts = MirrorOptions { mode_a: Some(Mode::Alphanumeric), mode_b: Some(Mode::Alphanumeric), ..analytic() };
        let (grid, report) = construct_double_sided(&a, &b, &opts).unwrap();
        prop_assert!(report.side_a_corrections.len() <= 3);
        prop_assert!(report.side_b_corrections.len() <= 3);
        let (_, d_straight, _) = read_format_info(&grid).unwrap();
        let (_, d_mirror, _) = read_format_info(&grid.transposed()).unwrap();
        prop_assert!(d_straight <= 3 && d_mirror <= 3);
        let (ra, rb) = verify_double_sided(&grid, &a, &b).unwrap();
        prop_assert_eq!(ra.mask_id, report.mask_id);
        prop_assert_eq!(rb.mask_id, report.mirrored_mask_id);
    }
}
