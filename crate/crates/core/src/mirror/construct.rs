//! End-to-end construction of a double-sided symbol.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codec::{encode_segment, pad_to_capacity, BitString, CodecError, Mode, Segment};
use crate::format::{build_flip_graph, select_mirror_format, Domain, FormatError, MirrorFormat};
use crate::grid::{overlap_partition, DATA_BITS, REGION_BITS};
use crate::masks::MaskId;
use crate::rscode::{bytes_to_bits, rs_codeword, DATA_CODEWORDS};
use crate::verify::{verify_double_sided, DecodeReport, Side, VerifyError};
use crate::ModuleGrid;

use super::alloc::enumerate_error_allocations;
use super::brute::{brute_force_search, grid_from_cells, Damage};
use super::solve::{solve_gf2, FreeBitPolicy};
use super::system::{
    build_constraint_system, side_views, ErrorAllocation, FeasibilityScreen, SystemError,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Analytic,
    Brute,
    /// Analytic first, brute force if no allocation works.
    #[default]
    Auto,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Analytic => "analytic",
            Method::Brute => "brute",
            Method::Auto => "auto",
        })
    }
}

/// Values given to cells the constraints leave free.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FillPolicy {
    /// Side A's ordinary encoding (terminator, fill bytes and parity).
    #[default]
    Standard,
    Zeros,
    Random(u64),
}

#[derive(Clone, Debug)]
pub struct MirrorOptions {
    pub method: Method,
    /// Encoding mode per side; `None` picks the most compact one.
    pub mode_a: Option<Mode>,
    pub mode_b: Option<Mode>,
    /// Pin up to four zero bits after each message, so decoders that keep
    /// reading segments stop cleanly.
    pub terminator: bool,
    pub fill: FillPolicy,
    pub trials: u64,
    pub seed: u64,
    /// Stop the analytic search after this many allocations.
    pub max_allocations: Option<usize>,
}

impl Default for MirrorOptions {
    fn default() -> Self {
        MirrorOptions {
            method: Method::Auto,
            mode_a: None,
            mode_b: None,
            terminator: true,
            fill: FillPolicy::Standard,
            trials: 100_000,
            seed: 0,
            max_allocations: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstructionReport {
    pub method: Method,
    pub format_witness: String,
    /// Mask of the straight reading.
    pub mask_id: MaskId,
    pub mirrored_mask_id: MaskId,
    pub format_distances: [u32; 2],
    pub modes: [Mode; 2],
    pub payload_bits: [usize; 2],
    pub allocation: Option<ErrorAllocation>,
    pub allocations_tried: usize,
    pub free_vars: Option<usize>,
    pub trials: Option<u64>,
    pub side_a_corrections: Vec<usize>,
    pub side_b_corrections: Vec<usize>,
}

/// Why a construction stopped.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub payload_bits: [usize; 2],
    pub conflicting_cells: usize,
    /// Allocations examined by the analytic search (0 if it did not run).
    pub allocations_tried: usize,
    pub allocations_total: usize,
    /// Brute-force trials run (0 if it did not run).
    pub trials: u64,
    pub best_damage: Option<Damage>,
    /// Last verification failure of an otherwise consistent candidate.
    pub verification: Option<String>,
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "payloads of {} and {} bits, {} conflicting cells",
            self.payload_bits[0], self.payload_bits[1], self.conflicting_cells
        )?;
        if self.allocations_total > 0 {
            write!(
                f,
                "; no consistent error allocation among {} of {} tried",
                self.allocations_tried, self.allocations_total
            )?;
        }
        if self.trials > 0 {
            write!(f, "; brute force exhausted {} trials", self.trials)?;
            if let Some(d) = self.best_damage {
                write!(
                    f,
                    " (closest: {} codewords left wrong with side {} honest, {} honest codewords touched)",
                    d.residual,
                    match d.honest_side {
                        Side::A => "A",
                        Side::B => "B",
                    },
                    d.honest
                )?;
            }
        }
        if let Some(v) = &self.verification {
            write!(f, "; last verification failure: {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("message for side {side}: {source}")]
    Message { side: Side, source: CodecError },
    #[error("format selection failed: {0}")]
    Format(FormatError),
    #[error("constraint system: {0}")]
    System(SystemError),
    #[error("no double-sided symbol found: {0}")]
    Infeasible(Box<Diagnostics>),
}

impl ConstructionError {
    /// Short name of the stage that failed.
    pub fn stage(&self) -> &'static str {
        match self {
            ConstructionError::Message { .. } => "message",
            ConstructionError::Format(_) => "format",
            ConstructionError::System(_) => "system",
            ConstructionError::Infeasible(d) if d.verification.is_some() => "verification",
            ConstructionError::Infeasible(_) => "capacity",
        }
    }
}

/// The format used for every double-sided symbol.
pub fn mirror_format() -> Result<MirrorFormat, FormatError> {
    static FORMAT: OnceLock<Result<MirrorFormat, FormatError>> = OnceLock::new();
    FORMAT
        .get_or_init(|| select_mirror_format(&build_flip_graph(Domain::OnGrid)))
        .clone()
}

/// Encode `text` as a single segment, optionally followed by terminator
/// bits (as many of the four as fit).
pub fn message_bits(
    text: &str,
    mode: Option<Mode>,
    terminator: bool,
) -> Result<(Mode, BitString), CodecError> {
    let mode = mode.unwrap_or_else(|| Mode::best_for(text));
    let mut bits = encode_segment(&Segment::new(mode, text))?;
    if bits.len() > DATA_BITS {
        return Err(CodecError::Overflow(bits.len()));
    }
    if terminator {
        bits.push_bits(0, (DATA_BITS - bits.len()).min(4));
    }
    Ok((mode, bits))
}

fn preferred_fill(msg_a: &BitString, mask_of_a: &[bool]) -> Vec<bool> {
    let padded = pad_to_capacity(msg_a);
    let data: [u8; DATA_CODEWORDS] = padded
        .to_bytes()
        .try_into()
        .expect("padded payload is 19 bytes");
    let code = bytes_to_bits(&rs_codeword(&data));
    (0..REGION_BITS)
        .map(|t| code.get(t) ^ mask_of_a[t])
        .collect()
}

/// Outcome of the analytic search.
pub struct AnalyticHit {
    pub grid: ModuleGrid,
    pub allocation: ErrorAllocation,
    pub free_vars: usize,
    pub reports: (DecodeReport, DecodeReport),
}

pub struct AnalyticSearch {
    pub hit: Option<AnalyticHit>,
    pub tried: usize,
    pub total: usize,
    pub conflicting_cells: usize,
    pub verification: Option<VerifyError>,
}

/// Try allocations in canonical order until one yields a grid that
/// decodes to the expected texts both ways.
pub fn analytic_search(
    texts: (&str, &str),
    msg_a: &BitString,
    msg_b: &BitString,
    format: &MirrorFormat,
    fill: FillPolicy,
    max_allocations: Option<usize>,
) -> Result<AnalyticSearch, SystemError> {
    let part =
        overlap_partition(msg_a.len(), msg_b.len()).map_err(|_| SystemError::PayloadTooLong {
            side: if msg_a.len() > DATA_BITS {
                Side::A
            } else {
                Side::B
            },
            len: msg_a.len().max(msg_b.len()),
        })?;
    let screen = FeasibilityScreen::new(msg_a, msg_b, format)?;
    let (view_a, _) = side_views(format)?;
    let policy = match fill {
        FillPolicy::Standard => FreeBitPolicy::Preferred(preferred_fill(msg_a, &view_a.mask_of)),
        FillPolicy::Zeros => FreeBitPolicy::Zeros,
        FillPolicy::Random(seed) => FreeBitPolicy::Random(seed),
    };
    let total = enumerate_error_allocations(&part).count();
    let limit = max_allocations.unwrap_or(usize::MAX);
    let mut out = AnalyticSearch {
        hit: None,
        tried: 0,
        total,
        conflicting_cells: part.conflicts().len(),
        verification: None,
    };
    let mut cache = None;
    for alloc in enumerate_error_allocations(&part).take(limit) {
        out.tried += 1;
        if !screen.is_feasible_cached(&alloc, &mut cache) {
            continue;
        }
        let cs = build_constraint_system(msg_a, msg_b, format, &alloc)?;
        let Ok(solution) = solve_gf2(&cs.system, &policy) else {
            continue;
        };
        let grid = grid_from_cells(&cs.cell_values(&solution.assignment), format.witness);
        match verify_double_sided(&grid, texts.0, texts.1) {
            Ok(reports) => {
                out.hit = Some(AnalyticHit {
                    grid,
                    allocation: alloc,
                    free_vars: solution.free_variable_count,
                    reports,
                });
                return Ok(out);
            }
            Err(e) => out.verification = Some(e),
        }
    }
    Ok(out)
}

/// Build a grid that reads `msg_a` straight and `msg_b` transposed.
pub fn construct_double_sided(
    msg_a: &str,
    msg_b: &str,
    options: &MirrorOptions,
) -> Result<(ModuleGrid, ConstructionReport), ConstructionError> {
    let (mode_a, bits_a) =
        message_bits(msg_a, options.mode_a, options.terminator).map_err(|source| {
            ConstructionError::Message {
                side: Side::A,
                source,
            }
        })?;
    let (mode_b, bits_b) =
        message_bits(msg_b, options.mode_b, options.terminator).map_err(|source| {
            ConstructionError::Message {
                side: Side::B,
                source,
            }
        })?;
    let format = mirror_format().map_err(ConstructionError::Format)?;
    let payload_bits = [bits_a.len(), bits_b.len()];
    let report = |method,
                  allocation,
                  allocations_tried,
                  free_vars,
                  trials,
                  reports: (DecodeReport, DecodeReport)| {
        ConstructionReport {
            method,
            format_witness: format.witness_string(),
            mask_id: format.straight.mask,
            mirrored_mask_id: format.mirrored.mask,
            format_distances: [reports.0.format_distance, reports.1.format_distance],
            modes: [mode_a, mode_b],
            payload_bits,
            allocation,
            allocations_tried,
            free_vars,
            trials,
            side_a_corrections: reports.0.corrected_bytes,
            side_b_corrections: reports.1.corrected_bytes,
        }
    };

    let mut diag = Diagnostics {
        payload_bits,
        conflicting_cells: 0,
        allocations_tried: 0,
        allocations_total: 0,
        trials: 0,
        best_damage: None,
        verification: None,
    };

    if matches!(options.method, Method::Analytic | Method::Auto) {
        let search = analytic_search(
            (msg_a, msg_b),
            &bits_a,
            &bits_b,
            &format,
            options.fill,
            options.max_allocations,
        )
        .map_err(ConstructionError::System)?;
        diag.conflicting_cells = search.conflicting_cells;
        diag.allocations_tried = search.tried;
        diag.allocations_total = search.total;
        diag.verification = search.verification.map(|e| e.to_string());
        if let Some(hit) = search.hit {
            let r = report(
                Method::Analytic,
                Some(hit.allocation),
                search.tried,
                Some(hit.free_vars),
                None,
                hit.reports,
            );
            return Ok((hit.grid, r));
        }
    }

    if matches!(options.method, Method::Brute | Method::Auto) {
        if diag.conflicting_cells == 0 {
            diag.conflicting_cells = overlap_partition(bits_a.len(), bits_b.len())
                .map(|p| p.conflicts().len())
                .unwrap_or(0);
        }
        match brute_force_search(&bits_a, &bits_b, &format, options.trials, options.seed)
            .map_err(ConstructionError::System)?
        {
            Ok(hit) => match verify_double_sided(&hit.grid, msg_a, msg_b) {
                Ok(reports) => {
                    let r = report(
                        Method::Brute,
                        None,
                        diag.allocations_tried,
                        None,
                        Some(hit.trial + 1),
                        reports,
                    );
                    return Ok((hit.grid, r));
                }
                Err(e) => {
                    diag.trials = hit.trial + 1;
                    diag.best_damage = Some(hit.damage);
                    diag.verification = Some(e.to_string());
                }
            },
            Err(miss) => {
                diag.trials = miss.trials;
                diag.best_damage = miss.best;
            }
        }
    }
    Err(ConstructionError::Infeasible(Box::new(diag)))
}

/// Whether the analytic construction succeeds for this pair with the bare
/// segments pinned (no terminator), and with which allocation.
pub fn probe_capacity(
    msg_a: &str,
    msg_b: &str,
) -> Result<Option<ErrorAllocation>, ConstructionError> {
    let options = MirrorOptions {
        method: Method::Analytic,
        terminator: false,
        ..MirrorOptions::default()
    };
    match construct_double_sided(msg_a, msg_b, &options) {
        Ok((_, report)) => Ok(report.allocation),
        Err(ConstructionError::Infeasible(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harry_bovik() {
        let (grid, report) =
            construct_double_sided("HARRY", "BOVIK", &MirrorOptions::default()).unwrap();
        assert_eq!(report.method, Method::Analytic);
        let (a, b) = verify_double_sided(&grid, "HARRY", "BOVIK").unwrap();
        assert!(a.corrected_bytes.len() <= 3 && b.corrected_bytes.len() <= 3);
        assert_eq!(report.side_a_corrections, a.corrected_bytes);
    }

    #[test]
    fn message_bits_terminator() {
        let (mode, bits) = message_bits("HELLO", None, true).unwrap();
        assert_eq!(mode, Mode::Alphanumeric);
        assert_eq!(bits.len(), 45);
        assert_eq!(message_bits("HELLO", None, false).unwrap().1.len(), 41);
        assert!(message_bits(&"x".repeat(18), None, true).is_err());
        assert_eq!(
            message_bits(&"x".repeat(17), None, true).unwrap().1.len(),
            152
        );
        assert_eq!(
            message_bits(&"x".repeat(17), None, false).unwrap().1.len(),
            148
        );
    }
}
