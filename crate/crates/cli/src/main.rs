use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use duplex_qr::codec::{CodecError, Mode, Segment};
use duplex_qr::format::{
    apply_format_mask, bch_decode, bits15, build_flip_graph, select_mirror_format, Domain,
    FormatWord,
};
use duplex_qr::grid::{data_placement_order, overlap_partition, CellCoord, ModuleGrid, SIZE};
use duplex_qr::masks::MaskId;
use duplex_qr::mirror::{construct_double_sided, ConstructionError, Method, MirrorOptions};
use duplex_qr::render::{parse_pbm, to_ascii, to_pbm, to_svg};
use duplex_qr::symbol::{encode_symbol, read_format};
use duplex_qr::verify::{decode_grid, DecodeReport, Orientation};

#[derive(Parser)]
#[command(
    name = "duplex-qr",
    version,
    about = "Version 1-L QR codes that read differently when mirrored"
)]
struct Cli {
    /// Machine-readable diagnostics on stderr (and reports on stdout).
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Auto,
    Alnum,
    Byte,
    Numeric,
}

impl ModeArg {
    fn mode(self) -> Option<Mode> {
        match self {
            ModeArg::Auto => None,
            ModeArg::Alnum => Some(Mode::Alphanumeric),
            ModeArg::Byte => Some(Mode::Byte),
            ModeArg::Numeric => Some(Mode::Numeric),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Analytic,
    Brute,
    Auto,
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainArg {
    Grid,
    Raw,
}

#[derive(clap::Args)]
struct Output {
    /// Output file; .svg and .txt select SVG and ASCII, anything else PBM.
    /// Without it the symbol is drawn as ASCII on stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Pixels per module (PBM only).
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..=100))]
    scale: u32,
    /// Quiet-zone width in modules.
    #[arg(long, default_value_t = 4)]
    quiet: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Encode an ordinary single-sided Version 1-L symbol.
    Encode {
        text: String,
        #[arg(long, value_enum, default_value = "auto")]
        mode: ModeArg,
        #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..8))]
        mask: u8,
        #[command(flatten)]
        out: Output,
    },
    /// Build a symbol reading TEXT_A straight and TEXT_B transposed.
    Mirror {
        text_a: String,
        text_b: String,
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value = "auto")]
        mode_a: ModeArg,
        #[arg(long, value_enum, default_value = "auto")]
        mode_b: ModeArg,
        /// Do not reserve terminator bits after the messages.
        #[arg(long)]
        no_terminator: bool,
        /// Write the construction report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        out: Output,
    },
    /// Enumerate format strings readable both ways and print the graph.
    Flipgraph {
        #[arg(long, value_enum, default_value = "grid")]
        domain: DomainArg,
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Decode a PBM in both orientations.
    Verify {
        input: PathBuf,
        #[arg(long)]
        expect_a: Option<String>,
        #[arg(long)]
        expect_b: Option<String>,
    },
    /// Dump format words, codewords and zones of a PBM.
    Inspect { input: PathBuf },
}

/// A failure with its exit code, stage and optional structured details.
struct Failure {
    code: u8,
    stage: &'static str,
    message: String,
    details: Value,
}

impl Failure {
    fn new(code: u8, stage: &'static str, message: impl Into<String>) -> Self {
        Failure {
            code,
            stage,
            message: message.into(),
            details: Value::Null,
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::new(1, "io", format!("{}: {e}", path.display()))
}

fn codec_failure(e: CodecError) -> Failure {
    Failure::new(2, "message", e.to_string())
}

fn write_grid(grid: &ModuleGrid, out: &Output) -> Result<(), Failure> {
    let Some(path) = &out.output else {
        print!("{}", to_ascii(grid, out.quiet));
        return Ok(());
    };
    let bytes = match path.extension().and_then(|e| e.to_str()) {
        Some("svg") => to_svg(grid, out.quiet).into_bytes(),
        Some("txt") => to_ascii(grid, out.quiet).into_bytes(),
        _ => to_pbm(grid, out.scale as usize, out.quiet),
    };
    fs::write(path, bytes).map_err(|e| io_failure(path, e))
}

fn read_grid(path: &Path) -> Result<ModuleGrid, Failure> {
    let bytes = fs::read(path).map_err(|e| io_failure(path, e))?;
    parse_pbm(&bytes).map_err(|e| Failure::new(1, "pbm", format!("{}: {e}", path.display())))
}

fn emit(json_mode: bool, value: &Value, text: impl FnOnce() -> String) {
    if json_mode {
        println!("{}", serde_json::to_string_pretty(value).unwrap());
    } else {
        print!("{}", text());
    }
}

fn describe(r: &DecodeReport) -> String {
    format!(
        "{:?} ({} mode, mask {}, format distance {} from copy {}, corrected bytes {:?})",
        r.text, r.mode, r.mask_id, r.format_distance, r.format_copy, r.corrected_bytes
    )
}

fn cmd_encode(
    text: &str,
    mode: ModeArg,
    mask: u8,
    out: &Output,
    json_mode: bool,
) -> Result<(), Failure> {
    let segment = match mode.mode() {
        Some(m) => Segment::new(m, text),
        None => Segment::auto(text),
    };
    let mask = MaskId::new(mask).expect("range checked by the parser");
    let grid = encode_symbol(std::slice::from_ref(&segment), mask).map_err(codec_failure)?;
    write_grid(&grid, out)?;
    if out.output.is_some() {
        let v = json!({"text": text, "mode": segment.mode, "mask_id": mask});
        emit(json_mode, &v, || {
            format!(
                "encoded {text:?} in {} mode with mask {mask}\n",
                segment.mode
            )
        });
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_mirror(
    a: &str,
    b: &str,
    method: MethodArg,
    options: MirrorOptions,
    report_path: Option<&Path>,
    out: &Output,
    json_mode: bool,
) -> Result<(), Failure> {
    let options = MirrorOptions {
        method: match method {
            MethodArg::Analytic => Method::Analytic,
            MethodArg::Brute => Method::Brute,
            MethodArg::Auto => Method::Auto,
        },
        ..options
    };
    let (grid, report) = construct_double_sided(a, b, &options).map_err(|e| {
        let code = if matches!(e, ConstructionError::Message { .. }) {
            2
        } else {
            1
        };
        let details = match &e {
            ConstructionError::Infeasible(d) => serde_json::to_value(d).unwrap(),
            _ => Value::Null,
        };
        Failure {
            code,
            stage: e.stage(),
            message: e.to_string(),
            details,
        }
    })?;
    if let Some(path) = report_path {
        let text = serde_json::to_string_pretty(&report).unwrap() + "\n";
        fs::write(path, text).map_err(|e| io_failure(path, e))?;
    }
    write_grid(&grid, out)?;
    if out.output.is_some() {
        emit(json_mode, &serde_json::to_value(&report).unwrap(), || {
            let mut s = format!(
                "{:?} / {:?}: {} construction, format {} (mask {}), ",
                a, b, report.method, report.format_witness, report.mask_id
            );
            match &report.allocation {
                Some(alloc) => {
                    s += &format!(
                        "allocation {alloc}, {} free variables",
                        report.free_vars.unwrap_or(0)
                    )
                }
                None => s += &format!("found after {} trials", report.trials.unwrap_or(0)),
            }
            s += &format!(
                "; corrections A {:?}, B {:?}\n",
                report.side_a_corrections, report.side_b_corrections
            );
            s
        });
    }
    Ok(())
}

fn cmd_flipgraph(domain: DomainArg, dot: Option<&Path>, json_mode: bool) -> Result<(), Failure> {
    let domain = match domain {
        DomainArg::Grid => Domain::OnGrid,
        DomainArg::Raw => Domain::Raw,
    };
    let graph = build_flip_graph(domain);
    if let Some(path) = dot {
        fs::write(path, graph.to_dot()).map_err(|e| io_failure(path, e))?;
    }
    let selected = select_mirror_format(&graph).ok();
    let self_loops: Vec<String> = (0..32u8)
        .filter(|&i| graph.has_self_loop(i))
        .map(|i| format!("{i:05b}"))
        .collect();
    let v = json!({
        "domain": domain.to_string(),
        "nodes": graph.nodes.len(),
        "edges": graph.edges.len(),
        "self_loops": self_loops,
        "witnesses": graph.witnesses.len(),
        "candidates": graph.candidates,
        "shell_candidates": graph.shell_candidates,
        "distinct_candidates": graph.distinct_candidates,
        "selected_witness": selected.map(|m| m.witness_string()),
    });
    emit(json_mode, &v, || {
        let mut s = format!(
            "{} domain: {} nodes, {} edges ({} self-loops), {} witness strings\n",
            domain,
            graph.nodes.len(),
            graph.edges.len(),
            self_loops.len(),
            graph.witnesses.len()
        );
        s += &format!(
            "candidates: {} in radius-3 balls, {} on the shells, {} distinct\n",
            graph.candidates, graph.shell_candidates, graph.distinct_candidates
        );
        match selected {
            Some(m) => {
                s += &format!(
                    "double-sided format: {} reads {}/{} (distance {}) and mirrored {}/{} (distance {})\n",
                    m.witness_string(),
                    m.straight.ec,
                    m.straight.mask,
                    m.straight_distance,
                    m.mirrored.ec,
                    m.mirrored.mask,
                    m.mirrored_distance
                )
            }
            None => s += "no usable double-sided format in this domain\n",
        }
        s
    });
    Ok(())
}

fn cmd_verify(input: &Path, expect: [Option<&str>; 2], json_mode: bool) -> Result<(), Failure> {
    let grid = read_grid(input)?;
    let mut sides = Vec::new();
    let mut failures = Vec::new();
    let mut any_ok = false;
    for (label, orientation, expected) in [
        ("a", Orientation::Straight, expect[0]),
        ("b", Orientation::Transposed, expect[1]),
    ] {
        let result = decode_grid(&grid, orientation);
        let entry = match &result {
            Ok(r) => {
                any_ok = true;
                let matches = expected.map(|e| e == r.text);
                if matches == Some(false) {
                    failures.push(format!(
                        "side {label}: expected {:?}, decoded {:?}",
                        expected.unwrap(),
                        r.text
                    ));
                }
                json!({"orientation": orientation, "report": r, "matches": matches})
            }
            Err(e) => {
                if expected.is_some() {
                    failures.push(format!("side {label}: {e}"));
                }
                json!({"orientation": orientation, "error": e.to_string()})
            }
        };
        sides.push((label, orientation, result, entry));
    }
    let v = json!({
        "a": sides[0].3,
        "b": sides[1].3,
        "ok": failures.is_empty() && any_ok,
    });
    emit(json_mode, &v, || {
        let mut s = String::new();
        for (label, orientation, result, _) in &sides {
            s += &match result {
                Ok(r) => format!("side {label} ({orientation}): {}\n", describe(r)),
                Err(e) => format!("side {label} ({orientation}): no decode: {e}\n"),
            };
        }
        s
    });
    if !failures.is_empty() {
        let mut f = Failure::new(1, "verification", failures.join("; "));
        f.details = v;
        return Err(f);
    }
    if !any_ok {
        return Err(Failure::new(
            1,
            "verification",
            "neither orientation decodes",
        ));
    }
    Ok(())
}

fn cmd_inspect(input: &Path, json_mode: bool) -> Result<(), Failure> {
    let grid = read_grid(input)?;
    let mut orientations = Vec::new();
    let mut text = String::new();
    let mut payload_lens = [None, None];
    for (i, orientation) in [Orientation::Straight, Orientation::Transposed]
        .into_iter()
        .enumerate()
    {
        let view = match orientation {
            Orientation::Straight => grid.clone(),
            Orientation::Transposed => grid.transposed(),
        };
        let (w1, w2) = read_format(&view);
        let copies: Vec<Value> = [w1, w2]
            .iter()
            .map(|&w| match bch_decode(apply_format_mask(w)) {
                Ok((info, dist)) => {
                    let f = FormatWord::from_info(info);
                    json!({"bits": bits15(w), "ec_level": f.ec, "mask_id": f.mask, "distance": dist})
                }
                Err(_) => json!({"bits": bits15(w), "error": "undecodable"}),
            })
            .collect();
        text += &format!("{orientation}:\n");
        for (k, c) in copies.iter().enumerate() {
            text += &format!("  format copy {}: {}", k + 1, c["bits"].as_str().unwrap());
            if c.get("error").is_some() {
                text += " (undecodable)\n";
            } else {
                text += &format!(
                    " -> ec {} mask {} at distance {}\n",
                    c["ec_level"].as_str().unwrap_or("?"),
                    c["mask_id"],
                    c["distance"]
                );
            }
        }
        let mismatches = view.function_pattern_mismatches().len();
        text += &format!("  function pattern mismatches: {mismatches}\n");
        let decoded = decode_grid(&grid, orientation);
        match &decoded {
            Ok(r) => {
                let hex: Vec<String> = r.codewords.iter().map(|b| format!("{b:02x}")).collect();
                text += &format!("  codewords: {}\n", hex.join(" "));
                text += &format!("  decoded: {}\n", describe(r));
                let bits = duplex_qr::mirror::message_bits(&r.text, Some(r.mode), false)
                    .map(|(_, b)| b.len())
                    .ok();
                payload_lens[i] = bits;
            }
            Err(e) => text += &format!("  decode failed: {e}\n"),
        }
        orientations.push(json!({
            "orientation": orientation,
            "format_copies": copies,
            "function_pattern_mismatches": mismatches,
            "decode": match &decoded {
                Ok(r) => serde_json::to_value(r).unwrap(),
                Err(e) => json!({"error": e.to_string()}),
            },
        }));
    }

    // Zones against the decoded payload lengths (full capacity if a side
    // does not decode).
    let len_a = payload_lens[0].unwrap_or(152);
    let len_b = payload_lens[1].unwrap_or(152);
    let part = overlap_partition(len_a, len_b).expect("payload lengths fit");
    let mut rows = Vec::with_capacity(SIZE);
    for r in 0..SIZE {
        let row: String = (0..SIZE)
            .map(|c| {
                let cell = CellCoord::new(r, c).unwrap();
                match part.zone_of(cell) {
                    Some(z) => z.label(),
                    None => '.',
                }
            })
            .collect();
        rows.push(row);
    }
    let counts: serde_json::Map<String, Value> = duplex_qr::grid::Zone::ALL
        .iter()
        .map(|&z| (z.label().to_string(), json!(part.zone(z).len())))
        .collect();
    text += &format!("zones for payloads of {len_a}/{len_b} bits (. = function or format):\n");
    for row in &rows {
        text += &format!("  {row}\n");
    }
    text += &format!(
        "  conflicting cells: {} across {} side-A and {} side-B codewords\n",
        part.conflicts().len(),
        part.conflict_bytes_a().len(),
        part.conflict_bytes_b().len()
    );
    debug_assert_eq!(data_placement_order().len(), 208);
    let v = json!({
        "orientations": orientations,
        "zones": {"payload_bits": [len_a, len_b], "map": rows, "counts": counts,
                   "conflicting_cells": part.conflicts().len()},
    });
    emit(json_mode, &v, || text);
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let json_mode = cli.json;
    match cli.command {
        Command::Encode {
            text,
            mode,
            mask,
            out,
        } => cmd_encode(&text, mode, mask, &out, json_mode),
        Command::Mirror {
            text_a,
            text_b,
            method,
            trials,
            seed,
            mode_a,
            mode_b,
            no_terminator,
            report,
            out,
        } => {
            let options = MirrorOptions {
                mode_a: mode_a.mode(),
                mode_b: mode_b.mode(),
                terminator: !no_terminator,
                trials,
                seed,
                ..MirrorOptions::default()
            };
            cmd_mirror(
                &text_a,
                &text_b,
                method,
                options,
                report.as_deref(),
                &out,
                json_mode,
            )
        }
        Command::Flipgraph { domain, dot } => cmd_flipgraph(domain, dot.as_deref(), json_mode),
        Command::Verify {
            input,
            expect_a,
            expect_b,
        } => cmd_verify(
            &input,
            [expect_a.as_deref(), expect_b.as_deref()],
            json_mode,
        ),
        Command::Inspect { input } => cmd_inspect(&input, json_mode),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let json_mode = cli.json;
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if json_mode {
                let v = json!({"error": f.stage, "message": f.message, "details": f.details});
                eprintln!("{}", serde_json::to_string(&v).unwrap());
            } else {
                eprintln!("error ({}): {}", f.stage, f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
