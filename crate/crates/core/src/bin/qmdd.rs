use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use qmdd::bench::{all_timed_out, bench, bench_phase_numerator, render_table, Family};
use qmdd::circuit::Circuit;
use qmdd::dense::{max_abs_diff, simulate_dense_logical};
use qmdd::generators::{entangled_qft, ghz, inverse_qft, qft, qpe, QpeSpec};
use qmdd::qasm::{emit, parse_named, ParsedProgram};
use qmdd::reorder::{reorder, ReorderMode};
use qmdd::sim::run;

const EXIT_USAGE: u8 = 1;
const EXIT_VERIFY: u8 = 2;
const EXIT_TIMEOUT: u8 = 3;
const VERIFY_TOLERANCE: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "qmdd", version, about = "Decision-diagram quantum circuit simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated circuit as QASM
    Gen(GenArgs),
    /// Simulate a QASM file and query amplitudes
    Sim(SimArgs),
    /// Time a circuit family across qubit counts and reorder modes
    Bench(BenchArgs),
    /// Compare the simulator against a dense state vector in every mode
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum GenFamily {
    Ghz,
    Qft,
    EntangledQft,
    InverseQft,
    Qpe,
}

#[derive(Args)]
struct GenArgs {
    family: GenFamily,
    /// Total number of qubits (for qpe: counting qubits + 1)
    #[arg(long)]
    qubits: usize,
    /// Phase numerator k for qpe (phase k / 2^m); defaults to 0b0101…1
    #[arg(long)]
    phase_k: Option<u64>,
    /// Leave out the final SWAP block of qft
    #[arg(long)]
    no_swaps: bool,
    /// Output file (stdout when omitted)
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimArgs {
    file: PathBuf,
    #[arg(long, default_value = "none")]
    reorder: ReorderMode,
    /// Basis string in the file's qubit labels. Shorter strings, or `x`
    /// entries, leave qubits free and report a marginal probability.
    #[arg(long = "query")]
    queries: Vec<String>,
    /// Also write the rewritten circuit as QASM
    #[arg(long)]
    emit: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    family: Family,
    /// Inclusive range `A..B`, or a single count
    #[arg(long, value_parser = parse_range)]
    qubits: (usize, usize),
    /// Comma-separated modes; an empty value gives an empty table
    #[arg(long, default_value = "none,trailing,all", value_parser = parse_modes)]
    reorder: Modes,
    /// Per-row timeout in seconds
    #[arg(long, default_value_t = 120.0)]
    timeout: f64,
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 12)]
    max_qubits: usize,
    #[arg(long)]
    json: bool,
}

#[derive(Clone)]
struct Modes(Vec<ReorderMode>);

fn parse_modes(s: &str) -> Result<Modes, String> {
    s.split(',')
        .map(str::trim)
        .filter(|m| !m.is_empty())
        .map(|m| m.parse::<ReorderMode>().map_err(|e| e.to_string()))
        .collect::<Result<_, _>>()
        .map(Modes)
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let parse = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("bad qubit count {t:?}"));
    let (a, b) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok((a, b))
}

/// A failure together with the exit code it maps to.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

fn usage(kind: &'static str, message: impl ToString) -> Failure {
    Failure { code: EXIT_USAGE, kind, message: message.to_string() }
}

fn main() -> ExitCode {
    let raw: Vec<String> = std::env::args().collect();
    let json = raw.iter().any(|a| a == "--json");
    let cli = match Cli::try_parse_from(&raw) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            let rendered = e.render().to_string();
            let message = rendered.trim_end().strip_prefix("error: ").unwrap_or(rendered.trim_end());
            return report(&usage("usage", message), json);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => report(&f, json),
    }
}

fn report(f: &Failure, json: bool) -> ExitCode {
    eprintln!("error: {}", f.message);
    if json {
        println!("{}", json!({ "error": { "kind": f.kind, "message": f.message, "exit_code": f.code } }));
    }
    ExitCode::from(f.code)
}

fn dispatch(cmd: Command) -> Result<u8, Failure> {
    match cmd {
        Command::Gen(a) => cmd_gen(a),
        Command::Sim(a) => cmd_sim(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Verify(a) => cmd_verify(a),
    }
}

fn load(path: &Path) -> Result<ParsedProgram, Failure> {
    let text = fs::read_to_string(path).map_err(|e| usage("io", format!("cannot read {}: {e}", path.display())))?;
    parse_named(&text, &path.display().to_string()).map_err(|e| usage("parse", format!("{}: {e}", path.display())))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| usage("io", format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_gen(a: GenArgs) -> Result<u8, Failure> {
    let gen_err = |e: qmdd::generators::GeneratorError| usage("argument", e);
    if a.phase_k.is_some() && !matches!(a.family, GenFamily::Qpe) {
        return Err(usage("argument", "--phase-k only applies to qpe"));
    }
    if a.no_swaps && !matches!(a.family, GenFamily::Qft) {
        return Err(usage("argument", "--no-swaps only applies to qft"));
    }
    let circuit: Circuit = match a.family {
        GenFamily::Ghz => ghz(a.qubits).map_err(gen_err)?,
        GenFamily::Qft => qft(a.qubits, !a.no_swaps).map_err(gen_err)?,
        GenFamily::EntangledQft => entangled_qft(a.qubits).map_err(gen_err)?,
        GenFamily::InverseQft => inverse_qft(a.qubits).map_err(gen_err)?,
        GenFamily::Qpe => {
            let m = a.qubits.checked_sub(1).filter(|&m| m > 0).ok_or_else(|| usage("argument", "qpe needs at least 2 qubits"))?;
            let k = a.phase_k.unwrap_or_else(|| bench_phase_numerator(m));
            qpe(QpeSpec::new(m, k).map_err(gen_err)?).map_err(gen_err)?
        }
    };
    write_out(a.output.as_deref(), &emit(&circuit))?;
    Ok(0)
}

#[derive(Serialize)]
struct QueryOut {
    bits: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    im: Option<f64>,
    magnitude: f64,
    probability: f64,
}

fn cmd_sim(a: SimArgs) -> Result<u8, Failure> {
    let program = load(&a.file)?;
    let circuit = &program.circuit;
    let n = circuit.num_qubits;
    let result = run(circuit, a.reorder).map_err(|e| usage("simulation", e))?;
    let mut queries = Vec::new();
    for q in &a.queries {
        let full = q.len() == n && q.chars().all(|c| c == '0' || c == '1');
        let out = if full {
            let amp = result.amplitude(q).map_err(|e| usage("query", format!("{q}: {e}")))?;
            QueryOut { bits: q.clone(), re: Some(amp.re), im: Some(amp.im), magnitude: amp.norm(), probability: amp.norm_sqr() }
        } else {
            let p = result.probability(q).map_err(|e| usage("query", format!("{q}: {e}")))?;
            QueryOut { bits: q.clone(), re: None, im: None, magnitude: p.sqrt(), probability: p }
        };
        queries.push(out);
    }
    if let Some(path) = &a.emit {
        let (rewritten, _) = reorder(circuit, a.reorder);
        write_out(Some(path), &emit(&rewritten))?;
    }
    if a.json {
        let ignored: Vec<_> = program.ignored_statements.iter().map(|(l, r)| json!({ "line": l, "reason": r })).collect();
        let doc = json!({
            "file": program.source_name,
            "num_qubits": n,
            "stats": result.stats,
            "output_permutation": result.output_permutation.as_slice(),
            "queries": queries,
            "ignored_statements": ignored,
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
    } else {
        let s = &result.stats;
        println!("file: {}", program.source_name);
        println!("qubits: {n}");
        println!("mode: {}", s.mode);
        println!("gates_applied: {}", s.gates_applied);
        println!("swaps_removed: {}", s.swaps_removed);
        println!("peak_nodes: {}", s.peak_nodes);
        println!("final_nodes: {}", s.final_nodes);
        println!("wall_time_s: {:.6}", s.wall_time);
        println!("output_permutation: {}", result.output_permutation);
        for q in &queries {
            match (q.re, q.im) {
                (Some(re), Some(im)) => {
                    println!("amplitude {}: {re:+.12} {im:+.12}i  |a| = {:.12}", q.bits, q.magnitude)
                }
                _ => println!("probability {}: {:.12}  sqrt = {:.12}", q.bits, q.probability, q.magnitude),
            }
        }
    }
    Ok(0)
}

fn cmd_bench(a: BenchArgs) -> Result<u8, Failure> {
    if !(a.timeout.is_finite() && a.timeout >= 0.0) {
        return Err(usage("argument", format!("bad timeout {}", a.timeout)));
    }
    let rows = bench(a.family, a.qubits.0..=a.qubits.1, &a.reorder.0, Duration::from_secs_f64(a.timeout))
        .map_err(|e| usage("argument", e))?;
    if a.json {
        println!("{}", serde_json::to_string_pretty(&json!({ "rows": rows })).expect("serializable"));
    } else {
        print!("{}", render_table(&rows));
    }
    Ok(if all_timed_out(&rows) { EXIT_TIMEOUT } else { 0 })
}

fn cmd_verify(a: VerifyArgs) -> Result<u8, Failure> {
    let program = load(&a.file)?;
    let circuit = &program.circuit;
    if circuit.num_qubits > a.max_qubits {
        return Err(usage(
            "argument",
            format!("{} has {} qubits, above --max-qubits {}", program.source_name, circuit.num_qubits, a.max_qubits),
        ));
    }
    let oracle = simulate_dense_logical(circuit).map_err(|e| usage("argument", e))?;
    let mut worst = 0.0f64;
    let mut per_mode = Vec::new();
    for mode in ReorderMode::ALL_MODES {
        let result = run(circuit, mode).map_err(|e| usage("simulation", e))?;
        let diff = max_abs_diff(&oracle, &result.to_dense()).expect("same register size");
        worst = worst.max(diff);
        per_mode.push((mode, diff));
    }
    let pass = worst <= VERIFY_TOLERANCE;
    if a.json {
        let modes: Vec<_> = per_mode.iter().map(|(m, d)| json!({ "mode": m, "max_abs_diff": d })).collect();
        let doc = json!({
            "file": program.source_name,
            "num_qubits": circuit.num_qubits,
            "tolerance": VERIFY_TOLERANCE,
            "modes": modes,
            "max_abs_diff": worst,
            "pass": pass,
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("serializable"));
    } else {
        for (m, d) in &per_mode {
            println!("{m:>8}: max_abs_diff = {d:.3e}");
        }
        println!("{}", if pass { "PASS" } else { "FAIL" });
    }
    Ok(if pass { 0 } else { EXIT_VERIFY })
}
