//! Benchmark sweeps over the entangled-QFT and QPE families.
//!
//! Every row gets a fresh [`Package`](crate::dd::Package), so caches never
//! carry over between rows. A row that exceeds the timeout is recorded with
//! status `timeout` and the sweep moves on.

use std::fmt::{self, Write as _};
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::Circuit;
use crate::dense::{max_abs_diff, simulate_dense, MAX_ORACLE_QUBITS};
use crate::generators::{entangled_qft, qpe, GeneratorError, QpeSpec};
use crate::reorder::ReorderMode;
use crate::sim::{run_with, RunOptions, SimError};

pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(120);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    EntangledQft,
    Qpe,
}

impl Family {
    pub fn as_str(self) -> &'static str {
        match self {
            Family::EntangledQft => "entangled_qft",
            Family::Qpe => "qpe",
        }
    }

    /// Smallest supported total qubit count.
    pub fn min_qubits(self) -> usize {
        match self {
            Family::EntangledQft => 1,
            Family::Qpe => 2,
        }
    }

    /// The benchmark circuit on `n` qubits in total.
    ///
    /// QPE uses `n - 1` counting qubits and the phase numerator
    /// `k = (0b0101… & mask) | 1`, which sets roughly half the bits and keeps
    /// the readout non-trivial at every size.
    pub fn circuit(self, n: usize) -> Result<Circuit, GeneratorError> {
        match self {
            Family::EntangledQft => entangled_qft(n),
            Family::Qpe => {
                let m = n.checked_sub(1).filter(|&m| m > 0).ok_or(GeneratorError::NoQubits)?;
                qpe(QpeSpec::new(m, bench_phase_numerator(m))?)
            }
        }
    }
}

pub fn bench_phase_numerator(m: usize) -> u64 {
    let mask = if m >= 64 { u64::MAX } else { (1u64 << m) - 1 };
    (0x5555_5555_5555_5555 & mask) | 1
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("unknown benchmark family {0:?} (expected entangled_qft or qpe)")]
pub struct ParseFamilyError(String);

impl FromStr for Family {
    type Err = ParseFamilyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "entangled_qft" => Ok(Family::EntangledQft),
            "qpe" => Ok(Family::Qpe),
            other => Err(ParseFamilyError(other.to_string())),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    Timeout,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub family: Family,
    pub n: usize,
    pub mode: ReorderMode,
    pub status: RowStatus,
    /// Seconds; for timed-out rows this is the time at which the row gave up.
    pub wall_time: f64,
    pub gates_applied: usize,
    pub swaps_removed: usize,
    pub peak_nodes: Option<usize>,
    pub final_nodes: Option<usize>,
    /// Max abs amplitude difference against the dense simulator, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_max_diff: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct BenchOptions {
    pub timeout: Duration,
    /// Compare each finished row against the dense simulator (small n only).
    pub oracle_check: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        BenchOptions { timeout: DEFAULT_TIMEOUT, oracle_check: false }
    }
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{family} needs at least {min} qubits")]
    TooFewQubits { family: Family, min: usize },
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Sim(SimError),
}

pub fn bench(
    family: Family,
    qubits: RangeInclusive<usize>,
    modes: &[ReorderMode],
    timeout: Duration,
) -> Result<Vec<BenchRow>, BenchError> {
    bench_with(family, qubits, modes, &BenchOptions { timeout, ..BenchOptions::default() })
}

/// Runs one row per `(n, mode)`, `n` outermost.
pub fn bench_with(
    family: Family,
    qubits: RangeInclusive<usize>,
    modes: &[ReorderMode],
    opts: &BenchOptions,
) -> Result<Vec<BenchRow>, BenchError> {
    let mut rows = Vec::new();
    if modes.is_empty() {
        return Ok(rows);
    }
    if *qubits.start() < family.min_qubits() {
        return Err(BenchError::TooFewQubits { family, min: family.min_qubits() });
    }
    for n in qubits {
        let circuit = family.circuit(n)?;
        let oracle = if opts.oracle_check && n <= MAX_ORACLE_QUBITS {
            Some(simulate_dense(&circuit).expect("generated circuits are valid"))
        } else {
            None
        };
        for &mode in modes {
            let run_opts = RunOptions { timeout: Some(opts.timeout), ..RunOptions::default() };
            let row = match run_with(&circuit, mode, &run_opts) {
                Ok(result) => BenchRow {
                    family,
                    n,
                    mode,
                    status: RowStatus::Ok,
                    wall_time: result.stats.wall_time,
                    gates_applied: result.stats.gates_applied,
                    swaps_removed: result.stats.swaps_removed,
                    peak_nodes: Some(result.stats.peak_nodes),
                    final_nodes: Some(result.stats.final_nodes),
                    oracle_max_diff: oracle
                        .as_ref()
                        .map(|o| max_abs_diff(o, &result.to_dense()).expect("same size")),
                },
                Err(SimError::Timeout { gates_applied, elapsed }) => BenchRow {
                    family,
                    n,
                    mode,
                    status: RowStatus::Timeout,
                    wall_time: elapsed.as_secs_f64(),
                    gates_applied,
                    swaps_removed: 0,
                    peak_nodes: None,
                    final_nodes: None,
                    oracle_max_diff: None,
                },
                Err(e) => return Err(BenchError::Sim(e)),
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

/// True when there is at least one row and none of them finished.
pub fn all_timed_out(rows: &[BenchRow]) -> bool {
    !rows.is_empty() && rows.iter().all(|r| r.status == RowStatus::Timeout)
}

/// Aligned plain-text table.
pub fn render_table(rows: &[BenchRow]) -> String {
    let header = ["family", "n", "mode", "status", "wall_time_s", "peak_nodes", "final_nodes", "swaps_removed"];
    let mut cells: Vec<Vec<String>> = vec![header.iter().map(|s| s.to_string()).collect()];
    let opt = |v: Option<usize>| v.map_or("-".to_string(), |v| v.to_string());
    for r in rows {
        cells.push(vec![
            r.family.to_string(),
            r.n.to_string(),
            r.mode.to_string(),
            match r.status {
                RowStatus::Ok => "ok".into(),
                RowStatus::Timeout => "timeout".into(),
            },
            format!("{:.4}", r.wall_time),
            opt(r.peak_nodes),
            opt(r.final_nodes),
            r.swaps_removed.to_string(),
        ]);
    }
    let widths: Vec<usize> = (0..header.len()).map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
    let mut out = String::new();
    for row in &cells {
        let line: Vec<String> = row.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
        let _ = writeln!(out, "{}", line.join("  ").trim_end());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_mode_list_gives_empty_table() {
        let rows = bench(Family::Qpe, 4..=6, &[], DEFAULT_TIMEOUT).unwrap();
        assert!(rows.is_empty());
        assert!(!all_timed_out(&rows));
    }

    #[test]
    fn qpe_rows_agree_with_oracle() {
        let opts = BenchOptions { oracle_check: true, ..BenchOptions::default() };
        let rows = bench_with(Family::Qpe, 4..=4, &[ReorderMode::None, ReorderMode::All], &opts).unwrap();
        assert_eq!(rows.len(), 2);
        for r in &rows {
            assert_eq!(r.status, RowStatus::Ok);
            assert!(r.oracle_max_diff.unwrap() <= 1e-9, "{r:?}");
        }
        assert_eq!(rows[0].swaps_removed, 0);
        assert_eq!(rows[1].swaps_removed, 1);
    }

    #[test]
    fn rows_are_ordered_and_deterministic() {
        let modes = ReorderMode::ALL_MODES;
        let a = bench(Family::EntangledQft, 3..=5, &modes, DEFAULT_TIMEOUT).unwrap();
        let b = bench(Family::EntangledQft, 3..=5, &modes, DEFAULT_TIMEOUT).unwrap();
        assert_eq!(a.len(), 9);
        let strip = |rows: &[BenchRow]| rows.iter().map(|r| BenchRow { wall_time: 0.0, ..r.clone() }).collect::<Vec<_>>();
        assert_eq!(strip(&a), strip(&b));
        assert_eq!((a[4].n, a[4].mode), (4, ReorderMode::Trailing));
    }

    #[test]
    fn zero_timeout_records_timeouts() {
        let rows = bench(Family::EntangledQft, 6..=6, &[ReorderMode::None], Duration::ZERO).unwrap();
        assert_eq!(rows[0].status, RowStatus::Timeout);
        assert!(all_timed_out(&rows));
        let json = serde_json::to_value(&rows[0]).unwrap();
        assert_eq!(json["status"], "timeout");
        assert!(json["peak_nodes"].is_null());
    }

    #[test]
    fn too_few_qubits() {
        assert!(matches!(
            bench(Family::Qpe, 1..=3, &[ReorderMode::All], DEFAULT_TIMEOUT),
            Err(BenchError::TooFewQubits { .. })
        ));
    }

    #[test]
    fn phase_numerator_pattern() {
        assert_eq!(bench_phase_numerator(1), 1);
        assert_eq!(bench_phase_numerator(4), 0b0101);
        assert_eq!(bench_phase_numerator(5), 0b10101);
        assert_eq!(bench_phase_numerator(64), 0x5555_5555_5555_5555);
    }

    #[test]
    fn table_is_aligned() {
        let rows = bench(Family::Qpe, 3..=3, &[ReorderMode::None, ReorderMode::All], DEFAULT_TIMEOUT).unwrap();
        let text = render_table(&rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].contains("peak_nodes"));
        assert_eq!(lines[1].len(), lines[2].len());
    }
}
