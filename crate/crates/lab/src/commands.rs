use std::f64::consts::PI;

use coupler_core::analysis::{
    gate_time, relative_phase_pattern, scan_times, schmidt_register, truth_table, GateTimeSpec,
};
use coupler_core::coupler::{algebra_check, verify_factorization, SignConvention};
use coupler_core::gates::{
    compose, control_c_phase, control_phase_shift, one_qubit_phase, product_state,
    relative_phase_2, relative_phase_3, relative_phase_3_parity_holds, swap_gate, QubitGate,
};
use coupler_core::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{check_tolerance, parse_couplings, Format, RunArgs};
use crate::report::{emit, pair, to_csv, Report};
use crate::CliError;

/// Outcome of a subcommand that ran to completion.
pub struct Verdict {
    pub passed: bool,
    pub summary: String,
}

fn publish<C: Serialize, R: Serialize, Row: Serialize>(
    report: &Report<C, R>,
    csv_rows: &[Row],
    format: Format,
    args: &RunArgs,
) -> Result<(), CliError> {
    let text = match format {
        Format::Json => report.to_json()?,
        Format::Csv => to_csv(csv_rows)?,
    };
    emit(&text, args.out.as_deref())
}

fn collective(g: &[f64]) -> f64 {
    g.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Serialize)]
struct BlockRow {
    excitation: usize,
    distance: f64,
}

#[derive(Serialize)]
struct AlgebraSummary {
    commutator_residual: f64,
    raising_residual: f64,
    lowering_residual: f64,
    relative_residual: f64,
    sign: &'static str,
}

#[derive(Serialize)]
struct VerifyResults {
    sqrt_gamma: f64,
    singularity_margin: f64,
    blocks: Vec<BlockRow>,
    algebra: AlgebraSummary,
}

pub fn verify(args: &RunArgs) -> Result<Verdict, CliError> {
    let config = args.resolve(0.7, 3, Some(1.0), 1e-8)?;
    let params = config.params()?;
    let t = config.time.unwrap_or(1.0);
    let layout = params.layout();
    let factorization = verify_factorization(&params, layout, t, config.tol)?;
    let algebra = algebra_check(&params, layout, t)?;
    let passed = factorization.passed();
    let max_error = factorization.max_block_distance;
    let blocks: Vec<BlockRow> = factorization
        .blocks
        .iter()
        .map(|b| BlockRow {
            excitation: b.excitation,
            distance: b.distance,
        })
        .collect();
    let results = VerifyResults {
        sqrt_gamma: factorization.sqrt_gamma,
        singularity_margin: factorization.singularity_margin,
        blocks,
        algebra: AlgebraSummary {
            commutator_residual: algebra.commutator_residual,
            raising_residual: algebra.raising_residual,
            lowering_residual: algebra.lowering_residual,
            relative_residual: algebra.relative_residual(),
            sign: match algebra.sign {
                SignConvention::AsWritten => "as-written",
                SignConvention::Reversed => "reversed",
            },
        },
    };
    let format = config.format;
    let report = Report::new("verify", config, results, max_error, passed);
    publish(&report, &report.results.blocks, format, args)?;
    Ok(Verdict {
        passed,
        summary: format!("max block distance {max_error:e}"),
    })
}

#[derive(Serialize)]
struct TableRow {
    input: String,
    phase: [f64; 2],
    expected: [f64; 2],
    fidelity: f64,
}

#[derive(Serialize)]
struct TableCsvRow {
    input: String,
    phase_re: f64,
    phase_im: f64,
    fidelity: f64,
}

#[derive(Serialize)]
struct GateTimeSummary {
    k: u32,
    m: i64,
    c_effective: f64,
}

impl From<GateTimeSpec> for GateTimeSummary {
    fn from(spec: GateTimeSpec) -> Self {
        Self {
            k: spec.k,
            m: spec.m,
            c_effective: spec.c_effective,
        }
    }
}

#[derive(Serialize)]
struct TableResults {
    t: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    gate_time: Option<GateTimeSummary>,
    leakage: f64,
    rows: Vec<TableRow>,
}

fn bit_string(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

pub fn truth_table_cmd(args: &RunArgs) -> Result<Verdict, CliError> {
    let g = parse_couplings(&args.g, args.n_outer)?;
    let k = args.k.unwrap_or(1);
    let default_w = collective(&g) / (2.0 * f64::from(k.max(1)));
    let mut config = args.resolve(default_w, args.n_outer + 1, None, 1e-9)?;
    let params = config.params()?;
    let (t, spec) = match config.time {
        Some(t) => (t, None),
        None => {
            let spec = gate_time(&params, k)?;
            config.k = Some(k);
            (spec.t, Some(spec))
        }
    };
    let table = truth_table(&params, params.layout(), t)?;
    let phase_error = table.max_phase_error(relative_phase_pattern);
    let max_error = phase_error
        .max(1.0 - table.min_fidelity())
        .max(table.leakage);
    let passed = table.matches(relative_phase_pattern, config.tol);
    let rows: Vec<TableRow> = table
        .rows
        .iter()
        .map(|row| TableRow {
            input: bit_string(&row.input),
            phase: pair(row.phase),
            expected: pair(relative_phase_pattern(&row.input)),
            fidelity: row.fidelity,
        })
        .collect();
    let csv_rows: Vec<TableCsvRow> = rows
        .iter()
        .map(|row| TableCsvRow {
            input: row.input.clone(),
            phase_re: row.phase[0],
            phase_im: row.phase[1],
            fidelity: row.fidelity,
        })
        .collect();
    let format = config.format;
    let results = TableResults {
        t,
        gate_time: spec.map(Into::into),
        leakage: table.leakage,
        rows,
    };
    let report = Report::new("truth-table", config, results, max_error, passed);
    publish(&report, &csv_rows, format, args)?;
    Ok(Verdict {
        passed,
        summary: format!("{} rows at t = {t}, max error {max_error:e}", csv_rows.len()),
    })
}

#[derive(Serialize)]
struct HitRow {
    t: f64,
    label: String,
    distance: f64,
    leakage: f64,
}

#[derive(Serialize)]
struct ScanResults {
    t_min: f64,
    t_max: f64,
    steps: usize,
    hits: Vec<HitRow>,
}

pub fn scan(args: &RunArgs, t_min: f64, t_max: f64, steps: usize) -> Result<Verdict, CliError> {
    let g = parse_couplings(&args.g, args.n_outer)?;
    let config = args.resolve(collective(&g) / 2.0, args.n_outer + 1, None, 1e-2)?;
    let params = config.params()?;
    let hits: Vec<HitRow> = scan_times(&params, params.layout(), t_min, t_max, steps, config.tol)?
        .into_iter()
        .map(|hit| HitRow {
            t: hit.t,
            label: hit.label,
            distance: hit.distance,
            leakage: hit.leakage,
        })
        .collect();
    let max_error = hits.iter().map(|h| h.distance).fold(0.0, f64::max);
    let count = hits.len();
    let format = config.format;
    let results = ScanResults {
        t_min,
        t_max,
        steps,
        hits,
    };
    let report = Report::new("scan", config, results, max_error, true);
    publish(&report, &report.results.hits, format, args)?;
    Ok(Verdict {
        passed: true,
        summary: format!("{count} hits"),
    })
}

pub const DICHOTOMY_SEED: u64 = 5;
pub const DICHOTOMY_SAMPLES: usize = 100;
const MIN_AMPLITUDE: f64 = 0.1;

#[derive(Serialize)]
struct GateEntry {
    label: String,
    qubits: usize,
    matrix: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
struct GateCsvRow {
    gate: String,
    row: usize,
    col: usize,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct Dichotomy {
    samples: usize,
    seed: u64,
    relative_2_max_second: f64,
    relative_3_max_second: f64,
    control_c_min_second: f64,
    /// Largest shortfall of `σ₂` below its floor `2|αβγδ|`.
    control_c_bound_shortfall: f64,
}

#[derive(Serialize)]
struct GateChecks {
    decomposition_distance: f64,
    parity_self_test: bool,
    dichotomy: Dichotomy,
}

#[derive(Serialize)]
struct GatesResults {
    gates: Vec<GateEntry>,
    checks: GateChecks,
}

fn random_qubit(rng: &mut ChaCha8Rng) -> (C64, C64) {
    let upper = (1.0 - MIN_AMPLITUDE * MIN_AMPLITUDE).sqrt();
    let zero = rng.random_range(MIN_AMPLITUDE..upper);
    let one = (1.0 - zero * zero).sqrt();
    (
        C64::from_polar(zero, rng.random_range(0.0..2.0 * PI)),
        C64::from_polar(one, rng.random_range(0.0..2.0 * PI)),
    )
}

fn max_second(gate: &QubitGate, inputs: &[Vec<(C64, C64)>]) -> Result<f64, CliError> {
    let mut worst = 0.0f64;
    for qubits in inputs {
        let output = gate.apply(&product_state(qubits))?;
        for cut in 1..gate.qubit_count() {
            worst = worst.max(schmidt_register(&output, cut)?.second());
        }
    }
    Ok(worst)
}

fn dichotomy(tol: f64) -> Result<(Dichotomy, bool), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(DICHOTOMY_SEED);
    let pairs: Vec<Vec<(C64, C64)>> = (0..DICHOTOMY_SAMPLES)
        .map(|_| vec![random_qubit(&mut rng), random_qubit(&mut rng)])
        .collect();
    let triples: Vec<Vec<(C64, C64)>> = (0..DICHOTOMY_SAMPLES)
        .map(|_| (0..3).map(|_| random_qubit(&mut rng)).collect())
        .collect();
    let relative_2 = max_second(&relative_phase_2(PI), &pairs)?;
    let relative_3 = max_second(&relative_phase_3(), &triples)?;
    let cz = control_c_phase();
    let mut min_second = f64::INFINITY;
    let mut shortfall = 0.0f64;
    for qubits in &pairs {
        let output = cz.apply(&product_state(qubits))?;
        let second = schmidt_register(&output, 1)?.second();
        let floor = 2.0 * (qubits[0].0 * qubits[0].1 * qubits[1].0 * qubits[1].1).norm();
        min_second = min_second.min(second);
        shortfall = shortfall.max(floor - second);
    }
    let passed = relative_2 <= tol && relative_3 <= tol && min_second > tol && shortfall <= tol;
    Ok((
        Dichotomy {
            samples: DICHOTOMY_SAMPLES,
            seed: DICHOTOMY_SEED,
            relative_2_max_second: relative_2,
            relative_3_max_second: relative_3,
            control_c_min_second: min_second,
            control_c_bound_shortfall: shortfall.max(0.0),
        },
        passed,
    ))
}

#[derive(Serialize)]
pub struct GatesConfig {
    theta: f64,
    tol: f64,
    format: Format,
}

pub fn gates(args: &RunArgs, theta: f64) -> Result<Verdict, CliError> {
    let tol = check_tolerance(args.tol.unwrap_or(1e-10))?;
    if !theta.is_finite() {
        return Err(CliError::Config(format!("--theta must be finite, got {theta}")));
    }
    let family = [
        one_qubit_phase(theta),
        control_c_phase(),
        control_phase_shift(),
        relative_phase_2(theta),
        relative_phase_3(),
    ];
    let shift = control_phase_shift();
    let swap = swap_gate();
    let decomposition = compose(&[shift.clone(), swap.clone(), shift, swap])?;
    let decomposition_distance = decomposition.distance(&relative_phase_2(PI))?;
    let parity_self_test = relative_phase_3_parity_holds();
    let (dichotomy, dichotomy_passed) = dichotomy(tol)?;
    let passed = decomposition_distance <= tol && parity_self_test && dichotomy_passed;
    let max_error = decomposition_distance
        .max(dichotomy.relative_2_max_second)
        .max(dichotomy.relative_3_max_second)
        .max(dichotomy.control_c_bound_shortfall);

    let entries: Vec<GateEntry> = family
        .iter()
        .map(|gate| {
            let m = gate.matrix();
            GateEntry {
                label: gate.label().to_string(),
                qubits: gate.qubit_count(),
                matrix: (0..m.nrows())
                    .map(|r| (0..m.ncols()).map(|c| pair(m[(r, c)])).collect())
                    .collect(),
            }
        })
        .collect();
    let csv_rows: Vec<GateCsvRow> = entries
        .iter()
        .flat_map(|entry| {
            entry.matrix.iter().enumerate().flat_map(move |(row, cells)| {
                cells.iter().enumerate().map(move |(col, cell)| GateCsvRow {
                    gate: entry.label.clone(),
                    row,
                    col,
                    re: cell[0],
                    im: cell[1],
                })
            })
        })
        .collect();
    let config = GatesConfig {
        theta,
        tol,
        format: args.format,
    };
    let results = GatesResults {
        gates: entries,
        checks: GateChecks {
            decomposition_distance,
            parity_self_test,
            dichotomy,
        },
    };
    let report = Report::new("gates", config, results, max_error, passed);
    publish(&report, &csv_rows, args.format, args)?;
    Ok(Verdict {
        passed,
        summary: format!("gate checks max error {max_error:e}"),
    })
}
