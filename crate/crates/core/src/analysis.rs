//! Reading gates off the coupler: gate times, truth tables, computational
//! sub-blocks of the propagator, time scans and Schmidt diagnostics.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::coupler::{exact_propagator, factorized_propagator, CouplerParams};
use crate::fock::{DenseOperator, ModeLayout, StateVector};
use crate::gates::{
    control_c_phase, control_phase_shift, product_state, relative_phase_2, relative_phase_3,
    swap_gate, QubitGate,
};
use crate::matrix::unitarity_deviation;
use crate::{CMatrix, CVector, Error, Result, C64};

/// Tolerance for deciding that `w·t` is an odd multiple of `π`.
pub const FREE_PHASE_TOL: f64 = 1e-9;

/// Normalization tolerance for Schmidt inputs.
pub const NORMALIZATION_TOL: f64 = 1e-10;

/// An interaction time at which the coupler acts as a phase pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateTimeSpec {
    pub t: f64,
    /// Number of full collective Rabi periods, `G t = 2πk`.
    pub k: u32,
    /// Free phase index, `w t = (2m + 1)π`.
    pub m: i64,
    /// `c` in `t = 2π/(c g)`; equals `√N / k`.
    pub c_effective: f64,
}

/// `t = 2πk/(g√N)`, required to also put the free phase at an odd multiple
/// of `π`.
pub fn gate_time(params: &CouplerParams, k: u32) -> Result<GateTimeSpec> {
    if k == 0 {
        return Err(Error::InvalidArgument("gate-time index k must be positive"));
    }
    if !params.has_equal_couplings() {
        return Err(Error::UnequalCouplings);
    }
    let g = libm::fabs(params.couplings()[0]);
    let collective = g * libm::sqrt(params.n_outer() as f64);
    let t = 2.0 * PI * k as f64 / collective;
    let free_phase = params.w() * t;
    let m = libm::round((free_phase / PI - 1.0) / 2.0);
    let offset = free_phase - (2.0 * m + 1.0) * PI;
    if libm::fabs(offset) > FREE_PHASE_TOL {
        return Err(Error::FreePhaseMismatch { free_phase, offset });
    }
    Ok(GateTimeSpec {
        t,
        k,
        m: m as i64,
        c_effective: 2.0 * PI / (t * g),
    })
}

/// Which propagator a gate is read from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PropagatorKind {
    #[default]
    Exact,
    Factorized,
}

fn propagator(
    params: &CouplerParams,
    layout: ModeLayout,
    t: f64,
    kind: PropagatorKind,
) -> Result<DenseOperator> {
    match kind {
        PropagatorKind::Exact => exact_propagator(params, layout, t),
        PropagatorKind::Factorized => factorized_propagator(params, layout, t),
    }
}

/// Bits of computational input `index` for `modes` modes, mode 0 first.
pub fn input_bits(index: usize, modes: usize) -> Vec<u8> {
    (0..modes)
        .map(|mode| ((index >> (modes - 1 - mode)) & 1) as u8)
        .collect()
}

/// Flat Fock indices of the `2^M` computational states, in register order.
fn computational_indices(layout: ModeLayout) -> Result<Vec<usize>> {
    let modes = layout.mode_count();
    (0..1usize << modes)
        .map(|i| {
            let occupations: Vec<usize> =
                input_bits(i, modes).into_iter().map(usize::from).collect();
            layout.flat_index(&occupations)
        })
        .collect()
}

fn check_truncation(layout: ModeLayout) -> Result<()> {
    if layout.n_max() < layout.mode_count() {
        return Err(Error::TruncationTooSmall {
            n_max: layout.n_max(),
            mode_count: layout.mode_count(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthTableRow {
    /// Occupation of each mode, central mode first.
    pub input: Vec<u8>,
    /// `⟨in|U|in⟩ / |⟨in|U|in⟩|`, zero when the diagonal amplitude vanishes.
    pub phase: C64,
    /// `|⟨in|U|in⟩|`.
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruthTable {
    pub rows: Vec<TruthTableRow>,
    /// Worst input's out-of-subspace amplitude plus off-diagonal
    /// computational amplitude.
    pub leakage: f64,
}

impl TruthTable {
    /// Largest `|phase − expected(input)|` over all rows.
    pub fn max_phase_error(&self, expected: impl Fn(&[u8]) -> C64) -> f64 {
        self.rows
            .iter()
            .map(|row| (row.phase - expected(&row.input)).norm())
            .fold(0.0, f64::max)
    }

    pub fn min_fidelity(&self) -> f64 {
        self.rows
            .iter()
            .map(|row| row.fidelity)
            .fold(f64::INFINITY, f64::min)
    }

    /// Phases match `expected` within `tol`, every fidelity is at least
    /// `1 − tol` and leakage is at most `tol`.
    pub fn matches(&self, expected: impl Fn(&[u8]) -> C64, tol: f64) -> bool {
        self.max_phase_error(expected) <= tol
            && self.min_fidelity() >= 1.0 - tol
            && self.leakage <= tol
    }
}

/// `(−1)^{Σ j}`: the pattern the coupler realises at its gate times.
pub fn relative_phase_pattern(bits: &[u8]) -> C64 {
    let ones: u32 = bits.iter().map(|&b| u32::from(b)).sum();
    if ones % 2 == 1 {
        C64::new(-1.0, 0.0)
    } else {
        C64::new(1.0, 0.0)
    }
}

/// Truth table of the exact propagator on `{0,1}^M`.
pub fn truth_table(params: &CouplerParams, layout: ModeLayout, t: f64) -> Result<TruthTable> {
    truth_table_with(params, layout, t, PropagatorKind::Exact)
}

pub fn truth_table_with(
    params: &CouplerParams,
    layout: ModeLayout,
    t: f64,
    kind: PropagatorKind,
) -> Result<TruthTable> {
    check_truncation(layout)?;
    let u = propagator(params, layout, t, kind)?;
    truth_table_of(&u)
}

/// Truth table of an arbitrary operator on the computational sub-basis.
pub fn truth_table_of(u: &DenseOperator) -> Result<TruthTable> {
    let layout = u.layout();
    check_truncation(layout)?;
    let comp = computational_indices(layout)?;
    let matrix = u.matrix();
    let mut rows = Vec::with_capacity(comp.len());
    let mut leakage = 0.0f64;
    for (i, &col) in comp.iter().enumerate() {
        let diagonal = matrix[(col, col)];
        let fidelity = diagonal.norm();
        let phase = if fidelity > 0.0 {
            diagonal / fidelity
        } else {
            C64::new(0.0, 0.0)
        };
        // Summed directly rather than as 1 − Σ_comp |U|², which cannot
        // resolve amplitudes much below 1e-8.
        let mut outside = 0.0;
        let mut off_diagonal = 0.0;
        for row in 0..layout.dimension() {
            let weight = matrix[(row, col)].norm_sqr();
            if row == col {
                continue;
            }
            if comp.contains(&row) {
                off_diagonal += weight;
            } else {
                outside += weight;
            }
        }
        leakage = leakage.max(libm::sqrt(outside) + libm::sqrt(off_diagonal));
        rows.push(TruthTableRow {
            input: input_bits(i, layout.mode_count()),
            phase,
            fidelity,
        });
    }
    Ok(TruthTable { rows, leakage })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtractedGate {
    /// Computational sub-block of the propagator. Not unitary when
    /// amplitude leaves the computational subspace.
    pub gate: QubitGate,
    /// `‖R†R − I‖_F` of that sub-block `R`.
    pub leakage: f64,
}

/// Restricts the exact propagator to the `2^M` computational states.
pub fn extract_gate(params: &CouplerParams, layout: ModeLayout, t: f64) -> Result<ExtractedGate> {
    extract_gate_with(params, layout, t, PropagatorKind::Exact)
}

pub fn extract_gate_with(
    params: &CouplerParams,
    layout: ModeLayout,
    t: f64,
    kind: PropagatorKind,
) -> Result<ExtractedGate> {
    check_truncation(layout)?;
    let u = propagator(params, layout, t, kind)?;
    let comp = computational_indices(layout)?;
    let restricted = u.restrict(&comp);
    let leakage = unitarity_deviation(&restricted).unwrap_or(f64::INFINITY);
    let gate = QubitGate::from_matrix_unchecked(layout.mode_count(), restricted, "extracted")?;
    Ok(ExtractedGate { gate, leakage })
}

/// Named gates a coupler with `qubit_count` modes is compared against.
pub fn family_gates(qubit_count: usize) -> Vec<QubitGate> {
    let mut family = match qubit_count {
        2 => vec![
            relative_phase_2(PI),
            control_c_phase(),
            control_phase_shift(),
            swap_gate(),
        ],
        3 => vec![relative_phase_3()],
        _ => vec![],
    };
    family.push(QubitGate::identity(qubit_count));
    family
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanHit {
    pub t: f64,
    pub label: alloc::string::String,
    /// Phase-aligned Frobenius distance to the matched gate.
    pub distance: f64,
    pub leakage: f64,
}

/// Evaluates [`extract_gate`] on a uniform grid over `[t_min, t_max]` and
/// keeps the points whose leakage and distance to the closest family gate
/// are both within `tol`. Hits are ordered by `t`.
pub fn scan_times(
    params: &CouplerParams,
    layout: ModeLayout,
    t_min: f64,
    t_max: f64,
    steps: usize,
    tol: f64,
) -> Result<Vec<ScanHit>> {
    if t_min >= t_max || !t_min.is_finite() || !t_max.is_finite() {
        return Err(Error::InvalidArgument("scan range needs t_min < t_max"));
    }
    if steps < 2 {
        return Err(Error::InvalidArgument("scan needs at least two grid points"));
    }
    let family = family_gates(layout.mode_count());
    let spacing = (t_max - t_min) / (steps - 1) as f64;
    let mut hits = Vec::new();
    for i in 0..steps {
        let t = t_min + spacing * i as f64;
        let extracted = extract_gate(params, layout, t)?;
        if extracted.leakage > tol {
            continue;
        }
        let mut best: Option<(f64, &QubitGate)> = None;
        for gate in &family {
            let distance =
                crate::matrix::phase_distance(extracted.gate.matrix(), gate.matrix())?.distance;
            if best.is_none_or(|(d, _)| distance < d) {
                best = Some((distance, gate));
            }
        }
        if let Some((distance, gate)) = best {
            if distance <= tol {
                hits.push(ScanHit {
                    t,
                    label: gate.label().into(),
                    distance,
                    leakage: extracted.leakage,
                });
            }
        }
    }
    Ok(hits)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtDecomposition {
    /// Descending.
    pub coefficients: Vec<f64>,
    pub entropy_bits: f64,
}

impl SchmidtDecomposition {
    /// Number of coefficients above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.coefficients.iter().filter(|&&s| s > tol).count()
    }

    /// Second-largest coefficient, zero for rank-one splits.
    pub fn second(&self) -> f64 {
        self.coefficients.get(1).copied().unwrap_or(0.0)
    }
}

/// Schmidt decomposition of a pure state on subsystems of dimensions `dims`,
/// split between factors `..cut` and `cut..`.
pub fn schmidt_dims(amplitudes: &CVector, dims: &[usize], cut: usize) -> Result<SchmidtDecomposition> {
    if cut == 0 || cut >= dims.len() {
        return Err(Error::InvalidCut {
            cut,
            parts: dims.len(),
        });
    }
    let left: usize = dims[..cut].iter().product();
    let right: usize = dims[cut..].iter().product();
    if amplitudes.len() != left * right {
        return Err(Error::LengthMismatch {
            expected: left * right,
            actual: amplitudes.len(),
        });
    }
    let norm = amplitudes.norm();
    if libm::fabs(norm - 1.0) > NORMALIZATION_TOL {
        return Err(Error::NotNormalized { norm });
    }
    // Row-major reshape: the left factor is the more significant index.
    let reshaped = CMatrix::from_fn(left, right, |r, c| amplitudes[r * right + c]);
    let mut coefficients: Vec<f64> = reshaped
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    coefficients.sort_by(|a, b| b.total_cmp(a));
    let entropy_bits = coefficients
        .iter()
        .map(|s| s * s)
        .filter(|&p| p > 0.0)
        .map(|p| -p * libm::log2(p))
        .sum::<f64>()
        .max(0.0);
    Ok(SchmidtDecomposition {
        coefficients,
        entropy_bits,
    })
}

/// Schmidt decomposition of a Fock-space state across modes `..cut | cut..`.
pub fn schmidt(state: &StateVector, cut: usize) -> Result<SchmidtDecomposition> {
    let layout = state.layout();
    let dims = vec![layout.cutoff(); layout.mode_count()];
    schmidt_dims(state.amplitudes(), &dims, cut)
}

/// Schmidt decomposition of a qubit-register state.
pub fn schmidt_register(amplitudes: &CVector, cut: usize) -> Result<SchmidtDecomposition> {
    let qubits = amplitudes.len().trailing_zeros() as usize;
    if 1usize << qubits != amplitudes.len() {
        return Err(Error::InvalidArgument("register length must be a power of two"));
    }
    schmidt_dims(amplitudes, &vec![2; qubits], cut)
}

/// Extremes of the second Schmidt coefficient of `gate`'s outputs over a
/// set of product inputs and every contiguous bipartition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementProfile {
    pub samples: usize,
    pub max_second_coefficient: f64,
    pub min_second_coefficient: f64,
    pub max_entropy_bits: f64,
}

pub fn entanglement_profile(
    gate: &QubitGate,
    inputs: &[Vec<(C64, C64)>],
) -> Result<EntanglementProfile> {
    let mut profile = EntanglementProfile {
        samples: inputs.len(),
        max_second_coefficient: 0.0,
        min_second_coefficient: f64::INFINITY,
        max_entropy_bits: 0.0,
    };
    for qubits in inputs {
        if qubits.len() != gate.qubit_count() {
            return Err(Error::LengthMismatch {
                expected: gate.qubit_count(),
                actual: qubits.len(),
            });
        }
        let output = gate.apply(&product_state(qubits))?;
        for cut in 1..gate.qubit_count() {
            let split = schmidt_register(&output, cut)?;
            let second = split.second();
            profile.max_second_coefficient = profile.max_second_coefficient.max(second);
            profile.min_second_coefficient = profile.min_second_coefficient.min(second);
            profile.max_entropy_bits = profile.max_entropy_bits.max(split.entropy_bits);
        }
    }
    Ok(profile)
}
