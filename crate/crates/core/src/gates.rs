//! Phase gates on qubit registers.
//!
//! Basis order is `|j₁ j₂ … j_n⟩` with `j₁` most significant, the same
//! convention as [`ModeLayout`](crate::fock::ModeLayout) with qubit 1 on the
//! central mode.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::matrix::{phase_distance, unitarity_deviation};
use crate::{CMatrix, CVector, Error, Result, C64};

/// Unitarity tolerance enforced by [`QubitGate::new`].
pub const UNITARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QubitGate {
    qubit_count: usize,
    matrix: CMatrix,
    label: String,
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

fn phase(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

fn bit(index: usize, qubit: usize, qubit_count: usize) -> usize {
    (index >> (qubit_count - 1 - qubit)) & 1
}

impl QubitGate {
    /// Checks shape and unitarity (within [`UNITARY_TOL`]).
    pub fn new(qubit_count: usize, matrix: CMatrix, label: impl Into<String>) -> Result<Self> {
        let gate = Self::from_matrix_unchecked(qubit_count, matrix, label)?;
        let deviation = unitarity_deviation(&gate.matrix).unwrap_or(f64::INFINITY);
        if deviation > UNITARY_TOL {
            return Err(Error::NotUnitary { deviation });
        }
        Ok(gate)
    }

    /// Shape check only. Used for restrictions of propagators, which are not
    /// unitary away from the gate times.
    pub fn from_matrix_unchecked(
        qubit_count: usize,
        matrix: CMatrix,
        label: impl Into<String>,
    ) -> Result<Self> {
        let dim = 1usize
            .checked_shl(qubit_count as u32)
            .ok_or(Error::InvalidArgument("qubit count too large"))?;
        if qubit_count == 0 || matrix.shape() != (dim, dim) {
            return Err(Error::DimensionMismatch {
                left: (dim, dim),
                right: matrix.shape(),
            });
        }
        Ok(Self {
            qubit_count,
            matrix,
            label: label.into(),
        })
    }

    fn diagonal_from(qubit_count: usize, label: &str, entry: impl Fn(usize) -> C64) -> Self {
        let dim = 1 << qubit_count;
        let diagonal = CVector::from_fn(dim, |i, _| entry(i));
        Self {
            qubit_count,
            matrix: CMatrix::from_diagonal(&diagonal),
            label: label.to_string(),
        }
    }

    pub fn identity(qubit_count: usize) -> Self {
        Self::diagonal_from(qubit_count, "identity", |_| one())
    }

    pub fn qubit_count(&self) -> usize {
        self.qubit_count
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn diagonal(&self) -> Vec<C64> {
        self.matrix.diagonal().iter().cloned().collect()
    }

    /// Frobenius norm of everything off the diagonal.
    pub fn off_diagonal_mass(&self) -> f64 {
        let mut sum = 0.0;
        for c in 0..self.dimension() {
            for r in 0..self.dimension() {
                if r != c {
                    sum += self.matrix[(r, c)].norm_sqr();
                }
            }
        }
        libm::sqrt(sum)
    }

    pub fn is_diagonal(&self) -> bool {
        self.off_diagonal_mass() == 0.0
    }

    pub fn apply(&self, state: &CVector) -> Result<CVector> {
        if state.len() != self.dimension() {
            return Err(Error::LengthMismatch {
                expected: self.dimension(),
                actual: state.len(),
            });
        }
        Ok(&self.matrix * state)
    }

    /// Equality up to a global phase: `(distance ≤ tol, optimal phase)`.
    pub fn equal_up_to_phase(&self, other: &QubitGate, tol: f64) -> Result<(bool, f64)> {
        let aligned = phase_distance(&self.matrix, &other.matrix)?;
        Ok((aligned.distance <= tol, aligned.phase))
    }

    /// Plain Frobenius distance, no phase alignment.
    pub fn distance(&self, other: &QubitGate) -> Result<f64> {
        if self.matrix.shape() != other.matrix.shape() {
            return Err(Error::DimensionMismatch {
                left: self.matrix.shape(),
                right: other.matrix.shape(),
            });
        }
        Ok((&self.matrix - &other.matrix).norm())
    }
}

/// `|0⟩ → |0⟩`, `|1⟩ → e^{iθ}|1⟩`.
pub fn one_qubit_phase(theta: f64) -> QubitGate {
    QubitGate::diagonal_from(1, "phase", |i| if i == 1 { phase(theta) } else { one() })
}

/// `|m⟩|n⟩ → e^{imnπ}|m⟩|n⟩`, i.e. `diag(1, 1, 1, −1)`.
pub fn control_c_phase() -> QubitGate {
    QubitGate::diagonal_from(2, "control-c-phase", |i| if i == 3 { -one() } else { one() })
}

/// `|m⟩|n⟩ → e^{imπ}|m⟩|n⟩`, i.e. `diag(1, 1, −1, −1)`.
pub fn control_phase_shift() -> QubitGate {
    QubitGate::diagonal_from(2, "control-phase-shift", |i| {
        if bit(i, 0, 2) == 1 {
            -one()
        } else {
            one()
        }
    })
}

pub fn swap_gate() -> QubitGate {
    let mut matrix = CMatrix::zeros(4, 4);
    matrix[(0, 0)] = one();
    matrix[(1, 2)] = one();
    matrix[(2, 1)] = one();
    matrix[(3, 3)] = one();
    QubitGate {
        qubit_count: 2,
        matrix,
        label: "swap".to_string(),
    }
}

/// Two-qubit relative phase gate: `e^{iθ}` on `|01⟩` and `|10⟩`, identity on
/// the equal states `|00⟩`, `|11⟩`. At `θ = π` this is `e^{iπ(j₁−j₂)}`.
pub fn relative_phase_2(theta: f64) -> QubitGate {
    QubitGate::diagonal_from(2, "relative-phase-2", |i| {
        if bit(i, 0, 2) != bit(i, 1, 2) {
            phase(theta)
        } else {
            one()
        }
    })
}

/// Three-qubit relative phase gate `|j₁j₂j₃⟩ → e^{iπ(j₁−j₂−j₃)}|j₁j₂j₃⟩`.
pub fn relative_phase_3() -> QubitGate {
    QubitGate::diagonal_from(3, "relative-phase-3", |i| {
        let exponent = bit(i, 0, 3) as i32 - bit(i, 1, 3) as i32 - bit(i, 2, 3) as i32;
        if exponent.rem_euclid(2) == 1 {
            -one()
        } else {
            one()
        }
    })
}

/// Checks that [`relative_phase_3`] is `−1` exactly on odd-parity states.
pub fn relative_phase_3_parity_holds() -> bool {
    relative_phase_3()
        .diagonal()
        .iter()
        .enumerate()
        .all(|(i, &z)| {
            let expected = if i.count_ones() % 2 == 1 { -one() } else { one() };
            z == expected
        })
}

/// Product in list order, so the last gate acts first.
pub fn compose(gates: &[QubitGate]) -> Result<QubitGate> {
    let (first, rest) = gates
        .split_first()
        .ok_or(Error::InvalidArgument("cannot compose an empty gate list"))?;
    let mut matrix = first.matrix.clone();
    let mut label = first.label.clone();
    for gate in rest {
        if gate.qubit_count != first.qubit_count {
            return Err(Error::DimensionMismatch {
                left: matrix.shape(),
                right: gate.matrix.shape(),
            });
        }
        matrix *= &gate.matrix;
        label.push('*');
        label.push_str(&gate.label);
    }
    Ok(QubitGate {
        qubit_count: first.qubit_count,
        matrix,
        label,
    })
}

/// Product state from per-qubit amplitude pairs `(α, β)` for `α|0⟩ + β|1⟩`,
/// first pair most significant.
pub fn product_state(qubits: &[(C64, C64)]) -> CVector {
    let mut state = CVector::from_element(1, one());
    for &(zero, one_amp) in qubits {
        let factor = CVector::from_row_slice(&[zero, one_amp]);
        state = state.kronecker(&factor);
    }
    state
}
