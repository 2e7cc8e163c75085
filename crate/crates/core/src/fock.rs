//! Truncated multimode Fock space.
//!
//! Every mode keeps occupations `0..=n_max`. Flat indices put mode 0 (the
//! central waveguide) in the most significant position, so the occupation
//! tuple `(n_0, …, n_{M−1})` lives at `Σ n_k · d^{M−1−k}` with `d = n_max + 1`.
//! Ladder-operator matrix elements that would leave the truncated range are
//! dropped.

use alloc::vec;
use alloc::vec::Vec;

use crate::{CMatrix, CVector, Error, Result, C64};

/// Which tensor factor is most significant in the flat index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TensorOrdering {
    /// Mode 0 (the central mode `a`) first, outer modes `b_1..b_N` after it.
    CentralMostSignificant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModeLayout {
    mode_count: usize,
    cutoff: usize,
}

impl ModeLayout {
    /// `mode_count` modes with `cutoff` Fock levels each. Both must be ≥ 2.
    pub fn new(mode_count: usize, cutoff: usize) -> Result<Self> {
        if mode_count < 2 || cutoff < 2 {
            return Err(Error::InvalidLayout { mode_count, cutoff });
        }
        // d^M must fit comfortably in memory as a dense matrix dimension.
        if cutoff.checked_pow(mode_count as u32).is_none() {
            return Err(Error::InvalidLayout { mode_count, cutoff });
        }
        Ok(Self { mode_count, cutoff })
    }

    /// Layout for a coupler with `n_outer` outer modes truncated at `n_max`.
    pub fn for_coupler(n_outer: usize, n_max: usize) -> Result<Self> {
        Self::new(n_outer + 1, n_max + 1)
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn n_max(&self) -> usize {
        self.cutoff - 1
    }

    pub fn ordering(&self) -> TensorOrdering {
        TensorOrdering::CentralMostSignificant
    }

    /// Total dimension `d^M`.
    pub fn dimension(&self) -> usize {
        self.cutoff.pow(self.mode_count as u32)
    }

    /// Stride of `mode` in the flat index.
    fn stride(&self, mode: usize) -> usize {
        self.cutoff.pow((self.mode_count - 1 - mode) as u32)
    }

    pub fn flat_index(&self, occupations: &[usize]) -> Result<usize> {
        if occupations.len() != self.mode_count {
            return Err(Error::LengthMismatch {
                expected: self.mode_count,
                actual: occupations.len(),
            });
        }
        let mut index = 0;
        for (mode, &n) in occupations.iter().enumerate() {
            if n > self.n_max() {
                return Err(Error::OccupationOutOfRange {
                    mode,
                    occupation: n,
                    n_max: self.n_max(),
                });
            }
            index = index * self.cutoff + n;
        }
        Ok(index)
    }

    /// Occupation of `mode` in the basis state at `index`.
    pub fn occupation(&self, index: usize, mode: usize) -> usize {
        (index / self.stride(mode)) % self.cutoff
    }

    pub fn occupations(&self, index: usize) -> Vec<usize> {
        (0..self.mode_count)
            .map(|mode| self.occupation(index, mode))
            .collect()
    }

    /// Total excitation `K = Σ n_k` of the basis state at `index`.
    pub fn excitation(&self, index: usize) -> usize {
        let mut rest = index;
        let mut total = 0;
        for _ in 0..self.mode_count {
            total += rest % self.cutoff;
            rest /= self.cutoff;
        }
        total
    }

    fn check_mode(&self, mode: usize) -> Result<()> {
        if mode >= self.mode_count {
            Err(Error::ModeOutOfRange {
                mode,
                mode_count: self.mode_count,
            })
        } else {
            Ok(())
        }
    }
}

/// Complex amplitudes over the truncated Fock basis of a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: CVector,
    layout: ModeLayout,
}

impl StateVector {
    /// Wraps an arbitrary vector; no normalization is enforced.
    pub fn from_amplitudes(layout: ModeLayout, amplitudes: CVector) -> Result<Self> {
        if amplitudes.len() != layout.dimension() {
            return Err(Error::LengthMismatch {
                expected: layout.dimension(),
                actual: amplitudes.len(),
            });
        }
        Ok(Self { amplitudes, layout })
    }

    pub fn zeros(layout: ModeLayout) -> Self {
        Self {
            amplitudes: CVector::zeros(layout.dimension()),
            layout,
        }
    }

    pub fn layout(&self) -> ModeLayout {
        self.layout
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn amplitude(&self, occupations: &[usize]) -> Result<C64> {
        Ok(self.amplitudes[self.layout.flat_index(occupations)?])
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner_product(&self, other: &StateVector) -> Result<C64> {
        if self.layout != other.layout {
            return Err(Error::DimensionMismatch {
                left: (self.amplitudes.len(), 1),
                right: (other.amplitudes.len(), 1),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn is_normalized(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }
}

/// Dense operator on the truncated Fock basis of a layout.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: CMatrix,
    layout: ModeLayout,
}

impl DenseOperator {
    pub fn new(layout: ModeLayout, matrix: CMatrix) -> Result<Self> {
        let dim = layout.dimension();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                left: (dim, dim),
                right: matrix.shape(),
            });
        }
        Ok(Self { matrix, layout })
    }

    pub fn identity(layout: ModeLayout) -> Self {
        let dim = layout.dimension();
        Self {
            matrix: CMatrix::identity(dim, dim),
            layout,
        }
    }

    pub fn zeros(layout: ModeLayout) -> Self {
        let dim = layout.dimension();
        Self {
            matrix: CMatrix::zeros(dim, dim),
            layout,
        }
    }

    pub fn layout(&self) -> ModeLayout {
        self.layout
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    fn check_same_layout(&self, other: &DenseOperator) -> Result<()> {
        if self.layout != other.layout {
            return Err(Error::DimensionMismatch {
                left: self.matrix.shape(),
                right: other.matrix.shape(),
            });
        }
        Ok(())
    }

    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        if self.layout != state.layout {
            return Err(Error::DimensionMismatch {
                left: self.matrix.shape(),
                right: (state.amplitudes.len(), 1),
            });
        }
        Ok(StateVector {
            amplitudes: &self.matrix * &state.amplitudes,
            layout: self.layout,
        })
    }

    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator {
            matrix: self.matrix.adjoint(),
            layout: self.layout,
        }
    }

    /// `self · other`.
    pub fn matmul(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same_layout(other)?;
        Ok(DenseOperator {
            matrix: &self.matrix * &other.matrix,
            layout: self.layout,
        })
    }

    pub fn add(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same_layout(other)?;
        Ok(DenseOperator {
            matrix: &self.matrix + &other.matrix,
            layout: self.layout,
        })
    }

    pub fn sub(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same_layout(other)?;
        Ok(DenseOperator {
            matrix: &self.matrix - &other.matrix,
            layout: self.layout,
        })
    }

    pub fn scale(&self, factor: C64) -> DenseOperator {
        DenseOperator {
            matrix: &self.matrix * factor,
            layout: self.layout,
        }
    }

    /// `[self, other] = self·other − other·self`.
    pub fn commutator(&self, other: &DenseOperator) -> Result<DenseOperator> {
        self.check_same_layout(other)?;
        Ok(DenseOperator {
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
            layout: self.layout,
        })
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Sub-matrix on the given flat indices (rows and columns).
    pub fn restrict(&self, indices: &[usize]) -> CMatrix {
        restrict(&self.matrix, indices)
    }

    /// Frobenius norm of all entries coupling different excitation blocks.
    pub fn off_block_norm(&self) -> f64 {
        let dim = self.layout.dimension();
        let excitation: Vec<usize> = (0..dim).map(|i| self.layout.excitation(i)).collect();
        let mut sum = 0.0;
        for c in 0..dim {
            for r in 0..dim {
                if excitation[r] != excitation[c] {
                    sum += self.matrix[(r, c)].norm_sqr();
                }
            }
        }
        libm::sqrt(sum)
    }
}

/// Sub-matrix of `matrix` on rows and columns `indices`.
pub(crate) fn restrict(matrix: &CMatrix, indices: &[usize]) -> CMatrix {
    CMatrix::from_fn(indices.len(), indices.len(), |r, c| {
        matrix[(indices[r], indices[c])]
    })
}

/// Unit vector at the flat index of `occupations`.
pub fn basis_state(layout: ModeLayout, occupations: &[usize]) -> Result<StateVector> {
    let index = layout.flat_index(occupations)?;
    let mut state = StateVector::zeros(layout);
    state.amplitudes[index] = C64::new(1.0, 0.0);
    Ok(state)
}

/// `a_mode` with `a|n⟩ = √n |n−1⟩` on that factor, identity elsewhere.
pub fn annihilation(layout: ModeLayout, mode: usize) -> Result<DenseOperator> {
    layout.check_mode(mode)?;
    let dim = layout.dimension();
    let stride = layout.stride(mode);
    let mut matrix = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let n = layout.occupation(col, mode);
        if n > 0 {
            matrix[(col - stride, col)] = C64::new(libm::sqrt(n as f64), 0.0);
        }
    }
    Ok(DenseOperator { matrix, layout })
}

/// `a_mode†`; the `n_max → n_max + 1` element is absent.
pub fn creation(layout: ModeLayout, mode: usize) -> Result<DenseOperator> {
    Ok(annihilation(layout, mode)?.adjoint())
}

/// `a_mode† a_mode`.
pub fn number_operator(layout: ModeLayout, mode: usize) -> Result<DenseOperator> {
    layout.check_mode(mode)?;
    let dim = layout.dimension();
    let diagonal =
        CVector::from_fn(dim, |i, _| C64::new(layout.occupation(i, mode) as f64, 0.0));
    Ok(DenseOperator {
        matrix: CMatrix::from_diagonal(&diagonal),
        layout,
    })
}

/// `Σ_k a_k† a_k`.
pub fn total_number(layout: ModeLayout) -> DenseOperator {
    let dim = layout.dimension();
    let diagonal = CVector::from_fn(dim, |i, _| C64::new(layout.excitation(i) as f64, 0.0));
    DenseOperator {
        matrix: CMatrix::from_diagonal(&diagonal),
        layout,
    }
}

/// Transfer operator `a_to† a_from`, built entry by entry.
///
/// Equals `creation(to) · annihilation(from)` in the truncated space.
pub fn hopping(layout: ModeLayout, to: usize, from: usize) -> Result<DenseOperator> {
    layout.check_mode(to)?;
    layout.check_mode(from)?;
    if to == from {
        return number_operator(layout, to);
    }
    let dim = layout.dimension();
    let (to_stride, from_stride) = (layout.stride(to), layout.stride(from));
    let mut matrix = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let n_from = layout.occupation(col, from);
        let n_to = layout.occupation(col, to);
        if n_from == 0 || n_to == layout.n_max() {
            continue;
        }
        let row = col - from_stride + to_stride;
        let element = libm::sqrt((n_from * (n_to + 1)) as f64);
        matrix[(row, col)] = C64::new(element, 0.0);
    }
    Ok(DenseOperator { matrix, layout })
}

/// Flat indices sharing one total excitation `K`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcitationBlock {
    pub excitation: usize,
    pub indices: Vec<usize>,
}

/// Partition of all flat indices by total excitation, ordered by `K`.
pub fn excitation_blocks(layout: ModeLayout) -> Vec<ExcitationBlock> {
    let max_excitation = layout.mode_count * layout.n_max();
    let mut blocks: Vec<ExcitationBlock> = (0..=max_excitation)
        .map(|excitation| ExcitationBlock {
            excitation,
            indices: vec![],
        })
        .collect();
    for index in 0..layout.dimension() {
        blocks[layout.excitation(index)].indices.push(index);
    }
    blocks
}
