//! Bandgap coupler Hamiltonian, its exact propagator, and the symmetric
//! su(2) product form of that propagator.
//!
//! With `ε = −it`, `G² = Σ g_j²` and `√γ = |t| G` the propagator factorises as
//!
//! ```text
//! U(t) = e^{εw N̂} · e^{εf L} · e^{εh R} · e^{εf L}
//! L = Σ g_j a†b_j,  R = Σ g_j a b_j†
//! f = tan(√γ/2)/√γ,  h = sin(√γ)/√γ
//! ```
//!
//! Every operator here conserves the total excitation `K`, so all matrices are
//! block diagonal over [`excitation_blocks`]. Blocks with `K ≤ n_max` are
//! represented without truncation error; only those are used for
//! verification. Exponentials are taken block by block.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::fock::{excitation_blocks, hopping, restrict, total_number, DenseOperator, ModeLayout};
use crate::matrix::{commutator, expm_general, expm_hermitian};
use crate::{CMatrix, Error, Result, C64};

/// Default refusal radius around the poles of `f` at `√γ ∈ {π, 3π, …}`.
pub const SINGULARITY_GUARD: f64 = 1e-6;

/// Below this `√γ`, `f` and `h` are evaluated by their Taylor series.
const SERIES_THRESHOLD: f64 = 1e-4;

#[derive(Debug, Clone, PartialEq)]
pub struct CouplerParams {
    w: f64,
    couplings: Vec<f64>,
    n_max: usize,
}

impl CouplerParams {
    /// Central frequency `w`, couplings `g_1..g_N` and per-mode truncation.
    pub fn new(w: f64, couplings: Vec<f64>, n_max: usize) -> Result<Self> {
        if couplings.is_empty() {
            return Err(Error::InvalidParams("at least one outer mode is required"));
        }
        if !w.is_finite() || couplings.iter().any(|g| !g.is_finite()) {
            return Err(Error::InvalidParams("frequency and couplings must be finite"));
        }
        if couplings.iter().all(|&g| g == 0.0) {
            return Err(Error::InvalidParams("at least one coupling must be non-zero"));
        }
        if n_max < 1 {
            return Err(Error::InvalidParams("n_max must be at least 1"));
        }
        Ok(Self {
            w,
            couplings,
            n_max,
        })
    }

    /// `n_outer` outer modes, all coupled with the same `g`.
    pub fn equal(n_outer: usize, g: f64, w: f64, n_max: usize) -> Result<Self> {
        Self::new(w, alloc::vec![g; n_outer], n_max)
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn couplings(&self) -> &[f64] {
        &self.couplings
    }

    pub fn n_outer(&self) -> usize {
        self.couplings.len()
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    /// `G = √(Σ g_j²)`, the coupling to the collective outer mode.
    pub fn collective_coupling(&self) -> f64 {
        libm::sqrt(self.couplings.iter().map(|g| g * g).sum())
    }

    /// `γ(t) = t² Σ g_j²`.
    pub fn gamma(&self, t: f64) -> f64 {
        t * t * self.couplings.iter().map(|g| g * g).sum::<f64>()
    }

    pub fn has_equal_couplings(&self) -> bool {
        let first = self.couplings[0];
        self.couplings
            .iter()
            .all(|&g| libm::fabs(g - first) <= 1e-12 * libm::fabs(first).max(1.0))
    }

    pub fn layout(&self) -> ModeLayout {
        ModeLayout::for_coupler(self.n_outer(), self.n_max)
            .expect("validated parameters always yield a layout")
    }

    fn check_layout(&self, layout: ModeLayout) -> Result<()> {
        if layout.mode_count() != self.n_outer() + 1 || layout.n_max() != self.n_max {
            return Err(Error::LayoutMismatch {
                mode_count: layout.mode_count(),
                cutoff: layout.cutoff(),
            });
        }
        Ok(())
    }
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `w (a†a + Σ b_j†b_j)`.
pub fn free_hamiltonian(params: &CouplerParams, layout: ModeLayout) -> Result<DenseOperator> {
    params.check_layout(layout)?;
    Ok(total_number(layout).scale(real(params.w)))
}

/// `Σ g_j a†b_j`, the raising direction of the central mode.
pub fn raising_sum(params: &CouplerParams, layout: ModeLayout) -> Result<DenseOperator> {
    params.check_layout(layout)?;
    let mut sum = DenseOperator::zeros(layout);
    for (j, &g) in params.couplings.iter().enumerate() {
        sum = sum.add(&hopping(layout, 0, j + 1)?.scale(real(g)))?;
    }
    Ok(sum)
}

/// `Σ g_j a b_j†`.
pub fn lowering_sum(params: &CouplerParams, layout: ModeLayout) -> Result<DenseOperator> {
    params.check_layout(layout)?;
    let mut sum = DenseOperator::zeros(layout);
    for (j, &g) in params.couplings.iter().enumerate() {
        sum = sum.add(&hopping(layout, j + 1, 0)?.scale(real(g)))?;
    }
    Ok(sum)
}

/// `Σ g_j (b_j a† + a b_j†)`.
pub fn interaction_hamiltonian(params: &CouplerParams, layout: ModeLayout) -> Result<DenseOperator> {
    raising_sum(params, layout)?.add(&lowering_sum(params, layout)?)
}

/// `H = w a†a + w Σ b_j†b_j + Σ g_j (b_j a† + a b_j†)`.
pub fn build_hamiltonian(params: &CouplerParams, layout: ModeLayout) -> Result<DenseOperator> {
    free_hamiltonian(params, layout)?.add(&interaction_hamiltonian(params, layout)?)
}

/// `‖[H_free, H_int]‖_F` on the whole truncated space.
pub fn resonance_residual(params: &CouplerParams, layout: ModeLayout) -> Result<f64> {
    let free = free_hamiltonian(params, layout)?;
    let interaction = interaction_hamiltonian(params, layout)?;
    Ok(free.commutator(&interaction)?.frobenius_norm())
}

/// Applies `op` to each excitation block of a block-diagonal `matrix`.
fn blockwise<F>(layout: ModeLayout, mut op: F) -> Result<CMatrix>
where
    F: FnMut(&[usize]) -> Result<CMatrix>,
{
    let dim = layout.dimension();
    let mut out = CMatrix::zeros(dim, dim);
    for block in excitation_blocks(layout) {
        let sub = op(&block.indices)?;
        for (r, &row) in block.indices.iter().enumerate() {
            for (c, &col) in block.indices.iter().enumerate() {
                out[(row, col)] = sub[(r, c)];
            }
        }
    }
    Ok(out)
}

/// `e^{−itH}` from the Hermitian eigendecomposition of each excitation block.
pub fn exact_propagator(params: &CouplerParams, layout: ModeLayout, t: f64) -> Result<DenseOperator> {
    if !t.is_finite() {
        return Err(Error::NonFinite);
    }
    let hamiltonian = build_hamiltonian(params, layout)?;
    let matrix = blockwise(layout, |indices| {
        expm_hermitian(&hamiltonian.restrict(indices), t)
    })?;
    DenseOperator::new(layout, matrix)
}

/// The scalar coefficients of the symmetric product form at time `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorCoefficients {
    pub f: f64,
    pub h: f64,
    pub sqrt_gamma: f64,
    /// Distance of `√γ` to the nearest odd multiple of `π`.
    pub singularity_margin: f64,
}

/// Distance of `x ≥ 0` to the nearest element of `{π, 3π, 5π, …}`.
pub fn singularity_margin(x: f64) -> f64 {
    let odd = 2.0 * libm::round((x / PI - 1.0) / 2.0) + 1.0;
    let odd = odd.max(1.0);
    libm::fabs(x - odd * PI)
}

/// `f = tan(√γ/2)/√γ`, `h = sin(√γ)/√γ` with the default singularity guard.
pub fn factor_coefficients(params: &CouplerParams, t: f64) -> Result<FactorCoefficients> {
    factor_coefficients_with_guard(params, t, SINGULARITY_GUARD)
}

/// As [`factor_coefficients`], refusing any `√γ` within `guard` of a pole.
pub fn factor_coefficients_with_guard(
    params: &CouplerParams,
    t: f64,
    guard: f64,
) -> Result<FactorCoefficients> {
    if !t.is_finite() {
        return Err(Error::NonFinite);
    }
    let gamma = params.gamma(t);
    let sqrt_gamma = libm::sqrt(gamma);
    let margin = singularity_margin(sqrt_gamma);
    if margin <= guard {
        return Err(Error::NearSingularity {
            sqrt_gamma,
            margin,
        });
    }
    let (f, h) = if sqrt_gamma < SERIES_THRESHOLD {
        (
            0.5 + gamma / 24.0 + gamma * gamma / 240.0,
            1.0 - gamma / 6.0 + gamma * gamma / 120.0,
        )
    } else {
        (
            libm::tan(sqrt_gamma / 2.0) / sqrt_gamma,
            libm::sin(sqrt_gamma) / sqrt_gamma,
        )
    };
    Ok(FactorCoefficients {
        f,
        h,
        sqrt_gamma,
        singularity_margin: margin,
    })
}

/// `e^{εw N̂} · e^{εf L} · e^{εh R} · e^{εf L}` with `ε = −it`.
///
/// The free factor goes through the Hermitian exponential, the three
/// interaction factors through the general one.
pub fn factorized_propagator(
    params: &CouplerParams,
    layout: ModeLayout,
    t: f64,
) -> Result<DenseOperator> {
    let coefficients = factor_coefficients(params, t)?;
    factorized_with(params, layout, t, coefficients)
}

fn factorized_with(
    params: &CouplerParams,
    layout: ModeLayout,
    t: f64,
    coefficients: FactorCoefficients,
) -> Result<DenseOperator> {
    let free = free_hamiltonian(params, layout)?;
    let raising = raising_sum(params, layout)?;
    let lowering = lowering_sum(params, layout)?;
    let epsilon = C64::new(0.0, -t);
    let outer_weight = epsilon * coefficients.f;
    let inner_weight = epsilon * coefficients.h;
    let matrix = blockwise(layout, |indices| {
        let free_factor = expm_hermitian(&free.restrict(indices), t)?;
        let outer = expm_general(&(raising.restrict(indices) * outer_weight))?;
        let inner = expm_general(&(lowering.restrict(indices) * inner_weight))?;
        Ok(free_factor * &outer * inner * outer)
    })?;
    DenseOperator::new(layout, matrix)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockDistance {
    pub excitation: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FactorizationReport {
    /// One entry per excitation block with `K ≤ n_max`.
    pub blocks: Vec<BlockDistance>,
    pub max_block_distance: f64,
    pub sqrt_gamma: f64,
    pub singularity_margin: f64,
    pub tolerance: f64,
}

impl FactorizationReport {
    pub fn passed(&self) -> bool {
        self.max_block_distance <= self.tolerance
    }
}

/// Frobenius distance between exact and factorized propagators on every
/// untruncated block. No global phase is removed: the product form is an
/// operator identity.
pub fn verify_factorization(
    params: &CouplerParams,
    layout: ModeLayout,
    t: f64,
    tol: f64,
) -> Result<FactorizationReport> {
    let coefficients = factor_coefficients(params, t)?;
    let exact = exact_propagator(params, layout, t)?;
    let factorized = factorized_with(params, layout, t, coefficients)?;
    let blocks: Vec<BlockDistance> = excitation_blocks(layout)
        .into_iter()
        .filter(|block| block.excitation <= layout.n_max())
        .map(|block| BlockDistance {
            excitation: block.excitation,
            distance: (exact.restrict(&block.indices) - factorized.restrict(&block.indices))
                .norm(),
        })
        .collect();
    let max_block_distance = blocks.iter().map(|b| b.distance).fold(0.0, f64::max);
    Ok(FactorizationReport {
        blocks,
        max_block_distance,
        sqrt_gamma: coefficients.sqrt_gamma,
        singularity_margin: coefficients.singularity_margin,
        tolerance: tol,
    })
}

/// Which sign makes `[L₃, L±] = ±s Σ ε²g_j² L±` hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignConvention {
    /// `s = +1`: the relation exactly as printed, `ε² = −t²` included.
    AsWritten,
    /// `s = −1`.
    Reversed,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraCheck {
    /// `‖[L₊, L₋] − 2L₃‖_F`.
    pub commutator_residual: f64,
    /// `‖[L₃, L₊] − s c L₊‖_F` for the recorded sign `s`, `c = Σ ε²g_j²`.
    pub raising_residual: f64,
    /// `‖[L₃, L₋] + s c L₋‖_F`.
    pub lowering_residual: f64,
    pub sign: SignConvention,
    /// Largest Frobenius norm among the commutators compared.
    pub operator_scale: f64,
}

impl AlgebraCheck {
    pub fn residual(&self) -> f64 {
        self.commutator_residual
            .max(self.raising_residual)
            .max(self.lowering_residual)
    }

    pub fn relative_residual(&self) -> f64 {
        if self.operator_scale == 0.0 {
            self.residual()
        } else {
            self.residual() / self.operator_scale
        }
    }
}

/// Checks the su(2) relations of
///
/// ```text
/// L₊ = ε Σ g_j a†b_j,  L₋ = ε Σ g_j a b_j†,
/// L₃ = ½ (Σ ε²g_j² a†a − Σ ε²g_i g_j b_i†b_j)
/// ```
///
/// on the blocks `K ≤ n_max − 1`. Both signs of the `[L₃, L±]` relation are
/// tried and the one that holds is reported.
pub fn algebra_check(params: &CouplerParams, layout: ModeLayout, t: f64) -> Result<AlgebraCheck> {
    params.check_layout(layout)?;
    let epsilon = C64::new(0.0, -t);
    let eps2 = epsilon * epsilon;
    let coupling_sq: f64 = params.couplings.iter().map(|g| g * g).sum();
    let casimir_weight = eps2 * coupling_sq;

    let raising = raising_sum(params, layout)?.scale(epsilon);
    let lowering = lowering_sum(params, layout)?.scale(epsilon);
    let mut outer = DenseOperator::zeros(layout);
    for (i, &gi) in params.couplings.iter().enumerate() {
        for (j, &gj) in params.couplings.iter().enumerate() {
            outer = outer.add(&hopping(layout, i + 1, j + 1)?.scale(real(gi * gj)))?;
        }
    }
    let central = hopping(layout, 0, 0)?.scale(real(coupling_sq));
    let weight = central.sub(&outer)?.scale(eps2 * 0.5);

    let safe: Vec<Vec<usize>> = excitation_blocks(layout)
        .into_iter()
        .filter(|b| b.excitation < layout.n_max())
        .map(|b| b.indices)
        .collect();

    let mut sums = [0.0f64; 5];
    let mut scale = 0.0f64;
    for indices in &safe {
        let plus = raising.restrict(indices);
        let minus = lowering.restrict(indices);
        let l3 = weight.restrict(indices);
        let pm = commutator(&plus, &minus);
        let l3p = commutator(&l3, &plus);
        let l3m = commutator(&l3, &minus);
        let plus_term = &plus * casimir_weight;
        let minus_term = &minus * casimir_weight;
        sums[0] += (&pm - &l3 * real(2.0)).norm_squared();
        sums[1] += (&l3p - &plus_term).norm_squared();
        sums[2] += (&l3m + &minus_term).norm_squared();
        sums[3] += (&l3p + &plus_term).norm_squared();
        sums[4] += (&l3m - &minus_term).norm_squared();
        scale = scale.max(pm.norm()).max(l3p.norm()).max(l3m.norm());
    }
    let [comm, raise_w, lower_w, raise_r, lower_r] = sums.map(libm::sqrt);
    let (sign, raising_residual, lowering_residual) =
        if raise_w.max(lower_w) <= raise_r.max(lower_r) {
            (SignConvention::AsWritten, raise_w, lower_w)
        } else {
            (SignConvention::Reversed, raise_r, lower_r)
        };
    Ok(AlgebraCheck {
        commutator_residual: comm,
        raising_residual,
        lowering_residual,
        sign,
        operator_scale: scale,
    })
}

/// Compares central-difference derivatives at `t = 0` of the exact and the
/// factorized propagators, on blocks `K ≤ n_max`.
pub fn generator_mismatch(params: &CouplerParams, layout: ModeLayout, step: f64) -> Result<f64> {
    if step.is_nan() || step <= 0.0 {
        return Err(Error::InvalidArgument("finite-difference step must be positive"));
    }
    let derivative = |forward: DenseOperator, backward: DenseOperator| -> CMatrix {
        (forward.into_matrix() - backward.into_matrix()) * real(0.5 / step)
    };
    let exact = derivative(
        exact_propagator(params, layout, step)?,
        exact_propagator(params, layout, -step)?,
    );
    let factorized = derivative(
        factorized_propagator(params, layout, step)?,
        factorized_propagator(params, layout, -step)?,
    );
    let mut sum = 0.0;
    for block in excitation_blocks(layout) {
        if block.excitation <= layout.n_max() {
            sum += (restrict(&exact, &block.indices) - restrict(&factorized, &block.indices))
                .norm_squared();
        }
    }
    Ok(libm::sqrt(sum))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::basis_state;
    use crate::matrix::{is_unitary, phase_distance};
    use approx::assert_abs_diff_eq;

    fn setup(params: &CouplerParams) -> ModeLayout {
        params.layout()
    }

    #[test]
    fn params_validation() {
        assert!(CouplerParams::new(1.0, vec![], 2).is_err());
        assert!(CouplerParams::new(1.0, vec![0.0, 0.0], 2).is_err());
        assert!(CouplerParams::new(1.0, vec![1.0], 0).is_err());
        assert!(CouplerParams::new(f64::NAN, vec![1.0], 1).is_err());
        let p = CouplerParams::new(0.3, vec![0.0, 0.5], 2).unwrap();
        assert_eq!(p.n_outer(), 2);
        assert!(!p.has_equal_couplings());
        assert_abs_diff_eq!(p.gamma(2.0), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn layout_mismatch_is_rejected() {
        let p = CouplerParams::equal(2, 1.0, 1.0, 2).unwrap();
        let wrong = ModeLayout::new(2, 3).unwrap();
        assert!(matches!(
            build_hamiltonian(&p, wrong),
            Err(Error::LayoutMismatch { .. })
        ));
        let wrong_cutoff = ModeLayout::new(3, 4).unwrap();
        assert!(build_hamiltonian(&p, wrong_cutoff).is_err());
    }

    #[test]
    fn hamiltonian_single_hop() {
        let p = CouplerParams::equal(1, 1.0, 0.0, 1).unwrap();
        let h = build_hamiltonian(&p, setup(&p)).unwrap();
        let mut expected = CMatrix::zeros(4, 4);
        expected[(1, 2)] = real(1.0);
        expected[(2, 1)] = real(1.0);
        assert_abs_diff_eq!((h.matrix() - expected).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn hamiltonian_free_only() {
        // g = 0 is not a valid parameter set, so read the free part directly.
        assert!(CouplerParams::new(1.0, vec![0.0], 1).is_err());
        let p = CouplerParams::equal(1, 1.0, 1.0, 1).unwrap();
        let free = free_hamiltonian(&p, setup(&p)).unwrap();
        let diag: Vec<f64> = free.matrix().diagonal().iter().map(|z| z.re).collect();
        assert_eq!(diag, vec![0.0, 1.0, 1.0, 2.0]);
    }

    #[test]
    fn hamiltonian_structure() {
        let p = CouplerParams::new(0.7, vec![0.3, -0.9], 3).unwrap();
        let layout = setup(&p);
        let h = build_hamiltonian(&p, layout).unwrap();
        assert!((h.matrix() - h.matrix().adjoint()).norm() <= 1e-12);
        assert_eq!(h.off_block_norm(), 0.0);
        assert!(resonance_residual(&p, layout).unwrap() <= 1e-12);
    }

    #[test]
    fn single_excitation_spectrum_equal_couplings() {
        let (g, w) = (0.8, 1.1);
        let p = CouplerParams::equal(2, g, w, 1).unwrap();
        let layout = setup(&p);
        let h = build_hamiltonian(&p, layout).unwrap();
        let block = &excitation_blocks(layout)[1];
        let sub = h.restrict(&block.indices);
        let mut eig: Vec<f64> = sub.symmetric_eigen().eigenvalues.iter().cloned().collect();
        eig.sort_by(f64::total_cmp);
        let s = g * 2f64.sqrt();
        let expected = [w - s, w, w + s];
        for (got, want) in eig.iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn exact_propagator_basics() {
        let p = CouplerParams::new(0.4, vec![0.6, 0.2], 2).unwrap();
        let layout = setup(&p);
        let u0 = exact_propagator(&p, layout, 0.0).unwrap();
        assert_abs_diff_eq!(
            u0.sub(&DenseOperator::identity(layout)).unwrap().frobenius_norm(),
            0.0,
            epsilon = 1e-14
        );
        let u = exact_propagator(&p, layout, 3.7).unwrap();
        assert!(is_unitary(u.matrix(), 1e-10));
    }

    #[test]
    fn blockwise_propagator_matches_dense_exponential() {
        let p = CouplerParams::new(0.9, vec![0.7, -0.4], 2).unwrap();
        let layout = setup(&p);
        let t = 1.9;
        let dense = expm_hermitian(build_hamiltonian(&p, layout).unwrap().matrix(), t).unwrap();
        let blocked = exact_propagator(&p, layout, t).unwrap();
        assert!((dense - blocked.matrix()).norm() < 1e-12);
    }

    #[test]
    fn exact_propagator_gate_rows() {
        let p = CouplerParams::equal(1, 1.0, 0.5, 2).unwrap();
        let layout = setup(&p);
        let u = exact_propagator(&p, layout, 2.0 * PI).unwrap();
        let one_zero = basis_state(layout, &[1, 0]).unwrap();
        let out = u.apply(&one_zero).unwrap();
        assert!((out.amplitudes() + one_zero.amplitudes()).norm() < 1e-12);
        let one_one = basis_state(layout, &[1, 1]).unwrap();
        let out = u.apply(&one_one).unwrap();
        assert!((out.amplitudes() - one_one.amplitudes()).norm() < 1e-12);
    }

    #[test]
    fn single_excitation_closed_form() {
        // Block basis (|0,1⟩, |1,0⟩) evolves as e^{−iwt}[[cos gt, −i sin gt], [−i sin gt, cos gt]].
        let (g, w, t) = (0.7, 0.3, 2.2);
        let p = CouplerParams::equal(1, g, w, 2).unwrap();
        let layout = setup(&p);
        let u = exact_propagator(&p, layout, t).unwrap();
        let block = u.restrict(&excitation_blocks(layout)[1].indices);
        let (cos, sin) = (libm::cos(g * t), libm::sin(g * t));
        let expected = CMatrix::from_row_slice(
            2,
            2,
            &[real(cos), C64::new(0.0, -sin), C64::new(0.0, -sin), real(cos)],
        ) * C64::from_polar(1.0, -w * t);
        assert!((block - expected).norm() < 1e-13);
    }

    #[test]
    fn coefficient_values() {
        let p = CouplerParams::equal(1, 1.0, 0.0, 1).unwrap();
        let quarter = factor_coefficients(&p, PI / 2.0).unwrap();
        assert_abs_diff_eq!(quarter.f, 2.0 / PI, epsilon = 1e-15);
        assert_abs_diff_eq!(quarter.h, 2.0 / PI, epsilon = 1e-15);
        assert_abs_diff_eq!(quarter.sqrt_gamma, PI / 2.0, epsilon = 1e-15);

        let full = factor_coefficients(&p, 2.0 * PI).unwrap();
        assert_abs_diff_eq!(full.f, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(full.h, 0.0, epsilon = 1e-15);

        let zero = factor_coefficients(&p, 0.0).unwrap();
        assert_eq!((zero.f, zero.h), (0.5, 1.0));
        let tiny = factor_coefficients(&p, 1e-6).unwrap();
        assert_abs_diff_eq!(tiny.f, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(tiny.h, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn series_branch_is_continuous() {
        let p = CouplerParams::equal(1, 1.0, 0.0, 1).unwrap();
        let below = factor_coefficients(&p, SERIES_THRESHOLD * (1.0 - 1e-9)).unwrap();
        let above = factor_coefficients(&p, SERIES_THRESHOLD * (1.0 + 1e-9)).unwrap();
        assert_abs_diff_eq!(below.f, above.f, epsilon = 1e-12);
        assert_abs_diff_eq!(below.h, above.h, epsilon = 1e-12);
    }

    #[test]
    fn singularity_is_refused() {
        let p = CouplerParams::equal(1, 1.0, 0.0, 1).unwrap();
        for odd in [1.0, 3.0, 5.0] {
            let err = factor_coefficients(&p, odd * PI).unwrap_err();
            assert!(matches!(err, Error::NearSingularity { .. }), "{err:?}");
        }
        assert!(factor_coefficients(&p, PI + 2e-6).is_ok());
        assert!(factor_coefficients_with_guard(&p, PI + 2e-6, 1e-5).is_err());
        assert_abs_diff_eq!(singularity_margin(0.0), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(singularity_margin(2.0 * PI), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(singularity_margin(2.9 * PI), 0.1 * PI, epsilon = 1e-14);
    }

    #[test]
    fn factorized_trivial_points() {
        let p = CouplerParams::new(0.8, vec![0.5, 1.2], 2).unwrap();
        let layout = setup(&p);
        let u0 = factorized_propagator(&p, layout, 0.0).unwrap();
        assert!(u0.sub(&DenseOperator::identity(layout)).unwrap().frobenius_norm() < 1e-14);

        // √γ = 2π sets f = h = 0: only the free phase e^{−iwtK} survives.
        let (w, t) = (0.37, 2.0 * PI);
        let p = CouplerParams::equal(1, 1.0, w, 2).unwrap();
        let layout = setup(&p);
        let u = factorized_propagator(&p, layout, t).unwrap();
        for i in 0..layout.dimension() {
            let k = layout.excitation(i) as f64;
            assert!((u.matrix()[(i, i)] - C64::from_polar(1.0, -w * t * k)).norm() < 1e-14);
        }
        let off: f64 = u.matrix().norm_squared()
            - u.matrix().diagonal().iter().map(|z| z.norm_sqr()).sum::<f64>();
        assert!(off.abs() < 1e-26);
    }

    #[test]
    fn factorized_single_excitation_quarter_turn() {
        // w = 0, g t = π/2: the block product must equal [[0, −i], [−i, 0]].
        let p = CouplerParams::equal(1, 1.0, 0.0, 2).unwrap();
        let layout = setup(&p);
        let u = factorized_propagator(&p, layout, PI / 2.0).unwrap();
        let block = u.restrict(&excitation_blocks(layout)[1].indices);
        let expected = CMatrix::from_row_slice(
            2,
            2,
            &[real(0.0), C64::new(0.0, -1.0), C64::new(0.0, -1.0), real(0.0)],
        );
        assert!((block - expected).norm() < 1e-14);
    }

    #[test]
    fn factorization_examples() {
        let p = CouplerParams::equal(1, 1.0, 0.7, 3).unwrap();
        let report = verify_factorization(&p, setup(&p), 1.0, 1e-8).unwrap();
        assert!(report.passed(), "{report:?}");
        let ks: Vec<usize> = report.blocks.iter().map(|b| b.excitation).collect();
        assert_eq!(ks, vec![0, 1, 2, 3]);

        let p = CouplerParams::equal(3, 0.5, 1.0, 2).unwrap();
        let report = verify_factorization(&p, setup(&p), 0.9, 1e-8).unwrap();
        assert!(report.max_block_distance <= 1e-8, "{report:?}");

        let zero = verify_factorization(&p, setup(&p), 0.0, 0.0).unwrap();
        assert_eq!(zero.max_block_distance, 0.0);
    }

    #[test]
    fn algebra_examples() {
        let p = CouplerParams::equal(1, 1.0, 0.5, 4).unwrap();
        let check = algebra_check(&p, setup(&p), 1.0).unwrap();
        assert!(check.residual() <= 1e-12, "{check:?}");
        assert_eq!(check.sign, SignConvention::AsWritten);

        let p = CouplerParams::new(0.5, vec![0.3, 0.9], 3).unwrap();
        let check = algebra_check(&p, setup(&p), 1.0).unwrap();
        assert!(check.residual() <= 1e-12, "{check:?}");
        assert_eq!(check.sign, SignConvention::AsWritten);
    }

    #[test]
    fn algebra_relative_residual_over_time() {
        let p = CouplerParams::new(0.5, vec![0.3, 0.9], 3).unwrap();
        for t in [0.1, 1.0, 3.0, 7.5, 10.0, -4.0] {
            let check = algebra_check(&p, setup(&p), t).unwrap();
            assert!(check.relative_residual() <= 1e-12, "t = {t}: {check:?}");
        }
    }

    #[test]
    fn periodicity_of_interaction() {
        let (n, g, w) = (2usize, 0.6, 0.45);
        let p = CouplerParams::equal(n, g, w, 3).unwrap();
        let layout = setup(&p);
        let period = 2.0 * PI / (g * libm::sqrt(n as f64));
        for k in [1.0, 2.0] {
            let t = k * period;
            let exact = exact_propagator(&p, layout, t).unwrap();
            let free = expm_hermitian(free_hamiltonian(&p, layout).unwrap().matrix(), t).unwrap();
            for block in excitation_blocks(layout) {
                if block.excitation > layout.n_max() {
                    continue;
                }
                let d = phase_distance(
                    &exact.restrict(&block.indices),
                    &restrict(&free, &block.indices),
                )
                .unwrap();
                assert!(d.distance <= 1e-9, "K = {}: {d:?}", block.excitation);
            }
        }
    }

    #[test]
    fn small_time_generators_agree() {
        let p = CouplerParams::new(0.8, vec![0.4, 1.1], 2).unwrap();
        let mismatch = generator_mismatch(&p, setup(&p), 1e-4).unwrap();
        assert!(mismatch <= 1e-6, "{mismatch}");
        assert!(generator_mismatch(&p, setup(&p), 0.0).is_err());
    }
}
