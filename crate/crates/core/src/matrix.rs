//! Matrix exponentials, unitarity and global-phase-aligned distance.
//!
//! Two independent exponentials are provided: `expm_hermitian` diagonalises
//! a Hermitian generator, `expm_general` runs Padé scaling-and-squaring on
//! an arbitrary square matrix. The coupler verification pits one against the
//! other.

use core::f64::consts::PI;

use crate::{CMatrix, Error, Result, C64};

/// Relative Hermiticity tolerance accepted by [`expm_hermitian`].
pub const HERMITIAN_TOL: f64 = 1e-10;

const EIGEN_EPS: f64 = 1e-15;
const EIGEN_MAX_ITER: usize = 10_000;

/// Result of minimising `‖U − e^{iφ}V‖_F` over the global phase `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseAlignedDistance {
    pub distance: f64,
    /// Optimal phase in `(−π, π]`; zero when `tr(V†U)` vanishes.
    pub phase: f64,
}

fn check_square(matrix: &CMatrix) -> Result<()> {
    if matrix.nrows() != matrix.ncols() {
        return Err(Error::DimensionMismatch {
            left: matrix.shape(),
            right: (matrix.ncols(), matrix.nrows()),
        });
    }
    Ok(())
}

fn is_finite(matrix: &CMatrix) -> bool {
    matrix.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `e^{−itH}` for Hermitian `H`, via `H = V Λ V†`.
pub fn expm_hermitian(hamiltonian: &CMatrix, t: f64) -> Result<CMatrix> {
    check_square(hamiltonian)?;
    if !is_finite(hamiltonian) || !t.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = hamiltonian.nrows();
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let deviation = (hamiltonian - hamiltonian.adjoint()).norm();
    let scale = hamiltonian.norm().max(1.0);
    if deviation > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian { deviation });
    }
    if t == 0.0 {
        return Ok(CMatrix::identity(n, n));
    }
    let symmetric = (hamiltonian + hamiltonian.adjoint()) * C64::new(0.5, 0.0);
    let eigen = symmetric
        .try_symmetric_eigen(EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::EigenFailure)?;
    let vectors = &eigen.eigenvectors;
    let mut scaled = vectors.clone();
    for (mut column, &lambda) in scaled.column_iter_mut().zip(eigen.eigenvalues.iter()) {
        let phase = C64::from_polar(1.0, -t * lambda);
        column *= phase;
    }
    Ok(scaled * vectors.adjoint())
}

// Padé numerator coefficients b_k for degrees 3, 5, 7, 9 and 13, and the
// matching 1-norm bounds θ_m below which no scaling is needed.
const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.53939833006323e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152;

fn one_norm(matrix: &CMatrix) -> f64 {
    matrix
        .column_iter()
        .map(|col| col.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Odd part `U` and even part `V` of the degree-m Padé numerator, m ≤ 9.
fn pade_low(a: &CMatrix, coeffs: &[f64]) -> (CMatrix, CMatrix) {
    let n = a.nrows();
    let identity = CMatrix::identity(n, n);
    let a2 = a * a;
    let mut odd = &identity * real(coeffs[1]);
    let mut even = &identity * real(coeffs[0]);
    let mut power = identity;
    for k in 1..coeffs.len() / 2 {
        power = &power * &a2;
        odd += &power * real(coeffs[2 * k + 1]);
        even += &power * real(coeffs[2 * k]);
    }
    (a * odd, even)
}

fn pade13(a: &CMatrix) -> (CMatrix, CMatrix) {
    let b = &PADE13;
    let n = a.nrows();
    let identity = CMatrix::identity(n, n);
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let odd_high = &a6 * real(b[13]) + &a4 * real(b[11]) + &a2 * real(b[9]);
    let odd = &a6 * odd_high
        + &a6 * real(b[7])
        + &a4 * real(b[5])
        + &a2 * real(b[3])
        + &identity * real(b[1]);
    let even_high = &a6 * real(b[12]) + &a4 * real(b[10]) + &a2 * real(b[8]);
    let even = &a6 * even_high
        + &a6 * real(b[6])
        + &a4 * real(b[4])
        + &a2 * real(b[2])
        + &identity * real(b[0]);
    (a * odd, even)
}

/// `e^A` for a general square matrix by Padé scaling-and-squaring.
///
/// Picks the lowest Padé degree whose 1-norm bound covers `A`; beyond the
/// degree-13 bound the matrix is halved `s` times and the result squared back.
pub fn expm_general(a: &CMatrix) -> Result<CMatrix> {
    check_square(a)?;
    if !is_finite(a) {
        return Err(Error::NonFinite);
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(CMatrix::zeros(0, 0));
    }
    let norm = one_norm(a);

    let low = THETA.iter().find(|&&(_, theta)| norm <= theta);
    let (odd, even, squarings) = match low {
        Some(&(3, _)) => {
            let (u, v) = pade_low(a, &PADE3);
            (u, v, 0)
        }
        Some(&(5, _)) => {
            let (u, v) = pade_low(a, &PADE5);
            (u, v, 0)
        }
        Some(&(7, _)) => {
            let (u, v) = pade_low(a, &PADE7);
            (u, v, 0)
        }
        Some(_) => {
            let (u, v) = pade_low(a, &PADE9);
            (u, v, 0)
        }
        None => {
            let squarings = if norm > THETA13 {
                libm::ceil(libm::log2(norm / THETA13)) as i32
            } else {
                0
            };
            let scaled = a * real(libm::exp2(-(squarings as f64)));
            let (u, v) = pade13(&scaled);
            (u, v, squarings)
        }
    };

    // r = (V − U)^{-1} (V + U)
    let numerator = &even + &odd;
    let denominator = even - odd;
    let mut result = denominator
        .lu()
        .solve(&numerator)
        .ok_or(Error::ConvergenceFailure)?;
    for _ in 0..squarings {
        result = &result * &result;
    }
    if !is_finite(&result) {
        return Err(Error::ConvergenceFailure);
    }
    Ok(result)
}

/// `‖U†U − I‖_F ≤ tol`. Non-square input is never unitary.
pub fn is_unitary(u: &CMatrix, tol: f64) -> bool {
    unitarity_deviation(u).is_some_and(|d| d <= tol)
}

/// `‖U†U − I‖_F`, or `None` for non-square input.
pub fn unitarity_deviation(u: &CMatrix) -> Option<f64> {
    if u.nrows() != u.ncols() {
        return None;
    }
    let n = u.nrows();
    Some((u.adjoint() * u - CMatrix::identity(n, n)).norm())
}

/// `[A, B]`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Minimises `‖U − e^{iφ}V‖_F` over `φ`.
///
/// The optimum is `φ = arg tr(V†U)`. When the trace vanishes every phase is
/// equally good; `φ = 0` is reported with the unaligned distance.
pub fn phase_distance(u: &CMatrix, v: &CMatrix) -> Result<PhaseAlignedDistance> {
    if u.shape() != v.shape() {
        return Err(Error::DimensionMismatch {
            left: u.shape(),
            right: v.shape(),
        });
    }
    let overlap: C64 = v.iter().zip(u.iter()).map(|(x, y)| x.conj() * y).sum();
    let scale = u.norm() * v.norm();
    let phase = if overlap.norm() <= f64::EPSILON * scale {
        0.0
    } else {
        let arg = overlap.arg();
        if arg <= -PI {
            PI
        } else {
            arg
        }
    };
    let rotation = C64::from_polar(1.0, phase);
    // Direct evaluation keeps small distances accurate, unlike the
    // ‖U‖² + ‖V‖² − 2|tr(V†U)| closed form.
    let distance = (u - v * rotation).norm();
    Ok(PhaseAlignedDistance { distance, phase })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn diag(entries: &[C64]) -> CMatrix {
        CMatrix::from_diagonal(&crate::CVector::from_row_slice(entries))
    }

    #[test]
    fn hermitian_exp_of_zero_is_identity() {
        let u = expm_hermitian(&CMatrix::zeros(4, 4), 2.5).unwrap();
        assert_abs_diff_eq!((u - CMatrix::identity(4, 4)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn hermitian_exp_two_level_half_period() {
        let g = 0.8;
        let h = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(g, 0.0), c(g, 0.0), c(0.0, 0.0)]);
        let u = expm_hermitian(&h, PI / g).unwrap();
        assert_abs_diff_eq!(
            (u + CMatrix::identity(2, 2)).norm(),
            0.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn hermitian_exp_diagonal() {
        let (w, t) = (1.3, 0.7);
        let u = expm_hermitian(&diag(&[c(0.0, 0.0), c(w, 0.0)]), t).unwrap();
        let expected = diag(&[c(1.0, 0.0), C64::from_polar(1.0, -w * t)]);
        assert_abs_diff_eq!((u - expected).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn hermitian_exp_rejects_non_hermitian() {
        let h = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(expm_hermitian(&h, 1.0), Err(Error::NotHermitian { .. })));
        let bad = CMatrix::from_element(2, 2, c(f64::NAN, 0.0));
        assert_eq!(expm_hermitian(&bad, 1.0), Err(Error::NonFinite));
    }

    #[test]
    fn general_exp_of_zero_and_nilpotent() {
        let e = expm_general(&CMatrix::zeros(3, 3)).unwrap();
        assert_abs_diff_eq!((e - CMatrix::identity(3, 3)).norm(), 0.0, epsilon = 1e-15);

        let x = c(0.3, -1.7);
        let a = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), x, c(0.0, 0.0), c(0.0, 0.0)]);
        let e = expm_general(&a).unwrap();
        let expected = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), x, c(0.0, 0.0), c(1.0, 0.0)]);
        assert_abs_diff_eq!((e - expected).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn general_exp_matches_scalar_exp_on_diagonals() {
        // Exercise each Padé degree and the scaling branch.
        for scale in [1e-3, 0.1, 0.5, 1.5, 4.0, 30.0, 200.0] {
            let entries = [c(scale, 0.0), c(-scale, 0.5 * scale), c(0.0, scale)];
            let e = expm_general(&diag(&entries)).unwrap();
            for (k, z) in entries.iter().enumerate() {
                let rel = (e[(k, k)] - z.exp()).norm() / z.exp().norm();
                assert!(rel < 1e-12, "scale {scale}: rel err {rel}");
            }
        }
    }

    #[test]
    fn general_exp_rejects_bad_input() {
        assert_eq!(expm_general(&CMatrix::zeros(2, 3)).unwrap_err(), Error::DimensionMismatch {
            left: (2, 3),
            right: (3, 2)
        });
        let bad = CMatrix::from_element(2, 2, c(f64::INFINITY, 0.0));
        assert_eq!(expm_general(&bad), Err(Error::NonFinite));
    }

    #[test]
    fn phase_distance_examples() {
        let u = CMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(2.0, 0.0), c(1.0, -1.0), c(0.5, 0.0)]);
        let same = phase_distance(&u, &u).unwrap();
        assert_eq!(same.distance, 0.0);
        assert_eq!(same.phase, 0.0);

        let identity = CMatrix::identity(3, 3);
        let rotated = &identity * C64::from_polar(1.0, PI / 3.0);
        let aligned = phase_distance(&identity, &rotated).unwrap();
        assert_abs_diff_eq!(aligned.distance, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(aligned.phase, -PI / 3.0, epsilon = 1e-15);

        let z = diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        let degenerate = phase_distance(&CMatrix::identity(2, 2), &z).unwrap();
        // tr(V†U) = 0, so distance² = 2 + 2 − 0.
        assert_abs_diff_eq!(degenerate.distance, 2.0, epsilon = 1e-15);
        assert_eq!(degenerate.phase, 0.0);

        assert!(phase_distance(&identity, &CMatrix::identity(2, 2)).is_err());
    }

    #[test]
    fn phase_is_in_half_open_interval() {
        let identity = CMatrix::identity(2, 2);
        let flipped = -&identity;
        let d = phase_distance(&identity, &flipped).unwrap();
        assert_abs_diff_eq!(d.phase, PI, epsilon = 1e-15);
        assert!(d.phase > -PI && d.phase <= PI);
    }

    #[test]
    fn unitarity() {
        assert!(is_unitary(&CMatrix::identity(3, 3), 1e-14));
        assert!(!is_unitary(&(CMatrix::identity(3, 3) * c(2.0, 0.0)), 1e-3));
        assert!(!is_unitary(&CMatrix::zeros(2, 3), 1.0));
    }
}
