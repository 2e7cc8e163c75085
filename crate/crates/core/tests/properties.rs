use approx::assert_abs_diff_eq;
use coupler_core::analysis::{entanglement_profile, schmidt_register};
use coupler_core::coupler::{
    exact_propagator, factorized_propagator, singularity_margin, CouplerParams,
};
use coupler_core::fock::total_number;
use coupler_core::gates::{product_state, relative_phase_2};
use coupler_core::matrix::{expm_general, expm_hermitian, is_unitary, phase_distance};
use coupler_core::{CMatrix, C64};
use proptest::prelude::*;
use std::f64::consts::PI;

fn complex() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

fn square(dim: usize, scale: f64) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(complex(), dim * dim)
        .prop_map(move |v| CMatrix::from_vec(dim, dim, v) * C64::new(scale, 0.0))
}

fn hermitian(dim: usize, scale: f64) -> impl Strategy<Value = CMatrix> {
    square(dim, scale).prop_map(|a| (&a + a.adjoint()) * C64::new(0.5, 0.0))
}

fn qubit() -> impl Strategy<Value = (C64, C64)> {
    (0.0f64..PI / 2.0, 0.0f64..2.0 * PI, 0.0f64..2.0 * PI).prop_map(|(theta, p0, p1)| {
        (
            C64::from_polar(theta.cos(), p0),
            C64::from_polar(theta.sin(), p1),
        )
    })
}

fn identity_distance(m: &CMatrix) -> f64 {
    (m - CMatrix::identity(m.nrows(), m.ncols())).norm()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn exponential_inverse(a in (1usize..7).prop_flat_map(|d| square(d, 2.0))) {
        let forward = expm_general(&a).unwrap();
        let backward = expm_general(&(-a.clone())).unwrap();
        prop_assert!(identity_distance(&(forward * backward)) <= 1e-10);
    }

    #[test]
    fn commuting_sum_splits(coeffs in prop::collection::vec(complex(), 3), a in square(4, 0.8)) {
        let b = CMatrix::identity(4, 4) * coeffs[0] + &a * coeffs[1] + &a * &a * coeffs[2];
        let joint = expm_general(&(&a + &b)).unwrap();
        let split = expm_general(&a).unwrap() * expm_general(&b).unwrap();
        let scale = joint.norm().max(1.0);
        prop_assert!((joint - split).norm() / scale <= 1e-10);
    }

    #[test]
    fn hermitian_evolution_is_unitary(h in hermitian(6, 1.0), t in -8.0f64..8.0) {
        let u = expm_hermitian(&h, t).unwrap();
        prop_assert!(is_unitary(&u, 1e-10));
    }

    #[test]
    fn hermitian_route_matches_pade(h in hermitian(5, 1.0), t in -3.0f64..3.0) {
        let spectral = expm_hermitian(&h, t).unwrap();
        let pade = expm_general(&(&h * C64::new(0.0, -t))).unwrap();
        prop_assert!((spectral - pade).norm() <= 1e-10);
    }

    #[test]
    fn global_phase_is_invisible(h in hermitian(4, 1.0), phi in -PI..PI) {
        let u = expm_hermitian(&h, 1.0).unwrap();
        let v = &u * C64::from_polar(1.0, phi);
        let aligned = phase_distance(&v, &u).unwrap();
        prop_assert!(aligned.distance <= 1e-12);
        let wrapped = (aligned.phase - phi + PI).rem_euclid(2.0 * PI) - PI;
        prop_assert!(wrapped.abs() <= 1e-10);
    }

    #[test]
    fn phase_distance_matches_closed_form(a in hermitian(4, 1.0), b in hermitian(4, 1.0)) {
        let u = expm_hermitian(&a, 1.0).unwrap();
        let v = expm_hermitian(&b, 1.0).unwrap();
        let aligned = phase_distance(&u, &v).unwrap();
        let trace = (v.adjoint() * &u).trace();
        let expected = (u.norm_squared() + v.norm_squared() - 2.0 * trace.norm()).max(0.0);
        prop_assert!((aligned.distance.powi(2) - expected).abs() <= 1e-9);
    }

    #[test]
    fn relative_phase_keeps_products(a in qubit(), b in qubit()) {
        let gate = relative_phase_2(PI);
        let output = gate.apply(&product_state(&[a, b])).unwrap();
        let decomposition = schmidt_register(&output, 1).unwrap();
        prop_assert_eq!(decomposition.rank(1e-10), 1);
        let profile = entanglement_profile(&gate, &[vec![a, b]]).unwrap();
        prop_assert!(profile.max_second_coefficient <= 1e-10);
    }

    #[test]
    fn propagator_conserves_excitation(
        couplings in prop::collection::vec(0.1f64..1.5, 1..3),
        w in -2.0f64..2.0,
        t in 0.0f64..6.0,
    ) {
        let params = CouplerParams::new(w, couplings, 2).unwrap();
        let u = exact_propagator(&params, params.layout(), t).unwrap();
        prop_assert!(u.off_block_norm() <= 1e-12);
        let commutator = u.commutator(&total_number(params.layout())).unwrap();
        prop_assert!(commutator.frobenius_norm() <= 1e-10);
        prop_assert!(is_unitary(u.matrix(), 1e-10));
    }

    #[test]
    fn factorization_agrees_away_from_singularities(
        couplings in prop::collection::vec(-1.5f64..1.5, 1..3),
        w in -2.0f64..2.0,
        t in 0.05f64..5.0,
    ) {
        prop_assume!(couplings.iter().any(|g| g.abs() > 0.05));
        let params = CouplerParams::new(w, couplings, 2).unwrap();
        prop_assume!(singularity_margin(params.gamma(t).sqrt()) > 0.05);
        let layout = params.layout();
        let exact = exact_propagator(&params, layout, t).unwrap();
        let factorized = factorized_propagator(&params, layout, t).unwrap();
        for block in coupler_core::fock::excitation_blocks(layout) {
            if block.excitation > layout.n_max() {
                continue;
            }
            let gap = (exact.restrict(&block.indices) - factorized.restrict(&block.indices)).norm();
            prop_assert!(gap <= 1e-8, "block {} gap {}", block.excitation, gap);
        }
    }
}

#[test]
fn zero_exponent_is_identity() {
    let z = CMatrix::zeros(5, 5);
    assert_abs_diff_eq!(identity_distance(&expm_general(&z).unwrap()), 0.0);
}
