//! Property tests for invariants that hold for every admissible input.

use std::f64::consts::PI;

use kicktop::classical::{hcl_energy, hcl_energy_cartesian, kicked_top_map, CanonicalState, ClassicalState};
use kicktop::effective::{delta_kick_effective, kicked_top_drive, kicked_top_effective_with, reconstruct_floquet};
use kicktop::floquet::{build_floquet, quasienergies};
use kicktop::linalg::{max_abs_diff, unitarity_residual};
use kicktop::spectral::{
    dos_fourier, dos_gaussian, exact_spectrum, fold_to_brillouin, folded_effective_spectrum, match_spectra,
};
use kicktop::spin::{build_spin_operators, spin_coherent_state};
use kicktop::{Spin, TopParamsF64};
use proptest::prelude::*;

fn params(alpha: f64, beta: f64, twice: u32) -> TopParamsF64 {
    TopParamsF64::new(alpha, beta, Spin::from_twice(twice).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn floquet_is_unitary_with_wrapped_spectrum(alpha in 0.0..10.0f64, beta in 0.0..3.0f64, twice in 1u32..40) {
        let f = build_floquet(&params(alpha, beta, twice)).unwrap();
        prop_assert!(unitarity_residual(&f) < 1e-12);
        let q = quasienergies(&f).unwrap();
        prop_assert_eq!(q.len(), twice as usize + 1);
        prop_assert!(q.angles().iter().all(|&a| a > -PI && a <= PI));
        prop_assert!(q.angles().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn effective_paths_agree(alpha in 0.0..10.0f64, beta in 0.0..2.0f64, twice in 1u32..30) {
        let p = params(alpha, beta, twice);
        let alg = build_spin_operators(p.spin);
        let closed = kicked_top_effective_with(&alg, &p);
        let generic = delta_kick_effective(&kicked_top_drive(&alg, &p).unwrap()).unwrap();
        prop_assert!(max_abs_diff(&closed.h_eff, &generic.h_eff) < 1e-12);
        prop_assert!(max_abs_diff(&closed.f_kick, &generic.f_kick) < 1e-12);
        prop_assert!(unitarity_residual(&reconstruct_floquet(&closed).unwrap()) < 1e-10);
    }

    #[test]
    fn folding_is_idempotent(values in prop::collection::vec(-50.0..50.0f64, 1..30)) {
        let once = fold_to_brillouin(&values, 1.0).unwrap();
        let twice = fold_to_brillouin(once.angles(), 1.0).unwrap();
        prop_assert_eq!(once.angles(), twice.angles());
    }

    #[test]
    fn matching_is_symmetric_and_reflexive(alpha in 0.0..6.0f64, beta in 0.0..1.0f64, twice in 1u32..30) {
        let p = params(alpha, beta, twice);
        let a = exact_spectrum(&p).unwrap();
        let b = folded_effective_spectrum(&p).unwrap();
        prop_assert_eq!(match_spectra(&a, &a).unwrap().max_dist, 0.0);
        let ab = match_spectra(&a, &b).unwrap();
        let ba = match_spectra(&b, &a).unwrap();
        prop_assert!((ab.mean_dist - ba.mean_dist).abs() < 1e-12);
        prop_assert!(ab.max_dist <= PI);
    }

    // at n_terms = 10·dim the truncated tail is exp(−(20π·frac)²/2): converged for frac ≥ 0.1
    #[test]
    fn dos_estimators_normalized_and_consistent(alpha in 0.0..6.0f64, beta in 0.0..1.0f64, twice in 2u32..40, frac in 0.1..0.5f64) {
        let s = exact_spectrum(&params(alpha, beta, twice)).unwrap();
        let g = dos_gaussian(&s, frac, 1024).unwrap();
        let f = dos_fourier(&s, 10 * (twice as usize + 1), g.sigma, 1024).unwrap();
        prop_assert!((g.integral() - 1.0).abs() < 1e-6);
        prop_assert!((f.integral() - 1.0).abs() < 1e-6);
        prop_assert!(g.sup_distance(&f).unwrap() < 1e-6);
    }

    #[test]
    fn vanishing_kick_dos_coincide(alpha in 0.0..6.0f64, twice in 2u32..40) {
        let p = params(alpha, 1e-9, twice);
        let e = dos_gaussian(&exact_spectrum(&p).unwrap(), 0.1, 1024).unwrap();
        let h = dos_gaussian(&folded_effective_spectrum(&p).unwrap(), 0.1, 1024).unwrap();
        prop_assert!(e.sup_distance(&h).unwrap() < 1e-9);
    }

    #[test]
    fn coherent_states_are_normalized(theta in 0.0..PI, psi in 0.0..(2.0 * PI), twice in 1u32..60) {
        let alg = build_spin_operators::<f64>(Spin::from_twice(twice).unwrap());
        let cs = spin_coherent_state(&alg, theta, psi).unwrap();
        prop_assert!((cs.amplitudes().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn map_stays_on_sphere(theta in 0.0..PI, psi in 0.0..(2.0 * PI), alpha in 0.0..10.0f64, beta in 0.0..3.0f64) {
        let mut s = ClassicalState::from_angles(theta, psi);
        for _ in 0..1000 {
            s = kicked_top_map(&s, alpha, beta).unwrap();
        }
        prop_assert!((s.norm_sq() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn energy_forms_agree(z in -0.999..0.999f64, psi in -PI..PI, alpha in 0.0..10.0f64, beta in 0.0..3.0f64) {
        let c = CanonicalState::new(z, psi).unwrap();
        let e1 = hcl_energy(&c, alpha, beta);
        let e2 = hcl_energy_cartesian(&ClassicalState::from_canonical(&c), alpha, beta);
        prop_assert!((e1 - e2).abs() < 1e-12);
    }
}
