//! Invariants over randomly drawn states and parameters.

use std::f64::consts::{FRAC_PI_2, PI};

use proptest::prelude::*;

use tomolens::beamsplitter::{apply, apply_inverse, block_unitary, BeamsplitterConfig};
use tomolens::decoherence::{ChannelConfig, ChannelKind};
use tomolens::density::TwoModeDensityMatrix;
use tomolens::fock::{SingleModeState, TwoModeState};
use tomolens::hermite::HermiteTable;
use tomolens::linalg::unitarity_defect;
use tomolens::metrics::{entropy_at, heisenberg_product, LN_PI_E};
use tomolens::moments::{extract_moments, oracle_moments};
use tomolens::states::{make_cat, make_coherent, make_squeezed, CatKind, SqueezeBase};
use tomolens::tomography::{pi_shift_deviation, tomogram, QuadratureGrid};
use tomolens::{Complex64, HALF_LN_PI_E, TRUNCATION_BUFFER};

fn complex(max: f64) -> impl Strategy<Value = Complex64> {
    (0.0..max, 0.0..2.0 * PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn cat_kind() -> impl Strategy<Value = CatKind> {
    prop_oneof![Just(CatKind::Even), Just(CatKind::Odd), Just(CatKind::YurkeStoler)]
}

/// Coherent states, cats and squeezed states of moderate size.
fn single_mode() -> impl Strategy<Value = SingleModeState> {
    prop_oneof![
        complex(2.0).prop_map(|a| make_coherent(a, None).unwrap()),
        (complex(2.0).prop_filter("odd cat needs α ≠ 0", |a| a.norm() > 0.05), cat_kind())
            .prop_map(|(a, k)| make_cat(a, k, None).unwrap()),
        (complex(0.9), prop_oneof![Just(SqueezeBase::Vacuum), Just(SqueezeBase::One)])
            .prop_map(|(xi, b)| make_squeezed(xi, b, None).unwrap()),
    ]
}

/// Random two-mode pure state supported on n, m ≤ `support`, stored with
/// the truncation buffer on top.
fn two_mode(support: usize) -> impl Strategy<Value = TwoModeState> {
    let d = support + 1;
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), d * d).prop_map(move |v| {
        let amps: Vec<Complex64> = v.into_iter().map(|(re, im)| Complex64::new(re, im)).collect();
        TwoModeState::from_fn(support + TRUNCATION_BUFFER, |n, m| {
            if n < d && m < d { amps[n * d + m] } else { Complex64::new(0.0, 0.0) }
        })
        .normalized()
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn tomogram_rows_are_normalized(s in single_mode(), theta in 0.0..PI) {
        let grid = QuadratureGrid::default_covering(&s);
        let t = tomogram(&s, &[theta], &grid).unwrap();
        prop_assert!((t.masses()[0] - 1.0).abs() < 1e-8, "mass {}", t.masses()[0]);
        prop_assert!(t.row(0).iter().all(|&w| w >= 0.0));
    }

    #[test]
    fn pi_shift_mirrors_the_quadrature(s in single_mode(), theta in 0.0..PI) {
        let grid = QuadratureGrid::default_covering(&s);
        let report = pi_shift_deviation(&s, &[theta], &grid);
        prop_assert!(report.passes(1e-9), "deviation {}", report.max_deviation);
    }

    #[test]
    fn entropic_uncertainty_holds(s in single_mode(), theta in 0.0..PI) {
        let grid = QuadratureGrid::default_covering(&s);
        let sum = entropy_at(&s, theta, &grid).unwrap() + entropy_at(&s, theta + FRAC_PI_2, &grid).unwrap();
        prop_assert!(sum >= LN_PI_E - 1e-6, "sum {sum}");
    }

    #[test]
    fn extracted_moments_are_hermitian_and_respect_heisenberg(s in single_mode(), theta in 0.0..PI) {
        let grid = QuadratureGrid::default_covering(&s);
        let m = extract_moments(&s, 4, &grid).unwrap();
        prop_assert!(m.hermiticity_defect() < 1e-9);
        let diff = m.max_difference(&oracle_moments(&s, 4).unwrap());
        prop_assert!(diff < 1e-7, "diff {diff}");
        prop_assert!(heisenberg_product(&m, theta).unwrap() >= 0.25 - 1e-8);
    }

    #[test]
    fn coherent_entropy_is_phase_independent(a in complex(2.5), theta in 0.0..PI) {
        let s = make_coherent(a, None).unwrap();
        let grid = QuadratureGrid::default_covering(&s);
        prop_assert!((entropy_at(&s, theta, &grid).unwrap() - HALF_LN_PI_E).abs() < 1e-8);
    }

    #[test]
    fn beamsplitter_preserves_norm_and_inverts(s in two_mode(3), phi in 0.0..2.0 * PI) {
        let cfg = BeamsplitterConfig::new(phi);
        let out = apply(&cfg, &s).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        let back = apply_inverse(&cfg, &out).unwrap().resized(s.n_cut());
        prop_assert!((back.fidelity(&s) - 1.0).abs() < 1e-10);
        // total photon number is conserved block by block
        let (before, after) = (s.total_photon_distribution(), out.total_photon_distribution());
        for (t, p) in before.iter().enumerate() {
            prop_assert!((after.get(t).copied().unwrap_or(0.0) - p).abs() < 1e-10);
        }
    }

    #[test]
    fn beamsplitter_blocks_are_unitary(total in 0usize..30, phi in 0.0..2.0 * PI) {
        prop_assert!(unitarity_defect(&block_unitary(total, phi)) < 1e-9);
    }

    #[test]
    fn channels_keep_density_matrices_physical(
        s in two_mode(2),
        amplitude in any::<bool>(),
        rates in (0.1..2.0f64, 0.1..2.0f64),
        t in 0.0..5.0f64,
    ) {
        let kind = if amplitude { ChannelKind::AmplitudeDecay } else { ChannelKind::PhaseDamping };
        let rho = TwoModeDensityMatrix::from_pure(&s);
        let out = ChannelConfig::new(kind, [rates.0, rates.1], vec![]).evolve(&rho, t).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < 1e-9);
        prop_assert!(out.trace().im.abs() < 1e-12);
        prop_assert!(out.hermiticity_defect() < 1e-12);
        prop_assert!(out.purity() <= 1.0 + 1e-12);
        prop_assert!(out.populations().iter().all(|&p| p >= -1e-14));
    }

    #[test]
    fn phase_damping_never_moves_populations(s in two_mode(2), t in 0.0..5.0f64) {
        let rho = TwoModeDensityMatrix::from_pure(&s);
        let out = ChannelConfig::unit(ChannelKind::PhaseDamping).evolve(&rho, t).unwrap();
        for (a, b) in rho.populations().iter().zip(out.populations()) {
            prop_assert!((a - b).abs() < 1e-14);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn hermite_functions_are_orthonormal(n_max in 5usize..40) {
        let grid = QuadratureGrid::default_for(n_max as f64);
        let table = HermiteTable::new(n_max, grid.xs());
        for n in 0..=n_max {
            for m in n..=n_max {
                let prod: Vec<f64> = table.row(n).iter().zip(table.row(m)).map(|(a, b)| a * b).collect();
                let expected = if n == m { 1.0 } else { 0.0 };
                prop_assert!((grid.integrate(&prod) - expected).abs() < 1e-10, "({n},{m})");
            }
        }
    }
}
