//! Library results against closed forms computed independently here.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use tomolens::beamsplitter::{apply, BeamsplitterConfig};
use tomolens::decoherence::{ChannelConfig, ChannelKind};
use tomolens::density::TwoModeDensityMatrix;
use tomolens::fock::{SingleModeState, TwoModeState};
use tomolens::metrics::{entropy_at, variance};
use tomolens::moments::extract_moments;
use tomolens::states::{make_cat, make_coherent, make_squeezed, make_two_mode, CatKind, SqueezeBase, TwoModeKind};
use tomolens::tomography::{tomogram, tomogram_two_mode, QuadratureGrid};
use tomolens::{Complex64, HALF_LN_PI_E};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// ⟨X_θ|β⟩ = π^{−1/4} exp(−X²/2 + √2 β' X − β'²/2 − |β|²/2), β' = β e^{−iθ}
fn coherent_wavefunction(beta: Complex64, theta: f64, x: f64) -> Complex64 {
    let b = beta * Complex64::from_polar(1.0, -theta);
    let expo = c(-0.5 * x * x, 0.0) + b * (2f64.sqrt() * x) - b * b * 0.5 - 0.5 * beta.norm_sqr();
    expo.exp() * PI.powf(-0.25)
}

/// Hermite functions by the textbook polynomial recurrence, n small.
fn hermite_function(n: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    let h = match n {
        0 => h0,
        _ => {
            for k in 1..n {
                let next = 2.0 * x * h1 - 2.0 * k as f64 * h0;
                h0 = h1;
                h1 = next;
            }
            h1
        }
    };
    let fact: f64 = (1..=n).map(|k| k as f64).product();
    h * (-x * x / 2.0).exp() / (2f64.powi(n as i32) * fact * PI.sqrt()).sqrt()
}

#[test]
fn cat_tomograms_match_superposed_wavefunctions() {
    let thetas = [0.0, 0.4, FRAC_PI_2, 2.2, PI];
    for alpha in [c(0.5, 0.0), c(1.0, 0.3), c(-1.7, 0.8)] {
        for kind in [CatKind::Even, CatKind::Odd, CatKind::YurkeStoler] {
            let s = make_cat(alpha, kind, Some(60)).unwrap();
            let grid = QuadratureGrid::default_covering(&s);
            let t = tomogram(&s, &thetas, &grid).unwrap();
            let overlap = (-2.0 * alpha.norm_sqr()).exp();
            for (i, &theta) in thetas.iter().enumerate() {
                for (j, &x) in grid.xs().iter().enumerate().step_by(7) {
                    let (p, m) = (coherent_wavefunction(alpha, theta, x), coherent_wavefunction(-alpha, theta, x));
                    let expected = match kind {
                        CatKind::Even => (p + m).norm_sqr() / (2.0 + 2.0 * overlap),
                        CatKind::Odd => (p - m).norm_sqr() / (2.0 - 2.0 * overlap),
                        CatKind::YurkeStoler => (p + c(0.0, 1.0) * m).norm_sqr() / 2.0,
                    };
                    assert!((t.value(i, j) - expected).abs() < 1e-12, "{kind:?} {alpha} θ={theta} x={x} {} {expected}", t.value(i, j));
                }
            }
        }
    }
}

#[test]
fn fock_tomograms_are_phase_independent_hermite_densities() {
    for n in [0, 1, 4, 9] {
        let s = SingleModeState::fock(n, n + 10).unwrap();
        let grid = QuadratureGrid::default_for(n as f64);
        let t = tomogram(&s, &[0.0, 1.1, 2.9], &grid).unwrap();
        for i in 0..3 {
            for (j, &x) in grid.xs().iter().enumerate().step_by(11) {
                assert!((t.value(i, j) - hermite_function(n, x).powi(2)).abs() < 1e-13);
            }
        }
    }
}

#[test]
fn squeezed_vacuum_tomogram_is_gaussian_with_rotated_variance() {
    let r = 0.6;
    let s = make_squeezed(c(r, 0.0), SqueezeBase::Vacuum, Some(80)).unwrap();
    let grid = QuadratureGrid::default_covering(&s);
    let thetas = [0.0, 0.5, FRAC_PI_2, 2.0];
    let t = tomogram(&s, &thetas, &grid).unwrap();
    for (i, &theta) in thetas.iter().enumerate() {
        let var = 0.5 * ((-2.0 * r).exp() * theta.cos().powi(2) + (2.0 * r).exp() * theta.sin().powi(2));
        for (j, &x) in grid.xs().iter().enumerate().step_by(5) {
            let expected = (-x * x / (2.0 * var)).exp() / (2.0 * PI * var).sqrt();
            assert!((t.value(i, j) - expected).abs() < 1e-11, "θ={theta} x={x} {} {expected}", t.value(i, j));
        }
        let entropy = entropy_at(&s, theta, &grid).unwrap();
        assert!((entropy - 0.5 * (2.0 * PI * std::f64::consts::E * var).ln()).abs() < 1e-9);
    }
}

#[test]
fn coherent_entropy_is_half_ln_pi_e_at_every_phase() {
    let s = make_coherent(c(1.3, -0.6), None).unwrap();
    let grid = QuadratureGrid::default_covering(&s);
    for theta in [0.0, 0.7, 1.9, 3.0] {
        assert!((entropy_at(&s, theta, &grid).unwrap() - HALF_LN_PI_E).abs() < 1e-9);
    }
}

#[test]
fn extracted_moments_match_closed_forms() {
    // coherent: ⟨a†ᵏaˡ⟩ = ᾱᵏαˡ
    let alpha = c(0.8, -0.5);
    let s = make_coherent(alpha, None).unwrap();
    let m = extract_moments(&s, 4, &QuadratureGrid::default_covering(&s)).unwrap();
    for k in 0..=4 {
        for l in 0..=(4 - k) {
            let expected = alpha.conj().powu(k as u32) * alpha.powu(l as u32);
            assert!((m.get(k, l).unwrap() - expected).norm() < 1e-9, "({k},{l})");
        }
    }
    // even cat: ⟨a†a⟩ = |α|² tanh|α|², ⟨a²⟩ = α²; odd cat uses coth
    for (kind, f) in [(CatKind::Even, f64::tanh as fn(f64) -> f64), (CatKind::Odd, |x: f64| 1.0 / x.tanh())] {
        let alpha = c(1.1, 0.4);
        let s = make_cat(alpha, kind, Some(60)).unwrap();
        let m = extract_moments(&s, 2, &QuadratureGrid::default_covering(&s)).unwrap();
        let n2 = alpha.norm_sqr();
        assert!((m.get(1, 1).unwrap().re - n2 * f(n2)).abs() < 1e-9);
        assert!((m.get(0, 2).unwrap() - alpha * alpha).norm() < 1e-9);
        assert!(m.get(0, 1).unwrap().norm() < 1e-9);
    }
    // squeezed vacuum: ⟨a†a⟩ = sinh²r, ⟨a²⟩ = −e^{iφ} sinh r cosh r
    let xi = Complex64::from_polar(0.7, 0.9);
    let s = make_squeezed(xi, SqueezeBase::Vacuum, None).unwrap();
    let m = extract_moments(&s, 2, &QuadratureGrid::default_covering(&s)).unwrap();
    let (r, phi) = (0.7f64, 0.9);
    assert!((m.get(1, 1).unwrap().re - r.sinh().powi(2)).abs() < 1e-9);
    assert!((m.get(0, 2).unwrap() + Complex64::from_polar(r.sinh() * r.cosh(), phi)).norm() < 1e-9);
    // X_θ variance: ½(cosh 2r − sinh 2r cos(2θ − φ))
    for theta in [0.0, 0.45, 1.3] {
        let v = variance(&m, theta).unwrap();
        let expected = 0.5 * ((2.0 * r).cosh() - (2.0 * r).sinh() * (2.0 * theta - phi).cos());
        assert!((v - expected).abs() < 1e-9);
    }
}

/// Caves-Schumaker quadratures are jointly Gaussian with
/// Var X₁ = Var X₂ = ½cosh 2r and Cov = −½ sinh 2r cos(θ₁ + θ₂ − θ).
#[test]
fn caves_schumaker_tomogram_is_bivariate_gaussian() {
    let (r, state_theta) = (0.8, 0.3);
    let s = make_two_mode(TwoModeKind::CavesSchumaker, r, state_theta, Some(70)).unwrap();
    let g = QuadratureGrid::simpson(-8.0, 8.0, 161).unwrap();
    for (t1, t2) in [(0.0, 0.0), (0.4, 1.2), (FRAC_PI_2, 0.0)] {
        let t = tomogram_two_mode(&s, t1, t2, &g, &g).unwrap();
        let v = 0.5 * (2.0 * r).cosh();
        let cov = -0.5 * (2.0 * r).sinh() * (t1 + t2 - state_theta).cos();
        let det = v * v - cov * cov;
        for (j, &x1) in g.xs().iter().enumerate().step_by(9) {
            for (k, &x2) in g.xs().iter().enumerate().step_by(9) {
                let q = (v * x1 * x1 - 2.0 * cov * x1 * x2 + v * x2 * x2) / det;
                let expected = (-0.5 * q).exp() / (2.0 * PI * det.sqrt());
                assert!((t.value(j, k) - expected).abs() < 1e-10, "({t1},{t2}) at ({x1},{x2}) {} {expected}", t.value(j, k));
            }
        }
    }
}

/// The ridge of the slice X₂ = 1 sits at the conditional mean Cov/Var.
#[test]
fn caves_schumaker_slice_ridge_follows_conditional_mean() {
    let r = 1.0;
    let s = make_two_mode(TwoModeKind::CavesSchumaker, r, 0.0, Some(80)).unwrap();
    let g1 = QuadratureGrid::simpson(-8.0, 8.0, 1601).unwrap();
    let g2 = QuadratureGrid::simpson(-8.0, 8.0, 161).unwrap();
    let k = g2.xs().iter().position(|&x| (x - 1.0).abs() < 1e-12).unwrap();
    let mut ridge = Vec::new();
    for theta1 in [0.0, 0.5, 1.0, FRAC_PI_2] {
        let t = tomogram_two_mode(&s, theta1, 0.0, &g1, &g2).unwrap();
        let column: Vec<f64> = (0..g1.n_points()).map(|j| t.value(j, k)).collect();
        let j = (0..column.len()).max_by(|&a, &b| column[a].total_cmp(&column[b])).unwrap();
        let expected = -(2.0 * r).tanh() * theta1.cos();
        assert!((g1.xs()[j] - expected).abs() <= g1.spacing(), "θ₁={theta1}");
        ridge.push(g1.xs()[j]);
    }
    assert!(ridge.windows(2).all(|w| w[1] > w[0]), "ridge tilts monotonically: {ridge:?}");
}

#[test]
fn beamsplitter_photon_pairs_bunch() {
    let one = SingleModeState::fock(1, 12).unwrap();
    let pair = TwoModeState::product(&one, &one);
    for phi in [0.0, 0.8, FRAC_PI_2] {
        let out = apply(&BeamsplitterConfig::new(phi), &pair).unwrap();
        // |1,1⟩ → (e^{−iφ}|2,0⟩ − e^{iφ}|0,2⟩)/√2 up to the port phases
        assert!(out.get(1, 1).norm() < 1e-12, "φ={phi}");
        assert!((out.get(2, 0).norm() - FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((out.get(0, 2).norm() - FRAC_1_SQRT_2).abs() < 1e-12);
    }
}

#[test]
fn amplitude_decay_keeps_coherent_products_coherent() {
    let (a, b) = (c(1.0, 0.5), c(-0.7, 0.2));
    let n = 24;
    let input = TwoModeState::product(&make_coherent(a, Some(n)).unwrap(), &make_coherent(b, Some(n)).unwrap());
    let rho = TwoModeDensityMatrix::from_pure(&input);
    let cfg = ChannelConfig::new(ChannelKind::AmplitudeDecay, [1.0, 0.3], vec![]);
    for t in [0.1, 0.7, 2.5] {
        let out = cfg.evolve(&rho, t).unwrap();
        let expected = TwoModeState::product(
            &make_coherent(a * (-t).exp(), Some(n)).unwrap(),
            &make_coherent(b * (-0.3 * t).exp(), Some(n)).unwrap(),
        );
        assert!((out.fidelity_with_pure(&expected) - 1.0).abs() < 1e-10, "t={t}");
        assert!((out.purity() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn phase_damping_decays_coherences_as_squared_distance() {
    // (|0⟩ + |1⟩ + |2⟩)/√3 ⊗ |1⟩: ρ_{nn'} e^{−κ_c (n − n')² t}
    let a = SingleModeState::from_amplitudes(vec![c(1.0, 0.0); 3]).normalized().unwrap();
    let input = TwoModeState::product(&a, &SingleModeState::fock(1, 2).unwrap());
    let rho = TwoModeDensityMatrix::from_pure(&input);
    let (kc, t) = (0.4, 1.5);
    let out = ChannelConfig::new(ChannelKind::PhaseDamping, [kc, 2.0], vec![]).evolve(&rho, t).unwrap();
    for n in 0..3 {
        for np in 0..3 {
            let d = (n as f64 - np as f64).powi(2);
            let expected = (-kc * d * t).exp() / 3.0;
            assert!((out.get(n, np, 1, 1) - c(expected, 0.0)).norm() < 1e-14);
        }
    }
}
