//! Lossless 50:50 beamsplitter with relative phase φ.
//!
//! Output modes are c = UaU†, d = UbU† with
//! a = (c + e^{iφ}d)/√2,  b = (d − e^{−iφ}c)/√2,
//! so a product of coherent states |α⟩⊗|β⟩ leaves as |γ⟩⊗|δ⟩ with
//! γ = (α − e^{iφ}β)/√2 and δ = (β + e^{−iφ}α)/√2. On states this is the
//! action of exp[π/4 (ab† e^{−iφ} − a†b e^{iφ})], which conserves n + m and
//! is exponentiated block by block on the subspaces of fixed total photon
//! number T, spanned by |n, T−n⟩.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fock::{support_edge, SingleModeState, TwoModeState};
use crate::linalg::{expm, unitarity_defect, CMatrix};
use crate::metrics::{two_mode_report, TwoModeSqueezingReport};
use crate::states::{make_cat, make_coherent, CatKind};
use crate::tomography::{default_two_mode_grids, QuadratureGrid};
use crate::{Error, Result, TAIL_TOLERANCE, TRUNCATION_BUFFER};

/// Largest tolerated unitarity defect of a photon-number block.
pub const BLOCK_UNITARITY_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BeamsplitterConfig {
    /// relative phase between reflected and transmitted fields, radians
    pub phi: f64,
    /// Output truncation; chosen from the input's total-photon support when
    /// absent.
    #[serde(default)]
    pub n_cut: Option<usize>,
}

impl BeamsplitterConfig {
    pub fn new(phi: f64) -> Self {
        Self { phi, n_cut: None }
    }
}

/// Generator block on |n, T−n⟩, n = 0..=T, scaled by `sign`·π/4.
fn generator_block(total: usize, phi: f64, sign: f64) -> CMatrix {
    let dim = total + 1;
    let mut g = CMatrix::zeros(dim, dim);
    let e = Complex64::from_polar(1.0, phi);
    for n in 0..total {
        // a†b |n, T−n⟩ = √(n+1)√(T−n) |n+1, T−n−1⟩
        let w = ((n + 1) as f64 * (total - n) as f64).sqrt();
        // −a†b e^{iφ} fills (n+1, n); ab† e^{−iφ} is its negated adjoint
        g[(n + 1, n)] = -e * w;
        g[(n, n + 1)] = e.conj() * w;
    }
    g * Complex64::new(sign * FRAC_PI_4, 0.0)
}

/// Unitary on the block of total photon number `total`.
pub fn block_unitary(total: usize, phi: f64) -> CMatrix {
    expm(&generator_block(total, phi, 1.0))
}

fn transform(cfg: &BeamsplitterConfig, input: &TwoModeState, sign: f64) -> Result<TwoModeState> {
    input.certify()?;
    let totals = input.total_photon_distribution();
    let norm: f64 = totals.iter().sum();
    let rel: Vec<f64> = totals.iter().map(|p| p / norm).collect();
    let t_edge = support_edge(&rel, TAIL_TOLERANCE);
    let n_cut = match cfg.n_cut {
        Some(n) => {
            if n < t_edge {
                let tail: f64 = rel[n + 1..].iter().sum();
                return Err(Error::TruncationOverflow {
                    context: format!("beamsplitter output (phi = {})", cfg.phi),
                    n_cut: n,
                    tail_mass: tail,
                    tolerance: TAIL_TOLERANCE,
                });
            }
            n
        }
        None => t_edge + TRUNCATION_BUFFER,
    };
    let in_dim = input.dim();
    let out_dim = n_cut + 1;
    let mut out = vec![Complex64::new(0.0, 0.0); out_dim * out_dim];
    // every block that fits the output basis is carried, buffer included
    for total in 0..=n_cut.min(2 * (in_dim - 1)) {
        let v: Vec<Complex64> = (0..=total).map(|n| input.get(n, total - n)).collect();
        if v.iter().all(|z| z.norm_sqr() == 0.0) {
            continue;
        }
        let u = expm(&generator_block(total, cfg.phi, sign));
        let defect = unitarity_defect(&u);
        if defect > BLOCK_UNITARITY_TOLERANCE {
            return Err(Error::InvalidParameter(format!(
                "beamsplitter block T = {total} not unitary (defect {defect:.2e})"
            )));
        }
        let w = &u * nalgebra::DVector::from_vec(v);
        for n in 0..=total {
            let m = total - n;
            if n < out_dim && m < out_dim {
                out[n * out_dim + m] = w[n];
            }
        }
    }
    let state = TwoModeState::from_fn(n_cut, |n, m| out[n * out_dim + m]);
    state.normalized()
}

/// Output state of the beamsplitter for a two-mode input.
pub fn apply(cfg: &BeamsplitterConfig, input: &TwoModeState) -> Result<TwoModeState> {
    transform(cfg, input, 1.0)
}

/// The inverse transformation (generator negated).
pub fn apply_inverse(cfg: &BeamsplitterConfig, input: &TwoModeState) -> Result<TwoModeState> {
    transform(cfg, input, -1.0)
}

/// (γ, δ) for a coherent input |α⟩⊗|β⟩.
pub fn coherent_output(alpha: Complex64, beta: Complex64, phi: f64) -> (Complex64, Complex64) {
    let e = Complex64::from_polar(1.0, phi);
    (
        (alpha - e * beta) * FRAC_1_SQRT_2,
        (beta + e.conj() * alpha) * FRAC_1_SQRT_2,
    )
}

/// Inputs with a closed-form output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosedFormKind {
    /// |α⟩⊗|β⟩
    CoherentCoherent,
    /// ECS(α)⊗ECS(β)
    EcsEcs,
    /// OCS(α)⊗OCS(β)
    OcsOcs,
    /// ECS(α)⊗|0⟩
    EcsVacuum,
    /// OCS(α)⊗|0⟩
    OcsVacuum,
}

impl ClosedFormKind {
    /// The product input the closed form describes.
    pub fn input(&self, alpha: Complex64, beta: Complex64) -> Result<TwoModeState> {
        let (a, b) = match self {
            ClosedFormKind::CoherentCoherent => (make_coherent(alpha, None)?, make_coherent(beta, None)?),
            ClosedFormKind::EcsEcs => (make_cat(alpha, CatKind::Even, None)?, make_cat(beta, CatKind::Even, None)?),
            ClosedFormKind::OcsOcs => (make_cat(alpha, CatKind::Odd, None)?, make_cat(beta, CatKind::Odd, None)?),
            ClosedFormKind::EcsVacuum => (make_cat(alpha, CatKind::Even, None)?, SingleModeState::vacuum(0)),
            ClosedFormKind::OcsVacuum => (make_cat(alpha, CatKind::Odd, None)?, SingleModeState::vacuum(0)),
        };
        Ok(TwoModeState::product(&a, &b))
    }
}

/// ln(|z|ⁿ/√(n!)) and arg(zⁿ)
fn power_term(z: Complex64, n: usize, ln_fact: f64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 0.0);
    }
    if z.norm() == 0.0 {
        return (f64::NEG_INFINITY, 0.0);
    }
    (n as f64 * z.norm().ln() - 0.5 * ln_fact, n as f64 * z.arg())
}

/// Σ_s w_s |γ_s⟩⊗|δ_s⟩ evaluated on the n_cut basis (unnormalized).
fn coherent_superposition(terms: &[(Complex64, Complex64, Complex64)], n_cut: usize) -> TwoModeState {
    let ln_fact: Vec<f64> = (0..=n_cut)
        .scan(0.0, |acc, k| {
            if k > 0 {
                *acc += (k as f64).ln();
            }
            Some(*acc)
        })
        .collect();
    TwoModeState::from_fn(n_cut, |n, m| {
        terms
            .iter()
            .map(|&(w, g, d)| {
                let (lg, pg) = power_term(g, n, ln_fact[n]);
                let (ld, pd) = power_term(d, m, ln_fact[m]);
                let ln_mag = lg + ld - 0.5 * (g.norm_sqr() + d.norm_sqr());
                if ln_mag == f64::NEG_INFINITY {
                    Complex64::new(0.0, 0.0)
                } else {
                    w * Complex64::from_polar(ln_mag.exp(), pg + pd)
                }
            })
            .sum()
    })
}

/// Closed-form output for the given input family, normalized.
///
/// Cat inputs are sums of coherent components, each mapped to |γ, δ⟩; the
/// ECS⊗ECS output is N[|γ₋,δ₊⟩ + |−γ₋,−δ₊⟩ + |γ₊,δ₋⟩ + |−γ₊,−δ₋⟩] with
/// γ± = (α ± e^{iφ}β)/√2 and δ± = (β ± e^{−iφ}α)/√2. With a vacuum port the
/// coefficients are (1 ± (−1)^{n+m}) α^{n+m} e^{−imφ} / √(2^{n+m} n! m!).
pub fn output_closed_form(
    kind: ClosedFormKind,
    alpha: Complex64,
    beta: Complex64,
    phi: f64,
    n_cut: usize,
) -> Result<TwoModeState> {
    let odd_a = matches!(kind, ClosedFormKind::OcsOcs | ClosedFormKind::OcsVacuum);
    if odd_a && alpha.norm() == 0.0 {
        return Err(Error::DegenerateParameter("odd coherent input is undefined at alpha = 0".into()));
    }
    if kind == ClosedFormKind::OcsOcs && beta.norm() == 0.0 {
        return Err(Error::DegenerateParameter("odd coherent input is undefined at beta = 0".into()));
    }
    let one = Complex64::new(1.0, 0.0);
    let state = match kind {
        ClosedFormKind::CoherentCoherent => {
            let (g, d) = coherent_output(alpha, beta, phi);
            coherent_superposition(&[(one, g, d)], n_cut)
        }
        ClosedFormKind::EcsVacuum | ClosedFormKind::OcsVacuum => {
            let sign = if odd_a { -1.0 } else { 1.0 };
            let e = Complex64::from_polar(1.0, -phi);
            let ln_fact: Vec<f64> = (0..=n_cut).map(|k| (1..=k).map(|v| (v as f64).ln()).sum()).collect();
            TwoModeState::from_fn(n_cut, |n, m| {
                let parity = if (n + m) % 2 == 0 { 1.0 } else { -1.0 };
                let factor = 1.0 + sign * parity;
                if factor == 0.0 {
                    return Complex64::new(0.0, 0.0);
                }
                let total = n + m;
                let (la, pa) = power_term(alpha, total, 0.0);
                if la == f64::NEG_INFINITY {
                    return Complex64::new(0.0, 0.0);
                }
                let ln_mag = la - 0.5 * (total as f64 * 2f64.ln() + ln_fact[n] + ln_fact[m]);
                factor * Complex64::from_polar(ln_mag.exp(), pa) * e.powu(m as u32)
            })
        }
        ClosedFormKind::EcsEcs | ClosedFormKind::OcsOcs => {
            let mut terms = Vec::with_capacity(4);
            for sa in [1.0, -1.0] {
                for sb in [1.0, -1.0] {
                    let weight = if kind == ClosedFormKind::OcsOcs { sa * sb } else { 1.0 };
                    let (g, d) = coherent_output(alpha * sa, beta * sb, phi);
                    terms.push((Complex64::new(weight, 0.0), g, d));
                }
            }
            coherent_superposition(&terms, n_cut)
        }
    };
    state.normalized()
}

/// Two-mode squeezing reports of the output at θ₁ = θ₂ = θ for each φ.
pub fn phi_sweep_report(
    input: &TwoModeState,
    phis: &[f64],
    theta: f64,
) -> Result<Vec<(f64, TwoModeSqueezingReport)>> {
    phis.iter()
        .map(|&phi| {
            let out = apply(&BeamsplitterConfig::new(phi), input)?.trimmed_to_support();
            let (g1, g2): (QuadratureGrid, QuadratureGrid) = default_two_mode_grids(&out);
            Ok((phi, two_mode_report(&out, theta, theta, &g1, &g2)?))
        })
        .collect()
}
