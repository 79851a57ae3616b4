//! Squeezing diagnostics computed from tomograms and moment tables.
//!
//! Quadratures are X_θ = (a e^{−iθ} + a† e^{iθ})/√2. Entropies are in
//! nats. Reference values: entropy ½ln(πe) (single mode) and ln(πe) (two
//! modes), variance ½, third central moment 0 and fourth ¾; a value strictly
//! below its reference is reported as squeezed.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::moments::{extract_moments, extract_two_mode_moments, MomentTable, TwoModeMomentTable};
use crate::tomography::{
    evaluate, tomogram_two_mode, Axis, QuadratureGrid, SingleModeSource, Tomogram, TwoModeSource,
    TwoModeTomogram, CLAMP_BELOW, GRID_MASS_TOLERANCE,
};
use crate::{Error, Result, HALF_LN_PI_E};

/// ln(πe): the two-mode entropy threshold, and the single-mode
/// uncertainty bound S(θ) + S(θ + π/2).
pub const LN_PI_E: f64 = 2.0 * HALF_LN_PI_E;
pub const VARIANCE_THRESHOLD: f64 = 0.5;
pub const THIRD_MOMENT_REFERENCE: f64 = 0.0;
pub const FOURTH_MOMENT_REFERENCE: f64 = 0.75;
/// Slack allowed on entropic uncertainty sums.
pub const EUR_TOLERANCE: f64 = 1e-6;

/// Normal-ordered expansion of (a e^{−iθ} + a† e^{iθ})ʲ for j ≤ 4 as
/// (j, k, l, c): the a†ᵏaˡ term carries c·e^{i(k−l)θ}, with
/// c = j!/(k! l! s! 2ˢ) and k + l = j − 2s.
pub const NORMAL_ORDER_TABLE: &[(usize, usize, usize, f64)] = &[
    (0, 0, 0, 1.0),
    (1, 1, 0, 1.0),
    (1, 0, 1, 1.0),
    (2, 2, 0, 1.0),
    (2, 1, 1, 2.0),
    (2, 0, 2, 1.0),
    (2, 0, 0, 1.0),
    (3, 3, 0, 1.0),
    (3, 2, 1, 3.0),
    (3, 1, 2, 3.0),
    (3, 0, 3, 1.0),
    (3, 1, 0, 3.0),
    (3, 0, 1, 3.0),
    (4, 4, 0, 1.0),
    (4, 3, 1, 4.0),
    (4, 2, 2, 6.0),
    (4, 1, 3, 4.0),
    (4, 0, 4, 1.0),
    (4, 2, 0, 6.0),
    (4, 1, 1, 12.0),
    (4, 0, 2, 6.0),
    (4, 0, 0, 3.0),
];

/// Normal-orders (a + a†)ʲ by repeated right multiplication, using
/// a†ᵏaˡ·a = a†ᵏaˡ⁺¹ and a†ᵏaˡ·a† = a†ᵏ⁺¹aˡ + l a†ᵏaˡ⁻¹.
/// Returns coefficients indexed `[k][l]`.
pub fn normal_order_power(j: usize) -> Vec<Vec<f64>> {
    let mut coeff = vec![vec![0.0; j + 1]; j + 1];
    coeff[0][0] = 1.0;
    for _ in 0..j {
        let mut next = vec![vec![0.0; j + 1]; j + 1];
        for k in 0..=j {
            for l in 0..=j {
                let v = coeff[k][l];
                if v == 0.0 {
                    continue;
                }
                next[k][l + 1] += v;
                next[k + 1][l] += v;
                if l > 0 {
                    next[k][l - 1] += l as f64 * v;
                }
            }
        }
        coeff = next;
    }
    coeff
}

/// ⟨X_θʲ⟩ for j ≤ 4 from a moment table.
pub fn quadrature_moment(m: &MomentTable, theta: f64, j: usize) -> Result<f64> {
    if j > 4 {
        return Err(Error::InvalidParameter(format!("quadrature moments are tabulated up to order 4, not {j}")));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for &(order, k, l, c) in NORMAL_ORDER_TABLE.iter().filter(|e| e.0 == j) {
        debug_assert_eq!(order, j);
        acc += m.get(k, l)? * Complex64::from_polar(c, (k as f64 - l as f64) * theta);
    }
    Ok(acc.re / 2f64.powf(j as f64 / 2.0))
}

/// ⟨X_θ⟩ = √2 Re(⟨a⟩e^{−iθ})
pub fn quadrature_mean(m: &MomentTable, theta: f64) -> Result<f64> {
    quadrature_moment(m, theta, 1)
}

/// ⟨(X_θ − ⟨X_θ⟩)^q⟩ for q ∈ {2, 3, 4}.
pub fn central_moment(m: &MomentTable, theta: f64, q: usize) -> Result<f64> {
    if !(2..=4).contains(&q) {
        return Err(Error::InvalidParameter(format!("central moment order {q} is not one of 2, 3, 4")));
    }
    let mu = quadrature_mean(m, theta)?;
    let mut acc = 0.0;
    for j in 0..=q {
        let binom = (1..=j).fold(1.0, |b, i| b * (q + 1 - i) as f64 / i as f64);
        acc += binom * quadrature_moment(m, theta, j)? * (-mu).powi((q - j) as i32);
    }
    Ok(acc)
}

/// (ΔX_θ)²
pub fn variance(m: &MomentTable, theta: f64) -> Result<f64> {
    central_moment(m, theta, 2)
}

/// (ΔX_θ)² (ΔX_{θ+π/2})², bounded below by ¼.
pub fn heisenberg_product(m: &MomentTable, theta: f64) -> Result<f64> {
    Ok(variance(m, theta)? * variance(m, theta + FRAC_PI_2)?)
}

fn entropy_density(w: f64) -> f64 {
    if w < CLAMP_BELOW {
        0.0
    } else {
        -w * w.ln()
    }
}

/// −∫ω ln ω dX of one sampled row.
pub fn row_entropy(row: &[f64], grid: &QuadratureGrid) -> f64 {
    let integrand: Vec<f64> = row.iter().map(|&w| entropy_density(w)).collect();
    grid.integrate(&integrand)
}

/// Entropy of the tomogram row sampled at `theta`.
pub fn entropy(t: &Tomogram, theta: f64) -> Result<f64> {
    let i = t
        .thetas()
        .iter()
        .position(|&x| (x - theta).abs() <= 1e-12)
        .ok_or_else(|| Error::InvalidParameter(format!("tomogram has no row at theta = {theta}")))?;
    Ok(row_entropy(t.row(i), t.grid()))
}

/// S(θ) evaluated directly from a source.
pub fn entropy_at<S: SingleModeSource + ?Sized>(source: &S, theta: f64, grid: &QuadratureGrid) -> Result<f64> {
    let t = evaluate(source, &[theta], grid);
    t.check_normalization(GRID_MASS_TOLERANCE)?;
    Ok(row_entropy(t.row(0), grid))
}

/// −∬ω ln ω dX₁dX₂
pub fn entropy_two_mode(t: &TwoModeTomogram) -> f64 {
    let (g1, g2) = t.grids();
    let n2 = g2.n_points();
    g1.weights()
        .iter()
        .enumerate()
        .map(|(j, w1)| {
            let row: Vec<f64> = (0..n2).map(|k| entropy_density(t.value(j, k))).collect();
            w1 * g2.integrate(&row)
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SqueezingReport {
    pub theta: f64,
    pub entropy: f64,
    pub entropy_squeezed: bool,
    pub variance: f64,
    pub variance_squeezed: bool,
    pub central_moment_3: f64,
    pub hm3_squeezed: bool,
    pub central_moment_4: f64,
    pub hm4_squeezed: bool,
    /// S(θ) + S(θ + π/2)
    pub eur_sum: f64,
    pub eur_satisfied: bool,
}

impl SqueezingReport {
    pub const CSV_HEADER: &'static str = "theta,entropy,entropy_squeezed,variance,variance_squeezed,\
central_moment_3,hm3_squeezed,central_moment_4,hm4_squeezed,eur_sum,eur_satisfied";

    pub fn csv_fields(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            self.theta,
            self.entropy,
            self.entropy_squeezed,
            self.variance,
            self.variance_squeezed,
            self.central_moment_3,
            self.hm3_squeezed,
            self.central_moment_4,
            self.hm4_squeezed,
            self.eur_sum,
            self.eur_satisfied
        )
    }
}

/// Assembles a report from entropies S(θ), S(θ+π/2) and a moment table.
pub fn report_from_parts(theta: f64, s: f64, s_conjugate: f64, m: &MomentTable) -> Result<SqueezingReport> {
    let variance = variance(m, theta)?;
    let cm3 = central_moment(m, theta, 3)?;
    let cm4 = central_moment(m, theta, 4)?;
    let eur_sum = s + s_conjugate;
    Ok(SqueezingReport {
        theta,
        entropy: s,
        entropy_squeezed: s < HALF_LN_PI_E,
        variance,
        variance_squeezed: variance < VARIANCE_THRESHOLD,
        central_moment_3: cm3,
        hm3_squeezed: cm3 < THIRD_MOMENT_REFERENCE,
        central_moment_4: cm4,
        hm4_squeezed: cm4 < FOURTH_MOMENT_REFERENCE,
        eur_sum,
        eur_satisfied: eur_sum >= LN_PI_E - EUR_TOLERANCE,
    })
}

/// Full single-mode report at θ, with every quantity taken from the
/// tomogram.
pub fn squeezing_report<S: SingleModeSource + ?Sized>(
    source: &S,
    theta: f64,
    grid: &QuadratureGrid,
) -> Result<SqueezingReport> {
    let m = extract_moments(source, 4, grid)?;
    let s = entropy_at(source, theta, grid)?;
    let s_conj = entropy_at(source, theta + FRAC_PI_2, grid)?;
    report_from_parts(theta, s, s_conj, &m)
}

/// Relative fluctuation products over a θ sweep together with the
/// least-squares fit f² ≈ A + B cos2θ + C cos²2θ.
#[derive(Debug, Clone, PartialEq)]
pub struct RfpReport {
    pub thetas: Vec<f64>,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    /// (A, B, C)
    pub fit: [f64; 3],
    /// max |f² − fit|
    pub fit_residual: f64,
}

/// f(θ) = ΔX_θ(s₁)·ΔX_{θ+π/2}(s₂) and g(θ) = ΔX_θ(s₂)·ΔX_{θ+π/2}(s₁).
pub fn relative_fluctuation_product(m1: &MomentTable, m2: &MomentTable, theta: f64) -> Result<(f64, f64)> {
    let f = (variance(m1, theta)? * variance(m2, theta + FRAC_PI_2)?).sqrt();
    let g = (variance(m2, theta)? * variance(m1, theta + FRAC_PI_2)?).sqrt();
    Ok((f, g))
}

pub fn rfp_sweep(m1: &MomentTable, m2: &MomentTable, thetas: &[f64]) -> Result<RfpReport> {
    let mut f = Vec::with_capacity(thetas.len());
    let mut g = Vec::with_capacity(thetas.len());
    for &t in thetas {
        let (a, b) = relative_fluctuation_product(m1, m2, t)?;
        f.push(a);
        g.push(b);
    }
    let design = DMatrix::from_fn(thetas.len(), 3, |i, c| (2.0 * thetas[i]).cos().powi(c as i32));
    let target = DVector::from_iterator(thetas.len(), f.iter().map(|v| v * v));
    let solution = design
        .clone()
        .svd(true, true)
        .solve(&target, 1e-14)
        .map_err(|e| Error::InvalidParameter(format!("fluctuation-product fit failed: {e}")))?;
    let fitted = &design * &solution;
    let fit_residual = (fitted - &target).amax();
    Ok(RfpReport {
        thetas: thetas.to_vec(),
        f,
        g,
        fit: [solution[0], solution[1], solution[2]],
        fit_residual,
    })
}

/// Variance of (X_{θ₁} + X_{θ₂})/√2.
pub fn two_mode_variance(m: &TwoModeMomentTable, theta1: f64, theta2: f64) -> Result<f64> {
    let var1 = variance(&m.reduced(false), theta1)?;
    let var2 = variance(&m.reduced(true), theta2)?;
    let mean1 = quadrature_mean(&m.reduced(false), theta1)?;
    let mean2 = quadrature_mean(&m.reduced(true), theta2)?;
    // ⟨X₁X₂⟩ = Re(⟨ab⟩e^{−i(θ₁+θ₂)}) + Re(⟨a†b⟩e^{i(θ₁−θ₂)})
    let cross = (m.get(0, 1, 0, 1)? * Complex64::from_polar(1.0, -(theta1 + theta2))).re
        + (m.get(1, 0, 0, 1)? * Complex64::from_polar(1.0, theta1 - theta2)).re;
    let covariance = cross - mean1 * mean2;
    Ok(0.5 * (var1 + var2) + covariance)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReducedModeReport {
    pub theta: f64,
    pub entropy: f64,
    pub entropy_squeezed: bool,
    pub variance: f64,
    pub variance_squeezed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeSqueezingReport {
    pub theta1: f64,
    pub theta2: f64,
    /// S_AB(θ₁, θ₂)
    pub entropy: f64,
    /// S_AB < ln(πe)
    pub entropy_squeezed: bool,
    /// S_AB(θ₁,θ₂) + S_AB(θ₁+π/2, θ₂+π/2)
    pub eur_sum: f64,
    pub eur_satisfied: bool,
    /// variance of (X_{θ₁} + X_{θ₂})/√2
    pub variance: f64,
    pub variance_squeezed: bool,
    pub first: ReducedModeReport,
    pub second: ReducedModeReport,
}

impl TwoModeSqueezingReport {
    pub const CSV_HEADER: &'static str = "theta1,theta2,entropy_ab,entropy_ab_squeezed,eur_sum,eur_satisfied,\
variance,variance_squeezed,entropy_a,variance_a,entropy_b,variance_b";

    pub fn csv_fields(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.theta1,
            self.theta2,
            self.entropy,
            self.entropy_squeezed,
            self.eur_sum,
            self.eur_satisfied,
            self.variance,
            self.variance_squeezed,
            self.first.entropy,
            self.first.variance,
            self.second.entropy,
            self.second.variance
        )
    }
}

/// Two-mode report at (θ₁, θ₂) from tomograms of `source` alone.
pub fn two_mode_report<S: TwoModeSource + ?Sized>(
    source: &S,
    theta1: f64,
    theta2: f64,
    grid1: &QuadratureGrid,
    grid2: &QuadratureGrid,
) -> Result<TwoModeSqueezingReport> {
    let t = tomogram_two_mode(source, theta1, theta2, grid1, grid2)?;
    let t_conj = tomogram_two_mode(source, theta1 + FRAC_PI_2, theta2 + FRAC_PI_2, grid1, grid2)?;
    let m = extract_two_mode_moments(source, 2, grid1, grid2)?;
    let entropy = entropy_two_mode(&t);
    let eur_sum = entropy + entropy_two_mode(&t_conj);
    let variance = two_mode_variance(&m, theta1, theta2)?;
    let reduced = |axis: Axis, theta: f64| -> Result<ReducedModeReport> {
        let marginal = t.marginal(axis);
        let s = row_entropy(marginal.row(0), marginal.grid());
        let v = self::variance(&m.reduced(axis == Axis::Second), theta)?;
        Ok(ReducedModeReport {
            theta,
            entropy: s,
            entropy_squeezed: s < HALF_LN_PI_E,
            variance: v,
            variance_squeezed: v < VARIANCE_THRESHOLD,
        })
    };
    Ok(TwoModeSqueezingReport {
        theta1,
        theta2,
        entropy,
        entropy_squeezed: entropy < LN_PI_E,
        eur_sum,
        eur_satisfied: eur_sum >= 2.0 * LN_PI_E - EUR_TOLERANCE,
        variance,
        variance_squeezed: variance < VARIANCE_THRESHOLD,
        first: reduced(Axis::First, theta1)?,
        second: reduced(Axis::Second, theta2)?,
    })
}

/// Bisects `f` on [lo, hi] for a sign change, to an interval width of
/// `tolerance`. `None` when f has the same sign at both ends.
pub fn bisect_crossing(
    mut f: impl FnMut(f64) -> Result<f64>,
    lo: f64,
    hi: f64,
    tolerance: f64,
) -> Result<Option<f64>> {
    let (mut a, mut b) = (lo, hi);
    let fa = f(a)?;
    let fb = f(b)?;
    if fa == 0.0 {
        return Ok(Some(a));
    }
    if fa.signum() == fb.signum() {
        return Ok(None);
    }
    let mut sa = fa.signum();
    while b - a > tolerance {
        let mid = 0.5 * (a + b);
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(Some(mid));
        }
        if fm.signum() == sa {
            a = mid;
            sa = fm.signum();
        } else {
            b = mid;
        }
    }
    Ok(Some(0.5 * (a + b)))
}

/// `count` uniform phases on [0, π) for uncertainty-relation sweeps.
pub fn eur_thetas(count: usize) -> Vec<f64> {
    (0..count).map(|i| PI * i as f64 / count as f64).collect()
}
