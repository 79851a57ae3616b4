//! Normalized harmonic-oscillator eigenfunctions
//!
//! ψₙ(x) = Hₙ(x)·e^{−x²/2} / (π^{1/4}·√(2ⁿ n!))
//!
//! evaluated by the three-term recurrence
//!
//! ψₙ₊₁ = x·√(2/(n+1))·ψₙ − √(n/(n+1))·ψₙ₋₁
//!
//! on values carried together with a running log-scale. The Gaussian seed
//! ψ₀ underflows for |x| ≳ 38, long before high-order eigenfunctions become
//! negligible, so the seed is kept in log form and only the final product is
//! exponentiated. Raw Hermite polynomials are never formed.

use std::f64::consts::PI;

const RESCALE_ABOVE: f64 = 1e150;

fn ln_psi0(x: f64) -> f64 {
    -0.5 * x * x - 0.25 * PI.ln()
}

/// Runs the scaled recurrence up to order `n_max`, handing each order's
/// `(n, sign, ln|ψₙ(x)|)` to `emit`.
fn recur(n_max: usize, x: f64, mut emit: impl FnMut(usize, f64, f64)) {
    let base = ln_psi0(x);
    // ψₙ = p_cur · exp(base + log_scale)
    let mut log_scale = 0.0_f64;
    let mut p_prev = 0.0_f64;
    let mut p_cur = 1.0_f64;
    emit(0, 1.0, base);
    for n in 0..n_max {
        let nf = n as f64;
        let next = x * (2.0 / (nf + 1.0)).sqrt() * p_cur - (nf / (nf + 1.0)).sqrt() * p_prev;
        p_prev = p_cur;
        p_cur = next;
        if p_cur.abs() > RESCALE_ABOVE {
            p_prev /= RESCALE_ABOVE;
            p_cur /= RESCALE_ABOVE;
            log_scale += RESCALE_ABOVE.ln();
        }
        if p_cur == 0.0 {
            emit(n + 1, 0.0, f64::NEG_INFINITY);
        } else {
            emit(n + 1, p_cur.signum(), p_cur.abs().ln() + log_scale + base);
        }
    }
}

/// ψₙ(x). Total on the whole real line; never overflows.
pub fn psi(n: usize, x: f64) -> f64 {
    let (sign, ln_abs) = psi_log(n, x);
    sign * ln_abs.exp()
}

/// `(sign, ln|ψₙ(x)|)`; `ln|ψₙ|` is `-inf` at an exact node.
pub fn psi_log(n: usize, x: f64) -> (f64, f64) {
    let mut out = (1.0, f64::NEG_INFINITY);
    recur(n, x, |k, s, l| {
        if k == n {
            out = (s, l);
        }
    });
    out
}

/// ψ₀(x) .. ψ_{n_max}(x) in one pass.
pub fn psi_all(n_max: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; n_max + 1];
    recur(n_max, x, |k, s, l| out[k] = s * l.exp());
    out
}

/// ln(√(2ⁿ n!) π^{1/4}), the factor relating Hₙ(x)e^{−x²/2} to ψₙ(x).
pub fn ln_hermite_norm(n: usize) -> f64 {
    let ln_fact: f64 = (1..=n).map(|k| (k as f64).ln()).sum();
    0.5 * (n as f64 * 2f64.ln() + ln_fact) + 0.25 * PI.ln()
}

/// `(sign, ln|Hₙ(x)|)` through the normalized route:
/// ln|Hₙ| = ln|ψₙ| + x²/2 + ln(π^{1/4}√(2ⁿn!)).
pub fn hermite_log(n: usize, x: f64) -> (f64, f64) {
    let (sign, ln_abs) = psi_log(n, x);
    if ln_abs == f64::NEG_INFINITY {
        return (0.0, f64::NEG_INFINITY);
    }
    (sign, ln_abs + 0.5 * x * x + ln_hermite_norm(n))
}

/// Hₙ(x)·w, for a weight `w ≥ 0` that carries the factor e^{−x²}.
///
/// Evaluated as sign(Hₙ)·exp(ln|Hₙ| + ln w), which stays finite wherever
/// the product itself is representable.
pub fn hermite_times_weight(n: usize, x: f64, weight: f64) -> f64 {
    if weight <= 0.0 {
        return 0.0;
    }
    let (sign, ln_abs) = hermite_log(n, x);
    if ln_abs == f64::NEG_INFINITY {
        return 0.0;
    }
    sign * (ln_abs + weight.ln()).exp()
}

/// Table of ψₙ(xⱼ) for n = 0..=n_max over a fixed set of abscissae.
#[derive(Debug, Clone)]
pub struct HermiteTable {
    n_max: usize,
    n_points: usize,
    // row-major: values[n * n_points + j]
    values: Vec<f64>,
}

impl HermiteTable {
    pub fn new(n_max: usize, xs: &[f64]) -> Self {
        let n_points = xs.len();
        let mut values = vec![0.0; (n_max + 1) * n_points];
        for (j, &x) in xs.iter().enumerate() {
            recur(n_max, x, |k, s, l| values[k * n_points + j] = s * l.exp());
        }
        Self {
            n_max,
            n_points,
            values,
        }
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// ψₙ at every abscissa.
    pub fn row(&self, n: usize) -> &[f64] {
        &self.values[n * self.n_points..(n + 1) * self.n_points]
    }

    pub fn get(&self, n: usize, j: usize) -> f64 {
        self.values[n * self.n_points + j]
    }
}
