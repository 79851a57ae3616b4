//! Amplitude decay and phase damping of two-mode states.
//!
//! Amplitude decay, dρ/dt = Σ_x γ_x(2xρx† − x†xρ − ρx†x) over both modes,
//! is solved by
//! ρ_{nn'll'}(t) = e^{−[γ_c(n+n') + γ_d(l+l')]t} Σ_{r,p} C (1−e^{−2γ_c t})^r
//! (1−e^{−2γ_d t})^p ρ_{(n+r)(n'+r)(l+p)(l'+p)}(0) with
//! C = √(C(n+r,r)C(n'+r,r)C(l+p,p)C(l'+p,p)); the sum factorizes into one
//! r-sum per mode and is evaluated that way. Phase damping,
//! dρ/dt = Σ_x κ_x(2N_xρN_x − N_x²ρ − ρN_x²), multiplies each entry by
//! e^{−[κ_c(n−n')² + κ_d(m−m')²]t}. Both sums end at the basis edge, so the
//! channels add no truncation error.

use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::density::TwoModeDensityMatrix;
use crate::linalg::CMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelKind {
    AmplitudeDecay,
    PhaseDamping,
}

impl ChannelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChannelKind::AmplitudeDecay => "amplitude_decay",
            ChannelKind::PhaseDamping => "phase_damping",
        }
    }
}

fn default_rates() -> [f64; 2] {
    [1.0, 1.0]
}

/// Channel, per-mode rates (γ_c, γ_d) or (κ_c, κ_d), and evaluation times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub kind: ChannelKind,
    #[serde(default = "default_rates")]
    pub rates: [f64; 2],
    #[serde(default)]
    pub times: Vec<f64>,
}

impl ChannelConfig {
    pub fn new(kind: ChannelKind, rates: [f64; 2], times: Vec<f64>) -> Self {
        Self { kind, rates, times }
    }

    /// Unit rates on both modes.
    pub fn unit(kind: ChannelKind) -> Self {
        Self::new(kind, default_rates(), Vec::new())
    }

    pub fn validate(&self) -> Result<()> {
        for (name, rate) in ["first", "second"].iter().zip(self.rates) {
            if !(rate > 0.0) || !rate.is_finite() {
                return Err(Error::InvalidParameter(format!("{name}-mode rate {rate} must be positive")));
            }
        }
        if let Some(t) = self.times.first() {
            if !(*t >= 0.0) {
                return Err(Error::InvalidParameter(format!("times must start at t >= 0, got {t}")));
            }
        }
        if self.times.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(Error::InvalidParameter("times must be sorted".into()));
        }
        Ok(())
    }

    pub fn evolve(&self, rho: &TwoModeDensityMatrix, t: f64) -> Result<TwoModeDensityMatrix> {
        match self.kind {
            ChannelKind::AmplitudeDecay => evolve_amplitude(rho, self.rates, t),
            ChannelKind::PhaseDamping => evolve_phase(rho, self.rates, t),
        }
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("evolution time {t} must be finite and >= 0")));
    }
    Ok(())
}

/// ln C(n+r, r)
fn ln_binomial(n: usize, r: usize) -> f64 {
    (1..=r).map(|k| ((n + k) as f64 / k as f64).ln()).sum()
}

/// One mode's share of the amplitude-decay solution.
fn amplitude_one_mode(rho: &CMatrix, dim: usize, second: bool, gamma: f64, t: f64) -> CMatrix {
    let decay = (-2.0 * gamma * t).exp();
    let ln_loss = (-(-2.0 * gamma * t).exp_m1()).ln();
    let index = |n: usize, other: usize| if second { other * dim + n } else { n * dim + other };
    let mut out = CMatrix::zeros(dim * dim, dim * dim);
    for n in 0..dim {
        for np in 0..dim {
            let base = (0.5 * (n + np) as f64) * decay.ln();
            let r_max = dim - n.max(np);
            for r in 0..r_max {
                let ln_coef = if r == 0 {
                    base
                } else {
                    if ln_loss == f64::NEG_INFINITY {
                        break;
                    }
                    base + 0.5 * (ln_binomial(n, r) + ln_binomial(np, r)) + r as f64 * ln_loss
                };
                let coef = ln_coef.exp();
                if coef == 0.0 {
                    continue;
                }
                for m in 0..dim {
                    for mp in 0..dim {
                        let v = rho[(index(n + r, m), index(np + r, mp))];
                        out[(index(n, m), index(np, mp))] += v * coef;
                    }
                }
            }
        }
    }
    out
}

/// Closed-form amplitude-decay solution with rates (γ_c, γ_d).
pub fn evolve_amplitude(rho0: &TwoModeDensityMatrix, rates: [f64; 2], t: f64) -> Result<TwoModeDensityMatrix> {
    check_time(t)?;
    let d = rho0.dim();
    let first = amplitude_one_mode(rho0.matrix(), d, false, rates[0], t);
    let both = amplitude_one_mode(&first, d, true, rates[1], t);
    TwoModeDensityMatrix::from_matrix(d, both)
}

/// Closed-form phase-damping solution with rates (κ_c, κ_d).
pub fn evolve_phase(rho0: &TwoModeDensityMatrix, rates: [f64; 2], t: f64) -> Result<TwoModeDensityMatrix> {
    check_time(t)?;
    let d = rho0.dim();
    let mut out = rho0.matrix().clone();
    for row in 0..d * d {
        let (n, m) = (row / d, row % d);
        for col in 0..d * d {
            if row == col {
                continue;
            }
            let (np, mp) = (col / d, col % d);
            let dn = n as f64 - np as f64;
            let dm = m as f64 - mp as f64;
            out[(row, col)] *= (-(rates[0] * dn * dn + rates[1] * dm * dm) * t).exp();
        }
    }
    TwoModeDensityMatrix::from_matrix(d, out)
}

pub fn purity(rho: &TwoModeDensityMatrix) -> f64 {
    rho.purity()
}

/// Sparse operator on the two-mode space, stored as (row, col, value).
#[derive(Debug, Clone)]
struct SparseOp {
    entries: Vec<(usize, usize, f64)>,
}

impl SparseOp {
    /// Lowering operator of the first or second mode.
    fn lowering(dim: usize, second: bool) -> Self {
        let mut entries = Vec::new();
        for n in 0..dim {
            for m in 0..dim {
                let (level, target) = if second {
                    (m, (m > 0).then(|| n * dim + m - 1))
                } else {
                    (n, (n > 0).then(|| (n - 1) * dim + m))
                };
                if let Some(row) = target {
                    entries.push((row, n * dim + m, (level as f64).sqrt()));
                }
            }
        }
        Self { entries }
    }

    fn adjoint(&self) -> Self {
        Self {
            entries: self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect(),
        }
    }

    /// self · other
    fn compose(&self, other: &SparseOp) -> Self {
        let mut acc = std::collections::BTreeMap::new();
        for &(r, k, v) in &self.entries {
            for &(k2, c, w) in &other.entries {
                if k == k2 {
                    *acc.entry((r, c)).or_insert(0.0) += v * w;
                }
            }
        }
        Self {
            entries: acc.into_iter().map(|((r, c), v)| (r, c, v)).collect(),
        }
    }

    /// self · ρ
    fn left(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
        for &(r, k, v) in &self.entries {
            for c in 0..rho.ncols() {
                out[(r, c)] += rho[(k, c)] * v;
            }
        }
        out
    }

    /// ρ · self
    fn right(&self, rho: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(rho.nrows(), rho.ncols());
        for &(k, c, v) in &self.entries {
            for r in 0..rho.nrows() {
                out[(r, c)] += rho[(r, k)] * v;
            }
        }
        out
    }
}

/// 2LρL† − L†Lρ − ρL†L
fn dissipator(jump: &SparseOp, rho: &CMatrix) -> CMatrix {
    let dag = jump.adjoint();
    let ldl = dag.compose(jump);
    dag.right(&jump.left(rho)) * Complex64::new(2.0, 0.0) - ldl.left(rho) - ldl.right(rho)
}

/// Right-hand side of the master equation, built from sparse ladder
/// operators on the two-mode basis.
pub fn lindblad_rhs(rho: &TwoModeDensityMatrix, kind: ChannelKind, rates: [f64; 2]) -> CMatrix {
    let d = rho.dim();
    let mut total = CMatrix::zeros(d * d, d * d);
    for (second, rate) in [(false, rates[0]), (true, rates[1])] {
        let a = SparseOp::lowering(d, second);
        let jump = match kind {
            ChannelKind::AmplitudeDecay => a,
            ChannelKind::PhaseDamping => a.adjoint().compose(&a),
        };
        total += dissipator(&jump, rho.matrix()) * Complex64::new(rate, 0.0);
    }
    total
}

/// Default finite-difference step of [`master_equation_residual`].
pub const RESIDUAL_STEP: f64 = 1e-6;

/// ‖[evolve(ρ₀, h) − ρ₀]/h − L(ρ₀)‖_max: the closed-form solution checked
/// against the master equation it solves.
pub fn master_equation_residual(rho0: &TwoModeDensityMatrix, kind: ChannelKind, rates: [f64; 2], h: f64) -> Result<f64> {
    let cfg = ChannelConfig::new(kind, rates, Vec::new());
    let later = cfg.evolve(rho0, h)?;
    let derivative = (later.matrix() - rho0.matrix()) / Complex64::new(h, 0.0);
    let rhs = lindblad_rhs(rho0, kind, rates);
    Ok((derivative - rhs).iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// `count` log-spaced instants on [t_min, t_max].
pub fn log_time_grid(t_min: f64, t_max: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![t_min],
        _ => {
            let (a, b) = (t_min.ln(), t_max.ln());
            (0..count)
                .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
                .collect()
        }
    }
}

/// Purity minimum over t ∈ [t_min, t_max]: a log-spaced scan followed by
/// golden-section refinement around the lowest sample. Returns (t, Tr ρ²).
pub fn purity_minimum(
    rho0: &TwoModeDensityMatrix,
    cfg: &ChannelConfig,
    t_min: f64,
    t_max: f64,
) -> Result<(f64, f64)> {
    let ts = log_time_grid(t_min, t_max, 41);
    let mut samples = Vec::with_capacity(ts.len());
    for &t in &ts {
        samples.push(cfg.evolve(rho0, t)?.purity());
    }
    let best = samples
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut lo = ts[best.saturating_sub(1)];
    let mut hi = ts[(best + 1).min(ts.len() - 1)];
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let f = |t: f64| cfg.evolve(rho0, t).map(|r| r.purity());
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..40 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2)?;
        }
    }
    let (t, p) = if f1 < f2 { (x1, f1) } else { (x2, f2) };
    if samples[best] < p {
        return Ok((ts[best], samples[best]));
    }
    Ok((t, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{SingleModeState, TwoModeState};
    use crate::states::{make_cat, make_coherent, CatKind};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn fock_pair(n: usize, m: usize, n_cut: usize) -> TwoModeDensityMatrix {
        let s = TwoModeState::product(
            &SingleModeState::fock(n, n_cut).unwrap(),
            &SingleModeState::fock(m, n_cut).unwrap(),
        );
        TwoModeDensityMatrix::from_pure(&s)
    }

    /// The quoted quadruple sum evaluated term by term.
    fn naive_amplitude(rho0: &TwoModeDensityMatrix, g: [f64; 2], t: f64) -> TwoModeDensityMatrix {
        let d = rho0.dim();
        let binom = |n: usize, r: usize| ln_binomial(n, r).exp();
        TwoModeDensityMatrix::from_fn(d - 1, |n, np, l, lp| {
            let mut acc = c(0.0);
            for r in 0..d - n.max(np) {
                for p in 0..d - l.max(lp) {
                    let coef = (binom(n, r) * binom(np, r) * binom(l, p) * binom(lp, p)).sqrt()
                        * (1.0 - (-2.0 * g[0] * t).exp()).powi(r as i32)
                        * (1.0 - (-2.0 * g[1] * t).exp()).powi(p as i32);
                    acc += rho0.get(n + r, np + r, l + p, lp + p) * coef;
                }
            }
            acc * (-(g[0] * (n + np) as f64 + g[1] * (l + lp) as f64) * t).exp()
        })
    }

    fn sample_state() -> TwoModeDensityMatrix {
        let a = make_cat(Complex64::new(0.5, 0.2), CatKind::YurkeStoler, Some(20)).unwrap();
        let b = make_coherent(c(0.4), Some(20)).unwrap();
        TwoModeDensityMatrix::from_pure(&TwoModeState::product(&a, &b))
    }

    #[test]
    fn factorized_solution_matches_quadruple_sum() {
        let rho = sample_state();
        for t in [0.0, 0.2, 1.5] {
            let fast = evolve_amplitude(&rho, [1.0, 0.4], t).unwrap();
            let slow = naive_amplitude(&rho, [1.0, 0.4], t);
            assert!((fast.matrix() - slow.matrix()).map(|z| z.norm()).max() < 1e-13, "t={t}");
        }
    }

    #[test]
    fn single_photon_decay() {
        let rho = fock_pair(1, 0, 4);
        let out = evolve_amplitude(&rho, [1.0, 1.0], 0.7).unwrap();
        assert!((out.get(1, 1, 0, 0).re - (-1.4f64).exp()).abs() < 1e-14);
        assert!((out.get(0, 0, 0, 0).re - (1.0 - (-1.4f64).exp())).abs() < 1e-14);
        assert!((out.trace() - c(1.0)).norm() < 1e-14);
    }

    #[test]
    fn vacuum_is_fixed_point() {
        let rho = fock_pair(0, 0, 3);
        for kind in [ChannelKind::AmplitudeDecay, ChannelKind::PhaseDamping] {
            let cfg = ChannelConfig::unit(kind);
            let out = cfg.evolve(&rho, 3.0).unwrap();
            assert!((out.matrix() - rho.matrix()).map(|z| z.norm()).max() < 1e-15);
            assert!(master_equation_residual(&rho, kind, [1.0, 1.0], RESIDUAL_STEP).unwrap() < 1e-12);
        }
    }

    #[test]
    fn residuals_are_small() {
        let rho = sample_state();
        for kind in [ChannelKind::AmplitudeDecay, ChannelKind::PhaseDamping] {
            let r = master_equation_residual(&rho, kind, [1.0, 0.5], RESIDUAL_STEP).unwrap();
            assert!(r < 1e-4, "{kind:?}: {r}");
        }
        let r = master_equation_residual(&fock_pair(1, 0, 4), ChannelKind::AmplitudeDecay, [1.0, 1.0], RESIDUAL_STEP)
            .unwrap();
        assert!(r < 1e-4);
    }

    #[test]
    fn swapped_phase_rates_are_detected() {
        // κ₁ ≡ κ_c: exchanging the rates breaks the residual
        let rho = sample_state();
        let cfg = ChannelConfig::new(ChannelKind::PhaseDamping, [0.3, 1.0], Vec::new());
        let later = cfg.evolve(&rho, RESIDUAL_STEP).unwrap();
        let derivative = (later.matrix() - rho.matrix()) / Complex64::new(RESIDUAL_STEP, 0.0);
        let wrong = lindblad_rhs(&rho, ChannelKind::PhaseDamping, [1.0, 0.3]);
        assert!((derivative - wrong).map(|z| z.norm()).max() > 1e-2);
    }

    #[test]
    fn phase_damping_keeps_diagonal() {
        let rho = sample_state();
        let out = evolve_phase(&rho, [1.0, 1.0], 0.5).unwrap();
        for i in 0..rho.dim() * rho.dim() {
            assert_eq!(out.matrix()[(i, i)], rho.matrix()[(i, i)]);
        }
        let v0 = rho.get(3, 1, 2, 2);
        assert!((out.get(3, 1, 2, 2) - v0 * (-2.0f64).exp()).norm() < 1e-15);
        let late = evolve_phase(&rho, [1.0, 1.0], 60.0).unwrap();
        assert!((late.purity() - rho.diagonal_part().purity()).abs() < 1e-12);
    }

    #[test]
    fn config_validation() {
        assert!(ChannelConfig::new(ChannelKind::PhaseDamping, [0.0, 1.0], vec![]).validate().is_err());
        assert!(ChannelConfig::new(ChannelKind::PhaseDamping, [1.0, 1.0], vec![1.0, 0.5]).validate().is_err());
        assert!(ChannelConfig::new(ChannelKind::PhaseDamping, [1.0, 1.0], vec![-1.0]).validate().is_err());
        assert!(ChannelConfig::new(ChannelKind::AmplitudeDecay, [1.0, 2.0], vec![0.0, 0.5]).validate().is_ok());
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_time_grid(1e-3, 20.0, 201);
        assert_eq!(g.len(), 201);
        assert!((g[0] - 1e-3).abs() < 1e-15);
        assert!((g[200] - 20.0).abs() < 1e-12);
    }
}
