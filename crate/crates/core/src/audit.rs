//! Invariant battery: normalization, π-shift symmetry, entropic and
//! Heisenberg uncertainty, beamsplitter unitarity, trace preservation and
//! oracle equivalence, evaluated over a frozen set of states.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::beamsplitter::{apply, block_unitary, BeamsplitterConfig};
use crate::decoherence::{ChannelConfig, ChannelKind};
use crate::density::TwoModeDensityMatrix;
use crate::fock::{SingleModeState, TwoModeState};
use crate::linalg::unitarity_defect;
use crate::metrics::{entropy_two_mode, heisenberg_product, row_entropy, EUR_TOLERANCE, LN_PI_E};
use crate::moments::{extract_moments, extract_two_mode_moments, oracle_moments, oracle_two_mode_moments};
use crate::states::{Family, StateSpec};
use crate::tomography::{evaluate, pi_shift_deviation, QuadratureGrid, SingleModeSource, TwoModeSource};
use crate::Result;

pub const NORMALIZATION_TOLERANCE: f64 = 1e-8;
pub const TWO_MODE_NORMALIZATION_TOLERANCE: f64 = 1e-7;
pub const PI_SHIFT_TOLERANCE: f64 = 1e-9;
pub const HEISENBERG_TOLERANCE: f64 = 1e-8;
pub const ORACLE_TOLERANCE: f64 = 1e-7;
pub const TWO_MODE_ORACLE_TOLERANCE: f64 = 1e-6;
pub const UNITARITY_TOLERANCE: f64 = 1e-9;
pub const TRACE_TOLERANCE: f64 = 1e-9;
/// Phases of the uncertainty-relation sweeps.
pub const EUR_PHASES: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// The measured quantity the threshold applies to.
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AuditReport {
    pub checks: Vec<CheckResult>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// One line per check: status, name, value, threshold, detail.
    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{status}  {:<width$}  value={:<12.4e} threshold={:<9.1e} {}",
                c.name, c.value, c.threshold, c.detail
            );
        }
        let failed = self.failures().count();
        let _ = writeln!(out, "{} checks, {} failed", self.checks.len(), failed);
        out
    }

    fn push(&mut self, name: String, passed: bool, value: f64, threshold: f64, detail: impl Into<String>) {
        self.checks.push(CheckResult {
            name,
            passed,
            value,
            threshold,
            detail: detail.into(),
        });
    }

    fn push_error(&mut self, name: String, threshold: f64, err: &crate::Error) {
        self.push(name, false, f64::NAN, threshold, err.to_string());
    }
}

/// Quadrature grid used by the battery.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridChoice {
    /// Per-state grid covering the state's quadrature support.
    Adaptive,
    /// The same grid for every state and both axes.
    Fixed { x_min: f64, x_max: f64, n_points: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditBattery {
    pub single: Vec<StateSpec>,
    pub two_mode: Vec<StateSpec>,
    pub grid: GridChoice,
}

impl Default for AuditBattery {
    fn default() -> Self {
        let s = FRAC_1_SQRT_2;
        let single = vec![
            Family::Fock { n: 0 },
            Family::Coherent { alpha: Complex64::new(0.7, 0.2).into() },
            Family::Ecs { alpha: s.into() },
            Family::Ocs { alpha: 1.0.into() },
            Family::YurkeStoler { alpha: 1.0.into() },
            Family::SqueezedVacuum { xi: 0.5.into() },
            Family::Yuen { xi: 0.5.into() },
            Family::Pacs { alpha: s.into(), m: 3 },
            Family::Isospectral { zeta: s.into(), i: 3 },
            Family::Fock { n: 3 },
        ];
        let two_mode = vec![
            Family::CavesSchumaker { r: 1.0, theta: 0.0 },
            Family::PairCoherent { r: 1.0, theta: 0.0 },
        ];
        Self {
            single: single.into_iter().map(StateSpec::new).collect(),
            two_mode: two_mode.into_iter().map(StateSpec::new).collect(),
            grid: GridChoice::Adaptive,
        }
    }
}

impl AuditBattery {
    /// Negative control: a grid covering only [−1, 3].
    pub fn with_shrunk_grid(mut self) -> Self {
        self.grid = GridChoice::Fixed {
            x_min: -1.0,
            x_max: 3.0,
            n_points: 401,
        };
        self
    }

    /// Negative control: a coherent state α = 2 forced into n_cut = 4.
    pub fn with_inadequate_truncation(mut self) -> Self {
        self.single
            .push(StateSpec::new(Family::Coherent { alpha: 2.0.into() }).with_n_cut(4));
        self
    }

    fn grid_for<S: SingleModeSource + ?Sized>(&self, source: &S, n_points: usize) -> Result<QuadratureGrid> {
        match self.grid {
            GridChoice::Adaptive => QuadratureGrid::covering(source, n_points),
            GridChoice::Fixed { x_min, x_max, n_points } => QuadratureGrid::simpson(x_min, x_max, n_points),
        }
    }
}

fn eur_phases() -> Vec<f64> {
    (0..EUR_PHASES).map(|i| std::f64::consts::PI * i as f64 / EUR_PHASES as f64).collect()
}

fn audit_single(report: &mut AuditReport, battery: &AuditBattery, spec: &StateSpec) {
    let label = spec.label();
    let state = match spec.build().map(|s| s.single()) {
        Ok(Some(s)) => s,
        Ok(None) => {
            report.push(format!("construct {label}"), false, f64::NAN, 0.0, "not a single-mode state");
            return;
        }
        Err(e) => {
            report.push_error(format!("truncation certificate {label}"), crate::TAIL_TOLERANCE, &e);
            return;
        }
    };
    report.push(
        format!("truncation certificate {label}"),
        true,
        state.tail_mass(state.n_cut().saturating_sub(crate::TRUNCATION_BUFFER)),
        crate::TAIL_TOLERANCE,
        format!("n_cut = {}", state.n_cut()),
    );
    let grid = match battery.grid_for(&state, crate::tomography::DEFAULT_POINTS) {
        Ok(g) => g,
        Err(e) => {
            report.push_error(format!("grid {label}"), 0.0, &e);
            return;
        }
    };
    let thetas = eur_phases();
    let all: Vec<f64> = thetas.iter().copied().chain(thetas.iter().map(|t| t + FRAC_PI_2)).collect();
    let t = evaluate(&state, &all, &grid);

    let worst_mass = t.masses().iter().map(|m| (m - 1.0).abs()).fold(0.0, f64::max);
    report.push(
        format!("normalization {label}"),
        worst_mass <= NORMALIZATION_TOLERANCE,
        worst_mass,
        NORMALIZATION_TOLERANCE,
        format!("grid [{}, {}] x {}", grid.x_min(), grid.x_max(), grid.n_points()),
    );

    let pi = pi_shift_deviation(&state, &thetas, &grid);
    report.push(
        format!("pi-shift {label}"),
        pi.passes(PI_SHIFT_TOLERANCE),
        pi.max_deviation,
        PI_SHIFT_TOLERANCE,
        format!("{} phase pairs", pi.pairs),
    );

    let n = thetas.len();
    let eur_slack = (0..n)
        .map(|i| row_entropy(t.row(i), &grid) + row_entropy(t.row(i + n), &grid) - LN_PI_E)
        .fold(f64::INFINITY, f64::min);
    report.push(
        format!("entropic uncertainty {label}"),
        eur_slack >= -EUR_TOLERANCE,
        eur_slack,
        -EUR_TOLERANCE,
        "min S(theta) + S(theta + pi/2) - ln(pi e)",
    );

    let extracted = match extract_moments(&state, 4, &grid) {
        Ok(m) => m,
        Err(e) => {
            report.push_error(format!("oracle equivalence {label}"), ORACLE_TOLERANCE, &e);
            return;
        }
    };
    let heisenberg = thetas
        .iter()
        .map(|&th| heisenberg_product(&extracted, th).map(|p| p - 0.25))
        .collect::<Result<Vec<f64>>>()
        .map(|v| v.into_iter().fold(f64::INFINITY, f64::min));
    match heisenberg {
        Ok(slack) => report.push(
            format!("heisenberg {label}"),
            slack >= -HEISENBERG_TOLERANCE,
            slack,
            -HEISENBERG_TOLERANCE,
            "min var(theta) var(theta + pi/2) - 1/4",
        ),
        Err(e) => report.push_error(format!("heisenberg {label}"), HEISENBERG_TOLERANCE, &e),
    }
    match oracle_moments(&state, 4) {
        Ok(oracle) => {
            let diff = extracted.max_difference(&oracle);
            report.push(
                format!("oracle equivalence {label}"),
                diff < ORACLE_TOLERANCE,
                diff,
                ORACLE_TOLERANCE,
                "max |extract - oracle|, k + l <= 4",
            );
        }
        Err(e) => report.push_error(format!("oracle equivalence {label}"), ORACLE_TOLERANCE, &e),
    }
}

fn audit_two_mode(report: &mut AuditReport, battery: &AuditBattery, spec: &StateSpec) {
    let label = spec.label();
    let state: TwoModeState = match spec.build().map(|s| s.two()) {
        Ok(Some(s)) => s,
        Ok(None) => {
            report.push(format!("construct {label}"), false, f64::NAN, 0.0, "not a two-mode state");
            return;
        }
        Err(e) => {
            report.push_error(format!("truncation certificate {label}"), crate::TAIL_TOLERANCE, &e);
            return;
        }
    };
    let (ra, rb) = (state.reduced(false), state.reduced(true));
    let grids = battery
        .grid_for(&ra, crate::tomography::DEFAULT_TWO_MODE_POINTS)
        .and_then(|g1| battery.grid_for(&rb, crate::tomography::DEFAULT_TWO_MODE_POINTS).map(|g2| (g1, g2)));
    let (g1, g2) = match grids {
        Ok(g) => g,
        Err(e) => {
            report.push_error(format!("grid {label}"), 0.0, &e);
            return;
        }
    };
    let mut worst_mass = 0.0f64;
    let mut eur_slack = f64::INFINITY;
    for theta in [0.0, 0.5, 1.1, 2.3] {
        let t = state.evaluate_surface(theta, theta, &g1, &g2);
        let t_conj = state.evaluate_surface(theta + FRAC_PI_2, theta + FRAC_PI_2, &g1, &g2);
        worst_mass = worst_mass.max((t.mass() - 1.0).abs()).max((t_conj.mass() - 1.0).abs());
        eur_slack = eur_slack.min(entropy_two_mode(&t) + entropy_two_mode(&t_conj) - 2.0 * LN_PI_E);
    }
    report.push(
        format!("two-mode normalization {label}"),
        worst_mass <= TWO_MODE_NORMALIZATION_TOLERANCE,
        worst_mass,
        TWO_MODE_NORMALIZATION_TOLERANCE,
        "",
    );
    report.push(
        format!("two-mode entropic uncertainty {label}"),
        eur_slack >= -EUR_TOLERANCE,
        eur_slack,
        -EUR_TOLERANCE,
        "min S_AB + S_AB(+pi/2) - 2 ln(pi e)",
    );
    match (extract_two_mode_moments(&state, 2, &g1, &g2), oracle_two_mode_moments(&state, 2)) {
        (Ok(t), Ok(o)) => {
            let diff = t.max_difference(&o);
            report.push(
                format!("two-mode oracle equivalence {label}"),
                diff < TWO_MODE_ORACLE_TOLERANCE,
                diff,
                TWO_MODE_ORACLE_TOLERANCE,
                "max |extract - oracle|, k + l, p + q <= 2",
            );
        }
        (Err(e), _) | (_, Err(e)) => {
            report.push_error(format!("two-mode oracle equivalence {label}"), TWO_MODE_ORACLE_TOLERANCE, &e)
        }
    }
}

fn audit_beamsplitter_and_channels(report: &mut AuditReport) {
    let defect = (0..=40)
        .flat_map(|t| [0.0, 0.8, FRAC_PI_2].map(move |phi| (t, phi)))
        .map(|(t, phi)| unitarity_defect(&block_unitary(t, phi)))
        .fold(0.0, f64::max);
    report.push(
        "beamsplitter block unitarity".into(),
        defect < UNITARITY_TOLERANCE,
        defect,
        UNITARITY_TOLERANCE,
        "total photon number <= 40",
    );

    let input = StateSpec::new(Family::Ecs { alpha: 1.0.into() })
        .build()
        .ok()
        .and_then(|s| s.single())
        .map(|a| TwoModeState::product(&a, &SingleModeState::vacuum(0)));
    let Some(input) = input else {
        report.push("trace preservation".into(), false, f64::NAN, TRACE_TOLERANCE, "input construction failed");
        return;
    };
    let out = match apply(&BeamsplitterConfig::new(0.0), &input) {
        Ok(o) => o.trimmed_to_support(),
        Err(e) => {
            report.push_error("trace preservation".into(), TRACE_TOLERANCE, &e);
            return;
        }
    };
    let rho = TwoModeDensityMatrix::from_pure(&out);
    for kind in [ChannelKind::AmplitudeDecay, ChannelKind::PhaseDamping] {
        let cfg = ChannelConfig::unit(kind);
        let mut worst = 0.0f64;
        for t in [0.0, 0.05, 0.3, 1.0, 5.0, 20.0] {
            match cfg.evolve(&rho, t) {
                Ok(r) => worst = worst.max((r.trace() - Complex64::new(1.0, 0.0)).norm()),
                Err(_) => worst = f64::INFINITY,
            }
        }
        report.push(
            format!("trace preservation {}", kind.as_str()),
            worst < TRACE_TOLERANCE,
            worst,
            TRACE_TOLERANCE,
            "ECS(alpha=1) x vacuum beamsplitter output",
        );
    }
}

/// Runs every check over the battery.
pub fn run(battery: &AuditBattery) -> AuditReport {
    let mut report = AuditReport::default();
    for spec in &battery.single {
        audit_single(&mut report, battery, spec);
    }
    for spec in &battery.two_mode {
        audit_two_mode(&mut report, battery, spec);
    }
    audit_beamsplitter_and_channels(&mut report);
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_lists_every_check() {
        let mut r = AuditReport::default();
        r.push("a".into(), true, 0.0, 1.0, "");
        r.push("b".into(), false, 2.0, 1.0, "broken");
        assert!(!r.passed());
        let t = r.table();
        assert!(t.contains("PASS  a"));
        assert!(t.contains("FAIL  b"));
        assert!(t.contains("2 checks, 1 failed"));
    }

    #[test]
    fn inadequate_truncation_is_named() {
        let battery = AuditBattery {
            single: vec![],
            two_mode: vec![],
            grid: GridChoice::Adaptive,
        }
        .with_inadequate_truncation();
        let mut r = AuditReport::default();
        audit_single(&mut r, &battery, &battery.single[0]);
        let f: Vec<_> = r.failures().collect();
        assert_eq!(f.len(), 1);
        assert!(f[0].name.contains("coherent(alpha=2)"));
        assert!(f[0].detail.contains("truncation overflow"));
    }
}
