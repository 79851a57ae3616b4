use std::f64::consts::FRAC_PI_2;
use std::fmt::Write as _;

use rayon::prelude::*;
use tomolens::beamsplitter::{self, BeamsplitterConfig};
use tomolens::decoherence::{self, ChannelConfig, RESIDUAL_STEP};
use tomolens::density::TwoModeDensityMatrix;
use tomolens::fock::{SingleModeState, TwoModeState};
use tomolens::metrics::{self, TwoModeSqueezingReport};
use tomolens::moments::{extract_moments, extract_two_mode_moments, oracle_moments, oracle_two_mode_moments};
use tomolens::states::{State, StateSpec};
use tomolens::tomography::{
    default_two_mode_grids, tomogram, tomogram_two_mode, QuadratureGrid, TwoModeSource, DEFAULT_POINTS,
};

use crate::config::{parameter_value, GridConfig, Plan, Scenario};
use crate::output::{self, preamble, slug, Artifact};
use crate::CliError;

/// Result of a scenario: its artifacts, plus a failure to report after
/// they are written.
pub struct Outcome {
    pub artifacts: Vec<Artifact>,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(artifacts: Vec<Artifact>) -> Self {
        Self { artifacts, failure: None }
    }
}

type Guarded<T> = Result<T, CliError>;

fn point_name(spec: &StateSpec, index: usize, parameter: Option<f64>) -> String {
    match parameter {
        Some(p) => format!("states[{index}] {} at parameter {p}", spec.label()),
        None => format!("states[{index}] {}", spec.label()),
    }
}

fn guard<T>(point: &str, r: tomolens::Result<T>) -> Guarded<T> {
    r.map_err(|source| CliError::Guard { point: point.to_string(), source })
}

fn fmt_param(p: Option<f64>, spec: &StateSpec) -> String {
    p.or_else(|| parameter_value(spec)).map(|v| v.to_string()).unwrap_or_default()
}

fn single_grid(grid: &Option<GridConfig>, state: &SingleModeState) -> tomolens::Result<QuadratureGrid> {
    match grid {
        Some(g) => QuadratureGrid::simpson(g.x_min, g.x_max, g.points),
        None => QuadratureGrid::covering(state, DEFAULT_POINTS),
    }
}

fn two_grids<S: TwoModeSource + ?Sized>(
    grid: &Option<GridConfig>,
    source: &S,
) -> tomolens::Result<(QuadratureGrid, QuadratureGrid)> {
    match grid {
        Some(g) => {
            let q = QuadratureGrid::simpson(g.x_min, g.x_max, g.points)?;
            Ok((q.clone(), q))
        }
        None => Ok(default_two_mode_grids(source)),
    }
}

/// Evaluates every point on the worker pool; results come back in input order.
fn par_points<P: Sync, T: Send>(points: &[P], f: impl Fn(&P) -> Guarded<T> + Sync + Send) -> Guarded<Vec<T>> {
    points.par_iter().map(f).collect::<Vec<_>>().into_iter().collect()
}

/// (parameter, state index, spec) for every state at every parameter point.
fn state_points(plan: &Plan) -> Vec<(Option<f64>, usize, StateSpec)> {
    plan.parameter_points()
        .into_iter()
        .flat_map(|(p, specs)| specs.into_iter().enumerate().map(move |(i, s)| (p, i, s)))
        .collect()
}

fn theta_pairs(plan: &Plan) -> Vec<(f64, f64)> {
    plan.thetas.iter().copied().zip(plan.thetas2.iter().copied()).collect()
}

pub fn run(plan: &Plan) -> Guarded<Outcome> {
    match plan.scenario {
        Scenario::Tomogram => tomograms(plan).map(Outcome::ok),
        Scenario::EntropySweep | Scenario::VarianceSweep | Scenario::HigherOrderSweep => sweep(plan).map(Outcome::ok),
        Scenario::Rfp => rfp(plan).map(Outcome::ok),
        Scenario::BeamsplitterSweep => beamsplitter_sweep(plan).map(Outcome::ok),
        Scenario::DecoherenceRun => decoherence_run(plan).map(Outcome::ok),
        Scenario::OracleAudit => oracle_audit(plan),
    }
}

fn tomograms(plan: &Plan) -> Guarded<Vec<Artifact>> {
    let scenario = plan.scenario.as_str();
    let tol = plan.tolerances;
    let two_mode_pairs = if plan.theta_given { theta_pairs(plan) } else { vec![(0.0, 0.0), (FRAC_PI_2, FRAC_PI_2)] };
    let points = state_points(plan);
    let rendered = par_points(&points, |(p, i, spec)| {
        let point = point_name(spec, *i, *p);
        let stem = format!("tomogram_{i:02}_{}", slug(&spec.label()));
        let mut files = Vec::new();
        match guard(&point, spec.build())? {
            State::Single(s) => {
                let grid = guard(&point, single_grid(&plan.grid, &s))?;
                let t = guard(&point, tomogram(&s, &plan.thetas, &grid))?;
                guard(&point, t.check_normalization(tol.normalization))?;
                let title = format!("optical tomogram of {}", spec.label());
                let csv_head = preamble(
                    scenario,
                    &title,
                    &[
                        ("x", "quadrature value X (first column)"),
                        ("<theta>", "each further column is omega(X, theta) in 1/X units at the phase in its header"),
                    ],
                );
                let dat_head = preamble(
                    scenario,
                    &title,
                    &[("1", "X"), ("2", "theta (rad)"), ("3", "omega(X, theta) in 1/X units; blank line between phases")],
                );
                files.push(Artifact {
                    file: format!("{stem}.csv"),
                    kind: "tomogram_csv",
                    description: title.clone(),
                    contents: output::tomogram_csv(&csv_head, &t),
                });
                files.push(Artifact {
                    file: format!("{stem}.dat"),
                    kind: "tomogram_plot_data",
                    description: title,
                    contents: output::tomogram_dat(&dat_head, &t),
                });
            }
            State::Two(s) => {
                let (g1, g2) = guard(&point, two_grids(&plan.grid, &s))?;
                for (k, &(t1, t2)) in two_mode_pairs.iter().enumerate() {
                    let at = format!("{point}, theta1 = {t1}, theta2 = {t2}");
                    let t = guard(&at, tomogram_two_mode(&s, t1, t2, &g1, &g2))?;
                    guard(&at, t.check_normalization(tol.two_mode_normalization))?;
                    let title = format!("two-mode tomogram of {} at theta1 = {t1}, theta2 = {t2}", spec.label());
                    let csv_head = preamble(
                        scenario,
                        &title,
                        &[
                            ("x1\\x2", "rows are X1, columns are X2 as in the header"),
                            ("cells", "omega(X1, X2; theta1, theta2) in 1/(X1 X2) units"),
                        ],
                    );
                    let dat_head = preamble(
                        scenario,
                        &title,
                        &[("1", "X1"), ("2", "X2"), ("3", "omega in 1/(X1 X2) units; blank line between X1 blocks")],
                    );
                    files.push(Artifact {
                        file: format!("{stem}_slice{k:03}.csv"),
                        kind: "two_mode_tomogram_csv",
                        description: title.clone(),
                        contents: output::two_mode_tomogram_csv(&csv_head, &t),
                    });
                    files.push(Artifact {
                        file: format!("{stem}_slice{k:03}.dat"),
                        kind: "two_mode_tomogram_plot_data",
                        description: title,
                        contents: output::two_mode_tomogram_dat(&dat_head, &t),
                    });
                }
            }
        }
        Ok(files)
    })?;
    Ok(rendered.into_iter().flatten().collect())
}

const STATE_COLUMNS: [(&str, &str); 2] = [
    ("state", "catalog label of the state"),
    ("parameter", "swept primary parameter |alpha|, |xi|, |zeta| or r (empty if none)"),
];

fn two_mode_columns() -> Vec<(&'static str, &'static str)> {
    let mut c = STATE_COLUMNS.to_vec();
    c.extend([
        ("theta1,theta2", "homodyne phases of the two modes (rad)"),
        ("entropy_ab", "two-mode tomographic entropy (nats)"),
        ("entropy_ab_squeezed", "entropy_ab < ln(pi e)"),
        ("eur_sum", "S_AB(theta1, theta2) + S_AB(theta1 + pi/2, theta2 + pi/2) (nats), bound 2 ln(pi e)"),
        ("eur_satisfied", "eur_sum >= 2 ln(pi e) - 1e-6"),
        ("variance", "variance of (X_theta1 + X_theta2)/sqrt(2), squeezed below 1/2"),
        ("variance_squeezed", "variance < 1/2"),
        ("entropy_a,entropy_b", "marginal single-mode entropies (nats), squeezed below 1/2 ln(pi e)"),
        ("variance_a,variance_b", "reduced single-mode variances, squeezed below 1/2"),
    ]);
    c
}

fn two_mode_row(label: &str, param: &str, r: &TwoModeSqueezingReport) -> String {
    format!("{label},{param},{}\n", r.csv_fields())
}

fn sweep(plan: &Plan) -> Guarded<Vec<Artifact>> {
    let scenario = plan.scenario.as_str();
    let pairs = theta_pairs(plan);
    let points = state_points(plan);
    let rows = par_points(&points, |(p, i, spec)| {
        let point = point_name(spec, *i, *p);
        let label = spec.label().replace(',', ";");
        let param = fmt_param(*p, spec);
        let mut single = String::new();
        let mut two = String::new();
        match guard(&point, spec.build())? {
            State::Single(s) => {
                let grid = guard(&point, single_grid(&plan.grid, &s))?;
                match plan.scenario {
                    Scenario::EntropySweep => {
                        for &theta in &plan.thetas {
                            let at = format!("{point}, theta = {theta}");
                            let e = guard(&at, metrics::entropy_at(&s, theta, &grid))?;
                            let e_conj = guard(&at, metrics::entropy_at(&s, theta + FRAC_PI_2, &grid))?;
                            let eur = e + e_conj;
                            let _ = writeln!(
                                single,
                                "{label},{param},{theta},{e},{},{e_conj},{eur},{}",
                                e < tomolens::HALF_LN_PI_E,
                                eur >= metrics::LN_PI_E - metrics::EUR_TOLERANCE
                            );
                        }
                    }
                    Scenario::VarianceSweep => {
                        let m = guard(&point, extract_moments(&s, 2, &grid))?;
                        for &theta in &plan.thetas {
                            let at = format!("{point}, theta = {theta}");
                            let mean = guard(&at, metrics::quadrature_mean(&m, theta))?;
                            let v = guard(&at, metrics::variance(&m, theta))?;
                            let h = guard(&at, metrics::heisenberg_product(&m, theta))?;
                            let _ = writeln!(
                                single,
                                "{label},{param},{theta},{mean},{v},{},{h}",
                                v < metrics::VARIANCE_THRESHOLD
                            );
                        }
                    }
                    _ => {
                        let m = guard(&point, extract_moments(&s, 4, &grid))?;
                        for &theta in &plan.thetas {
                            let at = format!("{point}, theta = {theta}");
                            let mean = guard(&at, metrics::quadrature_mean(&m, theta))?;
                            let c3 = guard(&at, metrics::central_moment(&m, theta, 3))?;
                            let c4 = guard(&at, metrics::central_moment(&m, theta, 4))?;
                            let _ = writeln!(
                                single,
                                "{label},{param},{theta},{mean},{c3},{},{c4},{}",
                                c3 < metrics::THIRD_MOMENT_REFERENCE,
                                c4 < metrics::FOURTH_MOMENT_REFERENCE
                            );
                        }
                    }
                }
            }
            State::Two(s) => {
                let (g1, g2) = guard(&point, two_grids(&plan.grid, &s))?;
                for &(t1, t2) in &pairs {
                    let at = format!("{point}, theta1 = {t1}, theta2 = {t2}");
                    let r = guard(&at, metrics::two_mode_report(&s, t1, t2, &g1, &g2))?;
                    two.push_str(&two_mode_row(&label, &param, &r));
                }
            }
        }
        Ok((single, two))
    })?;
    let (single, two): (Vec<String>, Vec<String>) = rows.into_iter().unzip();
    let single: String = single.concat();
    let two: String = two.concat();
    let mut artifacts = Vec::new();
    if !single.is_empty() {
        let mut columns = STATE_COLUMNS.to_vec();
        let (title, header) = match plan.scenario {
            Scenario::EntropySweep => {
                columns.extend([
                    ("theta", "homodyne phase (rad)"),
                    ("entropy", "tomographic entropy S(theta) (nats)"),
                    ("entropy_squeezed", "entropy < 1/2 ln(pi e)"),
                    ("entropy_conjugate", "S(theta + pi/2) (nats)"),
                    ("eur_sum", "S(theta) + S(theta + pi/2) (nats), bound ln(pi e)"),
                    ("eur_satisfied", "eur_sum >= ln(pi e) - 1e-6"),
                ]);
                (
                    "entropic squeezing versus parameter",
                    "state,parameter,theta,entropy,entropy_squeezed,entropy_conjugate,eur_sum,eur_satisfied",
                )
            }
            Scenario::VarianceSweep => {
                columns.extend([
                    ("theta", "homodyne phase (rad)"),
                    ("mean", "<X_theta>"),
                    ("variance", "(Delta X_theta)^2, squeezed below 1/2"),
                    ("variance_squeezed", "variance < 1/2"),
                    ("heisenberg_product", "(Delta X_theta)^2 (Delta X_theta+pi/2)^2, bounded below by 1/4"),
                ]);
                (
                    "quadrature squeezing versus parameter",
                    "state,parameter,theta,mean,variance,variance_squeezed,heisenberg_product",
                )
            }
            _ => {
                columns.extend([
                    ("theta", "homodyne phase (rad)"),
                    ("mean", "<X_theta>"),
                    ("central_moment_3", "<(X_theta - <X_theta>)^3>, coherent value 0"),
                    ("hm3_squeezed", "central_moment_3 < 0"),
                    ("central_moment_4", "<(X_theta - <X_theta>)^4>, coherent value 3/4"),
                    ("hm4_squeezed", "central_moment_4 < 3/4"),
                ]);
                (
                    "higher-order squeezing versus parameter",
                    "state,parameter,theta,mean,central_moment_3,hm3_squeezed,central_moment_4,hm4_squeezed",
                )
            }
        };
        artifacts.push(Artifact {
            file: format!("{scenario}.csv"),
            kind: "sweep_csv",
            description: title.to_string(),
            contents: format!("{}{header}\n{single}", preamble(scenario, title, &columns)),
        });
    }
    if !two.is_empty() {
        let title = "two-mode squeezing versus parameter";
        artifacts.push(Artifact {
            file: format!("{scenario}_two_mode.csv"),
            kind: "two_mode_sweep_csv",
            description: title.to_string(),
            contents: format!(
                "{}state,parameter,{}\n{two}",
                preamble(scenario, title, &two_mode_columns()),
                TwoModeSqueezingReport::CSV_HEADER
            ),
        });
    }
    Ok(artifacts)
}

fn build_single(point: &str, spec: &StateSpec) -> Guarded<SingleModeState> {
    guard(point, spec.build())?
        .single()
        .ok_or_else(|| CliError::Config(format!("{point}: expected a single-mode state")))
}

fn rfp(plan: &Plan) -> Guarded<Vec<Artifact>> {
    let scenario = plan.scenario.as_str();
    let points = plan.parameter_points();
    let results = par_points(&points, |(p, specs)| {
        let mut tables = Vec::new();
        for (i, spec) in specs.iter().enumerate() {
            let point = point_name(spec, i, *p);
            let s = build_single(&point, spec)?;
            let grid = guard(&point, single_grid(&plan.grid, &s))?;
            tables.push(guard(&point, extract_moments(&s, 2, &grid))?);
        }
        let at = match p {
            Some(v) => format!("state pair at parameter {v}"),
            None => "state pair".to_string(),
        };
        let report = guard(&at, metrics::rfp_sweep(&tables[0], &tables[1], &plan.thetas))?;
        let param = p.map(|v| v.to_string()).unwrap_or_default();
        let mut rows = String::new();
        let mut max_dev = 0.0f64;
        for (k, &theta) in plan.thetas.iter().enumerate() {
            let (f_shift, _) =
                guard(&at, metrics::relative_fluctuation_product(&tables[0], &tables[1], theta + FRAC_PI_2))?;
            let g = report.g[k];
            let dev = (g - f_shift).abs();
            max_dev = max_dev.max(dev);
            let f = report.f[k];
            let c = (2.0 * theta).cos();
            let fit = report.fit[0] + report.fit[1] * c + report.fit[2] * c * c;
            let _ = writeln!(rows, "{param},{theta},{f},{g},{f_shift},{dev},{},{fit}", f * f);
        }
        let summary = format!(
            "{param},{},{},{},{},{max_dev}\n",
            report.fit[0], report.fit[1], report.fit[2], report.fit_residual
        );
        Ok((rows, summary))
    })?;
    let (rows, summary): (Vec<String>, Vec<String>) = results.into_iter().unzip();
    let pair = format!("{} and {}", plan.states[0].label(), plan.states[1].label());
    let title = format!("relative fluctuation products of {pair}");
    let columns = [
        ("parameter", "swept primary parameter of both states (empty if none)"),
        ("theta", "homodyne phase (rad)"),
        ("f", "Delta X_theta(state 1) Delta X_theta+pi/2(state 2)"),
        ("g", "Delta X_theta(state 2) Delta X_theta+pi/2(state 1)"),
        ("f_shifted", "f(theta + pi/2)"),
        ("symmetry_deviation", "|g(theta) - f(theta + pi/2)|"),
        ("f_squared", "f^2 in variance^2 units"),
        ("fit", "A + B cos 2theta + C cos^2 2theta least-squares fit of f^2"),
    ];
    let fit_title = format!("quadratic-in-cos(2 theta) fit of f^2 for {pair}");
    let fit_columns = [
        ("parameter", "swept primary parameter (empty if none)"),
        ("fit_a,fit_b,fit_c", "coefficients A, B, C of f^2 = A + B cos 2theta + C cos^2 2theta"),
        ("fit_residual", "max |f^2 - fit| over the theta grid"),
        ("max_symmetry_deviation", "max |g(theta) - f(theta + pi/2)|"),
    ];
    Ok(vec![
        Artifact {
            file: "rfp.csv".into(),
            kind: "sweep_csv",
            description: title.clone(),
            contents: format!(
                "{}parameter,theta,f,g,f_shifted,symmetry_deviation,f_squared,fit\n{}",
                preamble(scenario, &title, &columns),
                rows.concat()
            ),
        },
        Artifact {
            file: "rfp_fit.csv".into(),
            kind: "summary_csv",
            description: fit_title.clone(),
            contents: format!(
                "{}parameter,fit_a,fit_b,fit_c,fit_residual,max_symmetry_deviation\n{}",
                preamble(scenario, &fit_title, &fit_columns),
                summary.concat()
            ),
        },
    ])
}

/// The product input of the first one or two specs (vacuum fills port b).
fn product_input(specs: &[StateSpec], p: Option<f64>) -> Guarded<(TwoModeState, String, String)> {
    let a = build_single(&point_name(&specs[0], 0, p), &specs[0])?;
    let (b, label_b) = match specs.get(1) {
        Some(spec) => (build_single(&point_name(spec, 1, p), spec)?, spec.label()),
        None => (SingleModeState::vacuum(0), "fock(n=0)".to_string()),
    };
    Ok((TwoModeState::product(&a, &b), specs[0].label(), label_b))
}

fn beamsplitter_sweep(plan: &Plan) -> Guarded<Vec<Artifact>> {
    let scenario = plan.scenario.as_str();
    let pairs = theta_pairs(plan);
    let mut points = Vec::new();
    for (p, specs) in plan.parameter_points() {
        let input = product_input(&specs, p)?;
        for &phi in &plan.phis {
            points.push((p, phi, input.clone()));
        }
    }
    let rows = par_points(&points, |(p, phi, (input, la, lb))| {
        let point = match p {
            Some(v) => format!("{la} x {lb} at parameter {v}, phi = {phi}"),
            None => format!("{la} x {lb}, phi = {phi}"),
        };
        let out = guard(&point, beamsplitter::apply(&BeamsplitterConfig::new(*phi), input))?.trimmed_to_support();
        let (g1, g2) = guard(&point, two_grids(&plan.grid, &out))?;
        let param = p.map(|v| v.to_string()).unwrap_or_default();
        let mut rows = String::new();
        for &(t1, t2) in &pairs {
            let at = format!("{point}, theta1 = {t1}, theta2 = {t2}");
            let r = guard(&at, metrics::two_mode_report(&out, t1, t2, &g1, &g2))?;
            let _ = writeln!(
                rows,
                "{},{},{param},{phi},{}",
                la.replace(',', ";"),
                lb.replace(',', ";"),
                r.csv_fields()
            );
        }
        Ok(rows)
    })?;
    let title = "50:50 beamsplitter output squeezing versus phase phi";
    let mut columns = vec![
        ("state_a,state_b", "input states of ports a and b"),
        ("parameter", "swept primary parameter of the inputs (empty if none)"),
        ("phi", "beamsplitter phase (rad)"),
    ];
    columns.extend(two_mode_columns().into_iter().skip(2));
    columns.push(("entropy_a", "also the entropy of the mode-a marginal with mode b traced out, phi-invariant for a vacuum port b"));
    Ok(vec![Artifact {
        file: "beamsplitter_sweep.csv".into(),
        kind: "sweep_csv",
        description: title.to_string(),
        contents: format!(
            "{}state_a,state_b,parameter,phi,{}\n{}",
            preamble(scenario, title, &columns),
            TwoModeSqueezingReport::CSV_HEADER,
            rows.concat()
        ),
    }])
}

fn decoherence_run(plan: &Plan) -> Guarded<Vec<Artifact>> {
    let scenario = plan.scenario.as_str();
    let section = plan.channel.as_ref().expect("validated");
    let cfg = ChannelConfig::new(section.kind, section.rates, plan.times.clone());
    let pairs = theta_pairs(plan);
    let mut inputs = Vec::new();
    for (p, specs) in plan.parameter_points() {
        let (state, label) = if specs.len() == 1 {
            let point = point_name(&specs[0], 0, p);
            let s = guard(&point, specs[0].build())?
                .two()
                .ok_or_else(|| CliError::Config(format!("{point}: expected a two-mode state")))?;
            (s, specs[0].label())
        } else {
            let (input, la, lb) = product_input(&specs, p)?;
            match plan.beamsplitter_phi {
                Some(phi) => {
                    let point = format!("{la} x {lb} through the beamsplitter at phi = {phi}");
                    let out = guard(&point, beamsplitter::apply(&BeamsplitterConfig::new(phi), &input))?;
                    (out.trimmed_to_support(), format!("beamsplitter(phi={phi};{la};{lb})"))
                }
                None => (input, format!("product({la};{lb})")),
            }
        };
        inputs.push((p, label.replace(',', ";"), TwoModeDensityMatrix::from_pure(&state)));
    }
    let mut points = Vec::new();
    for (k, (p, _, _)) in inputs.iter().enumerate() {
        for &t in &plan.times {
            points.push((k, *p, t));
        }
    }
    let channel = section.kind.as_str();
    let [r1, r2] = section.rates;
    let series = par_points(&points, |&(k, p, t)| {
        let (_, label, rho0) = &inputs[k];
        let point = match p {
            Some(v) => format!("{label} at parameter {v}, t = {t}"),
            None => format!("{label}, t = {t}"),
        };
        let rho = guard(&point, cfg.evolve(rho0, t))?;
        let (g1, g2) = guard(&point, two_grids(&plan.grid, &rho))?;
        let param = p.map(|v| v.to_string()).unwrap_or_default();
        let purity = rho.purity();
        let trace = rho.trace().re;
        let mut rows = String::new();
        for &(t1, t2) in &pairs {
            let at = format!("{point}, theta1 = {t1}, theta2 = {t2}");
            let tomo = guard(&at, tomogram_two_mode(&rho, t1, t2, &g1, &g2))?;
            guard(&at, tomo.check_normalization(plan.tolerances.two_mode_normalization))?;
            let s = metrics::entropy_two_mode(&tomo);
            let _ = writeln!(
                rows,
                "{label},{channel},{r1},{r2},{param},{t},{t1},{t2},{purity},{trace},{s},{}",
                s < metrics::LN_PI_E
            );
        }
        Ok(rows)
    })?;
    let summaries = par_points(&inputs, |(p, label, rho0)| {
        let point = match p {
            Some(v) => format!("{label} at parameter {v}"),
            None => label.clone(),
        };
        let t_hi = plan.times.last().copied().unwrap_or(0.0);
        let t_lo = plan.times.iter().copied().find(|t| *t > 0.0 && *t < t_hi).unwrap_or(1e-3 * t_hi);
        let (t_min, p_min) = if t_hi > 0.0 {
            guard(&point, decoherence::purity_minimum(rho0, &cfg, t_lo, t_hi))?
        } else {
            (0.0, rho0.purity())
        };
        let residual = guard(&point, decoherence::master_equation_residual(rho0, section.kind, section.rates, RESIDUAL_STEP))?;
        let param = p.map(|v| v.to_string()).unwrap_or_default();
        Ok(format!("{label},{channel},{r1},{r2},{param},{t_min},{p_min},{residual}\n"))
    })?;
    let title = format!("{channel} channel time series");
    let columns = [
        ("state", "input state (beamsplitter output when beamsplitter_phi is set)"),
        ("channel", "amplitude_decay or phase_damping"),
        ("rate_1,rate_2", "per-mode rates (gamma_c, gamma_d) or (kappa_c, kappa_d)"),
        ("parameter", "swept primary parameter of the inputs (empty if none)"),
        ("t", "evolution time in units of 1/rate"),
        ("theta1,theta2", "homodyne phases of the entropy (rad)"),
        ("purity", "Tr rho^2"),
        ("trace", "Re Tr rho"),
        ("entropy_ab", "two-mode tomographic entropy (nats)"),
        ("entropy_ab_squeezed", "entropy_ab < ln(pi e)"),
    ];
    let summary_title = format!("{channel} channel purity minimum and master-equation residual");
    let summary_columns = [
        ("state,channel,rate_1,rate_2,parameter", "as in the time series"),
        ("t_at_min", "time of the purity minimum over the time range"),
        ("purity_min", "minimum Tr rho^2"),
        ("residual", "max |d rho/dt - L[rho]| at t = 0 by forward difference"),
    ];
    Ok(vec![
        Artifact {
            file: "decoherence.csv".into(),
            kind: "time_series_csv",
            description: title.clone(),
            contents: format!(
                "{}state,channel,rate_1,rate_2,parameter,t,theta1,theta2,purity,trace,entropy_ab,entropy_ab_squeezed\n{}",
                preamble(scenario, &title, &columns),
                series.concat()
            ),
        },
        Artifact {
            file: "decoherence_summary.csv".into(),
            kind: "summary_csv",
            description: summary_title.clone(),
            contents: format!(
                "{}state,channel,rate_1,rate_2,parameter,t_at_min,purity_min,residual\n{}",
                preamble(scenario, &summary_title, &summary_columns),
                summaries.concat()
            ),
        },
    ])
}

struct Mismatch {
    point: String,
    deviation: f64,
    tolerance: f64,
}

fn oracle_audit(plan: &Plan) -> Guarded<Outcome> {
    let scenario = plan.scenario.as_str();
    let tol = plan.tolerances;
    let points = state_points(plan);
    let results = par_points(&points, |(p, i, spec)| {
        let point = point_name(spec, *i, *p);
        let label = spec.label().replace(',', ";");
        let mut single = String::new();
        let mut two = String::new();
        let mut worst: Option<Mismatch> = None;
        let mut note = |d: f64, tolerance: f64, at: String| {
            if d >= tolerance && worst.as_ref().map_or(true, |w| d / tolerance > w.deviation / w.tolerance) {
                worst = Some(Mismatch { point: at, deviation: d, tolerance });
            }
        };
        match guard(&point, spec.build())? {
            State::Single(s) => {
                let grid = guard(&point, single_grid(&plan.grid, &s))?;
                let t = guard(&point, extract_moments(&s, 4, &grid))?;
                let o = guard(&point, oracle_moments(&s, 4))?;
                for ((k, l), z) in t.entries() {
                    let w = guard(&point, o.get(k, l))?;
                    let d = (z - w).norm();
                    let ok = d < tol.oracle;
                    note(d, tol.oracle, format!("{point}, (k, l) = ({k}, {l})"));
                    let _ = writeln!(single, "{label},{k},{l},{},{},{},{},{d},{ok}", z.re, z.im, w.re, w.im);
                }
            }
            State::Two(s) => {
                let (g1, g2) = guard(&point, two_grids(&plan.grid, &s))?;
                let t = guard(&point, extract_two_mode_moments(&s, 2, &g1, &g2))?;
                let o = guard(&point, oracle_two_mode_moments(&s, 2))?;
                for ((k, l, pp, q), z) in t.entries() {
                    let w = guard(&point, o.get(k, l, pp, q))?;
                    let d = (z - w).norm();
                    let ok = d < tol.two_mode_oracle;
                    note(d, tol.two_mode_oracle, format!("{point}, (k, l, p, q) = ({k}, {l}, {pp}, {q})"));
                    let _ = writeln!(
                        two,
                        "{label},{k},{l},{pp},{q},{},{},{},{},{d},{ok}",
                        z.re, z.im, w.re, w.im
                    );
                }
            }
        }
        Ok((single, two, worst))
    })?;
    let mut single = String::new();
    let mut two = String::new();
    let mut failures = Vec::new();
    for (s, t, w) in results {
        single.push_str(&s);
        two.push_str(&t);
        failures.extend(w);
    }
    let mut artifacts = Vec::new();
    let common = [
        ("tomogram_re,tomogram_im", "moment recovered from tomogram integrals"),
        ("oracle_re,oracle_im", "moment computed directly in the Fock basis"),
        ("abs_diff", "|tomogram - oracle|"),
    ];
    if !single.is_empty() {
        let title = "normal-ordered moments <a^dag^k a^l>: tomogram versus Fock oracle";
        let mut columns = vec![("state", "catalog label"), ("k,l", "powers of a^dag and a, k + l <= 4")];
        columns.extend(common);
        let passed = format!("abs_diff < {}", tol.oracle);
        columns.push(("passed", &passed));
        artifacts.push(Artifact {
            file: "oracle_audit.csv".into(),
            kind: "audit_csv",
            description: title.to_string(),
            contents: format!(
                "{}state,k,l,tomogram_re,tomogram_im,oracle_re,oracle_im,abs_diff,passed\n{single}",
                preamble(scenario, title, &columns)
            ),
        });
    }
    if !two.is_empty() {
        let title = "two-mode moments <a^dag^k a^l b^dag^p b^q>: tomogram versus Fock oracle";
        let mut columns = vec![("state", "catalog label"), ("k,l,p,q", "powers, k + l <= 2 and p + q <= 2")];
        columns.extend(common);
        let passed = format!("abs_diff < {}", tol.two_mode_oracle);
        columns.push(("passed", &passed));
        artifacts.push(Artifact {
            file: "oracle_audit_two_mode.csv".into(),
            kind: "audit_csv",
            description: title.to_string(),
            contents: format!(
                "{}state,k,l,p,q,tomogram_re,tomogram_im,oracle_re,oracle_im,abs_diff,passed\n{two}",
                preamble(scenario, title, &columns)
            ),
        });
    }
    let failure = (!failures.is_empty()).then(|| {
        CliError::OracleMismatch(
            failures
                .iter()
                .map(|m| format!("{}: |tomogram - oracle| = {:.3e} >= {:.0e}", m.point, m.deviation, m.tolerance))
                .collect(),
        )
    });
    Ok(Outcome { artifacts, failure })
}
