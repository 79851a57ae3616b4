use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use tomolens::metrics::LN_PI_E;
use tomolens::tomography::{Tomogram, TwoModeTomogram};
use tomolens::HALF_LN_PI_E;

use crate::config::{Plan, Tolerances};
use crate::CliError;

pub const MANIFEST: &str = "manifest.json";

/// One output file, rendered in memory and written by the collector.
#[derive(Debug, Clone)]
pub struct Artifact {
    pub file: String,
    pub kind: &'static str,
    pub description: String,
    pub contents: String,
}

/// Comment block heading every CSV and plot-data file.
pub fn preamble(scenario: &str, title: &str, columns: &[(&str, &str)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# tomolens {} scenario={scenario}: {title}", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(
        s,
        "# conventions: X_theta = (a exp(-i theta) + a^dag exp(i theta))/sqrt(2), vacuum variance 1/2; \
angles theta, phi in radians; time t in units of 1/rate"
    );
    let _ = writeln!(s, "# units: entropies in nats; quadratures, variances and central moments in X_theta units");
    let _ = writeln!(
        s,
        "# thresholds: variance 1/2; single-mode entropy 1/2 ln(pi e) = {HALF_LN_PI_E} nats; \
two-mode entropy ln(pi e) = {LN_PI_E} nats; third central moment 0; fourth central moment 3/4"
    );
    for (name, doc) in columns {
        let _ = writeln!(s, "# column {name}: {doc}");
    }
    s
}

/// `ecs(alpha=0.7)` → `ecs_alpha_0.7`
pub fn slug(label: &str) -> String {
    let mut out = String::with_capacity(label.len());
    for ch in label.chars() {
        match ch {
            'a'..='z' | 'A'..='Z' | '0'..='9' | '.' | '-' => out.push(ch),
            '+' => out.push('p'),
            _ => {
                if !out.ends_with('_') {
                    out.push('_');
                }
            }
        }
    }
    out.trim_matches('_').to_string()
}

pub fn tomogram_csv(header: &str, t: &Tomogram) -> String {
    let mut buf = header.as_bytes().to_vec();
    t.write_csv(&mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

pub fn two_mode_tomogram_csv(header: &str, t: &TwoModeTomogram) -> String {
    let mut buf = header.as_bytes().to_vec();
    t.write_csv(&mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv is utf-8")
}

/// gnuplot `splot` blocks: one "x theta omega" block per phase.
pub fn tomogram_dat(header: &str, t: &Tomogram) -> String {
    let mut s = header.to_string();
    for (i, theta) in t.thetas().iter().enumerate() {
        for (j, x) in t.grid().xs().iter().enumerate() {
            let _ = writeln!(s, "{x} {theta} {}", t.value(i, j));
        }
        s.push('\n');
    }
    s
}

/// gnuplot `splot` blocks: one "x1 x2 omega" block per x1.
pub fn two_mode_tomogram_dat(header: &str, t: &TwoModeTomogram) -> String {
    let mut s = header.to_string();
    let (g1, g2) = t.grids();
    for (j, x1) in g1.xs().iter().enumerate() {
        for (k, x2) in g2.xs().iter().enumerate() {
            let _ = writeln!(s, "{x1} {x2} {}", t.value(j, k));
        }
        s.push('\n');
    }
    s
}

#[derive(Serialize)]
struct ManifestEntry<'a> {
    file: &'a str,
    kind: &'a str,
    scenario: &'a str,
    description: &'a str,
    bytes: usize,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    scenario: &'a str,
    config: String,
    settings: std::collections::BTreeMap<&'static str, serde_json::Value>,
    tolerances: Tolerances,
    artifacts: Vec<ManifestEntry<'a>>,
}

/// Writes every artifact and then the manifest, in artifact order.
pub fn write_all(plan: &Plan, config_path: &Path, artifacts: &[Artifact]) -> Result<(), CliError> {
    let dir = &plan.output_dir;
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    for a in artifacts {
        let path = dir.join(&a.file);
        fs::write(&path, &a.contents).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    }
    let scenario = plan.scenario.as_str();
    let manifest = Manifest {
        tool: "tomolens",
        version: env!("CARGO_PKG_VERSION"),
        scenario,
        config: config_path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
        settings: plan.summary(),
        tolerances: plan.tolerances,
        artifacts: artifacts
            .iter()
            .map(|a| ManifestEntry {
                file: &a.file,
                kind: a.kind,
                scenario,
                description: &a.description,
                bytes: a.contents.len(),
            })
            .collect(),
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    let path = dir.join(MANIFEST);
    fs::write(&path, json + "\n").map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}
