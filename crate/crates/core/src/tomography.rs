//! Optical tomograms of single- and two-mode states.
//!
//! With ⟨X,θ|n⟩ = e^{−inθ}ψₙ(X) a pure state has
//! ω(X,θ) = |Σ cₙ e^{−inθ} ψₙ(X)|², and a density matrix
//! ω(X,θ) = Σ ρₙₙ' e^{−i(n−n')θ} ψₙ(X)ψₙ'(X).
//! Integrals over X use composite Simpson weights on a uniform grid.

use std::f64::consts::PI;
use std::io::{self, Write};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::density::{SingleModeDensity, TwoModeDensityMatrix};
use crate::fock::{SingleModeState, TwoModeState};
use crate::hermite::HermiteTable;
use crate::linalg::CMatrix;
use crate::{Error, Result, TRUNCATION_BUFFER};

/// Values below this are stored as exact zeros.
pub const CLAMP_BELOW: f64 = 1e-300;
/// Allowed deviation of a tomogram row's mass from 1 before the grid is
/// rejected.
pub const GRID_MASS_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_POINTS: usize = 2001;
pub const DEFAULT_TWO_MODE_POINTS: usize = 401;
/// θ samples for figure-style maps over [0, π].
pub const DEFAULT_THETA_SAMPLES: usize = 181;
/// Probe phases and edge density accepted by [`QuadratureGrid::covering`].
pub const COVER_PROBES: usize = 12;
pub const COVER_EDGE_DENSITY: f64 = 1e-16;
const COVER_GROWTH: f64 = 1.2;
const COVER_MAX_WIDENINGS: usize = 16;

/// Uniform abscissae on [x_min, x_max] with composite Simpson weights.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    xs: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureGrid {
    /// `n_points` must be odd and at least 3.
    pub fn simpson(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if n_points < 3 || n_points % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "Simpson grid needs an odd point count >= 3, got {n_points}"
            )));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::InvalidParameter(format!("empty quadrature interval [{x_min}, {x_max}]")));
        }
        let h = (x_max - x_min) / (n_points - 1) as f64;
        let xs = (0..n_points)
            .map(|j| {
                // keeps the grid exactly mirror-symmetric when x_min = −x_max
                let from_left = x_min + j as f64 * h;
                let from_right = x_max - (n_points - 1 - j) as f64 * h;
                if 2 * j < n_points - 1 {
                    from_left
                } else if 2 * j == n_points - 1 {
                    0.5 * (x_min + x_max)
                } else {
                    from_right
                }
            })
            .collect();
        let weights = (0..n_points)
            .map(|j| {
                let w = if j == 0 || j == n_points - 1 {
                    1.0
                } else if j % 2 == 1 {
                    4.0
                } else {
                    2.0
                };
                w * h / 3.0
            })
            .collect();
        Ok(Self { xs, weights })
    }

    pub fn symmetric(half_width: f64, n_points: usize) -> Result<Self> {
        Self::simpson(-half_width, half_width, n_points)
    }

    /// Support half-width √(2(⟨n⟩ + buffer)) + 5.
    pub fn half_width_for(mean_photon_number: f64) -> f64 {
        (2.0 * (mean_photon_number + TRUNCATION_BUFFER as f64)).sqrt() + 5.0
    }

    pub fn for_mean_photon_number(mean_photon_number: f64, n_points: usize) -> Result<Self> {
        Self::symmetric(Self::half_width_for(mean_photon_number), n_points)
    }

    /// Default single-mode grid: energy-based support, 2001 points.
    pub fn default_for(mean_photon_number: f64) -> Self {
        Self::for_mean_photon_number(mean_photon_number, DEFAULT_POINTS).expect("default grid parameters are valid")
    }

    /// Default per-axis grid for two-mode tomograms: 401 points.
    pub fn default_two_mode(mean_photon_number: f64) -> Self {
        Self::for_mean_photon_number(mean_photon_number, DEFAULT_TWO_MODE_POINTS)
            .expect("default grid parameters are valid")
    }

    /// Energy-based grid, widened until no probe phase has density above
    /// `COVER_EDGE_DENSITY` at either edge. Strongly squeezed states spread
    /// far beyond the energy estimate along the anti-squeezed axis, and the
    /// moment integrals weight the tails by up to X^(2·K_MAX).
    pub fn covering<S: SingleModeSource + ?Sized>(source: &S, n_points: usize) -> Result<Self> {
        let probes: Vec<f64> = (0..COVER_PROBES).map(|i| PI * i as f64 / COVER_PROBES as f64).collect();
        let edge = |grid: &Self| {
            let t = evaluate(source, &probes, grid);
            (0..probes.len())
                .map(|i| t.row(i)[0].max(t.row(i)[n_points - 1]))
                .fold(0.0f64, f64::max)
        };
        let mut half_width = Self::half_width_for(source.mean_photon_number());
        let mut grid = Self::symmetric(half_width, n_points)?;
        for _ in 0..COVER_MAX_WIDENINGS {
            if edge(&grid) < COVER_EDGE_DENSITY {
                break;
            }
            half_width *= COVER_GROWTH;
            grid = Self::symmetric(half_width, n_points)?;
        }
        Ok(grid)
    }

    /// Covering grid with the default 2001 points.
    pub fn default_covering<S: SingleModeSource + ?Sized>(source: &S) -> Self {
        Self::covering(source, DEFAULT_POINTS).expect("default grid parameters are valid")
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn n_points(&self) -> usize {
        self.xs.len()
    }

    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max() - self.x_min()) / (self.n_points() - 1) as f64
    }

    /// x_min = −x_max, so index j mirrors onto n_points − 1 − j.
    pub fn is_symmetric(&self) -> bool {
        (self.x_min() + self.x_max()).abs() <= 1e-12 * self.x_max().abs().max(1.0)
    }

    pub fn integrate(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.xs.len());
        values.iter().zip(&self.weights).map(|(v, w)| v * w).sum()
    }

    /// Linear interpolation of grid-sampled `values` at x; zero outside.
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        if x < self.x_min() || x > self.x_max() {
            return 0.0;
        }
        let h = self.spacing();
        let pos = (x - self.x_min()) / h;
        let j = (pos.floor() as usize).min(self.n_points() - 2);
        let t = pos - j as f64;
        values[j] * (1.0 - t) + values[j + 1] * t
    }

    fn hermite_table(&self, n_max: usize) -> HermiteTable {
        HermiteTable::new(n_max, &self.xs)
    }
}

fn clamp(v: f64) -> f64 {
    if v < CLAMP_BELOW {
        0.0
    } else {
        v
    }
}

/// Anything whose single-mode tomogram can be evaluated.
pub trait SingleModeSource {
    fn n_cut(&self) -> usize;
    fn mean_photon_number(&self) -> f64;
    /// ω(xⱼ, θ) for every abscissa of `table`.
    fn tomogram_row(&self, theta: f64, table: &HermiteTable) -> Vec<f64>;
}

impl SingleModeSource for SingleModeState {
    fn n_cut(&self) -> usize {
        SingleModeState::n_cut(self)
    }

    fn mean_photon_number(&self) -> f64 {
        SingleModeState::mean_photon_number(self)
    }

    fn tomogram_row(&self, theta: f64, table: &HermiteTable) -> Vec<f64> {
        let phased: Vec<Complex64> = self
            .amplitudes()
            .iter()
            .enumerate()
            .map(|(n, c)| c * Complex64::from_polar(1.0, -(n as f64) * theta))
            .collect();
        let mut acc = vec![Complex64::new(0.0, 0.0); table.n_points()];
        for (n, d) in phased.iter().enumerate() {
            if *d == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (a, psi) in acc.iter_mut().zip(table.row(n)) {
                *a += d * psi;
            }
        }
        acc.into_iter().map(|a| clamp(a.norm_sqr())).collect()
    }
}

impl SingleModeSource for SingleModeDensity {
    fn n_cut(&self) -> usize {
        SingleModeDensity::n_cut(self)
    }

    fn mean_photon_number(&self) -> f64 {
        (0..=self.n_cut()).map(|n| n as f64 * self.get(n, n).re).sum()
    }

    fn tomogram_row(&self, theta: f64, table: &HermiteTable) -> Vec<f64> {
        let d = self.n_cut() + 1;
        let phase: Vec<Complex64> = (0..d).map(|n| Complex64::from_polar(1.0, -(n as f64) * theta)).collect();
        // ρ̃ₙₙ' = ρₙₙ' e^{−i(n−n')θ} is Hermitian, so ω = Σₙ ρ̃ₙₙψₙ² + 2 Σ_{n<n'} Re ρ̃ₙₙ' ψₙψₙ'
        let mut out = vec![0.0; table.n_points()];
        for n in 0..d {
            for np in n..d {
                let r = self.get(n, np) * phase[n] * phase[np].conj();
                let coeff = if n == np { r.re } else { 2.0 * r.re };
                if coeff == 0.0 {
                    continue;
                }
                let (a, b) = (table.row(n), table.row(np));
                for j in 0..out.len() {
                    out[j] += coeff * a[j] * b[j];
                }
            }
        }
        out.into_iter().map(clamp).collect()
    }
}

/// ω sampled on a set of phases × a quadrature grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Tomogram {
    thetas: Vec<f64>,
    grid: QuadratureGrid,
    // row-major: values[i * n_points + j] = ω(xⱼ, θᵢ)
    values: Vec<f64>,
}

impl Tomogram {
    pub fn from_rows(thetas: Vec<f64>, grid: QuadratureGrid, rows: Vec<Vec<f64>>) -> Self {
        assert_eq!(thetas.len(), rows.len());
        let values = rows.into_iter().flatten().collect::<Vec<_>>();
        assert_eq!(values.len(), thetas.len() * grid.n_points());
        Self { thetas, grid, values }
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn grid(&self) -> &QuadratureGrid {
        &self.grid
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.grid.n_points();
        &self.values[i * n..(i + 1) * n]
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.grid.n_points() + j]
    }

    /// ∫ω(X, θᵢ) dX for every row.
    pub fn masses(&self) -> Vec<f64> {
        (0..self.thetas.len()).map(|i| self.grid.integrate(self.row(i))).collect()
    }

    /// Rejects the tomogram if any row's mass misses 1 by more than `tolerance`.
    pub fn check_normalization(&self, tolerance: f64) -> Result<()> {
        for (i, mass) in self.masses().into_iter().enumerate() {
            if !((mass - 1.0).abs() <= tolerance) {
                return Err(Error::GridTooNarrow {
                    theta: self.thetas[i],
                    mass,
                    tolerance,
                });
            }
        }
        Ok(())
    }

    /// First column X, one column per θ; header row carries the θ values.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "x")?;
        for t in &self.thetas {
            write!(w, ",{t}")?;
        }
        writeln!(w)?;
        for (j, x) in self.grid.xs().iter().enumerate() {
            write!(w, "{x}")?;
            for i in 0..self.thetas.len() {
                write!(w, ",{}", self.value(i, j))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// `count` uniform phases on [0, π].
pub fn theta_samples(count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..count).map(|i| PI * i as f64 / (count - 1) as f64).collect(),
    }
}

/// Tomogram without the normalization guard.
pub fn evaluate<S: SingleModeSource + ?Sized>(source: &S, thetas: &[f64], grid: &QuadratureGrid) -> Tomogram {
    let table = grid.hermite_table(source.n_cut());
    let rows = thetas.iter().map(|&t| source.tomogram_row(t, &table)).collect();
    Tomogram::from_rows(thetas.to_vec(), grid.clone(), rows)
}

/// Tomogram of any single-mode source, rejecting grids that lose mass.
pub fn tomogram<S: SingleModeSource + ?Sized>(source: &S, thetas: &[f64], grid: &QuadratureGrid) -> Result<Tomogram> {
    let t = evaluate(source, thetas, grid);
    t.check_normalization(GRID_MASS_TOLERANCE)?;
    Ok(t)
}

/// ω(X,θ) = |Σ cₙ e^{−inθ} ψₙ(X)|²
pub fn tomogram_pure(state: &SingleModeState, thetas: &[f64], grid: &QuadratureGrid) -> Result<Tomogram> {
    tomogram(state, thetas, grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    First,
    Second,
}

/// Joint distribution ω(X₁,θ₁,X₂,θ₂) for one phase pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeTomogram {
    theta1: f64,
    theta2: f64,
    grid1: QuadratureGrid,
    grid2: QuadratureGrid,
    // values[j * n2 + k] = ω(x1ⱼ, x2ₖ)
    values: Vec<f64>,
    imaginary_residue: f64,
}

impl TwoModeTomogram {
    pub fn thetas(&self) -> (f64, f64) {
        (self.theta1, self.theta2)
    }

    pub fn grids(&self) -> (&QuadratureGrid, &QuadratureGrid) {
        (&self.grid1, &self.grid2)
    }

    pub fn value(&self, j: usize, k: usize) -> f64 {
        self.values[j * self.grid2.n_points() + k]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Largest |Im ω| discarded when summing a density-matrix tomogram.
    pub fn imaginary_residue(&self) -> f64 {
        self.imaginary_residue
    }

    /// ∬ω dX₁dX₂
    pub fn mass(&self) -> f64 {
        let n2 = self.grid2.n_points();
        self.grid1
            .weights()
            .iter()
            .enumerate()
            .map(|(j, w1)| w1 * self.grid2.integrate(&self.values[j * n2..(j + 1) * n2]))
            .sum()
    }

    pub fn check_normalization(&self, tolerance: f64) -> Result<()> {
        let mass = self.mass();
        if !((mass - 1.0).abs() <= tolerance) {
            return Err(Error::GridTooNarrow {
                theta: self.theta1,
                mass,
                tolerance,
            });
        }
        Ok(())
    }

    /// Distribution of the kept quadrature, renormalized to unit mass.
    pub fn marginal(&self, keep: Axis) -> Tomogram {
        let (n1, n2) = (self.grid1.n_points(), self.grid2.n_points());
        let (theta, grid, row): (f64, &QuadratureGrid, Vec<f64>) = match keep {
            Axis::First => (
                self.theta1,
                &self.grid1,
                (0..n1).map(|j| self.grid2.integrate(&self.values[j * n2..(j + 1) * n2])).collect(),
            ),
            Axis::Second => (
                self.theta2,
                &self.grid2,
                (0..n2)
                    .map(|k| {
                        (0..n1)
                            .map(|j| self.grid1.weights()[j] * self.values[j * n2 + k])
                            .sum::<f64>()
                    })
                    .collect(),
            ),
        };
        let mass = grid.integrate(&row);
        let row = row.into_iter().map(|v| clamp(v / mass)).collect();
        Tomogram::from_rows(vec![theta], grid.clone(), vec![row])
    }

    /// Header `x1\x2` followed by the X₂ values; one row per X₁.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "x1\\x2")?;
        for x in self.grid2.xs() {
            write!(w, ",{x}")?;
        }
        writeln!(w)?;
        for (j, x) in self.grid1.xs().iter().enumerate() {
            write!(w, "{x}")?;
            for k in 0..self.grid2.n_points() {
                write!(w, ",{}", self.value(j, k))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Anything whose two-mode tomogram can be evaluated.
pub trait TwoModeSource {
    fn n_cut(&self) -> usize;
    fn mean_photon_numbers(&self) -> (f64, f64);
    fn evaluate_surface(&self, theta1: f64, theta2: f64, grid1: &QuadratureGrid, grid2: &QuadratureGrid)
        -> TwoModeTomogram;
    /// Reduced state of the first (`second == false`) or second mode.
    fn reduced(&self, second: bool) -> SingleModeDensity;
}

/// Uₙⱼ = e^{−inθ}ψₙ(xⱼ)
fn phased_basis(n_cut: usize, theta: f64, grid: &QuadratureGrid) -> CMatrix {
    let table = grid.hermite_table(n_cut);
    DMatrix::from_fn(n_cut + 1, grid.n_points(), |n, j| {
        Complex64::from_polar(1.0, -(n as f64) * theta) * table.get(n, j)
    })
}

impl TwoModeSource for TwoModeState {
    fn n_cut(&self) -> usize {
        TwoModeState::n_cut(self)
    }

    fn reduced(&self, second: bool) -> SingleModeDensity {
        let c = self.as_matrix();
        // ρ_A = C C†, ρ_B = Cᵀ C̄
        let m = if second { c.transpose() * c.conjugate() } else { &c * c.adjoint() };
        SingleModeDensity::from_matrix(m).expect("square reduced matrix")
    }

    fn mean_photon_numbers(&self) -> (f64, f64) {
        TwoModeState::mean_photon_numbers(self)
    }

    fn evaluate_surface(
        &self,
        theta1: f64,
        theta2: f64,
        grid1: &QuadratureGrid,
        grid2: &QuadratureGrid,
    ) -> TwoModeTomogram {
        let u = phased_basis(self.n_cut(), theta1, grid1);
        let v = phased_basis(self.n_cut(), theta2, grid2);
        let amplitude = u.transpose() * self.as_matrix() * v;
        let values = (0..grid1.n_points())
            .flat_map(|j| (0..grid2.n_points()).map(move |k| (j, k)))
            .map(|(j, k)| clamp(amplitude[(j, k)].norm_sqr()))
            .collect();
        TwoModeTomogram {
            theta1,
            theta2,
            grid1: grid1.clone(),
            grid2: grid2.clone(),
            values,
            imaginary_residue: 0.0,
        }
    }
}

impl TwoModeSource for TwoModeDensityMatrix {
    fn n_cut(&self) -> usize {
        TwoModeDensityMatrix::n_cut(self)
    }

    fn reduced(&self, second: bool) -> SingleModeDensity {
        if second {
            self.reduced_second()
        } else {
            self.reduced_first()
        }
    }

    fn mean_photon_numbers(&self) -> (f64, f64) {
        TwoModeDensityMatrix::mean_photon_numbers(self)
    }

    fn evaluate_surface(
        &self,
        theta1: f64,
        theta2: f64,
        grid1: &QuadratureGrid,
        grid2: &QuadratureGrid,
    ) -> TwoModeTomogram {
        let d = self.dim();
        // W[j, (n,n')] = uₙ(xⱼ) conj(uₙ'(xⱼ)); ω = W₁ R W₂ᵀ with R grouped by mode
        let pair_weights = |theta: f64, grid: &QuadratureGrid| {
            let u = phased_basis(d - 1, theta, grid);
            DMatrix::from_fn(grid.n_points(), d * d, |j, c| u[(c / d, j)] * u[(c % d, j)].conj())
        };
        let w1 = pair_weights(theta1, grid1);
        let w2 = pair_weights(theta2, grid2);
        let omega = (w1 * self.mode_grouped()) * w2.transpose();
        let mut residue = 0.0f64;
        let values = (0..grid1.n_points())
            .flat_map(|j| (0..grid2.n_points()).map(move |k| (j, k)))
            .map(|(j, k)| {
                let z = omega[(j, k)];
                residue = residue.max(z.im.abs());
                clamp(z.re)
            })
            .collect();
        TwoModeTomogram {
            theta1,
            theta2,
            grid1: grid1.clone(),
            grid2: grid2.clone(),
            values,
            imaginary_residue: residue,
        }
    }
}

/// Default per-axis grids for a two-mode source: each axis covers the
/// reduced state of its mode.
pub fn default_two_mode_grids<S: TwoModeSource + ?Sized>(source: &S) -> (QuadratureGrid, QuadratureGrid) {
    let cover = |second| {
        QuadratureGrid::covering(&source.reduced(second), DEFAULT_TWO_MODE_POINTS)
            .expect("default grid parameters are valid")
    };
    (cover(false), cover(true))
}

/// Two-mode tomogram with the normalization guard (tolerance 1e-6).
pub fn tomogram_two_mode<S: TwoModeSource + ?Sized>(
    source: &S,
    theta1: f64,
    theta2: f64,
    grid1: &QuadratureGrid,
    grid2: &QuadratureGrid,
) -> Result<TwoModeTomogram> {
    let t = source.evaluate_surface(theta1, theta2, grid1, grid2);
    t.check_normalization(GRID_MASS_TOLERANCE)?;
    Ok(t)
}

/// ω = |Σ c_{nm} e^{−inθ₁}e^{−imθ₂} ψₙ(X₁)ψₘ(X₂)|²
pub fn tomogram_two_mode_pure(
    state: &TwoModeState,
    theta1: f64,
    theta2: f64,
    grid1: &QuadratureGrid,
    grid2: &QuadratureGrid,
) -> Result<TwoModeTomogram> {
    tomogram_two_mode(state, theta1, theta2, grid1, grid2)
}

/// ω = Σ ρ_{nn'mm'} e^{−i(n−n')θ₁}e^{−i(m−m')θ₂} ψₙψₙ'(X₁) ψₘψₘ'(X₂)
pub fn tomogram_mixed(
    rho: &TwoModeDensityMatrix,
    theta1: f64,
    theta2: f64,
    grid1: &QuadratureGrid,
    grid2: &QuadratureGrid,
) -> Result<TwoModeTomogram> {
    tomogram_two_mode(rho, theta1, theta2, grid1, grid2)
}

pub fn marginal(t: &TwoModeTomogram, keep: Axis) -> Tomogram {
    t.marginal(keep)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PiShiftReport {
    /// Number of (θ, θ+π) row pairs compared.
    pub pairs: usize,
    /// max |ω(X, θ+π) − ω(−X, θ)| over all pairs and grid points
    pub max_deviation: f64,
}

impl PiShiftReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.pairs > 0 && self.max_deviation < tolerance
    }
}

/// Compares every row pair (θ, θ+π) of the tomogram. On a symmetric grid
/// −X is a grid point; otherwise ω(−X, θ) is interpolated and taken as zero
/// where −X is not covered.
pub fn check_pi_shift(t: &Tomogram) -> PiShiftReport {
    let grid = t.grid();
    let n = grid.n_points();
    let mut pairs = 0;
    let mut worst = 0.0f64;
    for (i, &a) in t.thetas().iter().enumerate() {
        for (k, &b) in t.thetas().iter().enumerate() {
            if ((b - a) - PI).abs() > 1e-12 {
                continue;
            }
            pairs += 1;
            let (base, shifted) = (t.row(i), t.row(k));
            for (j, &x) in grid.xs().iter().enumerate() {
                let mirrored = if grid.is_symmetric() {
                    base[n - 1 - j]
                } else {
                    grid.interpolate(base, -x)
                };
                worst = worst.max((shifted[j] - mirrored).abs());
            }
        }
    }
    PiShiftReport {
        pairs,
        max_deviation: worst,
    }
}

/// Evaluates `source` at each θ and θ+π and checks the mirror relation.
pub fn pi_shift_deviation<S: SingleModeSource + ?Sized>(
    source: &S,
    thetas: &[f64],
    grid: &QuadratureGrid,
) -> PiShiftReport {
    let all: Vec<f64> = thetas.iter().copied().chain(thetas.iter().map(|t| t + PI)).collect();
    check_pi_shift(&evaluate(source, &all, grid))
}

/// Local maxima of a sampled row that reach `relative` × the row maximum.
pub fn significant_maxima(row: &[f64], relative: f64) -> Vec<usize> {
    let top = row.iter().copied().fold(0.0, f64::max);
    (1..row.len().saturating_sub(1))
        .filter(|&j| row[j] > row[j - 1] && row[j] >= row[j + 1] && row[j] >= relative * top)
        .collect()
}

/// Vertical bands of a tomogram row: the number of minima separating
/// consecutive significant maxima (maxima at ≥ 1e-3 of the row maximum).
pub fn count_bands(row: &[f64]) -> usize {
    significant_maxima(row, 1e-3).len().saturating_sub(1)
}

/// Mean height of the secondary maxima relative to the main maximum;
/// zero for a single-peaked row.
pub fn band_contrast(row: &[f64]) -> f64 {
    let peaks = significant_maxima(row, 1e-3);
    if peaks.len() < 2 {
        return 0.0;
    }
    let heights: Vec<f64> = peaks.iter().map(|&j| row[j]).collect();
    let top = heights.iter().copied().fold(0.0, f64::max);
    let rest: f64 = heights.iter().sum::<f64>() - top;
    rest / ((heights.len() - 1) as f64 * top)
}
