//! Normal-ordered moments ⟨a†ᵏaˡ⟩ recovered from tomograms, and the
//! Fock-space oracle they are checked against.
//!
//! Extraction uses the roots-of-unity formula
//!
//! ⟨a†ᵏaˡ⟩ = C_kl Σ_{m=0}^{k+l} e^{−i(k−l)θₘ} ∫ ω(X, θₘ) H_{k+l}(X) dX,
//! θₘ = mπ/(k+l+1),  C_kl = k! l! / ((k+l+1)! √(2^{k+l})),
//!
//! and its two-mode double-sum analogue. Only the k+l+1 phases θₘ are ever
//! evaluated; fewer phases alias neighbouring moments into the result.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;

use crate::density::{SingleModeDensity, TwoModeDensityMatrix};
use crate::fock::{SingleModeState, TwoModeState};
use crate::hermite::{hermite_log, HermiteTable};
use crate::linalg::CMatrix;
use crate::tomography::{QuadratureGrid, SingleModeSource, TwoModeSource};
use crate::{Error, Result};

/// Highest total order k+l accepted by the extraction.
pub const K_MAX: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentSource {
    Tomogram,
    FockOracle,
}

impl MomentSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            MomentSource::Tomogram => "tomogram",
            MomentSource::FockOracle => "fock_oracle",
        }
    }
}

/// Entries ⟨a†ᵏaˡ⟩ for all k + l ≤ `max_order`.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentTable {
    max_order: usize,
    source: MomentSource,
    entries: BTreeMap<(usize, usize), Complex64>,
}

impl MomentTable {
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn source(&self) -> MomentSource {
        self.source
    }

    pub fn get(&self, k: usize, l: usize) -> Result<Complex64> {
        self.entries
            .get(&(k, l))
            .copied()
            .ok_or_else(|| Error::MissingOrder(format!("<a^+{k} a^{l}>")))
    }

    pub fn entries(&self) -> impl Iterator<Item = ((usize, usize), Complex64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    /// max |entry(k,l) − conj(entry(l,k))|
    pub fn hermiticity_defect(&self) -> f64 {
        self.entries
            .iter()
            .map(|(&(k, l), v)| (v - self.entries[&(l, k)].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// max |self − other| over the common entries.
    pub fn max_difference(&self, other: &MomentTable) -> f64 {
        self.entries
            .iter()
            .filter_map(|(key, v)| other.entries.get(key).map(|w| (v - w).norm()))
            .fold(0.0, f64::max)
    }

    /// Rows `k,l,re,im,source`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "k,l,re,im,source")?;
        for (&(k, l), v) in &self.entries {
            writeln!(w, "{k},{l},{},{},{}", v.re, v.im, self.source.as_str())?;
        }
        Ok(())
    }
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|k| (k as f64).ln()).sum()
}

/// C_kl = k! l! / ((k+l+1)! √(2^{k+l}))
pub fn extraction_prefactor(k: usize, l: usize) -> f64 {
    (ln_factorial(k) + ln_factorial(l) - ln_factorial(k + l + 1) - 0.5 * (k + l) as f64 * 2f64.ln()).exp()
}

fn check_order(order: usize) -> Result<()> {
    if order > K_MAX {
        return Err(Error::OrderTooHigh { order, max: K_MAX });
    }
    Ok(())
}

/// θₘ = mπ/n_phases for m = 0..n_phases.
fn phases(n_phases: usize) -> Vec<f64> {
    (0..n_phases).map(|m| m as f64 * PI / n_phases as f64).collect()
}

/// Hₙ(xⱼ) as (sign, ln|Hₙ|) along a grid.
fn hermite_logs(n: usize, grid: &QuadratureGrid) -> Vec<(f64, f64)> {
    grid.xs().iter().map(|&x| hermite_log(n, x)).collect()
}

/// ∫ ω(X) Hₙ(X) dX with the product formed in log space.
fn hermite_integral(row: &[f64], h: &[(f64, f64)], grid: &QuadratureGrid) -> f64 {
    row.iter()
        .zip(h)
        .zip(grid.weights())
        .map(|((&w, &(s, lh)), &q)| if w > 0.0 && s != 0.0 { q * s * (lh + w.ln()).exp() } else { 0.0 })
        .sum()
}

/// Rows of a single-mode tomogram cached by phase.
struct RowCache<'a, S: ?Sized> {
    source: &'a S,
    table: HermiteTable,
    rows: HashMap<u64, Vec<f64>>,
}

impl<'a, S: SingleModeSource + ?Sized> RowCache<'a, S> {
    fn new(source: &'a S, grid: &QuadratureGrid) -> Self {
        Self {
            source,
            table: HermiteTable::new(source.n_cut(), grid.xs()),
            rows: HashMap::new(),
        }
    }

    fn row(&mut self, theta: f64, grid: &QuadratureGrid) -> Result<&[f64]> {
        let key = theta.to_bits();
        if !self.rows.contains_key(&key) {
            let row = self.source.tomogram_row(theta, &self.table);
            let mass = grid.integrate(&row);
            if !((mass - 1.0).abs() <= crate::tomography::GRID_MASS_TOLERANCE) {
                return Err(Error::GridTooNarrow {
                    theta,
                    mass,
                    tolerance: crate::tomography::GRID_MASS_TOLERANCE,
                });
            }
            self.rows.insert(key, row);
        }
        Ok(&self.rows[&key])
    }
}

fn extract_with<S: SingleModeSource + ?Sized>(
    cache: &mut RowCache<'_, S>,
    grid: &QuadratureGrid,
    h: &[(f64, f64)],
    k: usize,
    l: usize,
    n_phases: usize,
) -> Result<Complex64> {
    let kl = k as f64 - l as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    for theta in phases(n_phases) {
        let integral = hermite_integral(cache.row(theta, grid)?, h, grid);
        acc += Complex64::from_polar(1.0, -kl * theta) * integral;
    }
    Ok(acc * extraction_prefactor(k, l))
}

/// ⟨a†ᵏaˡ⟩ from the tomogram of `source` at the k+l+1 phases mπ/(k+l+1).
pub fn extract_moment<S: SingleModeSource + ?Sized>(
    source: &S,
    k: usize,
    l: usize,
    grid: &QuadratureGrid,
) -> Result<Complex64> {
    extract_moment_with_phases(source, k, l, k + l + 1, grid)
}

/// The extraction sum evaluated with `n_phases` equally spaced phases
/// mπ/n_phases instead of k+l+1. Exact only for n_phases = k+l+1.
pub fn extract_moment_with_phases<S: SingleModeSource + ?Sized>(
    source: &S,
    k: usize,
    l: usize,
    n_phases: usize,
    grid: &QuadratureGrid,
) -> Result<Complex64> {
    check_order(k + l)?;
    if n_phases == 0 {
        return Err(Error::InvalidParameter("at least one phase is needed".into()));
    }
    let mut cache = RowCache::new(source, grid);
    let h = hermite_logs(k + l, grid);
    extract_with(&mut cache, grid, &h, k, l, n_phases)
}

/// All ⟨a†ᵏaˡ⟩ with k + l ≤ `max_order`, sharing tomogram rows between
/// orders.
pub fn extract_moments<S: SingleModeSource + ?Sized>(
    source: &S,
    max_order: usize,
    grid: &QuadratureGrid,
) -> Result<MomentTable> {
    check_order(max_order)?;
    let mut cache = RowCache::new(source, grid);
    let mut entries = BTreeMap::new();
    for order in 0..=max_order {
        let h = hermite_logs(order, grid);
        for k in 0..=order {
            let l = order - k;
            entries.insert((k, l), extract_with(&mut cache, grid, &h, k, l, order + 1)?);
        }
    }
    Ok(MomentTable {
        max_order,
        source: MomentSource::Tomogram,
        entries,
    })
}

/// Direct Fock-space evaluation of normal-ordered moments.
pub trait FockOracle {
    /// ⟨a†ᵏaˡ⟩
    fn oracle_moment(&self, k: usize, l: usize) -> Result<Complex64>;
}

impl FockOracle for SingleModeState {
    /// ⟨aᵏψ|aˡψ⟩; lowering never leaves the basis.
    fn oracle_moment(&self, k: usize, l: usize) -> Result<Complex64> {
        let lower = |times: usize| (0..times).fold(self.clone(), |s, _| s.annihilate());
        Ok(lower(k).inner(&lower(l)))
    }
}

fn lowering_matrix(dim: usize) -> CMatrix {
    let mut a = CMatrix::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = Complex64::new((n as f64).sqrt(), 0.0);
    }
    a
}

impl FockOracle for SingleModeDensity {
    /// Tr(aˡ ρ a†ᵏ)
    fn oracle_moment(&self, k: usize, l: usize) -> Result<Complex64> {
        let a = lowering_matrix(self.n_cut() + 1);
        let al = (0..l).fold(self.matrix().clone(), |m, _| &a * m);
        let both = (0..k).fold(al, |m, _| m * a.adjoint());
        Ok(both.trace())
    }
}

/// Oracle table for all k + l ≤ `max_order`.
pub fn oracle_moments<S: FockOracle + ?Sized>(source: &S, max_order: usize) -> Result<MomentTable> {
    let mut entries = BTreeMap::new();
    for order in 0..=max_order {
        for k in 0..=order {
            entries.insert((k, order - k), source.oracle_moment(k, order - k)?);
        }
    }
    Ok(MomentTable {
        max_order,
        source: MomentSource::FockOracle,
        entries,
    })
}

pub fn oracle_moment<S: FockOracle + ?Sized>(source: &S, k: usize, l: usize) -> Result<Complex64> {
    source.oracle_moment(k, l)
}

/// Key (k, l, p, q) of ⟨a†ᵏaˡ b†ᵖb^q⟩.
pub type TwoModeIndex = (usize, usize, usize, usize);

/// Entries ⟨a†ᵏaˡ b†ᵖb^q⟩ for k + l ≤ K and p + q ≤ K.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeMomentTable {
    max_order: usize,
    source: MomentSource,
    entries: BTreeMap<TwoModeIndex, Complex64>,
}

impl TwoModeMomentTable {
    pub fn max_order(&self) -> usize {
        self.max_order
    }

    pub fn source(&self) -> MomentSource {
        self.source
    }

    pub fn get(&self, k: usize, l: usize, p: usize, q: usize) -> Result<Complex64> {
        self.entries
            .get(&(k, l, p, q))
            .copied()
            .ok_or_else(|| Error::MissingOrder(format!("<a^+{k} a^{l} b^+{p} b^{q}>")))
    }

    pub fn entries(&self) -> impl Iterator<Item = (TwoModeIndex, Complex64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.entries
            .iter()
            .map(|(&(k, l, p, q), v)| (v - self.entries[&(l, k, q, p)].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_difference(&self, other: &TwoModeMomentTable) -> f64 {
        self.entries
            .iter()
            .filter_map(|(key, v)| other.entries.get(key).map(|w| (v - w).norm()))
            .fold(0.0, f64::max)
    }

    /// The single-mode table of the first (`second = false`) or second mode.
    pub fn reduced(&self, second: bool) -> MomentTable {
        let entries = self
            .entries
            .iter()
            .filter_map(|(&(k, l, p, q), v)| match second {
                false if p == 0 && q == 0 => Some(((k, l), *v)),
                true if k == 0 && l == 0 => Some(((p, q), *v)),
                _ => None,
            })
            .collect();
        MomentTable {
            max_order: self.max_order,
            source: self.source,
            entries,
        }
    }

    /// Rows `k,l,p,q,re,im,source`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "k,l,p,q,re,im,source")?;
        for (&(k, l, p, q), v) in &self.entries {
            writeln!(w, "{k},{l},{p},{q},{},{},{}", v.re, v.im, self.source.as_str())?;
        }
        Ok(())
    }
}

/// ⟨a†ᵏaˡ b†ᵖb^q⟩ = C_kl C_pq Σ_{m,m'} e^{−i(k−l)θₘ} e^{−i(p−q)θ'ₘ'}
/// ∬ ω(X₁,θₘ,X₂,θ'ₘ') H_{k+l}(X₁) H_{p+q}(X₂), for all k+l, p+q ≤ `max_order`.
pub fn extract_two_mode_moments<S: TwoModeSource + ?Sized>(
    source: &S,
    max_order: usize,
    grid1: &QuadratureGrid,
    grid2: &QuadratureGrid,
) -> Result<TwoModeMomentTable> {
    check_order(max_order)?;
    let h1: Vec<Vec<(f64, f64)>> = (0..=max_order).map(|n| hermite_logs(n, grid1)).collect();
    let h2: Vec<Vec<(f64, f64)>> = (0..=max_order).map(|n| hermite_logs(n, grid2)).collect();
    // integrals[(θ₁, θ₂)][(n₁, n₂)] = ∬ ω H_{n₁} H_{n₂}
    let mut integrals: HashMap<(u64, u64), Vec<f64>> = HashMap::new();
    let (n1_pts, n2_pts) = (grid1.n_points(), grid2.n_points());
    let mut integral = |t1: f64, t2: f64, n1: usize, n2: usize| -> Result<f64> {
        let key = (t1.to_bits(), t2.to_bits());
        if !integrals.contains_key(&key) {
            let t = crate::tomography::tomogram_two_mode(source, t1, t2, grid1, grid2)?;
            let mut all = vec![0.0; (max_order + 1) * (max_order + 1)];
            for a in 0..=max_order {
                for b in 0..=max_order {
                    let mut acc = 0.0;
                    for j in 0..n1_pts {
                        let (s1, l1) = h1[a][j];
                        let w1 = grid1.weights()[j];
                        if s1 == 0.0 {
                            continue;
                        }
                        for k in 0..n2_pts {
                            let w = t.value(j, k);
                            let (s2, l2) = h2[b][k];
                            if w > 0.0 && s2 != 0.0 {
                                acc += w1 * grid2.weights()[k] * s1 * s2 * (l1 + l2 + w.ln()).exp();
                            }
                        }
                    }
                    all[a * (max_order + 1) + b] = acc;
                }
            }
            integrals.insert(key, all);
        }
        Ok(integrals[&key][n1 * (max_order + 1) + n2])
    };

    let mut entries = BTreeMap::new();
    for n1 in 0..=max_order {
        for n2 in 0..=max_order {
            for k in 0..=n1 {
                let l = n1 - k;
                for p in 0..=n2 {
                    let q = n2 - p;
                    let mut acc = Complex64::new(0.0, 0.0);
                    for t1 in phases(n1 + 1) {
                        for t2 in phases(n2 + 1) {
                            let phase = -(k as f64 - l as f64) * t1 - (p as f64 - q as f64) * t2;
                            acc += Complex64::from_polar(1.0, phase) * integral(t1, t2, n1, n2)?;
                        }
                    }
                    let value = acc * extraction_prefactor(k, l) * extraction_prefactor(p, q);
                    entries.insert((k, l, p, q), value);
                }
            }
        }
    }
    Ok(TwoModeMomentTable {
        max_order,
        source: MomentSource::Tomogram,
        entries,
    })
}

/// Direct Fock-space evaluation of two-mode normal-ordered moments.
pub trait TwoModeFockOracle {
    fn oracle_moment_two_mode(&self, k: usize, l: usize, p: usize, q: usize) -> Result<Complex64>;
}

/// aⁱ bʲ applied to a two-mode amplitude matrix.
fn lower_two_mode(c: &CMatrix, i: usize, j: usize) -> CMatrix {
    let a = lowering_matrix(c.nrows());
    let b = lowering_matrix(c.ncols());
    // c_{nm}: mode a acts on rows, mode b on columns
    let left = (0..i).fold(c.clone(), |m, _| &a * m);
    (0..j).fold(left, |m, _| m * b.transpose())
}

impl TwoModeFockOracle for TwoModeState {
    /// ⟨aᵏbᵖψ|aˡb^qψ⟩
    fn oracle_moment_two_mode(&self, k: usize, l: usize, p: usize, q: usize) -> Result<Complex64> {
        let c = self.as_matrix();
        let bra = lower_two_mode(&c, k, p);
        let ket = lower_two_mode(&c, l, q);
        Ok(bra.iter().zip(ket.iter()).map(|(x, y)| x.conj() * y).sum())
    }
}

impl TwoModeFockOracle for TwoModeDensityMatrix {
    /// Tr(aˡb^q ρ a†ᵏb†ᵖ)
    fn oracle_moment_two_mode(&self, k: usize, l: usize, p: usize, q: usize) -> Result<Complex64> {
        let d = self.dim();
        let a1 = lowering_matrix(d);
        let id = CMatrix::identity(d, d);
        let a = a1.kronecker(&id);
        let b = id.kronecker(&a1);
        let left = (0..l).fold(self.matrix().clone(), |m, _| &a * m);
        let left = (0..q).fold(left, |m, _| &b * m);
        let right = (0..k).fold(left, |m, _| m * a.adjoint());
        let right = (0..p).fold(right, |m, _| m * b.adjoint());
        Ok(right.trace())
    }
}

pub fn oracle_two_mode_moments<S: TwoModeFockOracle + ?Sized>(
    source: &S,
    max_order: usize,
) -> Result<TwoModeMomentTable> {
    let mut entries = BTreeMap::new();
    for n1 in 0..=max_order {
        for n2 in 0..=max_order {
            for k in 0..=n1 {
                for p in 0..=n2 {
                    let key = (k, n1 - k, p, n2 - p);
                    entries.insert(key, source.oracle_moment_two_mode(key.0, key.1, key.2, key.3)?);
                }
            }
        }
    }
    Ok(TwoModeMomentTable {
        max_order,
        source: MomentSource::FockOracle,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_cat, make_coherent, make_fock, make_squeezed, make_two_mode, CatKind, SqueezeBase, TwoModeKind};
    use crate::tomography::default_two_mode_grids;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn prefactor_values() {
        assert!((extraction_prefactor(0, 0) - 1.0).abs() < 1e-15);
        assert!((extraction_prefactor(0, 1) - 1.0 / (2.0 * 2f64.sqrt())).abs() < 1e-15);
        // 2!·1!/(4!·2^{3/2})
        assert!((extraction_prefactor(2, 1) - 2.0 / (24.0 * 8f64.sqrt())).abs() < 1e-15);
    }

    #[test]
    fn vacuum_moments_vanish() {
        let vac = SingleModeState::vacuum(10);
        let g = QuadratureGrid::default_for(0.0);
        let t = extract_moments(&vac, 4, &g).unwrap();
        for ((k, l), v) in t.entries() {
            let expected = if k == 0 && l == 0 { 1.0 } else { 0.0 };
            assert!((v - c(expected)).norm() < 1e-9, "({k},{l}) = {v}");
        }
    }

    #[test]
    fn coherent_moments() {
        let s = make_coherent(c(1.0), None).unwrap();
        let g = QuadratureGrid::default_for(1.0);
        assert!((extract_moment(&s, 1, 1, &g).unwrap() - c(1.0)).norm() < 1e-9);
        assert!((extract_moment(&s, 0, 1, &g).unwrap() - c(1.0)).norm() < 1e-9);
        let alpha = Complex64::new(0.6, -0.9);
        let s = make_coherent(alpha, None).unwrap();
        let g = QuadratureGrid::default_for(s.mean_photon_number());
        let t = extract_moments(&s, 4, &g).unwrap();
        for ((k, l), v) in t.entries() {
            let expected = alpha.conj().powu(k as u32) * alpha.powu(l as u32);
            assert!((v - expected).norm() < 1e-9, "({k},{l})");
        }
    }

    #[test]
    fn order_guard() {
        let vac = SingleModeState::vacuum(10);
        let g = QuadratureGrid::default_for(0.0);
        assert!(matches!(extract_moment(&vac, 4, 3, &g), Err(Error::OrderTooHigh { order: 7, max: 6 })));
        assert!(extract_moment(&vac, 3, 3, &g).is_ok());
    }

    #[test]
    fn oracle_anchors() {
        let three = make_fock(3, None).unwrap();
        assert!((oracle_moment(&three, 1, 1).unwrap() - c(3.0)).norm() < 1e-14);
        let ecs = make_cat(c(1.3), CatKind::Even, None).unwrap();
        assert!(oracle_moment(&ecs, 0, 1).unwrap().norm() < 1e-15);
        let sqv = make_squeezed(c(0.5), SqueezeBase::Vacuum, None).unwrap();
        let a2 = oracle_moment(&sqv, 0, 2).unwrap();
        assert!((a2 - c(-(0.5f64).sinh() * (0.5f64).cosh())).norm() < 1e-9);
        assert!((a2.re + 0.587).abs() < 1e-3);
        // ⟨a†a⟩ = sinh² r
        assert!((oracle_moment(&sqv, 1, 1).unwrap().re - (0.5f64).sinh().powi(2)).abs() < 1e-9);
    }

    #[test]
    fn density_oracle_matches_pure_oracle() {
        let s = make_cat(Complex64::new(0.7, 0.5), CatKind::YurkeStoler, None).unwrap();
        let rho = SingleModeDensity::from_pure(&s);
        let a = oracle_moments(&s, 4).unwrap();
        let b = oracle_moments(&rho, 4).unwrap();
        assert!(a.max_difference(&b) < 1e-12);
        assert!(a.hermiticity_defect() < 1e-12);
    }

    #[test]
    fn too_few_phases_alias() {
        let s = make_coherent(c(1.0), None).unwrap();
        let g = QuadratureGrid::default_for(1.0);
        let exact = extract_moment_with_phases(&s, 2, 0, 3, &g).unwrap();
        let aliased = extract_moment_with_phases(&s, 2, 0, 2, &g).unwrap();
        assert!((exact - c(1.0)).norm() < 1e-9);
        assert!((aliased - c(1.0)).norm() > 0.1, "{aliased}");
    }

    #[test]
    fn two_mode_extraction_matches_oracle() {
        let cs = make_two_mode(TwoModeKind::CavesSchumaker, 1.0, 0.0, None).unwrap();
        let (g1, g2) = default_two_mode_grids(&cs);
        let t = extract_two_mode_moments(&cs, 2, &g1, &g2).unwrap();
        let o = oracle_two_mode_moments(&cs, 2).unwrap();
        assert!(t.max_difference(&o) < 1e-6, "{}", t.max_difference(&o));
        let ab = t.get(0, 1, 0, 1).unwrap();
        assert!((ab - c(-(1f64).sinh() * (1f64).cosh())).norm() < 1e-6);
        assert!((ab.re + 1.8134).abs() < 1e-4);

        let a = make_coherent(c(0.5), None).unwrap();
        let p = TwoModeState::product(&a, &a);
        let rho = TwoModeDensityMatrix::from_pure(&p);
        let (g1, g2) = default_two_mode_grids(&p);
        let t = extract_two_mode_moments(&rho, 2, &g1, &g2).unwrap();
        assert!((t.get(1, 1, 1, 1).unwrap() - c(0.0625)).norm() < 1e-6);
        let o = oracle_two_mode_moments(&rho, 2).unwrap();
        assert!(t.max_difference(&o) < 1e-6);
        assert!((o.get(1, 1, 1, 1).unwrap() - c(0.0625)).norm() < 1e-9);
    }

    #[test]
    fn reduced_tables() {
        let a = make_coherent(Complex64::new(0.2, 0.4), Some(30)).unwrap();
        let b = make_cat(c(0.9), CatKind::Odd, Some(30)).unwrap();
        let p = TwoModeState::product(&a, &b);
        let o = oracle_two_mode_moments(&p, 2).unwrap();
        assert!(o.reduced(false).max_difference(&oracle_moments(&a, 2).unwrap()) < 1e-12);
        assert!(o.reduced(true).max_difference(&oracle_moments(&b, 2).unwrap()) < 1e-12);
    }
}
