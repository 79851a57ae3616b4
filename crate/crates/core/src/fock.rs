//! Truncated Fock-basis state vectors and ladder-operator actions.
//!
//! A state truncated at `n_cut` carries amplitudes for |0⟩..|n_cut⟩. The top
//! [`TRUNCATION_BUFFER`] levels are reserved: a certified state keeps its
//! tail mass beyond `n_cut − buffer` below [`TAIL_TOLERANCE`], so ladder,
//! beamsplitter and decoherence operations never push real amplitude out of
//! the basis.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::{Error, Result, TAIL_TOLERANCE, TRUNCATION_BUFFER};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Smallest `k` such that the mass strictly above level `k` is below
/// `tolerance` times the total mass.
pub fn support_edge(masses: &[f64], tolerance: f64) -> usize {
    let total: f64 = masses.iter().sum();
    let mut tail = 0.0;
    for k in (0..masses.len()).rev() {
        tail += masses[k];
        if tail >= tolerance * total {
            return k;
        }
    }
    0
}

/// Default truncation for a state with the given per-level masses: certified
/// support edge plus the buffer.
/// Uses a tenth of the tail tolerance so products of certified states stay certified.
pub fn adaptive_cut(masses: &[f64]) -> usize {
    support_edge(masses, 0.1 * TAIL_TOLERANCE) + TRUNCATION_BUFFER
}

/// Pure single-mode state Σₙ cₙ|n⟩, n = 0..=n_cut.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeState {
    amplitudes: Vec<Complex64>,
}

impl SingleModeState {
    /// Wraps raw amplitudes; the vector is not normalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Self {
        assert!(!amplitudes.is_empty(), "a state needs at least the vacuum level");
        Self { amplitudes }
    }

    pub fn fock(n: usize, n_cut: usize) -> Result<Self> {
        if n > n_cut {
            return Err(Error::TruncationOverflow {
                context: format!("Fock state |{n}>"),
                n_cut,
                tail_mass: 1.0,
                tolerance: TAIL_TOLERANCE,
            });
        }
        let mut amplitudes = vec![ZERO; n_cut + 1];
        amplitudes[n] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn vacuum(n_cut: usize) -> Self {
        Self::fock(0, n_cut).expect("vacuum fits every basis")
    }

    pub fn n_cut(&self) -> usize {
        self.amplitudes.len() - 1
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// cₙ, zero above the truncation.
    pub fn amplitude(&self, n: usize) -> Complex64 {
        self.amplitudes.get(n).copied().unwrap_or(ZERO)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::DegenerateParameter("state vector has zero norm".into()));
        }
        Ok(Self {
            amplitudes: self.amplitudes.iter().map(|c| c / norm).collect(),
        })
    }

    pub fn photon_distribution(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|c| c.norm_sqr()).collect()
    }

    /// Relative mass strictly above level `level`.
    pub fn tail_mass(&self, level: usize) -> f64 {
        let total = self.norm_sqr();
        let tail: f64 = self.amplitudes.iter().skip(level + 1).map(|c| c.norm_sqr()).sum();
        tail / total
    }

    /// Checks that the reserved buffer is empty to within the tail tolerance.
    pub fn certify(&self) -> Result<()> {
        let n_cut = self.n_cut();
        let tail = self.tail_mass(n_cut.saturating_sub(TRUNCATION_BUFFER));
        if tail >= TAIL_TOLERANCE {
            return Err(Error::TruncationOverflow {
                context: "single-mode truncation certificate".into(),
                n_cut,
                tail_mass: tail,
                tolerance: TAIL_TOLERANCE,
            });
        }
        Ok(())
    }

    pub fn mean_photon_number(&self) -> f64 {
        let mean: f64 = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(n, c)| n as f64 * c.norm_sqr())
            .sum();
        mean / self.norm_sqr()
    }

    /// Zero-padded (or cut) copy with the given truncation.
    pub fn resized(&self, n_cut: usize) -> Self {
        let mut amplitudes = self.amplitudes.clone();
        amplitudes.resize(n_cut + 1, ZERO);
        Self { amplitudes }
    }

    /// a|ψ⟩: component n becomes √(n+1)·c_{n+1}; the top level receives zero.
    pub fn annihilate(&self) -> Self {
        let n_cut = self.n_cut();
        let mut out = vec![ZERO; n_cut + 1];
        for n in 0..n_cut {
            out[n] = self.amplitudes[n + 1] * ((n + 1) as f64).sqrt();
        }
        Self { amplitudes: out }
    }

    /// a†|ψ⟩: component n+1 becomes √(n+1)·cₙ. Fails when the amplitude
    /// pushed past the top level is not negligible.
    pub fn create(&self) -> Result<Self> {
        let n_cut = self.n_cut();
        let spill = (n_cut + 1) as f64 * self.amplitudes[n_cut].norm_sqr();
        let total = self.norm_sqr();
        if total > 0.0 && spill > TAIL_TOLERANCE * total {
            return Err(Error::TruncationOverflow {
                context: "creation operator".into(),
                n_cut,
                tail_mass: spill / total,
                tolerance: TAIL_TOLERANCE,
            });
        }
        let mut out = vec![ZERO; n_cut + 1];
        for n in 0..n_cut {
            out[n + 1] = self.amplitudes[n] * ((n + 1) as f64).sqrt();
        }
        Ok(Self { amplitudes: out })
    }

    /// ⟨self|other⟩; the shorter vector is implicitly zero-padded.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr() / (self.norm_sqr() * other.norm_sqr())
    }

    /// Linear combination `self + weight·other` over the larger basis.
    pub fn add_scaled(&self, other: &Self, weight: Complex64) -> Self {
        let n_cut = self.n_cut().max(other.n_cut());
        let amplitudes = (0..=n_cut)
            .map(|n| self.amplitude(n) + weight * other.amplitude(n))
            .collect();
        Self { amplitudes }
    }
}

/// Pure two-mode state Σ c_{nm}|n⟩⊗|m⟩ with n, m = 0..=n_cut.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeState {
    dim: usize,
    // row-major: amplitudes[n * dim + m]
    amplitudes: Vec<Complex64>,
}

impl TwoModeState {
    pub fn from_fn(n_cut: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let dim = n_cut + 1;
        let mut amplitudes = Vec::with_capacity(dim * dim);
        for n in 0..dim {
            for m in 0..dim {
                amplitudes.push(f(n, m));
            }
        }
        Self { dim, amplitudes }
    }

    pub fn vacuum(n_cut: usize) -> Self {
        Self::from_fn(n_cut, |n, m| if n == 0 && m == 0 { Complex64::new(1.0, 0.0) } else { ZERO })
    }

    /// c_{nm} = aₙ·bₘ on the larger of the two truncations.
    pub fn product(a: &SingleModeState, b: &SingleModeState) -> Self {
        let n_cut = a.n_cut().max(b.n_cut());
        Self::from_fn(n_cut, |n, m| a.amplitude(n) * b.amplitude(m))
    }

    pub fn n_cut(&self) -> usize {
        self.dim - 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, n: usize, m: usize) -> Complex64 {
        if n < self.dim && m < self.dim {
            self.amplitudes[n * self.dim + m]
        } else {
            ZERO
        }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn as_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.amplitudes)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Result<Self> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::DegenerateParameter("two-mode state has zero norm".into()));
        }
        Ok(Self {
            dim: self.dim,
            amplitudes: self.amplitudes.iter().map(|c| c / norm).collect(),
        })
    }

    /// Relative mass with n > level or m > level.
    pub fn tail_mass(&self, level: usize) -> f64 {
        let mut tail = 0.0;
        for n in 0..self.dim {
            for m in 0..self.dim {
                if n > level || m > level {
                    tail += self.get(n, m).norm_sqr();
                }
            }
        }
        tail / self.norm_sqr()
    }

    pub fn certify(&self) -> Result<()> {
        let n_cut = self.n_cut();
        let tail = self.tail_mass(n_cut.saturating_sub(TRUNCATION_BUFFER));
        if tail >= TAIL_TOLERANCE {
            return Err(Error::TruncationOverflow {
                context: "two-mode truncation certificate".into(),
                n_cut,
                tail_mass: tail,
                tolerance: TAIL_TOLERANCE,
            });
        }
        Ok(())
    }

    /// Mass per level ℓ = max(n, m), the level a truncation has to retain.
    pub fn mode_masses(&self) -> Vec<f64> {
        let mut masses = vec![0.0; self.dim];
        for n in 0..self.dim {
            for m in 0..self.dim {
                masses[n.max(m)] += self.get(n, m).norm_sqr();
            }
        }
        masses
    }

    /// P(n + m = T) for T = 0..=2·n_cut.
    pub fn total_photon_distribution(&self) -> Vec<f64> {
        let mut dist = vec![0.0; 2 * self.dim - 1];
        for n in 0..self.dim {
            for m in 0..self.dim {
                dist[n + m] += self.get(n, m).norm_sqr();
            }
        }
        dist
    }

    /// (⟨a†a⟩, ⟨b†b⟩)
    pub fn mean_photon_numbers(&self) -> (f64, f64) {
        let (mut na, mut nb) = (0.0, 0.0);
        for n in 0..self.dim {
            for m in 0..self.dim {
                let p = self.get(n, m).norm_sqr();
                na += n as f64 * p;
                nb += m as f64 * p;
            }
        }
        let total = self.norm_sqr();
        (na / total, nb / total)
    }

    pub fn resized(&self, n_cut: usize) -> Self {
        Self::from_fn(n_cut, |n, m| self.get(n, m))
    }

    /// Copy truncated at the certified support edge (no buffer).
    pub fn trimmed_to_support(&self) -> Self {
        self.resized(support_edge(&self.mode_masses(), TAIL_TOLERANCE))
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        let dim = self.dim.max(other.dim);
        let mut acc = ZERO;
        for n in 0..dim {
            for m in 0..dim {
                acc += self.get(n, m).conj() * other.get(n, m);
            }
        }
        acc
    }

    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr() / (self.norm_sqr() * other.norm_sqr())
    }

    /// Singular values of the coefficient matrix, descending.
    pub fn schmidt_coefficients(&self) -> Vec<f64> {
        let mut sv: Vec<f64> = self.as_matrix().singular_values().iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        sv
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn coherent(alpha: Complex64, n_cut: usize) -> SingleModeState {
        let mut amps = Vec::with_capacity(n_cut + 1);
        let mut term = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        for n in 0..=n_cut {
            if n > 0 {
                term = term * alpha / (n as f64).sqrt();
            }
            amps.push(term);
        }
        SingleModeState::from_amplitudes(amps)
    }

    #[test]
    fn ladder_on_fock_states() {
        let one = SingleModeState::fock(1, 15).unwrap();
        assert_eq!(one.annihilate(), SingleModeState::vacuum(15));
        let zero = SingleModeState::vacuum(15).annihilate();
        assert_eq!(zero.norm_sqr(), 0.0);
        assert_eq!(SingleModeState::vacuum(15).create().unwrap(), one);
        let four = SingleModeState::fock(3, 15).unwrap().create().unwrap();
        assert!((four.amplitude(4) - c(2.0)).norm() < 1e-15);
    }

    #[test]
    fn coherent_state_is_annihilation_eigenvector() {
        let alpha = Complex64::new(0.7, 0.2);
        let s = coherent(alpha, 40);
        let a_s = s.annihilate();
        for n in 0..30 {
            assert!((a_s.amplitude(n) - alpha * s.amplitude(n)).norm() < 1e-12);
        }
    }

    #[test]
    fn coherent_mean_photon_number_from_two_applications() {
        let s = coherent(c(1.0), 40);
        let n = s.inner(&s.annihilate().create().unwrap());
        assert!((n.re - 1.0).abs() < 1e-9 && n.im.abs() < 1e-12);
    }

    #[test]
    fn creation_refuses_to_spill_amplitude() {
        let top = SingleModeState::fock(12, 12).unwrap();
        assert!(matches!(top.create(), Err(Error::TruncationOverflow { .. })));
    }

    #[test]
    fn commutator_is_identity_below_buffer() {
        let s = coherent(Complex64::new(1.1, -0.4), 40);
        let aad = s.create().unwrap().annihilate();
        let ada = s.annihilate().create().unwrap();
        for n in 0..=(40 - TRUNCATION_BUFFER) {
            assert!((aad.amplitude(n) - ada.amplitude(n) - s.amplitude(n)).norm() < 1e-9);
        }
    }

    #[test]
    fn inner_products() {
        let zero = SingleModeState::vacuum(10);
        let one = SingleModeState::fock(1, 10).unwrap();
        assert_eq!(zero.inner(&one), ZERO);
        let a = coherent(c(1.0), 50);
        assert!((a.inner(&a).re - 1.0).abs() < 1e-12);
        let b = coherent(c(0.5), 50);
        let expected = (-(1.0 + 0.25) / 2.0 + 0.5f64).exp();
        assert!((a.inner(&b).re - expected).abs() < 1e-9);
        // shorter vector is padded
        let b_short = coherent(c(0.5), 30);
        assert!((a.inner(&b_short) - a.inner(&b)).norm() < 1e-9);
    }

    #[test]
    fn certificate_flags_inadequate_truncation() {
        let wide = coherent(c(2.0), 4).normalized().unwrap();
        assert!(matches!(wide.certify(), Err(Error::TruncationOverflow { .. })));
        let good = coherent(c(2.0), 60);
        good.certify().unwrap();
    }

    #[test]
    fn adaptive_cut_follows_tail_mass() {
        let masses = [0.5, 0.25, 0.125, 0.125 - 1e-12, 1e-12];
        assert_eq!(support_edge(&masses, 1e-10), 3);
        assert_eq!(adaptive_cut(&masses), 3 + TRUNCATION_BUFFER);
    }

    #[test]
    fn product_state_has_unit_schmidt_rank() {
        let a = coherent(Complex64::new(0.3, 0.8), 20).normalized().unwrap();
        let b = coherent(c(-0.5), 14).normalized().unwrap();
        let p = TwoModeState::product(&a, &b);
        assert_eq!(p.n_cut(), 20);
        let sv = p.schmidt_coefficients();
        assert!((sv[0] - 1.0).abs() < 1e-10);
        assert!(sv[1] < 1e-10);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn state() -> impl Strategy<Value = SingleModeState> {
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..24).prop_map(|v| {
                SingleModeState::from_amplitudes(v.into_iter().map(|(r, i)| Complex64::new(r, i)).collect())
            })
        }

        proptest! {
            #[test]
            fn conjugate_symmetry_and_cauchy_schwarz(a in state(), b in state()) {
                let ab = a.inner(&b);
                let ba = b.inner(&a);
                prop_assert!((ab - ba.conj()).norm() < 1e-12);
                prop_assert!(ab.norm_sqr() <= a.norm_sqr() * b.norm_sqr() * (1.0 + 1e-12) + 1e-12);
            }

            #[test]
            fn normalize_gives_unit_norm(a in state()) {
                prop_assume!(a.norm_sqr() > 1e-6);
                prop_assert!((a.normalized().unwrap().norm_sqr() - 1.0).abs() < 1e-10);
            }
        }
    }
}
