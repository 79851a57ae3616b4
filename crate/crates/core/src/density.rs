//! Mixed states: two-mode density matrices and reduced single-mode states.
//!
//! `TwoModeDensityMatrix` stores ρ_{nn'mm'} = ⟨n,m|ρ|n',m'⟩ as a dense
//! d²×d² matrix with row index n·d + m and column index n'·d + m'.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::fock::{SingleModeState, TwoModeState};
use crate::linalg::CMatrix;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TwoModeDensityMatrix {
    dim: usize,
    matrix: CMatrix,
}

impl TwoModeDensityMatrix {
    /// ρ = |ψ⟩⟨ψ|
    pub fn from_pure(state: &TwoModeState) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self {
            dim: state.dim(),
            matrix: &v * v.adjoint(),
        }
    }

    /// Wraps a d²×d² matrix in the (n·d + m, n'·d + m') layout.
    pub fn from_matrix(dim: usize, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != dim * dim || matrix.ncols() != dim * dim {
            return Err(Error::InvalidParameter(format!(
                "density matrix must be {0}x{0} for {1} levels per mode",
                dim * dim,
                dim
            )));
        }
        Ok(Self { dim, matrix })
    }

    pub fn from_fn(n_cut: usize, f: impl Fn(usize, usize, usize, usize) -> Complex64) -> Self {
        let dim = n_cut + 1;
        let matrix = DMatrix::from_fn(dim * dim, dim * dim, |r, c| f(r / dim, c / dim, r % dim, c % dim));
        Self { dim, matrix }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_cut(&self) -> usize {
        self.dim - 1
    }

    /// ρ_{nn'mm'} = ⟨n,m|ρ|n',m'⟩
    pub fn get(&self, n: usize, n_prime: usize, m: usize, m_prime: usize) -> Complex64 {
        let d = self.dim;
        if n >= d || n_prime >= d || m >= d || m_prime >= d {
            return Complex64::new(0.0, 0.0);
        }
        self.matrix[(n * d + m, n_prime * d + m_prime)]
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Tr ρ² = Σ|ρᵢⱼ|², valid for Hermitian ρ.
    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// max |ρᵢⱼ − conj(ρⱼᵢ)|
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Checks trace, Hermiticity and the purity bound.
    pub fn validate(&self) -> Result<()> {
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > 1e-10 {
            return Err(Error::InvalidParameter(format!("density matrix trace {tr} differs from 1")));
        }
        let h = self.hermiticity_defect();
        if h > 1e-12 {
            return Err(Error::InvalidParameter(format!("density matrix not Hermitian (defect {h:.2e})")));
        }
        let p = self.purity();
        if !(p > 0.0 && p <= 1.0 + 1e-10) {
            return Err(Error::InvalidParameter(format!("purity {p} outside (0, 1]")));
        }
        Ok(())
    }

    /// ⟨ψ|ρ|ψ⟩
    pub fn fidelity_with_pure(&self, state: &TwoModeState) -> f64 {
        let d = self.dim.min(state.dim());
        let mut acc = Complex64::new(0.0, 0.0);
        for n in 0..d {
            for m in 0..d {
                let left = state.get(n, m).conj();
                if left == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for np in 0..d {
                    for mp in 0..d {
                        acc += left * self.get(n, np, m, mp) * state.get(np, mp);
                    }
                }
            }
        }
        acc.re
    }

    /// Keeps only ρ_{nnmm}.
    pub fn diagonal_part(&self) -> Self {
        let d2 = self.dim * self.dim;
        let mut matrix = CMatrix::zeros(d2, d2);
        for i in 0..d2 {
            matrix[(i, i)] = self.matrix[(i, i)];
        }
        Self { dim: self.dim, matrix }
    }

    /// P(n, m) = ρ_{nnmm}
    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim * self.dim).map(|i| self.matrix[(i, i)].re).collect()
    }

    /// (⟨a†a⟩, ⟨b†b⟩)
    pub fn mean_photon_numbers(&self) -> (f64, f64) {
        let d = self.dim;
        let mut na = 0.0;
        let mut nb = 0.0;
        for n in 0..d {
            for m in 0..d {
                let p = self.matrix[(n * d + m, n * d + m)].re;
                na += n as f64 * p;
                nb += m as f64 * p;
            }
        }
        (na, nb)
    }

    /// Reduced state of the first mode, Tr_B ρ.
    pub fn reduced_first(&self) -> SingleModeDensity {
        let d = self.dim;
        let m = DMatrix::from_fn(d, d, |n, np| (0..d).map(|k| self.matrix[(n * d + k, np * d + k)]).sum());
        SingleModeDensity { matrix: m }
    }

    /// Reduced state of the second mode, Tr_A ρ.
    pub fn reduced_second(&self) -> SingleModeDensity {
        let d = self.dim;
        let m = DMatrix::from_fn(d, d, |m, mp| (0..d).map(|k| self.matrix[(k * d + m, k * d + mp)]).sum());
        SingleModeDensity { matrix: m }
    }

    /// The matrix R[(n,n'),(m,m')] = ρ_{nn'mm'}, grouping the indices of
    /// each mode together.
    pub fn mode_grouped(&self) -> CMatrix {
        let d = self.dim;
        DMatrix::from_fn(d * d, d * d, |r, c| {
            let (n, np) = (r / d, r % d);
            let (m, mp) = (c / d, c % d);
            self.matrix[(n * d + m, np * d + mp)]
        })
    }
}

/// Single-mode density matrix ρ_{nn'} = ⟨n|ρ|n'⟩.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleModeDensity {
    matrix: CMatrix,
}

impl SingleModeDensity {
    pub fn from_pure(state: &SingleModeState) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        Self { matrix: &v * v.adjoint() }
    }

    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return Err(Error::InvalidParameter("single-mode density matrix must be square".into()));
        }
        Ok(Self { matrix })
    }

    pub fn n_cut(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn get(&self, n: usize, n_prime: usize) -> Complex64 {
        if n > self.n_cut() || n_prime > self.n_cut() {
            return Complex64::new(0.0, 0.0);
        }
        self.matrix[(n, n_prime)]
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn purity(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{make_cat, make_coherent, CatKind};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn pure_projector_is_valid() {
        let a = make_cat(c(1.0), CatKind::Even, None).unwrap();
        let b = make_coherent(Complex64::new(0.2, 0.5), None).unwrap();
        let psi = TwoModeState::product(&a, &b);
        let rho = TwoModeDensityMatrix::from_pure(&psi);
        rho.validate().unwrap();
        assert!((rho.purity() - 1.0).abs() < 1e-12);
        assert!((rho.fidelity_with_pure(&psi) - 1.0).abs() < 1e-12);
        let n = b.mean_photon_number();
        assert!((rho.mean_photon_numbers().1 - n).abs() < 1e-12);
    }

    #[test]
    fn index_convention() {
        // |ψ⟩ = (|1,0⟩ + i|0,2⟩)/√2 : ρ_{1 0 0 2} = ⟨1,0|ρ|0,2⟩ = (1/√2)(−i/√2)
        let s = TwoModeState::from_fn(3, |n, m| match (n, m) {
            (1, 0) => c(1.0),
            (0, 2) => Complex64::new(0.0, 1.0),
            _ => c(0.0),
        })
        .normalized()
        .unwrap();
        let rho = TwoModeDensityMatrix::from_pure(&s);
        assert!((rho.get(1, 0, 0, 2) - Complex64::new(0.0, -0.5)).norm() < 1e-15);
        assert!((rho.get(0, 0, 2, 2) - c(0.5)).norm() < 1e-15);
        let grouped = rho.mode_grouped();
        let d = rho.dim();
        assert_eq!(grouped[(d, 2)], rho.get(1, 0, 0, 2));
    }

    #[test]
    fn maximally_mixed_purity() {
        let d = 3usize;
        let rho = TwoModeDensityMatrix::from_fn(d - 1, |n, np, m, mp| {
            if n == np && m == mp {
                c(1.0 / (d * d) as f64)
            } else {
                c(0.0)
            }
        });
        rho.validate().unwrap();
        assert!((rho.purity() - 1.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn partial_traces_of_product() {
        let a = make_cat(c(0.8), CatKind::Odd, None).unwrap();
        let b = make_coherent(c(0.4), Some(a.n_cut())).unwrap();
        let rho = TwoModeDensityMatrix::from_pure(&TwoModeState::product(&a, &b));
        let ra = rho.reduced_first();
        let expected = SingleModeDensity::from_pure(&a.resized(rho.n_cut()));
        assert!((ra.matrix() - expected.matrix()).norm() < 1e-12);
        assert!((rho.reduced_second().purity() - 1.0).abs() < 1e-12);
    }
}
