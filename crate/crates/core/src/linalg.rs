//! Dense complex helpers: matrix exponential and unitarity checks.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

fn one_norm(m: &CMatrix) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring with a Taylor core.
///
/// The argument is scaled by 2⁻ˢ until its 1-norm is ≤ ½, the Taylor
/// series is summed until terms drop below machine precision relative to
/// the partial sum, and the result is squared s times.
pub fn expm(a: &CMatrix) -> CMatrix {
    assert!(a.is_square(), "expm needs a square matrix");
    let n = a.nrows();
    let norm = one_norm(a);
    let mut squarings = 0u32;
    if norm > 0.5 {
        squarings = (norm / 0.5).log2().ceil() as u32;
    }
    let scaled = a * Complex64::new(0.5f64.powi(squarings as i32), 0.0);

    let mut result = CMatrix::identity(n, n);
    let mut term = CMatrix::identity(n, n);
    for k in 1..=40 {
        term = &term * &scaled * Complex64::new(1.0 / k as f64, 0.0);
        result += &term;
        if one_norm(&term) < 1e-18 * one_norm(&result) {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// max |(U†U − I)ᵢⱼ|
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    let n = u.ncols();
    let gram = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_generator_exponentiates_to_rotation() {
        let t = 1.234;
        let g = CMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(0.0, 0.0),
                Complex64::new(-t, 0.0),
                Complex64::new(t, 0.0),
                Complex64::new(0.0, 0.0),
            ],
        );
        let r = expm(&g);
        assert!((r[(0, 0)].re - t.cos()).abs() < 1e-14);
        assert!((r[(0, 1)].re + t.sin()).abs() < 1e-14);
        assert!((r[(1, 0)].re - t.sin()).abs() < 1e-14);
    }

    #[test]
    fn diagonal_and_large_norm() {
        let d = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            Complex64::new(3.0, 0.5),
            Complex64::new(-7.0, 2.0),
            Complex64::new(0.0, 11.0),
        ]));
        let e = expm(&d);
        for i in 0..3 {
            let expected = d[(i, i)].exp();
            assert!((e[(i, i)] - expected).norm() < 1e-12 * expected.norm().max(1.0));
        }
    }

    #[test]
    fn anti_hermitian_generator_gives_unitary() {
        let n = 12;
        let mut g = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..i {
                let z = Complex64::new((i * 7 + j) as f64 * 0.1 % 1.3, (i + 3 * j) as f64 * 0.07 % 0.9);
                g[(i, j)] = z;
                g[(j, i)] = -z.conj();
            }
            g[(i, i)] = Complex64::new(0.0, i as f64 * 0.3);
        }
        let u = expm(&(g * Complex64::new(4.0, 0.0)));
        assert!(unitarity_defect(&u) < 1e-12);
    }
}
