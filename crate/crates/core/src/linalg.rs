//! Dense helpers shared across modules.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// `max |A − A†|` entrywise.
pub fn hermitian_residual(a: &CMatrix) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// `(A + A†) / 2`.
pub fn hermitize(a: &CMatrix) -> CMatrix {
    (a + a.adjoint()).scale(0.5)
}

pub fn is_real(a: &CMatrix) -> bool {
    a.iter().all(|z| z.im == 0.0)
}

pub fn real_part(a: &CMatrix) -> DMatrix<f64> {
    a.map(|z| z.re)
}

pub fn all_finite(a: &CMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Ascending eigenvalues of a Hermitian matrix; real input takes the real solver.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let mut values: Vec<f64> = if is_real(a) {
        real_part(a).symmetric_eigenvalues().iter().copied().collect()
    } else {
        a.clone().symmetric_eigenvalues().iter().copied().collect()
    };
    values.sort_by(f64::total_cmp);
    values
}

/// Eigenpairs sorted by ascending eigenvalue.
pub fn hermitian_eigen(a: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = a.nrows();
    let (values, vectors): (Vec<f64>, CMatrix) = if is_real(a) {
        let e = SymmetricEigen::new(real_part(a));
        (
            e.eigenvalues.iter().copied().collect(),
            e.eigenvectors.map(|x| c(x, 0.0)),
        )
    } else {
        let e = SymmetricEigen::new(a.clone());
        (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
    };
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let sorted_values = order.iter().map(|&i| values[i]).collect();
    let sorted_vectors = CMatrix::from_fn(n, n, |r, k| vectors[(r, order[k])]);
    (sorted_values, sorted_vectors)
}

/// `|a − b| ≤ tol · max(|a|, |b|, 1)`.
pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_and_orthonormal() {
        let a = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.5, 0.0), c(0.0, 0.5), c(0.0, -0.5), c(0.5, 0.0)],
        );
        let (vals, vecs) = hermitian_eigen(&a);
        assert!((vals[0] - 0.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
        let gram = vecs.adjoint() * &vecs;
        assert!((gram - CMatrix::identity(2, 2)).camax() < 1e-14);
    }
}
