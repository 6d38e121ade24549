//! Small dense helpers shared by the oracles and the walk analysis.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Eigenvalues in ascending order with matching column eigenvectors.
pub fn hermitian_eigensystem(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = nalgebra::SymmetricEigen::new(m.clone());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(m.nrows(), m.ncols());
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Eigenvalues of a general complex square matrix via complex Schur form.
pub fn complex_eigenvalues(m: &CMatrix) -> Vec<Complex64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let schur = nalgebra::Schur::new(m.clone());
    let (_, t) = schur.unpack();
    (0..t.nrows()).map(|i| t[(i, i)]).collect()
}

pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// `|⟨a|b⟩|²` for normalized inputs.
pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    inner(a, b).norm_sqr()
}

/// Wraps an angle into `(-π, π]`, snapping values within `tol` of `-π` to `π`.
pub fn wrap_phase(theta: f64, tol: f64) -> f64 {
    use std::f64::consts::PI;
    let mut t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t -= 2.0 * PI;
    }
    if (t + PI).abs() < tol {
        t = PI;
    }
    t
}

/// Largest elementwise distance between two phase multisets after sorting.
/// Returns `None` when the multisets have different sizes.
pub fn phase_multiset_distance(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut a: Vec<f64> = a.iter().map(|&t| wrap_phase(t, 1e-7)).collect();
    let mut b: Vec<f64> = b.iter().map(|&t| wrap_phase(t, 1e-7)).collect();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Some(
        a.iter()
            .zip(&b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max),
    )
}

/// Modified Gram-Schmidt: appends `v` to `basis` if its residual norm exceeds `tol`.
pub fn extend_orthonormal(basis: &mut Vec<Vec<Complex64>>, v: &[Complex64], tol: f64) -> bool {
    let mut r = v.to_vec();
    for _ in 0..2 {
        for b in basis.iter() {
            let c = inner(b, &r);
            for (ri, bi) in r.iter_mut().zip(b) {
                *ri -= c * bi;
            }
        }
    }
    let n = norm_sqr(&r).sqrt();
    if n <= tol {
        return false;
    }
    r.iter_mut().for_each(|x| *x /= n);
    basis.push(r);
    true
}
