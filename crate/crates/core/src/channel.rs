//! Choi matrices, positivity checks and state distances.

use nalgebra::{DMatrix, DVector};

use crate::operator::{devectorize, hermitian_part, real, Operator, Superoperator, C64};

/// `C = Σ_ij |i⟩⟨j| ⊗ S(|i⟩⟨j|)`.
pub fn choi_matrix(s: &Superoperator) -> DMatrix<C64> {
    let n = s.hdim();
    let mut c = DMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            let block = s.column_operator(i, j);
            c.view_mut((i * n, j * n), (n, n)).copy_from(&block);
        }
    }
    c
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> DVector<f64> {
    let mut vals: Vec<f64> = hermitian_part(m)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    DVector::from_vec(vals)
}

/// Smallest Choi eigenvalue; nonnegative iff `s` is completely positive.
pub fn min_choi_eigenvalue(s: &Superoperator) -> f64 {
    hermitian_eigenvalues(&choi_matrix(s))[0]
}

/// Smallest eigenvalue of the Choi matrix compressed to the orthogonal
/// complement of the maximally entangled vector. Nonnegative iff `exp(t s)`
/// is completely positive for all `t ≥ 0` (given Hermiticity preservation).
pub fn conditional_cp_min_eigenvalue(s: &Superoperator) -> f64 {
    let n = s.hdim();
    let mut omega = DVector::<C64>::zeros(n * n);
    for i in 0..n {
        omega[i * n + i] = real(1.0 / (n as f64).sqrt());
    }
    let proj = DMatrix::identity(n * n, n * n) - &omega * omega.adjoint();
    let c = choi_matrix(s);
    let compressed = &proj * c * &proj;
    // the compression always has a zero eigenvalue along omega; drop it
    let eig = hermitian_part(&compressed).symmetric_eigen();
    let mut worst = f64::INFINITY;
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        let overlap = (omega.adjoint() * eig.eigenvectors.column(k))[(0, 0)].norm();
        if overlap < 0.5 {
            worst = worst.min(lam);
        }
    }
    if worst.is_finite() {
        worst
    } else {
        0.0
    }
}

/// Kraus operators of a completely positive map from the eigendecomposition
/// of its Choi matrix. Eigenvalues below `tol` (relative) are dropped.
pub fn kraus_from_choi(s: &Superoperator, tol: f64) -> Vec<Operator> {
    let c = hermitian_part(&choi_matrix(s));
    let scale = c.norm().max(f64::MIN_POSITIVE);
    let eig = c.symmetric_eigen();
    let mut out = Vec::new();
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        if lam > tol * scale {
            let v: DVector<C64> = eig.eigenvectors.column(k) * real(lam.sqrt());
            out.push(devectorize(&v).expect("Choi eigenvector has square length"));
        }
    }
    out
}

/// `½‖a − b‖₁` for Hermitian operators.
pub fn trace_distance(a: &Operator, b: &Operator) -> f64 {
    0.5 * hermitian_eigenvalues(&(a - b))
        .iter()
        .map(|x| x.abs())
        .sum::<f64>()
}
