//! Small dense helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[inline]
pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Eigen-decomposition of a Hermitian matrix with eigenvalues ascending.
/// Columns of the returned matrix are the matching eigenvectors.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMatrix::zeros(0, 0));
    }
    // Symmetrize so round-off asymmetry never leaks into the solver.
    let h = (m + m.adjoint()).scale(0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

/// Real symmetric counterpart of [`hermitian_eigen`].
pub fn symmetric_eigen(m: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), DMatrix::zeros(0, 0));
    }
    let h = (m + m.transpose()).scale(0.5);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, col| eig.eigenvectors[(r, order[col])]);
    (values, vectors)
}

/// Largest entry magnitude.
pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `max |[a, b]|` over entries.
pub fn commutator_norm(a: &CMatrix, b: &CMatrix) -> f64 {
    max_abs(&(a * b - b * a))
}

/// `max |m − m†|` over entries.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    max_abs(&(m - m.adjoint()))
}

pub fn trace_re(m: &CMatrix) -> f64 {
    m.trace().re
}

/// Promotes a real matrix.
pub fn complexify(m: &DMatrix<f64>) -> CMatrix {
    m.map(c)
}

/// `Σ_k t_k 1 ⊗ … ⊗ local ⊗ … ⊗ 1` on `sites` sites of local dimension `d`,
/// with site 0 as the least significant digit of the row/column index.
pub fn sum_of_local(local: &CMatrix, sites: usize) -> CMatrix {
    let d = local.nrows();
    let dim = d.pow(sites as u32);
    let mut out = CMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut stride = 1;
        for _ in 0..sites {
            let a = (col / stride) % d;
            for a2 in 0..d {
                let v = local[(a2, a)];
                if v != Complex64::new(0.0, 0.0) {
                    let row = col + a2 * stride - a * stride;
                    out[(row, col)] += v;
                }
            }
            stride *= d;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_and_orthonormal() {
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[
                c(2.0),
                Complex64::new(0.0, 1.0),
                c(0.0),
                Complex64::new(0.0, -1.0),
                c(2.0),
                c(0.5),
                c(0.0),
                c(0.5),
                c(-1.0),
            ],
        );
        let (vals, vecs) = hermitian_eigen(&m);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        let recon =
            &vecs * CMatrix::from_diagonal(&CVector::from_iterator(3, vals.iter().map(|&v| c(v)))) * vecs.adjoint();
        assert!(max_abs(&(recon - &m)) < 1e-12);
    }

    #[test]
    fn sum_of_local_matches_kronecker() {
        let sz = CMatrix::from_diagonal(&CVector::from_vec(vec![c(-1.0), c(0.0), c(1.0)]));
        let id = CMatrix::identity(3, 3);
        let expected = sz.kronecker(&id) + id.kronecker(&sz);
        assert!(max_abs(&(sum_of_local(&sz, 2) - expected)) < 1e-15);
    }
}
