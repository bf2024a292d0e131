//! Dense complex linear-algebra helpers shared by the capacity and precoding
//! code. Everything here sorts spectra in decreasing order.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
    idx
}

/// Singular values of `m`, largest first.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd_unordered(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    sv
}

/// Singular values (largest first) and the matching right singular vectors
/// as the columns of the returned matrix.
pub fn right_singular_pairs(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let svd = m.clone().svd_unordered(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sv: Vec<f64> = svd.singular_values.iter().copied().collect();
    let order = descending_order(&sv);
    let mut v = CMatrix::zeros(m.ncols(), order.len());
    for (col, &k) in order.iter().enumerate() {
        for row in 0..m.ncols() {
            v[(row, col)] = v_t[(k, row)].conj();
        }
    }
    (order.iter().map(|&k| sv[k]).collect(), v)
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues largest first with
/// eigenvectors as columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let eig = m.clone().symmetric_eigen();
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let order = descending_order(&vals);
    let mut vecs = CMatrix::zeros(m.nrows(), order.len());
    for (col, &k) in order.iter().enumerate() {
        vecs.set_column(col, &eig.eigenvectors.column(k));
    }
    (order.iter().map(|&k| vals[k]).collect(), vecs)
}

/// Dominant eigenvector of a Hermitian PSD matrix with the global phase fixed
/// so that its first non-negligible entry is real and positive.
pub fn dominant_eigenvector(m: &CMatrix) -> CVector {
    let n = m.nrows();
    if n == 1 {
        return CVector::from_element(1, Complex64::new(1.0, 0.0));
    }
    let (_, vecs) = hermitian_eigen(m);
    let mut v: CVector = vecs.column(0).into_owned();
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if let Some(pivot) = v.iter().find(|z| z.norm() > 1e-12 * scale).copied() {
        let rot = pivot.conj() / pivot.norm();
        v.iter_mut().for_each(|z| *z *= rot);
    }
    v
}

/// `log2 det(I + gram / noise)` for a Hermitian PSD `gram`.
pub fn log2_det_identity_plus(gram: &CMatrix, noise_power: f64) -> f64 {
    let n = gram.nrows();
    let mut a = gram.map(|z| z / noise_power);
    for i in 0..n {
        a[(i, i)] += Complex64::new(1.0, 0.0);
    }
    match a.clone().cholesky() {
        Some(ch) => {
            let l = ch.l();
            2.0 * (0..n).map(|i| l[(i, i)].re.ln()).sum::<f64>() / std::f64::consts::LN_2
        }
        // Rounding can break positive-definiteness for nearly singular grams;
        // fall back to the eigenvalues.
        None => {
            let (vals, _) = hermitian_eigen(&a);
            vals.iter().map(|v| v.max(f64::MIN_POSITIVE).log2()).sum()
        }
    }
}

pub fn frobenius_norm_sqr(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum()
}
