//! Small dense complex linear algebra helpers.

use crate::{CMat, CVec, HwmError, Result, C64};

pub const I: C64 = C64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli() -> [CMat; 3] {
    let z = C64::new(0.0, 0.0);
    let o = C64::new(1.0, 0.0);
    [
        CMat::from_row_slice(2, 2, &[z, o, o, z]),
        CMat::from_row_slice(2, 2, &[z, -I, I, z]),
        CMat::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

/// `s . sigma` for a complex 3-vector.
pub fn spin_matrix(s: &[C64; 3]) -> CMat {
    let p = pauli();
    &p[0] * s[0] + &p[1] * s[1] + &p[2] * s[2]
}

/// Inverse of [`spin_matrix`]: `s_k = tr(A sigma_k)/2`.
pub fn spin_vector(a: &CMat) -> [C64; 3] {
    let p = pauli();
    let mut s = [C64::new(0.0, 0.0); 3];
    for k in 0..3 {
        s[k] = (a * &p[k]).trace() * 0.5;
    }
    s
}

pub fn frob(m: &CMat) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a, b> = b^* a` (linear in the first slot).
pub fn inner(a: &CVec, b: &CVec) -> C64 {
    b.dotc(a)
}

pub fn outer(a: &CVec, b: &CVec) -> CMat {
    a * b.adjoint()
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}

pub fn singular_values(m: &CMat) -> Vec<f64> {
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

/// 2-norm condition number.
pub fn cond(m: &CMat) -> f64 {
    let s = singular_values(m);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        (Some(_), Some(_)) => f64::INFINITY,
        _ => 1.0,
    }
}

/// General complex eigendecomposition `m = S diag(l) S^{-1}`; columns of `S`
/// are unit vectors.
pub fn eig_general(m: &CMat) -> Result<(Vec<C64>, CMat)> {
    let n = m.nrows();
    if n == 0 {
        return Ok((vec![], CMat::zeros(0, 0)));
    }
    let fm = faer::Mat::<faer::c64>::from_fn(n, n, |i, j| m[(i, j)]);
    let evd = fm
        .eigen()
        .map_err(|e| HwmError::LinAlg(format!("eigendecomposition failed: {e:?}")))?;
    let u = evd.U();
    let s = evd.S();
    let diag = s.column_vector();
    let vals: Vec<C64> = (0..n).map(|i| diag[i]).collect();
    let mut vecs = CMat::from_fn(n, n, |i, j| u[(i, j)]);
    for j in 0..n {
        let nrm = vecs.column(j).norm();
        if nrm > 0.0 {
            vecs.column_mut(j).scale_mut(1.0 / nrm);
        }
    }
    Ok((vals, vecs))
}

/// Solve the Hermitian-definite pencil `A x = l G x` with `G` positive definite.
/// Returns ascending eigenvalues and `G`-orthonormal eigenvectors.
pub fn hermitian_pencil(a: &CMat, g: &CMat) -> Result<(Vec<f64>, CMat)> {
    let n = a.nrows();
    if n == 0 {
        return Ok((vec![], CMat::zeros(0, 0)));
    }
    let chol = g
        .clone()
        .cholesky()
        .ok_or_else(|| HwmError::LinAlg("Gram matrix is not positive definite".into()))?;
    let l = chol.l();
    let linv = l
        .clone()
        .try_inverse()
        .ok_or_else(|| HwmError::LinAlg("singular Cholesky factor".into()))?;
    let mut h = &linv * a * linv.adjoint();
    h = (&h + h.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].partial_cmp(&eig.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let y = CMat::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok((vals, linv.adjoint() * y))
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}
