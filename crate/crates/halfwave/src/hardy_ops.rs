//! The invariant Hardy subspace spanned by `f_j = e_j/(x - z_j)` and the
//! matrices of the Lax operator `T`, the shift generator `X^*`, the Gram form and `I_+`.
//!
//! Coefficient vectors `a` stand for `sum_j a_j f_j`. The Gram matrix is
//! stored as `G[(k, j)] = <f_j, f_k>_{L^2}`, so `<a, b>_G = b^* G a`.

use crate::linalg::{c, eig_general, hermitian_pencil, inner};
use crate::rational_maps::{b_matrix, RationalMap};
use crate::{CMat, CVec, HwmError, Result, C64};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// `E = ENERGY_PER_TRACE * tr K`: calibrated on the ground-state soliton
/// (`E = (1 - v^2) pi`, `tr K = 1 - v^2`) and checked against quadrature on random maps.
pub const ENERGY_PER_TRACE: f64 = PI;

#[derive(Clone, Debug)]
pub struct H1Basis {
    pub n: usize,
    pub d: usize,
    pub z: Vec<C64>,
    pub e: Vec<CVec>,
    pub xi: Vec<CVec>,
    /// Lax operator, column `j` is the image of `f_j`.
    pub t: CMat,
    /// `diag(z_j)`.
    pub zmat: CMat,
    pub g: CMat,
    /// `N x d`; column `c` holds the coefficients of column `c` of `sum_j A_j/(x - z_j)`.
    pub v0: CMat,
    pub u_inf: CMat,
}

impl H1Basis {
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `<a, b>_G`.
    pub fn g_inner(&self, a: &CVec, b: &CVec) -> C64 {
        b.dotc(&(&self.g * a))
    }

    pub fn g_norm(&self, a: &CVec) -> f64 {
        self.g_inner(a, a).re.max(0.0).sqrt()
    }

    /// `d x N` matrix with columns `e_j`.
    pub fn e_matrix(&self) -> CMat {
        CMat::from_fn(self.d, self.n, |r, j| self.e[j][r])
    }
}

pub fn build_h1(map: &RationalMap) -> H1Basis {
    let n = map.n();
    let d = map.d();
    let z: Vec<C64> = map.poles();
    let e: Vec<CVec> = map.residues.iter().map(|r| r.e.clone()).collect();
    let xi: Vec<CVec> = map.residues.iter().map(|r| r.xi.clone()).collect();
    let v0 = CMat::from_fn(n, d, |j, col| xi[j][col].conj());
    H1Basis {
        n,
        d,
        t: toeplitz_matrix(map),
        zmat: CMat::from_diagonal(&CVec::from_vec(z.clone())),
        g: gram_matrix(&z, &e),
        z,
        e,
        xi,
        v0,
        u_inf: map.target.u_inf.clone(),
    }
}

/// `T_jj = <B_j e_j, e_j>`, `T_kj = <e_j, xi_k>/(z_k - z_j)`.
pub fn toeplitz_matrix(map: &RationalMap) -> CMat {
    let n = map.n();
    let r = &map.residues;
    CMat::from_fn(n, n, |k, j| {
        if k == j {
            inner(&(b_matrix(map, j) * &r[j].e), &r[j].e)
        } else {
            inner(&r[j].e, &r[k].xi) / (r[k].z - r[j].z)
        }
    })
}

/// `G[(k, j)] = <f_j, f_k> = 2 pi i <e_j, e_k>/(conj z_k - z_j)`.
pub fn gram_matrix(z: &[C64], e: &[CVec]) -> CMat {
    let n = z.len();
    CMat::from_fn(n, n, |k, j| c(0.0, 2.0 * PI) * inner(&e[j], &e[k]) / (z[k].conj() - z[j]))
}

/// `I_+(sum a_j f_j) = -2 pi i sum a_j e_j`.
pub fn iplus(basis: &H1Basis, a: &CVec) -> CVec {
    let mut out = CVec::zeros(basis.d);
    for j in 0..basis.n {
        out += &basis.e[j] * a[j];
    }
    out * c(0.0, -2.0 * PI)
}

/// Evaluate `sum_j a_j e_j/(z - z_j)` at any `z` off the poles.
pub fn eval_coeffs(basis: &H1Basis, a: &CVec, z: C64) -> CVec {
    let mut out = CVec::zeros(basis.d);
    for j in 0..basis.n {
        out += &basis.e[j] * (a[j] / (z - basis.z[j]));
    }
    out
}

/// Eigenpairs of `T` as a self-adjoint operator for `<.,.>_G`: ascending
/// eigenvalues and `G`-orthonormal eigenvectors (largest coefficient real positive).
pub fn lax_eigenpairs(basis: &H1Basis) -> Result<(Vec<f64>, CMat)> {
    let gt = &basis.g * &basis.t;
    let sym = (&gt + gt.adjoint()) * c(0.5, 0.0);
    let (vals, mut vecs) = hermitian_pencil(&sym, &basis.g)?;
    for j in 0..basis.n {
        let col = vecs.column(j).into_owned();
        let big = col.iter().copied().fold(c(0.0, 0.0), |a, b| if b.norm() > a.norm() { b } else { a });
        if big.norm() > 0.0 {
            let ph = big.conj() / big.norm();
            for r in 0..basis.n {
                vecs[(r, j)] *= ph;
            }
        }
    }
    Ok((vals, vecs))
}

#[derive(Clone, Debug, Serialize)]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    /// Eigenvalues of `T` pairwise distinct.
    pub simple: bool,
    /// Smallest gap between eigenvalues of `T^2`; absent for `N <= 1`.
    pub min_gap: Option<f64>,
    /// Smallest gap between eigenvalues of `T`.
    pub min_gap_t: Option<f64>,
    /// Eigenvalues of `T^2` pairwise distinct (no pair `lambda`, `-lambda`).
    pub simple_squared: bool,
    /// Discriminant of the characteristic polynomial of `1 - T^2`, from power traces.
    pub discriminant: f64,
    /// Largest imaginary part among eigenvalues of the non-Hermitian matrix `T`.
    pub max_imag: f64,
    pub traces: BTreeMap<String, f64>,
}

/// Relative threshold on eigenvalue gaps for declaring a spectrum simple.
pub const SIMPLICITY_TOL: f64 = 1e-6;

pub fn lax_spectrum(basis: &H1Basis) -> Result<SpectralReport> {
    let mut traces = BTreeMap::new();
    if basis.is_empty() {
        traces.insert("2".into(), 0.0);
        traces.insert("4".into(), 0.0);
        return Ok(SpectralReport {
            eigenvalues: vec![],
            simple: true,
            min_gap: None,
            min_gap_t: None,
            simple_squared: true,
            discriminant: 1.0,
            max_imag: 0.0,
            traces,
        });
    }
    let (vals, _) = lax_eigenpairs(basis)?;
    let (raw, _) = eig_general(&basis.t)?;
    let max_imag = raw.iter().map(|l| l.im.abs()).fold(0.0, f64::max);
    if max_imag > 1e-8 * (1.0 + raw.iter().map(|l| l.norm()).fold(0.0, f64::max)) {
        return Err(HwmError::LinAlg(format!("Lax matrix has non-real eigenvalue (|Im| = {max_imag:.2e})")));
    }
    let gap = |mut v: Vec<f64>| {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let g = v.windows(2).map(|w| w[1] - w[0]).reduce(f64::min);
        let spread = v[v.len() - 1] - v[0];
        (g, g.map_or(true, |g| g > SIMPLICITY_TOL * spread.max(1.0)))
    };
    let (min_gap, simple_squared) = gap(vals.iter().map(|v| v * v).collect());
    let (min_gap_t, simple) = gap(vals.clone());
    let ip = conserved_traces(basis, &[2.0, 4.0])?;
    traces.insert("2".into(), ip[0]);
    traces.insert("4".into(), ip[1]);
    Ok(SpectralReport {
        eigenvalues: vals,
        simple,
        min_gap,
        min_gap_t,
        simple_squared,
        discriminant: discriminant_from_traces(&basis.t),
        max_imag,
        traces,
    })
}

/// Discriminant of the characteristic polynomial of `K = 1 - T^2`, as the
/// determinant of the Hankel matrix of power traces `tr K^(i+j)`.
pub fn discriminant_from_traces(t: &CMat) -> f64 {
    let n = t.nrows();
    let k = CMat::identity(n, n) - t * t;
    let mut p = vec![c(n as f64, 0.0)];
    let mut pow = CMat::identity(n, n);
    for _ in 1..(2 * n - 1) {
        pow = &pow * &k;
        p.push(pow.trace());
    }
    let h = CMat::from_fn(n, n, |i, j| p[i + j]);
    h.determinant().re
}

/// `I_p = sum mu^(p/2)` over eigenvalues `mu` of `1 - T^2` restricted to the subspace.
pub fn conserved_traces(basis: &H1Basis, ps: &[f64]) -> Result<Vec<f64>> {
    if basis.is_empty() {
        return Ok(vec![0.0; ps.len()]);
    }
    let (vals, _) = lax_eigenpairs(basis)?;
    let mu: Vec<f64> = vals.iter().map(|l| 1.0 - l * l).collect();
    if let Some(bad) = mu.iter().find(|&&m| m < -1e-9) {
        return Err(HwmError::InvalidInput(format!("1 - T^2 has negative eigenvalue {bad:.3e}")));
    }
    Ok(ps.iter().map(|&p| mu.iter().map(|m| m.max(0.0).powf(p / 2.0)).sum()).collect())
}

/// Largest violation of `(z_k - z_j) T_kj = <e_j, xi_k>` together with `<e_j, xi_j> = 0`.
pub fn commutator_defect(basis: &H1Basis) -> f64 {
    let mut worst: f64 = 0.0;
    for k in 0..basis.n {
        for j in 0..basis.n {
            let rhs = inner(&basis.e[j], &basis.xi[k]);
            let lhs = if j == k { c(0.0, 0.0) } else { (basis.z[k] - basis.z[j]) * basis.t[(k, j)] };
            worst = worst.max((lhs - rhs).norm());
        }
    }
    worst
}

/// `|GT - (GT)^*|_F`.
pub fn self_adjointness_defect(basis: &H1Basis) -> f64 {
    let gt = &basis.g * &basis.t;
    crate::linalg::frob(&(&gt - gt.adjoint()))
}
