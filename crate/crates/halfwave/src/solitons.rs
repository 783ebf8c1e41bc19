//! Travelling solitary waves, well-separated multi-soliton data and the
//! large-time decomposition of a solution into receding solitary waves.

use crate::flow::{evolve, match_poles};
use crate::hardy_ops::{iplus, lax_eigenpairs, lax_spectrum, H1Basis};
use crate::linalg::{c, frob, spin_matrix, I};
use crate::rational_maps::{
    pauli_encode, solitary_residual, sobolev_seminorm, validation_grid, GrassmannTarget, PoleExpansion,
    RationalMap, ResiduePair, SphereComponents,
};
use crate::{CMat, CVec, HwmError, Result, C64};
use std::collections::BTreeMap;
use std::f64::consts::PI;

#[derive(Clone, Debug)]
pub struct SolitonDatum {
    pub v: f64,
    pub y: f64,
    pub delta: f64,
    pub a: CMat,
    pub profile: RationalMap,
}

type Spin = [C64; 3];

fn dot(a: &Spin, b: &Spin) -> C64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn conj3(a: &Spin) -> Spin {
    a.map(|v| v.conj())
}

/// Null direction `n1 + i n2` with `n1 = e1`, `n2 = n_v x e1 = (0, v, -sqrt(1-v^2))`
/// and `n_v = (0, sqrt(1-v^2), v)`.
pub fn null_direction(v: f64) -> Spin {
    let r = (1.0 - v * v).sqrt();
    [c(1.0, 0.0), c(0.0, v), c(0.0, -r)]
}

/// Solve `s . (m + conj(s)/(z - conj z)) = 0` for `s = sigma * xi` with `xi . xi = 0`.
/// Since `xi . conj(xi) = 2` this is linear in `conj(sigma)`.
fn spin_scalar(xi: &Spin, m: &Spin, z: C64) -> C64 {
    let xm = dot(xi, m);
    -(xm * (z - z.conj()) / 2.0).conj()
}

/// Ground-state profile `q = e3 + s/(x - z) + conj(s)/(x - conj z)`, `z = y - i delta`,
/// with the spin scalar obtained from the pointwise constraint `|q| = 1`.
pub fn single_soliton(v: f64, y: f64, delta: f64) -> Result<SolitonDatum> {
    if !(v.abs() < 1.0) {
        return Err(HwmError::InvalidInput(format!("velocity must satisfy |v| < 1, got {v}")));
    }
    if !(delta > 0.0) {
        return Err(HwmError::InvalidInput(format!("depth must be positive, got {delta}")));
    }
    let xi = null_direction(v);
    let z = c(y, -delta);
    let e3 = [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
    let sigma = spin_scalar(&xi, &e3, z);
    let s = xi.map(|x| x * sigma);
    let sphere = pauli_encode(&SphereComponents { u_inf: [0.0, 0.0, 1.0], spins: vec![(z, s)] })?;
    Ok(SolitonDatum { v, y, delta, a: spin_matrix(&s), profile: sphere.map })
}

#[derive(Clone, Debug)]
pub struct MultiSoliton {
    pub map: RationalMap,
    pub spins: Vec<Spin>,
    pub iterations: usize,
    pub warnings: Vec<String>,
}

/// Default factor in the admission rule `min |z_j - z_k| >= factor * max_j 1/(1 - v_j^2)`.
pub const ADMISSION_FACTOR: f64 = 50.0;

/// Minimum pole separation admitted by [`multi_soliton`].
pub fn admission_separation(vs: &[f64], factor: f64) -> f64 {
    factor * vs.iter().map(|v| 1.0 / (1.0 - v * v)).fold(0.0, f64::max)
}

/// Sphere map with poles `z_j` (`Im z_j = -1`) whose spin vectors stay in the
/// fixed null directions of the single solitons of speeds `v_j`; the scalars
/// are found by fixed-point iteration on the residue constraints.
pub fn multi_soliton(vs: &[f64], zs: &[C64]) -> Result<MultiSoliton> {
    multi_soliton_with(vs, zs, ADMISSION_FACTOR)
}

/// [`multi_soliton`] with a configurable admission factor.
pub fn multi_soliton_with(vs: &[f64], zs: &[C64], admission_factor: f64) -> Result<MultiSoliton> {
    let n = vs.len();
    if n == 0 || zs.len() != n {
        return Err(HwmError::InvalidInput("need equally many velocities and poles (at least one)".into()));
    }
    for (v, z) in vs.iter().zip(zs) {
        if !(v.abs() < 1.0) {
            return Err(HwmError::InvalidInput(format!("velocity must satisfy |v| < 1, got {v}")));
        }
        if (z.im + 1.0).abs() > 1e-12 {
            return Err(HwmError::InvalidInput(format!("poles must have Im z = -1, got {z}")));
        }
    }
    let need = admission_separation(vs, admission_factor);
    for i in 0..n {
        for j in i + 1..n {
            let sep = (zs[i] - zs[j]).norm();
            if sep < need {
                return Err(HwmError::NonConvergence {
                    i,
                    j,
                    eps: 1.0 / sep,
                    reason: format!("separation {sep:.3} below admission threshold {need:.3}"),
                });
            }
        }
    }
    let mut warnings = vec![];
    for i in 0..n {
        for j in i + 1..n {
            if (vs[i] - vs[j]).abs() < 1e-12 {
                warnings.push(format!("velocities {i} and {j} coincide: spectrum may be degenerate"));
            }
        }
    }
    let xis: Vec<Spin> = vs.iter().map(|&v| null_direction(v)).collect();
    let e3 = [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
    let mut sig: Vec<C64> = (0..n).map(|j| spin_scalar(&xis[j], &e3, zs[j])).collect();
    let mut iterations = 0;
    let mut converged = false;
    while iterations < 200 {
        iterations += 1;
        let spins: Vec<Spin> = (0..n).map(|k| xis[k].map(|x| x * sig[k])).collect();
        let next: Vec<C64> = (0..n)
            .map(|j| {
                let mut m = e3;
                for k in 0..n {
                    if k == j {
                        continue;
                    }
                    let a = c(1.0, 0.0) / (zs[j] - zs[k]);
                    let b = c(1.0, 0.0) / (zs[j] - zs[k].conj());
                    let sk = &spins[k];
                    let skc = conj3(sk);
                    for q in 0..3 {
                        m[q] += sk[q] * a + skc[q] * b;
                    }
                }
                spin_scalar(&xis[j], &m, zs[j])
            })
            .collect();
        let diff = next.iter().zip(&sig).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        sig = next;
        if diff <= 1e-12 {
            converged = true;
            break;
        }
    }
    if !converged {
        let (mut bi, mut bj, mut best) = (0, 1.min(n - 1), f64::INFINITY);
        for i in 0..n {
            for j in i + 1..n {
                let s = (zs[i] - zs[j]).norm();
                if s < best {
                    (bi, bj, best) = (i, j, s);
                }
            }
        }
        return Err(HwmError::NonConvergence {
            i: bi,
            j: bj,
            eps: 1.0 / best,
            reason: "no convergence in 200 iterations".into(),
        });
    }
    let spins: Vec<Spin> = (0..n).map(|k| xis[k].map(|x| x * sig[k])).collect();
    let sphere = pauli_encode(&SphereComponents {
        u_inf: [0.0, 0.0, 1.0],
        spins: zs.iter().copied().zip(spins.iter().copied()).collect(),
    })?;
    Ok(MultiSoliton { map: sphere.map.sorted(), spins, iterations, warnings })
}

#[derive(Clone, Debug)]
pub struct ConvergenceRow {
    pub t: f64,
    pub sup: f64,
    pub hs: BTreeMap<String, f64>,
}

#[derive(Clone, Debug)]
pub struct ResolutionReport {
    pub solitons: Vec<SolitonDatum>,
    pub w: Vec<C64>,
    /// `| |I_+ phi_n|^2 - 4 pi delta_n |` for each soliton.
    pub iplus_defect: Vec<f64>,
    pub convergence: Vec<ConvergenceRow>,
}

/// Decompose data with simple Lax spectrum into solitary waves: for each
/// `G`-normalized eigenvector `phi_n` of `T`, `w_n = <Z phi_n, phi_n>_G` gives
/// centre and depth, and the residue is `I_+(phi_n) alpha_n^T / (-2 pi i)`
/// with `alpha_{n,c} = <V0[:, c], phi_n>_G`.
pub fn resolve(basis: &H1Basis) -> Result<ResolutionReport> {
    let target = GrassmannTarget::new(basis.u_inf.clone())?;
    if basis.is_empty() {
        return Ok(ResolutionReport { solitons: vec![], w: vec![], iplus_defect: vec![], convergence: vec![] });
    }
    let spec = lax_spectrum(basis)?;
    if !spec.simple {
        return Err(HwmError::DegenerateSpectrum(spec.min_gap_t.unwrap_or(0.0)));
    }
    let (vals, phi) = lax_eigenpairs(basis)?;
    let mut solitons = vec![];
    let mut ws = vec![];
    let mut defects = vec![];
    for n in 0..basis.n {
        let p: CVec = phi.column(n).into_owned();
        let w = basis.g_inner(&(&basis.zmat * &p), &p);
        let delta = -w.im;
        if !(delta > 0.0) {
            return Err(HwmError::LinAlg(format!("resolved depth {delta} is not positive")));
        }
        let ip = iplus(basis, &p);
        defects.push((ip.norm_squared() - 4.0 * PI * delta).abs());
        let alpha = CVec::from_fn(basis.d, |col, _| basis.g_inner(&basis.v0.column(col).into_owned(), &p));
        let e = &ip / c(0.0, -2.0 * PI);
        let pair = ResiduePair::from_factors(w, e, alpha.map(|a| a.conj()));
        let a = pair.a.clone();
        let profile = RationalMap::new(target.clone(), vec![pair])?;
        solitons.push(SolitonDatum { v: vals[n], y: w.re, delta, a, profile });
        ws.push(w);
    }
    Ok(ResolutionReport { solitons, w: ws, iplus_defect: defects, convergence: vec![] })
}

/// Pole expansion of `sum_n (Q_n(x - v_n t) - U_inf)`.
pub fn asymptotic_expansion(report: &ResolutionReport, t: f64) -> PoleExpansion {
    PoleExpansion {
        terms: report
            .solitons
            .iter()
            .map(|s| (c(s.y + s.v * t, -s.delta), s.a.clone()))
            .collect(),
    }
}

/// Distance between `U(t)` and the sum of receding solitary waves, in sup norm
/// on a grid and in `H^s` seminorms of the exact pole expansion of the difference.
pub fn resolution_error(basis: &H1Basis, report: &ResolutionReport, t: f64, s_list: &[f64]) -> Result<ConvergenceRow> {
    let snap = evolve(basis, t)?.map;
    let asym = asymptotic_expansion(report, t);
    match_poles(&snap.poles(), &asym.poles())?;
    let diff = snap.expansion().minus(&asym);
    let mut poles = snap.poles();
    poles.extend(asym.poles());
    let sup = diff.sup_norm(&validation_grid(&poles), basis.d);
    let mut hs = BTreeMap::new();
    for &s in s_list {
        hs.insert(format!("{s}"), sobolev_seminorm(&diff, s)?);
    }
    Ok(ConvergenceRow { t, sup, hs })
}

/// Solitary-wave profiles read off a snapshot at time `t`: pole `z_n(t) - v_n t`
/// and residue `A_n(t)`, ordered like `report.solitons`.
pub fn profiles_at(basis: &H1Basis, report: &ResolutionReport, t: f64) -> Result<Vec<(C64, CMat)>> {
    let snap = evolve(basis, t)?.map;
    let asym = asymptotic_expansion(report, t);
    let m = match_poles(&asym.poles(), &snap.poles())?;
    Ok(report
        .solitons
        .iter()
        .enumerate()
        .map(|(n, s)| {
            let r = &snap.residues[m[n]];
            (r.z - s.v * t, r.a.clone())
        })
        .collect())
}

/// Largest difference between the profiles read off at `+t` and at `-t`.
pub fn scattering_defect(basis: &H1Basis, report: &ResolutionReport, t: f64) -> Result<f64> {
    let p = profiles_at(basis, report, t)?;
    let q = profiles_at(basis, report, -t)?;
    Ok(p.iter()
        .zip(&q)
        .map(|((z1, a1), (z2, a2))| (z1 - z2).norm() + frob(&(a1 - a2)))
        .fold(0.0, f64::max))
}

/// `max_x |-2iv Q' - [Q, |D|Q]|_F`.
pub fn check_solitary(profile: &RationalMap, v: f64, grid: &[f64]) -> f64 {
    solitary_residual(profile, v, grid)
}

/// Closed-form candidates `sqrt(1-v^2) (n1 + i n2)` and `i sqrt(1-v^2) (n1 + i n2)`
/// for the unit-depth spin vector.
pub fn printed_spin_candidates(v: f64) -> [Spin; 2] {
    let r = (1.0 - v * v).sqrt();
    let xi = null_direction(v);
    [xi.map(|x| x * r), xi.map(|x| x * I * r)]
}

/// Index of the closed-form candidate matched by a constructed soliton (after
/// scaling out the depth), if any.
pub fn printed_variant(datum: &SolitonDatum) -> Option<usize> {
    let s = crate::linalg::spin_vector(&datum.a).map(|x| x / datum.delta);
    printed_spin_candidates(datum.v).iter().position(|cand| {
        cand.iter().zip(&s).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max) < 1e-12
    })
}
