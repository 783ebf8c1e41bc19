//! Exact evolution of rational data.
//!
//! With `M(t) = Z + tT` acting on coefficient vectors, the positive-frequency
//! part of `V(t) = U(t) - U_inf` is, column by column,
//! `Pi_+ V(t)(x)[:, c] = -sum_j w_j e_j` where `(M(t) - x) w = V0[:, c]`.
//! This is the resolvent formula `(1/2 pi i) I_+[(X^* + tT - x)^{-1} Pi_+ V0]`
//! written in the pole basis: multiplication by `U`, `X^*` and `I_+` all act
//! on each column of a matrix-valued function separately, so the matrix-valued
//! Hardy space splits into `d` copies of the vector-valued one.
//! Diagonalizing `M(t) = S diag(l) S^{-1}` gives poles `l_n` and residues
//! `A_n = (E S[:, n]) (S^{-1} V0)[n, :]`.

use crate::hardy_ops::{build_h1, conserved_traces, lax_spectrum, H1Basis};
use crate::linalg::{c, commutator, cond, eig_general, frob, loglog_slope};
use crate::rational_maps::{energy, hwm_rhs, validate, RationalMap, ResiduePair};
use crate::{CMat, CVec, HwmError, Result, C64, DEFAULT_TOL};
use serde::Serialize;

/// Condition number of the eigenvector matrix above which the rational refit is used.
pub const COND_LIMIT: f64 = 1e10;
/// Eigenvalues of `Z + tT` must satisfy `Im < -INJECTIVITY_TOL`.
pub const INJECTIVITY_TOL: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct Snapshot {
    pub t: f64,
    pub map: RationalMap,
    /// True when the eigenvector matrix was too ill-conditioned and the
    /// residues were refitted from resolvent samples.
    pub fallback: bool,
    pub cond: f64,
}

pub fn flow_matrix(basis: &H1Basis, t: f64) -> CMat {
    &basis.zmat + &basis.t * c(t, 0.0)
}

fn target_of(basis: &H1Basis) -> Result<crate::rational_maps::GrassmannTarget> {
    crate::rational_maps::GrassmannTarget::new(basis.u_inf.clone())
}

pub fn evolve(basis: &H1Basis, t: f64) -> Result<Snapshot> {
    let target = target_of(basis)?;
    if basis.is_empty() {
        return Ok(Snapshot { t, map: RationalMap::constant(target), fallback: false, cond: 1.0 });
    }
    let m = flow_matrix(basis, t);
    let (vals, s) = eig_general(&m)?;
    for l in &vals {
        if l.im >= -INJECTIVITY_TOL {
            return Err(HwmError::LaxInjectivity { t, lambda: format!("{l}") });
        }
    }
    let k = cond(&s);
    let residues = if k > COND_LIMIT {
        refit_residues(basis, t, &vals)?
    } else {
        let sinv = s
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| HwmError::LinAlg("eigenvector matrix is singular".into()))?;
        let r = &sinv * &basis.v0;
        let e = basis.e_matrix();
        (0..basis.n)
            .map(|n| {
                let en = &e * s.column(n);
                let xi = CVec::from_fn(basis.d, |col, _| r[(n, col)].conj());
                ResiduePair::from_factors(vals[n], en, xi)
            })
            .collect()
    };
    let map = RationalMap::new(target, residues)?.sorted();
    Ok(Snapshot { t, map, fallback: k > COND_LIMIT, cond: k })
}

/// Evolution that always takes the fallback path: poles from the eigenvalues of
/// `Z + tT`, residues by least squares on resolvent samples.
pub fn evolve_refit(basis: &H1Basis, t: f64) -> Result<Snapshot> {
    let target = target_of(basis)?;
    if basis.is_empty() {
        return Ok(Snapshot { t, map: RationalMap::constant(target), fallback: true, cond: 1.0 });
    }
    let (vals, s) = eig_general(&flow_matrix(basis, t))?;
    let residues = refit_residues(basis, t, &vals)?;
    let map = RationalMap::new(target, residues)?.sorted();
    Ok(Snapshot { t, map, fallback: true, cond: cond(&s) })
}

/// `Pi_+ V(t)(x)` from one linear solve; `x` may be complex off the poles.
pub fn positive_part(basis: &H1Basis, t: f64, x: C64) -> Result<CMat> {
    let n = basis.n;
    let m = flow_matrix(basis, t) - CMat::identity(n, n) * x;
    let w = m
        .lu()
        .solve(&basis.v0)
        .ok_or_else(|| HwmError::LinAlg(format!("Z + tT - x is singular at t = {t}, x = {x}")))?;
    Ok(-(basis.e_matrix() * w))
}

/// `U(t, x)` by a resolvent solve, without diagonalizing.
pub fn evaluate_flow(basis: &H1Basis, t: f64, x: f64) -> Result<CMat> {
    if basis.is_empty() {
        return Ok(basis.u_inf.clone());
    }
    let p = positive_part(basis, t, c(x, 0.0))?;
    Ok(&basis.u_inf + &p + p.adjoint())
}

fn refit_residues(basis: &H1Basis, t: f64, poles: &[C64]) -> Result<Vec<ResiduePair>> {
    let n = poles.len();
    let d = basis.d;
    let mut xs = vec![];
    for z in poles {
        for k in [-4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0] {
            xs.push(z.re + k * z.im.abs());
        }
    }
    let rows = xs.len();
    let phi = CMat::from_fn(rows, n, |i, j| c(1.0, 0.0) / (c(xs[i], 0.0) - poles[j]));
    let mut y = CMat::zeros(rows, d * d);
    for (i, &x) in xs.iter().enumerate() {
        let p = positive_part(basis, t, c(x, 0.0))?;
        for a in 0..d {
            for b in 0..d {
                y[(i, a * d + b)] = p[(a, b)];
            }
        }
    }
    let svd = phi.svd(true, true);
    let coef = svd
        .solve(&y, 1e-14)
        .map_err(|e| HwmError::LinAlg(format!("least-squares refit failed: {e}")))?;
    let mut out = vec![];
    for j in 0..n {
        let a = CMat::from_fn(d, d, |r, col| coef[(j, r * d + col)]);
        // nearest rank-one factor through the dominant column: e ~ A[:, c], xi = A^* e
        let best = (0..d)
            .max_by(|&p, &q| a.column(p).norm().partial_cmp(&a.column(q).norm()).unwrap())
            .unwrap();
        let col = a.column(best).into_owned();
        let e = &col / c(col.norm(), 0.0);
        let xi = a.adjoint() * &e;
        out.push(ResiduePair::from_factors(poles[j], e, xi));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub t: f64,
    pub constraint_residual: f64,
    pub spectrum: Vec<f64>,
    pub i2: f64,
    pub i4: f64,
    pub energy: f64,
    pub min_im_pole: Option<f64>,
    pub fallback: bool,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub initial: RationalMap,
    pub basis: H1Basis,
    pub times: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    pub diagnostics: Vec<Diagnostics>,
}

pub fn diagnose(s: &Snapshot) -> Result<Diagnostics> {
    let rep = validate(&s.map, DEFAULT_TOL);
    let b = build_h1(&s.map);
    let spec = lax_spectrum(&b)?;
    let tr = conserved_traces(&b, &[2.0, 4.0])?;
    Ok(Diagnostics {
        t: s.t,
        constraint_residual: rep.unitarity.max(rep.hermiticity).max(rep.nilpotency).max(rep.constraint),
        spectrum: spec.eigenvalues,
        i2: tr[0],
        i4: tr[1],
        energy: energy(&s.map),
        min_im_pole: s.map.poles().iter().map(|z| z.im).reduce(f64::max),
        fallback: s.fallback,
    })
}

pub fn trajectory(initial: &RationalMap, times: &[f64]) -> Result<Trajectory> {
    let basis = build_h1(initial);
    let mut snapshots = vec![];
    let mut diagnostics = vec![];
    for &t in times {
        let s = evolve(&basis, t)?;
        diagnostics.push(diagnose(&s)?);
        snapshots.push(s);
    }
    Ok(Trajectory { initial: initial.clone(), basis, times: times.to_vec(), snapshots, diagnostics })
}

#[derive(Clone, Debug, Serialize)]
pub struct DriftRow {
    pub t: f64,
    pub spectrum: f64,
    pub i2: f64,
    pub i4: f64,
    pub energy: f64,
}

/// Deviation of spectrum, traces and energy of each snapshot from the initial data.
pub fn conservation_report(traj: &Trajectory) -> Result<Vec<DriftRow>> {
    if traj.initial.n() == 0 {
        return Ok(vec![]);
    }
    let s0 = Snapshot { t: 0.0, map: traj.initial.clone(), fallback: false, cond: 1.0 };
    let d0 = diagnose(&s0)?;
    Ok(traj
        .diagnostics
        .iter()
        .map(|d| {
            let spectrum = if d.spectrum.len() == d0.spectrum.len() {
                d.spectrum.iter().zip(&d0.spectrum).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            } else {
                f64::INFINITY
            };
            DriftRow {
                t: d.t,
                spectrum,
                i2: (d.i2 - d0.i2).abs(),
                i4: (d.i4 - d0.i4).abs(),
                energy: (d.energy - d0.energy).abs(),
            }
        })
        .collect())
}

/// Default finite-difference step `1e-3 max(1, |t|)`.
pub fn default_h(t: f64) -> f64 {
    1e-3 * t.abs().max(1.0)
}

/// Max over the grid of `|(U(t+h) - U(t-h))/2h + (i/2)[U, |D|U]|_F`.
pub fn pde_residual(basis: &H1Basis, t: f64, h: f64, grid: &[f64]) -> Result<f64> {
    let plus = evolve(basis, t + h)?.map;
    let minus = evolve(basis, t - h)?.map;
    let now = evolve(basis, t)?.map;
    let mut worst: f64 = 0.0;
    for &x in grid {
        let dt = (plus.eval(x) - minus.eval(x)) / c(2.0 * h, 0.0);
        worst = worst.max(frob(&(dt - hwm_rhs(&now, x))));
    }
    Ok(worst)
}

/// Residuals for each step and the fitted convergence order.
pub fn pde_residual_order(basis: &H1Basis, t: f64, hs: &[f64], grid: &[f64]) -> Result<(Vec<f64>, f64)> {
    let res = hs.iter().map(|&h| pde_residual(basis, t, h, grid)).collect::<Result<Vec<_>>>()?;
    let order = loglog_slope(hs, &res);
    Ok((res, order))
}

/// For each pole in `from`, the index of the nearest pole in `to`; errors
/// when the nearest match is not clearly better than the runner-up.
pub fn match_poles(from: &[C64], to: &[C64]) -> Result<Vec<usize>> {
    if from.len() != to.len() {
        return Err(HwmError::Matching(format!("{} poles vs {}", from.len(), to.len())));
    }
    let mut out = vec![];
    for (i, a) in from.iter().enumerate() {
        let mut d: Vec<(f64, usize)> = to.iter().enumerate().map(|(j, b)| ((a - b).norm(), j)).collect();
        d.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        if d.len() > 1 && d[0].0 > 0.5 * d[1].0 {
            return Err(HwmError::Matching(format!("pole {i} at {a} has two candidates")));
        }
        out.push(d[0].1);
    }
    let mut seen = out.clone();
    seen.sort();
    seen.dedup();
    if seen.len() != out.len() {
        return Err(HwmError::Matching("matching is not one-to-one".into()));
    }
    Ok(out)
}

/// Max over poles of `|dA_n/dt - sum_{m != n} [A_n, A_m]/(z_n - z_m)^2|_F`,
/// with `dA_n/dt` from a central difference of step `h`.
pub fn residue_dynamics_check(basis: &H1Basis, t: f64, h: f64) -> Result<f64> {
    let now = evolve(basis, t)?.map;
    let plus = evolve(basis, t + h)?.map;
    let minus = evolve(basis, t - h)?.map;
    let zp = match_poles(&now.poles(), &plus.poles())?;
    let zm = match_poles(&now.poles(), &minus.poles())?;
    let r = &now.residues;
    let mut worst: f64 = 0.0;
    for n in 0..r.len() {
        let da = (&plus.residues[zp[n]].a - &minus.residues[zm[n]].a) / c(2.0 * h, 0.0);
        let mut rhs = CMat::zeros(now.d(), now.d());
        for m in 0..r.len() {
            if m != n {
                let dz = r[n].z - r[m].z;
                rhs += commutator(&r[n].a, &r[m].a) / (dz * dz);
            }
        }
        worst = worst.max(frob(&(da - rhs)));
    }
    Ok(worst)
}

/// Max over the grid of `|U_R(-t, x) - (-U(t, -x))|_F`, where `U_R` evolves the
/// reflected data `-U_0(-x)`.
pub fn time_reversal_defect(initial: &RationalMap, t: f64, grid: &[f64]) -> Result<f64> {
    let fwd = evolve(&build_h1(initial), t)?.map;
    let back = evolve(&build_h1(&initial.reflect()), -t)?.map;
    Ok(grid.iter().map(|&x| frob(&(back.eval(x) + fwd.eval(-x)))).fold(0.0, f64::max))
}
