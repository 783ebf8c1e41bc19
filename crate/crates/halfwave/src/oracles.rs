//! Brute-force numerical cross-checks: frequency-side quadrature of Sobolev
//! seminorms, spatial quadrature of Fourier transforms, an FFT half-derivative,
//! and a finite section of the Toeplitz/Hankel operators in the Cayley basis
//! `phi_k = (x - i)^k / (sqrt(pi) (x + i)^(k+1))`.
//!
//! Everything here is slow on purpose and only used by tests and `check full`.

use crate::linalg::{c, I};
use crate::rational_maps::{PoleExpansion, RationalMap};
use crate::{CMat, HwmError, Result, C64};
use quadrature::double_exponential::integrate;
use rustfft::FftPlanner;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
}

/// Split `[a, b]` into panels no wider than `w` and integrate each with tanh-sinh.
fn panel_integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, w: f64, tol: f64) -> QuadResult {
    let k = (((b - a) / w).ceil() as usize).max(1);
    let h = (b - a) / k as f64;
    let mut value = 0.0;
    let mut err = 0.0;
    for i in 0..k {
        let lo = a + i as f64 * h;
        let out = integrate(&f, lo, lo + h, tol / k as f64);
        value += out.integral;
        err += out.error_estimate;
    }
    QuadResult { value, error_estimate: err }
}

/// `| |D|^s V |_{L^2}` by quadrature of `2 pi int_0^Xi xi^(2s) |sum_n A_n e^(-i xi z_n)|_F^2 dxi`
/// with `Xi = 40 / min delta_n`, plus an analytic bound on the tail (added to the estimate).
pub fn quadrature_seminorm(exp: &PoleExpansion, s: f64) -> Result<QuadResult> {
    if !(s > 0.0) {
        return Err(HwmError::InvalidInput(format!("seminorm order must be positive, got {s}")));
    }
    if exp.terms.is_empty() {
        return Ok(QuadResult { value: 0.0, error_estimate: 0.0 });
    }
    let dmin = exp.terms.iter().map(|(z, _)| -z.im).fold(f64::INFINITY, f64::min);
    if !(dmin > 0.0) {
        return Err(HwmError::InvalidInput("poles must lie in the lower half-plane".into()));
    }
    let xmax = 40.0 / dmin;
    let spread = exp
        .terms
        .iter()
        .flat_map(|(a, _)| exp.terms.iter().map(move |(b, _)| (a.re - b.re).abs()))
        .fold(0.0, f64::max);
    let width = (PI / spread.max(1e-300)).min(xmax / 8.0).max(xmax / 20000.0);
    let f = |xi: f64| {
        if xi <= 0.0 {
            return 0.0;
        }
        let mut acc = CMat::zeros(exp.terms[0].1.nrows(), exp.terms[0].1.ncols());
        for (z, a) in &exp.terms {
            acc += a * (-I * xi * z).exp();
        }
        xi.powf(2.0 * s) * acc.iter().map(|v| v.norm_sqr()).sum::<f64>()
    };
    let q = panel_integrate(f, 0.0, xmax, width, 1e-14);
    let mass: f64 = exp.terms.iter().map(|(_, a)| crate::linalg::frob(a)).sum();
    let a = 2.0 * s + 1.0;
    let rate = 2.0 * dmin;
    let tail = mass * mass * statrs::function::gamma::gamma(a) * statrs::function::gamma::gamma_ur(a, rate * xmax)
        / rate.powf(a);
    let sq = 2.0 * PI * q.value;
    let value = sq.max(0.0).sqrt();
    let sq_err = 2.0 * PI * (q.error_estimate + tail);
    Ok(QuadResult { value, error_estimate: sq_err / (2.0 * value.max(1e-300)) })
}

#[derive(Clone, Debug)]
pub struct FourierProbe {
    pub value: CMat,
    pub error_estimate: f64,
}

/// `int f(x) e^(-i xi x) dx` for the analytic part `f = sum_n A_n/(x - z_n)` of
/// an expansion (conjugate terms excluded), by spatial quadrature after two
/// integrations by parts: `f^(xi) = -xi^-2 int f''(x) e^(-i xi x) dx`.
pub fn fourier_probe(exp: &PoleExpansion, xi: f64, tol: f64) -> Result<FourierProbe> {
    if xi == 0.0 || !xi.is_finite() {
        return Err(HwmError::InvalidInput("probe frequency must be finite and nonzero".into()));
    }
    let d = exp.terms.first().map_or(1, |t| t.1.nrows());
    let mut value = CMat::zeros(d, d);
    let mut err = 0.0;
    for (z, a) in &exp.terms {
        let (j, e) = third_power_transform(*z, xi, crate::linalg::frob(a), tol)?;
        value += a * (-j / (xi * xi));
        err += e * crate::linalg::frob(a) / (xi * xi);
    }
    Ok(FourierProbe { value, error_estimate: err })
}

/// `int_R 2 (x - z)^-3 e^(-i xi x) dx` on a truncated line, with panels that
/// grow away from `Re z` and resolve the oscillation.
fn third_power_transform(z: C64, xi: f64, scale: f64, tol: f64) -> Result<(C64, f64)> {
    let delta = -z.im;
    if !(delta > 0.0) {
        return Err(HwmError::InvalidInput("pole must lie in the lower half-plane".into()));
    }
    // |tail| <= 2 int_L^inf r^-3 = L^-2 on each side
    let l = (2.0 * scale.max(1.0) / (tol * xi * xi)).sqrt().max(50.0 * delta) + z.re.abs();
    let osc = PI / xi.abs();
    let g = |x: f64| {
        let w = c(x, 0.0) - z;
        c(2.0, 0.0) / (w * w * w) * (-I * xi * x).exp()
    };
    let mut knots = vec![z.re];
    let mut r = 0.0;
    while r < l {
        let step = (0.25 * delta).max(r / 4.0).min(osc);
        r = (r + step).min(l);
        knots.push(z.re + r);
        knots.insert(0, z.re - r);
    }
    let mut re = 0.0;
    let mut im = 0.0;
    let mut err = 2.0 / (l * l);
    let per = tol / knots.len() as f64;
    for w in knots.windows(2) {
        let a = integrate(|x| g(x).re, w[0], w[1], per);
        let b = integrate(|x| g(x).im, w[0], w[1], per);
        re += a.integral;
        im += b.integral;
        err += a.error_estimate + b.error_estimate;
    }
    Ok((c(re, im), err))
}

/// `f^(0+)` of the analytic part by Richardson extrapolation of probes at `h, 2h`.
pub fn fourier_probe_zero_plus(exp: &PoleExpansion, h: f64, tol: f64) -> Result<FourierProbe> {
    let a = fourier_probe(exp, h, tol)?;
    let b = fourier_probe(exp, 2.0 * h, tol)?;
    Ok(FourierProbe {
        value: &a.value * c(2.0, 0.0) - &b.value,
        error_estimate: 2.0 * a.error_estimate + b.error_estimate,
    })
}

/// `|D|(U - U_inf)` at the points `at` by an FFT multiplier on a periodic grid of
/// `n` points over `[-l, l)`; every point of `at` must lie on the grid.
pub fn fft_half_derivative(map: &RationalMap, l: f64, n: usize, at: &[f64]) -> Result<Vec<CMat>> {
    let d = map.d();
    let h = 2.0 * l / n as f64;
    let idx: Vec<usize> = at
        .iter()
        .map(|&x| {
            let k = ((x + l) / h).round();
            if (x + l - k * h).abs() > 1e-9 * h.max(1.0) || k < 0.0 || k >= n as f64 {
                Err(HwmError::InvalidInput(format!("point {x} is not on the sampling grid")))
            } else {
                Ok(k as usize)
            }
        })
        .collect::<Result<_>>()?;
    let exp = map.expansion();
    let samples: Vec<CMat> = (0..n).map(|k| exp.eval(-l + k as f64 * h, d)).collect();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut out = vec![CMat::zeros(d, d); at.len()];
    for r in 0..d {
        for col in 0..d {
            let mut buf: Vec<C64> = samples.iter().map(|m| m[(r, col)]).collect();
            fwd.process(&mut buf);
            for (m, v) in buf.iter_mut().enumerate() {
                let freq = if m <= n / 2 { m as f64 } else { m as f64 - n as f64 };
                *v *= (2.0 * PI * freq / (2.0 * l)).abs() / n as f64;
            }
            inv.process(&mut buf);
            for (o, &k) in out.iter_mut().zip(&idx) {
                o[(r, col)] = buf[k];
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct CayleyConfig {
    /// Basis functions per component of `C^d`.
    pub m: usize,
    /// Samples on the circle, as a multiple of `m`.
    pub oversample: usize,
    /// Relative threshold for nonzero eigenvalues of the Hankel square.
    pub rank_tol: f64,
}

impl CayleyConfig {
    pub fn new(m: usize) -> Self {
        CayleyConfig { m, oversample: 8, rank_tol: 1e-9 }
    }
}

#[derive(Clone, Debug)]
pub struct CayleyReport {
    pub m: usize,
    /// Finite section of the Toeplitz operator, indices `(k, component)` flattened as `k d + c`.
    pub toeplitz: CMat,
    /// Number of nonzero eigenvalues of the finite-section Hankel square.
    pub rank: usize,
    /// Eigenvalues of the Toeplitz section compressed onto the range of the Hankel square.
    pub interior_eigenvalues: Vec<f64>,
    /// Trace of the Hankel square, the finite-section estimate of `tr(1 - T^2)`.
    pub trace_k: f64,
}

/// Fourier coefficients `c_m`, `|m| <= 2M`, of `U(x(theta))` with `x = -cot(theta/2)`.
fn circle_coefficients(map: &RationalMap, cfg: &CayleyConfig) -> Vec<CMat> {
    let d = map.d();
    let l = cfg.oversample.max(4) * cfg.m;
    let samples: Vec<CMat> = (0..l)
        .map(|k| {
            if k == 0 {
                map.target.u_inf.clone()
            } else {
                let th = 2.0 * PI * k as f64 / l as f64;
                map.eval(-1.0 / (th / 2.0).tan())
            }
        })
        .collect();
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(l);
    let mut coef = vec![CMat::zeros(d, d); l];
    for r in 0..d {
        for col in 0..d {
            let mut buf: Vec<C64> = samples.iter().map(|m| m[(r, col)]).collect();
            fft.process(&mut buf);
            for (m, v) in buf.iter().enumerate() {
                coef[m][(r, col)] = v / l as f64;
            }
        }
    }
    coef
}

pub fn cayley_toeplitz(map: &RationalMap, cfg: &CayleyConfig) -> Result<CayleyReport> {
    let d = map.d();
    let m = cfg.m;
    if m == 0 {
        return Err(HwmError::InvalidInput("Cayley truncation must be positive".into()));
    }
    let coef = circle_coefficients(map, cfg);
    let l = coef.len() as isize;
    let cm = |k: isize| &coef[k.rem_euclid(l) as usize];
    let dim = d * m;
    // <U phi_a e_c, phi_b e_r> = c_{b-a}[r][c]
    let toeplitz = CMat::from_fn(dim, dim, |row, col| {
        let (b, r) = (row / d, row % d);
        let (a, cc) = (col / d, col % d);
        cm(b as isize - a as isize)[(r, cc)]
    });
    // coefficient on phi_{-(b+1)}
    let hankel = CMat::from_fn(dim, dim, |row, col| {
        let (b, r) = (row / d, row % d);
        let (a, cc) = (col / d, col % d);
        cm(-(a as isize + b as isize + 1))[(r, cc)]
    });
    let k = hankel.adjoint() * &hankel;
    let k = (&k + k.adjoint()) * c(0.5, 0.0);
    let eig = k.symmetric_eigen();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].partial_cmp(&eig.eigenvalues[i]).unwrap());
    let top = eig.eigenvalues[order[0]].max(1.0);
    let rank = order.iter().filter(|&&i| eig.eigenvalues[i] > cfg.rank_tol * top).count();
    let trace_k = eig.eigenvalues.iter().sum();
    let p = CMat::from_fn(dim, rank, |r, j| eig.eigenvectors[(r, order[j])]);
    let comp = p.adjoint() * &toeplitz * &p;
    let comp = (&comp + comp.adjoint()) * c(0.5, 0.0);
    let mut interior: Vec<f64> = comp.symmetric_eigen().eigenvalues.iter().copied().collect();
    interior.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(CayleyReport { m, toeplitz, rank, interior_eigenvalues: interior, trace_k })
}

#[derive(Clone, Debug)]
pub struct CayleyConvergence {
    pub coarse: CayleyReport,
    pub fine: CayleyReport,
    /// Largest eigenvalue change between `M` and `2M`.
    pub change: f64,
}

/// Run the discretization at `M` and `2M`; errors if the ranks disagree.
pub fn cayley_converged(map: &RationalMap, m: usize) -> Result<CayleyConvergence> {
    let coarse = cayley_toeplitz(map, &CayleyConfig::new(m))?;
    let fine = cayley_toeplitz(map, &CayleyConfig::new(2 * m))?;
    if coarse.rank != fine.rank {
        return Err(HwmError::LinAlg(format!(
            "Cayley discretization not converged: rank {} at M = {m}, {} at M = {}",
            coarse.rank,
            fine.rank,
            2 * m
        )));
    }
    let change = coarse
        .interior_eigenvalues
        .iter()
        .zip(&fine.interior_eigenvalues)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(CayleyConvergence { coarse, fine, change })
}
