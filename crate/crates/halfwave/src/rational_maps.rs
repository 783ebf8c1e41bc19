//! Rational Grassmannian-valued maps in simple-pole form and their closed-form calculus.

use crate::linalg::{c, frob, outer, pauli, spin_matrix, spin_vector, I};
use crate::poly::{sylvester_gap, Poly};
use crate::{CMat, CVec, HwmError, Result, C64, DEFAULT_TOL, POLE_COLLISION_TOL};
use std::f64::consts::PI;

/// Threshold above which a component of `e` fixes the phase gauge.
const GAUGE_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct GrassmannTarget {
    pub d: usize,
    pub k: usize,
    pub u_inf: CMat,
}

impl GrassmannTarget {
    /// Checks hermiticity, `U^2 = 1` and reads `k` off the trace.
    pub fn new(u_inf: CMat) -> Result<Self> {
        let d = u_inf.nrows();
        if d == 0 || u_inf.ncols() != d {
            return Err(HwmError::InvalidInput("U_inf must be a non-empty square matrix".into()));
        }
        let herm = frob(&(&u_inf - u_inf.adjoint()));
        let invol = frob(&(&u_inf * &u_inf - CMat::identity(d, d)));
        if herm > 1e-8 || invol > 1e-8 {
            return Err(HwmError::InvalidInput(format!(
                "U_inf is not a Grassmannian point (|U-U*| = {herm:.2e}, |U^2-1| = {invol:.2e})"
            )));
        }
        let tr = u_inf.trace().re;
        let k = ((d as f64 - tr) / 2.0).round();
        if (tr - (d as f64 - 2.0 * k)).abs() > 1e-8 || k < 0.0 || k > d as f64 {
            return Err(HwmError::InvalidInput(format!("trace {tr} is not of the form d - 2k")));
        }
        Ok(GrassmannTarget { d, k: k as usize, u_inf })
    }

    /// `diag(1, ..., 1, -1, ..., -1)` with `k` negative entries.
    pub fn standard(d: usize, k: usize) -> Result<Self> {
        if k > d || d == 0 {
            return Err(HwmError::InvalidInput(format!("need 0 <= k <= d, d >= 1 (d={d}, k={k})")));
        }
        let u = CMat::from_fn(d, d, |i, j| {
            if i != j {
                c(0.0, 0.0)
            } else if i < d - k {
                c(1.0, 0.0)
            } else {
                c(-1.0, 0.0)
            }
        });
        GrassmannTarget::new(u)
    }

    pub fn sigma3() -> Self {
        GrassmannTarget::new(pauli()[2].clone()).expect("sigma3 is a Grassmannian point")
    }
}

/// One simple pole `z` in the lower half-plane with residue `A = e xi^*`.
#[derive(Clone, Debug)]
pub struct ResiduePair {
    pub z: C64,
    pub a: CMat,
    pub e: CVec,
    pub xi: CVec,
}

impl ResiduePair {
    /// Factor a rank-one nilpotent residue.
    pub fn new(z: C64, a: CMat) -> Result<Self> {
        let (e, xi) = rank1_factor(&a)?;
        Ok(ResiduePair { z, a, e, xi })
    }

    /// Build from an unnormalized factorization `A = e xi^*`.
    pub fn from_factors(z: C64, e: CVec, xi: CVec) -> Self {
        let (e, xi) = gauge(e, xi);
        let a = outer(&e, &xi);
        ResiduePair { z, a, e, xi }
    }
}

fn gauge(e: CVec, xi: CVec) -> (CVec, CVec) {
    let n = e.norm();
    let mut e = e / c(n, 0.0);
    let mut xi = xi * c(n, 0.0);
    if let Some(p) = e.iter().find(|v| v.norm() > GAUGE_TOL).copied() {
        let ph = p.conj() / p.norm();
        e *= ph;
        xi *= ph;
    }
    (e, xi)
}

/// Rank-one factorization `A = e xi^*` with `|e| = 1` in canonical gauge.
pub fn rank1_factor(a: &CMat) -> Result<(CVec, CVec)> {
    let svd = a.clone().svd(true, true);
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[j].partial_cmp(&svd.singular_values[i]).unwrap());
    let s1 = svd.singular_values[idx[0]];
    let s2 = idx.get(1).map_or(0.0, |&i| svd.singular_values[i]);
    if s1 <= DEFAULT_TOL || s2 > 1e-8 * s1.max(1.0) {
        return Err(HwmError::RankNotOne { s1, s2 });
    }
    let a2 = frob(&(a * a));
    if a2 > 1e-8 * (s1 * s1).max(1.0) {
        return Err(HwmError::NotNilpotent(a2));
    }
    let u = svd.u.as_ref().expect("u requested").column(idx[0]).into_owned();
    let v = svd.v_t.as_ref().expect("v_t requested").row(idx[0]).adjoint();
    Ok(gauge(u, v * c(s1, 0.0)))
}

/// A finite sum `sum_n A_n/(x - z_n) + h.c.` with `Im z_n < 0`, vanishing at infinity.
#[derive(Clone, Debug, Default)]
pub struct PoleExpansion {
    pub terms: Vec<(C64, CMat)>,
}

impl PoleExpansion {
    pub fn eval(&self, x: f64, d: usize) -> CMat {
        let mut out = CMat::zeros(d, d);
        for (z, a) in &self.terms {
            let p = a / (c(x, 0.0) - z);
            out += &p + p.adjoint();
        }
        out
    }

    /// Expansion of `self - other`.
    pub fn minus(&self, other: &PoleExpansion) -> PoleExpansion {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|(z, a)| (*z, -a)));
        PoleExpansion { terms }
    }

    pub fn poles(&self) -> Vec<C64> {
        self.terms.iter().map(|t| t.0).collect()
    }

    pub fn sup_norm(&self, grid: &[f64], d: usize) -> f64 {
        grid.iter().map(|&x| frob(&self.eval(x, d))).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct RationalMap {
    pub target: GrassmannTarget,
    pub residues: Vec<ResiduePair>,
}

impl RationalMap {
    pub fn constant(target: GrassmannTarget) -> Self {
        RationalMap { target, residues: vec![] }
    }

    /// Checks that poles lie in the lower half-plane and are pairwise distinct.
    pub fn new(target: GrassmannTarget, residues: Vec<ResiduePair>) -> Result<Self> {
        for r in &residues {
            if !(r.z.im < 0.0) {
                return Err(HwmError::InvalidInput(format!("pole {} is not in the lower half-plane", r.z)));
            }
            if r.a.nrows() != target.d || r.a.ncols() != target.d {
                return Err(HwmError::InvalidInput("residue dimension mismatch".into()));
            }
        }
        for i in 0..residues.len() {
            for j in i + 1..residues.len() {
                let dist = (residues[i].z - residues[j].z).norm();
                if dist <= POLE_COLLISION_TOL {
                    return Err(HwmError::PoleCollision { i, j, dist });
                }
            }
        }
        Ok(RationalMap { target, residues })
    }

    pub fn from_poles(target: GrassmannTarget, poles: Vec<(C64, CMat)>) -> Result<Self> {
        let residues = poles
            .into_iter()
            .map(|(z, a)| ResiduePair::new(z, a))
            .collect::<Result<Vec<_>>>()?;
        RationalMap::new(target, residues)
    }

    pub fn d(&self) -> usize {
        self.target.d
    }

    pub fn n(&self) -> usize {
        self.residues.len()
    }

    pub fn poles(&self) -> Vec<C64> {
        self.residues.iter().map(|r| r.z).collect()
    }

    pub fn expansion(&self) -> PoleExpansion {
        PoleExpansion { terms: self.residues.iter().map(|r| (r.z, r.a.clone())).collect() }
    }

    /// `U(x)`.
    pub fn eval(&self, x: f64) -> CMat {
        &self.target.u_inf + self.expansion().eval(x, self.d())
    }

    /// `U'(x)`.
    pub fn derivative(&self, x: f64) -> CMat {
        let mut out = CMat::zeros(self.d(), self.d());
        for r in &self.residues {
            let w = c(x, 0.0) - r.z;
            let p = &r.a / (w * w);
            out -= &p + p.adjoint();
        }
        out
    }

    /// Residues sorted by `(Re z, Im z)`.
    pub fn sorted(mut self) -> Self {
        self.residues.sort_by(|a, b| {
            (a.z.re, a.z.im).partial_cmp(&(b.z.re, b.z.im)).unwrap_or(std::cmp::Ordering::Equal)
        });
        self
    }

    /// The map `x -> -U(-x)`.
    pub fn reflect(&self) -> Self {
        let u_inf = -&self.target.u_inf;
        let target = GrassmannTarget { d: self.d(), k: self.d() - self.target.k, u_inf };
        let residues = self
            .residues
            .iter()
            .map(|r| ResiduePair::from_factors(-r.z.conj(), r.xi.clone(), r.e.clone()))
            .collect();
        RationalMap { target, residues }.sorted()
    }

    /// The map `x -> U(x - shift)`.
    pub fn translate(&self, shift: f64) -> Self {
        let mut out = self.clone();
        for r in &mut out.residues {
            r.z += shift;
        }
        out
    }
}

/// Validation grid: uniform on `[-L, L]` with `L = 10 (1 + max |Re z|)` plus
/// points clustered around each pole.
pub fn validation_grid(poles: &[C64]) -> Vec<f64> {
    let max_re = poles.iter().map(|z| z.re.abs()).fold(0.0, f64::max);
    let l = 10.0 * (1.0 + max_re);
    let m = 400;
    let mut g: Vec<f64> = (0..=m).map(|i| -l + 2.0 * l * i as f64 / m as f64).collect();
    for z in poles {
        for k in [0.0, 0.5, 1.0, 2.0] {
            g.push(z.re + k * z.im.abs());
            g.push(z.re - k * z.im.abs());
        }
    }
    g.sort_by(|a, b| a.partial_cmp(b).unwrap());
    g.dedup();
    g
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub tol: f64,
    pub unitarity: f64,
    pub hermiticity: f64,
    pub nilpotency: f64,
    pub constraint: f64,
    pub trace_deviation: f64,
    pub violations: Vec<String>,
}

/// `B_j = U_inf + sum_{k != j} A_k/(z_j - z_k) + sum_k A_k^*/(z_j - conj z_k)`.
pub fn b_matrix(map: &RationalMap, j: usize) -> CMat {
    let zj = map.residues[j].z;
    let mut b = map.target.u_inf.clone();
    for (k, r) in map.residues.iter().enumerate() {
        if k != j {
            b += &r.a / (zj - r.z);
        }
        b += r.a.adjoint() / (zj - r.z.conj());
    }
    b
}

pub fn validate(map: &RationalMap, tol: f64) -> ValidationReport {
    let d = map.d();
    let id = CMat::identity(d, d);
    let mut unitarity: f64 = 0.0;
    let mut hermiticity: f64 = 0.0;
    for x in validation_grid(&map.poles()) {
        let u = map.eval(x);
        unitarity = unitarity.max(frob(&(&u * &u - &id)));
        hermiticity = hermiticity.max(frob(&(&u - u.adjoint())));
    }
    let mut nilpotency: f64 = 0.0;
    let mut constraint: f64 = 0.0;
    for (j, r) in map.residues.iter().enumerate() {
        nilpotency = nilpotency.max(frob(&(&r.a * &r.a)));
        let b = b_matrix(map, j);
        constraint = constraint.max(frob(&(&b * &r.a + &r.a * &b)));
    }
    let trace_deviation = (map.target.u_inf.trace() - c(d as f64 - 2.0 * map.target.k as f64, 0.0)).norm();
    let mut violations = vec![];
    for (name, v) in [
        ("U^2 = 1 on grid", unitarity),
        ("U = U^* on grid", hermiticity),
        ("A_j^2 = 0", nilpotency),
        ("B_j A_j + A_j B_j = 0", constraint),
        ("tr U_inf = d - 2k", trace_deviation),
    ] {
        if !(v <= tol) {
            violations.push(format!("{name}: residual {v:.3e} > {tol:.1e}"));
        }
    }
    ValidationReport {
        pass: violations.is_empty(),
        tol,
        unitarity,
        hermiticity,
        nilpotency,
        constraint,
        trace_deviation,
        violations,
    }
}

/// Sphere-valued map `u = u_inf + sum s_j/(x - z_j) + conj(s_j)/(x - conj z_j)`.
#[derive(Clone, Debug)]
pub struct SphereMap {
    pub map: RationalMap,
}

/// Component form of a sphere map: the value at infinity and complex spin vectors.
#[derive(Clone, Debug)]
pub struct SphereComponents {
    pub u_inf: [f64; 3],
    pub spins: Vec<(C64, [C64; 3])>,
}

impl SphereComponents {
    pub fn eval(&self, x: f64) -> [f64; 3] {
        let mut u = self.u_inf;
        for (z, s) in &self.spins {
            let w = c(x, 0.0) - z;
            for k in 0..3 {
                u[k] += 2.0 * (s[k] / w).re;
            }
        }
        u
    }
}

impl SphereMap {
    pub fn new(map: RationalMap) -> Result<Self> {
        if map.d() != 2 || map.target.k != 1 {
            return Err(HwmError::InvalidInput("sphere maps have d = 2, k = 1".into()));
        }
        Ok(SphereMap { map })
    }

    /// `u_k(x) = tr(U(x) sigma_k)/2`.
    pub fn components_at(&self, x: f64) -> [f64; 3] {
        let u = self.map.eval(x);
        let p = pauli();
        [0, 1, 2].map(|k| 0.5 * (&u * &p[k]).trace().re)
    }
}

pub fn pauli_encode(u: &SphereComponents) -> Result<SphereMap> {
    let n = u.u_inf.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (n - 1.0).abs() > 1e-9 {
        return Err(HwmError::InvalidInput(format!("|u_inf| = {n} is not 1")));
    }
    let u_inf = spin_matrix(&u.u_inf.map(|v| c(v, 0.0)));
    let poles = u.spins.iter().map(|(z, s)| (*z, spin_matrix(s))).collect();
    let map = RationalMap::from_poles(GrassmannTarget::new(u_inf)?, poles)?;
    let rep = validate(&map, DEFAULT_TOL);
    if rep.unitarity > 1e-6 {
        return Err(HwmError::InvalidInput(format!("|u| != 1 on the grid (residual {:.2e})", rep.unitarity)));
    }
    SphereMap::new(map)
}

pub fn pauli_decode(map: &SphereMap) -> SphereComponents {
    let s_inf = spin_vector(&map.map.target.u_inf);
    SphereComponents {
        u_inf: s_inf.map(|v| v.re),
        spins: map.map.residues.iter().map(|r| (r.z, spin_vector(&r.a))).collect(),
    }
}

/// Grassmannian map `U = 1 - 2 w w~^T / D` with `D = sum_c w_c w~_c`, where
/// `w~` has conjugated coefficients. Requires the zeros of `D` to be simple.
pub fn from_projector(w: &[Poly]) -> Result<RationalMap> {
    let d = w.len();
    let n = w.iter().map(|p| p.degree()).max().unwrap_or(0);
    let wt: Vec<Poly> = w.iter().map(|p| p.conj_coeffs()).collect();
    let mut den = Poly::new(vec![c(0.0, 0.0)]);
    for (a, b) in w.iter().zip(&wt) {
        den = den.add(&a.mul(b));
    }
    let lead = CVec::from_fn(d, |i, _| w[i].coeffs.get(n).copied().unwrap_or_default());
    if lead.norm() == 0.0 {
        return Err(HwmError::InvalidInput("all polynomials vanish".into()));
    }
    let u_inf = CMat::identity(d, d) - outer(&lead, &lead) * c(2.0 / lead.norm_squared(), 0.0);
    let target = GrassmannTarget::new(u_inf)?;
    if n == 0 {
        return Ok(RationalMap::constant(target));
    }
    let roots = den.roots()?;
    let scale = roots.iter().map(|r| r.norm()).fold(1.0, f64::max);
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            if (roots[i] - roots[j]).norm() < 1e-6 * scale {
                return Err(HwmError::RepeatedZero(format!("{}", roots[i])));
            }
        }
    }
    let lower: Vec<C64> = roots.into_iter().filter(|r| r.im < 0.0).collect();
    if lower.len() != n {
        return Err(HwmError::InvalidInput(format!(
            "expected {n} zeros of the denominator in the lower half-plane, found {}",
            lower.len()
        )));
    }
    let dd = den.derivative();
    let mut residues = vec![];
    for z in lower {
        let wz = CVec::from_fn(d, |i, _| w[i].eval(z));
        let wtz = CVec::from_fn(d, |i, _| wt[i].eval(z));
        let scale = c(-2.0, 0.0) / dd.eval(z);
        // A = -2 w(z) w~(z)^T / D'(z) = e xi^* with xi = conj(w~(z)).
        residues.push(ResiduePair::from_factors(z, wz * scale, wtz.map(|v| v.conj())));
    }
    Ok(RationalMap::new(target, residues)?.sorted())
}

/// Inverse stereographic projection of `R = P/Q`:
/// `u1 + i u2 = 2R/(|R|^2 + 1)`, `u3 = (|R|^2 - 1)/(|R|^2 + 1)`.
/// Returns the map and its predicted rank `deg P`.
pub fn from_stereographic(p: &Poly, q: &Poly) -> Result<(SphereMap, usize)> {
    let n = p.degree();
    if n == 0 || p.is_zero() {
        return Err(HwmError::InvalidInput("deg P must be at least 1".into()));
    }
    if q.is_zero() || q.degree() >= n {
        return Err(HwmError::InvalidInput("need Q != 0 and deg Q <= deg P - 1".into()));
    }
    let gap = sylvester_gap(p, q);
    if gap < 1e-10 {
        return Err(HwmError::CommonFactor(gap));
    }
    let map = from_projector(&[q.clone(), p.scale(c(-1.0, 0.0))])?;
    Ok((SphereMap::new(map)?, n))
}

/// Number of lower half-plane poles, i.e. the rank of the Hankel square `K`.
pub fn kronecker_rank(map: &RationalMap) -> usize {
    map.n()
}

/// `|D|U` in closed form: residues `iA_j` at double poles `z_j`, plus conjugates.
#[derive(Clone, Debug)]
pub struct HalfDerivativeRep {
    pub d: usize,
    pub terms: Vec<(C64, CMat)>,
}

impl HalfDerivativeRep {
    pub fn eval(&self, x: f64) -> CMat {
        let mut out = CMat::zeros(self.d, self.d);
        for (z, b) in &self.terms {
            let w = c(x, 0.0) - z;
            let p = b / (w * w);
            out += &p + p.adjoint();
        }
        out
    }
}

pub fn apply_half_d(map: &RationalMap) -> HalfDerivativeRep {
    HalfDerivativeRep {
        d: map.d(),
        terms: map.residues.iter().map(|r| (r.z, &r.a * I)).collect(),
    }
}

/// `-(i/2)[U, |D|U]` at `x`.
pub fn hwm_rhs(map: &RationalMap, x: f64) -> CMat {
    let u = map.eval(x);
    let w = apply_half_d(map).eval(x);
    (&u * &w - &w * &u) * c(0.0, -0.5)
}

/// `sum_{n,m} <A_n, A_m>_F / (i (z_n - conj z_m))^p`.
fn pole_pair_sum(exp: &PoleExpansion, p: f64) -> f64 {
    let mut acc = c(0.0, 0.0);
    for (zn, an) in &exp.terms {
        for (zm, am) in &exp.terms {
            let ip: C64 = an.iter().zip(am.iter()).map(|(x, y)| x * y.conj()).sum();
            if ip.norm() == 0.0 {
                continue;
            }
            acc += ip / (I * (zn - zm.conj())).powf(p);
        }
    }
    acc.re
}

/// `E = (1/2) int u . |D|u dx` for sphere maps; for general `d` the pairing
/// is `tr(U |D| U)/4`, which is the same quantity under Pauli encoding.
pub fn energy(map: &RationalMap) -> f64 {
    PI * pole_pair_sum(&map.expansion(), 2.0)
}

/// Homogeneous Sobolev seminorm `| |D|^s V |_{L^2}` of `V = expansion + h.c.`,
/// with the matrix pairing `tr(A B^*)/2` (the Euclidean pairing of the
/// spin vectors for Pauli-encoded maps). In this normalization the `s = 1/2`
/// value squared equals twice the energy.
pub fn sobolev_seminorm(exp: &PoleExpansion, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(HwmError::InvalidInput(format!("seminorm order must be positive, got {s}")));
    }
    let g = statrs::function::gamma::gamma(2.0 * s + 1.0);
    let sq = 2.0 * PI * g * pole_pair_sum(exp, 2.0 * s + 1.0);
    Ok(sq.max(0.0).sqrt())
}

/// `-2iv Q' - [Q, |D|Q]` sup over a grid; vanishes for travelling profiles of speed `v`.
pub fn solitary_residual(map: &RationalMap, v: f64, grid: &[f64]) -> f64 {
    let hd = apply_half_d(map);
    grid.iter()
        .map(|&x| {
            let q = map.eval(x);
            let w = hd.eval(x);
            let lhs = map.derivative(x) * c(0.0, -2.0 * v);
            frob(&(lhs - (&q * &w - &w * &q)))
        })
        .fold(0.0, f64::max)
}
