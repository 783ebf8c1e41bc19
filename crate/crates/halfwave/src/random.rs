//! Seeded random rational data for tests, benchmarks and `build random`.

use crate::linalg::c;
use crate::poly::Poly;
use crate::rational_maps::{from_projector, from_stereographic, RationalMap};
use crate::{HwmError, Result, C64};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type MapRng = ChaCha8Rng;

pub fn rng(seed: u64) -> MapRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn coeff<R: Rng>(rng: &mut R) -> C64 {
    c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn poly<R: Rng>(rng: &mut R, deg: usize) -> Poly {
    let mut v: Vec<C64> = (0..=deg).map(|_| coeff(rng)).collect();
    v[deg] = c(1.0, 0.0) + v[deg] * 0.5;
    Poly::new(v)
}

/// Poles well inside the lower half-plane and apart from each other.
fn well_conditioned(map: &RationalMap, min_depth: f64, min_sep: f64) -> bool {
    let z = map.poles();
    z.iter().all(|p| -p.im >= min_depth)
        && z.iter().enumerate().all(|(i, a)| z[i + 1..].iter().all(|b| (a - b).norm() >= min_sep))
}

/// Random `(P, Q)` with `deg P = n`, `deg Q < n`, accepted by the stereographic constructor.
pub fn random_stereographic_pair<R: Rng>(rng: &mut R, n: usize) -> Result<(Poly, Poly)> {
    if n == 0 {
        return Err(HwmError::InvalidInput("degree must be positive".into()));
    }
    for _ in 0..1000 {
        let p = poly(rng, n);
        let dq = rng.gen_range(0..n);
        let q = poly(rng, dq);
        if let Ok((s, _)) = from_stereographic(&p, &q) {
            if well_conditioned(&s.map, 0.05, 0.05) {
                return Ok((p, q));
            }
        }
    }
    Err(HwmError::InvalidInput("no admissible random polynomial pair found".into()))
}

/// Random map into `Gr_1(C^d)` with exactly `n` poles.
/// For `d = 2` this is a stereographic sphere map.
pub fn random_map<R: Rng>(rng: &mut R, d: usize, n: usize) -> Result<RationalMap> {
    if d < 2 {
        return Err(HwmError::InvalidInput("need d >= 2".into()));
    }
    if n == 0 {
        return crate::rational_maps::GrassmannTarget::standard(d, 1).map(RationalMap::constant);
    }
    if d == 2 {
        let (p, q) = random_stereographic_pair(rng, n)?;
        return Ok(from_stereographic(&p, &q)?.0.map);
    }
    for _ in 0..1000 {
        let mut w = vec![poly(rng, n)];
        for _ in 1..d {
            let deg = rng.gen_range(0..n);
            w.push(poly(rng, deg));
        }
        if let Ok(map) = from_projector(&w) {
            if map.n() == n && well_conditioned(&map, 0.05, 0.05) {
                return Ok(map);
            }
        }
    }
    Err(HwmError::InvalidInput("no admissible random projector data found".into()))
}

/// Random map with a uniformly drawn number of poles in `1..=n_max`.
pub fn random_valid_map<R: Rng>(rng: &mut R, d: usize, n_max: usize) -> Result<RationalMap> {
    let n = rng.gen_range(1..=n_max.max(1));
    random_map(rng, d, n)
}
