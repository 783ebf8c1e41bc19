//! Complex polynomials stored constant term first.

use crate::linalg::{eig_general, singular_values};
use crate::{CMat, Result, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct Poly {
    pub coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(coeffs: Vec<C64>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&r| C64::new(r, 0.0)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.len() > 1 && self.coeffs.last().map_or(false, |c| c.norm() == 0.0) {
            self.coeffs.pop();
        }
        if self.coeffs.is_empty() {
            self.coeffs.push(C64::new(0.0, 0.0));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.norm() == 0.0)
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: C64) -> C64 {
        self.coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &c| acc * x + c)
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::new(vec![C64::new(0.0, 0.0)]);
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Polynomial with conjugated coefficients, so that `p~(x) = conj(p(x))` on the real line.
    pub fn conj_coeffs(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![C64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Poly, k: usize| p.coeffs.get(k).copied().unwrap_or_default();
        Poly::new((0..n).map(|k| get(self, k) + get(other, k)).collect())
    }

    pub fn scale(&self, s: C64) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// All complex roots, from the companion matrix followed by Newton polishing.
    pub fn roots(&self) -> Result<Vec<C64>> {
        let n = self.degree();
        if n == 0 {
            return Ok(vec![]);
        }
        let lead = self.coeffs[n];
        let comp = CMat::from_fn(n, n, |i, j| {
            if i == 0 {
                -self.coeffs[n - 1 - j] / lead
            } else if i == j + 1 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let (mut r, _) = eig_general(&comp)?;
        let dp = self.derivative();
        for root in r.iter_mut() {
            for _ in 0..3 {
                let d = dp.eval(*root);
                if d.norm() == 0.0 {
                    break;
                }
                let step = self.eval(*root) / d;
                if !step.is_finite() {
                    break;
                }
                *root -= step;
            }
        }
        Ok(r)
    }
}

/// Ratio of smallest to largest singular value of the Sylvester matrix of
/// two coefficient-normalized polynomials; zero iff they share a root.
pub fn sylvester_gap(p: &Poly, q: &Poly) -> f64 {
    let m = p.degree();
    let n = q.degree();
    if m + n == 0 {
        return 1.0;
    }
    let norm = |a: &Poly| {
        let s = a.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        a.scale(C64::new(1.0 / s, 0.0))
    };
    let (p, q) = (norm(p), norm(q));
    let size = m + n;
    let mut s = CMat::zeros(size, size);
    for row in 0..n {
        for k in 0..=m {
            s[(row, row + k)] = p.coeffs[m - k];
        }
    }
    for row in 0..m {
        for k in 0..=n {
            s[(n + row, row + k)] = q.coeffs[n - k];
        }
    }
    let sv = singular_values(&s);
    sv[sv.len() - 1] / sv[0]
}
