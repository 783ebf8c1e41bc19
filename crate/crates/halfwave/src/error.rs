use thiserror::Error;

#[derive(Debug, Error)]
pub enum HwmError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("residue is not rank one (singular values {s1:.3e}, {s2:.3e})")]
    RankNotOne { s1: f64, s2: f64 },
    #[error("residue is not nilpotent (|A^2| = {0:.3e})")]
    NotNilpotent(f64),
    #[error("P and Q have a common factor (normalized Sylvester gap {0:.3e})")]
    CommonFactor(f64),
    #[error("|P|^2 + |Q|^2 has a repeated zero near {0}; perturb the coefficients slightly")]
    RepeatedZero(String),
    #[error("poles {i} and {j} collide (distance {dist:.3e})")]
    PoleCollision { i: usize, j: usize, dist: f64 },
    #[error("Lax injectivity violated at t = {t}: eigenvalue {lambda} is not in the lower half-plane")]
    LaxInjectivity { t: f64, lambda: String },
    #[error("degenerate spectrum: soliton resolution needs distinct Lax eigenvalues (min gap {0:.3e})")]
    DegenerateSpectrum(f64),
    #[error("fixed point did not converge for poles {i} and {j} (eps = {eps:.3e}): {reason}")]
    NonConvergence { i: usize, j: usize, eps: f64, reason: String },
    #[error("linear algebra failure: {0}")]
    LinAlg(String),
    #[error("pole matching failed: {0}")]
    Matching(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HwmError>;
