use std::f64::consts::LN_2;

use serde::Serialize;

use super::CutoffError;

/// Constants driving the tree sequences.
///
/// `eps` is the margin above the threshold, `sigma` the number of leaf
/// children each loose vertex keeps for bad neighbours, and `alpha`, `beta`
/// set the short bottom regime of the caps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ParamSet {
    pub n: u64,
    pub eps: f64,
    pub sigma: u64,
    pub alpha: f64,
    pub beta: f64,
}

/// `ceil(4 / eps^2)`.
pub fn default_sigma(eps: f64) -> u64 {
    (4.0 / (eps * eps)).ceil().max(1.0) as u64
}

impl ParamSet {
    pub const DEFAULT_ALPHA: f64 = 0.04;
    pub const DEFAULT_BETA: f64 = 0.14;

    pub fn new(n: u64, eps: f64, sigma: u64, alpha: f64, beta: f64) -> Result<Self, CutoffError> {
        let bad = |m: String| Err(CutoffError::InvalidParams(m));
        if n < 2 {
            return bad(format!("n = {n} must be at least 2"));
        }
        if !(eps > 0.0 && eps.is_finite()) {
            return bad(format!("eps = {eps} must be positive"));
        }
        if sigma < 1 {
            return bad("sigma must be at least 1".into());
        }
        if !(beta > 0.0 && beta < 1.0 / (10.0 * LN_2)) {
            return bad(format!("beta = {beta} not in (0, 1/(10 ln 2))"));
        }
        if !(alpha > 0.0 && alpha < beta * LN_2 / 2.0) {
            return bad(format!("alpha = {alpha} not in (0, beta ln 2 / 2)"));
        }
        Ok(Self {
            n,
            eps,
            sigma,
            alpha,
            beta,
        })
    }

    /// Default `alpha`, `beta` and `sigma = ceil(4 / eps^2)`.
    pub fn with_defaults(n: u64, eps: f64) -> Result<Self, CutoffError> {
        Self::new(
            n,
            eps,
            default_sigma(eps),
            Self::DEFAULT_ALPHA,
            Self::DEFAULT_BETA,
        )
    }

    /// Expected degree `(1 + eps) / ln 2 * ln n` of the intended regime.
    pub fn d(&self) -> f64 {
        (1.0 + self.eps) / LN_2 * (self.n as f64).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation() {
        assert!(ParamSet::new(1000, 0.5, 3, 0.04, 0.14).is_ok());
        assert!(ParamSet::new(1000, 0.5, 3, 0.04, 0.15).is_err());
        assert!(ParamSet::new(1000, 0.5, 3, 0.05, 0.14).is_err());
        assert!(ParamSet::new(1000, 0.0, 3, 0.04, 0.14).is_err());
        assert!(ParamSet::new(1000, 0.5, 0, 0.04, 0.14).is_err());
        assert!(ParamSet::new(1, 0.5, 3, 0.04, 0.14).is_err());
    }

    #[test]
    fn sigma_default() {
        assert_eq!(default_sigma(0.5), 16);
        assert_eq!(default_sigma(2.0), 1);
        assert_eq!(ParamSet::with_defaults(100, 1.0).unwrap().sigma, 4);
    }
}
