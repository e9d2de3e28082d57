//! Simple truth values: a strength (probability) and a confidence.

use thiserror::Error;

/// Evidence-scaling constant used when none is given.
pub const DEFAULT_K: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum TvError {
    #[error("strength {0} outside [0, 1]")]
    Strength(f64),
    #[error("confidence {0} outside [0, 1)")]
    Confidence(f64),
}

/// Strength `s ∈ [0,1]` and confidence `c ∈ [0,1)`.
///
/// Confidence maps to an evidence count `n = K·c/(1−c)`, and `(s, n)` to the
/// second-order beta distribution `Beta(s·n + 1, (1−s)·n + 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthValue {
    s: f64,
    c: f64,
}

impl TruthValue {
    pub fn new(s: f64, c: f64) -> Result<Self, TvError> {
        if !(0.0..=1.0).contains(&s) || s.is_nan() {
            return Err(TvError::Strength(s));
        }
        if !(0.0..1.0).contains(&c) || c.is_nan() {
            return Err(TvError::Confidence(c));
        }
        Ok(Self { s, c })
    }

    /// The ignorance prior `(0.5, 0)`.
    pub const fn unknown() -> Self {
        Self { s: 0.5, c: 0.0 }
    }

    /// Build from a strength and an evidence count under scaling `k`.
    pub fn from_count(s: f64, n: f64, k: f64) -> Result<Self, TvError> {
        let n = if n.is_finite() && n > 0.0 { n } else { 0.0 };
        Self::new(s, n / (n + k))
    }

    pub fn strength(&self) -> f64 {
        self.s
    }

    pub fn confidence(&self) -> f64 {
        self.c
    }

    pub fn count(&self, k: f64) -> f64 {
        k * self.c / (1.0 - self.c)
    }

    pub fn beta_params(&self, k: f64) -> (f64, f64) {
        let n = self.count(k);
        (self.s * n + 1.0, (1.0 - self.s) * n + 1.0)
    }
}
