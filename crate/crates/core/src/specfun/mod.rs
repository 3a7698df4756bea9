//! Special functions behind the tetrahedral weights: the q-Pochhammer symbol,
//! `G_q`, Faddeev's quantum dilogarithm `Phi_b` and its normalized form `Psi_b`.
//!
//! Every evaluation returns an [`Estimate`]: the value plus an error bound
//! (tail bound for products, half-resolution delta for contour integrals).

mod faddeev;
mod pochhammer;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::quadrature::QuadratureError;

pub use faddeev::{phi_b, psi_b, FaddeevDilog};
pub use pochhammer::{g_q, q_pochhammer};

/// Factors `1 - q^i z` smaller than this in modulus are treated as poles.
pub const POLE_GUARD: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecfunError {
    #[error("|q| = {0} is not < 1")]
    InvalidQ(f64),
    #[error("b = {0} is not a positive finite real")]
    InvalidB(f64),
    #[error("b = {0} outside the supported range [1/4, 4]")]
    UnsupportedB(f64),
    #[error("invalid truncation policy: tol = {tol}, max_terms = {max_terms}")]
    InvalidPolicy { tol: f64, max_terms: usize },
    #[error("product did not reach its tail bound within {max_terms} terms")]
    NonConvergent { max_terms: usize },
    #[error("pole hit: |1 - q^{index} z| < {guard:e} at z = {z}")]
    PoleHit { z: Complex64, index: usize, guard: f64 },
    #[error("G_q is undefined at z = 0")]
    ZeroArgument,
    #[error("|Im z| = {im} is outside the strip |Im z| < {half_width}")]
    OutOfStrip { im: f64, half_width: f64 },
    #[error("contour quadrature tail bound {tail:e} exceeds tolerance")]
    QuadratureFailure { tail: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// A value with an error bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: Complex64,
    pub err: f64,
}

/// Nome of the q-series, `|q| < 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QParam(Complex64);

impl QParam {
    pub fn new(q: impl Into<Complex64>) -> Result<Self, SpecfunError> {
        let q = q.into();
        if !(q.norm() < 1.0) {
            return Err(SpecfunError::InvalidQ(q.norm()));
        }
        Ok(QParam(q))
    }

    pub fn value(self) -> Complex64 {
        self.0
    }
}

impl<'de> Deserialize<'de> for QParam {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let q = Complex64::deserialize(d)?;
        QParam::new(q).map_err(serde::de::Error::custom)
    }
}

/// Real quantum parameter `b > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BParam(f64);

impl BParam {
    pub fn new(b: f64) -> Result<Self, SpecfunError> {
        if !(b > 0.0 && b.is_finite()) {
            return Err(SpecfunError::InvalidB(b));
        }
        Ok(BParam(b))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// `b + 1/b`; the convergence strip of `Phi_b` is `|Im z| < Q/2`.
    pub fn q_sum(self) -> f64 {
        self.0 + 1.0 / self.0
    }
}

impl<'de> Deserialize<'de> for BParam {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        BParam::new(f64::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Target absolute tail bound.
    pub tol: f64,
    pub max_terms: usize,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { tol: 1e-14, max_terms: 10_000 }
    }
}

impl TruncationPolicy {
    pub fn validate(&self) -> Result<(), SpecfunError> {
        if !(self.tol > 0.0) || self.max_terms == 0 {
            return Err(SpecfunError::InvalidPolicy { tol: self.tol, max_terms: self.max_terms });
        }
        Ok(())
    }
}
