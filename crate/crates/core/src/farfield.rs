//! Leading-order behaviour of subsonic flows far from the body, and
//! recovery of the circulation from sampled stream-function values.
//!
//! The free stream is horizontal, `(v_inf, 0)` with `v_inf >= 0`. The
//! vortex term is compressed anisotropically by the Prandtl–Glauert factor
//! `beta = sqrt(1 - M_inf^2)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gas::{GasError, GasModel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FarFieldError {
    #[error("the expansion is singular at the origin")]
    Singular,
    #[error("free-stream speed must be finite and non-negative, got {0}")]
    InvalidSpeed(f64),
    #[error("free stream is not subsonic (Mach {0})")]
    NotSubsonic(f64),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("samples do not separate the circulation from the additive constant")]
    IllPosed,
    #[error("sampling failed: {0}")]
    Sampling(String),
    #[error(transparent)]
    Gas(#[from] GasError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FarFieldState {
    pub v_inf: f64,
    pub rho_inf: f64,
    pub mach_inf: f64,
    pub pg_factor: f64,
    pub gamma: f64,
    pub psi_const: f64,
}

impl FarFieldState {
    pub fn new(gas: &GasModel, v_inf: f64, gamma: f64) -> Result<Self, FarFieldError> {
        if !(v_inf >= 0.0) || !v_inf.is_finite() {
            return Err(FarFieldError::InvalidSpeed(v_inf));
        }
        let rho_inf = gas.density_from_speed(v_inf)?;
        let mach_inf = gas.mach(v_inf, rho_inf)?;
        if mach_inf >= 1.0 {
            return Err(FarFieldError::NotSubsonic(mach_inf));
        }
        Ok(Self {
            v_inf,
            rho_inf,
            mach_inf,
            pg_factor: (1.0 - mach_inf * mach_inf).sqrt(),
            gamma,
            psi_const: 0.0,
        })
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    pub fn with_psi_const(self, psi_const: f64) -> Self {
        Self { psi_const, ..self }
    }

    fn stretched_sq(&self, x: f64, y: f64) -> Result<f64, FarFieldError> {
        let beta = self.pg_factor;
        let d = x * x + beta * beta * y * y;
        if d == 0.0 {
            Err(FarFieldError::Singular)
        } else {
            Ok(d)
        }
    }

    /// Free stream plus the compressed point-vortex term.
    pub fn velocity_expansion(&self, x: f64, y: f64) -> Result<[f64; 2], FarFieldError> {
        let d = self.stretched_sq(x, y)?;
        let k = self.gamma / (2.0 * PI) * self.pg_factor / d;
        Ok([self.v_inf - k * y, k * x])
    }

    /// Density perturbation induced by the vortex term, linearized about the free stream.
    pub fn density_expansion(&self, x: f64, y: f64) -> Result<f64, FarFieldError> {
        let d = self.stretched_sq(x, y)?;
        if self.v_inf == 0.0 {
            return Ok(self.rho_inf);
        }
        let beta = self.pg_factor;
        Ok(self.rho_inf
            + self.rho_inf * beta * self.gamma / (2.0 * PI) * (1.0 - beta * beta) * y / (d * self.v_inf))
    }

    /// `rho_inf (v_inf y - Gamma/(2 pi) beta ln sqrt(x^2 + beta^2 y^2)) + psi_const`
    pub fn psi_expansion(&self, x: f64, y: f64) -> Result<f64, FarFieldError> {
        let d = self.stretched_sq(x, y)?;
        Ok(self.rho_inf * (self.v_inf * y + self.gamma * self.vortex_basis(d)) + self.psi_const)
    }

    /// Coefficient of `Gamma / rho_inf` in the stream-function expansion.
    fn vortex_basis(&self, stretched_sq: f64) -> f64 {
        -self.pg_factor / (2.0 * PI) * 0.5 * stretched_sq.ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CirculationFit {
    pub gamma: f64,
    pub psi_const: f64,
    /// RMS misfit of the fitted expansion.
    pub residual: f64,
}

/// Least-squares fit of `Gamma` and the additive constant to samples
/// `(x, y, psi)`, with `v_inf`, `rho_inf` and `beta` taken from `state`.
pub fn fit_circulation(samples: &[(f64, f64, f64)], state: &FarFieldState) -> Result<CirculationFit, FarFieldError> {
    const MIN_SAMPLES: usize = 8;
    if samples.len() < MIN_SAMPLES {
        return Err(FarFieldError::TooFewSamples { needed: MIN_SAMPLES, got: samples.len() });
    }
    let mut basis = Vec::with_capacity(samples.len());
    let mut target = Vec::with_capacity(samples.len());
    for &(x, y, psi) in samples {
        let d = state.stretched_sq(x, y)?;
        basis.push(state.rho_inf * state.vortex_basis(d));
        target.push(psi - state.rho_inf * state.v_inf * y);
    }
    let n = samples.len() as f64;
    let b_mean = basis.iter().sum::<f64>() / n;
    let t_mean = target.iter().sum::<f64>() / n;
    let mut sbb = 0.0;
    let mut sbt = 0.0;
    let mut b_scale = 0.0;
    for (b, t) in basis.iter().zip(&target) {
        sbb += (b - b_mean) * (b - b_mean);
        sbt += (b - b_mean) * (t - t_mean);
        b_scale += b * b;
    }
    if !(sbb > 1e-24 * b_scale.max(f64::MIN_POSITIVE)) {
        return Err(FarFieldError::IllPosed);
    }
    let gamma = sbt / sbb;
    let psi_const = t_mean - gamma * b_mean;
    let sq: f64 = basis
        .iter()
        .zip(&target)
        .map(|(b, t)| {
            let e = t - gamma * b - psi_const;
            e * e
        })
        .sum();
    Ok(CirculationFit { gamma, psi_const, residual: (sq / n).sqrt() })
}

/// Default number of equispaced angles per sampling ring.
pub const RING_ANGLES: usize = 64;

/// `n` equispaced points on the circle of the given radius about the origin.
pub fn ring_points(radius: f64, n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|k| {
            let t = 2.0 * PI * (k as f64 + 0.5) / n as f64;
            (radius * t.cos(), radius * t.sin())
        })
        .collect()
}

/// Circulation fitted from two sampling rings around a nominal radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingFit {
    pub gamma: f64,
    pub psi_const: f64,
    pub residual: f64,
    pub ring_radius: f64,
    /// Difference between fits from the inner pair `(R/2, R)` and the outer pair `(R, 2R)`.
    pub gamma_drift: f64,
}

/// Fit the circulation from `sampler` on rings at `radius/sqrt(2)` and
/// `radius*sqrt(2)`; the drift between the `(R/2, R)` and `(R, 2R)` ring
/// pairs is reported as an error bar for the neglected remainder.
pub fn fit_on_rings<F>(sampler: F, state: &FarFieldState, radius: f64, n_angles: usize) -> Result<RingFit, FarFieldError>
where
    F: Fn(f64, f64) -> Result<f64, String>,
{
    let collect = |radii: &[f64]| -> Result<Vec<(f64, f64, f64)>, FarFieldError> {
        let mut samples = Vec::new();
        for &r in radii {
            for (x, y) in ring_points(r, n_angles) {
                samples.push((x, y, sampler(x, y).map_err(FarFieldError::Sampling)?));
            }
        }
        Ok(samples)
    };
    let s2 = std::f64::consts::SQRT_2;
    let main = fit_circulation(&collect(&[radius / s2, radius * s2])?, state)?;
    let inner = fit_circulation(&collect(&[radius / 2.0, radius])?, state)?;
    let outer = fit_circulation(&collect(&[radius, 2.0 * radius])?, state)?;
    Ok(RingFit {
        gamma: main.gamma,
        psi_const: main.psi_const,
        residual: main.residual,
        ring_radius: radius,
        gamma_drift: (inner.gamma - outer.gamma).abs(),
    })
}
