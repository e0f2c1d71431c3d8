//! Polytropic gas thermodynamics with pressure law `p = rho^gamma`.
//!
//! All quantities are nondimensional. By default the Bernoulli constant is
//! `gamma / (gamma - 1)`, which puts the stagnation density at 1.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GasError {
    #[error("invalid gas parameters: {0}")]
    InvalidParameters(String),
    #[error("density must be non-negative, got {0}")]
    NegativeDensity(f64),
    #[error("density must be positive, got {0}")]
    NonPositiveDensity(f64),
    #[error("speed {speed} is at or beyond the limit speed {limit}")]
    VacuumExceeded { speed: f64, limit: f64 },
    #[error("momentum {momentum} is at or beyond the sonic momentum {sonic}")]
    SonicExceeded { momentum: f64, sonic: f64 },
    #[error("{0} is not defined for an incompressible gas")]
    NotApplicable(&'static str),
    #[error("density root finding did not converge for momentum {0}")]
    NoConvergence(f64),
}

/// Gas state shared by the solver and the far-field expansion.
///
/// `incompressible` selects the limit in which `1/rho` is the constant
/// `1/rho_ref` and the Mach number is reported as zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasModel {
    gamma: f64,
    bernoulli: f64,
    incompressible: bool,
    rho_ref: f64,
}

impl GasModel {
    pub fn polytropic(gamma: f64, bernoulli: f64) -> Result<Self, GasError> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(GasError::InvalidParameters(format!("gamma must exceed 1, got {gamma}")));
        }
        if !(bernoulli > 0.0) || !bernoulli.is_finite() {
            return Err(GasError::InvalidParameters(format!(
                "Bernoulli constant must be positive, got {bernoulli}"
            )));
        }
        Ok(Self { gamma, bernoulli, incompressible: false, rho_ref: 1.0 })
    }

    /// Stagnation density normalized to 1.
    pub fn normalized(gamma: f64) -> Result<Self, GasError> {
        Self::polytropic(gamma, gamma / (gamma - 1.0))
    }

    /// Gas whose free stream at speed `v_inf` has Mach number `mach_inf`.
    ///
    /// `mach_inf == 0` yields the incompressible limit with unit density.
    pub fn from_free_stream(gamma: f64, mach_inf: f64, v_inf: f64) -> Result<Self, GasError> {
        if !(0.0..1.0).contains(&mach_inf) {
            return Err(GasError::InvalidParameters(format!(
                "free-stream Mach number must lie in [0, 1), got {mach_inf}"
            )));
        }
        if mach_inf == 0.0 {
            return Self::incompressible(1.0);
        }
        if !(v_inf > 0.0) {
            return Err(GasError::InvalidParameters(format!(
                "free-stream speed must be positive for a compressible gas, got {v_inf}"
            )));
        }
        let c_inf = v_inf / mach_inf;
        Self::polytropic(gamma, 0.5 * v_inf * v_inf + c_inf * c_inf / (gamma - 1.0))
    }

    pub fn incompressible(rho_ref: f64) -> Result<Self, GasError> {
        if !(rho_ref > 0.0) || !rho_ref.is_finite() {
            return Err(GasError::InvalidParameters(format!(
                "reference density must be positive, got {rho_ref}"
            )));
        }
        Ok(Self { gamma: 1.4, bernoulli: 1.0, incompressible: true, rho_ref })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn bernoulli(&self) -> f64 {
        self.bernoulli
    }

    pub fn is_incompressible(&self) -> bool {
        self.incompressible
    }

    pub fn rho_ref(&self) -> f64 {
        self.rho_ref
    }

    pub fn pressure(&self, rho: f64) -> Result<f64, GasError> {
        if rho < 0.0 {
            return Err(GasError::NegativeDensity(rho));
        }
        Ok(rho.powf(self.gamma))
    }

    pub fn sound_speed_sq(&self, rho: f64) -> Result<f64, GasError> {
        if !(rho > 0.0) {
            return Err(GasError::NonPositiveDensity(rho));
        }
        Ok(self.gamma * rho.powf(self.gamma - 1.0))
    }

    /// Specific enthalpy `gamma/(gamma-1) rho^(gamma-1)`, zero at vacuum.
    pub fn enthalpy(&self, rho: f64) -> Result<f64, GasError> {
        if !(rho > 0.0) {
            return Err(GasError::NonPositiveDensity(rho));
        }
        Ok(self.gamma / (self.gamma - 1.0) * rho.powf(self.gamma - 1.0))
    }

    fn enthalpy_unchecked(&self, rho: f64) -> f64 {
        self.gamma / (self.gamma - 1.0) * rho.powf(self.gamma - 1.0)
    }

    fn density_from_enthalpy(&self, enthalpy: f64) -> f64 {
        ((self.gamma - 1.0) / self.gamma * enthalpy).powf(1.0 / (self.gamma - 1.0))
    }

    pub fn stagnation_density(&self) -> f64 {
        if self.incompressible {
            self.rho_ref
        } else {
            self.density_from_enthalpy(self.bernoulli)
        }
    }

    /// Speed at which the density reaches zero; infinite when incompressible.
    pub fn limit_speed(&self) -> f64 {
        if self.incompressible {
            f64::INFINITY
        } else {
            (2.0 * self.bernoulli).sqrt()
        }
    }

    /// Invert the Bernoulli relation `q^2/2 + enthalpy(rho) = B` for the density.
    pub fn density_from_speed(&self, q: f64) -> Result<f64, GasError> {
        if self.incompressible {
            return Ok(self.rho_ref);
        }
        let limit = self.limit_speed();
        if !(q.abs() < limit) {
            return Err(GasError::VacuumExceeded { speed: q, limit });
        }
        Ok(self.density_from_enthalpy(self.bernoulli - 0.5 * q * q))
    }

    /// Mach number of a state with speed `q` and density `rho`; zero when incompressible.
    pub fn mach(&self, q: f64, rho: f64) -> Result<f64, GasError> {
        if self.incompressible {
            return Ok(0.0);
        }
        Ok(q.abs() / self.sound_speed_sq(rho)?.sqrt())
    }

    /// Sound speed squared and density at the sonic state on the Bernoulli curve.
    fn sonic_state(&self) -> (f64, f64) {
        let c_sq = 2.0 * self.bernoulli * (self.gamma - 1.0) / (self.gamma + 1.0);
        let rho = (c_sq / self.gamma).powf(1.0 / (self.gamma - 1.0));
        (c_sq, rho)
    }

    /// `|rho v|^2 / 2` at the sonic state: the upper end of the domain of [`Self::h_div`].
    pub fn sonic_momentum(&self) -> Result<f64, GasError> {
        if self.incompressible {
            return Err(GasError::NotApplicable("sonic momentum"));
        }
        let (c_sq, rho) = self.sonic_state();
        Ok(0.5 * rho * rho * c_sq)
    }

    /// Inverse density `1/rho` as a function of `m = |rho v|^2 / 2`, subsonic branch.
    pub fn h_div(&self, m: f64) -> Result<f64, GasError> {
        if self.incompressible {
            return Ok(1.0 / self.rho_ref);
        }
        Ok(1.0 / self.density_from_momentum(m)?)
    }

    /// Derivative of [`Self::h_div`] with respect to `m`.
    pub fn h_div_prime(&self, m: f64) -> Result<f64, GasError> {
        if self.incompressible {
            return Ok(0.0);
        }
        let rho = self.density_from_momentum(m)?;
        let q_sq = 2.0 * m / (rho * rho);
        let c_sq = self.gamma * rho.powf(self.gamma - 1.0);
        Ok(1.0 / (rho * rho * rho * (c_sq - q_sq)))
    }

    /// `h_div` and `h_div_prime` from a single root solve.
    pub fn h_div_with_prime(&self, m: f64) -> Result<(f64, f64), GasError> {
        if self.incompressible {
            return Ok((1.0 / self.rho_ref, 0.0));
        }
        let rho = self.density_from_momentum(m)?;
        let q_sq = 2.0 * m / (rho * rho);
        let c_sq = self.gamma * rho.powf(self.gamma - 1.0);
        Ok((1.0 / rho, 1.0 / (rho * rho * rho * (c_sq - q_sq))))
    }

    /// Solve `m rho^-2 + enthalpy(rho) = B` for the root above the sonic density.
    ///
    /// Safeguarded Newton from the stagnation density, bisection whenever a
    /// Newton step leaves the bracket `[rho_sonic, rho_stagnation]`.
    fn density_from_momentum(&self, m: f64) -> Result<f64, GasError> {
        let sonic = self.sonic_momentum()?;
        if m < 0.0 || !m.is_finite() {
            return Err(GasError::InvalidParameters(format!("momentum must be non-negative, got {m}")));
        }
        if m >= sonic {
            return Err(GasError::SonicExceeded { momentum: m, sonic });
        }
        let rho_stag = self.stagnation_density();
        if m == 0.0 {
            return Ok(rho_stag);
        }
        let residual = |rho: f64| m / (rho * rho) + self.enthalpy_unchecked(rho) - self.bernoulli;
        let (_, rho_sonic) = self.sonic_state();
        let (mut lo, mut hi) = (rho_sonic, rho_stag);
        let mut rho = rho_stag;
        for _ in 0..200 {
            let f = residual(rho);
            if f > 0.0 {
                hi = rho;
            } else {
                lo = rho;
            }
            let c_sq = self.gamma * rho.powf(self.gamma - 1.0);
            let df = (c_sq - 2.0 * m / (rho * rho)) / rho;
            let mut next = rho - f / df;
            if !(df > 0.0) || !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - rho).abs() <= 1e-13 * rho || hi - lo <= 1e-15 * hi {
                return Ok(next);
            }
            rho = next;
        }
        Err(GasError::NoConvergence(m))
    }
}
