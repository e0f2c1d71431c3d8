//! Numerical evidence about flows around bodies with protruding corners:
//! corner blow-up rates, the incompatibility of the two Kutta conditions,
//! comparison subsolutions in wide sectors, low-Mach convergence and
//! refinement studies of the corner speeds.

mod corner;
mod studies;
mod subsolution;

pub use corner::{
    analytic_corner_samples, field_corner_samples, fit_corner_exponent, fit_power_law, kutta_incompatibility,
    CornerReport, KuttaGap, PowerLawFit, BOUNDED_SLOPE,
};
pub use studies::{
    default_gamma_grid, growth_exponent, low_mach_study, nonexistence_probe, symmetry_residual, LowMachRow,
    LowMachStudy, ProbeCase, ProbeEntry, ProbeLevel, ProbeReport,
};
pub use subsolution::{
    build_subsolution, build_subsolution_on, verify_subsolution, zero_distance, Coefficients, Subsolution,
    SubsolutionReport, DEFAULT_SAMPLES,
};

use thiserror::Error;

use crate::conformal::ConformalError;
use crate::farfield::FarFieldError;
use crate::gas::GasError;
use crate::grid::GridError;
use crate::solver::SolverError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("non-finite sample {value} at r = {radius}")]
    NonFinite { radius: f64, value: f64 },
    #[error("need at least {needed} radii, got {got}")]
    TooFewRadii { needed: usize, got: usize },
    #[error("radii must decrease strictly toward the corner")]
    NotDecreasing,
    #[error("radii span {decades:.2} decades, need at least {needed}")]
    NarrowSpan { decades: f64, needed: f64 },
    #[error("sector angle {angle} does not exceed pi; the corner does not protrude")]
    NotProtruding { angle: f64 },
    #[error("sector angle {angle} exceeds 2 pi")]
    SectorTooWide { angle: f64 },
    #[error("coefficients are not uniformly elliptic at r = {r}, theta = {theta}")]
    NotElliptic { r: f64, theta: f64 },
    #[error("no admissible exponent above {floor}: the ellipticity ratio is too large")]
    EllipticityViolation { floor: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Conformal(#[from] ConformalError),
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    FarField(#[from] FarFieldError),
    #[error(transparent)]
    Gas(#[from] GasError),
}
