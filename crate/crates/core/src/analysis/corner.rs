use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::AnalysisError;
use crate::conformal::{kutta_gamma, Corner, KTProfile};
use crate::grid::ExteriorGrid;
use crate::solver::StreamField;

/// Fitted slopes at or above this value count as a bounded corner speed.
pub const BOUNDED_SLOPE: f64 = -0.02;

const MIN_RADII: usize = 6;
const MIN_DECADES: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Least-squares line through `(ln x, ln y)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<PowerLawFit, AnalysisError> {
    if points.len() < 2 {
        return Err(AnalysisError::TooFewRadii { needed: 2, got: points.len() });
    }
    for &(x, y) in points {
        if !(x > 0.0 && x.is_finite()) || !(y > 0.0 && y.is_finite()) {
            return Err(AnalysisError::NonFinite { radius: x, value: y });
        }
    }
    let n = points.len() as f64;
    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in lx.iter().zip(&ly) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 {
        return Err(AnalysisError::Invalid("abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let ss_res: f64 = lx.iter().zip(&ly).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(PowerLawFit { slope, intercept: my - slope * mx, r_squared })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerReport {
    /// `+1` trailing, `-1` leading
    pub corner: i8,
    pub radii: Vec<f64>,
    pub speeds: Vec<f64>,
    pub exponent: f64,
    pub r_squared: f64,
    /// `1/nu - 1`, the blow-up rate when the Kutta condition fails.
    pub theoretical_exponent: f64,
    pub bounded: bool,
}

impl CornerReport {
    /// Report from `(r, |v|)` pairs ordered with strictly decreasing `r`.
    pub fn from_samples(corner: Corner, nu: f64, samples: &[(f64, f64)]) -> Result<Self, AnalysisError> {
        if samples.len() < MIN_RADII {
            return Err(AnalysisError::TooFewRadii { needed: MIN_RADII, got: samples.len() });
        }
        if samples.windows(2).any(|w| !(w[1].0 < w[0].0)) {
            return Err(AnalysisError::NotDecreasing);
        }
        let decades = (samples[0].0 / samples[samples.len() - 1].0).log10();
        if !(decades >= MIN_DECADES - 1e-12) {
            return Err(AnalysisError::NarrowSpan { decades, needed: MIN_DECADES });
        }
        let fit = fit_power_law(samples)?;
        Ok(Self {
            corner: corner.sign(),
            radii: samples.iter().map(|s| s.0).collect(),
            speeds: samples.iter().map(|s| s.1).collect(),
            exponent: fit.slope,
            r_squared: fit.r_squared,
            theoretical_exponent: 1.0 / nu - 1.0,
            bounded: fit.slope >= BOUNDED_SLOPE,
        })
    }
}

/// Fit `|v| ~ r^s` at `corner` from a speed sampler evaluated at `radii`.
pub fn fit_corner_exponent<F>(corner: Corner, nu: f64, radii: &[f64], sampler: F) -> Result<CornerReport, AnalysisError>
where
    F: Fn(f64) -> Result<f64, AnalysisError>,
{
    let mut samples = Vec::with_capacity(radii.len());
    for &r in radii {
        let v = sampler(r)?;
        if !v.is_finite() {
            return Err(AnalysisError::NonFinite { radius: r, value: v });
        }
        samples.push((r, v));
    }
    CornerReport::from_samples(corner, nu, &samples)
}

/// Exact speeds on the corner bisector at the given distances.
pub fn analytic_corner_samples(
    profile: &KTProfile,
    corner: Corner,
    radii: &[f64],
) -> Result<Vec<(f64, f64)>, AnalysisError> {
    radii
        .iter()
        .map(|&r| {
            let z = corner.position() + r * corner.bisector();
            Ok((r, profile.z_velocity(z)?.norm()))
        })
        .collect()
}

/// Cell speeds along the grid column through `corner`, as `(distance, |v|)`
/// pairs with decreasing distance, keeping centroids closer than `r_max`.
pub fn field_corner_samples(grid: &ExteriorGrid, field: &StreamField, corner: Corner, r_max: f64) -> Vec<(f64, f64)> {
    let c = grid.corner_position(corner);
    let mut samples: Vec<(f64, f64)> = grid
        .corner_column_cells(corner)
        .into_iter()
        .map(|id| {
            let p = grid.cells[id].centroid;
            ((Complex64::new(p[0], p[1]) - c).norm(), field.cells[id].speed())
        })
        .filter(|&(r, _)| r < r_max)
        .collect();
    samples.sort_by(|a, b| b.0.total_cmp(&a.0));
    samples.dedup_by(|a, b| a.0 == b.0);
    samples
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KuttaGap {
    pub gamma_trailing: f64,
    pub gamma_leading: f64,
    pub gap: f64,
}

/// The two Kutta circulations for circle-plane free stream `w_inf` and their distance.
pub fn kutta_incompatibility(w_inf: Complex64) -> KuttaGap {
    KuttaGap {
        gamma_trailing: kutta_gamma(Corner::Trailing, w_inf),
        gamma_leading: kutta_gamma(Corner::Leading, w_inf),
        gap: 8.0 * PI * w_inf.im.abs(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geometric(hi: f64, lo: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| hi * (lo / hi).powf(k as f64 / (n - 1) as f64)).collect()
    }

    #[test]
    fn exact_power_law_is_recovered() {
        let radii = geometric(1e-1, 1e-4, 10);
        let r = fit_corner_exponent(Corner::Trailing, 1.5, &radii, |r| Ok(3.0 * r.powf(-0.4))).unwrap();
        assert!((r.exponent + 0.4).abs() < 1e-10);
        assert!((r.r_squared - 1.0).abs() < 1e-12);
        assert!(!r.bounded);
    }

    #[test]
    fn sample_requirements_are_enforced() {
        let f = |r: f64| Ok(r);
        assert!(matches!(
            fit_corner_exponent(Corner::Leading, 2.0, &geometric(1.0, 1e-3, 5), f),
            Err(AnalysisError::TooFewRadii { .. })
        ));
        assert!(matches!(
            fit_corner_exponent(Corner::Leading, 2.0, &geometric(1.0, 0.5, 8), f),
            Err(AnalysisError::NarrowSpan { .. })
        ));
        let mut up = geometric(1.0, 1e-3, 8);
        up.reverse();
        assert_eq!(fit_corner_exponent(Corner::Leading, 2.0, &up, f), Err(AnalysisError::NotDecreasing));
        let bad = fit_corner_exponent(Corner::Leading, 2.0, &geometric(1.0, 1e-3, 8), |_| Ok(f64::NAN));
        assert!(matches!(bad, Err(AnalysisError::NonFinite { .. })));
    }

    #[test]
    fn analytic_lens_slope() {
        let p = KTProfile::from_physical(1.5, 1.0, 0.0, 0.0).unwrap().with_gamma(1.0);
        let radii = geometric(1e-3, 1e-6, 8);
        let s = analytic_corner_samples(&p, Corner::Trailing, &radii).unwrap();
        let r = CornerReport::from_samples(Corner::Trailing, 1.5, &s).unwrap();
        assert!((r.exponent + 1.0 / 3.0).abs() < 0.02, "{}", r.exponent);
    }

    #[test]
    fn kutta_gap_values() {
        assert_eq!(kutta_incompatibility(Complex64::new(1.0, 0.0)).gap, 0.0);
        let g = kutta_incompatibility(Complex64::from_polar(1.0, PI / 6.0));
        assert!((g.gap - 4.0 * PI).abs() < 1e-13);
        assert!((g.gamma_trailing - g.gamma_leading - g.gap).abs() < 1e-13);
    }
}
