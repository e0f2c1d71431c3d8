//! Subsolutions `w = r^(1-eps) (1 + a cos(theta - theta_mid))` of
//! `L = -A : D^2` in sectors wider than a half plane.
//!
//! With `s = 1 - eps`, `u'' + u = 1` and the coefficients written in the
//! local polar frame (`A_rr`, `A_rt`, `A_tt`),
//!
//! `-L w = r^(s-2) (A_tt (1 - eps u) - A_rr eps (1 - eps) u - 2 A_rt eps u')`,
//!
//! so `L w <= 0` once `eps` is small compared to the ellipticity ratio.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::AnalysisError;

/// Cartesian coefficient matrix `[[a_xx, a_xy], [a_xy, a_yy]]`.
pub type Coefficients = [[f64; 2]; 2];

/// Default number of radii and of angles on the verification grid.
pub const DEFAULT_SAMPLES: usize = 64;

const EPS_START: f64 = 0.5;
const EPS_FLOOR: f64 = 1e-6;
const TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Subsolution {
    pub theta_lo: f64,
    pub theta_hi: f64,
    pub amplitude: f64,
    pub theta_mid: f64,
    pub epsilon: f64,
    pub r_max: f64,
}

/// Distance from the maximum of `1 + a cos` to its zeros, `arccos(-1/a)`.
pub fn zero_distance(amplitude: f64) -> f64 {
    (-1.0 / amplitude).acos()
}

impl Subsolution {
    pub fn exponent(&self) -> f64 {
        1.0 - self.epsilon
    }

    pub fn u(&self, theta: f64) -> f64 {
        1.0 + self.amplitude * (theta - self.theta_mid).cos()
    }

    pub fn u_prime(&self, theta: f64) -> f64 {
        -self.amplitude * (theta - self.theta_mid).sin()
    }

    pub fn value(&self, r: f64, theta: f64) -> f64 {
        r.powf(self.exponent()) * self.u(theta)
    }

    /// `-L w / r^(s-2)` at angle `theta` for coefficients `a`.
    fn bracket(&self, theta: f64, a: &Coefficients) -> f64 {
        let (c, s) = (theta.cos(), theta.sin());
        let er = [c, s];
        let et = [-s, c];
        let quad = |p: [f64; 2], q: [f64; 2]| {
            p[0] * (a[0][0] * q[0] + a[0][1] * q[1]) + p[1] * (a[1][0] * q[0] + a[1][1] * q[1])
        };
        let (a_rr, a_rt, a_tt) = (quad(er, er), quad(er, et), quad(et, et));
        let eps = self.epsilon;
        let u = self.u(theta);
        a_tt * (1.0 - eps * u) - a_rr * eps * (1.0 - eps) * u - 2.0 * a_rt * eps * self.u_prime(theta)
    }

    /// `L w` at `(r, theta)` for the coefficients there.
    pub fn apply_operator(&self, r: f64, theta: f64, a: &Coefficients) -> f64 {
        -r.powf(self.exponent() - 2.0) * self.bracket(theta, a)
    }
}

fn sample_grid(theta_lo: f64, theta_hi: f64, r_max: f64, n: usize) -> (Vec<f64>, Vec<f64>) {
    let radii = (0..n).map(|k| r_max * (k + 1) as f64 / n as f64).collect();
    let angles = (0..n).map(|l| theta_lo + (theta_hi - theta_lo) * l as f64 / (n - 1) as f64).collect();
    (radii, angles)
}

fn check_elliptic(a: &Coefficients, r: f64, theta: f64) -> Result<(), AnalysisError> {
    let sym = (a[0][1] - a[1][0]).abs() <= 1e-12 * (a[0][0].abs() + a[1][1].abs());
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    if sym && a[0][0] > 0.0 && a[1][1] > 0.0 && det > 0.0 && det.is_finite() {
        Ok(())
    } else {
        Err(AnalysisError::NotElliptic { r, theta })
    }
}

/// Subsolution on the sector `(theta_lo, theta_hi)` of radius `r_max`, with
/// `eps` checked on the default sampling grid.
pub fn build_subsolution<F>(theta_lo: f64, theta_hi: f64, coeff: F, r_max: f64) -> Result<Subsolution, AnalysisError>
where
    F: Fn(f64, f64) -> Coefficients,
{
    build_subsolution_on(theta_lo, theta_hi, coeff, r_max, DEFAULT_SAMPLES)
}

/// As [`build_subsolution`] on an `n x n` grid of radii and angles.
///
/// The amplitude puts the zeros of `u` exactly on the bounding radii; `eps`
/// is halved from 1/2 until `L w <= 0` at every sample.
pub fn build_subsolution_on<F>(
    theta_lo: f64,
    theta_hi: f64,
    coeff: F,
    r_max: f64,
    n: usize,
) -> Result<Subsolution, AnalysisError>
where
    F: Fn(f64, f64) -> Coefficients,
{
    let angle = theta_hi - theta_lo;
    if !(angle > PI) {
        return Err(AnalysisError::NotProtruding { angle });
    }
    if angle > 2.0 * PI * (1.0 + 1e-15) {
        return Err(AnalysisError::SectorTooWide { angle });
    }
    if !(r_max > 0.0 && r_max.is_finite()) || n < 2 {
        return Err(AnalysisError::Invalid(format!("need r_max > 0 and n >= 2, got {r_max} and {n}")));
    }
    let (radii, angles) = sample_grid(theta_lo, theta_hi, r_max, n);
    let mut coefficients = Vec::with_capacity(n * n);
    for &r in &radii {
        for &t in &angles {
            let a = coeff(r, t);
            check_elliptic(&a, r, t)?;
            coefficients.push((t, a));
        }
    }
    let mut sub = Subsolution {
        theta_lo,
        theta_hi,
        amplitude: (-1.0 / (0.5 * angle).cos()).max(1.0),
        theta_mid: 0.5 * (theta_lo + theta_hi),
        epsilon: EPS_START,
        r_max,
    };
    while sub.epsilon >= EPS_FLOOR {
        if coefficients.iter().all(|(t, a)| sub.bracket(*t, a) >= 0.0) {
            return Ok(sub);
        }
        sub.epsilon *= 0.5;
    }
    Err(AnalysisError::EllipticityViolation { floor: EPS_FLOOR })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsolutionReport {
    /// Largest `L w` relative to `r^(s-2) (1 + a) max|A|`.
    pub max_operator: f64,
    pub worst_r: f64,
    pub worst_theta: f64,
    /// Largest `u` on the two bounding radii, relative to `1 + a`.
    pub max_on_radii: f64,
    /// Smallest `w(r, theta_mid) / r^(1-eps)` over the sampled radii.
    pub min_ray_ratio: f64,
    pub passed: bool,
}

/// Check all three subsolution properties on an `n x n` sector grid.
pub fn verify_subsolution<F>(sub: &Subsolution, coeff: F, n: usize) -> Result<SubsolutionReport, AnalysisError>
where
    F: Fn(f64, f64) -> Coefficients,
{
    if n < 2 {
        return Err(AnalysisError::Invalid(format!("need n >= 2, got {n}")));
    }
    let (radii, angles) = sample_grid(sub.theta_lo, sub.theta_hi, sub.r_max, n);
    let peak = 1.0 + sub.amplitude;
    let mut report = SubsolutionReport {
        max_operator: f64::NEG_INFINITY,
        worst_r: 0.0,
        worst_theta: 0.0,
        max_on_radii: f64::NEG_INFINITY,
        min_ray_ratio: f64::INFINITY,
        passed: false,
    };
    for &r in &radii {
        for &t in &angles {
            let a = coeff(r, t);
            check_elliptic(&a, r, t)?;
            let scale = r.powf(sub.exponent() - 2.0) * peak * a.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
            let lw = sub.apply_operator(r, t, &a) / scale;
            if lw > report.max_operator {
                report.max_operator = lw;
                report.worst_r = r;
                report.worst_theta = t;
            }
        }
        report.min_ray_ratio = report.min_ray_ratio.min(sub.value(r, sub.theta_mid) / r.powf(sub.exponent()));
    }
    report.max_on_radii = sub.u(sub.theta_lo).max(sub.u(sub.theta_hi)) / peak;
    report.passed =
        report.max_operator <= TOLERANCE && report.max_on_radii <= TOLERANCE && report.min_ray_ratio >= 1.0;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    const IDENTITY: Coefficients = [[1.0, 0.0], [0.0, 1.0]];

    fn rotated(angle: f64, d0: f64, d1: f64) -> Coefficients {
        let (c, s) = (angle.cos(), angle.sin());
        [
            [c * c * d0 + s * s * d1, c * s * (d0 - d1)],
            [c * s * (d0 - d1), s * s * d0 + c * c * d1],
        ]
    }

    #[test]
    fn laplacian_three_quarter_sector() {
        let sub = build_subsolution(0.0, 1.5 * PI, |_, _| IDENTITY, 1.0).unwrap();
        assert!((sub.amplitude - 2f64.sqrt()).abs() < 1e-12);
        assert!(sub.epsilon > 0.0);
        assert!(verify_subsolution(&sub, |_, _| IDENTITY, 64).unwrap().passed);
    }

    #[test]
    fn zero_distances() {
        assert!((zero_distance(2.0) - 2.0 * PI / 3.0).abs() < 1e-12);
        // the excess over pi/2 is arcsin(1/a), just above 1/a
        let d = zero_distance(1e3) - PI / 2.0;
        assert!(d > 0.0 && (d - (1e-3f64).asin()).abs() < 1e-15);
        assert!(d - 1e-3 < 2e-10);
        assert!((zero_distance(1.0) - PI).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_finite_differences() {
        let a = rotated(0.4, 1.0, 3.0);
        let sub = build_subsolution(-0.3, 3.9, |_, _| a, 2.0).unwrap();
        let w = |x: f64, y: f64| sub.value(x.hypot(y), y.atan2(x));
        let h = 1e-4;
        for &(r, t) in &[(0.5, 0.1), (1.3, 1.7), (0.8, 3.0), (1.9, 2.2)] {
            let (x, y) = (r * f64::cos(t), r * f64::sin(t));
            let wxx = (w(x + h, y) - 2.0 * w(x, y) + w(x - h, y)) / (h * h);
            let wyy = (w(x, y + h) - 2.0 * w(x, y) + w(x, y - h)) / (h * h);
            let wxy = (w(x + h, y + h) - w(x + h, y - h) - w(x - h, y + h) + w(x - h, y - h)) / (4.0 * h * h);
            let fd = -(a[0][0] * wxx + 2.0 * a[0][1] * wxy + a[1][1] * wyy);
            let exact = sub.apply_operator(r, t, &a);
            assert!((fd - exact).abs() < 1e-5 * (1.0 + exact.abs()), "{fd} vs {exact}");
        }
    }

    #[test]
    fn narrow_sectors_are_rejected() {
        assert!(matches!(
            build_subsolution(0.0, PI, |_, _| IDENTITY, 1.0),
            Err(AnalysisError::NotProtruding { .. })
        ));
        assert!(matches!(
            build_subsolution(0.0, 2.5 * PI, |_, _| IDENTITY, 1.0),
            Err(AnalysisError::SectorTooWide { .. })
        ));
    }

    #[test]
    fn full_plane_sector_has_unit_amplitude() {
        let sub = build_subsolution(-PI, PI, |_, _| IDENTITY, 1.0).unwrap();
        assert!((sub.amplitude - 1.0).abs() < 1e-12);
        assert!(verify_subsolution(&sub, |_, _| IDENTITY, 64).unwrap().passed);
    }

    #[test]
    fn degenerate_coefficients_break_a_moderate_construction() {
        let mild = rotated(0.0, 1.0, 10.0);
        let sub = build_subsolution(0.0, 1.5 * PI, |_, _| mild, 1.0).unwrap();
        // tangential direction at theta_mid is weak, radial direction stiff
        let mid = sub.theta_mid;
        let bad = rotated(mid, 1e6, 1.0);
        let report = verify_subsolution(&sub, |_, _| bad, 64).unwrap();
        assert!(!report.passed && report.max_operator > 0.0);
        // stiff axis along a sampled ray: no eps above the floor works
        let ray = 1.99 * PI * 24.0 / 63.0;
        assert!(matches!(
            build_subsolution(0.0, 1.99 * PI, |_, _| rotated(ray, 1e9, 1.0), 1.0),
            Err(AnalysisError::EllipticityViolation { .. })
        ));
    }
}
