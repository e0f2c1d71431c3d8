//! Incompressible flows around symmetric Kármán–Trefftz lenses.
//!
//! The lens is the image of the unit circle under `f(zeta) = h(h(zeta)^nu)`
//! with the Möbius involution `h(zeta) = (zeta + 1)/(zeta - 1)`. Corners sit
//! at `z = 1` (trailing) and `z = -1` (leading) with fluid-side angle
//! `nu * pi`. Fractional powers and logarithms take their branch cut just
//! below the negative real axis: the negative real axis itself has argument
//! `+pi`.
//!
//! Complex velocities follow the convention `w = v_x - i v_y`, so a
//! free-stream parameter with positive argument describes a flow heading
//! below the horizontal in the lens frame. [`KTProfile::flow_angle`] rotates
//! into the frame in which the free stream is horizontal and the body is
//! turned instead; the grid and the solver live in that frame.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConformalError {
    #[error("exponent nu must lie in [1, 2], got {0}")]
    InvalidExponent(f64),
    #[error("point {0} lies inside the unit circle")]
    InsideCircle(Complex64),
    #[error("point {0} lies inside the body")]
    InsideBody(Complex64),
    #[error("the potential has a pole at zeta = 0")]
    Pole,
    #[error("velocity is unbounded at the {corner:?} corner (blow-up exponent {exponent})")]
    SingularVelocity { corner: Corner, exponent: f64 },
    #[error("invalid streamline parameters: {0}")]
    InvalidTrace(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Corner {
    /// `z = 1`
    Trailing,
    /// `z = -1`
    Leading,
}

impl Corner {
    pub const BOTH: [Corner; 2] = [Corner::Trailing, Corner::Leading];

    /// Position in the lens frame.
    pub fn position(self) -> Complex64 {
        match self {
            Corner::Trailing => Complex64::new(1.0, 0.0),
            Corner::Leading => Complex64::new(-1.0, 0.0),
        }
    }

    /// `+1` for the trailing corner, `-1` for the leading one.
    pub fn sign(self) -> i8 {
        match self {
            Corner::Trailing => 1,
            Corner::Leading => -1,
        }
    }

    /// Unit vector bisecting the fluid sector at this corner, lens frame.
    pub fn bisector(self) -> Complex64 {
        self.position()
    }
}

/// A point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(Complex64),
    Infinity,
}

impl Extended {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            Extended::Finite(z) => Some(z),
            Extended::Infinity => None,
        }
    }
}

/// Argument in `(-pi, pi]`, with the whole negative real axis at `+pi`.
pub fn principal_arg(z: Complex64) -> f64 {
    if z.im == 0.0 && z.re < 0.0 {
        PI
    } else {
        z.im.atan2(z.re)
    }
}

pub fn principal_ln(z: Complex64) -> Complex64 {
    Complex64::new(z.norm().ln(), principal_arg(z))
}

pub fn principal_pow(z: Complex64, p: f64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    Complex64::from_polar(z.norm().powf(p), p * principal_arg(z))
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

/// `h(zeta) = (zeta + 1)/(zeta - 1)`, an involution swapping `{1, -1}` with `{inf, 0}`.
pub fn moebius_h(zeta: Extended) -> Extended {
    match zeta {
        Extended::Infinity => Extended::Finite(one()),
        Extended::Finite(z) if z == one() => Extended::Infinity,
        Extended::Finite(z) => Extended::Finite((z + 1.0) / (z - 1.0)),
    }
}

fn pow_extended(u: Extended, p: f64) -> Extended {
    match u {
        Extended::Infinity => Extended::Infinity,
        Extended::Finite(z) => Extended::Finite(principal_pow(z, p)),
    }
}

fn check_nu(nu: f64) -> Result<(), ConformalError> {
    if (1.0..=2.0).contains(&nu) {
        Ok(())
    } else {
        Err(ConformalError::InvalidExponent(nu))
    }
}

/// Tolerance for points counted as lying on the unit circle.
const CIRCLE_TOL: f64 = 1e-12;

/// Kármán–Trefftz map `z = f(zeta)` from the exterior of the unit circle.
pub fn kt_forward(zeta: Complex64, nu: f64) -> Result<Complex64, ConformalError> {
    check_nu(nu)?;
    if zeta.norm() < 1.0 - CIRCLE_TOL {
        return Err(ConformalError::InsideCircle(zeta));
    }
    if nu == 1.0 {
        return Ok(zeta);
    }
    let image = moebius_h(pow_extended(moebius_h(Extended::Finite(zeta)), nu));
    // the only preimage of infinity is zeta = infinity
    Ok(image.finite().expect("finite zeta maps to a finite point"))
}

/// Inverse map `zeta = f^-1(z) = h(h(z)^(1/nu))`.
pub fn kt_inverse(z: Complex64, nu: f64) -> Result<Complex64, ConformalError> {
    check_nu(nu)?;
    if nu == 1.0 {
        if z.norm() < 1.0 - CIRCLE_TOL {
            return Err(ConformalError::InsideBody(z));
        }
        return Ok(z);
    }
    if z == one() || z == -one() {
        return Ok(z);
    }
    let zeta = moebius_h(pow_extended(moebius_h(Extended::Finite(z)), 1.0 / nu))
        .finite()
        .expect("finite z maps to a finite point");
    if zeta.norm() < 1.0 - 1e-9 {
        return Err(ConformalError::InsideBody(z));
    }
    Ok(zeta)
}

/// `f'(zeta)` by the chain rule through `h` and the power map. Not defined at `zeta = 1`.
pub fn kt_derivative(zeta: Complex64, nu: f64) -> Complex64 {
    if nu == 1.0 {
        return one();
    }
    let s = (zeta + 1.0) / (zeta - 1.0);
    let s_nu = principal_pow(s, nu);
    let dh_outer = -2.0 / ((s_nu - 1.0) * (s_nu - 1.0));
    let dpow = nu * principal_pow(s, nu - 1.0);
    let dh_inner = -2.0 / ((zeta - 1.0) * (zeta - 1.0));
    dh_outer * dpow * dh_inner
}

/// Kármán–Trefftz lens with its circle-plane free stream and circulation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KTProfile {
    pub nu: f64,
    pub w_inf_circle: Complex64,
    pub gamma: f64,
}

impl KTProfile {
    pub fn new(nu: f64, w_inf_circle: Complex64, gamma: f64) -> Result<Self, ConformalError> {
        check_nu(nu)?;
        Ok(Self { nu, w_inf_circle, gamma })
    }

    /// Profile whose physical free stream has speed `speed` and complex
    /// argument `attack` (radians). The circle-plane parameter is scaled by
    /// `1/nu` because `f'(zeta) -> 1/nu` at infinity.
    pub fn from_physical(nu: f64, speed: f64, attack: f64, gamma: f64) -> Result<Self, ConformalError> {
        Self::new(nu, Complex64::from_polar(speed / nu, attack), gamma)
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    /// Complex free-stream velocity far from the body in the lens frame.
    pub fn physical_free_stream(&self) -> Complex64 {
        self.nu * self.w_inf_circle
    }

    /// Argument of the free-stream parameter; the lens frame rotated by this
    /// angle has a horizontal free stream.
    pub fn flow_angle(&self) -> f64 {
        principal_arg(self.w_inf_circle)
    }

    pub fn has_corners(&self) -> bool {
        self.nu > 1.0
    }

    /// Exponent of `|v| ~ r^(1/nu - 1)` at a corner whose Kutta condition fails.
    pub fn corner_exponent(&self) -> f64 {
        1.0 / self.nu - 1.0
    }

    pub fn circle_potential(&self, zeta: Complex64) -> Result<Complex64, ConformalError> {
        if zeta.norm() == 0.0 {
            return Err(ConformalError::Pole);
        }
        let w = self.w_inf_circle;
        Ok(w * zeta + w.conj() / zeta + self.vortex_strength() * principal_ln(zeta))
    }

    /// `d/dzeta` of [`Self::circle_potential`].
    pub fn circle_velocity(&self, zeta: Complex64) -> Complex64 {
        let w = self.w_inf_circle;
        w - w.conj() / (zeta * zeta) + self.vortex_strength() / zeta
    }

    fn circle_velocity_derivative(&self, zeta: Complex64) -> Complex64 {
        let w = self.w_inf_circle;
        2.0 * w.conj() / (zeta * zeta * zeta) - self.vortex_strength() / (zeta * zeta)
    }

    /// `Gamma / (2 pi i)`
    fn vortex_strength(&self) -> Complex64 {
        Complex64::new(0.0, -self.gamma / (2.0 * PI))
    }

    fn velocity_scale(&self) -> f64 {
        self.w_inf_circle.norm() + self.gamma.abs() / (2.0 * PI) + f64::MIN_POSITIVE
    }

    /// `true` when `W~'` vanishes at the corner's circle preimage.
    pub fn kutta_satisfied(&self, corner: Corner) -> bool {
        self.circle_velocity(corner.position()).norm() <= 1e-12 * self.velocity_scale()
    }

    /// Complex potential `W = W~ o f^-1` in the lens frame.
    pub fn potential(&self, z: Complex64) -> Result<Complex64, ConformalError> {
        self.circle_potential(kt_inverse(z, self.nu)?)
    }

    /// Complex velocity `dW/dz` in the lens frame.
    pub fn z_velocity(&self, z: Complex64) -> Result<Complex64, ConformalError> {
        let zeta = kt_inverse(z, self.nu)?;
        if self.nu > 1.0 {
            for corner in Corner::BOTH {
                if zeta == corner.position() {
                    return self.corner_limit(corner);
                }
            }
        }
        Ok(self.circle_velocity(zeta) / kt_derivative(zeta, self.nu))
    }

    fn corner_limit(&self, corner: Corner) -> Result<Complex64, ConformalError> {
        if !self.kutta_satisfied(corner) {
            return Err(ConformalError::SingularVelocity { corner, exponent: self.corner_exponent() });
        }
        if self.nu < 2.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        // flat plate: f'(zeta) ~ +-(zeta -+ 1) at the corners
        let second = self.circle_velocity_derivative(corner.position());
        Ok(match corner {
            Corner::Trailing => second,
            Corner::Leading => -second,
        })
    }

    pub fn sample(&self, z: Complex64) -> Result<ComplexFlowSample, ConformalError> {
        let potential = self.potential(z)?;
        Ok(ComplexFlowSample { z, w: self.z_velocity(z)?, psi: potential.im, phi: potential.re })
    }

    fn frame_rotation(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.flow_angle())
    }

    /// Lens-frame point for a point of the rotated (horizontal free stream) frame.
    pub fn to_lens_frame(&self, z: Complex64) -> Complex64 {
        z * self.frame_rotation().conj()
    }

    pub fn to_flow_frame(&self, z: Complex64) -> Complex64 {
        z * self.frame_rotation()
    }

    /// Stream function at a point of the flow frame.
    pub fn flow_frame_psi(&self, z: Complex64) -> Result<f64, ConformalError> {
        Ok(self.potential(self.to_lens_frame(z))?.im)
    }

    /// Velocity vector `(v_x, v_y)` at a point of the flow frame.
    pub fn flow_frame_velocity(&self, z: Complex64) -> Result<[f64; 2], ConformalError> {
        let w = self.z_velocity(self.to_lens_frame(z))? * self.frame_rotation().conj();
        Ok([w.re, -w.im])
    }

    /// Whether `z` (lens frame) lies in the closed fluid domain.
    pub fn contains(&self, z: Complex64) -> bool {
        kt_inverse(z, self.nu).is_ok()
    }
}

/// Circulation that makes the velocity bounded at `corner`.
pub fn kutta_gamma(corner: Corner, w_inf_circle: Complex64) -> f64 {
    match corner {
        Corner::Trailing => 4.0 * PI * w_inf_circle.im,
        Corner::Leading => -4.0 * PI * w_inf_circle.im,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexFlowSample {
    pub z: Complex64,
    /// `v_x - i v_y`
    pub w: Complex64,
    pub psi: f64,
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    MaxLength,
    DomainExit,
    Stagnation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Streamline {
    pub points: Vec<Complex64>,
    pub termination: Termination,
}

/// Velocity magnitude below which tracing stops.
pub const STAGNATION_SPEED: f64 = 1e-12;

/// Trace the streamline through `seed` (lens frame) downstream with
/// fixed arc-length RK4 steps.
pub fn trace_streamline(
    seed: Complex64,
    profile: &KTProfile,
    step: f64,
    max_len: f64,
) -> Result<Streamline, ConformalError> {
    if !(step > 0.0) || !(max_len > 0.0) {
        return Err(ConformalError::InvalidTrace(format!("step {step} and max_len {max_len} must be positive")));
    }
    if !profile.contains(seed) {
        return Err(ConformalError::InsideBody(seed));
    }
    // unit tangent (v_x + i v_y)/|v|, or None at stagnation / outside the domain
    let direction = |z: Complex64| -> Option<Complex64> {
        let w = profile.z_velocity(z).ok()?;
        let speed = w.norm();
        if speed < STAGNATION_SPEED {
            None
        } else {
            Some(w.conj() / speed)
        }
    };

    let mut points = vec![seed];
    let mut z = seed;
    let mut length = 0.0;
    let mut ds = step;
    loop {
        if length >= max_len {
            return Ok(Streamline { points, termination: Termination::MaxLength });
        }
        let Some(k1) = direction(z) else {
            return Ok(Streamline { points, termination: Termination::Stagnation });
        };
        let h = ds.min(max_len - length);
        let advance = || -> Option<Complex64> {
            let k2 = direction(z + 0.5 * h * k1)?;
            let k3 = direction(z + 0.5 * h * k2)?;
            let k4 = direction(z + h * k3)?;
            let next = z + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            profile.contains(next).then_some(next)
        };
        match advance() {
            Some(next) => {
                z = next;
                length += h;
                points.push(z);
                ds = step;
            }
            None => {
                ds *= 0.5;
                if ds < 1e-12 * step.max(1.0) {
                    let termination = match profile.z_velocity(z) {
                        Ok(w) if w.norm() < 1e-6 * profile.velocity_scale() => Termination::Stagnation,
                        _ => Termination::DomainExit,
                    };
                    return Ok(Streamline { points, termination });
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn moebius_values() {
        assert_eq!(moebius_h(Extended::Finite(c(0.0, 0.0))), Extended::Finite(c(-1.0, 0.0)));
        assert_eq!(moebius_h(Extended::Finite(c(-1.0, 0.0))), Extended::Finite(c(0.0, 0.0)));
        assert_eq!(moebius_h(Extended::Finite(c(1.0, 0.0))), Extended::Infinity);
        assert_eq!(moebius_h(Extended::Infinity), Extended::Finite(c(1.0, 0.0)));
        let z = c(2.0, 3.0);
        let back = moebius_h(moebius_h(Extended::Finite(z))).finite().unwrap();
        assert!((back - z).norm() < 1e-14);
    }

    #[test]
    fn branch_cut_sits_below_negative_axis() {
        assert_eq!(principal_arg(c(-2.0, 0.0)), PI);
        assert_eq!(principal_arg(c(-2.0, -0.0)), PI);
        assert!(principal_arg(c(-2.0, -1e-300)) < 0.0);
        let r = principal_pow(c(-4.0, 0.0), 0.5);
        assert!((r - c(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn forward_map_values() {
        for nu in [1.1, 1.5, 2.0] {
            assert_eq!(kt_forward(c(-1.0, 0.0), nu).unwrap(), c(-1.0, 0.0));
            assert_eq!(kt_forward(c(1.0, 0.0), nu).unwrap(), c(1.0, 0.0));
        }
        let zeta = c(1.7, -0.4);
        assert_eq!(kt_forward(zeta, 1.0).unwrap(), zeta);
        let plate = kt_forward(Complex64::from_polar(1.0, PI / 3.0), 2.0).unwrap();
        assert!(plate.im.abs() < 1e-12);
        assert!((plate.re - 0.5).abs() < 1e-12);
        assert!(matches!(kt_forward(c(0.5, 0.0), 1.5), Err(ConformalError::InsideCircle(_))));
        assert!(matches!(kt_forward(c(2.0, 0.0), 2.5), Err(ConformalError::InvalidExponent(_))));
    }

    #[test]
    fn inverse_map_values() {
        let z = c(2.0, 1.0);
        let round = kt_inverse(kt_forward(z, 1.5).unwrap(), 1.5).unwrap();
        assert!((round - z).norm() < 1e-10);
        assert_eq!(kt_inverse(c(1.0, 0.0), 1.5).unwrap(), c(1.0, 0.0));
        assert_eq!(kt_inverse(c(0.0, 3.0), 1.0).unwrap(), c(0.0, 3.0));
        assert!(matches!(kt_inverse(c(0.0, 0.0), 1.5), Err(ConformalError::InsideBody(_))));
    }

    #[test]
    fn derivative_matches_finite_differences() {
        for nu in [1.2, 1.5, 2.0] {
            for zeta in [c(1.5, 0.3), c(-0.9, 1.4), c(0.2, -3.0)] {
                let d = 1e-6;
                let fd = (kt_forward(zeta + d, nu).unwrap() - kt_forward(zeta - d, nu).unwrap()) / (2.0 * d);
                assert!((kt_derivative(zeta, nu) - fd).norm() < 1e-7 * fd.norm().max(1.0));
            }
        }
    }

    #[test]
    fn circle_potential_values() {
        let p = KTProfile::new(1.0, c(0.3, -0.7), 2.3).unwrap();
        let on_circle = p.circle_potential(Complex64::from_polar(1.0, PI / 5.0)).unwrap();
        assert!(on_circle.im.abs() < 1e-13);
        let uniform = KTProfile::new(1.0, c(1.0, 0.0), 0.0).unwrap();
        assert!((uniform.circle_potential(c(2.0, 0.0)).unwrap() - c(2.5, 0.0)).norm() < 1e-15);
        let vortex = KTProfile::new(1.0, c(0.0, 0.0), 2.0 * PI).unwrap();
        let e = std::f64::consts::E;
        assert!((vortex.circle_potential(c(e, 0.0)).unwrap() - c(0.0, -1.0)).norm() < 1e-15);
        assert!(matches!(vortex.circle_potential(c(0.0, 0.0)), Err(ConformalError::Pole)));
    }

    #[test]
    fn z_velocity_values() {
        let circle = KTProfile::new(1.0, c(1.0, 0.0), 0.0).unwrap();
        assert!((circle.z_velocity(c(2.0, 0.0)).unwrap() - c(0.75, 0.0)).norm() < 1e-15);
        let lens = KTProfile::new(1.5, c(1.0, 0.0), 0.0).unwrap();
        let far = lens.z_velocity(Complex64::from_polar(1e4, 0.7)).unwrap();
        assert!((far - c(1.5, 0.0)).norm() < 1e-3);
        let w = Complex64::from_polar(1.0, 0.4);
        let kutta = KTProfile::new(1.5, w, kutta_gamma(Corner::Trailing, w)).unwrap();
        assert!(kutta.z_velocity(c(1.0, 0.0)).unwrap().norm().is_finite());
        match kutta.z_velocity(c(-1.0, 0.0)) {
            Err(ConformalError::SingularVelocity { corner, exponent }) => {
                assert_eq!(corner, Corner::Leading);
                assert!((exponent + 1.0 / 3.0).abs() < 1e-15);
            }
            other => panic!("expected singular velocity, got {other:?}"),
        }
    }

    #[test]
    fn flat_plate_corner_limit_matches_nearby_values() {
        let w = Complex64::from_polar(1.0, 0.3);
        let plate = KTProfile::new(2.0, w, kutta_gamma(Corner::Trailing, w)).unwrap();
        let at_corner = plate.z_velocity(c(1.0, 0.0)).unwrap();
        let near = plate.z_velocity(c(1.0 + 1e-8, 0.0)).unwrap();
        assert!((at_corner - near).norm() < 1e-3);
        let lead = KTProfile::new(2.0, w, kutta_gamma(Corner::Leading, w)).unwrap();
        let at_lead = lead.z_velocity(c(-1.0, 0.0)).unwrap();
        let near_lead = lead.z_velocity(c(-1.0 - 1e-8, 0.0)).unwrap();
        assert!((at_lead - near_lead).norm() < 1e-3);
    }

    #[test]
    fn kutta_values() {
        assert_eq!(kutta_gamma(Corner::Trailing, c(2.0, 0.0)), 0.0);
        assert_eq!(kutta_gamma(Corner::Leading, c(2.0, 0.0)), 0.0);
        let w = Complex64::from_polar(1.0, PI / 6.0);
        assert!((kutta_gamma(Corner::Trailing, w) - 2.0 * PI).abs() < 1e-12);
        assert!((kutta_gamma(Corner::Leading, w) + 2.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn flow_frame_has_horizontal_free_stream() {
        let p = KTProfile::from_physical(1.5, 2.0, 0.35, 0.0).unwrap();
        let v = p.flow_frame_velocity(Complex64::from_polar(1e5, 1.1)).unwrap();
        assert!((v[0] - 2.0).abs() < 1e-3 && v[1].abs() < 1e-3);
        let corner = p.to_flow_frame(c(1.0, 0.0));
        assert!((corner.arg() - 0.35).abs() < 1e-15);
    }

    #[test]
    fn streamline_keeps_psi_constant() {
        let p = KTProfile::new(1.0, c(1.0, 0.0), 0.0).unwrap();
        let seed = c(-5.0, 2.0);
        let psi0 = p.potential(seed).unwrap().im;
        let line = trace_streamline(seed, &p, 0.01, 12.0).unwrap();
        assert_eq!(line.termination, Termination::MaxLength);
        for z in &line.points {
            assert!((p.potential(*z).unwrap().im - psi0).abs() < 1e-6);
        }
        assert!(line.points.last().unwrap().re > 5.0);
    }

    #[test]
    fn axis_streamline_runs_into_stagnation() {
        let p = KTProfile::new(1.0, c(1.0, 0.0), 0.0).unwrap();
        let line = trace_streamline(c(-5.0, 0.0), &p, 0.05, 20.0).unwrap();
        assert_ne!(line.termination, Termination::MaxLength);
        assert!(line.points.iter().all(|z| z.im == 0.0));
        assert!((line.points.last().unwrap().re + 1.0).abs() < 1e-3);
    }

    #[test]
    fn kutta_streamline_leaves_trailing_corner_along_bisector() {
        let w = Complex64::from_polar(1.0 / 1.5, 20f64.to_radians());
        let kutta = KTProfile::new(1.5, w, kutta_gamma(Corner::Trailing, w)).unwrap();
        let plain = kutta.with_gamma(0.0);
        let seed = c(1.0 + 1e-3, 0.0);
        // the dividing streamline psi = 0 leaves the corner only under the Kutta condition
        let psi_kutta = kutta.potential(seed).unwrap().im.abs();
        let psi_plain = plain.potential(seed).unwrap().im.abs();
        assert!(psi_kutta < 0.05 * psi_plain);
        let line = trace_streamline(seed, &kutta, 1e-3, 0.5).unwrap();
        let first = line.points[1] - line.points[0];
        assert!(principal_arg(first).abs() < 0.5);
        assert!(line.points.last().unwrap().re > 1.2);
        assert!(trace_streamline(c(0.0, 0.0), &kutta, 0.1, 1.0).is_err());
    }
}
