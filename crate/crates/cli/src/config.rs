//! Run configuration: a JSON document validated in full before any work.

use std::path::{Path, PathBuf};

use cornerflow::analysis::ProbeCase;
use cornerflow::grid::GridSpec;
use cornerflow::solver::{Scheme, SolveConfig};
use cornerflow::{kutta_gamma, Corner, GasModel, KTProfile};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub profile: ProfileSection,
    #[serde(default)]
    pub gas: GasSection,
    #[serde(default)]
    pub circulation: Circulation,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub outputs: OutputSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSection {
    /// Fluid angle at each corner in units of pi, in (1, 2]; 1 is the circle.
    pub nu: f64,
    /// Argument of the circle-plane free stream, degrees.
    pub attack_angle_deg: f64,
    /// Modulus of the circle-plane free stream.
    #[serde(default = "one")]
    pub w_inf_mag: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GasSection {
    #[serde(default = "default_heat_ratio")]
    pub gamma: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mach_inf: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub incompressible: Option<bool>,
}

fn default_heat_ratio() -> f64 {
    1.4
}

impl Default for GasSection {
    fn default() -> Self {
        Self { gamma: default_heat_ratio(), mach_inf: None, incompressible: Some(true) }
    }
}

impl GasSection {
    /// Free-stream Mach number; zero for the incompressible model.
    pub fn mach(&self) -> f64 {
        self.mach_inf.unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KuttaChoice {
    KuttaTrailing,
    KuttaLeading,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CirculationValue {
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Circulation {
    Value(CirculationValue),
    Kutta(KuttaChoice),
}

impl Default for Circulation {
    fn default() -> Self {
        Circulation::Value(CirculationValue { value: 0.0 })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    #[serde(rename = "R")]
    pub outer_radius: f64,
    #[serde(rename = "Nr")]
    pub n_r: usize,
    #[serde(rename = "Ntheta")]
    pub n_theta: usize,
    /// Radial growth factor; omitted means log-polar spacing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stretch: Option<f64>,
}

impl Default for GridSection {
    fn default() -> Self {
        Self { outer_radius: 50.0, n_r: 64, n_theta: 64, stretch: None }
    }
}

impl GridSection {
    pub fn spec(&self) -> GridSpec {
        match self.stretch {
            Some(s) => GridSpec::new(self.outer_radius, self.n_r, self.n_theta, s),
            None => GridSpec::log_polar(self.outer_radius, self.n_r, self.n_theta),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_damping")]
    pub damping: f64,
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
}

fn default_tol() -> f64 {
    1e-10
}
fn default_max_iter() -> usize {
    200
}
fn default_damping() -> f64 {
    0.7
}
fn default_scheme() -> Scheme {
    Scheme::Newton
}

impl Default for SolverSection {
    fn default() -> Self {
        Self { tol: default_tol(), max_iter: default_max_iter(), damping: default_damping(), scheme: default_scheme() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
}

fn default_dir() -> PathBuf {
    PathBuf::from("cornerflow-out")
}
fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

impl Default for OutputSection {
    fn default() -> Self {
        Self { dir: default_dir(), formats: default_formats() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepSection {
    /// Circulation sweep under grid refinement, starting from the `grid` section.
    Nonexistence {
        #[serde(default = "default_levels")]
        levels: usize,
        /// Circulations to try; omitted spans both Kutta values.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gammas: Option<Vec<f64>>,
    },
    /// Distance to the incompressible field for a list of free-stream Mach numbers.
    LowMach { machs: Vec<f64> },
}

fn default_levels() -> usize {
    4
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let config: Self = serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), String> {
        let p = &self.profile;
        if !(p.nu > 1.0 - 1e-15 && p.nu <= 2.0) {
            return Err(format!("profile.nu must lie in [1, 2], got {}", p.nu));
        }
        if !p.attack_angle_deg.is_finite() {
            return Err("profile.attack_angle_deg must be finite".into());
        }
        if !(p.w_inf_mag > 0.0 && p.w_inf_mag.is_finite()) {
            return Err(format!("profile.w_inf_mag must be positive, got {}", p.w_inf_mag));
        }
        let g = &self.gas;
        match (g.mach_inf, g.incompressible) {
            (Some(_), Some(true)) => return Err("gas: give either mach_inf or incompressible, not both".into()),
            (None, Some(true)) => {}
            (Some(m), _) if !(m > 0.0 && m < 1.0) => {
                return Err(format!("gas.mach_inf must lie in (0, 1), got {m}"));
            }
            (Some(_), _) => {}
            (None, _) => return Err("gas: need mach_inf or incompressible: true".into()),
        }
        if !(g.gamma > 1.0 && g.gamma.is_finite()) {
            return Err(format!("gas.gamma must exceed 1, got {}", g.gamma));
        }
        if let Circulation::Value(v) = self.circulation {
            if !v.value.is_finite() {
                return Err("circulation.value must be finite".into());
            }
        }
        self.grid.spec().validate().map_err(|e| format!("grid: {e}"))?;
        let s = &self.solver;
        if !(s.tol > 0.0) {
            return Err(format!("solver.tol must be positive, got {}", s.tol));
        }
        if s.max_iter == 0 {
            return Err("solver.max_iter must be at least 1".into());
        }
        if !(s.damping > 0.0 && s.damping <= 1.0) {
            return Err(format!("solver.damping must lie in (0, 1], got {}", s.damping));
        }
        match &self.sweep {
            Some(SweepSection::Nonexistence { levels, gammas }) => {
                if *levels < 3 {
                    return Err("sweep.levels must be at least 3".into());
                }
                if gammas.as_ref().is_some_and(|g| g.is_empty() || g.iter().any(|v| !v.is_finite())) {
                    return Err("sweep.gammas must be a non-empty list of finite values".into());
                }
            }
            Some(SweepSection::LowMach { machs }) => {
                if machs.is_empty() || machs.iter().any(|m| !(0.0..0.5).contains(m)) {
                    return Err("sweep.machs must be a non-empty list in [0, 0.5)".into());
                }
            }
            None => {}
        }
        Ok(())
    }

    pub fn attack(&self) -> f64 {
        self.profile.attack_angle_deg.to_radians()
    }

    pub fn w_inf_circle(&self) -> Complex64 {
        Complex64::from_polar(self.profile.w_inf_mag, self.attack())
    }

    /// Physical free-stream speed.
    pub fn speed(&self) -> f64 {
        self.profile.nu * self.profile.w_inf_mag
    }

    pub fn gamma(&self) -> f64 {
        match self.circulation {
            Circulation::Value(v) => v.value,
            Circulation::Kutta(KuttaChoice::KuttaTrailing) => kutta_gamma(Corner::Trailing, self.w_inf_circle()),
            Circulation::Kutta(KuttaChoice::KuttaLeading) => kutta_gamma(Corner::Leading, self.w_inf_circle()),
        }
    }

    pub fn kt_profile(&self) -> Result<KTProfile, String> {
        KTProfile::new(self.profile.nu, self.w_inf_circle(), self.gamma()).map_err(|e| e.to_string())
    }

    pub fn gas_model(&self) -> Result<GasModel, String> {
        match self.gas.mach_inf {
            Some(m) => GasModel::from_free_stream(self.gas.gamma, m, self.speed()),
            None => GasModel::incompressible(1.0),
        }
        .map_err(|e| e.to_string())
    }

    pub fn solve_config(&self) -> Result<SolveConfig, String> {
        let mut config = SolveConfig::for_profile(self.gas_model()?, &self.kt_profile()?).map_err(|e| e.to_string())?;
        config.tolerance = self.solver.tol;
        config.max_iterations = self.solver.max_iter;
        config.damping = self.solver.damping;
        config.scheme = self.solver.scheme;
        Ok(config)
    }

    pub fn probe_case(&self, levels: usize, gammas: Option<Vec<f64>>) -> ProbeCase {
        ProbeCase {
            nu: self.profile.nu,
            attack: self.attack(),
            v_inf: self.speed(),
            mach_inf: self.gas.mach(),
            heat_ratio: self.gas.gamma,
            gamma_grid: gammas,
            base_grid: self.grid.spec(),
            levels,
        }
    }

    pub fn wants(&self, format: Format) -> bool {
        self.outputs.formats.contains(&format)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig, String> {
        let c: RunConfig = serde_json::from_str(text).map_err(|e| e.to_string())?;
        c.validate()?;
        Ok(c)
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse(r#"{"profile": {"nu": 2.0, "attack_angle_deg": 0}}"#).unwrap();
        assert_eq!(c.grid, GridSection::default());
        assert_eq!(c.gamma(), 0.0);
        assert!(c.gas_model().unwrap().is_incompressible());
    }

    #[test]
    fn circulation_forms() {
        let base = r#"{"profile": {"nu": 1.5, "attack_angle_deg": 30}, "circulation": "#;
        let c = parse(&format!("{base}\"kutta_trailing\"}}")).unwrap();
        assert!((c.gamma() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        let c = parse(&format!("{base}\"kutta_leading\"}}")).unwrap();
        assert!((c.gamma() + 2.0 * std::f64::consts::PI).abs() < 1e-12);
        let c = parse(&format!("{base}{{\"value\": 1.5}}}}")).unwrap();
        assert_eq!(c.gamma(), 1.5);
        assert!(parse(&format!("{base}\"kutta_middle\"}}")).is_err());
        assert!(parse(&format!("{base}{{\"value\": 1.5, \"extra\": 1}}}}")).is_err());
    }

    #[test]
    fn unknown_and_conflicting_keys_are_rejected() {
        assert!(parse(r#"{"profile": {"nu": 1.5, "attack_angle_deg": 0, "chord": 1}}"#).is_err());
        assert!(parse(r#"{"profile": {"nu": 1.5, "attack_angle_deg": 0}, "colour": 1}"#).is_err());
        assert!(parse(r#"{"profile": {"nu": 1.5, "attack_angle_deg": 0}, "gas": {"mach_inf": 0.3, "incompressible": true}}"#).is_err());
        assert!(parse(r#"{"profile": {"nu": 1.5, "attack_angle_deg": 0}, "gas": {"mach_inf": 1.3}}"#).is_err());
        assert!(parse(r#"{"profile": {"nu": 2.5, "attack_angle_deg": 0}}"#).is_err());
        assert!(parse(r#"{"profile": {"nu": 1.5, "attack_angle_deg": 0}, "grid": {"R": 50, "Nr": 64, "Ntheta": 63}}"#).is_err());
        assert!(parse(r#"{"profile": {"nu": 1.5, "attack_angle_deg": 0}, "outputs": {"formats": ["png"]}}"#).is_err());
    }
}
