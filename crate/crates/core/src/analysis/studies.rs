use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::corner::{fit_power_law, kutta_incompatibility, KuttaGap};
use super::AnalysisError;
use crate::conformal::{Corner, KTProfile};
use crate::gas::GasModel;
use crate::grid::{build_grid, ExteriorGrid, GridSpec};
use crate::par;
use crate::solver::{solve, SolveConfig, SolveStatus, StreamField};

const GAMMA_POINTS: usize = 21;
const CORNER_CELLS: usize = 4;
const FIT_LEVELS: usize = 3;

fn gas_for(heat_ratio: f64, mach_inf: f64, v_inf: f64) -> Result<GasModel, AnalysisError> {
    Ok(if mach_inf == 0.0 {
        GasModel::incompressible(1.0)?
    } else {
        GasModel::from_free_stream(heat_ratio, mach_inf, v_inf)?
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowMachRow {
    pub mach_inf: f64,
    /// `max |v - v_0| / max |v_0|` over cells, `v_0` the incompressible field.
    pub distance: f64,
    pub converged: bool,
    pub max_mach: f64,
    pub iterations: usize,
    /// Whether the residual decreased at every iteration.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowMachStudy {
    pub rows: Vec<LowMachRow>,
}

impl LowMachStudy {
    /// `distance(m2) / distance(m1)` for two listed Mach numbers.
    pub fn ratio(&self, m1: f64, m2: f64) -> Option<f64> {
        let d = |m: f64| self.rows.iter().find(|r| r.mach_inf == m).map(|r| r.distance);
        Some(d(m2)? / d(m1)?)
    }

    pub fn all_converged(&self) -> bool {
        self.rows.iter().all(|r| r.converged)
    }
}

/// Distance of compressible fields at free-stream Mach numbers `machs` to
/// the incompressible field, at fixed free-stream speed and circulation.
pub fn low_mach_study(
    profile: &KTProfile,
    heat_ratio: f64,
    machs: &[f64],
    grid: &ExteriorGrid,
    tolerance: f64,
) -> Result<LowMachStudy, AnalysisError> {
    if let Some(&m) = machs.iter().find(|&&m| !(0.0..0.5).contains(&m)) {
        return Err(AnalysisError::Invalid(format!("free-stream Mach {m} outside [0, 0.5)")));
    }
    let v_inf = profile.physical_free_stream().norm();
    let run = |mach: f64| -> Result<StreamField, AnalysisError> {
        let mut config = SolveConfig::for_profile(gas_for(heat_ratio, mach, v_inf)?, profile)?;
        config.tolerance = tolerance;
        Ok(solve(&config, grid, None)?)
    };
    let reference = run(0.0)?;
    let v_scale = reference.cells.iter().map(|c| c.speed()).fold(0.0, f64::max);
    let fields = par::map_slice(machs, |&m| run(m));
    let mut rows = Vec::with_capacity(machs.len());
    for (&mach_inf, field) in machs.iter().zip(fields) {
        let field = field?;
        let distance = field
            .cells
            .iter()
            .zip(&reference.cells)
            .map(|(a, b)| (a.velocity[0] - b.velocity[0]).hypot(a.velocity[1] - b.velocity[1]))
            .fold(0.0, f64::max)
            / v_scale;
        rows.push(LowMachRow {
            mach_inf,
            distance,
            converged: field.converged(),
            max_mach: field.max_mach(),
            iterations: field.history.len(),
            monotone: field.history.windows(2).all(|w| w[1].residual < w[0].residual),
        });
    }
    Ok(LowMachStudy { rows })
}

/// Parameters of a refinement study of the corner speeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeCase {
    pub nu: f64,
    /// Angle of the free stream against the lens axis, radians.
    pub attack: f64,
    pub v_inf: f64,
    /// Zero selects the incompressible model.
    pub mach_inf: f64,
    pub heat_ratio: f64,
    /// Circulations to sweep; `None` spans both Kutta values.
    pub gamma_grid: Option<Vec<f64>>,
    /// Coarsest grid; each further level doubles both resolutions.
    pub base_grid: GridSpec,
    pub levels: usize,
}

impl ProbeCase {
    pub fn incompressible(nu: f64, attack: f64, base_grid: GridSpec, levels: usize) -> Self {
        Self { nu, attack, v_inf: 1.0, mach_inf: 0.0, heat_ratio: 1.4, gamma_grid: None, base_grid, levels }
    }

    fn profile(&self) -> Result<KTProfile, AnalysisError> {
        Ok(KTProfile::from_physical(self.nu, self.v_inf, self.attack, 0.0)?)
    }
}

/// 21 circulations spanning both Kutta values with half a gap of margin;
/// duplicates collapse when the gap is zero.
pub fn default_gamma_grid(gap: &KuttaGap) -> Vec<f64> {
    let lo = gap.gamma_trailing.min(gap.gamma_leading) - 0.5 * gap.gap;
    let hi = gap.gamma_trailing.max(gap.gamma_leading) + 0.5 * gap.gap;
    let mut grid: Vec<f64> =
        (0..GAMMA_POINTS).map(|k| lo + (hi - lo) * k as f64 / (GAMMA_POINTS - 1) as f64).collect();
    grid.dedup();
    grid
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeEntry {
    pub gamma: f64,
    pub level: usize,
    /// Largest speed among the cells nearest each corner; `+inf` when the solve aborted.
    pub trailing_speed: f64,
    pub leading_speed: f64,
    pub max_mach: f64,
    pub status: SolveStatus,
}

impl ProbeEntry {
    pub fn corner_speed(&self) -> f64 {
        self.trailing_speed.max(self.leading_speed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeLevel {
    pub level: usize,
    pub n_r: usize,
    pub n_theta: usize,
    /// Mean distance from the corners to the sampled cell centroids.
    pub h: f64,
    /// Minimum over circulations of the larger corner speed.
    pub minimax: f64,
    pub argmin_gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub case: ProbeCase,
    pub kutta: KuttaGap,
    pub gammas: Vec<f64>,
    pub entries: Vec<ProbeEntry>,
    pub levels: Vec<ProbeLevel>,
    /// Slope of `ln minimax` against `ln(1/h)` over the last three levels.
    pub growth_exponent: f64,
    /// The same slope for each circulation separately.
    pub gamma_growth: Vec<f64>,
    /// Relative change of the minimax between the last two levels.
    pub last_variation: f64,
}

/// Slope of `ln value` against `ln(1/h)` over the last three `(h, value)` pairs.
pub fn growth_exponent(points: &[(f64, f64)]) -> Result<f64, AnalysisError> {
    let tail = &points[points.len().saturating_sub(FIT_LEVELS)..];
    if tail.iter().any(|p| p.1 == f64::INFINITY) {
        return Ok(f64::INFINITY);
    }
    let inv: Vec<(f64, f64)> = tail.iter().map(|&(h, v)| (1.0 / h, v)).collect();
    Ok(fit_power_law(&inv)?.slope)
}

fn corner_distance(grid: &ExteriorGrid) -> f64 {
    let mut total = 0.0;
    for corner in Corner::BOTH {
        let c = grid.corner_position(corner);
        for id in grid.nearest_cells(corner, CORNER_CELLS) {
            let p = grid.cells[id].centroid;
            total += (Complex64::new(p[0], p[1]) - c).norm();
        }
    }
    total / (2 * CORNER_CELLS) as f64
}

fn corner_speed(grid: &ExteriorGrid, field: &StreamField, corner: Corner) -> f64 {
    grid.nearest_cells(corner, CORNER_CELLS).into_iter().map(|id| field.cells[id].speed()).fold(0.0, f64::max)
}

/// Sweep circulations and refinement levels, recording the corner speeds.
///
/// If no circulation keeps both corner speeds bounded, the minimax over the
/// sweep grows like a power of `1/h`; a supersonic abort counts as an
/// infinite corner speed.
pub fn nonexistence_probe(case: &ProbeCase) -> Result<ProbeReport, AnalysisError> {
    if case.levels < FIT_LEVELS {
        return Err(AnalysisError::Invalid(format!("need at least {FIT_LEVELS} refinement levels")));
    }
    let base = case.profile()?;
    let kutta = kutta_incompatibility(base.w_inf_circle);
    let gammas = case.gamma_grid.clone().unwrap_or_else(|| default_gamma_grid(&kutta));
    if gammas.is_empty() {
        return Err(AnalysisError::Invalid("empty circulation grid".into()));
    }
    let gas = gas_for(case.heat_ratio, case.mach_inf, case.v_inf)?;

    let mut specs = vec![case.base_grid];
    for _ in 1..case.levels {
        specs.push(specs.last().unwrap().refined());
    }
    let grids = specs.iter().map(|&s| build_grid(&base, s)).collect::<Result<Vec<_>, _>>()?;

    let tasks: Vec<(usize, usize)> =
        (0..grids.len()).flat_map(|l| (0..gammas.len()).map(move |g| (l, g))).collect();
    let results = par::map_slice(&tasks, |&(level, gi)| -> Result<ProbeEntry, AnalysisError> {
        let profile = base.with_gamma(gammas[gi]);
        let grid = &grids[level];
        let field = solve(&SolveConfig::for_profile(gas, &profile)?, grid, None)?;
        let (trailing_speed, leading_speed) = match field.status {
            SolveStatus::Supersonic { .. } => (f64::INFINITY, f64::INFINITY),
            _ => (corner_speed(grid, &field, Corner::Trailing), corner_speed(grid, &field, Corner::Leading)),
        };
        Ok(ProbeEntry {
            gamma: gammas[gi],
            level,
            trailing_speed,
            leading_speed,
            max_mach: field.max_mach(),
            status: field.status,
        })
    });
    let entries = results.into_iter().collect::<Result<Vec<_>, _>>()?;

    let levels: Vec<ProbeLevel> = grids
        .iter()
        .enumerate()
        .map(|(level, grid)| {
            let (argmin_gamma, minimax) = entries
                .iter()
                .filter(|e| e.level == level)
                .map(|e| (e.gamma, e.corner_speed()))
                .fold((f64::NAN, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
            ProbeLevel {
                level,
                n_r: grid.n_r(),
                n_theta: grid.n_theta(),
                h: corner_distance(grid),
                minimax,
                argmin_gamma,
            }
        })
        .collect();
    let growth = growth_exponent(&levels.iter().map(|l| (l.h, l.minimax)).collect::<Vec<_>>())?;
    let gamma_growth = gammas
        .iter()
        .map(|&g| {
            let pts: Vec<(f64, f64)> = levels
                .iter()
                .map(|l| {
                    let e = entries.iter().find(|e| e.level == l.level && e.gamma == g).expect("entry per task");
                    (l.h, e.corner_speed())
                })
                .collect();
            growth_exponent(&pts)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let n = levels.len();
    let last_variation = (levels[n - 1].minimax - levels[n - 2].minimax).abs() / levels[n - 2].minimax;
    Ok(ProbeReport {
        case: case.clone(),
        kutta,
        gammas,
        entries,
        levels,
        growth_exponent: growth,
        gamma_growth,
        last_variation,
    })
}

/// `max |psi(x, y) + psi(x, -y)| / max |psi|` for a grid symmetric under
/// `y -> -y` (node `(i, j)` mirrors to `(i, Ntheta/2 - 1 - j)`).
pub fn symmetry_residual(grid: &ExteriorGrid, psi: &[f64]) -> Result<f64, AnalysisError> {
    let nt = grid.n_theta();
    if !nt.is_multiple_of(2) {
        return Err(AnalysisError::Invalid("mirror symmetry needs an even angular count".into()));
    }
    let scale = psi.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(f64::MIN_POSITIVE);
    let extent = grid.nodes.iter().fold(0.0f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    let mut worst: f64 = 0.0;
    for i in 0..=grid.n_r() {
        for j in 0..nt {
            let a = grid.node_index(i, j);
            let b = grid.node_index(i, (nt / 2 + nt - 1 - j) % nt);
            let (p, q) = (grid.nodes[a], grid.nodes[b]);
            if (p[0] - q[0]).abs() > 1e-12 * extent || (p[1] + q[1]).abs() > 1e-12 * extent {
                return Err(AnalysisError::Invalid(format!("grid is not mirror symmetric at node {a}")));
            }
            worst = worst.max((psi[a] + psi[b]).abs());
        }
    }
    Ok(worst / scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gamma_grid_spans_both_kutta_values() {
        let gap = kutta_incompatibility(Complex64::from_polar(0.5, PI / 4.0));
        let g = default_gamma_grid(&gap);
        assert_eq!(g.len(), 21);
        assert!(g[0] < gap.gamma_leading && g[20] > gap.gamma_trailing);
        assert!(g.iter().any(|&v| v.abs() < 1e-12));
        let flat = default_gamma_grid(&kutta_incompatibility(Complex64::new(1.0, 0.0)));
        assert_eq!(flat, vec![0.0]);
    }

    #[test]
    fn growth_of_exact_power_law() {
        let pts: Vec<(f64, f64)> = [0.1, 0.05, 0.025, 0.0125].iter().map(|&h: &f64| (h, h.powf(-0.5))).collect();
        assert!((growth_exponent(&pts).unwrap() - 0.5).abs() < 1e-12);
        let mut inf = pts.clone();
        inf[3].1 = f64::INFINITY;
        assert_eq!(growth_exponent(&inf).unwrap(), f64::INFINITY);
    }

    #[test]
    fn low_mach_rejects_fast_streams() {
        let p = KTProfile::from_physical(1.0, 1.0, 0.0, 0.0).unwrap();
        let g = build_grid(&p, GridSpec::log_polar(10.0, 8, 16)).unwrap();
        assert!(matches!(low_mach_study(&p, 1.4, &[0.6], &g, 1e-10), Err(AnalysisError::Invalid(_))));
    }

    #[test]
    fn symmetry_of_the_vertical_plate_grid() {
        let p = KTProfile::from_physical(2.0, 1.0, PI / 2.0, 0.0).unwrap();
        let g = build_grid(&p, GridSpec::log_polar(10.0, 8, 16)).unwrap();
        let psi: Vec<f64> = g.nodes.iter().map(|q| q[1]).collect();
        assert!(symmetry_residual(&g, &psi).unwrap() < 1e-12);
        let skew = KTProfile::from_physical(2.0, 1.0, 0.3, 0.0).unwrap();
        let g = build_grid(&skew, GridSpec::log_polar(10.0, 8, 16)).unwrap();
        assert!(symmetry_residual(&g, &psi).is_err());
    }
}
