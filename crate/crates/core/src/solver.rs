//! Finite-volume solver for `div(h(|grad psi|^2/2) grad psi) = 0` outside
//! the body, with `psi = 0` on the body and Dirichlet data on the outer ring.
//!
//! Unknowns live at grid nodes. Each node's control volume is the median
//! dual of the triangles around it; with a piecewise linear `psi` the net
//! flux of `h grad psi` out of that volume equals the Galerkin residual
//! `sum_T w_T |T| h_T grad psi_T . grad phi_node`, which is what
//! [`assemble_residual`] computes. Freezing `h` gives a symmetric positive
//! definite matrix (Picard); adding the `h'` terms gives the Newton
//! Jacobian, which is also symmetric and positive definite while the flow is
//! subsonic.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conformal::KTProfile;
use crate::farfield::{FarFieldError, FarFieldState};
use crate::gas::{GasError, GasModel};
use crate::grid::ExteriorGrid;
use crate::linalg::{pcg, CsrMatrix, Preconditioner};
use crate::par;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("momentum {momentum} reaches the sonic limit in cell {cell} near ({x}, {y})")]
    Supersonic { cell: usize, x: f64, y: f64, momentum: f64 },
    #[error(transparent)]
    FarField(#[from] FarFieldError),
    #[error(transparent)]
    Gas(#[from] GasError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Picard,
    Newton,
}

/// Dirichlet data on the outer ring.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterBoundary {
    /// The far-field stream-function expansion of the configured state.
    FarField,
    /// Explicit values for the `Ntheta` outer nodes.
    Nodal(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveConfig {
    pub gas: GasModel,
    pub farfield: FarFieldState,
    /// Bound on the residual norm relative to the boundary load.
    pub tolerance: f64,
    pub max_iterations: usize,
    pub damping: f64,
    pub scheme: Scheme,
    pub outer: OuterBoundary,
    /// Picard residual below which Newton steps take over.
    pub newton_switch: f64,
}

impl SolveConfig {
    pub fn new(gas: GasModel, farfield: FarFieldState) -> Self {
        Self {
            gas,
            farfield,
            tolerance: 1e-10,
            max_iterations: 200,
            damping: 0.7,
            scheme: Scheme::Newton,
            outer: OuterBoundary::FarField,
            newton_switch: 1e-3,
        }
    }

    /// Free stream of speed `v_inf` with circulation `gamma` in `gas`.
    pub fn for_gas(gas: GasModel, v_inf: f64, gamma: f64) -> Result<Self, SolverError> {
        Ok(Self::new(gas, FarFieldState::new(&gas, v_inf, gamma)?))
    }

    /// Flow around `profile` in its flow frame: free-stream speed `|nu w_inf|`
    /// and the profile's circulation. The additive constant of the outer data
    /// is the one of the incompressible lens flow, `-Gamma ln(nu) / (2 pi)`,
    /// scaled by the free-stream density.
    pub fn for_profile(gas: GasModel, profile: &KTProfile) -> Result<Self, SolverError> {
        let v_inf = profile.physical_free_stream().norm();
        let state = FarFieldState::new(&gas, v_inf, profile.gamma)?;
        let psi_const = -state.rho_inf * profile.gamma * profile.nu.ln() / (2.0 * std::f64::consts::PI);
        Ok(Self::new(gas, state.with_psi_const(psi_const)))
    }

    pub fn validate(&self, grid: &ExteriorGrid) -> Result<(), SolverError> {
        if !(self.farfield.mach_inf < 1.0) {
            return Err(SolverError::Config(format!("free stream must be subsonic, Mach {}", self.farfield.mach_inf)));
        }
        if !(self.tolerance > 0.0) {
            return Err(SolverError::Config(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(SolverError::Config(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        if self.max_iterations == 0 {
            return Err(SolverError::Config("max_iterations must be positive".into()));
        }
        if let OuterBoundary::Nodal(v) = &self.outer {
            if v.len() != grid.n_theta() {
                return Err(SolverError::Config(format!(
                    "outer boundary needs {} values, got {}",
                    grid.n_theta(),
                    v.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iter: usize,
    pub residual: f64,
    pub max_mach: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    /// The iterate left the subsonic regime; no field is fabricated past this point.
    Supersonic { cell: usize, x: f64, y: f64, momentum: f64 },
    NotConverged,
}

/// Per-cell quantities derived from the stream function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellState {
    pub grad_psi: [f64; 2],
    /// `|grad psi|^2 / 2`
    pub m: f64,
    pub inv_density: f64,
    pub velocity: [f64; 2],
    pub mach: f64,
    pub supersonic: bool,
}

impl CellState {
    pub fn speed(&self) -> f64 {
        self.velocity[0].hypot(self.velocity[1])
    }

    pub fn density(&self) -> f64 {
        1.0 / self.inv_density
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StreamField {
    /// Nodal stream function; body nodes are exactly zero.
    pub psi: Vec<f64>,
    pub cells: Vec<CellState>,
    pub history: Vec<IterationRecord>,
    pub status: SolveStatus,
}

impl StreamField {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn final_residual(&self) -> f64 {
        self.history.last().map_or(f64::INFINITY, |r| r.residual)
    }

    pub fn max_mach(&self) -> f64 {
        self.cells.iter().map(|c| c.mach).fold(0.0, f64::max)
    }
}

const NONE: usize = usize::MAX;

/// Sparsity pattern and index maps for the interior unknowns of a grid.
struct Discretization<'g> {
    grid: &'g ExteriorGrid,
    /// node -> unknown index, or NONE for boundary nodes
    unknown: Vec<usize>,
    pattern: CsrMatrix,
    /// CSR slot for each (a, b) pair of triangle vertices, row-major
    slots: Vec<[usize; 9]>,
}

impl<'g> Discretization<'g> {
    fn new(grid: &'g ExteriorGrid) -> Self {
        let n_nodes = grid.nodes.len();
        let mut unknown = vec![NONE; n_nodes];
        let mut count = 0;
        for (n, u) in unknown.iter_mut().enumerate() {
            if !grid.is_boundary_node(n) {
                *u = count;
                count += 1;
            }
        }
        let mut rows = vec![Vec::new(); count];
        for t in &grid.triangles {
            for &a in &t.nodes {
                if unknown[a] == NONE {
                    continue;
                }
                for &b in &t.nodes {
                    if unknown[b] != NONE {
                        rows[unknown[a]].push(unknown[b]);
                    }
                }
            }
        }
        let pattern = CsrMatrix::from_pattern(rows);
        let slots = grid
            .triangles
            .iter()
            .map(|t| {
                let mut s = [NONE; 9];
                for (ia, &a) in t.nodes.iter().enumerate() {
                    for (ib, &b) in t.nodes.iter().enumerate() {
                        if unknown[a] != NONE && unknown[b] != NONE {
                            s[3 * ia + ib] = pattern.slot(unknown[a], unknown[b]).expect("pattern covers triangle");
                        }
                    }
                }
                s
            })
            .collect();
        Self { grid, unknown, pattern, slots }
    }

    fn n_unknowns(&self) -> usize {
        self.pattern.n
    }

    fn gather(&self, psi: &[f64]) -> Vec<f64> {
        let mut x = vec![0.0; self.n_unknowns()];
        for (n, &u) in self.unknown.iter().enumerate() {
            if u != NONE {
                x[u] = psi[n];
            }
        }
        x
    }

    fn scatter(&self, x: &[f64], psi: &mut [f64]) {
        for (n, &u) in self.unknown.iter().enumerate() {
            if u != NONE {
                psi[n] = x[u];
            }
        }
    }

    fn gradient(&self, t: usize, psi: &[f64]) -> [f64; 2] {
        let tri = &self.grid.triangles[t];
        let mut g = [0.0; 2];
        for k in 0..3 {
            let v = psi[tri.nodes[k]];
            g[0] += v * tri.basis_gradients[k][0];
            g[1] += v * tri.basis_gradients[k][1];
        }
        g
    }

    /// `(grad psi, h, h')` on every triangle, or the first sonic violation.
    fn triangle_states(&self, psi: &[f64], gas: &GasModel) -> Result<Vec<([f64; 2], f64, f64)>, SolverError> {
        let states = par::map_indexed(self.grid.triangles.len(), |t| {
            let g = self.gradient(t, psi);
            let m = 0.5 * (g[0] * g[0] + g[1] * g[1]);
            gas.h_div_with_prime(m).map(|(h, hp)| (g, h, hp)).map_err(|e| (t, m, e))
        });
        let mut out = Vec::with_capacity(states.len());
        for s in states {
            match s {
                Ok(v) => out.push(v),
                Err((t, m, GasError::SonicExceeded { .. })) => return Err(self.supersonic(t, m)),
                Err((_, _, e)) => return Err(e.into()),
            }
        }
        Ok(out)
    }

    fn supersonic(&self, t: usize, m: f64) -> SolverError {
        let cell = self.grid.triangles[t].cell;
        let [x, y] = self.grid.cells[cell].centroid;
        SolverError::Supersonic { cell, x, y, momentum: m }
    }

    /// Per-node residual; boundary entries hold the reaction fluxes.
    fn residual(&self, psi: &[f64], states: &[([f64; 2], f64, f64)]) -> Vec<f64> {
        let local = par::map_indexed(self.grid.triangles.len(), |t| {
            let tri = &self.grid.triangles[t];
            let (g, h, _) = states[t];
            let s = tri.weight * tri.area * h;
            tri.basis_gradients.map(|b| s * (g[0] * b[0] + g[1] * b[1]))
        });
        let mut r = vec![0.0; psi.len()];
        for (tri, contrib) in self.grid.triangles.iter().zip(&local) {
            for k in 0..3 {
                r[tri.nodes[k]] += contrib[k];
            }
        }
        r
    }

    fn interior_norm(&self, r: &[f64]) -> f64 {
        let interior: Vec<f64> =
            r.iter().zip(&self.unknown).filter(|(_, &u)| u != NONE).map(|(v, _)| *v).collect();
        par::dot(&interior, &interior).sqrt()
    }

    /// Matrix over the unknowns with triangle coefficients `h` and optional
    /// Newton terms, plus the right-hand side moved over from boundary nodes.
    fn assemble(&self, psi: &[f64], states: &[([f64; 2], f64, f64)], newton: bool) -> (CsrMatrix, Vec<f64>) {
        let local = par::map_indexed(self.grid.triangles.len(), |t| {
            let tri = &self.grid.triangles[t];
            let (g, h, hp) = states[t];
            let w = tri.weight * tri.area;
            let b = tri.basis_gradients;
            let gb = b.map(|bk| g[0] * bk[0] + g[1] * bk[1]);
            let mut k = [0.0; 9];
            for i in 0..3 {
                for j in 0..3 {
                    let mut v = h * (b[i][0] * b[j][0] + b[i][1] * b[j][1]);
                    if newton {
                        v += hp * gb[i] * gb[j];
                    }
                    k[3 * i + j] = w * v;
                }
            }
            k
        });
        let mut a = self.pattern.clone();
        a.clear();
        let mut rhs = vec![0.0; self.n_unknowns()];
        for ((tri, k), slots) in self.grid.triangles.iter().zip(&local).zip(&self.slots) {
            for i in 0..3 {
                let row = self.unknown[tri.nodes[i]];
                if row == NONE {
                    continue;
                }
                for j in 0..3 {
                    let s = slots[3 * i + j];
                    if s != NONE {
                        a.values[s] += k[3 * i + j];
                    } else if !newton {
                        rhs[row] -= k[3 * i + j] * psi[tri.nodes[j]];
                    }
                }
            }
        }
        (a, rhs)
    }

    fn uniform_states(&self, h: f64) -> Vec<([f64; 2], f64, f64)> {
        vec![([0.0, 0.0], h, 0.0); self.grid.triangles.len()]
    }
}

/// Net flux of `h grad psi` out of each node's control volume.
pub fn assemble_residual(psi: &[f64], grid: &ExteriorGrid, gas: &GasModel) -> Result<Vec<f64>, SolverError> {
    if psi.len() != grid.nodes.len() {
        return Err(SolverError::Config(format!("expected {} nodal values, got {}", grid.nodes.len(), psi.len())));
    }
    let d = Discretization::new(grid);
    let states = d.triangle_states(psi, gas)?;
    Ok(d.residual(psi, &states))
}

/// Cell averages of the triangle gradients and the derived flow state.
pub fn derived_fields(psi: &[f64], grid: &ExteriorGrid, gas: &GasModel) -> Vec<CellState> {
    let mut grads = vec![[0.0; 2]; grid.cells.len()];
    let mut weights = vec![0.0; grid.cells.len()];
    for tri in &grid.triangles {
        let mut g = [0.0; 2];
        for k in 0..3 {
            g[0] += psi[tri.nodes[k]] * tri.basis_gradients[k][0];
            g[1] += psi[tri.nodes[k]] * tri.basis_gradients[k][1];
        }
        let w = tri.weight * tri.area;
        grads[tri.cell][0] += w * g[0];
        grads[tri.cell][1] += w * g[1];
        weights[tri.cell] += w;
    }
    par::map_indexed(grid.cells.len(), |c| {
        let g = [grads[c][0] / weights[c], grads[c][1] / weights[c]];
        cell_state(g, gas)
    })
}

fn cell_state(g: [f64; 2], gas: &GasModel) -> CellState {
    let m = 0.5 * (g[0] * g[0] + g[1] * g[1]);
    match gas.h_div(m) {
        Ok(h) => {
            let velocity = [h * g[1], -h * g[0]];
            let speed = velocity[0].hypot(velocity[1]);
            let mach = gas.mach(speed, 1.0 / h).unwrap_or(f64::NAN);
            CellState { grad_psi: g, m, inv_density: h, velocity, mach, supersonic: false }
        }
        Err(_) => CellState {
            grad_psi: g,
            m,
            inv_density: f64::NAN,
            velocity: [f64::NAN, f64::NAN],
            mach: f64::NAN,
            supersonic: true,
        },
    }
}

/// Nodal Dirichlet data: zero on the body, outer ring from `config.outer`.
pub fn boundary_values(config: &SolveConfig, grid: &ExteriorGrid) -> Result<Vec<f64>, SolverError> {
    let mut psi = vec![0.0; grid.nodes.len()];
    let outer_start = grid.n_r() * grid.n_theta();
    match &config.outer {
        OuterBoundary::FarField => {
            for n in outer_start..grid.nodes.len() {
                let [x, y] = grid.nodes[n];
                psi[n] = config.farfield.psi_expansion(x, y)?;
            }
        }
        OuterBoundary::Nodal(values) => psi[outer_start..].copy_from_slice(values),
    }
    Ok(psi)
}

/// Initial guess from the far-field expansion, with the body row set to zero.
pub fn expansion_guess(config: &SolveConfig, grid: &ExteriorGrid) -> Result<Vec<f64>, SolverError> {
    let mut psi = boundary_values(config, grid)?;
    for n in grid.n_theta()..grid.n_r() * grid.n_theta() {
        let [x, y] = grid.nodes[n];
        psi[n] = config.farfield.psi_expansion(x, y)?;
    }
    Ok(psi)
}

const LINEAR_TOL: f64 = 1e-12;

fn linear_solve(a: &CsrMatrix, rhs: &[f64], x: &mut [f64]) -> f64 {
    let pre = Preconditioner::incomplete_cholesky(a);
    let out = pcg(a, rhs, x, &pre, LINEAR_TOL, 20 * a.n + 100);
    out.relative_residual
}

/// Solve the stream-function problem on `grid`.
///
/// Without an initial field the iteration starts from the far-field
/// expansion; since that guess violates the slip condition near the body,
/// the first coefficient freeze uses the free-stream density instead of the
/// guess itself. A sonic violation in any iterate aborts the solve with
/// [`SolveStatus::Supersonic`].
pub fn solve(
    config: &SolveConfig,
    grid: &ExteriorGrid,
    initial: Option<&StreamField>,
) -> Result<StreamField, SolverError> {
    config.validate(grid)?;
    let gas = &config.gas;
    let d = Discretization::new(grid);
    let bc = boundary_values(config, grid)?;
    let mut psi = match initial {
        Some(field) => {
            if field.psi.len() != grid.nodes.len() {
                return Err(SolverError::Config("initial field does not match the grid".into()));
            }
            let mut p = field.psi.clone();
            for n in 0..p.len() {
                if grid.is_boundary_node(n) {
                    p[n] = bc[n];
                }
            }
            p
        }
        None => expansion_guess(config, grid)?,
    };

    let h_inf = 1.0 / config.farfield.rho_inf;
    let (_, load) = d.assemble(&bc, &d.uniform_states(h_inf), false);
    let load_norm = par::dot(&load, &load).sqrt().max(f64::MIN_POSITIVE);

    let mut history = Vec::new();
    let abort = |psi: Vec<f64>, history: Vec<IterationRecord>, err: SolverError| match err {
        SolverError::Supersonic { cell, x, y, momentum } => Ok(StreamField {
            cells: derived_fields(&psi, grid, gas),
            psi,
            history,
            status: SolveStatus::Supersonic { cell, x, y, momentum },
        }),
        other => Err(other),
    };

    let mut states = if initial.is_none() {
        d.uniform_states(if gas.is_incompressible() { 1.0 / gas.rho_ref() } else { h_inf })
    } else {
        match d.triangle_states(&psi, gas) {
            Ok(s) => s,
            Err(e) => return abort(psi, history, e),
        }
    };
    let mut first = initial.is_none();
    let mut residual_norm = f64::INFINITY;

    for iter in 0..config.max_iterations {
        let use_newton = config.scheme == Scheme::Newton && residual_norm < config.newton_switch && !first;
        let mut candidate = psi.clone();
        if use_newton {
            let r = d.residual(&psi, &states);
            let (jac, _) = d.assemble(&psi, &states, true);
            let mut rhs = d.gather(&r);
            rhs.iter_mut().for_each(|v| *v = -*v);
            let mut delta = vec![0.0; d.n_unknowns()];
            linear_solve(&jac, &rhs, &mut delta);
            let mut x = d.gather(&psi);
            for (xi, di) in x.iter_mut().zip(&delta) {
                *xi += di;
            }
            d.scatter(&x, &mut candidate);
        } else {
            let (a, rhs) = d.assemble(&psi, &states, false);
            let mut x = d.gather(&psi);
            linear_solve(&a, &rhs, &mut x);
            let omega = if first || gas.is_incompressible() { 1.0 } else { config.damping };
            let old = d.gather(&psi);
            for (xi, oi) in x.iter_mut().zip(&old) {
                *xi = oi + omega * (*xi - oi);
            }
            d.scatter(&x, &mut candidate);
        }
        first = false;

        let new_states = match d.triangle_states(&candidate, gas) {
            Ok(s) => s,
            Err(e) => return abort(candidate, history, e),
        };
        let r = d.residual(&candidate, &new_states);
        let norm = d.interior_norm(&r) / load_norm;
        psi = candidate;
        states = new_states;
        residual_norm = norm;
        let cells = derived_fields(&psi, grid, gas);
        let max_mach = cells.iter().map(|c| c.mach).fold(0.0, f64::max);
        history.push(IterationRecord { iter, residual: norm, max_mach });
        if norm < config.tolerance {
            return Ok(StreamField { psi, cells, history, status: SolveStatus::Converged });
        }
    }
    Ok(StreamField { cells: derived_fields(&psi, grid, gas), psi, history, status: SolveStatus::NotConverged })
}

/// Relative interior residual of a nodal field, normalized like [`solve`].
pub fn relative_residual(config: &SolveConfig, grid: &ExteriorGrid, psi: &[f64]) -> Result<f64, SolverError> {
    let d = Discretization::new(grid);
    let bc = boundary_values(config, grid)?;
    let (_, load) = d.assemble(&bc, &d.uniform_states(1.0 / config.farfield.rho_inf), false);
    let load_norm = par::dot(&load, &load).sqrt().max(f64::MIN_POSITIVE);
    let states = d.triangle_states(psi, &config.gas)?;
    Ok(d.interior_norm(&d.residual(psi, &states)) / load_norm)
}

/// Whether the Picard matrix of a nodal field is symmetric.
pub fn picard_matrix_is_symmetric(grid: &ExteriorGrid, gas: &GasModel, psi: &[f64]) -> Result<bool, SolverError> {
    let d = Discretization::new(grid);
    let states = d.triangle_states(psi, gas)?;
    let (a, _) = d.assemble(psi, &states, false);
    let (j, _) = d.assemble(psi, &states, true);
    Ok(a.is_symmetric(1e-13) && j.is_symmetric(1e-13))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, GridSpec};

    fn grid(nu: f64, attack: f64, n: usize) -> ExteriorGrid {
        let p = KTProfile::from_physical(nu, 1.0, attack, 0.0).unwrap();
        build_grid(&p, GridSpec::log_polar(20.0, n / 2, n)).unwrap()
    }

    #[test]
    fn linear_field_has_zero_residual() {
        let g = grid(1.5, 0.3, 32);
        let gas = GasModel::incompressible(1.0).unwrap();
        let psi: Vec<f64> = g.nodes.iter().map(|p| 0.4 * p[1] - 0.2 * p[0]).collect();
        let r = assemble_residual(&psi, &g, &gas).unwrap();
        for n in 0..psi.len() {
            if !g.is_boundary_node(n) {
                assert!(r[n].abs() < 1e-12, "node {n}: {}", r[n]);
            }
        }
        // compressible: a uniform gradient gives a uniform h, still exact
        let gas = GasModel::normalized(1.4).unwrap();
        let r = assemble_residual(&psi, &g, &gas).unwrap();
        assert!((0..psi.len()).filter(|&n| !g.is_boundary_node(n)).all(|n| r[n].abs() < 1e-12));
    }

    #[test]
    fn residual_sums_to_zero_over_all_nodes() {
        let g = grid(1.5, 0.2, 32);
        let gas = GasModel::normalized(1.4).unwrap();
        let psi: Vec<f64> = g.nodes.iter().map(|p| 0.02 * (p[0] * 0.5).sin() * p[1]).collect();
        let r = assemble_residual(&psi, &g, &gas).unwrap();
        let total = par::compensated_sum(r.iter().copied());
        let scale: f64 = r.iter().map(|v| v.abs()).sum();
        assert!(total.abs() < 1e-12 * scale);
    }

    #[test]
    fn supersonic_gradients_are_reported() {
        let g = grid(1.0, 0.0, 32);
        let gas = GasModel::normalized(1.4).unwrap();
        let psi: Vec<f64> = g.nodes.iter().map(|p| 10.0 * p[1]).collect();
        assert!(matches!(assemble_residual(&psi, &g, &gas), Err(SolverError::Supersonic { .. })));
    }

    #[test]
    fn matrices_are_symmetric() {
        let g = grid(2.0, 0.5, 32);
        let gas = GasModel::normalized(1.4).unwrap();
        let psi: Vec<f64> = g.nodes.iter().map(|p| 0.4 * p[1] + 0.01 * p[0] * p[0]).collect();
        assert!(picard_matrix_is_symmetric(&g, &gas, &psi).unwrap());
    }

    #[test]
    fn uniform_flow_is_recovered_exactly() {
        let g = grid(2.0, 0.0, 32);
        let gas = GasModel::from_free_stream(1.4, 0.4, 1.0).unwrap();
        let config = SolveConfig::for_gas(gas, 1.0, 0.0).unwrap();
        let field = solve(&config, &g, None).unwrap();
        assert!(field.converged());
        let rho = config.farfield.rho_inf;
        for (p, v) in g.nodes.iter().zip(&field.psi) {
            assert!((v - rho * p[1]).abs() < 1e-10);
        }
        for c in &field.cells {
            assert!((c.velocity[0] - 1.0).abs() < 1e-9 && c.velocity[1].abs() < 1e-9);
            assert!((c.density() - rho).abs() < 1e-9);
        }
    }

    #[test]
    fn invalid_configurations_are_rejected() {
        let g = grid(1.0, 0.0, 32);
        let gas = GasModel::incompressible(1.0).unwrap();
        let mut config = SolveConfig::for_gas(gas, 1.0, 0.0).unwrap();
        config.tolerance = 0.0;
        assert!(matches!(solve(&config, &g, None), Err(SolverError::Config(_))));
        config.tolerance = 1e-8;
        config.outer = OuterBoundary::Nodal(vec![0.0; 3]);
        assert!(matches!(solve(&config, &g, None), Err(SolverError::Config(_))));
    }

    #[test]
    fn mach_grows_with_momentum() {
        let gas = GasModel::normalized(1.4).unwrap();
        let sonic = gas.sonic_momentum().unwrap();
        let mut last = -1.0;
        for k in 0..200 {
            let m = sonic * k as f64 / 200.0;
            let s = cell_state([(2.0 * m).sqrt(), 0.0], &gas);
            assert!(s.mach > last);
            last = s.mach;
        }
    }
}
