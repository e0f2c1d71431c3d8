//! Body-fitted exterior grids: a polar grid `r_i e^(i theta_j)` in the
//! circle plane pushed through the Kármán–Trefftz map and rotated into the
//! flow frame.
//!
//! Angular nodes sit at `theta_j = (j + 1/2) dtheta`, so the corner
//! preimages `zeta = +-1` are midpoints of body edges and no node lands on a
//! corner. Radial nodes are spaced geometrically: consecutive radial
//! increments grow by the factor `stretch`.
//!
//! Every quadrilateral cell carries both of its diagonal triangulations with
//! weight one half each. The solver assembles on these triangles, which keeps
//! the discrete operator symmetric and invariant under reflections of the
//! grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::conformal::{kt_forward, kt_inverse, principal_arg, ConformalError, Corner, KTProfile};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("invalid grid parameters: {0}")]
    Config(String),
    #[error(transparent)]
    Conformal(#[from] ConformalError),
    #[error("cell {0} has non-positive area")]
    Inverted(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    /// Outer radius in the circle plane.
    #[serde(rename = "R")]
    pub outer_radius: f64,
    #[serde(rename = "Nr")]
    pub n_r: usize,
    #[serde(rename = "Ntheta")]
    pub n_theta: usize,
    #[serde(default = "default_stretch")]
    pub stretch: f64,
}

fn default_stretch() -> f64 {
    1.08
}

impl GridSpec {
    pub fn new(outer_radius: f64, n_r: usize, n_theta: usize, stretch: f64) -> Self {
        Self { outer_radius, n_r, n_theta, stretch }
    }

    /// Radii growing by the constant factor `R^(1/Nr)`, giving cells of equal
    /// shape in logarithmic polar coordinates.
    pub fn log_polar(outer_radius: f64, n_r: usize, n_theta: usize) -> Self {
        Self::new(outer_radius, n_r, n_theta, outer_radius.powf(1.0 / n_r as f64))
    }

    /// Doubled resolution whose radial nodes contain the current ones.
    pub fn refined(&self) -> Self {
        Self::new(self.outer_radius, 2 * self.n_r, 2 * self.n_theta, self.stretch.sqrt())
    }

    pub fn validate(&self) -> Result<(), GridError> {
        if !(self.outer_radius > 1.0) || !self.outer_radius.is_finite() {
            return Err(GridError::Config(format!("outer radius must exceed 1, got {}", self.outer_radius)));
        }
        if self.n_r < 8 {
            return Err(GridError::Config(format!("Nr must be at least 8, got {}", self.n_r)));
        }
        if self.n_theta < 16 || !self.n_theta.is_multiple_of(2) {
            return Err(GridError::Config(format!("Ntheta must be even and at least 16, got {}", self.n_theta)));
        }
        if !(self.stretch >= 1.0) || !self.stretch.is_finite() {
            return Err(GridError::Config(format!("stretch must be at least 1, got {}", self.stretch)));
        }
        Ok(())
    }

    /// Radii `r_0 = 1, ..., r_Nr = R`.
    pub fn radii(&self) -> Vec<f64> {
        let n = self.n_r;
        let span = self.outer_radius - 1.0;
        let q = self.stretch;
        let weights: Vec<f64> = if q == 1.0 {
            (0..=n).map(|i| i as f64 / n as f64).collect()
        } else {
            let total = q.powi(n as i32) - 1.0;
            (0..=n).map(|i| (q.powi(i as i32) - 1.0) / total).collect()
        };
        let mut radii: Vec<f64> = weights.into_iter().map(|w| 1.0 + span * w).collect();
        radii[0] = 1.0;
        radii[n] = self.outer_radius;
        radii
    }
}

/// Quadrilateral cell; node order is counter-clockwise:
/// `(i, j), (i+1, j), (i+1, j+1), (i, j+1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub nodes: [usize; 4],
    pub area: f64,
    pub centroid: [f64; 2],
    pub face_midpoints: [[f64; 2]; 4],
    /// Outward normals scaled by face length; face `k` joins nodes `k` and `k+1`.
    pub face_normals: [[f64; 2]; 4],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Triangle {
    pub nodes: [usize; 3],
    pub cell: usize,
    pub area: f64,
    /// Gradients of the three linear hat functions.
    pub basis_gradients: [[f64; 2]; 3],
    /// Quadrature weight: one half, since each cell is covered twice.
    pub weight: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExteriorGrid {
    pub spec: GridSpec,
    pub nu: f64,
    /// Rotation from the lens frame into the flow frame.
    pub rotation: f64,
    pub radii: Vec<f64>,
    pub nodes: Vec<[f64; 2]>,
    pub cells: Vec<Cell>,
    pub triangles: Vec<Triangle>,
    /// Cell columns `j` straddling the trailing and leading corner preimages.
    pub corner_columns: [usize; 2],
}

pub fn build_grid(profile: &KTProfile, spec: GridSpec) -> Result<ExteriorGrid, GridError> {
    spec.validate()?;
    let (n_r, n_theta) = (spec.n_r, spec.n_theta);
    let radii = spec.radii();
    let dtheta = 2.0 * PI / n_theta as f64;
    let rotation = profile.flow_angle();
    let rot = Complex64::from_polar(1.0, rotation);

    let mut nodes = Vec::with_capacity((n_r + 1) * n_theta);
    for &r in &radii {
        for j in 0..n_theta {
            let zeta = Complex64::from_polar(r, (j as f64 + 0.5) * dtheta);
            let z = rot * kt_forward(zeta, profile.nu)?;
            nodes.push([z.re, z.im]);
        }
    }

    let index = |i: usize, j: usize| i * n_theta + (j % n_theta);
    let mut cells = Vec::with_capacity(n_r * n_theta);
    let mut triangles = Vec::with_capacity(4 * n_r * n_theta);
    for i in 0..n_r {
        for j in 0..n_theta {
            let ids = [index(i, j), index(i + 1, j), index(i + 1, j + 1), index(i, j + 1)];
            let cell_id = cells.len();
            let cell = make_cell(ids, &nodes);
            if !(cell.area > 0.0) {
                return Err(GridError::Inverted(cell_id));
            }
            let scale = (0..4)
                .map(|k| dist_sq(nodes[ids[k]], nodes[ids[(k + 1) % 4]]))
                .fold(0.0f64, f64::max);
            for tri in [[0, 1, 2], [0, 2, 3], [0, 1, 3], [1, 2, 3]] {
                let tn = [ids[tri[0]], ids[tri[1]], ids[tri[2]]];
                if let Some(t) = make_triangle(tn, cell_id, &nodes, scale) {
                    triangles.push(t);
                }
            }
            cells.push(cell);
        }
    }

    Ok(ExteriorGrid {
        spec,
        nu: profile.nu,
        rotation,
        radii,
        nodes,
        cells,
        triangles,
        corner_columns: [n_theta - 1, n_theta / 2 - 1],
    })
}

fn dist_sq(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)
}

fn make_cell(ids: [usize; 4], nodes: &[[f64; 2]]) -> Cell {
    let p: Vec<[f64; 2]> = ids.iter().map(|&n| nodes[n]).collect();
    let mut twice_area = 0.0;
    let mut cx = 0.0;
    let mut cy = 0.0;
    let mut face_midpoints = [[0.0; 2]; 4];
    let mut face_normals = [[0.0; 2]; 4];
    for k in 0..4 {
        let a = p[k];
        let b = p[(k + 1) % 4];
        let cross = a[0] * b[1] - b[0] * a[1];
        twice_area += cross;
        cx += (a[0] + b[0]) * cross;
        cy += (a[1] + b[1]) * cross;
        face_midpoints[k] = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
        face_normals[k] = [b[1] - a[1], a[0] - b[0]];
    }
    let area = 0.5 * twice_area;
    let centroid = if area.abs() > 0.0 {
        [cx / (6.0 * area), cy / (6.0 * area)]
    } else {
        [p.iter().map(|q| q[0]).sum::<f64>() / 4.0, p.iter().map(|q| q[1]).sum::<f64>() / 4.0]
    };
    Cell { nodes: ids, area, centroid, face_midpoints, face_normals }
}

fn make_triangle(ids: [usize; 3], cell: usize, nodes: &[[f64; 2]], scale: f64) -> Option<Triangle> {
    let [p0, p1, p2] = ids.map(|n| nodes[n]);
    let twice_area = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
    // two body nodes coincide at flat-plate corners
    if twice_area <= 1e-13 * scale {
        return None;
    }
    let g = |a: [f64; 2], b: [f64; 2]| [(a[1] - b[1]) / twice_area, (b[0] - a[0]) / twice_area];
    Some(Triangle {
        nodes: ids,
        cell,
        area: 0.5 * twice_area,
        basis_gradients: [g(p1, p2), g(p2, p0), g(p0, p1)],
        weight: 0.5,
    })
}

impl ExteriorGrid {
    pub fn n_r(&self) -> usize {
        self.spec.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.spec.n_theta
    }

    pub fn node_index(&self, i: usize, j: usize) -> usize {
        i * self.spec.n_theta + (j % self.spec.n_theta)
    }

    pub fn cell_index(&self, i: usize, j: usize) -> usize {
        i * self.spec.n_theta + (j % self.spec.n_theta)
    }

    pub fn node(&self, i: usize, j: usize) -> Complex64 {
        let p = self.nodes[self.node_index(i, j)];
        Complex64::new(p[0], p[1])
    }

    pub fn is_body_node(&self, n: usize) -> bool {
        n < self.spec.n_theta
    }

    pub fn is_outer_node(&self, n: usize) -> bool {
        n >= self.spec.n_r * self.spec.n_theta
    }

    pub fn is_boundary_node(&self, n: usize) -> bool {
        self.is_body_node(n) || self.is_outer_node(n)
    }

    pub fn theta_step(&self) -> f64 {
        2.0 * PI / self.spec.n_theta as f64
    }

    fn rotation(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.rotation)
    }

    /// Corner position in the flow frame.
    pub fn corner_position(&self, corner: Corner) -> Complex64 {
        self.rotation() * corner.position()
    }

    /// Unit vector along the bisector of the fluid sector at `corner`, flow frame.
    pub fn corner_bisector(&self, corner: Corner) -> Complex64 {
        self.rotation() * corner.bisector()
    }

    /// The `k` cells whose centroids lie closest to `corner`, nearest first.
    pub fn nearest_cells(&self, corner: Corner, k: usize) -> Vec<usize> {
        let c = self.corner_position(corner);
        // candidates: the first few rings around the corner column
        let col = self.corner_columns[corner_slot(corner)] as isize;
        let reach = (k as isize).max(2);
        let mut candidates = Vec::new();
        for i in 0..(reach as usize).min(self.spec.n_r) {
            for dj in -reach..=reach {
                let j = (col + dj).rem_euclid(self.spec.n_theta as isize) as usize;
                candidates.push(self.cell_index(i, j));
            }
        }
        let dist = |id: usize| {
            let p = self.cells[id].centroid;
            (Complex64::new(p[0], p[1]) - c).norm()
        };
        candidates.sort_by(|&a, &b| dist(a).total_cmp(&dist(b)).then(a.cmp(&b)));
        candidates.dedup();
        candidates.truncate(k);
        candidates
    }

    /// Cells of the corner column ordered outward from the body.
    pub fn corner_column_cells(&self, corner: Corner) -> Vec<usize> {
        let j = self.corner_columns[corner_slot(corner)];
        (0..self.spec.n_r).map(|i| self.cell_index(i, j)).collect()
    }

    /// Fractional grid coordinates `(i, j)` of a flow-frame point.
    pub fn locate(&self, z: Complex64) -> Result<(f64, f64), GridError> {
        let zeta = kt_inverse(z * self.rotation().conj(), self.nu)?;
        let r = zeta.norm().max(1.0);
        if r > self.spec.outer_radius {
            return Err(GridError::Config(format!("point {z} lies outside the grid")));
        }
        let i0 = self.radii.partition_point(|&ri| ri <= r).clamp(1, self.spec.n_r) - 1;
        let fi = i0 as f64 + (r - self.radii[i0]) / (self.radii[i0 + 1] - self.radii[i0]);
        let theta = principal_arg(zeta).rem_euclid(2.0 * PI);
        let fj = (theta / self.theta_step() - 0.5).rem_euclid(self.spec.n_theta as f64);
        Ok((fi, fj))
    }

    /// Bilinear interpolation of nodal values in grid-index space.
    pub fn interpolate(&self, values: &[f64], z: Complex64) -> Result<f64, GridError> {
        let (fi, fj) = self.locate(z)?;
        let i0 = (fi.floor() as usize).min(self.spec.n_r - 1);
        let j0 = fj.floor() as usize % self.spec.n_theta;
        let (s, t) = (fi - i0 as f64, fj - fj.floor());
        let v = |i: usize, j: usize| values[self.node_index(i, j)];
        Ok((1.0 - s) * (1.0 - t) * v(i0, j0)
            + s * (1.0 - t) * v(i0 + 1, j0)
            + s * t * v(i0 + 1, j0 + 1)
            + (1.0 - s) * t * v(i0, j0 + 1))
    }

    /// Largest cell diameter (longest diagonal) among cells in the first `rings` rings.
    pub fn max_cell_diameter_near_body(&self, rings: usize) -> f64 {
        let mut max: f64 = 0.0;
        for i in 0..rings.min(self.spec.n_r) {
            for j in 0..self.spec.n_theta {
                let c = &self.cells[self.cell_index(i, j)];
                let d1 = dist_sq(self.nodes[c.nodes[0]], self.nodes[c.nodes[2]]);
                let d2 = dist_sq(self.nodes[c.nodes[1]], self.nodes[c.nodes[3]]);
                max = max.max(d1.max(d2).sqrt());
            }
        }
        max
    }
}

fn corner_slot(corner: Corner) -> usize {
    match corner {
        Corner::Trailing => 0,
        Corner::Leading => 1,
    }
}
