//! File writers. Everything written here is a pure function of its inputs,
//! so identical runs produce byte-identical files.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use cornerflow::grid::ExteriorGrid;
use cornerflow::solver::{IterationRecord, StreamField};
use serde::Serialize;

/// Frozen column order of the field table.
#[cfg(test)]
const FIELD_COLUMNS: [&str; 7] = ["x", "y", "psi", "vx", "vy", "rho", "mach"];

/// Collects the names of files written during a run for the manifest.
#[derive(Debug)]
pub struct OutDir {
    dir: PathBuf,
    written: Vec<String>,
}

impl OutDir {
    pub fn create(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        Ok(Self { dir: dir.to_path_buf(), written: Vec::new() })
    }

    fn target(&mut self, name: &str) -> PathBuf {
        if !self.written.iter().any(|w| w == name) {
            self.written.push(name.to_string());
        }
        self.dir.join(name)
    }

    pub fn write_text(&mut self, name: &str, text: &str) -> Result<()> {
        let path = self.target(name);
        fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write_text(name, &text)
    }

    pub fn write_csv<R: Serialize>(&mut self, name: &str, rows: &[R]) -> Result<()> {
        let path = self.target(name);
        let mut w = csv::Writer::from_path(&path).with_context(|| format!("cannot write {}", path.display()))?;
        for row in rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Writes the manifest last, listing every file written before it.
    pub fn finish<T: Serialize>(mut self, command: &str, seed: Option<u64>, config: &T) -> Result<PathBuf> {
        #[derive(Serialize)]
        struct Manifest<'a, T> {
            tool: &'static str,
            version: &'static str,
            command: &'a str,
            #[serde(skip_serializing_if = "Option::is_none")]
            seed: Option<u64>,
            config: &'a T,
            files: Vec<String>,
        }
        let mut files = self.written.clone();
        files.sort();
        let manifest =
            Manifest { tool: "cornerflow", version: env!("CARGO_PKG_VERSION"), command, seed, config, files };
        self.write_json("manifest.json", &manifest)?;
        Ok(self.dir.join("manifest.json"))
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FieldRow {
    pub x: f64,
    pub y: f64,
    pub psi: f64,
    pub vx: f64,
    pub vy: f64,
    pub rho: f64,
    pub mach: f64,
}

/// Nodal table: velocity, density and Mach are area-weighted averages of
/// the cells sharing each node.
pub fn field_rows(grid: &ExteriorGrid, field: &StreamField) -> Vec<FieldRow> {
    let n = grid.nodes.len();
    let mut acc = vec![[0.0f64; 5]; n];
    for (cell, state) in grid.cells.iter().zip(&field.cells) {
        let vals = [state.velocity[0], state.velocity[1], state.density(), state.mach];
        for &node in &cell.nodes {
            for k in 0..4 {
                acc[node][k] += cell.area * vals[k];
            }
            acc[node][4] += cell.area;
        }
    }
    (0..n)
        .map(|i| {
            let w = acc[i][4];
            FieldRow {
                x: grid.nodes[i][0],
                y: grid.nodes[i][1],
                psi: field.psi[i],
                vx: acc[i][0] / w,
                vy: acc[i][1] / w,
                rho: acc[i][2] / w,
                mach: acc[i][3] / w,
            }
        })
        .collect()
}

/// One JSON object per line: `{"iter": .., "residual": .., "max_mach": ..}`.
pub fn json_lines(history: &[IterationRecord]) -> Result<String> {
    let mut out = String::new();
    for record in history {
        out.push_str(&serde_json::to_string(record)?);
        out.push('\n');
    }
    Ok(out)
}

/// Rendering window `[-half, half]^2` around the body.
const HALF_WIDTH: f64 = 2.5;
const PIXELS: f64 = 600.0;

fn px(p: [f64; 2]) -> (f64, f64) {
    let s = PIXELS / (2.0 * HALF_WIDTH);
    ((p[0] + HALF_WIDTH) * s, (HALF_WIDTH - p[1]) * s)
}

fn visible(p: [f64; 2]) -> bool {
    p[0].abs() <= HALF_WIDTH * 1.2 && p[1].abs() <= HALF_WIDTH * 1.2
}

/// Blue-to-red linear ramp over `t` in `[0, 1]`.
fn color(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 1.0 };
    let r = (40.0 + 215.0 * t).round() as u8;
    let g = (90.0 + 80.0 * (1.0 - (2.0 * t - 1.0).abs())).round() as u8;
    let b = (255.0 - 215.0 * t).round() as u8;
    format!("#{r:02x}{g:02x}{b:02x}")
}

fn polygon(points: &[[f64; 2]]) -> String {
    let mut s = String::new();
    for (k, p) in points.iter().enumerate() {
        let (x, y) = px(*p);
        if k > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{x:.2},{y:.2}");
    }
    s
}

/// Cells shaded by `shade` (normalized to its range), iso-lines of the
/// nodal `contour` values, and the body outline.
pub fn svg(grid: &ExteriorGrid, shade: &[f64], contour: Option<&[f64]>, title: &str) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{w}" viewBox="0 0 {w} {w}">"#,
        w = PIXELS
    );
    let _ = writeln!(out, "<title>{title}</title>");
    let _ = writeln!(out, r##"<rect width="100%" height="100%" fill="#ffffff"/>"##);

    let finite = shade.iter().copied().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    let span = if hi > lo { hi - lo } else { 1.0 };
    out.push_str("<g stroke=\"none\" shape-rendering=\"crispEdges\">\n");
    for (cell, value) in grid.cells.iter().zip(shade) {
        let pts: Vec<[f64; 2]> = cell.nodes.iter().map(|&n| grid.nodes[n]).collect();
        if !pts.iter().any(|p| visible(*p)) {
            continue;
        }
        let _ = writeln!(out, r#"<polygon points="{}" fill="{}"/>"#, polygon(&pts), color((value - lo) / span));
    }
    out.push_str("</g>\n");

    if let Some(values) = contour {
        out.push_str("<g stroke=\"#202020\" stroke-width=\"0.8\" fill=\"none\">\n");
        for level in contour_levels(grid, values) {
            for (a, b) in iso_segments(grid, values, level) {
                if visible(a) || visible(b) {
                    let _ = writeln!(out, r#"<polyline points="{}"/>"#, polygon(&[a, b]));
                }
            }
        }
        out.push_str("</g>\n");
    }

    let body: Vec<[f64; 2]> = (0..=grid.n_theta()).map(|j| grid.nodes[grid.node_index(0, j % grid.n_theta())]).collect();
    let _ = writeln!(out, r##"<polygon points="{}" fill="#606060" stroke="#000000" stroke-width="1"/>"##, polygon(&body));
    let _ = writeln!(
        out,
        r##"<text x="8" y="18" font-family="monospace" font-size="12" fill="#000000">{title}: shade {lo:.4} .. {hi:.4}</text>"##
    );
    out.push_str("</svg>\n");
    out
}

/// Equispaced levels over the values found inside the rendering window, including zero.
fn contour_levels(grid: &ExteriorGrid, values: &[f64]) -> Vec<f64> {
    let (lo, hi) = grid
        .nodes
        .iter()
        .zip(values)
        .filter(|(p, _)| visible(**p))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (_, &v)| (a.min(v), b.max(v)));
    if !(hi > lo) {
        return vec![];
    }
    let step = (hi - lo) / 24.0;
    let k0 = (lo / step).ceil() as i64;
    let k1 = (hi / step).floor() as i64;
    (k0..=k1).map(|k| k as f64 * step).collect()
}

/// Marching squares on each quadrilateral cell with linear edge interpolation.
fn iso_segments(grid: &ExteriorGrid, values: &[f64], level: f64) -> Vec<([f64; 2], [f64; 2])> {
    let mut segments = Vec::new();
    for cell in &grid.cells {
        let mut crossings = Vec::with_capacity(4);
        for k in 0..4 {
            let (a, b) = (cell.nodes[k], cell.nodes[(k + 1) % 4]);
            let (va, vb) = (values[a] - level, values[b] - level);
            if (va < 0.0) != (vb < 0.0) {
                let t = va / (va - vb);
                let (pa, pb) = (grid.nodes[a], grid.nodes[b]);
                crossings.push([pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]);
            }
        }
        if crossings.len() == 2 {
            segments.push((crossings[0], crossings[1]));
        } else if crossings.len() == 4 {
            segments.push((crossings[0], crossings[1]));
            segments.push((crossings[2], crossings[3]));
        }
    }
    segments
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_rows_serialize_in_frozen_order() {
        let mut w = csv::Writer::from_writer(vec![]);
        w.serialize(FieldRow { x: 1.0, y: 2.0, psi: 3.0, vx: 4.0, vy: 5.0, rho: 6.0, mach: 7.0 }).unwrap();
        let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), FIELD_COLUMNS.join(","));
        assert_eq!(lines.next().unwrap(), "1.0,2.0,3.0,4.0,5.0,6.0,7.0");
    }

    #[test]
    fn color_ramp_endpoints() {
        assert_eq!(color(0.0), "#285aff");
        assert_eq!(color(1.0), "#ff5a28");
        assert_eq!(color(f64::NAN), color(1.0));
    }
}
