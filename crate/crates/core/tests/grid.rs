use std::f64::consts::PI;

use cornerflow::conformal::kt_forward;
use cornerflow::grid::{build_grid, ExteriorGrid, GridError, GridSpec};
use cornerflow::{Corner, KTProfile};
use num_complex::Complex64;

fn lens(nu: f64) -> KTProfile {
    KTProfile::from_physical(nu, 1.0, 0.3, 0.0).unwrap()
}

/// Area enclosed by the image of `|zeta| = r`, by the shoelace formula on a fine polygon.
fn enclosed_area(nu: f64, r: f64) -> f64 {
    let n = 200_000;
    let pts: Vec<Complex64> =
        (0..n).map(|k| kt_forward(Complex64::from_polar(r, 2.0 * PI * (k as f64 + 0.5) / n as f64), nu).unwrap()).collect();
    0.5 * (0..n).map(|k| (pts[k].conj() * pts[(k + 1) % n]).im).sum::<f64>()
}

fn near_corner(grid: &ExteriorGrid, z: Complex64, radius: f64) -> bool {
    Corner::BOTH.iter().any(|&c| (z - grid.corner_position(c)).norm() < radius)
}

#[test]
fn cell_areas_sum_to_the_exterior_area() {
    for nu in [1.5, 2.0] {
        let grid = build_grid(&lens(nu), GridSpec::log_polar(10.0, 128, 128)).unwrap();
        let total: f64 = grid.cells.iter().map(|c| c.area).sum();
        let exact = enclosed_area(nu, 10.0) - enclosed_area(nu, 1.0);
        assert!((total / exact - 1.0).abs() < 5e-3, "nu={nu}: {total} vs {exact}");
    }
}

#[test]
fn refinement_halves_the_cell_diameter() {
    let spec = GridSpec::log_polar(20.0, 32, 32);
    let coarse = build_grid(&lens(1.5), spec).unwrap();
    let fine = build_grid(&lens(1.5), spec.refined()).unwrap();
    assert_eq!(fine.n_r(), 64);
    // fine radial nodes contain the coarse ones
    for (i, r) in coarse.radii.iter().enumerate() {
        assert!((fine.radii[2 * i] - r).abs() < 1e-12 * r);
    }
    let ratio = fine.max_cell_diameter_near_body(8) / coarse.max_cell_diameter_near_body(4);
    assert!((ratio - 0.5).abs() < 0.05, "{ratio}");
}

#[test]
fn grid_lines_are_orthogonal_away_from_corners() {
    for nu in [1.1, 1.5, 1.9] {
        let grid = build_grid(&lens(nu), GridSpec::log_polar(20.0, 64, 64)).unwrap();
        let nt = grid.n_theta();
        let mut worst: f64 = 0.0;
        for i in 1..grid.n_r() {
            for j in 0..nt {
                let p = grid.node(i, j);
                if near_corner(&grid, p, 0.2) {
                    continue;
                }
                let radial = grid.node(i + 1, j) - grid.node(i - 1, j);
                let angular = grid.node(i, (j + 1) % nt) - grid.node(i, (j + nt - 1) % nt);
                let cos = (radial.conj() * angular).re / (radial.norm() * angular.norm());
                worst = worst.max((cos.acos().to_degrees() - 90.0).abs());
            }
        }
        assert!(worst < 2.0, "nu={nu}: {worst} degrees");
    }
}

#[test]
fn no_node_sits_on_a_corner() {
    let grid = build_grid(&lens(1.5), GridSpec::log_polar(20.0, 32, 32)).unwrap();
    for j in 0..grid.n_theta() {
        assert!(!near_corner(&grid, grid.node(0, j), 1e-6));
    }
    for corner in Corner::BOTH {
        let cells = grid.nearest_cells(corner, 4);
        assert_eq!(cells.len(), 4);
        let c = grid.corner_position(corner);
        for id in cells {
            let p = grid.cells[id].centroid;
            assert!((Complex64::new(p[0], p[1]) - c).norm() < 0.2);
        }
    }
}

#[test]
fn bad_specs_are_rejected() {
    for spec in [
        GridSpec::new(1.0, 32, 32, 1.1),
        GridSpec::new(10.0, 4, 32, 1.1),
        GridSpec::new(10.0, 32, 33, 1.1),
        GridSpec::new(10.0, 32, 32, 0.9),
    ] {
        assert!(matches!(build_grid(&lens(1.5), spec), Err(GridError::Config(_))), "{spec:?}");
    }
}

#[test]
fn interpolation_reproduces_linear_data() {
    let grid = build_grid(&lens(1.5), GridSpec::log_polar(20.0, 64, 64)).unwrap();
    let values: Vec<f64> = grid.nodes.iter().map(|p| 2.0 * p[0] - 3.0 * p[1] + 1.0).collect();
    for z in [Complex64::new(3.0, 4.0), Complex64::new(-7.0, 0.5), Complex64::new(0.2, -9.0)] {
        let v = grid.interpolate(&values, z).unwrap();
        let exact = 2.0 * z.re - 3.0 * z.im + 1.0;
        assert!((v - exact).abs() < 1e-2 * exact.abs().max(1.0), "{z}: {v} vs {exact}");
    }
}
