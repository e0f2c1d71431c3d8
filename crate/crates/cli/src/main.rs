#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use cornerflow::analysis::{kutta_incompatibility, low_mach_study, nonexistence_probe};
use cornerflow::experiments::{self, DEFAULT_SEED, SUITES};
use cornerflow::grid::{build_grid, ExteriorGrid};
use cornerflow::solver::{solve, SolveStatus, StreamField};
use cornerflow::Corner;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use config::{Format, RunConfig, SweepSection};
use output::{field_rows, json_lines, svg, OutDir};

/// Environment variable capping the number of sweep worker threads.
const THREADS_ENV: &str = "CORNERFLOW_THREADS";

#[derive(Debug, Parser)]
#[command(name = "cornerflow", version, about = "Irrotational flows around bodies with protruding corners")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Run configuration (JSON)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory; overrides outputs.dir
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Comma-separated output formats; overrides outputs.formats
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_format)]
    format: Option<Vec<Format>>,
    /// Seed for randomized verification suites
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve for the stream function of one configuration
    Solve,
    /// Print the trailing- and leading-edge Kutta circulations and their gap
    Kutta {
        #[arg(long)]
        nu: Option<f64>,
        /// Argument of the circle-plane free stream, degrees
        #[arg(long, allow_hyphen_values = true)]
        attack_deg: Option<f64>,
        /// Modulus of the circle-plane free stream
        #[arg(long)]
        w_inf_mag: Option<f64>,
    },
    /// Run a named verification suite, or `all`
    Verify { suite: String },
    /// Circulation/refinement or Mach sweep described by the `sweep` section
    Sweep,
    /// Build and export the body-fitted grid
    Grid,
}

fn parse_format(s: &str) -> Result<Format, String> {
    match s.trim() {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        "svg" => Ok(Format::Svg),
        other => Err(format!("unknown format {other:?}; expected csv, json or svg")),
    }
}

/// Failure with a chosen exit code.
#[derive(Debug)]
struct Exit(u8, anyhow::Error);

impl<E: Into<anyhow::Error>> From<E> for Exit {
    fn from(e: E) -> Self {
        Exit(1, e.into())
    }
}

fn bad_config(msg: impl std::fmt::Display) -> Exit {
    Exit(1, anyhow!("invalid configuration: {msg}"))
}

fn main() -> ExitCode {
    // usage errors share exit code 1 with bad configs; 2 is reserved for supersonic aborts
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Exit(code, e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Exit> {
    match cli.command {
        Command::Solve => cmd_solve(&load_config(&cli.common)?),
        Command::Grid => cmd_grid(&load_config(&cli.common)?),
        Command::Sweep => cmd_sweep(&load_config(&cli.common)?),
        Command::Kutta { nu, attack_deg, w_inf_mag } => cmd_kutta(&cli.common, nu, attack_deg, w_inf_mag),
        Command::Verify { suite } => cmd_verify(&cli.common, &suite),
    }
}

/// Config file with command-line overrides applied, then validated.
fn load_config(common: &Common) -> Result<RunConfig, Exit> {
    let path = common.config.as_deref().ok_or_else(|| bad_config("--config PATH is required"))?;
    let mut config = RunConfig::load(path).map_err(bad_config)?;
    if let Some(out) = &common.out {
        config.outputs.dir = out.clone();
    }
    if let Some(formats) = &common.format {
        let mut formats = formats.clone();
        formats.sort();
        formats.dedup();
        config.outputs.formats = formats;
    }
    config.validate().map_err(bad_config)?;
    Ok(config)
}

fn out_dir(common: &Common, fallback: Option<&Path>) -> PathBuf {
    common.out.clone().or_else(|| fallback.map(Path::to_path_buf)).unwrap_or_else(|| PathBuf::from("cornerflow-out"))
}

fn status_label(status: &SolveStatus) -> &'static str {
    match status {
        SolveStatus::Converged => "converged",
        SolveStatus::Supersonic { .. } => "supersonic",
        SolveStatus::NotConverged => "not_converged",
    }
}

/// Largest speed among the four cells nearest each corner.
fn corner_speeds(grid: &ExteriorGrid, field: &StreamField) -> [f64; 2] {
    Corner::BOTH.map(|c| grid.nearest_cells(c, 4).iter().map(|&id| field.cells[id].speed()).fold(0.0, f64::max))
}

fn cmd_solve(config: &RunConfig) -> Result<u8, Exit> {
    let profile = config.kt_profile().map_err(bad_config)?;
    let solve_config = config.solve_config().map_err(bad_config)?;
    let grid = build_grid(&profile, config.grid.spec()).map_err(bad_config)?;
    let field = solve(&solve_config, &grid, None).map_err(bad_config)?;

    let mut out = OutDir::create(&config.outputs.dir)?;
    let corners = corner_speeds(&grid, &field);
    let report = json!({
        "status": field.status,
        "iterations": field.history.len(),
        "final_residual": field.final_residual(),
        "max_mach": field.max_mach(),
        "gamma": profile.gamma,
        "rho_inf": solve_config.farfield.rho_inf,
        "mach_inf": solve_config.farfield.mach_inf,
        "corner_speeds": { "trailing": corners[0], "leading": corners[1] },
        "nodes": grid.nodes.len(),
        "cells": grid.cells.len(),
    });
    out.write_json("report.json", &report)?;
    if config.wants(Format::Json) {
        out.write_text("convergence.jsonl", &json_lines(&field.history)?)?;
    }
    if config.wants(Format::Csv) {
        out.write_csv("field.csv", &field_rows(&grid, &field))?;
    }
    if config.wants(Format::Svg) {
        let compressible = solve_config.farfield.mach_inf > 0.0;
        let shade: Vec<f64> = field.cells.iter().map(|c| if compressible { c.mach } else { c.speed() }).collect();
        let title = if compressible { "Mach number" } else { "speed" };
        out.write_text("field.svg", &svg(&grid, &shade, Some(&field.psi), title))?;
    }
    out.finish("solve", None, config)?;

    println!(
        "{}: {} iterations, residual {:.3e}, max Mach {:.4}, corner speeds {:.4} / {:.4}",
        status_label(&field.status),
        field.history.len(),
        field.final_residual(),
        field.max_mach(),
        corners[0],
        corners[1]
    );
    Ok(match field.status {
        SolveStatus::Converged => 0,
        SolveStatus::Supersonic { x, y, .. } => {
            eprintln!("supersonic iterate near ({x:.4}, {y:.4}); aborted");
            2
        }
        SolveStatus::NotConverged => 3,
    })
}

fn cmd_kutta(common: &Common, nu: Option<f64>, attack_deg: Option<f64>, w_inf_mag: Option<f64>) -> Result<u8, Exit> {
    let base = match &common.config {
        Some(_) => Some(load_config(common)?),
        None => None,
    };
    let nu = nu.or(base.as_ref().map(|c| c.profile.nu)).unwrap_or(2.0);
    let attack = attack_deg
        .or(base.as_ref().map(|c| c.profile.attack_angle_deg))
        .ok_or_else(|| bad_config("--attack-deg or --config is required"))?;
    let mag = w_inf_mag.or(base.as_ref().map(|c| c.profile.w_inf_mag)).unwrap_or(1.0);
    if !(nu > 1.0 - 1e-15 && nu <= 2.0) || !attack.is_finite() || !(mag > 0.0 && mag.is_finite()) {
        return Err(bad_config(format!("need nu in [1, 2], finite angle and positive |w|, got {nu}, {attack}, {mag}")));
    }
    let gap = kutta_incompatibility(Complex64::from_polar(mag, attack.to_radians()));
    println!("gamma_trailing = {:.12}", gap.gamma_trailing);
    println!("gamma_leading  = {:.12}", gap.gamma_leading);
    println!("gap            = {:.12}", gap.gap);

    #[derive(Serialize)]
    struct Resolved {
        nu: f64,
        attack_angle_deg: f64,
        w_inf_mag: f64,
    }
    let mut out = OutDir::create(&out_dir(common, base.as_ref().map(|c| c.outputs.dir.as_path())))?;
    out.write_json("kutta.json", &gap)?;
    out.finish("kutta", None, &Resolved { nu, attack_angle_deg: attack, w_inf_mag: mag })?;
    Ok(0)
}

fn cmd_verify(common: &Common, suite: &str) -> Result<u8, Exit> {
    let names: Vec<&str> = if suite == "all" {
        SUITES.to_vec()
    } else if SUITES.contains(&suite) {
        vec![suite]
    } else {
        return Err(Exit(1, anyhow!("unknown suite {suite:?}; available: all, {}", SUITES.join(", "))));
    };
    let seed = common.seed.unwrap_or(DEFAULT_SEED);
    let mut out = OutDir::create(&out_dir(common, None))?;
    let mut all_passed = true;
    for name in &names {
        let report = experiments::run_suite(name, seed).map_err(|e| Exit(4, anyhow!("{name}: {e}")))?;
        for check in &report.checks {
            println!("  {} {:<58} {:>14.6e}  {}", if check.passed { "ok  " } else { "FAIL" }, check.label, check.value, check.bound);
        }
        println!("{} {name}", if report.passed() { "PASS" } else { "FAIL" });
        all_passed &= report.passed();
        out.write_json(&format!("verify-{name}.json"), &report)?;
    }
    out.finish("verify", Some(seed), &json!({ "suite": suite, "seed": seed }))?;
    Ok(if all_passed { 0 } else { 4 })
}

/// Rayon pool honouring `CORNERFLOW_THREADS`.
fn sweep_pool() -> Result<rayon::ThreadPool, Exit> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(value) = std::env::var(THREADS_ENV) {
        let n: usize = value
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| bad_config(format!("{THREADS_ENV} must be a positive integer, got {value:?}")))?;
        builder = builder.num_threads(n);
    }
    builder.build().context("cannot start worker threads").map_err(Exit::from)
}

#[derive(Serialize)]
struct SweepRow {
    gamma: f64,
    level: usize,
    trailing_speed: f64,
    leading_speed: f64,
    max_mach: f64,
    status: &'static str,
}

#[derive(Serialize)]
struct LowMachCsvRow {
    mach_inf: f64,
    distance: f64,
    converged: bool,
    monotone: bool,
    max_mach: f64,
    iterations: usize,
}

fn cmd_sweep(config: &RunConfig) -> Result<u8, Exit> {
    let sweep = config.sweep.clone().ok_or_else(|| bad_config("sweep needs a `sweep` section"))?;
    let pool = sweep_pool()?;
    let mut out = OutDir::create(&config.outputs.dir)?;
    match sweep {
        SweepSection::Nonexistence { levels, gammas } => {
            let case = config.probe_case(levels, gammas);
            let report = pool.install(|| nonexistence_probe(&case)).map_err(bad_config)?;
            if config.wants(Format::Csv) {
                let rows: Vec<SweepRow> = report
                    .entries
                    .iter()
                    .map(|e| SweepRow {
                        gamma: e.gamma,
                        level: e.level,
                        trailing_speed: e.trailing_speed,
                        leading_speed: e.leading_speed,
                        max_mach: e.max_mach,
                        status: status_label(&e.status),
                    })
                    .collect();
                out.write_csv("sweep.csv", &rows)?;
                out.write_csv("levels.csv", &report.levels)?;
            }
            if config.wants(Format::Json) {
                out.write_json("sweep.json", &report)?;
            }
            for l in &report.levels {
                println!("level {} ({}x{}): h {:.4e}, minimax {:.6} at gamma {:.4}", l.level, l.n_r, l.n_theta, l.h, l.minimax, l.argmin_gamma);
            }
            let verdict = if report.growth_exponent > 0.1 {
                "grows under refinement"
            } else if report.last_variation < 0.05 {
                "stabilizes"
            } else {
                "inconclusive"
            };
            println!(
                "growth exponent {:.4}, last variation {:.3e}: minimax corner speed {verdict}",
                report.growth_exponent, report.last_variation
            );
        }
        SweepSection::LowMach { machs } => {
            let profile = config.kt_profile().map_err(bad_config)?;
            let grid = build_grid(&profile, config.grid.spec()).map_err(bad_config)?;
            let study = pool
                .install(|| low_mach_study(&profile, config.gas.gamma, &machs, &grid, config.solver.tol))
                .map_err(bad_config)?;
            let rows: Vec<LowMachCsvRow> = study
                .rows
                .iter()
                .map(|r| LowMachCsvRow {
                    mach_inf: r.mach_inf,
                    distance: r.distance,
                    converged: r.converged,
                    monotone: r.monotone,
                    max_mach: r.max_mach,
                    iterations: r.iterations,
                })
                .collect();
            if config.wants(Format::Csv) {
                out.write_csv("low_mach.csv", &rows)?;
            }
            if config.wants(Format::Json) {
                out.write_json("low_mach.json", &study)?;
            }
            for r in &rows {
                println!("M = {:.3}: distance {:.6e}, max Mach {:.4}, converged {}", r.mach_inf, r.distance, r.max_mach, r.converged);
            }
        }
    }
    out.finish("sweep", None, config)?;
    Ok(0)
}

#[derive(Serialize)]
struct GridRow {
    i: usize,
    j: usize,
    x: f64,
    y: f64,
}

fn cmd_grid(config: &RunConfig) -> Result<u8, Exit> {
    let profile = config.kt_profile().map_err(bad_config)?;
    let grid = build_grid(&profile, config.grid.spec()).map_err(bad_config)?;
    let mut out = OutDir::create(&config.outputs.dir)?;
    let (nr, nt) = (grid.n_r(), grid.n_theta());
    let min_area = grid.cells.iter().map(|c| c.area).fold(f64::INFINITY, f64::min);
    let diameter = grid.max_cell_diameter_near_body((nr / 8).max(1));
    if config.wants(Format::Csv) {
        let rows: Vec<GridRow> = (0..=nr)
            .flat_map(|i| (0..nt).map(move |j| (i, j)))
            .map(|(i, j)| {
                let p = grid.nodes[grid.node_index(i, j)];
                GridRow { i, j, x: p[0], y: p[1] }
            })
            .collect();
        out.write_csv("grid.csv", &rows)?;
    }
    if config.wants(Format::Json) {
        out.write_json(
            "grid.json",
            &json!({
                "spec": grid.spec,
                "rotation": grid.rotation,
                "nodes": grid.nodes.len(),
                "cells": grid.cells.len(),
                "min_cell_area": min_area,
                "max_cell_diameter_near_body": diameter,
            }),
        )?;
    }
    if config.wants(Format::Svg) {
        let shade: Vec<f64> = grid.cells.iter().map(|c| c.area.ln()).collect();
        out.write_text("grid.svg", &svg(&grid, &shade, None, "log cell area"))?;
    }
    out.finish("grid", None, config)?;
    println!("{} nodes, {} cells; min cell area {:.3e}, max diameter near body {:.3e}", grid.nodes.len(), grid.cells.len(), min_area, diameter);
    Ok(0)
}
