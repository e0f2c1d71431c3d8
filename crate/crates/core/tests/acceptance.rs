//! End-to-end acceptance: every named suite must pass within its time budget.
//! One PASS/FAIL line is printed per criterion; run with `--nocapture` to see them.

use std::time::{Duration, Instant};

use cornerflow::experiments::{run_suite, SuiteReport, DEFAULT_SEED};

struct Criterion {
    id: usize,
    suite: &'static str,
    title: &'static str,
    budget: Duration,
}

const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, suite: "kutta-formulas", title: "Kutta formulas", budget: Duration::from_secs(1) },
    Criterion { id: 2, suite: "kt-roundtrip", title: "KT map roundtrip", budget: Duration::from_secs(1) },
    Criterion { id: 3, suite: "bernoulli", title: "Bernoulli consistency", budget: Duration::from_secs(1) },
    Criterion { id: 4, suite: "solver-oracle", title: "solver vs conformal oracle", budget: Duration::from_secs(60) },
    Criterion { id: 5, suite: "corner-exponent-lens", title: "corner singularity exponent", budget: Duration::from_secs(60) },
    Criterion { id: 6, suite: "circulation-fit", title: "far-field circulation", budget: Duration::from_secs(10) },
    Criterion { id: 7, suite: "low-mach", title: "low-Mach limit", budget: Duration::from_secs(120) },
    Criterion { id: 8, suite: "subsolution", title: "subsolution suite", budget: Duration::from_secs(5) },
    Criterion { id: 9, suite: "nonexistence", title: "non-existence evidence", budget: Duration::from_secs(300) },
    Criterion { id: 10, suite: "uniqueness", title: "uniqueness evidence", budget: Duration::from_secs(60) },
];

fn value(report: &SuiteReport, label: &str) -> f64 {
    report.check(label).unwrap_or_else(|| panic!("{}: missing check {label:?}", report.name)).value
}

/// Tolerances restated here so a change inside the suites cannot loosen them.
fn restate(id: usize, r: &SuiteReport) -> Result<(), String> {
    let ensure = |ok: bool, what: &str| if ok { Ok(()) } else { Err(what.to_string()) };
    match id {
        1 => {
            ensure(value(r, "max |W'(+-1)| at Kutta circulation") < 1e-13, "corner speed")?;
            ensure(value(r, "gap - 8 pi |Im w|") == 0.0, "gap")
        }
        2 => {
            for nu in ["1.1", "1.5", "1.9", "2"] {
                ensure(value(r, &format!("nu={nu} roundtrip error")) < 1e-10, "roundtrip")?;
                ensure(value(r, &format!("nu={nu} f(+-1) = +-1")) == 1.0, "fixed points")?;
            }
            Ok(())
        }
        3 => {
            ensure(value(r, "speed-form Bernoulli residual") <= 1e-10, "speed form")?;
            ensure(value(r, "momentum-form Bernoulli residual") <= 1e-10, "momentum form")?;
            ensure(value(r, "h_div strictly increasing") == 1.0, "monotone h_div")
        }
        4 => {
            ensure(value(r, "circle L-inf order (64 -> 128)") >= 1.8, "order")?;
            ensure(value(r, "horizontal plate incompressible: max |psi - rho v y| / rho") <= 1e-10, "plate")
        }
        5 => {
            for c in ["Trailing", "Leading"] {
                ensure((value(r, &format!("{c} analytic exponent")) + 1.0 / 3.0).abs() <= 0.02, "analytic")?;
                ensure((value(r, &format!("{c} solver exponent (256^2)")) + 1.0 / 3.0).abs() <= 0.1, "solver")?;
            }
            Ok(())
        }
        6 => {
            for l in ["analytic lens", "solver lens", "solver circle M=0.2"] {
                ensure(value(r, &format!("{l}: relative circulation error")) <= 0.01, l)?;
            }
            Ok(())
        }
        7 => {
            let ratio = value(r, "circle: distance ratio M=0.2 / M=0.1");
            ensure((3.0..=5.0).contains(&ratio), "ratio")
        }
        8 => {
            ensure(value(r, "100 random sectors pass") == 1.0, "sectors")?;
            ensure(value(r, "max normalized L w") <= 1e-12, "operator")?;
            ensure(value(r, "max normalized w on radii") <= 1e-12, "radii")?;
            ensure(value(r, "min w(r, theta_mid) / r^(1-eps)") >= 1.0, "ray")?;
            ensure((value(r, "zero distance at a=2") - 2.0 * std::f64::consts::PI / 3.0).abs() <= 1e-12, "2pi/3")
        }
        9 => {
            ensure((value(r, "45 deg plate: minimax growth exponent") - 0.5).abs() <= 0.1, "plate growth")?;
            ensure(value(r, "horizontal plate: minimax variation") <= 0.05, "horizontal")?;
            ensure(value(r, "vertical plate: symmetry residual") < 1e-8, "symmetry")?;
            ensure(value(r, "circle: largest per-circulation growth") <= 0.02, "circle")
        }
        10 => ensure(value(r, "relative max |psi_1 - psi_2|") <= 1e-9, "agreement"),
        _ => unreachable!(),
    }
}

#[test]
fn acceptance_criteria() {
    let mut failed = Vec::new();
    for c in &CRITERIA {
        let start = Instant::now();
        let outcome = run_suite(c.suite, DEFAULT_SEED).map_err(|e| e.to_string()).and_then(|report| {
            let failures: Vec<String> = report.failures().iter().map(|f| format!("{} = {}", f.label, f.value)).collect();
            if !failures.is_empty() {
                return Err(failures.join("; "));
            }
            restate(c.id, &report)
        });
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|()| {
            if elapsed <= c.budget {
                Ok(())
            } else {
                Err(format!("took {elapsed:.2?}, budget {:?}", c.budget))
            }
        });
        match &outcome {
            Ok(()) => println!("PASS  criterion {:>2}  {:<28} {:>10.3?} (budget {:?})", c.id, c.title, elapsed, c.budget),
            Err(e) => {
                println!("FAIL  criterion {:>2}  {:<28} {:>10.3?} (budget {:?}): {e}", c.id, c.title, elapsed, c.budget);
                failed.push(c.id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
