//! Acceptance criteria, one line per criterion.
//!
//! Each criterion runs its named suite with the default configuration
//! (seed 42, quadrature tolerance 1e-12) and the stated thresholds, which
//! are the suites' defaults. Every criterion is evaluated before any
//! assertion fires so the full PASS/FAIL table is always printed.

use std::time::{Duration, Instant};

use symcalc::suite::{run_suite, Report, RunConfig};

struct Criterion {
    id: u32,
    title: &'static str,
    suite: &'static str,
    /// Expected default threshold of every check, where there is a single one.
    tolerance: Option<f64>,
    /// Minimum number of checks for the stated case counts.
    min_checks: usize,
    limit: Option<Duration>,
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        title: "residue Stokes: res(d beta) = 0",
        suite: "stokes-res",
        tolerance: None,
        min_checks: 60,
        limit: Some(Duration::from_secs(60)),
    },
    Criterion {
        id: 2,
        title: "trace property of the residue",
        suite: "trace",
        tolerance: None,
        min_checks: 30,
        limit: None,
    },
    Criterion {
        id: 3,
        title: "log coefficient = residue density",
        suite: "fp-log",
        tolerance: None,
        min_checks: 20,
        limit: None,
    },
    Criterion {
        id: 4,
        title: "rescaling of the cut-off",
        suite: "rescale",
        tolerance: None,
        min_checks: 40,
        limit: None,
    },
    Criterion {
        id: 5,
        title: "cut-off Stokes dichotomy",
        suite: "cutoff-stokes",
        tolerance: Some(1e-8),
        min_checks: 40,
        limit: None,
    },
    Criterion {
        id: 6,
        title: "integration by parts and translation",
        suite: "ibp-translation",
        tolerance: None,
        min_checks: 20,
        limit: None,
    },
    Criterion {
        id: 7,
        title: "complex residue identity",
        suite: "complex-residue",
        tolerance: Some(1e-9),
        min_checks: 30,
        limit: None,
    },
    Criterion {
        id: 8,
        title: "meromorphic Stokes",
        suite: "mero-stokes",
        tolerance: None,
        min_checks: 2,
        limit: None,
    },
    Criterion {
        id: 9,
        title: "cochain identities",
        suite: "cochain",
        tolerance: None,
        min_checks: 6,
        limit: Some(Duration::from_secs(300)),
    },
    Criterion {
        id: 10,
        title: "theta ratio is constant",
        suite: "theta-ratio",
        tolerance: Some(1e-6),
        min_checks: 1,
        limit: None,
    },
];

fn verdict(c: &Criterion, report: &Report, elapsed: Duration) -> Result<String, String> {
    let worst = report
        .checks
        .iter()
        .map(|k| k.residual / k.tolerance.max(f64::MIN_POSITIVE))
        .fold(0.0, f64::max);
    let summary = format!(
        "{} checks, worst residual/tolerance {:.2e}, {:.1} s",
        report.checks.len(),
        worst,
        elapsed.as_secs_f64()
    );
    if let Some(f) = report.failures().next() {
        return Err(format!("{summary}; {} residual {:e} > {:e}", f.name, f.residual, f.tolerance));
    }
    if report.checks.len() < c.min_checks {
        return Err(format!("{summary}; expected at least {} checks", c.min_checks));
    }
    if let Some(t) = c.tolerance {
        if let Some(k) = report.checks.iter().find(|k| k.tolerance > t && !k.name.contains("nonzero")) {
            return Err(format!("{summary}; {} uses tolerance {:e} above {t:e}", k.name, k.tolerance));
        }
    }
    if let Some(limit) = c.limit {
        if elapsed > limit {
            return Err(format!("{summary}; over the {} s limit", limit.as_secs()));
        }
    }
    Ok(summary)
}

#[test]
fn acceptance_criteria() {
    let cfg = RunConfig::default();
    let mut failed = Vec::new();
    for c in CRITERIA {
        let start = Instant::now();
        let line = match run_suite(c.suite, &cfg) {
            Ok(report) => {
                let v = verdict(c, &report, start.elapsed());
                for (k, note) in &report.notes {
                    println!("    {k}: {note}");
                }
                v
            }
            Err(e) => Err(format!("suite error: {e}")),
        };
        match line {
            Ok(s) => println!("PASS criterion {} ({}): {s}", c.id, c.title),
            Err(s) => {
                println!("FAIL criterion {} ({}): {s}", c.id, c.title);
                failed.push(c.id);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

#[test]
fn reports_are_reproducible() {
    let cfg = RunConfig {
        trials: Some(3),
        ..RunConfig::default()
    };
    let a = run_suite("stokes-res", &cfg).unwrap();
    let b = run_suite("stokes-res", &cfg).unwrap();
    assert_eq!(a.payload_hash(), b.payload_hash());
    assert!(run_suite("nonexistent", &cfg).is_err());
}
