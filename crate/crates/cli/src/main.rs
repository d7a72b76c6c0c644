//! `symcalc`: command-line driver for the symbol calculus and its identity
//! suites. Every subcommand prints one JSON document on stdout.
//!
//! Exit codes: 0 when everything checked passes, 1 when an identity fails or
//! a computation breaks down, 2 on usage or schema errors.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num::complex::Complex64;
use serde_json::{json, Value};
use symcalc::holo::{
    complex_residue_identity_defect, laurent_cutoff_integral, pole_table, regularized_integral, HoloSymbolFamily,
};
use symcalc::json::{form_to_value, parse_form, parse_symbol, symbol_to_value};
use symcalc::quadrature::{Integrator, QuadratureSpec};
use symcalc::random::{random_form_seeded, random_symbol_seeded, SymbolShape};
use symcalc::regint::{
    cutoff_integral_at, finite_part, ibp_defect, residue, translation_defect, translation_defect_taylor, Estimate,
};
use symcalc::scalar::{fmt_order, parse_big, parse_order, scalar_from_json, Order, Scalar};
use symcalc::star::star;
use symcalc::suite::{run_suite, Check, RunConfig};
use symcalc::forms::ClassicalForm;
use symcalc::{ClassicalSymbol, SymError};
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Input { path: PathBuf, source: SymError },
    #[error(transparent)]
    Core(#[from] SymError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Input { .. } => 2,
            CliError::Core(e) => match e {
                SymError::Parse(_)
                | SymError::Dimension(_)
                | SymError::DimensionMismatch(..)
                | SymError::FormDegree { .. }
                | SymError::FormCoefficientOrder { .. }
                | SymError::InsufficientTruncation { .. }
                | SymError::QuadratureSpec(_)
                | SymError::UnknownSuite(_)
                | SymError::NotWindowed
                | SymError::ConstantFamily
                | SymError::FamilyNormalisation
                | SymError::Arity { .. } => 2,
                _ => 1,
            },
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Parser)]
#[command(name = "symcalc", version, about = "Residues, cut-off integrals and star products of classical symbols")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct Global {
    /// Base dimension for generated inputs and suites.
    #[arg(long, global = true)]
    dim: Option<usize>,
    /// Star-product truncation depth.
    #[arg(long, global = true)]
    k: Option<u32>,
    /// Quadrature tolerance.
    #[arg(long, global = true, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, global = true, default_value_t = 4000)]
    max_subdiv: usize,
    /// Gauss-Legendre nodes per panel.
    #[arg(long, global = true, default_value_t = 12)]
    nodes: usize,
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,
    /// Reference radius of the cut-off.
    #[arg(long, global = true)]
    lambda: Option<f64>,
    /// Also write the JSON output to this file.
    #[arg(long, global = true)]
    json_out: Option<PathBuf>,
    /// Write a CSV table of checks to this file.
    #[arg(long, global = true)]
    csv_out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Noncommutative residue of a symbol.
    Residue { symbol: PathBuf },
    /// Cut-off integral and pointwise finite part with all channels.
    Fp {
        symbol: PathBuf,
        /// Point for the pointwise finite part, comma separated (default 0).
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
    /// Truncated star product of two symbols.
    Star { a: PathBuf, b: PathBuf },
    /// Exterior derivative of a form.
    D { form: PathBuf },
    /// Star-wedge product of two forms.
    Wedge { a: PathBuf, b: PathBuf },
    /// Cut-off Stokes: fp int d(beta) against the cosphere boundary term.
    Stokes { form: PathBuf },
    /// Integration by parts in xi_i (1-based axis).
    Ibp {
        symbol: PathBuf,
        #[arg(long, default_value_t = 1)]
        axis: usize,
    },
    /// Translation defect of the cut-off integral, by quadrature and by Taylor flux.
    Translate {
        symbol: PathBuf,
        /// Covector, comma separated rationals such as "1/2,0".
        #[arg(long, default_value = "1/2", allow_hyphen_values = true)]
        eta: String,
        #[arg(long, default_value_t = 6)]
        depth: u32,
    },
    /// Laurent germ at 0 of the Riesz-regularised integral and the residue identity.
    HoloResidue {
        symbol: PathBuf,
        #[arg(long, default_value_t = 3)]
        jet: usize,
        /// Taylor coefficients of the holomorphic prefactor, e.g. "1,1/2".
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        prefactor: String,
    },
    /// Laurent germ of the regularised integral at an arbitrary point.
    RegInt {
        symbol: PathBuf,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        z0: String,
        #[arg(long, default_value_t = 3)]
        jet: usize,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        prefactor: String,
    },
    /// Cochain identities on seeded random tuples.
    Cochain {
        #[arg(long, value_parser = ["stokes-res", "trace", "b-star", "b0-cutoff", "bB-phi", "theta-ratio", "cochain"])]
        identity: String,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long = "tolerance", value_name = "VALUE")]
        tolerance: Option<f64>,
    },
    /// Seeded random symbol, or form with --form-degree.
    Gen {
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        order: String,
        #[arg(long, default_value_t = 2)]
        depth: u32,
        #[arg(long, default_value_t = 2)]
        max_poly_degree: u32,
        #[arg(long)]
        form_degree: Option<usize>,
        #[arg(long)]
        real: bool,
    },
    /// Run a named acceptance suite.
    Suite {
        name: String,
        #[arg(long)]
        trials: Option<usize>,
        /// Tolerance override as SUITE=VALUE; repeatable.
        #[arg(long = "tolerance", value_name = "SUITE=VALUE")]
        tolerances: Vec<String>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_symbol(path: &Path) -> Result<ClassicalSymbol> {
    parse_symbol(&read(path)?).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn load_form(path: &Path) -> Result<ClassicalForm> {
    parse_form(&read(path)?).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn complex(c: Complex64) -> Value {
    json!({"re": c.re, "im": c.im})
}

fn estimate(e: &Estimate) -> Value {
    json!({"re": e.value.re, "im": e.value.im, "error": e.error, "scale": e.scale})
}

fn scalars(list: &str) -> Result<Vec<Scalar>> {
    list.split(',')
        .map(|s| scalar_from_json(&Value::String(s.trim().to_string())).map_err(CliError::from))
        .collect()
}

/// Output of one subcommand: the JSON document and the checks it made.
struct Outcome {
    value: Value,
    checks: Vec<Check>,
    csv: Option<String>,
}

impl Outcome {
    fn plain(value: Value) -> Self {
        Outcome {
            value,
            checks: Vec::new(),
            csv: None,
        }
    }

    fn checked(mut value: Value, checks: Vec<Check>) -> Self {
        value["checks"] = serde_json::to_value(&checks).expect("checks serialise");
        value["pass"] = json!(checks.iter().all(|c| c.pass));
        Outcome {
            value,
            checks,
            csv: None,
        }
    }
}

fn check(name: &str, residual: f64, budget: f64, tolerance: f64) -> Check {
    Check::new(name.to_string(), residual, budget, tolerance)
}

fn integrator(g: &Global) -> Result<Integrator> {
    Ok(Integrator::new(QuadratureSpec {
        tol: g.tol,
        max_subdiv: g.max_subdiv,
        nodes: g.nodes,
    })?)
}

fn star_depth(g: &Global, a_order: Order, b_order: Order, dim: usize) -> u32 {
    g.k.unwrap_or_else(|| symcalc::star::residue_truncation_depth(a_order, b_order, dim))
}

fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    let rho = g.lambda.unwrap_or(1.0);
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(CliError::Usage(format!("--lambda must be positive, got {rho}")));
    }
    Ok(match &cli.cmd {
        Cmd::Residue { symbol } => {
            let s = load_symbol(symbol)?;
            let r = residue(&s, &integrator(g)?)?;
            Outcome::plain(json!({"order": fmt_order(s.order()), "residue": estimate(&r)}))
        }
        Cmd::Fp { symbol, x } => {
            let s = load_symbol(symbol)?;
            let integ = integrator(g)?;
            let x: Vec<f64> = match x {
                None => vec![0.0; s.dim()],
                Some(t) => t
                    .split(',')
                    .map(|v| v.trim().parse::<f64>().map_err(|e| CliError::Usage(format!("--x: {e}"))))
                    .collect::<Result<_>>()?,
            };
            let fp = finite_part(&s, &x, &integ, rho)?;
            let boundary: BTreeMap<String, Value> =
                fp.per_degree_boundary.iter().map(|(i, v)| (i.to_string(), complex(*v))).collect();
            let total = cutoff_integral_at(&s, &integ, rho)?;
            Outcome::plain(json!({
                "lambda": rho,
                "x": x,
                "finite_part": {
                    "value": estimate(&fp.value),
                    "log_coefficient": complex(fp.log_coefficient),
                    "per_degree_boundary": boundary,
                    "compact_part": estimate(&fp.compact_part),
                },
                "cutoff_integral": estimate(&total),
            }))
        }
        Cmd::Star { a, b } => {
            let (a, b) = (load_symbol(a)?, load_symbol(b)?);
            if a.dim() != b.dim() {
                return Err(SymError::DimensionMismatch(a.dim(), b.dim()).into());
            }
            let k = star_depth(g, a.order(), b.order(), a.dim());
            Outcome::plain(json!({"k": k, "product": symbol_to_value(&star(&a, &b, k))}))
        }
        Cmd::D { form } => Outcome::plain(form_to_value(&load_form(form)?.exterior_derivative())),
        Cmd::Wedge { a, b } => {
            let (a, b) = (load_form(a)?, load_form(b)?);
            if a.dim() != b.dim() {
                return Err(SymError::DimensionMismatch(a.dim(), b.dim()).into());
            }
            let k = star_depth(g, a.order(), b.order(), a.dim());
            Outcome::plain(json!({"k": k, "product": form_to_value(&a.wedge_star(&b, k))}))
        }
        Cmd::Stokes { form } => {
            let beta = load_form(form)?;
            let integ = integrator(g)?;
            let c = symcalc::forms::stokes_boundary(&beta, &integ)?;
            let res = symcalc::forms::residue_form(&beta.exterior_derivative(), &integ)?;
            let checks = vec![
                check("cutoff-stokes", c.residual().norm(), c.budget(), 1e-8),
                check("residue-stokes", res.value.norm(), res.error, 1e-8 * (1.0 + res.scale)),
            ];
            Outcome::checked(
                json!({
                    "order": fmt_order(beta.order()),
                    "fp_int_d_beta": estimate(&c.defect),
                    "cosphere_boundary": estimate(&c.boundary),
                    "res_d_beta": estimate(&res),
                }),
                checks,
            )
        }
        Cmd::Ibp { symbol, axis } => {
            let s = load_symbol(symbol)?;
            if *axis == 0 || *axis > s.dim() {
                return Err(CliError::Usage(format!("--axis must lie in 1..={}", s.dim())));
            }
            let c = ibp_defect(&s, axis - 1, &integrator(g)?)?;
            let checks = vec![check("ibp", c.defect().norm(), c.budget(), 1e-8)];
            Outcome::checked(
                json!({"fp_int_derivative": estimate(&c.lhs), "boundary_flux": estimate(&c.boundary)}),
                checks,
            )
        }
        Cmd::Translate { symbol, eta, depth } => {
            let s = load_symbol(symbol)?;
            let eta = eta.split(',').map(|e| parse_big(e.trim())).collect::<symcalc::Result<Vec<_>>>()?;
            if eta.len() != s.dim() {
                return Err(SymError::DimensionMismatch(s.dim(), eta.len()).into());
            }
            let integ = integrator(g)?;
            let numeric = translation_defect(&s, &eta, *depth, &integ)?;
            let taylor = translation_defect_taylor(&s, &eta)?.integrate(&integ)?;
            let diff = (numeric.value() - taylor.value).norm();
            let checks = vec![check("translation", diff, numeric.budget() + taylor.error, 1e-7)];
            Outcome::checked(
                json!({
                    "quadrature": complex(numeric.value()),
                    "taylor": estimate(&taylor),
                    "ball_radius": numeric.radius,
                }),
                checks,
            )
        }
        Cmd::HoloResidue { symbol, jet, prefactor } => {
            let s = load_symbol(symbol)?;
            let integ = integrator(g)?;
            let fam = HoloSymbolFamily::riesz(&s, &scalars(prefactor)?)?;
            let germ = laurent_cutoff_integral(&fam.lifted, Order::from_integer(0), *jet, &integ)?;
            let c = complex_residue_identity_defect(&fam, &integ)?;
            let checks = vec![check("complex-residue", c.defect(), c.budget, 1e-9)];
            let reg = regularized_integral(&fam, &integ)?;
            Outcome::checked(
                json!({
                    "germ": germ.to_json(),
                    "predicted_residue": estimate(&c.predicted),
                    "regularized_integral": complex(reg.constant()),
                    "poles": pole_table(&fam),
                }),
                checks,
            )
        }
        Cmd::RegInt { symbol, z0, jet, prefactor } => {
            let s = load_symbol(symbol)?;
            let z0 = parse_order(z0)?;
            let fam = HoloSymbolFamily::riesz(&s, &scalars(prefactor)?)?;
            let germ = laurent_cutoff_integral(&fam.lifted, z0, *jet, &integrator(g)?)?;
            Outcome::plain(json!({"germ": germ.to_json(), "order_at_z0": fmt_order(fam.order_at(z0))}))
        }
        Cmd::Cochain { identity, n, trials, tolerance } => {
            let mut cfg = run_config(g)?;
            cfg.dim = Some(*n);
            cfg.trials = *trials;
            if let Some(t) = tolerance {
                cfg.tolerances.insert(identity.clone(), *t);
            }
            suite_outcome(identity, &cfg)?
        }
        Cmd::Gen {
            order,
            depth,
            max_poly_degree,
            form_degree,
            real,
        } => {
            let shape = SymbolShape {
                max_poly_degree: *max_poly_degree,
                complex: !real,
                ..SymbolShape::new(g.dim.unwrap_or(1), parse_order(order)?, *depth)
            };
            symcalc::symbol::check_dim(shape.dim)?;
            match form_degree {
                Some(d) if *d > 2 * shape.dim => {
                    return Err(CliError::Usage(format!("--form-degree must be at most {}", 2 * shape.dim)))
                }
                Some(d) => Outcome::plain(form_to_value(&random_form_seeded(&shape, *d, g.seed))),
                None => Outcome::plain(symbol_to_value(&random_symbol_seeded(&shape, g.seed))),
            }
        }
        Cmd::Suite { name, trials, tolerances } => {
            let mut cfg = run_config(g)?;
            cfg.trials = *trials;
            for t in tolerances {
                let (k, v) = t
                    .split_once('=')
                    .ok_or_else(|| CliError::Usage(format!("--tolerance expects SUITE=VALUE, got `{t}`")))?;
                let v: f64 = v.parse().map_err(|e| CliError::Usage(format!("--tolerance {t}: {e}")))?;
                cfg.tolerances.insert(k.to_string(), v);
            }
            suite_outcome(name, &cfg)?
        }
    })
}

fn run_config(g: &Global) -> Result<RunConfig> {
    Ok(RunConfig {
        dim: g.dim,
        truncation: g.k,
        quadrature: QuadratureSpec {
            tol: g.tol,
            max_subdiv: g.max_subdiv,
            nodes: g.nodes,
        },
        seed: g.seed,
        lambda: g.lambda,
        json_out: g.json_out.as_ref().map(|p| p.display().to_string()),
        csv_out: g.csv_out.as_ref().map(|p| p.display().to_string()),
        ..RunConfig::default()
    })
}

fn suite_outcome(name: &str, cfg: &RunConfig) -> Result<Outcome> {
    let report = run_suite(name, cfg)?;
    for c in report.failures() {
        eprintln!("FAIL {} residual {:e} > {:e}", c.name, c.residual, c.tolerance);
    }
    Ok(Outcome {
        value: report.to_json(),
        csv: Some(report.to_csv()),
        checks: report.checks,
    })
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let text = serde_json::to_string_pretty(&outcome.value).expect("json output");
    // A closed pipe on stdout is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
    let g = &cli.global;
    let mut result = Ok(());
    if let Some(p) = &g.json_out {
        result = result.and(write(p, &(text + "\n")));
    }
    if let Some(p) = &g.csv_out {
        let csv = outcome.csv.unwrap_or_else(|| {
            let mut out = String::from("name,residual,budget,tolerance,pass\n");
            for c in &outcome.checks {
                out.push_str(&format!("{},{:e},{:e},{:e},{}\n", c.name, c.residual, c.budget, c.tolerance, c.pass));
            }
            out
        });
        result = result.and(write(p, &csv));
    }
    if let Err(e) = result {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code());
    }
    if outcome.checks.iter().all(|c| c.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
