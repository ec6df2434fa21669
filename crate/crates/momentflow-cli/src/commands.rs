//! Command implementations. Each returns the rendered output text plus the
//! exit class; `main` handles IO and process exit.

use momentflow::growth::{self, GrowthOptions};
use momentflow::solver::{self, CauchySolution};
use momentflow::spectral::{decompose, DecomposeOptions, JordanDecomposition};
use momentflow::{kernel, Complex64, ComplexMatrix, MomentFamily};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{pair, ProblemConfig};

/// Exit classes per the published contract: 0 success, 1 tolerance breach,
/// 2 numeric failure, 3 config error.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numeric(String),
    ToleranceBreach(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ToleranceBreach(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Config(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Numeric(m) | CliError::ToleranceBreach(m) => m,
        }
    }
}

fn numeric<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Numeric(e.to_string())
}

pub struct Solved {
    pub dec: JordanDecomposition,
    pub sol: CauchySolution,
    pub default_cauchy: bool,
}

pub fn solve_problem(config: &ProblemConfig) -> Result<Solved, CliError> {
    let opts = DecomposeOptions {
        hints: config.hints_complex(),
        ..Default::default()
    };
    let dec = decompose(&config.matrix, &opts).map_err(numeric)?;
    let fund = solver::fundamental_system(&config.matrix, &dec, &config.moment);
    let (z0, y0, default_cauchy) = config.cauchy_data();
    let sol = solver::solve_cauchy(&fund, z0, &y0, config.truncation.tol.max(1e-12))
        .map_err(numeric)?;
    Ok(Solved {
        dec,
        sol,
        default_cauchy,
    })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct ChainReport {
    lambda: [f64; 2],
    length: usize,
    vectors: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct TermReport {
    lambda: [f64; 2],
    depth: usize,
    vectors: Vec<Vec<[f64; 2]>>,
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct SolveReport {
    z0: [f64; 2],
    eigenvalues: Vec<serde_json::Value>,
    chains: Vec<ChainReport>,
    terms: Vec<TermReport>,
    constants: Vec<[f64; 2]>,
    residual_max_relative: f64,
    residual_samples: usize,
    truncation_order: usize,
    default_cauchy_data: bool,
}

fn vectors_to_pairs(vectors: &[Vec<Complex64>]) -> Vec<Vec<[f64; 2]>> {
    vectors
        .iter()
        .map(|v| v.iter().map(|&c| pair(c)).collect())
        .collect()
}

fn residual_ring(sol: &CauchySolution, n_trunc: usize) -> Result<(f64, usize), CliError> {
    let samples: Vec<Complex64> = (0..8)
        .map(|k| {
            sol.z0 + Complex64::from_polar(1.0, std::f64::consts::PI * k as f64 / 4.0)
        })
        .collect();
    let r = solver::residual_check(sol, &samples, n_trunc).map_err(numeric)?;
    Ok((r, samples.len()))
}

pub fn cmd_solve(config: &ProblemConfig) -> Result<String, CliError> {
    if config.cauchy.is_none() {
        return Err(CliError::Config(
            "solve requires a cauchy block in the config".to_string(),
        ));
    }
    let solved = solve_problem(config)?;
    let (residual, samples) = residual_ring(&solved.sol, config.truncation.n)?;
    let report = SolveReport {
        z0: pair(solved.sol.z0),
        eigenvalues: solved
            .dec
            .eigenvalues
            .iter()
            .map(|e| serde_json::to_value(e).expect("eigenvalue serializes"))
            .collect(),
        chains: solved
            .dec
            .chains
            .iter()
            .map(|c| ChainReport {
                lambda: pair(c.lambda),
                length: c.length(),
                vectors: vectors_to_pairs(&c.vectors),
            })
            .collect(),
        terms: solved
            .sol
            .fundamental
            .terms
            .iter()
            .map(|t| TermReport {
                lambda: pair(t.lambda),
                depth: t.depth,
                vectors: vectors_to_pairs(&t.chain_vectors),
            })
            .collect(),
        constants: solved.sol.constants.iter().map(|&c| pair(c)).collect(),
        residual_max_relative: residual,
        residual_samples: samples,
        truncation_order: config.truncation.n,
        default_cauchy_data: solved.default_cauchy,
    };
    Ok(serde_json::to_string_pretty(&report).expect("report serializes"))
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct EvalRow {
    z: [f64; 2],
    y: Option<Vec<[f64; 2]>>,
    err_bounds: Option<Vec<f64>>,
    status: String,
}

pub fn cmd_eval(
    config: &ProblemConfig,
    points: &[Complex64],
    format_csv: bool,
) -> Result<String, CliError> {
    let solved = solve_problem(config)?;
    let tol = config.truncation.tol;
    let rows: Vec<EvalRow> = points
        .par_iter()
        .map(|&z| match solved.sol.eval(z, tol) {
            Ok(v) => EvalRow {
                z: pair(z),
                y: Some(v.values.iter().map(|&c| pair(c)).collect()),
                err_bounds: Some(v.error_bounds.clone()),
                status: "ok".to_string(),
            },
            Err(e) => EvalRow {
                z: pair(z),
                y: None,
                err_bounds: None,
                status: format!("error: {e}"),
            },
        })
        .collect();

    if format_csv {
        let n = config.matrix.dim();
        let mut out = String::from("re_z,im_z");
        for j in 0..n {
            out.push_str(&format!(",re_y{j},im_y{j},err_{j}"));
        }
        out.push_str(",status\n");
        for row in &rows {
            out.push_str(&format!("{:e},{:e}", row.z[0], row.z[1]));
            match (&row.y, &row.err_bounds) {
                (Some(y), Some(b)) => {
                    for j in 0..n {
                        out.push_str(&format!(",{:e},{:e},{:e}", y[j][0], y[j][1], b[j]));
                    }
                }
                _ => {
                    for _ in 0..n {
                        out.push_str(",,,");
                    }
                }
            }
            out.push_str(&format!(",{}\n", row.status.replace(',', ";")));
        }
        Ok(out)
    } else {
        Ok(serde_json::to_string_pretty(&rows).expect("rows serialize"))
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct OracleCompareReport {
    max_deviation: f64,
    tolerance: f64,
    points: usize,
    oracle_terms: usize,
    pass: bool,
    failures: Vec<String>,
}

pub fn cmd_oracle_compare(
    config: &ProblemConfig,
    points: &[Complex64],
    n_terms: usize,
) -> Result<String, CliError> {
    let solved = solve_problem(config)?;
    let (_, y0, _) = config.cauchy_data();
    let z0 = solved.sol.z0;
    let tol = config.truncation.tol;
    // evaluate well below the comparison gate so truncation cannot eat it
    let eval_tol = (0.01 * tol).max(1e-14);

    let results: Vec<Result<f64, String>> = points
        .par_iter()
        .map(|&z| {
            let closed = solved.sol.eval(z, eval_tol).map_err(|e| e.to_string())?;
            // oracle works about the origin; translate the sample
            let oracle = solver::oracle_eval(&config.matrix, &config.moment, &y0, z - z0, n_terms)
                .map_err(|e| e.to_string())?;
            let dev = closed
                .values
                .iter()
                .zip(&oracle)
                .map(|(a, b)| (a - b).norm_sqr())
                .sum::<f64>()
                .sqrt();
            let scale = 1.0 + oracle.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            Ok(dev / scale)
        })
        .collect();

    let mut max_dev = 0.0f64;
    let mut failures = Vec::new();
    for (z, r) in points.iter().zip(results) {
        match r {
            Ok(d) => max_dev = max_dev.max(d),
            Err(e) => failures.push(format!("z={z}: {e}")),
        }
    }
    if !failures.is_empty() {
        let report = OracleCompareReport {
            max_deviation: max_dev,
            tolerance: tol,
            points: points.len(),
            oracle_terms: n_terms,
            pass: false,
            failures,
        };
        let text = serde_json::to_string_pretty(&report).expect("report serializes");
        return Err(CliError::Numeric(text));
    }
    let pass = max_dev <= tol;
    let report = OracleCompareReport {
        max_deviation: max_dev,
        tolerance: tol,
        points: points.len(),
        oracle_terms: n_terms,
        pass,
        failures: Vec::new(),
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    if pass {
        Ok(text)
    } else {
        Err(CliError::ToleranceBreach(text))
    }
}

pub fn cmd_growth(config: &ProblemConfig, window: f64) -> Result<String, CliError> {
    let solved = solve_problem(config)?;
    let opts = GrowthOptions {
        window,
        ..Default::default()
    };
    let mut report = growth::growth_report(&solved.sol, &solved.dec, &opts);
    if solved.default_cauchy {
        report
            .notes
            .push("no cauchy block: used y(0) = (1, …, 1)".to_string());
    }
    Ok(serde_json::to_string_pretty(&report).expect("report serializes"))
}

pub struct IndicatorOutput {
    pub report_json: String,
    pub fan_csv: String,
}

pub fn cmd_indicator(
    config: &ProblemConfig,
    thetas: &[f64],
    r_grid: &[f64],
    window: f64,
) -> Result<IndicatorOutput, CliError> {
    let solved = solve_problem(config)?;
    let max_lambda = solved
        .dec
        .eigenvalues
        .iter()
        .map(|e| e.lambda.norm())
        .fold(0.0f64, f64::max);
    let grid = if r_grid.is_empty() {
        growth::default_r_grid(&config.moment, max_lambda)
    } else {
        r_grid.to_vec()
    };
    let opts = GrowthOptions {
        window,
        thetas: thetas.to_vec(),
        r_grid: grid.clone(),
        ..Default::default()
    };
    let report = growth::growth_report(&solved.sol, &solved.dec, &opts);

    // the (theta, r, ln|y|) fan for external plotting
    let rho = config.moment.growth_order();
    let fan: Vec<(f64, growth::IndicatorSample)> = thetas
        .par_iter()
        .filter_map(|&theta| {
            growth::indicator_sample(
                |z| {
                    let v = solved.sol.eval(z, config.truncation.tol).map_err(|e| {
                        growth::GrowthError::Evaluation(e.to_string())
                    })?;
                    let norm = v.values.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
                    let bound = v.error_bounds.iter().cloned().fold(0.0f64, f64::max);
                    Ok((norm, bound))
                },
                theta,
                &grid,
                rho,
            )
            .ok()
            .map(|s| (theta, s))
        })
        .collect();
    let mut csv = String::from("theta,r,ln_norm\n");
    for (theta, sample) in &fan {
        for s in &sample.samples {
            csv.push_str(&format!("{:e},{:e},{:e}\n", theta, s.r, s.ln_norm));
        }
    }
    Ok(IndicatorOutput {
        report_json: serde_json::to_string_pretty(&report).expect("report serializes"),
        fan_csv: csv,
    })
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct VerifyReport {
    delta_recursion_max_residual: f64,
    delta_recursion_cases: usize,
    delta_recursion_pass: bool,
    residual_max_relative: f64,
    residual_pass: bool,
    strongly_regular: serde_json::Value,
    pass: bool,
}

pub fn cmd_verify(config: &ProblemConfig) -> Result<String, CliError> {
    // chain-recursion identity across a lambda/h grid
    let lambdas = [
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 2.0),
        Complex64::new(-1.0, 1.0),
        Complex64::ZERO,
    ];
    let mut worst = 0.0f64;
    let mut cases = 0usize;
    for &lam in &lambdas {
        for h in 1..=3usize {
            let r = kernel::check_delta_recursion(&config.moment, lam, h, 60)
                .map_err(numeric)?;
            worst = worst.max(r);
            cases += 1;
        }
    }
    let delta_pass = worst <= 1e-12;

    let solved = solve_problem(config)?;
    let (residual, _) = residual_ring(&solved.sol, config.truncation.n)?;
    let residual_pass = residual <= config.truncation.tol.max(1e-10);

    let regular = config
        .moment
        .check_strongly_regular(200)
        .map_err(numeric)?;

    let report = VerifyReport {
        delta_recursion_max_residual: worst,
        delta_recursion_cases: cases,
        delta_recursion_pass: delta_pass,
        residual_max_relative: residual,
        residual_pass,
        strongly_regular: serde_json::to_value(&regular).expect("report serializes"),
        pass: delta_pass && residual_pass,
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    if report.pass {
        Ok(text)
    } else {
        Err(CliError::ToleranceBreach(text))
    }
}

/// Dump the component series of the solved problem as CSV (debug aid).
pub fn cmd_series_dump(config: &ProblemConfig, order: usize) -> Result<String, CliError> {
    let solved = solve_problem(config)?;
    let series = solved.sol.component_series(order);
    let mut out = String::new();
    for (j, s) in series.iter().enumerate() {
        out.push_str(&format!("# component {j}\n"));
        let mut buf = Vec::new();
        s.write_csv(&mut buf).expect("write to string");
        out.push_str(&String::from_utf8(buf).expect("utf8"));
    }
    Ok(out)
}
