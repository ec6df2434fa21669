//! Fundamental solution systems of `∂ₘy = Ay` and Cauchy problems.
//!
//! Each Jordan chain `(λ, u₁..u_L)` contributes one solution term per depth
//! `q <= L`:
//!
//! ```text
//! y(z) = Δ_{q−1}E(λz)·u₁ + Δ_{q−2}E(λz)·u₂ + … + E(λz)·u_q
//! ```
//!
//! which for the factorial family reduces to the classical
//! `z^h/h!·e^{λz}`-weighted chains. The `n` terms form a basis of the
//! solution space; Cauchy data selects the constants. Cauchy data away from
//! the origin is handled by translation: the returned solution is a function
//! of `z − z₀`.
//!
//! [`oracle_eval`] is the independent check: it sums the defining power
//! series `Σ A^p y₀ · z^p/m(p)` by iterated matrix-vector products with
//! log-space scaling, and shares no code with the closed-form route.

use num_complex::Complex64;
use thiserror::Error;

use crate::kernel::{self, KernelError, TruncatedSeries};
use crate::matrix::{vec_norm, ComplexMatrix};
use crate::moments::MomentFamily;
use crate::spectral::JordanDecomposition;
use crate::sum::ComplexCompensated;

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("fundamental matrix is singular; upstream decomposition is unusable")]
    SingularFundamentalMatrix,
    #[error("cauchy data has {got} components, system dimension is {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("series term overflow: exponent {0:.1}")]
    OverflowGuard(f64),
    #[error("term {index} (lambda {lambda}, depth {depth}) failed: {source}")]
    TermFailure {
        index: usize,
        lambda: Complex64,
        depth: usize,
        source: KernelError,
    },
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// One basis solution built from a chain prefix.
#[derive(Debug, Clone)]
pub struct SolutionTerm {
    pub lambda: Complex64,
    /// Chain vectors `u₁..u_q`, eigenvector first.
    pub chain_vectors: Vec<Vec<Complex64>>,
    /// Depth `q`: number of chain vectors used by this term.
    pub depth: usize,
}

impl SolutionTerm {
    /// Value of the term at `w` (already shifted), with an error bound.
    fn eval(
        &self,
        family: &MomentFamily,
        w: Complex64,
        tol: f64,
    ) -> Result<(Vec<Complex64>, Vec<f64>), KernelError> {
        let n = self.chain_vectors[0].len();
        let mut acc = vec![ComplexCompensated::new(); n];
        let mut bound = vec![0.0f64; n];
        for (i, vector) in self.chain_vectors.iter().enumerate() {
            let h = self.depth - 1 - i;
            let factor = kernel::eval_delta_h(family, self.lambda, h, w, tol)?;
            for j in 0..n {
                acc[j].add(factor.value * vector[j]);
                bound[j] += factor.abs_error_bound * vector[j].norm()
                    + 2.0 * f64::EPSILON * (factor.value * vector[j]).norm();
            }
        }
        Ok((acc.iter().map(|a| a.value()).collect(), bound))
    }

    /// Coefficients of the term's components up to order `n_trunc`.
    fn series(&self, family: &MomentFamily, n_trunc: usize) -> Vec<TruncatedSeries> {
        let n = self.chain_vectors[0].len();
        let mut coeffs = vec![vec![Complex64::ZERO; n_trunc + 1]; n];
        for (i, vector) in self.chain_vectors.iter().enumerate() {
            let h = self.depth - 1 - i;
            let delta = kernel::delta_kernel_series(family, self.lambda, h, n_trunc);
            for j in 0..n {
                for p in 0..=n_trunc {
                    coeffs[j][p] += delta.coeff(p) * vector[j];
                }
            }
        }
        coeffs
            .into_iter()
            .map(|c| TruncatedSeries::new(*family, c))
            .collect()
    }
}

/// The `n` independent solution terms of a system.
#[derive(Debug, Clone)]
pub struct FundamentalSolution {
    pub family: MomentFamily,
    pub matrix: ComplexMatrix,
    pub terms: Vec<SolutionTerm>,
}

/// Build the fundamental system from a Jordan decomposition: one term per
/// (chain, depth). Terms are ordered by `|λ|` descending so that evaluation
/// sees the dominant (cancellation-exposing) terms first.
pub fn fundamental_system(
    matrix: &ComplexMatrix,
    dec: &JordanDecomposition,
    family: &MomentFamily,
) -> FundamentalSolution {
    let mut terms = Vec::with_capacity(dec.dim());
    for chain in &dec.chains {
        for q in 1..=chain.length() {
            terms.push(SolutionTerm {
                lambda: chain.lambda,
                chain_vectors: chain.vectors[..q].to_vec(),
                depth: q,
            });
        }
    }
    terms.sort_by(|a, b| {
        b.lambda
            .norm()
            .partial_cmp(&a.lambda.norm())
            .expect("finite eigenvalues")
            .then(a.depth.cmp(&b.depth))
    });
    FundamentalSolution {
        family: *family,
        matrix: matrix.clone(),
        terms,
    }
}

/// A solved Cauchy problem: constants over the fundamental system.
#[derive(Debug, Clone)]
pub struct CauchySolution {
    pub fundamental: FundamentalSolution,
    pub z0: Complex64,
    pub constants: Vec<Complex64>,
}

/// Componentwise value of a solution at a point, with error bounds.
#[derive(Debug, Clone)]
pub struct SolutionValue {
    pub values: Vec<Complex64>,
    pub error_bounds: Vec<f64>,
}

/// Solve for the constants matching `y(z0) = y0`.
///
/// In translated coordinates every term is evaluated at `w = 0`, where
/// `Δ_h E` is exactly `1` (h = 0) or `0`, so the fundamental matrix is the
/// chain-vector matrix itself and the solve is exact up to elimination
/// rounding.
pub fn solve_cauchy(
    fundamental: &FundamentalSolution,
    z0: Complex64,
    y0: &[Complex64],
    tol: f64,
) -> Result<CauchySolution, SolverError> {
    let n = fundamental.matrix.dim();
    if y0.len() != n {
        return Err(SolverError::DimensionMismatch {
            expected: n,
            got: y0.len(),
        });
    }
    let mut columns = Vec::with_capacity(n);
    for term in &fundamental.terms {
        let (value, _) = term
            .eval(&fundamental.family, Complex64::ZERO, tol.min(1e-12))
            .map_err(SolverError::from)?;
        columns.push(value);
    }
    let matrix = ComplexMatrix::from_columns(&columns)
        .map_err(|_| SolverError::SingularFundamentalMatrix)?;
    let constants = matrix
        .lu()
        .solve(y0)
        .ok_or(SolverError::SingularFundamentalMatrix)?;

    // interpolation residual must be at solve tolerance
    let reproduced = matrix.matvec(&constants);
    let mut residual = 0.0f64;
    for (r, y) in reproduced.iter().zip(y0) {
        residual += (r - y).norm_sqr();
    }
    let y_norm = vec_norm(y0);
    if residual.sqrt() > tol * (1.0 + y_norm) {
        return Err(SolverError::SingularFundamentalMatrix);
    }
    Ok(CauchySolution {
        fundamental: fundamental.clone(),
        z0,
        constants,
    })
}

impl CauchySolution {
    pub fn dim(&self) -> usize {
        self.fundamental.matrix.dim()
    }

    /// Evaluate the solution at `z`, aggregating per-term error bounds.
    pub fn eval(&self, z: Complex64, tol: f64) -> Result<SolutionValue, SolverError> {
        let n = self.dim();
        let w = z - self.z0;
        let mut acc = vec![ComplexCompensated::new(); n];
        let mut bounds = vec![0.0f64; n];
        for (index, term) in self.fundamental.terms.iter().enumerate() {
            let c = self.constants[index];
            if c == Complex64::ZERO {
                continue;
            }
            let (values, term_bounds) =
                term.eval(&self.fundamental.family, w, tol)
                    .map_err(|source| SolverError::TermFailure {
                        index,
                        lambda: term.lambda,
                        depth: term.depth,
                        source,
                    })?;
            for j in 0..n {
                acc[j].add(c * values[j]);
                bounds[j] += c.norm() * term_bounds[j];
            }
        }
        Ok(SolutionValue {
            values: acc.iter().map(|a| a.value()).collect(),
            error_bounds: bounds,
        })
    }

    /// Taylor coefficients (about the translated origin) of every component.
    pub fn component_series(&self, n_trunc: usize) -> Vec<TruncatedSeries> {
        let n = self.dim();
        let mut coeffs = vec![vec![Complex64::ZERO; n_trunc + 1]; n];
        for (index, term) in self.fundamental.terms.iter().enumerate() {
            let c = self.constants[index];
            if c == Complex64::ZERO {
                continue;
            }
            for (j, series) in term.series(&self.fundamental.family, n_trunc).iter().enumerate() {
                for p in 0..=n_trunc {
                    coeffs[j][p] += c * series.coeff(p);
                }
            }
        }
        coeffs
            .into_iter()
            .map(|c| TruncatedSeries::new(self.fundamental.family, c))
            .collect()
    }

    /// Log-magnitudes of the component coefficients, computed without ever
    /// materializing the (rapidly underflowing) coefficients themselves.
    /// Entry `[j][p]` is `ln |c_{j,p}|`, `-inf` for exact zeros.
    pub fn log_abs_component_coeffs(&self, n_trunc: usize) -> Vec<Vec<f64>> {
        let n = self.dim();
        let family = &self.fundamental.family;
        let lm = family.log_moments(n_trunc);

        // per term and chain index: scaled contribution c_k * u_i[j] with the
        // series part  C(p,h) λ^{p−h} / m(p)  kept as log-magnitude + phase
        struct Piece {
            h: usize,
            ln_l: f64,
            arg_l: f64,
            weights: Vec<Complex64>, // c_k * u_i per component
        }
        let mut pieces = Vec::new();
        for (index, term) in self.fundamental.terms.iter().enumerate() {
            let c = self.constants[index];
            if c == Complex64::ZERO {
                continue;
            }
            for (i, vector) in term.chain_vectors.iter().enumerate() {
                pieces.push(Piece {
                    h: term.depth - 1 - i,
                    ln_l: term.lambda.norm().ln(),
                    arg_l: term.lambda.arg(),
                    weights: vector.iter().map(|u| c * u).collect(),
                });
            }
        }

        let ln_binom = |p: usize, h: usize| -> f64 {
            statrs::function::gamma::ln_gamma(p as f64 + 1.0)
                - statrs::function::gamma::ln_gamma(h as f64 + 1.0)
                - statrs::function::gamma::ln_gamma((p - h) as f64 + 1.0)
        };

        let mut out = vec![vec![f64::NEG_INFINITY; n_trunc + 1]; n];
        for p in 0..=n_trunc {
            // contributions in (log-magnitude, phase) form; sum after rescaling
            let mut logs: Vec<(f64, Complex64)> = Vec::with_capacity(pieces.len());
            let mut max_log = f64::NEG_INFINITY;
            for piece in &pieces {
                if p < piece.h {
                    continue;
                }
                let lam_part = if piece.ln_l.is_finite() {
                    (p - piece.h) as f64 * piece.ln_l
                } else if p == piece.h {
                    0.0 // λ = 0: only the monomial term survives
                } else {
                    continue;
                };
                let log_mag = ln_binom(p, piece.h) + lam_part - lm[p];
                let phase = (p - piece.h) as f64 * piece.arg_l;
                logs.push((log_mag, Complex64::from_polar(1.0, phase)));
                max_log = max_log.max(log_mag);
            }
            if logs.is_empty() || max_log == f64::NEG_INFINITY {
                continue;
            }
            for j in 0..n {
                let mut sum = ComplexCompensated::new();
                let mut idx = 0usize;
                for piece in &pieces {
                    if p < piece.h || (!piece.ln_l.is_finite() && p != piece.h) {
                        continue;
                    }
                    let (log_mag, phase) = logs[idx];
                    idx += 1;
                    sum.add(phase * (log_mag - max_log).exp() * piece.weights[j]);
                }
                let norm = sum.value().norm();
                out[j][p] = if norm > 0.0 {
                    max_log + norm.ln()
                } else {
                    f64::NEG_INFINITY
                };
            }
        }
        out
    }
}

/// Brute-force series oracle: `Σ_{p=0}^{N} A^p y0 · z^p/m(p)`.
///
/// The iterate is renormalized at every step and the scalar `z^p/m(p)` is
/// carried in log space, so the only overflow possible is in the value of the
/// sum itself, which is guarded.
pub fn oracle_eval(
    a: &ComplexMatrix,
    family: &MomentFamily,
    y0: &[Complex64],
    z: Complex64,
    n_terms: usize,
) -> Result<Vec<Complex64>, SolverError> {
    let n = a.dim();
    if y0.len() != n {
        return Err(SolverError::DimensionMismatch {
            expected: n,
            got: y0.len(),
        });
    }
    let lm = family.log_moments(n_terms);
    let ln_z = if z == Complex64::ZERO {
        f64::NEG_INFINITY
    } else {
        z.norm().ln()
    };
    let arg_z = z.arg();

    let mut acc = vec![ComplexCompensated::new(); n];
    let mut direction = y0.to_vec();
    let mut log_scale = 0.0f64; // ln of the factor peeled off `direction`
    for p in 0..=n_terms {
        let log_coeff = if p == 0 { 0.0 } else { p as f64 * ln_z } - lm[p];
        let exponent = log_scale + log_coeff;
        if exponent > 700.0 {
            return Err(SolverError::OverflowGuard(exponent));
        }
        let scalar = Complex64::from_polar(exponent.exp(), p as f64 * arg_z);
        for j in 0..n {
            acc[j].add(direction[j] * scalar);
        }
        if p == n_terms {
            break;
        }
        direction = a.matvec(&direction);
        let norm = vec_norm(&direction);
        if norm > 0.0 {
            for e in &mut direction {
                *e /= norm;
            }
            log_scale += norm.ln();
        } else {
            break; // A^p y0 vanished exactly; the series is finite
        }
        if !log_scale.is_finite() {
            return Err(SolverError::OverflowGuard(log_scale));
        }
    }
    Ok(acc.iter().map(|a| a.value()).collect())
}

/// Residual of the defining equation, measured through the series route.
///
/// The component series are built to order `n_trunc`, the moment derivative
/// is applied coefficientwise, and `∂ₘy − Ay` is evaluated at the samples
/// (translated when the Cauchy datum is not at the origin). The residual of
/// a correct solution reflects only rounding of the coefficient arithmetic.
pub fn residual_check(
    sol: &CauchySolution,
    samples: &[Complex64],
    n_trunc: usize,
) -> Result<f64, SolverError> {
    let n = sol.dim();
    let a = &sol.fundamental.matrix;
    let series = sol.component_series(n_trunc);
    let derived: Vec<TruncatedSeries> = series
        .iter()
        .map(|s| s.moment_derivative())
        .collect::<Result<_, _>>()?;

    // A·y as series, truncated to match the derivative's order
    let mut ay = Vec::with_capacity(n);
    for i in 0..n {
        let mut coeffs = vec![Complex64::ZERO; n_trunc];
        for (p, c) in coeffs.iter_mut().enumerate() {
            for j in 0..n {
                *c += a[(i, j)] * series[j].coeff(p);
            }
        }
        ay.push(TruncatedSeries::new(sol.fundamental.family, coeffs));
    }

    let mut worst = 0.0f64;
    for &z in samples {
        let w = z - sol.z0;
        for j in 0..n {
            let lhs = derived[j].eval(w).value;
            let rhs = ay[j].eval(w).value;
            let denom = 1.0 + rhs.norm();
            worst = worst.max((lhs - rhs).norm() / denom);
        }
    }
    Ok(worst)
}
