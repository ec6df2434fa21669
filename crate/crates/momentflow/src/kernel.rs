//! Truncated-series engine for the kernel function and its chain variants.
//!
//! The kernel `E(z) = Σ_{p≥0} z^p/m(p)` plays the role of the exponential for
//! a moment sequence `m`; the weighted series
//! `Δ_h E(λz) = Σ_{p≥h} C(p,h) λ^{p−h} z^p/m(p)` supplies the polynomial-like
//! factors of Jordan-chain solutions (`z^h/h!·e^{λz}` in the classical case).
//!
//! Terms are generated in log-magnitude + phase form so that `z^p` and `m(p)`
//! never overflow separately, and sums are compensated throughout. Every
//! evaluation reports an error bound and a cancellation ratio; evaluations
//! whose cancellation exceeds [`CANCELLATION_LIMIT`] are refused rather than
//! silently degraded.

use num_complex::Complex64;
use thiserror::Error;

use crate::moments::MomentFamily;
use crate::sum::{Compensated, ComplexCompensated};

/// Refuse results whose summation condition number exceeds this.
pub const CANCELLATION_LIMIT: f64 = 1e12;
/// Hard cap on the number of series terms.
pub const MAX_TERMS: usize = 100_000;
/// Log-magnitudes beyond this are not representable in f64.
const LOG_OVERFLOW: f64 = 705.0;

#[derive(Debug, Error)]
pub enum KernelError {
    #[error(
        "cancellation ratio {ratio:.3e} exceeds {limit:.0e}: point numerically unreachable at working precision"
    )]
    CancellationFailure { ratio: f64, limit: f64 },
    #[error("series did not converge within {0} terms")]
    NoConvergence(usize),
    #[error("term magnitude exp({0:.1}) exceeds the working range")]
    Overflow(f64),
    #[error("moment derivative of an order-0 series")]
    EmptySeries,
}

/// Outcome of a single series evaluation.
#[derive(Debug, Clone, Copy)]
pub struct EvalResult {
    pub value: Complex64,
    /// Bound on the absolute error: geometric tail plus accumulated rounding.
    pub abs_error_bound: f64,
    pub terms_used: usize,
    /// Condition number of the summation, `Σ|t_p| / |Σ t_p|`; 1 means no
    /// cancellation, values near [`CANCELLATION_LIMIT`] mean few correct digits.
    pub cancellation_ratio: f64,
}

impl EvalResult {
    fn exact(value: Complex64) -> Self {
        EvalResult {
            value,
            abs_error_bound: f64::EPSILON * value.norm(),
            terms_used: 1,
            cancellation_ratio: 1.0,
        }
    }
}

/// A term stream in log space: magnitude exponent and phase per index.
struct LogTerm {
    log_mag: f64,
    phase: f64,
}

/// Adaptive compensated summation with the geometric-tail stopping rule.
///
/// Stops once three consecutive term-magnitude ratios fall below 1/2 and the
/// geometric tail estimate drops under the tolerance. For log-convex moment
/// sequences the ratios are eventually monotone decreasing, which makes the
/// geometric bound valid for the whole tail.
fn sum_log_terms(
    mut terms: impl FnMut(usize) -> LogTerm,
    first_index: usize,
    tol: f64,
) -> Result<EvalResult, KernelError> {
    let mut sum = ComplexCompensated::new();
    let mut abs_sum = Compensated::new();
    let mut rounding = Compensated::new();
    let mut prev_mag: Option<f64> = None;
    let mut recent_ratios = [f64::INFINITY; 3];
    let mut small_ratios = 0usize;
    let mut used = 0usize;

    let mut p = first_index;
    loop {
        let t = terms(p);
        if t.log_mag > LOG_OVERFLOW {
            return Err(KernelError::Overflow(t.log_mag));
        }
        let mag = t.log_mag.exp();
        let term = Complex64::from_polar(mag, t.phase);
        sum.add(term);
        abs_sum.add(mag);
        // Per-term relative error grows with the exponent magnitude and the
        // phase argument (both computed in floating point before exp/cis).
        rounding.add((3.0 + t.log_mag.abs() + t.phase.abs()) * f64::EPSILON * mag);
        used += 1;

        if let Some(prev) = prev_mag {
            let ratio = if prev > 0.0 { mag / prev } else { f64::INFINITY };
            recent_ratios = [recent_ratios[1], recent_ratios[2], ratio];
            if ratio < 0.5 {
                small_ratios += 1;
            } else {
                small_ratios = 0;
            }
            if small_ratios >= 3 {
                let r = recent_ratios.iter().cloned().fold(0.0f64, f64::max);
                let tail = mag * r / (1.0 - r);
                let value = sum.value();
                if tail <= tol * (1.0 + value.norm()) {
                    return finish(value, tail, rounding.value(), abs_sum.value(), used);
                }
            }
        }
        prev_mag = Some(mag);
        p += 1;
        if used > MAX_TERMS {
            return Err(KernelError::NoConvergence(MAX_TERMS));
        }
    }
}

fn finish(
    value: Complex64,
    tail: f64,
    rounding: f64,
    abs_sum: f64,
    terms_used: usize,
) -> Result<EvalResult, KernelError> {
    let norm = value.norm();
    let cancellation_ratio = if norm > 0.0 { abs_sum / norm } else { f64::INFINITY };
    if cancellation_ratio > CANCELLATION_LIMIT {
        return Err(KernelError::CancellationFailure {
            ratio: cancellation_ratio,
            limit: CANCELLATION_LIMIT,
        });
    }
    Ok(EvalResult {
        value,
        abs_error_bound: tail + rounding,
        terms_used,
        cancellation_ratio,
    })
}

/// Evaluate the kernel `E(z) = Σ z^p/m(p)`.
pub fn eval_e(family: &MomentFamily, z: Complex64, tol: f64) -> Result<EvalResult, KernelError> {
    assert!(tol > 0.0, "tolerance must be positive");
    if z == Complex64::ZERO {
        return Ok(EvalResult::exact(Complex64::ONE));
    }
    let ln_r = z.norm().ln();
    let phi = z.arg();
    let mut lm = LogMoments::new(family);
    sum_log_terms(
        |p| LogTerm {
            log_mag: p as f64 * ln_r - lm.get(p),
            phase: p as f64 * phi,
        },
        0,
        tol,
    )
}

/// Evaluate `Δ_h E(λz) = Σ_{p≥h} C(p,h) λ^{p−h} z^p / m(p)`.
///
/// Binomial factors are carried in log space. For `λ = 0` the series
/// collapses to the single monomial `z^h/m(h)`, which is returned exactly.
pub fn eval_delta_h(
    family: &MomentFamily,
    lambda: Complex64,
    h: usize,
    z: Complex64,
    tol: f64,
) -> Result<EvalResult, KernelError> {
    assert!(tol > 0.0, "tolerance must be positive");
    if lambda == Complex64::ZERO {
        return Ok(monomial(family, h, z));
    }
    if z == Complex64::ZERO {
        let value = if h == 0 { Complex64::ONE } else { Complex64::ZERO };
        return Ok(EvalResult::exact(value));
    }
    let ln_r = z.norm().ln();
    let phi = z.arg();
    let ln_l = lambda.norm().ln();
    let arg_l = lambda.arg();
    let mut lm = LogMoments::new(family);
    let mut binom = LogBinomial::new(h);
    sum_log_terms(
        |p| LogTerm {
            log_mag: binom.get(p) + (p - h) as f64 * ln_l + p as f64 * ln_r - lm.get(p),
            phase: (p - h) as f64 * arg_l + p as f64 * phi,
        },
        h,
        tol,
    )
}

/// `z^h/m(h)` with a tight rounding bound.
fn monomial(family: &MomentFamily, h: usize, z: Complex64) -> EvalResult {
    if h == 0 {
        return EvalResult::exact(Complex64::ONE);
    }
    if z == Complex64::ZERO {
        return EvalResult::exact(Complex64::ZERO);
    }
    let log_mag = h as f64 * z.norm().ln() - family.log_moment(h);
    let value = Complex64::from_polar(log_mag.exp(), h as f64 * z.arg());
    EvalResult {
        value,
        abs_error_bound: (3.0 + log_mag.abs()) * f64::EPSILON * value.norm(),
        terms_used: 1,
        cancellation_ratio: 1.0,
    }
}

/// Evaluate `Δ_h E(λz)` through the scaled h-th derivative of `E`:
/// `Δ_h E(λz) = [ω^h/(λ^h h!) · (d/dω)^h E(ω)]` at `ω = λz`, with the
/// derivative series obtained by termwise differentiation. Used as a
/// cross-check route for the direct binomial summation.
pub fn eval_delta_h_via_derivative(
    family: &MomentFamily,
    lambda: Complex64,
    h: usize,
    z: Complex64,
    tol: f64,
) -> Result<EvalResult, KernelError> {
    assert!(tol > 0.0, "tolerance must be positive");
    assert!(lambda != Complex64::ZERO, "derivative route requires lambda != 0");
    assert!(h >= 1, "derivative route requires h >= 1");

    if z == Complex64::ZERO {
        return Ok(EvalResult::exact(Complex64::ZERO));
    }
    let omega = lambda * z;
    let ln_w = omega.norm().ln();
    let arg_w = omega.arg();
    let ln_gamma_h1 = family_free_ln_gamma(h as f64 + 1.0);
    let mut lm = LogMoments::new(family);
    // (d/dω)^h E at ω: Σ_{q≥0} [Γ(q+h+1)/Γ(q+1)] ω^q / m(q+h)
    let inner = sum_log_terms(
        |q| {
            let falling = family_free_ln_gamma((q + h) as f64 + 1.0)
                - family_free_ln_gamma(q as f64 + 1.0);
            LogTerm {
                log_mag: falling + q as f64 * ln_w - lm.get(q + h),
                phase: q as f64 * arg_w,
            }
        },
        0,
        tol,
    )?;
    // ω^h/(λ^h h!) = z^h/h!
    let factor_log = h as f64 * z.norm().ln() - ln_gamma_h1;
    if factor_log + inner.value.norm().ln().max(0.0) > LOG_OVERFLOW {
        return Err(KernelError::Overflow(factor_log));
    }
    let factor = Complex64::from_polar(factor_log.exp(), h as f64 * z.arg());
    Ok(EvalResult {
        value: inner.value * factor,
        abs_error_bound: inner.abs_error_bound * factor.norm()
            + (3.0 + factor_log.abs()) * f64::EPSILON * (inner.value * factor).norm(),
        terms_used: inner.terms_used,
        cancellation_ratio: inner.cancellation_ratio,
    })
}

fn family_free_ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Incremental `ln m(p)` lookup that extends itself on demand.
struct LogMoments<'a> {
    family: &'a MomentFamily,
    values: Vec<f64>,
}

impl<'a> LogMoments<'a> {
    fn new(family: &'a MomentFamily) -> Self {
        LogMoments {
            family,
            values: vec![0.0],
        }
    }

    fn get(&mut self, p: usize) -> f64 {
        while self.values.len() <= p {
            let next = self.values.len();
            // Extend via the one-step increment to keep GevreyLog O(1) per term.
            let inc = match self.family {
                MomentFamily::Factorial => (next as f64).ln(),
                MomentFamily::GammaScale { s } => {
                    family_free_ln_gamma(1.0 + s * next as f64)
                        - family_free_ln_gamma(1.0 + s * (next - 1) as f64)
                }
                MomentFamily::GevreyLog { alpha, beta } => {
                    alpha * (next as f64).ln()
                        + beta * (std::f64::consts::E + next as f64).ln().ln()
                }
            };
            let prev = *self.values.last().unwrap();
            self.values.push(prev + inc);
        }
        self.values[p]
    }
}

/// Incremental `ln C(p,h)` for fixed `h`, valid for `p >= h`.
struct LogBinomial {
    h: usize,
    p: usize,
    value: f64,
}

impl LogBinomial {
    fn new(h: usize) -> Self {
        LogBinomial { h, p: h, value: 0.0 }
    }

    fn get(&mut self, p: usize) -> f64 {
        debug_assert!(p >= self.h && p >= self.p, "binomial stream must advance");
        while self.p < p {
            self.p += 1;
            self.value += (self.p as f64 / (self.p - self.h) as f64).ln();
        }
        self.value
    }
}

/// A finite complex power series `Σ_{p=0}^{N} c_p z^p` tied to a moment family.
#[derive(Debug, Clone)]
pub struct TruncatedSeries {
    family: MomentFamily,
    coeffs: Vec<Complex64>,
    tail_bound: Option<f64>,
}

impl TruncatedSeries {
    pub fn new(family: MomentFamily, coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least c_0");
        TruncatedSeries {
            family,
            coeffs,
            tail_bound: None,
        }
    }

    pub fn with_tail_bound(mut self, bound: f64) -> Self {
        assert!(bound >= 0.0);
        self.tail_bound = Some(bound);
        self
    }

    pub fn family(&self) -> &MomentFamily {
        &self.family
    }

    /// Truncation order `N`; the series holds `N + 1` coefficients.
    pub fn truncation_order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, p: usize) -> Complex64 {
        self.coeffs.get(p).copied().unwrap_or(Complex64::ZERO)
    }

    pub fn tail_bound(&self) -> Option<f64> {
        self.tail_bound
    }

    /// Apply the moment derivative: output coefficient `p` is the input
    /// coefficient `p+1` scaled by `m(p+1)/m(p)`. Drops the order by one.
    pub fn moment_derivative(&self) -> Result<TruncatedSeries, KernelError> {
        let n = self.truncation_order();
        if n == 0 {
            return Err(KernelError::EmptySeries);
        }
        let lm = self.family.log_moments(n);
        let coeffs = (0..n)
            .map(|p| self.coeffs[p + 1] * (lm[p + 1] - lm[p]).exp())
            .collect();
        Ok(TruncatedSeries {
            family: self.family,
            coeffs,
            tail_bound: None,
        })
    }

    /// Direct compensated evaluation of the truncated polynomial.
    pub fn eval(&self, z: Complex64) -> EvalResult {
        let mut sum = ComplexCompensated::new();
        let mut abs_sum = Compensated::new();
        let mut power = Complex64::ONE;
        for (p, c) in self.coeffs.iter().enumerate() {
            let term = c * power;
            sum.add(term);
            abs_sum.add(term.norm());
            if p + 1 < self.coeffs.len() {
                power *= z;
            }
        }
        let value = sum.value();
        let norm = value.norm();
        EvalResult {
            value,
            abs_error_bound: self.tail_bound.unwrap_or(0.0)
                + 2.0 * f64::EPSILON * self.coeffs.len() as f64 * abs_sum.value(),
            terms_used: self.coeffs.len(),
            cancellation_ratio: if norm > 0.0 {
                abs_sum.value() / norm
            } else {
                f64::INFINITY
            },
        }
    }

    /// Dump coefficients as CSV rows `p,re,im`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "p,re,im")?;
        for (p, c) in self.coeffs.iter().enumerate() {
            writeln!(out, "{},{:e},{:e}", p, c.re, c.im)?;
        }
        Ok(())
    }
}

/// Kernel series `E` truncated at order `n`: coefficients `1/m(p)`.
pub fn kernel_series(family: &MomentFamily, n: usize) -> TruncatedSeries {
    let lm = family.log_moments(n);
    let coeffs = lm.iter().map(|l| Complex64::new((-l).exp(), 0.0)).collect();
    TruncatedSeries::new(*family, coeffs)
}

/// `Δ_h E(λ·)` truncated at order `n`: coefficients `C(p,h) λ^{p−h} / m(p)`.
pub fn delta_kernel_series(
    family: &MomentFamily,
    lambda: Complex64,
    h: usize,
    n: usize,
) -> TruncatedSeries {
    let lm = family.log_moments(n);
    let mut coeffs = vec![Complex64::ZERO; n + 1];
    if lambda == Complex64::ZERO {
        if h <= n {
            coeffs[h] = Complex64::new((-lm[h]).exp(), 0.0);
        }
    } else {
        let ln_l = lambda.norm().ln();
        let arg_l = lambda.arg();
        let mut binom = LogBinomial::new(h);
        for (p, c) in coeffs.iter_mut().enumerate().skip(h) {
            let log_mag = binom.get(p) + (p - h) as f64 * ln_l - lm[p];
            *c = Complex64::from_polar(log_mag.exp(), (p - h) as f64 * arg_l);
        }
    }
    TruncatedSeries::new(*family, coeffs)
}

/// Coefficientwise residual of the chain recursion
/// `(∂ₘ − λ) Δ_h E(λz) = Δ_{h−1} E(λz)` built to order `n`.
///
/// Returns the largest relative residual over orders `p <= n−1`; the identity
/// is exact in exact arithmetic, so anything beyond rounding noise signals a
/// defect in the series constructors or the moment derivative.
pub fn check_delta_recursion(
    family: &MomentFamily,
    lambda: Complex64,
    h: usize,
    n: usize,
) -> Result<f64, KernelError> {
    assert!(h >= 1, "recursion check needs h >= 1");
    assert!(n >= h + 2, "series order too small for the check");
    let s_h = delta_kernel_series(family, lambda, h, n);
    let s_lower = delta_kernel_series(family, lambda, h - 1, n - 1);
    let derived = s_h.moment_derivative()?;
    let mut worst = 0.0f64;
    for p in 0..n {
        let lhs = derived.coeff(p) - lambda * s_h.coeff(p);
        let rhs = s_lower.coeff(p);
        let scale = derived.coeff(p).norm() + (lambda * s_h.coeff(p)).norm() + rhs.norm();
        if scale > 0.0 {
            worst = worst.max((lhs - rhs).norm() / scale);
        } else {
            worst = worst.max((lhs - rhs).norm());
        }
    }
    Ok(worst)
}
