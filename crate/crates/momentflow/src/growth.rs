//! Growth of entire solutions at infinity.
//!
//! Order and type are estimated from Taylor coefficients (supplied as
//! log-magnitudes, since the coefficients themselves underflow long before
//! the estimators converge), directional growth is sampled along rays and
//! compared with the closed-form indicator of the kernel, decay sectors and
//! stability labels come from the eigenvalue arguments against the `πω/2`
//! sector, and the global bound `|y| ≤ C₁·exp(M(C₂|z|))` is fitted on a
//! radial fan.
//!
//! Everything here samples and fits; nothing certifies. Radial sampling is
//! capped where the kernel evaluator refuses for cancellation, and the
//! capped radius is recorded in the sample diagnostics.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::kernel::KernelError;
use crate::moments::MomentFamily;
use crate::solver::{CauchySolution, SolverError};
use crate::spectral::JordanDecomposition;

/// Fraction of the coefficient window used by the limsup surrogates.
pub const DEFAULT_WINDOW: f64 = 0.25;
/// Minimum number of coefficients for order/type estimation.
pub const MIN_COEFFS: usize = 100;
/// Angular tolerance of the stability classification.
pub const DEFAULT_ANGLE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum GrowthError {
    #[error("need at least {needed} coefficients, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("no bound constant up to {max_candidate:.3} kept the ratio bounded on the grid")]
    FitFailure { max_candidate: f64 },
    #[error("ray theta={theta:.4} unreachable at every grid radius: {reason}")]
    RayUnreachable { theta: f64, reason: String },
    #[error("evaluation failed: {0}")]
    Evaluation(String),
}

impl From<KernelError> for GrowthError {
    fn from(e: KernelError) -> Self {
        GrowthError::Evaluation(e.to_string())
    }
}

impl From<SolverError> for GrowthError {
    fn from(e: SolverError) -> Self {
        GrowthError::Evaluation(e.to_string())
    }
}

fn window_start(len: usize, window: f64) -> usize {
    let frac = window.clamp(0.01, 1.0);
    ((len as f64) * (1.0 - frac)).floor() as usize
}

fn median(mut values: Vec<f64>) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).expect("finite estimates"));
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

/// Estimate the order `ρ` of an entire function from `ln|a_p|`.
///
/// The defining limsup `p·ln p / (−ln|a_p|)` converges only like `1/ln p`,
/// which at a few thousand coefficients is still 15% off. The estimator used
/// here is its second-difference form `1/(p·Δ²(−ln|a_p|))`, exact to `O(1/p)`
/// for gamma-type coefficient scales; the median over the tail window makes
/// it robust to isolated coefficient cancellations. Zero coefficients
/// (`ln|a_p| = −inf`) are skipped; an all-zero tail means a polynomial and
/// estimates to order 0.
pub fn estimate_order(log_abs: &[f64], window: f64) -> Result<f64, GrowthError> {
    if log_abs.len() < MIN_COEFFS {
        return Err(GrowthError::InsufficientData {
            needed: MIN_COEFFS,
            got: log_abs.len(),
        });
    }
    let start = window_start(log_abs.len(), window);
    let usable: Vec<usize> = (start..log_abs.len())
        .filter(|&p| log_abs[p].is_finite())
        .collect();
    if usable.is_empty() {
        return Ok(0.0); // polynomial tail
    }
    let mut estimates = Vec::new();
    for p in start.max(1)..log_abs.len() - 1 {
        let (g0, g1, g2) = (-log_abs[p - 1], -log_abs[p], -log_abs[p + 1]);
        if !(g0.is_finite() && g1.is_finite() && g2.is_finite()) {
            continue;
        }
        let dd = g2 - 2.0 * g1 + g0;
        if dd > 0.0 {
            estimates.push(1.0 / (p as f64 * dd));
        }
    }
    if estimates.is_empty() {
        // lacunary or too-noisy tail: fall back to the raw surrogate
        let raw = usable
            .iter()
            .filter(|&&p| p >= 2 && -log_abs[p] > 0.0)
            .map(|&p| (p as f64) * (p as f64).ln() / (-log_abs[p]))
            .fold(f64::NAN, f64::max);
        if raw.is_nan() {
            return Err(GrowthError::InsufficientData {
                needed: MIN_COEFFS,
                got: 0,
            });
        }
        return Ok(raw);
    }
    Ok(median(estimates))
}

/// Estimate the type `σ` (relative to order `rho`) from `ln|a_p|` via the
/// tail maximum of `p^{1/ρ}|a_p|^{1/p}`, solving `(σeρ)^{1/ρ} = limsup`.
pub fn estimate_type(log_abs: &[f64], rho: f64, window: f64) -> Result<f64, GrowthError> {
    assert!(rho > 0.0, "type estimation needs a positive order");
    if log_abs.len() < MIN_COEFFS {
        return Err(GrowthError::InsufficientData {
            needed: MIN_COEFFS,
            got: log_abs.len(),
        });
    }
    let start = window_start(log_abs.len(), window).max(1);
    let mut log_limit = f64::NEG_INFINITY;
    for p in start..log_abs.len() {
        if log_abs[p].is_finite() {
            log_limit = log_limit.max((p as f64).ln() / rho + log_abs[p] / p as f64);
        }
    }
    if log_limit == f64::NEG_INFINITY {
        return Ok(0.0); // polynomial tail has type 0 relative to any positive order
    }
    Ok((rho * log_limit).exp() / (std::f64::consts::E * rho))
}

/// One radius of an indicator scan.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RaySample {
    pub r: f64,
    /// `ln ‖f(r e^{iθ})‖`; `-inf` when the value underflowed.
    pub ln_norm: f64,
    /// `ln ‖f‖ / r^ρ`.
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    NonDecreasing,
    NonIncreasing,
    Mixed,
    Single,
}

/// Result of sampling `ln|f|/r^ρ` along one ray.
#[derive(Debug, Clone, Serialize)]
pub struct IndicatorSample {
    pub theta: f64,
    /// Indicator estimate at the largest safely evaluable radius.
    pub h_hat: f64,
    pub r_used: f64,
    /// True when larger grid radii were refused for cancellation.
    pub capped: bool,
    pub samples: Vec<RaySample>,
    pub monotonicity: Monotonicity,
}

/// Sample the growth indicator along the ray of angle `theta`.
///
/// The evaluator returns `(norm, error bound)` of the function at a point.
/// Radii are visited in ascending order; the first refusal caps the scan
/// (cancellation grows with the radius, so later radii would fail too). If
/// not even the smallest radius evaluates, the failure propagates and the
/// caller must shrink the grid.
pub fn indicator_sample<F>(
    mut evaluate: F,
    theta: f64,
    r_grid: &[f64],
    rho: f64,
) -> Result<IndicatorSample, GrowthError>
where
    F: FnMut(Complex64) -> Result<(f64, f64), GrowthError>,
{
    assert!(!r_grid.is_empty(), "radius grid must be nonempty");
    assert!(
        r_grid.windows(2).all(|w| w[0] < w[1]),
        "radius grid must be ascending"
    );
    let mut samples: Vec<RaySample> = Vec::new();
    let mut capped = false;
    for &r in r_grid {
        let z = Complex64::from_polar(r, theta);
        match evaluate(z) {
            Ok((norm, bound)) => {
                // a value below its own certified noise floor is
                // indistinguishable from zero on this ray
                let ln_norm = if norm > bound && norm > 0.0 {
                    norm.ln()
                } else {
                    f64::NEG_INFINITY
                };
                samples.push(RaySample {
                    r,
                    ln_norm,
                    h: ln_norm / r.powf(rho),
                });
            }
            Err(e) => {
                if samples.is_empty() {
                    return Err(GrowthError::RayUnreachable {
                        theta,
                        reason: e.to_string(),
                    });
                }
                capped = true;
                break;
            }
        }
    }
    let hs: Vec<f64> = samples.iter().map(|s| s.h).collect();
    let monotonicity = if hs.len() < 2 {
        Monotonicity::Single
    } else {
        let up = hs.windows(2).all(|w| w[1] >= w[0] - 1e-9);
        let down = hs.windows(2).all(|w| w[1] <= w[0] + 1e-9);
        match (up, down) {
            (true, _) => Monotonicity::NonDecreasing,
            (_, true) => Monotonicity::NonIncreasing,
            _ => Monotonicity::Mixed,
        }
    };
    let last = samples.last().expect("at least one sample");
    Ok(IndicatorSample {
        theta,
        h_hat: last.h,
        r_used: last.r,
        capped,
        samples,
        monotonicity,
    })
}

fn wrap_to_pi(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut y = x % two_pi;
    if y > std::f64::consts::PI {
        y -= two_pi;
    } else if y <= -std::f64::consts::PI {
        y += two_pi;
    }
    y
}

/// Closed-form indicator of `z ↦ E(λz)`:
/// `|λ|^ρ·cos(ρ(θ+arg λ))` inside `|θ+arg λ| ≤ min(π, π/2ρ)` and `0` on the
/// complementary branch (which exists only for `ρ ≥ 1/2`).
pub fn theoretical_indicator(lambda: Complex64, rho: f64, theta: f64) -> f64 {
    assert!(rho > 0.0);
    assert!(lambda != Complex64::ZERO, "indicator scaling needs lambda != 0");
    let phi = wrap_to_pi(theta + lambda.arg());
    let limit = std::f64::consts::PI.min(std::f64::consts::PI / (2.0 * rho));
    if phi.abs() <= limit {
        lambda.norm().powf(rho) * (rho * phi).cos()
    } else {
        0.0
    }
}

/// Upper bound for the indicator of any solution component:
/// the maximum kernel indicator over the spectrum. Zero eigenvalues
/// contribute 0 (their terms are polynomials).
pub fn solution_indicator_bound(dec: &JordanDecomposition, rho: f64, theta: f64) -> f64 {
    let mut best = 0.0f64;
    for info in &dec.eigenvalues {
        if info.lambda != Complex64::ZERO {
            best = best.max(theoretical_indicator(info.lambda, rho, theta));
        }
    }
    best
}

/// An open angular interval on the circle: `lo` normalized to `[0, 2π)`,
/// `hi ∈ (lo, lo + 2π)`; membership is tested modulo `2π`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AngleInterval {
    pub lo: f64,
    pub hi: f64,
}

impl AngleInterval {
    pub fn contains(&self, theta: f64) -> bool {
        let two_pi = 2.0 * std::f64::consts::PI;
        let offset = (theta - self.lo).rem_euclid(two_pi);
        offset > 0.0 && offset < self.hi - self.lo
    }
}

/// Directions along which every solution of the system decays.
#[derive(Debug, Clone, Serialize)]
pub struct DecaySectors {
    pub sectors: Vec<AngleInterval>,
    /// True when zero eigenvalues were present and skipped: their terms are
    /// polynomial and do not decay anywhere.
    pub zero_eigenvalue_excluded: bool,
}

impl DecaySectors {
    pub fn contains(&self, theta: f64) -> bool {
        self.sectors.iter().any(|s| s.contains(theta))
    }

    pub fn is_empty(&self) -> bool {
        self.sectors.is_empty()
    }
}

/// Intersection over the spectrum of the per-eigenvalue decay arcs
/// `ωπ/2 − arg λ < θ < 2π − ωπ/2 − arg λ` (mod 2π).
pub fn decay_sectors(dec: &JordanDecomposition, omega: f64) -> DecaySectors {
    assert!(omega > 0.0);
    let two_pi = 2.0 * std::f64::consts::PI;
    let arc_len = two_pi - omega * std::f64::consts::PI;
    let lambdas: Vec<Complex64> = dec
        .eigenvalues
        .iter()
        .map(|e| e.lambda)
        .filter(|l| *l != Complex64::ZERO)
        .collect();
    let excluded = lambdas.len() != dec.eigenvalues.len();
    if lambdas.is_empty() || arc_len <= 0.0 {
        return DecaySectors {
            sectors: Vec::new(),
            zero_eigenvalue_excluded: excluded,
        };
    }
    let arcs: Vec<AngleInterval> = lambdas
        .iter()
        .map(|l| {
            let lo = (omega * std::f64::consts::PI / 2.0 - l.arg()).rem_euclid(two_pi);
            AngleInterval {
                lo,
                hi: lo + arc_len,
            }
        })
        .collect();

    // split the circle at every arc endpoint and keep segments interior to all
    let mut cuts: Vec<f64> = arcs
        .iter()
        .flat_map(|a| [a.lo, a.hi.rem_euclid(two_pi)])
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let m = cuts.len();
    let mut kept = vec![false; m];
    for i in 0..m {
        let next = cuts[(i + 1) % m] + if i + 1 == m { two_pi } else { 0.0 };
        let mid = 0.5 * (cuts[i] + next);
        kept[i] = arcs.iter().all(|a| a.contains(mid));
    }
    // merge consecutive kept segments, starting from a non-kept boundary
    let Some(start) = (0..m).find(|&i| !kept[i]) else {
        // all segments kept cannot happen for proper arcs; return full circle
        return DecaySectors {
            sectors: vec![AngleInterval { lo: 0.0, hi: two_pi }],
            zero_eigenvalue_excluded: excluded,
        };
    };
    let mut sectors = Vec::new();
    let mut open: Option<(f64, f64)> = None;
    for k in 1..=m {
        let i = (start + k) % m;
        let seg_lo = cuts[i];
        let seg_hi = if i + 1 == m { cuts[0] + two_pi } else { cuts[i + 1] };
        if kept[i] {
            open = match open {
                None => Some((seg_lo, seg_hi)),
                Some((lo, hi)) => {
                    // consecutive segments share an endpoint modulo 2π
                    let adjusted = if (seg_lo - hi).rem_euclid(two_pi) < 1e-9
                        || (hi - seg_lo).abs() < 1e-9
                    {
                        (lo, hi + (seg_hi - seg_lo))
                    } else {
                        sectors.push(AngleInterval { lo, hi });
                        (seg_lo, seg_hi)
                    };
                    Some(adjusted)
                }
            };
        } else if let Some((lo, hi)) = open.take() {
            sectors.push(AngleInterval { lo, hi });
        }
    }
    if let Some((lo, hi)) = open {
        sectors.push(AngleInterval { lo, hi });
    }
    for s in &mut sectors {
        let lo = s.lo.rem_euclid(two_pi);
        let len = s.hi - s.lo;
        s.lo = lo;
        s.hi = lo + len;
    }
    sectors.sort_by(|a, b| a.lo.partial_cmp(&b.lo).unwrap());
    DecaySectors {
        sectors,
        zero_eigenvalue_excluded: excluded,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StabilityLabel {
    Decaying,
    Boundary,
    Growing,
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityEntry {
    #[serde(serialize_with = "crate::spectral::serialize_complex")]
    pub lambda: Complex64,
    pub label: StabilityLabel,
}

/// Classify each eigenvalue against the stability sector `|arg λ| > πω/2`.
/// Zero eigenvalues sit on the boundary (polynomial growth).
pub fn stability_classify(
    dec: &JordanDecomposition,
    omega: f64,
    tol_angle: f64,
) -> Vec<StabilityEntry> {
    let threshold = std::f64::consts::PI * omega / 2.0;
    dec.eigenvalues
        .iter()
        .map(|info| {
            let label = if info.lambda == Complex64::ZERO {
                StabilityLabel::Boundary
            } else {
                let a = info.lambda.arg().abs();
                if a > threshold + tol_angle {
                    StabilityLabel::Decaying
                } else if a < threshold - tol_angle {
                    StabilityLabel::Growing
                } else {
                    StabilityLabel::Boundary
                }
            };
            StabilityEntry {
                lambda: info.lambda,
                label,
            }
        })
        .collect()
}

/// Fit of the global growth bound.
#[derive(Debug, Clone, Copy, Serialize)]
#[serde(untagged)]
pub enum BoundFit {
    /// `|y_j(z)| ≤ C1·exp(M(C2·|z|))` held on the sampled fan.
    Exponential {
        #[serde(rename = "C1")]
        c1: f64,
        #[serde(rename = "C2")]
        c2: f64,
    },
    /// Spectrum was `{0}`: solutions are polynomials of this degree.
    Polynomial { degree: usize },
}

/// Fit `C1, C2` in `|y_j(z)| ≤ C1·exp(M(C2·|z|))` over an 8-direction fan.
///
/// A candidate `C2` is accepted when the peak ratio `‖y‖/exp(M(C2 r))` stops
/// growing at the outer end of the radial grid (within 10%); the matching
/// `C1` is the peak ratio itself. Candidates run from `max|λ|/4` up to
/// `10·max|λ|`, smallest first. When 0 is the only eigenvalue the solution is
/// a polynomial and the fit reports its coefficientwise degree instead.
pub fn fit_global_bound(
    sol: &CauchySolution,
    r_grid: &[f64],
    family: &MomentFamily,
) -> Result<BoundFit, GrowthError> {
    let n = sol.dim();
    let max_lambda = sol
        .fundamental
        .terms
        .iter()
        .map(|t| t.lambda.norm())
        .fold(0.0f64, f64::max);
    let zero_scale = 1e-12 * (1.0 + sol.fundamental.matrix.frobenius_norm());
    if max_lambda <= zero_scale {
        // polynomial branch: degree read off the coefficients
        let series = sol.component_series(n + 4);
        let coeff_scale = series
            .iter()
            .flat_map(|s| s.coeffs().iter().map(|c| c.norm()))
            .fold(0.0f64, f64::max);
        let mut degree = 0usize;
        for s in &series {
            for (p, c) in s.coeffs().iter().enumerate() {
                if c.norm() > 1e-10 * coeff_scale {
                    degree = degree.max(p);
                }
            }
        }
        return Ok(BoundFit::Polynomial { degree });
    }

    // ln of the fan maximum of ‖y‖_inf per radius; rays lost to cancellation
    // are skipped (they cannot carry the maximum)
    let mut profile: Vec<(f64, f64)> = Vec::new();
    for &r in r_grid {
        let mut best = f64::NEG_INFINITY;
        for k in 0..8 {
            let theta = std::f64::consts::PI * k as f64 / 4.0;
            let z = Complex64::from_polar(r, theta);
            if let Ok(v) = sol.eval(z, 1e-10) {
                let norm = v.values.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
                if norm > 0.0 {
                    best = best.max(norm.ln());
                }
            }
        }
        if best > f64::NEG_INFINITY {
            profile.push((r, best));
        }
    }
    if profile.len() < 3 {
        return Err(GrowthError::Evaluation(
            "fewer than 3 usable radii on the bound-fit fan".to_string(),
        ));
    }

    let candidates: [f64; 16] = [
        0.25, 0.5, 0.75, 0.9, 1.0, 1.1, 1.25, 1.5, 1.75, 2.0, 2.5, 3.0, 4.0, 5.0, 7.5, 10.0,
    ];
    for factor in candidates {
        let c2 = factor * max_lambda;
        let log_ratios: Vec<f64> = profile
            .iter()
            .map(|&(r, ln_norm)| ln_norm - family.associated_m(c2 * r))
            .collect();
        let (last, prior) = log_ratios.split_last().expect("profile nonempty");
        let prior_max = prior.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if *last <= prior_max + 0.1f64.ln_1p() {
            let c1 = log_ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            return Ok(BoundFit::Exponential { c1: c1.exp(), c2 });
        }
    }
    Err(GrowthError::FitFailure {
        max_candidate: 10.0 * max_lambda,
    })
}

/// Entry of the indicator table in a growth report.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct IndicatorEntry {
    pub theta: f64,
    /// Sampled indicator; `None` when the ray underflowed to zero.
    pub h_hat: Option<f64>,
    pub h_theory: f64,
    pub r_used: f64,
    pub capped: bool,
}

/// Machine-readable growth summary of one solved system.
#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct GrowthReport {
    pub order: f64,
    #[serde(rename = "type")]
    pub type_estimate: f64,
    pub type_upper_bound: f64,
    pub theoretical_order: f64,
    pub indicator: Vec<IndicatorEntry>,
    pub decay_sectors: Vec<[f64; 2]>,
    pub stability: Vec<StabilityEntry>,
    pub bound_fit: Option<BoundFit>,
    pub notes: Vec<String>,
}

/// Knobs for [`growth_report`].
#[derive(Debug, Clone)]
pub struct GrowthOptions {
    /// Tail fraction for the limsup surrogates.
    pub window: f64,
    /// Coefficient count driving order/type estimation.
    pub coeff_order: usize,
    /// Ray angles for indicator sampling; defaults to the 8-direction fan.
    pub thetas: Vec<f64>,
    /// Radial grid; empty means a family-and-spectrum-aware default.
    pub r_grid: Vec<f64>,
}

impl Default for GrowthOptions {
    fn default() -> Self {
        GrowthOptions {
            window: DEFAULT_WINDOW,
            coeff_order: 2000,
            thetas: (0..8)
                .map(|k| -std::f64::consts::PI + std::f64::consts::PI * k as f64 / 4.0)
                .collect(),
            r_grid: Vec::new(),
        }
    }
}

/// Radial grid keeping `exp((|λ|r)^ρ)` representable with headroom.
pub fn default_r_grid(family: &MomentFamily, max_lambda: f64) -> Vec<f64> {
    let rho = family.growth_order();
    let r_max = (620f64.powf(1.0 / rho) / max_lambda.max(1.0)).clamp(4.0, 40.0);
    (1..=6).map(|k| r_max * k as f64 / 6.0).collect()
}

/// Assemble the full growth report for a solved system. Partial failures
/// (unreachable rays, failed fits) degrade to notes instead of aborting.
pub fn growth_report(
    sol: &CauchySolution,
    dec: &JordanDecomposition,
    opts: &GrowthOptions,
) -> GrowthReport {
    let family = sol.fundamental.family;
    let rho_theory = family.growth_order();
    let omega = family.opening();
    let mut notes = Vec::new();

    let max_lambda = dec
        .eigenvalues
        .iter()
        .map(|e| e.lambda.norm())
        .fold(0.0f64, f64::max);
    let type_upper_bound = max_lambda.powf(rho_theory);

    // order/type from component coefficients in log space
    let logs = sol.log_abs_component_coeffs(opts.coeff_order);
    let mut order = 0.0f64;
    let mut type_estimate = 0.0f64;
    for (j, component) in logs.iter().enumerate() {
        match estimate_order(component, opts.window) {
            Ok(o) => order = order.max(o),
            Err(e) => notes.push(format!("order estimate failed for component {j}: {e}")),
        }
        match estimate_type(component, rho_theory, opts.window) {
            Ok(t) => type_estimate = type_estimate.max(t),
            Err(e) => notes.push(format!("type estimate failed for component {j}: {e}")),
        }
    }

    // indicator fan over solution norms
    let r_grid = if opts.r_grid.is_empty() {
        default_r_grid(&family, max_lambda)
    } else {
        opts.r_grid.clone()
    };
    let mut indicator = Vec::new();
    for &theta in &opts.thetas {
        let h_theory = solution_indicator_bound(dec, rho_theory, theta);
        match indicator_sample(
            |z| {
                let v = sol.eval(z, 1e-10).map_err(GrowthError::from)?;
                let norm = v.values.iter().map(|c| c.norm()).fold(0.0f64, f64::max);
                let bound = v.error_bounds.iter().cloned().fold(0.0f64, f64::max);
                Ok((norm, bound))
            },
            theta,
            &r_grid,
            rho_theory,
        ) {
            Ok(sample) => indicator.push(IndicatorEntry {
                theta,
                h_hat: sample.h_hat.is_finite().then_some(sample.h_hat),
                h_theory,
                r_used: sample.r_used,
                capped: sample.capped,
            }),
            Err(e) => {
                notes.push(format!("indicator ray theta={theta:.4} skipped: {e}"));
                indicator.push(IndicatorEntry {
                    theta,
                    h_hat: None,
                    h_theory,
                    r_used: f64::NAN,
                    capped: true,
                });
            }
        }
    }

    let sectors = decay_sectors(dec, omega);
    if sectors.zero_eigenvalue_excluded {
        notes.push("zero eigenvalues excluded from decay sectors (polynomial terms)".to_string());
    }
    let stability = stability_classify(dec, omega, DEFAULT_ANGLE_TOL);

    let bound_fit = match fit_global_bound(sol, &r_grid, &family) {
        Ok(fit) => Some(fit),
        Err(e) => {
            notes.push(format!("global bound fit failed: {e}"));
            None
        }
    };

    GrowthReport {
        order,
        type_estimate,
        type_upper_bound,
        theoretical_order: rho_theory,
        indicator,
        decay_sectors: sectors.sectors.iter().map(|s| [s.lo, s.hi]).collect(),
        stability,
        bound_fit,
        notes,
    }
}
