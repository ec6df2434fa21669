//! Exact entire solutions of linear systems of moment differential equations
//! and the asymptotic growth of those solutions at infinity.
//!
//! A moment sequence `m(p)` (for example `p!`, or `Γ(1+sp)` in the fractional
//! case) defines the moment derivative, a coefficient shift on power series
//! written in the basis `z^p/m(p)`, and the kernel function
//! `E(z) = Σ z^p/m(p)`, the moment analogue of the exponential. This crate
//! builds the full solution space of `∂ₘy = Az` from the Jordan decomposition
//! of `A`, checks the closed forms against a brute-force series oracle, and
//! quantifies how solutions grow along rays to infinity (order, type,
//! directional indicator, decay sectors, stability labels).
//!
//! Module map:
//! - [`moments`]: moment-sequence families, log-moment values, the associated
//!   growth function `M(t)`, and regularity checks.
//! - [`kernel`]: truncated-series engine for `E(z)` and its binomially
//!   weighted variants `Δ_h E(λz)`, with cancellation-aware summation.
//! - [`matrix`] / [`spectral`]: small dense complex matrices, eigenvalues with
//!   multiplicities, and generalized-eigenvector (Jordan) chains.
//! - [`solver`]: fundamental solution systems, Cauchy problems, evaluation,
//!   and the independent power-series oracle.
//! - [`growth`]: order/type estimation from coefficients, indicator sampling,
//!   decay sectors, stability classification and global bound fitting.

pub mod growth;
pub mod kernel;
pub mod matrix;
pub mod moments;
pub mod solver;
pub mod spectral;
mod sum;

pub use growth::{
    decay_sectors, estimate_order, estimate_type, fit_global_bound, indicator_sample,
    solution_indicator_bound, stability_classify, theoretical_indicator, BoundFit, DecaySectors,
    GrowthError, GrowthReport, IndicatorSample, StabilityLabel,
};
pub use kernel::{
    check_delta_recursion, delta_kernel_series, eval_delta_h, eval_delta_h_via_derivative, eval_e,
    kernel_series, EvalResult, KernelError, TruncatedSeries,
};
pub use matrix::ComplexMatrix;
pub use moments::{MomentError, MomentFamily, RegularityReport};
pub use solver::{
    fundamental_system, oracle_eval, residual_check, solve_cauchy, CauchySolution,
    FundamentalSolution, SolutionTerm, SolverError,
};
pub use spectral::{
    decompose, eigenvalues, jordan_chains, Chain, DecomposeOptions, EigenvalueInfo,
    JordanDecomposition, SpectralError,
};

pub use num_complex::Complex64;
