//! Eigenvalues with multiplicities and generalized-eigenvector chains.
//!
//! The pipeline: characteristic polynomial by Faddeev–LeVerrier on a
//! norm-scaled copy of the matrix, simultaneous root iteration
//! (Aberth–Ehrlich), cluster detection with Newton refinement of multiple
//! roots, and rank-revealing null-space analysis of `(A−λI)^k` for the chain
//! structure. Everything is sized for the hard cap `n <= 8`.
//!
//! Jordan structure is discontinuous in the matrix entries, so clustering is
//! a declared policy rather than a correctness claim for borderline inputs;
//! rank decisions that land near the threshold error out as
//! [`SpectralError::RankAmbiguity`] instead of guessing.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::matrix::{vec_norm, ComplexMatrix};

/// Default relative rank threshold.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Default relative root-cluster radius.
pub const DEFAULT_CLUSTER_RADIUS: f64 = 1e-7;
/// Maximum Aberth sweeps before giving up.
const MAX_SWEEPS: usize = 500;
/// Backward-error scale below which the cluster-size-adaptive merge treats
/// roots as one multiple root: radius `EPS_CLUSTER^{1/k}` for a size-`k`
/// candidate, in units of the scaled (spectral-radius ~ 1) problem.
const EPS_CLUSTER: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),
    #[error("root iteration failed to converge within {0} sweeps")]
    RootFindingFailure(usize),
    #[error("rank decision unreliable: pivot {pivot:.3e} within a factor 10 of threshold {threshold:.3e}")]
    RankAmbiguity { pivot: f64, threshold: f64 },
    #[error("eigenvalue hint {hint} rejected: {reason}")]
    HintRejected { hint: Complex64, reason: String },
    #[error("jordan structure inconsistent: {0}")]
    StructureMismatch(String),
}

/// One distinct eigenvalue with its multiplicities.
#[derive(Debug, Clone, Serialize)]
pub struct EigenvalueInfo {
    #[serde(serialize_with = "crate::spectral::serialize_complex")]
    pub lambda: Complex64,
    pub algebraic: usize,
    pub geometric: usize,
}

/// A Jordan chain: `vectors[0]` is the eigenvector and
/// `(A − λI)·vectors[i+1] = vectors[i]`.
#[derive(Debug, Clone)]
pub struct Chain {
    pub lambda: Complex64,
    pub vectors: Vec<Vec<Complex64>>,
}

impl Chain {
    pub fn length(&self) -> usize {
        self.vectors.len()
    }
}

/// Complete spectral data: one entry per distinct eigenvalue plus the chains.
#[derive(Debug, Clone)]
pub struct JordanDecomposition {
    pub eigenvalues: Vec<EigenvalueInfo>,
    pub chains: Vec<Chain>,
    dim: usize,
}

impl JordanDecomposition {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// All chain vectors as columns, ordered chain by chain (eigenvector first).
    pub fn basis_matrix(&self) -> ComplexMatrix {
        let cols: Vec<Vec<Complex64>> = self
            .chains
            .iter()
            .flat_map(|c| c.vectors.iter().cloned())
            .collect();
        ComplexMatrix::from_columns(&cols).expect("chain vectors form a square basis")
    }

    /// Block-diagonal Jordan form matching [`basis_matrix`](Self::basis_matrix).
    pub fn jordan_matrix(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut j = ComplexMatrix::zeros(n);
        let mut offset = 0;
        for chain in &self.chains {
            let l = chain.length();
            for i in 0..l {
                j[(offset + i, offset + i)] = chain.lambda;
                if i + 1 < l {
                    j[(offset + i, offset + i + 1)] = Complex64::ONE;
                }
            }
            offset += l;
        }
        j
    }
}

pub(crate) fn serialize_complex<S: serde::Serializer>(
    c: &Complex64,
    s: S,
) -> Result<S::Ok, S::Error> {
    [c.re, c.im].serialize(s)
}

/// Options for [`decompose`].
#[derive(Debug, Clone, Default)]
pub struct DecomposeOptions {
    /// Relative rank threshold (default 1e-9).
    pub tol: Option<f64>,
    /// Relative base cluster radius (default 1e-7).
    pub cluster_radius: Option<f64>,
    /// Known eigenvalues; validated and used in place of root finding.
    pub hints: Option<Vec<Complex64>>,
}

/// Monic characteristic polynomial of `det(zI − A)` by Faddeev–LeVerrier.
/// Coefficients descending: `[1, c_1, ..., c_n]`.
fn characteristic_polynomial(a: &ComplexMatrix) -> Vec<Complex64> {
    let n = a.dim();
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(Complex64::ONE);
    let mut m = a.clone();
    let mut c = -m.trace();
    coeffs.push(c);
    for k in 2..=n {
        let mut shifted = m.clone();
        for i in 0..n {
            shifted[(i, i)] += c;
        }
        m = a.matmul(&shifted);
        c = -m.trace() / k as f64;
        coeffs.push(c);
    }
    coeffs
}

/// Horner evaluation of the polynomial and its derivative, plus the
/// condition sum `Σ |c_k| |z|^{d−k}` used for backward-error stopping.
fn horner(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64, f64) {
    let mut p = Complex64::ZERO;
    let mut dp = Complex64::ZERO;
    let mut cond = 0.0;
    let zn = z.norm();
    for c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
        cond = cond * zn + c.norm();
    }
    (p, dp, cond)
}

fn derivative_coeffs(coeffs: &[Complex64]) -> Vec<Complex64> {
    let d = coeffs.len() - 1;
    coeffs[..d]
        .iter()
        .enumerate()
        .map(|(k, c)| c * (d - k) as f64)
        .collect()
}

/// All roots of a monic polynomial by simultaneous Aberth–Ehrlich iteration.
/// Roots are expected to be O(1); callers pre-scale.
fn aberth(coeffs: &[Complex64]) -> Result<Vec<Complex64>, SpectralError> {
    let d = coeffs.len() - 1;
    if d == 0 {
        return Ok(Vec::new());
    }
    if d == 1 {
        return Ok(vec![-coeffs[1]]);
    }
    let mut roots: Vec<Complex64> = (0..d)
        .map(|j| Complex64::from_polar(1.2, 2.0 * std::f64::consts::PI * j as f64 / d as f64 + 0.7))
        .collect();
    let mut converged = vec![false; d];
    for _sweep in 0..MAX_SWEEPS {
        let mut worst = 0.0f64;
        for j in 0..d {
            if converged[j] {
                continue;
            }
            let z = roots[j];
            let (p, dp, cond) = horner(coeffs, z);
            if p.norm() <= 8.0 * d as f64 * f64::EPSILON * cond {
                converged[j] = true;
                continue;
            }
            let newton = if dp.norm() > 0.0 { p / dp } else { Complex64::new(1e-3, 1e-3) };
            let mut repulsion = Complex64::ZERO;
            for (k, other) in roots.iter().enumerate() {
                if k != j {
                    let diff = z - other;
                    if diff.norm() > 1e-300 {
                        repulsion += diff.inv();
                    }
                }
            }
            let denom = Complex64::ONE - newton * repulsion;
            let step = if denom.norm() > 1e-12 { newton / denom } else { newton };
            if !step.re.is_finite() || !step.im.is_finite() {
                return Err(SpectralError::RootFindingFailure(MAX_SWEEPS));
            }
            roots[j] = z - step;
            worst = worst.max(step.norm() / (1.0 + roots[j].norm()));
        }
        if converged.iter().all(|&c| c) || worst <= 1e-14 {
            return Ok(roots);
        }
    }
    Err(SpectralError::RootFindingFailure(MAX_SWEEPS))
}

/// Cluster numerically split multiple roots.
///
/// Two mechanisms: the declared base radius, and Newton-style inclusion discs
/// `d·|p(z)|/|p'(z)|`, which balloon exactly when a root is part of a split
/// multiple root. Cluster means of size `m` are then polished by Newton on
/// the `(m−1)`-th derivative, where the multiple root is simple.
fn cluster_roots(
    roots: &[Complex64],
    coeffs: &[Complex64],
    base_radius: f64,
) -> Vec<(Complex64, usize)> {
    let d = roots.len();
    let mut radii = vec![0.0f64; d];
    for (j, &z) in roots.iter().enumerate() {
        let (p, dp, _) = horner(coeffs, z);
        radii[j] = if dp.norm() > 0.0 {
            (d as f64 * p.norm() / dp.norm()).min(0.5)
        } else {
            0.5
        };
    }
    // union-find over overlap of inclusion discs or base-radius proximity
    let mut parent: Vec<usize> = (0..d).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..d {
        for j in i + 1..d {
            let dist = (roots[i] - roots[j]).norm();
            if dist <= 3.0 * (radii[i] + radii[j]) + base_radius {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    // size-adaptive second pass: a size-k candidate cluster owns radius
    // EPS_CLUSTER^{1/k}, the scale at which coefficient noise splits a k-fold
    // root; iterate to a fixpoint.
    loop {
        let mut groups = std::collections::BTreeMap::<usize, Vec<usize>>::new();
        for i in 0..d {
            let r = find(&mut parent, i);
            groups.entry(r).or_default().push(i);
        }
        let reps: Vec<(usize, Complex64, usize)> = groups
            .iter()
            .map(|(&r, members)| {
                let mean = members.iter().map(|&i| roots[i]).sum::<Complex64>()
                    / members.len() as f64;
                (r, mean, members.len())
            })
            .collect();
        let mut merged = false;
        for i in 0..reps.len() {
            for j in i + 1..reps.len() {
                let k = reps[i].2 + reps[j].2;
                let radius = EPS_CLUSTER.powf(1.0 / k as f64).max(base_radius);
                if (reps[i].1 - reps[j].1).norm() <= radius {
                    let (ri, rj) = (find(&mut parent, reps[i].0), find(&mut parent, reps[j].0));
                    if ri != rj {
                        parent[ri] = rj;
                        merged = true;
                    }
                }
            }
        }
        if !merged {
            break;
        }
    }
    let mut groups = std::collections::BTreeMap::<usize, Vec<usize>>::new();
    for i in 0..d {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    let mut out = Vec::new();
    for members in groups.values() {
        let m = members.len();
        let mean = members.iter().map(|&i| roots[i]).sum::<Complex64>() / m as f64;
        out.push((refine_multiple_root(coeffs, mean, m), m));
    }
    out
}

/// Newton polish of an m-fold root on the (m−1)-th derivative, where it is simple.
fn refine_multiple_root(coeffs: &[Complex64], start: Complex64, m: usize) -> Complex64 {
    let mut poly = coeffs.to_vec();
    for _ in 0..m - 1 {
        poly = derivative_coeffs(&poly);
    }
    let mut z = start;
    for _ in 0..8 {
        let (p, dp, cond) = horner(&poly, z);
        if dp.norm() == 0.0 || p.norm() <= 2.0 * f64::EPSILON * cond {
            break;
        }
        let step = p / dp;
        if step.norm() > 0.5 {
            return start;
        }
        z -= step;
    }
    z
}

/// Eigenvalues of `A` with multiplicities, deterministically ordered by
/// (re, im). Clustered per the policy above.
pub fn eigenvalues(
    a: &ComplexMatrix,
    cluster_radius: f64,
) -> Result<Vec<(Complex64, usize)>, SpectralError> {
    let n = a.dim();
    if n == 1 {
        return Ok(vec![(a[(0, 0)], 1)]);
    }
    // scale so roots are O(1): guards both Faddeev-LeVerrier and Aberth
    let theta = a.inf_norm().max(1e-300);
    let scaled = a.scaled(Complex64::new(1.0 / theta, 0.0));
    let mut coeffs = characteristic_polynomial(&scaled);

    // peel off numerically zero trailing coefficients as roots at the origin
    let coeff_scale: f64 = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut zero_mult = 0usize;
    while coeffs.len() > 1
        && coeffs.last().unwrap().norm() <= 100.0 * f64::EPSILON * coeff_scale
    {
        coeffs.pop();
        zero_mult += 1;
    }

    let raw = aberth(&coeffs)?;
    let base = cluster_radius * (1.0 + a.frobenius_norm()) / theta;
    let mut clustered = cluster_roots(&raw, &coeffs, base);
    if zero_mult > 0 {
        // merge explicit zeros with any cluster that collapsed onto the origin
        let near_origin = clustered.iter().position(|&(z, m)| {
            z.norm() <= EPS_CLUSTER.powf(1.0 / (m + zero_mult) as f64).max(base)
        });
        match near_origin {
            Some(idx) => {
                clustered[idx].0 = Complex64::ZERO;
                clustered[idx].1 += zero_mult;
            }
            None => clustered.push((Complex64::ZERO, zero_mult)),
        }
    }
    let mut out: Vec<(Complex64, usize)> = clustered
        .into_iter()
        .map(|(z, m)| (z * theta, m))
        .collect();
    out.sort_by(|a, b| {
        (a.0.re, a.0.im)
            .partial_cmp(&(b.0.re, b.0.im))
            .expect("finite eigenvalues")
    });
    Ok(out)
}

/// Jordan chains of `A` at the eigenvalue `lambda`.
///
/// Null spaces of `(A−λI)^k` are computed by full-pivot elimination with a
/// per-power threshold `tol·‖(A−λI)^k‖`; chain heads are drawn from
/// `ker(B^k) \ ker(B^{k−1})` with `k` descending, kept independent of the
/// level-k images of longer chains. Returns one chain per geometric
/// multiplicity; empty when `lambda` is not an eigenvalue at this tolerance.
pub fn jordan_chains(
    a: &ComplexMatrix,
    lambda: Complex64,
    tol: f64,
) -> Result<Vec<Chain>, SpectralError> {
    let n = a.dim();
    let b = a.shifted(lambda);

    // nullities and null-space bases of successive powers; thresholds are
    // anchored at the problem scale ‖A‖+|λ| (entries of B are differences at
    // that scale, so smaller pivots are formation noise) and track ‖B‖^{k−1}
    // across powers (‖B^k‖ itself collapses to noise for nilpotent parts)
    let scale = a.frobenius_norm() + lambda.norm();
    let base_norm = b.frobenius_norm();
    let mut nullities = vec![0usize];
    let mut bases: Vec<Vec<Vec<Complex64>>> = vec![Vec::new()];
    let mut power = b.clone();
    loop {
        let k = nullities.len();
        let threshold = tol * scale * base_norm.powi(k as i32 - 1);
        let lu = power.lu();
        let rank = lu.rank_guarded(threshold)?;
        let nullity = n - rank;
        let prev = *nullities.last().unwrap();
        if nullity == prev {
            break;
        }
        if nullity < prev {
            return Err(SpectralError::StructureMismatch(format!(
                "nullity of power {k} dropped from {prev} to {nullity} at lambda {lambda}"
            )));
        }
        nullities.push(nullity);
        bases.push(lu.null_space(threshold));
        if nullity == n || k == n {
            break;
        }
        power = power.matmul(&b);
    }
    let levels = nullities.len() - 1;
    if levels == 0 {
        return Ok(Vec::new());
    }

    // chains of length exactly k: (d_k − d_{k−1}) − (d_{k+1} − d_k)
    let d = |k: usize| -> usize {
        if k <= levels {
            nullities[k]
        } else {
            nullities[levels]
        }
    };

    let mut chains: Vec<Chain> = Vec::new();
    for k in (1..=levels).rev() {
        let exact_k = (d(k) - d(k - 1)) - (d(k + 1) - d(k));
        if exact_k == 0 {
            continue;
        }
        // occupied directions: ker(B^{k−1}) plus level-k vectors of longer chains
        let mut occupied: Vec<Vec<Complex64>> = bases[k - 1].clone();
        for c in &chains {
            occupied.push(c.vectors[k - 1].clone());
        }
        let mut ortho = orthonormalize(&occupied);
        let mut picked = 0usize;
        let mut candidates: Vec<Vec<Complex64>> = bases[k].clone();
        while picked < exact_k {
            // greedy: candidate with the largest component outside the span
            let mut best: Option<(f64, usize, Vec<Complex64>)> = None;
            for (idx, cand) in candidates.iter().enumerate() {
                let residual = project_out(cand, &ortho);
                let r = vec_norm(&residual);
                if best.as_ref().map_or(true, |(b, _, _)| r > *b) {
                    best = Some((r, idx, residual));
                }
            }
            let (r, idx, residual) = best.ok_or_else(|| {
                SpectralError::StructureMismatch(format!(
                    "ran out of null-space candidates at level {k} for lambda {lambda}"
                ))
            })?;
            if r < 1e-7 {
                return Err(SpectralError::RankAmbiguity {
                    pivot: r,
                    threshold: 1e-7,
                });
            }
            let head = candidates.swap_remove(idx);
            let mut unit = residual;
            for e in &mut unit {
                *e /= r;
            }
            ortho.push(unit);
            chains.push(build_chain(&b, lambda, head, k));
            picked += 1;
        }
    }

    chains.sort_by(|x, y| y.length().cmp(&x.length()));
    Ok(chains)
}

/// Walk a head down the chain: `u_{i−1} = B·u_i`; normalize jointly.
fn build_chain(b: &ComplexMatrix, lambda: Complex64, head: Vec<Complex64>, k: usize) -> Chain {
    let mut vectors = vec![head];
    for _ in 1..k {
        let next = b.matvec(vectors.last().unwrap());
        vectors.push(next);
    }
    vectors.reverse(); // eigenvector first
    let scale = vectors.iter().map(|v| vec_norm(v)).fold(0.0, f64::max);
    if scale > 0.0 {
        for v in &mut vectors {
            for e in v.iter_mut() {
                *e /= scale;
            }
        }
    }
    Chain { lambda, vectors }
}

fn orthonormalize(vectors: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for v in vectors {
        let residual = project_out(v, &basis);
        let norm = vec_norm(&residual);
        if norm > 1e-12 {
            basis.push(residual.iter().map(|e| e / norm).collect());
        }
    }
    basis
}

/// Twice-is-enough modified Gram-Schmidt projection.
fn project_out(v: &[Complex64], ortho: &[Vec<Complex64>]) -> Vec<Complex64> {
    let mut r = v.to_vec();
    for _ in 0..2 {
        for q in ortho {
            let dot: Complex64 = q.iter().zip(r.iter()).map(|(a, b)| a.conj() * b).sum();
            for (ri, qi) in r.iter_mut().zip(q.iter()) {
                *ri -= dot * qi;
            }
        }
    }
    r
}

/// Full Jordan decomposition.
///
/// With hints, root finding is bypassed: each hint must produce at least one
/// chain (otherwise it is not an eigenvalue at tolerance) and the chains must
/// jointly span. Without hints, multiplicities from root clustering must
/// match the rank analysis; a mismatch is reported rather than patched.
pub fn decompose(
    a: &ComplexMatrix,
    options: &DecomposeOptions,
) -> Result<JordanDecomposition, SpectralError> {
    let n = a.dim();
    let tol = options.tol.unwrap_or(DEFAULT_TOL);
    let cluster_radius = options.cluster_radius.unwrap_or(DEFAULT_CLUSTER_RADIUS);
    let norm = a.frobenius_norm();

    let spectrum: Vec<(Complex64, Option<usize>)> = match &options.hints {
        Some(hints) => {
            let mut distinct: Vec<Complex64> = Vec::new();
            for &h in hints {
                if !h.re.is_finite() || !h.im.is_finite() {
                    return Err(SpectralError::HintRejected {
                        hint: h,
                        reason: "hint must be finite".to_string(),
                    });
                }
                if !distinct
                    .iter()
                    .any(|&d| (d - h).norm() <= cluster_radius * (1.0 + norm))
                {
                    distinct.push(h);
                }
            }
            distinct.into_iter().map(|h| (h, None)).collect()
        }
        None => eigenvalues(a, cluster_radius)?
            .into_iter()
            .map(|(z, m)| (z, Some(m)))
            .collect(),
    };

    let mut all_chains = Vec::new();
    let mut infos = Vec::new();
    for (lambda, declared) in spectrum {
        let chains = jordan_chains(a, lambda, tol)?;
        if chains.is_empty() {
            let det = a.shifted(lambda).determinant().norm();
            return Err(match declared {
                None => SpectralError::HintRejected {
                    hint: lambda,
                    reason: format!("det(A − hint·I) = {det:.3e}: not an eigenvalue at tolerance"),
                },
                Some(m) => SpectralError::StructureMismatch(format!(
                    "no chains at computed eigenvalue {lambda} (multiplicity {m}, det {det:.3e})"
                )),
            });
        }
        let algebraic: usize = chains.iter().map(|c| c.length()).sum();
        if let Some(m) = declared {
            if m != algebraic {
                return Err(SpectralError::StructureMismatch(format!(
                    "eigenvalue {lambda}: root clustering says multiplicity {m}, rank analysis says {algebraic}"
                )));
            }
        }
        infos.push(EigenvalueInfo {
            lambda,
            algebraic,
            geometric: chains.len(),
        });
        all_chains.extend(chains);
    }

    let total: usize = infos.iter().map(|i| i.algebraic).sum();
    if total != n {
        return Err(SpectralError::StructureMismatch(format!(
            "chain lengths sum to {total}, expected {n} (incomplete spectrum?)"
        )));
    }

    let dec = JordanDecomposition {
        eigenvalues: infos,
        chains: all_chains,
        dim: n,
    };

    // the n chain vectors must form a usable basis
    let sigma = dec.basis_matrix().smallest_singular_lower_bound();
    if sigma <= tol {
        return Err(SpectralError::RankAmbiguity {
            pivot: sigma,
            threshold: tol,
        });
    }
    Ok(dec)
}
