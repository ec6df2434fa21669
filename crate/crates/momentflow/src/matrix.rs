//! Small dense complex matrices with rank-revealing factorization.
//!
//! Dimensions are capped at 8: every algorithm here (full-pivot elimination,
//! explicit inverses, characteristic polynomials) is chosen for that regime.

use num_complex::Complex64;
use serde::de::{self, Deserializer, SeqAccess, Visitor};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use crate::spectral::SpectralError;

/// Hard cap on matrix dimension.
pub const MAX_DIM: usize = 8;

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self, SpectralError> {
        if n == 0 || n > MAX_DIM {
            return Err(SpectralError::InvalidMatrix(format!(
                "dimension {n} outside 1..={MAX_DIM}"
            )));
        }
        if data.len() != n * n {
            return Err(SpectralError::InvalidMatrix(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        if data.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(SpectralError::InvalidMatrix(
                "matrix entries must be finite".to_string(),
            ));
        }
        Ok(ComplexMatrix { n, data })
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self, SpectralError> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(SpectralError::InvalidMatrix(
                "matrix must be square".to_string(),
            ));
        }
        Self::new(n, rows.concat())
    }

    pub fn zeros(n: usize) -> Self {
        ComplexMatrix {
            n,
            data: vec![Complex64::ZERO; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            m[(i, i)] = e;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn matvec(&self, v: &[Complex64]) -> Vec<Complex64> {
        debug_assert_eq!(v.len(), self.n);
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self[(i, j)] * v[j])
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> ComplexMatrix {
        debug_assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn scaled(&self, factor: Complex64) -> ComplexMatrix {
        ComplexMatrix {
            n: self.n,
            data: self.data.iter().map(|c| c * factor).collect(),
        }
    }

    /// `self − λI`.
    pub fn shifted(&self, lambda: Complex64) -> ComplexMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            out[(i, i)] -= lambda;
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute row sum.
    pub fn inf_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn lu(&self) -> FullPivLu {
        FullPivLu::factor(self)
    }

    pub fn determinant(&self) -> Complex64 {
        self.lu().determinant()
    }

    pub fn inverse(&self) -> Option<ComplexMatrix> {
        let lu = self.lu();
        let n = self.n;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![Complex64::ZERO; n];
            e[j] = Complex64::ONE;
            cols.push(lu.solve(&e)?);
        }
        let mut out = ComplexMatrix::zeros(n);
        for (j, col) in cols.iter().enumerate() {
            for i in 0..n {
                out[(i, j)] = col[i];
            }
        }
        Some(out)
    }

    /// Lower bound on the smallest singular value via `1/‖A⁻¹‖_F`;
    /// zero when the matrix is numerically singular.
    pub fn smallest_singular_lower_bound(&self) -> f64 {
        match self.inverse() {
            Some(inv) => {
                let norm = inv.frobenius_norm();
                if norm > 0.0 {
                    1.0 / norm
                } else {
                    0.0
                }
            }
            None => 0.0,
        }
    }

    /// Columns assembled from vectors.
    pub fn from_columns(cols: &[Vec<Complex64>]) -> Result<Self, SpectralError> {
        let n = cols.len();
        if cols.iter().any(|c| c.len() != n) {
            return Err(SpectralError::InvalidMatrix(
                "column count must match vector length".to_string(),
            ));
        }
        let mut m = Self::new(n, vec![Complex64::ZERO; n * n])?;
        for (j, col) in cols.iter().enumerate() {
            for i in 0..n {
                m[(i, j)] = col[i];
            }
        }
        Ok(m)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// LU factorization with full pivoting: `P A Q = L U`.
///
/// The pivot magnitudes come out in elimination order and act as the
/// "singular-value-like" quantities for rank decisions.
pub struct FullPivLu {
    n: usize,
    lu: Vec<Complex64>,
    row_perm: Vec<usize>,
    col_perm: Vec<usize>,
    swaps: usize,
    pivots: Vec<f64>,
}

impl FullPivLu {
    fn factor(m: &ComplexMatrix) -> FullPivLu {
        let n = m.n;
        let mut lu = m.data.clone();
        let mut row_perm: Vec<usize> = (0..n).collect();
        let mut col_perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0usize;
        let mut pivots = Vec::with_capacity(n);
        let at = |lu: &Vec<Complex64>, i: usize, j: usize| lu[i * n + j];

        for k in 0..n {
            let mut best = 0.0;
            let (mut bi, mut bj) = (k, k);
            for i in k..n {
                for j in k..n {
                    let mag = at(&lu, i, j).norm();
                    if mag > best {
                        best = mag;
                        bi = i;
                        bj = j;
                    }
                }
            }
            if bi != k {
                for j in 0..n {
                    lu.swap(k * n + j, bi * n + j);
                }
                row_perm.swap(k, bi);
                swaps += 1;
            }
            if bj != k {
                for i in 0..n {
                    lu.swap(i * n + k, i * n + bj);
                }
                col_perm.swap(k, bj);
                swaps += 1;
            }
            pivots.push(best);
            if best == 0.0 {
                continue;
            }
            let pivot = at(&lu, k, k);
            for i in k + 1..n {
                let f = at(&lu, i, k) / pivot;
                lu[i * n + k] = f;
                for j in k + 1..n {
                    let sub = f * at(&lu, k, j);
                    lu[i * n + j] -= sub;
                }
            }
        }
        FullPivLu {
            n,
            lu,
            row_perm,
            col_perm,
            swaps,
            pivots,
        }
    }

    pub fn pivot_magnitudes(&self) -> &[f64] {
        &self.pivots
    }

    pub fn rank(&self, threshold: f64) -> usize {
        self.pivots.iter().take_while(|&&p| p > threshold).count()
    }

    /// Rank with the reliability guard: errors when any pivot lies within a
    /// factor 10 of the threshold, where the rank decision is a coin toss.
    pub fn rank_guarded(&self, threshold: f64) -> Result<usize, SpectralError> {
        for &p in &self.pivots {
            if p > threshold / 10.0 && p < threshold * 10.0 {
                return Err(SpectralError::RankAmbiguity {
                    pivot: p,
                    threshold,
                });
            }
        }
        Ok(self.rank(threshold))
    }

    pub fn determinant(&self) -> Complex64 {
        let mut det = if self.swaps % 2 == 0 {
            Complex64::ONE
        } else {
            -Complex64::ONE
        };
        for k in 0..self.n {
            det *= self.lu[k * self.n + k];
        }
        det
    }

    /// Solve `A x = b`; `None` when a pivot vanishes.
    pub fn solve(&self, b: &[Complex64]) -> Option<Vec<Complex64>> {
        let n = self.n;
        if self.pivots.iter().any(|&p| p == 0.0) {
            return None;
        }
        // forward: L y = P b
        let mut y = vec![Complex64::ZERO; n];
        for i in 0..n {
            let mut acc = b[self.row_perm[i]];
            for j in 0..i {
                acc -= self.lu[i * n + j] * y[j];
            }
            y[i] = acc;
        }
        // back: U x' = y
        let mut xp = vec![Complex64::ZERO; n];
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in i + 1..n {
                acc -= self.lu[i * n + j] * xp[j];
            }
            xp[i] = acc / self.lu[i * n + i];
        }
        // undo column permutation
        let mut x = vec![Complex64::ZERO; n];
        for j in 0..n {
            x[self.col_perm[j]] = xp[j];
        }
        Some(x)
    }

    /// Basis of the numerical null space at the given pivot threshold,
    /// one vector per free column, unit-normalized.
    pub fn null_space(&self, threshold: f64) -> Vec<Vec<Complex64>> {
        let n = self.n;
        let r = self.rank(threshold);
        let mut basis = Vec::with_capacity(n - r);
        for free in r..n {
            let mut xp = vec![Complex64::ZERO; n];
            xp[free] = Complex64::ONE;
            for i in (0..r).rev() {
                let mut acc = Complex64::ZERO;
                for j in i + 1..n {
                    acc += self.lu[i * n + j] * xp[j];
                }
                xp[i] = -acc / self.lu[i * n + i];
            }
            let mut x = vec![Complex64::ZERO; n];
            for j in 0..n {
                x[self.col_perm[j]] = xp[j];
            }
            let norm = vec_norm(&x);
            if norm > 0.0 {
                for e in &mut x {
                    *e /= norm;
                }
            }
            basis.push(x);
        }
        basis
    }
}

pub(crate) fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut rows = serializer.serialize_seq(Some(self.n))?;
        for i in 0..self.n {
            let row: Vec<[f64; 2]> = (0..self.n)
                .map(|j| [self[(i, j)].re, self[(i, j)].im])
                .collect();
            rows.serialize_element(&row)?;
        }
        rows.end()
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct RowsVisitor;
        impl<'de> Visitor<'de> for RowsVisitor {
            type Value = Vec<Vec<[f64; 2]>>;
            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("an array of rows of [re, im] pairs")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Self::Value, A::Error> {
                let mut rows = Vec::new();
                while let Some(row) = seq.next_element::<Vec<[f64; 2]>>()? {
                    rows.push(row);
                }
                Ok(rows)
            }
        }
        let rows = deserializer.deserialize_seq(RowsVisitor)?;
        let as_complex: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|p| Complex64::new(p[0], p[1])).collect())
            .collect();
        ComplexMatrix::from_rows(&as_complex).map_err(de::Error::custom)
    }
}
