use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Dense square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn new(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::argument(format!(
                "matrix must be square, got {}x{}",
                inner.nrows(),
                inner.ncols()
            )));
        }
        if inner.nrows() == 0 {
            return Err(Error::argument("matrix dimension must be positive"));
        }
        if let Some((idx, z)) = inner
            .iter()
            .enumerate()
            .find(|(_, z)| !z.re.is_finite() || !z.im.is_finite())
        {
            let n = inner.nrows();
            // nalgebra storage is column-major
            return Err(Error::argument(format!(
                "entry ({}, {}) is not finite: {z}",
                idx % n,
                idx / n
            )));
        }
        Ok(Self(inner))
    }

    /// Builds from row-major entries.
    pub fn from_rows(n: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::argument(format!(
                "expected {} entries for n = {n}, got {}",
                n * n,
                entries.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn from_real_rows(n: usize, entries: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_rows(n, &c)
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let m = DMatrix::from_fn(n, n, f);
        Self::new(m).expect("from_fn produced a non-finite entry")
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn diag(values: &[Complex64]) -> Self {
        let n = values.len();
        Self::from_fn(n, |i, j| if i == j { values[i] } else { Complex64::new(0.0, 0.0) })
    }

    pub fn diag_real(values: &[f64]) -> Self {
        let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diag(&v)
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self(self.0.map(|z| z * c))
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// `(1 - t) self + t other`; returns the endpoints exactly at `t = 0, 1`.
    pub fn lerp(&self, other: &Self, t: f64) -> Self {
        if t == 0.0 {
            return self.clone();
        }
        if t == 1.0 {
            return other.clone();
        }
        Self(self.0.map(|z| z * (1.0 - t)) + other.0.map(|z| z * t))
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    pub fn mul_vec(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.n();
        (0..n)
            .map(|i| (0..n).map(|j| self.0[(i, j)] * x[j]).sum())
            .collect()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let n = self.n();
        (0..n).all(|i| (i..n).all(|j| (self.0[(i, j)] - self.0[(j, i)].conj()).norm() <= tol))
    }

    /// Max entrywise distance.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn rows(&self) -> Vec<Vec<Complex64>> {
        let n = self.n();
        (0..n).map(|i| (0..n).map(|j| self.0[(i, j)]).collect()).collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut Complex64 {
        &mut self.0[idx]
    }
}

/// Convex-combination weights over the generators of a hull.
#[derive(Clone, Debug, PartialEq)]
pub struct BarycentricPoint(Vec<f64>);

impl BarycentricPoint {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::argument("barycentric point needs at least one weight"));
        }
        if let Some(w) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(Error::argument(format!("weight {w} outside [0, 1]")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::argument(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self(weights))
    }

    /// The `i`-th vertex of the `k`-simplex.
    pub fn vertex(k: usize, i: usize) -> Self {
        let mut w = vec![0.0; k];
        w[i] = 1.0;
        Self(w)
    }

    pub fn weights(&self) -> &[f64] {
        &self.0
    }

    pub fn k(&self) -> usize {
        self.0.len()
    }

    /// Interpolates towards `other`; clamps rounding noise so the result stays valid.
    pub fn lerp(&self, other: &Self, t: f64) -> Self {
        if t == 0.0 {
            return self.clone();
        }
        if t == 1.0 {
            return other.clone();
        }
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| ((1.0 - t) * a + t * b).clamp(0.0, 1.0))
                .collect(),
        )
    }
}

/// The convex hull `Co(A_1, ..., A_k)` of equally sized generators.
#[derive(Clone, Debug, PartialEq)]
pub struct MatrixHull {
    generators: Vec<ComplexMatrix>,
    labels: Option<Vec<String>>,
}

impl MatrixHull {
    pub fn new(generators: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_labels(generators, None)
    }

    pub fn with_labels(generators: Vec<ComplexMatrix>, labels: Option<Vec<String>>) -> Result<Self> {
        let first = generators
            .first()
            .ok_or_else(|| Error::argument("hull needs at least one generator"))?;
        let n = first.n();
        if let Some((i, g)) = generators.iter().enumerate().find(|(_, g)| g.n() != n) {
            return Err(Error::argument(format!(
                "generator {i} has dimension {}, expected {n}",
                g.n()
            )));
        }
        if let Some(l) = &labels {
            if l.len() != generators.len() {
                return Err(Error::argument(format!(
                    "{} labels for {} generators",
                    l.len(),
                    generators.len()
                )));
            }
        }
        Ok(Self { generators, labels })
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn k(&self) -> usize {
        self.generators.len()
    }

    pub fn n(&self) -> usize {
        self.generators[0].n()
    }

    /// Largest generator Frobenius norm; bounds every eigenvalue in the hull.
    pub fn max_vertex_norm(&self) -> f64 {
        self.generators
            .iter()
            .map(ComplexMatrix::frobenius_norm)
            .fold(0.0, f64::max)
    }

    pub(crate) fn combine_weights(&self, weights: &[f64]) -> ComplexMatrix {
        let n = self.n();
        let mut acc = DMatrix::<Complex64>::zeros(n, n);
        for (w, g) in weights.iter().zip(&self.generators) {
            acc += g.as_inner().map(|z| z * *w);
        }
        ComplexMatrix(acc)
    }
}

/// `Σ α_i A_i`, accumulated in generator order.
pub fn convex_combine(hull: &MatrixHull, alpha: &BarycentricPoint) -> Result<ComplexMatrix> {
    if alpha.k() != hull.k() {
        return Err(Error::argument(format!(
            "{} weights for a hull of {} generators",
            alpha.k(),
            hull.k()
        )));
    }
    Ok(hull.combine_weights(alpha.weights()))
}
