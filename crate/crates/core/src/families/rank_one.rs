use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, BarycentricPoint, ComplexMatrix, MatrixHull};

/// Relative eigenpair residual accepted by [`brauer_perturb`].
const EIGENPAIR_TOL: f64 = 1e-8;
/// Row-sum and probability-sum tolerance for PageRank inputs.
const STOCHASTIC_TOL: f64 = 1e-12;

fn remove_nearest(mut values: Vec<Complex64>, target: Complex64) -> Vec<Complex64> {
    let idx = (0..values.len())
        .min_by(|&a, &b| (values[a] - target).norm().total_cmp(&(values[b] - target).norm()))
        .expect("nonempty spectrum");
    values.remove(idx);
    values
}

/// `A + x v*` and its predicted spectrum `{λ₁ + v*x, λ₂, ..., λ_n}`, where `x`
/// is an eigenvector of `A` for `λ₁` (taken as the Rayleigh quotient of `x`).
pub fn brauer_perturb(
    a: &ComplexMatrix,
    x: &[Complex64],
    v: &[Complex64],
) -> Result<(ComplexMatrix, Vec<Complex64>)> {
    let n = a.n();
    if x.len() != n || v.len() != n {
        return Err(Error::argument(format!(
            "vectors of length {} and {} for a {n}x{n} matrix",
            x.len(),
            v.len()
        )));
    }
    let ax = a.mul_vec(x);
    let xx: f64 = x.iter().map(|z| z.norm_sqr()).sum();
    if xx == 0.0 {
        return Err(Error::argument("eigenvector is zero"));
    }
    let lambda1: Complex64 = x.iter().zip(&ax).map(|(xi, yi)| xi.conj() * yi).sum::<Complex64>() / xx;
    let residual = ax
        .iter()
        .zip(x)
        .map(|(y, xi)| (y - lambda1 * xi).norm_sqr())
        .sum::<f64>()
        .sqrt();
    let limit = EIGENPAIR_TOL * a.frobenius_norm().max(1.0) * xx.sqrt();
    if residual > limit {
        return Err(Error::argument(format!(
            "x is not an eigenvector: residual {residual:.3e} exceeds {limit:.3e}"
        )));
    }
    let perturbed = ComplexMatrix::from_fn(n, |i, j| a[(i, j)] + x[i] * v[j].conj());
    let vx: Complex64 = v.iter().zip(x).map(|(vi, xi)| vi.conj() * xi).sum();
    let mut predicted = vec![lambda1 + vx];
    predicted.extend(remove_nearest(eigenvalues(a)?, lambda1));
    Ok((perturbed, predicted))
}

/// The PageRank hull `Co(S, e v^T)` with `α` the weight on `S`.
#[derive(Clone, Debug)]
pub struct PageRankHull {
    pub hull: MatrixHull,
    /// `λ₂, ..., λ_n` of `S` (its spectrum with one copy of 1 removed).
    pub subdominant: Vec<Complex64>,
}

impl PageRankHull {
    pub fn alpha(&self, alpha: f64) -> Result<BarycentricPoint> {
        BarycentricPoint::new(vec![alpha, 1.0 - alpha])
    }

    pub fn matrix(&self, alpha: f64) -> Result<ComplexMatrix> {
        crate::linalg::convex_combine(&self.hull, &self.alpha(alpha)?)
    }

    /// `{1, αλ₂, ..., αλ_n}`.
    pub fn predicted_spectrum(&self, alpha: f64) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(1.0, 0.0)];
        out.extend(self.subdominant.iter().map(|l| l * alpha));
        out
    }
}

pub fn check_stochastic(s: &ComplexMatrix) -> Result<()> {
    for (i, row) in s.rows().iter().enumerate() {
        if row.iter().any(|z| z.im != 0.0 || z.re < 0.0) {
            return Err(Error::argument(format!("S row {i} has a negative or complex entry")));
        }
        let total: f64 = row.iter().map(|z| z.re).sum();
        if (total - 1.0).abs() > STOCHASTIC_TOL {
            return Err(Error::argument(format!("S row {i} sums to {total}, not 1")));
        }
    }
    Ok(())
}

pub fn check_probability(v: &[f64]) -> Result<()> {
    if v.iter().any(|&p| !(p >= 0.0)) {
        return Err(Error::argument("probability vector has a negative entry"));
    }
    let total: f64 = v.iter().sum();
    if (total - 1.0).abs() > STOCHASTIC_TOL {
        return Err(Error::argument(format!("probability vector sums to {total}, not 1")));
    }
    Ok(())
}

pub fn pagerank_hull(s: &ComplexMatrix, v: &[f64]) -> Result<PageRankHull> {
    let n = s.n();
    if v.len() != n {
        return Err(Error::argument(format!("probability vector of length {} for n = {n}", v.len())));
    }
    check_stochastic(s)?;
    check_probability(v)?;
    let ev = ComplexMatrix::from_fn(n, |_, j| Complex64::new(v[j], 0.0));
    let subdominant = remove_nearest(eigenvalues(s)?, Complex64::new(1.0, 0.0));
    Ok(PageRankHull {
        hull: MatrixHull::with_labels(vec![s.clone(), ev], Some(vec!["S".into(), "evT".into()]))?,
        subdominant,
    })
}
