use nalgebra::DMatrix;
use num_complex::Complex64;

use super::eigen::{determinant, eigenvalues, reduce_to_hessenberg, to_row_major};
use super::ComplexMatrix;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Monic characteristic polynomial `det(λI - A)`, coefficients by descending degree.
#[derive(Clone, Debug, PartialEq)]
pub struct CharPoly(Vec<Complex64>);

impl CharPoly {
    /// `coeffs[0]` must be exactly one.
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        match coeffs.first() {
            Some(c) if *c == ONE => Ok(Self(coeffs)),
            Some(c) => Err(Error::argument(format!("leading coefficient {c} is not 1"))),
            None => Err(Error::argument("polynomial needs at least one coefficient")),
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// `Π (λ - r_i)` expanded.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut c = vec![ONE];
        for &r in roots {
            c.push(ZERO);
            for i in (1..c.len()).rev() {
                let prev = c[i - 1];
                c[i] -= r * prev;
            }
        }
        Self(c)
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len() - 1
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        horner(&self.0, z)
    }

    pub fn max_coefficient(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Roots via the eigenvalues of the companion matrix.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let n = self.degree();
        if n == 0 {
            return Ok(Vec::new());
        }
        let comp = ComplexMatrix::from_fn(n, |i, j| {
            if i == 0 {
                -self.0[j + 1]
            } else if i == j + 1 {
                ONE
            } else {
                ZERO
            }
        });
        eigenvalues(&comp)
    }
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().fold(ZERO, |acc, &c| acc * z + c)
}

/// Descending-coefficient derivative.
fn derivative(coeffs: &[Complex64]) -> Vec<Complex64> {
    let deg = coeffs.len().saturating_sub(1);
    coeffs[..deg]
        .iter()
        .enumerate()
        .map(|(i, &c)| c * (deg - i) as f64)
        .collect()
}

/// Characteristic polynomial by Hessenberg reduction and the Hyman-style
/// determinant recurrence; independent of the QR eigenvalue iteration.
pub fn char_poly(a: &ComplexMatrix) -> CharPoly {
    let n = a.n();
    let mut h = to_row_major(a);
    reduce_to_hessenberg(&mut h, n);
    let at = |i: usize, j: usize| h[i * n + j];

    // polys[k] holds p_k ascending; p_0 = 1
    let mut polys: Vec<Vec<Complex64>> = Vec::with_capacity(n + 1);
    polys.push(vec![ONE]);
    for k in 0..n {
        // (λ - h_kk) p_{k-1}
        let prev = &polys[k];
        let mut next = vec![ZERO; k + 2];
        for (d, &c) in prev.iter().enumerate() {
            next[d + 1] += c;
            next[d] -= at(k, k) * c;
        }
        let mut prod = ONE;
        for i in (0..k).rev() {
            prod *= at(i + 1, i);
            if prod == ZERO {
                break;
            }
            let coef = at(i, k) * prod;
            for (d, &c) in polys[i].iter().enumerate() {
                next[d] -= coef * c;
            }
        }
        polys.push(next);
    }
    let mut desc: Vec<Complex64> = polys.pop().unwrap().into_iter().rev().collect();
    desc[0] = ONE;
    CharPoly(desc)
}

/// `Π_{i<j} (r_i - r_j)^2` over the polynomial's roots; one for degree 1.
pub fn discriminant(p: &CharPoly) -> Result<Complex64> {
    match p.degree() {
        0 => Err(Error::argument("discriminant of a constant polynomial")),
        1 => Ok(ONE),
        _ => Ok(root_discriminant(&p.roots()?)),
    }
}

/// Discriminant from a root multiset.
pub fn root_discriminant(roots: &[Complex64]) -> Complex64 {
    let mut d = ONE;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            let diff = roots[i] - roots[j];
            d *= diff * diff;
        }
    }
    d
}

/// `(-1)^{n(n-1)/2} Res(p, p')` via the Sylvester determinant.
pub fn discriminant_resultant(p: &CharPoly) -> Result<Complex64> {
    let n = p.degree();
    match n {
        0 => return Err(Error::argument("discriminant of a constant polynomial")),
        1 => return Ok(ONE),
        _ => {}
    }
    let dp = derivative(&p.0);
    let size = 2 * n - 1;
    let mut syl = DMatrix::<Complex64>::zeros(size, size);
    for i in 0..n - 1 {
        for (j, &c) in p.0.iter().enumerate() {
            syl[(i, i + j)] = c;
        }
    }
    for i in 0..n {
        for (j, &c) in dp.iter().enumerate() {
            syl[(n - 1 + i, i + j)] = c;
        }
    }
    let res = determinant(syl);
    let sign = if (n * (n - 1) / 2).is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(res * sign)
}

/// Relative zero test for discriminants: `|d| <= tol (1 + max|coef|)^(2n-2)`.
pub fn discriminant_is_zero(p: &CharPoly, disc: Complex64, tol: f64) -> bool {
    let n = p.degree() as i32;
    if n < 2 {
        return false;
    }
    disc.norm() <= tol * (1.0 + p.max_coefficient()).powi(2 * n - 2)
}

/// Number of leading derivatives `p, p', ..., p^(m-1)` that vanish at `z`,
/// each judged against `tol` times its own coefficient-weighted scale.
pub fn vanishing_order(p: &CharPoly, z: Complex64, tol: f64) -> usize {
    let mut coeffs = p.0.clone();
    let mut m = 0;
    while !coeffs.is_empty() {
        let deg = coeffs.len() - 1;
        let scale: f64 = coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c.norm() * z.norm().powi((deg - i) as i32))
            .sum();
        if horner(&coeffs, z).norm() > tol * scale {
            break;
        }
        m += 1;
        coeffs = derivative(&coeffs);
    }
    m
}

/// `|p(λ)| / max(1, ‖A‖_F)^n`, the eigenvalue acceptance residual.
pub fn relative_residual(p: &CharPoly, lambda: Complex64, matrix_norm: f64) -> f64 {
    p.eval(lambda).norm() / matrix_norm.max(1.0).powi(p.degree() as i32)
}
