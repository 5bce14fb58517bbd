use std::f64::consts::PI;

use num_complex::Complex64;

use crate::linalg::ComplexMatrix;

/// `a` on the diagonal, `b` above it, `c` below it.
pub fn toeplitz_tridiag(n: usize, a: Complex64, b: Complex64, c: Complex64) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, |i, j| {
        if i == j {
            a
        } else if j == i + 1 {
            b
        } else if i == j + 1 {
            c
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `a + 2 sqrt(bc) cos(πk / (n + 1))` for `k = 1..=n`, principal square root.
pub fn toeplitz_spectrum(n: usize, a: Complex64, b: Complex64, c: Complex64) -> Vec<Complex64> {
    let s = (b * c).sqrt();
    (1..=n)
        .map(|k| {
            // the middle node of odd n is exactly a
            if 2 * k == n + 1 {
                a
            } else {
                a + 2.0 * s * (PI * k as f64 / (n + 1) as f64).cos()
            }
        })
        .collect()
}

/// `C[i][j] = row[(j - i) mod n]`.
pub fn circulant(first_row: &[Complex64]) -> ComplexMatrix {
    let n = first_row.len();
    ComplexMatrix::from_fn(n, |i, j| first_row[(j + n - i) % n])
}

/// `c_j = Σ_m row[m] ω^{jm}` with `ω = e^{2πi/n}`, for `j = 0..n`.
pub fn circulant_spectrum(first_row: &[Complex64]) -> Vec<Complex64> {
    let n = first_row.len();
    (0..n)
        .map(|j| {
            first_row
                .iter()
                .enumerate()
                .map(|(m, &r)| r * Complex64::from_polar(1.0, 2.0 * PI * ((j * m) % n) as f64 / n as f64))
                .sum()
        })
        .collect()
}
