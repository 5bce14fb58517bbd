//! Seeded test-input generation.
//!
//! A `SplitMix64` stream seeded with the user's 64-bit seed; each `f64` is the
//! top 53 bits of one output scaled to `[0, 1)`. Matrices are filled row-major,
//! real part before imaginary part, so outputs are portable across platforms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::linalg::ComplexMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RandomKind {
    /// `(M + M*)/2` for `M` with entries uniform in the unit square `[-1,1)²`.
    Hermitian,
    /// Real entries uniform in `(0, 1]`.
    Positive,
    /// Positive entries normalized so each row sums to one.
    RowStochastic,
    /// Complex entries uniform in `[-1,1)²`.
    Ginibre,
}

/// Deterministic source for all randomized families.
pub struct SeededRng(SplitMix64);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self(SplitMix64::seed_from_u64(seed))
    }

    /// Uniform in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.0.gen::<f64>()
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform in `(0, 1]`.
    pub fn positive(&mut self) -> f64 {
        1.0 - self.unit()
    }

    pub fn complex(&mut self) -> Complex64 {
        let re = self.uniform(-1.0, 1.0);
        let im = self.uniform(-1.0, 1.0);
        Complex64::new(re, im)
    }

    pub fn complex_vec(&mut self, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| self.complex()).collect()
    }

    /// Strictly positive entries summing to one.
    pub fn probability_vector(&mut self, n: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..n).map(|_| self.positive()).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|x| x / total).collect()
    }

    pub fn matrix(&mut self, kind: RandomKind, n: usize) -> ComplexMatrix {
        let mut entries = Vec::with_capacity(n * n);
        match kind {
            RandomKind::Ginibre | RandomKind::Hermitian => {
                for _ in 0..n * n {
                    entries.push(self.complex());
                }
            }
            RandomKind::Positive | RandomKind::RowStochastic => {
                for _ in 0..n * n {
                    entries.push(Complex64::new(self.positive(), 0.0));
                }
            }
        }
        if kind == RandomKind::RowStochastic {
            for row in entries.chunks_mut(n) {
                let total: f64 = row.iter().map(|z| z.re).sum();
                for z in row.iter_mut() {
                    *z /= total;
                }
                // absorb rounding into the last entry so the row sums to 1
                let sum_head: f64 = row[..n - 1].iter().map(|z| z.re).sum();
                row[n - 1] = Complex64::new(1.0 - sum_head, 0.0);
            }
        }
        let m = ComplexMatrix::from_rows(n, &entries).expect("finite random entries");
        if kind == RandomKind::Hermitian {
            let adj = m.adjoint();
            let h = m.add(&adj).scale(Complex64::new(0.5, 0.0));
            // force exact Hermitian symmetry including a real diagonal
            let mut out = h.clone();
            for i in 0..n {
                out[(i, i)] = Complex64::new(h[(i, i)].re, 0.0);
                for j in i + 1..n {
                    out[(j, i)] = h[(i, j)].conj();
                }
            }
            out
        } else {
            m
        }
    }
}

/// `random_family(kind, n, seed)`.
pub fn random_family(kind: RandomKind, n: usize, seed: u64) -> ComplexMatrix {
    SeededRng::new(seed).matrix(kind, n)
}
