//! Example families with closed-form spectra, used as generators and oracles.

pub mod checks;
pub mod rank_one;
pub mod rng;
pub mod spec;
pub mod structured;

use num_complex::Complex64;

use crate::track::hungarian;

pub use checks::{hermitian_weak_transitivity_check, perron_check, random_hermitian_loop, PerronReport};
pub use rank_one::{brauer_perturb, pagerank_hull, PageRankHull};
pub use rng::{random_family, RandomKind, SeededRng};
pub use spec::{parse_spec, verify, FamilySpec, VerifyResult, ORACLE_TOL};
pub use structured::{circulant, circulant_spectrum, toeplitz_spectrum, toeplitz_tridiag};

/// Largest distance in the optimal matching of two equally long multisets;
/// `+inf` when the lengths differ.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let dist: Vec<Vec<f64>> = a
        .iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).collect())
        .collect();
    hungarian(&dist)
        .iter()
        .enumerate()
        .map(|(i, &j)| dist[i][j])
        .fold(0.0, f64::max)
}
