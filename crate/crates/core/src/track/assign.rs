use num_complex::Complex64;

use super::TrackerConfig;
use crate::error::{Error, Result};
use crate::linalg::min_gap;

/// Minimum-cost perfect assignment on a square cost matrix (Kuhn-Munkres with
/// potentials, O(n^3)). Returns `perm[row] = column`.
pub fn hungarian(cost: &[Vec<f64>]) -> Vec<usize> {
    let n = cost.len();
    if n == 0 {
        return Vec::new();
    }
    let inf = f64::INFINITY;
    let mut u = vec![0.0; n + 1];
    let mut v = vec![0.0; n + 1];
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0;
        let mut minv = vec![inf; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = inf;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut perm = vec![0; n];
    for j in 1..=n {
        perm[p[j] - 1] = j - 1;
    }
    perm
}

/// Result of matching one eigenvalue list onto the next.
#[derive(Clone, Debug, PartialEq)]
pub struct Matching {
    /// `perm[i]` is the index into `next` continuing `prev[i]`.
    pub perm: Vec<usize>,
    pub ambiguous: bool,
    /// Σ |prev_i - next_perm(i)|.
    pub cost: f64,
    /// Cost of the best assignment that differs from `perm`; `+inf` for n = 1.
    pub second_cost: f64,
    pub max_move: f64,
}

fn distance_matrix(prev: &[Complex64], next: &[Complex64]) -> Vec<Vec<f64>> {
    prev.iter()
        .map(|p| next.iter().map(|q| (p - q).norm()).collect())
        .collect()
}

/// Optimal assignment with exact ties resolved towards the identity.
pub(crate) fn stable_assignment(dist: &[Vec<f64>]) -> Vec<usize> {
    let max = dist.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    let bias = 1e-13 * max + 1e-300;
    let biased: Vec<Vec<f64>> = dist
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &d)| if i == j { d } else { d + bias })
                .collect()
        })
        .collect();
    hungarian(&biased)
}

fn assignment_cost(dist: &[Vec<f64>], perm: &[usize]) -> f64 {
    perm.iter().enumerate().map(|(i, &j)| dist[i][j]).sum()
}

fn second_best_cost(dist: &[Vec<f64>], best: &[usize]) -> f64 {
    let n = dist.len();
    if n < 2 {
        return f64::INFINITY;
    }
    let max = dist.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    let forbidden = 1e6 * (max + 1.0) * n as f64;
    let mut second = f64::INFINITY;
    for i in 0..n {
        let mut d = dist.to_vec();
        d[i][best[i]] = forbidden;
        let perm = hungarian(&d);
        if perm[i] != best[i] {
            second = second.min(assignment_cost(dist, &perm));
        }
    }
    second
}

/// Matches `prev` onto `next` minimizing the summed Euclidean distance.
///
/// The match is flagged ambiguous when the runner-up assignment costs within
/// `cfg.ambiguity_ratio` of the optimum, or when some eigenvalue moves farther
/// than `cfg.gap_safety` times the smallest gap in `prev`.
pub fn match_eigs(prev: &[Complex64], next: &[Complex64], cfg: &TrackerConfig) -> Result<Matching> {
    if prev.len() != next.len() {
        return Err(Error::argument(format!(
            "cannot match {} eigenvalues onto {}",
            prev.len(),
            next.len()
        )));
    }
    let dist = distance_matrix(prev, next);
    let perm = stable_assignment(&dist);
    let cost = assignment_cost(&dist, &perm);
    let second_cost = second_best_cost(&dist, &perm);
    let max_move = perm
        .iter()
        .enumerate()
        .map(|(i, &j)| dist[i][j])
        .fold(0.0, f64::max);
    let close_runner_up = second_cost - cost <= cfg.ambiguity_ratio * cost;
    let too_far = max_move > cfg.gap_safety * min_gap(prev);
    Ok(Matching {
        perm,
        ambiguous: close_runner_up || too_far,
        cost,
        second_cost,
        max_move,
    })
}
