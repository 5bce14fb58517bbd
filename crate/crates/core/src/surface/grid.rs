//! The barycentric lattice `{m / N : m ∈ ℕ^k, Σ m_i = N}`.

use std::collections::HashMap;

use crate::linalg::BarycentricPoint;

/// Number of lattice points, `C(N + k - 1, k - 1)`, or `None` on overflow.
pub fn lattice_size(k: usize, resolution: usize) -> Option<usize> {
    let mut acc: u128 = 1;
    for i in 1..k {
        acc = acc * (resolution + i) as u128 / i as u128;
        if acc > usize::MAX as u128 {
            return None;
        }
    }
    Some(acc as usize)
}

/// All compositions of `resolution` into `k` non-negative parts, lexicographically
/// decreasing (the first sample is the vertex `A_1`).
pub fn compositions(k: usize, resolution: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::with_capacity(lattice_size(k, resolution).unwrap_or(0));
    let mut cur = vec![0u32; k];
    fill(&mut cur, 0, resolution as u32, &mut out);
    out
}

fn fill(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Vec<u32>>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(cur.clone());
        return;
    }
    for m in (0..=remaining).rev() {
        cur[pos] = m;
        fill(cur, pos + 1, remaining - m, out);
    }
}

/// Lattice point to barycentric coordinates; `m_i / N` is exact when `m_i ∈ {0, N}`.
pub fn to_alpha(m: &[u32], resolution: usize) -> BarycentricPoint {
    let n = resolution as f64;
    BarycentricPoint::new(m.iter().map(|&x| x as f64 / n).collect())
        .expect("lattice points lie in the simplex")
}

/// Sample index lookup for lattice points.
pub struct LatticeIndex(HashMap<Vec<u32>, usize>);

impl LatticeIndex {
    pub fn new(points: &[Vec<u32>]) -> Self {
        Self(points.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect())
    }

    pub fn get(&self, m: &[u32]) -> Option<usize> {
        self.0.get(m).copied()
    }
}

/// Pairs `(s, t)`, `s < t`, of lattice points related by one unit transfer
/// `m_i -> m_j`.
pub fn unit_transfer_edges(points: &[Vec<u32>]) -> Vec<(usize, usize)> {
    let index = LatticeIndex::new(points);
    let k = points.first().map_or(0, Vec::len);
    let mut edges = Vec::new();
    for (s, m) in points.iter().enumerate() {
        let mut nb = m.clone();
        for i in 0..k {
            if m[i] == 0 {
                continue;
            }
            for j in 0..k {
                if i == j {
                    continue;
                }
                nb[i] -= 1;
                nb[j] += 1;
                if let Some(t) = index.get(&nb) {
                    if s < t {
                        edges.push((s, t));
                    }
                }
                nb[i] += 1;
                nb[j] -= 1;
            }
        }
    }
    edges.sort_unstable();
    edges
}

/// Whether two lattice points differ by at most one in every coordinate.
pub fn king_adjacent(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(&x, &y)| x.abs_diff(y) <= 1)
}
