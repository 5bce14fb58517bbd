use num_complex::Complex64;
use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::Serialize;

use super::{grid, SurfaceSamples};
use crate::error::{Error, Result};
use crate::track::{segment_pairing, SegmentPairing, TrackerConfig};

/// A path component of the sampled eigen-surface.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KComponent {
    pub id: usize,
    /// Eigenvalues (with multiplicity) the component holds at every sample.
    pub k: usize,
    /// `(sample, slot)` pairs, sorted.
    pub members: Vec<(usize, usize)>,
}

impl KComponent {
    pub fn slots_at(&self, sample: usize) -> impl Iterator<Item = usize> + '_ {
        self.members
            .iter()
            .filter(move |(s, _)| *s == sample)
            .map(|&(_, slot)| slot)
    }
}

/// Groups `0..len` by union-find root, ordering groups by their smallest member.
pub(crate) fn groups_of(uf: &mut UnionFind<usize>, len: usize) -> Vec<Vec<usize>> {
    let mut group_of_root = vec![usize::MAX; len];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..len {
        let r = uf.find(i);
        if group_of_root[r] == usize::MAX {
            group_of_root[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[group_of_root[r]].push(i);
    }
    groups
}

/// Unions the slots a segment pairing connects: `a`-slot `i` with its continuation
/// in `b`, plus every group of start slots whose paths collided on the way.
pub(crate) fn union_pairing(uf: &mut UnionFind<usize>, n: usize, a: usize, b: usize, p: &SegmentPairing) {
    for (i, &j) in p.mapping.iter().enumerate() {
        uf.union(a * n + i, b * n + j);
    }
    for cols in p.collided_slots() {
        for w in cols.windows(2) {
            uf.union(a * n + w[0], a * n + w[1]);
        }
    }
}

/// Path components of the sampled eigen-surface.
///
/// Nodes are `(sample, slot)` pairs. Neighbouring lattice points (one unit
/// transfer apart) are joined by their segment pairing, equal eigenvalues of one
/// sample are merged, and slots whose paths collide along an edge are merged.
/// Every component must hold the same number of eigenvalues at every sample.
pub fn k_components(scan: &SurfaceSamples, cfg: &TrackerConfig) -> Result<Vec<KComponent>> {
    cfg.validate()?;
    let n = scan.n();
    let count = scan.samples.len();
    let points: Vec<Vec<u32>> = scan.samples.iter().map(|s| s.lattice.clone()).collect();
    let edges = grid::unit_transfer_edges(&points);
    let pairings: Vec<SegmentPairing> = edges
        .par_iter()
        .map(|&(a, b)| {
            segment_pairing(&scan.matrix(a), &scan.matrix(b), cfg).map_err(|e| Error::AtPair {
                a,
                b,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut uf = UnionFind::new(count * n);
    for (&(a, b), p) in edges.iter().zip(&pairings) {
        union_pairing(&mut uf, n, a, b, p);
    }
    for (s, sample) in scan.samples.iter().enumerate() {
        for group in sample.value_clusters(scan.tol.cluster_tol) {
            for w in group.windows(2) {
                uf.union(s * n + w[0], s * n + w[1]);
            }
        }
    }
    components_from(uf, count, n)
}

pub(crate) fn components_from(mut uf: UnionFind<usize>, count: usize, n: usize) -> Result<Vec<KComponent>> {
    let mut out = Vec::new();
    for (id, group) in groups_of(&mut uf, count * n).into_iter().enumerate() {
        let mut per_sample = vec![0usize; count];
        for &node in &group {
            per_sample[node / n] += 1;
        }
        let k = per_sample[0];
        if let Some(bad) = per_sample.iter().position(|&c| c != k) {
            return Err(Error::Structural(format!(
                "component {id} holds {k} eigenvalues at sample 0 but {} at sample {bad}",
                per_sample[bad]
            )));
        }
        out.push(KComponent {
            id,
            k,
            members: group.into_iter().map(|node| (node / n, node % n)).collect(),
        });
    }
    Ok(out)
}

/// Smallest distance between eigenvalues of two components at a common sample.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Separation {
    pub a: usize,
    pub b: usize,
    pub epsilon: f64,
}

/// Minimum over samples of the distance between eigenvalues in different
/// components, for every pair of components. Empty for a single component.
pub fn component_separation(components: &[KComponent], scan: &SurfaceSamples) -> Vec<Separation> {
    let n = scan.n();
    let mut owner = vec![0usize; scan.samples.len() * n];
    for c in components {
        for &(s, slot) in &c.members {
            owner[s * n + slot] = c.id;
        }
    }
    let index_of: Vec<usize> = {
        let mut v = vec![0; components.iter().map(|c| c.id + 1).max().unwrap_or(0)];
        for (i, c) in components.iter().enumerate() {
            v[c.id] = i;
        }
        v
    };
    let m = components.len();
    let mut eps = vec![vec![f64::INFINITY; m]; m];
    for (s, sample) in scan.samples.iter().enumerate() {
        let vals: &[Complex64] = &sample.eigenvalues;
        for i in 0..n {
            for j in i + 1..n {
                let (ci, cj) = (index_of[owner[s * n + i]], index_of[owner[s * n + j]]);
                if ci != cj {
                    let d = (vals[i] - vals[j]).norm();
                    let (lo, hi) = (ci.min(cj), ci.max(cj));
                    if d < eps[lo][hi] {
                        eps[lo][hi] = d;
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    for a in 0..m {
        for b in a + 1..m {
            out.push(Separation {
                a: components[a].id,
                b: components[b].id,
                epsilon: eps[a][b],
            });
        }
    }
    out
}
