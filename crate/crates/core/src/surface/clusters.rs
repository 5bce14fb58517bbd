use num_complex::Complex64;
use petgraph::unionfind::UnionFind;
use serde::Serialize;

use super::components::groups_of;
use super::{grid, SampleClass, SurfaceSamples};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, multiplicity_list_of, BarycentricPoint, MatrixHull};
use crate::track::{monodromy, MatrixPath, TrackerConfig};

/// Waypoints of each probe loop.
const PROBE_WAYPOINTS: usize = 64;
/// Cap on the number of loop planes tried per probe.
const MAX_PROBE_PLANES: usize = 12;

/// A connected region of exceptional lattice samples.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExceptionalCluster {
    /// Sample indices, sorted.
    pub members: Vec<usize>,
    /// Member closest to the cluster's barycentric centroid.
    pub representative: usize,
}

/// Groups exceptional samples whose lattice points differ by at most one unit in
/// every coordinate. Each cluster's representative is the member nearest the
/// centroid, ties going to the lexicographically smaller `α`.
pub fn exceptional_clusters(scan: &SurfaceSamples) -> Vec<ExceptionalCluster> {
    let exc: Vec<usize> = scan
        .samples
        .iter()
        .enumerate()
        .filter(|(_, s)| s.cls == SampleClass::Exceptional)
        .map(|(i, _)| i)
        .collect();
    let mut uf = UnionFind::new(exc.len());
    for a in 0..exc.len() {
        for b in a + 1..exc.len() {
            if grid::king_adjacent(&scan.samples[exc[a]].lattice, &scan.samples[exc[b]].lattice) {
                uf.union(a, b);
            }
        }
    }
    groups_of(&mut uf, exc.len())
        .into_iter()
        .map(|g| {
            let members: Vec<usize> = g.into_iter().map(|i| exc[i]).collect();
            let representative = representative(scan, &members);
            ExceptionalCluster {
                members,
                representative,
            }
        })
        .collect()
}

fn representative(scan: &SurfaceSamples, members: &[usize]) -> usize {
    let k = scan.hull.k();
    let mut centroid = vec![0.0; k];
    for &m in members {
        for (c, w) in centroid.iter_mut().zip(scan.samples[m].alpha.weights()) {
            *c += w / members.len() as f64;
        }
    }
    let dist = |m: usize| -> f64 {
        scan.samples[m]
            .alpha
            .weights()
            .iter()
            .zip(&centroid)
            .map(|(a, c)| (a - c) * (a - c))
            .sum()
    };
    *members
        .iter()
        .min_by(|&&a, &&b| {
            dist(a).total_cmp(&dist(b)).then_with(|| {
                let (wa, wb) = (scan.samples[a].alpha.weights(), scan.samples[b].alpha.weights());
                wa.iter()
                    .zip(wb)
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        })
        .expect("clusters are nonempty")
}

/// Outcome of a local transitivity probe.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ProbeOutcome {
    NotApplicable { reason: String },
    Probed {
        /// Every group of colliding eigenvalues is joined by the loops' monodromy.
        locally_nontransitive: bool,
        radius: f64,
        /// Loops (planes) that stayed in the core and were used.
        loops: usize,
        /// Base-point slots per colliding group.
        colliding: Vec<Vec<usize>>,
        /// Monodromy of each loop used.
        permutations: Vec<Vec<usize>>,
    },
}

fn unit_direction(k: usize, i: usize, j: usize) -> Vec<f64> {
    let mut d = vec![0.0; k];
    d[i] = std::f64::consts::FRAC_1_SQRT_2;
    d[j] = -std::f64::consts::FRAC_1_SQRT_2;
    d
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn circle(center: &[f64], u: &[f64], v: &[f64], r: f64) -> Option<Vec<BarycentricPoint>> {
    let mut pts = Vec::with_capacity(PROBE_WAYPOINTS + 1);
    for s in 0..PROBE_WAYPOINTS {
        let th = 2.0 * std::f64::consts::PI * s as f64 / PROBE_WAYPOINTS as f64;
        let (sn, cs) = th.sin_cos();
        let w: Vec<f64> = (0..center.len())
            .map(|i| center[i] + r * (cs * u[i] + sn * v[i]))
            .collect();
        if w.iter().any(|&x| !(0.0..=1.0).contains(&x)) {
            return None;
        }
        let total: f64 = w.iter().sum();
        pts.push(BarycentricPoint::new(w.iter().map(|x| x / total).collect()).ok()?);
    }
    pts.push(pts[0].clone());
    Some(pts)
}

/// Whether `hull` stays at the minimal multiplicity list along the loop's waypoints.
fn waypoints_in_core(hull: &MatrixHull, scan: &SurfaceSamples, pts: &[BarycentricPoint]) -> Result<bool> {
    for p in pts {
        let eigs = eigenvalues(&hull.combine_weights(p.weights()))?;
        if multiplicity_list_of(&eigs, scan.tol.cluster_tol) != scan.minimal_list {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Circles the exceptional sample `sample` at radius `r` in the barycentric
/// simplex and checks whether the loops' monodromy joins all eigenvalues that
/// collide there.
///
/// Loop planes are spanned by `e_i - e_j` directions; all loops share one base
/// point so their permutations compose. Loops that leave the simplex, touch a
/// non-minimal multiplicity list at a waypoint, or record a collision are
/// discarded.
pub fn local_transitivity_probe(
    scan: &SurfaceSamples,
    sample: usize,
    r: f64,
    cfg: &TrackerConfig,
) -> Result<ProbeOutcome> {
    let not_applicable = |reason: &str| Ok(ProbeOutcome::NotApplicable { reason: reason.into() });
    let k = scan.hull.k();
    if k < 3 {
        return not_applicable("the simplex has fewer than 2 dimensions");
    }
    if !(r > 0.0) {
        return Err(Error::argument(format!("probe radius must be positive, got {r}")));
    }
    let rep = scan
        .samples
        .get(sample)
        .ok_or_else(|| Error::argument(format!("no sample {sample}")))?;
    if rep.cls != SampleClass::Exceptional {
        return Err(Error::argument(format!("sample {sample} is not exceptional")));
    }
    let center = rep.alpha.weights().to_vec();
    let groups: Vec<Vec<usize>> = rep
        .value_clusters(scan.tol.cluster_tol)
        .into_iter()
        .filter(|g| g.len() > 1)
        .collect();

    let dirs: Vec<Vec<f64>> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .map(|(i, j)| unit_direction(k, i, j))
        .collect();
    let fits = |d: &[f64]| center.iter().zip(d).all(|(c, x)| (c + r * x.abs() <= 1.0) && (c - r * x.abs() >= 0.0));
    let Some(u) = dirs.iter().find(|d| fits(d)).cloned() else {
        return not_applicable("no loop of this radius fits in the simplex");
    };

    let base_alpha: Vec<f64> = center.iter().zip(&u).map(|(c, x)| c + r * x).collect();
    let base = eigenvalues(&scan.hull.combine_weights(&base_alpha))?;
    // base-point slots continuing each colliding group: the nearest eigenvalues to the group value
    let mut taken = vec![false; base.len()];
    let colliding: Vec<Vec<usize>> = groups
        .iter()
        .map(|g| {
            let z: Complex64 = g.iter().map(|&s| rep.eigenvalues[s]).sum::<Complex64>() / g.len() as f64;
            let mut order: Vec<usize> = (0..base.len()).filter(|&i| !taken[i]).collect();
            order.sort_by(|&a, &b| (base[a] - z).norm().total_cmp(&(base[b] - z).norm()));
            let mut picked: Vec<usize> = order.into_iter().take(g.len()).collect();
            picked.sort_unstable();
            for &p in &picked {
                taken[p] = true;
            }
            picked
        })
        .collect();

    let mut permutations = Vec::new();
    let mut uf = UnionFind::new(base.len());
    for d in &dirs {
        if permutations.len() >= MAX_PROBE_PLANES {
            break;
        }
        let proj = dot(d, &u);
        let mut v: Vec<f64> = d.iter().zip(&u).map(|(x, y)| x - proj * y).collect();
        let norm = dot(&v, &v).sqrt();
        if norm < 1e-8 {
            continue;
        }
        v.iter_mut().for_each(|x| *x /= norm);
        let Some(pts) = circle(&center, &u, &v, r) else {
            continue;
        };
        if !waypoints_in_core(&scan.hull, scan, &pts)? {
            continue;
        }
        let path = MatrixPath::hull_polygonal(scan.hull.clone(), pts, true)?;
        let report = monodromy(&path, cfg)?;
        if !report.collisions().is_empty() {
            continue;
        }
        // the loop starts at base_alpha up to normalization; align slots with `base`
        let start = report.bundle.start();
        let align: Vec<usize> = (0..base.len())
            .map(|i| {
                (0..start.len())
                    .min_by(|&a, &b| (start[a] - base[i]).norm().total_cmp(&(start[b] - base[i]).norm()))
                    .unwrap()
            })
            .collect();
        let mut inv = vec![0; base.len()];
        for (i, &a) in align.iter().enumerate() {
            inv[a] = i;
        }
        let perm: Vec<usize> = (0..base.len())
            .map(|i| inv[report.permutation.mapping[align[i]]])
            .collect();
        for (i, &j) in perm.iter().enumerate() {
            uf.union(i, j);
        }
        permutations.push(perm);
    }
    if permutations.is_empty() {
        return not_applicable("no loop of this radius stays in the core");
    }
    let locally_nontransitive = colliding
        .iter()
        .all(|g| g.windows(2).all(|w| uf.equiv(w[0], w[1])));
    Ok(ProbeOutcome::Probed {
        locally_nontransitive,
        radius: r,
        loops: permutations.len(),
        colliding,
        permutations,
    })
}
