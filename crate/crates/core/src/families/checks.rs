use serde::Serialize;

use super::{RandomKind, SeededRng};
use crate::error::{Error, Result};
use crate::linalg::{cluster_threshold, MatrixHull};
use crate::surface::{k_components, scan};
use crate::tolerance::ToleranceConfig;
use crate::track::{monodromy, MatrixPath, TrackerConfig};

const HERMITIAN_TOL: f64 = 1e-12;

#[derive(Clone, Debug, Serialize)]
pub struct PerronReport {
    pub pass: bool,
    pub samples: usize,
    /// Component holding the Perron eigenpoints, if they share one.
    pub component: Option<usize>,
    pub component_k: Option<usize>,
    /// Perron roots at the first and last sample.
    pub root_range: (f64, f64),
}

/// Scans a hull of entrywise positive matrices and checks that the dominant
/// eigenvalue of every sample is real, positive, and simple, and that these
/// eigenpoints make up a single 1-component.
pub fn perron_check(
    hull: &MatrixHull,
    resolution: usize,
    tol: &ToleranceConfig,
    cfg: &TrackerConfig,
) -> Result<PerronReport> {
    for (g, m) in hull.generators().iter().enumerate() {
        if m.rows().iter().flatten().any(|z| z.im != 0.0 || !(z.re > 0.0)) {
            return Err(Error::argument(format!("generator {g} is not entrywise positive")));
        }
    }
    let s = scan(hull, resolution, tol)?;
    let comps = k_components(&s, cfg)?;
    let mut owner = vec![0; s.samples.len() * s.n()];
    for c in &comps {
        for &(sample, slot) in &c.members {
            owner[sample * s.n() + slot] = c.id;
        }
    }
    let mut perron_component = None;
    let mut shared = true;
    let mut roots = Vec::with_capacity(s.samples.len());
    for (i, sample) in s.samples.iter().enumerate() {
        let eigs = &sample.eigenvalues;
        let top = (0..eigs.len())
            .max_by(|&a, &b| eigs[a].norm().total_cmp(&eigs[b].norm()))
            .unwrap();
        let thr = cluster_threshold(eigs, tol.cluster_tol);
        let simple = eigs
            .iter()
            .enumerate()
            .all(|(j, z)| j == top || (z - eigs[top]).norm() > thr);
        if !simple {
            return Err(Error::Structural(format!(
                "dominant eigenvalue at sample {i} is not simple"
            )));
        }
        if eigs[top].im.abs() > thr || eigs[top].re <= 0.0 {
            return Err(Error::Structural(format!(
                "dominant eigenvalue {} at sample {i} is not real positive",
                eigs[top]
            )));
        }
        roots.push(eigs[top].re);
        let c = owner[i * s.n() + top];
        match perron_component {
            None => perron_component = Some(c),
            Some(p) if p != c => shared = false,
            _ => {}
        }
    }
    let component_k = perron_component.map(|c| comps.iter().find(|x| x.id == c).unwrap().k);
    let pass = shared && component_k == Some(1);
    Ok(PerronReport {
        pass,
        samples: s.samples.len(),
        component: if shared { perron_component } else { None },
        component_k,
        root_range: (roots[0], *roots.last().unwrap()),
    })
}

/// Monodromy of a closed polygonal loop of Hermitian matrices is value preserving.
pub fn hermitian_weak_transitivity_check(path: &MatrixPath, cfg: &TrackerConfig) -> Result<bool> {
    let waypoints = path
        .waypoint_matrices()
        .ok_or_else(|| Error::argument("Hermitian check needs a polygonal path"))?;
    if let Some(i) = waypoints.iter().position(|w| !w.is_hermitian(HERMITIAN_TOL)) {
        return Err(Error::argument(format!("waypoint {i} is not Hermitian")));
    }
    Ok(monodromy(path, cfg)?.permutation.value_preserving)
}

/// Closed polygon through `waypoints` seeded random Hermitian matrices.
pub fn random_hermitian_loop(n: usize, waypoints: usize, seed: u64) -> Result<MatrixPath> {
    let mut rng = SeededRng::new(seed);
    let w = (0..waypoints).map(|_| rng.matrix(RandomKind::Hermitian, n)).collect();
    MatrixPath::closed_polygon(w)
}
