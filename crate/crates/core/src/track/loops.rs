use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use super::assign::stable_assignment;
use super::{track, CollisionEvent, MatrixPath, TrackedBundle, TrackerConfig};
use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, spectral_radius, ComplexMatrix};

/// Relative tolerance for comparing a scaled path's eigenvalues with the original's.
const SCALING_VALUE_TOL: f64 = 1e-8;
/// Bisection limits when locating the level at which a loop's pairing changes.
const TRANSITION_WIDTH: f64 = 1e-13;
const TRANSITION_ITERATIONS: usize = 60;

/// Start-slot to end-slot correspondence induced by a path.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PairingPermutation {
    /// `mapping[i]` is the end slot reached from start slot `i`.
    pub mapping: Vec<usize>,
    /// Closed paths only: every eigenvalue returns to its own value.
    pub value_preserving: bool,
}

impl PairingPermutation {
    pub fn is_identity(&self) -> bool {
        self.mapping.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn inverse(&self) -> Vec<usize> {
        let mut inv = vec![0; self.mapping.len()];
        for (i, &j) in self.mapping.iter().enumerate() {
            inv[j] = i;
        }
        inv
    }

    /// Cycles of length at least two, each starting at its smallest slot.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let n = self.mapping.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut j = self.mapping[start];
            while j != start {
                seen[j] = true;
                cycle.push(j);
                j = self.mapping[j];
            }
            if cycle.len() > 1 {
                out.push(cycle);
            }
        }
        out
    }
}

/// Pairing of `eigenvalues(A)` slots with `eigenvalues(B)` slots along the segment `A -> B`.
#[derive(Clone, Debug)]
pub struct SegmentPairing {
    /// `mapping[i]`: slot of `eigenvalues(B)` continuing slot `i` of `eigenvalues(A)`.
    pub mapping: Vec<usize>,
    pub collisions: Vec<CollisionEvent>,
    pub start: Vec<Complex64>,
    pub end: Vec<Complex64>,
}

impl SegmentPairing {
    /// Start slots whose paths met somewhere on the segment, grouped per event.
    pub fn collided_slots(&self) -> Vec<Vec<usize>> {
        self.collisions.iter().map(|ev| ev.columns.clone()).collect()
    }
}

pub fn segment_pairing(a: &ComplexMatrix, b: &ComplexMatrix, cfg: &TrackerConfig) -> Result<SegmentPairing> {
    let path = MatrixPath::segment(a.clone(), b.clone())?;
    let bundle = track(&path, cfg)?;
    let end = bundle.end_eigenvalues();
    Ok(SegmentPairing {
        mapping: bundle.end_slots.clone(),
        start: bundle.start().to_vec(),
        end,
        collisions: bundle.collisions,
    })
}

/// Monodromy of a closed path together with its transitivity verdicts.
#[derive(Clone, Debug)]
pub struct LoopReport {
    pub permutation: PairingPermutation,
    /// Each eigenvalue returns to its own value.
    pub weakly_transitive: bool,
    /// The permutation fixes every cluster of equal eigenvalues. For a single
    /// loop this coincides with `weakly_transitive`.
    pub transitive: bool,
    pub bundle: TrackedBundle,
}

impl LoopReport {
    pub fn collisions(&self) -> &[CollisionEvent] {
        &self.bundle.collisions
    }
}

/// Budget of continuation choices tried at collisions.
const MAX_CONTINUATIONS: usize = 1 << 16;

fn permutations_of(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations_of(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

/// Searches continuation choices at the recorded collisions for one that
/// returns every eigenvalue to its own value. `carrier[j]` is the column that
/// carries start slot `j` after the events seen so far.
fn preserving_continuation(
    events: &[CollisionEvent],
    carrier: &mut Vec<usize>,
    ok: &dyn Fn(&[usize]) -> bool,
) -> bool {
    let Some((ev, rest)) = events.split_first() else {
        return ok(carrier);
    };
    let cols = &ev.columns;
    for sigma in permutations_of(cols) {
        let saved = carrier.clone();
        for c in carrier.iter_mut() {
            if let Some(p) = cols.iter().position(|x| x == c) {
                *c = sigma[p];
            }
        }
        if preserving_continuation(rest, carrier, ok) {
            return true;
        }
        *carrier = saved;
    }
    false
}

fn nearest_slots(start: &[Complex64], targets: &[Complex64]) -> Vec<usize> {
    let dist: Vec<Vec<f64>> = targets
        .iter()
        .map(|e| start.iter().map(|s| (e - s).norm()).collect())
        .collect();
    stable_assignment(&dist)
}

/// Start-slot permutation of a tracked loop.
///
/// Paths that collide may continue along each other's columns; when the
/// tracked continuation does not return every value and some choice at the
/// recorded collisions does, that choice is reported.
fn loop_permutation(bundle: &TrackedBundle, cfg: &TrackerConfig) -> PairingPermutation {
    let start = bundle.start();
    let end = bundle.end();
    let tol = cfg.collision_tol * spectral_radius(start).max(1.0);
    let mapping = nearest_slots(start, end);
    let preserving = |m: &[usize]| m.iter().enumerate().all(|(i, &j)| (start[j] - start[i]).norm() <= tol);
    if preserving(&mapping) || bundle.collisions.is_empty() {
        let value_preserving = preserving(&mapping);
        return PairingPermutation {
            mapping,
            value_preserving,
        };
    }
    let choices = bundle
        .collisions
        .iter()
        .try_fold(1usize, |acc, ev| acc.checked_mul((1..=ev.columns.len()).product()))
        .unwrap_or(usize::MAX);
    if choices <= MAX_CONTINUATIONS {
        let mut carrier: Vec<usize> = (0..start.len()).collect();
        let ok = |c: &[usize]| c.iter().enumerate().all(|(j, &col)| (end[col] - start[j]).norm() <= tol);
        if preserving_continuation(&bundle.collisions, &mut carrier, &ok) {
            let targets: Vec<Complex64> = carrier.iter().map(|&c| end[c]).collect();
            return PairingPermutation {
                mapping: nearest_slots(start, &targets),
                value_preserving: true,
            };
        }
    }
    PairingPermutation {
        mapping,
        value_preserving: false,
    }
}

/// Tracks a closed path and returns its start-to-end slot permutation.
pub fn monodromy(path: &MatrixPath, cfg: &TrackerConfig) -> Result<LoopReport> {
    if !path.is_closed() {
        return Err(Error::argument("monodromy needs a closed path"));
    }
    let bundle = track(path, cfg)?;
    let permutation = loop_permutation(&bundle, cfg);
    let weakly_transitive = permutation.value_preserving;
    Ok(LoopReport {
        transitive: weakly_transitive,
        weakly_transitive,
        permutation,
        bundle,
    })
}

/// A level interval over which a loop's pairing changes.
#[derive(Clone, Debug, Serialize)]
pub struct Transition {
    pub y_lo: f64,
    pub y_hi: f64,
    pub before: Vec<usize>,
    pub after: Vec<usize>,
    /// Collisions met by the loops at the ends of the narrowed interval.
    pub collisions: Vec<(f64, CollisionEvent)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DeformationReport {
    pub levels: Vec<f64>,
    /// Monodromy at each level, written in the slot labels of level 0.
    pub pairings: Vec<Vec<usize>>,
    pub preserved: bool,
    pub transitions: Vec<Transition>,
}

impl DeformationReport {
    pub fn collisions(&self) -> impl Iterator<Item = &(f64, CollisionEvent)> {
        self.transitions.iter().flat_map(|t| t.collisions.iter())
    }
}

pub type GridFn = Arc<dyn Fn(f64, f64) -> ComplexMatrix + Send + Sync>;

struct Deformation<'a> {
    grid: GridFn,
    n: usize,
    cfg: &'a TrackerConfig,
}

impl Deformation<'_> {
    fn level_loop(&self, y: f64) -> Result<LoopReport> {
        let g = self.grid.clone();
        let path = MatrixPath::sampled(self.n, Arc::new(move |x| g(x, y)), true)?;
        monodromy(&path, self.cfg)
    }

    /// Slot map from `eigenvalues(grid(0, y0))` to `eigenvalues(grid(0, y1))`.
    fn base_transport(&self, y0: f64, y1: f64) -> Result<Vec<usize>> {
        let g = self.grid.clone();
        let path =
            MatrixPath::sampled(self.n, Arc::new(move |t| g(0.0, y0 + (y1 - y0) * t)), false)?;
        Ok(track(&path, self.cfg)?.end_slots)
    }

    /// `perm` (in level-`y` labels) written in level-0 labels via `labels[level0] = level-y slot`.
    fn relabel(perm: &[usize], labels: &[usize]) -> Vec<usize> {
        let mut inv = vec![0; labels.len()];
        for (i, &l) in labels.iter().enumerate() {
            inv[l] = i;
        }
        labels.iter().map(|&l| inv[perm[l]]).collect()
    }

    fn equivalent(a: &[usize], b: &[usize], base: &[Complex64], tol: f64) -> bool {
        a.iter().zip(b).all(|(&i, &j)| (base[i] - base[j]).norm() <= tol)
    }
}

/// Monodromy of the loops `x -> grid(x, y)` at `rows` evenly spaced levels.
///
/// Permutations are compared in the slot labels of level 0, carried along the
/// base curve `y -> grid(0, y)`. Each level interval where the pairing changes
/// is narrowed by bisection and the collisions met there are reported.
pub fn deformation_check(grid: GridFn, n: usize, rows: usize, cfg: &TrackerConfig) -> Result<DeformationReport> {
    if rows < 2 {
        return Err(Error::argument("deformation_check needs at least 2 levels"));
    }
    let d = Deformation { grid, n, cfg };
    let levels: Vec<f64> = (0..rows).map(|i| i as f64 / (rows - 1) as f64).collect();
    let base = eigenvalues(&(d.grid)(0.0, 0.0))?;
    let tol = cfg.collision_tol * spectral_radius(&base).max(1.0);

    let mut labels: Vec<usize> = (0..n).collect();
    let mut label_history = Vec::with_capacity(rows);
    let mut pairings = Vec::with_capacity(rows);
    for (i, &y) in levels.iter().enumerate() {
        if i > 0 {
            let step = d.base_transport(levels[i - 1], y)?;
            labels = labels.iter().map(|&l| step[l]).collect();
        }
        let report = d.level_loop(y)?;
        pairings.push(Deformation::relabel(&report.permutation.mapping, &labels));
        label_history.push(labels.clone());
    }

    let mut transitions = Vec::new();
    for i in 1..rows {
        if Deformation::equivalent(&pairings[i - 1], &pairings[i], &base, tol) {
            continue;
        }
        let (mut lo, mut hi) = (levels[i - 1], levels[i]);
        let lo_labels = label_history[i - 1].clone();
        let lo_perm = pairings[i - 1].clone();
        let mut found = Vec::new();
        for _ in 0..TRANSITION_ITERATIONS {
            if hi - lo < TRANSITION_WIDTH {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let step = d.base_transport(levels[i - 1], mid)?;
            let mid_labels: Vec<usize> = lo_labels.iter().map(|&l| step[l]).collect();
            let report = d.level_loop(mid)?;
            let mid_perm = Deformation::relabel(&report.permutation.mapping, &mid_labels);
            if !report.collisions().is_empty() {
                found = report.collisions().iter().map(|c| (mid, c.clone())).collect();
            }
            if Deformation::equivalent(&lo_perm, &mid_perm, &base, tol) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        if found.is_empty() {
            for y in [lo, hi] {
                let report = d.level_loop(y)?;
                found.extend(report.collisions().iter().map(|c| (y, c.clone())));
            }
        }
        transitions.push(Transition {
            y_lo: lo,
            y_hi: hi,
            before: pairings[i - 1].clone(),
            after: pairings[i].clone(),
            collisions: found,
        });
    }
    let preserved = transitions.is_empty();
    Ok(DeformationReport {
        levels,
        pairings,
        preserved,
        transitions,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScalingReport {
    pub c: f64,
    pub permutations_equal: bool,
    /// Largest `|c·λ − λ_scaled| / max(1, c·ρ)` over parameters sampled by both runs.
    pub max_value_error: f64,
    pub pass: bool,
}

/// Compares the pairing and eigenpaths of `x -> c·A(x)` with those of `A(x)`.
pub fn scaling_pairing_invariance_check(
    path: &MatrixPath,
    c: f64,
    cfg: &TrackerConfig,
) -> Result<ScalingReport> {
    if !(c > 0.0) {
        return Err(Error::argument(format!("scaling factor must be positive, got {c}")));
    }
    let scaled = path.scaled(c);
    let orig = track(path, cfg)?;
    let sc = track(&scaled, cfg)?;
    let cz = Complex64::new(c, 0.0);

    let align = |a: &[Complex64], b: &[Complex64]| {
        let dist: Vec<Vec<f64>> = a
            .iter()
            .map(|x| b.iter().map(|y| (x * cz - y).norm()).collect())
            .collect();
        stable_assignment(&dist)
    };
    // columns of the scaled run matching each original column
    let col = align(orig.start(), sc.start());
    let orig_end = orig.end_eigenvalues();
    let sc_end = sc.end_eigenvalues();
    let end_align = align(&orig_end, &sc_end);

    let scale = (c * spectral_radius(&orig_end).max(spectral_radius(orig.start()))).max(1.0);
    let tol = SCALING_VALUE_TOL * scale;
    let (mapping_o, mapping_s) = if path.is_closed() {
        (
            loop_permutation(&orig, cfg).mapping,
            loop_permutation(&sc, cfg).mapping,
        )
    } else {
        (orig.end_slots.clone(), sc.end_slots.clone())
    };
    let end_targets: (&[usize], &[Complex64]) = if path.is_closed() {
        (&col, sc.start())
    } else {
        (&end_align, &sc_end)
    };
    let permutations_equal = (0..orig.n()).all(|i| {
        let expected = end_targets.0[mapping_o[i]];
        let got = mapping_s[col[i]];
        expected == got || (end_targets.1[expected] - end_targets.1[got]).norm() <= tol
    });

    let mut max_value_error = 0.0f64;
    let mut j = 0;
    for (i, &x) in orig.parameters.iter().enumerate() {
        while j < sc.parameters.len() && sc.parameters[j] < x {
            j += 1;
        }
        if j < sc.parameters.len() && sc.parameters[j] == x {
            for (k, &v) in orig.values[i].iter().enumerate() {
                let err = (v * cz - sc.values[j][col[k]]).norm() / scale;
                max_value_error = max_value_error.max(err);
            }
        }
    }
    Ok(ScalingReport {
        c,
        permutations_equal,
        max_value_error,
        pass: permutations_equal && max_value_error <= SCALING_VALUE_TOL,
    })
}
