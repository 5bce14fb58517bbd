use num_complex::Complex64;
use serde::Serialize;

use super::assign::{match_eigs, stable_assignment};
use super::{MatrixPath, TrackerConfig};
use crate::error::{Error, Result};
use crate::linalg::{cluster, eigenvalues, min_gap, spectral_radius};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CollisionKind {
    /// Eigenvalues came within `collision_tol * max(1, ρ)` of each other at a sample.
    Threshold,
    /// Bisection reached `min_step` without separating the columns.
    Unresolved,
}

/// Eigenpaths that met (numerically) somewhere along the path.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CollisionEvent {
    pub x_location: f64,
    /// Sorted column indices, at least two.
    pub columns: Vec<usize>,
    pub min_gap_attained: f64,
    pub kind: CollisionKind,
}

/// `n` matched eigenpaths over an increasing parameter grid.
#[derive(Clone, Debug)]
pub struct TrackedBundle {
    pub parameters: Vec<f64>,
    /// `values[row][column]`; column `j` is the `j`-th eigenpath.
    pub values: Vec<Vec<Complex64>>,
    pub collisions: Vec<CollisionEvent>,
    /// Column `j` ends at `eigenvalues(A(1))[end_slots[j]]`.
    pub end_slots: Vec<usize>,
}

impl TrackedBundle {
    pub fn n(&self) -> usize {
        self.values[0].len()
    }

    pub fn start(&self) -> &[Complex64] {
        &self.values[0]
    }

    pub fn end(&self) -> &[Complex64] {
        self.values.last().unwrap()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        self.values.iter().map(|row| row[j]).collect()
    }

    /// `eigenvalues(A(1))` in the solver's order.
    pub fn end_eigenvalues(&self) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.n()];
        for (j, &slot) in self.end_slots.iter().enumerate() {
            out[slot] = self.end()[j];
        }
        out
    }

    /// Row index of parameter `x`, if sampled exactly.
    pub fn row_at(&self, x: f64) -> Option<usize> {
        self.parameters.iter().position(|&p| p == x)
    }
}

enum Step {
    Accepted(Vec<usize>),
    Ambiguous(Vec<usize>, Vec<usize>),
}

struct Tracker<'a> {
    path: &'a MatrixPath,
    cfg: &'a TrackerConfig,
    params: Vec<f64>,
    values: Vec<Vec<Complex64>>,
    collisions: Vec<CollisionEvent>,
    /// events seen at the previous accepted row
    open: Vec<usize>,
    end_slots: Vec<usize>,
}

impl Tracker<'_> {
    fn cur(&self) -> &[Complex64] {
        self.values.last().unwrap()
    }

    fn cur_x(&self) -> f64 {
        *self.params.last().unwrap()
    }

    /// Linear extrapolation from the last two rows to `x`.
    fn predict(&self, x: f64) -> Vec<Complex64> {
        let m = self.values.len();
        let cur = self.cur();
        if m < 2 {
            return cur.to_vec();
        }
        let (xp, xc) = (self.params[m - 2], self.params[m - 1]);
        if xc <= xp {
            return cur.to_vec();
        }
        let ratio = (x - xc) / (xc - xp);
        cur.iter()
            .zip(&self.values[m - 2])
            .map(|(c, p)| c + (c - p) * ratio)
            .collect()
    }

    fn try_step(&self, x_next: f64, raw: &[Complex64]) -> Result<Step> {
        let cur = self.cur();
        let threshold = self.cfg.collision_tol * spectral_radius(cur).max(1.0);
        if min_gap(cur) <= threshold {
            return Ok(Step::Accepted(predicted_assignment(&self.predict(x_next), raw)));
        }
        let m = match_eigs(cur, raw, self.cfg)?;
        if !m.ambiguous {
            return Ok(Step::Accepted(m.perm));
        }
        let fallback = predicted_assignment(&self.predict(x_next), raw);
        Ok(Step::Ambiguous(m.perm, fallback))
    }

    fn record(&mut self, x: f64, groups: Vec<(Vec<usize>, f64)>, kind: CollisionKind) -> Vec<usize> {
        let mut seen = Vec::new();
        for (columns, gap) in groups {
            let existing = self.open.iter().copied().find(|&e| self.collisions[e].columns == columns);
            match existing {
                Some(e) => {
                    // one meeting seen by both tests stays one event; a sample
                    // inside the threshold is the stronger evidence
                    let ev = &mut self.collisions[e];
                    if kind == CollisionKind::Threshold {
                        ev.kind = kind;
                    }
                    if gap < ev.min_gap_attained {
                        ev.min_gap_attained = gap;
                        ev.x_location = x;
                    }
                    seen.push(e);
                }
                None => {
                    self.collisions.push(CollisionEvent {
                        x_location: x,
                        columns,
                        min_gap_attained: gap,
                        kind,
                    });
                    seen.push(self.collisions.len() - 1);
                }
            }
        }
        seen
    }

    fn threshold_groups(&self) -> Vec<(Vec<usize>, f64)> {
        let cur = self.cur();
        let threshold = self.cfg.collision_tol * spectral_radius(cur).max(1.0);
        cluster(cur, threshold)
            .into_iter()
            .filter(|g| g.len() >= 2)
            .map(|g| {
                let vals: Vec<Complex64> = g.iter().map(|&i| cur[i]).collect();
                let gap = min_gap(&vals);
                (g, gap)
            })
            .collect()
    }

    /// Columns implicated in a step that could not be separated.
    fn unresolved_groups(&self, perm: &[usize], raw: &[Complex64]) -> Vec<(Vec<usize>, f64)> {
        let cur = self.cur();
        let n = cur.len();
        let gap = min_gap(cur);
        let nearest = |i: usize| {
            (0..n)
                .filter(|&j| j != i)
                .min_by(|&a, &b| (cur[i] - cur[a]).norm().total_cmp(&(cur[i] - cur[b]).norm()))
                .unwrap()
        };
        let mut pairs: Vec<(usize, usize)> = (0..n)
            .filter(|&i| (cur[i] - raw[perm[i]]).norm() > self.cfg.gap_safety * gap)
            .map(|i| (i, nearest(i)))
            .collect();
        if pairs.is_empty() {
            // only the runner-up test fired: blame the closest pair
            let mut best = (0, 1, f64::INFINITY);
            for i in 0..n {
                for j in i + 1..n {
                    let d = (cur[i] - cur[j]).norm();
                    if d < best.2 {
                        best = (i, j, d);
                    }
                }
            }
            pairs.push((best.0, best.1));
        }
        let mut uf = petgraph::unionfind::UnionFind::<usize>::new(n);
        let mut involved = vec![false; n];
        for (i, j) in pairs {
            uf.union(i, j);
            involved[i] = true;
            involved[j] = true;
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut roots: Vec<usize> = Vec::new();
        for i in (0..n).filter(|&i| involved[i]) {
            let r = uf.find(i);
            match roots.iter().position(|&x| x == r) {
                Some(g) => groups[g].push(i),
                None => {
                    roots.push(r);
                    groups.push(vec![i]);
                }
            }
        }
        groups
            .into_iter()
            .map(|g| {
                let before: Vec<Complex64> = g.iter().map(|&i| cur[i]).collect();
                let after: Vec<Complex64> = g.iter().map(|&i| raw[perm[i]]).collect();
                (g, min_gap(&before).min(min_gap(&after)))
            })
            .collect()
    }

    fn accept(&mut self, x: f64, raw: &[Complex64], perm: Vec<usize>, events: Vec<usize>) {
        let row: Vec<Complex64> = perm.iter().map(|&j| raw[j]).collect();
        self.params.push(x);
        self.values.push(row);
        self.open = events;
        self.end_slots = perm;
    }

    fn run(mut self) -> Result<TrackedBundle> {
        let segs = self.path.segment_count();
        let steps = self.cfg.initial_steps;
        for seg in 0..segs {
            let mut t_cur = 0.0;
            for i in 1..=steps {
                let t_target = if i == steps { 1.0 } else { i as f64 / steps as f64 };
                let mut pending = vec![t_target];
                while let Some(&t) = pending.last() {
                    let x = self.path.global_x(seg, t);
                    let raw = eigenvalues(&self.path.eval_local(seg, t))?;
                    let x_cur = self.cur_x();
                    let threshold_events = {
                        let groups = self.threshold_groups();
                        if groups.is_empty() {
                            Vec::new()
                        } else {
                            self.record(x_cur, groups, CollisionKind::Threshold)
                        }
                    };
                    match self.try_step(x, &raw)? {
                        Step::Accepted(perm) => {
                            self.accept(x, &raw, perm, threshold_events);
                            t_cur = t;
                            pending.pop();
                        }
                        Step::Ambiguous(direct, fallback) => {
                            let h = x - x_cur;
                            if h < self.cfg.min_step {
                                let groups = self.unresolved_groups(&direct, &raw);
                                self.open.extend(threshold_events.iter().copied());
                                let mut events = threshold_events;
                                events.extend(self.record(x_cur, groups, CollisionKind::Unresolved));
                                events.sort_unstable();
                                events.dedup();
                                self.accept(x, &raw, fallback, events);
                                t_cur = t;
                                pending.pop();
                                continue;
                            }
                            let depth = ((1.0 / steps as f64) / (t - t_cur)).log2().round() as usize;
                            if depth >= self.cfg.max_refinements {
                                return Err(Error::Tracking {
                                    lo: x_cur,
                                    hi: x,
                                    reason: format!(
                                        "ambiguous matching after {depth} bisections"
                                    ),
                                });
                            }
                            pending.push(0.5 * (t_cur + t));
                        }
                    }
                }
            }
        }
        Ok(TrackedBundle {
            parameters: self.params,
            values: self.values,
            collisions: self.collisions,
            end_slots: self.end_slots,
        })
    }
}

fn predicted_assignment(reference: &[Complex64], raw: &[Complex64]) -> Vec<usize> {
    let dist: Vec<Vec<f64>> = reference
        .iter()
        .map(|p| raw.iter().map(|q| (p - q).norm()).collect())
        .collect();
    stable_assignment(&dist)
}

/// Tracks all `n` eigenpaths along `path`.
///
/// Each segment starts with `initial_steps` uniform steps. An ambiguous match
/// is bisected until it resolves; once the step drops below `min_step` the
/// step is taken with a linearly predicted matching and recorded as an
/// unresolved collision. Samples whose eigenvalues sit within the collision
/// threshold are recorded too, and matched through the same predictor.
pub fn track(path: &MatrixPath, cfg: &TrackerConfig) -> Result<TrackedBundle> {
    cfg.validate()?;
    let start = eigenvalues(&path.eval_local(0, 0.0))?;
    let n = start.len();
    let tracker = Tracker {
        path,
        cfg,
        params: vec![0.0],
        values: vec![start],
        collisions: Vec::new(),
        open: Vec::new(),
        end_slots: (0..n).collect(),
    };
    tracker.run()
}
