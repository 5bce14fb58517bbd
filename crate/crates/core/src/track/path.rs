use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{BarycentricPoint, ComplexMatrix, MatrixHull};

const CLOSURE_TOL: f64 = 1e-12;

pub type PathFn = Arc<dyn Fn(f64) -> ComplexMatrix + Send + Sync>;

#[derive(Clone)]
pub enum PathKind {
    Segment(ComplexMatrix, ComplexMatrix),
    Polygonal(Vec<ComplexMatrix>),
    HullPolygonal {
        hull: MatrixHull,
        waypoints: Vec<BarycentricPoint>,
    },
    /// Arbitrary continuous map `[0, 1] -> M_n`.
    Sampled { n: usize, f: PathFn },
}

impl fmt::Debug for PathKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PathKind::Segment(..) => f.write_str("Segment"),
            PathKind::Polygonal(w) => write!(f, "Polygonal({} waypoints)", w.len()),
            PathKind::HullPolygonal { waypoints, .. } => {
                write!(f, "HullPolygonal({} waypoints)", waypoints.len())
            }
            PathKind::Sampled { n, .. } => write!(f, "Sampled(n = {n})"),
        }
    }
}

/// A continuous matrix path `x -> A(x)` on `[0, 1]`.
///
/// Polygonal paths are split into equal parameter intervals, one per segment,
/// so waypoint `s` sits exactly at `x = s / segments`.
#[derive(Clone, Debug)]
pub struct MatrixPath {
    kind: PathKind,
    closed: bool,
}

impl MatrixPath {
    pub fn segment(a: ComplexMatrix, b: ComplexMatrix) -> Result<Self> {
        if a.n() != b.n() {
            return Err(Error::argument(format!(
                "segment endpoints have dimensions {} and {}",
                a.n(),
                b.n()
            )));
        }
        Ok(Self {
            kind: PathKind::Segment(a, b),
            closed: false,
        })
    }

    pub fn polygonal(waypoints: Vec<ComplexMatrix>, closed: bool) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::argument("polygonal path needs at least 2 waypoints"));
        }
        let n = waypoints[0].n();
        if let Some((i, _)) = waypoints.iter().enumerate().find(|(_, w)| w.n() != n) {
            return Err(Error::argument(format!("waypoint {i} has the wrong dimension")));
        }
        if closed {
            check_closure(&waypoints[0], waypoints.last().unwrap())?;
        }
        Ok(Self {
            kind: PathKind::Polygonal(waypoints),
            closed,
        })
    }

    /// Closes an open list of waypoints by appending the first one.
    pub fn closed_polygon(mut waypoints: Vec<ComplexMatrix>) -> Result<Self> {
        if let Some(first) = waypoints.first().cloned() {
            waypoints.push(first);
        }
        Self::polygonal(waypoints, true)
    }

    pub fn hull_polygonal(
        hull: MatrixHull,
        waypoints: Vec<BarycentricPoint>,
        closed: bool,
    ) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::argument("polygonal path needs at least 2 waypoints"));
        }
        if let Some((i, w)) = waypoints.iter().enumerate().find(|(_, w)| w.k() != hull.k()) {
            return Err(Error::argument(format!(
                "waypoint {i} has {} weights for a hull of {} generators",
                w.k(),
                hull.k()
            )));
        }
        if closed {
            let first = hull.combine_weights(waypoints[0].weights());
            let last = hull.combine_weights(waypoints.last().unwrap().weights());
            check_closure(&first, &last)?;
        }
        Ok(Self {
            kind: PathKind::HullPolygonal { hull, waypoints },
            closed,
        })
    }

    pub fn sampled(n: usize, f: PathFn, closed: bool) -> Result<Self> {
        let a0 = f(0.0);
        if a0.n() != n {
            return Err(Error::argument(format!(
                "sampled path returns dimension {}, declared {n}",
                a0.n()
            )));
        }
        if closed {
            check_closure(&a0, &f(1.0))?;
        }
        Ok(Self {
            kind: PathKind::Sampled { n, f },
            closed,
        })
    }

    pub fn kind(&self) -> &PathKind {
        &self.kind
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn n(&self) -> usize {
        match &self.kind {
            PathKind::Segment(a, _) => a.n(),
            PathKind::Polygonal(w) => w[0].n(),
            PathKind::HullPolygonal { hull, .. } => hull.n(),
            PathKind::Sampled { n, .. } => *n,
        }
    }

    pub fn segment_count(&self) -> usize {
        match &self.kind {
            PathKind::Segment(..) | PathKind::Sampled { .. } => 1,
            PathKind::Polygonal(w) => w.len() - 1,
            PathKind::HullPolygonal { waypoints, .. } => waypoints.len() - 1,
        }
    }

    /// Global parameter of local position `t` on segment `seg`.
    pub fn global_x(&self, seg: usize, t: f64) -> f64 {
        let segs = self.segment_count();
        if seg + 1 == segs && t == 1.0 {
            return 1.0;
        }
        (seg as f64 + t) / segs as f64
    }

    /// `A` at local position `t ∈ [0, 1]` of segment `seg`; waypoints are returned exactly.
    pub fn eval_local(&self, seg: usize, t: f64) -> ComplexMatrix {
        match &self.kind {
            PathKind::Segment(a, b) => a.lerp(b, t),
            PathKind::Polygonal(w) => w[seg].lerp(&w[seg + 1], t),
            PathKind::HullPolygonal { hull, waypoints } => {
                let alpha = waypoints[seg].lerp(&waypoints[seg + 1], t);
                hull.combine_weights(alpha.weights())
            }
            PathKind::Sampled { f, .. } => f(t),
        }
    }

    /// `A(x)` for a global parameter.
    pub fn eval(&self, x: f64) -> ComplexMatrix {
        let (seg, t) = self.locate(x);
        self.eval_local(seg, t)
    }

    fn locate(&self, x: f64) -> (usize, f64) {
        let segs = self.segment_count();
        let x = x.clamp(0.0, 1.0);
        if x == 1.0 {
            return (segs - 1, 1.0);
        }
        let scaled = x * segs as f64;
        let seg = (scaled.floor() as usize).min(segs - 1);
        (seg, scaled - seg as f64)
    }

    /// Barycentric coordinates at `x`, for hull paths.
    pub fn alpha_at(&self, x: f64) -> Option<BarycentricPoint> {
        match &self.kind {
            PathKind::HullPolygonal { waypoints, .. } => {
                let (seg, t) = self.locate(x);
                Some(waypoints[seg].lerp(&waypoints[seg + 1], t))
            }
            _ => None,
        }
    }

    /// The same path traversed from `x = 1` to `x = 0`.
    pub fn reversed(&self) -> Self {
        let kind = match &self.kind {
            PathKind::Segment(a, b) => PathKind::Segment(b.clone(), a.clone()),
            PathKind::Polygonal(w) => PathKind::Polygonal(w.iter().rev().cloned().collect()),
            PathKind::HullPolygonal { hull, waypoints } => PathKind::HullPolygonal {
                hull: hull.clone(),
                waypoints: waypoints.iter().rev().cloned().collect(),
            },
            PathKind::Sampled { n, f } => {
                let f = f.clone();
                PathKind::Sampled {
                    n: *n,
                    f: Arc::new(move |x| f(1.0 - x)),
                }
            }
        };
        Self {
            kind,
            closed: self.closed,
        }
    }

    /// `x -> c A(x)`.
    pub fn scaled(&self, c: f64) -> Self {
        let z = Complex64::new(c, 0.0);
        let kind = match &self.kind {
            PathKind::Segment(a, b) => PathKind::Segment(a.scale(z), b.scale(z)),
            PathKind::Polygonal(w) => PathKind::Polygonal(w.iter().map(|m| m.scale(z)).collect()),
            PathKind::HullPolygonal { hull, waypoints } => PathKind::HullPolygonal {
                hull: MatrixHull::with_labels(
                    hull.generators().iter().map(|g| g.scale(z)).collect(),
                    hull.labels().map(<[String]>::to_vec),
                )
                .expect("scaling preserves hull shape"),
                waypoints: waypoints.clone(),
            },
            PathKind::Sampled { n, f } => {
                let f = f.clone();
                PathKind::Sampled {
                    n: *n,
                    f: Arc::new(move |x| f(x).scale(z)),
                }
            }
        };
        Self {
            kind,
            closed: self.closed,
        }
    }

    /// Waypoint matrices of a polygonal path (segment endpoints included).
    pub fn waypoint_matrices(&self) -> Option<Vec<ComplexMatrix>> {
        match &self.kind {
            PathKind::Segment(a, b) => Some(vec![a.clone(), b.clone()]),
            PathKind::Polygonal(w) => Some(w.clone()),
            PathKind::HullPolygonal { hull, waypoints } => Some(
                waypoints
                    .iter()
                    .map(|w| hull.combine_weights(w.weights()))
                    .collect(),
            ),
            PathKind::Sampled { .. } => None,
        }
    }
}

fn check_closure(first: &ComplexMatrix, last: &ComplexMatrix) -> Result<()> {
    let gap = first.max_abs_diff(last);
    if gap > CLOSURE_TOL {
        return Err(Error::argument(format!(
            "closed path endpoints differ by {gap:e} (entrywise), limit {CLOSURE_TOL:e}"
        )));
    }
    Ok(())
}
