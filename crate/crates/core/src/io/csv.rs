//! CSV outputs. Floats use `{:.16e}` (17 significant digits) so values round-trip.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::linalg::{MultiplicityList, MatrixHull};
use crate::surface::{self, grid, SampleClass, SurfaceSample, SurfaceSamples};
use crate::tolerance::ToleranceConfig;
use crate::track::{CollisionEvent, TrackedBundle, TrackerConfig};

/// Sample count above which the command-line scan streams rows instead of
/// keeping the scan in memory.
pub const DEFAULT_SAMPLE_CAP: usize = 2_000_000;
/// Samples evaluated per batch while streaming.
const STREAM_CHUNK: usize = 4096;

/// `x,slot,re,im`, one row per sample and eigenpath.
pub fn write_bundle_csv<W: Write>(mut w: W, bundle: &TrackedBundle) -> Result<()> {
    writeln!(w, "x,slot,re,im")?;
    for (x, row) in bundle.parameters.iter().zip(&bundle.values) {
        for (slot, z) in row.iter().enumerate() {
            writeln!(w, "{x:.16e},{slot},{:.16e},{:.16e}", z.re, z.im)?;
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CollisionJson<'a> {
    x: f64,
    slots: &'a [usize],
    min_gap: f64,
    kind: crate::track::CollisionKind,
}

/// Collision sidecar with the tracker settings used, for reproducibility.
pub fn collisions_json(events: &[CollisionEvent], cfg: &TrackerConfig) -> serde_json::Value {
    let list: Vec<CollisionJson> = events
        .iter()
        .map(|e| CollisionJson {
            x: e.x_location,
            slots: &e.columns,
            min_gap: e.min_gap_attained,
            kind: e.kind,
        })
        .collect();
    serde_json::json!({ "collisions": list, "tracker": cfg })
}

fn scan_header<W: Write>(w: &mut W, k: usize) -> Result<()> {
    for i in 1..=k {
        write!(w, "alpha_{i},")?;
    }
    writeln!(w, "slot,re,im,disc_re,disc_im,mult_list,class")?;
    Ok(())
}

fn scan_rows<W: Write>(w: &mut W, s: &SurfaceSample) -> Result<()> {
    let alpha: String = s.alpha.weights().iter().map(|a| format!("{a:.16e},")).collect();
    for (slot, z) in s.eigenvalues.iter().enumerate() {
        writeln!(
            w,
            "{alpha}{slot},{:.16e},{:.16e},{:.16e},{:.16e},{},{}",
            z.re,
            z.im,
            s.disc.re,
            s.disc.im,
            s.mult_list,
            s.cls.as_str()
        )?;
    }
    Ok(())
}

/// `alpha_1..alpha_k,slot,re,im,disc_re,disc_im,mult_list,class`.
pub fn write_scan_csv<W: Write>(mut w: W, scan: &SurfaceSamples) -> Result<()> {
    scan_header(&mut w, scan.hull.k())?;
    for s in &scan.samples {
        scan_rows(&mut w, s)?;
    }
    Ok(())
}

/// What a streamed scan found, without the samples themselves.
#[derive(Clone, Debug, Serialize)]
pub struct StreamedScan {
    pub samples: usize,
    pub minimal_list: String,
    pub regular: bool,
    pub exceptional: usize,
    pub inconsistent: usize,
}

/// Writes the scan CSV in bounded memory. A first pass finds the minimal
/// multiplicity list; the second re-evaluates batches and writes them in order.
pub fn stream_scan_csv<W: Write>(
    mut w: W,
    hull: &MatrixHull,
    resolution: usize,
    tol: &ToleranceConfig,
) -> Result<StreamedScan> {
    surface::check_scan_args(tol, resolution)?;
    let points = grid::compositions(hull.k(), resolution);
    let mut minimal: Option<MultiplicityList> = None;
    for chunk in points.chunks(STREAM_CHUNK) {
        let lists: Vec<MultiplicityList> = chunk
            .par_iter()
            .map(|m| surface::evaluate(hull, m, resolution, tol).map(|r| r.mult_list))
            .collect::<Result<_>>()?;
        for l in lists {
            if minimal.as_ref().is_none_or(|m| l < *m) {
                minimal = Some(l);
            }
        }
    }
    let minimal = minimal.expect("lattice is nonempty");
    let regular = minimal == MultiplicityList::simple(hull.n());
    scan_header(&mut w, hull.k())?;
    let (mut exceptional, mut inconsistent) = (0, 0);
    for chunk in points.chunks(STREAM_CHUNK) {
        let samples: Vec<SurfaceSample> = chunk
            .par_iter()
            .map(|m| surface::evaluate(hull, m, resolution, tol).map(|r| surface::classify(r, &minimal, regular)))
            .collect::<Result<_>>()?;
        for s in &samples {
            exceptional += usize::from(s.cls == SampleClass::Exceptional);
            inconsistent += usize::from(!s.consistent);
            scan_rows(&mut w, s)?;
        }
    }
    Ok(StreamedScan {
        samples: points.len(),
        minimal_list: minimal.to_string(),
        regular,
        exceptional,
        inconsistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;
    use crate::surface::scan;
    use crate::track::{track, MatrixPath};

    #[test]
    fn bundle_rows() {
        let p = MatrixPath::segment(ComplexMatrix::diag_real(&[1.0, -1.0]), ComplexMatrix::diag_real(&[2.0, -2.0]))
            .unwrap();
        let b = track(&p, &TrackerConfig::default()).unwrap();
        let mut out = Vec::new();
        write_bundle_csv(&mut out, &b).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,slot,re,im");
        assert_eq!(lines.len(), 1 + 2 * b.parameters.len());
        let last: Vec<f64> = lines.last().unwrap().split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(last[0], 1.0);
    }

    #[test]
    fn streamed_scan_equals_in_memory_scan() {
        let hull = MatrixHull::new(vec![
            ComplexMatrix::diag_real(&[1.0, -1.0]),
            ComplexMatrix::from_real_rows(2, &[0.0, 1.0, -1.0, 0.0]).unwrap(),
            ComplexMatrix::diag_real(&[0.5, 2.0]),
        ])
        .unwrap();
        let tol = ToleranceConfig::default();
        let s = scan(&hull, 6, &tol).unwrap();
        let mut a = Vec::new();
        write_scan_csv(&mut a, &s).unwrap();
        let mut b = Vec::new();
        let summary = stream_scan_csv(&mut b, &hull, 6, &tol).unwrap();
        assert_eq!(a, b);
        assert_eq!(summary.samples, 28);
        assert_eq!(summary.exceptional, s.exceptional_count());
        let header = String::from_utf8(a).unwrap().lines().next().unwrap().to_string();
        assert_eq!(header, "alpha_1,alpha_2,alpha_3,slot,re,im,disc_re,disc_im,mult_list,class");
    }
}
