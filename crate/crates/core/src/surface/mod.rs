//! Sampled eigen-surfaces over the barycentric simplex of a hull.

pub mod clusters;
pub mod components;
pub mod grid;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{
    char_poly, cluster, cluster_threshold, convex_combine, discriminant_is_zero, eigenvalues,
    multiplicity_list_of, root_discriminant, BarycentricPoint, ComplexMatrix, MatrixHull,
    MultiplicityList,
};
use crate::tolerance::ToleranceConfig;

pub use clusters::{exceptional_clusters, local_transitivity_probe, ExceptionalCluster, ProbeOutcome};
pub use components::{component_separation, k_components, KComponent, Separation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleClass {
    Core,
    Exceptional,
}

impl SampleClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SampleClass::Core => "core",
            SampleClass::Exceptional => "exceptional",
        }
    }
}

/// One element `(α, λ)` of the eigen-surface.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPoint {
    pub alpha: BarycentricPoint,
    pub lambda: Complex64,
    pub slot: usize,
}

/// Spectral data of the hull at one lattice point.
#[derive(Clone, Debug)]
pub struct SurfaceSample {
    pub lattice: Vec<u32>,
    pub alpha: BarycentricPoint,
    pub eigenvalues: Vec<Complex64>,
    pub disc: Complex64,
    /// Relative zero test on `disc`.
    pub disc_zero: bool,
    pub mult_list: MultiplicityList,
    pub cls: SampleClass,
    /// False when the discriminant test and the multiplicity test disagree
    /// on a regular hull.
    pub consistent: bool,
}

impl SurfaceSample {
    pub fn eigenpoint(&self, slot: usize) -> EigenPoint {
        EigenPoint {
            alpha: self.alpha.clone(),
            lambda: self.eigenvalues[slot],
            slot,
        }
    }

    /// Slots grouped by numerically equal eigenvalue.
    pub fn value_clusters(&self, cluster_tol: f64) -> Vec<Vec<usize>> {
        cluster(&self.eigenvalues, cluster_threshold(&self.eigenvalues, cluster_tol))
    }
}

/// All lattice samples of a hull at resolution `N`.
#[derive(Clone, Debug)]
pub struct SurfaceSamples {
    pub hull: MatrixHull,
    pub resolution: usize,
    pub samples: Vec<SurfaceSample>,
    pub minimal_list: MultiplicityList,
    /// The minimal list is the simple one `(0, ..., 0, n)`.
    pub regular: bool,
    pub tol: ToleranceConfig,
}

impl SurfaceSamples {
    pub fn n(&self) -> usize {
        self.hull.n()
    }

    pub fn matrix(&self, sample: usize) -> ComplexMatrix {
        convex_combine(&self.hull, &self.samples[sample].alpha).expect("scan alphas match the hull")
    }

    pub fn exceptional_count(&self) -> usize {
        self.samples
            .iter()
            .filter(|s| s.cls == SampleClass::Exceptional)
            .count()
    }

    pub fn exceptional_fraction(&self) -> f64 {
        self.exceptional_count() as f64 / self.samples.len() as f64
    }

    pub fn inconsistent(&self) -> impl Iterator<Item = usize> + '_ {
        self.samples
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.consistent)
            .map(|(i, _)| i)
    }

    pub fn index_of(&self, lattice: &[u32]) -> Option<usize> {
        self.samples.iter().position(|s| s.lattice == lattice)
    }
}

/// Spectral data at one point, before classification.
pub(crate) struct RawSample {
    pub lattice: Vec<u32>,
    pub alpha: BarycentricPoint,
    pub eigenvalues: Vec<Complex64>,
    pub disc: Complex64,
    pub disc_zero: bool,
    pub mult_list: MultiplicityList,
}

pub(crate) fn evaluate(hull: &MatrixHull, m: &[u32], resolution: usize, tol: &ToleranceConfig) -> Result<RawSample> {
    let alpha = grid::to_alpha(m, resolution);
    let a = convex_combine(hull, &alpha)?;
    let eigs = eigenvalues(&a).map_err(|e| e.at_sample(alpha.weights()))?;
    let p = char_poly(&a);
    let disc = if eigs.len() == 1 {
        Complex64::new(1.0, 0.0)
    } else {
        root_discriminant(&eigs)
    };
    Ok(RawSample {
        lattice: m.to_vec(),
        disc_zero: discriminant_is_zero(&p, disc, tol.disc_zero_tol),
        mult_list: multiplicity_list_of(&eigs, tol.cluster_tol),
        eigenvalues: eigs,
        alpha,
        disc,
    })
}

pub(crate) fn classify(raw: RawSample, minimal: &MultiplicityList, regular: bool) -> SurfaceSample {
    let exceptional = raw.mult_list > *minimal;
    SurfaceSample {
        cls: if exceptional {
            SampleClass::Exceptional
        } else {
            SampleClass::Core
        },
        consistent: !regular || raw.disc_zero == exceptional,
        lattice: raw.lattice,
        alpha: raw.alpha,
        eigenvalues: raw.eigenvalues,
        disc: raw.disc,
        disc_zero: raw.disc_zero,
        mult_list: raw.mult_list,
    }
}

pub(crate) fn check_scan_args(tol: &ToleranceConfig, resolution: usize) -> Result<()> {
    if resolution == 0 {
        return Err(Error::argument("resolution N must be at least 1"));
    }
    if !(tol.cluster_tol > 0.0) {
        return Err(Error::argument("cluster_tol must be positive"));
    }
    Ok(())
}

/// Evaluates eigenvalues, discriminant, and multiplicity list at every lattice
/// point `m / N` and classifies each sample against the lex-minimal list.
/// Samples are evaluated in parallel and kept in lattice order.
pub fn scan(hull: &MatrixHull, resolution: usize, tol: &ToleranceConfig) -> Result<SurfaceSamples> {
    check_scan_args(tol, resolution)?;
    let points = grid::compositions(hull.k(), resolution);
    let raw: Vec<RawSample> = points
        .par_iter()
        .map(|m| evaluate(hull, m, resolution, tol))
        .collect::<Result<_>>()?;
    let minimal_list = raw
        .iter()
        .map(|r| &r.mult_list)
        .min()
        .cloned()
        .expect("lattice is nonempty");
    let regular = minimal_list == MultiplicityList::simple(hull.n());
    let samples = raw
        .into_iter()
        .map(|r| classify(r, &minimal_list, regular))
        .collect();
    Ok(SurfaceSamples {
        hull: hull.clone(),
        resolution,
        samples,
        minimal_list,
        regular,
        tol: *tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn quadrant_hull() -> MatrixHull {
        let cs = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ];
        MatrixHull::new(
            cs.iter()
                .map(|&c| ComplexMatrix::from_rows(2, &[0.0.into(), 1.0.into(), c, 0.0.into()]).unwrap())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_generator_is_core() {
        let s = scan(&MatrixHull::new(vec![ComplexMatrix::identity(2)]).unwrap(), 3, &ToleranceConfig::default())
            .unwrap();
        assert_eq!(s.samples.len(), 1);
        assert_eq!(s.minimal_list.counts(), &[1, 0]);
        assert!(!s.regular);
        assert_eq!(s.samples[0].cls, SampleClass::Core);
    }

    #[test]
    fn diagonal_pair_is_regular() {
        let hull = MatrixHull::new(vec![
            ComplexMatrix::diag_real(&[1.0, 2.0]),
            ComplexMatrix::diag_real(&[3.0, 4.0]),
        ])
        .unwrap();
        let s = scan(&hull, 10, &ToleranceConfig::default()).unwrap();
        assert_eq!(s.samples.len(), 11);
        assert!(s.regular);
        assert_eq!(s.exceptional_count(), 0);
        assert!(s.samples.iter().all(|x| x.mult_list.counts() == [0, 2]));
    }

    #[test]
    fn quadrant_exceptional_line() {
        let s = scan(&quadrant_hull(), 8, &ToleranceConfig::default()).unwrap();
        assert!(s.regular);
        assert_eq!(s.inconsistent().count(), 0);
        for x in &s.samples {
            let m = &x.lattice;
            let on_line = m[0] == m[2] && m[1] == m[3];
            assert_eq!(x.cls == SampleClass::Exceptional, on_line, "{m:?}");
        }
        let center = s.index_of(&[2, 2, 2, 2]).unwrap();
        assert_eq!(s.samples[center].cls, SampleClass::Exceptional);
    }

    #[test]
    fn zero_resolution_is_rejected() {
        assert!(matches!(
            scan(&quadrant_hull(), 0, &ToleranceConfig::default()),
            Err(Error::Argument(_))
        ));
    }
}
