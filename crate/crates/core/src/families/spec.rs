use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::checks::{perron_check, random_hermitian_loop};
use super::rank_one::{brauer_perturb, pagerank_hull};
use super::structured::{circulant, circulant_spectrum, toeplitz_spectrum, toeplitz_tridiag};
use super::{multiset_distance, RandomKind, SeededRng};
use crate::error::{Error, Result};
use crate::io::json::{complex, complex_vec};
use crate::linalg::{eigenvalues, eigenvector, ComplexMatrix, MatrixHull};
use crate::tolerance::ToleranceConfig;
use crate::track::{monodromy, TrackerConfig};

/// Spectra must match their closed forms to this absolute accuracy.
pub const ORACLE_TOL: f64 = 1e-8;

fn default_waypoints() -> usize {
    4
}

fn default_generators() -> usize {
    3
}

fn default_resolution() -> usize {
    6
}

fn default_alphas() -> usize {
    21
}

/// A family instance to construct and check against its closed form.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilySpec {
    /// Random closed polygonal loop of Hermitian matrices.
    Hermitian {
        n: usize,
        seed: u64,
        #[serde(default = "default_waypoints")]
        waypoints: usize,
    },
    /// Hull of random entrywise positive matrices.
    NonnegPrimitive {
        n: usize,
        seed: u64,
        #[serde(default = "default_generators")]
        generators: usize,
        #[serde(default = "default_resolution")]
        resolution: usize,
    },
    /// Random `A`, its eigenvector `x` for the first solver eigenvalue, random `v`.
    Brauer { n: usize, seed: u64 },
    /// `S` and `v` given explicitly or drawn from `seed`.
    Pagerank {
        #[serde(default)]
        n: Option<usize>,
        #[serde(default)]
        seed: Option<u64>,
        #[serde(default)]
        s: Option<Vec<Vec<f64>>>,
        #[serde(default)]
        v: Option<Vec<f64>>,
        #[serde(default = "default_alphas")]
        alphas: usize,
    },
    ToeplitzTridiag {
        n: usize,
        #[serde(with = "complex")]
        a: Complex64,
        #[serde(with = "complex")]
        b: Complex64,
        #[serde(with = "complex")]
        c: Complex64,
    },
    /// Explicit first row, or `n` random complex entries from `seed`.
    Circulant {
        #[serde(default, with = "opt_complex_vec", skip_serializing_if = "Option::is_none")]
        first_row: Option<Vec<Complex64>>,
        #[serde(default)]
        n: Option<usize>,
        #[serde(default)]
        seed: Option<u64>,
    },
}

mod opt_complex_vec {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<Vec<Complex64>>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match v {
            Some(v) => complex_vec::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Vec<Complex64>>, D::Error> {
        complex_vec::deserialize(d).map(Some)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyResult {
    pub family: String,
    pub n: usize,
    pub seed: Option<u64>,
    pub max_error: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

impl FamilySpec {
    pub fn name(&self) -> &'static str {
        match self {
            FamilySpec::Hermitian { .. } => "hermitian",
            FamilySpec::NonnegPrimitive { .. } => "nonneg_primitive",
            FamilySpec::Brauer { .. } => "brauer",
            FamilySpec::Pagerank { .. } => "pagerank",
            FamilySpec::ToeplitzTridiag { .. } => "toeplitz_tridiag",
            FamilySpec::Circulant { .. } => "circulant",
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            FamilySpec::Hermitian { seed, .. }
            | FamilySpec::NonnegPrimitive { seed, .. }
            | FamilySpec::Brauer { seed, .. } => Some(*seed),
            FamilySpec::Pagerank { seed, .. } | FamilySpec::Circulant { seed, .. } => *seed,
            FamilySpec::ToeplitzTridiag { .. } => None,
        }
    }
}

fn required<T>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::argument(format!("missing `{what}`")))
}

/// `(n, max_error, pass)` for one family, or an argument error for a violated precondition.
fn run(spec: &FamilySpec, tol: &ToleranceConfig, cfg: &TrackerConfig) -> Result<(usize, f64, bool)> {
    match spec {
        FamilySpec::Hermitian { n, seed, waypoints } => {
            let path = random_hermitian_loop(*n, *waypoints, *seed)?;
            let report = monodromy(&path, cfg)?;
            let start = report.bundle.start();
            let err = report
                .permutation
                .mapping
                .iter()
                .enumerate()
                .map(|(i, &j)| (start[j] - start[i]).norm())
                .fold(0.0, f64::max);
            Ok((*n, err, report.permutation.value_preserving))
        }
        FamilySpec::NonnegPrimitive { n, seed, generators, resolution } => {
            let mut rng = SeededRng::new(*seed);
            let gens = (0..*generators).map(|_| rng.matrix(RandomKind::Positive, *n)).collect();
            let report = perron_check(&MatrixHull::new(gens)?, *resolution, tol, cfg)?;
            Ok((*n, 0.0, report.pass))
        }
        FamilySpec::Brauer { n, seed } => {
            let mut rng = SeededRng::new(*seed);
            let a = rng.matrix(RandomKind::Ginibre, *n);
            let v = rng.complex_vec(*n);
            let l1 = eigenvalues(&a)?[0];
            let x = eigenvector(&a, l1)?;
            let (b, predicted) = brauer_perturb(&a, &x, &v)?;
            let err = multiset_distance(&eigenvalues(&b)?, &predicted);
            Ok((*n, err, err <= ORACLE_TOL))
        }
        FamilySpec::Pagerank { n, seed, s, v, alphas } => {
            let (s, v) = match (s, v) {
                (Some(s), Some(v)) => {
                    let dim = s.len();
                    let flat: Vec<f64> = s.iter().flatten().copied().collect();
                    if flat.len() != dim * dim {
                        return Err(Error::argument("`s` must be square"));
                    }
                    (ComplexMatrix::from_real_rows(dim, &flat)?, v.clone())
                }
                (None, None) => {
                    let n = required(*n, "n")?;
                    let mut rng = SeededRng::new(required(*seed, "seed")?);
                    let s = rng.matrix(RandomKind::RowStochastic, n);
                    (s, rng.probability_vector(n))
                }
                _ => return Err(Error::argument("give both `s` and `v`, or neither")),
            };
            let pr = pagerank_hull(&s, &v)?;
            let count = (*alphas).max(2);
            let mut err = 0.0f64;
            for i in 0..count {
                let alpha = i as f64 / (count - 1) as f64;
                let got = eigenvalues(&pr.matrix(alpha)?)?;
                err = err.max(multiset_distance(&got, &pr.predicted_spectrum(alpha)));
            }
            Ok((s.n(), err, err <= ORACLE_TOL))
        }
        FamilySpec::ToeplitzTridiag { n, a, b, c } => {
            if *n == 0 {
                return Err(Error::argument("n must be at least 1"));
            }
            let got = eigenvalues(&toeplitz_tridiag(*n, *a, *b, *c))?;
            let err = multiset_distance(&got, &toeplitz_spectrum(*n, *a, *b, *c));
            Ok((*n, err, err <= ORACLE_TOL))
        }
        FamilySpec::Circulant { first_row, n, seed } => {
            let row = match first_row {
                Some(r) => r.clone(),
                None => SeededRng::new(required(*seed, "seed")?).complex_vec(required(*n, "n")?),
            };
            if row.is_empty() {
                return Err(Error::argument("first_row must not be empty"));
            }
            let got = eigenvalues(&circulant(&row))?;
            let err = multiset_distance(&got, &circulant_spectrum(&row));
            Ok((row.len(), err, err <= ORACLE_TOL))
        }
    }
}

/// Builds the family and compares it with its closed form. Violated input
/// preconditions give a failing result with a message; numeric failures are errors.
pub fn verify(spec: &FamilySpec, tol: &ToleranceConfig, cfg: &TrackerConfig) -> Result<VerifyResult> {
    let declared_n = match spec {
        FamilySpec::Hermitian { n, .. }
        | FamilySpec::NonnegPrimitive { n, .. }
        | FamilySpec::Brauer { n, .. }
        | FamilySpec::ToeplitzTridiag { n, .. } => *n,
        FamilySpec::Pagerank { n, s, .. } => s.as_ref().map_or(n.unwrap_or(0), Vec::len),
        FamilySpec::Circulant { first_row, n, .. } => first_row.as_ref().map_or(n.unwrap_or(0), Vec::len),
    };
    let base = VerifyResult {
        family: spec.name().to_string(),
        n: declared_n,
        seed: spec.seed(),
        max_error: f64::NAN,
        pass: false,
        message: None,
    };
    match run(spec, tol, cfg) {
        Ok((n, max_error, pass)) => Ok(VerifyResult {
            n,
            max_error,
            pass,
            ..base
        }),
        Err(Error::Argument(msg)) => Ok(VerifyResult {
            message: Some(format!("precondition failed: {msg}")),
            ..base
        }),
        Err(e) => Err(e),
    }
}

/// Parses a family spec.
pub fn parse_spec(text: &str) -> Result<FamilySpec> {
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("family spec: {e}")))
}
