//! JSON formats for matrices, hulls, paths, eigenvalue lists, and components.

use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{BarycentricPoint, ComplexMatrix, MatrixHull};
use crate::surface::{KComponent, Separation};
use crate::track::MatrixPath;

/// A complex number written as `[re, im]` or as a bare real.
#[derive(Clone, Copy, Debug, PartialEq, Deserialize)]
#[serde(untagged)]
enum JsonComplex {
    Real(f64),
    Pair([f64; 2]),
}

impl From<JsonComplex> for Complex64 {
    fn from(c: JsonComplex) -> Self {
        match c {
            JsonComplex::Real(re) => Complex64::new(re, 0.0),
            JsonComplex::Pair([re, im]) => Complex64::new(re, im),
        }
    }
}

/// Serde adapter: `[re, im]` on output, `[re, im]` or a bare number on input.
pub mod complex {
    use super::*;

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Complex64, D::Error> {
        let c = JsonComplex::deserialize(d)
            .map_err(|_| D::Error::custom("expected a number or an [re, im] pair"))?;
        Ok(c.into())
    }
}

/// [`complex`] for vectors.
pub mod complex_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Complex64>, D::Error> {
        let v = Vec::<JsonComplex>::deserialize(d)
            .map_err(|_| D::Error::custom("expected a list of numbers or [re, im] pairs"))?;
        Ok(v.into_iter().map(Into::into).collect())
    }
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    n: usize,
    #[serde(with = "rows")]
    entries: Vec<Vec<Complex64>>,
}

mod rows {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Vec<Complex64>], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter()
            .map(|row| row.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Vec<Complex64>>, D::Error> {
        let v = Vec::<Vec<JsonComplex>>::deserialize(d).map_err(|_| {
            D::Error::custom("`entries` must be rows of numbers or [re, im] pairs")
        })?;
        Ok(v.into_iter().map(|r| r.into_iter().map(Into::into).collect()).collect())
    }
}

fn matrix_from_json(m: MatrixJson, what: &str) -> Result<ComplexMatrix> {
    if m.entries.len() != m.n {
        return Err(Error::Parse(format!(
            "{what}: `entries` has {} rows but `n` is {}",
            m.entries.len(),
            m.n
        )));
    }
    if let Some((i, row)) = m.entries.iter().enumerate().find(|(_, r)| r.len() != m.n) {
        return Err(Error::Parse(format!(
            "{what}: `entries` row {i} has {} values, expected {}",
            row.len(),
            m.n
        )));
    }
    let flat: Vec<Complex64> = m.entries.into_iter().flatten().collect();
    ComplexMatrix::from_rows(m.n, &flat).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

fn matrix_to_json(a: &ComplexMatrix) -> MatrixJson {
    MatrixJson {
        n: a.n(),
        entries: a.rows(),
    }
}

fn parse_err(what: &str, e: serde_json::Error) -> Error {
    Error::Parse(format!("{what}: {e}"))
}

pub fn parse_matrix(text: &str) -> Result<ComplexMatrix> {
    let m: MatrixJson = serde_json::from_str(text).map_err(|e| parse_err("matrix", e))?;
    matrix_from_json(m, "matrix")
}

pub fn matrix_json(a: &ComplexMatrix) -> serde_json::Value {
    serde_json::to_value(matrix_to_json(a)).expect("matrix serializes")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct HullJson {
    matrices: Vec<MatrixJson>,
    #[serde(default)]
    labels: Option<Vec<String>>,
}

fn hull_from_json(h: HullJson) -> Result<MatrixHull> {
    let gens = h
        .matrices
        .into_iter()
        .enumerate()
        .map(|(i, m)| matrix_from_json(m, &format!("matrices[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    MatrixHull::with_labels(gens, h.labels)
}

pub fn parse_hull(text: &str) -> Result<MatrixHull> {
    let h: HullJson = serde_json::from_str(text).map_err(|e| parse_err("hull", e))?;
    hull_from_json(h)
}

pub fn hull_json(h: &MatrixHull) -> serde_json::Value {
    let mut v = serde_json::json!({
        "matrices": h.generators().iter().map(matrix_to_json).collect::<Vec<_>>(),
    });
    if let Some(labels) = h.labels() {
        v["labels"] = serde_json::json!(labels);
    }
    v
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PathJson {
    #[serde(default)]
    hull: Option<HullJson>,
    waypoints: Vec<serde_json::Value>,
    #[serde(default)]
    closed: bool,
}

/// Path JSON: barycentric waypoints when `hull` is given, matrix waypoints otherwise.
/// A two-waypoint open path without a hull is a plain segment.
pub fn parse_path(text: &str) -> Result<MatrixPath> {
    let p: PathJson = serde_json::from_str(text).map_err(|e| parse_err("path", e))?;
    match p.hull {
        Some(h) => {
            let hull = hull_from_json(h)?;
            let wps = p
                .waypoints
                .into_iter()
                .enumerate()
                .map(|(i, w)| {
                    let weights: Vec<f64> = serde_json::from_value(w)
                        .map_err(|e| Error::Parse(format!("waypoints[{i}]: expected barycentric weights: {e}")))?;
                    BarycentricPoint::new(weights)
                })
                .collect::<Result<Vec<_>>>()?;
            MatrixPath::hull_polygonal(hull, wps, p.closed)
        }
        None => {
            let wps = p
                .waypoints
                .into_iter()
                .enumerate()
                .map(|(i, w)| {
                    let what = format!("waypoints[{i}]");
                    let m: MatrixJson = serde_json::from_value(w).map_err(|e| parse_err(&what, e))?;
                    matrix_from_json(m, &what)
                })
                .collect::<Result<Vec<_>>>()?;
            if wps.len() == 2 && !p.closed {
                let mut it = wps.into_iter();
                MatrixPath::segment(it.next().unwrap(), it.next().unwrap())
            } else {
                MatrixPath::polygonal(wps, p.closed)
            }
        }
    }
}

/// `[[re, im], ...]`.
pub fn eigenvalues_json(values: &[Complex64]) -> String {
    let pairs: Vec<[f64; 2]> = values.iter().map(|z| [z.re, z.im]).collect();
    serde_json::to_string(&pairs).expect("finite eigenvalues serialize")
}

#[derive(Serialize)]
struct ComponentJson {
    id: usize,
    k: usize,
    members: Vec<[usize; 2]>,
}

/// `{"components": [{"id", "k", "members": [[sample, slot], ...]}], "separation": [...]}`.
pub fn components_json(components: &[KComponent], separation: &[Separation]) -> serde_json::Value {
    let comps: Vec<ComponentJson> = components
        .iter()
        .map(|c| ComponentJson {
            id: c.id,
            k: c.k,
            members: c.members.iter().map(|&(s, slot)| [s, slot]).collect(),
        })
        .collect();
    serde_json::json!({ "components": comps, "separation": separation })
}
