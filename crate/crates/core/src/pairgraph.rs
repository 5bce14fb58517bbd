//! Pairing graphs over eigenpoints of finitely many matrices.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use num_complex::Complex64;
use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{cluster, cluster_threshold, eigenvalues, ComplexMatrix};
use crate::surface::{exceptional_clusters, KComponent, SurfaceSamples};
use crate::track::{segment_pairing, SegmentPairing, TrackerConfig};

/// One distinct eigenvalue of one node matrix.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GraphVertex {
    pub matrix: usize,
    /// Smallest solver slot in the value cluster; names the vertex.
    pub slot: usize,
    pub slots: Vec<usize>,
    pub value: Complex64,
    pub multiplicity: usize,
}

/// Which segment produced an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub a: usize,
    pub b: usize,
    /// The edge comes from paths that met along the segment.
    pub through_collision: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GraphEdge {
    pub u: usize,
    pub v: usize,
    pub provenance: Provenance,
}

#[derive(Clone, Debug, Serialize)]
pub struct PairingGraph {
    pub vertices: Vec<GraphVertex>,
    /// Sorted by `(u, v)` with `u < v`, no duplicates.
    pub edges: Vec<GraphEdge>,
    /// Component of each vertex; components are numbered by first vertex.
    pub component_ids: Vec<usize>,
    #[serde(skip)]
    pub matrices: Vec<ComplexMatrix>,
    /// Display names of the node matrices.
    pub names: Vec<String>,
}

impl PairingGraph {
    pub fn component_count(&self) -> usize {
        self.component_ids.iter().map(|&c| c + 1).max().unwrap_or(0)
    }

    pub fn vertex_of(&self, matrix: usize, slot: usize) -> Option<usize> {
        self.vertices
            .iter()
            .position(|v| v.matrix == matrix && v.slots.contains(&slot))
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.component_count()];
        for (v, &c) in self.component_ids.iter().enumerate() {
            out[c].push(v);
        }
        out
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        adj
    }
}

/// Pairing graph of `matrices`: one vertex per distinct eigenvalue of each
/// matrix, and for every unordered pair the edges induced by segment pairing.
/// Slots whose paths collide on a segment are joined among themselves.
pub fn build_pairing_graph(
    matrices: &[ComplexMatrix],
    names: Option<Vec<String>>,
    cluster_tol: f64,
    cfg: &TrackerConfig,
) -> Result<PairingGraph> {
    if matrices.is_empty() {
        return Err(Error::argument("pairing graph needs at least one matrix"));
    }
    let n = matrices[0].n();
    if matrices.iter().any(|m| m.n() != n) {
        return Err(Error::argument("pairing graph matrices must share a dimension"));
    }
    let spectra: Vec<Vec<Complex64>> = matrices
        .par_iter()
        .map(eigenvalues)
        .collect::<Result<_>>()?;

    let mut vertices = Vec::new();
    let mut vertex_of_slot = vec![vec![0usize; n]; matrices.len()];
    for (m, eigs) in spectra.iter().enumerate() {
        for group in cluster(eigs, cluster_threshold(eigs, cluster_tol)) {
            let value = group.iter().map(|&s| eigs[s]).sum::<Complex64>() / group.len() as f64;
            for &s in &group {
                vertex_of_slot[m][s] = vertices.len();
            }
            vertices.push(GraphVertex {
                matrix: m,
                slot: group[0],
                multiplicity: group.len(),
                slots: group,
                value,
            });
        }
    }

    let pairs: Vec<(usize, usize)> = (0..matrices.len())
        .flat_map(|a| (a + 1..matrices.len()).map(move |b| (a, b)))
        .collect();
    let pairings: Vec<SegmentPairing> = pairs
        .par_iter()
        .map(|&(a, b)| {
            segment_pairing(&matrices[a], &matrices[b], cfg).map_err(|e| Error::AtPair {
                a,
                b,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let mut edges: BTreeMap<(usize, usize), Provenance> = BTreeMap::new();
    let mut add = |x: usize, y: usize, prov: Provenance| {
        if x != y {
            edges.entry((x.min(y), x.max(y))).or_insert(prov);
        }
    };
    for (&(a, b), p) in pairs.iter().zip(&pairings) {
        let mut collided = vec![false; n];
        for cols in p.collided_slots() {
            for &c in &cols {
                collided[c] = true;
            }
            for w in cols.windows(2) {
                let prov = Provenance {
                    a,
                    b,
                    through_collision: true,
                };
                add(vertex_of_slot[a][w[0]], vertex_of_slot[a][w[1]], prov);
            }
        }
        for (i, &j) in p.mapping.iter().enumerate() {
            let prov = Provenance {
                a,
                b,
                through_collision: collided[i],
            };
            add(vertex_of_slot[a][i], vertex_of_slot[b][j], prov);
        }
    }
    let edges: Vec<GraphEdge> = edges
        .into_iter()
        .map(|((u, v), provenance)| GraphEdge { u, v, provenance })
        .collect();

    let mut uf = UnionFind::new(vertices.len());
    for e in &edges {
        uf.union(e.u, e.v);
    }
    let mut id_of_root = vec![usize::MAX; vertices.len()];
    let mut next = 0;
    let component_ids = (0..vertices.len())
        .map(|v| {
            let r = uf.find(v);
            if id_of_root[r] == usize::MAX {
                id_of_root[r] = next;
                next += 1;
            }
            id_of_root[r]
        })
        .collect();
    let names = names.unwrap_or_else(|| (0..matrices.len()).map(|i| format!("m{i}")).collect());
    Ok(PairingGraph {
        vertices,
        edges,
        component_ids,
        matrices: matrices.to_vec(),
        names,
    })
}

/// Pairing graph over the hull generators plus one representative per
/// exceptional cluster of the scan.
pub fn principal_graph(scan: &SurfaceSamples, cfg: &TrackerConfig) -> Result<PairingGraph> {
    let hull = &scan.hull;
    let mut matrices = hull.generators().to_vec();
    let mut names: Vec<String> = match hull.labels() {
        Some(l) => l.to_vec(),
        None => (1..=hull.k()).map(|i| format!("A{i}")).collect(),
    };
    for (i, c) in exceptional_clusters(scan).iter().enumerate() {
        matrices.push(scan.matrix(c.representative));
        names.push(format!("U{}", i + 1));
    }
    build_pairing_graph(&matrices, Some(names), scan.tol.cluster_tol, cfg)
}

/// Other distinct eigenvalues of the vertex's matrix lying in its component.
pub fn ord(g: &PairingGraph, vertex: usize) -> usize {
    let v = &g.vertices[vertex];
    let c = g.component_ids[vertex];
    g.vertices
        .iter()
        .zip(&g.component_ids)
        .filter(|(w, &cw)| cw == c && w.matrix == v.matrix)
        .count()
        - 1
}

/// [`ord`] over surface components: distinct values (up to `cluster_tol`) of
/// the sample that share the component of `(sample, slot)`, minus one.
pub fn ord_in_components(
    scan: &SurfaceSamples,
    components: &[KComponent],
    sample: usize,
    slot: usize,
) -> Option<usize> {
    let comp = components
        .iter()
        .find(|c| c.members.contains(&(sample, slot)))?;
    let slots: Vec<usize> = comp.slots_at(sample).collect();
    let vals: Vec<Complex64> = slots.iter().map(|&s| scan.samples[sample].eigenvalues[s]).collect();
    let all = &scan.samples[sample].eigenvalues;
    let distinct = cluster(&vals, cluster_threshold(all, scan.tol.cluster_tol)).len();
    Some(distinct - 1)
}

/// Longest shortest path within each component, by component id.
pub fn diameter(g: &PairingGraph) -> Vec<usize> {
    let adj = g.adjacency();
    g.components()
        .par_iter()
        .map(|members| {
            members
                .iter()
                .map(|&s| {
                    let mut dist = vec![usize::MAX; adj.len()];
                    dist[s] = 0;
                    let mut queue = VecDeque::from([s]);
                    let mut far = 0;
                    while let Some(x) = queue.pop_front() {
                        far = far.max(dist[x]);
                        for &y in &adj[x] {
                            if dist[y] == usize::MAX {
                                dist[y] = dist[x] + 1;
                                queue.push_back(y);
                            }
                        }
                    }
                    far
                })
                .max()
                .unwrap_or(0)
        })
        .collect()
}

/// Four significant digits, plain notation for moderate magnitudes.
fn sig4(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    // round first so 0.99999 reads 1.000, not 1.0000
    let x: f64 = format!("{x:.3e}").parse().expect("float round-trips");
    let mag = x.abs().log10().floor() as i32;
    if !(-4..6).contains(&mag) {
        return format!("{x:.3e}");
    }
    let decimals = (3 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

/// `re+imi` with an explicit sign on the imaginary part.
pub fn format_complex(z: Complex64) -> String {
    // fold negative zero and sub-display noise into plain zero
    let clean = |x: f64| if x.abs() < 5e-13 { 0.0 } else { x };
    let (re, im) = (clean(z.re), clean(z.im));
    let sign = if im < 0.0 { '-' } else { '+' };
    format!("{}{}{}i", sig4(re), sign, sig4(im.abs()))
}

fn vertex_name(v: &GraphVertex) -> String {
    format!("m{}_s{}", v.matrix, v.slot)
}

/// Graphviz text for the graph: components as `cluster_<id>` subgraphs, vertices
/// and edges in index order, so equal graphs give equal bytes.
pub fn export_dot(g: &PairingGraph) -> String {
    if g.vertices.is_empty() {
        return "graph ES { }\n".to_string();
    }
    let mut out = String::from("graph ES {\n");
    for (id, members) in g.components().iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{id} {{");
        for &v in members {
            let vx = &g.vertices[v];
            let _ = write!(out, "    {} [label=\"{}\"", vertex_name(vx), format_complex(vx.value));
            if vx.multiplicity > 1 {
                let _ = write!(out, ", comment=\"mult={}\"", vx.multiplicity);
            }
            out.push_str("];\n");
        }
        out.push_str("  }\n");
    }
    for e in &g.edges {
        let _ = writeln!(
            out,
            "  {} -- {};",
            vertex_name(&g.vertices[e.u]),
            vertex_name(&g.vertices[e.v])
        );
    }
    out.push_str("}\n");
    out
}

#[derive(Serialize)]
struct AdjacencyNode<'a> {
    id: String,
    matrix: usize,
    name: &'a str,
    slots: &'a [usize],
    re: f64,
    im: f64,
    multiplicity: usize,
    component: usize,
}

#[derive(Serialize)]
struct Adjacency<'a> {
    nodes: Vec<AdjacencyNode<'a>>,
    edges: Vec<[usize; 2]>,
}

/// `{"nodes": [...], "edges": [[i, j], ...]}`.
pub fn adjacency_json(g: &PairingGraph) -> serde_json::Value {
    let adj = Adjacency {
        nodes: g
            .vertices
            .iter()
            .zip(&g.component_ids)
            .map(|(v, &c)| AdjacencyNode {
                id: vertex_name(v),
                matrix: v.matrix,
                name: &g.names[v.matrix],
                slots: &v.slots,
                re: v.value.re,
                im: v.value.im,
                multiplicity: v.multiplicity,
                component: c,
            })
            .collect(),
        edges: g.edges.iter().map(|e| [e.u, e.v]).collect(),
    };
    serde_json::to_value(adj).expect("adjacency serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(ms: &[ComplexMatrix]) -> PairingGraph {
        build_pairing_graph(ms, None, 1e-7, &TrackerConfig::default()).unwrap()
    }

    #[test]
    fn single_matrix_has_isolated_vertices() {
        let g = graph(&[ComplexMatrix::diag_real(&[1.0, 2.0, 3.0])]);
        assert_eq!(g.vertices.len(), 3);
        assert!(g.edges.is_empty());
        assert_eq!(diameter(&g), vec![0, 0, 0]);
    }

    #[test]
    fn diagonal_pair_is_a_matching() {
        let g = graph(&[ComplexMatrix::diag_real(&[1.0, 2.0]), ComplexMatrix::diag_real(&[3.0, 4.0])]);
        assert_eq!(g.edges.len(), 2);
        for e in &g.edges {
            let (a, b) = (&g.vertices[e.u], &g.vertices[e.v]);
            assert!((b.value - a.value - 2.0).norm() < 1e-12);
        }
        assert_eq!(diameter(&g), vec![1, 1]);
        assert_eq!(ord(&g, 0), 0);
    }

    #[test]
    fn repeated_eigenvalue_is_one_vertex() {
        let g = graph(&[ComplexMatrix::diag_real(&[2.0, 2.0, 1.0])]);
        assert_eq!(g.vertices.len(), 2);
        assert_eq!(g.vertices[0].multiplicity, 2);
        assert!(export_dot(&g).contains("comment=\"mult=2\""));
    }

    #[test]
    fn dot_format() {
        let g = graph(&[ComplexMatrix::diag_real(&[1.0]), ComplexMatrix::diag_real(&[-2.5])]);
        let dot = export_dot(&g);
        assert!(dot.contains("m0_s0 -- m1_s0;"), "{dot}");
        assert!(dot.contains("label=\"1.000+0i\""), "{dot}");
        assert!(dot.contains("label=\"-2.500+0i\""), "{dot}");
        assert_eq!(dot, export_dot(&g));
    }

    #[test]
    fn complex_labels() {
        assert_eq!(format_complex(Complex64::new(0.5, -1.0)), "0.5000-1.000i");
        assert_eq!(format_complex(Complex64::new(-0.0, 12.3456)), "0+12.35i");
        assert_eq!(format_complex(Complex64::new(1e7, 1e-6)), "1.000e7+1.000e-6i");
    }

    #[test]
    fn empty_graph_dot() {
        let g = PairingGraph {
            vertices: vec![],
            edges: vec![],
            component_ids: vec![],
            matrices: vec![],
            names: vec![],
        };
        assert_eq!(export_dot(&g), "graph ES { }\n");
    }

    #[test]
    fn collision_joins_square_root_branches() {
        let g = graph(&[
            ComplexMatrix::diag_real(&[1.0, -1.0]),
            ComplexMatrix::from_real_rows(2, &[0.0, 1.0, -1.0, 0.0]).unwrap(),
        ]);
        assert_eq!(g.component_count(), 1);
        assert!(g.edges.iter().any(|e| e.provenance.through_collision));
        let json = adjacency_json(&g);
        assert_eq!(json["nodes"].as_array().unwrap().len(), 4);
    }
}
