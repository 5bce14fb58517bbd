//! One PASS/FAIL line per headline criterion; exits nonzero if any fails.

use std::collections::{BTreeSet, VecDeque};
use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;

use eigsurf::families::{
    brauer_perturb, hermitian_weak_transitivity_check, multiset_distance, pagerank_hull,
    random_hermitian_loop, toeplitz_spectrum, toeplitz_tridiag, RandomKind, SeededRng,
};
use eigsurf::linalg::{
    char_poly, convex_combine, discriminant, eigenvalues, eigenvector, root_discriminant,
    BarycentricPoint, ComplexMatrix, MatrixHull,
};
use eigsurf::surface::{component_separation, grid, k_components, scan, KComponent, SurfaceSamples};
use eigsurf::track::{
    deformation_check, monodromy, scaling_pairing_invariance_check, segment_pairing, track,
    GridFn, MatrixPath, TrackerConfig,
};
use eigsurf::{Complex64, Result, ToleranceConfig};

type Verdict = Result<(bool, String)>;
type Criterion = (&'static str, fn() -> Verdict);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn quadrant() -> MatrixHull {
    let gens = [c(1.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0), c(0.0, -1.0)]
        .iter()
        .map(|&z| ComplexMatrix::from_rows(2, &[c(0.0, 0.0), c(1.0, 0.0), z, c(0.0, 0.0)]).unwrap())
        .collect();
    MatrixHull::new(gens).unwrap()
}

fn toeplitz_oracle() -> Verdict {
    let start = Instant::now();
    let cfg = TrackerConfig::default();
    let n = 12;
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let mut rng = SeededRng::new(1000 + seed);
        // b, c positive keep b·c off the square-root branch cut along the segment
        let mut ends = || {
            let a = rng.complex() * 2.0f64.sqrt();
            (a, c(rng.uniform(0.5, 2.0), 0.0), c(rng.uniform(0.5, 2.0), 0.0))
        };
        let (p, q) = (ends(), ends());
        let path = MatrixPath::segment(toeplitz_tridiag(n, p.0, p.1, p.2), toeplitz_tridiag(n, q.0, q.1, q.2))?;
        let bundle = track(&path, &cfg)?;
        let oracle = |x: f64| {
            let l = |u: Complex64, v: Complex64| u + (v - u) * x;
            toeplitz_spectrum(n, l(p.0, q.0), l(p.1, q.1), l(p.2, q.2))
        };
        // column j follows oracle slot slot_of[j]
        let first = oracle(0.0);
        let slot_of: Vec<usize> = bundle
            .start()
            .iter()
            .map(|z| {
                (0..n)
                    .min_by(|&a, &b| (first[a] - z).norm().total_cmp(&(first[b] - z).norm()))
                    .unwrap()
            })
            .collect();
        if slot_of.iter().collect::<BTreeSet<_>>().len() != n {
            return Ok((false, format!("seed {seed}: start slots not distinct")));
        }
        for (x, row) in bundle.parameters.iter().zip(&bundle.values) {
            let want = oracle(*x);
            for (j, z) in row.iter().enumerate() {
                worst = worst.max((z - want[slot_of[j]]).norm());
            }
        }
    }
    let elapsed = start.elapsed();
    Ok((
        worst <= 1e-8 && elapsed <= Duration::from_secs(10),
        format!("max slotwise error {worst:.2e}, {:.2} s", elapsed.as_secs_f64()),
    ))
}

fn pagerank() -> Verdict {
    let mut rng = SeededRng::new(2024);
    let s = rng.matrix(RandomKind::RowStochastic, 10);
    let v = rng.probability_vector(10);
    let ph = pagerank_hull(&s, &v)?;
    let mut worst = 0.0f64;
    for i in 0..=20 {
        let alpha = i as f64 / 20.0;
        let got = eigenvalues(&ph.matrix(alpha)?)?;
        worst = worst.max(multiset_distance(&got, &ph.predicted_spectrum(alpha)));
    }
    let samples = scan(&ph.hull, 20, &ToleranceConfig::default())?;
    let comps = k_components(&samples, &TrackerConfig::default())?;
    let mut ks: Vec<usize> = comps.iter().map(|c| c.k).collect();
    ks.sort_unstable();
    Ok((
        worst <= 1e-8 && ks == [1, 9],
        format!("max spectrum error {worst:.2e}, component sizes {ks:?}"),
    ))
}

fn brauer() -> Verdict {
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let mut rng = SeededRng::new(3000 + seed);
        let a = rng.matrix(RandomKind::Ginibre, 8);
        let lambda = eigenvalues(&a)?[0];
        let x = eigenvector(&a, lambda)?;
        let v = rng.complex_vec(8);
        let (b, predicted) = brauer_perturb(&a, &x, &v)?;
        worst = worst.max(multiset_distance(&eigenvalues(&b)?, &predicted));
    }
    Ok((worst <= 1e-8, format!("max spectrum error {worst:.2e} over 20 cases")))
}

/// The square loop through the quadrant vertices at `x ∈ [0, 1]`.
fn square_alpha(x: f64) -> Vec<f64> {
    let s = (x.rem_euclid(1.0) * 4.0).min(4.0);
    let i = (s.floor() as usize).min(3);
    let t = s - i as f64;
    let mut w = vec![0.0; 4];
    w[i] += 1.0 - t;
    w[(i + 1) % 4] += t;
    w
}

fn quadrant_monodromy() -> Verdict {
    let hull = Arc::new(quadrant());
    let cfg = TrackerConfig::default();
    let verts: Vec<BarycentricPoint> = (0..=4).map(|i| BarycentricPoint::vertex(4, i % 4)).collect();
    let big = monodromy(&MatrixPath::hull_polygonal((*hull).clone(), verts, true)?, &cfg)?;
    let big_ok = big.permutation.mapping == [1, 0] && !big.weakly_transitive;

    // λ² = c along the tracked loop
    let mut value_err = 0.0f64;
    for (x, row) in big.bundle.parameters.iter().zip(&big.bundle.values) {
        let m = convex_combine(&hull, &BarycentricPoint::new(square_alpha(*x))?)?;
        for z in row {
            value_err = value_err.max((z * z - m[(1, 0)]).norm());
        }
    }

    let near: Vec<BarycentricPoint> = (0..=4)
        .map(|i| {
            let mut w: Vec<f64> = square_alpha(i as f64 / 4.0).iter().map(|x| 0.1 * x).collect();
            w[0] += 0.9;
            BarycentricPoint::new(w)
        })
        .collect::<Result<_>>()?;
    let small = monodromy(&MatrixPath::hull_polygonal((*hull).clone(), near, true)?, &cfg)?;
    let small_ok = small.permutation.is_identity();

    // level y shrinks the square toward 0.9·A1 + 0.1·square
    let h = hull.clone();
    let at = move |x: f64, y: f64| {
        let mut w: Vec<f64> = square_alpha(x).iter().map(|a| (1.0 - 0.9 * y) * a).collect();
        w[0] += 0.9 * y;
        w
    };
    let grid_fn: GridFn =
        Arc::new(move |x, y| convex_combine(&h, &BarycentricPoint::new(at(x, y)).unwrap()).unwrap());
    let report = deformation_check(grid_fn.clone(), 2, 9, &cfg)?;
    let mut nearest_c = f64::INFINITY;
    for (y, ev) in report.collisions() {
        nearest_c = nearest_c.min(grid_fn(ev.x_location, *y)[(1, 0)].norm());
    }
    let deform_ok = !report.preserved && nearest_c < 1e-6;
    Ok((
        big_ok && small_ok && deform_ok && value_err <= 1e-8,
        format!(
            "square loop {:?}, small loop {:?}, deformation preserved={} with |c| at collision {nearest_c:.1e}, |λ²-c| {value_err:.1e}",
            big.permutation.mapping, small.permutation.mapping, report.preserved
        ),
    ))
}

fn hermitian_loops() -> Verdict {
    let cfg = TrackerConfig::default();
    let verdicts: Vec<bool> = (0..100u64)
        .into_par_iter()
        .map(|seed| hermitian_weak_transitivity_check(&random_hermitian_loop(6, 4, 5000 + seed)?, &cfg))
        .collect::<Result<_>>()?;
    let good = verdicts.iter().filter(|&&v| v).count();
    Ok((good == 100, format!("{good}/100 loops value preserving")))
}

fn structure_hulls() -> Vec<(&'static str, MatrixHull, usize)> {
    let mut rng = SeededRng::new(77);
    let s = rng.matrix(RandomKind::RowStochastic, 10);
    let v = rng.probability_vector(10);
    let random3 = MatrixHull::new((0..3).map(|_| rng.matrix(RandomKind::Ginibre, 3)).collect()).unwrap();
    vec![
        (
            "diag pair",
            MatrixHull::new(vec![
                ComplexMatrix::diag_real(&[1.0, 2.0]),
                ComplexMatrix::diag_real(&[3.0, 4.0]),
            ])
            .unwrap(),
            10,
        ),
        ("quadrant", quadrant(), 12),
        ("pagerank", pagerank_hull(&s, &v).unwrap().hull, 20),
        ("random k=3 n=3", random3, 8),
    ]
}

fn structure_invariants() -> Verdict {
    let cfg = TrackerConfig::default();
    let mut notes = Vec::new();
    let mut ok = true;
    for (name, hull, res) in structure_hulls() {
        let s = scan(&hull, res, &ToleranceConfig::default())?;
        let comps = k_components(&s, &cfg)?;
        let n = hull.n();
        let total: usize = comps.iter().map(|c| c.k).sum();
        let constant = comps.iter().all(|c| {
            (0..s.samples.len()).all(|i| c.slots_at(i).count() == c.k)
        });
        let eps = component_separation(&comps, &s)
            .iter()
            .map(|x| x.epsilon)
            .fold(f64::INFINITY, f64::min);
        let bound = hull.max_vertex_norm();
        let largest = s
            .samples
            .iter()
            .flat_map(|x| x.eigenvalues.iter().map(|z| z.norm()))
            .fold(0.0, f64::max);
        let pass = total == n && constant && eps > 0.0 && largest <= bound * (1.0 + 1e-12);
        ok &= pass;
        let sep = if comps.len() > 1 { format!("{eps:.2e}") } else { "single component".into() };
        notes.push(format!("{name}: Σk={total}/{n} sep={sep} |λ|max={largest:.3}≤{bound:.3}"));
    }
    Ok((ok, notes.join("; ")))
}

fn discriminant_oracle() -> Verdict {
    let mut worst = 0.0f64;
    for seed in 0..200u64 {
        let n = 2 + (seed % 5) as usize;
        let a = SeededRng::new(7000 + seed).matrix(RandomKind::Ginibre, n);
        let from_poly = discriminant(&char_poly(&a))?;
        let from_roots = root_discriminant(&eigenvalues(&a)?);
        worst = worst.max((from_poly - from_roots).norm() / from_roots.norm());
    }
    Ok((worst <= 1e-6, format!("max relative disagreement {worst:.2e} over 200 matrices")))
}

fn scaling() -> Verdict {
    let cfg = TrackerConfig::default();
    let mut failures = 0;
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let mut rng = SeededRng::new(9000 + seed);
        let n = 2 + (seed % 3) as usize;
        let path = if seed % 2 == 0 {
            MatrixPath::segment(rng.matrix(RandomKind::Ginibre, n), rng.matrix(RandomKind::Ginibre, n))?
        } else {
            MatrixPath::closed_polygon((0..3).map(|_| rng.matrix(RandomKind::Ginibre, n)).collect())?
        };
        for factor in [0.5, 2.0, 7.0] {
            let r = scaling_pairing_invariance_check(&path, factor, &cfg)?;
            worst = worst.max(r.max_value_error);
            if !r.pass {
                failures += 1;
            }
        }
    }
    Ok((
        failures == 0,
        format!("{failures}/60 failures, max relative value error {worst:.2e}"),
    ))
}

/// Nodes reachable within `hops` straight segments between any two lattice
/// points, with equal eigenvalues and colliding slots joined at no cost.
fn exhaustive_partition(s: &SurfaceSamples, hops: usize, cfg: &TrackerConfig) -> Result<Vec<BTreeSet<usize>>> {
    let n = s.n();
    let count = s.samples.len();
    let pairs: Vec<(usize, usize)> = (0..count).flat_map(|a| (a + 1..count).map(move |b| (a, b))).collect();
    let pairings = pairs
        .par_iter()
        .map(|&(a, b)| segment_pairing(&s.matrix(a), &s.matrix(b), cfg))
        .collect::<Result<Vec<_>>>()?;

    // zero-cost merges: value clusters and colliding slots
    let mut local = UnionFind::new(count * n);
    for (i, sample) in s.samples.iter().enumerate() {
        for g in sample.value_clusters(s.tol.cluster_tol) {
            for w in g.windows(2) {
                local.union(i * n + w[0], i * n + w[1]);
            }
        }
    }
    for (&(a, _), p) in pairs.iter().zip(&pairings) {
        for cols in p.collided_slots() {
            for w in cols.windows(2) {
                local.union(a * n + w[0], a * n + w[1]);
            }
        }
    }
    let mut adj = vec![Vec::new(); count * n];
    for (&(a, b), p) in pairs.iter().zip(&pairings) {
        for (i, &j) in p.mapping.iter().enumerate() {
            adj[a * n + i].push(b * n + j);
            adj[b * n + j].push(a * n + i);
        }
    }
    let mut class = vec![Vec::new(); count * n];
    for v in 0..count * n {
        class[local.find(v)].push(v);
    }
    let classmates = |v: usize| class[local.find(v)].clone();

    let mut out = Vec::with_capacity(count * n);
    for start in 0..count * n {
        let mut depth = vec![usize::MAX; count * n];
        let mut queue = VecDeque::new();
        for v in classmates(start) {
            depth[v] = 0;
            queue.push_back(v);
        }
        while let Some(u) = queue.pop_front() {
            if depth[u] == hops {
                continue;
            }
            for &w in &adj[u] {
                for x in classmates(w) {
                    if depth[x] == usize::MAX {
                        depth[x] = depth[u] + 1;
                        queue.push_back(x);
                    }
                }
            }
        }
        out.push((0..count * n).filter(|&v| depth[v] != usize::MAX).collect());
    }
    Ok(out)
}

fn oracle_hulls() -> Vec<(&'static str, MatrixHull)> {
    let sq = |z: Complex64| ComplexMatrix::from_rows(2, &[c(0.0, 0.0), c(1.0, 0.0), z, c(0.0, 0.0)]).unwrap();
    let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    let mut rng = SeededRng::new(4242);
    let mut g = |n: usize| rng.matrix(RandomKind::Ginibre, n);
    vec![
        ("sqrt k=2 n=2", MatrixHull::new(vec![sq(c(1.0, 0.0)), sq(c(-1.0, 0.0))]).unwrap()),
        ("sqrt k=3 n=2", MatrixHull::new(vec![sq(c(1.0, 0.0)), sq(w), sq(w * w)]).unwrap()),
        (
            "diag k=2 n=3",
            MatrixHull::new(vec![
                ComplexMatrix::diag_real(&[1.0, 2.0, 3.0]),
                ComplexMatrix::diag_real(&[4.0, 5.0, 6.0]),
            ])
            .unwrap(),
        ),
        (
            "diag k=3 n=3",
            MatrixHull::new(vec![
                ComplexMatrix::diag_real(&[1.0, 2.0, 3.0]),
                ComplexMatrix::diag_real(&[4.0, 5.0, 6.0]),
                ComplexMatrix::diag_real(&[7.0, 8.0, 9.0]),
            ])
            .unwrap(),
        ),
        ("random k=2 n=2", MatrixHull::new(vec![g(2), g(2)]).unwrap()),
        ("random k=2 n=3", MatrixHull::new(vec![g(3), g(3)]).unwrap()),
        ("random k=3 n=2", MatrixHull::new(vec![g(2), g(2), g(2)]).unwrap()),
        ("random k=3 n=3", MatrixHull::new(vec![g(3), g(3), g(3)]).unwrap()),
    ]
}

fn partition_of(comps: &[KComponent], n: usize) -> Vec<BTreeSet<usize>> {
    let mut sets: Vec<BTreeSet<usize>> = Vec::new();
    let mut of = Vec::new();
    for comp in comps {
        let set: BTreeSet<usize> = comp.members.iter().map(|&(s, slot)| s * n + slot).collect();
        of.push(set);
    }
    let size = of.iter().map(|s| s.len()).sum();
    sets.resize(size, BTreeSet::new());
    for set in &of {
        for &v in set {
            sets[v] = set.clone();
        }
    }
    sets
}

fn oracle_equivalence() -> Verdict {
    let cfg = TrackerConfig::default();
    let mut bad = Vec::new();
    let mut checked = 0;
    for (name, hull) in oracle_hulls() {
        for res in [4, 8] {
            let s = scan(&hull, res, &ToleranceConfig::default())?;
            let comps = k_components(&s, &cfg)?;
            let want = exhaustive_partition(&s, 6, &cfg)?;
            checked += 1;
            if partition_of(&comps, hull.n()) != want {
                bad.push(format!("{name} N={res}"));
            }
        }
    }
    Ok((
        bad.is_empty(),
        if bad.is_empty() {
            format!("{checked} hull/resolution pairs agree")
        } else {
            format!("disagreement on {}", bad.join(", "))
        },
    ))
}

fn core_density() -> Verdict {
    let hull = quadrant();
    let tol = ToleranceConfig::default();
    let f20 = scan(&hull, 20, &tol)?.exceptional_fraction();
    let f40 = scan(&hull, 40, &tol)?.exceptional_fraction();
    let expected = |n: usize| (n / 2 + 1) as f64 / grid::lattice_size(4, n).unwrap() as f64;
    Ok((
        f40 < f20,
        format!(
            "exceptional fraction {f20:.3e} at N=20, {f40:.3e} at N=40 (line α1=α3, α2=α4: {:.3e}, {:.3e})",
            expected(20),
            expected(40)
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("toeplitz-oracle", toeplitz_oracle),
        ("pagerank-spectrum", pagerank),
        ("brauer", brauer),
        ("quadrant-monodromy", quadrant_monodromy),
        ("hermitian-weak-transitivity", hermitian_loops),
        ("structure-invariants", structure_invariants),
        ("discriminant-oracle", discriminant_oracle),
        ("scaling-invariance", scaling),
        ("small-instance-oracle", oracle_equivalence),
        ("core-density", core_density),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let t = Instant::now();
        let (pass, detail) = match check() {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} {name}: {detail} [{:.2} s]",
            if pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
