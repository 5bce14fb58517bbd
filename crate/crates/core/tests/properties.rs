use proptest::prelude::*;

use eigsurf::families::{multiset_distance, RandomKind, SeededRng};
use eigsurf::io::{matrix_json, parse_matrix, write_bundle_csv};
use eigsurf::linalg::{
    char_poly, convex_combine, discriminant, discriminant_resultant, eigenvalues, lex_compare,
    multiplicity_list_of, root_discriminant, spectral_radius, BarycentricPoint, ComplexMatrix,
    MatrixHull, MultiplicityList,
};
use eigsurf::track::{
    monodromy, scaling_pairing_invariance_check, segment_pairing, track, MatrixPath, TrackerConfig,
};
use eigsurf::Complex64;

fn ginibre(seed: u64, n: usize) -> ComplexMatrix {
    SeededRng::new(seed).matrix(RandomKind::Ginibre, n)
}

fn quick() -> TrackerConfig {
    TrackerConfig {
        initial_steps: 16,
        ..TrackerConfig::default()
    }
}

fn trace(a: &ComplexMatrix) -> Complex64 {
    (0..a.n()).map(|i| a[(i, i)]).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigenvalues_sum_to_trace(seed in any::<u64>(), n in 1usize..8) {
        let a = ginibre(seed, n);
        let ev = eigenvalues(&a).unwrap();
        prop_assert_eq!(ev.len(), n);
        let sum: Complex64 = ev.iter().sum();
        prop_assert!((sum - trace(&a)).norm() < 1e-10 * (1.0 + a.frobenius_norm()));
    }

    #[test]
    fn eigenvalues_are_roots_of_char_poly(seed in any::<u64>(), n in 1usize..7) {
        let a = ginibre(seed, n);
        let p = char_poly(&a);
        let roots = p.roots().unwrap();
        prop_assert!(multiset_distance(&roots, &eigenvalues(&a).unwrap()) < 1e-7);
    }

    #[test]
    fn discriminant_routes_agree(seed in any::<u64>(), n in 2usize..6) {
        let a = ginibre(seed, n);
        let p = char_poly(&a);
        let d_roots = root_discriminant(&eigenvalues(&a).unwrap());
        let scale = d_roots.norm().max(1e-300);
        prop_assert!((discriminant(&p).unwrap() - d_roots).norm() / scale < 1e-6);
        prop_assert!((discriminant_resultant(&p).unwrap() - d_roots).norm() / scale < 1e-6);
    }

    #[test]
    fn hull_eigenvalues_bounded_by_vertex_norms(seed in any::<u64>(), k in 1usize..4, n in 1usize..5) {
        let mut rng = SeededRng::new(seed);
        let hull = MatrixHull::new((0..k).map(|_| rng.matrix(RandomKind::Ginibre, n)).collect()).unwrap();
        let alpha = BarycentricPoint::new(rng.probability_vector(k)).unwrap();
        let ev = eigenvalues(&convex_combine(&hull, &alpha).unwrap()).unwrap();
        prop_assert!(spectral_radius(&ev) <= hull.max_vertex_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn multiplicity_list_weights_sum_to_n(vals in proptest::collection::vec(-2i32..3, 1..9)) {
        let v: Vec<Complex64> = vals.iter().map(|&x| Complex64::new(x as f64, 0.0)).collect();
        let l = multiplicity_list_of(&v, 1e-9);
        let total: usize = (1..=l.n()).map(|i| i * l.count_of(i)).sum();
        prop_assert_eq!(total, v.len());
        // the simple list is the minimum of the order
        let simple = MultiplicityList::simple(v.len());
        prop_assert_ne!(lex_compare(&l, &simple).unwrap(), std::cmp::Ordering::Less);
    }

    #[test]
    fn lex_compare_is_antisymmetric(
        a in proptest::collection::vec(1usize..4, 1..5),
        b in proptest::collection::vec(1usize..4, 1..5),
    ) {
        // cluster sizes of two spectra of a common dimension
        let n = a.iter().sum::<usize>().max(b.iter().sum());
        let pad = |mut v: Vec<usize>| {
            let missing = n - v.iter().sum::<usize>();
            v.extend(std::iter::repeat_n(1, missing));
            v
        };
        let x = MultiplicityList::from_cluster_sizes(n, pad(a));
        let y = MultiplicityList::from_cluster_sizes(n, pad(b));
        prop_assert_eq!(lex_compare(&x, &y).unwrap(), lex_compare(&y, &x).unwrap().reverse());
    }

    #[test]
    fn tracked_ends_are_the_endpoint_spectra(seed in any::<u64>(), n in 1usize..5) {
        let (a, b) = (ginibre(seed, n), ginibre(seed ^ 0xabcdef, n));
        let bundle = track(&MatrixPath::segment(a.clone(), b.clone()).unwrap(), &quick()).unwrap();
        prop_assert_eq!(bundle.start(), &eigenvalues(&a).unwrap()[..]);
        prop_assert_eq!(bundle.end_eigenvalues(), eigenvalues(&b).unwrap());
        let mut seen = bundle.end_slots.clone();
        seen.sort_unstable();
        prop_assert_eq!(seen, (0..n).collect::<Vec<_>>());
        prop_assert!(bundle.parameters.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn reversed_segment_inverts_pairing(seed in any::<u64>(), n in 1usize..5) {
        let (a, b) = (ginibre(seed, n), ginibre(seed.wrapping_add(1), n));
        let fwd = segment_pairing(&a, &b, &quick()).unwrap();
        let back = segment_pairing(&b, &a, &quick()).unwrap();
        prop_assume!(fwd.collisions.is_empty() && back.collisions.is_empty());
        for i in 0..n {
            prop_assert_eq!(back.mapping[fwd.mapping[i]], i);
        }
    }

    #[test]
    fn concatenated_segments_compose(seed in any::<u64>(), n in 1usize..4) {
        let (a, b, c) = (ginibre(seed, n), ginibre(seed ^ 1, n), ginibre(seed ^ 2, n));
        let ab = segment_pairing(&a, &b, &quick()).unwrap();
        let bc = segment_pairing(&b, &c, &quick()).unwrap();
        prop_assume!(ab.collisions.is_empty() && bc.collisions.is_empty());
        let whole = track(&MatrixPath::polygonal(vec![a, b, c], false).unwrap(), &quick()).unwrap();
        prop_assume!(whole.collisions.is_empty());
        for i in 0..n {
            prop_assert_eq!(whole.end_slots[i], bc.mapping[ab.mapping[i]]);
        }
    }

    #[test]
    fn closed_loop_traversed_back_inverts_monodromy(seed in any::<u64>(), n in 2usize..4) {
        let w: Vec<ComplexMatrix> = (0..3).map(|i| ginibre(seed ^ i, n)).collect();
        let path = MatrixPath::closed_polygon(w).unwrap();
        let fwd = monodromy(&path, &quick()).unwrap();
        let back = monodromy(&path.reversed(), &quick()).unwrap();
        prop_assume!(fwd.collisions().is_empty() && back.collisions().is_empty());
        prop_assert_eq!(back.permutation.mapping, fwd.permutation.inverse());
    }

    #[test]
    fn scaling_keeps_pairing(seed in any::<u64>(), n in 1usize..4, c in 0.1f64..10.0) {
        let path = MatrixPath::segment(ginibre(seed, n), ginibre(seed ^ 7, n)).unwrap();
        let rep = scaling_pairing_invariance_check(&path, c, &quick()).unwrap();
        prop_assert!(rep.pass, "{:?}", rep);
    }

    #[test]
    fn matrix_json_round_trips(seed in any::<u64>(), n in 1usize..5) {
        let a = ginibre(seed, n);
        let back = parse_matrix(&matrix_json(&a).to_string()).unwrap();
        prop_assert_eq!(a, back);
    }

    #[test]
    fn bundle_csv_round_trips(seed in any::<u64>(), n in 1usize..4) {
        let path = MatrixPath::segment(ginibre(seed, n), ginibre(seed ^ 3, n)).unwrap();
        let bundle = track(&path, &quick()).unwrap();
        let mut buf = Vec::new();
        write_bundle_csv(&mut buf, &bundle).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows: Vec<Vec<f64>> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
            .collect();
        prop_assert_eq!(rows.len(), bundle.parameters.len() * n);
        for (r, row) in rows.iter().enumerate() {
            let (i, j) = (r / n, r % n);
            prop_assert_eq!(row[0], bundle.parameters[i]);
            prop_assert_eq!(row[1] as usize, j);
            prop_assert_eq!(Complex64::new(row[2], row[3]), bundle.values[i][j]);
        }
    }
}
