use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex64;
use petgraph::unionfind::UnionFind;

use super::eigen::{eigenvalues, spectral_radius};
use super::ComplexMatrix;
use crate::error::{Error, Result};

/// `(a_n, ..., a_1)`: `a_i` distinct eigenvalues of algebraic multiplicity `i`.
///
/// Stored with `a_n` first so the derived ordering is the lexicographic one.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiplicityList(Vec<usize>);

impl MultiplicityList {
    /// `counts[0]` is `a_n`; rejects lists with `Σ i a_i != n`.
    pub fn new(counts: Vec<usize>) -> Result<Self> {
        let n = counts.len();
        let total: usize = counts.iter().enumerate().map(|(idx, a)| (n - idx) * a).sum();
        if total != n {
            return Err(Error::argument(format!(
                "multiplicity list {counts:?} accounts for {total} eigenvalues, expected {n}"
            )));
        }
        Ok(Self(counts))
    }

    pub fn from_cluster_sizes(n: usize, sizes: impl IntoIterator<Item = usize>) -> Self {
        let mut counts = vec![0; n];
        for s in sizes {
            counts[n - s] += 1;
        }
        Self(counts)
    }

    /// `(0, ..., 0, n)`, the list of a simple spectrum.
    pub fn simple(n: usize) -> Self {
        let mut counts = vec![0; n];
        counts[n - 1] = n;
        Self(counts)
    }

    pub fn counts(&self) -> &[usize] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    /// Number of distinct eigenvalues with multiplicity `i` (1-based).
    pub fn count_of(&self, multiplicity: usize) -> usize {
        self.0[self.0.len() - multiplicity]
    }
}

impl fmt::Display for MultiplicityList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&parts.join("-"))
    }
}

/// Single-linkage groups of values closer than `threshold`; groups and their
/// members are ordered by smallest index.
pub fn cluster(values: &[Complex64], threshold: f64) -> Vec<Vec<usize>> {
    let n = values.len();
    let mut uf = UnionFind::<usize>::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if (values[i] - values[j]).norm() <= threshold {
                uf.union(i, j);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot_of_root = vec![usize::MAX; n];
    for i in 0..n {
        let r = uf.find(i);
        if slot_of_root[r] == usize::MAX {
            slot_of_root[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot_of_root[r]].push(i);
    }
    groups
}

/// Absolute clustering threshold `cluster_tol * max(1, ρ)`.
pub fn cluster_threshold(values: &[Complex64], cluster_tol: f64) -> f64 {
    cluster_tol * spectral_radius(values).max(1.0)
}

pub fn multiplicity_list_of(values: &[Complex64], cluster_tol: f64) -> MultiplicityList {
    let groups = cluster(values, cluster_threshold(values, cluster_tol));
    MultiplicityList::from_cluster_sizes(values.len(), groups.iter().map(Vec::len))
}

pub fn multiplicity_list(a: &ComplexMatrix, cluster_tol: f64) -> Result<MultiplicityList> {
    if cluster_tol <= 0.0 {
        return Err(Error::argument("cluster_tol must be positive"));
    }
    Ok(multiplicity_list_of(&eigenvalues(a)?, cluster_tol))
}

/// Lexicographic comparison from `a_n` downward.
pub fn lex_compare(x: &MultiplicityList, y: &MultiplicityList) -> Result<Ordering> {
    if x.n() != y.n() {
        return Err(Error::argument(format!(
            "multiplicity lists of different length ({} vs {})",
            x.n(),
            y.n()
        )));
    }
    Ok(x.0.cmp(&y.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn list(v: &[usize]) -> MultiplicityList {
        MultiplicityList::new(v.to_vec()).unwrap()
    }

    #[test]
    fn diagonal_examples() {
        let ml = |d: &[f64]| multiplicity_list(&ComplexMatrix::diag_real(d), 1e-7).unwrap();
        assert_eq!(ml(&[2.0, 2.0, 1.0]), list(&[0, 1, 1]));
        assert_eq!(ml(&[3.0, 2.0, 1.0]), list(&[0, 0, 3]));
        assert_eq!(ml(&[1.0, 1.0, 1.0]), list(&[1, 0, 0]));
    }

    #[test]
    fn relative_threshold_survives_scaling() {
        let a = ComplexMatrix::diag_real(&[1e6, 1e6 + 1e-3, 5.0]);
        assert_eq!(multiplicity_list(&a, 1e-7).unwrap(), list(&[0, 1, 1]));
    }

    #[test]
    fn lex_examples() {
        assert_eq!(lex_compare(&list(&[0, 1, 1]), &list(&[0, 0, 3])).unwrap(), Ordering::Greater);
        assert_eq!(lex_compare(&list(&[0, 0, 3]), &list(&[0, 0, 3])).unwrap(), Ordering::Equal);
        assert_eq!(lex_compare(&list(&[1, 0, 0]), &list(&[0, 1, 1])).unwrap(), Ordering::Greater);
        assert!(lex_compare(&list(&[0, 2]), &list(&[0, 0, 3])).is_err());
    }

    #[test]
    fn display_is_dash_joined() {
        assert_eq!(list(&[0, 1, 1]).to_string(), "0-1-1");
    }

    #[test]
    fn inconsistent_counts_rejected() {
        assert!(MultiplicityList::new(vec![1, 1, 1]).is_err());
    }

    fn arb_list(n: usize) -> impl Strategy<Value = MultiplicityList> {
        // a random partition of n, as cluster sizes
        proptest::collection::vec(1..=n, 1..=n).prop_map(move |mut sizes| {
            let mut out = Vec::new();
            let mut left = n;
            for s in sizes.drain(..) {
                if left == 0 {
                    break;
                }
                let s = s.min(left);
                out.push(s);
                left -= s;
            }
            if left > 0 {
                out.push(left);
            }
            MultiplicityList::from_cluster_sizes(n, out)
        })
    }

    proptest! {
        #[test]
        fn weighted_sum_is_n(values in proptest::collection::vec((-3i32..3, -3i32..3), 1..8)) {
            let z: Vec<Complex64> = values.iter().map(|&(a, b)| Complex64::new(a as f64, b as f64)).collect();
            let ml = multiplicity_list_of(&z, 1e-7);
            let n = z.len();
            let total: usize = (1..=n).map(|i| i * ml.count_of(i)).sum();
            prop_assert_eq!(total, n);
        }

        #[test]
        fn lex_is_a_total_order(x in arb_list(6), y in arb_list(6), z in arb_list(6)) {
            let xy = lex_compare(&x, &y).unwrap();
            let yx = lex_compare(&y, &x).unwrap();
            prop_assert_eq!(xy, yx.reverse());
            if xy != Ordering::Greater && lex_compare(&y, &z).unwrap() != Ordering::Greater {
                prop_assert_ne!(lex_compare(&x, &z).unwrap(), Ordering::Greater);
            }
            prop_assert_eq!(xy == Ordering::Equal, x == y);
        }
    }
}
