#![allow(dead_code)]

pub mod closed_forms;

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;
use ndarray::Array2;
use num_complex::Complex64;
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ptwell::{make_parity, permuted_view, CouplingMatrix, CouplingPattern, Permutation};

pub type Partition = BTreeSet<Vec<(usize, usize)>>;

/// A reference coupling matrix, one string of whitespace-separated labels per row.
pub struct Fixture {
    pub name: &'static str,
    pub k: usize,
    pub ls: &'static [usize],
    pub rows: &'static [&'static str],
}

pub const FIXTURES: &[Fixture] = &[
    Fixture {
        name: "two channels",
        k: 2,
        ls: &[1],
        rows: &["Z Y", "X Z"],
    },
    Fixture {
        name: "three channels",
        k: 3,
        ls: &[1, 2],
        rows: &["Z X X", "X Z X", "X X Z"],
    },
    Fixture {
        name: "four channels",
        k: 4,
        ls: &[1, 3],
        rows: &["Z U D U", "L Z L D", "D U Z U", "L D L Z"],
    },
    Fixture {
        name: "four channels, regrouped",
        k: 4,
        ls: &[1, 3],
        rows: &["Z D U U", "D Z U U", "L L Z D", "L L D Z"],
    },
    Fixture {
        name: "five channels",
        k: 5,
        ls: &[1, 2, 3, 4],
        rows: &["Z X D D X", "X Z X D D", "D X Z X D", "D D X Z X", "X D D X Z"],
    },
    Fixture {
        name: "six channels, odd shift",
        k: 6,
        ls: &[1, 5],
        rows: &[
            "Z Y G B F B",
            "X Z C F C G",
            "F B Z Y G B",
            "C G X Z C F",
            "G B F B Z Y",
            "C F C G X Z",
        ],
    },
    Fixture {
        name: "six channels, shift two",
        k: 6,
        ls: &[2, 4],
        rows: &[
            "Z X X C D G",
            "X Z X G C D",
            "X X Z D G C",
            "C G D A B B",
            "D C G B A B",
            "G D C B B A",
        ],
    },
    Fixture {
        name: "seven channels",
        k: 7,
        ls: &[1, 2, 3, 4, 5, 6],
        rows: &[
            "Z X Y D D Y X",
            "X Z X Y D D Y",
            "Y X Z X Y D D",
            "D Y X Z X Y D",
            "D D Y X Z X Y",
            "Y D D Y X Z X",
            "X Y D D Y X Z",
        ],
    },
];

pub fn fixture(name: &str) -> &'static Fixture {
    FIXTURES.iter().find(|f| f.name == name).expect("known fixture")
}

impl Fixture {
    pub fn grid(&self) -> Vec<Vec<&'static str>> {
        self.rows.iter().map(|r| r.split_whitespace().collect()).collect()
    }

    pub fn labels(&self) -> BTreeSet<&'static str> {
        self.grid().into_iter().flatten().collect()
    }

    pub fn partition(&self) -> Partition {
        let mut groups: BTreeMap<&str, Vec<(usize, usize)>> = BTreeMap::new();
        for (i, row) in self.grid().iter().enumerate() {
            for (j, label) in row.iter().enumerate() {
                groups.entry(label).or_default().push((i, j));
            }
        }
        groups.into_values().collect()
    }

    /// The reference matrix filled in from `values`.
    pub fn matrix(&self, values: &BTreeMap<&str, f64>) -> CouplingMatrix {
        let grid = self.grid();
        let a = Array2::from_shape_fn((self.k, self.k), |(i, j)| values[grid[i][j]]);
        CouplingMatrix::new(a).unwrap()
    }

    pub fn random_values(&self, rng: &mut ChaCha8Rng, range: f64) -> BTreeMap<&'static str, f64> {
        self.labels()
            .into_iter()
            .map(|l| (l, rng.random_range(-range..range)))
            .collect()
    }
}

/// A channel relabelling carrying `pattern` onto `target`, by exhaustive search.
pub fn find_relabelling(pattern: &CouplingPattern, target: &Partition) -> Option<Permutation> {
    let k = pattern.k();
    (0..k).permutations(k).find_map(|images| {
        let perm = Permutation::from_images(images).unwrap();
        let moved = permuted_view(pattern, &perm).unwrap();
        (moved.partition() == *target).then_some(perm)
    })
}

fn rational_rank(mut m: Vec<Vec<Rational64>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| m[r][c] != Rational64::from_integer(0)) else {
            continue;
        };
        m.swap(rank, p);
        let pivot = m[rank][c];
        for r in 0..m.len() {
            if r != rank && m[r][c] != Rational64::from_integer(0) {
                let f = m[r][c] / pivot;
                for cc in c..cols {
                    let v = m[rank][cc];
                    m[r][cc] -= f * v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Dimension of `{A : A = r^T A^T r}` by exact elimination on the linear map
/// `A -> A - r^T A^T r`, built column by column from the unit matrices.
pub fn rational_nullity(k: usize, l: usize) -> usize {
    let r: Vec<Vec<i64>> = make_parity(k, l)
        .unwrap()
        .matrix()
        .into_iter()
        .map(|row| row.into_iter().map(i64::from).collect())
        .collect();
    let n = k * k;
    let mut map = vec![vec![Rational64::from_integer(0); n]; n];
    for p in 0..n {
        let mut e = vec![vec![0i64; k]; k];
        e[p / k][p % k] = 1;
        // r^T e^T r
        let mut image = vec![vec![0i64; k]; k];
        for i in 0..k {
            for j in 0..k {
                let mut acc = 0;
                for a in 0..k {
                    for b in 0..k {
                        acc += r[a][i] * e[b][a] * r[b][j];
                    }
                }
                image[i][j] = acc;
            }
        }
        for q in 0..n {
            map[q][p] = Rational64::from_integer(e[q / k][q % k] - image[q / k][q % k]);
        }
    }
    n - rational_rank(map)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_params(pattern: &CouplingPattern, rng: &mut ChaCha8Rng, range: f64) -> BTreeMap<String, f64> {
    pattern
        .labels()
        .iter()
        .map(|l| (l.clone(), rng.random_range(-range..range)))
        .collect()
}

pub fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Largest distance in a greedy nearest pairing of two multisets.
pub fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multisets differ in size");
    let mut left: Vec<Complex64> = b.to_vec();
    let mut worst: f64 = 0.0;
    for x in a {
        let (i, d) = left
            .iter()
            .enumerate()
            .map(|(i, y)| (i, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        worst = worst.max(d);
        left.swap_remove(i);
    }
    worst
}

/// Raw LAPACK eigenvalues of the coupling matrix.
pub fn numeric_charges(a: &CouplingMatrix) -> Vec<Complex64> {
    ptwell::linalg::eig_real(a.entries()).unwrap().0.to_vec()
}

pub fn csqrt(x: f64) -> Complex64 {
    Complex64::new(x, 0.0).sqrt()
}

pub fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}
