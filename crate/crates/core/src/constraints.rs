//! Coupling matrices compatible with a cyclic pseudo-parity.
//!
//! With `r = r_(K,L)` and `sigma` its channel shift, the pseudo-Hermiticity
//! requirement on the real coupling matrix reads `A = r^T A^T r`, which
//! entrywise is `A[i][j] = A[sigma(j)][sigma(i)]`. The map
//! `tau: (i, j) -> (sigma(j), sigma(i))` is a permutation of the `K^2`
//! positions, so the solution space is spanned by the indicator matrices of
//! the cycles of `tau`: one free real parameter per cycle.

use std::collections::BTreeMap;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::parity::{GeneralizedParity, Permutation};

/// Label of the orbit that contains the `(1,1)` entry.
pub const DIAGONAL_LABEL: &str = "Z";

/// The position map `tau` of the constraint, stored over row-major flattened positions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntryPermutation {
    k: usize,
    l: usize,
    map: Vec<usize>,
}

impl EntryPermutation {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// `tau(row, col)`, 0-based.
    pub fn image(&self, row: usize, col: usize) -> (usize, usize) {
        let p = self.map[row * self.k + col];
        (p / self.k, p % self.k)
    }

    pub fn as_flat(&self) -> &[usize] {
        &self.map
    }

    /// Cycles of `tau`, each starting at its smallest flat position, in
    /// increasing order of that position.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.map.len()];
        let mut out = Vec::new();
        for start in 0..self.map.len() {
            if seen[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut p = start;
            while !seen[p] {
                seen[p] = true;
                cycle.push(p);
                p = self.map[p];
            }
            out.push(cycle);
        }
        out
    }
}

/// Builds `tau` for `A = r_(K,K-L) A^T r_(K,L)`.
pub fn entry_permutation(k: usize, l: usize) -> Result<EntryPermutation> {
    let parity = GeneralizedParity::new(k, l)?;
    let sigma = parity.permutation();
    // (r^T M r)[i][j] = M[sigma(i)][sigma(j)], and M = A^T swaps the pair.
    let map = (0..k * k)
        .map(|p| {
            let (i, j) = (p / k, p % k);
            sigma.apply(j) * k + sigma.apply(i)
        })
        .collect();
    Ok(EntryPermutation { k, l, map })
}

/// Partition of the `K x K` positions into equal-coupling orbits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingPattern {
    k: usize,
    l: usize,
    orbits: Vec<Vec<(usize, usize)>>,
    labels: Vec<String>,
}

impl CouplingPattern {
    /// Canonical form: positions sorted row-major inside each orbit, orbits
    /// sorted by their first position, the orbit of `(0,0)` labelled `Z` and
    /// the rest `p1, p2, ...`.
    fn canonical(k: usize, l: usize, mut orbits: Vec<Vec<(usize, usize)>>) -> Self {
        for orbit in &mut orbits {
            orbit.sort_unstable();
        }
        orbits.sort_unstable_by_key(|o| o[0]);
        let labels = (0..orbits.len())
            .map(|i| {
                if i == 0 {
                    DIAGONAL_LABEL.to_string()
                } else {
                    format!("p{i}")
                }
            })
            .collect();
        Self {
            k,
            l,
            orbits,
            labels,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// Orbits as 0-based `(row, col)` lists.
    pub fn orbits(&self) -> &[Vec<(usize, usize)>] {
        &self.orbits
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn dimension(&self) -> usize {
        self.orbits.len()
    }

    pub fn orbit_index(&self, row: usize, col: usize) -> Option<usize> {
        self.orbits
            .iter()
            .position(|o| o.binary_search(&(row, col)).is_ok())
    }

    pub fn label_at(&self, row: usize, col: usize) -> Option<&str> {
        self.orbit_index(row, col).map(|i| self.labels[i].as_str())
    }

    /// `K x K` grid of labels, row-major.
    pub fn label_grid(&self) -> Vec<Vec<&str>> {
        let mut grid = vec![vec![""; self.k]; self.k];
        for (orbit, label) in self.orbits.iter().zip(&self.labels) {
            for &(i, j) in orbit {
                grid[i][j] = label.as_str();
            }
        }
        grid
    }

    /// The 0/1 matrix of a single orbit.
    pub fn indicator(&self, orbit: usize) -> CouplingMatrix {
        let mut m = Array2::zeros((self.k, self.k));
        for &(i, j) in &self.orbits[orbit] {
            m[[i, j]] = 1.0;
        }
        CouplingMatrix { entries: m }
    }

    /// Orbits as a set of position sets, independent of labels and order.
    pub fn partition(&self) -> std::collections::BTreeSet<Vec<(usize, usize)>> {
        self.orbits.iter().cloned().collect()
    }

    pub fn to_record(&self) -> PatternRecord {
        PatternRecord {
            k: self.k,
            l: self.l,
            orbits: self
                .orbits
                .iter()
                .map(|o| o.iter().map(|&(i, j)| [i + 1, j + 1]).collect())
                .collect(),
            labels: self.labels.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_record()).expect("pattern serializes")
    }
}

/// JSON form of a pattern with 1-based rows and columns.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternRecord {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub orbits: Vec<Vec<[usize; 2]>>,
    pub labels: Vec<String>,
}

impl TryFrom<PatternRecord> for CouplingPattern {
    type Error = Error;

    fn try_from(record: PatternRecord) -> Result<Self> {
        let k = record.k;
        if record.labels.len() != record.orbits.len() {
            return Err(invalid("labels and orbits differ in length"));
        }
        let mut covered = vec![false; k * k];
        let mut orbits = Vec::with_capacity(record.orbits.len());
        for orbit in &record.orbits {
            if orbit.is_empty() {
                return Err(invalid("empty orbit"));
            }
            let mut o = Vec::with_capacity(orbit.len());
            for &[r, c] in orbit {
                if r == 0 || c == 0 || r > k || c > k || covered[(r - 1) * k + c - 1] {
                    return Err(invalid(format!("bad or repeated position ({r},{c})")));
                }
                covered[(r - 1) * k + c - 1] = true;
                o.push((r - 1, c - 1));
            }
            o.sort_unstable();
            orbits.push(o);
        }
        if covered.iter().any(|c| !c) {
            return Err(invalid("orbits do not cover every position"));
        }
        Ok(CouplingPattern {
            k,
            l: record.l,
            orbits,
            labels: record.labels,
        })
    }
}

/// Orbit decomposition of the constraint for `(K, L)`.
pub fn solve_pattern(k: usize, l: usize) -> Result<CouplingPattern> {
    let tau = entry_permutation(k, l)?;
    let orbits = tau
        .cycles()
        .into_iter()
        .map(|c| c.into_iter().map(|p| (p / k, p % k)).collect())
        .collect();
    Ok(CouplingPattern::canonical(k, l, orbits))
}

/// Every coupling independent: the reading in which the diagonal
/// pseudo-metric imposes no restriction at all (`K^2` parameters).
pub fn solve_unconstrained(k: usize) -> Result<CouplingPattern> {
    if k == 0 {
        return Err(invalid("channel count K must be at least 1"));
    }
    let orbits = (0..k * k).map(|p| vec![(p / k, p % k)]).collect();
    Ok(CouplingPattern::canonical(k, 0, orbits))
}

pub fn pattern_dimension(k: usize, l: usize) -> Result<usize> {
    Ok(solve_pattern(k, l)?.dimension())
}

/// Relabels the channels: entry `(i, j)` moves to `(perm(i), perm(j))`.
pub fn permuted_view(pattern: &CouplingPattern, perm: &Permutation) -> Result<CouplingPattern> {
    if perm.len() != pattern.k {
        return Err(Error::ChannelMismatch {
            expected: pattern.k,
            found: perm.len(),
        });
    }
    let orbits = pattern
        .orbits
        .iter()
        .map(|o| o.iter().map(|&(i, j)| (perm.apply(i), perm.apply(j))).collect())
        .collect();
    Ok(CouplingPattern::canonical(pattern.k, pattern.l, orbits))
}

/// Real `K x K` matrix of coupling strengths.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    entries: Array2<f64>,
}

impl CouplingMatrix {
    pub fn new(entries: Array2<f64>) -> Result<Self> {
        let (r, c) = entries.dim();
        if r != c || r == 0 {
            return Err(invalid(format!("coupling matrix must be square and non-empty, got {r}x{c}")));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(invalid("coupling matrix has non-finite entries"));
        }
        Ok(Self { entries })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let k = rows.len();
        if rows.iter().any(|r| r.len() != k) {
            return Err(invalid("rows must all have length K"));
        }
        let flat: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::new(Array2::from_shape_vec((k, k), flat).expect("shape checked"))
    }

    /// `z` times the identity: `K` decoupled copies of the one-channel well.
    pub fn diagonal(k: usize, z: f64) -> Result<Self> {
        Self::new(Array2::eye(k) * z)
    }

    pub fn k(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[[row, col]]
    }

    pub fn trace(&self) -> f64 {
        self.entries.diag().sum()
    }

    pub fn norm_max(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn norm_fro(&self) -> f64 {
        self.entries.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Conjugation by a channel relabelling, `B[perm(i)][perm(j)] = A[i][j]`.
    pub fn permuted(&self, perm: &Permutation) -> Result<Self> {
        let k = self.k();
        if perm.len() != k {
            return Err(Error::ChannelMismatch {
                expected: k,
                found: perm.len(),
            });
        }
        let mut out = Array2::zeros((k, k));
        for i in 0..k {
            for j in 0..k {
                out[[perm.apply(i), perm.apply(j)]] = self.entries[[i, j]];
            }
        }
        Ok(Self { entries: out })
    }
}

/// Fills every orbit with the value of its label.
pub fn assemble(pattern: &CouplingPattern, params: &BTreeMap<String, f64>) -> Result<CouplingMatrix> {
    for key in params.keys() {
        if !pattern.labels.iter().any(|l| l == key) {
            return Err(invalid(format!(
                "unknown coupling label '{key}' (pattern has {})",
                pattern.labels.join(", ")
            )));
        }
    }
    let mut m = Array2::zeros((pattern.k, pattern.k));
    for (orbit, label) in pattern.orbits.iter().zip(&pattern.labels) {
        let value = *params
            .get(label)
            .ok_or_else(|| invalid(format!("missing value for coupling label '{label}'")))?;
        if !value.is_finite() {
            return Err(invalid(format!("coupling '{label}' is not finite")));
        }
        for &(i, j) in orbit {
            m[[i, j]] = value;
        }
    }
    CouplingMatrix::new(m)
}

/// `max_p |A[p] - A[tau(p)]|`.
pub fn verify_constraint(a: &CouplingMatrix, k: usize, l: usize) -> Result<f64> {
    if a.k() != k {
        return Err(Error::ChannelMismatch {
            expected: k,
            found: a.k(),
        });
    }
    let tau = entry_permutation(k, l)?;
    let mut worst = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            let (ti, tj) = tau.image(i, j);
            worst = worst.max((a.get(i, j) - a.get(ti, tj)).abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    #[test]
    fn tau_k2_l1() {
        let tau = entry_permutation(2, 1).unwrap();
        assert_eq!(tau.image(0, 0), (1, 1));
        assert_eq!(tau.image(1, 1), (0, 0));
        assert_eq!(tau.image(0, 1), (0, 1));
        assert_eq!(tau.image(1, 0), (1, 0));
    }

    #[test]
    fn tau_l0_is_transpose() {
        for k in 1..6 {
            let tau = entry_permutation(k, 0).unwrap();
            for i in 0..k {
                for j in 0..k {
                    assert_eq!(tau.image(i, j), (j, i));
                }
            }
        }
    }

    #[test]
    fn k3_orbits_are_diagonal_and_off_diagonal() {
        let p = solve_pattern(3, 1).unwrap();
        assert_eq!(p.dimension(), 2);
        assert_eq!(p.orbits()[0], vec![(0, 0), (1, 1), (2, 2)]);
        assert_eq!(p.orbits()[1].len(), 6);
        assert_eq!(p.labels(), &["Z", "p1"]);
    }

    #[test]
    fn small_dimension_examples() {
        assert_eq!(pattern_dimension(2, 1).unwrap(), 3);
        assert_eq!(pattern_dimension(4, 1).unwrap(), 4);
        assert_eq!(pattern_dimension(5, 1).unwrap(), 3);
        assert_eq!(pattern_dimension(7, 1).unwrap(), 4);
        assert_eq!(pattern_dimension(6, 1).unwrap(), 7);
        assert_eq!(pattern_dimension(6, 3).unwrap(), 21);
        assert_eq!(pattern_dimension(8, 2).unwrap(), 16);
        assert_eq!(pattern_dimension(4, 2).unwrap(), 10);
        let p8 = solve_pattern(8, 1).unwrap();
        assert_eq!(p8.dimension(), 8);
        assert!(p8.orbits().iter().all(|o| o.len() == 8));
    }

    #[test]
    fn k1_single_orbit() {
        let p = solve_pattern(1, 0).unwrap();
        assert_eq!(p.dimension(), 1);
        assert_eq!(p.labels(), &["Z"]);
    }

    #[test]
    fn unconstrained_has_k_squared_labels() {
        let p = solve_unconstrained(3).unwrap();
        assert_eq!(p.dimension(), 9);
        assert_eq!(p.label_at(0, 0), Some("Z"));
    }

    #[test]
    fn assemble_examples() {
        let a = assemble(&solve_pattern(3, 1).unwrap(), &params(&[("Z", 0.0), ("p1", 1.0)])).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a.get(i, j), if i == j { 0.0 } else { 1.0 });
            }
        }
        let b = assemble(
            &solve_pattern(2, 1).unwrap(),
            &params(&[("Z", 5.0), ("p1", 4.0), ("p2", 1.0)]),
        )
        .unwrap();
        assert_eq!(b, CouplingMatrix::from_rows(&[&[5.0, 4.0], &[1.0, 5.0]]).unwrap());
        let p = solve_pattern(4, 0).unwrap();
        let zeros: BTreeMap<_, _> = p.labels().iter().map(|l| (l.clone(), 0.0)).collect();
        assert_eq!(assemble(&p, &zeros).unwrap().norm_max(), 0.0);
    }

    #[test]
    fn assemble_rejects_bad_params() {
        let p = solve_pattern(3, 1).unwrap();
        assert!(assemble(&p, &params(&[("Z", 0.0)])).is_err());
        assert!(assemble(&p, &params(&[("Z", 0.0), ("p1", 1.0), ("p2", 2.0)])).is_err());
        assert!(assemble(&p, &params(&[("Z", f64::NAN), ("p1", 1.0)])).is_err());
    }

    #[test]
    fn verify_constraint_hand_value() {
        let a = CouplingMatrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]).unwrap();
        assert_eq!(verify_constraint(&a, 2, 1).unwrap(), 3.0);
        assert!(verify_constraint(&a, 3, 1).is_err());
    }

    #[test]
    fn coupling_matrix_validation() {
        assert!(CouplingMatrix::new(Array2::zeros((2, 3))).is_err());
        assert!(CouplingMatrix::new(Array2::from_elem((2, 2), f64::INFINITY)).is_err());
        assert!(CouplingMatrix::from_rows(&[&[1.0], &[1.0, 2.0]]).is_err());
    }

    #[test]
    fn permuted_view_identity_and_interleave() {
        let p = solve_pattern(4, 1).unwrap();
        assert_eq!(permuted_view(&p, &Permutation::identity(4)).unwrap(), p);
        // Channels 1,2,3,4 -> 1,3,2,4.
        let v = permuted_view(&p, &Permutation::from_one_based(&[1, 3, 2, 4]).unwrap()).unwrap();
        let g = v.label_grid();
        assert_eq!(g[0][0], g[1][1]);
        assert_eq!(g[0][1], g[1][0]);
        assert_eq!(g[0][2], g[1][3]);
        assert_eq!(g[2][0], g[3][1]);
        assert!(permuted_view(&p, &Permutation::identity(3)).is_err());
    }

    #[test]
    fn record_round_trip() {
        let p = solve_pattern(5, 2).unwrap();
        let json = p.to_json();
        let rec: PatternRecord = serde_json::from_str(&json).unwrap();
        assert_eq!(rec.orbits[0][0], [1, 1]);
        assert_eq!(CouplingPattern::try_from(rec).unwrap(), p);
    }
}
