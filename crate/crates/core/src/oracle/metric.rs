//! Biorthogonal eigenbasis and the metric `Θ = Σ c_n |n⟩⟩⟨⟨n|`.
//!
//! If `H v = E v` then `H^† (R v) = R H v = E (R v)`, so the left partner of
//! a ket with energy `E` is `R` applied to a ket with energy `E*`. Kets are
//! grouped into clusters of (nearly) equal eigenvalues; for a cluster `V`
//! and the reflected kets `U = R V'` of its conjugate cluster, the Gram
//! matrix `G = U^† V` yields ketkets `W = U (G^-1)^†` with `W^† V = 1`.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use serde::Serialize;

use super::{eigensolve, DiscretizedHamiltonian};
use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::parity::GeneralizedParity;

/// Eigenvalues within this distance (relative to `‖H‖_max`) share a cluster.
const CLUSTER_TOL: f64 = 1e-9;
/// Largest acceptable condition number of a cluster's Gram matrix.
const GRAM_CONDITION_LIMIT: f64 = 1e8;
/// Energies with `|Im E|` above this (relative to `max(1, |E|)`) are complex.
const REAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiorthogonalPair {
    pub energy: Complex64,
    /// Unit norm, largest component real positive.
    pub ket: Array1<Complex64>,
    /// Normalized so that `⟨⟨n|n⟩ = 1`.
    pub ketket: Array1<Complex64>,
}

fn clusters(values: &[Complex64], tol: f64) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, v) in values.iter().enumerate() {
        match out
            .iter_mut()
            .find(|c| c.iter().any(|&j| (values[j] - v).norm() <= tol))
        {
            Some(c) => c.push(i),
            None => out.push(vec![i]),
        }
    }
    out
}

fn condition_estimate(g: &Array2<Complex64>, g_inv: &Array2<Complex64>) -> f64 {
    let one_norm = |m: &Array2<Complex64>| {
        m.columns()
            .into_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    one_norm(g) * one_norm(g_inv)
}

pub fn biorthogonal_basis(h: &DiscretizedHamiltonian, parity: &GeneralizedParity) -> Result<Vec<BiorthogonalPair>> {
    let pairs = eigensolve(h)?;
    let values: Vec<Complex64> = pairs.iter().map(|p| p.0).collect();
    let groups = clusters(&values, CLUSTER_TOL * h.norm_max());

    let mut out: Vec<Option<BiorthogonalPair>> = vec![None; pairs.len()];
    for group in &groups {
        let centre = group.iter().map(|&i| values[i]).sum::<Complex64>() / group.len() as f64;
        let partner = groups
            .iter()
            .filter(|g| g.len() == group.len())
            .min_by(|a, b| {
                let da = (values[a[0]] - centre.conj()).norm();
                let db = (values[b[0]] - centre.conj()).norm();
                da.total_cmp(&db)
            })
            .filter(|g| (values[g[0]] - centre.conj()).norm() <= 1e-6 * h.norm_max())
            .ok_or_else(|| {
                Error::Numerical(format!("no conjugate partner for eigenvalue cluster at {centre}"))
            })?;

        let d = group.len();
        let kets: Vec<&Array1<Complex64>> = group.iter().map(|&i| &pairs[i].1).collect();
        let reflected: Vec<Vec<Complex64>> = partner
            .iter()
            .map(|&i| h.apply_parity(parity, pairs[i].1.as_slice().expect("contiguous")))
            .collect::<Result<_>>()?;
        let mut g = Array2::<Complex64>::zeros((d, d));
        for a in 0..d {
            for b in 0..d {
                g[(a, b)] = linalg::inner(&reflected[a], kets[b].as_slice().expect("contiguous"));
            }
        }
        let g_inv = linalg::inverse(&g).map_err(|_| {
            Error::Numerical(format!("singular Gram matrix for eigenvalue cluster at {centre}"))
        })?;
        let cond = condition_estimate(&g, &g_inv);
        if !(cond <= GRAM_CONDITION_LIMIT) {
            return Err(Error::Numerical(format!(
                "near-degenerate cluster at {centre}: Gram condition {cond:.2e}, refusing to pair"
            )));
        }
        // W = U (G^-1)^†, column b = Σ_a U_a conj(G^-1[b][a]).
        for (b, &idx) in group.iter().enumerate() {
            let mut w = vec![Complex64::new(0.0, 0.0); h.dim()];
            for (a, u) in reflected.iter().enumerate() {
                let coef = g_inv[(b, a)].conj();
                for (x, y) in w.iter_mut().zip(u) {
                    *x += coef * y;
                }
            }
            out[idx] = Some(BiorthogonalPair {
                energy: values[idx],
                ket: pairs[idx].1.clone(),
                ketket: Array1::from(w),
            });
        }
    }
    Ok(out.into_iter().map(|p| p.expect("every index clustered")).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricTheta {
    pub matrix: Array2<Complex64>,
    pub weights: Vec<f64>,
}

impl MetricTheta {
    pub fn norm_max(&self) -> f64 {
        linalg::max_abs(self.matrix.view())
    }

    /// `‖Θ - Θ^†‖_max / ‖Θ‖_max`.
    pub fn hermiticity_residual(&self) -> f64 {
        let d = &self.matrix - &linalg::adjoint(self.matrix.view());
        linalg::max_abs(d.view()) / self.norm_max()
    }

    /// Smallest eigenvalue of `(Θ + Θ^†)/2`.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        let sym = (&self.matrix + &linalg::adjoint(self.matrix.view())).mapv(|z| z * 0.5);
        Ok(linalg::eigvals_hermitian(&sym)?[0])
    }

    /// `‖Θ H - H^† Θ‖_max / (‖Θ‖_max ‖H‖_max)`.
    pub fn quasi_hermiticity_residual(&self, h: &DiscretizedHamiltonian) -> Result<f64> {
        if h.dim() != self.matrix.nrows() {
            return Err(invalid("metric and Hamiltonian dimensions differ"));
        }
        let dense = h.to_dense();
        let lhs = self.matrix.dot(&dense) - linalg::adjoint(dense.view()).dot(&self.matrix);
        Ok(linalg::max_abs(lhs.view()) / (self.norm_max() * h.norm_max()))
    }

    /// `⟨a|Θ|b⟩`.
    pub fn inner(&self, a: &[Complex64], b: &[Complex64]) -> Complex64 {
        let tb = self.matrix.dot(&Array1::from(b.to_vec()));
        linalg::inner(a, tb.as_slice().expect("contiguous"))
    }
}

/// `Θ = Σ c_n |n⟩⟩⟨⟨n|`; unit weights when `weights` is `None`.
pub fn build_metric(pairs: &[BiorthogonalPair], weights: Option<&[f64]>) -> Result<MetricTheta> {
    if pairs.is_empty() {
        return Err(invalid("no eigenpairs supplied"));
    }
    let weights: Vec<f64> = match weights {
        Some(w) if w.len() != pairs.len() => {
            return Err(invalid(format!("{} weights for {} eigenpairs", w.len(), pairs.len())))
        }
        Some(w) => w.to_vec(),
        None => vec![1.0; pairs.len()],
    };
    if weights.iter().any(|&c| !(c > 0.0) || !c.is_finite()) {
        return Err(invalid("metric weights must be positive and finite"));
    }
    if let Some(p) = pairs
        .iter()
        .find(|p| p.energy.im.abs() > REAL_TOL * p.energy.norm().max(1.0))
    {
        return Err(Error::BrokenSymmetry(format!(
            "complex energy {} in the spectrum: no positive metric exists in the broken phase",
            p.energy
        )));
    }
    let dim = pairs[0].ketket.len();
    let mut w = Array2::<Complex64>::zeros((dim, pairs.len()));
    for (col, (p, &c)) in pairs.iter().zip(&weights).enumerate() {
        let s = c.sqrt();
        for (r, z) in p.ketket.iter().enumerate() {
            w[(r, col)] = z * s;
        }
    }
    let matrix = w.dot(&linalg::adjoint(w.view()));
    Ok(MetricTheta { matrix, weights })
}

/// Checks the spectrum is real before the (costly) pairing step, then builds `Θ`.
pub fn physical_metric(
    h: &DiscretizedHamiltonian,
    parity: &GeneralizedParity,
    weights: Option<&[f64]>,
) -> Result<(Vec<BiorthogonalPair>, MetricTheta)> {
    let values = super::eigenvalues(h)?;
    if let Some(e) = values
        .iter()
        .find(|e| e.im.abs() > REAL_TOL * e.norm().max(1.0))
    {
        return Err(Error::BrokenSymmetry(format!(
            "complex energy {e} in the spectrum: no positive metric exists in the broken phase"
        )));
    }
    let pairs = biorthogonal_basis(h, parity)?;
    let theta = build_metric(&pairs, weights)?;
    Ok((pairs, theta))
}
