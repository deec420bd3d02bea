//! Analytic spectrum versus oracle eigenvalues.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use super::{subspace, DiscretizedHamiltonian};
use crate::error::{invalid, Error, Result};
use crate::spectrum::Spectrum;

/// Oracle eigenvalues with `|Im E|` above this (relative) are not real levels.
const REAL_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub max_rel_error: f64,
    /// `(analytic, oracle)` per level, repeated by degeneracy.
    pub pairs: Vec<(f64, f64)>,
    /// Real parts below the window edge that were discarded as complex.
    pub discarded_complex: Vec<Complex64>,
    pub window_edge: f64,
}

/// Matches the `n_levels` lowest distinct analytic levels (each repeated by
/// its degeneracy) against the sorted real oracle eigenvalues below the
/// midpoint to the next analytic level.
pub fn compare_spectra(
    analytic: &Spectrum,
    h: &DiscretizedHamiltonian,
    n_levels: usize,
) -> Result<ComparisonReport> {
    if n_levels == 0 {
        return Err(invalid("n_levels must be at least 1"));
    }
    if analytic.k != h.k() {
        return Err(Error::ChannelMismatch {
            expected: h.k(),
            found: analytic.k,
        });
    }
    if analytic.roots.len() <= n_levels {
        return Err(invalid(format!(
            "analytic spectrum has {} levels; {} plus one beyond the window are needed (raise s_max)",
            analytic.roots.len(),
            n_levels
        )));
    }
    let window = &analytic.roots[..n_levels];
    let edge = 0.5 * (window[n_levels - 1].energy + analytic.roots[n_levels].energy);
    let expected: Vec<f64> = window
        .iter()
        .flat_map(|r| std::iter::repeat_n(r.energy, r.degeneracy))
        .collect();

    let below = subspace::eigenvalues_below(h, edge)?;
    let (real, complex): (Vec<Complex64>, Vec<Complex64>) = below
        .into_iter()
        .partition(|z| z.im.abs() <= REAL_TOL * z.norm().max(1.0));
    if real.len() != expected.len() {
        return Err(Error::Numerical(format!(
            "level count mismatch below E = {edge:.6}: analytic {} vs oracle {}",
            expected.len(),
            real.len()
        )));
    }
    let mut oracle: Vec<f64> = real.iter().map(|z| z.re).collect();
    oracle.sort_by(f64::total_cmp);
    let pairs: Vec<(f64, f64)> = expected.into_iter().zip(oracle).collect();
    let max_rel_error = pairs
        .iter()
        .map(|(a, o)| (a - o).abs() / a.abs())
        .fold(0.0, f64::max);
    Ok(ComparisonReport {
        max_rel_error,
        pairs,
        discarded_complex: complex,
        window_edge: edge,
    })
}

/// `error(N) / error(2N)` for the same model: about 4 for a second-order scheme.
pub fn convergence_ratio(analytic: &Spectrum, coarse: &DiscretizedHamiltonian, n_levels: usize) -> Result<f64> {
    let fine = super::discretize(coarse.coupling(), 2 * coarse.n())?;
    let e1 = compare_spectra(analytic, coarse, n_levels)?.max_rel_error;
    let e2 = compare_spectra(analytic, &fine, n_levels)?.max_rel_error;
    Ok(e1 / e2)
}

/// Serialized summary of one oracle validation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub max_rel_error: f64,
    pub residuals: BTreeMap<String, f64>,
}

impl ValidationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
