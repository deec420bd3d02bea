//! Effective charges: the eigenvalues of the coupling matrix.

use ndarray::Array1;
use num_complex::Complex64;
use serde::Serialize;

use crate::constraints::CouplingMatrix;
use crate::error::{Error, Result};
use crate::linalg;

/// Eigenvalues closer than this (relative to `‖A‖_F`) form one cluster.
const CLUSTER_TOL: f64 = 1e-7;
/// Imaginary parts below this (relative to `‖A‖_F`) count as real.
const REAL_TOL: f64 = 1e-9;
/// Backward-error bound for every returned eigenvector.
const BACKWARD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveCharge {
    pub value: Complex64,
    pub multiplicity: usize,
    /// Unit-norm eigenvectors, largest component real positive.
    pub channel_vectors: Vec<Array1<Complex64>>,
    pub is_real: bool,
}

impl EffectiveCharge {
    pub fn real(&self) -> f64 {
        self.value.re
    }
}

fn scale(a: &CouplingMatrix) -> f64 {
    let n = a.norm_fro();
    if n > 0.0 {
        n
    } else {
        1.0
    }
}

/// All eigenvalues of `A`, clustered with multiplicities, sorted by
/// descending real part (then descending imaginary part).
pub fn effective_charges(a: &CouplingMatrix) -> Result<Vec<EffectiveCharge>> {
    let entries = a.entries();
    let k = a.k();
    let scale = scale(a);
    let (values, vectors) = linalg::eig_real(entries)?;
    let complex_a = entries.mapv(|x| Complex64::new(x, 0.0));

    for (idx, &lambda) in values.iter().enumerate() {
        let v = vectors.column(idx);
        let r = complex_a.dot(&v) - v.mapv(|z| z * lambda);
        let res = linalg::vec_norm(r.as_slice().expect("contiguous"));
        let vn = linalg::vec_norm(&v.to_vec());
        if !(res <= BACKWARD_TOL * scale * vn) {
            return Err(Error::Numerical(format!(
                "eigenpair backward error {res:.3e} exceeds bound for eigenvalue {lambda}"
            )));
        }
    }

    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| {
        values[j]
            .re
            .total_cmp(&values[i].re)
            .then(values[j].im.total_cmp(&values[i].im))
    });

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for &i in &order {
        let joined = clusters.iter_mut().find(|c| {
            c.iter()
                .any(|&j| (values[i] - values[j]).norm() <= CLUSTER_TOL * scale)
        });
        match joined {
            Some(c) => c.push(i),
            None => clusters.push(vec![i]),
        }
    }

    let mut out: Vec<EffectiveCharge> = clusters
        .into_iter()
        .map(|c| {
            let mean = c.iter().map(|&i| values[i]).sum::<Complex64>() / c.len() as f64;
            let is_real = mean.im.abs() <= REAL_TOL * scale;
            let value = if is_real {
                Complex64::new(mean.re, 0.0)
            } else {
                mean
            };
            let channel_vectors = c
                .iter()
                .map(|&i| {
                    let mut v = vectors.column(i).to_vec();
                    linalg::fix_gauge(&mut v);
                    if is_real {
                        // Real eigenvalues of a real matrix come with real vectors.
                        for z in v.iter_mut() {
                            if z.im.abs() <= 1e-12 {
                                z.im = 0.0;
                            }
                        }
                    }
                    Array1::from(v)
                })
                .collect();
            EffectiveCharge {
                value,
                multiplicity: c.len(),
                channel_vectors,
                is_real,
            }
        })
        .collect();
    out.sort_by(|a, b| {
        b.value
            .re
            .total_cmp(&a.value.re)
            .then(b.value.im.total_cmp(&a.value.im))
    });
    Ok(out)
}

/// Mean of the (at most two) distinct diagonal values and the eigenvalues
/// of `A - shift·I`, sorted by descending real part.
pub fn shifted_charges(a: &CouplingMatrix) -> Result<(f64, Vec<Complex64>)> {
    let diag: Vec<f64> = a.entries().diag().to_vec();
    let mut distinct: Vec<f64> = Vec::new();
    for d in diag {
        if !distinct.contains(&d) {
            distinct.push(d);
        }
    }
    if distinct.len() > 2 {
        return Err(Error::PatternMismatch(format!(
            "shifted problem needs at most two distinct diagonal values, found {}",
            distinct.len()
        )));
    }
    let lo = distinct.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = distinct.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shift = 0.5 * (lo + hi);
    let mut shifted = a.entries().clone();
    for i in 0..a.k() {
        shifted[(i, i)] -= shift;
    }
    let mut lambdas = linalg::eig_real(&shifted)?.0.to_vec();
    lambdas.sort_by(|x, y| y.re.total_cmp(&x.re).then(y.im.total_cmp(&x.im)));
    Ok((shift, lambdas))
}
