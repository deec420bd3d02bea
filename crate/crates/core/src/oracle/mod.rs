//! Finite-difference oracle.
//!
//! On the grid `x_j = -1 + j h`, `j = 1..N`, `h = 2/(N+1)` (N even, so no
//! point sits at the origin) the Hamiltonian is
//!
//! ```text
//! H = T ⊗ 1 - i sign(x) ⊗ A,     T = tridiag(-1, 2, -1) / h^2,
//! ```
//!
//! stored channel-major: row `m*N + j` is channel `m` at grid point `j`
//! (0-based).

mod compare;
mod metric;
mod subspace;

use ndarray::{Array1, Array2};
use num_complex::Complex64;

pub use compare::{compare_spectra, convergence_ratio, ComparisonReport, ValidationReport};
pub use metric::{biorthogonal_basis, build_metric, physical_metric, BiorthogonalPair, MetricTheta};
pub use subspace::lowest_eigenvalues;

use crate::constraints::CouplingMatrix;
use crate::error::{invalid, Error, Result};
use crate::linalg;
use crate::parity::GeneralizedParity;

/// Backward-error bound for dense eigenpairs, relative to `‖H‖_max`.
const BACKWARD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct DiscretizedHamiltonian {
    coupling: CouplingMatrix,
    n: usize,
    spacing: f64,
    grid: Vec<f64>,
}

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

impl DiscretizedHamiltonian {
    pub fn k(&self) -> usize {
        self.coupling.k()
    }

    /// Interior grid points per channel.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.k() * self.n
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn coupling(&self) -> &CouplingMatrix {
        &self.coupling
    }

    fn sign(&self, j: usize) -> f64 {
        if j < self.n / 2 {
            -1.0
        } else {
            1.0
        }
    }

    /// Potential block `-i sign(x_j) A` entry `(m, k)`.
    fn potential(&self, j: usize, m: usize, k: usize) -> Complex64 {
        -I * (self.sign(j) * self.coupling.get(m, k))
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        let n = self.n;
        let (m, j) = (row / n, row % n);
        let (k, l) = (col / n, col % n);
        let inv_h2 = 1.0 / (self.spacing * self.spacing);
        let mut v = Complex64::new(0.0, 0.0);
        if j == l {
            v += self.potential(j, m, k);
            if m == k {
                v += 2.0 * inv_h2;
            }
        } else if m == k && j.abs_diff(l) == 1 {
            v -= inv_h2;
        }
        v
    }

    pub fn to_dense(&self) -> Array2<Complex64> {
        let (n, k) = (self.n, self.k());
        let inv_h2 = 1.0 / (self.spacing * self.spacing);
        let mut h = Array2::zeros((k * n, k * n));
        for m in 0..k {
            for j in 0..n {
                let r = m * n + j;
                h[(r, r)] += 2.0 * inv_h2;
                if j > 0 {
                    h[(r, r - 1)] -= inv_h2;
                }
                if j + 1 < n {
                    h[(r, r + 1)] -= inv_h2;
                }
                for c in 0..k {
                    h[(r, c * n + j)] += self.potential(j, m, c);
                }
            }
        }
        h
    }

    /// `H v` without forming `H`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.apply_impl(v, false)
    }

    /// `H^† v`.
    pub fn apply_adjoint(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.apply_impl(v, true)
    }

    fn apply_impl(&self, v: &[Complex64], adjoint: bool) -> Vec<Complex64> {
        let (n, k) = (self.n, self.k());
        assert_eq!(v.len(), n * k, "vector length must be K*N");
        let inv_h2 = 1.0 / (self.spacing * self.spacing);
        let mut out = vec![Complex64::new(0.0, 0.0); n * k];
        for m in 0..k {
            for j in 0..n {
                let r = m * n + j;
                let mut acc = v[r] * (2.0 * inv_h2);
                if j > 0 {
                    acc -= v[r - 1] * inv_h2;
                }
                if j + 1 < n {
                    acc -= v[r + 1] * inv_h2;
                }
                for c in 0..k {
                    let p = if adjoint {
                        self.potential(j, c, m).conj()
                    } else {
                        self.potential(j, m, c)
                    };
                    acc += p * v[c * n + j];
                }
                out[r] = acc;
            }
        }
        out
    }

    /// Largest entry magnitude.
    pub fn norm_max(&self) -> f64 {
        let inv_h2 = 1.0 / (self.spacing * self.spacing);
        let mut best = if self.n > 1 { inv_h2 } else { 0.0 };
        for m in 0..self.k() {
            for c in 0..self.k() {
                let a = self.coupling.get(m, c);
                let e = if m == c { (2.0 * inv_h2).hypot(a) } else { a.abs() };
                best = best.max(e);
            }
        }
        best
    }

    /// Index map of the discretized `R = P ⊗ r`: `(R v)[map[i]] = v[i]`.
    pub fn parity_map(&self, p: &GeneralizedParity) -> Result<Vec<usize>> {
        if p.k() != self.k() {
            return Err(Error::ChannelMismatch {
                expected: self.k(),
                found: p.k(),
            });
        }
        let n = self.n;
        Ok((0..self.dim())
            .map(|i| {
                let (m, j) = (i / n, i % n);
                p.permutation().apply(m) * n + (n - 1 - j)
            })
            .collect())
    }

    /// `R v` for the discretized pseudo-parity.
    pub fn apply_parity(&self, p: &GeneralizedParity, v: &[Complex64]) -> Result<Vec<Complex64>> {
        let map = self.parity_map(p)?;
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (i, &t) in map.iter().enumerate() {
            out[t] = v[i];
        }
        Ok(out)
    }
}

pub fn discretize(a: &CouplingMatrix, n: usize) -> Result<DiscretizedHamiltonian> {
    if n < 4 {
        return Err(invalid(format!("grid needs at least 4 interior points, got {n}")));
    }
    if n % 2 != 0 {
        return Err(invalid(format!(
            "grid size must be even so that no point sits at x = 0, got {n}"
        )));
    }
    let spacing = 2.0 / (n as f64 + 1.0);
    let grid = (1..=n).map(|j| -1.0 + j as f64 * spacing).collect();
    Ok(DiscretizedHamiltonian {
        coupling: a.clone(),
        n,
        spacing,
        grid,
    })
}

/// Every eigenpair of `H` from a dense decomposition, ascending in real
/// part (ties by imaginary part). Kets have unit norm.
pub fn eigensolve(h: &DiscretizedHamiltonian) -> Result<Vec<(Complex64, Array1<Complex64>)>> {
    let (values, vectors) = linalg::eig_complex(&h.to_dense())?;
    let norm = h.norm_max();
    let mut pairs = Vec::with_capacity(values.len());
    for (idx, &e) in values.iter().enumerate() {
        let mut v = vectors.column(idx).to_vec();
        linalg::fix_gauge(&mut v);
        let hv = h.apply(&v);
        let res = hv
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - e * b).norm_sqr())
            .sum::<f64>()
            .sqrt();
        if !(res <= BACKWARD_TOL * norm) {
            return Err(Error::Numerical(format!(
                "eigenpair {idx} backward error {res:.3e} exceeds {BACKWARD_TOL:e}·‖H‖"
            )));
        }
        pairs.push((e, Array1::from(v)));
    }
    pairs.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
    Ok(pairs)
}

/// All eigenvalues from a dense decomposition, ascending in real part.
pub fn eigenvalues(h: &DiscretizedHamiltonian) -> Result<Vec<Complex64>> {
    let mut values = linalg::eigvals_complex(&h.to_dense())?.to_vec();
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(values)
}

/// `max |(R H - H^† R)_ab|` for the discretized `R = P ⊗ r`.
pub fn pseudo_hermiticity_residual(h: &DiscretizedHamiltonian, p: &GeneralizedParity) -> Result<f64> {
    let map = h.parity_map(p)?;
    let dim = h.dim();
    let mut inverse = vec![0; dim];
    for (i, &t) in map.iter().enumerate() {
        inverse[t] = i;
    }
    // (R H)_ab = H[R^-1 a][b] and (H^† R)_ab = conj(H[R b][a]). Both vanish
    // unless the grid point of b is within one step of the mirror image of a's.
    let (n, k) = (h.n(), h.k());
    let mut worst = 0.0f64;
    for a in 0..dim {
        let ia = inverse[a];
        let mirror = ia % n;
        for jb in mirror.saturating_sub(1)..=(mirror + 1).min(n - 1) {
            for c in 0..k {
                let b = c * n + jb;
                let lhs = h.entry(ia, b);
                let rhs = h.entry(map[b], a).conj();
                worst = worst.max((lhs - rhs).norm());
            }
        }
    }
    Ok(worst)
}
