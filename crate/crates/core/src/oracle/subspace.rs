//! Low end of the oracle spectrum without a dense decomposition.
//!
//! Shift-invert block subspace iteration with the shift `sigma` placed left
//! of the numerical range of `H`, so every eigenvalue lies in
//! `Re z > sigma` and the inverse never meets a pole. `H - sigma` is block
//! tridiagonal over grid points (K x K blocks), and its Hermitian part is
//! positive definite, so block elimination without pivoting is stable.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::DiscretizedHamiltonian;
use crate::error::{Error, Result};
use crate::linalg;

const MAX_ITERATIONS: usize = 500;
const RITZ_TOL: f64 = 1e-12;
const SEED: u64 = 0x5eed_0f_0ac1e;

/// Shift and a bound on `|Im z|` over the numerical range of `H`.
fn shift_and_height(h: &DiscretizedHamiltonian) -> (f64, f64) {
    let a = h.coupling().norm_fro();
    let hh = h.spacing();
    let t_min = 4.0 / (hh * hh) * (std::f64::consts::PI * hh / 4.0).sin().powi(2);
    (t_min - a - 1.0, a)
}

/// `(H - sigma)^-1` by block LU, stored as the inverted pivot blocks.
struct BlockSolver {
    k: usize,
    n: usize,
    off: f64,
    pivots_inv: Vec<Array2<Complex64>>,
}

impl BlockSolver {
    fn new(h: &DiscretizedHamiltonian, sigma: f64) -> Result<Self> {
        let (k, n) = (h.k(), h.n());
        let inv_h2 = 1.0 / (h.spacing() * h.spacing());
        let off = -inv_h2;
        let mut pivots_inv: Vec<Array2<Complex64>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut d = Array2::<Complex64>::zeros((k, k));
            let sign = if j < n / 2 { -1.0 } else { 1.0 };
            for m in 0..k {
                for c in 0..k {
                    d[(m, c)] = Complex64::new(0.0, -sign * h.coupling().get(m, c));
                }
                d[(m, m)] += 2.0 * inv_h2 - sigma;
            }
            if let Some(prev) = pivots_inv.last() {
                d = d - prev.mapv(|z| z * (off * off));
            }
            pivots_inv.push(linalg::inverse(&d)?);
        }
        Ok(Self {
            k,
            n,
            off,
            pivots_inv,
        })
    }

    /// Solves in place; `x` is channel-major.
    fn solve(&self, x: &mut [Complex64]) {
        let (k, n, c) = (self.k, self.n, self.off);
        let get = |x: &[Complex64], j: usize| -> Vec<Complex64> { (0..k).map(|m| x[m * n + j]).collect() };
        let mul = |a: &Array2<Complex64>, v: &[Complex64]| -> Vec<Complex64> {
            (0..k)
                .map(|m| (0..k).map(|q| a[(m, q)] * v[q]).sum())
                .collect()
        };
        // Forward: y_j = b_j - c S_{j-1}^-1 y_{j-1}.
        let mut ys: Vec<Vec<Complex64>> = Vec::with_capacity(n);
        for j in 0..n {
            let mut y = get(x, j);
            if j > 0 {
                let t = mul(&self.pivots_inv[j - 1], &ys[j - 1]);
                for m in 0..k {
                    y[m] -= t[m] * c;
                }
            }
            ys.push(y);
        }
        // Backward: x_j = S_j^-1 (y_j - c x_{j+1}).
        let mut next: Vec<Complex64> = Vec::new();
        for j in (0..n).rev() {
            let mut y = std::mem::take(&mut ys[j]);
            if j + 1 < n {
                for m in 0..k {
                    y[m] -= next[m] * c;
                }
            }
            let xj = mul(&self.pivots_inv[j], &y);
            for m in 0..k {
                x[m * n + j] = xj[m];
            }
            next = xj;
        }
    }
}

/// Modified Gram-Schmidt, two passes. Columns that collapse are replaced by
/// fresh random vectors.
fn orthonormalize(cols: &mut [Vec<Complex64>], rng: &mut ChaCha8Rng) {
    for i in 0..cols.len() {
        for attempt in 0..4 {
            let original = linalg::vec_norm(&cols[i]);
            for _ in 0..2 {
                for j in 0..i {
                    let (done, rest) = cols.split_at_mut(i);
                    let proj = linalg::inner(&done[j], &rest[0]);
                    for (x, q) in rest[0].iter_mut().zip(&done[j]) {
                        *x -= proj * q;
                    }
                }
            }
            let norm = linalg::vec_norm(&cols[i]);
            if norm > 1e-10 * original && norm > 0.0 {
                for x in cols[i].iter_mut() {
                    *x /= norm;
                }
                break;
            }
            assert!(attempt < 3, "cannot extend orthonormal basis");
            cols[i] = random_vector(cols[i].len(), rng);
        }
    }
}

fn random_vector(len: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..len)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect()
}

/// The `count` eigenvalues nearest to `sigma`, ordered by distance.
fn nearest(h: &DiscretizedHamiltonian, sigma: f64, count: usize) -> Result<Vec<Complex64>> {
    let dim = h.dim();
    let count = count.min(dim);
    let block = (count + 8).max(2 * count).min(dim);
    let solver = BlockSolver::new(h, sigma)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut basis: Vec<Vec<Complex64>> = (0..block).map(|_| random_vector(dim, &mut rng)).collect();
    orthonormalize(&mut basis, &mut rng);

    let shift = Complex64::new(sigma, 0.0);
    // Rayleigh quotients carry rounding of order eps·‖H‖.
    let floor = 64.0 * f64::EPSILON * h.norm_max();
    let mut previous: Option<Vec<Complex64>> = None;
    for _ in 0..MAX_ITERATIONS {
        for col in basis.iter_mut() {
            solver.solve(col);
        }
        orthonormalize(&mut basis, &mut rng);

        let images: Vec<Vec<Complex64>> = basis.iter().map(|q| h.apply(q)).collect();
        let mut m = Array2::<Complex64>::zeros((block, block));
        for i in 0..block {
            for j in 0..block {
                m[(i, j)] = linalg::inner(&basis[i], &images[j]);
            }
        }
        let mut ritz = linalg::eigvals_complex(&m)?.to_vec();
        ritz.sort_by(|a, b| (a - shift).norm().total_cmp(&(b - shift).norm()));
        ritz.truncate(count);

        if let Some(prev) = &previous {
            // Set comparison, blind to conjugation: members of a conjugate
            // pair are equidistant from the shift and may trade places.
            let fold = |z: &Complex64| Complex64::new(z.re, z.im.abs());
            let settled = ritz.iter().all(|a| {
                prev.iter()
                    .any(|b| (fold(a) - fold(b)).norm() <= RITZ_TOL * a.norm() + floor)
            });
            if settled {
                return Ok(ritz);
            }
        }
        previous = Some(ritz);
    }
    Err(Error::Numerical(format!(
        "subspace iteration for {count} eigenvalues did not settle in {MAX_ITERATIONS} steps"
    )))
}

/// The `count` eigenvalues of smallest real part, ascending in real part.
///
/// Grows the search until every eigenvalue that could have a smaller real
/// part than the last one returned is provably among those computed.
pub fn lowest_eigenvalues(h: &DiscretizedHamiltonian, count: usize) -> Result<Vec<Complex64>> {
    let dim = h.dim();
    if count == 0 {
        return Ok(Vec::new());
    }
    if count > dim {
        return Err(crate::error::invalid(format!(
            "requested {count} eigenvalues of a {dim}-dimensional operator"
        )));
    }
    let (sigma, height) = shift_and_height(h);
    let mut m = (count + 4).min(dim);
    loop {
        let values = nearest(h, sigma, m)?;
        let mut by_re = values.clone();
        by_re.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
        let cutoff = by_re[count - 1].re;
        let radius = (values[values.len() - 1] - sigma).norm();
        if m == dim || radius > (cutoff - sigma).hypot(height) {
            by_re.truncate(count);
            return Ok(by_re);
        }
        m = (2 * m).min(dim);
    }
}

/// Every eigenvalue with real part below `cutoff`, ascending in real part.
pub fn eigenvalues_below(h: &DiscretizedHamiltonian, cutoff: f64) -> Result<Vec<Complex64>> {
    let dim = h.dim();
    let (sigma, height) = shift_and_height(h);
    if cutoff <= sigma {
        return Ok(Vec::new());
    }
    // Free-well estimate of how many levels fit, plus slack.
    let per_channel = (2.0 / std::f64::consts::PI * (cutoff + height).max(0.0).sqrt()).floor() as usize;
    let mut m = (h.k() * (per_channel + 2) + 4).min(dim);
    loop {
        let values = nearest(h, sigma, m)?;
        let radius = (values[values.len() - 1] - sigma).norm();
        if m == dim || radius > (cutoff - sigma).hypot(height) {
            let mut below: Vec<Complex64> = values.into_iter().filter(|z| z.re < cutoff).collect();
            below.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
            return Ok(below);
        }
        m = (2 * m).min(dim);
    }
}
