//! Piecewise-trigonometric bound states.

use ndarray::Array1;
use num_complex::Complex64;
use serde::Serialize;

use super::SecularRoot;
use crate::constraints::CouplingMatrix;
use crate::error::{invalid, Error, Result};
use crate::linalg;

/// `phi_m(x) = C_L[m] sin(kappa_L (x+1))` on `[-1, 0]` and
/// `C_R[m] sin(kappa_R (1-x))` on `[0, 1]`, with `kappa_L = s - it`,
/// `kappa_R = s + it`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundState {
    pub root: SecularRoot,
    pub amplitudes_left: Array1<Complex64>,
    pub amplitudes_right: Array1<Complex64>,
    pub k: usize,
}

impl BoundState {
    pub fn kappa_left(&self) -> Complex64 {
        Complex64::new(self.root.s, -self.root.t)
    }

    pub fn kappa_right(&self) -> Complex64 {
        Complex64::new(self.root.s, self.root.t)
    }

    /// `max_m |C_L sin kappa_L - C_R sin kappa_R|`, relative to the largest amplitude.
    pub fn matching_residual(&self) -> f64 {
        let (sl, sr) = (self.kappa_left().sin(), self.kappa_right().sin());
        let amp = self
            .amplitudes_left
            .iter()
            .chain(self.amplitudes_right.iter())
            .fold(0.0f64, |m, z| m.max(z.norm()));
        let worst = self
            .amplitudes_left
            .iter()
            .zip(self.amplitudes_right.iter())
            .fold(0.0f64, |m, (l, r)| m.max((l * sl - r * sr).norm()));
        if amp > 0.0 {
            worst / amp
        } else {
            worst
        }
    }

    /// `|kappa_L cot kappa_L + kappa_R cot kappa_R|`: continuity of the derivative.
    pub fn derivative_residual(&self) -> f64 {
        let (kl, kr) = (self.kappa_left(), self.kappa_right());
        (kl * kl.cos() / kl.sin() + kr * kr.cos() / kr.sin()).norm()
    }
}

/// Builds the state for `root` in the channel direction `channel_vector`,
/// which must be an eigenvector of `A` for `root.z_eff`.
pub fn bound_state(
    a: &CouplingMatrix,
    root: &SecularRoot,
    channel_vector: &Array1<Complex64>,
) -> Result<BoundState> {
    let k = a.k();
    if channel_vector.len() != k {
        return Err(Error::ChannelMismatch {
            expected: k,
            found: channel_vector.len(),
        });
    }
    let vn = linalg::vec_norm(&channel_vector.to_vec());
    if vn == 0.0 {
        return Err(invalid("channel vector is zero"));
    }
    let av = a.entries().mapv(|x| Complex64::new(x, 0.0)).dot(channel_vector);
    let res = linalg::vec_norm(&(av - channel_vector.mapv(|z| z * root.z_eff)).to_vec());
    let scale = a.norm_fro().max(1.0);
    if res > 1e-8 * scale * vn {
        return Err(invalid(format!(
            "channel vector is not an eigenvector of A for z_eff = {} (residual {res:.3e})",
            root.z_eff
        )));
    }

    let kl = Complex64::new(root.s, -root.t);
    let kr = Complex64::new(root.s, root.t);
    let sr = kr.sin();
    if sr.norm() <= f64::EPSILON * kr.norm().max(1.0) {
        return Err(invalid(format!(
            "sin(kappa_R) vanishes at s = {}, t = {}: not a genuine root",
            root.s, root.t
        )));
    }
    let ratio = kl.sin() / sr;
    Ok(BoundState {
        root: *root,
        amplitudes_left: channel_vector.clone(),
        amplitudes_right: channel_vector.mapv(|c| c * ratio),
        k,
    })
}

/// Value of channel `m` (0-based) at `x` in `[-1, 1]`.
pub fn evaluate_wavefunction(state: &BoundState, m: usize, x: f64) -> Result<Complex64> {
    if m >= state.k {
        return Err(invalid(format!("channel {m} out of range for K = {}", state.k)));
    }
    if !(-1.0..=1.0).contains(&x) {
        return Err(invalid(format!("x = {x} lies outside [-1, 1]")));
    }
    if x == -1.0 || x == 1.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok(if x <= 0.0 {
        state.amplitudes_left[m] * (state.kappa_left() * (x + 1.0)).sin()
    } else {
        state.amplitudes_right[m] * (state.kappa_right() * (1.0 - x)).sin()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{effective_charges, spectrum};

    #[test]
    fn single_channel_ground_state_matches() {
        let a = CouplingMatrix::diagonal(1, 1.0).unwrap();
        let sp = spectrum(&a, 10.0, 1e-12).unwrap();
        let root = sp.roots[0];
        let v = Array1::from(vec![Complex64::new(1.0, 0.0)]);
        let st = bound_state(&a, &root, &v).unwrap();
        assert!(st.matching_residual() <= 1e-9);
        assert!(st.derivative_residual() <= 1e-9);
        assert_eq!(evaluate_wavefunction(&st, 0, -1.0).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(evaluate_wavefunction(&st, 0, 1.0).unwrap(), Complex64::new(0.0, 0.0));
        let left = evaluate_wavefunction(&st, 0, -1e-15).unwrap();
        let right = evaluate_wavefunction(&st, 0, 1e-15).unwrap();
        assert!((left - right).norm() < 1e-9);
    }

    #[test]
    fn real_root_has_equal_amplitudes() {
        let a = CouplingMatrix::diagonal(2, 0.0).unwrap();
        let sp = spectrum(&a, 4.0, 1e-12).unwrap();
        let v = Array1::from(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        let st = bound_state(&a, &sp.roots[0], &v).unwrap();
        assert_eq!(st.amplitudes_left, st.amplitudes_right);
        let y = evaluate_wavefunction(&st, 0, 0.3).unwrap();
        assert_eq!(y.im, 0.0);
    }

    #[test]
    fn symmetric_channel_vector_for_three_channels() {
        let a = CouplingMatrix::from_rows(&[&[0.0, 1.0, 1.0], &[1.0, 0.0, 1.0], &[1.0, 1.0, 0.0]]).unwrap();
        let charges = effective_charges(&a).unwrap();
        let sp = spectrum(&a, 6.0, 1e-12).unwrap();
        let root = sp.roots.iter().find(|r| r.z_eff == charges[0].real()).unwrap();
        let st = bound_state(&a, root, &charges[0].channel_vectors[0]).unwrap();
        let first = st.amplitudes_left[0];
        assert!(st.amplitudes_left.iter().all(|c| (c - first).norm() < 1e-12));
        assert!(st.matching_residual() <= 1e-9 && st.derivative_residual() <= 1e-9);
    }

    #[test]
    fn rejects_wrong_vector_and_range() {
        let a = CouplingMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        let sp = spectrum(&a, 4.0, 1e-12).unwrap();
        let bad = Array1::from(vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert!(bound_state(&a, &sp.roots[0], &bad).is_err());
        let short = Array1::from(vec![Complex64::new(1.0, 0.0)]);
        assert!(matches!(
            bound_state(&a, &sp.roots[0], &short),
            Err(Error::ChannelMismatch { .. })
        ));
        let good = Array1::from(vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)]);
        let root = sp.roots.iter().find(|r| (r.z_eff - 1.0).abs() < 1e-12).unwrap();
        let st = bound_state(&a, root, &good).unwrap();
        assert!(evaluate_wavefunction(&st, 2, 0.0).is_err());
        assert!(evaluate_wavefunction(&st, 0, 1.5).is_err());
    }
}
