//! Closed-form effective charges of the reference coupling matrices, keyed by label.

use std::collections::BTreeMap;

use num_complex::Complex64;

use super::{csqrt, real};

pub type Formula = fn(&BTreeMap<&str, f64>) -> Vec<Complex64>;

pub fn two_channel(v: &BTreeMap<&str, f64>) -> Vec<Complex64> {
    let r = csqrt(v["X"] * v["Y"]);
    vec![v["Z"] + r, v["Z"] - r]
}

pub fn three_channel(v: &BTreeMap<&str, f64>) -> Vec<Complex64> {
    let (z, x) = (v["Z"], v["X"]);
    vec![real(z + 2.0 * x), real(z - x), real(z - x)]
}

pub fn four_channel(v: &BTreeMap<&str, f64>) -> Vec<Complex64> {
    let (z, d) = (v["Z"], v["D"]);
    let r = 2.0 * csqrt(v["U"] * v["L"]);
    vec![real(z - d), real(z - d), z + d + r, z + d - r]
}

pub fn five_channel(v: &BTreeMap<&str, f64>) -> Vec<Complex64> {
    let (z, d, x) = (v["Z"], v["D"], v["X"]);
    let f = |sign: f64| 0.5 * (-d - x + sign * 5f64.sqrt() * (x - d));
    let (p, m) = (f(1.0), f(-1.0));
    [z + 2.0 * d + 2.0 * x, z + p, z + p, z + m, z + m]
        .into_iter()
        .map(real)
        .collect()
}

pub fn six_channel_odd(v: &BTreeMap<&str, f64>) -> Vec<Complex64> {
    let (z, b, c, f, g, x, y) = (v["Z"], v["B"], v["C"], v["F"], v["G"], v["X"], v["Y"]);
    let r0 = csqrt(2.0 * c * y + 2.0 * b * x + x * y + 4.0 * b * c);
    let r1 = 0.5
        * csqrt(
            -3.0 * g * g + 6.0 * g * f - 3.0 * f * f - 4.0 * b * x + 4.0 * x * y + 4.0 * b * c
                - 4.0 * c * y,
        );
    let h = -0.5 * (g + f);
    vec![
        z + g + f + r0,
        z + g + f - r0,
        z + h + r1,
        z + h + r1,
        z + h - r1,
        z + h - r1,
    ]
}

/// Eigenvalues `lambda` of the shifted problem `A - (Z + A_diag)/2`, with the
/// lower block's off-diagonal `B` in the role of `Y` and the given `omega`.
pub fn six_channel_shifted(v: &BTreeMap<&str, f64>, omega: f64) -> Vec<Complex64> {
    let (y, x, c, d, g) = (v["B"], v["X"], v["C"], v["D"], v["G"]);
    let l0 = (y - x + omega).powi(2) + (c + d + g).powi(2);
    let l1 = (x - y + 2.0 * omega).powi(2) + 4.0 * (c * c + d * d + g * g - c * d - d * g - c * g);
    let r0 = csqrt(l0);
    let r1 = 0.5 * csqrt(l1);
    let h = -0.5 * (y + x);
    vec![
        y + x + r0,
        y + x - r0,
        h + r1,
        h + r1,
        h - r1,
        h - r1,
    ]
}

pub fn six_channel_even(v: &BTreeMap<&str, f64>) -> Vec<Complex64> {
    let shift = 0.5 * (v["Z"] + v["A"]);
    let omega = 0.5 * (v["A"] - v["Z"]);
    six_channel_shifted(v, omega)
        .into_iter()
        .map(|l| l + shift)
        .collect()
}

pub fn seven_channel(v: &BTreeMap<&str, f64>) -> Vec<Complex64> {
    let (z, x, y, d) = (v["Z"], v["X"], v["Y"], v["D"]);
    (0..7)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 7.0;
            real(z + 2.0 * x * t.cos() + 2.0 * y * (2.0 * t).cos() + 2.0 * d * (3.0 * t).cos())
        })
        .collect()
}
