//! The channel-independent matching condition `2s sin 2s + 2t sinh 2t = 0`
//! and its intersections with the hyperbolas `t = z / (2s)`.
//!
//! Along a hyperbola the condition becomes a one-dimensional function
//!
//! ```text
//! h(s) = 2s sin 2s + u sinh u,   u = z / s,
//! ```
//!
//! which is even in `z`. Its zeros sit on the arches where `sin 2s < 0`
//! (the "ovals"), two per arch below the arch's critical charge, one
//! double zero at it and none above.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{invalid, Error, Result};

/// Grid step of the sign-change scan.
pub const SCAN_STEP: f64 = 0.002;

/// Brackets are bisected down to this width before Newton takes over.
const BRACKET_WIDTH: f64 = 1e-6;

/// A grid-level minimum of `|h|` below this, with no sign change, is
/// reported as a tangency.
const TANGENT_THRESHOLD: f64 = 1e-6;

/// `2s sin 2s + 2t sinh 2t`.
pub fn secular_residual(s: f64, t: f64) -> f64 {
    2.0 * s * (2.0 * s).sin() + 2.0 * t * (2.0 * t).sinh()
}

/// `h(s)` for the charge `z`.
#[inline]
pub(crate) fn along_hyperbola(s: f64, z: f64) -> f64 {
    secular_residual(s, 0.5 * z / s)
}

/// `g'(u)` for `g(u) = u sinh u`.
#[inline]
fn dg(u: f64) -> f64 {
    u.sinh() + u * u.cosh()
}

/// `g''(u)`.
#[inline]
fn d2g(u: f64) -> f64 {
    2.0 * u.cosh() + u * u.sinh()
}

/// `dh/ds` at fixed `z`.
pub(crate) fn slope(s: f64, z: f64) -> f64 {
    let u = z / s;
    2.0 * (2.0 * s).sin() + 4.0 * s * (2.0 * s).cos() - u / s * dg(u)
}

/// `d2h/ds2` at fixed `z`.
pub(crate) fn curvature(s: f64, z: f64) -> f64 {
    let u = z / s;
    8.0 * (2.0 * s).cos() - 8.0 * s * (2.0 * s).sin() + (u * u * d2g(u) + 2.0 * u * dg(u)) / (s * s)
}

/// `dh/dz` at fixed `s`.
pub(crate) fn dz(s: f64, z: f64) -> f64 {
    dg(z / s) / s
}

/// `d2h/(ds dz)`.
pub(crate) fn dsdz(s: f64, z: f64) -> f64 {
    let u = z / s;
    -(dg(u) + u * d2g(u)) / (s * s)
}

/// One zero of `h` on `(0, s_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecularPoint {
    pub s: f64,
    pub t: f64,
    /// Double zero where the hyperbola touches an oval.
    pub tangent: bool,
}

impl SecularPoint {
    pub fn energy(&self) -> f64 {
        self.s * self.s - self.t * self.t
    }
}

/// Which arch `s ∈ [π/2 + (n-1)π, nπ]` holds the point; 0 for the `t = 0` roots.
pub fn oval_index(s: f64, t: f64) -> usize {
    if t == 0.0 {
        0
    } else {
        (s / PI).ceil() as usize
    }
}

/// All zeros of `h` on `(0, s_max]` in ascending `s`, polished to `|h| <= tol`
/// (or to the last representable bracket when rounding forbids that).
pub fn solve_roots(z_eff: f64, s_max: f64, tol: f64) -> Result<Vec<SecularPoint>> {
    if !z_eff.is_finite() {
        return Err(invalid("effective charge must be finite"));
    }
    if !(s_max > 0.0) || !s_max.is_finite() {
        return Err(invalid(format!("s_max must be positive, got {s_max}")));
    }
    if !(tol > 0.0) {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }

    if z_eff == 0.0 {
        // Hermitian well: sin 2s = 0.
        let count = ((s_max / FRAC_PI_2) * (1.0 + 1e-14)).floor() as usize;
        return Ok((1..=count)
            .map(|n| SecularPoint {
                s: n as f64 * FRAC_PI_2,
                t: 0.0,
                tangent: false,
            })
            .collect());
    }

    let f = |s: f64| along_hyperbola(s, z_eff);
    let mut grid: Vec<f64> = (1..)
        .map(|i| i as f64 * SCAN_STEP)
        .take_while(|&s| s <= s_max)
        .collect();
    if grid.last().is_none_or(|&last| s_max - last > 1e-12) {
        grid.push(s_max);
    }
    let values: Vec<f64> = grid.iter().map(|&s| f(s)).collect();

    let mut found: Vec<SecularPoint> = Vec::new();
    let mut push = |s: f64, tangent: bool| {
        found.push(SecularPoint {
            s,
            t: 0.5 * z_eff / s,
            tangent,
        })
    };

    for i in 0..grid.len() {
        let (a, fa) = (grid[i], values[i]);
        if fa == 0.0 {
            push(a, false);
            continue;
        }
        if i + 1 < grid.len() {
            let (b, fb) = (grid[i + 1], values[i + 1]);
            if fb != 0.0 && fa.signum() != fb.signum() && fa.is_finite() {
                push(polish(z_eff, a, b, tol)?, false);
            }
        }
        // Grid-level minimum of |h| without a sign change: a hidden pair of
        // close zeros or a tangency.
        if i >= 1 && i + 1 < grid.len() {
            let (fl, fr) = (values[i - 1], values[i + 1]);
            let same_sign = fl.signum() == fa.signum() && fr.signum() == fa.signum();
            if same_sign && fl.is_finite() && fa.abs() <= fl.abs() && fa.abs() < fr.abs() {
                let lo = grid[i - 1];
                let hi = grid[i + 1];
                let sign = fa.signum();
                let m = stationary_point(z_eff, lo, hi, sign);
                let fm = f(m);
                if fm.signum() != sign && fm != 0.0 {
                    push(polish(z_eff, lo, m, tol)?, false);
                    push(polish(z_eff, m, hi, tol)?, false);
                } else if fm.abs() <= TANGENT_THRESHOLD {
                    push(m, true);
                }
            }
        }
    }

    found.sort_by(|a, b| a.s.total_cmp(&b.s));
    found.dedup_by(|a, b| (a.s - b.s).abs() <= 1e-13 * b.s.max(1.0));
    Ok(found)
}

/// Minimizer of `sign * h` on `[lo, hi]`: golden section, then Newton on `h'`.
fn stationary_point(z: f64, lo: f64, hi: f64, sign: f64) -> f64 {
    let g = |s: f64| sign * along_hyperbola(s, z);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    for _ in 0..80 {
        if b - a < 1e-10 {
            break;
        }
        if gc < gd {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = g(d);
        }
    }
    let mut s = 0.5 * (a + b);
    for _ in 0..20 {
        let k = curvature(s, z);
        if k == 0.0 {
            break;
        }
        let next = s - slope(s, z) / k;
        if !(lo..=hi).contains(&next) || next == s {
            break;
        }
        s = next;
    }
    s
}

/// Bisection to [`BRACKET_WIDTH`], then bracketed Newton. `h(a)` and `h(b)`
/// must differ in sign.
fn polish(z: f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    let f = |s: f64| along_hyperbola(s, z);
    let (mut a, mut b) = (a, b);
    let fa_sign = f(a).signum();
    let mut best = (f64::INFINITY, a);
    let consider = |s: f64, fs: f64, best: &mut (f64, f64)| {
        if fs.abs() < best.0 {
            *best = (fs.abs(), s);
        }
    };

    while b - a > BRACKET_WIDTH {
        let m = 0.5 * (a + b);
        let fm = f(m);
        consider(m, fm, &mut best);
        if fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa_sign {
            a = m;
        } else {
            b = m;
        }
    }

    let mut x = 0.5 * (a + b);
    for _ in 0..60 {
        let fx = f(x);
        consider(x, fx, &mut best);
        if fx.abs() <= tol {
            return Ok(x);
        }
        if fx.signum() == fa_sign {
            a = x;
        } else {
            b = x;
        }
        let d = slope(x, z);
        let mut next = if d != 0.0 { x - fx / d } else { f64::NAN };
        if !(next > a && next < b) {
            next = 0.5 * (a + b);
        }
        if next == x {
            break;
        }
        x = next;
    }

    // Rounding floor: shrink the bracket to adjacent doubles.
    loop {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        consider(m, fm, &mut best);
        if fm.abs() <= tol || fm == 0.0 {
            return Ok(m);
        }
        if fm.signum() == fa_sign {
            a = m;
        } else {
            b = m;
        }
    }
    if best.0.is_finite() {
        Ok(best.1)
    } else {
        Err(Error::Numerical(format!("root polish failed near s = {x}")))
    }
}

/// The tangency of the lowest hyperbola with the first oval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalPoint {
    pub z: f64,
    pub s: f64,
}

/// Solves `h = 0`, `dh/ds = 0` jointly in `(s, z)` with `s` in `(π/2, π)`.
pub fn critical_point() -> Result<CriticalPoint> {
    // Coarse scan: first charge at which the first oval loses its zeros.
    let oval_min = |z: f64| {
        let mut best = (f64::INFINITY, FRAC_PI_2);
        let mut s = FRAC_PI_2;
        while s <= PI {
            let v = along_hyperbola(s, z);
            if v < best.0 {
                best = (v, s);
            }
            s += SCAN_STEP;
        }
        best
    };
    let mut seed = None;
    let mut z = 3.0;
    while z <= 6.0 {
        let (v, s) = oval_min(z);
        if v > 0.0 {
            seed = Some((s, z));
            break;
        }
        z += 0.01;
    }
    let (mut s, mut z) =
        seed.ok_or_else(|| Error::Numerical("no first-oval tangency in scan range".into()))?;

    for _ in 0..50 {
        let f1 = along_hyperbola(s, z);
        let f2 = slope(s, z);
        let (a, b) = (f2, dz(s, z));
        let (c, d) = (curvature(s, z), dsdz(s, z));
        let det = a * d - b * c;
        if det == 0.0 || !det.is_finite() {
            return Err(Error::Numerical("singular Jacobian in tangency search".into()));
        }
        let ds = (d * f1 - b * f2) / det;
        let dzv = (a * f2 - c * f1) / det;
        s -= ds;
        z -= dzv;
        if dzv.abs() <= 1e-8 && ds.abs() <= 1e-8 {
            // One more step for full precision.
            let f1 = along_hyperbola(s, z);
            let f2 = slope(s, z);
            let (a, b) = (slope(s, z), dz(s, z));
            let (c, d) = (curvature(s, z), dsdz(s, z));
            let det = a * d - b * c;
            s -= (d * f1 - b * f2) / det;
            z -= (a * f2 - c * f1) / det;
            if !(FRAC_PI_2 < s && s < PI) {
                return Err(Error::Numerical(format!("tangency left the first oval: s = {s}")));
            }
            return Ok(CriticalPoint { z, s });
        }
    }
    Err(Error::Numerical("tangency Newton iteration did not converge".into()))
}

/// Critical effective charge above which the lowest pair of levels turns complex.
pub fn critical_coupling() -> Result<f64> {
    critical_point().map(|p| p.z)
}
