//! Bound-state spectra of the coupled-channel well.
//!
//! In the eigenbasis of the coupling matrix the channels decouple, and each
//! real eigenvalue `z` (an effective charge) contributes the levels of a
//! one-channel well of strength `z`: the points where the hyperbola
//! `2st = z` crosses the curve `2s sin 2s + 2t sinh 2t = 0`, at energy
//! `E = s^2 - t^2`.

mod charges;
mod secular;
mod state;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

pub use charges::{effective_charges, shifted_charges, EffectiveCharge};
pub use secular::{
    critical_coupling, critical_point, oval_index, secular_residual, solve_roots, CriticalPoint,
    SecularPoint, SCAN_STEP,
};
pub use state::{bound_state, evaluate_wavefunction, BoundState};

use crate::constraints::{assemble, CouplingMatrix, CouplingPattern};
use crate::error::Result;

pub const DEFAULT_S_MAX: f64 = 20.0;
pub const DEFAULT_TOL: f64 = 1e-12;

/// Relative gap below which levels from different charges are merged.
const MERGE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SecularRoot {
    pub s: f64,
    pub t: f64,
    pub z_eff: f64,
    pub energy: f64,
    pub oval_index: usize,
    pub degeneracy: usize,
    pub tangent: bool,
}

impl SecularRoot {
    fn new(p: SecularPoint, z_eff: f64, degeneracy: usize) -> Self {
        Self {
            s: p.s,
            t: p.t,
            z_eff,
            energy: p.s * p.s - p.t * p.t,
            oval_index: oval_index(p.s, p.t),
            degeneracy,
            tangent: p.tangent,
        }
    }
}

/// Where a spectrum's coupling matrix came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Provenance {
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub params: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    #[serde(rename = "K")]
    pub k: usize,
    /// Ascending in energy.
    pub roots: Vec<SecularRoot>,
    pub s_max: f64,
    pub tol: f64,
    pub all_real: bool,
    /// Real charges with their multiplicities.
    pub real_charges: Vec<(f64, usize)>,
    /// Complex charges with their multiplicities; no levels are computed for them.
    pub complex_charges: Vec<(Complex64, usize)>,
    pub params: Option<Provenance>,
}

impl Spectrum {
    pub fn energies(&self) -> Vec<f64> {
        self.roots.iter().map(|r| r.energy).collect()
    }

    /// Energies repeated by degeneracy, ascending.
    pub fn expanded_energies(&self) -> Vec<f64> {
        self.roots
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.energy, r.degeneracy))
            .collect()
    }
}

pub fn spectrum(a: &CouplingMatrix, s_max: f64, tol: f64) -> Result<Spectrum> {
    let charges = effective_charges(a)?;
    let mut real_charges = Vec::new();
    let mut complex_charges = Vec::new();
    for q in &charges {
        if q.is_real {
            real_charges.push((q.real(), q.multiplicity));
        } else {
            complex_charges.push((q.value, q.multiplicity));
        }
    }

    let mut roots: Vec<SecularRoot> = Vec::new();
    for &(z, mult) in &real_charges {
        for p in solve_roots(z, s_max, tol)? {
            roots.push(SecularRoot::new(p, z, mult));
        }
    }
    // Largest z_eff first among equal energies, so the kept root is deterministic.
    roots.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(b.z_eff.total_cmp(&a.z_eff)));
    let mut merged: Vec<SecularRoot> = Vec::with_capacity(roots.len());
    for r in roots {
        match merged.last_mut() {
            Some(last)
                if (r.energy - last.energy).abs()
                    <= MERGE_TOL * last.energy.abs().max(r.energy.abs()).max(1.0) =>
            {
                last.degeneracy += r.degeneracy;
                last.tangent |= r.tangent;
            }
            _ => merged.push(r),
        }
    }

    Ok(Spectrum {
        k: a.k(),
        roots: merged,
        s_max,
        tol,
        all_real: complex_charges.is_empty(),
        real_charges,
        complex_charges,
        params: None,
    })
}

/// Assembles the pattern with `params` and records them on the result.
pub fn spectrum_for_pattern(
    pattern: &CouplingPattern,
    params: &BTreeMap<String, f64>,
    s_max: f64,
    tol: f64,
) -> Result<Spectrum> {
    let a = assemble(pattern, params)?;
    let mut sp = spectrum(&a, s_max, tol)?;
    sp.params = Some(Provenance {
        k: pattern.k(),
        l: pattern.l(),
        params: params.clone(),
    });
    Ok(sp)
}

/// How far a coupling matrix can be scaled before its largest real charge
/// reaches the critical coupling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CriticalScaling {
    pub z_crit: f64,
    pub max_abs_charge: f64,
    /// `z_crit / max_abs_charge`: levels stay real for `A -> c A` with `|c|` below this.
    pub scale: f64,
}

pub fn critical_scaling(a: &CouplingMatrix) -> Result<CriticalScaling> {
    let charges = effective_charges(a)?;
    if let Some(q) = charges.iter().find(|q| !q.is_real) {
        return Err(crate::error::Error::BrokenSymmetry(format!(
            "complex effective charge {}: no real scaling window",
            q.value
        )));
    }
    let max_abs_charge = charges.iter().map(|q| q.real().abs()).fold(0.0, f64::max);
    if max_abs_charge == 0.0 {
        return Err(crate::error::invalid("all effective charges vanish; the direction never reaches criticality"));
    }
    let z_crit = critical_coupling()?;
    Ok(CriticalScaling {
        z_crit,
        max_abs_charge,
        scale: z_crit / max_abs_charge,
    })
}
