//! Plot-ready serialization of spectra.

use serde::Serialize;

use crate::spectrum::Spectrum;

pub const CSV_HEADER: &str = "n,oval,s,t,z_eff,E,degeneracy";

/// Significant digits in CSV and table output; enough to round-trip an `f64`.
pub const DEFAULT_PRECISION: usize = 17;

/// `x` in scientific notation with `digits` significant digits.
pub fn format_float(x: f64, digits: usize) -> String {
    format!("{:.*e}", digits.max(1) - 1, x)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootRow {
    pub n: usize,
    pub oval: usize,
    pub s: f64,
    pub t: f64,
    pub z_eff: f64,
    #[serde(rename = "E")]
    pub energy: f64,
    pub degeneracy: usize,
}

pub fn rows(spectrum: &Spectrum) -> Vec<RootRow> {
    spectrum
        .roots
        .iter()
        .enumerate()
        .map(|(i, r)| RootRow {
            n: i + 1,
            oval: r.oval_index,
            s: r.s,
            t: r.t,
            z_eff: r.z_eff,
            energy: r.energy,
            degeneracy: r.degeneracy,
        })
        .collect()
}

pub fn to_csv(spectrum: &Spectrum, digits: usize) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows(spectrum) {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.n,
            r.oval,
            format_float(r.s, digits),
            format_float(r.t, digits),
            format_float(r.z_eff, digits),
            format_float(r.energy, digits),
            r.degeneracy
        ));
    }
    out
}

#[derive(Serialize)]
struct SpectrumDocument<'a> {
    #[serde(rename = "K")]
    k: usize,
    s_max: f64,
    tol: f64,
    all_real: bool,
    real_charges: &'a [(f64, usize)],
    complex_charges: Vec<(f64, f64, usize)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<&'a crate::spectrum::Provenance>,
    roots: Vec<RootRow>,
}

/// JSON mirror of the CSV rows plus run metadata. Floats use the shortest
/// representation that round-trips.
pub fn to_json(spectrum: &Spectrum) -> String {
    let doc = SpectrumDocument {
        k: spectrum.k,
        s_max: spectrum.s_max,
        tol: spectrum.tol,
        all_real: spectrum.all_real,
        real_charges: &spectrum.real_charges,
        complex_charges: spectrum
            .complex_charges
            .iter()
            .map(|(z, m)| (z.re, z.im, *m))
            .collect(),
        params: spectrum.params.as_ref(),
        roots: rows(spectrum),
    };
    serde_json::to_string_pretty(&doc).expect("spectrum serializes")
}
