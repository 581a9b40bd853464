//! JSON documents written by the command-line tool. Field layouts match the
//! schemas in `schemas/`.

use crate::chart::ChartSpec;
use crate::deformation::{Coefficients, DeformationSeries, ObstructionReport};
use crate::form::subsets;
use crate::leafform::{form_to_doc, FormDoc};
use crate::spectral::SpectralForm;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;

/// One retained Fourier mode: `coeff · exp(2πi n·x / T)` in component `comp`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ModeDoc {
    pub n: Vec<i64>,
    pub comp: String,
    pub re: f64,
    pub im: f64,
}

/// Fourier representation of a leafwise form.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SpectralDoc {
    pub degree: usize,
    pub truncation: Vec<usize>,
    pub periods: Vec<f64>,
    pub modes: Vec<ModeDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum OrderDoc {
    Symbolic { order: usize, form: FormDoc },
    Spectral { order: usize, form: SpectralDoc },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesDoc {
    pub chart: String,
    pub orders: Vec<OrderDoc>,
    pub certified_residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObstructionDoc {
    pub chart: String,
    pub order: usize,
    pub norm: f64,
    pub closed_residual: f64,
    pub profile: SpectralDoc,
}

/// Provenance of one command run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: Vec<String>,
    pub chart_hash: Option<String>,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub truncation: Option<usize>,
    pub version: String,
    pub files: Vec<String>,
    /// The only field that differs between identical runs.
    pub wall_time_s: f64,
}

fn comp_key(idx: &[usize]) -> String {
    idx.iter().map(|i| (i + 1).to_string()).collect()
}

/// Modes above `1e-12` relative to the largest, rounded to 15 significant
/// digits; real or imaginary parts below the cutoff are written as zero.
pub fn spectral_doc(s: &SpectralForm) -> SpectralDoc {
    let keys: Vec<String> = subsets(s.r, s.deg).iter().map(|i| comp_key(i)).collect();
    let top = s.c.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    let cut = (1e-12 * top).max(1e-300);
    let clean = |x: f64| if x.abs() > cut { round15(x) } else { 0.0 };
    let mut modes = Vec::new();
    for k in 0..s.grid.len() {
        for (comp, v) in s.c.iter().enumerate() {
            let z = v[k];
            if z.norm() > cut {
                modes.push(ModeDoc { n: s.grid.freqs(k), comp: keys[comp].clone(), re: clean(z.re), im: clean(z.im) });
            }
        }
    }
    SpectralDoc { degree: s.deg, truncation: s.grid.n.clone(), periods: s.grid.periods.clone(), modes }
}

fn round15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float")
}

pub fn series_doc(s: &DeformationSeries) -> SeriesDoc {
    let orders = s
        .orders
        .iter()
        .enumerate()
        .map(|(i, c)| match c {
            Coefficients::Symbolic(f) => OrderDoc::Symbolic { order: i + 1, form: form_to_doc(f) },
            Coefficients::Spectral(f) => OrderDoc::Spectral { order: i + 1, form: spectral_doc(f) },
        })
        .collect();
    SeriesDoc { chart: s.chart.name.clone(), orders, certified_residual: s.certified }
}

pub fn obstruction_doc(chart: &ChartSpec, r: &ObstructionReport) -> ObstructionDoc {
    ObstructionDoc {
        chart: chart.name.clone(),
        order: r.order,
        norm: round15(r.norm),
        closed_residual: r.closed_residual,
        profile: spectral_doc(&r.profile),
    }
}

/// SHA-256 of the chart's canonical JSON document, hex encoded.
pub fn chart_hash(chart: &ChartSpec) -> String {
    let json = serde_json::to_string(&chart.to_doc()).expect("chart document serialises");
    Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}
