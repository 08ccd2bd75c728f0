//! Browser bindings. Results come back as flat `Float64Array`s, one row
//! after another, so the page can plot them without a serialisation layer.
//!
//! The band is fixed at `omegaB = 4`, `B = 1`.

use dce_core::phenom::{phenom_eigs_closed, PhenomParams};
use dce_core::selfenergy::sigma;
use dce_core::sweep::{linspace, sweep_omega0};
use dce_core::{BranchLabel, Complex64, ModelParams, Sheet};
use wasm_bindgen::prelude::*;

pub const OMEGA_B: f64 = 4.0;
pub const B: f64 = 1.0;

/// Values per row of [`sweep_rows`].
pub const SWEEP_STRIDE: usize = 9;

fn params(f0: f64, g: f64, pump: f64, theta: f64) -> ModelParams {
    ModelParams {
        cavity: OMEGA_B,
        band_center: OMEGA_B,
        half_width: B,
        pump_amp: f0,
        pump_phase: theta,
        pump_freq: pump,
        coupling: g,
    }
}

/// Rows of `omega0, re z x4, im z x4` in branch order; unsolved points are
/// NaN.
pub fn sweep_rows(
    lo: f64,
    hi: f64,
    points: usize,
    f0: f64,
    g: f64,
    pump: f64,
    theta: f64,
) -> Result<Vec<f64>, String> {
    let table = sweep_omega0(&params(f0, g, pump, theta), lo, hi, points).map_err(|e| e.to_string())?;
    let mut out = Vec::with_capacity(SWEEP_STRIDE * table.len());
    for (&w, row) in table.axis.iter().zip(&table.rows) {
        out.push(w);
        let z: Vec<Complex64> = match row {
            Some(r) => BranchLabel::ALL.iter().map(|l| r[l.index()].z).collect(),
            None => vec![Complex64::new(f64::NAN, f64::NAN); 4],
        };
        out.extend(z.iter().map(|z| z.re));
        out.extend(z.iter().map(|z| z.im));
    }
    Ok(out)
}

/// Rows of `omega, re sigma, im sigma` on the retarded sheet.
pub fn sigma_rows(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, String> {
    let mut out = Vec::with_capacity(3 * points);
    for w in linspace(lo, hi, points) {
        let s = sigma(Complex64::new(w - OMEGA_B, 0.0), B, Sheet::First).map_err(|e| e.to_string())?;
        out.extend([w, s.re, s.im]);
    }
    Ok(out)
}

/// Rows of `omega0, im z+, im z-` for the flat-band model.
pub fn phenom_rows(lo: f64, hi: f64, points: usize, f0: f64, gamma: f64, pump: f64, theta: f64) -> Vec<f64> {
    let base = PhenomParams {
        cavity: 0.0,
        pump_freq: pump,
        pump_amp: f0,
        pump_phase: theta,
        gamma,
    };
    let mut out = Vec::with_capacity(3 * points);
    for w in linspace(lo, hi, points) {
        let [a, b] = phenom_eigs_closed(&base.with_cavity(w));
        out.extend([w, a.z.im, b.z.im]);
    }
    out
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn sweep(
    lo: f64,
    hi: f64,
    points: usize,
    f0: f64,
    g: f64,
    pump: f64,
    theta: f64,
) -> Result<Vec<f64>, JsError> {
    sweep_rows(lo, hi, points, f0, g, pump, theta).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn self_energy(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, JsError> {
    sigma_rows(lo, hi, points).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn phenom(lo: f64, hi: f64, points: usize, f0: f64, gamma: f64, pump: f64, theta: f64) -> Vec<f64> {
    phenom_rows(lo, hi, points, f0, gamma, pump, theta)
}
