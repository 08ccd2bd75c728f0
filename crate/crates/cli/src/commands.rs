//! One function per subcommand. Each returns the artifacts it wrote and a
//! few lines for the run log.

use std::path::PathBuf;

use anyhow::Context;
use dce_core::effective::{solve_modes, ModeBranch};
use dce_core::oracle::{build_lattice_with, fit_rate, propagate_with, Comparison, PropagateOptions};
use dce_core::phenom::{phenom_eigs_closed, PhenomParams};
use dce_core::selfenergy::sigma;
use dce_core::sweep::{detect_bifurcations, linspace, sweep_omega0_with, SweepOptions};
use dce_core::{Complex64, Sheet};

use crate::config::Resolved;
use crate::output::{json_text, num, write_atomic, write_json, Csv};

#[derive(Debug, Default)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub notes: Vec<String>,
    /// Printed on standard output.
    pub stdout: Option<String>,
}

impl Outcome {
    fn wrote(&mut self, path: PathBuf) {
        self.files.push(path);
    }
}

pub fn modes(r: &Resolved) -> anyhow::Result<Outcome> {
    let m = solve_modes(&r.params).context("solving the dispersion relation")?;
    let text = json_text(&m.branches)?;
    let path = r.out.join("modes.json");
    write_atomic(&path, text.as_bytes())?;
    let mut out = Outcome {
        stdout: Some(text),
        ..Outcome::default()
    };
    out.wrote(path);
    out.notes
        .push(format!("polynomial mismatch: {:e}", m.polynomial_mismatch));
    for (a, b) in &m.exceptional {
        out.notes.push(format!("near-degenerate pair: {a} / {b}"));
    }
    Ok(out)
}

pub fn sweep(r: &Resolved) -> anyhow::Result<Outcome> {
    let (lo, hi) = r.sweep.range(&r.params);
    let opts = SweepOptions {
        parallel: true,
        ..SweepOptions::default()
    };
    let table = sweep_omega0_with(&r.params, lo, hi, r.sweep.points, &opts).context("sweeping omega0")?;
    let events = detect_bifurcations(&table);

    let mut csv = Csv::new(&["omega0", "label", "re_z", "im_z", "s1", "s2", "residual"]);
    for rec in table.records() {
        let b = rec.branch;
        csv.row(&[
            num(rec.omega0),
            b.label.as_str().to_string(),
            num(b.z.re),
            num(b.z.im),
            format!("{}", b.sheets.s1.sign() as i8),
            format!("{}", b.sheets.s2.sign() as i8),
            num(b.residual),
        ]);
    }
    let mut out = Outcome::default();
    let path = r.out.join("sweep.csv");
    csv.write(&path)?;
    out.wrote(path);
    let path = r.out.join("events.json");
    write_json(&path, &events)?;
    out.wrote(path);
    out.notes.push(format!("grid: [{lo}, {hi}] x {}", table.len()));
    out.notes.push(format!("unsolved rows: {}", table.gaps()));
    for e in &events {
        out.notes.push(format!(
            "event {}: omega0 = {} (defect {:e})",
            serde_json::to_string(&e.kind)?,
            e.omega0_loc,
            e.defect
        ));
    }
    Ok(out)
}

pub fn phenom(r: &Resolved) -> anyhow::Result<Outcome> {
    let block = &r.phenom;
    let (lo, hi) = block.range(&r.params);
    let base = PhenomParams::from_model(&r.params, block.gamma);
    let mut out = Outcome::default();
    for (k, &theta) in block.thetas.iter().enumerate() {
        let mut csv = Csv::new(&["omega0", "theta", "label", "re_z", "im_z"]);
        let mut lowest = f64::INFINITY;
        for omega0 in linspace(lo, hi, block.points) {
            for b in phenom_eigs_closed(&base.with_phase(theta).with_cavity(omega0)) {
                lowest = lowest.min(b.z.im);
                csv.row(&[
                    num(omega0),
                    num(theta),
                    b.label.as_str().to_string(),
                    num(b.z.re),
                    num(b.z.im),
                ]);
            }
        }
        let path = r.out.join(format!("phenom_{k}.csv"));
        csv.write(&path)?;
        out.wrote(path);
        out.notes.push(format!("theta = {theta}: min Im z = {lowest:e}"));
    }
    Ok(out)
}

/// The resonance branch with the smallest `Im z` dominates the cavity
/// envelope at late times.
fn dominant(branches: &[ModeBranch; 4]) -> ModeBranch {
    *branches
        .iter()
        .filter(|b| b.label.is_resonance())
        .min_by(|a, b| a.z.im.total_cmp(&b.z.im))
        .expect("two resonance branches")
}

pub fn oracle(r: &Resolved) -> anyhow::Result<Outcome> {
    let block = &r.oracle;
    let p = r.params.with_cavity(block.omega0.unwrap_or(r.params.cavity));
    let modes = solve_modes(&p).context("solving the effective model")?;
    let z_eff = dominant(&modes.branches).z;

    let lattice = build_lattice_with(&p, block.n, block.norm)?;
    let opts = PropagateOptions {
        stride: block.stride,
        ..PropagateOptions::new(block.t_max, block.dt)
    };
    let traj = propagate_with(&lattice, &lattice.unit(0), &opts).context("propagating the lattice")?;
    let window = block.window.map_or((0.0, block.t_max), |w| (w[0], w[1]));
    let fit = fit_rate(&traj, 0, window).context("fitting the envelope rate")?;

    let mut header = vec!["t".to_string()];
    for c in &traj.components {
        header.push(format!("re_{c}"));
        header.push(format!("im_{c}"));
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&header);
    for (t, row) in traj.times.iter().zip(&traj.amplitudes) {
        let mut cells = vec![num(*t)];
        for v in row {
            cells.push(num(v.re));
            cells.push(num(v.im));
        }
        csv.row(&cells);
    }

    let report = Comparison {
        omega0: p.cavity,
        z_eff,
        rate_oracle: fit.rate,
        stderr: fit.stderr,
        n: block.n,
        dt: block.dt,
    };
    let mut out = Outcome::default();
    let path = r.out.join("trajectory.csv");
    csv.write(&path)?;
    out.wrote(path);
    let path = r.out.join("comparison.json");
    write_json(&path, &report)?;
    out.wrote(path);
    out.notes
        .push(format!("norm: {}", serde_json::to_string(&block.norm)?));
    out.notes.push(format!(
        "fit window: [{}, {}], {} samples",
        window.0, window.1, fit.samples
    ));
    out.notes
        .push(format!("rate {:e} vs -Im z {:e}", fit.rate, -z_eff.im));
    if let Some(w) = traj.warning {
        out.notes.push(format!("warning: {w}"));
    }
    Ok(out)
}

pub fn sigma_curve(r: &Resolved) -> anyhow::Result<Outcome> {
    let p = &r.params;
    let (lo, hi) = r.sigma.range(p);
    let mut csv = Csv::new(&["omega", "x", "re_first", "im_first", "re_second", "im_second"]);
    for omega in linspace(lo, hi, r.sigma.points) {
        let x = Complex64::new(omega - p.band_center, 0.0);
        let s1 = sigma(x, p.half_width, Sheet::First)?;
        let s2 = sigma(x, p.half_width, Sheet::Second)?;
        csv.row(&[
            num(omega),
            num(x.re),
            num(s1.re),
            num(s1.im),
            num(s2.re),
            num(s2.im),
        ]);
    }
    let mut out = Outcome::default();
    let path = r.out.join("sigma.csv");
    csv.write(&path)?;
    out.wrote(path);
    Ok(out)
}
