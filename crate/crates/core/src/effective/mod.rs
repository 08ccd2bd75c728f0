//! The 2x2 energy-dependent Floquet-Liouvillian on `{(a*, n=1), (a, n=0)}`
//! and its self-consistent eigenvalues.
//!
//! Roots are tracked as lifted states `(z, r1, r2)` where `r1`, `r2` are the
//! square-root values entering the annihilation and creation self-energies.
//! Every solve takes the complete root census of the radical-free degree-8
//! polynomial, polishes each root on the lifted system and assigns roots to
//! branches by proximity to a predicted state. Sheet tags are read off the
//! lifted state, so a branch may change sheet when it crosses a cut.

mod lifted;
pub mod poly;

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{unperturbed_seeds, validate_params, BranchLabel, ModelParams};
use crate::selfenergy::{sigma, SheetTag};

pub(crate) use lifted::{assign, census, Candidate, Lifted};
use poly::relative_residual;
pub use poly::{
    classify_roots, dispersion_polynomial, polynomial_roots, Classification, DispersionPolynomial, TaggedRoot,
};

pub type Matrix2 = [[Complex64; 2]; 2];

/// Homotopy steps for each of the coupling and pump ramps.
pub const RAMP_STEPS: usize = 40;
/// Residual bound every reported branch satisfies.
pub const RESIDUAL_BOUND: f64 = 1e-9;
const COLLISION: f64 = 1e-12;
const MAX_HALVINGS: u32 = 12;

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

pub fn leff_matrix(z: Complex64, p: &ModelParams, sheets: SheetTag) -> Result<Matrix2> {
    let g2 = p.coupling * p.coupling;
    let b = p.half_width;
    let s_cre = sigma(p.x_creation(z), b, sheets.s2)?;
    let s_ann = sigma(p.x_annihilation(z), b, sheets.s1)?;
    let phase = Complex64::from_polar(1.0, p.pump_phase);
    Ok([
        [p.cavity - p.pump_freq + g2 * s_cre, -i() * p.pump_amp * phase],
        [-i() * p.pump_amp * phase.conj(), -p.cavity - g2 * s_ann],
    ])
}

pub fn dispersion_residual(z: Complex64, p: &ModelParams, sheets: SheetTag) -> Result<Complex64> {
    let g2 = p.coupling * p.coupling;
    let b = p.half_width;
    let s_ann = sigma(p.x_annihilation(z), b, sheets.s1)?;
    let s_cre = sigma(p.x_creation(z), b, sheets.s2)?;
    Ok((z + p.cavity + g2 * s_ann) * (z - p.cavity + p.pump_freq - g2 * s_cre) + p.pump_amp * p.pump_amp)
}

/// Shifts `Re z` into `(-Omega/2, Omega/2]`.
pub fn reduce_mod_omega(z: Complex64, omega: f64) -> Complex64 {
    let k = (z.re / omega + 0.5).ceil() - 1.0;
    Complex64::new(z.re - k * omega, z.im)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Eigenvectors {
    pub right: [Complex64; 2],
    pub left: [Complex64; 2],
    /// Largest cross overlap `|left_i . right_j|` between the two
    /// eigenvectors of the matrix evaluated at `z`.
    pub biorth_defect: f64,
    /// Set when the matrix is defective at `z` (exceptional point).
    pub defective: bool,
}

fn bilinear(u: &[Complex64; 2], v: &[Complex64; 2]) -> Complex64 {
    u[0] * v[0] + u[1] * v[1]
}

fn null_pair(m: &Matrix2, lambda: Complex64) -> ([Complex64; 2], [Complex64; 2]) {
    let a = m[0][0] - lambda;
    let b = m[0][1];
    let c = m[1][0];
    let d = m[1][1] - lambda;
    let pick = |x: [Complex64; 2], y: [Complex64; 2]| {
        if x[0].norm_sqr() + x[1].norm_sqr() >= y[0].norm_sqr() + y[1].norm_sqr() {
            x
        } else {
            y
        }
    };
    let mut right = pick([b, -a], [d, -c]);
    let left = pick([c, -a], [d, -b]);
    // unit norm, dominant component real and positive
    let n = (right[0].norm_sqr() + right[1].norm_sqr()).sqrt();
    if n > 0.0 {
        let k = if right[0].norm() >= right[1].norm() { 0 } else { 1 };
        let phase = right[k] / right[k].norm();
        right = [right[0] / (phase * n), right[1] / (phase * n)];
        right[k] = Complex64::new(right[k].re, 0.0);
    }
    (right, left)
}

fn normalise_left(left: [Complex64; 2], right: &[Complex64; 2]) -> Option<[Complex64; 2]> {
    let d = bilinear(&left, right);
    let scale = (left[0].norm_sqr() + left[1].norm_sqr()).sqrt();
    if d.norm() <= 1e-10 * scale {
        None
    } else {
        Some([left[0] / d, left[1] / d])
    }
}

/// Right and left null vectors of `L_eff(z) - z`, normalised so that
/// `left . right = 1` (bilinear, no conjugation).
pub fn eigenvectors(z: Complex64, p: &ModelParams, sheets: SheetTag) -> Result<Eigenvectors> {
    let res = dispersion_residual(z, p, sheets)?;
    if res.norm() > RESIDUAL_BOUND * (1.0 + z.norm_sqr()) {
        return Err(Error::Domain(format!(
            "z = {z} is not a root on {sheets} (residual {:e})",
            res.norm()
        )));
    }
    let m = leff_matrix(z, p, sheets)?;
    let (right, left_raw) = null_pair(&m, z);
    let tr = m[0][0] + m[1][1];
    let other = tr - z;
    let split = (other - z).norm();
    let scale = 1.0 + m.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
    let Some(left) = normalise_left(left_raw, &right) else {
        let n = (left_raw[0].norm_sqr() + left_raw[1].norm_sqr())
            .sqrt()
            .max(f64::MIN_POSITIVE);
        return Ok(Eigenvectors {
            right,
            left: [left_raw[0] / n, left_raw[1] / n],
            biorth_defect: f64::NAN,
            defective: true,
        });
    };
    if split <= 1e-8 * scale {
        return Ok(Eigenvectors {
            right,
            left,
            biorth_defect: f64::NAN,
            defective: true,
        });
    }
    let (right2, left2_raw) = null_pair(&m, other);
    let defect = match normalise_left(left2_raw, &right2) {
        Some(left2) => bilinear(&left, &right2)
            .norm()
            .max(bilinear(&left2, &right).norm()),
        None => f64::NAN,
    };
    Ok(Eigenvectors {
        right,
        left,
        biorth_defect: defect,
        defective: false,
    })
}

/// One self-consistent quasi-eigenvalue with its sheet tags and eigenvectors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModeBranch {
    pub label: BranchLabel,
    pub z: Complex64,
    pub sheets: SheetTag,
    pub right_vec: [Complex64; 2],
    pub left_vec: [Complex64; 2],
    pub residual: f64,
    pub exceptional: bool,
}

impl Serialize for ModeBranch {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ModeBranch", 6)?;
        st.serialize_field("label", &self.label)?;
        st.serialize_field("re", &self.z.re)?;
        st.serialize_field("im", &self.z.im)?;
        st.serialize_field("s1", &self.sheets.s1)?;
        st.serialize_field("s2", &self.sheets.s2)?;
        st.serialize_field("residual", &self.residual)?;
        st.end()
    }
}

impl ModeBranch {
    pub(crate) fn from_state(label: BranchLabel, v: &Lifted, p: &ModelParams) -> Result<Self> {
        let sheets = v.sheets(p);
        let residual = dispersion_residual(v.z, p, sheets)?.norm();
        let ev = eigenvectors(v.z, p, sheets)?;
        Ok(ModeBranch {
            label,
            z: v.z,
            sheets,
            right_vec: ev.right,
            left_vec: ev.left,
            residual,
            exceptional: ev.defective,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Modes {
    pub branches: [ModeBranch; 4],
    /// Pairs of branches closer than the collision tolerance.
    pub exceptional: Vec<(BranchLabel, BranchLabel)>,
    /// Largest relative residual of the radical-free polynomial over the
    /// four branches.
    pub polynomial_mismatch: f64,
}

impl Modes {
    pub fn get(&self, label: BranchLabel) -> &ModeBranch {
        &self.branches[label.index()]
    }
}

pub(crate) fn solve_at(p: &ModelParams, predictions: &[Lifted; 4]) -> Result<[Lifted; 4]> {
    let cands = census(p)?;
    assign(&cands, predictions).ok_or_else(|| Error::NoConvergence("fewer than four roots available".into()))
}

fn march<F>(states: [Lifted; 4], steps: usize, at: F) -> Result<[Lifted; 4]>
where
    F: Fn(f64) -> ModelParams,
{
    let mut cur = states;
    let mut prev: Option<([Lifted; 4], f64)> = None;
    let mut t = 0.0;
    let base = 1.0 / steps as f64;
    let mut h = base;
    let mut halvings = 0;
    while t < 1.0 {
        let next_t = (t + h).min(1.0);
        let dt = next_t - t;
        let pred: [Lifted; 4] = match prev {
            Some((ref pv, pdt)) => std::array::from_fn(|k| cur[k].extrapolate(&pv[k], dt / pdt)),
            None => cur,
        };
        match solve_at(&at(next_t), &pred) {
            Ok(next) => {
                prev = Some((cur, dt));
                cur = next;
                t = next_t;
                h = (h * 2.0).min(base);
                halvings = 0;
            }
            Err(e) => {
                halvings += 1;
                if halvings > MAX_HALVINGS {
                    return Err(e);
                }
                h *= 0.5;
            }
        }
    }
    Ok(cur)
}

/// Two-stage homotopy from the decoupled seeds: coupling first, then pump.
pub(crate) fn homotopy(p: &ModelParams, steps: usize) -> Result<[Lifted; 4]> {
    let seeds = unperturbed_seeds(p);
    let mut states = seeds.map(|s| Lifted {
        z: s.z,
        r1: s.r_annihilation,
        r2: s.r_creation,
    });
    if p.coupling > 0.0 {
        let unpumped = ModelParams { pump_amp: 0.0, ..*p };
        states = march(states, steps, |t| unpumped.with_coupling(p.coupling * t))?;
    }
    if p.pump_amp > 0.0 {
        states = march(states, steps, |t| ModelParams {
            pump_amp: p.pump_amp * t,
            ..*p
        })?;
    }
    Ok(states)
}

pub(crate) fn collisions(states: &[Lifted; 4]) -> Vec<(BranchLabel, BranchLabel)> {
    let mut out = Vec::new();
    for a in 0..4 {
        for b in a + 1..4 {
            if (states[a].z - states[b].z).norm() <= COLLISION * (1.0 + states[a].z.norm()) {
                out.push((BranchLabel::ALL[a], BranchLabel::ALL[b]));
            }
        }
    }
    out
}

fn polynomial_mismatch(p: &ModelParams, branches: &[ModeBranch; 4]) -> Result<f64> {
    if p.coupling == 0.0 {
        return Ok(0.0);
    }
    branches
        .iter()
        .map(|b| relative_residual(p, b.z))
        .try_fold(0.0, |acc: f64, r| r.map(|r| acc.max(r)))
}

/// Cavity frequency below the band and below the parametric window, where
/// the coupling and pump ramps meet no coalescence.
pub fn reference_cavity(p: &ModelParams) -> f64 {
    let margin = 0.5 * p.half_width.max(0.1);
    (p.band_center - p.half_width - margin).min(0.5 * p.pump_freq - p.pump_amp - margin)
}

/// Largest cavity step of the continuation from the reference frequency.
const CAVITY_STEP: f64 = 4e-3;

/// Ramps coupling and pump at the reference frequency, then continues in
/// the cavity frequency. Inside the band or the parametric window a direct
/// ramp can cross an exceptional point and land on the wrong sheets.
pub(crate) fn anchored(p: &ModelParams) -> Result<[Lifted; 4]> {
    let start = reference_cavity(p);
    if p.cavity <= start {
        return homotopy(p, RAMP_STEPS);
    }
    let states = homotopy(&p.with_cavity(start), RAMP_STEPS)?;
    let span = p.cavity - start;
    let steps = ((span / CAVITY_STEP).ceil() as usize).max(RAMP_STEPS);
    march(states, steps, |t| p.with_cavity(start + t * span))
}

/// The four branches continued from the decoupled seeds: coupling and pump
/// are switched on below the band, then the cavity frequency is moved to
/// its target.
pub fn solve_modes(p: &ModelParams) -> Result<Modes> {
    let report = validate_params(p);
    if !report.is_valid() {
        return Err(Error::InvalidParams(report.violations.join(", ")));
    }
    let states = anchored(p)?;
    let branches = branches_from(p, &states)?;
    let mismatch = polynomial_mismatch(p, &branches)?;
    if mismatch > 1e-8 {
        return Err(Error::NoConvergence(format!(
            "continued branch misses the polynomial by {mismatch:e}"
        )));
    }
    Ok(Modes {
        branches,
        exceptional: collisions(&states),
        polynomial_mismatch: mismatch,
    })
}

pub(crate) fn branches_from(p: &ModelParams, states: &[Lifted; 4]) -> Result<[ModeBranch; 4]> {
    let v: Vec<ModeBranch> = BranchLabel::ALL
        .iter()
        .zip(states)
        .map(|(&l, s)| ModeBranch::from_state(l, s, p))
        .collect::<Result<_>>()?;
    Ok([v[0], v[1], v[2], v[3]])
}
