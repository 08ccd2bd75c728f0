//! Brute-force lattice oracle.
//!
//! The band is replaced by `N` discrete modes on a midpoint grid in `k`.
//! The resulting finite Liouvillian can be integrated in time, which gives
//! decay and growth rates directly, or lifted to a truncated Floquet matrix
//! whose spectrum is compared with the effective branches.
//!
//! State vectors are ordered `[a*, a, b*_1, b_1, ..., b*_N, b_N]`. Floquet
//! matrices stack one such block per Floquet index, highest index first.

use std::f64::consts::PI;

use faer::Mat;
use num_complex::Complex64;
use serde::Serialize;

use crate::dense;
use crate::error::{Error, Result};
use crate::model::ModelParams;

mod fit;
mod floquet;

pub use fit::{fit_rate, fit_rate_with, RateFit, DEFAULT_DISCARD};
pub use floquet::{build_floquet_matrix, floquet_eigs, floquet_matrix_range, FloquetSpectrum, MAX_ENTRIES};

/// How the discrete couplings are normalised.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CouplingNorm {
    /// `g sin k_j sqrt(dk)`: the Riemann sum of the band integral.
    #[default]
    Literal,
    /// Literal couplings rescaled by `B / sqrt(2 pi)` so that the lattice
    /// self-energy tends to `g^2 sigma` with `sigma = x - sqrt(x^2 - B^2)`.
    MatchEffective,
}

impl CouplingNorm {
    fn factor(self, b: f64) -> f64 {
        match self {
            CouplingNorm::Literal => 1.0,
            CouplingNorm::MatchEffective => b / (2.0 * PI).sqrt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeModel {
    pub params: ModelParams,
    pub k: Vec<f64>,
    pub couplings: Vec<f64>,
    pub energies: Vec<f64>,
}

impl LatticeModel {
    /// A model with explicitly given band modes.
    pub fn from_modes(params: ModelParams, couplings: Vec<f64>, energies: Vec<f64>) -> Result<Self> {
        if couplings.is_empty() || couplings.len() != energies.len() {
            return Err(Error::InvalidParams(format!(
                "need matching non-empty coupling and energy lists, got {} and {}",
                couplings.len(),
                energies.len()
            )));
        }
        Ok(LatticeModel {
            params,
            k: Vec::new(),
            couplings,
            energies,
        })
    }

    /// Number of band modes.
    pub fn modes(&self) -> usize {
        self.couplings.len()
    }

    pub fn dim(&self) -> usize {
        2 * (self.modes() + 1)
    }

    /// `sum_j g_j^2`.
    pub fn coupling_weight(&self) -> f64 {
        self.couplings.iter().map(|g| g * g).sum()
    }

    /// Time after which a wave packet returns from the far end of the lattice.
    pub fn recurrence_time(&self) -> f64 {
        self.modes() as f64 / self.params.half_width
    }

    /// Largest step the integrator accepts.
    pub fn max_step(&self) -> f64 {
        let p = &self.params;
        let scale = p.cavity.abs().max(p.band_center + p.half_width).max(p.pump_freq);
        0.01 / scale
    }

    /// Unit vector on one component.
    pub fn unit(&self, index: usize) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.dim()];
        v[index] = Complex64::new(1.0, 0.0);
        v
    }

    /// The pump-free matrix.
    pub fn static_matrix(&self) -> Mat<Complex64> {
        let mut m = Mat::zeros(self.dim(), self.dim());
        fill_static(self, &mut m, 0, 0.0);
        m
    }

    fn pump(&self, t: f64) -> f64 {
        let p = &self.params;
        p.pump_amp * (p.pump_freq * t + p.pump_phase).sin()
    }
}

/// Discretises the band on `n` midpoint nodes with literal couplings.
pub fn build_lattice(p: &ModelParams, n: usize) -> Result<LatticeModel> {
    build_lattice_with(p, n, CouplingNorm::Literal)
}

pub fn build_lattice_with(p: &ModelParams, n: usize, norm: CouplingNorm) -> Result<LatticeModel> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("lattice needs N >= 2, got {n}")));
    }
    let dk = 2.0 * PI / n as f64;
    let scale = p.coupling * dk.sqrt() * norm.factor(p.half_width);
    let k: Vec<f64> = (0..n).map(|j| -PI + (j as f64 + 0.5) * dk).collect();
    let couplings = k.iter().map(|&k| scale * k.sin()).collect();
    let energies = k
        .iter()
        .map(|&k| p.band_center - p.half_width * k.cos())
        .collect();
    Ok(LatticeModel {
        params: *p,
        k,
        couplings,
        energies,
    })
}

/// `L(t) v`.
pub fn apply_liouvillian(m: &LatticeModel, t: f64, v: &[Complex64]) -> Result<Vec<Complex64>> {
    check_dim(m, v.len())?;
    let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
    apply_into(m, m.pump(t), v, &mut out);
    Ok(out)
}

fn check_dim(m: &LatticeModel, got: usize) -> Result<()> {
    if got != m.dim() {
        return Err(Error::Dimension {
            expected: m.dim(),
            got,
        });
    }
    Ok(())
}

fn apply_into(m: &LatticeModel, f: f64, v: &[Complex64], out: &mut [Complex64]) {
    let w0 = m.params.cavity;
    let (ac, a) = (v[0], v[1]);
    let mut sum_c = Complex64::new(0.0, 0.0);
    let mut sum_a = Complex64::new(0.0, 0.0);
    for (j, (&g, &w)) in m.couplings.iter().zip(&m.energies).enumerate() {
        let (bc, b) = (v[2 + 2 * j], v[3 + 2 * j]);
        sum_c += g * bc;
        sum_a += g * b;
        out[2 + 2 * j] = g * ac + w * bc;
        out[3 + 2 * j] = -g * a - w * b;
    }
    out[0] = (w0 + 2.0 * f) * ac + 2.0 * f * a + sum_c;
    out[1] = -2.0 * f * ac - (w0 + 2.0 * f) * a - sum_a;
}

/// Writes the time-independent part minus `shift` on the diagonal into the
/// block starting at `offset`.
fn fill_static(m: &LatticeModel, out: &mut Mat<Complex64>, offset: usize, shift: f64) {
    let c = |x: f64| Complex64::new(x, 0.0);
    let w0 = m.params.cavity;
    out[(offset, offset)] = c(w0 - shift);
    out[(offset + 1, offset + 1)] = c(-w0 - shift);
    for (j, (&g, &w)) in m.couplings.iter().zip(&m.energies).enumerate() {
        let bc = offset + 2 + 2 * j;
        let b = bc + 1;
        out[(offset, bc)] = c(g);
        out[(bc, offset)] = c(g);
        out[(offset + 1, b)] = c(-g);
        out[(b, offset + 1)] = c(-g);
        out[(bc, bc)] = c(w - shift);
        out[(b, b)] = c(-w - shift);
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropagateOptions {
    pub dt: f64,
    pub t_max: f64,
    /// Steps between stored samples.
    pub stride: usize,
    /// State indices recorded in the trajectory.
    pub components: Vec<usize>,
}

impl PropagateOptions {
    pub fn new(t_max: f64, dt: f64) -> Self {
        PropagateOptions {
            dt,
            t_max,
            stride: 100,
            components: vec![0, 1],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// One row per sample, one entry per tracked component.
    pub amplitudes: Vec<Vec<Complex64>>,
    pub components: Vec<usize>,
    /// State at `t_max`.
    pub last: Vec<Complex64>,
    pub warning: Option<String>,
}

impl Trajectory {
    pub fn series(&self, component: usize) -> Option<Vec<Complex64>> {
        let col = self.components.iter().position(|&c| c == component)?;
        Some(self.amplitudes.iter().map(|row| row[col]).collect())
    }
}

/// RK4 integration of `-i dv/dt = L(t) v`, cavity components sampled every
/// 100 steps.
pub fn propagate(m: &LatticeModel, v0: &[Complex64], t_max: f64, dt: f64) -> Result<Trajectory> {
    propagate_with(m, v0, &PropagateOptions::new(t_max, dt))
}

pub fn propagate_with(m: &LatticeModel, v0: &[Complex64], opts: &PropagateOptions) -> Result<Trajectory> {
    check_dim(m, v0.len())?;
    let bound = m.max_step();
    if !(opts.dt > 0.0) || opts.dt > bound {
        return Err(Error::Stability { dt: opts.dt, bound });
    }
    if !(opts.t_max > 0.0) || !opts.t_max.is_finite() {
        return Err(Error::InvalidParams(format!(
            "t_max must be positive, got {}",
            opts.t_max
        )));
    }
    if let Some(&c) = opts.components.iter().find(|&&c| c >= m.dim()) {
        return Err(Error::Dimension {
            expected: m.dim(),
            got: c + 1,
        });
    }
    let stride = opts.stride.max(1);
    let steps = (opts.t_max / opts.dt).round() as usize;
    let warning = (opts.t_max >= m.recurrence_time()).then(|| {
        format!(
            "t_max = {} reaches the lattice recurrence time {}",
            opts.t_max,
            m.recurrence_time()
        )
    });

    let dim = m.dim();
    let zero = Complex64::new(0.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let mut v = v0.to_vec();
    let mut k = [vec![zero; dim], vec![zero; dim], vec![zero; dim], vec![zero; dim]];
    let mut tmp = vec![zero; dim];
    let mut times = Vec::with_capacity(steps / stride + 1);
    let mut amplitudes = Vec::with_capacity(steps / stride + 1);
    let sample = |v: &[Complex64]| opts.components.iter().map(|&c| v[c]).collect::<Vec<_>>();
    times.push(0.0);
    amplitudes.push(sample(&v));

    let h = opts.dt;
    for step in 0..steps {
        let t = step as f64 * h;
        let (f0, fm, f1) = (m.pump(t), m.pump(t + 0.5 * h), m.pump(t + h));

        apply_into(m, f0, &v, &mut k[0]);
        for (x, (vi, ki)) in tmp.iter_mut().zip(v.iter().zip(&k[0])) {
            *x = vi + 0.5 * h * i * ki;
        }
        apply_into(m, fm, &tmp, &mut k[1]);
        for (x, (vi, ki)) in tmp.iter_mut().zip(v.iter().zip(&k[1])) {
            *x = vi + 0.5 * h * i * ki;
        }
        apply_into(m, fm, &tmp, &mut k[2]);
        for (x, (vi, ki)) in tmp.iter_mut().zip(v.iter().zip(&k[2])) {
            *x = vi + h * i * ki;
        }
        apply_into(m, f1, &tmp, &mut k[3]);
        for (j, vi) in v.iter_mut().enumerate() {
            *vi += h / 6.0 * i * (k[0][j] + 2.0 * k[1][j] + 2.0 * k[2][j] + k[3][j]);
        }

        if (step + 1) % stride == 0 {
            times.push((step + 1) as f64 * h);
            amplitudes.push(sample(&v));
        }
    }
    if amplitudes.iter().flatten().any(|z| !z.is_finite()) {
        return Err(Error::NoConvergence("trajectory left the finite range".into()));
    }
    Ok(Trajectory {
        times,
        amplitudes,
        components: opts.components.clone(),
        last: v,
        warning,
    })
}

/// Envelope rate of the cavity creation amplitude started from `a*`.
pub fn cavity_rate(m: &LatticeModel, t_max: f64, dt: f64) -> Result<RateFit> {
    let traj = propagate(m, &m.unit(0), t_max, dt)?;
    fit_rate(&traj, 0, (0.0, t_max))
}

/// Oracle result next to the effective eigenvalue it is compared with.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub omega0: f64,
    pub z_eff: Complex64,
    pub rate_oracle: f64,
    pub stderr: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub dt: f64,
}

pub(crate) fn eigenvalues(m: &Mat<Complex64>) -> Result<Vec<Complex64>> {
    dense::eigenvalues(m).map_err(|e| {
        let norm = m.as_ref().norm_l2();
        Error::Eigen(format!("{e} (dimension {}, Frobenius norm {norm:e})", m.nrows()))
    })
}
