use serde::Serialize;

use super::Trajectory;
use crate::error::{Error, Result};

/// Fraction of the window dropped before fitting.
pub const DEFAULT_DISCARD: f64 = 0.2;

const UNDERFLOW: f64 = 1e-300;

/// Slope of `log|v(t)|`, i.e. `-Im z` of the dominant mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RateFit {
    pub rate: f64,
    pub stderr: f64,
    pub samples: usize,
}

pub fn fit_rate(traj: &Trajectory, component: usize, window: (f64, f64)) -> Result<RateFit> {
    fit_rate_with(traj, component, window, DEFAULT_DISCARD)
}

pub fn fit_rate_with(
    traj: &Trajectory,
    component: usize,
    window: (f64, f64),
    discard: f64,
) -> Result<RateFit> {
    let (lo, hi) = window;
    let t_end = traj.times.last().copied().unwrap_or(0.0);
    if !(lo >= 0.0 && hi > lo && hi <= t_end * (1.0 + 1e-12)) {
        return Err(Error::InvalidParams(format!(
            "fit window [{lo}, {hi}] not inside [0, {t_end}]"
        )));
    }
    if !(0.0..1.0).contains(&discard) {
        return Err(Error::InvalidParams(format!(
            "discard fraction {discard} not in [0, 1)"
        )));
    }
    let series = traj
        .series(component)
        .ok_or_else(|| Error::InvalidParams(format!("component {component} was not recorded")))?;
    let start = lo + discard * (hi - lo);
    let mut ts = Vec::new();
    let mut ys = Vec::new();
    for (&t, z) in traj.times.iter().zip(&series) {
        if t < start || t > hi {
            continue;
        }
        let a = z.norm();
        if !(a >= UNDERFLOW) {
            return Err(Error::Underflow(t));
        }
        ts.push(t);
        ys.push(a.ln());
    }
    let n = ts.len();
    if n < 3 {
        return Err(Error::InvalidParams(format!(
            "only {n} samples in the fit window"
        )));
    }
    let nf = n as f64;
    let tm = ts.iter().sum::<f64>() / nf;
    let ym = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = ts.iter().map(|t| (t - tm).powi(2)).sum();
    let sxy: f64 = ts.iter().zip(&ys).map(|(t, y)| (t - tm) * (y - ym)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = ts
        .iter()
        .zip(&ys)
        .map(|(t, y)| (y - ym - slope * (t - tm)).powi(2))
        .sum();
    Ok(RateFit {
        rate: slope,
        stderr: (ssr / (nf - 2.0) / sxx).sqrt(),
        samples: n,
    })
}
