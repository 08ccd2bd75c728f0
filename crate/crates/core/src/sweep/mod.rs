//! Continuation of the four branches along the cavity frequency, with
//! detection of exceptional points and stationary crossings.

mod events;

pub use events::{
    detect_bifurcations, detect_bifurcations_with, find_stationary, BifurcationEvent, EventKind,
    EventOptions, Stationary,
};

use num_complex::Complex64;
use serde::Serialize;

use crate::effective::{anchored, branches_from, census, solve_at, ModeBranch};
use crate::effective::{assign, Lifted};
use crate::error::{Error, Result};
use crate::model::{validate_params, BranchLabel, ModelParams};

/// Fraction of unsolved rows above which a sweep is refused.
pub const MAX_GAP_FRACTION: f64 = 0.1;
pub const DEFAULT_POINTS: usize = 401;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepOptions {
    /// Take the root census of every grid point in parallel. Assignment
    /// stays sequential, so the table is identical either way.
    pub parallel: bool,
    pub max_gap_fraction: f64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            parallel: false,
            max_gap_fraction: MAX_GAP_FRACTION,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepTable {
    /// Parameters of the sweep; `cavity` is overwritten by each grid value.
    pub params: ModelParams,
    pub axis: Vec<f64>,
    /// `None` marks a grid point where the solver failed.
    pub rows: Vec<Option<[ModeBranch; 4]>>,
    pub(crate) states: Vec<Option<[Lifted; 4]>>,
}

impl SweepTable {
    pub fn len(&self) -> usize {
        self.axis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axis.is_empty()
    }

    pub fn gaps(&self) -> usize {
        self.rows.iter().filter(|r| r.is_none()).count()
    }

    /// `z` of one branch along the axis.
    pub fn curve(&self, label: BranchLabel) -> Vec<Option<Complex64>> {
        self.rows
            .iter()
            .map(|r| r.as_ref().map(|b| b[label.index()].z))
            .collect()
    }

    pub fn records(&self) -> Vec<SweepRecord> {
        let mut out = Vec::with_capacity(4 * self.len());
        for (&omega0, row) in self.axis.iter().zip(&self.rows) {
            if let Some(row) = row {
                out.extend(row.iter().map(|b| SweepRecord { omega0, branch: *b }));
            }
        }
        out
    }

    /// Branch states interpolated linearly in the axis, as a prediction.
    pub(crate) fn predict(&self, omega0: f64) -> Option<[Lifted; 4]> {
        let good: Vec<usize> = (0..self.len()).filter(|&k| self.states[k].is_some()).collect();
        let first = *good.first()?;
        let at = |k: usize| self.states[k].unwrap();
        if good.len() == 1 {
            return Some(at(first));
        }
        let last = good[good.len() - 1];
        let seg = good
            .windows(2)
            .position(|w| (omega0 - self.axis[w[0]]) * (omega0 - self.axis[w[1]]) <= 0.0)
            .unwrap_or(
                if (omega0 - self.axis[first]).abs() < (omega0 - self.axis[last]).abs() {
                    0
                } else {
                    good.len() - 2
                },
            );
        let (a, b) = (good[seg], good[seg + 1]);
        let t = (omega0 - self.axis[a]) / (self.axis[b] - self.axis[a]);
        let (sa, sb) = (at(a), at(b));
        Some(std::array::from_fn(|i| sa[i].lerp(&sb[i], t)))
    }

    /// Solves at an arbitrary `omega0` continued from the table.
    pub(crate) fn solve_near(&self, omega0: f64) -> Result<[Lifted; 4]> {
        let pred = self
            .predict(omega0)
            .ok_or_else(|| Error::NoConvergence("table has no solved rows".into()))?;
        solve_at(&self.params.with_cavity(omega0), &pred)
    }
}

/// One CSV row: a branch at one grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub omega0: f64,
    #[serde(flatten)]
    pub branch: ModeBranch,
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n <= 1 || lo == hi {
        return vec![lo];
    }
    let step = (hi - lo) / (n - 1) as f64;
    (0..n)
        .map(|k| if k == n - 1 { hi } else { lo + step * k as f64 })
        .collect()
}

pub fn sweep_omega0(
    p: &ModelParams,
    omega0_min: f64,
    omega0_max: f64,
    n_points: usize,
) -> Result<SweepTable> {
    sweep_omega0_with(p, omega0_min, omega0_max, n_points, &SweepOptions::default())
}

/// Sweeps from `omega0_min` to `omega0_max`; the first grid value is the
/// continuation start, so swapping the bounds reverses the direction.
pub fn sweep_omega0_with(
    p: &ModelParams,
    omega0_min: f64,
    omega0_max: f64,
    n_points: usize,
    opts: &SweepOptions,
) -> Result<SweepTable> {
    let report = validate_params(p);
    if !report.is_valid() {
        return Err(Error::InvalidParams(report.violations.join(", ")));
    }
    if !omega0_min.is_finite() || !omega0_max.is_finite() {
        return Err(Error::InvalidParams("sweep bounds must be finite".into()));
    }
    if omega0_min != omega0_max && n_points < 2 {
        return Err(Error::InvalidParams("a sweep needs at least two points".into()));
    }
    let axis = linspace(omega0_min, omega0_max, n_points);
    let points: Vec<ModelParams> = axis.iter().map(|&w| p.with_cavity(w)).collect();
    let censuses = take_census(&points, opts.parallel);

    let mut states: Vec<Option<[Lifted; 4]>> = vec![None; axis.len()];
    let mut rows: Vec<Option<[ModeBranch; 4]>> = vec![None; axis.len()];
    let mut last: Vec<usize> = Vec::new();
    for k in 0..axis.len() {
        let solved = match last.as_slice() {
            [] => anchored(&points[k]),
            [j] => continue_from(&censuses[k], &states[*j].unwrap()),
            [.., i, j] => {
                let (si, sj) = (states[*i].unwrap(), states[*j].unwrap());
                let t = (axis[k] - axis[*j]) / (axis[*j] - axis[*i]);
                let pred = std::array::from_fn(|b| sj[b].extrapolate(&si[b], t));
                continue_from(&censuses[k], &pred)
            }
        };
        let Ok(s) = solved else { continue };
        let Ok(r) = branches_from(&points[k], &s) else {
            continue;
        };
        states[k] = Some(s);
        rows[k] = Some(r);
        last.push(k);
    }

    let table = SweepTable {
        params: *p,
        axis,
        rows,
        states,
    };
    let gaps = table.gaps();
    if gaps as f64 > opts.max_gap_fraction * table.len() as f64 || gaps == table.len() {
        return Err(Error::TooManyGaps {
            gaps,
            total: table.len(),
        });
    }
    Ok(table)
}

type Census = Result<Vec<crate::effective::Candidate>>;

fn continue_from(census: &Census, pred: &[Lifted; 4]) -> Result<[Lifted; 4]> {
    let cands = census.as_ref().map_err(|e| Error::NoConvergence(e.to_string()))?;
    assign(cands, pred).ok_or_else(|| Error::NoConvergence("fewer than four roots available".into()))
}

#[cfg(feature = "parallel")]
fn take_census(points: &[ModelParams], parallel: bool) -> Vec<Census> {
    use rayon::prelude::*;
    if parallel {
        points.par_iter().map(census).collect()
    } else {
        points.iter().map(census).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn take_census(points: &[ModelParams], _parallel: bool) -> Vec<Census> {
    points.iter().map(census).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PumpWindow {
    /// Whether the cavity lies above the band, `omega0 > omegaB + B`.
    pub condition: bool,
    pub suggested: f64,
    /// `2 omega0 - 2B`; the suggested frequency is always below it.
    pub upper_bound: f64,
}

/// Pump frequency that reaches the band-edge stationary mode when the
/// cavity sits above the band.
pub fn multimode_pump_window(omega0: f64, omega_b: f64, b: f64) -> PumpWindow {
    PumpWindow {
        condition: omega0 > omega_b + b,
        suggested: 2.0 * omega0 - (omega0 - omega_b + b),
        upper_bound: 2.0 * omega0 - 2.0 * b,
    }
}
