use num_complex::Complex64;
use serde::Serialize;

use super::{sweep_omega0, SweepTable};
use crate::effective::Lifted;
use crate::error::{Error, Result};
use crate::model::{BranchLabel, ModelParams, Sector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum EventKind {
    #[serde(rename = "resonance-EP")]
    ResonanceEp,
    #[serde(rename = "parametric-EP")]
    ParametricEp,
    #[serde(rename = "stationary")]
    Stationary,
    #[serde(rename = "multimode-stationary")]
    MultimodeStationary,
}

impl EventKind {
    pub fn is_stationary(self) -> bool {
        matches!(self, EventKind::Stationary | EventKind::MultimodeStationary)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BifurcationEvent {
    pub kind: EventKind,
    pub omega0_loc: f64,
    pub branches: Vec<BranchLabel>,
    pub z_at: Vec<Complex64>,
    /// Eigenvalue gap for an exceptional point, `|Im z|` for a stationary
    /// crossing, both at `omega0_loc`.
    pub defect: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EventOptions {
    /// Largest refined gap accepted as an exceptional point.
    pub ep_gap: f64,
    pub stationary_tol: f64,
    /// `|Im z|` below this counts as neither sign.
    pub deadband: f64,
    /// Events of one kind closer than this are merged.
    pub merge: f64,
    /// `|Re z + Omega/2|` below this marks a branch as parametrically locked.
    pub lock: f64,
}

impl Default for EventOptions {
    fn default() -> Self {
        EventOptions {
            ep_gap: 1e-4,
            stationary_tol: 1e-10,
            deadband: 1e-9,
            merge: 1e-6,
            lock: 1e-6,
        }
    }
}

pub fn detect_bifurcations(table: &SweepTable) -> Vec<BifurcationEvent> {
    detect_bifurcations_with(table, &EventOptions::default())
}

pub fn detect_bifurcations_with(table: &SweepTable, opts: &EventOptions) -> Vec<BifurcationEvent> {
    if table.len() < 3 {
        return Vec::new();
    }
    let mut events = exceptional_points(table, opts);
    events.extend(stationary_points(table, opts));
    merge(events, opts.merge)
}

fn solved_triples(table: &SweepTable) -> Vec<[usize; 3]> {
    let good: Vec<usize> = (0..table.len()).filter(|&k| table.states[k].is_some()).collect();
    good.windows(3).map(|w| [w[0], w[1], w[2]]).collect()
}

fn exceptional_points(table: &SweepTable, opts: &EventOptions) -> Vec<BifurcationEvent> {
    let mut out = Vec::new();
    let triples = solved_triples(table);
    for a in 0..4 {
        for b in a + 1..4 {
            let gap = |k: usize| {
                let s = table.states[k].unwrap();
                s[a].z - s[b].z
            };
            for &[i, j, k] in &triples {
                let (di, dj, dk) = (gap(i), gap(j), gap(k));
                let local_min = dj.norm() <= di.norm() && dj.norm() < dk.norm();
                let turns = (di * di * (dk * dk).conj()).re < 0.0;
                let rises = di.norm().max(dk.norm()) > opts.ep_gap;
                if !(local_min && turns && rises) {
                    continue;
                }
                let Some((w, s, d)) = refine_gap(table, a, b, table.axis[i], table.axis[k]) else {
                    continue;
                };
                if d >= opts.ep_gap {
                    continue;
                }
                let (la, lb) = (BranchLabel::ALL[a], BranchLabel::ALL[b]);
                out.push(BifurcationEvent {
                    kind: if la.sector() == lb.sector() {
                        EventKind::ResonanceEp
                    } else {
                        EventKind::ParametricEp
                    },
                    omega0_loc: w,
                    branches: vec![la, lb],
                    z_at: vec![s[a].z, s[b].z],
                    defect: d,
                });
            }
        }
    }
    out
}

/// Bisection on the squared gap, which is analytic through the
/// coalescence and changes sign there.
fn refine_gap(table: &SweepTable, a: usize, b: usize, lo: f64, hi: f64) -> Option<(f64, [Lifted; 4], f64)> {
    let eval = |w: f64| -> Option<(Complex64, [Lifted; 4])> {
        let s = table.solve_near(w).ok()?;
        let d = s[a].z - s[b].z;
        Some((d * d, s))
    };
    let (d_lo, s_lo) = eval(lo)?;
    let (d_hi, s_hi) = eval(hi)?;
    let side = |d2: Complex64| (d2 * d_lo.conj()).re;
    if side(d_hi) >= 0.0 {
        return None;
    }
    let mut best = if d_lo.norm() <= d_hi.norm() {
        (lo, s_lo, d_lo.norm().sqrt())
    } else {
        (hi, s_hi, d_hi.norm().sqrt())
    };
    let (mut lo, mut hi) = (lo, hi);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        let (d, s) = eval(mid)?;
        if d.norm().sqrt() < best.2 {
            best = (mid, s, d.norm().sqrt());
        }
        if side(d) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(best)
}

fn sign(im: f64, deadband: f64) -> i8 {
    if im > deadband {
        1
    } else if im < -deadband {
        -1
    } else {
        0
    }
}

fn stationary_points(table: &SweepTable, opts: &EventOptions) -> Vec<BifurcationEvent> {
    let mut out = Vec::new();
    let good: Vec<usize> = (0..table.len()).filter(|&k| table.states[k].is_some()).collect();
    for (slot, label) in BranchLabel::ALL.into_iter().enumerate() {
        for w in good.windows(2) {
            let (i, j) = (w[0], w[1]);
            let si = sign(table.states[i].unwrap()[slot].z.im, opts.deadband);
            let sj = sign(table.states[j].unwrap()[slot].z.im, opts.deadband);
            if si * sj != -1 {
                continue;
            }
            let Some((w0, z)) = bisect_im(table, slot, table.axis[i], table.axis[j], opts.stationary_tol)
            else {
                continue;
            };
            out.push(BifurcationEvent {
                kind: stationary_kind(&table.params, label, z, opts.lock),
                omega0_loc: w0,
                branches: vec![label],
                z_at: vec![z],
                defect: z.im.abs(),
            });
        }
    }
    out
}

fn bisect_im(table: &SweepTable, slot: usize, lo: f64, hi: f64, tol: f64) -> Option<(f64, Complex64)> {
    let im_at = |w: f64| table.solve_near(w).ok().map(|s| s[slot].z);
    let z_lo = im_at(lo)?;
    let (mut lo, mut hi) = (lo, hi);
    let positive_lo = z_lo.im > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let z = im_at(mid)?;
        if z.im.abs() < tol {
            return Some((mid, z));
        }
        if mid <= lo.min(hi) || mid >= lo.max(hi) {
            break;
        }
        if (z.im > 0.0) == positive_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    None
}

/// A stationary crossing away from the parametric lock whose frequency
/// falls inside the band image of the other sector mixes cavity and band
/// quanta across sectors.
fn stationary_kind(p: &ModelParams, label: BranchLabel, z: Complex64, lock: f64) -> EventKind {
    let locked = (z.re + 0.5 * p.pump_freq).abs() <= lock;
    let cross = match label.sector() {
        Sector::Creation => p.x_annihilation(z),
        Sector::Annihilation => p.x_creation(z),
    };
    if !locked && cross.re.abs() < p.half_width {
        EventKind::MultimodeStationary
    } else {
        EventKind::Stationary
    }
}

fn merge(mut events: Vec<BifurcationEvent>, tol: f64) -> Vec<BifurcationEvent> {
    events.sort_by(|a, b| a.kind.cmp(&b.kind).then(a.omega0_loc.total_cmp(&b.omega0_loc)));
    let mut out: Vec<BifurcationEvent> = Vec::new();
    for e in events {
        match out.last_mut() {
            Some(m) if m.kind == e.kind && (m.omega0_loc - e.omega0_loc).abs() < tol => {
                for (l, z) in e.branches.iter().zip(&e.z_at) {
                    if !m.branches.contains(l) {
                        m.branches.push(*l);
                        m.z_at.push(*z);
                    }
                }
                m.defect = m.defect.max(e.defect);
            }
            _ => out.push(e),
        }
    }
    out.sort_by(|a, b| a.omega0_loc.total_cmp(&b.omega0_loc).then(a.kind.cmp(&b.kind)));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Stationary {
    pub omega0: f64,
    pub z: Complex64,
}

const BRACKET_POINTS: usize = 41;

/// Locates the `omega0` in `bracket` where the branch's `Im z` vanishes.
pub fn find_stationary(p: &ModelParams, label: BranchLabel, bracket: (f64, f64)) -> Result<Stationary> {
    let (lo, hi) = bracket;
    let fail = || Error::Bracketing {
        label: label.to_string(),
        lo,
        hi,
    };
    let opts = EventOptions::default();
    let table = sweep_omega0(p, lo, hi, BRACKET_POINTS)?;
    let slot = label.index();
    let good: Vec<usize> = (0..table.len()).filter(|&k| table.states[k].is_some()).collect();
    let pair = good.windows(2).find(|w| {
        let si = sign(table.states[w[0]].unwrap()[slot].z.im, opts.deadband);
        let sj = sign(table.states[w[1]].unwrap()[slot].z.im, opts.deadband);
        si * sj == -1
    });
    let w = pair.ok_or_else(fail)?;
    let (omega0, z) = bisect_im(
        &table,
        slot,
        table.axis[w[0]],
        table.axis[w[1]],
        opts.stationary_tol,
    )
    .ok_or_else(|| Error::NoConvergence(format!("Im z of {label} did not reach the tolerance")))?;
    Ok(Stationary { omega0, z })
}
