//! Dispersion relation lifted to `(z, r1, r2)` with the square roots as
//! unknowns. The lifted system stays regular when a root moves through a
//! branch cut, which the sheet-fixed form does not.

use num_complex::Complex64;

use super::poly::centred_roots;
use crate::error::{Error, Result};
use crate::model::{BranchLabel, ModelParams};
use crate::selfenergy::{branch_root, Sheet, SheetTag};

const MAX_NEWTON: usize = 60;
/// Jacobian singularity below which a lifted root is treated as double.
pub(crate) const DOUBLE_ROOT: f64 = 1e-7;
/// Candidates per branch kept for the exhaustive assignment.
const SHORTLIST: usize = 6;
/// Weight of the tie-break that sends a resonance into the upper half plane
/// when two assignments are equally close.
const RESONANCE_BIAS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct Lifted {
    pub z: Complex64,
    pub r1: Complex64,
    pub r2: Complex64,
}

impl Lifted {
    pub fn distance(&self, o: &Lifted) -> f64 {
        (self.z - o.z).norm() + (self.r1 - o.r1).norm() + (self.r2 - o.r2).norm()
    }

    pub fn lerp(&self, o: &Lifted, t: f64) -> Lifted {
        Lifted {
            z: self.z + (o.z - self.z) * t,
            r1: self.r1 + (o.r1 - self.r1) * t,
            r2: self.r2 + (o.r2 - self.r2) * t,
        }
    }

    /// Linear extrapolation to `t` given states at 0 (`self`) and -1 (`prev`).
    pub fn extrapolate(&self, prev: &Lifted, t: f64) -> Lifted {
        prev.lerp(self, 1.0 + t)
    }

    pub fn sheets(&self, p: &ModelParams) -> SheetTag {
        let b = p.half_width;
        SheetTag {
            s1: Sheet::of(p.x_annihilation(self.z), b, self.r1),
            s2: Sheet::of(p.x_creation(self.z), b, self.r2),
        }
    }

    pub fn on_sheets(z: Complex64, p: &ModelParams, sheets: SheetTag) -> Lifted {
        let b = p.half_width;
        Lifted {
            z,
            r1: sheets.s1.sign() * branch_root(p.x_annihilation(z), b),
            r2: sheets.s2.sign() * branch_root(p.x_creation(z), b),
        }
    }

    fn is_finite(&self) -> bool {
        [self.z, self.r1, self.r2]
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

pub(crate) fn residual(p: &ModelParams, v: &Lifted) -> [Complex64; 3] {
    let g2 = p.coupling * p.coupling;
    let b2 = p.half_width * p.half_width;
    let x1 = p.x_annihilation(v.z);
    let x2 = p.x_creation(v.z);
    let a = v.z + p.cavity + g2 * (x1 - v.r1);
    let c = v.z - p.cavity + p.pump_freq - g2 * (x2 - v.r2);
    [
        a * c + p.pump_amp * p.pump_amp,
        v.r1 * v.r1 - x1 * x1 + b2,
        v.r2 * v.r2 - x2 * x2 + b2,
    ]
}

fn norm_inf(f: &[Complex64; 3]) -> f64 {
    f.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

fn solve3(mut m: [[Complex64; 3]; 3], mut rhs: [Complex64; 3]) -> Option<[Complex64; 3]> {
    for col in 0..3 {
        let piv = (col..3).max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))?;
        if m[piv][col].norm() == 0.0 {
            return None;
        }
        m.swap(col, piv);
        rhs.swap(col, piv);
        for row in col + 1..3 {
            let f = m[row][col] / m[col][col];
            for k in col..3 {
                let t = m[col][k];
                m[row][k] -= f * t;
            }
            let t = rhs[col];
            rhs[row] -= f * t;
        }
    }
    let mut x = [Complex64::new(0.0, 0.0); 3];
    for row in (0..3).rev() {
        let mut s = rhs[row];
        for k in row + 1..3 {
            s -= m[row][k] * x[k];
        }
        x[row] = s / m[row][row];
    }
    Some(x)
}

/// Accepted residual of a lifted state.
pub(crate) fn tolerance(v: &Lifted) -> f64 {
    1e-11 * (1.0 + v.z.norm_sqr())
}

fn jacobian(p: &ModelParams, v: &Lifted) -> [[Complex64; 3]; 3] {
    let g2 = p.coupling * p.coupling;
    let x1 = p.x_annihilation(v.z);
    let x2 = p.x_creation(v.z);
    let a = v.z + p.cavity + g2 * (x1 - v.r1);
    let c = v.z - p.cavity + p.pump_freq - g2 * (x2 - v.r2);
    let one = 1.0 - g2;
    let zero = Complex64::new(0.0, 0.0);
    [
        [one * c + a * one, -g2 * c, g2 * a],
        [2.0 * x1, 2.0 * v.r1, zero],
        [-2.0 * x2, zero, 2.0 * v.r2],
    ]
}

/// `|det J|` over the product of its row norms; zero at a multiple root.
pub(crate) fn singularity(p: &ModelParams, v: &Lifted) -> f64 {
    let m = jacobian(p, v);
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    let rows: f64 = m
        .iter()
        .map(|r| r.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt())
        .product();
    if rows == 0.0 {
        0.0
    } else {
        det.norm() / rows
    }
}

pub(crate) fn newton(p: &ModelParams, start: Lifted) -> Result<Lifted> {
    let mut v = start;
    for _ in 0..MAX_NEWTON {
        let f = residual(p, &v);
        if norm_inf(&f) == 0.0 {
            return Ok(v);
        }
        let Some(d) = solve3(jacobian(p, &v), [-f[0], -f[1], -f[2]]) else {
            break;
        };
        let next = Lifted {
            z: v.z + d[0],
            r1: v.r1 + d[1],
            r2: v.r2 + d[2],
        };
        if !next.is_finite() {
            break;
        }
        let step = d.iter().map(|c| c.norm()).fold(0.0, f64::max);
        v = next;
        let scale = 1.0 + v.z.norm() + v.r1.norm() + v.r2.norm();
        if step <= 1e-15 * scale {
            break;
        }
    }
    if norm_inf(&residual(p, &v)) <= tolerance(&v) {
        Ok(v)
    } else {
        Err(Error::NoConvergence(format!(
            "lifted Newton from z = {} stalled at z = {}",
            start.z, v.z
        )))
    }
}

/// A lifted root with the number of polynomial roots that landed on it.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Candidate {
    pub state: Lifted,
    pub multiplicity: usize,
}

fn quadratic_roots(p: &ModelParams) -> Vec<Complex64> {
    let half = 0.5 * p.pump_freq;
    let d = Complex64::new((p.cavity - half).powi(2) - p.pump_amp * p.pump_amp, 0.0).sqrt();
    vec![-half + d, -half - d]
}

/// Every solution of the lifted system, seeded from the polynomial roots
/// on all four sheet combinations.
pub(crate) fn census(p: &ModelParams) -> Result<Vec<Candidate>> {
    let zs = if p.coupling == 0.0 {
        quadratic_roots(p)
    } else {
        centred_roots(p)?
    };
    let mut found: Vec<(usize, Lifted)> = Vec::new();
    for (j, &z) in zs.iter().enumerate() {
        for tag in SheetTag::ALL {
            let start = Lifted::on_sheets(z, p, tag);
            let polished = match newton(p, start) {
                Ok(v) => v,
                Err(_) if norm_inf(&residual(p, &start)) <= 1e-9 => start,
                Err(_) => continue,
            };
            found.push((j, polished));
        }
    }
    // a state reached from two polynomial roots counts twice only if it is
    // a genuine double root
    let mut out: Vec<Candidate> = Vec::new();
    let mut sources: Vec<Vec<usize>> = Vec::new();
    for (j, v) in found {
        let scale = 1.0 + v.z.norm();
        match out.iter().position(|c| c.state.distance(&v) <= 1e-9 * scale) {
            Some(k) => {
                if !sources[k].contains(&j) {
                    sources[k].push(j);
                    if singularity(p, &out[k].state) < DOUBLE_ROOT {
                        out[k].multiplicity = sources[k].len().min(2);
                    }
                }
            }
            None => {
                out.push(Candidate {
                    state: v,
                    multiplicity: 1,
                });
                sources.push(vec![j]);
            }
        }
    }
    if out.is_empty() {
        return Err(Error::NoConvergence("no root survived polishing".into()));
    }
    Ok(out)
}

/// Assigns one candidate to each predicted state, minimising the summed
/// distance. A candidate may be used as often as its multiplicity.
pub(crate) fn assign(candidates: &[Candidate], predictions: &[Lifted; 4]) -> Option<[Lifted; 4]> {
    let cost = |i: usize, c: &Candidate| {
        let mut d = predictions[i].distance(&c.state);
        if BranchLabel::ALL[i].is_resonance() {
            d -= RESONANCE_BIAS * c.state.z.im;
        }
        d
    };
    let shortlist: Vec<Vec<(usize, f64)>> = (0..4)
        .map(|i| {
            let mut v: Vec<(usize, f64)> = candidates
                .iter()
                .enumerate()
                .map(|(k, c)| (k, cost(i, c)))
                .collect();
            v.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            v.truncate(SHORTLIST);
            v
        })
        .collect();

    let mut best: Option<(f64, [usize; 4])> = None;
    let mut used = vec![0usize; candidates.len()];
    fn walk(
        i: usize,
        acc: f64,
        pick: &mut [usize; 4],
        used: &mut [usize],
        shortlist: &[Vec<(usize, f64)>],
        candidates: &[Candidate],
        best: &mut Option<(f64, [usize; 4])>,
    ) {
        if i == 4 {
            if best.is_none_or(|(b, _)| acc < b) {
                *best = Some((acc, *pick));
            }
            return;
        }
        for &(k, c) in &shortlist[i] {
            if used[k] >= candidates[k].multiplicity {
                continue;
            }
            used[k] += 1;
            pick[i] = k;
            walk(i + 1, acc + c, pick, used, shortlist, candidates, best);
            used[k] -= 1;
        }
    }
    let mut pick = [0usize; 4];
    walk(0, 0.0, &mut pick, &mut used, &shortlist, candidates, &mut best);
    best.map(|(_, idx)| idx.map(|k| candidates[k].state))
}
