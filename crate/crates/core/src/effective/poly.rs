use num_complex::Complex64;

use super::dispersion_residual;
use super::lifted::{newton, singularity, Lifted, DOUBLE_ROOT};
use crate::error::{Error, Result};
use crate::model::ModelParams;
use crate::selfenergy::SheetTag;

/// Residual below which a root is accepted on a sheet combination.
pub const SHEET_TOLERANCE: f64 = 1e-9;

/// Largest relative distance between a polynomial root and the polished
/// solution it is paired with.
const REACH: f64 = 1e-2;

/// Dense polynomial, coefficients in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly(pub Vec<Complex64>);

impl Poly {
    pub fn real(c: &[f64]) -> Self {
        Poly(c.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.0
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let mut p = zero;
        let mut dp = zero;
        for &c in self.0.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        let get = |v: &Vec<Complex64>, i: usize| v.get(i).copied().unwrap_or_default();
        Poly((0..n).map(|i| get(&self.0, i) + get(&o.0, i)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.0.is_empty() || o.0.is_empty() {
            return Poly(Vec::new());
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.0.len() + o.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            for (j, &b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn max_coeff(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

/// Radical-free form of the dispersion relation.
#[derive(Clone, Debug, PartialEq)]
pub struct DispersionPolynomial {
    pub coeffs: [Complex64; 9],
    /// The same relation in `u = z - centre`, built directly in `u`.
    centre: f64,
    centred: Poly,
}

impl DispersionPolynomial {
    pub fn as_poly(&self) -> Poly {
        Poly(self.coeffs.to_vec())
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.as_poly().eval(z)
    }

    pub fn max_coeff(&self) -> f64 {
        self.as_poly().max_coeff()
    }
}

/// Writes the relation as `(P + Q r1)(R + S r2) + f0^2 = 0` with
/// `r1^2 = D1`, `r2^2 = D2`, isolates `r1`, squares, isolates `r2` and
/// squares again.
pub fn dispersion_polynomial(p: &ModelParams) -> Result<DispersionPolynomial> {
    let poly = build(p, 0.0)?;
    let mut coeffs = [Complex64::new(0.0, 0.0); 9];
    for (dst, src) in coeffs.iter_mut().zip(poly.0.iter()) {
        *dst = *src;
    }
    let centre = -0.5 * p.pump_freq;
    Ok(DispersionPolynomial {
        coeffs,
        centre,
        centred: build(p, centre)?,
    })
}

/// The relation in the variable `u = z - shift`.
fn build(p: &ModelParams, shift: f64) -> Result<Poly> {
    let g2 = p.coupling * p.coupling;
    if g2 == 0.0 {
        return Err(Error::Degenerate(
            "g = 0 reduces the relation to a quadratic; use the closed form".into(),
        ));
    }
    let b2 = p.half_width * p.half_width;
    let wb = p.band_center;
    // x1 = -z - wb, x2 = z + Omega - wb
    let x1 = Poly::real(&[-shift - wb, -1.0]);
    let x2 = Poly::real(&[shift + p.pump_freq - wb, 1.0]);
    let pp = Poly::real(&[shift + p.cavity, 1.0]).add(&x1.scale(g2));
    let q = Poly::real(&[-g2]);
    let r = Poly::real(&[shift + p.pump_freq - p.cavity, 1.0]).sub(&x2.scale(g2));
    let s = Poly::real(&[g2]);
    let d1 = x1.mul(&x1).sub(&Poly::real(&[b2]));
    let d2 = x2.mul(&x2).sub(&Poly::real(&[b2]));
    let a = pp.mul(&r).add(&Poly::real(&[p.pump_amp * p.pump_amp]));

    let ps = pp.mul(&s);
    let qr = q.mul(&r);
    let qs = q.mul(&s);
    let t0 = a
        .mul(&a)
        .add(&ps.mul(&ps).mul(&d2))
        .sub(&d1.mul(&qr.mul(&qr).add(&qs.mul(&qs).mul(&d2))));
    let t1 = a.mul(&ps).scale(2.0).sub(&d1.mul(&qr).mul(&qs).scale(2.0));
    Ok(t0.mul(&t0).sub(&d2.mul(&t1).mul(&t1)))
}

/// Roots computed about `z = -Omega/2`, where the spectrum is centred.
/// Better conditioned than rooting the raw coefficients.
pub(crate) fn centred_roots(p: &ModelParams) -> Result<Vec<Complex64>> {
    Ok(polynomial_roots(&dispersion_polynomial(p)?)?.to_vec())
}

pub fn polynomial_roots(poly: &DispersionPolynomial) -> Result<[Complex64; 8]> {
    let r = roots(&poly.centred)?;
    let mut out = [Complex64::new(0.0, 0.0); 8];
    for (dst, u) in out.iter_mut().zip(r) {
        *dst = u + poly.centre;
    }
    out.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(out)
}

/// All roots by Aberth-Ehrlich iteration followed by Newton polishing,
/// sorted by real then imaginary part.
pub fn roots(poly: &Poly) -> Result<Vec<Complex64>> {
    let n = poly.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = poly.0[n];
    let scale = poly.max_coeff();
    if !(lead.norm() > 1e-14 * scale) || lead.norm() < f64::MIN_POSITIVE {
        return Err(Error::Scaling(lead.norm()));
    }
    let monic = Poly(poly.0.iter().map(|&c| c / lead).collect());

    // Circle around the root centroid, radius from the Fujiwara bound.
    let center = -monic.0[n - 1] / n as f64;
    let shifted_bound = (0..n)
        .map(|k| monic.0[k].norm().powf(1.0 / (n - k) as f64))
        .fold(0.0, f64::max);
    let radius = (2.0 * shifted_bound).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let phi = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            center + Complex64::from_polar(radius, phi)
        })
        .collect();

    let mut converged = vec![false; n];
    for _ in 0..1000 {
        let mut all = true;
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let (pv, dp) = monic.eval_with_derivative(z[i]);
            if pv == Complex64::new(0.0, 0.0) {
                converged[i] = true;
                continue;
            }
            let ratio = pv / dp;
            let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                continue;
            }
            z[i] -= step;
            if step.norm() <= 1e-15 * (1.0 + z[i].norm()) {
                converged[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }

    for zi in z.iter_mut() {
        let mut best = monic.eval(*zi).norm();
        for _ in 0..8 {
            let (pv, dp) = monic.eval_with_derivative(*zi);
            if dp.norm() == 0.0 {
                break;
            }
            let cand = *zi - pv / dp;
            let r = monic.eval(cand).norm();
            if r < best {
                best = r;
                *zi = cand;
            } else {
                break;
            }
        }
    }
    if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
        return Err(Error::NoConvergence("polynomial roots".into()));
    }
    z.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(z)
}

/// A polynomial root accepted on at least one sheet combination.
#[derive(Clone, Debug, PartialEq)]
pub struct TaggedRoot {
    pub root: Complex64,
    /// Root after Newton polishing on the sheet combination it lies on.
    pub z: Complex64,
    pub sheets: SheetTag,
    pub residual: f64,
    /// Every accepted combination with its residual, best first.
    pub accepted: Vec<(SheetTag, f64)>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Classification {
    pub tagged: Vec<TaggedRoot>,
    pub spurious: Vec<Complex64>,
}

/// `|P(z)|` relative to `max_k |c_k| max(1, |u|)^n` in the centred variable.
///
/// Scaling by the terms' moduli instead would break down at a double root
/// near `u = 0`, where every term is as small as the rounding in `c_0`.
pub(crate) fn relative_residual(p: &ModelParams, z: Complex64) -> Result<f64> {
    let shift = -0.5 * p.pump_freq;
    let poly = build(p, shift)?;
    let u = z - shift;
    let scale = poly.max_coeff() * u.norm().max(1.0).powi(poly.degree() as i32);
    Ok(poly.eval(u).norm() / scale.max(f64::MIN_POSITIVE))
}

/// Tags every root with the sheet combinations on which it solves the
/// transcendental relation.
///
/// Inside a tight cluster the polynomial locates its roots poorly, so each
/// root is first polished on all four sheet combinations. The distinct
/// solutions found this way are then handed out nearest first, one per root,
/// two for a genuine double root.
pub fn classify_roots(roots: &[Complex64], p: &ModelParams) -> Classification {
    let mut found: Vec<(Lifted, usize)> = Vec::new();
    for &root in roots {
        for tag in SheetTag::ALL {
            let Ok(v) = newton(p, Lifted::on_sheets(root, p, tag)) else {
                continue;
            };
            let scale = 1.0 + v.z.norm();
            if found.iter().any(|(s, _)| s.distance(&v) <= 1e-9 * scale) {
                continue;
            }
            let capacity = if singularity(p, &v) < DOUBLE_ROOT { 2 } else { 1 };
            found.push((v, capacity));
        }
    }

    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, root) in roots.iter().enumerate() {
        for (k, (v, _)) in found.iter().enumerate() {
            let d = (v.z - root).norm();
            if d <= REACH * (1.0 + root.norm()) {
                pairs.push((d, i, k));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut owner = vec![None; roots.len()];
    let mut used = vec![0usize; found.len()];
    for (_, i, k) in pairs {
        if owner[i].is_none() && used[k] < found[k].1 {
            owner[i] = Some(k);
            used[k] += 1;
        }
    }

    let mut out = Classification::default();
    for (&root, own) in roots.iter().zip(owner) {
        let Some(v) = own.map(|k| found[k].0) else {
            out.spurious.push(root);
            continue;
        };
        let sheets = v.sheets(p);
        let mut accepted: Vec<(SheetTag, f64)> = SheetTag::ALL
            .into_iter()
            .filter_map(|t| Some((t, dispersion_residual(v.z, p, t).ok()?.norm())))
            .filter(|&(_, r)| r < SHEET_TOLERANCE)
            .collect();
        accepted.sort_by(|a, b| a.1.total_cmp(&b.1));
        let Some(&(_, residual)) = accepted.iter().find(|a| a.0 == sheets) else {
            out.spurious.push(root);
            continue;
        };
        out.tagged.push(TaggedRoot {
            root,
            z: v.z,
            sheets,
            residual,
            accepted,
        });
    }
    out
}
