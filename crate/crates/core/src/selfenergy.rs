//! Band self-energy `sigma(x) = x - sqrt(x^2 - B^2)` with `x` measured from
//! the band center.
//!
//! The square root is `sqrt(x - B) * sqrt(x + B)` with principal factors,
//! which puts the cut on the segment `[-B, B]` and makes it behave like `x`
//! at infinity. On the first sheet `sigma` decays as `B^2 / 2x`; the second
//! sheet is the continuation through the cut. A real `x` with a `+0.0`
//! imaginary part is evaluated on the upper rim of the cut, `-0.0` on the
//! lower rim.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distance from `+-B` inside which the root term is treated as zero.
pub const BRANCH_POINT_GUARD: f64 = 1e-12;

const MIN_PANELS: usize = 16_384;
const MAX_PANELS: usize = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sheet {
    First,
    Second,
}

impl Sheet {
    pub fn sign(self) -> f64 {
        match self {
            Sheet::First => 1.0,
            Sheet::Second => -1.0,
        }
    }

    pub fn from_sign(s: i8) -> Option<Self> {
        match s {
            1 => Some(Sheet::First),
            -1 => Some(Sheet::Second),
            _ => None,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sheet::First => Sheet::Second,
            Sheet::Second => Sheet::First,
        }
    }

    /// Sheet on which `r` is the square-root value at `x`.
    pub fn of(x: Complex64, b: f64, r: Complex64) -> Self {
        let w = branch_root(x, b);
        if (r - w).norm() <= (r + w).norm() {
            Sheet::First
        } else {
            Sheet::Second
        }
    }
}

impl Serialize for Sheet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_i8(self.sign() as i8)
    }
}

impl<'de> Deserialize<'de> for Sheet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i8::deserialize(d)?;
        Sheet::from_sign(v).ok_or_else(|| serde::de::Error::custom("sheet must be +1 or -1"))
    }
}

/// Sheet selector for the two square roots of the dispersion relation.
/// `s1` belongs to the annihilation-sector argument `-z - omegaB`, `s2` to
/// the creation-sector argument `z + Omega - omegaB`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SheetTag {
    pub s1: Sheet,
    pub s2: Sheet,
}

impl SheetTag {
    pub const ALL: [SheetTag; 4] = [
        SheetTag::new(Sheet::First, Sheet::First),
        SheetTag::new(Sheet::First, Sheet::Second),
        SheetTag::new(Sheet::Second, Sheet::First),
        SheetTag::new(Sheet::Second, Sheet::Second),
    ];

    pub const fn new(s1: Sheet, s2: Sheet) -> Self {
        SheetTag { s1, s2 }
    }
}

impl fmt::Display for SheetTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = |s: Sheet| if s == Sheet::First { '+' } else { '-' };
        write!(f, "({},{})", c(self.s1), c(self.s2))
    }
}

/// `sqrt(x - B) * sqrt(x + B)` with principal roots.
pub fn branch_root(x: Complex64, b: f64) -> Complex64 {
    (x - b).sqrt() * (x + b).sqrt()
}

fn near_branch_point(x: Complex64, b: f64) -> bool {
    (x - b).norm() < BRANCH_POINT_GUARD || (x + b).norm() < BRANCH_POINT_GUARD
}

fn check_width(b: f64) -> Result<()> {
    if b > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("half-bandwidth must be positive, got {b}")))
    }
}

pub fn sigma(x: Complex64, b: f64, sheet: Sheet) -> Result<Complex64> {
    check_width(b)?;
    if near_branch_point(x, b) {
        return Ok(x);
    }
    Ok(x - sheet.sign() * branch_root(x, b))
}

pub fn sigma_prime(x: Complex64, b: f64, sheet: Sheet) -> Result<Complex64> {
    check_width(b)?;
    if near_branch_point(x, b) {
        return Err(Error::BranchPoint(x));
    }
    Ok(1.0 - sheet.sign() * x / branch_root(x, b))
}

/// Direct quadrature of `int_{-pi}^{pi} sin^2 k / (x + B cos k) dk`.
///
/// The integrand is periodic, so the composite trapezoid rule converges
/// geometrically; panels are doubled until two estimates agree to 1e-12.
pub fn sigma_quadrature(x: Complex64, b: f64) -> Result<Complex64> {
    check_width(b)?;
    if x.im == 0.0 || !x.im.is_finite() || !x.re.is_finite() {
        return Err(Error::Domain(format!("quadrature needs Im x != 0, got {x}")));
    }
    let rule = |n: usize| -> Complex64 {
        let h = 2.0 * PI / n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let k = -PI + j as f64 * h;
            let s = k.sin();
            acc += s * s / (x + b * k.cos());
        }
        acc * h
    };
    let mut n = MIN_PANELS;
    let mut prev = rule(n);
    while n < MAX_PANELS {
        n *= 2;
        let next = rule(n);
        if (next - prev).norm() <= 1e-12 * next.norm() {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::NoConvergence(format!(
        "quadrature at x = {x} did not settle with {n} panels"
    )))
}

/// Ratio between the direct integral and the closed form used in the solver.
pub fn quadrature_prefactor(b: f64) -> f64 {
    2.0 * PI / (b * b)
}

/// The closed-form kernel scaled by a constant prefactor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Kernel {
    pub prefactor: f64,
}

impl Default for Kernel {
    fn default() -> Self {
        Kernel { prefactor: 1.0 }
    }
}

impl Kernel {
    /// Normalisation that matches [`sigma_quadrature`].
    pub fn integral(b: f64) -> Self {
        Kernel {
            prefactor: quadrature_prefactor(b),
        }
    }

    pub fn eval(&self, x: Complex64, b: f64, sheet: Sheet) -> Result<Complex64> {
        Ok(self.prefactor * sigma(x, b, sheet)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn branch_point_value() {
        assert_eq!(sigma(c(1.0, 0.0), 1.0, Sheet::First).unwrap(), c(1.0, 0.0));
        assert_eq!(sigma(c(-1.0, 0.0), 1.0, Sheet::Second).unwrap(), c(-1.0, 0.0));
    }

    #[test]
    fn retarded_value_at_band_center() {
        let s = sigma(c(0.0, 0.0), 1.0, Sheet::First).unwrap();
        assert!((s - c(0.0, -1.0)).norm() < 1e-15);
        // lower rim
        let s = sigma(c(0.0, -0.0), 1.0, Sheet::First).unwrap();
        assert!((s - c(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn retarded_rim_inside_band() {
        for x in [-0.9, -0.3, 0.2, 0.75] {
            let s = sigma(c(x, 0.0), 1.0, Sheet::First).unwrap();
            let want = c(x, -(1.0f64 - x * x).sqrt());
            assert!((s - want).norm() < 1e-15);
        }
    }

    #[test]
    fn far_value() {
        let s = sigma(c(10.0, 0.0), 1.0, Sheet::First).unwrap();
        assert!((s.re - (10.0 - 99f64.sqrt())).abs() < 1e-15);
        assert!((s.re - 0.050126).abs() < 1e-6);
        assert_eq!(s.im, 0.0);
        let s = sigma(c(-10.0, 0.0), 1.0, Sheet::First).unwrap();
        assert!((s.re + 0.050126).abs() < 1e-6);
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let x = c(10.0, 0.0);
        let d = sigma_prime(x, 1.0, Sheet::First).unwrap();
        let h = 1e-6;
        let fd =
            (sigma(x + h, 1.0, Sheet::First).unwrap() - sigma(x - h, 1.0, Sheet::First).unwrap()) / (2.0 * h);
        assert!((d - fd).norm() < 1e-8);
        assert!((d.re + 0.005038).abs() < 1e-6);
    }

    #[test]
    fn derivative_at_band_center() {
        let d = sigma_prime(c(0.0, 0.0), 1.0, Sheet::First).unwrap();
        assert!((d - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn derivative_errors_at_branch_point() {
        assert!(matches!(
            sigma_prime(c(1.0, 0.0), 1.0, Sheet::First),
            Err(Error::BranchPoint(_))
        ));
        assert!(sigma_prime(c(-1.0 + 1e-13, 0.0), 1.0, Sheet::Second).is_err());
    }

    #[test]
    fn nonpositive_width_is_rejected() {
        assert!(matches!(
            sigma(c(0.5, 0.1), 0.0, Sheet::First),
            Err(Error::Domain(_))
        ));
        assert!(sigma_quadrature(c(0.5, 0.1), -1.0).is_err());
    }

    #[test]
    fn quadrature_rejects_real_axis() {
        assert!(sigma_quadrature(c(10.0, 0.0), 1.0).is_err());
        assert!(sigma_quadrature(c(10.0, 1e-6), 1.0).is_ok());
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let x = c(2.0, 0.5);
        let q = sigma_quadrature(x, 1.0).unwrap();
        let s = Kernel::integral(1.0).eval(x, 1.0, Sheet::First).unwrap();
        assert!((q - s).norm() / s.norm() < 1e-8);
    }

    #[test]
    fn quadrature_on_imaginary_axis() {
        let q = sigma_quadrature(c(0.0, 1.0), 1.0).unwrap();
        assert!(q.re.abs() < 1e-12);
        assert!(q.im < 0.0);
    }

    #[test]
    fn sheet_classification() {
        let x = c(0.3, 0.2);
        let w = branch_root(x, 1.0);
        assert_eq!(Sheet::of(x, 1.0, w), Sheet::First);
        assert_eq!(Sheet::of(x, 1.0, -w), Sheet::Second);
    }

    #[test]
    fn sheet_serializes_as_sign() {
        assert_eq!(serde_json::to_string(&Sheet::Second).unwrap(), "-1");
        let t: SheetTag = serde_json::from_str(r#"{"s1":1,"s2":-1}"#).unwrap();
        assert_eq!(t, SheetTag::new(Sheet::First, Sheet::Second));
        assert!(serde_json::from_str::<Sheet>("0").is_err());
    }

    fn off_cut() -> impl Strategy<Value = Complex64> {
        (-5.0f64..5.0, -5.0f64..5.0)
            .prop_filter("off the cut", |(re, im)| im.abs() > 1e-3 || re.abs() > 1.0 + 1e-3)
            .prop_map(|(re, im)| c(re, im))
    }

    proptest! {
        #[test]
        fn schwarz_reflection(x in off_cut(), b in 0.2f64..3.0) {
            prop_assume!(x.im.abs() > 1e-3 || x.re.abs() > b + 1e-3);
            for sh in [Sheet::First, Sheet::Second] {
                let a = sigma(x.conj(), b, sh).unwrap();
                let e = sigma(x, b, sh).unwrap().conj();
                prop_assert!((a - e).norm() <= 1e-12 * (1.0 + e.norm()));
            }
        }

        #[test]
        fn sheets_sum_to_twice_identity(x in off_cut(), b in 0.2f64..3.0) {
            let s = sigma(x, b, Sheet::First).unwrap() + sigma(x, b, Sheet::Second).unwrap();
            prop_assert!((s - 2.0 * x).norm() <= 1e-12 * (1.0 + x.norm()));
        }

        #[test]
        fn second_sheet_continues_through_cut(u in -0.999f64..0.999, b in 0.2f64..3.0) {
            let x = u * b;
            let above = sigma(c(x, 1e-13), b, Sheet::First).unwrap();
            let below = sigma(c(x, -1e-13), b, Sheet::Second).unwrap();
            prop_assert!((above - below).norm() < 1e-10 * (1.0 + b));
        }

        #[test]
        fn far_field_asymptotics(r in 10.0f64..1e3, phi in 0.0f64..std::f64::consts::TAU, b in 0.2f64..2.0) {
            let x = Complex64::from_polar(r * b, phi);
            let s = sigma(x, b, Sheet::First).unwrap();
            let b2 = b * b;
            prop_assert!((s - b2 / (2.0 * x)).norm() <= b2 * b2 / x.norm().powi(3));
        }
    }
}
