//! Flat-band comparison model: the cavity sees a frequency-independent
//! damping `gamma` instead of the band self-energy.
//!
//! The damping enters the off-diagonal pump terms as well, which makes the
//! spectrum depend on the initial pump phase. The microscopic model has no
//! such dependence.

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize};

use crate::effective::Matrix2;
use crate::error::Result;
use crate::model::ModelParams;

pub const DEFAULT_GAMMA: f64 = 0.2;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhenomParams {
    #[serde(rename = "omega0")]
    pub cavity: f64,
    #[serde(rename = "Omega")]
    pub pump_freq: f64,
    #[serde(rename = "f0")]
    pub pump_amp: f64,
    #[serde(rename = "theta")]
    pub pump_phase: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
}

fn default_gamma() -> f64 {
    DEFAULT_GAMMA
}

impl PhenomParams {
    pub fn from_model(p: &ModelParams, gamma: f64) -> Self {
        PhenomParams {
            cavity: p.cavity,
            pump_freq: p.pump_freq,
            pump_amp: p.pump_amp,
            pump_phase: p.pump_phase,
            gamma,
        }
    }

    pub fn with_cavity(mut self, cavity: f64) -> Self {
        self.cavity = cavity;
        self
    }

    pub fn with_phase(mut self, theta: f64) -> Self {
        self.pump_phase = theta;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhenomLabel {
    Plus,
    Minus,
}

impl PhenomLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            PhenomLabel::Plus => "plus",
            PhenomLabel::Minus => "minus",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhenomBranch {
    pub label: PhenomLabel,
    pub z: Complex64,
}

impl Serialize for PhenomBranch {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("PhenomBranch", 3)?;
        st.serialize_field("label", &self.label)?;
        st.serialize_field("re", &self.z.re)?;
        st.serialize_field("im", &self.z.im)?;
        st.end()
    }
}

pub fn phenom_matrix(pp: &PhenomParams) -> Matrix2 {
    let i = Complex64::i();
    let half = 0.5 * pp.gamma;
    let pump = Complex64::from_polar(pp.pump_amp, pp.pump_phase);
    [
        [pp.cavity - pp.pump_freq + i * half, -i * pump - i * half],
        [-i * pump.conj() - i * half, -pp.cavity + i * half],
    ]
}

/// Imaginary parts closer than this are treated as equal when ordering.
const TIE: f64 = 1e-9;

fn ordered(mut z: [Complex64; 2]) -> [PhenomBranch; 2] {
    let tie = (z[0].im - z[1].im).abs() <= TIE * (1.0 + z[0].norm().max(z[1].norm()));
    if if tie { z[1].re > z[0].re } else { z[1].im > z[0].im } {
        z.swap(0, 1);
    }
    [
        PhenomBranch {
            label: PhenomLabel::Plus,
            z: z[0],
        },
        PhenomBranch {
            label: PhenomLabel::Minus,
            z: z[1],
        },
    ]
}

/// Eigenvalues from the quadratic formula, largest `Im z` first.
pub fn phenom_eigs_closed(pp: &PhenomParams) -> [PhenomBranch; 2] {
    let half = 0.5 * pp.gamma;
    let centre = Complex64::new(-0.5 * pp.pump_freq, half);
    let det = pp.cavity - 0.5 * pp.pump_freq;
    let radicand =
        det * det - (pp.pump_amp * pp.pump_amp + half * half + pp.gamma * pp.pump_amp * pp.pump_phase.cos());
    let root = Complex64::new(radicand, 0.0).sqrt();
    ordered([centre + root, centre - root])
}

/// Eigenvalues from a general dense eigensolver, same ordering.
pub fn phenom_eigs_numeric(pp: &PhenomParams) -> Result<[PhenomBranch; 2]> {
    Ok(ordered(crate::dense::eigenvalues_2x2(&phenom_matrix(pp))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::effective::leff_matrix;
    use crate::selfenergy::{Sheet, SheetTag};
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn centred(theta: f64) -> PhenomParams {
        PhenomParams {
            cavity: 4.0,
            pump_freq: 8.0,
            pump_amp: 0.2,
            pump_phase: theta,
            gamma: 0.2,
        }
    }

    #[test]
    fn dissipationless_limit_matches_bare_matrix() {
        let model = ModelParams {
            cavity: 3.3,
            band_center: 4.0,
            half_width: 1.0,
            pump_amp: 0.2,
            pump_phase: 0.0,
            pump_freq: 8.0,
            coupling: 0.0,
        };
        let pp = PhenomParams::from_model(&model, 0.0);
        let tags = SheetTag::new(Sheet::First, Sheet::First);
        assert_eq!(
            phenom_matrix(&pp),
            leff_matrix(c(-4.0, 0.0), &model, tags).unwrap()
        );
    }

    #[test]
    fn trace_is_phase_free() {
        for theta in [0.0, 1.0, PI / 2.0, PI, 5.0] {
            let m = phenom_matrix(&centred(theta));
            assert!((m[0][0] + m[1][1] - c(-8.0, 0.2)).norm() < 1e-15);
        }
    }

    #[test]
    fn half_turn_flips_pump_terms() {
        let a = phenom_matrix(&centred(0.0).with_phase(0.0));
        let b = phenom_matrix(&centred(0.0).with_phase(PI));
        let half = c(0.0, -0.1);
        assert!(((a[0][1] - half) + (b[0][1] - half)).norm() < 1e-15);
        assert!(((a[1][0] - half) + (b[1][0] - half)).norm() < 1e-15);
    }

    #[test]
    fn stationary_touch_at_opposite_phase() {
        let z = phenom_eigs_closed(&centred(PI));
        assert!((z[0].z - c(-4.0, 0.2)).norm() < 1e-15);
        assert!((z[1].z - c(-4.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn quadrature_phase_width() {
        let z = phenom_eigs_closed(&centred(PI / 2.0));
        let w = 0.05f64.sqrt();
        assert!((z[0].z.im - (0.1 + w)).abs() < 1e-15);
        assert!((z[1].z.im - (0.1 - w)).abs() < 1e-15);
    }

    #[test]
    fn undamped_unpumped_is_diagonal() {
        let pp = PhenomParams {
            cavity: 3.3,
            pump_freq: 8.0,
            pump_amp: 0.0,
            pump_phase: 0.7,
            gamma: 0.0,
        };
        let mut z: Vec<f64> = phenom_eigs_closed(&pp).iter().map(|b| b.z.re).collect();
        z.sort_by(f64::total_cmp);
        assert_eq!(z, vec![3.3 - 8.0, -3.3]);
    }

    #[test]
    fn phase_pathology_witness() {
        let a = phenom_eigs_closed(&centred(0.0));
        let b = phenom_eigs_closed(&centred(PI));
        assert!((a[0].z.im - b[0].z.im).abs() > 0.2 * 0.2 / 2.0);
    }

    #[test]
    fn labels_serialise() {
        let v = serde_json::to_value(phenom_eigs_closed(&centred(0.0))[1]).unwrap();
        assert_eq!(v["label"], "minus");
    }

    #[test]
    fn gamma_defaults_when_absent() {
        let pp: PhenomParams = serde_json::from_str(r#"{"omega0":4,"Omega":8,"f0":0.2,"theta":0}"#).unwrap();
        assert_eq!(pp.gamma, DEFAULT_GAMMA);
    }

    proptest! {
        #[test]
        fn closed_form_matches_eigensolver(
            w0 in 2.0f64..6.0, f0 in 0.0f64..0.5, theta in 0.0f64..6.3, gamma in 0.0f64..0.5,
        ) {
            let pp = PhenomParams { cavity: w0, pump_freq: 8.0, pump_amp: f0, pump_phase: theta, gamma };
            let a = phenom_eigs_closed(&pp);
            let b = phenom_eigs_numeric(&pp).unwrap();
            let direct = (a[0].z - b[0].z).norm().max((a[1].z - b[1].z).norm());
            let swapped = (a[0].z - b[1].z).norm().max((a[1].z - b[0].z).norm());
            prop_assert!(direct.min(swapped) < 1e-12);
        }

        #[test]
        fn imaginary_parts_sum_to_gamma(
            w0 in 2.0f64..6.0, f0 in 0.0f64..0.5, theta in 0.0f64..6.3, gamma in 0.0f64..0.5,
        ) {
            let pp = PhenomParams { cavity: w0, pump_freq: 8.0, pump_amp: f0, pump_phase: theta, gamma };
            let z = phenom_eigs_closed(&pp);
            prop_assert!((z[0].z.im + z[1].z.im - gamma).abs() < 1e-13);
        }
    }
}
