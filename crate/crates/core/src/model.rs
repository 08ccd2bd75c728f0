//! Physical parameters and the decoupled (g = f0 = 0) spectrum.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::selfenergy::{branch_root, Sheet, SheetTag};

/// Default ratio for the rotating-frame truncation check `Omega - 2B >= ratio * f0`.
pub const TRUNCATION_RATIO: f64 = 10.0;

/// All frequencies are in units of the half-bandwidth unless stated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    #[serde(rename = "omega0")]
    pub cavity: f64,
    #[serde(rename = "omegaB")]
    pub band_center: f64,
    #[serde(rename = "B")]
    pub half_width: f64,
    #[serde(rename = "f0")]
    pub pump_amp: f64,
    #[serde(rename = "theta")]
    pub pump_phase: f64,
    #[serde(rename = "Omega")]
    pub pump_freq: f64,
    #[serde(rename = "g")]
    pub coupling: f64,
}

impl ModelParams {
    pub fn with_cavity(mut self, cavity: f64) -> Self {
        self.cavity = cavity;
        self
    }

    pub fn with_coupling(mut self, g: f64) -> Self {
        self.coupling = g;
        self
    }

    pub fn with_pump(mut self, amp: f64, phase: f64) -> Self {
        self.pump_amp = amp;
        self.pump_phase = phase;
        self
    }

    /// Cavity detuning from the band center.
    pub fn detuning(&self) -> f64 {
        self.cavity - self.band_center
    }

    /// Band-edge offset of the annihilation-sector argument: `-z - omegaB`.
    pub(crate) fn x_annihilation(&self, z: Complex64) -> Complex64 {
        -z - self.band_center
    }

    /// Band-edge offset of the creation-sector argument: `z + Omega - omegaB`.
    pub(crate) fn x_creation(&self, z: Complex64) -> Complex64 {
        z + (self.pump_freq - self.band_center)
    }

    fn fields(&self) -> [(&'static str, f64); 7] {
        [
            ("omega0", self.cavity),
            ("omegaB", self.band_center),
            ("B", self.half_width),
            ("f0", self.pump_amp),
            ("theta", self.pump_phase),
            ("Omega", self.pump_freq),
            ("g", self.coupling),
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
    pub truncation_ok: bool,
    /// `Omega - 2B - ratio * f0`; negative when the truncation is violated.
    pub truncation_margin: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn validate_params(p: &ModelParams) -> ValidationReport {
    validate_params_with(p, TRUNCATION_RATIO)
}

pub fn validate_params_with(p: &ModelParams, ratio: f64) -> ValidationReport {
    let mut violations = Vec::new();
    for (name, v) in p.fields() {
        if !v.is_finite() {
            violations.push(format!("{name} is not finite"));
        }
    }
    if p.half_width < 0.0 {
        violations.push("B >= 0".to_string());
    }
    if p.pump_amp < 0.0 {
        violations.push("f0 >= 0".to_string());
    }
    if p.coupling < 0.0 {
        violations.push("g >= 0".to_string());
    }
    if !(p.pump_freq > 0.0) {
        violations.push("Omega > 0".to_string());
    }
    let margin = p.pump_freq - 2.0 * p.half_width - ratio * p.pump_amp;
    ValidationReport {
        violations,
        truncation_ok: margin >= 0.0,
        truncation_margin: margin,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sector {
    Creation,
    Annihilation,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BranchLabel {
    CreationResonance,
    CreationAntiresonance,
    AnnihilationResonance,
    AnnihilationAntiresonance,
}

impl BranchLabel {
    pub const ALL: [BranchLabel; 4] = [
        BranchLabel::CreationResonance,
        BranchLabel::CreationAntiresonance,
        BranchLabel::AnnihilationResonance,
        BranchLabel::AnnihilationAntiresonance,
    ];

    pub fn sector(self) -> Sector {
        match self {
            BranchLabel::CreationResonance | BranchLabel::CreationAntiresonance => Sector::Creation,
            _ => Sector::Annihilation,
        }
    }

    pub fn is_resonance(self) -> bool {
        matches!(
            self,
            BranchLabel::CreationResonance | BranchLabel::AnnihilationResonance
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BranchLabel::CreationResonance => "creation-resonance",
            BranchLabel::CreationAntiresonance => "creation-antiresonance",
            BranchLabel::AnnihilationResonance => "annihilation-resonance",
            BranchLabel::AnnihilationAntiresonance => "annihilation-antiresonance",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for BranchLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BranchLabel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BranchLabel::ALL
            .into_iter()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| format!("unknown branch label {s:?}"))
    }
}

/// A decoupled root together with the square-root values it is continued with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Seed {
    pub label: BranchLabel,
    pub z: Complex64,
    pub sheets: SheetTag,
    pub(crate) r_annihilation: Complex64,
    pub(crate) r_creation: Complex64,
}

/// The four roots of the dispersion relation at `g = f0 = 0`.
///
/// Resonance seeds carry the retarded boundary values of both square roots,
/// antiresonance seeds their negatives. Inside the band this places a
/// resonance on the second sheet of its own sector.
pub fn unperturbed_seeds(p: &ModelParams) -> [Seed; 4] {
    let b = p.half_width;
    let below = |x: Complex64| Complex64::new(x.re, -0.0);
    let above = |x: Complex64| Complex64::new(x.re, 0.0);
    let make = |label: BranchLabel, z: Complex64| {
        let x1 = p.x_annihilation(z);
        let x2 = p.x_creation(z);
        let mut r1 = branch_root(above(x1), b);
        let mut r2 = branch_root(below(x2), b);
        if !label.is_resonance() {
            r1 = -r1;
            r2 = -r2;
        }
        Seed {
            label,
            z,
            sheets: SheetTag {
                s1: Sheet::of(x1, b, r1),
                s2: Sheet::of(x2, b, r2),
            },
            r_annihilation: r1,
            r_creation: r2,
        }
    };
    let zc = Complex64::new(p.cavity - p.pump_freq, 0.0);
    let za = Complex64::new(-p.cavity, 0.0);
    [
        make(BranchLabel::CreationResonance, zc),
        make(BranchLabel::CreationAntiresonance, zc),
        make(BranchLabel::AnnihilationResonance, za),
        make(BranchLabel::AnnihilationAntiresonance, za),
    ]
}
