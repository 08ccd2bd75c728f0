//! Complex quasi-eigenvalue spectra of a periodically pumped cavity mode
//! coupled to a one-dimensional tight-binding photonic band.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] holds the physical parameters and the decoupled seeds.
//! * [`selfenergy`] evaluates the band self-energy on both Riemann sheets.
//! * [`effective`] builds the 2x2 energy-dependent Floquet-Liouvillian and
//!   solves its self-consistent dispersion relation.
//! * [`phenom`] is the flat-band damped-oscillator comparison model.
//! * [`sweep`] tracks the four branches along the cavity frequency and
//!   detects exceptional points and stationary crossings.
//! * [`oracle`] is a brute-force lattice discretisation used to validate
//!   the effective theory in the time domain and in Floquet space.
//!
//! Sign convention: mode functions evolve as `exp(i z t)`, so `Im z > 0`
//! decays and `Im z < 0` is amplified.

mod dense;
pub mod effective;
pub mod error;
pub mod model;
pub mod oracle;
pub mod phenom;
pub mod selfenergy;
pub mod sweep;

pub use error::{Error, Result};
pub use model::{BranchLabel, ModelParams, Sector};
pub use num_complex::Complex64;
pub use selfenergy::{Sheet, SheetTag};
