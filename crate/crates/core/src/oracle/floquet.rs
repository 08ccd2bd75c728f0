use faer::Mat;
use num_complex::Complex64;

use super::{eigenvalues, fill_static, LatticeModel};
use crate::effective::reduce_mod_omega;
use crate::error::{Error, Result};

/// Largest number of matrix entries a Floquet build may allocate.
pub const MAX_ENTRIES: usize = 100_000_000;

/// Truncated Floquet matrix over `n` in `[-n_max, n_max]`.
pub fn build_floquet_matrix(m: &LatticeModel, n_max: usize) -> Result<Mat<Complex64>> {
    if n_max < 1 {
        return Err(Error::InvalidParams("n_max must be at least 1".into()));
    }
    let n = n_max as i64;
    floquet_matrix_range(m, n, -n)
}

/// Floquet matrix with blocks `n = hi, hi - 1, ..., lo`.
///
/// The pump `2 f(t)` acts on all four cavity entries with the pattern
/// `S = [[1, 1], [-1, -1]]`. Its two Fourier components give the blocks
/// `-i f0 e^{i theta} S` from index `n` to `n + 1` and `i f0 e^{-i theta} S`
/// from `n + 1` to `n`; no other entry depends on time.
pub fn floquet_matrix_range(m: &LatticeModel, hi: i64, lo: i64) -> Result<Mat<Complex64>> {
    if hi < lo {
        return Err(Error::InvalidParams(format!("empty Floquet range [{lo}, {hi}]")));
    }
    let blocks = (hi - lo + 1) as usize;
    let size = m.dim();
    let dim = blocks * size;
    let entries = dim.saturating_mul(dim);
    if entries > MAX_ENTRIES {
        return Err(Error::TooLarge { dim, entries });
    }
    let p = &m.params;
    let omega = p.pump_freq;
    let phase = Complex64::from_polar(1.0, p.pump_phase);
    let raise = Complex64::new(0.0, -p.pump_amp) * phase;
    let lower = Complex64::new(0.0, p.pump_amp) * phase.conj();

    let mut out = Mat::zeros(dim, dim);
    for b in 0..blocks {
        let n = hi - b as i64;
        fill_static(m, &mut out, b * size, n as f64 * omega);
    }
    for b in 1..blocks {
        // row block b - 1 carries index n + 1, column block b index n
        let upper = (b - 1) * size;
        let lower_blk = b * size;
        for (i, sign) in [(0, 1.0), (1, -1.0)] {
            for j in 0..2 {
                out[(upper + i, lower_blk + j)] = sign * raise;
                out[(lower_blk + i, upper + j)] = sign * lower;
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FloquetSpectrum {
    pub omega: f64,
    pub raw: Vec<Complex64>,
    /// `raw` with real parts folded into `(-Omega/2, Omega/2]`.
    pub reduced: Vec<Complex64>,
}

impl FloquetSpectrum {
    /// The eigenvalue closest to `target` modulo `Omega`, shifted into the
    /// Floquet zone of `target`.
    pub fn nearest(&self, target: Complex64) -> Option<Complex64> {
        let zone = |z: Complex64| {
            let k = ((target.re - z.re) / self.omega).round();
            Complex64::new(z.re + k * self.omega, z.im)
        };
        self.raw
            .iter()
            .map(|&z| zone(z))
            .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
    }

    /// One eigenvalue per target; two targets may share an eigenvalue.
    pub fn comparison_set(&self, targets: &[Complex64]) -> Vec<Complex64> {
        targets.iter().filter_map(|&t| self.nearest(t)).collect()
    }
}

pub fn floquet_eigs(matrix: &Mat<Complex64>, omega: f64) -> Result<FloquetSpectrum> {
    if matrix.nrows() != matrix.ncols() {
        return Err(Error::Dimension {
            expected: matrix.nrows(),
            got: matrix.ncols(),
        });
    }
    let raw = eigenvalues(matrix)?;
    let reduced = raw.iter().map(|&z| reduce_mod_omega(z, omega)).collect();
    Ok(FloquetSpectrum { omega, raw, reduced })
}
