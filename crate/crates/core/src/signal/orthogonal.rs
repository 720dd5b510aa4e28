use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::multisine::{Line, MultisineRealization};
use crate::error::{Error, Result};
use crate::linalg;

/// `n_u` experiments built from one base multisine: in experiment `e`, input
/// `i` carries the base spectrum rotated by `exp(j 2 pi e i / n_u)` on every
/// positive-frequency line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrthogonalMultisineSet {
    pub base: MultisineRealization,
    pub n_inputs: usize,
    /// `rotations[e][i]`
    pub rotations: Vec<Vec<Complex64>>,
    /// `signals[e][i]`, one period each
    pub signals: Vec<Vec<MultisineRealization>>,
}

impl OrthogonalMultisineSet {
    pub fn new(base: &MultisineRealization, n_inputs: usize) -> Result<Self> {
        if n_inputs < 1 {
            return Err(Error::InvalidArgument("n_inputs must be >= 1".into()));
        }
        let nu = n_inputs as f64;
        let rotations: Vec<Vec<Complex64>> = (0..n_inputs)
            .map(|e| {
                (0..n_inputs)
                    .map(|i| Complex64::from_polar(1.0, 2.0 * PI * (e * i) as f64 / nu))
                    .collect()
            })
            .collect();
        let mut signals = Vec::with_capacity(n_inputs);
        for row in &rotations {
            let mut per_input = Vec::with_capacity(n_inputs);
            for rot in row {
                let shift = rot.arg();
                let lines = base
                    .lines
                    .iter()
                    .map(|l| Line {
                        phase: (l.phase + shift).rem_euclid(2.0 * PI),
                        ..*l
                    })
                    .collect();
                per_input.push(MultisineRealization::from_lines(&base.grid, lines, base.seed)?);
            }
            signals.push(per_input);
        }
        Ok(OrthogonalMultisineSet {
            base: base.clone(),
            n_inputs,
            rotations,
            signals,
        })
    }

    /// `n_u x n_u` matrix with entry `(i, e)` the rotation of input `i` in experiment `e`.
    pub fn rotation_matrix(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n_inputs, self.n_inputs, |i, e| self.rotations[e][i])
    }

    /// Input matrix at one bin: entry `(i, e)` is the DFT of input `i` in experiment `e`.
    pub fn input_matrix(&self, bin: usize) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.n_inputs, self.n_inputs, |i, e| {
            self.signals[e][i].spectrum()[bin]
        })
    }

    pub fn condition_number(&self) -> f64 {
        linalg::condition_number(&self.rotation_matrix())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dft;
    use crate::signal::grid::{FrequencyGrid, GridKind};
    use crate::signal::multisine::flat_profile;

    fn base() -> MultisineRealization {
        let g = FrequencyGrid::build(100.0, 200, 1.0, 40.0, GridKind::Odd, 0).unwrap();
        MultisineRealization::synthesize(&g, &flat_profile(&g), 1.0, 4).unwrap()
    }

    #[test]
    fn single_input_is_identity() {
        let b = base();
        let set = OrthogonalMultisineSet::new(&b, 1).unwrap();
        assert_eq!(set.rotations, vec![vec![Complex64::new(1.0, 0.0)]]);
        for (x, y) in set.signals[0][0].samples.iter().zip(&b.samples) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn two_inputs_hadamard_pattern() {
        let set = OrthogonalMultisineSet::new(&base(), 2).unwrap();
        let r = &set.rotations;
        assert!((r[0][0] - 1.0).norm() < 1e-15 && (r[0][1] - 1.0).norm() < 1e-15);
        assert!((r[1][0] - 1.0).norm() < 1e-15 && (r[1][1] + 1.0).norm() < 1e-15);
        // independent check: singular values of [[1,1],[1,-1]] are both sqrt(2)
        assert!((set.condition_number() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn six_inputs_perfectly_conditioned_at_every_bin() {
        let set = OrthogonalMultisineSet::new(&base(), 6).unwrap();
        assert!((set.condition_number() - 1.0).abs() < 1e-10);
        for &k in &set.base.grid.excited_bins {
            let m = set.input_matrix(k);
            assert!((linalg::condition_number(&m) - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rotated_signals_have_rotated_spectra() {
        let set = OrthogonalMultisineSet::new(&base(), 3).unwrap();
        let base_spec = dft::rfft(&set.base.samples);
        let spec = dft::rfft(&set.signals[2][1].samples);
        for &k in &set.base.grid.excited_bins {
            let expected = base_spec[k] * set.rotations[2][1];
            assert!((spec[k] - expected).norm() < 1e-10 * base_spec[k].norm());
        }
    }

    #[test]
    fn rejects_zero_inputs() {
        assert!(OrthogonalMultisineSet::new(&base(), 0).is_err());
    }
}
