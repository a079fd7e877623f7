//! Real amplitude vectors over a sector basis.

use std::sync::Arc;

use rayon::prelude::*;

use crate::basis::SectorBasis;
use crate::error::{Error, Result};

/// Chunk size for parallel reductions. Partial sums are accumulated per chunk
/// and combined in chunk order, so results do not depend on thread scheduling.
pub(crate) const REDUCE_CHUNK: usize = 1 << 15;

/// Real-valued wavefunction over a fixed total-S^z sector.
#[derive(Clone)]
pub struct Wavefunction {
    basis: Arc<SectorBasis>,
    amps: Vec<f64>,
}

impl Wavefunction {
    pub fn new(basis: Arc<SectorBasis>, amps: Vec<f64>) -> Result<Self> {
        if amps.len() != basis.len() {
            return Err(Error::BasisMismatch(format!(
                "amplitude vector has {} entries for a sector of dimension {}",
                amps.len(),
                basis.len()
            )));
        }
        Ok(Wavefunction { basis, amps })
    }

    pub fn zeros(basis: Arc<SectorBasis>) -> Self {
        let amps = vec![0.0; basis.len()];
        Wavefunction { basis, amps }
    }

    pub fn basis(&self) -> &Arc<SectorBasis> {
        &self.basis
    }

    pub fn amps(&self) -> &[f64] {
        &self.amps
    }

    pub fn amps_mut(&mut self) -> &mut [f64] {
        &mut self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn dot(&self, other: &Wavefunction) -> f64 {
        dot(&self.amps, &other.amps)
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    /// Scale amplitudes so the norm is 1. Errors on a zero vector.
    pub fn normalize(&mut self) -> Result<()> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::InvalidParameter(
                "cannot normalize a zero wavefunction".into(),
            ));
        }
        scale(&mut self.amps, 1.0 / n);
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() < 4 * REDUCE_CHUNK {
        return a.iter().zip(b).map(|(x, y)| x * y).sum();
    }
    let partials: Vec<f64> = a
        .par_chunks(REDUCE_CHUNK)
        .zip(b.par_chunks(REDUCE_CHUNK))
        .map(|(ca, cb)| ca.iter().zip(cb).map(|(x, y)| x * y).sum::<f64>())
        .collect();
    partials.iter().sum()
}

pub(crate) fn scale(v: &mut [f64], s: f64) {
    if v.len() < 4 * REDUCE_CHUNK {
        v.iter_mut().for_each(|x| *x *= s);
    } else {
        v.par_iter_mut().for_each(|x| *x *= s);
    }
}

/// y += s * x
pub(crate) fn axpy(y: &mut [f64], s: f64, x: &[f64]) {
    debug_assert_eq!(y.len(), x.len());
    if y.len() < 4 * REDUCE_CHUNK {
        y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += s * xi);
    } else {
        y.par_iter_mut()
            .zip(x.par_iter())
            .for_each(|(yi, xi)| *yi += s * xi);
    }
}
