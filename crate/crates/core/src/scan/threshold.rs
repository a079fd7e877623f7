//! Bisection for the dimerization threshold above which end-to-end
//! concurrence turns on.

use std::sync::Arc;

use crate::basis::{SectorBasis, SiteKind};
use crate::entanglement::concurrence_wootters;
use crate::error::{Error, Result};
use crate::lanczos::lowest_eigenpairs;
use crate::model::{build_dimer_frustrated, DimerFrustrationParams};
use crate::observables::pair_density_matrix;

/// Concurrence above this counts as "nonzero" for onset detection; solver
/// noise sits well below.
pub const CONCURRENCE_ONSET_EPS: f64 = 1e-8;

const DELTA_HI: f64 = 0.99;

#[derive(Debug, Clone, Copy)]
pub enum ThresholdOutcome {
    Found {
        /// Midpoint of the final bracket.
        delta_t: f64,
        /// Half-width of the final bracket: concurrence is zero at
        /// delta_t - bracket_width and positive at delta_t + bracket_width.
        bracket_width: f64,
    },
    /// Concurrence stayed at zero all the way up to the bracket top.
    NoThreshold,
}

#[derive(Debug, Clone, Copy)]
pub struct ThresholdResult {
    pub alpha: f64,
    pub length: usize,
    pub outcome: ThresholdOutcome,
}

/// Locate the dimerization threshold delta_T(alpha) at fixed chain length by
/// bisection on delta in (0, 0.99) against the predicate C > 1e-8.
pub fn find_threshold(alpha: f64, length: usize, tol: f64, seed: u64) -> Result<ThresholdResult> {
    if tol < 1e-4 {
        return Err(Error::InvalidParameter(format!(
            "bisection tolerance must be at least 1e-4, got {tol}"
        )));
    }
    let basis = SectorBasis::build(SiteKind::SpinHalf, length, 0)?;
    let mut eval = |delta: f64| -> Result<f64> {
        end_concurrence(&basis, delta, alpha, seed)
    };
    let outcome = match bisect_onset(0.0, DELTA_HI, tol, CONCURRENCE_ONSET_EPS, &mut eval)? {
        Some((lo, hi)) => ThresholdOutcome::Found {
            delta_t: 0.5 * (lo + hi),
            bracket_width: 0.5 * (hi - lo),
        },
        None => ThresholdOutcome::NoThreshold,
    };
    Ok(ThresholdResult {
        alpha,
        length,
        outcome,
    })
}

fn end_concurrence(basis: &Arc<SectorBasis>, delta: f64, alpha: f64, seed: u64) -> Result<f64> {
    let length = basis.length();
    let bonds = build_dimer_frustrated(&DimerFrustrationParams {
        length,
        delta,
        alpha,
    })?;
    let gm = lowest_eigenpairs(&bonds, basis, 1, seed)?;
    let rho = pair_density_matrix(&gm.eigenvectors[0], 0, length - 1)?;
    concurrence_wootters(&rho)
}

/// Shrink an onset bracket until hi - lo <= tol, maintaining f(lo) <= eps and
/// f(hi) > eps. Returns None when f(hi0) <= eps (no onset below hi0) and an
/// error when the onset predicate already holds at lo0.
pub(crate) fn bisect_onset<F>(
    lo0: f64,
    hi0: f64,
    tol: f64,
    eps: f64,
    eval: &mut F,
) -> Result<Option<(f64, f64)>>
where
    F: FnMut(f64) -> Result<f64>,
{
    if eval(hi0)? <= eps {
        return Ok(None);
    }
    if eval(lo0)? > eps {
        return Err(Error::InvalidParameter(format!(
            "onset predicate already positive at the lower bracket {lo0}"
        )));
    }
    let (mut lo, mut hi) = (lo0, hi0);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if eval(mid)? > eps {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Some((lo, hi)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::cell::RefCell;

    #[test]
    fn bisection_maintains_the_bracket_invariant() {
        // Synthetic onset at x = 0.37: f = 0 below, grows above.
        let onset = 0.37;
        let evals: RefCell<Vec<(f64, f64)>> = RefCell::new(Vec::new());
        let mut f = |x: f64| -> Result<f64> {
            let v = (x - onset).max(0.0);
            evals.borrow_mut().push((x, v));
            Ok(v)
        };
        let (lo, hi) = bisect_onset(0.0, 1.0, 1e-4, 1e-8, &mut f)
            .unwrap()
            .unwrap();
        assert!(hi - lo <= 1e-4);
        assert!(lo <= onset && onset <= hi + 1e-8);
        // Every accepted lower endpoint evaluated to zero, every upper to
        // positive: replay the evaluation log against the final bracket.
        for (x, v) in evals.borrow().iter() {
            if *x <= lo {
                assert!(*v <= 1e-8);
            }
            if *x >= hi {
                assert!(*v > 1e-8);
            }
        }
    }

    #[test]
    fn flat_zero_function_reports_no_onset() {
        let mut f = |_x: f64| -> Result<f64> { Ok(0.0) };
        assert!(bisect_onset(0.0, 1.0, 1e-3, 1e-8, &mut f)
            .unwrap()
            .is_none());
    }

    #[test]
    fn onset_below_bracket_is_an_error() {
        let mut f = |_x: f64| -> Result<f64> { Ok(1.0) };
        assert!(bisect_onset(0.0, 1.0, 1e-3, 1e-8, &mut f).is_err());
    }

    #[test]
    fn tolerance_floor_is_enforced() {
        assert!(matches!(
            find_threshold(0.0, 8, 1e-5, 1),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn small_chain_threshold_exists_and_brackets() {
        // L = 8 keeps this fast; the threshold must lie strictly inside (0, 0.99).
        let r = find_threshold(0.0, 8, 1e-2, 1).unwrap();
        match r.outcome {
            ThresholdOutcome::Found {
                delta_t,
                bracket_width,
            } => {
                assert!(delta_t > 0.0 && delta_t < 0.99);
                assert!(bracket_width <= 5e-3 + 1e-12);
            }
            ThresholdOutcome::NoThreshold => panic!("expected a threshold at L = 8, alpha = 0"),
        }
    }
}
