//! Spin correlators and two-site reduced density matrices of sector
//! wavefunctions.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::basis::{SectorBasis, SiteKind};
use crate::error::{Error, Result};
use crate::state::{Wavefunction, REDUCE_CHUNK};

/// Diagonal single-site operator: the z operator (sigma^z for spin-1/2, S^z
/// for spin-1) or its square.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalOp {
    Z,
    ZSquared,
}

impl DiagonalOp {
    fn eigenvalue(self, kind: SiteKind, digit: u64) -> f64 {
        let z = kind.z_eigenvalue(digit);
        match self {
            DiagonalOp::Z => z,
            DiagonalOp::ZSquared => z * z,
        }
    }
}

/// z-z and charge correlators of one site pair.
#[derive(Debug, Clone, Copy)]
pub struct CorrelatorSet {
    pub site_a: usize,
    pub site_b: usize,
    /// <sigma^z sigma^z> for spin-1/2 chains, <S^z S^z> for spin-1.
    pub zz: f64,
    /// <(S^z)^2 (S^z)^2>, spin-1 chains only.
    pub charge: Option<f64>,
}

impl CorrelatorSet {
    /// The correlator over four: gamma^zz for qubit pairs, eta^zz for qutrits.
    pub fn quarter_zz(&self) -> f64 {
        self.zz / 4.0
    }
}

fn check_site(basis: &SectorBasis, site: usize) -> Result<()> {
    if site >= basis.length() {
        return Err(Error::SiteOutOfRange {
            site,
            site_count: basis.length(),
        });
    }
    Ok(())
}

/// <psi| O_A O_B |psi> for diagonal single-site operators: an exact sum of
/// |amplitude|^2 times the two local eigenvalues.
pub fn diagonal_correlator(
    psi: &Wavefunction,
    op_a: DiagonalOp,
    site_a: usize,
    op_b: DiagonalOp,
    site_b: usize,
) -> Result<f64> {
    let basis = psi.basis();
    check_site(basis, site_a)?;
    check_site(basis, site_b)?;
    let kind = basis.site_kind();
    let states = basis.states();
    let amps = psi.amps();
    let partials: Vec<f64> = states
        .par_chunks(REDUCE_CHUNK)
        .zip(amps.par_chunks(REDUCE_CHUNK))
        .map(|(sc, ac)| {
            sc.iter()
                .zip(ac)
                .map(|(&c, &a)| {
                    let ea = op_a.eigenvalue(kind, basis.digit(c, site_a));
                    let eb = op_b.eigenvalue(kind, basis.digit(c, site_b));
                    a * a * ea * eb
                })
                .sum::<f64>()
        })
        .collect();
    Ok(partials.iter().sum())
}

/// Both correlators of a site pair; the charge correlator only for spin-1.
pub fn correlator_set(psi: &Wavefunction, site_a: usize, site_b: usize) -> Result<CorrelatorSet> {
    let zz = diagonal_correlator(psi, DiagonalOp::Z, site_a, DiagonalOp::Z, site_b)?;
    let charge = match psi.basis().site_kind() {
        SiteKind::SpinHalf => None,
        SiteKind::SpinOne => Some(diagonal_correlator(
            psi,
            DiagonalOp::ZSquared,
            site_a,
            DiagonalOp::ZSquared,
            site_b,
        )?),
    };
    Ok(CorrelatorSet {
        site_a,
        site_b,
        zz,
        charge,
    })
}

/// Reduced state of two selected sites: a d^2 x d^2 real symmetric matrix,
/// unit trace, positive semidefinite up to the documented tolerance.
#[derive(Debug, Clone)]
pub struct PairDensityMatrix {
    site_kind: SiteKind,
    mat: DMatrix<f64>,
}

impl PairDensityMatrix {
    /// Validate trace, symmetry and positivity.
    pub fn new(site_kind: SiteKind, mat: DMatrix<f64>) -> Result<Self> {
        let d2 = site_kind.local_dim() * site_kind.local_dim();
        if mat.nrows() != d2 || mat.ncols() != d2 {
            return Err(Error::InvalidDensityMatrix(format!(
                "expected {d2}x{d2}, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        let trace = mat.trace();
        if (trace - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDensityMatrix(format!(
                "trace {trace} differs from 1 beyond 1e-12"
            )));
        }
        let asym = (&mat - mat.transpose()).abs().max();
        if asym > 1e-12 {
            return Err(Error::InvalidDensityMatrix(format!(
                "asymmetry {asym:e} beyond 1e-12"
            )));
        }
        let min_eig = crate::linalg::symmetric_eigenvalues(&mat)[0];
        if min_eig < -1e-10 {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min_eig,
            });
        }
        Ok(PairDensityMatrix { site_kind, mat })
    }

    pub fn site_kind(&self) -> SiteKind {
        self.site_kind
    }

    pub fn local_dim(&self) -> usize {
        self.site_kind.local_dim()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.mat
    }

    /// tr[rho (A x B)] for single-site operators A, B.
    pub fn two_site_expectation(&self, op_a: &DMatrix<f64>, op_b: &DMatrix<f64>) -> f64 {
        let d = self.local_dim();
        let mut acc = 0.0;
        for a in 0..d {
            for b in 0..d {
                for ap in 0..d {
                    for bp in 0..d {
                        acc += self.mat[(a * d + b, ap * d + bp)] * op_a[(ap, a)] * op_b[(bp, b)];
                    }
                }
            }
        }
        acc
    }

    /// z-z correlator implied by the diagonal of the reduced state.
    pub fn zz_correlator(&self) -> f64 {
        let d = self.local_dim();
        let mut acc = 0.0;
        for a in 0..d {
            for b in 0..d {
                let p = a * d + b;
                acc += self.mat[(p, p)]
                    * self.site_kind.z_eigenvalue(a as u64)
                    * self.site_kind.z_eigenvalue(b as u64);
            }
        }
        acc
    }

    /// Charge correlator <(S^z)^2 (S^z)^2> implied by the diagonal.
    pub fn charge_correlator(&self) -> f64 {
        let d = self.local_dim();
        let mut acc = 0.0;
        for a in 0..d {
            for b in 0..d {
                let p = a * d + b;
                let za = self.site_kind.z_eigenvalue(a as u64);
                let zb = self.site_kind.z_eigenvalue(b as u64);
                acc += self.mat[(p, p)] * za * za * zb * zb;
            }
        }
        acc
    }

    /// Single-site magnetization <z_A> from the reduced state.
    pub fn site_a_magnetization(&self) -> f64 {
        let d = self.local_dim();
        let mut acc = 0.0;
        for a in 0..d {
            for b in 0..d {
                let p = a * d + b;
                acc += self.mat[(p, p)] * self.site_kind.z_eigenvalue(a as u64);
            }
        }
        acc
    }
}

/// rho_AB = Tr_rest |psi><psi| for two distinct sites, accumulated in one pass
/// over the sector basis keyed by the two extracted local digits.
pub fn pair_density_matrix(
    psi: &Wavefunction,
    site_a: usize,
    site_b: usize,
) -> Result<PairDensityMatrix> {
    let basis = psi.basis();
    check_site(basis, site_a)?;
    check_site(basis, site_b)?;
    if site_a == site_b {
        return Err(Error::InvalidParameter(
            "pair density matrix requires two distinct sites".into(),
        ));
    }
    let kind = basis.site_kind();
    let d = kind.local_dim();
    let stride_a = basis.stride(site_a) as i64;
    let stride_b = basis.stride(site_b) as i64;

    // Partners of each digit pair p with the same pair S^z and p' > p; the
    // lower triangle is filled by symmetry afterwards.
    let mut partners: Vec<Vec<(usize, i64)>> = vec![Vec::new(); d * d];
    for a in 0..d {
        for b in 0..d {
            let p = a * d + b;
            let sz = kind.two_sz_of_digit(a as u64) + kind.two_sz_of_digit(b as u64);
            for ap in 0..d {
                for bp in 0..d {
                    let pp = ap * d + bp;
                    if pp <= p {
                        continue;
                    }
                    let szp = kind.two_sz_of_digit(ap as u64) + kind.two_sz_of_digit(bp as u64);
                    if szp == sz {
                        let delta = (ap as i64 - a as i64) * stride_a
                            + (bp as i64 - b as i64) * stride_b;
                        partners[p].push((pp, delta));
                    }
                }
            }
        }
    }

    let states = basis.states();
    let amps = psi.amps();
    let d2 = d * d;
    let chunks: Vec<Vec<f64>> = states
        .par_chunks(REDUCE_CHUNK)
        .zip(amps.par_chunks(REDUCE_CHUNK))
        .map(|(sc, ac)| {
            let mut local = vec![0.0; d2 * d2];
            for (&c, &amp) in sc.iter().zip(ac) {
                let a = basis.digit(c, site_a) as usize;
                let b = basis.digit(c, site_b) as usize;
                let p = a * d + b;
                local[p * d2 + p] += amp * amp;
                for &(pp, delta) in &partners[p] {
                    let neighbor = (c as i64 + delta) as u64;
                    if let Some(idx) = basis.index_of_encoded(neighbor) {
                        local[p * d2 + pp] += amp * amps[idx];
                    }
                }
            }
            local
        })
        .collect();

    let mut mat = DMatrix::zeros(d2, d2);
    for local in &chunks {
        for p in 0..d2 {
            for q in 0..d2 {
                mat[(p, q)] += local[p * d2 + q];
            }
        }
    }
    for p in 0..d2 {
        for q in 0..p {
            mat[(p, q)] = mat[(q, p)];
        }
    }
    PairDensityMatrix::new(kind, mat)
}
