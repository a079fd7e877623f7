//! Entanglement measures: concurrence (general Wootters form and the SU(2)
//! shortcut), partial concurrence, negativity, and the separability
//! classification of SU(2)-invariant two-qutrit states.

use std::sync::OnceLock;

use nalgebra::{DMatrix, Matrix3, Vector3};

use crate::basis::SiteKind;
use crate::error::{Error, Result};
use crate::model::{z_matrix, OperatorKind};
use crate::observables::PairDensityMatrix;

/// Negativity above this counts as entangled; the separability criterion is
/// exact, the margin only absorbs eigensolver noise.
pub const VERDICT_EPS: f64 = 1e-12;

/// What the classification decided for a state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Entangled,
    Separable,
    /// The correlator pair does not correspond to a physical state.
    InvalidState,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Entangled => write!(f, "entangled"),
            Verdict::Separable => write!(f, "separable"),
            Verdict::InvalidState => write!(f, "invalid-state"),
        }
    }
}

/// Measures evaluated for one pair of sites or one reconstructed state.
#[derive(Debug, Clone, Copy)]
pub struct EntanglementReport {
    /// gamma^zz for qubit pairs, eta^zz for qutrit pairs: the z-z correlator
    /// divided by four.
    pub quarter_zz: f64,
    pub charge: Option<f64>,
    pub concurrence: Option<f64>,
    pub partial_concurrence: Option<f64>,
    /// Clipped at zero; raw values come from [`negativity`].
    pub negativity: Option<f64>,
    pub verdict: Verdict,
}

/// SU(2)-invariant two-qubit concurrence from the z-z correlator alone:
/// C = 2 max{0, 2|gamma| - gamma - 1/4}, positive exactly when
/// gamma < -1/12.
pub fn concurrence_su2(gamma_zz: f64) -> Result<f64> {
    if gamma_zz.abs() > 0.25 + 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "gamma^zz = {gamma_zz} outside the physical range [-1/4, 1/4]"
        )));
    }
    let c = 2.0 * (2.0 * gamma_zz.abs() - gamma_zz - 0.25).max(0.0);
    Ok(c.clamp(0.0, 1.0))
}

/// Partial concurrence between the effective spin-1/2 halves of two spin-1
/// sites: PC = 2 max{0, 2|eta| - eta - 1/4} with eta = <S^z S^z>/4.
pub fn partial_concurrence(eta_zz: f64) -> Result<f64> {
    if eta_zz.abs() > 0.25 + 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "eta^zz = {eta_zz} outside the physical range [-1/4, 1/4]"
        )));
    }
    Ok(2.0 * (2.0 * eta_zz.abs() - eta_zz - 0.25).max(0.0))
}

/// sigma^y x sigma^y in the real digit-ordered product basis.
fn yy_matrix() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            0.0, 0.0, 0.0, -1.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            -1.0, 0.0, 0.0, 0.0,
        ],
    )
}

/// Symmetric PSD square root; eigenvalues in [-1e-10, 0) are clipped to zero,
/// anything lower is an error.
fn symmetric_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (vals, q) = crate::linalg::symmetric_eigen(m);
    if vals[0] < -1e-10 {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: vals[0],
        });
    }
    let roots = nalgebra::DVector::from_iterator(vals.len(), vals.iter().map(|v| v.max(0.0).sqrt()));
    Ok(&q * DMatrix::from_diagonal(&roots) * q.transpose())
}

/// Wootters concurrence of a two-qubit density matrix. The spin-flipped state
/// of a real rho is (sigma^y x sigma^y) rho (sigma^y x sigma^y); the lambdas
/// are extracted from the symmetric form sqrt(rho) rho~ sqrt(rho) for
/// numerical stability.
pub fn concurrence_wootters(rho: &PairDensityMatrix) -> Result<f64> {
    if rho.local_dim() != 2 {
        return Err(Error::InvalidParameter(
            "Wootters concurrence is defined for qubit pairs (d = 2)".into(),
        ));
    }
    let m = rho.matrix();
    let yy = yy_matrix();
    let rho_tilde = &yy * m * &yy;
    let sq = symmetric_sqrt(m)?;
    let w = &sq * rho_tilde * &sq;
    let eigenvalues = crate::linalg::symmetric_eigenvalues(&w);
    if eigenvalues[0] < -1e-10 {
        return Err(Error::NotPositiveSemidefinite {
            min_eigenvalue: eigenvalues[0],
        });
    }
    let mut lambdas: Vec<f64> = eigenvalues.iter().map(|&v| v.max(0.0).sqrt()).collect();
    lambdas.sort_by(|a, b| b.total_cmp(a));
    let c = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    Ok(c.max(0.0).clamp(0.0, 1.0))
}

/// Partial transpose on subsystem A of a d^2 x d^2 pair state.
fn partial_transpose_a(m: &DMatrix<f64>, d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(d * d, d * d, |row, col| {
        let (a, b) = (row / d, row % d);
        let (ap, bp) = (col / d, col % d);
        m[(ap * d + b, a * d + bp)]
    })
}

/// Negativity N = ||rho^{T_A}||_1 - 1, returned raw (<= 0 for separable
/// states up to rounding).
pub fn negativity(rho: &PairDensityMatrix) -> Result<f64> {
    let d = rho.local_dim();
    let pt = partial_transpose_a(rho.matrix(), d);
    let trace_norm: f64 = crate::linalg::symmetric_eigenvalues(&pt)
        .iter()
        .map(|e| e.abs())
        .sum();
    Ok(trace_norm - 1.0)
}

/// SU(2)-invariant two-qutrit state as weights of the total-spin projectors:
/// rho = sum_J p_J P_J / (2J + 1).
#[derive(Debug, Clone, Copy)]
pub struct Su2QutritState {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
}

impl Su2QutritState {
    pub fn weights(&self) -> [f64; 3] {
        [self.p0, self.p1, self.p2]
    }

    /// The 9x9 density matrix of the state.
    pub fn density_matrix(&self) -> DMatrix<f64> {
        let alg = algebra();
        let mut m = DMatrix::zeros(9, 9);
        for (j, &p) in self.weights().iter().enumerate() {
            m += &alg.projectors[j] * (p / (2 * j + 1) as f64);
        }
        m
    }
}

/// Outcome of reconstructing projector weights from the two correlators.
#[derive(Debug, Clone, Copy)]
pub enum Su2Reconstruction {
    Physical(Su2QutritState),
    /// Some weight fell below -1e-9: no physical state has these correlators.
    Unphysical { weights: [f64; 3] },
}

/// Solve for the projector weights (p0, p1, p2) matching the correlators
/// zz = <S^z_A S^z_B> and charge = <(S^z_A)^2 (S^z_B)^2> under the
/// constraint p0 + p1 + p2 = 1.
pub fn su2_reconstruct(zz: f64, charge: f64) -> Su2Reconstruction {
    let alg = algebra();
    let rhs = Vector3::new(1.0, zz, charge);
    let p = alg.solve(rhs);
    let weights = [p[0], p[1], p[2]];
    if weights.iter().any(|&w| w < -1e-9) {
        return Su2Reconstruction::Unphysical { weights };
    }
    let clipped: Vec<f64> = weights.iter().map(|&w| w.max(0.0)).collect();
    let sum: f64 = clipped.iter().sum();
    Su2Reconstruction::Physical(Su2QutritState {
        p0: clipped[0] / sum,
        p1: clipped[1] / sum,
        p2: clipped[2] / sum,
    })
}

/// Classify an SU(2)-invariant qutrit pair from its two correlators:
/// reconstruct the state, compute its negativity, and call it entangled
/// exactly when the negativity is positive.
pub fn classify_su2_pair(zz: f64, charge: f64) -> EntanglementReport {
    let eta = zz / 4.0;
    match su2_reconstruct(zz, charge) {
        Su2Reconstruction::Unphysical { .. } => EntanglementReport {
            quarter_zz: eta,
            charge: Some(charge),
            concurrence: None,
            partial_concurrence: None,
            negativity: None,
            verdict: Verdict::InvalidState,
        },
        Su2Reconstruction::Physical(state) => {
            let rho = PairDensityMatrix::new(SiteKind::SpinOne, state.density_matrix())
                .expect("reconstructed state is a valid density matrix");
            let n = negativity(&rho).expect("valid density matrix");
            let pc = partial_concurrence(eta).unwrap_or(0.0);
            EntanglementReport {
                quarter_zz: eta,
                charge: Some(charge),
                concurrence: None,
                partial_concurrence: Some(pc),
                negativity: Some(n.max(0.0)),
                verdict: if n > VERDICT_EPS {
                    Verdict::Entangled
                } else {
                    Verdict::Separable
                },
            }
        }
    }
}

/// Total-spin projectors of two spin-1 sites and the per-sector correlator
/// traces, computed once from the 9x9 representation of S_A . S_B
/// (eigenvalues -2, -1, +1 on the J = 0, 1, 2 sectors).
struct Su2PairAlgebra {
    projectors: [DMatrix<f64>; 3],
    /// Rows: the unit constraint, the per-sector zz traces t^zz_J, and the
    /// per-sector charge traces t^ch_J.
    coeffs: Matrix3<f64>,
}

impl Su2PairAlgebra {
    fn build() -> Self {
        let k = OperatorKind::ExchangeOne.matrix();
        let lambda = [-2.0, -1.0, 1.0];
        let eye = DMatrix::<f64>::identity(9, 9);
        let mut projectors = Vec::with_capacity(3);
        for j in 0..3 {
            let mut p = eye.clone();
            for jp in 0..3 {
                if jp != j {
                    p = p * (&k - lambda[jp] * &eye) / (lambda[j] - lambda[jp]);
                }
            }
            let tr = p.trace();
            assert!(
                (tr - (2 * j + 1) as f64).abs() < 1e-9,
                "projector J={j} trace {tr}"
            );
            let idem = (&p * &p - &p).abs().max();
            assert!(idem < 1e-9, "projector J={j} idempotency defect {idem}");
            projectors.push(p);
        }
        let z = z_matrix(SiteKind::SpinOne);
        let zsq = &z * &z;
        let zz_op = z.kronecker(&z);
        let ch_op = zsq.kronecker(&zsq);
        let mut t_zz = [0.0; 3];
        let mut t_ch = [0.0; 3];
        for j in 0..3 {
            let w = (2 * j + 1) as f64;
            t_zz[j] = (&projectors[j] * &zz_op).trace() / w;
            t_ch[j] = (&projectors[j] * &ch_op).trace() / w;
        }
        // Maximally mixed cross-check: sum (2J+1)/9 t_ch = <(S^z)^2>^2 = 4/9.
        let mixed_charge: f64 = (0..3).map(|j| (2 * j + 1) as f64 / 9.0 * t_ch[j]).sum();
        assert!((mixed_charge - 4.0 / 9.0).abs() < 1e-12);

        let coeffs = Matrix3::new(
            1.0, 1.0, 1.0, //
            t_zz[0], t_zz[1], t_zz[2], //
            t_ch[0], t_ch[1], t_ch[2],
        );
        Su2PairAlgebra {
            projectors: [
                projectors[0].clone(),
                projectors[1].clone(),
                projectors[2].clone(),
            ],
            coeffs,
        }
    }

    fn solve(&self, rhs: Vector3<f64>) -> Vector3<f64> {
        self.coeffs
            .lu()
            .solve(&rhs)
            .expect("the sector coefficient matrix is invertible")
    }
}

fn algebra() -> &'static Su2PairAlgebra {
    static ALGEBRA: OnceLock<Su2PairAlgebra> = OnceLock::new();
    ALGEBRA.get_or_init(Su2PairAlgebra::build)
}
