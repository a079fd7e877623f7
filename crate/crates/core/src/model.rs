//! Model Hamiltonians as bond lists of dense two-site operators, applied
//! matrix-free to sector wavefunctions.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::basis::{SectorBasis, SiteKind};
use crate::error::{Error, Result};
use crate::state::Wavefunction;

/// Two-site coupling operator. Each kind carries a dense (d^2)x(d^2) real
/// symmetric matrix acting on the ordered pair of local digits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// sigma_i . sigma_j on two spin-1/2 sites; eigenvalues {-3, 1, 1, 1}.
    ExchangeHalf,
    /// S_i . S_j on two spin-1 sites; eigenvalues {-2, -1, +1}.
    ExchangeOne,
    /// (S_i . S_j)^2 on two spin-1 sites, the matrix square of `ExchangeOne`.
    BiquadOne,
}

impl OperatorKind {
    pub fn site_kind(self) -> SiteKind {
        match self {
            OperatorKind::ExchangeHalf => SiteKind::SpinHalf,
            OperatorKind::ExchangeOne | OperatorKind::BiquadOne => SiteKind::SpinOne,
        }
    }

    /// Dense two-site matrix in the product basis |a b> with row index a*d + b.
    pub fn matrix(self) -> DMatrix<f64> {
        match self {
            OperatorKind::ExchangeHalf => exchange_matrix(SiteKind::SpinHalf),
            OperatorKind::ExchangeOne => exchange_matrix(SiteKind::SpinOne),
            OperatorKind::BiquadOne => {
                let ex = exchange_matrix(SiteKind::SpinOne);
                &ex * &ex
            }
        }
    }
}

/// Single-site z operator in digit order: sigma^z for spin-1/2, S^z for spin-1.
pub fn z_matrix(kind: SiteKind) -> DMatrix<f64> {
    let d = kind.local_dim();
    DMatrix::from_fn(d, d, |r, c| {
        if r == c {
            kind.z_eigenvalue(r as u64)
        } else {
            0.0
        }
    })
}

/// Single-site raising operator in digit order.
pub fn raise_matrix(kind: SiteKind) -> DMatrix<f64> {
    let d = kind.local_dim();
    let s = (d as f64 - 1.0) / 2.0;
    let mut m = DMatrix::zeros(d, d);
    for dig in 0..d - 1 {
        let mz = dig as f64 - s;
        m[(dig + 1, dig)] = (s * (s + 1.0) - mz * (mz + 1.0)).sqrt();
    }
    m
}

/// Exchange coupling between two sites of `kind`: sigma.sigma for spin-1/2
/// (z z + 2 (+- + -+) in ladder form), S.S for spin-1.
fn exchange_matrix(kind: SiteKind) -> DMatrix<f64> {
    let z = z_matrix(kind);
    let sp = raise_matrix(kind);
    let sm = sp.transpose();
    let ladder = sp.kronecker(&sm) + sm.kronecker(&sp);
    match kind {
        // sigma^z sigma^z + 2(sigma^+ sigma^- + sigma^- sigma^+), in Pauli
        // units; the spin-1/2 ladder operators coincide with sigma^+-.
        SiteKind::SpinHalf => z.kronecker(&z) + 2.0 * ladder,
        SiteKind::SpinOne => z.kronecker(&z) + 0.5 * ladder,
    }
}

/// One two-site term: coefficient times the operator `kind` acting on the
/// ordered site pair (i, j).
#[derive(Debug, Clone, Copy)]
pub struct Bond {
    pub i: usize,
    pub j: usize,
    pub coeff: f64,
    pub kind: OperatorKind,
}

/// A Hamiltonian as a list of two-site terms plus the basis metadata it is
/// compatible with. Immutable after construction.
#[derive(Debug, Clone)]
pub struct BondList {
    site_kind: SiteKind,
    length: usize,
    bonds: Vec<Bond>,
}

impl BondList {
    pub fn new(site_kind: SiteKind, length: usize, bonds: Vec<Bond>) -> Result<Self> {
        for b in &bonds {
            if b.i >= length || b.j >= length {
                return Err(Error::SiteOutOfRange {
                    site: b.i.max(b.j),
                    site_count: length,
                });
            }
            if b.i == b.j {
                return Err(Error::InvalidParameter(format!(
                    "bond connects site {} to itself",
                    b.i
                )));
            }
            if b.kind.site_kind() != site_kind {
                return Err(Error::InvalidParameter(format!(
                    "operator {:?} does not act on {site_kind} sites",
                    b.kind
                )));
            }
        }
        // Verify S^z conservation of every operator kind present, once,
        // against its dense matrix.
        let mut kinds: Vec<OperatorKind> = bonds.iter().map(|b| b.kind).collect();
        kinds.dedup();
        for kind in kinds {
            let m = kind.matrix();
            let d = site_kind.local_dim();
            for r in 0..d * d {
                for c in 0..d * d {
                    if m[(r, c)] != 0.0 {
                        let sz_row = site_kind.two_sz_of_digit((r / d) as u64)
                            + site_kind.two_sz_of_digit((r % d) as u64);
                        let sz_col = site_kind.two_sz_of_digit((c / d) as u64)
                            + site_kind.two_sz_of_digit((c % d) as u64);
                        if sz_row != sz_col {
                            return Err(Error::InvalidParameter(format!(
                                "operator {kind:?} does not conserve total S^z"
                            )));
                        }
                    }
                }
            }
        }
        Ok(BondList {
            site_kind,
            length,
            bonds,
        })
    }

    pub fn site_kind(&self) -> SiteKind {
        self.site_kind
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    fn compatible_with(&self, basis: &SectorBasis) -> bool {
        self.site_kind == basis.site_kind() && self.length == basis.length()
    }
}

/// Dimerized chain with next-nearest-neighbor frustration: open boundaries,
/// nearest-neighbor couplings 1 + delta * (-1)^j for bond j = 1..L-1 and
/// uniform next-nearest couplings alpha.
#[derive(Debug, Clone, Copy)]
pub struct DimerFrustrationParams {
    pub length: usize,
    pub delta: f64,
    pub alpha: f64,
}

pub fn build_dimer_frustrated(p: &DimerFrustrationParams) -> Result<BondList> {
    if p.length < 2 || p.length % 2 != 0 {
        return Err(Error::InvalidParameter(format!(
            "dimerized chain length must be even and >= 2, got {}",
            p.length
        )));
    }
    if !(p.delta.abs() < 1.0) {
        // At |delta| = 1 alternate bonds vanish and the ground state becomes
        // degenerate with free end spins; the scan range stays inside (-1, 1).
        return Err(Error::InvalidParameter(format!(
            "dimerization must satisfy |delta| < 1, got {}",
            p.delta
        )));
    }
    let mut bonds = Vec::with_capacity(2 * p.length - 3);
    for j in 1..p.length {
        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
        bonds.push(Bond {
            i: j - 1,
            j,
            coeff: 1.0 + p.delta * sign,
            kind: OperatorKind::ExchangeHalf,
        });
    }
    for j in 1..p.length - 1 {
        bonds.push(Bond {
            i: j - 1,
            j: j + 1,
            coeff: p.alpha,
            kind: OperatorKind::ExchangeHalf,
        });
    }
    BondList::new(SiteKind::SpinHalf, p.length, bonds)
}

/// Bilinear-biquadratic spin-1 chain with open boundaries:
/// sum_i [ S_i.S_{i+1} + beta (S_i.S_{i+1})^2 ].
#[derive(Debug, Clone, Copy)]
pub struct BlbqParams {
    pub length: usize,
    pub beta: f64,
}

pub fn build_blbq(p: &BlbqParams) -> Result<BondList> {
    if p.length < 2 {
        return Err(Error::InvalidParameter(format!(
            "chain length must be at least 2, got {}",
            p.length
        )));
    }
    let mut bonds = Vec::with_capacity(2 * (p.length - 1));
    for i in 0..p.length - 1 {
        bonds.push(Bond {
            i,
            j: i + 1,
            coeff: 1.0,
            kind: OperatorKind::ExchangeOne,
        });
        bonds.push(Bond {
            i,
            j: i + 1,
            coeff: p.beta,
            kind: OperatorKind::BiquadOne,
        });
    }
    BondList::new(SiteKind::SpinOne, p.length, bonds)
}

/// Periodic spin-1/2 Heisenberg ring of `length` sites with two probe spins:
/// probe A (site L) couples to ring site 0, probe B (site L+1) couples to ring
/// site `distance`, both with strength `probe_coupling`.
#[derive(Debug, Clone, Copy)]
pub struct ProbeParams {
    pub length: usize,
    pub distance: usize,
    pub probe_coupling: f64,
}

pub fn build_probed_heisenberg(p: &ProbeParams) -> Result<BondList> {
    if p.length < 3 {
        return Err(Error::InvalidParameter(format!(
            "ring length must be at least 3, got {}",
            p.length
        )));
    }
    if p.distance < 1 || p.distance > p.length / 2 {
        return Err(Error::InvalidParameter(format!(
            "probe offset must lie in [1, L/2] = [1, {}], got {}",
            p.length / 2,
            p.distance
        )));
    }
    let total = p.length + 2;
    let mut bonds = Vec::with_capacity(p.length + 2);
    for i in 0..p.length {
        bonds.push(Bond {
            i,
            j: (i + 1) % p.length,
            coeff: 1.0,
            kind: OperatorKind::ExchangeHalf,
        });
    }
    bonds.push(Bond {
        i: 0,
        j: p.length,
        coeff: p.probe_coupling,
        kind: OperatorKind::ExchangeHalf,
    });
    bonds.push(Bond {
        i: p.distance,
        j: p.length + 1,
        coeff: p.probe_coupling,
        kind: OperatorKind::ExchangeHalf,
    });
    BondList::new(SiteKind::SpinHalf, total, bonds)
}

/// All-pairs exchange bonds, the two-site part of the total-spin operator
/// S_tot^2 (see `lanczos::s_tot_squared_expectation`).
pub fn total_spin_bonds(site_kind: SiteKind, length: usize) -> BondList {
    let kind = match site_kind {
        SiteKind::SpinHalf => OperatorKind::ExchangeHalf,
        SiteKind::SpinOne => OperatorKind::ExchangeOne,
    };
    let mut bonds = Vec::with_capacity(length * (length - 1) / 2);
    for i in 0..length {
        for j in i + 1..length {
            bonds.push(Bond {
                i,
                j,
                coeff: 1.0,
                kind,
            });
        }
    }
    BondList::new(site_kind, length, bonds).expect("all-pairs bond list is valid")
}

/// A bond preprocessed for gather-style application: for every ordered digit
/// pair p = a*d + b, the sparse row of the (coefficient-scaled) two-site
/// matrix as (encoded config delta, weight) entries.
struct CompiledBond {
    stride_i: u64,
    stride_j: u64,
    /// Offsets into `entries`, indexed by pair p; length d^2 + 1.
    offsets: Vec<u32>,
    entries: Vec<(i64, f64)>,
}

pub(crate) struct CompiledHamiltonian {
    site_kind: SiteKind,
    length: usize,
    terms: Vec<CompiledBond>,
}

impl CompiledHamiltonian {
    pub(crate) fn compile(bonds: &BondList) -> Self {
        let d = bonds.site_kind().local_dim();
        let terms = bonds
            .bonds()
            .iter()
            .map(|b| {
                let m = b.kind.matrix();
                let stride_i = (d as u64).pow(b.i as u32);
                let stride_j = (d as u64).pow(b.j as u32);
                let mut offsets = Vec::with_capacity(d * d + 1);
                let mut entries = Vec::new();
                offsets.push(0);
                for p in 0..d * d {
                    let (a, bq) = (p / d, p % d);
                    for pp in 0..d * d {
                        let w = b.coeff * m[(p, pp)];
                        if w != 0.0 {
                            let (ap, bp) = (pp / d, pp % d);
                            let delta = (ap as i64 - a as i64) * stride_i as i64
                                + (bp as i64 - bq as i64) * stride_j as i64;
                            entries.push((delta, w));
                        }
                    }
                    offsets.push(entries.len() as u32);
                }
                CompiledBond {
                    stride_i,
                    stride_j,
                    offsets,
                    entries,
                }
            })
            .collect();
        CompiledHamiltonian {
            site_kind: bonds.site_kind(),
            length: bonds.length(),
            terms,
        }
    }

    /// out = H * amps over `basis`. Every output entry is a gather over the
    /// generated neighbor configurations, so chunks can be written in parallel
    /// without coordination and results are bit-stable for any thread count.
    pub(crate) fn apply_to(&self, basis: &SectorBasis, amps: &[f64], out: &mut [f64]) {
        debug_assert_eq!(amps.len(), basis.len());
        debug_assert_eq!(out.len(), basis.len());
        let d = self.site_kind.local_dim() as u64;
        let states = basis.states();
        let chunk = crate::state::REDUCE_CHUNK;
        out.par_chunks_mut(chunk).enumerate().for_each(|(ci, oc)| {
            let base = ci * chunk;
            for (t, o) in oc.iter_mut().enumerate() {
                let c = states[base + t];
                let mut acc = 0.0;
                for term in &self.terms {
                    let a = (c / term.stride_i) % d;
                    let b = (c / term.stride_j) % d;
                    let p = (a * d + b) as usize;
                    let lo = term.offsets[p] as usize;
                    let hi = term.offsets[p + 1] as usize;
                    for &(delta, w) in &term.entries[lo..hi] {
                        let neighbor = (c as i64 + delta) as u64;
                        // S^z conservation keeps every generated configuration
                        // inside the sector.
                        let idx = basis
                            .index_of_encoded(neighbor)
                            .expect("bond action left the sector");
                        acc += w * amps[idx];
                    }
                }
                *o = acc;
            }
        });
    }

    pub(crate) fn compatible_with(&self, basis: &SectorBasis) -> bool {
        self.site_kind == basis.site_kind() && self.length == basis.length()
    }
}

/// H |psi>, computed term by term from the dense two-site matrices.
pub fn apply(bonds: &BondList, psi: &Wavefunction) -> Result<Wavefunction> {
    if !bonds.compatible_with(psi.basis()) {
        return Err(Error::BasisMismatch(format!(
            "bond list ({} sites, {}) does not match basis ({} sites, {})",
            bonds.length(),
            bonds.site_kind(),
            psi.basis().length(),
            psi.basis().site_kind()
        )));
    }
    let compiled = CompiledHamiltonian::compile(bonds);
    let mut out = Wavefunction::zeros(psi.basis().clone());
    let basis = psi.basis().clone();
    compiled.apply_to(&basis, psi.amps(), out.amps_mut());
    Ok(out)
}
