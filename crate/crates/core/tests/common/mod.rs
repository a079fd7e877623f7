//! Dense full-space reference construction, kept independent of the
//! production bond-application path: two-site matrices are written out by
//! hand and embedded by direct index arithmetic over the full Hilbert space.

use nalgebra::DMatrix;
use spinchain::{BondList, OperatorKind, SectorBasis, Wavefunction};

/// sigma_i . sigma_j on two spin-1/2 sites, digit-ordered (0 = down):
/// aligned pairs +1, anti-aligned -1 with swap amplitude 2.
pub fn ref_exchange_half() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        4,
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, -1.0, 2.0, 0.0, //
            0.0, 2.0, -1.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    )
}

/// S_i . S_j on two spin-1 sites: m_a m_b on the diagonal plus unit-amplitude
/// (m_a, m_b) -> (m_a +- 1, m_b -+ 1) hops (all spin-1 ladder prefactors
/// combine to exactly 1).
pub fn ref_exchange_one() -> DMatrix<f64> {
    let mut m = DMatrix::zeros(9, 9);
    for a in 0..3i64 {
        for b in 0..3i64 {
            let p = (a * 3 + b) as usize;
            m[(p, p)] = ((a - 1) * (b - 1)) as f64;
            if a + 1 <= 2 && b - 1 >= 0 {
                let q = ((a + 1) * 3 + b - 1) as usize;
                m[(q, p)] = 1.0;
            }
            if a - 1 >= 0 && b + 1 <= 2 {
                let q = ((a - 1) * 3 + b + 1) as usize;
                m[(q, p)] = 1.0;
            }
        }
    }
    m
}

fn ref_matrix(kind: OperatorKind) -> DMatrix<f64> {
    match kind {
        OperatorKind::ExchangeHalf => ref_exchange_half(),
        OperatorKind::ExchangeOne => ref_exchange_one(),
        OperatorKind::BiquadOne => {
            let ex = ref_exchange_one();
            &ex * &ex
        }
    }
}

/// Dense Hamiltonian over the full local_dim^L space; the encoded
/// configuration value doubles as the full-space index.
pub fn dense_full_hamiltonian(bonds: &BondList) -> DMatrix<f64> {
    let d = bonds.site_kind().local_dim() as i64;
    let length = bonds.length();
    let n = (d as usize).pow(length as u32);
    let mut h = DMatrix::zeros(n, n);
    for bond in bonds.bonds() {
        let m = ref_matrix(bond.kind);
        let si = d.pow(bond.i as u32);
        let sj = d.pow(bond.j as u32);
        for c in 0..n as i64 {
            let a = (c / si) % d;
            let b = (c / sj) % d;
            let col = (a * d + b) as usize;
            for ap in 0..d {
                for bp in 0..d {
                    let w = m[((ap * d + bp) as usize, col)];
                    if w != 0.0 {
                        let cp = c + (ap - a) * si + (bp - b) * sj;
                        h[(cp as usize, c as usize)] += bond.coeff * w;
                    }
                }
            }
        }
    }
    h
}

/// Restriction of the full-space Hamiltonian to the rows/columns of a sector.
pub fn dense_sector_hamiltonian(bonds: &BondList, basis: &SectorBasis) -> DMatrix<f64> {
    let full = dense_full_hamiltonian(bonds);
    let n = basis.len();
    DMatrix::from_fn(n, n, |r, c| {
        full[(basis.state_at(r) as usize, basis.state_at(c) as usize)]
    })
}

/// Ascending dense eigenvalues of the sector Hamiltonian, with eigenvectors.
/// The lowest eigenvector gets an inverse-iteration polish: the QR sweep's
/// eigenvalues are accurate but its vectors can carry residuals around 1e-9,
/// too sloppy to referee 1e-9 density-matrix comparisons.
pub fn dense_sector_eigen(bonds: &BondList, basis: &SectorBasis) -> (Vec<f64>, DMatrix<f64>) {
    let h = dense_sector_hamiltonian(bonds, basis);
    let eig = h.clone().symmetric_eigen();
    let n = basis.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(n, n);
    for (slot, &i) in order.iter().enumerate() {
        vectors.set_column(slot, &eig.eigenvectors.column(i));
    }
    if n > 1 && values[1] - values[0] > 1e-8 * values[0].abs().max(1.0) {
        let scale = values[0].abs().max(1.0);
        let sigma = values[0] - 1e-6 * scale;
        let shifted = &h - DMatrix::identity(n, n) * sigma;
        let lu = shifted.lu();
        let mut v = vectors.column(0).clone_owned();
        for _ in 0..2 {
            if let Some(y) = lu.solve(&v) {
                let norm = y.norm();
                if norm > 0.0 {
                    v = y / norm;
                }
            }
        }
        vectors.set_column(0, &v);
    }
    (values, vectors)
}

/// Brute-force reduced density matrix of two sites from sector amplitudes,
/// via full-space embedding and a double loop over digit substitutions.
pub fn dense_pair_rdm(
    basis: &SectorBasis,
    amps: &[f64],
    site_a: usize,
    site_b: usize,
) -> DMatrix<f64> {
    let d = basis.site_kind().local_dim() as i64;
    let n = (d as usize).pow(basis.length() as u32);
    let mut full = vec![0.0; n];
    for (k, &c) in basis.states().iter().enumerate() {
        full[c as usize] = amps[k];
    }
    let sa = d.pow(site_a as u32);
    let sb = d.pow(site_b as u32);
    let d2 = (d * d) as usize;
    let mut rho = DMatrix::zeros(d2, d2);
    for c in 0..n as i64 {
        if full[c as usize] == 0.0 {
            continue;
        }
        let a = (c / sa) % d;
        let b = (c / sb) % d;
        let p = (a * d + b) as usize;
        for ap in 0..d {
            for bp in 0..d {
                let cp = c + (ap - a) * sa + (bp - b) * sb;
                let q = (ap * d + bp) as usize;
                rho[(p, q)] += full[c as usize] * full[cp as usize];
            }
        }
    }
    rho
}

/// Random sector wavefunction with unit norm.
pub fn random_state(
    basis: &std::sync::Arc<SectorBasis>,
    rng: &mut impl rand::Rng,
) -> Wavefunction {
    let amps: Vec<f64> = (0..basis.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut psi = Wavefunction::new(basis.clone(), amps).unwrap();
    psi.normalize().unwrap();
    psi
}
