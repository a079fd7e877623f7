//! Solver output cross-checked against dense diagonalization of the same
//! models, built through an independent full-space construction.

mod common;

use std::sync::Arc;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use spinchain::lanczos::lowest_eigenpairs;
use spinchain::model::{
    apply, build_blbq, build_dimer_frustrated, build_probed_heisenberg, BlbqParams, BondList,
    DimerFrustrationParams, ProbeParams,
};
use spinchain::observables::pair_density_matrix;
use spinchain::{SectorBasis, SiteKind};

use common::{
    dense_pair_rdm, dense_sector_eigen, dense_sector_hamiltonian, random_state,
};

fn random_model(rng: &mut ChaCha8Rng, family: usize) -> (BondList, usize, usize) {
    match family {
        0 => {
            let length = *[8usize, 10, 12].choose(rng).unwrap();
            let bonds = build_dimer_frustrated(&DimerFrustrationParams {
                length,
                delta: rng.gen_range(-0.9..0.9),
                alpha: rng.gen_range(-0.2..0.6),
            })
            .unwrap();
            (bonds, length, length - 1)
        }
        1 => {
            let length = *[4usize, 5, 6].choose(rng).unwrap();
            let bonds = build_blbq(&BlbqParams {
                length,
                beta: rng.gen_range(-1.0..1.5),
            })
            .unwrap();
            (bonds, length, length - 1)
        }
        _ => {
            let length = *[6usize, 8].choose(rng).unwrap();
            let distance = rng.gen_range(1..=length / 2);
            let bonds = build_probed_heisenberg(&ProbeParams {
                length,
                distance,
                probe_coupling: rng.gen_range(0.05..1.0) * [-1.0, 1.0].choose(rng).unwrap(),
            })
            .unwrap();
            (bonds, length + 2, length)
        }
    }
}

#[test]
fn lanczos_matches_dense_on_random_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut rdm_checked = 0usize;
    for draw in 0..20 {
        let (bonds, sites, probe_site) = random_model(&mut rng, draw % 3);
        let basis = SectorBasis::build(bonds.site_kind(), sites, 0).unwrap();
        assert!(basis.len() <= 4096, "draw {draw}: dim {}", basis.len());

        let (dense_vals, dense_vecs) = dense_sector_eigen(&bonds, &basis);
        let k = 2.min(basis.len());
        let gm = lowest_eigenpairs(&bonds, &basis, k, 1000 + draw as u64).unwrap();
        for i in 0..k {
            assert!(
                (gm.eigenvalues[i] - dense_vals[i]).abs() <= 1e-10,
                "draw {draw}: eigenvalue {i} lanczos {} dense {}",
                gm.eigenvalues[i],
                dense_vals[i]
            );
        }

        // Reduced density matrices of two independently computed vectors agree
        // to 1e-9 only when the ground state is resolvable: the vector error
        // of either method scales as residual/gap, so near-degenerate draws
        // check eigenvalues alone.
        if basis.len() > 1 && dense_vals[1] - dense_vals[0] > 1e-3 {
            let site_b = probe_site.min(sites - 1);
            let rho = pair_density_matrix(&gm.eigenvectors[0], 0, site_b).unwrap();
            let dense_rho = dense_pair_rdm(&basis, dense_vecs.column(0).as_slice(), 0, site_b);
            let diff = (rho.matrix() - dense_rho).abs().max();
            assert!(diff <= 1e-9, "draw {draw}: RDM mismatch {diff:e}");
            rdm_checked += 1;
        }
    }
    assert!(rdm_checked >= 12, "only {rdm_checked} RDM comparisons ran");
}

#[test]
fn apply_matches_dense_matrix_action() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cases: Vec<BondList> = vec![
        build_dimer_frustrated(&DimerFrustrationParams {
            length: 8,
            delta: 0.37,
            alpha: 0.21,
        })
        .unwrap(),
        build_blbq(&BlbqParams {
            length: 5,
            beta: 0.9,
        })
        .unwrap(),
        build_probed_heisenberg(&ProbeParams {
            length: 6,
            distance: 2,
            probe_coupling: -0.4,
        })
        .unwrap(),
    ];
    for bonds in cases {
        let basis = SectorBasis::build(bonds.site_kind(), bonds.length(), 0).unwrap();
        let dense = dense_sector_hamiltonian(&bonds, &basis);
        let psi = random_state(&basis, &mut rng);
        let out = apply(&bonds, &psi).unwrap();
        let expect = &dense * nalgebra::DVector::from_column_slice(psi.amps());
        for (o, e) in out.amps().iter().zip(expect.iter()) {
            assert!((o - e).abs() <= 1e-12, "apply deviates: {o} vs {e}");
        }
    }
}

#[test]
fn sector_restriction_loses_no_states() {
    // Sum of sector dimensions over all 2S^z equals local_dim^L.
    for (kind, length) in [(SiteKind::SpinHalf, 8), (SiteKind::SpinOne, 6)] {
        let max = match kind {
            SiteKind::SpinHalf => length as i64,
            SiteKind::SpinOne => 2 * length as i64,
        };
        let mut total = 0usize;
        let mut two_sz = -max;
        while two_sz <= max {
            if let Ok(b) = SectorBasis::build(kind, length, two_sz) {
                total += b.len();
            }
            two_sz += 2;
        }
        assert_eq!(total, kind.local_dim().pow(length as u32));
    }
}

#[test]
fn s_tot_labels_match_dense_multiplets() {
    // Two-site blbq at beta = 0.4: E_J = c_J + 0.4 c_J^2 puts the triplet
    // lowest (E_1 = -0.6 < E_0 = -0.4 < E_2 = 1.4).
    let bonds = build_blbq(&BlbqParams {
        length: 2,
        beta: 0.4,
    })
    .unwrap();
    let basis = SectorBasis::build(SiteKind::SpinOne, 2, 0).unwrap();
    let gm = lowest_eigenpairs(&bonds, &basis, 3, 5).unwrap();
    // Sector S^z = 0 holds one member of each of J = 0, 1, 2.
    assert!((gm.eigenvalues[0] - (-0.6)).abs() < 1e-10);
    assert!((gm.s_tot_squared[0] - 2.0).abs() < 1e-8);
    assert!((gm.eigenvalues[1] - (-0.4)).abs() < 1e-10);
    assert!(gm.s_tot_squared[1].abs() < 1e-8);
    assert!((gm.eigenvalues[2] - 1.4).abs() < 1e-10);
    assert!((gm.s_tot_squared[2] - 6.0).abs() < 1e-8);
}
