mod common;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use spinchain::lanczos::lowest_eigenpairs;
use spinchain::model::*;
use spinchain::SectorBasis;

#[test]
fn find_failing_draw() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for draw in 0..20 {
        let (bonds, sites): (BondList, usize) = match draw % 3 {
            0 => {
                let length = *[8usize, 10, 12].choose(&mut rng).unwrap();
                (build_dimer_frustrated(&DimerFrustrationParams {
                    length, delta: rng.gen_range(-0.9..0.9), alpha: rng.gen_range(-0.2..0.6),
                }).unwrap(), length)
            }
            1 => {
                let length = *[4usize, 5, 6].choose(&mut rng).unwrap();
                (build_blbq(&BlbqParams { length, beta: rng.gen_range(-1.0..1.5) }).unwrap(), length)
            }
            _ => {
                let length = *[6usize, 8].choose(&mut rng).unwrap();
                let distance = rng.gen_range(1..=length / 2);
                (build_probed_heisenberg(&ProbeParams {
                    length, distance, probe_coupling: rng.gen_range(0.05..1.0) * [-1.0, 1.0].choose(&mut rng).unwrap(),
                }).unwrap(), length + 2)
            }
        };
        if draw != 8 { continue; }
        let basis = SectorBasis::build(bonds.site_kind(), sites, 0).unwrap();
        match lowest_eigenpairs(&bonds, &basis, 2, 1000 + draw as u64) {
            Ok(gm) => println!("draw {draw}: ok E0={} matvecs={}", gm.eigenvalues[0], gm.matvecs),
            Err(e) => println!("draw {draw}: FAIL {e} (dim={}, kind={:?}, bonds={})", basis.len(), bonds.site_kind(), bonds.bonds().len()),
        }
    }
}
