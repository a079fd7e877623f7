//! Shared fixtures for the criterion benchmarks.

use std::sync::Arc;

use spinchain::model::{build_blbq, build_dimer_frustrated, BlbqParams, DimerFrustrationParams};
use spinchain::{BondList, SectorBasis, SiteKind};

pub fn dimer_fixture(length: usize) -> (BondList, Arc<SectorBasis>) {
    let bonds = build_dimer_frustrated(&DimerFrustrationParams {
        length,
        delta: 0.5,
        alpha: 0.25,
    })
    .expect("valid dimer parameters");
    let basis = SectorBasis::build(SiteKind::SpinHalf, length, 0).expect("valid sector");
    (bonds, basis)
}

pub fn blbq_fixture(length: usize) -> (BondList, Arc<SectorBasis>) {
    let bonds = build_blbq(&BlbqParams {
        length,
        beta: 1.0 / 3.0,
    })
    .expect("valid blbq parameters");
    let basis = SectorBasis::build(SiteKind::SpinOne, length, 0).expect("valid sector");
    (bonds, basis)
}
