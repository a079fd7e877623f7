//! Matrix-free exact diagonalization and entanglement analysis for finite
//! spin-1/2 and spin-1 chains.
//!
//! The crate enumerates fixed total-S^z sectors, applies bond-list
//! Hamiltonians without forming matrices, computes the lowest eigenpairs by
//! restarted Lanczos iteration with full reorthogonalization, and evaluates
//! end-to-end and probe-to-probe entanglement: concurrence (Wootters and the
//! SU(2) shortcut), partial concurrence, and negativity, including the
//! SU(2)-invariant two-qutrit separability classification.

pub mod aklt;
pub mod basis;
pub mod entanglement;
pub mod error;
pub mod lanczos;
mod linalg;
pub mod model;
pub mod observables;
pub mod scan;
pub mod state;

pub use basis::{SectorBasis, SiteKind};
pub use error::{Error, Result};
pub use model::{
    apply, build_blbq, build_dimer_frustrated, build_probed_heisenberg, BlbqParams, Bond,
    BondList, DimerFrustrationParams, OperatorKind, ProbeParams,
};
pub use state::Wavefunction;
