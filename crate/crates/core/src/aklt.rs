//! Closed-form reference values at the valence-bond-solid point beta = 1/3 of
//! the bilinear-biquadratic spin-1 chain, used to validate the solver and the
//! extrapolation machinery.

/// Fixed reference constants of the valence-bond-solid ground state.
#[derive(Debug, Clone, Copy)]
pub struct AkltReference {
    /// Bulk correlation length 1/ln 3.
    pub xi: f64,
    /// Thermodynamic end-to-end <S^z S^z>.
    pub zz_inf: f64,
    /// Thermodynamic end-to-end <(S^z)^2 (S^z)^2>.
    pub charge_inf: f64,
    /// Thermodynamic partial concurrence.
    pub pc_inf: f64,
    /// Thermodynamic negativity.
    pub negativity_inf: f64,
}

impl AkltReference {
    pub fn new() -> Self {
        AkltReference {
            xi: 1.0 / 3f64.ln(),
            zz_inf: -4.0 / 9.0,
            charge_inf: 4.0 / 9.0,
            pc_inf: 1.0 / 6.0,
            negativity_inf: 2.0 / 9.0,
        }
    }
}

impl Default for AkltReference {
    fn default() -> Self {
        Self::new()
    }
}

/// Asymptotic end-to-end correlators of the open-chain singlet at the VBS
/// point: zz = -4/9 [1 + 6 (-1)^L 3^(-L)] and charge = -zz. The formula
/// carries an exponentially small residual against the true finite-L values,
/// so comparisons must keep a tolerance band of that order.
pub fn aklt_end_correlator(length: usize) -> (f64, f64) {
    assert!(length >= 2, "chain length must be at least 2");
    let sign = if length % 2 == 0 { 1.0 } else { -1.0 };
    let correction = 6.0 * sign * 3f64.powi(-(length as i32));
    let zz = -4.0 / 9.0 * (1.0 + correction);
    (zz, -zz)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::{negativity, partial_concurrence, su2_reconstruct, Su2Reconstruction};
    use crate::observables::PairDensityMatrix;

    #[test]
    fn even_length_formula_values() {
        let (zz, charge) = aklt_end_correlator(8);
        assert!((zz - (-4.0 / 9.0) * (1.0 + 6.0 / 6561.0)).abs() < 1e-15);
        assert!((zz + 0.444851).abs() < 1e-6);
        assert_eq!(charge, -zz);
    }

    #[test]
    fn odd_length_flips_the_correction_sign() {
        let (zz9, _) = aklt_end_correlator(9);
        let expected = -4.0 / 9.0 * (1.0 - 6.0 * 3f64.powi(-9));
        assert!((zz9 - expected).abs() < 1e-15);
        assert!(zz9 > -4.0 / 9.0);
    }

    #[test]
    fn large_length_approaches_thermodynamic_values() {
        let reference = AkltReference::new();
        let (zz, charge) = aklt_end_correlator(40);
        assert!((zz - reference.zz_inf).abs() < 1e-15);
        assert!((charge - reference.charge_inf).abs() < 1e-15);
    }

    #[test]
    fn formula_values_at_l12_reproduce_pc_and_negativity() {
        let reference = AkltReference::new();
        let (zz, charge) = aklt_end_correlator(12);
        let pc = partial_concurrence(zz / 4.0).unwrap();
        assert!((pc - reference.pc_inf).abs() < 1e-3);
        let state = match su2_reconstruct(zz, charge) {
            Su2Reconstruction::Physical(s) => s,
            _ => panic!("formula correlators must be physical"),
        };
        let rho =
            PairDensityMatrix::new(crate::basis::SiteKind::SpinOne, state.density_matrix())
                .unwrap();
        let n = negativity(&rho).unwrap();
        assert!((n - reference.negativity_inf).abs() < 1e-3);
    }
}
