//! Enumeration and indexing of fixed total-S^z sectors of a spin chain.
//!
//! Configurations are encoded as integers: spin-1/2 site `j` occupies bit `j`
//! (1 = up), spin-1 site `j` occupies base-3 digit `j` (0, 1, 2 for
//! m = -1, 0, +1). The sector listing is strictly ascending in encoded value,
//! so enumeration order is reproducible across builds.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Memory allowed for the direct-address index table before falling back to
/// binary search over the sorted state list.
pub const DEFAULT_TABLE_BUDGET_BYTES: usize = 512 * 1024 * 1024;

/// Local site algebra: spin-1/2 (Pauli operators) or spin-1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SiteKind {
    SpinHalf,
    SpinOne,
}

impl SiteKind {
    pub fn local_dim(self) -> usize {
        match self {
            SiteKind::SpinHalf => 2,
            SiteKind::SpinOne => 3,
        }
    }

    /// Twice the S^z eigenvalue of a local level.
    pub fn two_sz_of_digit(self, digit: u64) -> i64 {
        match self {
            SiteKind::SpinHalf => 2 * digit as i64 - 1,
            SiteKind::SpinOne => 2 * (digit as i64 - 1),
        }
    }

    /// Eigenvalue of the diagonal z operator used in correlators:
    /// sigma^z (+-1) for spin-1/2, S^z (-1, 0, +1) for spin-1.
    pub fn z_eigenvalue(self, digit: u64) -> f64 {
        match self {
            SiteKind::SpinHalf => 2.0 * digit as f64 - 1.0,
            SiteKind::SpinOne => digit as f64 - 1.0,
        }
    }

    /// Largest |twice-S^z| a single site can carry.
    fn max_two_sz_per_site(self) -> i64 {
        match self {
            SiteKind::SpinHalf => 1,
            SiteKind::SpinOne => 2,
        }
    }
}

impl std::fmt::Display for SiteKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SiteKind::SpinHalf => write!(f, "spin-1/2"),
            SiteKind::SpinOne => write!(f, "spin-1"),
        }
    }
}

enum Lookup {
    /// config -> index table over the full local_dim^L range; u32::MAX marks
    /// configurations outside the sector.
    Direct(Vec<u32>),
    /// Binary search over the sorted state list.
    Sorted,
}

/// All configurations of an `length`-site chain with fixed total S^z,
/// sorted ascending by encoded value, with O(1) or O(log n) inverse lookup.
pub struct SectorBasis {
    site_kind: SiteKind,
    length: usize,
    two_sz_total: i64,
    states: Vec<u64>,
    lookup: Lookup,
    /// local_dim^j for each site j.
    pow: Vec<u64>,
}

impl SectorBasis {
    /// Enumerate the sector with the default direct-table memory budget.
    pub fn build(site_kind: SiteKind, length: usize, two_sz_total: i64) -> Result<Arc<Self>> {
        Self::build_with_budget(site_kind, length, two_sz_total, DEFAULT_TABLE_BUDGET_BYTES)
    }

    /// Enumerate the sector; a direct-address lookup table is allocated only
    /// when `local_dim^length * 4` bytes fit `table_budget_bytes`.
    pub fn build_with_budget(
        site_kind: SiteKind,
        length: usize,
        two_sz_total: i64,
        table_budget_bytes: usize,
    ) -> Result<Arc<Self>> {
        if length < 2 {
            return Err(Error::InvalidParameter(format!(
                "chain length must be at least 2, got {length}"
            )));
        }
        let d = site_kind.local_dim() as u64;
        let max_len = match site_kind {
            SiteKind::SpinHalf => 63,
            SiteKind::SpinOne => 40,
        };
        if length > max_len {
            return Err(Error::InvalidParameter(format!(
                "chain length {length} exceeds the encodable maximum {max_len} for {site_kind}"
            )));
        }

        let max_total = site_kind.max_two_sz_per_site() * length as i64;
        if two_sz_total.abs() > max_total {
            return Err(Error::UnreachableSector {
                two_sz: two_sz_total,
                site_count: length,
                local_dim: d as usize,
                reason: format!("|two_sz| exceeds the maximum {max_total}"),
            });
        }
        // Spin-1/2: each site contributes an odd twice-S^z, so the total must
        // share the parity of L. Spin-1 contributions are even.
        let parity_ok = match site_kind {
            SiteKind::SpinHalf => (two_sz_total - length as i64) % 2 == 0,
            SiteKind::SpinOne => two_sz_total % 2 == 0,
        };
        if !parity_ok {
            return Err(Error::UnreachableSector {
                two_sz: two_sz_total,
                site_count: length,
                local_dim: d as usize,
                reason: "parity mismatch".into(),
            });
        }

        let mut pow = Vec::with_capacity(length);
        let mut p = 1u64;
        for _ in 0..length {
            pow.push(p);
            p *= d;
        }

        let states = enumerate_sector(site_kind, length, two_sz_total, &pow);
        debug_assert!(states.windows(2).all(|w| w[0] < w[1]));

        let full_dim = pow[length - 1]
            .checked_mul(d)
            .expect("full dimension fits u64 given the length cap");
        let table_bytes = (full_dim as usize).checked_mul(4);
        let lookup = match table_bytes {
            Some(bytes) if bytes <= table_budget_bytes => {
                let mut table = vec![u32::MAX; full_dim as usize];
                for (idx, &c) in states.iter().enumerate() {
                    table[c as usize] = idx as u32;
                }
                Lookup::Direct(table)
            }
            _ => Lookup::Sorted,
        };

        Ok(Arc::new(SectorBasis {
            site_kind,
            length,
            two_sz_total,
            states,
            lookup,
            pow,
        }))
    }

    pub fn site_kind(&self) -> SiteKind {
        self.site_kind
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn two_sz_total(&self) -> i64 {
        self.two_sz_total
    }

    /// Number of configurations in the sector.
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    /// Encoded configuration at position `index` in the sorted listing.
    pub fn state_at(&self, index: usize) -> u64 {
        self.states[index]
    }

    /// Position of `config` in the listing, or an error if it does not belong
    /// to the sector.
    pub fn index_of(&self, config: u64) -> Result<usize> {
        self.index_of_encoded(config)
            .ok_or(Error::ConfigNotInSector { config })
    }

    /// Fast-path lookup used by operator application.
    #[inline]
    pub fn index_of_encoded(&self, config: u64) -> Option<usize> {
        match &self.lookup {
            Lookup::Direct(table) => {
                let idx = *table.get(config as usize)?;
                (idx != u32::MAX).then_some(idx as usize)
            }
            Lookup::Sorted => self.states.binary_search(&config).ok(),
        }
    }

    /// local_dim^site, the encoding stride of `site`.
    #[inline]
    pub fn stride(&self, site: usize) -> u64 {
        self.pow[site]
    }

    /// Local digit of `config` at `site`.
    #[inline]
    pub fn digit(&self, config: u64, site: usize) -> u64 {
        (config / self.pow[site]) % self.site_kind.local_dim() as u64
    }

    /// Twice the total S^z of an arbitrary encoded configuration.
    pub fn two_sz_of_config(&self, config: u64) -> i64 {
        (0..self.length)
            .map(|site| self.site_kind.two_sz_of_digit(self.digit(config, site)))
            .sum()
    }

    /// True when `other` indexes the same sector (kind, length and total S^z
    /// determine the listing uniquely).
    pub fn same_sector(&self, other: &SectorBasis) -> bool {
        self.site_kind == other.site_kind
            && self.length == other.length
            && self.two_sz_total == other.two_sz_total
    }
}

impl std::fmt::Debug for SectorBasis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SectorBasis")
            .field("site_kind", &self.site_kind)
            .field("length", &self.length)
            .field("two_sz_total", &self.two_sz_total)
            .field("dim", &self.states.len())
            .finish()
    }
}

/// Depth-first enumeration from the most significant site down, pruning
/// branches whose remaining sites cannot absorb the outstanding S^z. Visiting
/// digits in ascending order yields the states already sorted.
fn enumerate_sector(kind: SiteKind, length: usize, two_sz_total: i64, pow: &[u64]) -> Vec<u64> {
    let d = kind.local_dim() as u64;
    let per_site = kind.max_two_sz_per_site();
    let mut states = Vec::new();
    // Manual stack of (site, encoded_prefix, remaining_two_sz, next_digit).
    let mut stack: Vec<(usize, u64, i64, u64)> = vec![(length, 0, two_sz_total, 0)];
    while let Some((site, prefix, remaining, digit)) = stack.pop() {
        if site == 0 {
            if remaining == 0 {
                states.push(prefix);
            }
            continue;
        }
        if digit + 1 < d {
            stack.push((site, prefix, remaining, digit + 1));
        }
        let rest = remaining - kind.two_sz_of_digit(digit);
        if rest.abs() <= per_site * (site as i64 - 1) {
            stack.push((site - 1, prefix + digit * pow[site - 1], rest, 0));
        }
    }
    states
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binomial(n: u64, k: u64) -> u64 {
        if k > n {
            return 0;
        }
        let k = k.min(n - k);
        let mut acc = 1u128;
        for i in 0..k {
            acc = acc * (n - i) as u128 / (i + 1) as u128;
        }
        acc as u64
    }

    #[test]
    fn spin_half_l4_zero_sector_has_six_states() {
        let basis = SectorBasis::build(SiteKind::SpinHalf, 4, 0).unwrap();
        assert_eq!(basis.len(), 6);
        assert_eq!(basis.len() as u64, binomial(4, 2));
        // Two up-spins among four sites, ascending: 0011, 0101, 0110, 1001, 1010, 1100.
        assert_eq!(basis.states(), &[0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]);
    }

    #[test]
    fn spin_one_l2_zero_sector_lists_three_states() {
        let basis = SectorBasis::build(SiteKind::SpinOne, 2, 0).unwrap();
        // (m0, m1) = (+1,-1), (0,0), (-1,+1) encode to 2, 4, 6 in base 3.
        assert_eq!(basis.states(), &[2, 4, 6]);
        for &c in basis.states() {
            assert_eq!(basis.two_sz_of_config(c), 0);
        }
    }

    #[test]
    fn spin_half_l24_zero_sector_dimension() {
        let basis = SectorBasis::build(SiteKind::SpinHalf, 24, 0).unwrap();
        assert_eq!(basis.len() as u64, binomial(24, 12));
        assert_eq!(basis.len(), 2_704_156);
    }

    #[test]
    fn parity_mismatch_is_rejected() {
        let err = SectorBasis::build(SiteKind::SpinHalf, 4, 1).unwrap_err();
        assert!(matches!(err, Error::UnreachableSector { .. }));
        let err = SectorBasis::build(SiteKind::SpinOne, 3, 1).unwrap_err();
        assert!(matches!(err, Error::UnreachableSector { .. }));
        let err = SectorBasis::build(SiteKind::SpinHalf, 4, 6).unwrap_err();
        assert!(matches!(err, Error::UnreachableSector { .. }));
    }

    #[test]
    fn length_below_two_is_rejected() {
        assert!(matches!(
            SectorBasis::build(SiteKind::SpinHalf, 1, 1),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn first_and_last_configurations_round_trip() {
        let basis = SectorBasis::build(SiteKind::SpinOne, 5, 2).unwrap();
        assert_eq!(basis.index_of(basis.state_at(0)).unwrap(), 0);
        let last = basis.len() - 1;
        assert_eq!(basis.index_of(basis.state_at(last)).unwrap(), last);
    }

    #[test]
    fn index_of_rejects_foreign_configurations() {
        let basis = SectorBasis::build(SiteKind::SpinHalf, 4, 0).unwrap();
        // 0b0001 has two_sz = -2.
        assert!(matches!(
            basis.index_of(0b0001),
            Err(Error::ConfigNotInSector { .. })
        ));
    }

    #[test]
    fn round_trip_is_exhaustive_for_small_chains() {
        for (kind, length) in [(SiteKind::SpinHalf, 10), (SiteKind::SpinOne, 7)] {
            let step = 2;
            let max = kind.max_two_sz_per_site() * length as i64;
            let start = match kind {
                SiteKind::SpinHalf => -(length as i64),
                SiteKind::SpinOne => -max,
            };
            let mut total = 0usize;
            let mut two_sz = start;
            while two_sz <= max {
                let basis = SectorBasis::build(kind, length, two_sz).unwrap();
                for k in 0..basis.len() {
                    assert_eq!(basis.index_of(basis.state_at(k)).unwrap(), k);
                    assert_eq!(basis.two_sz_of_config(basis.state_at(k)), two_sz);
                }
                total += basis.len();
                two_sz += step;
            }
            assert_eq!(total, kind.local_dim().pow(length as u32));
        }
    }

    #[test]
    fn enumeration_is_deterministic() {
        let a = SectorBasis::build(SiteKind::SpinOne, 8, 0).unwrap();
        let b = SectorBasis::build(SiteKind::SpinOne, 8, 0).unwrap();
        assert_eq!(a.states(), b.states());
    }

    #[test]
    fn binary_search_fallback_matches_direct_table() {
        let direct = SectorBasis::build(SiteKind::SpinHalf, 12, 0).unwrap();
        let sorted = SectorBasis::build_with_budget(SiteKind::SpinHalf, 12, 0, 0).unwrap();
        assert_eq!(direct.states(), sorted.states());
        for k in (0..direct.len()).step_by(17) {
            let c = direct.state_at(k);
            assert_eq!(sorted.index_of_encoded(c), Some(k));
        }
        assert_eq!(sorted.index_of_encoded(0b1), None);
    }
}
