//! Total-S3 sector bases.
//!
//! Full-space index of a configuration is `sum_x digit(x) * d^(b - x)` with
//! site 1 most significant and `digit = j - m_x`. A sector with `n`
//! lowerings (`n = jb - m`, the number of overturned spins for j = 1/2)
//! holds every digit string with digit sum `n`.

use crate::error::{Error, Result};
use crate::spin::Spin;

/// Ordered list of the full-space indices in one sector.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorBasis {
    sites: usize,
    spin: Spin,
    total_two_m: i32,
    states: Vec<u64>,
}

/// `d^sites` if it fits in a `u64`.
pub fn full_dim_u64(sites: usize, spin: Spin) -> Option<u64> {
    (spin.dim() as u64).checked_pow(u32::try_from(sites).ok()?)
}

impl SectorBasis {
    /// Sector with total magnetization `total_two_m / 2`.
    pub fn new(sites: usize, spin: Spin, total_two_m: i32) -> Result<Self> {
        let max = spin.two_j() as i64 * sites as i64;
        let tm = total_two_m as i64;
        if sites == 0 || tm.abs() > max || (max - tm) % 2 != 0 {
            return Err(Error::UnreachableSector {
                sites,
                two_j: spin.two_j(),
                two_m: total_two_m,
            });
        }
        if full_dim_u64(sites, spin).is_none() {
            return Err(Error::DimensionOverflow {
                local: spin.dim(),
                sites,
                budget: u64::MAX as usize,
            });
        }
        let lowering = ((max - tm) / 2) as u32;
        let mut states = Vec::new();
        let d = spin.dim() as u64;
        let mut strides = vec![1u64; sites];
        for x in (0..sites.saturating_sub(1)).rev() {
            strides[x] = strides[x + 1] * d;
        }
        enumerate(&strides, spin.two_j(), 0, lowering, 0, &mut states);
        Ok(SectorBasis {
            sites,
            spin,
            total_two_m,
            states,
        })
    }

    /// Sector reached from all-up by `n` unit lowerings.
    pub fn with_lowering(sites: usize, spin: Spin, n: usize) -> Result<Self> {
        let two_m = spin.two_j() as i64 * sites as i64 - 2 * n as i64;
        let two_m = i32::try_from(two_m).map_err(|_| Error::UnreachableSector {
            sites,
            two_j: spin.two_j(),
            two_m: i32::MIN,
        })?;
        SectorBasis::new(sites, spin, two_m)
    }

    /// Every sector of the chain, from all-up (`n = 0`) to all-down.
    pub fn all(sites: usize, spin: Spin) -> Result<Vec<SectorBasis>> {
        (0..=spin.two_j() as usize * sites)
            .map(|n| SectorBasis::with_lowering(sites, spin, n))
            .collect()
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn total_two_m(&self) -> i32 {
        self.total_two_m
    }

    pub fn total_m(&self) -> f64 {
        self.total_two_m as f64 / 2.0
    }

    /// Number of unit lowerings from the all-up configuration.
    pub fn lowering(&self) -> usize {
        ((self.spin.two_j() as i64 * self.sites as i64 - self.total_two_m as i64) / 2) as usize
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    /// Position of a full-space index within the sector.
    pub fn position(&self, full: u64) -> Option<usize> {
        self.states.binary_search(&full).ok()
    }

    /// Local digits (`j - m_x`) of a full-space index, site 1 first.
    pub fn digits(&self, full: u64) -> Vec<u32> {
        digits_of(full, self.sites, self.spin)
    }
}

pub fn digits_of(mut full: u64, sites: usize, spin: Spin) -> Vec<u32> {
    let d = spin.dim() as u64;
    let mut out = vec![0u32; sites];
    for x in (0..sites).rev() {
        out[x] = (full % d) as u32;
        full /= d;
    }
    out
}

fn enumerate(
    strides: &[u64],
    two_j: u32,
    site: usize,
    remaining: u32,
    prefix: u64,
    out: &mut Vec<u64>,
) {
    let left_after = (strides.len() - site - 1) as u32;
    if left_after == 0 {
        if remaining <= two_j {
            out.push(prefix + remaining as u64 * strides[site]);
        }
        return;
    }
    let lo = remaining.saturating_sub(two_j * left_after);
    let hi = remaining.min(two_j);
    for digit in lo..=hi {
        enumerate(
            strides,
            two_j,
            site + 1,
            remaining - digit,
            prefix + digit as u64 * strides[site],
            out,
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let b = SectorBasis::new(13, Spin::HALF, 13).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.states(), &[0]);
        let b = SectorBasis::new(13, Spin::HALF, 1).unwrap();
        assert_eq!(b.len(), 1716);
        let b = SectorBasis::new(2, Spin::ONE, 0).unwrap();
        assert_eq!(b.len(), 3);
        let configs: Vec<Vec<u32>> = b.states().iter().map(|&s| b.digits(s)).collect();
        assert_eq!(configs, vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
    }

    #[test]
    fn unreachable() {
        assert!(SectorBasis::new(3, Spin::HALF, 0).is_err());
        assert!(SectorBasis::new(3, Spin::HALF, 5).is_err());
        assert!(SectorBasis::new(2, Spin::ONE, 1).is_err());
    }

    #[test]
    fn sectors_partition_the_space() {
        for (sites, spin) in [(6, Spin::HALF), (4, Spin::ONE), (3, Spin::from_twice(3).unwrap())] {
            let all = SectorBasis::all(sites, spin).unwrap();
            let total: usize = all.iter().map(|s| s.len()).sum();
            let dim = full_dim_u64(sites, spin).unwrap() as usize;
            assert_eq!(total, dim);
            let mut seen = vec![false; dim];
            for s in &all {
                assert!(s.states().windows(2).all(|w| w[0] < w[1]));
                for &i in s.states() {
                    assert!(!seen[i as usize]);
                    seen[i as usize] = true;
                    let m2: i32 = s
                        .digits(i)
                        .iter()
                        .map(|&d| spin.two_m_of_index(d as usize))
                        .sum();
                    assert_eq!(m2, s.total_two_m());
                }
            }
        }
    }

    #[test]
    fn long_chain_single_flip_sector() {
        let s = SectorBasis::with_lowering(40, Spin::HALF, 1).unwrap();
        assert_eq!(s.len(), 40);
        assert_eq!(s.states()[0], 1);
        assert_eq!(*s.states().last().unwrap(), 1u64 << 39);
        assert_eq!(s.lowering(), 1);
    }
}
