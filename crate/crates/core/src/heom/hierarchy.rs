use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64, ZERO};

/// Marker for a neighbour outside the truncated hierarchy.
pub const ABSENT: usize = usize::MAX;

/// Default guard on the number of auxiliary operators.
pub const DEFAULT_MAX_ADOS: usize = 200_000;

/// Multi-index `n = (n_1, ..., n_N)` of an auxiliary operator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HierarchyIndex(pub Vec<u32>);

impl HierarchyIndex {
    pub fn rank(&self) -> u32 {
        self.0.iter().sum()
    }
}

/// All multi-indices with rank below the cutoff, in lexicographic order, with
/// `j±` neighbour tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Hierarchy {
    sites: usize,
    cutoff: usize,
    indices: Vec<HierarchyIndex>,
    plus: Vec<usize>,
    minus: Vec<usize>,
}

impl Hierarchy {
    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[HierarchyIndex] {
        &self.indices
    }

    pub fn index(&self, position: usize) -> &HierarchyIndex {
        &self.indices[position]
    }

    /// Position of `n + e_j`, or [`ABSENT`].
    pub fn plus(&self, position: usize, j: usize) -> usize {
        self.plus[position * self.sites + j]
    }

    /// Position of `n − e_j`, or [`ABSENT`].
    pub fn minus(&self, position: usize, j: usize) -> usize {
        self.minus[position * self.sites + j]
    }

    pub fn position(&self, index: &HierarchyIndex) -> Option<usize> {
        self.indices.binary_search(index).ok()
    }
}

/// Number of multi-indices of `sites` components with rank below `cutoff`,
/// `C(cutoff − 1 + sites, sites)`, or `None` on overflow.
pub fn hierarchy_size(sites: usize, cutoff: usize) -> Option<usize> {
    if cutoff == 0 {
        return Some(0);
    }
    // C(n, k) built incrementally stays an integer at every step.
    let n = cutoff - 1 + sites;
    let k = sites.min(cutoff - 1);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    usize::try_from(acc).ok()
}

/// Enumerates the truncated hierarchy for `sites` baths.
pub fn enumerate_hierarchy(sites: usize, cutoff: usize, max_count: usize) -> Result<Hierarchy> {
    if sites == 0 || cutoff == 0 {
        return Err(Error::InvalidParameter(alloc::format!(
            "hierarchy needs at least one site and cutoff >= 1, got {sites} and {cutoff}"
        )));
    }
    let count = hierarchy_size(sites, cutoff).unwrap_or(usize::MAX);
    if count > max_count {
        return Err(Error::HierarchyTooLarge { count, max: max_count });
    }
    let limit = (cutoff - 1) as u32;
    let mut indices = Vec::with_capacity(count);
    let mut current = vec![0u32; sites];
    fill(&mut current, 0, limit, &mut indices);

    let lookup: BTreeMap<&[u32], usize> = indices.iter().enumerate().map(|(k, n)| (n.0.as_slice(), k)).collect();
    let mut plus = vec![ABSENT; count * sites];
    let mut minus = vec![ABSENT; count * sites];
    let mut probe = vec![0u32; sites];
    for (k, n) in indices.iter().enumerate() {
        for j in 0..sites {
            probe.copy_from_slice(&n.0);
            probe[j] += 1;
            if let Some(&p) = lookup.get(probe.as_slice()) {
                plus[k * sites + j] = p;
            }
            if n.0[j] > 0 {
                probe[j] -= 2;
                minus[k * sites + j] = lookup[probe.as_slice()];
            }
        }
    }
    Ok(Hierarchy { sites, cutoff, indices, plus, minus })
}

fn fill(current: &mut [u32], j: usize, budget: u32, out: &mut Vec<HierarchyIndex>) {
    if j == current.len() {
        out.push(HierarchyIndex(current.to_vec()));
        return;
    }
    for v in 0..=budget {
        current[j] = v;
        fill(current, j + 1, budget - v, out);
    }
    current[j] = 0;
}

/// Auxiliary operators stored contiguously: operator `k` occupies
/// `data[k·N² .. (k+1)·N²]` in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct AdoSet {
    sites: usize,
    data: Vec<C64>,
}

impl AdoSet {
    /// `ρ_e(0)` at the root, every other operator zero.
    pub fn from_initial(hierarchy: &Hierarchy, rho0: &CMatrix) -> Result<Self> {
        let n = hierarchy.sites();
        if rho0.nrows() != n || rho0.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: rho0.nrows() });
        }
        let mut data = vec![ZERO; hierarchy.len() * n * n];
        for a in 0..n {
            for b in 0..n {
                data[a * n + b] = rho0[(a, b)];
            }
        }
        Ok(Self { sites: n, data })
    }

    pub fn from_flat(sites: usize, data: Vec<C64>) -> Result<Self> {
        let block = sites * sites;
        if block == 0 || data.len() % block != 0 {
            return Err(Error::DimensionMismatch { expected: block, found: data.len() });
        }
        Ok(Self { sites, data })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn len(&self) -> usize {
        self.data.len() / (self.sites * self.sites)
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.data
    }

    pub fn operator(&self, position: usize) -> CMatrix {
        operator_from_flat(&self.data, self.sites, position)
    }

    /// The physical density matrix `σ(0)`.
    pub fn rho(&self) -> CMatrix {
        self.operator(0)
    }
}

pub(crate) fn operator_from_flat(data: &[C64], sites: usize, position: usize) -> CMatrix {
    let block = &data[position * sites * sites..(position + 1) * sites * sites];
    CMatrix::from_row_slice(sites, sites, block)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_enumeration() {
        let h = enumerate_hierarchy(2, 2, 100).unwrap();
        let got: Vec<Vec<u32>> = h.indices().iter().map(|n| n.0.clone()).collect();
        assert_eq!(got, vec![vec![0, 0], vec![0, 1], vec![1, 0]]);
        assert_eq!(h.plus(0, 0), 2);
        assert_eq!(h.plus(0, 1), 1);
        assert_eq!(h.plus(1, 1), ABSENT);
        assert_eq!(h.minus(2, 0), 0);
        assert_eq!(h.minus(0, 0), ABSENT);
    }

    #[test]
    fn counts_match_binomial() {
        let h = enumerate_hierarchy(7, 8, 10_000).unwrap();
        assert_eq!(h.len(), 3432);
        assert_eq!(hierarchy_size(7, 8), Some(3432));
        assert!(h.indices().iter().all(|n| n.rank() < 8));
        assert!(h.indices().windows(2).all(|w| w[0] < w[1]));
        for (sites, cutoff) in [(1, 1), (1, 5), (3, 4), (4, 6), (2, 10)] {
            let h = enumerate_hierarchy(sites, cutoff, 100_000).unwrap();
            assert_eq!(Some(h.len()), hierarchy_size(sites, cutoff));
        }
        assert_eq!(enumerate_hierarchy(1, 1, 10).unwrap().len(), 1);
    }

    #[test]
    fn neighbour_tables_are_consistent() {
        let h = enumerate_hierarchy(3, 5, 1000).unwrap();
        for k in 0..h.len() {
            for j in 0..3 {
                let p = h.plus(k, j);
                if p == ABSENT {
                    assert_eq!(h.index(k).rank() as usize, h.cutoff() - 1);
                } else {
                    assert_eq!(h.minus(p, j), k);
                    assert_eq!(h.index(p).0[j], h.index(k).0[j] + 1);
                }
            }
        }
    }

    #[test]
    fn size_guard() {
        assert!(matches!(enumerate_hierarchy(7, 12, 1000), Err(Error::HierarchyTooLarge { count: 31824, .. })));
        assert!(enumerate_hierarchy(0, 3, 10).is_err());
    }
}
