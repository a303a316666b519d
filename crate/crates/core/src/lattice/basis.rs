use crate::special::binomial_u128;
use crate::{Error, Result};
use sha2::{Digest, Sha256};

pub const DEFAULT_DIMENSION_CAP: usize = 2_000_000;

/// Fixed-`N` occupation basis over `2M` bosonic modes, ordered
/// lexicographically (first mode slowest, ascending).
///
/// Mode `i < M` is species `a` on site `i`; mode `M + i` is species `b`.
/// Indices are recovered by combinatorial ranking, so lookups need no hashing.
#[derive(Debug, Clone)]
pub struct FockBasis {
    n_sites: usize,
    n_atoms: usize,
    occupations: Vec<u8>,
    // binom[a][b] = C(a, b) for a <= N + 2M
    binom: Vec<Vec<u64>>,
}

pub fn build_basis(n_atoms: usize, n_sites: usize) -> Result<FockBasis> {
    build_basis_with_cap(n_atoms, n_sites, DEFAULT_DIMENSION_CAP)
}

pub fn build_basis_with_cap(n_atoms: usize, n_sites: usize, cap: usize) -> Result<FockBasis> {
    if n_atoms == 0 || n_sites == 0 {
        return Err(Error::InvalidArgument("basis needs N >= 1 and M >= 1".into()));
    }
    if n_atoms > u8::MAX as usize {
        return Err(Error::InvalidArgument(format!("N={n_atoms} exceeds per-mode occupation range")));
    }
    let modes = 2 * n_sites;
    let dim = binomial_u128((n_atoms + modes - 1) as u64, n_atoms as u64).unwrap_or(u128::MAX);
    if dim > cap as u128 {
        return Err(Error::DimensionCap { dim, cap });
    }
    let dim = dim as usize;

    let top = n_atoms + modes;
    let mut binom = vec![vec![0u64; top + 1]; top + 1];
    for a in 0..=top {
        binom[a][0] = 1;
        for b in 1..=a {
            binom[a][b] = binom[a - 1][b - 1] + if b < a { binom[a - 1][b] } else { 0 };
        }
    }

    let mut occupations = Vec::with_capacity(dim * modes);
    let mut current = vec![0u8; modes];
    enumerate(&mut current, 0, n_atoms, &mut occupations);
    debug_assert_eq!(occupations.len(), dim * modes);

    Ok(FockBasis {
        n_sites,
        n_atoms,
        occupations,
        binom,
    })
}

fn enumerate(current: &mut [u8], mode: usize, remaining: usize, out: &mut Vec<u8>) {
    if mode + 1 == current.len() {
        current[mode] = remaining as u8;
        out.extend_from_slice(current);
        return;
    }
    for v in 0..=remaining {
        current[mode] = v as u8;
        enumerate(current, mode + 1, remaining - v, out);
    }
    current[mode] = 0;
}

impl FockBasis {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn n_modes(&self) -> usize {
        2 * self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.occupations.len() / self.n_modes()
    }

    pub fn state(&self, index: usize) -> &[u8] {
        let m = self.n_modes();
        &self.occupations[index * m..(index + 1) * m]
    }

    pub fn species_a(&self, index: usize) -> &[u8] {
        &self.state(index)[..self.n_sites]
    }

    pub fn species_b(&self, index: usize) -> &[u8] {
        &self.state(index)[self.n_sites..]
    }

    /// Total number of atoms in species `a`.
    pub fn count_a(&self, index: usize) -> usize {
        self.species_a(index).iter().map(|&x| x as usize).sum()
    }

    /// Rank of an occupation vector, `None` if it is not in this basis.
    pub fn index_of(&self, occ: &[u8]) -> Option<usize> {
        let modes = self.n_modes();
        if occ.len() != modes {
            return None;
        }
        let total: usize = occ.iter().map(|&x| x as usize).sum();
        if total != self.n_atoms {
            return None;
        }
        let mut rank = 0u64;
        let mut remaining = self.n_atoms;
        for (i, &o) in occ.iter().enumerate().take(modes - 1) {
            let r = modes - i - 1;
            let o = o as usize;
            // states with a smaller value in this mode:
            // sum_{v<o} C(remaining - v + r - 1, r - 1) = C(rem + r, r) - C(rem - o + r, r)
            rank += self.binom[remaining + r][r] - self.binom[remaining - o + r][r];
            remaining -= o;
        }
        Some(rank as usize)
    }

    /// Content hash of the basis layout, used to validate checkpoints.
    pub fn content_hash(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.n_sites as u64).to_le_bytes());
        h.update((self.n_atoms as u64).to_le_bytes());
        h.update(&self.occupations);
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}
