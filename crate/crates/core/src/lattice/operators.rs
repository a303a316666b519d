use super::basis::FockBasis;
use super::params::{BHParams, Boundary};
use super::sparse::{CsrMatrix, LinearOperator};
use num_complex::Complex64;
use rayon::prelude::*;

fn bonds(params: &BHParams) -> Vec<(usize, usize)> {
    let m = params.n_sites;
    let mut out: Vec<(usize, usize)> = (0..m.saturating_sub(1)).map(|j| (j, j + 1)).collect();
    // a two-site ring would double the single bond
    if params.boundary == Boundary::Periodic && m > 2 {
        out.push((m - 1, 0));
    }
    out
}

/// Real symmetric Hamiltonian
/// `-J sum_<ij>,s (s_i^+ s_j + h.c.) + sum_j [U_aa/2 n_a(n_a-1) + U_bb/2 n_b(n_b-1) + U_ab n_a n_b]`.
pub fn build_hamiltonian(params: &BHParams, basis: &FockBasis) -> CsrMatrix<f64> {
    assert_eq!(params.n_sites, basis.n_sites(), "site count mismatch");
    assert_eq!(params.n_atoms, basis.n_atoms(), "atom count mismatch");
    let m = params.n_sites;
    let bonds = bonds(params);
    let rows: Vec<Vec<(usize, f64)>> = (0..basis.dim())
        .into_par_iter()
        .map(|idx| {
            let occ = basis.state(idx);
            let mut row = Vec::new();
            let mut diag = 0.0;
            for j in 0..m {
                let na = occ[j] as f64;
                let nb = occ[m + j] as f64;
                diag += 0.5 * params.u_aa * na * (na - 1.0)
                    + 0.5 * params.u_bb * nb * (nb - 1.0)
                    + params.u_ab * na * nb;
            }
            row.push((idx, diag));
            if params.j_hop != 0.0 {
                let mut buf = occ.to_vec();
                for species in 0..2 {
                    let off = species * m;
                    for &(i, j) in &bonds {
                        for (to, from) in [(off + i, off + j), (off + j, off + i)] {
                            if buf[from] == 0 {
                                continue;
                            }
                            let amp = ((buf[from] as f64) * (buf[to] as f64 + 1.0)).sqrt();
                            buf[from] -= 1;
                            buf[to] += 1;
                            let target = basis.index_of(&buf).expect("hop stays in basis");
                            buf[from] += 1;
                            buf[to] -= 1;
                            row.push((target, -params.j_hop * amp));
                        }
                    }
                }
            }
            row
        })
        .collect();
    CsrMatrix::from_rows(basis.dim(), rows)
}

/// Collective spin operators on the lattice Fock space.
#[derive(Debug, Clone)]
pub struct CollectiveSpin {
    n_atoms: usize,
    /// `J_+ = sum_j a_j^+ b_j`.
    pub raising: CsrMatrix<f64>,
    /// `J_- = J_+^T`.
    pub lowering: CsrMatrix<f64>,
    /// Diagonal of `J_z = (N_a - N_b)/2`.
    pub jz: Vec<f64>,
}

impl CollectiveSpin {
    pub fn new(basis: &FockBasis) -> Self {
        let m = basis.n_sites();
        let n = basis.n_atoms() as f64;
        let rows: Vec<Vec<(usize, f64)>> = (0..basis.dim())
            .into_par_iter()
            .map(|idx| {
                // entries <target|J_+|idx> form row idx of J_+^T = J_-
                let occ = basis.state(idx);
                let mut buf = occ.to_vec();
                let mut row = Vec::new();
                for j in 0..m {
                    let (a, b) = (j, m + j);
                    if buf[b] == 0 {
                        continue;
                    }
                    let amp = ((buf[b] as f64) * (buf[a] as f64 + 1.0)).sqrt();
                    buf[b] -= 1;
                    buf[a] += 1;
                    row.push((basis.index_of(&buf).expect("in basis"), amp));
                    buf[b] += 1;
                    buf[a] -= 1;
                }
                row
            })
            .collect();
        let lowering = CsrMatrix::from_rows(basis.dim(), rows);
        let raising = lowering.transpose();
        let jz = (0..basis.dim())
            .map(|idx| basis.count_a(idx) as f64 - 0.5 * n)
            .collect();
        Self {
            n_atoms: basis.n_atoms(),
            raising,
            lowering,
            jz,
        }
    }

    pub fn n_atoms(&self) -> usize {
        self.n_atoms
    }

    pub fn dim(&self) -> usize {
        self.jz.len()
    }

    pub fn apply_raising(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
        self.raising.matvec(x, &mut y);
        y
    }

    pub fn apply_lowering(&self, x: &[Complex64]) -> Vec<Complex64> {
        let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
        self.lowering.matvec(x, &mut y);
        y
    }

    /// `(J_x psi, J_y psi, J_z psi)`.
    pub fn apply_all(&self, x: &[Complex64]) -> [Vec<Complex64>; 3] {
        let p = self.apply_raising(x);
        let m = self.apply_lowering(x);
        let jx = p.iter().zip(&m).map(|(a, b)| (a + b) * 0.5).collect();
        let jy = p
            .iter()
            .zip(&m)
            .map(|(a, b)| (a - b) * Complex64::new(0.0, -0.5))
            .collect();
        let jz = x.iter().zip(&self.jz).map(|(a, z)| a * z).collect();
        [jx, jy, jz]
    }

    pub fn jy(&self) -> SpinYOperator<'_> {
        SpinYOperator { spin: self }
    }
}

/// `J_y = (J_+ - J_-)/(2i)` as a Hermitian operator.
pub struct SpinYOperator<'a> {
    spin: &'a CollectiveSpin,
}

impl LinearOperator for SpinYOperator<'_> {
    fn dim(&self) -> usize {
        self.spin.dim()
    }

    fn apply(&self, x: &[Complex64], y: &mut [Complex64]) {
        self.spin.raising.matvec(x, y);
        let m = self.spin.apply_lowering(x);
        for (yi, mi) in y.iter_mut().zip(m) {
            *yi = (*yi - mi) * Complex64::new(0.0, -0.5);
        }
    }
}
