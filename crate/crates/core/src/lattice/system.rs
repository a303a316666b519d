use super::basis::{build_basis_with_cap, FockBasis, DEFAULT_DIMENSION_CAP};
use super::krylov::{lanczos_ground_state, KrylovConfig, Propagator};
use super::operators::{build_hamiltonian, CollectiveSpin};
use super::params::BHParams;
use super::sparse::{CsrMatrix, LinearOperator};
use crate::dicke::SpinSummary;
use crate::tolerance::Tolerances;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;
use std::sync::Arc;

/// Many-body wavefunction over a shared [`FockBasis`].
#[derive(Debug, Clone)]
pub struct LatticeState {
    basis: Arc<FockBasis>,
    amplitudes: Vec<Complex64>,
}

impl LatticeState {
    pub fn new(basis: Arc<FockBasis>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dim() {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes for a basis of dimension {}",
                amplitudes.len(),
                basis.dim()
            )));
        }
        let state = Self { basis, amplitudes };
        let norm_sqr = state.norm_sqr();
        if (norm_sqr - 1.0).abs() > Tolerances::DEFAULT.norm.max(1e-9) {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(state)
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn overlap(&self, other: &LatticeState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Probability of finding `n_a` atoms in species `a`.
    pub fn sector_weight(&self, n_a: usize) -> f64 {
        self.amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| self.basis.count_a(*i) == n_a)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }
}

/// Hamiltonian, basis and collective spin for one parameter set.
#[derive(Debug, Clone)]
pub struct LatticeSystem {
    params: BHParams,
    basis: Arc<FockBasis>,
    hamiltonian: CsrMatrix<f64>,
    spin: CollectiveSpin,
}

impl LatticeSystem {
    pub fn new(params: BHParams) -> Result<Self> {
        Self::with_cap(params, DEFAULT_DIMENSION_CAP)
    }

    pub fn with_cap(params: BHParams, cap: usize) -> Result<Self> {
        let basis = Arc::new(build_basis_with_cap(params.n_atoms, params.n_sites, cap)?);
        let hamiltonian = build_hamiltonian(&params, &basis);
        let spin = CollectiveSpin::new(&basis);
        Ok(Self {
            params,
            basis,
            hamiltonian,
            spin,
        })
    }

    pub fn params(&self) -> &BHParams {
        &self.params
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn hamiltonian(&self) -> &CsrMatrix<f64> {
        &self.hamiltonian
    }

    pub fn spin(&self) -> &CollectiveSpin {
        &self.spin
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Ground state with all atoms in `a`, then a collective `pi/2` pulse about `y`.
    pub fn prepare_initial(&self, config: KrylovConfig) -> Result<LatticeState> {
        let n = self.params.n_atoms;
        let start: Vec<Complex64> = (0..self.dim())
            .map(|i| {
                if self.basis.count_a(i) == n {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        let (_, ground) = lanczos_ground_state(&self.hamiltonian, &start, config, 1e-10, 500)?;
        let rotated = self.rotate_y(&ground, FRAC_PI_2, config)?;
        LatticeState::new(self.basis.clone(), normalized(rotated))
    }

    /// `exp(-i theta J_y) psi`.
    pub fn rotate_y(&self, psi: &[Complex64], theta: f64, config: KrylovConfig) -> Result<Vec<Complex64>> {
        Propagator::new(config).advance(&self.spin.jy(), psi, theta)
    }

    /// One propagation step of length `dt`, splitting it on rejection.
    pub fn step(&self, state: &LatticeState, dt: f64, config: KrylovConfig) -> Result<LatticeState> {
        let next = Propagator::new(config).advance(&self.hamiltonian, state.amplitudes(), dt)?;
        Ok(LatticeState {
            basis: self.basis.clone(),
            amplitudes: next,
        })
    }

    /// States at `k dt`, `k = 0..=round(t_final/dt)`.
    pub fn evolve(
        &self,
        state: &LatticeState,
        t_final: f64,
        dt: f64,
        config: KrylovConfig,
    ) -> Result<Vec<LatticeState>> {
        super::krylov::evolve_krylov(&self.hamiltonian, state.amplitudes(), t_final, dt, config).map(|traj| {
            traj.into_iter()
                .map(|amplitudes| LatticeState {
                    basis: self.basis.clone(),
                    amplitudes,
                })
                .collect()
        })
    }

    pub fn energy(&self, state: &LatticeState) -> f64 {
        let mut h = vec![Complex64::new(0.0, 0.0); self.dim()];
        self.hamiltonian.apply(state.amplitudes(), &mut h);
        state
            .amplitudes()
            .iter()
            .zip(&h)
            .map(|(a, b)| a.conj() * b)
            .sum::<Complex64>()
            .re
    }

    /// `|<J_+^N>/N!|^2` after the `pi/2` pulse about `y`.
    pub fn bell_correlator(&self, state: &LatticeState, config: KrylovConfig) -> Result<f64> {
        let psi = self.rotate_y(state.amplitudes(), FRAC_PI_2, config)?;
        let mut v = psi.clone();
        for step in 1..=self.params.n_atoms {
            v = self.spin.apply_raising(&v);
            let inv = 1.0 / step as f64;
            v.iter_mut().for_each(|x| *x *= inv);
        }
        let expectation: Complex64 = psi.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
        Ok(expectation.norm_sqr())
    }

    pub fn spin_summary(&self, state: &LatticeState) -> SpinSummary {
        let [jx, jy, jz] = self.spin.apply_all(state.amplitudes());
        SpinSummary::from_applied(self.params.n_atoms, state.amplitudes(), [&jx, &jy, &jz])
    }
}

fn normalized(mut v: Vec<Complex64>) -> Vec<Complex64> {
    let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= n);
    v
}
