use super::sparse::LinearOperator;
use crate::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KrylovConfig {
    /// Maximum Lanczos subspace dimension per step.
    pub subspace_dim: usize,
    /// Accepted a-posteriori error per step, relative to the state norm.
    pub tolerance: f64,
    /// How many times a rejected step may be halved.
    pub max_halvings: u32,
}

impl Default for KrylovConfig {
    fn default() -> Self {
        Self {
            subspace_dim: 30,
            tolerance: 1e-12,
            max_halvings: 24,
        }
    }
}

const CHUNK: usize = 1 << 13;

// fixed chunking keeps the summation order independent of the thread count
fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let partial = |(x, y): (&[Complex64], &[Complex64])| -> Complex64 {
        x.iter().zip(y).map(|(p, q)| p.conj() * q).sum()
    };
    if a.len() > 4 * CHUNK {
        let parts: Vec<Complex64> = a.par_chunks(CHUNK).zip(b.par_chunks(CHUNK)).map(partial).collect();
        parts.into_iter().sum()
    } else {
        a.chunks(CHUNK).zip(b.chunks(CHUNK)).map(partial).sum()
    }
}

fn norm(a: &[Complex64]) -> f64 {
    dot(a, a).re.sqrt()
}

fn axpy(alpha: Complex64, x: &[Complex64], y: &mut [Complex64]) {
    if y.len() > 1 << 15 {
        y.par_iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
    } else {
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi += alpha * xi;
        }
    }
}

struct Lanczos {
    vectors: Vec<Vec<Complex64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
    /// Norm of the residual after the last vector; zero on invariant subspace.
    residual: f64,
}

impl Lanczos {
    fn run(op: &dyn LinearOperator, start: &[Complex64], max_dim: usize) -> Lanczos {
        let n0 = norm(start);
        let dim = op.dim();
        let mut vectors: Vec<Vec<Complex64>> = Vec::with_capacity(max_dim);
        vectors.push(start.iter().map(|x| x / n0).collect());
        let mut alpha = Vec::with_capacity(max_dim);
        let mut beta: Vec<f64> = Vec::with_capacity(max_dim);
        let max_dim = max_dim.min(dim).max(1);
        let mut w = vec![Complex64::new(0.0, 0.0); dim];
        loop {
            let k = vectors.len() - 1;
            op.apply(&vectors[k], &mut w);
            let a = dot(&vectors[k], &w).re;
            alpha.push(a);
            // full reorthogonalization, two passes
            for _ in 0..2 {
                for v in &vectors {
                    let proj = dot(v, &w);
                    axpy(-proj, v, &mut w);
                }
            }
            let b = norm(&w);
            let scale = alpha.iter().map(|x| x.abs()).fold(1e-300, f64::max);
            if vectors.len() == max_dim || b <= 1e-13 * scale {
                return Lanczos {
                    vectors,
                    alpha,
                    beta,
                    residual: if b <= 1e-13 * scale { 0.0 } else { b },
                };
            }
            beta.push(b);
            vectors.push(w.iter().map(|x| x / b).collect());
        }
    }

    fn tridiagonal(&self) -> SymmetricEigen<f64, nalgebra::Dyn> {
        let m = self.alpha.len();
        let t = DMatrix::from_fn(m, m, |r, c| {
            if r == c {
                self.alpha[r]
            } else if r + 1 == c {
                self.beta[r]
            } else if c + 1 == r {
                self.beta[c]
            } else {
                0.0
            }
        });
        SymmetricEigen::new(t)
    }

    fn combine(&self, coeffs: &[Complex64]) -> Vec<Complex64> {
        let dim = self.vectors[0].len();
        let mut out = vec![Complex64::new(0.0, 0.0); dim];
        for (c, v) in coeffs.iter().zip(&self.vectors) {
            axpy(*c, v, &mut out);
        }
        out
    }
}

/// Short-time propagator `exp(-i H dt)` on a Lanczos subspace.
#[derive(Debug, Clone, Copy, Default)]
pub struct Propagator {
    pub config: KrylovConfig,
}

impl Propagator {
    pub fn new(config: KrylovConfig) -> Self {
        Self { config }
    }

    /// One step; rejects when the residual estimate
    /// `beta_m |[exp(-i T dt)]_{m,1}|` exceeds the tolerance.
    pub fn step(&self, op: &dyn LinearOperator, psi: &[Complex64], dt: f64) -> Result<Vec<Complex64>> {
        let n0 = norm(psi);
        if n0 == 0.0 {
            return Ok(psi.to_vec());
        }
        let lz = Lanczos::run(op, psi, self.config.subspace_dim);
        let eig = lz.tridiagonal();
        let m = lz.alpha.len();
        let phases: Vec<Complex64> = eig
            .eigenvalues
            .iter()
            .map(|&l| Complex64::from_polar(1.0, -l * dt))
            .collect();
        let coeffs: Vec<Complex64> = (0..m)
            .map(|r| {
                (0..m)
                    .map(|k| phases[k] * (eig.eigenvectors[(r, k)] * eig.eigenvectors[(0, k)]))
                    .sum::<Complex64>()
                    * n0
            })
            .collect();
        let residual = lz.residual * coeffs[m - 1].norm();
        let tolerance = self.config.tolerance * n0;
        if residual > tolerance {
            return Err(Error::StepRejected {
                dt,
                residual: residual / n0,
                tolerance: self.config.tolerance,
            });
        }
        Ok(lz.combine(&coeffs))
    }

    /// Propagate over `interval`, halving sub-steps whenever a step is rejected.
    pub fn advance(&self, op: &dyn LinearOperator, psi: &[Complex64], interval: f64) -> Result<Vec<Complex64>> {
        self.advance_depth(op, psi, interval, 0)
    }

    fn advance_depth(
        &self,
        op: &dyn LinearOperator,
        psi: &[Complex64],
        dt: f64,
        depth: u32,
    ) -> Result<Vec<Complex64>> {
        match self.step(op, psi, dt) {
            Err(Error::StepRejected { .. }) if depth < self.config.max_halvings => {
                let mid = self.advance_depth(op, psi, 0.5 * dt, depth + 1)?;
                self.advance_depth(op, &mid, 0.5 * dt, depth + 1)
            }
            other => other,
        }
    }
}

/// States at `t = k dt` for `k = 0..=round(t_final/dt)`.
pub fn evolve_krylov(
    op: &dyn LinearOperator,
    psi0: &[Complex64],
    t_final: f64,
    dt: f64,
    config: KrylovConfig,
) -> Result<Vec<Vec<Complex64>>> {
    if !(dt > 0.0) || !(t_final >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need dt > 0 and t_final >= 0 (dt={dt}, t_final={t_final})"
        )));
    }
    let steps = (t_final / dt).round() as usize;
    let prop = Propagator::new(config);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(psi0.to_vec());
    for _ in 0..steps {
        let next = prop.advance(op, out.last().unwrap(), dt)?;
        out.push(next);
    }
    Ok(out)
}

/// Lowest eigenpair by restarted Lanczos from `start`.
///
/// The Krylov space stays in whatever symmetry sector `start` occupies.
pub fn lanczos_ground_state(
    op: &dyn LinearOperator,
    start: &[Complex64],
    config: KrylovConfig,
    residual_tol: f64,
    max_restarts: usize,
) -> Result<(f64, Vec<Complex64>)> {
    let mut x: Vec<Complex64> = start.to_vec();
    let mut residual = f64::INFINITY;
    let mut hx = vec![Complex64::new(0.0, 0.0); op.dim()];
    for _ in 0..max_restarts {
        let lz = Lanczos::run(op, &x, config.subspace_dim.max(2));
        let eig = lz.tridiagonal();
        let (low, _) = eig
            .eigenvalues
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .unwrap();
        let theta = eig.eigenvalues[low];
        let coeffs: Vec<Complex64> = (0..lz.alpha.len())
            .map(|r| Complex64::new(eig.eigenvectors[(r, low)], 0.0))
            .collect();
        x = lz.combine(&coeffs);
        let nx = norm(&x);
        x.iter_mut().for_each(|v| *v /= nx);
        op.apply(&x, &mut hx);
        axpy(Complex64::new(-theta, 0.0), &x, &mut hx);
        residual = norm(&hx);
        if residual < residual_tol {
            return Ok((theta, x));
        }
    }
    Err(Error::NoConvergence {
        iterations: max_restarts,
        residual,
    })
}
