//! Closed-form approximations to the OAT Bell correlator.

use crate::bell::{bell_depth_log2, ExtremePair};
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::{LN_2, PI};

/// Fractional-revival instant `tau_q = pi / q` for even `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RevivalSpec {
    pub q: usize,
    pub tau_q: f64,
    pub n_particles: usize,
}

impl RevivalSpec {
    pub fn new(n_particles: usize, q: usize) -> Result<Self> {
        if !q.is_multiple_of(2) {
            return Err(Error::OddRevivalOrder(q));
        }
        if q < 2 || q > n_particles {
            return Err(Error::InvalidArgument(format!(
                "revival order q={q} must lie in [2, N={n_particles}]"
            )));
        }
        Ok(Self {
            q,
            tau_q: PI / q as f64,
            n_particles,
        })
    }

    /// Even `q` with `pi/q` equal to `tau` within relative `rel_tol`, if any.
    pub fn matching(n_particles: usize, tau: f64, rel_tol: f64) -> Option<Self> {
        if tau <= 0.0 {
            return None;
        }
        let q = (PI / tau).round();
        if q < 2.0 || q > n_particles as f64 {
            return None;
        }
        let q = q as usize;
        if !q.is_multiple_of(2) || ((PI / q as f64) / tau - 1.0).abs() > rel_tol {
            return None;
        }
        Self::new(n_particles, q).ok()
    }
}

/// Natural log of the Gaussian short-time estimate
/// `4/(1+k^2)^2 exp(-pi^2 N / (8 (1+k^2)))`, `k = tau N / 2`.
pub fn ln_gaussian_correlator(n: usize, tau: f64) -> f64 {
    let kappa = tau * n as f64 / 2.0;
    let u = 1.0 + kappa * kappa;
    4f64.ln() - 2.0 * u.ln() - PI * PI * n as f64 / (8.0 * u)
}

/// Gaussian short-time estimate of the Bell correlator.
pub fn gaussian_correlator(n: usize, tau: f64) -> f64 {
    ln_gaussian_correlator(n, tau).exp()
}

/// Large-`N` critical time `(2/N) sqrt(pi^2/(8 ln 2) - 1)`.
pub fn tau_crit_approx(n: usize) -> f64 {
    2.0 / n as f64 * (PI * PI / (8.0 * LN_2) - 1.0).sqrt()
}

/// Squeezing time scale `N^(-2/3)`.
pub fn tau_s(n: usize) -> f64 {
    (n as f64).powf(-2.0 / 3.0)
}

/// Extreme coefficients at `tau_q = pi/q` from the `q`-term revival sums.
///
/// These agree with [`crate::bell::extreme_coeffs_exact`] in magnitude; each
/// coefficient carries a different global phase.
pub fn revival_coeffs(n: usize, q: usize) -> Result<ExtremePair> {
    if !n.is_multiple_of(2) {
        return Err(Error::InvalidParticleNumber {
            n,
            reason: "revival sums require even N",
        });
    }
    let spec = RevivalSpec::new(n, q)?;
    let tau_q = spec.tau_q;
    let mut minus = Complex64::new(0.0, 0.0);
    let mut plus = Complex64::new(0.0, 0.0);
    for l in 0..q {
        let phase = Complex64::from_polar(1.0, tau_q * (l * l) as f64);
        let arg = tau_q * l as f64;
        minus += phase * arg.cos().powi(n as i32);
        plus += phase * arg.sin().powi(n as i32);
    }
    let norm = 1.0 / (q as f64).sqrt();
    let i_pow_n = Complex64::i().powu(n as u32);
    Ok(ExtremePair {
        c_minus: minus * norm,
        c_plus: plus * norm * i_pow_n,
    })
}

/// Plateau value `1/q^2` of the correlator at `tau_q`.
pub fn revival_correlator(q: usize) -> Result<f64> {
    if !q.is_multiple_of(2) {
        return Err(Error::OddRevivalOrder(q));
    }
    if q < 2 {
        return Err(Error::InvalidArgument(format!("revival order q={q} must be >= 2")));
    }
    Ok(1.0 / (q * q) as f64)
}

/// Correlator estimate used for quick depth reports: the Gaussian form before
/// `tau_s`, the `1/q^2` law with `q = pi/tau` after it, capped at `1/4`.
pub fn correlator_estimate(n: usize, tau: f64) -> f64 {
    if tau < tau_s(n) {
        gaussian_correlator(n, tau).min(0.25)
    } else {
        let q = PI / tau;
        (1.0 / (q * q)).min(0.25)
    }
}

/// Bell-correlation depth implied by [`correlator_estimate`].
pub fn shorttime_depth_estimate(n: usize, tau: f64) -> Result<usize> {
    if !(tau >= 0.0) {
        return Err(Error::InvalidArgument(format!("negative time {tau}")));
    }
    let ln_e = if tau < tau_s(n) {
        ln_gaussian_correlator(n, tau).min(0.25f64.ln())
    } else {
        correlator_estimate(n, tau).ln()
    };
    Ok(bell_depth_log2(ln_e / LN_2, n))
}
