use super::krylov::KrylovConfig;
use super::system::LatticeSystem;
use crate::bell::bell_correlator_oat;
use crate::dicke::{make_css, SpinSummary};
use crate::{Error, Result};
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

/// First upward crossing of `threshold` on a sampled curve, interpolated
/// linearly in `ln y`. Samples must be sorted by `x`.
pub fn first_crossing(samples: &[(f64, f64)], threshold: f64) -> Option<f64> {
    samples.windows(2).find_map(|w| {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if y0 > threshold || y1 <= threshold {
            return None;
        }
        if y0 <= 0.0 {
            return Some(x1);
        }
        let (l0, l1, lt) = (y0.ln(), y1.ln(), threshold.ln());
        Some(x0 + (x1 - x0) * (lt - l0) / (l1 - l0))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossModelSample {
    pub t: f64,
    pub tau: f64,
    pub lattice: f64,
    pub oat: f64,
    pub lattice_xi2: f64,
    pub oat_xi2: f64,
}

/// Lattice and OAT Bell-correlator traces on a shared effective-time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossModelReport {
    pub n_atoms: usize,
    pub n_sites: usize,
    pub chi: f64,
    pub threshold: f64,
    pub samples: Vec<CrossModelSample>,
    pub lattice_crossing: Option<f64>,
    pub oat_crossing: Option<f64>,
    pub lattice_at_half_pi: f64,
    pub oat_at_half_pi: f64,
}

fn xi2_or_nan(s: &SpinSummary) -> f64 {
    s.squeezing_xi2().unwrap_or(f64::NAN)
}

impl CrossModelReport {
    /// Sample `tau = k pi / (2 points)`, `k = 0..=points`, i.e. `t = tau / chi`.
    pub fn run(system: &LatticeSystem, points: usize, config: KrylovConfig) -> Result<Self> {
        let chi = system.params().effective_chi();
        if chi == 0.0 || !chi.is_finite() {
            return Err(Error::InvalidArgument(
                "effective twisting rate is zero; there is no tau axis".into(),
            ));
        }
        if points < 2 {
            return Err(Error::InvalidArgument("need at least two sample intervals".into()));
        }
        let n = system.params().n_atoms;
        let dtau = FRAC_PI_2 / points as f64;
        let css = make_css(n, 0.0)?;
        let mut state = system.prepare_initial(config)?;
        let mut samples = Vec::with_capacity(points + 1);
        for k in 0..=points {
            if k > 0 {
                state = system.step(&state, dtau / chi, config)?;
            }
            let tau = k as f64 * dtau;
            let oat_state = css.evolve_oat(tau);
            samples.push(CrossModelSample {
                t: tau / chi,
                tau,
                lattice: system.bell_correlator(&state, config)?,
                oat: bell_correlator_oat(n, tau)?,
                lattice_xi2: xi2_or_nan(&system.spin_summary(&state)),
                oat_xi2: xi2_or_nan(&oat_state.spin_summary()),
            });
        }
        let threshold = 2f64.powi(-(n as i32));
        let trace = |f: fn(&CrossModelSample) -> f64| -> Vec<(f64, f64)> {
            samples.iter().map(|s| (s.tau, f(s))).collect()
        };
        let last = *samples.last().unwrap();
        Ok(Self {
            n_atoms: n,
            n_sites: system.params().n_sites,
            chi,
            threshold,
            lattice_crossing: first_crossing(&trace(|s| s.lattice), threshold),
            oat_crossing: first_crossing(&trace(|s| s.oat), threshold),
            lattice_at_half_pi: last.lattice,
            oat_at_half_pi: last.oat,
            samples,
        })
    }

    /// `|lattice/oat - 1|` for the crossing location, if both cross.
    pub fn crossing_rel_error(&self) -> Option<f64> {
        match (self.lattice_crossing, self.oat_crossing) {
            (Some(l), Some(o)) => Some((l / o - 1.0).abs()),
            _ => None,
        }
    }

    /// `|lattice(pi/2) / 0.25 - 1|`.
    pub fn half_pi_rel_error(&self) -> f64 {
        (self.lattice_at_half_pi / 0.25 - 1.0).abs()
    }
}
