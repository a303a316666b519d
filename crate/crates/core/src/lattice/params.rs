use crate::{Error, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Inter- to intra-species interaction ratio of the reference preset.
pub const REFERENCE_UAB_RATIO: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

impl std::str::FromStr for Boundary {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "open" => Ok(Boundary::Open),
            "periodic" => Ok(Boundary::Periodic),
            other => Err(Error::InvalidArgument(format!("unknown boundary '{other}'"))),
        }
    }
}

impl std::fmt::Display for Boundary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        })
    }
}

/// Hopping and interaction amplitudes in recoil units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Couplings {
    pub j_hop: f64,
    pub u_aa: f64,
    pub u_bb: f64,
    pub u_ab: f64,
}

/// `J = (4/sqrt(pi)) V0^(3/4) exp(-2 sqrt(V0))`.
pub fn hopping_from_depth(v0: f64) -> f64 {
    4.0 / PI.sqrt() * v0.powf(0.75) * (-2.0 * v0.sqrt()).exp()
}

/// `U = sqrt(8/pi) a V0^(1/4)` with `a` the scattering length in lattice units.
pub fn interaction_from_depth(v0: f64, scattering_length: f64) -> f64 {
    (8.0 / PI).sqrt() * scattering_length * v0.powf(0.25)
}

/// Couplings for lattice depth `v0` (recoil units), intra-species scattering
/// length `a_aa`, and `U_ab = a_ab_ratio * U`. Both species share `U`.
pub fn lattice_params(v0: f64, a_aa: f64, a_ab_ratio: f64) -> Result<Couplings> {
    if !(v0 > 0.0) || !v0.is_finite() {
        return Err(Error::InvalidArgument(format!("lattice depth must be positive, got {v0}")));
    }
    let u = interaction_from_depth(v0, a_aa);
    Ok(Couplings {
        j_hop: hopping_from_depth(v0),
        u_aa: u,
        u_bb: u,
        u_ab: a_ab_ratio * u,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BHParams {
    pub n_sites: usize,
    pub n_atoms: usize,
    /// Lattice depth the couplings were derived from, if any.
    pub v0: Option<f64>,
    pub j_hop: f64,
    pub u_aa: f64,
    pub u_bb: f64,
    pub u_ab: f64,
    pub boundary: Boundary,
}

impl BHParams {
    pub fn from_couplings(n_sites: usize, n_atoms: usize, c: Couplings, boundary: Boundary) -> Result<Self> {
        if n_sites == 0 || n_atoms == 0 {
            return Err(Error::InvalidArgument("need at least one site and one atom".into()));
        }
        Ok(Self {
            n_sites,
            n_atoms,
            v0: None,
            j_hop: c.j_hop,
            u_aa: c.u_aa,
            u_bb: c.u_bb,
            u_ab: c.u_ab,
            boundary,
        })
    }

    pub fn from_depth(
        n_sites: usize,
        n_atoms: usize,
        v0: f64,
        a_aa: f64,
        a_ab_ratio: f64,
        boundary: Boundary,
    ) -> Result<Self> {
        let c = lattice_params(v0, a_aa, a_ab_ratio)?;
        let mut p = Self::from_couplings(n_sites, n_atoms, c, boundary)?;
        p.v0 = Some(v0);
        Ok(p)
    }

    /// Symmetric preset with `U_ab = 0.95 U`.
    pub fn reference_preset(n_sites: usize, n_atoms: usize, v0: f64, a_aa: f64, boundary: Boundary) -> Result<Self> {
        Self::from_depth(n_sites, n_atoms, v0, a_aa, REFERENCE_UAB_RATIO, boundary)
    }

    pub fn effective_chi(&self) -> f64 {
        effective_chi(self)
    }
}

/// Twisting rate of the zero-momentum mode, `(U_aa - U_ab) / M`.
pub fn effective_chi(params: &BHParams) -> f64 {
    (params.u_aa - params.u_ab) / params.n_sites as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hopping_at_depth_four() {
        let expected = 4.0 / PI.sqrt() * 4f64.powf(0.75) * (-4.0f64).exp();
        assert!((hopping_from_depth(4.0) - expected).abs() < 1e-15);
        assert!((hopping_from_depth(4.0) - 0.1169).abs() < 1e-4);
    }

    #[test]
    fn hopping_decreases_with_depth() {
        let mut prev = f64::INFINITY;
        let mut v = 1.0;
        while v <= 40.0 {
            let j = hopping_from_depth(v);
            assert!(j < prev);
            prev = j;
            v += 0.25;
        }
    }

    #[test]
    fn preset_ratios_and_formulas() {
        let p = BHParams::reference_preset(8, 8, 5.0, 0.03, Boundary::Open).unwrap();
        assert!((p.u_ab / p.u_aa - 0.95).abs() < 1e-15);
        assert_eq!(p.u_aa, p.u_bb);
        let v0 = p.v0.unwrap();
        assert!((p.j_hop - 4.0 / PI.sqrt() * v0.powf(0.75) * (-2.0 * v0.sqrt()).exp()).abs() < 1e-12);
        assert!((p.u_aa - (8.0 / PI).sqrt() * 0.03 * v0.powf(0.25)).abs() < 1e-12);
        assert!((p.effective_chi() - 0.05 * p.u_aa / 8.0).abs() < 1e-15);
    }

    #[test]
    fn chi_cases() {
        let mut p = BHParams::reference_preset(4, 4, 3.0, 0.02, Boundary::Periodic).unwrap();
        let chi = p.effective_chi();
        p.n_sites = 8;
        assert!((p.effective_chi() - chi / 2.0).abs() < 1e-18);
        p.u_ab = p.u_aa;
        assert_eq!(p.effective_chi(), 0.0);
    }

    #[test]
    fn rejects_nonpositive_depth() {
        assert!(lattice_params(0.0, 0.1, 0.95).is_err());
        assert!(lattice_params(-2.0, 0.1, 0.95).is_err());
        assert!(lattice_params(f64::NAN, 0.1, 0.95).is_err());
    }

    #[test]
    fn boundary_parse() {
        assert_eq!("open".parse::<Boundary>().unwrap(), Boundary::Open);
        assert_eq!("Periodic".parse::<Boundary>().unwrap(), Boundary::Periodic);
        assert!("ring".parse::<Boundary>().is_err());
    }
}
