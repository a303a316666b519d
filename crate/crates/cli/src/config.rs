use crate::UsageError;
use clap::{Args, ValueEnum};
use oatbell::lattice::{BHParams, Boundary, KrylovConfig, REFERENCE_UAB_RATIO};
use serde::Deserialize;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Text,
}

/// Values read from `--config`; keys match the long flag names.
#[derive(Debug, Default, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ConfigFile {
    pub n: Option<usize>,
    pub tau_start: Option<f64>,
    pub tau_stop: Option<f64>,
    pub tau_points: Option<usize>,
    pub tau_list: Option<Vec<f64>>,
    pub t_start: Option<f64>,
    pub t_stop: Option<f64>,
    pub t_points: Option<usize>,
    pub v0: Option<f64>,
    pub a_scatter: Option<f64>,
    pub m_sites: Option<usize>,
    pub uab_ratio: Option<f64>,
    pub boundary: Option<Boundary>,
    pub dt: Option<f64>,
    pub krylov_dim: Option<usize>,
    pub checkpoint_every: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
    pub e: Option<f64>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, UsageError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| UsageError(format!("config {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct GridArgs {
    #[arg(long)]
    pub tau_start: Option<f64>,
    #[arg(long)]
    pub tau_stop: Option<f64>,
    #[arg(long)]
    pub tau_points: Option<usize>,
    /// Explicit comma-separated grid, used instead of start/stop/points.
    #[arg(long, value_delimiter = ',')]
    pub tau_list: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid(Vec<f64>);

impl Grid {
    pub fn linear(start: f64, stop: f64, points: usize) -> Result<Self, UsageError> {
        if points < 2 {
            return Err(UsageError(format!("grid needs at least 2 points, got {points}")));
        }
        let step = (stop - start) / (points - 1) as f64;
        Self::explicit((0..points).map(|i| start + step * i as f64).collect())
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self, UsageError> {
        if values.len() < 2 {
            return Err(UsageError(format!("grid needs at least 2 points, got {}", values.len())));
        }
        if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(UsageError("grid values must be finite and non-negative".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(UsageError("grid must be strictly increasing".into()));
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn resolve(
        start: Option<f64>,
        stop: Option<f64>,
        points: Option<usize>,
        list: Option<Vec<f64>>,
        what: &str,
    ) -> Result<Self, UsageError> {
        if let Some(list) = list {
            return Self::explicit(list);
        }
        match (start, stop, points) {
            (Some(a), Some(b), Some(p)) => Self::linear(a, b, p),
            (_, _, Some(p)) if p < 2 => Self::linear(0.0, 0.0, p),
            _ => Err(UsageError(format!(
                "{what} grid needs --{what}-start, --{what}-stop and --{what}-points"
            ))),
        }
    }
}

pub fn require<T>(value: Option<T>, name: &str) -> Result<T, UsageError> {
    value.ok_or_else(|| UsageError(format!("missing --{name}")))
}

#[derive(Debug, Clone, Default, Args)]
pub struct LatticeArgs {
    /// Number of lattice sites M.
    #[arg(long)]
    pub m_sites: Option<usize>,
    /// Lattice depth in recoil units.
    #[arg(long)]
    pub v0: Option<f64>,
    /// Intra-species scattering length in units of the lattice wavelength.
    #[arg(long)]
    pub a_scatter: Option<f64>,
    /// `U_ab / U` (default 0.95).
    #[arg(long)]
    pub uab_ratio: Option<f64>,
    #[arg(long)]
    pub boundary: Option<Boundary>,
    /// Largest single propagation step.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub krylov_dim: Option<usize>,
}

pub const DEFAULT_A_SCATTER: f64 = 0.005;

pub struct LatticeSetup {
    pub params: BHParams,
    pub krylov: KrylovConfig,
    pub max_dt: Option<f64>,
}

impl LatticeArgs {
    pub fn resolve(&self, n: usize, file: &ConfigFile) -> Result<LatticeSetup, UsageError> {
        let m = require(self.m_sites.or(file.m_sites), "m-sites")?;
        let v0 = require(self.v0.or(file.v0), "v0")?;
        let a = self.a_scatter.or(file.a_scatter).unwrap_or(DEFAULT_A_SCATTER);
        let ratio = self.uab_ratio.or(file.uab_ratio).unwrap_or(REFERENCE_UAB_RATIO);
        let boundary = self.boundary.or(file.boundary).unwrap_or_default();
        let params = BHParams::from_depth(m, n, v0, a, ratio, boundary)
            .map_err(|e| UsageError(e.to_string()))?;
        let mut krylov = KrylovConfig::default();
        if let Some(k) = self.krylov_dim.or(file.krylov_dim) {
            if k < 2 {
                return Err(UsageError("--krylov-dim must be at least 2".into()));
            }
            krylov.subspace_dim = k;
        }
        let max_dt = self.dt.or(file.dt);
        if let Some(dt) = max_dt {
            if !(dt > 0.0) {
                return Err(UsageError(format!("--dt must be positive, got {dt}")));
            }
        }
        Ok(LatticeSetup { params, krylov, max_dt })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert_eq!(Grid::linear(0.0, 1.0, 3).unwrap().values(), &[0.0, 0.5, 1.0]);
        assert!(Grid::linear(0.0, 1.0, 1).is_err());
        assert!(Grid::linear(1.0, 0.0, 4).is_err());
        assert!(Grid::explicit(vec![0.1, 0.1]).is_err());
        assert!(Grid::explicit(vec![]).is_err());
        assert!(Grid::resolve(None, None, Some(0), None, "tau").is_err());
        assert!(Grid::resolve(Some(0.0), None, Some(5), None, "tau").is_err());
    }

    #[test]
    fn config_file_keys() {
        let c: ConfigFile = toml::from_str("n = 8\ntau-start = 0.0\nboundary = \"periodic\"\nformat = \"json\"").unwrap();
        assert_eq!(c.n, Some(8));
        assert_eq!(c.boundary, Some(Boundary::Periodic));
        assert_eq!(c.format, Some(Format::Json));
        assert!(toml::from_str::<ConfigFile>("bogus = 1").is_err());
    }
}
