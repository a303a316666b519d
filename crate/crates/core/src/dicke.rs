//! Collective-spin states of `N` two-mode bosons in the `J_z` eigenbasis.

use crate::special::LnFactorial;
use crate::tolerance::Tolerances;
use crate::wigner::{wigner_d, WignerMatrix};
use crate::{Error, Result};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::LN_2;

/// Pure state in the symmetric `j = N/2` sector.
///
/// `amplitudes[k]` is the coefficient of `|n>` with `n = k - N/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct DickeState {
    n_particles: usize,
    amplitudes: Vec<Complex64>,
}

impl DickeState {
    /// Wrap an amplitude vector of length `N + 1`, checking normalization.
    pub fn new(n_particles: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if n_particles == 0 {
            return Err(Error::InvalidParticleNumber {
                n: 0,
                reason: "need at least one particle",
            });
        }
        if amplitudes.len() != n_particles + 1 {
            return Err(Error::InvalidArgument(format!(
                "expected {} amplitudes for N={}, got {}",
                n_particles + 1,
                n_particles,
                amplitudes.len()
            )));
        }
        let norm_sqr: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > Tolerances::DEFAULT.norm {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self {
            n_particles,
            amplitudes,
        })
    }

    /// Basis state `|n>` given `2n`.
    pub fn basis(n_particles: usize, twice_n: i64) -> Result<Self> {
        let mut amps = vec![Complex64::new(0.0, 0.0); n_particles + 1];
        let slot = slot_of(n_particles, twice_n).ok_or_else(|| {
            Error::InvalidArgument(format!("2n={twice_n} outside the N={n_particles} ladder"))
        })?;
        amps[slot] = Complex64::new(1.0, 0.0);
        Self::new(n_particles, amps)
    }

    pub fn n_particles(&self) -> usize {
        self.n_particles
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// Amplitude of `|n>` given `2n`.
    pub fn amplitude(&self, twice_n: i64) -> Option<Complex64> {
        slot_of(self.n_particles, twice_n).map(|k| self.amplitudes[k])
    }

    /// `J_z` eigenvalue stored at `slot`.
    pub fn eigenvalue(&self, slot: usize) -> f64 {
        slot as f64 - self.n_particles as f64 / 2.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn overlap(&self, other: &DickeState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `exp(-i tau J_z^2) |psi>`.
    pub fn evolve_oat(&self, tau: f64) -> DickeState {
        let half = self.n_particles as f64 / 2.0;
        let amplitudes = self
            .amplitudes
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let n = k as f64 - half;
                c * Complex64::from_polar(1.0, -tau * n * n)
            })
            .collect();
        DickeState {
            n_particles: self.n_particles,
            amplitudes,
        }
    }

    /// `exp(-i theta J_y) |psi>`.
    pub fn rotate_y(&self, theta: f64) -> Result<DickeState> {
        let d = wigner_d(self.n_particles, theta)?;
        Ok(self.rotate_with(&d))
    }

    /// Apply a prebuilt rotation matrix; reuse it across a sweep.
    pub fn rotate_with(&self, d: &WignerMatrix) -> DickeState {
        assert_eq!(d.two_j(), self.n_particles, "rotation built for a different N");
        let dim = d.dim();
        let amplitudes = (0..dim)
            .into_par_iter()
            .map(|a| {
                d.row(a)
                    .iter()
                    .zip(&self.amplitudes)
                    .map(|(w, c)| c * *w)
                    .sum::<Complex64>()
            })
            .collect();
        DickeState {
            n_particles: self.n_particles,
            amplitudes,
        }
    }

    pub fn spin_summary(&self) -> SpinSummary {
        let n = self.n_particles;
        let psi = &self.amplitudes;
        let jp = apply_raising(n, psi);
        let jm = apply_lowering(n, psi);
        let jx: Vec<Complex64> = jp.iter().zip(&jm).map(|(p, m)| (p + m) * 0.5).collect();
        let jy: Vec<Complex64> = jp
            .iter()
            .zip(&jm)
            .map(|(p, m)| (p - m) * Complex64::new(0.0, -0.5))
            .collect();
        let jz: Vec<Complex64> = psi
            .iter()
            .enumerate()
            .map(|(k, c)| c * self.eigenvalue(k))
            .collect();
        SpinSummary::from_applied(n, psi, [&jx, &jy, &jz])
    }

    /// Spin-squeezing parameter `N * Var_perp,min / |<J>|^2`.
    pub fn squeezing_xi2(&self) -> Result<f64> {
        self.spin_summary().squeezing_xi2()
    }
}

/// Storage slot of `|n>` for `N` particles given `2n`.
pub fn slot_of(n_particles: usize, twice_n: i64) -> Option<usize> {
    let shifted = twice_n + n_particles as i64;
    if shifted < 0 || shifted % 2 != 0 {
        return None;
    }
    let k = (shifted / 2) as usize;
    (k <= n_particles).then_some(k)
}

/// `<k+1| J_+ |k> = sqrt((k+1)(N-k))` in slot labels.
#[inline]
pub fn raising_element(n_particles: usize, slot: usize) -> f64 {
    (((slot + 1) * (n_particles - slot)) as f64).sqrt()
}

pub(crate) fn apply_raising(n: usize, psi: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
    for k in 0..n {
        out[k + 1] = psi[k] * raising_element(n, k);
    }
    out
}

pub(crate) fn apply_lowering(n: usize, psi: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
    for k in 0..n {
        out[k] = psi[k + 1] * raising_element(n, k);
    }
    out
}

/// Coherent spin state `(a^+ + e^{i phi} b^+)^N |0> / sqrt(N! 2^N)`.
///
/// The amplitude of `|n>` is `e^{i phi (n + N/2)} 2^{-N/2} sqrt(C(N, N/2 + n))`;
/// at `phi = 0` this is the `+x` eigenstate of `J_x`.
pub fn make_css(n_particles: usize, phi: f64) -> Result<DickeState> {
    if n_particles == 0 || !n_particles.is_multiple_of(2) {
        return Err(Error::InvalidParticleNumber {
            n: n_particles,
            reason: "coherent state requires even N >= 2",
        });
    }
    let lf = LnFactorial::new(n_particles);
    let amplitudes = (0..=n_particles)
        .map(|k| {
            let mag = (0.5 * (lf.ln_binomial(n_particles, k) - n_particles as f64 * LN_2)).exp();
            Complex64::from_polar(mag, phi * k as f64)
        })
        .collect();
    Ok(DickeState {
        n_particles,
        amplitudes,
    })
}

/// First and second moments of the collective spin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinSummary {
    pub n_particles: usize,
    /// `(<J_x>, <J_y>, <J_z>)`.
    pub mean_spin: [f64; 3],
    /// `<J_a J_b + J_b J_a>/2 - <J_a><J_b>`.
    pub covariance: [[f64; 3]; 3],
}

impl SpinSummary {
    /// Assemble moments from `psi` and the three vectors `J_a psi`.
    pub fn from_applied(n_particles: usize, psi: &[Complex64], applied: [&[Complex64]; 3]) -> Self {
        let dot = |a: &[Complex64], b: &[Complex64]| -> Complex64 {
            a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
        };
        let mut mean = [0.0; 3];
        for (a, m) in mean.iter_mut().enumerate() {
            *m = dot(psi, applied[a]).re;
        }
        let mut covariance = [[0.0; 3]; 3];
        for a in 0..3 {
            for b in a..3 {
                // Re <J_a psi | J_b psi> is the symmetrized moment
                let sym = dot(applied[a], applied[b]).re;
                let c = sym - mean[a] * mean[b];
                covariance[a][b] = c;
                covariance[b][a] = c;
            }
        }
        Self {
            n_particles,
            mean_spin: mean,
            covariance,
        }
    }

    pub fn spin_length(&self) -> f64 {
        self.mean_spin.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Smallest variance in the plane orthogonal to the mean spin.
    pub fn min_perpendicular_variance(&self) -> Result<f64> {
        let length = self.spin_length();
        let threshold = Tolerances::DEFAULT.degeneracy * self.n_particles as f64;
        if length < threshold {
            return Err(Error::DegenerateSpin { length, threshold });
        }
        let n = self.mean_spin.map(|x| x / length);
        let (e1, e2) = orthonormal_complement(n);
        let quad = |u: [f64; 3], v: [f64; 3]| -> f64 {
            let mut acc = 0.0;
            for a in 0..3 {
                for b in 0..3 {
                    acc += u[a] * self.covariance[a][b] * v[b];
                }
            }
            acc
        };
        let c11 = quad(e1, e1);
        let c22 = quad(e2, e2);
        let c12 = quad(e1, e2);
        let mean = 0.5 * (c11 + c22);
        let radius = (0.25 * (c11 - c22).powi(2) + c12 * c12).sqrt();
        Ok(mean - radius)
    }

    pub fn squeezing_xi2(&self) -> Result<f64> {
        let var = self.min_perpendicular_variance()?;
        let length = self.spin_length();
        Ok(self.n_particles as f64 * var / (length * length))
    }
}

fn orthonormal_complement(n: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    // seed with the axis least aligned with n
    let idx = (0..3)
        .min_by(|&a, &b| n[a].abs().total_cmp(&n[b].abs()))
        .unwrap();
    let mut seed = [0.0; 3];
    seed[idx] = 1.0;
    let e1 = normalize(cross(n, seed));
    let e2 = cross(n, e1);
    (e1, e2)
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn normalize(v: [f64; 3]) -> [f64; 3] {
    let l = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.map(|x| x / l)
}

/// `xi^2` of the OAT-evolved coherent state at time `tau`.
pub fn oat_squeezing(n_particles: usize, tau: f64) -> Result<f64> {
    make_css(n_particles, 0.0)?.evolve_oat(tau).squeezing_xi2()
}

/// Time of best squeezing and the minimal `xi^2` for the OAT-evolved coherent
/// state: log-spaced scan around `N^(-2/3)` refined by golden-section search.
pub fn optimal_squeezing_time(n_particles: usize) -> Result<(f64, f64)> {
    let css = make_css(n_particles, 0.0)?;
    let xi2 = |tau: f64| -> f64 { css.evolve_oat(tau).squeezing_xi2().unwrap_or(f64::INFINITY) };
    let centre = (n_particles as f64).powf(-2.0 / 3.0);
    let grid: Vec<f64> = (0..=200)
        .map(|i| centre * 10f64.powf(-1.5 + 2.5 * i as f64 / 200.0))
        .collect();
    let values: Vec<f64> = grid.iter().map(|&t| xi2(t)).collect();
    let best = (0..grid.len())
        .min_by(|&a, &b| values[a].total_cmp(&values[b]))
        .unwrap();
    let mut lo = grid[best.saturating_sub(1)];
    let mut hi = grid[(best + 1).min(grid.len() - 1)];
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut f1, mut f2) = (xi2(x1), xi2(x2));
    while hi - lo > 1e-12 * hi {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = xi2(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = xi2(x2);
        }
    }
    let tau = 0.5 * (lo + hi);
    Ok((tau, xi2(tau)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn css_two_particles() {
        let s = make_css(2, 0.0).unwrap();
        let a = s.amplitudes();
        assert!((a[0] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((a[1] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((a[2] - c(0.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn css_rejects_odd_and_zero() {
        assert!(make_css(3, 0.0).is_err());
        assert!(make_css(0, 0.0).is_err());
    }

    #[test]
    fn css_central_weight_hundred() {
        let s = make_css(100, 0.0).unwrap();
        assert!((s.amplitude(0).unwrap().norm_sqr() - 0.0795892373871788).abs() < 1e-14);
    }

    #[test]
    fn css_phase_convention() {
        let phi = 0.37;
        let s = make_css(6, phi).unwrap();
        let base = make_css(6, 0.0).unwrap();
        for k in 0..=6 {
            let expected = base.amplitudes()[k] * Complex64::from_polar(1.0, phi * k as f64);
            assert!((s.amplitudes()[k] - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn slot_mapping_round_trip() {
        for n in 1..12usize {
            for k in 0..=n {
                let twice = 2 * k as i64 - n as i64;
                assert_eq!(slot_of(n, twice), Some(k));
            }
            assert_eq!(slot_of(n, n as i64 + 2), None);
            assert_eq!(slot_of(n, n as i64 + 1), None);
        }
    }

    #[test]
    fn oat_identity_at_zero_and_period_pi() {
        let s = make_css(40, 0.0).unwrap();
        assert_eq!(s.evolve_oat(0.0), s);
        // n^2 and n share parity, so tau = pi flips +x to -x
        let flipped = make_css(40, PI).unwrap();
        assert!((flipped.overlap(&s.evolve_oat(PI)).norm() - 1.0).abs() < 1e-10);
        assert!((s.overlap(&s.evolve_oat(2.0 * PI)).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn cat_state_at_half_period() {
        // N=4 at tau=pi/2: (|+x> and |-x> superposition) per the fractional revival form
        let n = 4;
        let tau_q = FRAC_PI_2;
        let q = 2;
        let mut target = vec![c(0.0, 0.0); n + 1];
        for k in 0..q {
            let phase = Complex64::from_polar(1.0, tau_q * (k * (k + n)) as f64);
            let css = make_css(n, 2.0 * tau_q * k as f64).unwrap();
            for (t, a) in target.iter_mut().zip(css.amplitudes()) {
                *t += phase * a / (q as f64).sqrt();
            }
        }
        let target = DickeState::new(n, target).unwrap();
        let evolved = make_css(n, 0.0).unwrap().evolve_oat(tau_q);
        assert!((target.overlap(&evolved).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn css_is_plus_x() {
        for &n in &[2usize, 10, 64] {
            let s = make_css(n, 0.0).unwrap().spin_summary();
            assert!((s.mean_spin[0] - n as f64 / 2.0).abs() < 1e-10);
            assert!(s.mean_spin[1].abs() < 1e-12 && s.mean_spin[2].abs() < 1e-12);
            assert!((s.covariance[1][1] - n as f64 / 4.0).abs() < 1e-10);
            assert!((s.covariance[2][2] - n as f64 / 4.0).abs() < 1e-10);
            assert!(s.covariance[0][0].abs() < 1e-10);
        }
    }

    #[test]
    fn oat_mean_spin_closed_form() {
        let n = 30;
        let css = make_css(n, 0.0).unwrap();
        for &tau in &[0.01, 0.1, 0.5, 1.3] {
            let s = css.evolve_oat(tau).spin_summary();
            // <J_x> = (N/2) cos^(N-1)(tau), summed directly as an oracle
            let oracle: f64 = (0..n)
                .map(|k| {
                    let m = k as f64 - n as f64 / 2.0;
                    let w = css.amplitudes()[k].re * css.amplitudes()[k + 1].re;
                    w * raising_element(n, k) * (tau * (2.0 * m + 1.0)).cos()
                })
                .sum();
            assert!((s.mean_spin[0] - oracle).abs() < 1e-12);
            let closed = n as f64 / 2.0 * tau.cos().powi(n as i32 - 1);
            assert!((s.mean_spin[0] - closed).abs() < 1e-10, "tau={tau}");
        }
    }

    #[test]
    fn rotation_identity_and_extreme() {
        let n = 16;
        let css = make_css(n, 0.0).unwrap();
        let same = css.rotate_y(0.0).unwrap();
        assert_eq!(same, css);
        let rotated = css.rotate_y(FRAC_PI_2).unwrap();
        assert!((rotated.amplitudes()[0].norm() - 1.0).abs() < 1e-10);
        assert!((rotated.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn two_quarter_turns_reverse_magnitudes() {
        let n = 12;
        let s = make_css(n, 0.3).unwrap().evolve_oat(0.21);
        let twice = s.rotate_y(FRAC_PI_2).unwrap().rotate_y(FRAC_PI_2).unwrap();
        for k in 0..=n {
            assert!((twice.amplitudes()[k].norm() - s.amplitudes()[n - k].norm()).abs() < 1e-10);
        }
    }

    #[test]
    fn squeezing_of_coherent_state_is_one() {
        let xi2 = make_css(100, 0.0).unwrap().squeezing_xi2().unwrap();
        assert!((xi2 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn squeezing_appears_shortly_after_start() {
        assert!(oat_squeezing(100, 0.01).unwrap() < 1.0);
    }

    #[test]
    fn squeezing_degenerate_at_cat_state() {
        let cat = make_css(8, 0.0).unwrap().evolve_oat(FRAC_PI_2);
        assert!(matches!(cat.squeezing_xi2(), Err(Error::DegenerateSpin { .. })));
    }

    #[test]
    fn rejects_unnormalized() {
        let r = DickeState::new(2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(matches!(r, Err(Error::NotNormalized { .. })));
    }

    #[test]
    fn odd_particle_numbers_rotate() {
        let s = DickeState::basis(3, 3).unwrap();
        let r = s.rotate_y(1.1).unwrap();
        assert!((r.norm_sqr() - 1.0).abs() < 1e-12);
        let e = s.evolve_oat(0.4);
        assert!((e.norm_sqr() - 1.0).abs() < 1e-12);
    }
}
