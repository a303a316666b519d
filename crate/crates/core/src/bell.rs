//! Many-body Bell correlator `E = |<J_+^N>/N!|^2` for OAT states, with the
//! local-realism bound `2^-N`, the full-separability bound `4^-N`, and the
//! depth classifiers built on them.
//!
//! For the rotated OAT state the correlator is the squared product of the two
//! extreme Dicke coefficients,
//!
//! ```text
//! c_- = 2^-N sum_n C(N, n+N/2) e^{-i tau n^2}
//! c_+ = 2^-N sum_n C(N, n+N/2) (-1)^n e^{-i tau n^2}
//! ```
//!
//! `c_+` is an alternating sum that cancels to `~2^(-N/2)` near the critical
//! time, so both sums are evaluated in fixed point with `N + 160` fractional
//! bits (see [`crate::precise`]).

use crate::dicke::{raising_element, DickeState};
use crate::precise::{Fixed, FixedComplex};
use crate::special::log2_floor_exact;
use crate::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, LN_2};

/// Coefficients of `|-N/2>` and `|+N/2>` after the readout rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtremePair {
    pub c_minus: Complex64,
    pub c_plus: Complex64,
}

impl ExtremePair {
    /// `|c_- c_+|^2`.
    pub fn correlator(&self) -> f64 {
        (self.c_minus * self.c_plus).norm_sqr()
    }
}

fn require_even(n: usize) -> Result<()> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidParticleNumber {
            n,
            reason: "OAT correlator requires even N >= 2",
        });
    }
    Ok(())
}

struct PreciseExtremes {
    fx: Fixed,
    c_minus: FixedComplex,
    c_plus: FixedComplex,
}

fn precise_extremes(n: usize, tau: f64) -> PreciseExtremes {
    let guard = 96 + 2 * (usize::BITS - n.leading_zeros());
    let fx = Fixed::new(n as u32 + guard);
    let half = n / 2;

    // weights C(N, half + m) * 2^(bits - N), m = 0..=half, exact
    let shift = (fx.bits() as usize) - n;
    let mut binom = BigInt::from(1u32);
    let mut weights = Vec::with_capacity(half + 1);
    let mut central = BigInt::from(1u32);
    for k in 0..=n {
        if k == half {
            central = binom.clone();
        }
        if k >= half {
            weights.push(&binom << shift);
        }
        if k < n {
            binom = binom * (n - k) / (k + 1);
        }
    }
    debug_assert_eq!(weights[0], &central << shift);

    // e^{-i tau m^2} by the recurrence z_{m+1} = z_m e^{-i tau (2m+1)}
    let step2 = fx.exp_i(-2.0 * tau);
    let mut factor = fx.exp_i(-tau);
    let mut phase = fx.one();
    let mut c_minus = fx.zero();
    let mut c_plus = fx.zero();
    for (m, w) in weights.iter().enumerate() {
        let mut term = fx.mul_real(&phase, w);
        if m > 0 {
            // +m and -m contribute identically
            term.re <<= 1usize;
            term.im <<= 1usize;
        }
        fx.add_assign(&mut c_minus, &term);
        if m % 2 == 0 {
            fx.add_assign(&mut c_plus, &term);
        } else {
            fx.sub_assign(&mut c_plus, &term);
        }
        if m < half {
            phase = fx.mul(&phase, &factor);
            factor = fx.mul(&factor, &step2);
        }
    }
    PreciseExtremes {
        fx,
        c_minus,
        c_plus,
    }
}

/// The two extreme coefficients of the rotated OAT state.
///
/// `c_plus` follows the plain alternating-sum form; the rotated state's
/// `|+N/2>` amplitude equals `(-1)^(N/2) c_plus`.
pub fn extreme_coeffs_exact(n: usize, tau: f64) -> Result<ExtremePair> {
    require_even(n)?;
    let p = precise_extremes(n, tau);
    let (a, b) = p.fx.to_f64(&p.c_minus);
    let (c, d) = p.fx.to_f64(&p.c_plus);
    Ok(ExtremePair {
        c_minus: Complex64::new(a, b),
        c_plus: Complex64::new(c, d),
    })
}

/// Natural log of the OAT Bell correlator; finite far below `f64` underflow.
pub fn bell_ln_correlator_oat(n: usize, tau: f64) -> Result<f64> {
    require_even(n)?;
    let p = precise_extremes(n, tau);
    Ok(p.fx.ln_norm_sqr(&p.c_minus) + p.fx.ln_norm_sqr(&p.c_plus))
}

/// OAT Bell correlator `|c_- c_+|^2` at dimensionless time `tau`.
pub fn bell_correlator_oat(n: usize, tau: f64) -> Result<f64> {
    Ok(bell_ln_correlator_oat(n, tau)?.exp())
}

/// `|<psi| J_+^N |psi> / N!|^2` by `N` successive applications of `J_+`,
/// dividing by the step index each time.
pub fn correlator_from_jplus(state: &DickeState) -> f64 {
    let n = state.n_particles();
    let psi = state.amplitudes();
    let mut v = psi.to_vec();
    for step in 1..=n {
        let mut next = vec![Complex64::new(0.0, 0.0); n + 1];
        for k in 0..n {
            next[k + 1] = v[k] * (raising_element(n, k) / step as f64);
        }
        v = next;
    }
    let expectation: Complex64 = psi.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
    expectation.norm_sqr()
}

fn check_correlator(correlator: f64) -> Result<()> {
    if correlator.is_nan() || correlator < 0.0 {
        return Err(Error::CorrelatorOutOfRange(correlator));
    }
    Ok(())
}

/// Largest `t` with `correlator > 2^t`, or `None` for zero.
fn strict_log2_floor(correlator: f64) -> Option<i64> {
    if correlator == 0.0 {
        return None;
    }
    let (e, above) = log2_floor_exact(correlator);
    Some(if above { e } else { e - 1 })
}

/// Bell-correlation depth: `0` when `E <= 2^-N`, otherwise the largest
/// `k` in `[3, N]` with `E > 2^-(N-k) / 8`.
pub fn bell_depth(correlator: f64, n: usize) -> Result<usize> {
    check_correlator(correlator)?;
    let Some(t) = strict_log2_floor(correlator) else {
        return Ok(0);
    };
    // E > 2^(k - N - 3)  <=>  k <= t + N + 3
    let k = t + n as i64 + 3;
    Ok(if k < 3 { 0 } else { (k as usize).min(n) })
}

/// Entanglement depth: `1` when `E <= 4^-N`, otherwise the largest `k` in
/// `[2, N]` with `E > 4^-(N-k) / 16`.
pub fn entanglement_depth(correlator: f64, n: usize) -> Result<usize> {
    check_correlator(correlator)?;
    let Some(t) = strict_log2_floor(correlator) else {
        return Ok(1);
    };
    // E > 2^(2k - 2N - 4)  <=>  2k <= t + 2N + 4
    let twice_k = t + 2 * n as i64 + 4;
    if twice_k < 4 {
        return Ok(1);
    }
    Ok(((twice_k / 2) as usize).min(n))
}

/// Bell depth from `log2 E`, for correlators below `f64` range.
pub fn bell_depth_log2(log2_correlator: f64, n: usize) -> usize {
    if log2_correlator == f64::NEG_INFINITY {
        return 0;
    }
    let x = log2_correlator + n as f64 + 3.0;
    let k = x.ceil() - 1.0;
    if k < 3.0 {
        0
    } else {
        (k as usize).min(n)
    }
}

/// Entanglement depth from `log2 E`.
pub fn entanglement_depth_log2(log2_correlator: f64, n: usize) -> usize {
    if log2_correlator == f64::NEG_INFINITY {
        return 1;
    }
    // 2k - 2N - 4 < log2 E
    let x = (log2_correlator + 2.0 * n as f64 + 4.0) / 2.0;
    let k = x.ceil() - 1.0;
    if k < 2.0 {
        1
    } else {
        (k as usize).min(n)
    }
}

/// Correlator value with every bound and certificate derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct BellReport {
    pub correlator: f64,
    pub ln_correlator: f64,
    pub n_particles: usize,
    /// `2^-N` (zero once it underflows; see `log2_lhv_bound`).
    pub lhv_bound: f64,
    pub separable_bound: f64,
    pub log2_lhv_bound: f64,
    pub log2_separable_bound: f64,
    pub bell_depth: usize,
    pub entanglement_depth: usize,
}

impl BellReport {
    pub fn classify(correlator: f64, n: usize) -> Result<Self> {
        check_correlator(correlator)?;
        if correlator > 0.25 + 1e-12 {
            return Err(Error::CorrelatorOutOfRange(correlator));
        }
        Ok(Self {
            correlator,
            ln_correlator: correlator.ln(),
            n_particles: n,
            lhv_bound: 2f64.powi(-(n as i32)),
            separable_bound: 4f64.powi(-(n as i32)),
            log2_lhv_bound: -(n as f64),
            log2_separable_bound: -2.0 * n as f64,
            bell_depth: bell_depth(correlator, n)?,
            entanglement_depth: entanglement_depth(correlator, n)?,
        })
    }

    /// Classify from `ln E`, keeping bounds on the log scale.
    pub fn from_ln(ln_correlator: f64, n: usize) -> Result<Self> {
        if ln_correlator.is_nan() || ln_correlator > (0.25f64).ln() + 1e-9 {
            return Err(Error::CorrelatorOutOfRange(ln_correlator.exp()));
        }
        let correlator = ln_correlator.exp();
        let log2 = ln_correlator / LN_2;
        // exact classification whenever E is a normal double
        let (bell, ent) = if correlator > f64::MIN_POSITIVE {
            (bell_depth(correlator, n)?, entanglement_depth(correlator, n)?)
        } else {
            (bell_depth_log2(log2, n), entanglement_depth_log2(log2, n))
        };
        Ok(Self {
            correlator,
            ln_correlator,
            n_particles: n,
            lhv_bound: 2f64.powi(-(n as i32)),
            separable_bound: 4f64.powi(-(n as i32)),
            log2_lhv_bound: -(n as f64),
            log2_separable_bound: -2.0 * n as f64,
            bell_depth: bell,
            entanglement_depth: ent,
        })
    }

    pub fn violates_local_realism(&self) -> bool {
        self.bell_depth >= 3
    }

    pub fn is_entangled(&self) -> bool {
        self.entanglement_depth >= 2
    }
}

/// Smallest `tau > 0` where the OAT correlator reaches `2^-N`.
///
/// The comparison is `ln E + N ln 2 = 0`; the bracket starts from
/// `bracket_hint` (default: `1.77/N`) and expands geometrically, then
/// bisection runs to relative width `1e-8`.
pub fn tau_crit_exact(n: usize, bracket_hint: Option<f64>) -> Result<f64> {
    require_even(n)?;
    if n < 4 {
        return Err(Error::InvalidParticleNumber {
            n,
            reason: "critical time defined for N >= 4",
        });
    }
    let excess = |tau: f64| -> f64 {
        bell_ln_correlator_oat(n, tau).expect("validated N") + n as f64 * LN_2
    };
    let guess = bracket_hint
        .filter(|t| t.is_finite() && *t > 0.0)
        .unwrap_or_else(|| crate::analytic::tau_crit_approx(n))
        .min(FRAC_PI_2);

    // lower end: walk down until below the bound
    let mut lo = guess;
    while excess(lo) >= 0.0 {
        lo *= 0.5;
        if lo < 1e-12 {
            return Err(Error::NoCrossing { n });
        }
    }
    // upper end: walk up until above the bound
    let mut hi = lo;
    loop {
        let next = (hi * 1.25).min(FRAC_PI_2);
        if excess(next) > 0.0 {
            hi = next;
            break;
        }
        if next >= FRAC_PI_2 {
            return Err(Error::NoCrossing { n });
        }
        lo = next;
        hi = next;
    }
    while (hi - lo) > 1e-8 * hi {
        let mid = 0.5 * (lo + hi);
        if excess(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Result of the deterministic local-strategy enumeration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LhvMaximum {
    /// Maximum of `|sigma_+^(1) ... sigma_+^(N)|^2`.
    pub maximum: f64,
    /// Number of the `4^N` strategies attaining it.
    pub attained_by: u64,
    pub strategies: u64,
}

/// Maximum of the local-realistic correlator over all `4^N` deterministic
/// strategies, each party fixing `sigma_1, sigma_2` in `{+1, -1}`.
///
/// Products are carried as Gaussian integers `prod (sigma_1 + i sigma_2)`, so
/// `|.|^2 / 4^N` is exact.
pub fn lhv_max_bruteforce(n: usize) -> Result<LhvMaximum> {
    const MAX: usize = 8;
    if n > MAX {
        return Err(Error::TooManyParties { n, max: MAX });
    }
    if n == 0 {
        return Err(Error::InvalidParticleNumber {
            n,
            reason: "need at least one party",
        });
    }
    let strategies = 1u64 << (2 * n);
    let mut best: i64 = -1;
    let mut count = 0u64;
    for code in 0..strategies {
        let (mut re, mut im) = (1i64, 0i64);
        for party in 0..n {
            let s1 = if code >> (2 * party) & 1 == 0 { 1 } else { -1 };
            let s2 = if code >> (2 * party + 1) & 1 == 0 { 1 } else { -1 };
            let (a, b) = (re * s1 - im * s2, re * s2 + im * s1);
            re = a;
            im = b;
        }
        let mag = re * re + im * im;
        match mag.cmp(&best) {
            std::cmp::Ordering::Greater => {
                best = mag;
                count = 1;
            }
            std::cmp::Ordering::Equal => count += 1,
            std::cmp::Ordering::Less => {}
        }
    }
    Ok(LhvMaximum {
        maximum: best as f64 / 4f64.powi(n as i32),
        attained_by: count,
        strategies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dicke::make_css;
    use crate::wigner::wigner_d;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn zero_time_coefficients() {
        let p = extreme_coeffs_exact(20, 0.0).unwrap();
        assert!((p.c_minus - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(p.c_plus.norm() < 1e-15);
        assert_eq!(bell_correlator_oat(20, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn half_period_is_noon() {
        for n in (2..=60).step_by(2) {
            let p = extreme_coeffs_exact(n, FRAC_PI_2).unwrap();
            assert!((p.c_minus.norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
            assert!((p.c_plus.norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
            assert!((bell_correlator_oat(n, FRAC_PI_2).unwrap() - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn frozen_values_from_high_precision_reference() {
        // 400-digit reference evaluation of the binomial phase sums
        let e = bell_correlator_oat(8, 0.3).unwrap();
        assert!((e - 0.0010623661597412986).abs() < 1e-15);
        let e = bell_correlator_oat(100, 0.05).unwrap();
        assert!((e / 1.1508312690255518e-15 - 1.0).abs() < 1e-10);
        let ln = bell_ln_correlator_oat(1000, 0.004).unwrap();
        assert!((ln - -476.981_886_074_145_5).abs() < 1e-9);
        let e = bell_correlator_oat(200, PI / 4.0).unwrap();
        assert!((e - 0.0625).abs() < 1e-12);
    }

    #[test]
    fn pipeline_matches_direct_sums() {
        let n = 24;
        let d = wigner_d(n, FRAC_PI_2).unwrap();
        let css = make_css(n, 0.0).unwrap();
        let sign = if (n / 2) % 2 == 0 { 1.0 } else { -1.0 };
        for i in 0..40 {
            let tau = PI * i as f64 / 39.0;
            let rotated = css.evolve_oat(tau).rotate_with(&d);
            let p = extreme_coeffs_exact(n, tau).unwrap();
            assert!((rotated.amplitudes()[0] - p.c_minus).norm() < 1e-12);
            assert!((rotated.amplitudes()[n] - p.c_plus * sign).norm() < 1e-12);
            let via_jplus = correlator_from_jplus(&rotated);
            assert!((via_jplus - p.correlator()).abs() < 1e-12);
        }
    }

    #[test]
    fn noon_states() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        for &n in &[2usize, 5, 10] {
            let mut amps = vec![Complex64::new(0.0, 0.0); n + 1];
            amps[0] = Complex64::new(h, 0.0);
            amps[n] = Complex64::new(h, 0.0);
            let s = DickeState::new(n, amps).unwrap();
            assert!((correlator_from_jplus(&s) - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn depth_examples() {
        assert_eq!(bell_depth(4.1e-3, 8).unwrap(), 3);
        assert_eq!(bell_depth(8e-3, 8).unwrap(), 4);
        assert_eq!(bell_depth(1e-4, 1000).unwrap(), 989);
        assert_eq!(bell_depth(0.13, 17).unwrap(), 17);
        assert_eq!(bell_depth(0.0, 8).unwrap(), 0);
        assert_eq!(entanglement_depth(1.6e-5, 8).unwrap(), 2);
        assert_eq!(entanglement_depth(2.5e-4, 8).unwrap(), 4);
        assert_eq!(entanglement_depth(0.07, 30).unwrap(), 30);
        assert_eq!(entanglement_depth(0.0, 8).unwrap(), 1);
        assert!(bell_depth(-1e-3, 8).is_err());
        assert!(entanglement_depth(-1e-3, 8).is_err());
    }

    #[test]
    fn depth_boundaries_are_strict() {
        // exactly at 2^-N: not a violation
        assert_eq!(bell_depth(2f64.powi(-8), 8).unwrap(), 0);
        assert_eq!(bell_depth(2f64.powi(-7), 8).unwrap(), 3);
        assert_eq!(entanglement_depth(4f64.powi(-8), 8).unwrap(), 1);
        for n in [4usize, 8, 30, 500] {
            let lhv = 2f64.powi(-(n as i32));
            let sep = 4f64.powi(-(n as i32));
            assert_eq!(bell_depth(lhv * 1.001, n).unwrap(), 3);
            assert_eq!(entanglement_depth(sep * 1.001, n).unwrap(), 2);
        }
    }

    fn literal_bell_depth(e: f64, n: usize) -> usize {
        if e <= 2f64.powi(-(n as i32)) {
            return 0;
        }
        (3..=n)
            .filter(|&k| e > 0.125 * 2f64.powi(-((n - k) as i32)))
            .max()
            .unwrap_or(0)
    }

    fn literal_entanglement_depth(e: f64, n: usize) -> usize {
        if e <= 4f64.powi(-(n as i32)) {
            return 1;
        }
        (2..=n)
            .filter(|&k| e > 4f64.powi(-((n - k) as i32)) / 16.0)
            .max()
            .unwrap_or(1)
    }

    proptest! {
        #[test]
        fn closed_form_depth_matches_literal_scan(log2e in -250.0f64..-2.0, n in 3usize..120) {
            let e = 2f64.powf(log2e);
            prop_assert_eq!(bell_depth(e, n).unwrap(), literal_bell_depth(e, n));
            prop_assert_eq!(entanglement_depth(e, n).unwrap(), literal_entanglement_depth(e, n));
            prop_assert_eq!(bell_depth_log2(e.log2(), n), bell_depth(e, n).unwrap());
        }

        #[test]
        fn depths_are_monotone(a in 0.0f64..0.25, b in 0.0f64..0.25, n in 3usize..64) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(bell_depth(lo, n).unwrap() <= bell_depth(hi, n).unwrap());
            prop_assert!(entanglement_depth(lo, n).unwrap() <= entanglement_depth(hi, n).unwrap());
        }

        #[test]
        fn bell_certificate_implies_entanglement(log2e in -200.0f64..-2.0, n in 3usize..100) {
            let e = 2f64.powf(log2e);
            if bell_depth(e, n).unwrap() >= 3 {
                prop_assert!(entanglement_depth(e, n).unwrap() >= 2);
            }
        }

        #[test]
        fn exact_pair_matches_rotation(tau in 0.0f64..PI, half in 1usize..20) {
            let n = 2 * half;
            let rotated = make_css(n, 0.0).unwrap().evolve_oat(tau).rotate_y(FRAC_PI_2).unwrap();
            let e = bell_correlator_oat(n, tau).unwrap();
            prop_assert!((correlator_from_jplus(&rotated) - e).abs() < 1e-10);
        }
    }

    #[test]
    fn critical_time_regression() {
        // reference crossings from a 400-digit evaluation of the phase sums
        let cases = [
            (4usize, 0.76434904698679),
            (8, 0.372819059763515),
            (16, 0.186682481567495),
            (100, 2.99550340656817 / 100.0),
            (200, 2.99651146525627 / 200.0),
        ];
        for (n, expected) in cases {
            let t = tau_crit_exact(n, None).unwrap();
            assert!((t / expected - 1.0).abs() < 1e-7, "N={n}: {t} vs {expected}");
            let ln = bell_ln_correlator_oat(n, t).unwrap();
            let target = -(n as f64) * LN_2;
            assert!(((ln - target) / target).abs() < 1e-6);
        }
    }

    #[test]
    fn critical_time_rejects_small_or_odd() {
        assert!(tau_crit_exact(2, None).is_err());
        assert!(tau_crit_exact(7, None).is_err());
    }

    #[test]
    fn lhv_small_cases() {
        let r = lhv_max_bruteforce(2).unwrap();
        assert_eq!(r.maximum, 0.25);
        assert_eq!(lhv_max_bruteforce(3).unwrap().maximum, 0.125);
        let r = lhv_max_bruteforce(4).unwrap();
        assert_eq!(r.maximum, 1.0 / 16.0);
        assert_eq!(r.attained_by, 256);
        assert!(matches!(lhv_max_bruteforce(9), Err(Error::TooManyParties { .. })));
    }

    #[test]
    fn report_bounds() {
        let r = BellReport::classify(0.13, 12).unwrap();
        assert_eq!(r.bell_depth, 12);
        assert_eq!(r.entanglement_depth, 12);
        let r = BellReport::classify(0.0, 12).unwrap();
        assert_eq!((r.bell_depth, r.entanglement_depth), (0, 1));
        assert!(BellReport::classify(0.3, 12).is_err());
        let r = BellReport::from_ln(-2000.0, 2000).unwrap();
        // log2 E = -2885.4 > -4000: entangled, not Bell-correlated
        assert_eq!(r.bell_depth, 0);
        assert!(r.entanglement_depth >= 2);
    }
}
