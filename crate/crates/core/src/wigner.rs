//! Wigner small-d matrices `d^j_{n m}(theta) = <n| exp(-i theta J_y) |m>`.
//!
//! Entries are evaluated through the Jacobi-polynomial form
//!
//! ```text
//! d^j_{n m} = xi * sqrt(s! (s+mu+nu)! / ((s+mu)! (s+nu)!))
//!                * sin(theta/2)^mu * cos(theta/2)^nu * P_s^(mu,nu)(cos theta)
//! ```
//!
//! with `mu = |n-m|`, `nu = |n+m|`, `s = j - max(|n|,|m|)` and
//! `xi = (-1)^(n-m)` when `n > m`, else `1`. The prefactor and the powers are
//! accumulated as logarithms and the Jacobi recurrence is renormalized on the
//! fly, so no intermediate overflows for `2j` in the thousands.

use crate::special::LnFactorial;
use crate::{Error, Result};
use rayon::prelude::*;

/// Dense `(2j+1) x (2j+1)` rotation matrix, row-major, indexed by slots
/// `n + j` and `m + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerMatrix {
    two_j: usize,
    theta: f64,
    entries: Vec<f64>,
}

impl WignerMatrix {
    pub fn two_j(&self) -> usize {
        self.two_j
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn dim(&self) -> usize {
        self.two_j + 1
    }

    /// Entry at row slot `a` (= n + j) and column slot `b` (= m + j).
    #[inline]
    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.entries[a * self.dim() + b]
    }

    pub fn row(&self, a: usize) -> &[f64] {
        let d = self.dim();
        &self.entries[a * d..(a + 1) * d]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Largest entry of `|d d^T - I|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let d = self.dim();
        (0..d)
            .into_par_iter()
            .map(|a| {
                let ra = self.row(a);
                let mut worst = 0.0f64;
                for b in 0..d {
                    let rb = self.row(b);
                    let dot: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum();
                    let target = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((dot - target).abs());
                }
                worst
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Build `d^j(theta)` for `j = two_j / 2`.
pub fn wigner_d(two_j: usize, theta: f64) -> Result<WignerMatrix> {
    if two_j == 0 {
        return Err(Error::InvalidArgument("wigner_d requires 2j >= 1".into()));
    }
    if !theta.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite angle {theta}")));
    }
    let dim = two_j + 1;
    if theta == 0.0 {
        let mut entries = vec![0.0; dim * dim];
        for a in 0..dim {
            entries[a * dim + a] = 1.0;
        }
        return Ok(WignerMatrix {
            two_j,
            theta,
            entries,
        });
    }

    let lf = LnFactorial::new(two_j);
    let half = HalfAngle::new(theta);
    let mut entries = vec![0.0; dim * dim];
    entries
        .par_chunks_mut(dim)
        .enumerate()
        .for_each(|(a, row)| {
            for (b, out) in row.iter_mut().enumerate() {
                *out = element(two_j, a, b, &half, &lf);
            }
        });
    Ok(WignerMatrix {
        two_j,
        theta,
        entries,
    })
}

/// Single entry `d^j_{n m}(theta)` for slots `a = n + j`, `b = m + j`.
pub fn wigner_d_element(two_j: usize, a: usize, b: usize, theta: f64) -> f64 {
    assert!(a <= two_j && b <= two_j, "slot out of range");
    if theta == 0.0 {
        return if a == b { 1.0 } else { 0.0 };
    }
    let lf = LnFactorial::new(two_j);
    element(two_j, a, b, &HalfAngle::new(theta), &lf)
}

struct HalfAngle {
    sin: f64,
    cos: f64,
    cos_full: f64,
}

impl HalfAngle {
    fn new(theta: f64) -> Self {
        let (sin, cos) = (0.5 * theta).sin_cos();
        Self {
            sin,
            cos,
            cos_full: theta.cos(),
        }
    }
}

fn element(two_j: usize, a: usize, b: usize, half: &HalfAngle, lf: &LnFactorial) -> f64 {
    let mu = a.abs_diff(b);
    let nu = (a + b).abs_diff(two_j);
    let s = (two_j - mu - nu) / 2;

    let mut ln_mag =
        0.5 * (lf.get(s) + lf.get(s + mu + nu) - lf.get(s + mu) - lf.get(s + nu));
    let mut negative = false;

    if mu > 0 {
        if half.sin == 0.0 {
            return 0.0;
        }
        ln_mag += mu as f64 * half.sin.abs().ln();
        negative ^= half.sin < 0.0 && mu % 2 == 1;
    }
    if nu > 0 {
        if half.cos == 0.0 {
            return 0.0;
        }
        ln_mag += nu as f64 * half.cos.abs().ln();
        negative ^= half.cos < 0.0 && nu % 2 == 1;
    }

    let (p, ln_scale) = jacobi_scaled(s, mu as f64, nu as f64, half.cos_full);
    if p == 0.0 {
        return 0.0;
    }
    ln_mag += p.abs().ln() + ln_scale;
    negative ^= p < 0.0;

    // xi = (-1)^(n - m) when n > m
    if a > b && (a - b) % 2 == 1 {
        negative = !negative;
    }
    let mag = ln_mag.exp();
    if negative {
        -mag
    } else {
        mag
    }
}

/// Jacobi polynomial `P_n^(alpha,beta)(x)` as `(value, ln_scale)` with the
/// true value equal to `value * exp(ln_scale)`.
pub(crate) fn jacobi_scaled(n: usize, alpha: f64, beta: f64, x: f64) -> (f64, f64) {
    const BIG: f64 = 1e150;
    let mut ln_scale = 0.0f64;
    let mut p_prev = 1.0f64;
    if n == 0 {
        return (p_prev, ln_scale);
    }
    let mut p = (alpha + 1.0) + (alpha + beta + 2.0) * 0.5 * (x - 1.0);
    for k in 1..n {
        let k = k as f64;
        let ab = alpha + beta;
        let c2k = 2.0 * k + ab;
        let a1 = 2.0 * (k + 1.0) * (k + ab + 1.0) * c2k;
        let a2 = (c2k + 1.0) * (alpha * alpha - beta * beta);
        let a3 = c2k * (c2k + 1.0) * (c2k + 2.0);
        let a4 = 2.0 * (k + alpha) * (k + beta) * (c2k + 2.0);
        let next = ((a2 + a3 * x) * p - a4 * p_prev) / a1;
        p_prev = p;
        p = next;
        let m = p.abs().max(p_prev.abs());
        if m > BIG {
            p /= BIG;
            p_prev /= BIG;
            ln_scale += BIG.ln();
        }
    }
    (p, ln_scale)
}
