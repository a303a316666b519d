//! Fixed-point complex arithmetic on big integers.
//!
//! The alternating binomial sum that gives the `|+N/2>` coefficient after the
//! readout rotation cancels down to `~2^(-N/2)` while its terms are `O(1)`, so
//! double precision loses every significant digit once `N` exceeds ~100. All
//! values here are integers scaled by `2^bits`.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::f64::consts::LN_2;

/// Complex number `(re + i im) * 2^-bits`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedComplex {
    pub re: BigInt,
    pub im: BigInt,
}

/// Arithmetic context carrying the number of fractional bits.
#[derive(Debug, Clone, Copy)]
pub struct Fixed {
    bits: u32,
}

impl Fixed {
    pub fn new(bits: u32) -> Self {
        Self { bits }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn zero(&self) -> FixedComplex {
        FixedComplex {
            re: BigInt::zero(),
            im: BigInt::zero(),
        }
    }

    pub fn one(&self) -> FixedComplex {
        FixedComplex {
            re: BigInt::one() << self.bits,
            im: BigInt::zero(),
        }
    }

    /// Exact conversion of an `f64` (truncated below `2^-bits`).
    pub fn real_from_f64(&self, x: f64) -> BigInt {
        assert!(x.is_finite(), "non-finite value in fixed-point conversion");
        if x == 0.0 {
            return BigInt::zero();
        }
        let bits = x.abs().to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if raw_exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), raw_exp - 1075)
        };
        let shift = exp + self.bits as i64;
        let mag = BigInt::from(mant);
        let mag = if shift >= 0 {
            mag << shift as usize
        } else {
            mag >> (-shift) as usize
        };
        if x < 0.0 {
            -mag
        } else {
            mag
        }
    }

    fn rescale(&self, x: BigInt) -> BigInt {
        x >> self.bits as usize
    }

    pub fn mul(&self, a: &FixedComplex, b: &FixedComplex) -> FixedComplex {
        let re = &a.re * &b.re - &a.im * &b.im;
        let im = &a.re * &b.im + &a.im * &b.re;
        FixedComplex {
            re: self.rescale(re),
            im: self.rescale(im),
        }
    }

    /// Multiply by a fixed-point real.
    pub fn mul_real(&self, a: &FixedComplex, r: &BigInt) -> FixedComplex {
        FixedComplex {
            re: self.rescale(&a.re * r),
            im: self.rescale(&a.im * r),
        }
    }

    pub fn add_assign(&self, acc: &mut FixedComplex, x: &FixedComplex) {
        acc.re += &x.re;
        acc.im += &x.im;
    }

    pub fn sub_assign(&self, acc: &mut FixedComplex, x: &FixedComplex) {
        acc.re -= &x.re;
        acc.im -= &x.im;
    }

    /// `exp(i theta)` by Taylor series on `theta / 2^s` followed by `s`
    /// squarings. `theta` is given as an `f64` and converted exactly.
    pub fn exp_i(&self, theta: f64) -> FixedComplex {
        // extra working bits absorb the error growth of the squarings
        let work = Fixed::new(self.bits + 64);
        let mut halvings = 0u32;
        let mut scaled = theta;
        while scaled.abs() > 1.0 / 256.0 {
            scaled /= 2.0;
            halvings += 1;
        }
        let x = work.real_from_f64(scaled);
        let mut sum = work.one();
        let mut term = work.one();
        let mut k: u64 = 1;
        loop {
            // term <- term * (i x) / k
            let re = work.rescale(-(&term.im * &x));
            let im = work.rescale(&term.re * &x);
            term = FixedComplex {
                re: re / k,
                im: im / k,
            };
            if term.re.is_zero() && term.im.is_zero() {
                break;
            }
            work.add_assign(&mut sum, &term);
            k += 1;
        }
        for _ in 0..halvings {
            sum = work.mul(&sum, &sum);
        }
        FixedComplex {
            re: sum.re >> 64usize,
            im: sum.im >> 64usize,
        }
    }

    /// Convert to `f64` parts; tiny values underflow gracefully to zero.
    pub fn to_f64(&self, z: &FixedComplex) -> (f64, f64) {
        (self.real_to_f64(&z.re), self.real_to_f64(&z.im))
    }

    pub fn real_to_f64(&self, x: &BigInt) -> f64 {
        if x.is_zero() {
            return 0.0;
        }
        let nbits = x.bits() as i64;
        let drop = (nbits - 64).max(0);
        let top = (x.abs() >> drop as usize).to_u64().unwrap_or(u64::MAX) as f64;
        let sign = if x.sign() == Sign::Minus { -1.0 } else { 1.0 };
        let exp = drop - self.bits as i64;
        sign * scale_pow2(top, exp)
    }

    /// Natural log of `|z|^2`; `-inf` for zero.
    pub fn ln_norm_sqr(&self, z: &FixedComplex) -> f64 {
        let sq: BigInt = &z.re * &z.re + &z.im * &z.im;
        if sq.is_zero() {
            return f64::NEG_INFINITY;
        }
        let nbits = sq.bits() as i64;
        let drop = (nbits - 64).max(0);
        let top = (sq >> drop as usize).to_u64().unwrap_or(u64::MAX) as f64;
        top.ln() + (drop - 2 * self.bits as i64) as f64 * LN_2
    }
}

fn scale_pow2(x: f64, exp: i64) -> f64 {
    // split to avoid intermediate overflow or underflow of 2^exp
    let mut v = x;
    let mut e = exp;
    while e > 1000 {
        v *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        v *= 2f64.powi(-1000);
        e += 1000;
    }
    v * 2f64.powi(e as i32)
}
