//! Log-space factorials and binomials.

/// Table of `ln k!` for `k = 0..=n`.
#[derive(Debug, Clone)]
pub struct LnFactorial {
    table: Vec<f64>,
}

impl LnFactorial {
    pub fn new(n: usize) -> Self {
        let mut table = Vec::with_capacity(n + 1);
        table.push(0.0);
        let mut acc = 0.0f64;
        for k in 1..=n {
            acc += (k as f64).ln();
            table.push(acc);
        }
        Self { table }
    }

    #[inline]
    pub fn get(&self, k: usize) -> f64 {
        self.table[k]
    }

    /// `ln C(n, k)`; `-inf` when `k > n`.
    #[inline]
    pub fn ln_binomial(&self, n: usize, k: usize) -> f64 {
        if k > n {
            return f64::NEG_INFINITY;
        }
        self.table[n] - self.table[k] - self.table[n - k]
    }
}

/// `ln C(n, k)` without a table.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    (0..k).map(|i| ((n - i) as f64 / (i + 1) as f64).ln()).sum()
}

/// Normalized binomial weights `C(N, k) / 2^N` for `k = 0..=N`.
pub fn binomial_weights(n: usize) -> Vec<f64> {
    let lf = LnFactorial::new(n);
    let ln2 = std::f64::consts::LN_2;
    (0..=n)
        .map(|k| (lf.ln_binomial(n, k) - n as f64 * ln2).exp())
        .collect()
}

/// Exact binomial coefficient as `u128`, or `None` on overflow.
pub fn binomial_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc.checked_mul((n - i) as u128)? / (i + 1) as u128;
    }
    Some(acc)
}

/// Split a positive finite `x` as `m * 2^e` with `m` in `[1, 2)`, returning
/// `(e, m > 1)`. Exact for subnormals.
pub fn log2_floor_exact(x: f64) -> (i64, bool) {
    debug_assert!(x > 0.0 && x.is_finite());
    let bits = x.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if raw_exp == 0 {
        // subnormal: value = frac * 2^-1074
        let lead = 63 - frac.leading_zeros() as i64;
        let rest = frac & !(1u64 << lead);
        (lead - 1074, rest != 0)
    } else {
        (raw_exp - 1023, frac != 0)
    }
}
