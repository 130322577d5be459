//! Exact big-integer combinatorics and precise base-2 logarithms.
//!
//! Rate formulas in this crate are reported in bits as `f64`, but wherever a
//! quantity has an exact integer form (factorials, binomials, ascending
//! factorials) the integer is computed first and the logarithm taken once at
//! the end, so the float error stays at the last-bit level.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Base-2 logarithm of a positive big integer, good to ~1e-15 relative error.
///
/// Takes the top 53 bits as a float mantissa and adds the discarded exponent.
pub fn log2_biguint(value: &BigUint) -> f64 {
    assert!(!value.is_zero(), "log2 of zero");
    let bits = value.bits();
    if bits <= 53 {
        value.to_f64().expect("fits in f64").log2()
    } else {
        let shift = bits - 53;
        let top = (value >> shift).to_f64().expect("53 bits fit in f64");
        top.log2() + shift as f64
    }
}

/// `log2(n!)` via the log-gamma function.
pub fn log2_factorial(n: u64) -> f64 {
    libm::lgamma(n as f64 + 1.0) / std::f64::consts::LN_2
}

/// `log2(n! / prod(parts_i!))`, the number of distinct orderings of a
/// multiset with the given multiplicities.
pub fn log2_multinomial(n: u64, parts: impl IntoIterator<Item = u64>) -> f64 {
    let mut bits = log2_factorial(n);
    for p in parts {
        bits -= log2_factorial(p);
    }
    bits
}

/// Exact `n!` as a big integer.
pub fn factorial(n: u64) -> BigUint {
    ascending_factorial(1, n)
}

/// Exact ascending factorial `x(x+1)...(x+k-1)`, with `x^(0) = 1`.
pub fn ascending_factorial(x: u64, k: u64) -> BigUint {
    if k == 0 {
        return BigUint::one();
    }
    product_range(x, x + k)
}

/// Exact binomial coefficient `C(n, k)`.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    // C(n, k) = (n-k+1)...n / k!
    product_range(n - k + 1, n + 1) / factorial(k)
}

/// Product of the integer range `[lo, hi)`, by halving so intermediate
/// factors stay balanced for the sub-quadratic bigint multiply.
fn product_range(lo: u64, hi: u64) -> BigUint {
    debug_assert!(lo >= 1);
    if lo >= hi {
        return BigUint::one();
    }
    match hi - lo {
        1 => BigUint::from(lo),
        2 => BigUint::from(lo) * (lo + 1),
        len => {
            let mid = lo + len / 2;
            product_range(lo, mid) * product_range(mid, hi)
        }
    }
}

/// `log2 C(C(n,2), m)`: bits to pick `m` distinct non-loop undirected edges
/// uniformly among all simple graphs on `n` labeled vertices.
pub fn log2_simple_graph_count(n: u64, m: u64) -> Result<f64> {
    let slots = n * (n.saturating_sub(1)) / 2;
    if m > slots {
        return Err(Error::InvalidInput(format!(
            "{m} edges do not fit in {slots} vertex pairs"
        )));
    }
    if m == 0 || m == slots {
        return Ok(0.0);
    }
    Ok(log2_biguint(&binomial(slots, m)))
}
