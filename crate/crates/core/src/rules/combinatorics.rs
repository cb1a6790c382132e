//! Exponents that appear when fusing the H-boxes produced by a Case
//! rewrite on the complemented (`1 − g`) side.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};

/// Number of fused H-boxes attached to a fixed choice of `p` groups that
/// carry exponent `(−2)^{q−1}`: `Σ_{r=1}^{p} C(p,r)·C(r,q−p)`.
pub fn fuse_count(p: u32, q: u32) -> BigInt {
    if q < p {
        return BigInt::zero();
    }
    let k = q - p;
    (1..=p)
        .filter(|&r| k <= r)
        .map(|r| binomial(BigInt::from(p), BigInt::from(r)) * binomial(BigInt::from(r), BigInt::from(k)))
        .sum()
}

/// `Σ_{q=p}^{2n} f(p,q)·(−2)^{q−1}`, the exponent on a box attached to `p`
/// groups. Terms with `q > 2p` vanish, so any `n ≥ p` gives the full sum.
pub fn case_exponent(p: u32, n: u32) -> BigInt {
    let mut pow = BigInt::one();
    let mut acc = BigInt::zero();
    let minus_two = BigInt::from(-2);
    for q in 1..=2 * n {
        if q >= p {
            acc += fuse_count(p, q) * &pow;
        }
        pow *= &minus_two;
    }
    acc
}

/// Closed form of [`case_exponent`] for `n ≥ p ≥ 1`: `−(−2)^{p−1}`.
pub fn case_exponent_closed(p: u32) -> BigInt {
    -BigInt::from(-2).pow(p - 1)
}
