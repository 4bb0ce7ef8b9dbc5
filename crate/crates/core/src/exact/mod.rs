//! Exact arithmetic foundation.
//!
//! Integers and rationals come from `num-bigint`/`num-rational`; everything
//! else here (polynomials, matrices, Smith form, Sturm sequences, interval
//! arithmetic, small finite fields) is built on top of them.

pub mod fp;
pub mod gf;
pub mod interval;
pub mod matrix;
pub mod poly;
pub mod roots;
pub mod smith;

pub use interval::RatInterval;
pub use matrix::{IntMatrix, RatMatrix};
pub use poly::{MonomialOrder, MultiPoly, Ring};
pub use roots::UniPoly;
pub use smith::{smith_normal_form, SmithForm};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    Int::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_int(n: Int) -> Rat {
    Rat::from_integer(n)
}

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo the prime `p`; `a` must be nonzero mod `p`.
pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(a % p != 0);
    pow_mod(a, p - 2, p)
}

/// All primes strictly below `bound`.
pub fn primes_below(bound: u64) -> Vec<u64> {
    if bound < 3 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut sieve = vec![true; n];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i < n {
        if sieve[i] {
            let mut j = i * i;
            while j < n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(k, &is_p)| is_p.then_some(k as u64))
        .collect()
}

/// Residue of a big integer modulo a machine-sized modulus, in `0..m`.
pub fn int_mod(a: &Int, m: u64) -> u64 {
    let r = a.mod_floor(&Int::from(m));
    r.to_u64().expect("residue fits in u64")
}

/// Residue of a rational with denominator prime to `p`.
pub fn rat_mod(a: &Rat, p: u64) -> Option<u64> {
    let d = int_mod(a.denom(), p);
    if d == 0 {
        return None;
    }
    Some(mul_mod(int_mod(a.numer(), p), inv_mod(d, p), p))
}

/// p-adic valuation of a nonzero integer, together with the unit part.
pub fn split_valuation(a: &Int, p: u64) -> (i64, Int) {
    debug_assert!(!a.is_zero());
    let pp = Int::from(p);
    let mut v = 0;
    let mut u = a.clone();
    loop {
        let (q, r) = u.div_rem(&pp);
        if !r.is_zero() {
            break;
        }
        u = q;
        v += 1;
    }
    (v, u)
}

/// p-adic valuation of a nonzero rational and its p-adic unit part `u`
/// (so `a = p^v · u` with `u` a ratio of integers prime to `p`).
pub fn rat_valuation(a: &Rat, p: u64) -> (i64, Rat) {
    let (vn, un) = split_valuation(a.numer(), p);
    let (vd, ud) = split_valuation(a.denom(), p);
    (vn - vd, Rat::new(un, ud))
}

/// Square-free part of a nonzero integer (sign kept), via trial division.
/// Only meant for the small integers that show up in tests and fixtures.
pub fn squarefree_part(a: &Int) -> Int {
    assert!(!a.is_zero());
    let mut n = a.abs();
    let mut out = Int::one();
    let mut d = Int::from(2);
    while &d * &d <= n {
        let mut e = 0;
        while (&n % &d).is_zero() {
            n /= &d;
            e += 1;
        }
        if e % 2 == 1 {
            out *= &d;
        }
        d += 1;
    }
    out *= n;
    if a.is_negative() {
        -out
    } else {
        out
    }
}

pub fn rat_to_f64(a: &Rat) -> f64 {
    let n = a.numer().to_f64().unwrap_or(f64::NAN);
    let d = a.denom().to_f64().unwrap_or(f64::NAN);
    if n.is_finite() && d.is_finite() {
        return n / d;
    }
    // scale both down together for huge numerators/denominators
    let shift = a.numer().bits().max(a.denom().bits()).saturating_sub(1000);
    let n = (a.numer() >> shift).to_f64().unwrap_or(0.0);
    let d = (a.denom() >> shift).to_f64().unwrap_or(1.0);
    n / d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality() {
        let small: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, primes_below(60));
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to 2, 3, 5, 7
    }

    #[test]
    fn valuations() {
        let (v, u) = rat_valuation(&rat(-72, 5), 2);
        assert_eq!(v, 3);
        assert_eq!(u, rat(-9, 5));
        let (v, _) = rat_valuation(&rat(7, 18), 3);
        assert_eq!(v, -2);
        assert_eq!(squarefree_part(&int(-72)), int(-2));
        assert_eq!(squarefree_part(&int(36)), int(1));
    }

    #[test]
    fn residues() {
        assert_eq!(int_mod(&int(-1), 7), 6);
        assert_eq!(rat_mod(&rat(1, 2), 7), Some(4));
        assert_eq!(rat_mod(&rat(1, 7), 7), None);
    }
}
