//! Square classes, Legendre and Hilbert symbols at the places of ℚ.

use std::fmt;

use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{int_mod, is_prime, pow_mod, rat_valuation, Int, Rat};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Place {
    Real,
    Finite(u64),
}

impl Place {
    pub fn prime(p: u64) -> Result<Place> {
        if is_prime(p) {
            Ok(Place::Finite(p))
        } else {
            Err(Error::NotPrime(p))
        }
    }

    /// Accepts `inf`, `oo`, `R`, `real`, `∞` or a prime.
    pub fn parse(s: &str) -> Result<Place> {
        match s.trim() {
            "inf" | "oo" | "R" | "real" | "∞" => Ok(Place::Real),
            other => {
                let p: u64 = other
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad place `{other}`")))?;
                Place::prime(p)
            }
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Real => write!(f, "inf"),
            Place::Finite(p) => write!(f, "{p}"),
        }
    }
}

/// An element of ½ℤ/ℤ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LocalInvariant {
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "1/2")]
    Half,
}

impl LocalInvariant {
    pub fn from_sign(s: i8) -> Self {
        if s == 1 {
            LocalInvariant::Zero
        } else {
            LocalInvariant::Half
        }
    }
}

impl fmt::Display for LocalInvariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalInvariant::Zero => write!(f, "0"),
            LocalInvariant::Half => write!(f, "1/2"),
        }
    }
}

/// Canonical representative of `a·(ℚ_v^×)²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SquareClass {
    Real { positive: bool },
    /// odd p: valuation parity and whether the unit part is a square mod p
    Odd { p: u64, odd_valuation: bool, unit_square: bool },
    /// p = 2: valuation parity and the unit part mod 8 (1, 3, 5 or 7)
    Two { odd_valuation: bool, unit_mod8: u8 },
}

impl SquareClass {
    pub fn is_square(&self) -> bool {
        match *self {
            SquareClass::Real { positive } => positive,
            SquareClass::Odd {
                odd_valuation,
                unit_square,
                ..
            } => !odd_valuation && unit_square,
            SquareClass::Two {
                odd_valuation,
                unit_mod8,
            } => !odd_valuation && unit_mod8 == 1,
        }
    }
}

/// Legendre symbol (a/p) for odd prime p, as -1, 0, 1.
pub fn legendre(a: &Int, p: u64) -> i8 {
    let r = int_mod(a, p);
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Unit part of a 2-adic unit rational, modulo 8.
fn unit_mod8(u: &Rat) -> u64 {
    let n = int_mod(u.numer(), 8);
    let d = int_mod(u.denom(), 8);
    // odd residues are their own inverses mod 8
    (n * d) % 8
}

fn unit_legendre(u: &Rat, p: u64) -> i8 {
    legendre(u.numer(), p) * legendre(u.denom(), p)
}

pub fn square_class(a: &Rat, v: Place) -> Result<SquareClass> {
    if a.is_zero() {
        return Err(Error::ZeroArgument("square_class"));
    }
    Ok(match v {
        Place::Real => SquareClass::Real {
            positive: a.is_positive(),
        },
        Place::Finite(2) => {
            let (val, u) = rat_valuation(a, 2);
            SquareClass::Two {
                odd_valuation: val.is_odd(),
                unit_mod8: unit_mod8(&u) as u8,
            }
        }
        Place::Finite(p) => {
            let (val, u) = rat_valuation(a, p);
            SquareClass::Odd {
                p,
                odd_valuation: val.is_odd(),
                unit_square: unit_legendre(&u, p) == 1,
            }
        }
    })
}

pub fn is_square(a: &Rat, v: Place) -> Result<bool> {
    Ok(square_class(a, v)?.is_square())
}

/// Hilbert symbol `(a, b)_v` ∈ {+1, −1}.
pub fn hilbert_symbol(a: &Rat, b: &Rat, v: Place) -> Result<i8> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroArgument("hilbert_symbol"));
    }
    Ok(match v {
        Place::Real => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Finite(2) => {
            let (alpha, u) = rat_valuation(a, 2);
            let (beta, w) = rat_valuation(b, 2);
            let (u, w) = (unit_mod8(&u), unit_mod8(&w));
            let eps = |x: u64| ((x - 1) / 2) % 2;
            let omega = |x: u64| ((x * x - 1) / 8) % 2;
            let e = eps(u) * eps(w)
                + (alpha.rem_euclid(2) as u64) * omega(w)
                + (beta.rem_euclid(2) as u64) * omega(u);
            if e % 2 == 0 {
                1
            } else {
                -1
            }
        }
        Place::Finite(p) => {
            let (alpha, u) = rat_valuation(a, p);
            let (beta, w) = rat_valuation(b, p);
            let (alpha, beta) = (alpha.rem_euclid(2), beta.rem_euclid(2));
            let mut s: i8 = 1;
            if alpha * beta % 2 == 1 && (p - 1) / 2 % 2 == 1 {
                s = -s;
            }
            if beta == 1 {
                s *= unit_legendre(&u, p);
            }
            if alpha == 1 {
                s *= unit_legendre(&w, p);
            }
            s
        }
    })
}

pub fn quaternion_invariant(a: &Rat, b: &Rat, v: Place) -> Result<LocalInvariant> {
    Ok(LocalInvariant::from_sign(hilbert_symbol(a, b, v)?))
}

/// Primes dividing a nonzero integer, by trial division (meant for the
/// moderate sizes produced by tests and evaluated minors).
pub fn prime_divisors(a: &Int) -> Vec<u64> {
    let mut n = a.abs();
    let mut out = Vec::new();
    if let Some(mut m) = n.to_u64() {
        let mut d = 2u64;
        while d * d <= m {
            if m % d == 0 {
                out.push(d);
                while m % d == 0 {
                    m /= d;
                }
            }
            d += if d == 2 { 1 } else { 2 };
        }
        if m > 1 {
            out.push(m);
        }
        return out;
    }
    let mut d = Int::from(2);
    while &d * &d <= n {
        if (&n % &d).is_zero() {
            out.push(d.to_u64().expect("small trial divisor"));
            while (&n % &d).is_zero() {
                n /= &d;
            }
        }
        d += 1;
    }
    if n > Int::from(1) {
        out.push(n.to_u64().expect("prime factor exceeds u64"));
    }
    out
}

/// The places where `(a, b)_v` can be nontrivial: ∞, 2 and the primes
/// dividing the numerators and denominators.
pub fn critical_places(values: &[&Rat]) -> Vec<Place> {
    let mut primes = vec![2u64];
    for x in values {
        primes.extend(prime_divisors(x.numer()));
        primes.extend(prime_divisors(x.denom()));
    }
    primes.sort_unstable();
    primes.dedup();
    std::iter::once(Place::Real)
        .chain(primes.into_iter().map(Place::Finite))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{rat, squarefree_part};
    use proptest::prelude::*;
    use std::collections::HashMap;

    fn r(n: i64) -> Rat {
        rat(n, 1)
    }

    #[test]
    fn spec_examples() {
        assert_eq!(hilbert_symbol(&r(1), &r(-7), Place::Finite(3)).unwrap(), 1);
        assert_eq!(hilbert_symbol(&r(-1), &r(-1), Place::Real).unwrap(), -1);
        assert_eq!(hilbert_symbol(&r(2), &r(5), Place::Finite(5)).unwrap(), -1);
        assert_eq!(
            quaternion_invariant(&r(1), &r(7), Place::Finite(3)).unwrap(),
            LocalInvariant::Zero
        );
        assert_eq!(
            quaternion_invariant(&r(-1), &r(-1), Place::Real).unwrap(),
            LocalInvariant::Half
        );
        assert_eq!(
            quaternion_invariant(&r(2), &r(5), Place::Finite(5)).unwrap(),
            LocalInvariant::Half
        );
        for v in [Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(7)] {
            assert!(is_square(&r(36), v).unwrap());
        }
        assert!(!is_square(&r(-4), Place::Real).unwrap());
        assert!(!is_square(&r(3), Place::Finite(2)).unwrap());
        assert_eq!(
            square_class(&r(3), Place::Finite(2)).unwrap(),
            SquareClass::Two {
                odd_valuation: false,
                unit_mod8: 3
            }
        );
        assert!(hilbert_symbol(&r(0), &r(1), Place::Real).is_err());
        assert!(square_class(&r(0), Place::Finite(3)).is_err());
        assert!(Place::prime(9).is_err());
        assert_eq!(Place::parse("inf").unwrap(), Place::Real);
        assert_eq!(Place::parse("3").unwrap(), Place::Finite(3));
    }

    #[test]
    fn odd_squares_mod_8_are_one() {
        // exhaust squares mod 8 of odd residues
        let sq: Vec<u64> = (1..8u64).step_by(2).map(|x| x * x % 8).collect();
        assert!(sq.iter().all(|&s| s == 1));
        assert!(!sq.contains(&3));
    }

    /// Does z² = a x² + b y² have a primitive solution mod p^k? For
    /// square-free a, b this decides solvability over ℚ_p.
    fn brute_solvable(a: i64, b: i64, p: u64) -> bool {
        let k = if p == 2 { 6 } else { 4 };
        let m = (p as i64).pow(k);
        let md = |x: i64| x.rem_euclid(m);
        let squares: Vec<i64> = (0..m).map(|x| md(x * x)).collect();
        let mut sq_set = vec![false; m as usize];
        for &s in &squares {
            sq_set[s as usize] = true;
        }
        let mut by2 = vec![false; m as usize];
        for y in 0..m {
            by2[md(b * squares[y as usize]) as usize] = true;
        }
        // z unit: z = 1
        for x in 0..m {
            if by2[md(1 - a * squares[x as usize]) as usize] {
                return true;
            }
        }
        // x unit: x = 1
        for y in 0..m {
            if sq_set[md(a + b * squares[y as usize]) as usize] {
                return true;
            }
        }
        // y unit: y = 1
        for x in 0..m {
            if sq_set[md(a * squares[x as usize] + b) as usize] {
                return true;
            }
        }
        false
    }

    #[test]
    fn agrees_with_brute_force() {
        let mut cache: HashMap<(i64, i64, u64), bool> = HashMap::new();
        let mut checked = 0;
        for p in [2u64, 3, 5, 7, 11, 13] {
            for a in -30i64..=30 {
                for b in -30i64..=30 {
                    if a == 0 || b == 0 {
                        continue;
                    }
                    let sa = squarefree_part(&Int::from(a)).to_i64().unwrap();
                    let sb = squarefree_part(&Int::from(b)).to_i64().unwrap();
                    let key = (sa.min(sb), sa.max(sb), p);
                    let brute = *cache
                        .entry(key)
                        .or_insert_with(|| brute_solvable(key.0, key.1, p));
                    let formula = hilbert_symbol(&r(a), &r(b), Place::Finite(p)).unwrap() == 1;
                    assert_eq!(formula, brute, "({a},{b})_{p}");
                    checked += 1;
                }
            }
        }
        assert_eq!(checked, 6 * 60 * 60);
    }

    fn nonzero_rat() -> impl Strategy<Value = Rat> {
        (-2000i64..=2000, 1i64..=300)
            .prop_filter("nonzero", |(n, _)| *n != 0)
            .prop_map(|(n, d)| rat(n, d))
    }

    fn place() -> impl Strategy<Value = Place> {
        prop_oneof![
            Just(Place::Real),
            Just(Place::Finite(2)),
            Just(Place::Finite(3)),
            Just(Place::Finite(5)),
            Just(Place::Finite(7)),
            Just(Place::Finite(13)),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn product_formula(a in nonzero_rat(), b in nonzero_rat()) {
            let prod: i8 = critical_places(&[&a, &b])
                .into_iter()
                .map(|v| hilbert_symbol(&a, &b, v).unwrap())
                .product();
            prop_assert_eq!(prod, 1);
        }

        #[test]
        fn bimultiplicative(a in nonzero_rat(), b in nonzero_rat(), c in nonzero_rat(), v in place()) {
            let lhs = hilbert_symbol(&a, &(&b * &c), v).unwrap();
            let rhs = hilbert_symbol(&a, &b, v).unwrap() * hilbert_symbol(&a, &c, v).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn symmetric_and_standard_identities(a in nonzero_rat(), b in nonzero_rat(), c in nonzero_rat(), v in place()) {
            prop_assert_eq!(hilbert_symbol(&a, &b, v).unwrap(), hilbert_symbol(&b, &a, v).unwrap());
            prop_assert_eq!(hilbert_symbol(&a, &-&a, v).unwrap(), 1);
            let one = r(1);
            if a != one {
                prop_assert_eq!(hilbert_symbol(&a, &(&one - &a), v).unwrap(), 1);
            }
            let ac2 = &a * &c * &c;
            prop_assert_eq!(hilbert_symbol(&ac2, &b, v).unwrap(), hilbert_symbol(&a, &b, v).unwrap());
        }
    }
}
