//! Small finite fields 𝔽_q (q = pᵏ ≤ 1024) with full operation tables.
//!
//! Elements are indices `0..q`. An element `Σ aᵢ θⁱ` (aᵢ ∈ 𝔽_p, θ a root of
//! the chosen irreducible modulus) has index `Σ aᵢ pⁱ`, so `0` and `1` are
//! the field's zero and one and `0..p` is the prime subfield.

use super::is_prime;
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct Gf {
    q: u32,
    p: u32,
    k: u32,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
    /// monic irreducible modulus, low coefficients first (length k + 1)
    modulus: Vec<u32>,
}

fn digits(mut x: u32, p: u32, k: u32) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let d = x % p;
            x /= p;
            d
        })
        .collect()
}

fn undigits(ds: &[u32], p: u32) -> u32 {
    ds.iter().rev().fold(0, |acc, &d| acc * p + d)
}

/// Product of polynomials over 𝔽_p (low coefficients first).
fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    out
}

/// Remainder modulo a monic polynomial.
fn poly_rem(mut a: Vec<u32>, m: &[u32], p: u32) -> Vec<u32> {
    let k = m.len() - 1;
    while a.len() > k {
        let lead = a.pop().unwrap();
        if lead != 0 {
            let off = a.len() - k;
            for i in 0..k {
                a[off + i] = (a[off + i] + (p - lead) * m[i]) % p;
            }
        }
    }
    a.resize(k, 0);
    a
}

fn is_irreducible(m: &[u32], p: u32) -> bool {
    let k = (m.len() - 1) as u32;
    // try every monic divisor of degree 1..=k/2
    for d in 1..=k / 2 {
        for low in 0..p.pow(d) {
            let mut f = digits(low, p, d);
            f.push(1);
            if poly_rem(m.to_vec(), &f, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl Gf {
    pub fn new(q: u32) -> Result<Gf> {
        if !(2..=1024).contains(&q) {
            return Err(Error::OutOfRange(format!("field size {q}")));
        }
        let p = (2..=q).find(|d| q % d == 0).unwrap();
        if !is_prime(p as u64) {
            return Err(Error::NotPrime(p as u64));
        }
        let mut k = 0;
        let mut r = q;
        while r % p == 0 {
            r /= p;
            k += 1;
        }
        if r != 1 {
            return Err(Error::OutOfRange(format!("{q} is not a prime power")));
        }
        let modulus = (0..p.pow(k))
            .map(|low| {
                let mut f = digits(low, p, k);
                f.push(1);
                f
            })
            .find(|f| k == 1 || is_irreducible(f, p))
            .expect("irreducible polynomials exist in every degree");

        let n = q as usize;
        let mut add = vec![0u16; n * n];
        let mut mul = vec![0u16; n * n];
        for a in 0..q {
            let da = digits(a, p, k);
            for b in 0..q {
                let db = digits(b, p, k);
                let s: Vec<u32> = da.iter().zip(&db).map(|(x, y)| (x + y) % p).collect();
                add[(a * q + b) as usize] = undigits(&s, p) as u16;
                let prod = if k == 1 {
                    vec![(a * b) % p]
                } else {
                    poly_rem(poly_mul(&da, &db, p), &modulus, p)
                };
                mul[(a * q + b) as usize] = undigits(&prod, p) as u16;
            }
        }
        let mut neg = vec![0u16; n];
        let mut inv = vec![0u16; n];
        for a in 0..q {
            for b in 0..q {
                if add[(a * q + b) as usize] == 0 {
                    neg[a as usize] = b as u16;
                }
                if mul[(a * q + b) as usize] == 1 {
                    inv[a as usize] = b as u16;
                }
            }
        }
        Ok(Gf {
            q,
            p,
            k,
            add,
            mul,
            neg,
            inv,
            modulus,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.k
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.q + b) as usize] as u32
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.q + b) as usize] as u32
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize] as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    /// Multiplicative inverse; `a` must be nonzero.
    pub fn inv(&self, a: u32) -> u32 {
        debug_assert!(a != 0);
        self.inv[a as usize] as u32
    }

    /// Image of an integer in the prime subfield.
    pub fn from_i64(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    pub fn elements(&self) -> std::ops::Range<u32> {
        0..self.q
    }

    pub fn is_square(&self, a: u32) -> bool {
        a == 0 || self.elements().any(|x| self.mul(x, x) == a)
    }

    /// Reduced row echelon form in place; returns the pivot columns.
    pub fn echelonize(&self, m: &mut [Vec<u32>]) -> Vec<usize> {
        let rows = m.len();
        let cols = m.first().map_or(0, |r| r.len());
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            if r == rows {
                break;
            }
            let Some(piv) = (r..rows).find(|&i| m[i][c] != 0) else {
                continue;
            };
            m.swap(r, piv);
            let inv = self.inv(m[r][c]);
            for x in m[r].iter_mut() {
                *x = self.mul(*x, inv);
            }
            let pivot_row = m[r].clone();
            for (i, row) in m.iter_mut().enumerate() {
                if i == r || row[c] == 0 {
                    continue;
                }
                let f = row[c];
                for (x, &y) in row.iter_mut().zip(&pivot_row) {
                    *x = self.sub(*x, self.mul(f, y));
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self, rows: &[Vec<u32>]) -> usize {
        let mut m = rows.to_vec();
        self.echelonize(&mut m).len()
    }

    /// Basis of the right kernel `{v : M v = 0}`.
    pub fn nullspace(&self, rows: &[Vec<u32>], ncols: usize) -> Vec<Vec<u32>> {
        let mut m = rows.to_vec();
        let pivots = self.echelonize(&mut m);
        (0..ncols)
            .filter(|c| !pivots.contains(c))
            .map(|f| {
                let mut v = vec![0u32; ncols];
                v[f] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = self.neg(m[r][f]);
                }
                v
            })
            .collect()
    }

    /// Square root in characteristic 2 (inverse Frobenius).
    pub fn sqrt_char2(&self, a: u32) -> u32 {
        debug_assert_eq!(self.p, 2);
        self.elements().find(|&x| self.mul(x, x) == a).unwrap()
    }

    /// Normalised representatives of P^{n-1}(𝔽_q): first nonzero coordinate 1.
    pub fn projective_points(&self, n: usize) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        for lead in 0..n {
            let free = n - lead - 1;
            let count = (self.q as usize).pow(free as u32);
            for idx in 0..count {
                let mut v = vec![0u32; n];
                v[lead] = 1;
                let mut r = idx;
                for slot in v.iter_mut().skip(lead + 1) {
                    *slot = (r % self.q as usize) as u32;
                    r /= self.q as usize;
                }
                out.push(v);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_axioms_small() {
        for q in [2, 3, 4, 5, 7, 8, 9, 16, 25, 27] {
            let f = Gf::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a)), 1);
                }
                for b in f.elements() {
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements().step_by(3) {
                        let lhs = f.mul(a, f.add(b, c));
                        let rhs = f.add(f.mul(a, b), f.mul(a, c));
                        assert_eq!(lhs, rhs);
                    }
                }
            }
            // no zero divisors
            for a in 1..q {
                for b in 1..q {
                    assert_ne!(f.mul(a, b), 0);
                }
            }
            let squares = f.elements().filter(|&a| a != 0 && f.is_square(a)).count();
            let expect = if q % 2 == 0 { q - 1 } else { (q - 1) / 2 };
            assert_eq!(squares as u32, expect);
        }
    }

    #[test]
    fn nullspace_over_gf9() {
        let f = Gf::new(9).unwrap();
        let rows = vec![vec![1, 2, 0], vec![0, 3, 1]];
        let ns = f.nullspace(&rows, 3);
        assert_eq!(ns.len(), 1);
        for r in &rows {
            let s = r.iter().zip(&ns[0]).fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a, b)));
            assert_eq!(s, 0);
        }
        assert_eq!(f.rank(&rows), 2);
    }

    #[test]
    fn rejects_non_prime_powers() {
        assert!(Gf::new(6).is_err());
        assert!(Gf::new(1).is_err());
        assert!(Gf::new(12).is_err());
    }

    #[test]
    fn projective_point_count() {
        let f = Gf::new(4).unwrap();
        assert_eq!(f.projective_points(5).len(), (4usize.pow(5) - 1) / 3);
        let f = Gf::new(3).unwrap();
        assert_eq!(f.projective_points(3).len(), 13);
    }
}
