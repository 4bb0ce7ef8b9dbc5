//! Univariate polynomials over ℚ and real root isolation by Sturm sequences.

use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::interval::RatInterval;
use super::{Int, Rat};
use crate::{Error, Result};

/// Dense univariate polynomial, lowest coefficient first, no trailing zeros.
#[derive(Clone, PartialEq, Eq)]
pub struct UniPoly {
    coeffs: Vec<Rat>,
}

impl UniPoly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        UniPoly::new(coeffs.iter().map(|&c| Rat::from_integer(c.into())).collect())
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Rat] {
        &self.coeffs
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rat> {
        self.coeffs.last()
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        self.coeffs
            .iter()
            .rev()
            .fold(Rat::zero(), |acc, c| acc * x + c)
    }

    /// Sign of `f(x)` as -1, 0, 1.
    pub fn sign_at(&self, x: &Rat) -> i8 {
        sign(&self.eval(x))
    }

    pub fn eval_interval(&self, x: &RatInterval) -> RatInterval {
        let mut acc = RatInterval::point(Rat::zero());
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * x) + &RatInterval::point(c.clone());
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        UniPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * Rat::from_integer(Int::from(i)))
                .collect(),
        )
    }

    pub fn scale(&self, c: &Rat) -> Self {
        UniPoly::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Quotient and remainder; panics on division by zero.
    pub fn div_rem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead = d.leading().unwrap().clone();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (UniPoly::zero(), self.clone());
        }
        let mut q = vec![Rat::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = &r[k + dd] / &lead;
            if !c.is_zero() {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] = &r[k + j] - &c * dc;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (UniPoly::new(q), UniPoly::new(r))
    }

    /// Positive rational multiple with coprime integer coefficients.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let den = self
            .coeffs
            .iter()
            .fold(Int::one(), |acc, c| acc.lcm(c.denom()));
        let nums: Vec<Int> = self
            .coeffs
            .iter()
            .map(|c| (c * Rat::from_integer(den.clone())).to_integer())
            .collect();
        let g = nums.iter().fold(Int::zero(), |acc, n| acc.gcd(n));
        UniPoly::new(
            nums.into_iter()
                .map(|n| Rat::from_integer(n / &g))
                .collect(),
        )
    }

    pub fn monic_gcd(&self, other: &UniPoly) -> UniPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1.primitive();
            a = b;
            b = r;
        }
        match a.leading() {
            Some(l) => a.scale(&(Rat::one() / l)),
            None => a,
        }
    }

    /// `f / gcd(f, f')`: same distinct roots, all simple.
    pub fn squarefree(&self) -> UniPoly {
        let g = self.monic_gcd(&self.derivative());
        self.div_rem(&g).0.primitive()
    }
}

impl fmt::Debug for UniPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => format!("{c}"),
                1 => format!("({c})*s"),
                _ => format!("({c})*s^{i}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn sign(x: &Rat) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Number of sign changes in a sequence, zeros skipped.
pub fn sign_variations(signs: impl IntoIterator<Item = i8>) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for s in signs {
        if s == 0 {
            continue;
        }
        if last != 0 && s != last {
            n += 1;
        }
        last = s;
    }
    n
}

/// Sturm sequence `f, f', −rem, …`; each term made primitive (positive
/// content removed), which keeps signs intact.
#[derive(Debug, Clone)]
pub struct Sturm {
    seq: Vec<UniPoly>,
}

impl Sturm {
    pub fn new(f: &UniPoly) -> Result<Sturm> {
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut seq = vec![f.primitive()];
        let d = f.derivative().primitive();
        if !d.is_zero() {
            seq.push(d);
        }
        while seq.len() >= 2 {
            let n = seq.len();
            let r = seq[n - 2].div_rem(&seq[n - 1]).1;
            if r.is_zero() {
                break;
            }
            seq.push(r.scale(&-Rat::one()).primitive());
        }
        Ok(Sturm { seq })
    }

    fn variations_at(&self, x: &Rat) -> usize {
        sign_variations(self.seq.iter().map(|p| p.sign_at(x)))
    }

    fn variations_at_infinity(&self, positive: bool) -> usize {
        sign_variations(self.seq.iter().map(|p| {
            let s = sign(p.leading().unwrap());
            if !positive && p.degree().unwrap() % 2 == 1 {
                -s
            } else {
                s
            }
        }))
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    pub fn count_in(&self, a: &Rat, b: &Rat) -> usize {
        self.variations_at(a) - self.variations_at(b)
    }

    pub fn count_all(&self) -> usize {
        self.variations_at_infinity(false) - self.variations_at_infinity(true)
    }
}

/// Cauchy bound: every root has absolute value below it.
pub fn root_bound(f: &UniPoly) -> Rat {
    let lead = f.leading().unwrap().abs();
    let m = f
        .coeffs()
        .iter()
        .map(|c| c.abs() / &lead)
        .max()
        .unwrap_or_else(Rat::zero);
    m + Rat::one()
}

/// Disjoint closed intervals, one per distinct real root, in increasing
/// order. Each is either a single exact rational root or an interval whose
/// endpoints are not roots and across which the square-free part changes
/// sign.
pub fn isolate_real_roots(f: &UniPoly) -> Result<Vec<RatInterval>> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let g = f.squarefree();
    let sturm = Sturm::new(&g)?;
    let b = root_bound(&g);
    let mut stack = vec![(-b.clone(), b)];
    let mut found: Vec<RatInterval> = Vec::new();
    while let Some((lo, hi)) = stack.pop() {
        let n = sturm.count_in(&lo, &hi);
        if n == 0 {
            continue;
        }
        if n == 1 {
            if g.sign_at(&hi) == 0 {
                found.push(RatInterval::point(hi));
            } else {
                found.push(shrink_open(&g, &sturm, lo, hi));
            }
            continue;
        }
        let mid = (&lo + &hi) / Rat::from_integer(2.into());
        stack.push((lo, mid.clone()));
        stack.push((mid, hi));
    }
    found.sort_by(|a, b| a.lo().cmp(b.lo()));
    // neighbours may touch at a shared endpoint
    for i in 1..found.len() {
        while found[i - 1].hi() >= found[i].lo() {
            found[i - 1] = refine(&g, &found[i - 1]);
            found[i] = refine(&g, &found[i]);
        }
    }
    Ok(found)
}

/// Root in `(lo, hi)` with `g(hi) ≠ 0`; move `lo` off a root if needed.
fn shrink_open(g: &UniPoly, sturm: &Sturm, mut lo: Rat, mut hi: Rat) -> RatInterval {
    while g.sign_at(&lo) == 0 {
        let mid = (&lo + &hi) / Rat::from_integer(2.into());
        if g.sign_at(&mid) == 0 {
            return RatInterval::point(mid);
        }
        if sturm.count_in(&lo, &mid) == 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    RatInterval::new(lo, hi)
}

/// Halve an isolating interval of a square-free `g`, keeping the root.
pub fn refine(g: &UniPoly, iv: &RatInterval) -> RatInterval {
    if iv.is_point() {
        return iv.clone();
    }
    let mid = iv.midpoint();
    let sm = g.sign_at(&mid);
    if sm == 0 {
        return RatInterval::point(mid);
    }
    if g.sign_at(iv.lo()) * sm < 0 {
        RatInterval::new(iv.lo().clone(), mid)
    } else {
        RatInterval::new(mid, iv.hi().clone())
    }
}

/// Refine until the width is at most `eps`.
pub fn refine_to(f: &UniPoly, iv: &RatInterval, eps: &Rat) -> RatInterval {
    let g = f.squarefree();
    let mut cur = iv.clone();
    while &cur.width() > eps {
        cur = refine(&g, &cur);
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use proptest::prelude::*;

    #[test]
    fn sqrt_two() {
        let f = UniPoly::from_ints(&[-2, 0, 1]);
        let roots = isolate_real_roots(&f).unwrap();
        assert_eq!(roots.len(), 2);
        let r = refine_to(&f, &roots[1], &rat(1, 1_000_000));
        let (a, b) = r.to_f64();
        assert!(a <= 2f64.sqrt() && 2f64.sqrt() <= b);
        assert!(roots[0].hi() < &rat(0, 1));
    }

    #[test]
    fn no_real_roots() {
        assert!(isolate_real_roots(&UniPoly::from_ints(&[1, 0, 1]))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn multiple_root_collapses() {
        let roots = isolate_real_roots(&UniPoly::from_ints(&[0, 0, 0, 0, 0, 1])).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(roots[0].contains(&rat(0, 1)));
    }

    #[test]
    fn zero_rejected() {
        assert_eq!(isolate_real_roots(&UniPoly::zero()), Err(Error::ZeroPolynomial));
    }

    #[test]
    fn exact_rational_roots_are_disjoint() {
        // s(s-1)(s+1)(2s-1)
        let g = mul(&UniPoly::from_ints(&[0, -1, 0, 1]), &UniPoly::from_ints(&[-1, 2]));
        let roots = isolate_real_roots(&g).unwrap();
        assert_eq!(roots.len(), 4);
        for w in roots.windows(2) {
            assert!(w[0].hi() < w[1].lo());
        }
    }

    fn mul(a: &UniPoly, b: &UniPoly) -> UniPoly {
        let mut out = vec![Rat::zero(); a.coeffs().len() + b.coeffs().len() - 1];
        for (i, x) in a.coeffs().iter().enumerate() {
            for (j, y) in b.coeffs().iter().enumerate() {
                out[i + j] = &out[i + j] + x * y;
            }
        }
        UniPoly::new(out)
    }

    /// Count of distinct real roots by sign changes on a fine grid, with
    /// exact zeros on the grid counted once.
    fn grid_count(f: &UniPoly, bound: i64, steps: i64) -> usize {
        let mut count = 0;
        let mut prev: Option<i8> = None;
        for k in 0..=steps {
            let x = rat(-bound * steps + 2 * bound * k, steps);
            let s = f.sign_at(&x);
            if s == 0 {
                count += 1;
                prev = None;
                continue;
            }
            if let Some(p) = prev {
                if p != s {
                    count += 1;
                }
            }
            prev = Some(s);
        }
        count
    }

    proptest! {
        // products of rational linear factors spread apart and an
        // irreducible quadratic, so the grid resolves every root
        #[test]
        fn isolation_matches_grid(
            roots in proptest::collection::btree_set(-12i64..=12, 0..5),
            with_quadratic in any::<bool>(),
            lead in prop_oneof![Just(-3i64), Just(1), Just(2)],
        ) {
            let mut f = UniPoly::from_ints(&[lead]);
            for r in &roots {
                f = mul(&f, &UniPoly::new(vec![rat(-2 * r - 1, 2), rat(1, 1)]));
            }
            if with_quadratic {
                f = mul(&f, &UniPoly::from_ints(&[5, 0, 1]));
            }
            let ivs = isolate_real_roots(&f).unwrap();
            prop_assert_eq!(ivs.len(), roots.len());
            prop_assert_eq!(ivs.len(), grid_count(&f, 16, 3200));
            let g = f.squarefree();
            let sturm = Sturm::new(&g).unwrap();
            for iv in &ivs {
                let mut cur = iv.clone();
                for _ in 0..20 {
                    cur = refine(&g, &cur);
                    if cur.is_point() {
                        prop_assert_eq!(g.sign_at(cur.lo()), 0);
                    } else {
                        prop_assert!(g.sign_at(cur.lo()) * g.sign_at(cur.hi()) < 0);
                        prop_assert_eq!(sturm.count_in(cur.lo(), cur.hi()), 1);
                    }
                }
            }
        }

        #[test]
        fn random_polys_count(coeffs in proptest::collection::vec(-9i64..=9, 1..7)) {
            let f = UniPoly::from_ints(&coeffs);
            prop_assume!(!f.is_zero());
            let ivs = isolate_real_roots(&f).unwrap();
            let sturm = Sturm::new(&f.squarefree()).unwrap();
            prop_assert_eq!(ivs.len(), sturm.count_all());
            for w in ivs.windows(2) {
                prop_assert!(w[0].hi() < w[1].lo());
            }
        }
    }
}
