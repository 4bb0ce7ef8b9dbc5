//! Sparse multivariate polynomials over ℤ or 𝔽_p.
//!
//! Terms live in a `BTreeMap` keyed by exponent vectors; zero coefficients are
//! never stored. Over 𝔽_p coefficients are kept reduced into `0..p`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{int_mod, Int, Rat};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ring {
    Integers,
    Fp(u64),
}

/// Term orders used for canonical output. Both rank variable 0 highest.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonomialOrder {
    GradedLex,
    GradedRevLex,
}

impl MonomialOrder {
    pub fn cmp(self, a: &[u32], b: &[u32]) -> Ordering {
        let da: u32 = a.iter().sum();
        let db: u32 = b.iter().sum();
        match da.cmp(&db) {
            Ordering::Equal => {}
            other => return other,
        }
        match self {
            MonomialOrder::GradedLex => a.cmp(b),
            MonomialOrder::GradedRevLex => {
                for (x, y) in a.iter().zip(b).rev() {
                    if x != y {
                        return y.cmp(x);
                    }
                }
                Ordering::Equal
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    ring: Ring,
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Int>,
}

impl MultiPoly {
    pub fn zero(ring: Ring, nvars: usize) -> Self {
        MultiPoly {
            ring,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: Ring, nvars: usize, c: Int) -> Self {
        let mut p = Self::zero(ring, nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(ring: Ring, nvars: usize) -> Self {
        Self::constant(ring, nvars, Int::one())
    }

    pub fn var(ring: Ring, nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        Self::monomial(ring, e, Int::one())
    }

    pub fn monomial(ring: Ring, exps: Vec<u32>, c: Int) -> Self {
        let mut p = Self::zero(ring, exps.len());
        p.add_term(exps, c);
        p
    }

    /// Linear form `Σ coeffs[i]·var_i`.
    pub fn linear(ring: Ring, coeffs: &[Int]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(ring, n);
        for (i, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[i] = 1;
            p.add_term(e, c.clone());
        }
        p
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Int)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Int {
        self.terms.get(exps).cloned().unwrap_or_else(Int::zero)
    }

    fn normalize(&self, c: Int) -> Int {
        match self.ring {
            Ring::Integers => c,
            Ring::Fp(p) => c.mod_floor(&Int::from(p)),
        }
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: Int) {
        assert_eq!(exps.len(), self.nvars, "exponent length");
        let c = self.normalize(c);
        if c.is_zero() {
            return;
        }
        let modulus = match self.ring {
            Ring::Fp(p) => Some(Int::from(p)),
            Ring::Integers => None,
        };
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let mut s = o.get() + c;
                if let Some(m) = &modulus {
                    s = s.mod_floor(m);
                }
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|x| x == d),
        }
    }

    /// Bidegree with respect to the split `vars[..split] | vars[split..]`, if
    /// the polynomial is bihomogeneous.
    pub fn bidegree(&self, split: usize) -> Option<(u32, u32)> {
        let mut out = None;
        for e in self.terms.keys() {
            let d = (e[..split].iter().sum(), e[split..].iter().sum());
            match out {
                None => out = Some(d),
                Some(prev) if prev != d => return None,
                _ => {}
            }
        }
        out
    }

    pub fn scale(&self, c: &Int) -> Self {
        let mut out = Self::zero(self.ring, self.nvars);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a * c);
        }
        out
    }

    pub fn mul_monomial(&self, exps: &[u32]) -> Self {
        let mut out = Self::zero(self.ring, self.nvars);
        for (e, a) in &self.terms {
            let shifted = e.iter().zip(exps).map(|(x, y)| x + y).collect();
            out.terms.insert(shifted, a.clone());
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one(self.ring, self.nvars);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Reduce an integer polynomial modulo `p`.
    pub fn reduce_mod(&self, p: u64) -> Self {
        let mut out = Self::zero(Ring::Fp(p), self.nvars);
        for (e, a) in &self.terms {
            out.add_term(e.clone(), a.clone());
        }
        out
    }

    /// Content (gcd of coefficients) of an integer polynomial.
    pub fn content(&self) -> Int {
        self.terms
            .values()
            .fold(Int::zero(), |g, c| g.gcd(c))
    }

    pub fn eval_rat(&self, point: &[Rat]) -> Rat {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Rat::zero();
        for (e, c) in &self.terms {
            let mut term = Rat::from_integer(c.clone());
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    term *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += term;
        }
        acc
    }

    pub fn eval_int(&self, point: &[Int]) -> Int {
        assert_eq!(point.len(), self.nvars);
        let mut acc = Int::zero();
        for (e, c) in &self.terms {
            let mut term = c.clone();
            for (x, &k) in point.iter().zip(e) {
                if k > 0 {
                    term *= num_traits::pow(x.clone(), k as usize);
                }
            }
            acc += term;
        }
        acc
    }

    pub fn eval_mod(&self, point: &[u64], p: u64) -> u64 {
        let mut acc = 0u64;
        for (e, c) in &self.terms {
            let mut term = int_mod(c, p);
            for (&x, &k) in point.iter().zip(e) {
                for _ in 0..k {
                    term = super::mul_mod(term, x, p);
                }
            }
            acc = (acc + term) % p;
        }
        acc
    }

    /// Substitute a polynomial for each variable (all in a common ring).
    pub fn compose(&self, images: &[MultiPoly]) -> MultiPoly {
        assert_eq!(images.len(), self.nvars);
        let n = images[0].nvars;
        let mut out = MultiPoly::zero(self.ring, n);
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(self.ring, n, c.clone());
            for (img, &k) in images.iter().zip(e) {
                if k > 0 {
                    term = &term * &img.pow(k);
                }
            }
            out = &out + &term;
        }
        out
    }

    /// Terms in descending order for the given term order.
    pub fn sorted_terms(&self, order: MonomialOrder) -> Vec<(&Vec<u32>, &Int)> {
        let mut v: Vec<_> = self.terms.iter().collect();
        v.sort_by(|a, b| order.cmp(b.0, a.0));
        v
    }

    /// Canonical string: graded reverse lexicographic, variable 0 highest,
    /// e.g. `-t0^2 - 2*t0*t1 + 7*t1^2`.
    pub fn to_canonical_string(&self, var: &str) -> String {
        self.format_with(var, MonomialOrder::GradedRevLex)
    }

    pub fn format_with(&self, var: &str, order: MonomialOrder) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.sorted_terms(order).into_iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .iter()
                .enumerate()
                .filter(|(_, &k)| k > 0)
                .map(|(j, &k)| {
                    if k == 1 {
                        format!("{var}{j}")
                    } else {
                        format!("{var}{j}^{k}")
                    }
                })
                .collect();
            if mono.is_empty() {
                out.push_str(&mag.to_string());
            } else {
                if !mag.is_one() {
                    out.push_str(&mag.to_string());
                    out.push('*');
                }
                out.push_str(&mono.join("*"));
            }
        }
        out
    }

    /// Parse an integer polynomial in variables `{var}0 .. {var}{nvars-1}`.
    ///
    /// Accepts `3*x0^2`, `3x0^2`, `3 x0**2`, `x_0 x_1`, LaTeX-ish `x_0^2`.
    pub fn parse(s: &str, var: &str, nvars: usize) -> Result<Self> {
        Parser::new(s, var, nvars).parse()
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_canonical_string("v"))?;
        if let Ring::Fp(p) = self.ring {
            write!(f, " (mod {p})")?;
        }
        Ok(())
    }
}

impl Add for &MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.ring, rhs.ring, "ring mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.ring, rhs.ring, "ring mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        self.scale(&Int::from(-1))
    }
}

impl Mul for &MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.ring, rhs.ring, "ring mismatch");
        let mut out = MultiPoly::zero(self.ring, self.nvars);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

/// All exponent vectors of total degree `d` in `n` variables, in descending
/// graded-lex order.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() + 1 == n {
            prefix.push(d);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in (0..=d).rev() {
            prefix.push(k);
            rec(n, d - k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Vec::new());
        }
        return out;
    }
    rec(n, d, &mut Vec::with_capacity(n), &mut out);
    out
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    var: &'a str,
    nvars: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &str, var: &'a str, nvars: usize) -> Self {
        Parser {
            chars: s.chars().collect(),
            pos: 0,
            var,
            nvars,
        }
    }

    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at offset {} in polynomial", self.pos))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn number(&mut self) -> Option<Int> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return None;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().ok()
    }

    fn var_index(&mut self) -> Result<Option<usize>> {
        self.skip_ws();
        let vchars: Vec<char> = self.var.chars().collect();
        let end = self.pos + vchars.len();
        if end > self.chars.len() || self.chars[self.pos..end] != vchars[..] {
            return Ok(None);
        }
        self.pos = end;
        if self.chars.get(self.pos) == Some(&'_') {
            self.pos += 1;
        }
        let braced = self.chars.get(self.pos) == Some(&'{');
        if braced {
            self.pos += 1;
        }
        let idx = self.number().ok_or_else(|| self.err("variable index expected"))?;
        if braced {
            if self.chars.get(self.pos) != Some(&'}') {
                return Err(self.err("unclosed brace"));
            }
            self.pos += 1;
        }
        let idx = idx.to_usize().filter(|&i| i < self.nvars).ok_or_else(|| {
            Error::Parse(format!("variable {}{} out of range", self.var, idx))
        })?;
        Ok(Some(idx))
    }

    fn exponent(&mut self) -> Result<u32> {
        match self.peek() {
            Some('^') => {
                self.pos += 1;
            }
            Some('*') if self.chars.get(self.pos + 1) == Some(&'*') => {
                self.pos += 2;
            }
            _ => return Ok(1),
        }
        let braced = self.peek() == Some('{');
        if braced {
            self.pos += 1;
        }
        let k = self
            .number()
            .and_then(|n| n.to_u32())
            .ok_or_else(|| self.err("exponent expected"))?;
        if braced {
            if self.peek() != Some('}') {
                return Err(self.err("unclosed brace"));
            }
            self.pos += 1;
        }
        Ok(k)
    }

    fn parse(mut self) -> Result<MultiPoly> {
        let mut out = MultiPoly::zero(Ring::Integers, self.nvars);
        let mut first = true;
        loop {
            let mut sign = Int::one();
            match self.peek() {
                None => break,
                Some('+') => {
                    self.pos += 1;
                }
                Some('-') => {
                    self.pos += 1;
                    sign = -sign;
                }
                Some(_) if first => {}
                Some(_) => return Err(self.err("expected '+' or '-'")),
            }
            first = false;
            let mut coeff = Int::one();
            let mut exps = vec![0u32; self.nvars];
            let mut saw_factor = false;
            loop {
                if let Some(n) = self.number() {
                    coeff *= n;
                    saw_factor = true;
                } else if let Some(i) = self.var_index()? {
                    exps[i] += self.exponent()?;
                    saw_factor = true;
                } else {
                    break;
                }
                if self.peek() == Some('*') && self.chars.get(self.pos + 1) != Some(&'*') {
                    self.pos += 1;
                }
            }
            if !saw_factor {
                return Err(self.err("term expected"));
            }
            out.add_term(exps, coeff * sign);
        }
        if first {
            return Err(Error::Parse("empty polynomial".into()));
        }
        Ok(out)
    }
}
