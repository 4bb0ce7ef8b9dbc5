//! Local points of the double cover `Y → H`, the local invariants of the
//! Brauer class `α`, and certificates for the failure of weak approximation.
//!
//! A point of `H` is a singular member `Q_t` of the pencil. If `Q_t` has rank
//! 4 it lifts to `Y(ℚ_v)` exactly when the discriminant of its base quadric
//! surface is a square in `ℚ_v` (two lifts, one per ruling); rank-3 members
//! lift uniquely. The invariant `inv_v α(y)` is ½ precisely when `Q_t` has no
//! smooth `ℚ_v`-point.

use std::fmt;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::exact::interval::RatInterval;
use crate::exact::matrix::det_poly;
use crate::exact::roots::{isolate_real_roots, refine, sign_variations, UniPoly};
use crate::exact::{int_mod, is_prime, rat_int, Int, IntMatrix, MultiPoly, Rat, Ring};
use crate::localfields::{hilbert_symbol, prime_divisors, square_class, LocalInvariant, Place, SquareClass};
use crate::pencil::{regularity_certificate, Pencil, RegularityCertificate, RegularityOptions};
use crate::quadform::{has_smooth_point, isotropic_qp, LocalField, Signature, NVARS};
use crate::{Error, Result};

pub const ENGINE: &str = concat!("symmetroid ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Ruling {
    First,
    Second,
    /// rank-3 members: the ramification locus of `Y → H`
    Unique,
}

/// `t(s) = base + s·direction` at a real root `s` of `det 𝓑(t(s))` isolated
/// in `interval`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealRoot {
    #[serde(serialize_with = "ser_ints")]
    pub base: Vec<Int>,
    #[serde(serialize_with = "ser_ints")]
    pub direction: Vec<Int>,
    pub interval: RatInterval,
}

impl RealRoot {
    /// Midpoint approximation of `t*`.
    pub fn approx(&self) -> Vec<f64> {
        let s = crate::exact::rat_to_f64(&self.interval.midpoint());
        self.base
            .iter()
            .zip(&self.direction)
            .map(|(a, b)| int_to_f64(a) + s * int_to_f64(b))
            .collect()
    }
}

fn int_to_f64(a: &Int) -> f64 {
    crate::exact::rat_to_f64(&rat_int(a.clone()))
}

fn ser_ints<S: serde::Serializer>(v: &[Int], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().serialize(s)
}

/// A point of `H` over some completion of ℚ.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HPoint {
    /// a primitive integer vector
    Rational {
        #[serde(serialize_with = "ser_ints")]
        t: Vec<Int>,
    },
    /// coordinates known modulo `p^precision`, one of them a unit
    Padic {
        p: u64,
        precision: u32,
        #[serde(serialize_with = "ser_ints")]
        t: Vec<Int>,
    },
    Real(RealRoot),
}

impl HPoint {
    pub fn rational(t: &[Int]) -> Result<HPoint> {
        if t.len() != NVARS {
            return Err(Error::Dimension("expected 5 coordinates".into()));
        }
        if t.iter().all(Zero::is_zero) {
            return Err(Error::ZeroArgument("point of H"));
        }
        let g = t.iter().fold(Int::zero(), |g, x| num_integer::Integer::gcd(&g, x));
        Ok(HPoint::Rational {
            t: t.iter().map(|x| x / &g).collect(),
        })
    }

    pub fn rational_i64(t: &[i64]) -> Result<HPoint> {
        HPoint::rational(&t.iter().map(|&x| Int::from(x)).collect::<Vec<_>>())
    }
}

impl fmt::Display for HPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |t: &[Int]| t.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(":");
        match self {
            HPoint::Rational { t } => write!(f, "({})", join(t)),
            HPoint::Padic { p, precision, t } => write!(f, "({}) mod {p}^{precision}", join(t)),
            HPoint::Real(r) => write!(f, "({}) + s·({}), s ∈ {}", join(&r.base), join(&r.direction), r.interval),
        }
    }
}

/// A point of `Y(ℚ_v)` together with the data that certifies it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalYPoint {
    pub place: Place,
    pub point: HPoint,
    pub ruling: Ruling,
    pub rank: usize,
    /// square class of the base discriminant (rank 4 only)
    pub disc_class: Option<SquareClass>,
    /// principal 4-minor used to certify rank and discriminant (rank 4 only)
    pub certifying_minor: Option<[usize; 4]>,
    /// signature of `Q_{t*}` (real place only)
    pub signature: Option<Signature>,
}

/// Rank, discriminant and smooth-point data of a member at one place.
#[derive(Debug, Clone, PartialEq)]
struct MemberData {
    rank: usize,
    disc_class: Option<SquareClass>,
    minor: Option<[usize; 4]>,
    signature: Option<Signature>,
    smooth_point: bool,
}

fn complement(i: usize) -> [usize; 4] {
    let mut out = [0; 4];
    let mut k = 0;
    for j in 0..NVARS {
        if j != i {
            out[k] = j;
            k += 1;
        }
    }
    out
}

fn member_rational(pencil: &Pencil, t: &[Int], v: Place) -> Result<MemberData> {
    let q = pencil.member(t);
    let rank = q.rank();
    if rank == 5 {
        return Err(Error::Rank {
            found: 5,
            expected: "3 or 4 (a point of H)",
        });
    }
    if rank <= 2 {
        return Err(Error::Rank {
            found: rank,
            expected: "3 or 4 (regular pencils have no members of rank ≤ 2)",
        });
    }
    let (disc_class, minor) = if rank == 4 {
        let g = q.gram();
        let (s, d) = (0..NVARS)
            .rev()
            .map(|i| {
                let s = complement(i);
                (s, g.submatrix(&s, &s).det())
            })
            .find(|(_, d)| !d.is_zero())
            .expect("rank 4 has a nonzero principal 4-minor");
        (Some(square_class(&rat_int(d), v)?), Some(s))
    } else {
        (None, None)
    };
    let signature = match v {
        Place::Real => crate::quadform::classify(&q, crate::quadform::Field::Reals)?.signature,
        Place::Finite(_) => None,
    };
    Ok(MemberData {
        rank,
        disc_class,
        minor,
        signature,
        smooth_point: has_smooth_point(&q, LocalField::from_place(v))?,
    })
}

fn valuation_capped(a: &Int, p: u64, cap: u32) -> u32 {
    if a.is_zero() {
        return cap;
    }
    let pp = Int::from(p);
    let mut a = a.clone();
    let mut v = 0;
    while v < cap && (&a % &pp).is_zero() {
        a /= &pp;
        v += 1;
    }
    v
}

/// Precision needed to pin the square class of a 4-minor of valuation `v`.
pub fn required_precision(v: u32, p: u64) -> u32 {
    2 * v + if p == 2 { 3 } else { 1 } + 1
}

fn member_padic(pencil: &Pencil, t: &[Int], p: u64, n: u32) -> Result<MemberData> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if t.iter().all(|x| int_mod(x, p) == 0) {
        return Err(Error::Precision("no coordinate is a p-adic unit".into()));
    }
    let modulus = num_traits::pow(Int::from(p), n as usize);
    let g = pencil.member(t).gram();
    if !(g.det() % &modulus).is_zero() {
        return Err(Error::Rank {
            found: 5,
            expected: "3 or 4 (a point of H)",
        });
    }
    let (s, d, v) = (0..NVARS)
        .rev()
        .map(|i| {
            let s = complement(i);
            let d = g.submatrix(&s, &s).det();
            let v = valuation_capped(&d, p, n);
            (s, d, v)
        })
        .min_by_key(|&(_, _, v)| v)
        .unwrap();
    if v >= n {
        return Err(Error::Precision(format!(
            "every principal 4-minor vanishes mod {p}^{n}; rank cannot be certified"
        )));
    }
    let need = required_precision(v, p);
    if n < need {
        return Err(Error::Precision(format!(
            "certifying minor has valuation {v}; need precision ≥ {need}, have {n}"
        )));
    }
    let block = IntMatrix::from_fn(4, 4, |i, j| g[(s[i], s[j])].clone());
    let (_, diag) = crate::quadform::diagonalize_rat(&block.to_rat());
    Ok(MemberData {
        rank: 4,
        disc_class: Some(square_class(&rat_int(d), Place::Finite(p))?),
        minor: Some(s),
        signature: None,
        smooth_point: isotropic_qp(&diag, p)?,
    })
}

/// Univariate polynomials in `s` for a 5×5 matrix of 1-variable entries.
struct LineGram {
    entries: Vec<Vec<MultiPoly>>,
}

fn to_unipoly(f: &MultiPoly) -> UniPoly {
    let deg = f.degree().unwrap_or(0) as usize;
    let mut c = vec![Rat::zero(); deg + 1];
    for (e, v) in f.terms() {
        c[e[0] as usize] += rat_int(v.clone());
    }
    UniPoly::new(c)
}

impl LineGram {
    fn new(pencil: &Pencil, base: &[Int], dir: &[Int]) -> LineGram {
        let a = pencil.member(base).gram();
        let b = pencil.member(dir).gram();
        let entries = (0..NVARS)
            .map(|i| {
                (0..NVARS)
                    .map(|j| {
                        &MultiPoly::linear(Ring::Integers, &[b[(i, j)].clone()])
                            + &MultiPoly::constant(Ring::Integers, 1, a[(i, j)].clone())
                    })
                    .collect()
            })
            .collect();
        LineGram { entries }
    }

    fn minor(&self, rows: &[usize]) -> UniPoly {
        if rows.is_empty() {
            return UniPoly::new(vec![Rat::one()]);
        }
        let m: Vec<Vec<MultiPoly>> = rows
            .iter()
            .map(|&i| rows.iter().map(|&j| self.entries[i][j].clone()).collect())
            .collect();
        to_unipoly(&det_poly(&m))
    }

    fn det(&self) -> UniPoly {
        self.minor(&[0, 1, 2, 3, 4])
    }

    /// `E₁..E₄` of the principal block on `s`: sums of principal minors.
    fn elementary(&self, s: &[usize; 4]) -> [UniPoly; 4] {
        std::array::from_fn(|k| {
            let size = k + 1;
            let mut acc: Vec<Rat> = Vec::new();
            for mask in 0u32..16 {
                if mask.count_ones() as usize != size {
                    continue;
                }
                let rows: Vec<usize> = (0..4).filter(|b| mask & (1 << b) != 0).map(|b| s[b]).collect();
                let m = self.minor(&rows);
                if acc.len() < m.coeffs().len() {
                    acc.resize(m.coeffs().len(), Rat::zero());
                }
                for (x, c) in acc.iter_mut().zip(m.coeffs()) {
                    *x += c;
                }
            }
            UniPoly::new(acc)
        })
    }
}

fn interval_sign(f: &UniPoly, iv: &RatInterval) -> Option<i8> {
    if f.is_zero() {
        return Some(0);
    }
    if iv.is_point() {
        return Some(f.sign_at(iv.lo()));
    }
    let r = f.eval_interval(iv);
    if r.contains_zero() {
        None
    } else if r.lo().is_positive() {
        Some(1)
    } else {
        Some(-1)
    }
}

/// Signature of a nondegenerate 4×4 symmetric block from the signs of the
/// coefficients of its characteristic polynomial (real-rooted, so Descartes'
/// count is exact).
pub fn signature_from_elementary(e: [i8; 4]) -> Signature {
    let pos = sign_variations([1, -e[0], e[1], -e[2], e[3]]);
    let neg = sign_variations([1, e[0], e[1], e[2], e[3]]);
    Signature {
        positive: pos,
        negative: neg,
        zero: 1,
    }
}

/// Certified rank-4 data at a real root: a principal 4-minor of constant
/// sign on the interval and a stable signature.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RealCertificate {
    pub minor: [usize; 4],
    pub minor_sign: i8,
    pub signature: Signature,
    pub interval: RatInterval,
}

const MAX_REFINEMENTS: usize = 200;

fn certify_real_root(lg: &LineGram, f_sqfree: &UniPoly, iv: &RatInterval) -> Option<RealCertificate> {
    let blocks: Vec<([usize; 4], UniPoly, [UniPoly; 4])> = (0..NVARS)
        .rev()
        .map(|i| {
            let s = complement(i);
            let e = lg.elementary(&s);
            (s, e[3].clone(), e)
        })
        .filter(|(_, m, _)| !m.is_zero())
        .collect();
    let mut cur = iv.clone();
    for _ in 0..MAX_REFINEMENTS {
        for (s, m, e) in &blocks {
            let Some(ms) = interval_sign(m, &cur) else { continue };
            if ms == 0 {
                continue;
            }
            let signs: Option<Vec<i8>> = e.iter().map(|p| interval_sign(p, &cur)).collect();
            if let Some(signs) = signs {
                return Some(RealCertificate {
                    minor: *s,
                    minor_sign: ms,
                    signature: signature_from_elementary([signs[0], signs[1], signs[2], signs[3]]),
                    interval: cur,
                });
            }
        }
        if cur.is_point() {
            return None;
        }
        cur = refine(f_sqfree, &cur);
    }
    None
}

/// Lifts of a point of `H` to `Y(ℚ_v)`: none, one (rank 3) or two (rank 4
/// with square base discriminant).
pub fn lift_to_y(pencil: &Pencil, point: &HPoint, v: Place) -> Result<Vec<LocalYPoint>> {
    let data = member_data(pencil, point, v)?;
    let make = |ruling| LocalYPoint {
        place: v,
        point: point.clone(),
        ruling,
        rank: data.rank,
        disc_class: data.disc_class,
        certifying_minor: data.minor,
        signature: data.signature,
    };
    Ok(match data.rank {
        3 => vec![make(Ruling::Unique)],
        _ if data.disc_class.is_some_and(|c| c.is_square()) => vec![make(Ruling::First), make(Ruling::Second)],
        _ => Vec::new(),
    })
}

fn member_data(pencil: &Pencil, point: &HPoint, v: Place) -> Result<MemberData> {
    match (point, v) {
        (HPoint::Rational { t }, _) => member_rational(pencil, t, v),
        (HPoint::Padic { p, precision, t }, Place::Finite(q)) if *p == q => member_padic(pencil, t, q, *precision),
        (HPoint::Real(r), Place::Real) => {
            let lg = LineGram::new(pencil, &r.base, &r.direction);
            let f = lg.det();
            if f.is_zero() {
                return Err(Error::Degenerate("line lies in H".into()));
            }
            let g = f.squarefree();
            let iv = &r.interval;
            let isolating = if iv.is_point() {
                g.sign_at(iv.lo()) == 0
            } else {
                g.sign_at(iv.lo()) * g.sign_at(iv.hi()) < 0
            };
            if !isolating {
                return Err(Error::Precision("interval does not bracket a root of det".into()));
            }
            let c = certify_real_root(&lg, &g, iv)
                .ok_or_else(|| Error::Precision("could not certify rank 4 on the interval".into()))?;
            let sig = c.signature;
            Ok(MemberData {
                rank: 4,
                disc_class: Some(SquareClass::Real {
                    positive: c.minor_sign > 0,
                }),
                minor: Some(c.minor),
                signature: Some(sig),
                smooth_point: sig.positive > 0 && sig.negative > 0,
            })
        }
        _ => Err(Error::Dimension(format!("point {point} does not live at the place {v}"))),
    }
}

/// `inv_v α(y)`: ½ iff `Q_{t*}` has no smooth `ℚ_v`-point.
pub fn evaluate_invariant(pencil: &Pencil, y: &LocalYPoint) -> Result<LocalInvariant> {
    let lifts = lift_to_y(pencil, &y.point, y.place)?;
    if !lifts.iter().any(|l| l.ruling == y.ruling) {
        return Err(Error::Degenerate(format!("{} does not lift to Y at {}", y.point, y.place)));
    }
    let data = member_data(pencil, &y.point, y.place)?;
    Ok(if data.smooth_point {
        LocalInvariant::Zero
    } else {
        LocalInvariant::Half
    })
}

/// The invariant together with the conic cross-check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantReport {
    pub place: Place,
    pub invariant: LocalInvariant,
    /// `(−d₁d₃, −d₂d₃)_v` for the Gram–Schmidt diagonal; `None` when a leading
    /// minor vanishes at `t*` or the point is not rational
    pub conic_check: Option<LocalInvariant>,
    /// the symbol `(M₂/M₁², M₃/(M₂M₁))_v`, recorded as is
    pub minor_symbol: Option<LocalInvariant>,
}

impl InvariantReport {
    pub fn consistent(&self) -> bool {
        self.conic_check.is_none_or(|c| c == self.invariant)
    }
}

pub fn evaluate_with_cross_check(pencil: &Pencil, y: &LocalYPoint) -> Result<InvariantReport> {
    let invariant = evaluate_invariant(pencil, y)?;
    let (mut conic_check, mut minor_symbol) = (None, None);
    if let HPoint::Rational { t } = &y.point {
        let g = pencil.member(t).gram().to_rat();
        let m: Vec<Rat> = (1..=4)
            .map(|k| {
                let idx: Vec<usize> = (0..k).collect();
                g.submatrix(&idx, &idx).det()
            })
            .collect();
        let usable = !m[0].is_zero() && !m[1].is_zero() && !m[2].is_zero() && (y.rank == 3 || !m[3].is_zero());
        if usable {
            let d1 = m[0].clone();
            let d2 = &m[1] / &m[0];
            let d3 = &m[2] / &m[1];
            let a = -(&d1 * &d3);
            let b = -(&d2 * &d3);
            conic_check = Some(LocalInvariant::from_sign(hilbert_symbol(&a, &b, y.place)?));
            let a = &m[1] / &(&m[0] * &m[0]);
            let b = &m[2] / &(&m[1] * &m[0]);
            minor_symbol = Some(LocalInvariant::from_sign(hilbert_symbol(&a, &b, y.place)?));
        }
    }
    Ok(InvariantReport {
        place: y.place,
        invariant,
        conic_check,
        minor_symbol,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RealSearch {
    pub seed: u64,
    /// number of lines tried
    pub budget: usize,
    /// coordinates of random points are drawn from `[-height, height]`
    pub height: i64,
}

impl Default for RealSearch {
    fn default() -> Self {
        RealSearch {
            seed: 0,
            budget: 400,
            height: 5,
        }
    }
}

fn random_vector(rng: &mut ChaCha8Rng, h: i64) -> Vec<Int> {
    loop {
        let v: Vec<i64> = (0..NVARS).map(|_| rng.gen_range(-h..=h)).collect();
        if v.iter().any(|&x| x != 0) {
            return v.into_iter().map(Int::from).collect();
        }
    }
}

/// Rational points of `H` among the generators and the sums `eᵢ ± eⱼ`.
pub fn distinguished_h_points(pencil: &Pencil) -> Vec<Vec<Int>> {
    let mut out = Vec::new();
    let unit = |i: usize| -> Vec<Int> { (0..NVARS).map(|k| Int::from((k == i) as i64)).collect() };
    for i in 0..NVARS {
        out.push(unit(i));
    }
    for i in 0..NVARS {
        for j in i + 1..NVARS {
            for sgn in [1i64, -1] {
                let mut t = unit(i);
                t[j] = Int::from(sgn);
                out.push(t);
            }
        }
    }
    out.into_iter()
        .filter(|t| pencil.det().eval_int(t).is_zero())
        .collect()
}

/// Line `k` of the search: odd indices pass through a distinguished point of
/// `H` when there is one.
fn search_line(seed: u64, k: usize, h: i64, anchors: &[Vec<Int>]) -> (Vec<Int>, Vec<Int>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (k as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let base = if k % 2 == 1 && !anchors.is_empty() {
        anchors[(k / 2) % anchors.len()].clone()
    } else {
        random_vector(&mut rng, h)
    };
    (base, random_vector(&mut rng, h))
}

fn target_matches(sig: &Signature, target: LocalInvariant) -> bool {
    match target {
        LocalInvariant::Zero => sig.positive == 2 && sig.negative == 2,
        LocalInvariant::Half => (sig.positive == 4) != (sig.negative == 4),
    }
}

/// Search seeded rational lines in `P` for a real point of `Y` with the given
/// invariant. Exhausting the budget is reported as `NotFound`, which says
/// nothing about existence.
pub fn find_real_point_with_invariant(
    pencil: &Pencil,
    target: LocalInvariant,
    opts: RealSearch,
) -> Result<LocalYPoint> {
    let anchors = distinguished_h_points(pencil);
    (0..opts.budget)
        .into_par_iter()
        .map(|k| {
            let (base, dir) = search_line(opts.seed, k, opts.height, &anchors);
            let lg = LineGram::new(pencil, &base, &dir);
            let f = lg.det();
            if f.is_zero() {
                return None;
            }
            let g = f.squarefree();
            let roots = isolate_real_roots(&f).ok()?;
            roots.into_iter().find_map(|iv| {
                let c = certify_real_root(&lg, &g, &iv)?;
                if c.minor_sign <= 0 || !target_matches(&c.signature, target) {
                    return None;
                }
                Some(LocalYPoint {
                    place: Place::Real,
                    point: HPoint::Real(RealRoot {
                        base: base.clone(),
                        direction: dir.clone(),
                        interval: c.interval,
                    }),
                    ruling: Ruling::First,
                    rank: 4,
                    disc_class: Some(SquareClass::Real { positive: true }),
                    certifying_minor: Some(c.minor),
                    signature: Some(c.signature),
                })
            })
        })
        .find_map_first(|x| x)
        .ok_or_else(|| Error::NotFound(format!("no real point with invariant {target} on {} lines", opts.budget)))
}

/// Root of `det 𝓑(base + s·dir)` modulo `p^n`, lifted from a simple root mod
/// `p` by Newton iteration.
pub fn padic_point_on_line(pencil: &Pencil, base: &[Int], dir: &[Int], p: u64, n: u32) -> Option<HPoint> {
    let lg = LineGram::new(pencil, base, dir);
    let f = lg.det();
    let den = f.coeffs().iter().fold(Int::one(), |acc, c| num_integer::Integer::lcm(&acc, c.denom()));
    let coeffs: Vec<Int> = f.coeffs().iter().map(|c| (c * rat_int(den.clone())).to_integer()).collect();
    let eval = |x: &Int, m: &Int| -> Int {
        coeffs.iter().rev().fold(Int::zero(), |acc, c| (acc * x + c) % m)
    };
    let deriv: Vec<Int> = coeffs.iter().enumerate().skip(1).map(|(i, c)| c * Int::from(i)).collect();
    let eval_d = |x: &Int, m: &Int| -> Int { deriv.iter().rev().fold(Int::zero(), |acc, c| (acc * x + c) % m) };
    let pp = Int::from(p);
    let modulus = num_traits::pow(pp.clone(), n as usize);
    let r0 = (0..p).map(Int::from).find(|r| {
        int_mod(&eval(r, &pp), p) == 0 && int_mod(&eval_d(r, &pp), p) != 0
    })?;
    let inv = |a: &Int| -> Int {
        let a = ((a % &modulus) + &modulus) % &modulus;
        let e = num_integer::Integer::extended_gcd(&a, &modulus);
        ((e.x % &modulus) + &modulus) % &modulus
    };
    let mut r = r0;
    for _ in 0..(n as usize).next_power_of_two().trailing_zeros() + 2 {
        let fr = eval(&r, &modulus);
        let dr = eval_d(&r, &modulus);
        r = (((&r - fr * inv(&dr)) % &modulus) + &modulus) % &modulus;
    }
    let t: Vec<Int> = base
        .iter()
        .zip(dir)
        .map(|(a, b)| ((a + &r * b) % &modulus + &modulus) % &modulus)
        .collect();
    if t.iter().all(|x| int_mod(x, p) == 0) {
        return None;
    }
    Some(HPoint::Padic { p, precision: n, t })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "p", rename_all = "snake_case")]
pub enum Strategy {
    Real,
    Finite(u64),
}

/// A point of `Y` with its invariant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluatedPoint {
    pub point: LocalYPoint,
    pub invariant: LocalInvariant,
}

/// A rational point of `Y`, hence a point of `Y(ℚ_v)` for every `v`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolubilityWitness {
    pub point: HPoint,
    pub rank: usize,
    /// base discriminant, a square in ℚ (rank 4 only)
    pub disc: Option<String>,
    /// the same point checked at the listed places
    pub local_checks: Vec<LocalYPoint>,
    pub reasoning: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WACertificate {
    pub schema: &'static str,
    pub engine: &'static str,
    pub pencil: Vec<String>,
    pub regularity: RegularityCertificate,
    pub place: Place,
    pub points: [EvaluatedPoint; 2],
    pub witnesses: Vec<SolubilityWitness>,
}

fn is_rational_square(a: &Int) -> bool {
    !a.is_negative() && {
        let r = a.sqrt();
        &(&r * &r) == a
    }
}

/// A rational point of `Y` among the distinguished points of `H`, checked at
/// `∞`, 2, the primes of its discriminant and `extra`.
pub fn global_witness(pencil: &Pencil, extra: &[Place]) -> Result<SolubilityWitness> {
    for t in distinguished_h_points(pencil) {
        let q = pencil.member(&t);
        let rank = q.rank();
        let disc = match rank {
            3 => None,
            4 => {
                let d = crate::quadform::ruling_disc(&q)?;
                if !is_rational_square(&d) {
                    continue;
                }
                Some(d)
            }
            _ => continue,
        };
        let point = HPoint::rational(&t)?;
        let mut places = vec![Place::Real, Place::Finite(2)];
        if let Some(d) = &disc {
            places.extend(prime_divisors(d).into_iter().map(Place::Finite));
        }
        places.extend_from_slice(extra);
        places.sort();
        places.dedup();
        let mut local_checks = Vec::new();
        for v in places {
            let lifts = lift_to_y(pencil, &point, v)?;
            local_checks.push(lifts.into_iter().next().ok_or_else(|| {
                Error::Degenerate("a rational Y-point failed to lift locally".into())
            })?);
        }
        return Ok(SolubilityWitness {
            point,
            rank,
            disc: disc.map(|d| d.to_string()),
            local_checks,
            reasoning: "a ℚ-point of Y lies in Y(ℚ_v) for every place v, so Y is everywhere locally soluble".into(),
        });
    }
    Err(Error::NotFound("no rational point of Y among the distinguished points of H".into()))
}

pub const REGULARITY_PRIMES: [u64; 5] = [3, 5, 7, 11, 13];

/// The first regularity certificate that succeeds at one of `primes`.
pub fn find_regularity(pencil: &Pencil, primes: &[u64]) -> Result<RegularityCertificate> {
    let mut last = None;
    for &p in primes {
        let c = regularity_certificate(pencil, p, RegularityOptions::default())?;
        if c.regular {
            return Ok(c);
        }
        last = Some(p);
    }
    Err(Error::NotFound(format!(
        "no regularity certificate at the primes tried (last {last:?})"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WAOptions {
    pub search: RealSearch,
}

impl Default for WAOptions {
    fn default() -> Self {
        WAOptions {
            search: RealSearch::default(),
        }
    }
}

/// Two points of `Y(ℚ_v)` with different invariants, plus a rational point of
/// `Y`: then `Y(𝔸_ℚ)^α ≠ Y(𝔸_ℚ)` and weak approximation fails.
pub fn certify_wa_failure(pencil: &Pencil, strategy: Strategy, opts: WAOptions) -> Result<WACertificate> {
    let regularity = find_regularity(pencil, &REGULARITY_PRIMES)?;
    let (place, points) = match strategy {
        Strategy::Real => {
            let z = find_real_point_with_invariant(pencil, LocalInvariant::Zero, opts.search)?;
            let h = find_real_point_with_invariant(pencil, LocalInvariant::Half, opts.search)?;
            (Place::Real, [z, h])
        }
        Strategy::Finite(p) => {
            let v = Place::prime(p)?;
            let mut found: [Option<LocalYPoint>; 2] = [None, None];
            for t in distinguished_h_points(pencil) {
                let point = HPoint::rational(&t)?;
                let Ok(lifts) = lift_to_y(pencil, &point, v) else { continue };
                let Some(y) = lifts.into_iter().next() else { continue };
                let k = match evaluate_invariant(pencil, &y)? {
                    LocalInvariant::Zero => 0,
                    LocalInvariant::Half => 1,
                };
                found[k].get_or_insert(y);
            }
            match found {
                [Some(a), Some(b)] => (v, [a, b]),
                _ => {
                    return Err(Error::NotFound(format!(
                        "the distinguished points do not realize both invariants at {p}"
                    )))
                }
            }
        }
    };
    let witness = global_witness(pencil, &[place])?;
    let [a, b] = points;
    let points = [
        EvaluatedPoint {
            invariant: evaluate_invariant(pencil, &a)?,
            point: a,
        },
        EvaluatedPoint {
            invariant: evaluate_invariant(pencil, &b)?,
            point: b,
        },
    ];
    let cert = WACertificate {
        schema: "symmetroid.wa-certificate/1",
        engine: ENGINE,
        pencil: pencil.to_text().lines().map(str::to_string).collect(),
        regularity,
        place,
        points,
        witnesses: vec![witness],
    };
    if !cert.validate(pencil)? {
        return Err(Error::Degenerate("certificate failed self-validation".into()));
    }
    Ok(cert)
}

impl WACertificate {
    /// Re-evaluate everything the certificate claims.
    pub fn validate(&self, pencil: &Pencil) -> Result<bool> {
        if !self.regularity.regular {
            return Ok(false);
        }
        let inv: Vec<LocalInvariant> = self
            .points
            .iter()
            .map(|e| evaluate_invariant(pencil, &e.point))
            .collect::<Result<_>>()?;
        if inv[0] == inv[1] || inv[0] != self.points[0].invariant || inv[1] != self.points[1].invariant {
            return Ok(false);
        }
        if self.points.iter().any(|e| e.point.place != self.place) {
            return Ok(false);
        }
        for w in &self.witnesses {
            let HPoint::Rational { t } = &w.point else { return Ok(false) };
            let q = pencil.member(t);
            let rank = q.rank();
            let ok = match rank {
                3 => true,
                4 => is_rational_square(&crate::quadform::ruling_disc(&q)?),
                _ => false,
            };
            if !ok || rank != w.rank {
                return Ok(false);
            }
            for y in &w.local_checks {
                if lift_to_y(pencil, &y.point, y.place)?.is_empty() {
                    return Ok(false);
                }
            }
        }
        Ok(!self.witnesses.is_empty())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::int;
    use crate::pencil::examples;

    fn thm() -> Pencil {
        examples::pencil(&examples::THEOREM)
    }

    fn unit(i: usize) -> HPoint {
        let mut t = [0i64; 5];
        t[i] = 1;
        HPoint::rational_i64(&t).unwrap()
    }

    #[test]
    fn lifts_of_distinguished_members() {
        let p = thm();
        // x0x1 + x2x3: rank 4, base disc a square everywhere
        let ys = lift_to_y(&p, &unit(0), Place::Real).unwrap();
        assert_eq!(ys.len(), 2);
        assert_eq!(ys[0].ruling, Ruling::First);
        let q3 = examples::pencil(&examples::THREE_ADIC);
        let ys = lift_to_y(&q3, &unit(0), Place::Finite(3)).unwrap();
        assert_eq!(ys.len(), 2);
        assert!(ys[0].disc_class.unwrap().is_square());
    }

    #[test]
    fn nonsquare_disc_has_no_lift() {
        // x0² + x1² + x2² + 3x3²: base disc 3 is not a 5-adic square, nor 7-adic
        let p = Pencil::parse("x0^2 + x1^2 + x2^2 + 3*x3^2\nx4^2\nx0*x4\nx1*x4\nx2*x4").unwrap();
        assert!(lift_to_y(&p, &unit(0), Place::Finite(5)).unwrap().is_empty());
        assert!(lift_to_y(&p, &unit(0), Place::Finite(7)).unwrap().is_empty());
        assert_eq!(lift_to_y(&p, &unit(0), Place::Finite(11)).unwrap().len(), 2);
        assert_eq!(lift_to_y(&p, &unit(0), Place::Real).unwrap().len(), 2);
    }

    #[test]
    fn rank_checks() {
        let p = Pencil::parse("x0^2 + x1^2 + x2^2\nx3^2\nx4^2\nx0*x3\nx1*x4").unwrap();
        // rank 3 lifts uniquely
        let ys = lift_to_y(&p, &unit(0), Place::Finite(3)).unwrap();
        assert_eq!(ys.len(), 1);
        assert_eq!(ys[0].ruling, Ruling::Unique);
        // rank 1 flags non-regularity; rank 5 is off H
        assert!(matches!(lift_to_y(&p, &unit(1), Place::Real), Err(Error::Rank { found: 1, .. })));
        let full = HPoint::rational_i64(&[1, 1, 1, 0, 0]).unwrap();
        assert!(matches!(lift_to_y(&p, &full, Place::Real), Err(Error::Rank { found: 5, .. })));
    }

    #[test]
    fn invariants_of_distinguished_members() {
        let p = thm();
        let y0 = lift_to_y(&p, &unit(0), Place::Real).unwrap().remove(0);
        assert_eq!(evaluate_invariant(&p, &y0).unwrap(), LocalInvariant::Zero);
        let y1 = lift_to_y(&p, &unit(1), Place::Real).unwrap().remove(0);
        assert_eq!(
            y1.signature,
            Some(Signature {
                positive: 4,
                negative: 0,
                zero: 1
            })
        );
        assert_eq!(evaluate_invariant(&p, &y1).unwrap(), LocalInvariant::Half);
        // x0x1 + x2x3 has the smooth point (1:0:0:0:0) at every place
        for v in [Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(101)] {
            let y = lift_to_y(&p, &unit(0), v).unwrap().remove(0);
            assert_eq!(evaluate_invariant(&p, &y).unwrap(), LocalInvariant::Zero);
        }
        let q3 = examples::pencil(&examples::THREE_ADIC);
        let y = lift_to_y(&q3, &unit(0), Place::Finite(3)).unwrap().remove(0);
        assert_eq!(evaluate_invariant(&q3, &y).unwrap(), LocalInvariant::Half);
        let y = lift_to_y(&q3, &unit(1), Place::Finite(3)).unwrap().remove(0);
        assert_eq!(evaluate_invariant(&q3, &y).unwrap(), LocalInvariant::Zero);
    }

    #[test]
    fn both_rulings_give_the_same_invariant() {
        let p = thm();
        for v in [Place::Real, Place::Finite(2), Place::Finite(5)] {
            let ys = lift_to_y(&p, &unit(1), v).unwrap();
            if ys.len() == 2 {
                assert_eq!(evaluate_invariant(&p, &ys[0]).unwrap(), evaluate_invariant(&p, &ys[1]).unwrap());
            }
        }
    }

    #[test]
    fn point_at_wrong_place_rejected() {
        let p = thm();
        let pt = HPoint::Padic {
            p: 3,
            precision: 10,
            t: vec![int(1), int(0), int(0), int(0), int(0)],
        };
        assert!(matches!(lift_to_y(&p, &pt, Place::Finite(5)), Err(Error::Dimension(_))));
    }

    #[test]
    fn padic_points_respect_the_precision_rule() {
        let p = thm();
        let base: Vec<Int> = [1, 0, 0, 0, 0].map(int).to_vec();
        let dir: Vec<Int> = [0, 1, 2, -1, 3].map(int).to_vec();
        let mut checked = 0;
        for q in [3u64, 7, 11, 13] {
            let Some(pt) = padic_point_on_line(&p, &base, &dir, q, 12) else { continue };
            let HPoint::Padic { t, .. } = &pt else { unreachable!() };
            let modulus = num_traits::pow(Int::from(q), 12);
            assert!((p.det().eval_int(t) % &modulus).is_zero());
            match lift_to_y(&p, &pt, Place::Finite(q)) {
                Ok(ys) => {
                    for y in &ys {
                        evaluate_invariant(&p, y).unwrap();
                    }
                    // truncating far enough must refuse rather than guess
                    let short = HPoint::Padic {
                        p: q,
                        precision: 1,
                        t: t.iter().map(|x| x % Int::from(q)).collect(),
                    };
                    assert!(matches!(lift_to_y(&p, &short, Place::Finite(q)), Err(Error::Precision(_))));
                    checked += 1;
                }
                Err(Error::Precision(_)) => {}
                Err(e) => panic!("{e}"),
            }
        }
        assert!(checked > 0);
    }

    #[test]
    fn padic_point_agrees_with_rational_point() {
        // a rational point given to high 3-adic precision evaluates the same way
        let q3 = examples::pencil(&examples::THREE_ADIC);
        for (i, inv) in [(0, LocalInvariant::Half), (1, LocalInvariant::Zero)] {
            let mut t = vec![int(0); 5];
            t[i] = int(1);
            let pt = HPoint::Padic { p: 3, precision: 20, t };
            let y = lift_to_y(&q3, &pt, Place::Finite(3)).unwrap().remove(0);
            assert_eq!(evaluate_invariant(&q3, &y).unwrap(), inv);
        }
    }

    #[test]
    fn descartes_signature() {
        // diag(1, 2, -3, -4): E = (-4, -13, ... ) computed by hand
        let e1 = 1 + 2 - 3 - 4;
        let e2 = 1 * 2 + 1 * -3 + 1 * -4 + 2 * -3 + 2 * -4 + -3 * -4;
        let e3 = 1 * 2 * -3 + 1 * 2 * -4 + 1 * -3 * -4 + 2 * -3 * -4;
        let e4 = 1 * 2 * -3 * -4;
        let s = |x: i32| x.signum() as i8;
        let sig = signature_from_elementary([s(e1), s(e2), s(e3), s(e4)]);
        assert_eq!((sig.positive, sig.negative), (2, 2));
        let sig = signature_from_elementary([1, 1, 1, 1]);
        assert_eq!((sig.positive, sig.negative), (4, 0));
        let sig = signature_from_elementary([-1, 1, -1, 1]);
        assert_eq!((sig.positive, sig.negative), (0, 4));
    }

    #[test]
    fn real_search_finds_both_invariants() {
        let p = thm();
        for target in [LocalInvariant::Zero, LocalInvariant::Half] {
            let y = find_real_point_with_invariant(&p, target, RealSearch::default()).unwrap();
            assert_eq!(evaluate_invariant(&p, &y).unwrap(), target);
            let HPoint::Real(r) = &y.point else { panic!() };
            // the signature survives further refinement of the root
            let lg = LineGram::new(&p, &r.base, &r.direction);
            let g = lg.det().squarefree();
            let finer = refine(&g, &refine(&g, &r.interval));
            let c = certify_real_root(&lg, &g, &finer).unwrap();
            assert_eq!(Some(c.signature), y.signature);
            // and the exact determinant changes sign across the interval
            if !r.interval.is_point() {
                assert!(g.sign_at(r.interval.lo()) * g.sign_at(r.interval.hi()) < 0);
            }
        }
    }

    #[test]
    fn real_search_is_deterministic() {
        let p = thm();
        let opts = RealSearch {
            seed: 7,
            ..RealSearch::default()
        };
        let a = find_real_point_with_invariant(&p, LocalInvariant::Zero, opts).unwrap();
        let b = find_real_point_with_invariant(&p, LocalInvariant::Zero, opts).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn diagonal_pencil_mixed_signature() {
        // members Σ tᵢxᵢ²; on t₀ = 0 the signature is that of (t₁..t₄)
        let p = Pencil::parse("x0^2\nx1^2\nx2^2\nx3^2\nx4^2").unwrap();
        let y = find_real_point_with_invariant(&p, LocalInvariant::Zero, RealSearch::default()).unwrap();
        let sig = y.signature.unwrap();
        assert_eq!((sig.positive, sig.negative, sig.zero), (2, 2, 1));
    }

    #[test]
    fn budget_exhaustion_is_not_a_verdict() {
        let p = thm();
        let opts = RealSearch {
            budget: 0,
            ..RealSearch::default()
        };
        assert!(matches!(
            find_real_point_with_invariant(&p, LocalInvariant::Zero, opts),
            Err(Error::NotFound(_))
        ));
    }

    #[test]
    fn cross_check_on_rational_points() {
        // Q₀ a random form in x0..x3 puts e₀ on H with all leading minors
        // available; the other generators are random
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let places = [Place::Real, Place::Finite(2), Place::Finite(3), Place::Finite(5), Place::Finite(7)];
        let mut compared = 0;
        let mut pencils = 0;
        while compared < 200 {
            let q0: [i64; 15] = std::array::from_fn(|k| {
                let (i, j) = crate::quadform::PAIRS[k];
                if i < 4 && j < 4 { rng.gen_range(-5..=5) } else { 0 }
            });
            let mut qs = vec![crate::quadform::QuadricForm::from_i64(q0)];
            for _ in 0..4 {
                qs.push(crate::quadform::QuadricForm::from_i64(std::array::from_fn(|_| rng.gen_range(-3..=3))));
            }
            let Ok(p) = Pencil::new(qs) else { continue };
            let g = p.member(&[int(1), int(0), int(0), int(0), int(0)]).gram().to_rat();
            if (1..=4).any(|k| {
                let idx: Vec<usize> = (0..k).collect();
                g.submatrix(&idx, &idx).det().is_zero()
            }) {
                continue;
            }
            pencils += 1;
            for v in places {
                let ys = lift_to_y(&p, &unit(0), v).unwrap();
                let Some(y) = ys.first() else { continue };
                let r = evaluate_with_cross_check(&p, y).unwrap();
                assert!(r.conic_check.is_some());
                assert!(r.consistent(), "{p:?} at {v}: {r:?}");
                compared += 1;
            }
        }
        assert!(pencils <= 200);
    }

    #[test]
    fn wa_certificate_finite() {
        let q3 = examples::pencil(&examples::THREE_ADIC);
        let c = certify_wa_failure(&q3, Strategy::Finite(3), WAOptions::default()).unwrap();
        assert_eq!(c.place, Place::Finite(3));
        assert_ne!(c.points[0].invariant, c.points[1].invariant);
        assert!(c.validate(&q3).unwrap());
        // tampering is detected
        let mut bad = c.clone();
        bad.points[1] = bad.points[0].clone();
        assert!(!bad.validate(&q3).unwrap());
        // at 5 both distinguished members have smooth points
        assert!(matches!(
            certify_wa_failure(&q3, Strategy::Finite(5), WAOptions::default()),
            Err(Error::NotFound(_))
        ));
    }

    #[test]
    fn wa_certificate_real() {
        let p = thm();
        let c = certify_wa_failure(&p, Strategy::Real, WAOptions::default()).unwrap();
        assert_eq!(c.place, Place::Real);
        assert_eq!(c.points[0].invariant, LocalInvariant::Zero);
        assert_eq!(c.points[1].invariant, LocalInvariant::Half);
        assert_eq!(c.witnesses[0].point, unit(0));
        assert!(c.validate(&p).unwrap());
    }

    #[test]
    fn wa_certificate_sum_of_squares() {
        let p = examples::pencil(&examples::SUM_OF_SQUARES);
        let c = certify_wa_failure(&p, Strategy::Real, WAOptions::default()).unwrap();
        assert!(c.validate(&p).unwrap());
        // x0² + x1² + x2² + x3² is positive semidefinite of rank 4
        let y = lift_to_y(&p, &unit(0), Place::Real).unwrap().remove(0);
        assert_eq!(evaluate_invariant(&p, &y).unwrap(), LocalInvariant::Half);
    }
}
