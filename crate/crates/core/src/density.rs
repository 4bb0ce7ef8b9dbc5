//! The local sieve: counts of quadrics without smooth points, the factors
//! `b(p)`, the certified Euler product bound, membership in `S_p`, Monte Carlo
//! sampling of integral frames, and exhaustive censuses over 𝔽_2 and 𝔽_3.

use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::exact::fp::fp_rank;
use crate::exact::gf::Gf;
use crate::exact::roots::{root_bound, Sturm, UniPoly};
use crate::exact::{is_prime, primes_below, rat_to_f64, Int, Rat, RatMatrix};
use crate::pencil::Pencil;
use crate::quadform::{smooth_point_mod_p, GfQuadric, NVARS, PAIRS};
use crate::{Error, Result};

/// `#Gr(k, n)(𝔽_p)`: k-planes in Pⁿ, the Gaussian binomial `[n+1, k+1]_p`.
pub fn gaussian_count(k: u32, n: u32, p: u64) -> Result<Int> {
    if k > n {
        return Err(Error::OutOfRange(format!("Gr({k}, {n})")));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let q = Int::from(p);
    let (top, sub) = (n + 1, k + 1);
    let mut num = Int::one();
    let mut den = Int::one();
    for i in 0..sub {
        num *= num_traits::pow(q.clone(), (top - i) as usize) - 1;
        den *= num_traits::pow(q.clone(), (i + 1) as usize) - 1;
    }
    Ok(num / den)
}

/// `#B_p = #Gr(3,4) + #Gr(2,4)·(p² − p)/2`.
pub fn bp_formula(p: u64) -> Result<Int> {
    let pp = Int::from(p);
    Ok(gaussian_count(3, 4, p)? + gaussian_count(2, 4, p)? * (&pp * &pp - &pp) / 2)
}

fn closed_form(p: &Rat) -> Rat {
    let pw = |k: i32| num_traits::pow(p.clone(), k as usize);
    let two = Rat::from_integer(2.into());
    let num = pw(8) + pw(6) + &two * pw(4) + pw(3) + &two * pw(2) + p + &two;
    let den = &two * pw(10) + &two * pw(5) + &two;
    num / den
}

/// `b(p) = (p⁸ + p⁶ + 2p⁴ + p³ + 2p² + p + 2)/(2p¹⁰ + 2p⁵ + 2)`.
pub fn b_of_p(p: u64) -> Result<Rat> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    Ok(closed_form(&Rat::from_integer(p.into())))
}

/// `#Gr(3,13)·#B_p / #Gr(4,14)`.
pub fn b_of_p_counting(p: u64) -> Result<Rat> {
    Ok(Rat::new(
        gaussian_count(3, 13, p)? * bp_formula(p)?,
        gaussian_count(4, 14, p)?,
    ))
}

/// How the tail constant `sup_{p ≥ M} p²b(p) = M²b(M)` was justified.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityCertificate {
    /// `x²b(x)` has no critical point in `[from, ∞)` and decreases there
    pub from: String,
    pub derivative_numerator_degree: usize,
    pub sturm_roots_beyond: usize,
}

/// Numerator `g` of `d/dx (x² N/D)` divided by `x`: `(2N + xN')D − xND'`.
fn derivative_numerator() -> UniPoly {
    let n = UniPoly::from_ints(&[2, 1, 2, 1, 2, 0, 1, 0, 1]);
    let d = UniPoly::from_ints(&[2, 0, 0, 0, 0, 2, 0, 0, 0, 0, 2]);
    let mul = |a: &UniPoly, b: &UniPoly| -> UniPoly {
        let mut c = vec![Rat::zero(); a.coeffs().len() + b.coeffs().len() - 1];
        for (i, x) in a.coeffs().iter().enumerate() {
            for (j, y) in b.coeffs().iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        UniPoly::new(c)
    };
    let add = |a: &UniPoly, b: &UniPoly| -> UniPoly {
        let len = a.coeffs().len().max(b.coeffs().len());
        let get = |f: &UniPoly, i: usize| f.coeffs().get(i).cloned().unwrap_or_else(Rat::zero);
        UniPoly::new((0..len).map(|i| get(a, i) + get(b, i)).collect())
    };
    let x = UniPoly::from_ints(&[0, 1]);
    let two_n = n.scale(&Rat::from_integer(2.into()));
    let left = mul(&add(&two_n, &mul(&x, &n.derivative())), &d);
    let right = mul(&mul(&x, &n), &d.derivative());
    add(&left, &right.scale(&-Rat::one()))
}

/// Certify that `x²b(x)` is decreasing on `[from, ∞)`.
pub fn certify_monotone(from: u64) -> Result<MonotonicityCertificate> {
    let g = derivative_numerator();
    let a = Rat::from_integer(from.into());
    let sturm = Sturm::new(&g.squarefree())?;
    let b = root_bound(&g) + &a;
    let roots = sturm.count_in(&a, &b);
    if roots != 0 || g.sign_at(&a) >= 0 {
        return Err(Error::Degenerate(format!("x²b(x) is not decreasing from {from}")));
    }
    Ok(MonotonicityCertificate {
        from: from.to_string(),
        derivative_numerator_degree: g.degree().unwrap_or(0),
        sturm_roots_beyond: roots,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimeFactor {
    pub p: u64,
    pub b: String,
    pub b_approx: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityReport {
    pub cutoff: u64,
    /// `∏_{p < M} (1 − b(p))`
    pub partial_product: String,
    pub partial_product_approx: f64,
    /// `c = M²b(M) ≥ p²b(p)` for all primes `p ≥ M`
    pub tail_constant: String,
    /// `1 − c/(M − 1) ≤ 1 − Σ_{p ≥ M} b(p)`
    pub tail_bound: String,
    pub final_bound: String,
    pub final_bound_approx: f64,
    pub monotonicity: MonotonicityCertificate,
    pub factors: Vec<PrimeFactor>,
    #[serde(skip)]
    pub exact: (Rat, Rat),
}

impl DensityReport {
    pub fn partial(&self) -> &Rat {
        &self.exact.0
    }

    pub fn bound(&self) -> &Rat {
        &self.exact.1
    }
}

/// Lower bound for `∏_p (1 − b(p))`: the exact product over `p < M` times
/// `1 − Σ_{p ≥ M} c/p²`, with `Σ_{n ≥ M} 1/n² ≤ 1/(M − 1)`.
pub fn product_lower_bound(m: u64) -> Result<DensityReport> {
    if m < 100 {
        return Err(Error::OutOfRange(format!("cutoff {m} < 100")));
    }
    report(m)
}

fn report(m: u64) -> Result<DensityReport> {
    let primes = primes_below(m);
    let factors: Vec<(u64, Rat)> = primes.iter().map(|&p| Ok((p, b_of_p(p)?))).collect::<Result<_>>()?;
    let partial = factors
        .iter()
        .fold(Rat::one(), |acc, (_, b)| acc * (Rat::one() - b));
    let monotonicity = certify_monotone(m.max(3))?;
    let mr = Rat::from_integer(m.into());
    let c = &mr * &mr * closed_form(&mr);
    let tail = Rat::one() - &c / (&mr - Rat::one());
    let bound = &partial * &tail;
    Ok(DensityReport {
        cutoff: m,
        partial_product: partial.to_string(),
        partial_product_approx: rat_to_f64(&partial),
        tail_constant: c.to_string(),
        tail_bound: tail.to_string(),
        final_bound: bound.to_string(),
        final_bound_approx: rat_to_f64(&bound),
        monotonicity,
        factors: factors
            .iter()
            .map(|(p, b)| PrimeFactor {
                p: *p,
                b: b.to_string(),
                b_approx: rat_to_f64(b),
            })
            .collect(),
        exact: (partial, bound),
    })
}

/// `∏_{p ≤ m} (1 − b(p))` exactly.
pub fn partial_product_through(m: u64) -> Rat {
    primes_below(m + 1)
        .into_iter()
        .fold(Rat::one(), |acc, p| acc * (Rat::one() - b_of_p(p).expect("prime")))
}

/// Verdict of the `S_p` scan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SpVerdict {
    /// the member at `witness` has no smooth 𝔽_p-point
    Member { witness: Vec<u64> },
    NotMember,
    /// the generators are dependent mod p; such frames lie outside π⁻¹(S_p)
    DegenerateFrame,
}

impl SpVerdict {
    pub fn is_member(&self) -> bool {
        matches!(self, SpVerdict::Member { .. })
    }
}

/// Five quadrics given by coefficient rows in the `PAIRS` order.
pub type Frame = [[i64; 15]; NVARS];

pub fn frame_of(pencil: &Pencil) -> Vec<[Int; 15]> {
    pencil.quadrics().iter().map(|q| q.coeffs().clone()).collect()
}

fn reduce_rows(rows: &[[Int; 15]], p: u64) -> Vec<[u64; 15]> {
    rows.iter()
        .map(|r| std::array::from_fn(|k| crate::exact::int_mod(&r[k], p)))
        .collect()
}

fn reduce_frame(f: &Frame, p: u64) -> Vec<[u64; 15]> {
    f.iter()
        .map(|r| std::array::from_fn(|k| r[k].rem_euclid(p as i64) as u64))
        .collect()
}

fn combine(rows: &[[u64; 15]], t: &[u64], p: u64) -> [u64; 15] {
    std::array::from_fn(|k| rows.iter().zip(t).fold(0, |acc, (r, &ti)| (acc + r[k] * ti) % p))
}

fn gram_residues(c: &[u64; 15], p: u64) -> Vec<Vec<u64>> {
    let mut b = vec![vec![0u64; NVARS]; NVARS];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        if i == j {
            b[i][i] = 2 * c[k] % p;
        } else {
            b[i][j] = c[k];
            b[j][i] = c[k];
        }
    }
    b
}

fn independent(rows: &[[u64; 15]], p: u64) -> bool {
    let m: Vec<Vec<u64>> = rows.iter().map(|r| r.to_vec()).collect();
    fp_rank(&m, p).map(|r| r == NVARS).unwrap_or(false)
}

fn member_has_smooth_point(c: &[u64; 15], p: u64, gf: &Gf) -> bool {
    if p == 2 {
        let q = GfQuadric {
            c: c.map(|x| x as u32),
        };
        q.has_smooth_point(gf).expect("nonzero member")
    } else {
        smooth_point_mod_p(&gram_residues(c, p), p)
    }
}

/// Reference scan: classify every member over 𝔽_p.
pub fn sp_member_reference(rows: &[[u64; 15]], p: u64) -> Result<SpVerdict> {
    if !is_prime(p) || p >= 1 << 20 {
        return Err(Error::NotPrime(p));
    }
    if !independent(rows, p) {
        return Ok(SpVerdict::DegenerateFrame);
    }
    let gf = Gf::new(p as u32)?;
    for t in gf.projective_points(NVARS) {
        let t: Vec<u64> = t.into_iter().map(u64::from).collect();
        if !member_has_smooth_point(&combine(rows, &t, p), p, &gf) {
            return Ok(SpVerdict::Member { witness: t });
        }
    }
    Ok(SpVerdict::NotMember)
}

fn det3(m: &[[u64; 3]; 3], p: u64) -> u64 {
    let t1 = m[0][0] * ((m[1][1] * m[2][2] + p * p - m[1][2] * m[2][1]) % p) % p;
    let t2 = m[0][1] * ((m[1][0] * m[2][2] + p * p - m[1][2] * m[2][0]) % p) % p;
    let t3 = m[0][2] * ((m[1][0] * m[2][1] + p * p - m[1][1] * m[2][0]) % p) % p;
    (t1 + p - t2 + t3) % p
}

fn block(g: &[Vec<u64>], idx: [usize; 3]) -> [[u64; 3]; 3] {
    std::array::from_fn(|i| std::array::from_fn(|j| g[idx[i]][idx[j]]))
}

/// Coefficients of `det(A + sC)` for 3×3 `A`, `C` via mixed determinants.
fn det_pencil3(a: &[[u64; 3]; 3], c: &[[u64; 3]; 3], p: u64) -> [u64; 4] {
    let mut out = [det3(a, p), 0, 0, det3(c, p)];
    for j in 0..3 {
        let mut m = *a;
        for i in 0..3 {
            m[i][j] = c[i][j];
        }
        out[1] = (out[1] + det3(&m, p)) % p;
        let mut m = *c;
        for i in 0..3 {
            m[i][j] = a[i][j];
        }
        out[2] = (out[2] + det3(&m, p)) % p;
    }
    out
}

const FIRST_BLOCK: [usize; 3] = [0, 1, 2];
const SECOND_BLOCK: [usize; 3] = [2, 3, 4];

/// `S_p` membership for odd `p`. A member without a smooth 𝔽_p-point has
/// rank ≤ 2, so both principal 3-minors on `{0,1,2}` and `{2,3,4}` vanish
/// there; only those members are classified.
pub fn sp_member_fast(rows: &[[u64; 15]], p: u64) -> Result<SpVerdict> {
    if p == 2 {
        return sp_member_reference(rows, p);
    }
    if !is_prime(p) || p >= 1 << 20 {
        return Err(Error::NotPrime(p));
    }
    if !independent(rows, p) {
        return Ok(SpVerdict::DegenerateFrame);
    }
    let grams: Vec<Vec<Vec<u64>>> = rows.iter().map(|r| gram_residues(r, p)).collect();
    let gram_at = |t: &[u64]| -> Vec<Vec<u64>> {
        (0..NVARS)
            .map(|i| {
                (0..NVARS)
                    .map(|j| grams.iter().zip(t).fold(0, |acc, (g, &ti)| (acc + g[i][j] * ti) % p))
                    .collect()
            })
            .collect()
    };
    let firsts: Vec<[[u64; 3]; 3]> = grams.iter().map(|g| block(g, FIRST_BLOCK)).collect();
    let c_first = firsts[4];
    let check = |t: &[u64]| -> Option<SpVerdict> {
        let g = gram_at(t);
        if det3(&block(&g, SECOND_BLOCK), p) != 0 || smooth_point_mod_p(&g, p) {
            return None;
        }
        Some(SpVerdict::Member { witness: t.to_vec() })
    };
    for lead in 0..4usize {
        let free = 3 - lead;
        let lines = p.pow(free as u32);
        for idx in 0..lines {
            let mut t = [0u64; NVARS];
            t[lead] = 1;
            let mut r = idx;
            for slot in t.iter_mut().take(4).skip(lead + 1) {
                *slot = r % p;
                r /= p;
            }
            let a: [[u64; 3]; 3] = std::array::from_fn(|i| {
                std::array::from_fn(|j| (0..4).fold(0, |acc, k| (acc + firsts[k][i][j] * t[k]) % p))
            });
            let cubic = det_pencil3(&a, &c_first, p);
            for s in 0..p {
                let v = cubic.iter().rev().fold(0, |acc, &c| (acc * s + c) % p);
                if v == 0 {
                    t[4] = s;
                    if let Some(w) = check(&t) {
                        return Ok(w);
                    }
                }
            }
        }
    }
    let last = [0, 0, 0, 0, 1];
    Ok(check(&last).unwrap_or(SpVerdict::NotMember))
}

pub fn sp_member(pencil: &Pencil, p: u64) -> Result<SpVerdict> {
    sp_member_fast(&reduce_rows(&frame_of(pencil), p), p)
}

/// One sampled point of `Fr(4, 14)(ℤ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrameSample {
    pub index: u64,
    pub height: i64,
    pub frame: Vec<Vec<i64>>,
    pub full_rank: bool,
    /// `(p, in π⁻¹(S_p))` for the primes checked, stopping at the first hit
    pub verdicts: Vec<(u64, bool)>,
}

impl FrameSample {
    pub fn passes(&self) -> bool {
        self.verdicts.iter().all(|&(_, hit)| !hit)
    }
}

pub fn sample_frame(seed: u64, index: u64, height: i64) -> Frame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(-height..=height)))
}

fn full_rank_over_q(f: &Frame) -> bool {
    let m = RatMatrix::from_rows(
        f.iter()
            .map(|r| r.iter().map(|&x| Rat::from_integer(x.into())).collect())
            .collect(),
    );
    m.rank() == NVARS
}

/// Evaluate a frame at every prime `≤ m`.
pub fn classify_frame(f: &Frame, m: u64) -> Result<Vec<(u64, bool)>> {
    let mut out = Vec::new();
    for p in primes_below(m + 1) {
        let hit = sp_member_fast(&reduce_frame(f, p), p)?.is_member();
        out.push((p, hit));
        if hit {
            break;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub height: i64,
    pub cutoff: u64,
    pub samples: u64,
    pub seed: u64,
    pub passes: u64,
    pub rank_deficient_over_q: u64,
    /// first prime at which a sample fell into π⁻¹(S_p), with counts
    pub failures_by_prime: Vec<(u64, u64)>,
    pub estimate: Option<f64>,
    /// 95% normal-approximation radius
    pub radius95: Option<f64>,
    /// `∏_{p ≤ M} (1 − b(p))`
    pub product: String,
    pub product_approx: f64,
    /// binomial standard deviation at the product
    pub sigma: Option<f64>,
    /// the estimate is not more than 3σ below the product
    pub within_band: Option<bool>,
}

/// Uniform frames with entries in `[−N, N]`; a sample passes when no prime
/// `p ≤ M` puts its reduction in `π⁻¹(S_p)`.
pub fn monte_carlo_density(height: i64, m: u64, samples: u64, seed: u64) -> Result<MonteCarloReport> {
    if height < 2 {
        return Err(Error::OutOfRange(format!("height {height} < 2")));
    }
    let results: Vec<(bool, Option<u64>)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let f = sample_frame(seed, i, height);
            let v = classify_frame(&f, m)?;
            let failed = v.iter().find(|&&(_, hit)| hit).map(|&(p, _)| p);
            Ok((full_rank_over_q(&f), failed))
        })
        .collect::<Result<_>>()?;
    let passes = results.iter().filter(|(_, f)| f.is_none()).count() as u64;
    let mut failures: Vec<(u64, u64)> = primes_below(m + 1).into_iter().map(|p| (p, 0)).collect();
    for (_, f) in &results {
        if let Some(p) = f {
            failures.iter_mut().find(|(q, _)| q == p).unwrap().1 += 1;
        }
    }
    let product = partial_product_through(m);
    let pr = rat_to_f64(&product);
    let n = samples as f64;
    let (estimate, radius, sigma, within) = if samples == 0 {
        (None, None, None, None)
    } else {
        let est = passes as f64 / n;
        let sigma = (pr * (1.0 - pr) / n).sqrt();
        (
            Some(est),
            Some(1.96 * (est * (1.0 - est) / n).sqrt()),
            Some(sigma),
            Some(est >= pr - 3.0 * sigma),
        )
    };
    Ok(MonteCarloReport {
        height,
        cutoff: m,
        samples,
        seed,
        passes,
        rank_deficient_over_q: results.iter().filter(|(r, _)| !r).count() as u64,
        failures_by_prime: failures,
        estimate,
        radius95: radius,
        product: product.to_string(),
        product_approx: pr,
        sigma,
        within_band: within,
    })
}

pub fn sample_report(seed: u64, index: u64, height: i64, m: u64) -> Result<FrameSample> {
    let f = sample_frame(seed, index, height);
    Ok(FrameSample {
        index,
        height,
        frame: f.iter().map(|r| r.to_vec()).collect(),
        full_rank: full_rank_over_q(&f),
        verdicts: classify_frame(&f, m)?,
    })
}

/// Points of P⁴(𝔽_p) with the 15 monomial values at each.
fn monomial_table(p: u64) -> Vec<([u8; 5], [u8; 15])> {
    let gf = Gf::new(p as u32).expect("prime");
    gf.projective_points(NVARS)
        .into_iter()
        .map(|x| {
            let x: [u8; 5] = std::array::from_fn(|i| x[i] as u8);
            let m = std::array::from_fn(|k| {
                let (i, j) = PAIRS[k];
                ((x[i] as u64 * x[j] as u64) % p) as u8
            });
            (x, m)
        })
        .collect()
}

fn smooth_by_enumeration(c: &[u8; 15], p: u64, table: &[([u8; 5], [u8; 15])]) -> bool {
    table.iter().any(|(x, m)| {
        let v: u64 = c.iter().zip(m).map(|(&a, &b)| a as u64 * b as u64).sum();
        if v % p != 0 {
            return false;
        }
        // ∂Q/∂x_i = 2c_ii x_i + Σ_{j≠i} c_ij x_j
        (0..NVARS).any(|i| {
            let d: u64 = PAIRS
                .iter()
                .zip(c)
                .map(|(&(a, b), &ck)| {
                    let ck = ck as u64;
                    if a == i && b == i {
                        2 * ck * x[i] as u64
                    } else if a == i {
                        ck * x[b] as u64
                    } else if b == i {
                        ck * x[a] as u64
                    } else {
                        0
                    }
                })
                .sum();
            d % p != 0
        })
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    pub p: u64,
    pub quadrics: u64,
    pub without_smooth_point: u64,
    pub formula: String,
    pub double_planes: String,
    pub agrees: bool,
}

/// Count quadrics in P¹⁴(𝔽_p) with no smooth 𝔽_p-point by checking every
/// point of P⁴(𝔽_p) and the Jacobian there.
pub fn census_bp(p: u64) -> Result<CensusReport> {
    if p != 2 && p != 3 {
        return Err(Error::OutOfRange(format!("census is exhaustive only for p ∈ {{2, 3}}, got {p}")));
    }
    let table = monomial_table(p);
    let total = (p.pow(15) - 1) / (p - 1);
    // index → normalised coefficient vector: the first nonzero entry is 1
    let decode = |mut idx: u64| -> [u8; 15] {
        let mut c = [0u8; 15];
        let mut lead = 0;
        loop {
            let tail = p.pow(14 - lead as u32);
            if idx < tail {
                break;
            }
            idx -= tail;
            lead += 1;
        }
        c[lead] = 1;
        for slot in c.iter_mut().skip(lead + 1) {
            *slot = (idx % p) as u8;
            idx /= p;
        }
        c
    };
    let count = (0..total)
        .into_par_iter()
        .filter(|&i| !smooth_by_enumeration(&decode(i), p, &table))
        .count() as u64;
    let formula = bp_formula(p)?;
    Ok(CensusReport {
        p,
        quadrics: total,
        without_smooth_point: count,
        agrees: Int::from(count) == formula,
        formula: formula.to_string(),
        double_planes: gaussian_count(3, 4, p)?.to_string(),
    })
}

/// `p²b(p)` for `3 ≤ p < bound`: strictly decreasing and above ½.
pub fn check_tail_monotone_on_primes(bound: u64) -> bool {
    let mut prev: Option<Rat> = None;
    let half = Rat::new(1.into(), 2.into());
    for p in primes_below(bound).into_iter().filter(|&p| p >= 3) {
        let pr = Rat::from_integer(p.into());
        let v = &pr * &pr * closed_form(&pr);
        if v <= half || prev.as_ref().is_some_and(|q| &v >= q) {
            return false;
        }
        prev = Some(v);
    }
    true
}

/// `p²b(p)` as a float, for reports.
pub fn tail_value(p: u64) -> f64 {
    let pr = Rat::from_integer(p.into());
    (&pr * &pr * closed_form(&pr)).to_f64().unwrap_or(f64::NAN)
}
