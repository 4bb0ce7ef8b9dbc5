//! Emptiness of projective zero loci by Macaulay span tests.
//!
//! `V(I) ⊂ Pⁿ⁻¹` is empty over an algebraically closed field exactly when the
//! degree-`d` piece of `I` is the whole space of degree-`d` forms for some `d`.
//! Over 𝔽_p that is a rank computation; over ℤ the elementary divisors of the
//! lattice spanned by the Macaulay rows give the verdict at every prime at
//! once.

use std::collections::HashMap;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::exact::fp::{fp_nullspace, SpanTracker};
use crate::exact::poly::monomials_of_degree;
use crate::exact::smith::{lattice_index, LatticeIndex};
use crate::exact::{int_mod, is_prime, Int, MultiPoly};
use crate::localfields::prime_divisors;
use crate::{Error, Result};

pub const DEFAULT_DMAX: u32 = 12;
pub const DEFAULT_BIDEGREE_MAX: u32 = 4;

/// Homogeneous generators, optionally multihomogeneous for a partition of
/// the variables into consecutive groups.
#[derive(Debug, Clone)]
pub struct HomIdeal {
    nvars: usize,
    gens: Vec<MultiPoly>,
    /// sizes of the variable groups
    groups: Option<Vec<usize>>,
}

/// Degree of `f` in each consecutive variable group, if multihomogeneous.
pub fn multidegree(f: &MultiPoly, groups: &[usize]) -> Option<Vec<u32>> {
    let mut out: Option<Vec<u32>> = None;
    for (e, _) in f.terms() {
        let mut d = Vec::with_capacity(groups.len());
        let mut start = 0;
        for &g in groups {
            d.push(e[start..start + g].iter().sum());
            start += g;
        }
        match &out {
            None => out = Some(d),
            Some(prev) if *prev != d => return None,
            _ => {}
        }
    }
    out
}

impl HomIdeal {
    pub fn new(nvars: usize, gens: Vec<MultiPoly>) -> Result<Self> {
        let gens: Vec<MultiPoly> = gens.into_iter().filter(|g| !g.is_zero()).collect();
        for g in &gens {
            if g.nvars() != nvars {
                return Err(Error::Dimension(format!(
                    "generator in {} variables, expected {nvars}",
                    g.nvars()
                )));
            }
            if !g.is_homogeneous() {
                return Err(Error::Parse("generators must be homogeneous".into()));
            }
        }
        Ok(HomIdeal {
            nvars,
            gens,
            groups: None,
        })
    }

    /// Variables `0..split` and `split..nvars` as the two groups.
    pub fn bigraded(nvars: usize, split: usize, gens: Vec<MultiPoly>) -> Result<Self> {
        if split == 0 || split >= nvars {
            return Err(Error::Dimension("split must separate two variable groups".into()));
        }
        HomIdeal::multigraded(vec![split, nvars - split], gens)
    }

    pub fn multigraded(groups: Vec<usize>, gens: Vec<MultiPoly>) -> Result<Self> {
        let nvars = groups.iter().sum();
        if groups.contains(&0) {
            return Err(Error::Dimension("empty variable group".into()));
        }
        let mut ideal = HomIdeal::new(nvars, gens)?;
        for g in &ideal.gens {
            if multidegree(g, &groups).is_none() {
                return Err(Error::Parse("generators must be multihomogeneous".into()));
            }
        }
        ideal.groups = Some(groups);
        Ok(ideal)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn gens(&self) -> &[MultiPoly] {
        &self.gens
    }

    pub fn groups(&self) -> Option<&[usize]> {
        self.groups.as_deref()
    }

    fn min_degree(&self) -> u32 {
        self.gens.iter().filter_map(|g| g.degree()).min().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scope {
    Prime { p: u64 },
    /// every prime except those listed (after optional 2-stripping)
    AllPrimes { exceptional: Vec<u64> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmptinessCertificate {
    /// degree, or bidegree for bigraded ideals
    pub degree: Vec<u32>,
    pub scope: Scope,
    pub rows: usize,
    pub columns: usize,
    /// lattice index as a decimal string (ℤ certificates only)
    pub lattice_index: Option<String>,
    /// elementary divisors ≠ 1 as `(value, multiplicity)`
    pub nontrivial_divisors: Vec<(String, usize)>,
    pub saturated_at_2: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeAttempt {
    pub degree: Vec<u32>,
    pub rank: usize,
    pub columns: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Emptiness {
    Empty(EmptinessCertificate),
    Inconclusive { attempts: Vec<DegreeAttempt> },
}

impl Emptiness {
    pub fn is_empty(&self) -> bool {
        matches!(self, Emptiness::Empty(_))
    }

    pub fn certificate(&self) -> Option<&EmptinessCertificate> {
        match self {
            Emptiness::Empty(c) => Some(c),
            Emptiness::Inconclusive { .. } => None,
        }
    }
}

type SparseRow = Vec<(usize, Int)>;

struct MacaulayBlock {
    rows: Vec<SparseRow>,
    columns: usize,
}

fn index_of(monos: &[Vec<u32>]) -> HashMap<&[u32], usize> {
    monos.iter().enumerate().map(|(i, m)| (m.as_slice(), i)).collect()
}

fn multiply_row(g: &MultiPoly, m: &[u32], cols: &HashMap<&[u32], usize>) -> SparseRow {
    let mut e = vec![0u32; m.len()];
    let mut row: SparseRow = g
        .terms()
        .map(|(ge, c)| {
            for (k, slot) in e.iter_mut().enumerate() {
                *slot = ge[k] + m[k];
            }
            (cols[e.as_slice()], c.clone())
        })
        .collect();
    row.sort_by_key(|&(c, _)| c);
    row
}

/// All rows `m·g` of degree `d`.
fn macaulay_rows(ideal: &HomIdeal, d: u32) -> MacaulayBlock {
    let n = ideal.nvars;
    let monos = monomials_of_degree(n, d);
    let cols = index_of(&monos);
    let rows: Vec<SparseRow> = ideal
        .gens
        .par_iter()
        .flat_map_iter(|g| {
            let e = g.degree().unwrap();
            let mults = if e <= d {
                monomials_of_degree(n, d - e)
            } else {
                Vec::new()
            };
            mults
                .into_iter()
                .map(|m| multiply_row(g, &m, &cols))
                .collect::<Vec<_>>()
        })
        .collect();
    MacaulayBlock {
        rows,
        columns: monos.len(),
    }
}

/// Monomials of multidegree `degs`, one factor per variable group.
fn multimonomials(groups: &[usize], degs: &[u32]) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = vec![Vec::new()];
    for (&g, &d) in groups.iter().zip(degs) {
        let part = monomials_of_degree(g, d);
        out = out
            .iter()
            .flat_map(|pre| {
                part.iter().map(move |m| {
                    let mut v = pre.clone();
                    v.extend_from_slice(m);
                    v
                })
            })
            .collect();
    }
    out
}

fn macaulay_rows_multigraded(ideal: &HomIdeal, degs: &[u32]) -> MacaulayBlock {
    let groups = ideal.groups.as_deref().expect("multigraded ideal");
    let monos = multimonomials(groups, degs);
    let cols = index_of(&monos);
    let rows: Vec<SparseRow> = ideal
        .gens
        .par_iter()
        .flat_map_iter(|g| {
            let gd = multidegree(g, groups).unwrap();
            let mults = if gd.iter().zip(degs).all(|(a, d)| a <= d) {
                let rest: Vec<u32> = degs.iter().zip(&gd).map(|(d, a)| d - a).collect();
                multimonomials(groups, &rest)
            } else {
                Vec::new()
            };
            mults
                .into_iter()
                .map(|m| multiply_row(g, &m, &cols))
                .collect::<Vec<_>>()
        })
        .collect();
    MacaulayBlock {
        rows,
        columns: monos.len(),
    }
}

/// Rank of the block over 𝔽_p, stopping early once the span is full.
fn rank_mod_p(block: &MacaulayBlock, p: u64) -> usize {
    let mut t = SpanTracker::new(block.columns, p);
    let mut buf = Vec::new();
    for r in &block.rows {
        buf.clear();
        buf.extend(
            r.iter()
                .map(|(c, v)| (*c, int_mod(v, p)))
                .filter(|&(_, v)| v != 0),
        );
        if buf.is_empty() {
            continue;
        }
        t.add_sparse(&buf);
        if t.is_full() {
            break;
        }
    }
    t.rank()
}

fn check_prime(p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p >= 1 << 31 {
        return Err(Error::OutOfRange(format!("prime {p} too large for the span tracker")));
    }
    Ok(())
}

/// Does the degree-`d` piece of `I ⊗ 𝔽_p` fill all degree-`d` forms?
pub fn span_full_mod_p(ideal: &HomIdeal, d: u32, p: u64) -> Result<DegreeAttempt> {
    check_prime(p)?;
    let block = macaulay_rows(ideal, d);
    Ok(DegreeAttempt {
        degree: vec![d],
        rank: rank_mod_p(&block, p),
        columns: block.columns,
    })
}

/// Certify `V(I)(𝔽̄_p) = ∅` by finding a degree `d ≤ d_max` at which the
/// Macaulay matrix has full column rank mod `p`.
pub fn empty_over_fpbar(ideal: &HomIdeal, p: u64, d_max: u32) -> Result<Emptiness> {
    check_prime(p)?;
    let mut attempts = Vec::new();
    if ideal.gens.is_empty() {
        return Ok(Emptiness::Inconclusive { attempts });
    }
    for d in ideal.min_degree().max(1)..=d_max {
        let block = macaulay_rows(ideal, d);
        let rank = rank_mod_p(&block, p);
        if rank == block.columns {
            return Ok(Emptiness::Empty(EmptinessCertificate {
                degree: vec![d],
                scope: Scope::Prime { p },
                rows: block.rows.len(),
                columns: block.columns,
                lattice_index: None,
                nontrivial_divisors: Vec::new(),
                saturated_at_2: false,
            }));
        }
        attempts.push(DegreeAttempt {
            degree: vec![d],
            rank,
            columns: block.columns,
        });
    }
    Ok(Emptiness::Inconclusive { attempts })
}

/// Rank of the Macaulay matrix in one multidegree.
pub fn span_full_multidegree(ideal: &HomIdeal, degs: &[u32], p: u64) -> Result<DegreeAttempt> {
    check_prime(p)?;
    let groups = ideal
        .groups
        .as_deref()
        .ok_or_else(|| Error::Dimension("ideal has no multigrading".into()))?;
    if groups.len() != degs.len() {
        return Err(Error::Dimension("one degree per variable group".into()));
    }
    let block = macaulay_rows_multigraded(ideal, degs);
    Ok(DegreeAttempt {
        degree: degs.to_vec(),
        rank: rank_mod_p(&block, p),
        columns: block.columns,
    })
}

/// Try the given multidegrees in order; full span at any of them certifies
/// emptiness in the product of projective spaces over 𝔽̄_p.
pub fn empty_multihomogeneous(
    ideal: &HomIdeal,
    p: u64,
    candidates: &[Vec<u32>],
) -> Result<Emptiness> {
    check_prime(p)?;
    let mut attempts = Vec::new();
    for degs in candidates {
        let block = {
            let groups = ideal
                .groups
                .as_deref()
                .ok_or_else(|| Error::Dimension("ideal has no multigrading".into()))?;
            if groups.len() != degs.len() {
                return Err(Error::Dimension("one degree per variable group".into()));
            }
            macaulay_rows_multigraded(ideal, degs)
        };
        let rank = if block.rows.is_empty() {
            0
        } else {
            rank_mod_p(&block, p)
        };
        if rank == block.columns {
            return Ok(Emptiness::Empty(EmptinessCertificate {
                degree: degs.clone(),
                scope: Scope::Prime { p },
                rows: block.rows.len(),
                columns: block.columns,
                lattice_index: None,
                nontrivial_divisors: Vec::new(),
                saturated_at_2: false,
            }));
        }
        attempts.push(DegreeAttempt {
            degree: degs.clone(),
            rank,
            columns: block.columns,
        });
    }
    Ok(Emptiness::Inconclusive { attempts })
}

/// Bigraded test at `(d, d)` for `d = 1..=d_max`.
pub fn empty_bihomogeneous(ideal: &HomIdeal, p: u64, d_max: u32) -> Result<Emptiness> {
    if ideal.groups().map(|g| g.len()) != Some(2) {
        return Err(Error::Dimension("ideal is not bigraded".into()));
    }
    let candidates: Vec<Vec<u32>> = (1..=d_max).map(|d| vec![d, d]).collect();
    empty_multihomogeneous(ideal, p, &candidates)
}

/// Lattice data of the degree-`d` Macaulay rows over ℤ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeLattice {
    pub degree: u32,
    pub rows: usize,
    pub columns: usize,
    pub index: LatticeIndex,
}

impl DegreeLattice {
    /// Elementary divisors with the 2-part removed when `saturate_at_2`.
    pub fn stripped_divisors(&self, saturate_at_2: bool) -> Option<Vec<Int>> {
        let LatticeIndex::Full { divisors, .. } = &self.index else {
            return None;
        };
        Some(
            divisors
                .iter()
                .map(|d| {
                    let mut d = d.clone();
                    if saturate_at_2 {
                        let two = Int::from(2);
                        while !d.is_zero() && (&d % &two).is_zero() {
                            d /= &two;
                        }
                    }
                    d
                })
                .collect(),
        )
    }

    /// Verdict at a single prime: full rank after reduction mod `p`.
    pub fn empty_at(&self, p: u64, saturate_at_2: bool) -> bool {
        if saturate_at_2 && p == 2 {
            return self.stripped_divisors(true).is_some();
        }
        match self.stripped_divisors(saturate_at_2) {
            Some(ds) => ds.iter().all(|d| int_mod(d, p) != 0),
            None => false,
        }
    }
}

pub fn lattice_at_degree(ideal: &HomIdeal, d: u32) -> DegreeLattice {
    let block = macaulay_rows(ideal, d);
    let index = lattice_index(&block.rows, block.columns);
    DegreeLattice {
        degree: d,
        rows: block.rows.len(),
        columns: block.columns,
        index,
    }
}

fn divisor_summary(ds: &[Int]) -> Vec<(String, usize)> {
    let mut out: Vec<(String, usize)> = Vec::new();
    for d in ds.iter().filter(|d| !d.is_one()) {
        let s = d.to_string();
        match out.iter_mut().find(|(v, _)| *v == s) {
            Some(e) => e.1 += 1,
            None => out.push((s, 1)),
        }
    }
    out
}

/// Emptiness over every geometric fibre of `Spec ℤ` at once.
///
/// With `saturate_at_2` the 2-primary part of the elementary divisors is
/// discarded, which computes the closure of the ℤ[1/2]-scheme; the fibre at 2
/// is then the one of that closure. For a restriction of a universal ideal
/// saturate before restricting instead.
pub fn empty_all_primes(ideal: &HomIdeal, saturate_at_2: bool, d_max: u32) -> Result<Emptiness> {
    let mut attempts = Vec::new();
    if ideal.gens.is_empty() {
        return Ok(Emptiness::Inconclusive { attempts });
    }
    for d in ideal.min_degree().max(1)..=d_max {
        let lat = lattice_at_degree(ideal, d);
        let rank = match &lat.index {
            LatticeIndex::Deficient { rank_lower_bound } => *rank_lower_bound,
            LatticeIndex::Full { .. } => lat.columns,
        };
        if let (Some(ds), LatticeIndex::Full { divisors, index }) =
            (lat.stripped_divisors(saturate_at_2), &lat.index)
        {
            let residual: Int = ds.iter().product();
            if residual.is_one() {
                let exceptional = if saturate_at_2 {
                    Vec::new()
                } else {
                    prime_divisors(index)
                };
                return Ok(Emptiness::Empty(EmptinessCertificate {
                    degree: vec![d],
                    scope: Scope::AllPrimes { exceptional },
                    rows: lat.rows,
                    columns: lat.columns,
                    lattice_index: Some(index.to_string()),
                    nontrivial_divisors: divisor_summary(divisors),
                    saturated_at_2: saturate_at_2,
                }));
            }
        }
        attempts.push(DegreeAttempt {
            degree: vec![d],
            rank,
            columns: lat.columns,
        });
    }
    Ok(Emptiness::Inconclusive { attempts })
}

/// A basis of the ℤ-span of `rows` in row echelon form.
fn integer_echelon(mut rows: Vec<Vec<Int>>) -> Vec<Vec<Int>> {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut r = 0;
    for j in 0..ncols {
        loop {
            let live: Vec<usize> = (r..rows.len()).filter(|&i| !rows[i][j].is_zero()).collect();
            let Some(&piv) = live.iter().min_by_key(|&&i| rows[i][j].magnitude().clone()) else { break };
            if live.len() == 1 {
                rows.swap(r, piv);
                r += 1;
                break;
            }
            for &i in &live {
                if i != piv {
                    let q = &rows[i][j] / &rows[piv][j];
                    let src = rows[piv].clone();
                    for (a, b) in rows[i].iter_mut().zip(&src) {
                        *a -= &q * b;
                    }
                }
            }
        }
    }
    rows.truncate(r);
    rows
}

/// Saturation at 2 of the ℤ-span of homogeneous polynomials: all `g` with
/// `2ᵏg` in the span. Rows are repeatedly replaced by `(Σ rows)/2` along a
/// relation mod 2 until the rows are independent mod 2.
pub fn saturate_span_at_2(gens: &[MultiPoly]) -> Vec<MultiPoly> {
    let Some(first) = gens.first() else { return Vec::new() };
    let (ring, n) = (first.ring(), first.nvars());
    let mut monos: Vec<Vec<u32>> = gens.iter().flat_map(|g| g.terms().map(|(e, _)| e.clone())).collect();
    monos.sort();
    monos.dedup();
    let col = |e: &Vec<u32>| monos.binary_search(e).unwrap();
    let rows: Vec<Vec<Int>> = gens
        .iter()
        .map(|g| {
            let mut r = vec![Int::zero(); monos.len()];
            for (e, c) in g.terms() {
                r[col(e)] = c.clone();
            }
            r
        })
        .collect();
    let mut rows = integer_echelon(rows);
    loop {
        // columns of the transpose are the rows: kernel vectors are relations mod 2
        let transpose: Vec<Vec<u64>> = (0..monos.len())
            .map(|j| rows.iter().map(|r| int_mod(&r[j], 2)).collect())
            .collect();
        let Some(rel) = fp_nullspace(&transpose, rows.len(), 2).into_iter().next() else { break };
        let support: Vec<usize> = (0..rows.len()).filter(|&i| rel[i] == 1).collect();
        let last = *support.last().expect("nonzero relation");
        let half: Vec<Int> = (0..monos.len())
            .map(|j| support.iter().map(|&i| &rows[i][j]).sum::<Int>() / 2)
            .collect();
        rows[last] = half;
    }
    rows.into_iter()
        .map(|r| {
            let mut f = MultiPoly::zero(ring, n);
            for (e, c) in monos.iter().zip(r) {
                if !c.is_zero() {
                    f.add_term(e.clone(), c);
                }
            }
            f
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, Ring};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn poly(s: &str, n: usize) -> MultiPoly {
        MultiPoly::parse(s, "t", n).unwrap()
    }

    fn ideal(gens: &[&str], n: usize) -> HomIdeal {
        HomIdeal::new(n, gens.iter().map(|g| poly(g, n)).collect()).unwrap()
    }

    #[test]
    fn saturation_at_two() {
        let sat = |gens: &[&str]| {
            let g: Vec<MultiPoly> = gens.iter().map(|g| poly(g, 2)).collect();
            let s = saturate_span_at_2(&g);
            let i = HomIdeal::new(2, s.clone()).unwrap();
            (s.len(), empty_all_primes(&i, false, 1).unwrap())
        };
        let (n, e) = sat(&["t0 + t1", "t0 - t1"]);
        assert_eq!(n, 2);
        assert_eq!(e.certificate().unwrap().lattice_index.as_deref(), Some("1"));
        let (n, e) = sat(&["2*t0", "6*t1", "4*t0 + 2*t1"]);
        assert_eq!(n, 2);
        assert!(e.is_empty());
        // odd torsion survives
        let (_, e) = sat(&["t0", "3*t1"]);
        if let Some(c) = e.certificate() {
            assert_eq!(c.scope, Scope::AllPrimes { exceptional: vec![3] });
        }
        assert!(saturate_span_at_2(&[]).is_empty());
    }

    #[test]
    fn irrelevant_ideal_at_degree_one() {
        let i = ideal(&["t0", "t1", "t2", "t3", "t4"], 5);
        for p in [2, 3, 101] {
            let c = empty_over_fpbar(&i, p, 3).unwrap();
            assert_eq!(c.certificate().unwrap().degree, vec![1]);
        }
        let c = empty_all_primes(&i, false, 3).unwrap();
        let cert = c.certificate().unwrap();
        assert_eq!(cert.scope, Scope::AllPrimes { exceptional: vec![] });
    }

    #[test]
    fn nonempty_loci_stay_inconclusive() {
        let i = ideal(&["t0*t1"], 5);
        assert!(!empty_over_fpbar(&i, 5, 6).unwrap().is_empty());
        let i = ideal(&["2*t0"], 5);
        assert!(!empty_all_primes(&i, true, 4).unwrap().is_empty());
        assert!(HomIdeal::new(2, vec![poly("t0^2 + t1", 2)]).is_err());
    }

    #[test]
    fn regular_sequence_degree() {
        // t_i^2 is empty from degree Σ(dᵢ − 1) + 1 = 4 in 3 variables
        let i = ideal(&["t0^2", "t1^2", "t2^2"], 3);
        let c = empty_over_fpbar(&i, 7, 8).unwrap();
        assert_eq!(c.certificate().unwrap().degree, vec![4]);
    }

    #[test]
    fn torsion_shows_up_at_the_right_primes() {
        // 3·t0, t1 over ℤ: empty except at 3
        let i = ideal(&["3*t0", "t1"], 2);
        let c = empty_all_primes(&i, false, 3).unwrap();
        assert!(!c.is_empty());
        let lat = lattice_at_degree(&i, 1);
        assert!(lat.empty_at(2, false) && lat.empty_at(5, false) && !lat.empty_at(3, false));
        // 2-torsion is removed by saturation
        let i = ideal(&["2*t0", "t1"], 2);
        let c = empty_all_primes(&i, true, 3).unwrap();
        assert_eq!(
            c.certificate().unwrap().nontrivial_divisors,
            vec![("2".to_string(), 1)]
        );
        assert!(!empty_all_primes(&i, false, 3).unwrap().is_empty());
    }

    #[test]
    fn bigraded_examples() {
        let n = 10;
        let xs: Vec<MultiPoly> = (0..5).map(|i| MultiPoly::var(Ring::Integers, n, i)).collect();
        let i = HomIdeal::bigraded(n, 5, xs).unwrap();
        assert!(empty_bihomogeneous(&i, 5, 2).unwrap().is_empty());
        // one bilinear form: a nonempty hypersurface
        let b = poly("t0*t5 + t1*t6 + t2*t7 + t3*t8 + t4*t9", n);
        let i = HomIdeal::bigraded(n, 5, vec![b]).unwrap();
        assert!(!empty_bihomogeneous(&i, 5, 2).unwrap().is_empty());
        assert!(HomIdeal::bigraded(n, 5, vec![poly("t0*t1 + t5*t6", n)]).is_err());
    }

    #[test]
    fn trigraded_examples() {
        // P¹ × P¹ × P¹ with x = t0,t1; y = t2,t3; z = t4,t5
        let base = ["t0*t2", "t1*t3", "t0*t3 + t1*t2"];
        let gens = |k: usize| -> Vec<MultiPoly> {
            base[..k]
                .iter()
                .flat_map(|g| {
                    let g = poly(g, 6);
                    [&g * &poly("t4", 6), &g * &poly("t5", 6)]
                })
                .collect()
        };
        let all: Vec<Vec<u32>> = vec![vec![1, 1, 1], vec![2, 2, 2], vec![3, 3, 3]];
        let i = HomIdeal::multigraded(vec![2, 2, 2], gens(3)).unwrap();
        let e = empty_multihomogeneous(&i, 7, &all).unwrap();
        assert!(e.is_empty());
        // (0:1)×(1:0)×anything survives without the third form
        let i = HomIdeal::multigraded(vec![2, 2, 2], gens(2)).unwrap();
        let e = empty_multihomogeneous(&i, 7, &all).unwrap();
        let Emptiness::Inconclusive { attempts } = e else { panic!() };
        assert_eq!(attempts.len(), 3);
        assert!(attempts.iter().all(|a| a.rank < a.columns));
        assert_eq!(multidegree(&poly("t0*t2*t4", 6), &[2, 2, 2]), Some(vec![1, 1, 1]));
        assert_eq!(multidegree(&poly("t0*t2 + t1*t4", 6), &[2, 2, 2]), None);
        assert!(span_full_multidegree(&i, &[1, 1], 7).is_err());
        assert!(HomIdeal::multigraded(vec![2, 0, 2], gens(2)).is_err());
    }

    fn random_ideal(rng: &mut ChaCha8Rng, n: usize) -> HomIdeal {
        let k = rng.gen_range(1..=n + 1);
        let gens = (0..k)
            .map(|_| {
                let d = rng.gen_range(1..=2u32);
                let mut g = MultiPoly::zero(Ring::Integers, n);
                for m in monomials_of_degree(n, d) {
                    if rng.gen_bool(0.5) {
                        g.add_term(m, int(rng.gen_range(-4..=4)));
                    }
                }
                g
            })
            .collect();
        HomIdeal::new(n, gens).unwrap()
    }

    /// Exhaustive search for a common zero over P^{n-1}(𝔽_{p^k}).
    fn has_zero(ideal: &HomIdeal, q: u32) -> bool {
        use crate::exact::gf::Gf;
        let gf = Gf::new(q).unwrap();
        let p = gf.characteristic() as u64;
        let gens: Vec<Vec<(Vec<u32>, u32)>> = ideal
            .gens()
            .iter()
            .map(|g| {
                g.terms()
                    .map(|(e, c)| (e.clone(), int_mod(c, p) as u32))
                    .filter(|(_, c)| *c != 0)
                    .collect()
            })
            .collect();
        gf.projective_points(ideal.nvars()).iter().any(|x| {
            gens.iter().all(|g| {
                g.iter().fold(0, |acc, (e, c)| {
                    let mut t = *c;
                    for (xi, &k) in x.iter().zip(e) {
                        for _ in 0..k {
                            t = gf.mul(t, *xi);
                        }
                    }
                    gf.add(acc, t)
                }) == 0
            })
        })
    }

    #[test]
    fn certificates_sound_against_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut certified = 0;
        for _ in 0..60 {
            let i = random_ideal(&mut rng, 3);
            for p in [2u64, 3] {
                if let Emptiness::Empty(_) = empty_over_fpbar(&i, p, 6).unwrap() {
                    certified += 1;
                    for q in [p as u32, (p * p) as u32] {
                        assert!(!has_zero(&i, q));
                    }
                }
            }
        }
        assert!(certified > 5);
    }

    #[test]
    fn integer_verdicts_match_mod_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..50 {
            let i = random_ideal(&mut rng, 3);
            for d in 1..=4 {
                let lat = lattice_at_degree(&i, d);
                for p in [2u64, 3, 5, 7] {
                    let fp = span_full_mod_p(&i, d, p).unwrap();
                    assert_eq!(lat.empty_at(p, false), fp.rank == fp.columns, "d={d} p={p}");
                    if p != 2 {
                        assert_eq!(lat.empty_at(p, true), lat.empty_at(p, false));
                    }
                }
            }
        }
    }

    #[test]
    fn monotone_in_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..30 {
            let i = random_ideal(&mut rng, 3);
            if let Emptiness::Empty(c) = empty_over_fpbar(&i, 5, 5).unwrap() {
                for d in c.degree[0]..=c.degree[0] + 2 {
                    let a = span_full_mod_p(&i, d, 5).unwrap();
                    assert_eq!(a.rank, a.columns);
                }
            }
        }
    }
}
