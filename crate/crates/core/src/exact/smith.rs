//! Smith normal form over ℤ and elementary divisors of integer lattices.

use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::fp::SpanTracker;
use super::matrix::IntMatrix;
use super::{int_mod, Int};

/// `U · M · V = S` with `U`, `V` unimodular and `S` diagonal, `d₁ | d₂ | …`.
#[derive(Debug, Clone)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// Nonzero diagonal entries (all positive).
    pub fn divisors(&self) -> Vec<Int> {
        let k = self.s.rows().min(self.s.cols());
        (0..k)
            .map(|i| self.s[(i, i)].clone())
            .filter(|d| !d.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.divisors().len()
    }
}

fn row_axpy(m: &mut IntMatrix, dst: usize, src: usize, q: &Int) {
    for j in 0..m.cols() {
        let v = &m[(dst, j)] - q * &m[(src, j)];
        m[(dst, j)] = v;
    }
}

fn col_axpy(m: &mut IntMatrix, dst: usize, src: usize, q: &Int) {
    for i in 0..m.rows() {
        let v = &m[(i, dst)] - q * &m[(i, src)];
        m[(i, dst)] = v;
    }
}

/// Smith normal form by elimination, always pivoting on an entry of least
/// absolute value in the active block.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (rows, cols) = (m.rows(), m.cols());
    let mut a = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);
    for t in 0..rows.min(cols) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if a[(i, j)].is_zero() {
                        continue;
                    }
                    if best.is_none_or(|(bi, bj)| a[(i, j)].abs() < a[(bi, bj)].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return finish(a, u, v);
            };
            a.swap_rows(t, pi);
            u.swap_rows(t, pi);
            a.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = a[(i, t)].div_floor(&a[(t, t)]);
                row_axpy(&mut a, i, t, &q);
                row_axpy(&mut u, i, t, &q);
                if !a[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = a[(t, j)].div_floor(&a[(t, t)]);
                col_axpy(&mut a, j, t, &q);
                col_axpy(&mut v, j, t, &q);
                if !a[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility: pull in any row with an entry the pivot doesn't divide
            let pivot = a[(t, t)].clone();
            let bad = (t + 1..rows)
                .find(|&i| (t + 1..cols).any(|j| !(&a[(i, j)] % &pivot).is_zero()));
            match bad {
                Some(i) => {
                    let minus_one = -Int::one();
                    row_axpy(&mut a, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            for j in 0..cols {
                a[(t, j)] = -&a[(t, j)];
            }
            for j in 0..rows {
                u[(t, j)] = -&u[(t, j)];
            }
        }
    }
    finish(a, u, v)
}

fn finish(s: IntMatrix, u: IntMatrix, v: IntMatrix) -> SmithForm {
    SmithForm { u, s, v }
}

/// Elementary divisors of a full-rank sublattice of ℤⁿ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeIndex {
    /// The rows do not span a rank-n sublattice (as far as the modular
    /// rank checks can tell).
    Deficient { rank_lower_bound: usize },
    /// Full rank; the elementary divisors (ascending, each dividing the next)
    /// and their product, the index `[ℤⁿ : L]`.
    Full { divisors: Vec<Int>, index: Int },
}

/// Primes used for modular pre-screening of full rank.
pub const SCREEN_PRIMES: [u64; 3] = [2_147_483_629, 2_147_483_587, 1_000_000_007];

/// Elementary divisors of the lattice spanned by sparse integer rows.
///
/// Full rank is certified modulo a large prime; then a nonsingular square
/// selection of rows gives a multiple `D` of the index, and a triangular
/// basis of `L = L + Dℤⁿ` is built with all entries kept below `D`.
pub fn lattice_index(rows: &[Vec<(usize, Int)>], ncols: usize) -> LatticeIndex {
    let mut best_rank = 0;
    let mut chosen: Option<Vec<usize>> = None;
    for &q in SCREEN_PRIMES.iter().take(2) {
        let mut tracker = SpanTracker::new(ncols, q);
        let mut picked = Vec::new();
        for (k, r) in rows.iter().enumerate() {
            let sparse: Vec<(usize, u64)> = r.iter().map(|(c, v)| (*c, int_mod(v, q))).collect();
            if tracker.add_sparse(&sparse) {
                picked.push(k);
            }
            if tracker.is_full() {
                break;
            }
        }
        best_rank = best_rank.max(tracker.rank());
        if tracker.is_full() {
            chosen = Some(picked);
            break;
        }
    }
    let Some(picked) = chosen else {
        return LatticeIndex::Deficient {
            rank_lower_bound: best_rank,
        };
    };
    if ncols == 0 {
        return LatticeIndex::Full {
            divisors: Vec::new(),
            index: Int::one(),
        };
    }
    let square = IntMatrix::from_fn(ncols, ncols, |_, _| Int::zero());
    let mut square = square;
    for (i, &k) in picked.iter().enumerate() {
        for (c, v) in &rows[k] {
            square[(i, *c)] = &square[(i, *c)] + v;
        }
    }
    let d = square.det().abs();
    debug_assert!(!d.is_zero());

    // triangular basis, row i leads at column i, diagonal entries divide d
    let n = ncols;
    let mut w: Vec<Vec<Int>> = (0..n)
        .map(|i| {
            let mut r = vec![Int::zero(); n];
            r[i] = d.clone();
            r
        })
        .collect();
    for r in rows {
        let mut vec = vec![Int::zero(); n];
        for (c, v) in r {
            vec[*c] = (&vec[*c] + v).mod_floor(&d);
        }
        absorb(&mut w, vec, &d);
    }
    let tri = IntMatrix::from_rows(w);
    let index = (0..n).fold(Int::one(), |acc, i| acc * &tri[(i, i)]);
    let snf = smith_normal_form(&tri);
    let mut divisors = snf.divisors();
    divisors.sort();
    LatticeIndex::Full { divisors, index }
}

fn absorb(w: &mut [Vec<Int>], mut r: Vec<Int>, d: &Int) {
    let n = r.len();
    for i in 0..n {
        if r[i].is_zero() {
            continue;
        }
        let wi = &w[i];
        let ext = wi[i].extended_gcd(&r[i]);
        let (g, a, b) = (ext.gcd, ext.x, ext.y);
        let wq = &wi[i] / &g;
        let rq = &r[i] / &g;
        let mut new_w = vec![Int::zero(); n];
        let mut new_r = vec![Int::zero(); n];
        for j in i..n {
            new_w[j] = &a * &wi[j] + &b * &r[j];
            new_r[j] = &wq * &r[j] - &rq * &wi[j];
        }
        new_w[i] = g.abs();
        if g.is_negative() {
            for x in new_w.iter_mut().skip(i + 1) {
                *x = -&*x;
            }
        }
        for j in i + 1..n {
            new_w[j] = new_w[j].mod_floor(d);
            new_r[j] = new_r[j].mod_floor(d);
        }
        debug_assert!(new_r[i].is_zero());
        w[i] = new_w;
        r = new_r;
    }
}
