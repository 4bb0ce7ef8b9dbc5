//! Linear algebra over prime fields 𝔽_p with machine-word entries.

use super::{inv_mod, is_prime, mul_mod};
use crate::{Error, Result};

/// Rank of a matrix over 𝔽_p by Gaussian elimination. Entries may be any
/// `u64`; they are reduced first.
pub fn fp_rank(rows: &[Vec<u64>], p: u64) -> Result<usize> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x % p).collect())
        .collect();
    Ok(echelonize(&mut m, p).len())
}

/// In-place reduced row echelon form over 𝔽_p; returns pivot columns.
pub fn echelonize(m: &mut [Vec<u64>], p: u64) -> Vec<usize> {
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
        let inv = inv_mod(m[r][c], p);
        for x in m[r][c..].iter_mut() {
            *x = mul_mod(*x, inv, p);
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c] == 0 {
                continue;
            }
            let f = p - row[c];
            for (x, &y) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                *x = (*x + mul_mod(f, y, p)) % p;
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{v : M v = 0}` over 𝔽_p.
pub fn fp_nullspace(rows: &[Vec<u64>], ncols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut m: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| r.iter().map(|x| x % p).collect())
        .collect();
    let pivots = echelonize(&mut m, p);
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|f| {
            let mut v = vec![0u64; ncols];
            v[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[r][f]) % p;
            }
            v
        })
        .collect()
}

/// Determinant over 𝔽_p of a square matrix with reduced entries.
pub fn fp_det(m: &[Vec<u64>], p: u64) -> u64 {
    let n = m.len();
    let mut a: Vec<Vec<u64>> = m.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let mut det = 1u64;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| a[i][c] != 0) else {
            return 0;
        };
        if piv != c {
            a.swap(piv, c);
            det = (p - det) % p;
        }
        det = mul_mod(det, a[c][c], p);
        let inv = inv_mod(a[c][c], p);
        for i in c + 1..n {
            if a[i][c] == 0 {
                continue;
            }
            let f = mul_mod(a[i][c], inv, p);
            for j in c..n {
                a[i][j] = (a[i][j] + p - mul_mod(f, a[c][j], p)) % p;
            }
        }
    }
    det
}

/// Incremental row-span tracker over 𝔽_p.
///
/// Rows are added one at a time and reduced against the current
/// semi-echelon basis. Used for Macaulay matrices, where only the question
/// "does the row space fill every column?" matters, so the caller can stop
/// as soon as [`SpanTracker::is_full`] holds.
pub struct SpanTracker {
    p: u64,
    ncols: usize,
    /// basis row (normalised: entry at its leading column is 1) per column
    pivot_of: Vec<Option<usize>>,
    basis: Vec<Vec<u32>>,
    scratch: Vec<u64>,
    flush_every: usize,
}

impl SpanTracker {
    pub fn new(ncols: usize, p: u64) -> Self {
        assert!(p < (1 << 31), "prime too large for the span tracker");
        let sq = (p - 1) * (p - 1);
        // how many unreduced products fit in a u64 accumulator
        let flush_every = ((u64::MAX - p) / sq.max(1)).clamp(1, 1 << 20) as usize;
        SpanTracker {
            p,
            ncols,
            pivot_of: vec![None; ncols],
            basis: Vec::new(),
            scratch: vec![0; ncols],
            flush_every,
        }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ncols
    }

    /// Add a sparse row given as `(column, value)` pairs. Returns whether the
    /// rank went up.
    pub fn add_sparse(&mut self, entries: &[(usize, u64)]) -> bool {
        if self.is_full() {
            return false;
        }
        let p = self.p;
        let row = &mut self.scratch;
        row.iter_mut().for_each(|x| *x = 0);
        let mut start = self.ncols;
        for &(c, v) in entries {
            row[c] = (row[c] + v % p) % p;
            start = start.min(c);
        }
        let mut pending = 0usize;
        let mut lead = None;
        for c in start..self.ncols {
            let v = row[c] % p;
            row[c] = v;
            if v == 0 {
                continue;
            }
            match self.pivot_of[c] {
                Some(b) => {
                    if pending >= self.flush_every {
                        for x in row[c..].iter_mut() {
                            *x %= p;
                        }
                        pending = 0;
                    }
                    let f = p - v;
                    let brow = &self.basis[b];
                    for (x, &y) in row[c..].iter_mut().zip(&brow[c..]) {
                        *x += f * y as u64;
                    }
                    pending += 1;
                    debug_assert_eq!(row[c] % p, 0);
                }
                None => {
                    lead = Some(c);
                    break;
                }
            }
        }
        let Some(lead) = lead else {
            return false;
        };
        let inv = inv_mod(row[lead] % p, p);
        let mut new_row = vec![0u32; self.ncols];
        for j in lead..self.ncols {
            new_row[j] = mul_mod(row[j] % p, inv, p) as u32;
        }
        self.pivot_of[lead] = Some(self.basis.len());
        self.basis.push(new_row);
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        let id: Vec<Vec<u64>> = (0..5)
            .map(|i| (0..5).map(|j| u64::from(i == j)).collect())
            .collect();
        assert_eq!(fp_rank(&id, 7).unwrap(), 5);
        // Gram matrix of x0*x1
        let mut g = vec![vec![0u64; 5]; 5];
        g[0][1] = 1;
        g[1][0] = 1;
        assert_eq!(fp_rank(&g, 5).unwrap(), 2);
        assert_eq!(fp_rank(&vec![vec![0; 4]; 3], 3).unwrap(), 0);
        assert_eq!(fp_rank(&id, 9), Err(Error::NotPrime(9)));
        // rank drops mod 3 only
        let m = vec![vec![1, 2], vec![2, 1]];
        assert_eq!(fp_rank(&m, 3).unwrap(), 1);
        assert_eq!(fp_rank(&m, 5).unwrap(), 2);
    }

    #[test]
    fn det_mod_p() {
        let m = vec![vec![0, 1, 2], vec![1, 0, 3], vec![4, 5, 0]];
        // det = 22
        assert_eq!(fp_det(&m, 7), 22 % 7);
        assert_eq!(fp_det(&m, 11), 0);
        assert_eq!(fp_det(&[], 5), 1);
    }

    #[test]
    fn nullspace_mod_p() {
        let m = vec![vec![1, 1, 0], vec![0, 1, 1]];
        let ns = fp_nullspace(&m, 3, 5);
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        for r in &m {
            let s: u64 = r.iter().zip(v).map(|(a, b)| a * b).sum();
            assert_eq!(s % 5, 0);
        }
    }

    #[test]
    fn span_tracker_agrees_with_rank() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for &p in &[2u64, 3, 7, 65_521] {
            for _ in 0..20 {
                let rows: Vec<Vec<u64>> = (0..rng.gen_range(1..12))
                    .map(|_| {
                        (0..9)
                            .map(|_| if rng.gen_bool(0.4) { rng.gen_range(0..p) } else { 0 })
                            .collect()
                    })
                    .collect();
                let mut t = SpanTracker::new(9, p);
                for r in &rows {
                    let sparse: Vec<(usize, u64)> = r
                        .iter()
                        .enumerate()
                        .filter(|(_, &v)| v != 0)
                        .map(|(c, &v)| (c, v))
                        .collect();
                    t.add_sparse(&sparse);
                }
                assert_eq!(t.rank(), fp_rank(&rows, p).unwrap());
            }
        }
    }
}
