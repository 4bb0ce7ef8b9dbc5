//! Dense exact matrices over ℤ and ℚ, plus determinants of small polynomial
//! matrices.

use std::collections::HashMap;
use std::fmt;
use std::ops::Mul;

use num_traits::{One, Signed, Zero};

use super::poly::MultiPoly;
use super::{Int, Rat};

#[derive(Clone, PartialEq, Eq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type IntMatrix = Matrix<Int>;
pub type RatMatrix = Matrix<Rat>;

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    pub fn is_symmetric(&self) -> bool
    where
        T: PartialEq,
    {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
            })
            .collect()
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[i * self.cols + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Clone + Zero + One> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let prod = a.clone() * rhs[(k, j)].clone();
                    let cur = std::mem::replace(&mut out[(i, j)], T::zero());
                    out[(i, j)] = cur + prod;
                }
            }
        }
        out
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|j| self.data[i * self.cols + j].to_string())
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| Int::from(x)).collect())
                .collect(),
        )
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Int {
        assert_eq!(self.rows, self.cols, "square matrix required");
        let n = self.rows;
        if n == 0 {
            return Int::one();
        }
        let mut a = self.clone();
        let mut sign = Int::one();
        let mut prev = Int::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Int::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        sign * a[(n - 1, n - 1)].clone()
    }

    pub fn to_rat(&self) -> RatMatrix {
        self.map(|x| Rat::from_integer(x.clone()))
    }

    pub fn is_unimodular(&self) -> bool {
        self.rows == self.cols && self.det().abs().is_one()
    }
}

impl RatMatrix {
    /// Reduced row echelon form; returns the pivot columns.
    pub fn rref(&mut self) -> Vec<usize> {
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == self.rows {
                break;
            }
            let Some(p) = (r..self.rows).find(|&i| !self[(i, c)].is_zero()) else {
                continue;
            };
            self.swap_rows(p, r);
            let inv = self[(r, c)].recip();
            for j in c..self.cols {
                self[(r, j)] = &self[(r, j)] * &inv;
            }
            for i in 0..self.rows {
                if i != r && !self[(i, c)].is_zero() {
                    let f = self[(i, c)].clone();
                    for j in c..self.cols {
                        let v = &self[(i, j)] - &f * &self[(r, j)];
                        self[(i, j)] = v;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        pivots
    }

    pub fn rank(&self) -> usize {
        self.clone().rref().len()
    }

    pub fn det(&self) -> Rat {
        assert_eq!(self.rows, self.cols);
        let mut a = self.clone();
        let n = self.rows;
        let mut det = Rat::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| !a[(i, c)].is_zero()) else {
                return Rat::zero();
            };
            if p != c {
                a.swap_rows(p, c);
                det = -det;
            }
            det *= a[(c, c)].clone();
            let inv = a[(c, c)].recip();
            for i in c + 1..n {
                if a[(i, c)].is_zero() {
                    continue;
                }
                let f = &a[(i, c)] * &inv;
                for j in c..n {
                    let v = &a[(i, j)] - &f * &a[(c, j)];
                    a[(i, j)] = v;
                }
            }
        }
        det
    }

    /// Basis of the right null space `{v : M v = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<Rat>> {
        let mut a = self.clone();
        let pivots = a.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![Rat::zero(); self.cols];
                v[f] = Rat::one();
                for (r, &pc) in pivots.iter().enumerate() {
                    v[pc] = -a[(r, f)].clone();
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Option<RatMatrix> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = RatMatrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self[(i, j)].clone()
            } else if j - n == i {
                Rat::one()
            } else {
                Rat::zero()
            }
        });
        let piv = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        Some(RatMatrix::from_fn(n, n, |i, j| aug[(i, j + n)].clone()))
    }
}

/// Scale a rational vector to a primitive integer vector (gcd 1, first
/// nonzero entry positive).
pub fn primitive_integer_vector(v: &[Rat]) -> Vec<Int> {
    use num_integer::Integer;
    let lcm = v.iter().fold(Int::one(), |l, x| l.lcm(x.denom()));
    let mut out: Vec<Int> = v.iter().map(|x| (x * Rat::from_integer(lcm.clone())).to_integer()).collect();
    let g = out.iter().fold(Int::zero(), |g, x| g.gcd(x));
    if !g.is_zero() {
        for x in out.iter_mut() {
            *x = &*x / &g;
        }
    }
    if let Some(first) = out.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in out.iter_mut() {
                *x = -&*x;
            }
        }
    }
    out
}

/// Determinant of a square matrix of polynomials by Laplace expansion along
/// rows, memoised on the remaining column set. Fine for n ≤ 6.
pub fn det_poly(m: &[Vec<MultiPoly>]) -> MultiPoly {
    let n = m.len();
    assert!(n > 0 && m.iter().all(|r| r.len() == n));
    let ring = m[0][0].ring();
    let nv = m[0][0].nvars();
    let mut memo: HashMap<u32, MultiPoly> = HashMap::new();
    fn rec(
        m: &[Vec<MultiPoly>],
        row: usize,
        cols: u32,
        memo: &mut HashMap<u32, MultiPoly>,
        ring: super::Ring,
        nv: usize,
    ) -> MultiPoly {
        if row == m.len() {
            return MultiPoly::one(ring, nv);
        }
        if let Some(v) = memo.get(&cols) {
            return v.clone();
        }
        let mut acc = MultiPoly::zero(ring, nv);
        let mut sign_pos = true;
        for c in 0..m.len() {
            if cols & (1 << c) == 0 {
                continue;
            }
            let entry = &m[row][c];
            if !entry.is_zero() {
                let sub = rec(m, row + 1, cols & !(1 << c), memo, ring, nv);
                let term = entry * &sub;
                acc = if sign_pos { &acc + &term } else { &acc - &term };
            }
            sign_pos = !sign_pos;
        }
        memo.insert(cols, acc.clone());
        acc
    }
    rec(m, 0, (1u32 << n) - 1, &mut memo, ring, nv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat, Ring};

    #[test]
    fn bareiss_matches_rational_det() {
        let m = IntMatrix::from_i64(&[&[2, -1, 0, 3], &[1, 4, 2, 0], &[0, 5, -3, 1], &[7, 0, 1, 1]]);
        assert_eq!(Rat::from_integer(m.det()), m.to_rat().det());
        let singular = IntMatrix::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(singular.det().is_zero());
        let needs_swap = IntMatrix::from_i64(&[&[0, 1], &[1, 0]]);
        assert_eq!(needs_swap.det(), int(-1));
    }

    #[test]
    fn nullspace_and_inverse() {
        let m = IntMatrix::from_i64(&[&[1, 2, 3], &[2, 4, 6]]).to_rat();
        let ns = m.nullspace();
        assert_eq!(ns.len(), 2);
        for v in &ns {
            assert!(m.mul_vec(v).iter().all(|x| x.is_zero()));
        }
        let a = IntMatrix::from_i64(&[&[2, 1], &[1, 1]]).to_rat();
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, RatMatrix::identity(2));
        assert!(m.submatrix(&[0, 1], &[0, 1]).inverse().is_none());
    }

    #[test]
    fn primitive_vectors() {
        let v = vec![rat(-1, 2), rat(3, 4), rat(0, 1)];
        assert_eq!(primitive_integer_vector(&v), vec![int(2), int(-3), int(0)]);
    }

    #[test]
    fn polynomial_determinant() {
        let t = |i| MultiPoly::var(Ring::Integers, 2, i);
        let m = vec![vec![t(0), t(1)], vec![t(1), t(0)]];
        let d = det_poly(&m);
        assert_eq!(d, MultiPoly::parse("t0^2 - t1^2", "t", 2).unwrap());
    }
}
