//! Quadratic forms in five variables: Gram matrices, rank, kernel,
//! signature, discriminants and smooth points over ℝ, ℚ_p and 𝔽_q.

use std::fmt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::exact::fp::fp_nullspace;
use crate::exact::gf::Gf;
use crate::exact::{int, int_mod, inv_mod, is_prime, mul_mod, IntMatrix, MultiPoly, Rat, RatMatrix, Ring};
use crate::exact::Int;
use crate::localfields::{hilbert_symbol, is_square, legendre, Place};
use crate::{Error, Result};

pub const NVARS: usize = 5;

/// The fixed coefficient order (0,0),(0,1),…,(0,4),(1,1),…,(4,4).
pub const PAIRS: [(usize, usize); 15] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (0, 4),
    (1, 1),
    (1, 2),
    (1, 3),
    (1, 4),
    (2, 2),
    (2, 3),
    (2, 4),
    (3, 3),
    (3, 4),
    (4, 4),
];

pub fn pair_index(i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    PAIRS.iter().position(|&pq| pq == (i, j)).unwrap()
}

/// `Q = Σ_{i≤j} c_ij x_i x_j` with integer coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadricForm {
    c: [Int; 15],
}

impl QuadricForm {
    pub fn new(c: [Int; 15]) -> Self {
        QuadricForm { c }
    }

    pub fn from_i64(c: [i64; 15]) -> Self {
        QuadricForm {
            c: c.map(Int::from),
        }
    }

    pub fn zero() -> Self {
        QuadricForm::from_i64([0; 15])
    }

    pub fn coeffs(&self) -> &[Int; 15] {
        &self.c
    }

    /// Coefficient of `x_i x_j` (order of i, j irrelevant).
    pub fn coeff(&self, i: usize, j: usize) -> &Int {
        &self.c[pair_index(i, j)]
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    /// Gram matrix with `B_ii = 2c_ii`, `B_ij = c_ij`.
    pub fn gram(&self) -> IntMatrix {
        IntMatrix::from_fn(NVARS, NVARS, |i, j| {
            if i == j {
                self.coeff(i, i) * 2
            } else {
                self.coeff(i, j).clone()
            }
        })
    }

    pub fn from_gram(b: &IntMatrix) -> Result<Self> {
        if b.rows() != NVARS || b.cols() != NVARS || !b.is_symmetric() {
            return Err(Error::Dimension("Gram matrix must be symmetric 5×5".into()));
        }
        let mut c: [Int; 15] = Default::default();
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            if i == j {
                let d = &b[(i, i)];
                if !(d % Int::from(2)).is_zero() {
                    return Err(Error::Dimension("Gram diagonal must be even".into()));
                }
                c[k] = d / Int::from(2);
            } else {
                c[k] = b[(i, j)].clone();
            }
        }
        Ok(QuadricForm { c })
    }

    pub fn to_poly(&self) -> MultiPoly {
        let mut f = MultiPoly::zero(Ring::Integers, NVARS);
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            let mut e = vec![0u32; NVARS];
            e[i] += 1;
            e[j] += 1;
            f.add_term(e, self.c[k].clone());
        }
        f
    }

    pub fn from_poly(f: &MultiPoly) -> Result<Self> {
        if f.nvars() != NVARS {
            return Err(Error::Parse(format!("expected {NVARS} variables")));
        }
        let mut c: [Int; 15] = Default::default();
        for (e, v) in f.terms() {
            if e.iter().sum::<u32>() != 2 {
                return Err(Error::Parse("quadric must be homogeneous of degree 2".into()));
            }
            let idx: Vec<usize> = e
                .iter()
                .enumerate()
                .flat_map(|(i, &k)| std::iter::repeat_n(i, k as usize))
                .collect();
            c[pair_index(idx[0], idx[1])] = v.clone();
        }
        Ok(QuadricForm { c })
    }

    /// One quadric: 15 integers in the fixed order, or a polynomial in
    /// `x0..x4`.
    pub fn parse(line: &str) -> Result<Self> {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() == 15 {
            let ints: Option<Vec<Int>> = toks.iter().map(|t| t.parse::<Int>().ok()).collect();
            if let Some(v) = ints {
                return Ok(QuadricForm {
                    c: v.try_into().unwrap(),
                });
            }
        }
        if !toks.is_empty() && toks.iter().all(|t| t.parse::<Int>().is_ok()) {
            return Err(Error::Parse(format!(
                "expected 15 coefficients, found {}",
                toks.len()
            )));
        }
        QuadricForm::from_poly(&MultiPoly::parse(line, "x", NVARS)?)
    }

    /// The 15 coefficients separated by spaces.
    pub fn to_row_string(&self) -> String {
        self.c
            .iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn eval(&self, x: &[Int]) -> Int {
        PAIRS
            .iter()
            .zip(&self.c)
            .map(|(&(i, j), c)| c * &x[i] * &x[j])
            .sum()
    }

    pub fn eval_rat(&self, x: &[Rat]) -> Rat {
        PAIRS
            .iter()
            .zip(&self.c)
            .map(|(&(i, j), c)| Rat::from_integer(c.clone()) * &x[i] * &x[j])
            .sum()
    }

    /// `Q(T x)`: Gram matrix `Tᵀ B T`.
    pub fn transform(&self, t: &IntMatrix) -> Self {
        let b = self.gram();
        let bt = &(&t.transpose() * &b) * t;
        QuadricForm::from_gram(&bt).expect("congruence preserves even diagonal")
    }

    pub fn reduce_mod(&self, p: u64) -> [u64; 15] {
        std::array::from_fn(|k| int_mod(&self.c[k], p))
    }

    /// Nonzero diagonal entries of a diagonalisation of the Gram matrix over ℚ.
    pub fn rational_diagonal(&self) -> Vec<Rat> {
        let (_, d) = diagonalize_rat(&self.gram().to_rat());
        d.into_iter().filter(|x| !x.is_zero()).collect()
    }

    pub fn rank(&self) -> usize {
        self.gram().to_rat().rank()
    }

    pub fn classify(&self, field: Field) -> Result<FormClassification> {
        classify(self, field)
    }

    pub fn has_smooth_point(&self, field: LocalField) -> Result<bool> {
        has_smooth_point(self, field)
    }
}

impl fmt::Debug for QuadricForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_poly().to_canonical_string("x"))
    }
}

impl fmt::Display for QuadricForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for QuadricForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_poly().to_canonical_string("x").serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Field {
    Rationals,
    Reals,
    Fp(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LocalField {
    Reals,
    Qp(u64),
    Fq(u32),
}

impl LocalField {
    pub fn from_place(v: Place) -> Self {
        match v {
            Place::Real => LocalField::Reals,
            Place::Finite(p) => LocalField::Qp(p),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
    pub zero: usize,
}

/// A congruence `Tᵀ B T = diag(d)`; over 𝔽_p the entries are residues.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagonalization {
    #[serde(serialize_with = "ser_rat_matrix")]
    pub transform: Vec<Vec<Rat>>,
    #[serde(serialize_with = "ser_rat_vec")]
    pub diagonal: Vec<Rat>,
}

fn ser_rat_vec<S: serde::Serializer>(v: &[Rat], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().serialize(s)
}

fn ser_rat_matrix<S: serde::Serializer>(
    m: &[Vec<Rat>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    m.iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .serialize(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormClassification {
    pub field: Field,
    /// over 𝔽_2 this is the number of essential variables of the quadric
    pub rank: usize,
    #[serde(serialize_with = "ser_rat_matrix")]
    pub kernel: Vec<Vec<Rat>>,
    pub signature: Option<Signature>,
    /// over 𝔽_p with rank 2: whether the binary part splits
    pub split: Option<bool>,
    pub diagonalization: Option<Diagonalization>,
}

/// Symmetric Gaussian elimination over ℚ. Without pivoting trouble (all
/// leading principal minors nonzero) `T` is unit upper triangular and the
/// diagonal is `(M₁, M₂/M₁, …)`.
pub fn diagonalize_rat(b: &RatMatrix) -> (RatMatrix, Vec<Rat>) {
    let n = b.rows();
    let mut a = b.clone();
    let mut t = RatMatrix::identity(n);
    for k in 0..n {
        if a[(k, k)].is_zero() {
            if let Some(j) = (k + 1..n).find(|&j| !a[(j, j)].is_zero()) {
                a.swap_rows(k, j);
                a.swap_cols(k, j);
                t.swap_cols(k, j);
            } else if let Some(j) = (k + 1..n).find(|&j| !a[(k, j)].is_zero()) {
                // e_k ← e_k + e_j
                for i in 0..n {
                    let v = &a[(k, i)] + &a[(j, i)];
                    a[(k, i)] = v;
                }
                for i in 0..n {
                    let v = &a[(i, k)] + &a[(i, j)];
                    a[(i, k)] = v;
                }
                for i in 0..n {
                    let v = &t[(i, k)] + &t[(i, j)];
                    t[(i, k)] = v;
                }
            } else {
                continue;
            }
        }
        let piv = a[(k, k)].clone();
        for j in k + 1..n {
            if a[(k, j)].is_zero() {
                continue;
            }
            let f = &a[(k, j)] / &piv;
            for i in 0..n {
                let v = &a[(i, j)] - &f * &a[(i, k)];
                a[(i, j)] = v;
            }
            for i in 0..n {
                let v = &a[(j, i)] - &f * &a[(k, i)];
                a[(j, i)] = v;
            }
            for i in 0..n {
                let v = &t[(i, j)] - &f * &t[(i, k)];
                t[(i, j)] = v;
            }
        }
    }
    let d = (0..n).map(|i| a[(i, i)].clone()).collect();
    (t, d)
}

/// The same elimination modulo an odd prime.
pub fn diagonalize_mod(b: &[Vec<u64>], p: u64) -> (Vec<Vec<u64>>, Vec<u64>) {
    let n = b.len();
    let mut a: Vec<Vec<u64>> = b.iter().map(|r| r.iter().map(|x| x % p).collect()).collect();
    let mut t: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
    let addm = |x: u64, y: u64| (x + y) % p;
    let subm = |x: u64, y: u64| (x + p - y) % p;
    for k in 0..n {
        if a[k][k] == 0 {
            if let Some(j) = (k + 1..n).find(|&j| a[j][j] != 0) {
                a.swap(k, j);
                for r in a.iter_mut() {
                    r.swap(k, j);
                }
                for r in t.iter_mut() {
                    r.swap(k, j);
                }
            } else if let Some(j) = (k + 1..n).find(|&j| a[k][j] != 0) {
                for i in 0..n {
                    a[k][i] = addm(a[k][i], a[j][i]);
                }
                for i in 0..n {
                    a[i][k] = addm(a[i][k], a[i][j]);
                }
                for r in t.iter_mut() {
                    r[k] = addm(r[k], r[j]);
                }
            } else {
                continue;
            }
        }
        let inv = inv_mod(a[k][k], p);
        for j in k + 1..n {
            if a[k][j] == 0 {
                continue;
            }
            let f = mul_mod(a[k][j], inv, p);
            for i in 0..n {
                a[i][j] = subm(a[i][j], mul_mod(f, a[i][k], p));
            }
            for i in 0..n {
                a[j][i] = subm(a[j][i], mul_mod(f, a[k][i], p));
            }
            for r in t.iter_mut() {
                r[j] = subm(r[j], mul_mod(f, r[k], p));
            }
        }
    }
    let d = (0..n).map(|i| a[i][i]).collect();
    (t, d)
}

fn gram_mod(q: &QuadricForm, p: u64) -> Vec<Vec<u64>> {
    let g = q.gram();
    (0..NVARS)
        .map(|i| (0..NVARS).map(|j| int_mod(&g[(i, j)], p)).collect())
        .collect()
}

fn to_rat_rows(m: &[Vec<u64>]) -> Vec<Vec<Rat>> {
    m.iter()
        .map(|r| r.iter().map(|&x| Rat::from_integer(Int::from(x))).collect())
        .collect()
}

pub fn classify(q: &QuadricForm, field: Field) -> Result<FormClassification> {
    match field {
        Field::Rationals | Field::Reals => {
            let b = q.gram().to_rat();
            let kernel = b.nullspace();
            let (t, d) = diagonalize_rat(&b);
            let rank = d.iter().filter(|x| !x.is_zero()).count();
            let signature = (field == Field::Reals).then(|| Signature {
                positive: d.iter().filter(|x| x.is_positive()).count(),
                negative: d.iter().filter(|x| x.is_negative()).count(),
                zero: d.iter().filter(|x| x.is_zero()).count(),
            });
            Ok(FormClassification {
                field,
                rank,
                kernel,
                signature,
                split: None,
                diagonalization: Some(Diagonalization {
                    transform: t.to_rows(),
                    diagonal: d,
                }),
            })
        }
        Field::Fp(p) => {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            if p == 2 {
                let gf = Gf::new(2)?;
                let gq = GfQuadric::from_form(q, &gf);
                let vertex = gq.vertex(&gf);
                let rank = NVARS - vertex.len();
                let split = (rank == 2).then(|| gq.binary_part_splits(&gf, &vertex));
                return Ok(FormClassification {
                    field,
                    rank,
                    kernel: vertex
                        .iter()
                        .map(|v| v.iter().map(|&x| Rat::from_integer(Int::from(x))).collect())
                        .collect(),
                    signature: None,
                    split,
                    diagonalization: None,
                });
            }
            let b = gram_mod(q, p);
            let (t, d) = diagonalize_mod(&b, p);
            let nz: Vec<u64> = d.iter().copied().filter(|&x| x != 0).collect();
            let rank = nz.len();
            let split = (rank == 2).then(|| {
                let m = (p - mul_mod(nz[0], nz[1], p)) % p;
                legendre(&Int::from(m), p) == 1
            });
            Ok(FormClassification {
                field,
                rank,
                kernel: to_rat_rows(&fp_nullspace(&b, NVARS, p)),
                signature: None,
                split,
                diagonalization: Some(Diagonalization {
                    transform: to_rat_rows(&t),
                    diagonal: d.iter().map(|&x| Rat::from_integer(Int::from(x))).collect(),
                }),
            })
        }
    }
}

/// A quadric with coefficients in a small finite field, same order as
/// [`PAIRS`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GfQuadric {
    pub c: [u32; 15],
}

impl GfQuadric {
    pub fn from_form(q: &QuadricForm, gf: &Gf) -> Self {
        let p = gf.characteristic() as u64;
        GfQuadric {
            c: std::array::from_fn(|k| int_mod(&q.c[k], p) as u32),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|&x| x == 0)
    }

    pub fn eval(&self, gf: &Gf, x: &[u32]) -> u32 {
        PAIRS.iter().zip(&self.c).fold(0, |acc, (&(i, j), &c)| {
            if c == 0 {
                acc
            } else {
                gf.add(acc, gf.mul(c, gf.mul(x[i], x[j])))
            }
        })
    }

    /// Gram matrix over 𝔽_q.
    pub fn gram(&self, gf: &Gf) -> Vec<Vec<u32>> {
        let mut b = vec![vec![0u32; NVARS]; NVARS];
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            if i == j {
                b[i][i] = gf.add(self.c[k], self.c[k]);
            } else {
                b[i][j] = self.c[k];
                b[j][i] = self.c[k];
            }
        }
        b
    }

    fn partial(&self, gf: &Gf, x: &[u32], k: usize) -> u32 {
        let mut s = 0;
        for j in 0..NVARS {
            let c = self.c[pair_index(k, j)];
            if c == 0 {
                continue;
            }
            let term = if j == k {
                gf.mul(gf.add(c, c), x[k])
            } else {
                gf.mul(c, x[j])
            };
            s = gf.add(s, term);
        }
        s
    }

    pub fn is_smooth_point(&self, gf: &Gf, x: &[u32]) -> bool {
        self.eval(gf, x) == 0 && (0..NVARS).any(|k| self.partial(gf, x, k) != 0)
    }

    /// Exhaustive search over P⁴(𝔽_q) with the Jacobian criterion.
    pub fn smooth_point_by_enumeration(&self, gf: &Gf) -> Option<Vec<u32>> {
        gf.projective_points(NVARS)
            .into_iter()
            .find(|x| self.is_smooth_point(gf, x))
    }

    /// Basis of the vertex (singular subspace) of the projective quadric.
    ///
    /// Odd characteristic: the radical of the Gram matrix. Characteristic 2:
    /// the radical `R` of the alternating form, cut down by the zero set of
    /// `Q|_R`, which is additive and Frobenius-semilinear there, hence the
    /// kernel of the linear form `x ↦ Σ xᵢ √Q(rᵢ)`.
    pub fn vertex(&self, gf: &Gf) -> Vec<Vec<u32>> {
        let rad = gf.nullspace(&self.gram(gf), NVARS);
        if gf.characteristic() != 2 {
            return rad;
        }
        let s: Vec<u32> = rad
            .iter()
            .map(|r| gf.sqrt_char2(self.eval(gf, r)))
            .collect();
        let Some(i0) = s.iter().position(|&x| x != 0) else {
            return rad;
        };
        let inv = gf.inv(s[i0]);
        rad.iter()
            .enumerate()
            .filter(|&(i, _)| i != i0)
            .map(|(i, r)| {
                let f = gf.mul(s[i], inv);
                r.iter()
                    .zip(&rad[i0])
                    .map(|(&a, &b)| gf.sub(a, gf.mul(f, b)))
                    .collect()
            })
            .collect()
    }

    /// Number of variables the quadric genuinely depends on.
    pub fn essential_rank(&self, gf: &Gf) -> usize {
        NVARS - self.vertex(gf).len()
    }

    /// For essential rank 2: does the induced binary form have a zero?
    fn binary_part_splits(&self, gf: &Gf, vertex: &[Vec<u32>]) -> bool {
        // complete the vertex by two coordinate vectors
        let mut basis: Vec<Vec<u32>> = vertex.to_vec();
        let mut extra = Vec::new();
        for k in 0..NVARS {
            let mut e = vec![0u32; NVARS];
            e[k] = 1;
            basis.push(e);
            if gf.rank(&basis) == basis.len() {
                extra.push(k);
            } else {
                basis.pop();
            }
        }
        debug_assert_eq!(extra.len(), 2);
        let (a, b) = (extra[0], extra[1]);
        let qa = self.c[pair_index(a, a)];
        let qb = self.c[pair_index(b, b)];
        let qab = self.c[pair_index(a, b)];
        if qa == 0 {
            return true;
        }
        // v = 1: qa·u² + qab·u + qb
        gf.elements().any(|u| {
            let val = gf.add(gf.add(gf.mul(qa, gf.mul(u, u)), gf.mul(qab, u)), qb);
            val == 0
        })
    }

    /// Structural smooth-point test: a cone over a nondegenerate quadric in
    /// `e` variables has a smooth 𝔽_q-point unless `e = 1` (double plane) or
    /// `e = 2` with an irreducible binary part.
    pub fn has_smooth_point(&self, gf: &Gf) -> Result<bool> {
        if self.is_zero() {
            return Err(Error::Rank {
                found: 0,
                expected: "at least 1",
            });
        }
        let vertex = self.vertex(gf);
        Ok(match NVARS - vertex.len() {
            1 => false,
            2 => self.binary_part_splits(gf, &vertex),
            _ => true,
        })
    }
}

/// Does the nondegenerate diagonal form `⟨d₁,…,d_r⟩` have a nontrivial zero
/// over ℚ_p?
pub fn isotropic_qp(d: &[Rat], p: u64) -> Result<bool> {
    let v = Place::Finite(p);
    Ok(match d.len() {
        0 | 1 => false,
        2 => is_square(&-(&d[0] * &d[1]), v)?,
        3 => {
            let a = -(&d[0] * &d[2]);
            let b = -(&d[1] * &d[2]);
            hilbert_symbol(&a, &b, v)? == 1
        }
        4 => {
            let disc: Rat = d.iter().product();
            if !is_square(&disc, v)? {
                return Ok(true);
            }
            let mut eps = 1i8;
            for i in 0..4 {
                for j in i + 1..4 {
                    eps *= hilbert_symbol(&d[i], &d[j], v)?;
                }
            }
            let m1 = -Rat::one();
            eps != -hilbert_symbol(&m1, &m1, v)?
        }
        _ => true,
    })
}

pub fn isotropic_real(d: &[Rat]) -> bool {
    d.iter().any(|x| x.is_positive()) && d.iter().any(|x| x.is_negative())
}

/// Smooth points on the projective quadric `Q = 0` over ℝ, ℚ_p or 𝔽_q.
///
/// Over ℝ and ℚ_p the quadric is a cone over its nondegenerate part, and a
/// smooth point exists iff that part is isotropic.
pub fn has_smooth_point(q: &QuadricForm, field: LocalField) -> Result<bool> {
    if q.is_zero() {
        return Err(Error::Rank {
            found: 0,
            expected: "at least 1",
        });
    }
    match field {
        LocalField::Reals => Ok(isotropic_real(&q.rational_diagonal())),
        LocalField::Qp(p) => {
            if !is_prime(p) {
                return Err(Error::NotPrime(p));
            }
            isotropic_qp(&q.rational_diagonal(), p)
        }
        LocalField::Fq(qq) => {
            let gf = Gf::new(qq)?;
            GfQuadric::from_form(q, &gf).has_smooth_point(&gf)
        }
    }
}

/// Fast smooth-point test over 𝔽_p for an odd prime, from the Gram matrix
/// residues.
pub fn smooth_point_mod_p(b: &[Vec<u64>], p: u64) -> bool {
    let (_, d) = diagonalize_mod(b, p);
    let nz: Vec<u64> = d.into_iter().filter(|&x| x != 0).collect();
    match nz.len() {
        0 | 1 => false,
        2 => {
            let m = (p - mul_mod(nz[0], nz[1], p)) % p;
            legendre(&Int::from(m), p) == 1
        }
        _ => true,
    }
}

/// `𝓑_{i,i}` for the least `i` where it is nonzero; for a rank-4 form its
/// square class is the discriminant of the base quadric surface.
pub fn ruling_disc(q: &QuadricForm) -> Result<Int> {
    let rank = q.rank();
    if rank != 4 {
        return Err(Error::Rank {
            found: rank,
            expected: "exactly 4",
        });
    }
    let b = q.gram();
    for i in 0..NVARS {
        let keep: Vec<usize> = (0..NVARS).filter(|&j| j != i).collect();
        let m = b.submatrix(&keep, &keep).det();
        if !m.is_zero() {
            return Ok(m);
        }
    }
    unreachable!("a rank-4 symmetric matrix has a nonzero principal 4-minor")
}

/// Outcome of the exhaustive check on the characteristic-2 normal form
/// `ax₀² + bx₁² + cx₂² + dx₃² + ex₄² + fx₀x₁ + gx₂x₃`.
#[derive(Debug, Clone, Serialize)]
pub struct AlbertReport {
    pub q: u32,
    pub tuples: usize,
    pub with_generator_nonzero: usize,
    pub counterexamples: Vec<[u32; 7]>,
}

/// For every parameter tuple over 𝔽_q (q a power of 2): whenever one of
/// `f²c, f²d, f²e, f²g, g²a, g²b, g²e, g²f` is nonzero, the quadric must
/// have a smooth point (checked by enumeration of P⁴(𝔽_q)).
pub fn albert_check(q: u32) -> Result<AlbertReport> {
    let gf = Gf::new(q)?;
    if gf.characteristic() != 2 {
        return Err(Error::Unsupported("normal form is for characteristic 2".into()));
    }
    let points = gf.projective_points(NVARS);
    let mut report = AlbertReport {
        q,
        tuples: 0,
        with_generator_nonzero: 0,
        counterexamples: Vec::new(),
    };
    let total = (q as usize).pow(7);
    for idx in 0..total {
        let mut r = idx;
        let t: [u32; 7] = std::array::from_fn(|_| {
            let v = (r % q as usize) as u32;
            r /= q as usize;
            v
        });
        report.tuples += 1;
        let [a, b, c, d, e, f, g] = t;
        let f2 = gf.mul(f, f);
        let g2 = gf.mul(g, g);
        let gens = [
            gf.mul(f2, c),
            gf.mul(f2, d),
            gf.mul(f2, e),
            gf.mul(f2, g),
            gf.mul(g2, a),
            gf.mul(g2, b),
            gf.mul(g2, e),
            gf.mul(g2, f),
        ];
        if gens.iter().all(|&x| x == 0) {
            continue;
        }
        report.with_generator_nonzero += 1;
        let mut c15 = [0u32; 15];
        c15[pair_index(0, 0)] = a;
        c15[pair_index(1, 1)] = b;
        c15[pair_index(2, 2)] = c;
        c15[pair_index(3, 3)] = d;
        c15[pair_index(4, 4)] = e;
        c15[pair_index(0, 1)] = f;
        c15[pair_index(2, 3)] = g;
        let quad = GfQuadric { c: c15 };
        if !points.iter().any(|x| quad.is_smooth_point(&gf, x)) {
            report.counterexamples.push(t);
        }
    }
    Ok(report)
}

/// Integer vector helper for tests and fixtures.
pub fn int_vec(v: &[i64]) -> Vec<Int> {
    v.iter().map(|&x| int(x)).collect()
}

/// Number of projective points of the quadric over 𝔽_p with p small
/// (used by tests as a sanity oracle).
pub fn count_points_mod_p(q: &QuadricForm, p: u64) -> usize {
    let gf = Gf::new(p as u32).expect("small prime");
    let gq = GfQuadric::from_form(q, &gf);
    gf.projective_points(NVARS)
        .iter()
        .filter(|x| gq.eval(&gf, x) == 0)
        .count()
}

pub fn to_i64_vec(v: &[Int]) -> Option<Vec<i64>> {
    v.iter().map(|x| x.to_i64()).collect()
}
