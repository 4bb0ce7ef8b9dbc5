//! Four-dimensional linear systems `P = |Σ tᵢQᵢ|` of quadrics in P⁴.
//!
//! The universal Gram matrix `𝓑(t) = Σ tᵢBᵢ` has entries that are linear
//! forms in `t₀..t₄`; its determinant cuts out the discriminant quintic `H`.
//! `𝓑_{I,J}` denotes the minor obtained by deleting the rows in `I` and the
//! columns in `J`, so the leading principal minors are
//! `M₁ = 𝓑_{1234,1234}`, `M₂ = 𝓑_{234,234}`, `M₃ = 𝓑_{34,34}`, `M₄ = 𝓑_{4,4}`.

use std::fmt;
use std::sync::OnceLock;

use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::exact::fp::{fp_det, fp_nullspace, fp_rank};
use crate::exact::matrix::{det_poly, primitive_integer_vector};
use crate::exact::{int, int_mod, is_prime, Int, IntMatrix, MultiPoly, Rat, RatMatrix, Ring};
use crate::nullstellensatz::{
    empty_multihomogeneous, empty_over_fpbar, saturate_span_at_2, DegreeAttempt, Emptiness, HomIdeal,
};
use crate::quadform::{pair_index, QuadricForm, NVARS, PAIRS};
use crate::{Error, Result};

/// Prime used to sample points of `H` when checking the minor hypothesis.
pub const WITNESS_PRIME: u64 = 10_007;
pub const MAX_BASIS_CHANGES: u32 = 100;

#[derive(Clone)]
pub struct Pencil {
    quadrics: Vec<QuadricForm>,
    grams: Vec<IntMatrix>,
    gram: Vec<Vec<MultiPoly>>,
    det: OnceLock<MultiPoly>,
    leading: OnceLock<[MultiPoly; 4]>,
}

impl fmt::Debug for Pencil {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.quadrics).finish()
    }
}

impl PartialEq for Pencil {
    fn eq(&self, other: &Self) -> bool {
        self.quadrics == other.quadrics
    }
}

impl Serialize for Pencil {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.quadrics.serialize(s)
    }
}

fn coefficient_rank(qs: &[QuadricForm]) -> usize {
    let rows: Vec<Vec<Rat>> = qs
        .iter()
        .map(|q| q.coeffs().iter().map(|c| Rat::from_integer(c.clone())).collect())
        .collect();
    RatMatrix::from_rows(rows).rank()
}

impl Pencil {
    /// Assemble `𝓑(t)`; the five quadrics must be linearly independent.
    pub fn new(quadrics: Vec<QuadricForm>) -> Result<Self> {
        if quadrics.len() != NVARS {
            return Err(Error::Dimension(format!(
                "a pencil needs 5 quadrics, got {}",
                quadrics.len()
            )));
        }
        if coefficient_rank(&quadrics) < NVARS {
            return Err(Error::DependentGenerators);
        }
        let grams: Vec<IntMatrix> = quadrics.iter().map(|q| q.gram()).collect();
        let gram = (0..NVARS)
            .map(|i| {
                (0..NVARS)
                    .map(|j| {
                        let coeffs: Vec<Int> = grams.iter().map(|b| b[(i, j)].clone()).collect();
                        MultiPoly::linear(Ring::Integers, &coeffs)
                    })
                    .collect()
            })
            .collect();
        Ok(Pencil {
            quadrics,
            grams,
            gram,
            det: OnceLock::new(),
            leading: OnceLock::new(),
        })
    }

    /// Five non-empty lines (15 integers or a polynomial each); `#` starts a
    /// comment.
    pub fn parse(text: &str) -> Result<Self> {
        let lines: Vec<&str> = text
            .lines()
            .map(|l| l.split('#').next().unwrap().trim())
            .filter(|l| !l.is_empty())
            .collect();
        if lines.len() != NVARS {
            return Err(Error::Parse(format!(
                "expected 5 quadrics, found {} lines",
                lines.len()
            )));
        }
        let qs = lines
            .iter()
            .enumerate()
            .map(|(k, l)| {
                QuadricForm::parse(l).map_err(|e| Error::Parse(format!("line {}: {e}", k + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        Pencil::new(qs)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for q in &self.quadrics {
            s.push_str(&q.to_poly().to_canonical_string("x"));
            s.push('\n');
        }
        s
    }

    pub fn quadrics(&self) -> &[QuadricForm] {
        &self.quadrics
    }

    /// Gram matrices `B₀..B₄` of the generators.
    pub fn grams(&self) -> &[IntMatrix] {
        &self.grams
    }

    /// `𝓑(t)` as a 5×5 matrix of linear forms.
    pub fn gram(&self) -> &[Vec<MultiPoly>] {
        &self.gram
    }

    pub fn det(&self) -> &MultiPoly {
        self.det.get_or_init(|| det_poly(&self.gram))
    }

    /// The member `Σ tᵢQᵢ`.
    pub fn member(&self, t: &[Int]) -> QuadricForm {
        let c: [Int; 15] = std::array::from_fn(|k| {
            self.quadrics
                .iter()
                .zip(t)
                .map(|(q, ti)| &q.coeffs()[k] * ti)
                .sum()
        });
        QuadricForm::new(c)
    }

    pub fn gram_at(&self, t: &[Rat]) -> RatMatrix {
        RatMatrix::from_fn(NVARS, NVARS, |i, j| {
            self.grams
                .iter()
                .zip(t)
                .map(|(b, ti)| Rat::from_integer(b[(i, j)].clone()) * ti)
                .sum()
        })
    }

    pub fn gram_mod(&self, t: &[u64], p: u64) -> Vec<Vec<u64>> {
        (0..NVARS)
            .map(|i| {
                (0..NVARS)
                    .map(|j| {
                        self.grams
                            .iter()
                            .zip(t)
                            .fold(0u64, |acc, (b, &ti)| {
                                (acc + int_mod(&b[(i, j)], p) * (ti % p)) % p
                            })
                    })
                    .collect()
            })
            .collect()
    }

    /// `𝓑_{I,J}`: delete the rows in `rows` and the columns in `cols`.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> MultiPoly {
        assert_eq!(rows.len(), cols.len());
        let keep_r: Vec<usize> = (0..NVARS).filter(|i| !rows.contains(i)).collect();
        let keep_c: Vec<usize> = (0..NVARS).filter(|j| !cols.contains(j)).collect();
        if keep_r.is_empty() {
            return MultiPoly::one(Ring::Integers, NVARS);
        }
        let m: Vec<Vec<MultiPoly>> = keep_r
            .iter()
            .map(|&i| keep_c.iter().map(|&j| self.gram[i][j].clone()).collect())
            .collect();
        det_poly(&m)
    }

    /// `[M₁, M₂, M₃, M₄]`.
    pub fn leading_minors(&self) -> &[MultiPoly; 4] {
        self.leading.get_or_init(|| {
            std::array::from_fn(|k| {
                let size = k + 1;
                let deleted: Vec<usize> = (size..NVARS).collect();
                self.minor(&deleted, &deleted)
            })
        })
    }

    /// All `k×k` minors of `𝓑(t)`, one per unordered pair of index sets
    /// (the matrix is symmetric), zeros dropped.
    pub fn minors_of_size(&self, k: usize) -> Vec<MultiPoly> {
        minors_of(&self.gram, k)
    }

    /// The pencil of `Qᵢ(T x)`.
    pub fn transformed(&self, t: &IntMatrix) -> Result<Pencil> {
        Pencil::new(self.quadrics.iter().map(|q| q.transform(t)).collect())
    }

    /// `Bᵢ(x, y) = xᵀ Bᵢ y` in variables `x₀..x₄, y₀..y₄`.
    pub fn bilinear_forms(&self) -> Vec<MultiPoly> {
        self.grams
            .iter()
            .map(|b| {
                let mut f = MultiPoly::zero(Ring::Integers, 2 * NVARS);
                for i in 0..NVARS {
                    for j in 0..NVARS {
                        let mut e = vec![0u32; 2 * NVARS];
                        e[i] = 1;
                        e[NVARS + j] = 1;
                        f.add_term(e, b[(i, j)].clone());
                    }
                }
                f
            })
            .collect()
    }

    /// Are the generators still independent after reduction mod `p`?
    pub fn independent_mod(&self, p: u64) -> bool {
        let rows: Vec<Vec<u64>> = self
            .quadrics
            .iter()
            .map(|q| q.reduce_mod(p).to_vec())
            .collect();
        fp_rank(&rows, p).map(|r| r == NVARS).unwrap_or(false)
    }
}

fn leading_minors_mod(b: &[Vec<u64>], p: u64) -> [u64; 5] {
    std::array::from_fn(|k| {
        let n = k + 1;
        let sub: Vec<Vec<u64>> = b[..n].iter().map(|r| r[..n].to_vec()).collect();
        fp_det(&sub, p)
    })
}

/// A point of `H(𝔽_p)` at which all four leading minors are nonzero.
fn find_h_witness(pencil: &Pencil, p: u64, rng: &mut ChaCha8Rng, lines: usize) -> Option<Vec<u64>> {
    for _ in 0..lines {
        let a: Vec<u64> = (0..NVARS).map(|_| rng.gen_range(0..p)).collect();
        let b: Vec<u64> = (0..NVARS).map(|_| rng.gen_range(0..p)).collect();
        for s in 0..p {
            let t: Vec<u64> = a.iter().zip(&b).map(|(x, y)| (x + s * y) % p).collect();
            if t.iter().all(|&x| x == 0) {
                continue;
            }
            let m = pencil.gram_mod(&t, p);
            let lm = leading_minors_mod(&m, p);
            if lm[4] == 0 && lm[..4].iter().all(|&x| x != 0) {
                return Some(t);
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisChange {
    pub seed: u64,
    pub attempt: u32,
    #[serde(serialize_with = "ser_int_matrix")]
    pub transform: IntMatrix,
}

fn ser_int_matrix<S: serde::Serializer>(m: &IntMatrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>())
        .collect::<Vec<_>>()
        .serialize(s)
}

/// `α = (M₂/M₁², M₃/(M₂M₁))` together with the evidence that no `Mₖ`
/// vanishes identically on `H`.
#[derive(Debug, Clone)]
pub struct AlphaSymbol {
    pub minors: [MultiPoly; 4],
    /// `None` when the original coordinates already work
    pub basis_change: Option<BasisChange>,
    /// a point of `H(𝔽_p)` with all four minors nonzero
    pub witness_prime: u64,
    pub witness: Vec<u64>,
}

impl AlphaSymbol {
    pub fn a_num(&self) -> MultiPoly {
        self.minors[1].clone()
    }

    pub fn a_den(&self) -> MultiPoly {
        &self.minors[0] * &self.minors[0]
    }

    pub fn b_num(&self) -> MultiPoly {
        self.minors[2].clone()
    }

    pub fn b_den(&self) -> MultiPoly {
        &self.minors[1] * &self.minors[0]
    }

    /// `(M₁(t), …, M₄(t))`.
    pub fn minors_at(&self, t: &[Rat]) -> [Rat; 4] {
        std::array::from_fn(|k| self.minors[k].eval_rat(t))
    }

    /// The evaluated pair `(a, b)`; fails where one of `M₁, M₂` vanishes.
    pub fn evaluate(&self, t: &[Rat]) -> Result<(Rat, Rat)> {
        let m = self.minors_at(t);
        if m[..3].iter().any(Zero::is_zero) {
            return Err(Error::Degenerate("a leading minor vanishes at this point".into()));
        }
        Ok((&m[1] / (&m[0] * &m[0]), &m[2] / (&m[1] * &m[0])))
    }

    /// `(M₁, M₂/M₁, M₃/M₂, M₄/M₃)` at `t`.
    pub fn gram_schmidt_diagonal(&self, t: &[Rat]) -> Result<[Rat; 4]> {
        let m = self.minors_at(t);
        if m[..3].iter().any(Zero::is_zero) {
            return Err(Error::Degenerate("a leading minor vanishes at this point".into()));
        }
        Ok([
            m[0].clone(),
            &m[1] / &m[0],
            &m[2] / &m[1],
            &m[3] / &m[2],
        ])
    }
}

#[derive(Serialize)]
struct AlphaSymbolJson {
    m1: String,
    m2: String,
    m3: String,
    m4: String,
    a_num: String,
    a_den: String,
    b_num: String,
    b_den: String,
    basis_change: Option<BasisChange>,
    witness_prime: u64,
    witness: Vec<u64>,
}

impl Serialize for AlphaSymbol {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let f = |p: &MultiPoly| p.to_canonical_string("t");
        AlphaSymbolJson {
            m1: f(&self.minors[0]),
            m2: f(&self.minors[1]),
            m3: f(&self.minors[2]),
            m4: f(&self.minors[3]),
            a_num: f(&self.a_num()),
            a_den: f(&self.a_den()),
            b_num: f(&self.b_num()),
            b_den: f(&self.b_den()),
            basis_change: self.basis_change.clone(),
            witness_prime: self.witness_prime,
            witness: self.witness.clone(),
        }
        .serialize(s)
    }
}

/// Product of random elementary column operations; determinant 1.
pub fn random_unimodular(rng: &mut impl Rng, n: usize, steps: usize) -> IntMatrix {
    let mut t = IntMatrix::identity(n);
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i == j {
            continue;
        }
        let f = int(rng.gen_range(-2..=2));
        for r in 0..n {
            let v = &t[(r, i)] + &f * &t[(r, j)];
            t[(r, i)] = v;
        }
    }
    t
}

/// Leading minors of `𝓑(t)` as the quaternion representative of `α`.
///
/// If some `Mₖ` vanishes on `H` (tested on sampled points of `H(𝔽_p)`), seeded
/// random unimodular changes of the `x`-basis are tried; the one used is
/// recorded.
pub fn alpha_symbol(pencil: &Pencil, seed: u64) -> Result<AlphaSymbol> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    if let Some(w) = find_h_witness(pencil, WITNESS_PRIME, &mut rng, 4) {
        return Ok(AlphaSymbol {
            minors: pencil.leading_minors().clone(),
            basis_change: None,
            witness_prime: WITNESS_PRIME,
            witness: w,
        });
    }
    for attempt in 1..=MAX_BASIS_CHANGES {
        let t = random_unimodular(&mut rng, NVARS, 12);
        let changed = pencil.transformed(&t)?;
        if let Some(w) = find_h_witness(&changed, WITNESS_PRIME, &mut rng, 2) {
            return Ok(AlphaSymbol {
                minors: changed.leading_minors().clone(),
                basis_change: Some(BasisChange {
                    seed,
                    attempt,
                    transform: t,
                }),
                witness_prime: WITNESS_PRIME,
                witness: w,
            });
        }
    }
    Err(Error::MinorHypothesis)
}

/// Cofactors along row 4: `(𝓑_{4,0}, −𝓑_{4,1}, 𝓑_{4,2}, −𝓑_{4,3}, 𝓑_{4,4})`.
/// On `H` this vector lies in the kernel of `𝓑(t)`.
pub fn cramer_kernel(pencil: &Pencil) -> Vec<MultiPoly> {
    (0..NVARS)
        .map(|j| {
            let m = pencil.minor(&[4], &[j]);
            if j % 2 == 1 {
                -&m
            } else {
                m
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum LocusVerdict {
    /// emptiness over 𝔽̄_p certified at the given (bi)degree
    Empty {
        degree: Vec<u32>,
        rows: usize,
        columns: usize,
    },
    /// an explicit 𝔽_p-point of the locus
    Point { point: Vec<u64> },
    Inconclusive { attempts: Vec<DegreeAttempt> },
}

impl LocusVerdict {
    pub fn is_empty(&self) -> bool {
        matches!(self, LocusVerdict::Empty { .. })
    }

    fn from_emptiness(e: Emptiness) -> Self {
        match e {
            Emptiness::Empty(c) => LocusVerdict::Empty {
                degree: c.degree,
                rows: c.rows,
                columns: c.columns,
            },
            Emptiness::Inconclusive { attempts } => LocusVerdict::Inconclusive { attempts },
        }
    }
}

/// Regularity of `P` checked on the special fibre at `p`: the base locus
/// `{Q₀ = … = Q₄ = 0}` (equivalently `X̃ ∩ Δ`) and the singular locus of
/// `X̃ = {B₀(x,y) = … = B₄(x,y) = 0} ⊂ P⁴ × P⁴` are both empty over 𝔽̄_p.
/// Since `X̃` is proper over ℤ_(p), this implies the same over ℚ.
///
/// A point `(x, y)` of `X̃` is singular iff some member `B(λ)` kills both `x`
/// and `y`. Then `s = xy + yx` is a symmetric tensor with `B(λ)s = 0` and
/// `tr(Bᵢ s) = 0`, so emptiness of those pairs `(λ, s)` in `P⁴ × P(S₀)` rules
/// out singular points.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegularityCertificate {
    pub prime: u64,
    pub generators_independent_mod_p: bool,
    pub diagonal_avoidance: LocusVerdict,
    pub singular_locus: LocusVerdict,
    pub regular: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegularityOptions {
    pub base_dmax: u32,
    /// the singular-locus test tries bidegrees `(a, 1)` for `a ≤ lambda_degree_max`
    pub lambda_degree_max: u32,
}

impl Default for RegularityOptions {
    fn default() -> Self {
        RegularityOptions {
            base_dmax: 8,
            lambda_degree_max: 10,
        }
    }
}

/// Nonzero `k×k` minors of a symmetric 5×5 matrix, one per unordered pair
/// of row and column sets.
fn minors_of(gram: &[Vec<MultiPoly>], k: usize) -> Vec<MultiPoly> {
    let subsets: Vec<Vec<usize>> = (0u32..1 << NVARS)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..NVARS).filter(|&i| m & (1 << i) != 0).collect())
        .collect();
    let mut out = Vec::new();
    for (a, rows) in subsets.iter().enumerate() {
        for cols in &subsets[a..] {
            let m: Vec<Vec<MultiPoly>> = rows
                .iter()
                .map(|&i| cols.iter().map(|&j| gram[i][j].clone()).collect())
                .collect();
            let d = det_poly(&m);
            if !d.is_zero() {
                out.push(d);
            }
        }
    }
    out
}

/// Degree-3 generators of `𝓘₃`: the 2-saturation of the ℤ-span of the 3×3
/// minors of the generic Gram matrix, in the 15 coefficients (`PAIRS` order).
/// In characteristic 2 they vanish exactly on quadrics in at most two linear
/// forms, which is where smooth points can fail to exist.
pub fn universal_v3_generators() -> &'static [MultiPoly] {
    static GENS: OnceLock<Vec<MultiPoly>> = OnceLock::new();
    GENS.get_or_init(|| {
        let n = PAIRS.len();
        let gram: Vec<Vec<MultiPoly>> = (0..NVARS)
            .map(|i| {
                (0..NVARS)
                    .map(|j| {
                        let c = MultiPoly::var(Ring::Integers, n, pair_index(i, j));
                        if i == j {
                            c.scale(&Int::from(2))
                        } else {
                            c
                        }
                    })
                    .collect()
            })
            .collect();
        saturate_span_at_2(&minors_of(&gram, 3))
    })
}

/// Bilinear system `B(λ)s = 0` in `λ ∈ P⁴` and `s` in the trace-orthogonal
/// space `S₀ = {s ∈ Sym²: tr(Bᵢ s) = 0}`, with coefficients reduced mod `p`.
/// Variables are `λ₀..λ₄` followed by coordinates on a basis of `S₀`.
/// `𝓥₃ ∩ P`: the degree-3 generators of `𝓘₃` restricted to the pencil.
/// Saturate before restricting; saturating the restricted minors can be
/// strictly larger and is unsound at 2.
pub fn v3_ideal(pencil: &Pencil) -> Result<HomIdeal> {
    let images: Vec<MultiPoly> = (0..PAIRS.len())
        .map(|k| {
            let c: Vec<Int> = pencil.quadrics.iter().map(|q| q.coeffs()[k].clone()).collect();
            MultiPoly::linear(Ring::Integers, &c)
        })
        .collect();
    let gens = universal_v3_generators()
        .iter()
        .map(|g| g.compose(&images))
        .filter(|g| !g.is_zero())
        .collect();
    HomIdeal::new(NVARS, gens)
}

/// The 3×3 minors of `𝓑(t)` in `t₀..t₄`, without saturation.
pub fn v3_minor_ideal(pencil: &Pencil) -> Result<HomIdeal> {
    HomIdeal::new(NVARS, pencil.minors_of_size(3))
}

pub fn kernel_tensor_ideal(pencil: &Pencil, p: u64) -> Result<HomIdeal> {
    let b: Vec<Vec<Vec<u64>>> = pencil
        .grams
        .iter()
        .map(|m| {
            (0..NVARS)
                .map(|r| (0..NVARS).map(|c| int_mod(&m[(r, c)], p)).collect())
                .collect()
        })
        .collect();
    let trace_rows: Vec<Vec<u64>> = b
        .iter()
        .map(|bi| {
            crate::quadform::PAIRS
                .iter()
                .map(|&(i, j)| if i == j { bi[i][i] } else { (bi[i][j] + bi[j][i]) % p })
                .collect()
        })
        .collect();
    let basis = fp_nullspace(&trace_rows, crate::quadform::PAIRS.len(), p);
    let k = basis.len();
    let n = NVARS + k;
    let tensors: Vec<Vec<Vec<u64>>> = basis
        .iter()
        .map(|v| {
            let mut t = vec![vec![0u64; NVARS]; NVARS];
            for (idx, &(i, j)) in crate::quadform::PAIRS.iter().enumerate() {
                t[i][j] = v[idx];
                t[j][i] = v[idx];
            }
            t
        })
        .collect();
    let mut gens = Vec::with_capacity(NVARS * NVARS);
    for r in 0..NVARS {
        for c in 0..NVARS {
            let mut f = MultiPoly::zero(Ring::Integers, n);
            for (i, bi) in b.iter().enumerate() {
                for (j, t) in tensors.iter().enumerate() {
                    let v = (0..NVARS).fold(0, |acc, m| (acc + bi[r][m] * t[m][c]) % p);
                    if v != 0 {
                        let mut e = vec![0u32; n];
                        e[i] = 1;
                        e[NVARS + j] = 1;
                        f.add_term(e, Int::from(v));
                    }
                }
            }
            gens.push(f);
        }
    }
    HomIdeal::multigraded(vec![NVARS, k], gens)
}

/// Generators of the singular locus of `X̃`: the five bilinear forms and all
/// 5×5 minors of the 5×10 Jacobian `[Bᵢy | Bᵢx]`.
pub fn singular_locus_ideal(pencil: &Pencil) -> Result<HomIdeal> {
    let n = 2 * NVARS;
    let forms = pencil.bilinear_forms();
    // column j < 5: ∂/∂xⱼ = (Bᵢ y)ⱼ, column 5 + j: ∂/∂yⱼ = (Bᵢ x)ⱼ
    let jac: Vec<Vec<MultiPoly>> = pencil
        .grams
        .iter()
        .map(|b| {
            let mut row = Vec::with_capacity(n);
            for j in 0..NVARS {
                let c: Vec<Int> = (0..n)
                    .map(|k| if k >= NVARS { b[(j, k - NVARS)].clone() } else { Int::zero() })
                    .collect();
                row.push(MultiPoly::linear(Ring::Integers, &c));
            }
            for j in 0..NVARS {
                let c: Vec<Int> = (0..n)
                    .map(|k| if k < NVARS { b[(k, j)].clone() } else { Int::zero() })
                    .collect();
                row.push(MultiPoly::linear(Ring::Integers, &c));
            }
            row
        })
        .collect();
    let mut gens = forms;
    for mask in 0u32..(1 << n) {
        if mask.count_ones() != NVARS as u32 {
            continue;
        }
        let cols: Vec<usize> = (0..n).filter(|&c| mask & (1 << c) != 0).collect();
        let m: Vec<Vec<MultiPoly>> = jac
            .iter()
            .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
            .collect();
        let d = det_poly(&m);
        if !d.is_zero() {
            gens.push(d);
        }
    }
    HomIdeal::bigraded(n, NVARS, gens)
}

fn common_zero_mod_p(pencil: &Pencil, p: u64) -> Option<Vec<u64>> {
    let gf = crate::exact::gf::Gf::new(p as u32).ok()?;
    let qs: Vec<[u64; 15]> = pencil.quadrics.iter().map(|q| q.reduce_mod(p)).collect();
    gf.projective_points(NVARS)
        .into_iter()
        .map(|x| x.into_iter().map(u64::from).collect::<Vec<u64>>())
        .find(|x| {
            qs.iter().all(|c| {
                crate::quadform::PAIRS
                    .iter()
                    .zip(c)
                    .fold(0u64, |acc, (&(i, j), &v)| (acc + v * x[i] % p * x[j]) % p)
                    == 0
            })
        })
}

pub fn regularity_certificate(
    pencil: &Pencil,
    p: u64,
    opts: RegularityOptions,
) -> Result<RegularityCertificate> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if p == 2 {
        return Err(Error::Unsupported(
            "Bᵢ(x,x) = 2Qᵢ(x) vanishes identically in characteristic 2".into(),
        ));
    }
    let independent = pencil.independent_mod(p);
    let diagonal = match (p <= 13).then(|| common_zero_mod_p(pencil, p)).flatten() {
        Some(point) => LocusVerdict::Point { point },
        None => {
            let ideal = HomIdeal::new(
                NVARS,
                pencil.quadrics.iter().map(|q| q.to_poly()).collect(),
            )?;
            LocusVerdict::from_emptiness(empty_over_fpbar(&ideal, p, opts.base_dmax)?)
        }
    };
    let singular = if diagonal.is_empty() {
        let candidates: Vec<Vec<u32>> = (1..=opts.lambda_degree_max).map(|a| vec![a, 1]).collect();
        LocusVerdict::from_emptiness(empty_multihomogeneous(
            &kernel_tensor_ideal(pencil, p)?,
            p,
            &candidates,
        )?)
    } else {
        LocusVerdict::Inconclusive { attempts: vec![] }
    };
    let regular = independent && diagonal.is_empty() && singular.is_empty();
    Ok(RegularityCertificate {
        prime: p,
        generators_independent_mod_p: independent,
        diagonal_avoidance: diagonal,
        singular_locus: singular,
        regular,
    })
}

/// A ℚ-point `{[v], [w]}` of `X_P`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct XPoint {
    #[serde(serialize_with = "ser_ints")]
    pub v: Vec<Int>,
    #[serde(serialize_with = "ser_ints")]
    pub w: Vec<Int>,
}

fn ser_ints<S: serde::Serializer>(v: &[Int], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().serialize(s)
}

impl XPoint {
    /// `wᵀ Bᵢ v = 0` for all five generators.
    pub fn verify(&self, pencil: &Pencil) -> bool {
        pencil.grams.iter().all(|b| {
            let bv = b.mul_vec(&self.v);
            self.w.iter().zip(&bv).map(|(a, c)| a * c).sum::<Int>().is_zero()
        })
    }
}

fn proportional(a: &[Int], b: &[Int]) -> bool {
    (0..a.len()).all(|i| (i + 1..a.len()).all(|j| &a[i] * &b[j] == &a[j] * &b[i]))
}

/// From a kernel vector `v` of the member `Σ tᵢQᵢ`, solve `(Bᵢv)ᵀw = 0`.
pub fn x_point_from_singular_member(pencil: &Pencil, t: &[Int], v: &[Rat]) -> Result<XPoint> {
    if v.len() != NVARS || t.len() != NVARS {
        return Err(Error::Dimension("expected 5 coordinates".into()));
    }
    if v.iter().all(Zero::is_zero) {
        return Err(Error::ZeroArgument("kernel vector"));
    }
    let tr: Vec<Rat> = t.iter().map(|x| Rat::from_integer(x.clone())).collect();
    if !pencil.gram_at(&tr).mul_vec(v).iter().all(Zero::is_zero) {
        return Err(Error::NotInKernel);
    }
    let vi = primitive_integer_vector(v);
    let rows: Vec<Vec<Rat>> = pencil
        .grams
        .iter()
        .map(|b| b.mul_vec(&vi).into_iter().map(Rat::from_integer).collect())
        .collect();
    let ns = RatMatrix::from_rows(rows).nullspace();
    let w = ns
        .iter()
        .map(|x| primitive_integer_vector(x))
        .find(|w| !proportional(w, &vi))
        .ok_or_else(|| Error::Degenerate("only w = v solves the system".into()))?;
    Ok(XPoint { v: vi, w })
}

/// The three pencils used throughout, as polynomial strings.
pub mod examples {
    pub const THEOREM: [&str; 5] = [
        "x0*x1 + x2*x3",
        "x0^2 + x0*x1 + 3*x0*x2 + 2*x1^2 + x1*x2 + x1*x3 + 5*x2^2 + x2*x3 + x3^2",
        "x0^2 + 2*x0*x2 + x0*x3 + x0*x4 + x1*x2 + x1*x4 + x2*x4 + 4*x3*x4",
        "4*x0^2 + 4*x1^2 + 3*x1*x3 + 2*x1*x4 + 3*x2^2 + x2*x4 + x4^2",
        "x0^2 + x0*x2 + x0*x3 + 4*x0*x4 + 3*x1*x2 + 4*x1*x4 + 2*x2*x3 + 2*x3^2 + x4^2",
    ];

    pub const SUM_OF_SQUARES: [&str; 5] = [
        "x0^2 + x1^2 + x2^2 + x3^2",
        "x0*x1 + x0*x4 + x1*x3 - x1*x4 + x2*x3 + x3*x4",
        "x0^2 - x0*x2 - x0*x4 + x1*x2 - x1*x3 - x1*x4 - x2^2 - x2*x4 - x3*x4 - x4^2",
        "x0*x1 + x0*x2 + x0*x4 + x1^2 - x1*x4 + x2^2 + x2*x3 - x2*x4 + x3^2",
        "x0^2 + x0*x1 + x0*x2 - x0*x4 - x1^2 - x1*x2 + x1*x3 - x1*x4 - x2*x3 - x2*x4 + x4^2",
    ];

    pub const THREE_ADIC: [&str; 5] = [
        "6*x0^2 - 3*x1^2 + 2*x2^2 - x3^2",
        "x0*x1 + x2*x3",
        "x0^2 - x0*x2 - x0*x3 - x1^2 + x1*x2 - x2^2 - x2*x4 + x3^2 - x3*x4 - x4^2",
        "x0^2 + x0*x1 + x0*x2 - x0*x3 + x0*x4 - x1^2 + x1*x2 - x1*x3 + x2*x3 - x2*x4 - x3^2 - x3*x4",
        "x0^2 - x0*x3 + x1^2 + x1*x2 + x1*x3 + x2^2 + x3*x4 - x4^2",
    ];

    pub fn pencil(lines: &[&str; 5]) -> super::Pencil {
        super::Pencil::parse(&lines.join("\n")).expect("built-in pencil")
    }
}

#[cfg(test)]
mod tests {
    use super::examples::*;
    use super::*;
    use crate::exact::rat;

    fn t(s: &str) -> MultiPoly {
        MultiPoly::parse(s, "t", 5).unwrap()
    }

    #[test]
    fn diagonal_pencil() {
        let p = Pencil::parse("x0^2\nx1^2\nx2^2\nx3^2\nx4^2").unwrap();
        assert_eq!(p.det(), &t("32*t0*t1*t2*t3*t4"));
        let a = alpha_symbol(&p, 0).unwrap();
        assert!(a.basis_change.is_none());
        assert_eq!(a.minors[0], t("2*t0"));
        assert_eq!(a.minors[1], t("4*t0*t1"));
        assert_eq!(a.minors[2], t("8*t0*t1*t2"));
        // (4t₀t₁/4t₀², 8t₀t₁t₂/8t₀²t₁) = (t₁/t₀, t₂/t₀)
        let pt = [rat(3, 1), rat(5, 1), rat(7, 1), rat(1, 1), rat(0, 1)];
        assert_eq!(a.evaluate(&pt).unwrap(), (rat(5, 3), rat(7, 3)));
    }

    #[test]
    fn theorem_pencil_first_minor() {
        let p = pencil(&THEOREM);
        assert_eq!(p.leading_minors()[0], t("2*t1 + 2*t2 + 8*t3 + 2*t4"));
    }

    #[test]
    fn dependent_and_malformed_input() {
        let mut lines = THEOREM.map(String::from);
        lines[4] = format!("{} + {}", THEOREM[0], THEOREM[1]);
        assert_eq!(Pencil::parse(&lines.join("\n")), Err(Error::DependentGenerators));
        assert!(Pencil::parse(&THEOREM[..4].join("\n")).is_err());
        assert!(Pencil::parse("x0^2\nx1^2\nx2^2\nx3^2\nz4^2").is_err());
    }

    #[test]
    fn text_round_trip() {
        for lines in [THEOREM, SUM_OF_SQUARES, THREE_ADIC] {
            let p = pencil(&lines);
            assert_eq!(Pencil::parse(&p.to_text()).unwrap(), p);
        }
    }

    #[test]
    fn det_is_quintic_and_evaluates() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for lines in [THEOREM, THREE_ADIC] {
            let p = pencil(&lines);
            assert!(p.det().is_homogeneous());
            assert_eq!(p.det().degree(), Some(5));
            for _ in 0..100 {
                let pt: Vec<Rat> = (0..5).map(|_| rat(rng.gen_range(-20..=20), rng.gen_range(1..=4))).collect();
                assert_eq!(p.det().eval_rat(&pt), p.gram_at(&pt).det());
            }
        }
    }

    #[test]
    fn gram_schmidt_minors() {
        use crate::quadform::diagonalize_rat;
        let p = pencil(&THEOREM);
        let a = alpha_symbol(&p, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut checked = 0;
        while checked < 50 {
            let pt: Vec<Rat> = (0..5).map(|_| rat(rng.gen_range(-9..=9), 1)).collect();
            let Ok(d) = a.gram_schmidt_diagonal(&pt) else { continue };
            if d[3].is_zero() || a.minors_at(&pt)[3].is_zero() {
                continue;
            }
            let (_, diag) = diagonalize_rat(&p.gram_at(&pt));
            assert_eq!(&diag[..4], &d[..]);
            checked += 1;
        }
    }

    #[test]
    fn cramer_vector_is_a_kernel_vector_on_h() {
        let p = pencil(&THEOREM);
        let k = cramer_kernel(&p);
        let prime = 101;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut found = 0;
        while found < 50 {
            let a: Vec<u64> = (0..5).map(|_| rng.gen_range(0..prime)).collect();
            let b: Vec<u64> = (0..5).map(|_| rng.gen_range(0..prime)).collect();
            for s in 0..prime {
                let pt: Vec<u64> = a.iter().zip(&b).map(|(x, y)| (x + s * y) % prime).collect();
                if p.det().eval_mod(&pt, prime) != 0 {
                    continue;
                }
                let v: Vec<u64> = k.iter().map(|f| f.eval_mod(&pt, prime)).collect();
                let m = p.gram_mod(&pt, prime);
                for row in &m {
                    let s: u64 = row.iter().zip(&v).map(|(x, y)| x * y % prime).sum::<u64>() % prime;
                    assert_eq!(s, 0);
                }
                found += 1;
            }
        }
    }

    #[test]
    fn minor_hypothesis_retry() {
        // no x0² anywhere: M₁ ≡ 0, a basis change is required
        let p = Pencil::parse("x0*x1\nx1^2\nx2^2 + x0*x2\nx3^2\nx4^2 + x0*x4").unwrap();
        assert!(p.leading_minors()[0].is_zero());
        let a = alpha_symbol(&p, 3).unwrap();
        let change = a.basis_change.as_ref().unwrap();
        assert!(change.transform.is_unimodular());
        assert!(!a.minors[0].is_zero());
        assert_eq!(&p.transformed(&change.transform).unwrap().leading_minors()[..], &a.minors[..]);
    }

    #[test]
    fn x_point_of_theorem_pencil() {
        let p = pencil(&THEOREM);
        let v = [rat(0, 1), rat(0, 1), rat(0, 1), rat(0, 1), rat(1, 1)];
        let x = x_point_from_singular_member(&p, &[int(1), int(0), int(0), int(0), int(0)], &v).unwrap();
        assert!(x.verify(&p));
        // B₀v = B₁v = 0 here, so the admissible w form a plane
        let span = RatMatrix::from_rows(vec![
            x.w.iter().cloned().map(Rat::from_integer).collect(),
            [1, -3, -2, 1, 4].map(|c| rat(c, 1)).to_vec(),
            [2, -2, 4, -1, 0].map(|c| rat(c, 1)).to_vec(),
        ]);
        assert_eq!(span.rank(), 2);
        // the vector (1,−3,2,4,1) pairs with no v: its images Bᵢw have rank 5
        let claimed = XPoint { v: x.v.clone(), w: [1, -3, 2, 4, 1].map(int).to_vec() };
        assert!(!claimed.verify(&p));
        let imgs = RatMatrix::from_rows(
            p.grams()
                .iter()
                .map(|b| b.mul_vec(&claimed.w).into_iter().map(Rat::from_integer).collect())
                .collect(),
        );
        assert_eq!(imgs.rank(), 5);
        let bad = [rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1), rat(0, 1)];
        assert_eq!(
            x_point_from_singular_member(&p, &[int(1), int(0), int(0), int(0), int(0)], &bad),
            Err(Error::NotInKernel)
        );
    }

    #[test]
    fn x_point_of_diagonal_pencil() {
        // member x1² + x2² + x3² + x4² has kernel e₀; Bᵢe₀ = 2δᵢ₀e₀
        let p = Pencil::parse("x0^2\nx1^2\nx2^2\nx3^2\nx4^2").unwrap();
        let v = [rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1), rat(0, 1)];
        let x = x_point_from_singular_member(&p, &[int(0), int(1), int(1), int(1), int(1)], &v).unwrap();
        assert!(x.verify(&p));
        assert!(x.w[0].is_zero());
    }

    #[test]
    fn base_point_breaks_diagonal_avoidance() {
        // every generator vanishes at (0:0:0:0:1)
        let p = Pencil::parse("x0^2\nx1^2 + x0*x4\nx2^2 + x1*x4\nx3^2 + x2*x4\nx0*x1 + x3*x4").unwrap();
        let c = regularity_certificate(&p, 5, RegularityOptions::default()).unwrap();
        assert!(!c.regular);
        assert_eq!(c.diagonal_avoidance, LocusVerdict::Point { point: vec![0, 0, 0, 0, 1] });
        assert!(regularity_certificate(&p, 2, RegularityOptions::default()).is_err());
    }

    /// Rank-3 members over 𝔽_p whose kernel plane `K` carries a nonzero
    /// symmetric tensor orthogonal to every `Bᵢ`, found by enumeration.
    fn degenerate_rank3_members(pencil: &Pencil, p: u64) -> Vec<Vec<u64>> {
        let gf = crate::exact::gf::Gf::new(p as u32).unwrap();
        let grams: Vec<Vec<Vec<u64>>> = (0..NVARS)
            .map(|i| {
                let mut t = vec![0u64; NVARS];
                t[i] = 1;
                pencil.gram_mod(&t, p)
            })
            .collect();
        let quad = |b: &[Vec<u64>], u: &[u64], w: &[u64]| {
            (0..NVARS).fold(0, |acc, r| {
                (0..NVARS).fold(acc, |acc, c| (acc + u[r] * b[r][c] % p * w[c]) % p)
            })
        };
        gf.projective_points(NVARS)
            .into_iter()
            .map(|l| l.into_iter().map(u64::from).collect::<Vec<u64>>())
            .filter(|l| {
                let m = pencil.gram_mod(l, p);
                let k = fp_nullspace(&m, NVARS, p);
                if k.len() != 2 {
                    return false;
                }
                let rows: Vec<Vec<u64>> = grams
                    .iter()
                    .map(|b| vec![quad(b, &k[0], &k[0]), quad(b, &k[0], &k[1]), quad(b, &k[1], &k[1])])
                    .collect();
                fp_rank(&rows, p).unwrap() < 3
            })
            .collect()
    }

    #[test]
    fn regularity_of_the_main_pencils() {
        let thm = examples::pencil(&examples::THEOREM);
        let c = regularity_certificate(&thm, 3, RegularityOptions::default()).unwrap();
        assert!(c.regular, "{c:?}");
        let cor = examples::pencil(&examples::SUM_OF_SQUARES);
        let c = regularity_certificate(&cor, 5, RegularityOptions::default()).unwrap();
        assert!(c.regular, "{c:?}");
        // independent search finds nothing to contradict the certificates
        assert!(degenerate_rank3_members(&thm, 3).is_empty());
        assert!(degenerate_rank3_members(&cor, 5).is_empty());
    }

    #[test]
    fn theorem_pencil_has_bad_reduction_at_5() {
        let thm = examples::pencil(&examples::THEOREM);
        let c = regularity_certificate(&thm, 5, RegularityOptions::default()).unwrap();
        assert!(!c.regular);
        let LocusVerdict::Point { point } = &c.diagonal_avoidance else {
            panic!("{:?}", c.diagonal_avoidance)
        };
        assert_eq!(point, &vec![1, 3, 1, 2, 4]);
        let x: Vec<Int> = point.iter().map(|&v| int(v as i64)).collect();
        for q in thm.quadrics() {
            assert!(int_mod(&q.eval(&x), 5) == 0);
        }
        // a rank-3 member over 𝔽₅ meets the singular locus as well
        assert_eq!(degenerate_rank3_members(&thm, 5), vec![vec![0, 1, 4, 1, 2]]);
        let ideal = kernel_tensor_ideal(&thm, 5).unwrap();
        let e = empty_multihomogeneous(&ideal, 5, &[vec![7, 1]]).unwrap();
        assert!(!e.is_empty());
    }

    #[test]
    fn diagonal_pencil_is_not_regular() {
        // x0² is a rank-1 member; no base points though
        let p = Pencil::parse("x0^2\nx1^2\nx2^2\nx3^2\nx4^2").unwrap();
        let c = regularity_certificate(&p, 7, RegularityOptions { base_dmax: 8, lambda_degree_max: 6 }).unwrap();
        assert!(c.diagonal_avoidance.is_empty());
        assert!(!c.singular_locus.is_empty());
        assert!(!c.regular);
    }

    #[test]
    fn rank_two_locus() {
        use crate::nullstellensatz::{empty_all_primes, Scope};
        let thm = examples::pencil(&examples::THEOREM);
        let e = empty_all_primes(&v3_ideal(&thm).unwrap(), false, 12).unwrap();
        let c = e.certificate().expect("all-primes certificate");
        assert_eq!(c.scope, Scope::AllPrimes { exceptional: vec![] });
        assert_eq!(c.lattice_index.as_deref(), Some("1"));
        // the raw restricted minors leave 2-torsion; saturating them afterwards
        // certifies too, but that shortcut is not sound in general
        let raw = v3_minor_ideal(&thm).unwrap();
        assert!(!empty_all_primes(&raw, false, 4).unwrap().is_empty());
        assert!(empty_all_primes(&raw, true, 4).unwrap().is_empty());
        // x0*x1 is a rank-2 member
        let p = Pencil::parse("x0*x1\nx2^2\nx3^2\nx4^2 + x0*x2\nx1*x3 + x2*x4").unwrap();
        assert!(!empty_all_primes(&v3_ideal(&p).unwrap(), false, 8).unwrap().is_empty());
        assert_eq!(thm.minors_of_size(5), vec![thm.det().clone()]);
    }

    #[test]
    fn saturated_generators_cut_out_the_bad_quadrics() {
        use crate::exact::gf::Gf;
        use crate::quadform::GfQuadric;
        let gens = universal_v3_generators();
        assert_eq!(gens.len(), 50);
        // over 𝔽_2: quadrics in at most two linear forms; over 𝔽_3: rank ≤ 2
        for p in [2u64, 3] {
            let gf = Gf::new(p as u32).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(p);
            let mut low = 0;
            for trial in 0..4000 {
                let c: [u64; 15] = if trial % 2 == 0 {
                    std::array::from_fn(|_| rng.gen_range(0..p))
                } else {
                    // a binary form in two random linear forms
                    let l: [[i64; 5]; 2] = std::array::from_fn(|_| std::array::from_fn(|_| rng.gen_range(0..p as i64)));
                    let (a, b, d) = (rng.gen_range(0..p as i64), rng.gen_range(0..p as i64), rng.gen_range(0..p as i64));
                    std::array::from_fn(|k| {
                        let (i, j) = PAIRS[k];
                        let prod = |u: &[i64; 5], v: &[i64; 5]| if i == j { u[i] * v[i] } else { u[i] * v[j] + u[j] * v[i] };
                        (a * prod(&l[0], &l[0]) + b * prod(&l[0], &l[1]) + d * prod(&l[1], &l[1])).rem_euclid(p as i64) as u64
                    })
                };
                if c.iter().all(|&x| x == 0) {
                    continue;
                }
                let vanish = gens.iter().all(|g| g.eval_mod(&c, p) == 0);
                let q = QuadricForm::from_i64(c.map(|x| x as i64));
                let bad = if p == 2 {
                    GfQuadric::from_form(&q, &gf).essential_rank(&gf) <= 2
                } else {
                    crate::exact::fp::fp_rank(&q.gram().to_rows().iter().map(|r| r.iter().map(|x| int_mod(x, p)).collect()).collect::<Vec<_>>(), p).unwrap() <= 2
                };
                assert_eq!(vanish, bad, "{c:?} mod {p}");
                low += bad as usize;
            }
            assert!(low > 1000);
        }
    }
}
