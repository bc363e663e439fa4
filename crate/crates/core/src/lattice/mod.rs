//! Lattices as positive-definite rational Gram matrices.
//!
//! A vector is a coordinate row `v` in the lattice basis and `(u, v) = u G v^T`.
//! Sublattices and overlattices carry explicit rational change-of-basis
//! matrices, canonicalized with the Hermite normal form.

pub mod enumerate;
pub mod hnf;
pub mod lll;

use std::sync::{Arc, OnceLock};

use num::{BigInt, Integer, One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::qseries::{self, QSeries};
use crate::rational::{self, q, Q};
use enumerate::{Query, Tables};
use hnf::RatMatrix;

/// Largest rank for which enumeration-based operations run.
pub const DEFAULT_RANK_CAP: usize = 32;

struct Prepared {
    /// Rows are the reduced basis in original coordinates.
    transform: Vec<Vec<i64>>,
    inverse: RatMatrix,
    reduced_gram: RatMatrix,
    tables: Tables,
}

#[derive(Clone)]
pub struct LatticeForm {
    gram: RatMatrix,
    rank_cap: usize,
    prepared: OnceLock<Arc<Prepared>>,
}

impl PartialEq for LatticeForm {
    fn eq(&self, other: &Self) -> bool {
        self.gram == other.gram
    }
}

impl Eq for LatticeForm {}

impl std::fmt::Debug for LatticeForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let rows: Vec<Vec<String>> = self
            .gram
            .iter()
            .map(|r| r.iter().map(rational::format).collect())
            .collect();
        f.debug_struct("LatticeForm").field("gram", &rows).finish()
    }
}

/// A lattice vector with integer coordinates, as returned by enumeration.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LatticeVector {
    pub coords: Vec<i64>,
    pub norm: Q,
}

/// A point of a coset `offset + L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetVector {
    pub coords: Vec<Q>,
    pub norm: Q,
}

pub fn int_vec(v: &[i64]) -> Vec<Q> {
    v.iter().map(|&x| q(x)).collect()
}

pub fn is_integral_vec(v: &[Q]) -> bool {
    v.iter().all(rational::is_integer)
}

pub fn to_i64_vec(v: &[Q]) -> Option<Vec<i64>> {
    v.iter()
        .map(|x| rational::is_integer(x).then(|| x.to_integer().to_i64()).flatten())
        .collect()
}

fn vec_json(v: &[Q]) -> Value {
    Value::Array(v.iter().map(rational::to_json).collect())
}

pub fn matrix_json(m: &[Vec<Q>]) -> Value {
    Value::Array(m.iter().map(|r| vec_json(r)).collect())
}

pub fn matrix_from_json(v: &Value) -> Option<RatMatrix> {
    v.as_array()?
        .iter()
        .map(|r| r.as_array()?.iter().map(rational::from_json).collect())
        .collect()
}

impl LatticeForm {
    /// Validates squareness, symmetry and positive definiteness (via the
    /// pivots of symmetric elimination, i.e. ratios of leading principal minors).
    pub fn new(gram: RatMatrix) -> Result<Self> {
        let n = gram.len();
        if n == 0 || gram.iter().any(|r| r.len() != n) {
            return Err(Error::NotSquare);
        }
        for i in 0..n {
            for j in 0..i {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        if lll::checked_gram_schmidt(&gram).is_none() {
            return Err(Error::NotPositiveDefinite);
        }
        Ok(LatticeForm {
            gram,
            rank_cap: DEFAULT_RANK_CAP,
            prepared: OnceLock::new(),
        })
    }

    pub fn from_integer_gram(rows: &[Vec<i64>]) -> Result<Self> {
        Self::new(rows.iter().map(|r| int_vec(r)).collect())
    }

    /// Gram matrix of the rows of `basis` under the standard inner product.
    pub fn from_basis(basis: &[Vec<Q>]) -> Result<Self> {
        let gram = hnf::mat_mul(basis, &hnf::transpose(basis));
        Self::new(gram).map_err(|e| match e {
            Error::NotPositiveDefinite => Error::RankDeficient,
            e => e,
        })
    }

    /// Lattice spanned by possibly dependent rational generators in `R^m`.
    pub fn from_generators(generators: &[Vec<Q>]) -> Result<Self> {
        let dim = generators.first().map_or(0, Vec::len);
        let basis = hnf::hnf_rational(generators);
        if basis.len() != dim {
            return Err(Error::RankDeficient);
        }
        Self::from_basis(&basis)
    }

    pub fn identity(n: usize) -> Self {
        let gram = (0..n)
            .map(|i| (0..n).map(|j| q(i64::from(i == j))).collect())
            .collect();
        Self::new(gram).expect("identity is positive definite")
    }

    /// The `E8` root lattice in its Cartan-matrix basis.
    pub fn e8() -> Self {
        // Dynkin diagram: chain 0-1-2-3-4-5-6 with node 7 attached to node 4
        let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7)];
        let mut g = vec![vec![0i64; 8]; 8];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = 2;
        }
        for (a, b) in edges {
            g[a][b] = -1;
            g[b][a] = -1;
        }
        Self::from_integer_gram(&g).expect("E8 Cartan matrix is positive definite")
    }

    /// The even unimodular `D16+`: `D16` together with the all-halves glue vector.
    pub fn d16_plus() -> Self {
        let n = 16;
        let mut gens: Vec<Vec<Q>> = Vec::new();
        for i in 0..n - 1 {
            let mut v = vec![q(0); n];
            v[i] = q(1);
            v[i + 1] = q(-1);
            gens.push(v);
        }
        let mut v = vec![q(0); n];
        v[n - 2] = q(1);
        v[n - 1] = q(1);
        gens.push(v);
        gens.push(vec![rational::frac(1, 2); n]);
        Self::from_generators(&gens).expect("D16+ generators span R^16")
    }

    pub fn direct_sum(&self, other: &LatticeForm) -> Self {
        let (a, b) = (self.rank(), other.rank());
        let mut gram = vec![vec![q(0); a + b]; a + b];
        for i in 0..a {
            gram[i][..a].clone_from_slice(&self.gram[i]);
        }
        for i in 0..b {
            gram[a + i][a..].clone_from_slice(&other.gram[i]);
        }
        Self::new(gram).expect("direct sum of positive-definite forms")
    }

    pub fn with_rank_cap(mut self, cap: usize) -> Self {
        self.rank_cap = cap;
        self
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn rank_cap(&self) -> usize {
        self.rank_cap
    }

    pub fn gram(&self) -> &RatMatrix {
        &self.gram
    }

    pub fn inner(&self, u: &[Q], v: &[Q]) -> Q {
        let mut acc = Q::zero();
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                if !vj.is_zero() {
                    acc += ui * &self.gram[i][j] * vj;
                }
            }
        }
        acc
    }

    pub fn norm(&self, v: &[Q]) -> Q {
        self.inner(v, v)
    }

    pub fn is_integral(&self) -> bool {
        self.gram.iter().flatten().all(rational::is_integer)
    }

    pub fn determinant(&self) -> Q {
        hnf::det(&self.gram)
    }

    /// Integral with determinant 1.
    pub fn is_unimodular(&self) -> bool {
        self.is_integral() && self.determinant().is_one()
    }

    /// An integral form is even iff its diagonal is.
    pub fn is_even(&self) -> Result<bool> {
        if !self.is_integral() {
            return Err(Error::NonIntegralForm);
        }
        Ok(self.gram.iter().enumerate().all(|(i, r)| rational::parity(&r[i]) == Some(0)))
    }

    /// The sublattice spanned by `child_basis` (rows in this lattice's coordinates).
    pub fn sublattice(&self, child_basis: RatMatrix) -> Result<SublatticeRelation> {
        if child_basis.len() != self.rank() || child_basis.iter().any(|r| r.len() != self.rank()) {
            return Err(Error::RankDeficient);
        }
        let gram = hnf::congruence(&child_basis, &self.gram);
        let child = LatticeForm::new(gram).map_err(|_| Error::RankDeficient)?;
        Ok(SublatticeRelation {
            parent: self.clone(),
            child_basis,
            child,
        })
    }

    /// `{ v : (v,v) even }`, the kernel of the norm-parity functional.
    pub fn even_sublattice(&self) -> Result<SublatticeRelation> {
        if self.is_even()? {
            return Err(Error::AlreadyEven);
        }
        let f: Vec<Vec<u8>> = (0..self.rank())
            .map(|i| vec![rational::parity(&self.gram[i][i]).expect("integral")])
            .collect();
        self.sublattice(hnf::to_rational(&hnf::kernel_mod2(&f)))
    }

    /// A characteristic vector `w` solves `(e_i, w) = (e_i, e_i) mod 2`; the
    /// shadow is `w/2 + L`.
    pub fn shadow_coset(&self) -> Result<ShadowCoset> {
        let base = self.even_sublattice()?;
        if !self.determinant().is_one() {
            return Err(Error::NotUnimodular);
        }
        let n = self.rank();
        let a: Vec<Vec<u8>> = self
            .gram
            .iter()
            .map(|r| r.iter().map(|x| rational::parity(x).expect("integral")).collect())
            .collect();
        let b: Vec<u8> = (0..n).map(|i| a[i][i]).collect();
        let w = hnf::f2_solve(&a, &b).ok_or(Error::NotUnimodular)?;
        let representative = w.iter().map(|&x| rational::frac(i64::from(x), 2)).collect();
        Ok(ShadowCoset { base, representative })
    }

    fn check_cap(&self) -> Result<()> {
        if self.rank() > self.rank_cap {
            return Err(Error::RankCapExceeded {
                rank: self.rank(),
                cap: self.rank_cap,
            });
        }
        Ok(())
    }

    fn prepared(&self) -> Arc<Prepared> {
        self.prepared
            .get_or_init(|| {
                let red = lll::lll(&self.gram);
                let transform: Vec<Vec<i64>> = red
                    .transform
                    .iter()
                    .map(|r| r.iter().map(|x| x.to_i64().expect("LLL transform fits in i64")).collect())
                    .collect();
                let inverse = hnf::inverse(&hnf::to_rational(&red.transform)).expect("unimodular transform");
                let tables = Tables::new(&red.gram);
                Arc::new(Prepared {
                    transform,
                    inverse,
                    reduced_gram: red.gram,
                    tables,
                })
            })
            .clone()
    }

    /// Maps reduced coordinates `y / modulus` back to original coordinates.
    fn lift(p: &Prepared, y: &[i64]) -> Vec<i128> {
        let n = y.len();
        let mut out = vec![0i128; n];
        for (i, &yi) in y.iter().enumerate() {
            if yi != 0 {
                for j in 0..n {
                    out[j] += yi as i128 * p.transform[i][j] as i128;
                }
            }
        }
        out
    }

    fn budget(p: &Prepared, bound: &Q, modulus: &BigInt) -> BigInt {
        (bound * Q::from_integer(p.tables.norm_denominator(modulus))).floor().to_integer()
    }

    /// Nonzero vectors of norm at most `bound`, one per `+-` pair, with the first
    /// nonzero coordinate positive, in lexicographic order.
    pub fn short_vectors(&self, bound: &Q) -> Result<Vec<LatticeVector>> {
        self.check_cap()?;
        let p = self.prepared();
        let n = self.rank();
        let modulus = BigInt::one();
        let query = Query {
            modulus: modulus.clone(),
            residues: vec![BigInt::zero(); n],
            budget: Self::budget(&p, bound, &modulus),
            symmetric: true,
        };
        let den = Q::from_integer(p.tables.norm_denominator(&modulus));
        let mut out: Vec<LatticeVector> = enumerate::collect(&p.tables, &query)
            .into_iter()
            .map(|(y, total)| {
                let mut coords: Vec<i64> = Self::lift(&p, &y)
                    .into_iter()
                    .map(|x| i64::try_from(x).expect("coordinate fits in i64"))
                    .collect();
                if coords.iter().find(|&&c| c != 0).is_some_and(|&c| c < 0) {
                    coords.iter_mut().for_each(|c| *c = -*c);
                }
                LatticeVector {
                    coords,
                    norm: Q::from_integer(total) / &den,
                }
            })
            .collect();
        out.sort();
        Ok(out)
    }

    /// The first vector in [`short_vectors`](Self::short_vectors) order that
    /// `accept` takes, found by a depth-first search that stops there.
    pub fn first_short_vector(
        &self,
        bound: &Q,
        mut accept: impl FnMut(&LatticeVector) -> bool,
    ) -> Result<Option<LatticeVector>> {
        self.check_cap()?;
        let n = self.rank();
        // coordinate 0 outermost gives lexicographic order
        let rev: RatMatrix = (0..n)
            .map(|i| (0..n).map(|j| self.gram[n - 1 - i][n - 1 - j].clone()).collect())
            .collect();
        let tables = Tables::new(&rev);
        let modulus = BigInt::one();
        let den = Q::from_integer(tables.norm_denominator(&modulus));
        let query = Query {
            budget: (bound * &den).floor().to_integer(),
            residues: vec![BigInt::zero(); n],
            modulus,
            symmetric: true,
        };
        let to_vector = |y: &[i64], total: &BigInt| LatticeVector {
            coords: y.iter().rev().copied().collect(),
            norm: Q::from_integer(total.clone()) / &den,
        };
        let hit = enumerate::first_match(&tables, &query, &mut |y, total| accept(&to_vector(y, total)));
        Ok(hit.map(|y| {
            let coords: Vec<i64> = y.into_iter().rev().collect();
            let norm = self.norm(&int_vec(&coords));
            LatticeVector { coords, norm }
        }))
    }

    /// Smallest nonzero norm. The smallest diagonal entry of the reduced Gram
    /// matrix is an attained norm, so one enumeration at that bound suffices.
    pub fn min_norm(&self) -> Result<Q> {
        self.check_cap()?;
        let p = self.prepared();
        let bound = (0..self.rank())
            .map(|i| p.reduced_gram[i][i].clone())
            .min()
            .expect("rank >= 1");
        let v = self.short_vectors(&bound)?;
        Ok(v.into_iter().map(|v| v.norm).min().expect("a basis vector attains the bound"))
    }

    fn coset_query(&self, p: &Prepared, offset: &[Q], bound: &Q) -> Result<(Query, Q)> {
        if offset.len() != self.rank() {
            return Err(Error::DimensionMismatch {
                expected: self.rank(),
                got: offset.len(),
            });
        }
        let reduced = hnf::vec_mat(offset, &p.inverse);
        let modulus = reduced.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
        let m = Q::from_integer(modulus.clone());
        let residues = reduced
            .iter()
            .map(|x| (x * &m).to_integer().mod_floor(&modulus))
            .collect();
        let den = Q::from_integer(p.tables.norm_denominator(&modulus));
        Ok((
            Query {
                budget: Self::budget(p, bound, &modulus),
                modulus,
                residues,
                symmetric: false,
            },
            den,
        ))
    }

    /// Every point of `offset + L` with norm at most `bound`, sorted by coordinates.
    pub fn coset_short_vectors(&self, offset: &[Q], bound: &Q) -> Result<Vec<CosetVector>> {
        self.check_cap()?;
        let p = self.prepared();
        let (query, den) = self.coset_query(&p, offset, bound)?;
        let m = Q::from_integer(query.modulus.clone());
        let mut out: Vec<CosetVector> = enumerate::collect(&p.tables, &query)
            .into_iter()
            .map(|(y, total)| CosetVector {
                coords: Self::lift(&p, &y).into_iter().map(|x| Q::from_integer(BigInt::from(x)) / &m).collect(),
                norm: Q::from_integer(total) / &den,
            })
            .collect();
        out.sort_by(|a, b| a.coords.cmp(&b.coords));
        Ok(out)
    }

    /// Smallest norm in `offset + L`, doubling the search bound from the
    /// smallest reduced diagonal entry until the coset is hit.
    pub fn coset_min(&self, offset: &[Q]) -> Result<Q> {
        self.check_cap()?;
        let p = self.prepared();
        let mut bound = (0..self.rank())
            .map(|i| p.reduced_gram[i][i].clone())
            .min()
            .expect("rank >= 1");
        loop {
            let (query, den) = self.coset_query(&p, offset, &bound)?;
            let counts = enumerate::count(&p.tables, &query);
            if let Some((total, _)) = counts.into_iter().next() {
                return Ok(Q::from_integer(total) / den);
            }
            bound *= q(2);
        }
    }

    fn theta_precision(up_to: &Q) -> i64 {
        (up_to * q(qseries::GRID)).floor().to_integer().to_i64().expect("bound fits") + 1
    }

    fn counts_to_series(counts: impl IntoIterator<Item = (Q, u64)>, precision: i64) -> Result<QSeries> {
        let mut terms = Vec::new();
        for (norm, c) in counts {
            let i = qseries::to_index(&norm).ok_or_else(|| Error::OffGrid(rational::format(&norm)))?;
            terms.push((i, q(c as i64)));
        }
        Ok(QSeries::from_terms(terms, precision))
    }

    /// Theta series counted exactly up to and including norm `up_to`.
    pub fn theta_by_enumeration(&self, up_to: &Q) -> Result<QSeries> {
        self.check_cap()?;
        let p = self.prepared();
        let modulus = BigInt::one();
        let query = Query {
            modulus: modulus.clone(),
            residues: vec![BigInt::zero(); self.rank()],
            budget: Self::budget(&p, up_to, &modulus),
            symmetric: true,
        };
        let den = Q::from_integer(p.tables.norm_denominator(&modulus));
        let counts = enumerate::count(&p.tables, &query)
            .into_iter()
            .map(|(t, c)| (Q::from_integer(t) / &den, 2 * c))
            .chain(std::iter::once((Q::zero(), 1)));
        Self::counts_to_series(counts, Self::theta_precision(up_to))
    }

    /// Theta series of the coset `offset + L` up to and including norm `up_to`.
    pub fn coset_theta(&self, offset: &[Q], up_to: &Q) -> Result<QSeries> {
        self.check_cap()?;
        let p = self.prepared();
        let (query, den) = self.coset_query(&p, offset, up_to)?;
        let counts = enumerate::count(&p.tables, &query)
            .into_iter()
            .map(|(t, c)| (Q::from_integer(t) / &den, c));
        Self::counts_to_series(counts, Self::theta_precision(up_to))
    }

    pub fn shadow_min(&self) -> Result<Q> {
        let s = self.shadow_coset()?;
        self.coset_min(&s.representative)
    }

    pub fn shadow_theta(&self, up_to: &Q) -> Result<QSeries> {
        let s = self.shadow_coset()?;
        self.coset_theta(&s.representative, up_to)
    }

    /// Gram matrix scaled to integers, for fast exact orthogonality tests.
    fn scaled_int_gram(&self) -> Vec<Vec<i128>> {
        let den = self.gram.iter().flatten().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
        let d = Q::from_integer(den);
        self.gram
            .iter()
            .map(|r| r.iter().map(|x| (x * &d).to_integer().to_i128().expect("gram fits")).collect())
            .collect()
    }

    /// Lexicographically first `k`-frame (by index into the norm-`k` list of
    /// [`LatticeForm::short_vectors`]), found by backtracking.
    pub fn find_frame(&self, k: u64) -> Result<Option<Frame>> {
        let kq = q(k as i64);
        let cands: Vec<Vec<i64>> = self
            .short_vectors(&kq)?
            .into_iter()
            .filter(|v| v.norm == kq)
            .map(|v| v.coords)
            .collect();
        let g = self.scaled_int_gram();
        let images: Vec<Vec<i128>> = cands
            .iter()
            .map(|v| {
                (0..v.len())
                    .map(|j| v.iter().enumerate().map(|(i, &x)| x as i128 * g[i][j]).sum())
                    .collect()
            })
            .collect();
        let orth = |a: usize, b: usize| -> bool {
            cands[a].iter().zip(&images[b]).map(|(&x, &y)| x as i128 * y).sum::<i128>() == 0
        };
        fn search(
            n: usize,
            chosen: &mut Vec<usize>,
            pool: &[usize],
            orth: &dyn Fn(usize, usize) -> bool,
        ) -> bool {
            if chosen.len() == n {
                return true;
            }
            if chosen.len() + pool.len() < n {
                return false;
            }
            for (pos, &c) in pool.iter().enumerate() {
                let rest: Vec<usize> = pool[pos + 1..].iter().copied().filter(|&d| orth(c, d)).collect();
                chosen.push(c);
                if search(n, chosen, &rest, orth) {
                    return true;
                }
                chosen.pop();
            }
            false
        }
        let pool: Vec<usize> = (0..cands.len()).collect();
        let mut chosen = Vec::new();
        if search(self.rank(), &mut chosen, &pool, &orth) {
            Ok(Some(Frame {
                k,
                vectors: chosen.into_iter().map(|i| cands[i].clone()).collect(),
            }))
        } else {
            Ok(None)
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rank": self.rank(),
            "gram": matrix_json(&self.gram),
        })
    }

    /// Reads `{rank, gram}` and/or `{rank, basis}`; when both are present the
    /// gram matrix must equal the one derived from the basis.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::MalformedLattice(m.to_string());
        let rank = v.get("rank").and_then(Value::as_u64).ok_or_else(|| bad("missing rank"))? as usize;
        let gram = v.get("gram").map(|g| matrix_from_json(g).ok_or_else(|| bad("invalid gram"))).transpose()?;
        let basis = v.get("basis").map(|b| matrix_from_json(b).ok_or_else(|| bad("invalid basis"))).transpose()?;
        let form = match (gram, basis) {
            (Some(g), None) => LatticeForm::new(g)?,
            (None, Some(b)) => LatticeForm::from_basis(&b)?,
            (Some(g), Some(b)) => {
                let derived = LatticeForm::from_basis(&b)?;
                if derived.gram != g {
                    return Err(Error::BasisGramMismatch);
                }
                derived
            }
            (None, None) => return Err(bad("need gram or basis")),
        };
        if form.rank() != rank {
            return Err(bad("rank does not match matrix size"));
        }
        Ok(form)
    }
}

/// A full-rank sublattice given by basis rows in parent coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SublatticeRelation {
    pub parent: LatticeForm,
    pub child_basis: RatMatrix,
    pub child: LatticeForm,
}

impl SublatticeRelation {
    pub fn index(&self) -> Q {
        hnf::det(&self.child_basis).abs()
    }

    /// Canonical basis of the child in parent coordinates.
    pub fn hnf_basis(&self) -> RatMatrix {
        hnf::hnf_rational(&self.child_basis)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "index": rational::format(&self.index()),
            "basis": matrix_json(&self.child_basis),
            "gram": matrix_json(self.child.gram()),
        })
    }
}

/// `S(L) = s + L` with `2s` characteristic; `base` is the even sublattice `L0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShadowCoset {
    pub base: SublatticeRelation,
    pub representative: Vec<Q>,
}

impl ShadowCoset {
    pub fn characteristic(&self) -> Vec<Q> {
        self.representative.iter().map(|x| x * q(2)).collect()
    }

    /// `(e_i, 2s) = (e_i, e_i) mod 2` for every basis vector `e_i`.
    pub fn is_characteristic(&self) -> bool {
        let l = &self.base.parent;
        let w = self.characteristic();
        if !is_integral_vec(&w) {
            return false;
        }
        (0..l.rank()).all(|i| {
            let mut e = vec![q(0); l.rank()];
            e[i] = q(1);
            rational::parity(&l.inner(&e, &w)) == rational::parity(&l.gram()[i][i])
        })
    }

    pub fn to_json(&self) -> Value {
        json!({
            "representative": vec_json(&self.representative),
            "characteristic": vec_json(&self.characteristic()),
            "even_sublattice": self.base.to_json(),
        })
    }
}

/// `n` pairwise orthogonal vectors of norm `k`, in lattice coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub k: u64,
    pub vectors: Vec<Vec<i64>>,
}

impl Frame {
    /// Checks `(f_i, f_j) = k delta_ij` exactly.
    pub fn validate(&self, l: &LatticeForm) -> Result<()> {
        if self.vectors.len() != l.rank() {
            return Err(Error::NotAFrame(format!("{} vectors for rank {}", self.vectors.len(), l.rank())));
        }
        let k = q(self.k as i64);
        for (i, a) in self.vectors.iter().enumerate() {
            if a.len() != l.rank() {
                return Err(Error::DimensionMismatch {
                    expected: l.rank(),
                    got: a.len(),
                });
            }
            for (j, b) in self.vectors.iter().enumerate().take(i + 1) {
                let ip = l.inner(&int_vec(a), &int_vec(b));
                let want = if i == j { k.clone() } else { q(0) };
                if ip != want {
                    return Err(Error::NotAFrame(format!("(f_{i}, f_{j}) = {}", rational::format(&ip))));
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "k": self.k,
            "vectors": self.vectors.iter().map(|v| vec_json(&int_vec(v))).collect::<Vec<_>>(),
        })
    }

    /// Coordinates may be rational strings; non-integral ones are reported as
    /// [`Error::FrameNotInLattice`].
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::NotAFrame(m.to_string());
        let k = v.get("k").and_then(Value::as_u64).ok_or_else(|| bad("missing k"))?;
        let rows = v.get("vectors").and_then(matrix_from_json).ok_or_else(|| bad("invalid vectors"))?;
        let vectors = rows
            .iter()
            .enumerate()
            .map(|(i, r)| to_i64_vec(r).ok_or(Error::FrameNotInLattice(i)))
            .collect::<Result<_>>()?;
        Ok(Frame { k, vectors })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_and_indefinite_rejected() {
        for g in [vec![vec![1, 1], vec![1, 1]], vec![vec![0, 1], vec![1, 0]], vec![vec![1, 2], vec![2, 1]]] {
            assert_eq!(LatticeForm::from_integer_gram(&g), Err(Error::NotPositiveDefinite));
        }
    }

    #[test]
    fn first_short_vector_matches_full_order() {
        let e8 = LatticeForm::e8();
        let all = e8.short_vectors(&q(6)).unwrap();
        let preds: [fn(&LatticeVector) -> bool; 3] = [
            |v| v.norm == q(6),
            |v| v.norm == q(4) && v.coords[3] != 0,
            |v| v.coords.iter().sum::<i64>() == 3,
        ];
        for p in preds {
            let want = all.iter().find(|v| p(v)).cloned();
            assert_eq!(e8.first_short_vector(&q(6), p).unwrap(), want);
        }
        assert_eq!(e8.first_short_vector(&q(1), |_| true).unwrap(), None);
    }
    use crate::qseries::idx;
    use crate::rational::frac;

    fn gram(rows: &[&[i64]]) -> LatticeForm {
        LatticeForm::from_integer_gram(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn validation() {
        assert_eq!(LatticeForm::new(vec![]), Err(Error::NotSquare));
        assert_eq!(
            LatticeForm::new(vec![vec![q(1), q(0)], vec![q(1), q(1)]]),
            Err(Error::NotSymmetric)
        );
        assert_eq!(
            LatticeForm::new(vec![vec![q(1), q(2)], vec![q(2), q(1)]]),
            Err(Error::NotPositiveDefinite)
        );
    }

    #[test]
    fn unimodularity_and_parity() {
        assert!(LatticeForm::identity(8).is_unimodular());
        assert!(LatticeForm::e8().is_unimodular());
        assert!(!gram(&[&[2]]).is_unimodular());
        assert_eq!(LatticeForm::e8().is_even(), Ok(true));
        assert_eq!(LatticeForm::identity(5).is_even(), Ok(false));
        assert_eq!(gram(&[&[2, 0], &[0, 2]]).is_even(), Ok(true));
        let half = LatticeForm::new(vec![vec![frac(1, 2)]]).unwrap();
        assert_eq!(half.is_even(), Err(Error::NonIntegralForm));
    }

    #[test]
    fn d16_plus_is_even_unimodular() {
        let d = LatticeForm::d16_plus();
        assert!(d.is_unimodular());
        assert_eq!(d.is_even(), Ok(true));
    }

    #[test]
    fn even_sublattice_examples() {
        let z1 = LatticeForm::identity(1).even_sublattice().unwrap();
        assert_eq!(z1.child_basis, vec![vec![q(2)]]);
        assert_eq!(z1.child.gram(), &vec![vec![q(4)]]);
        let z2 = LatticeForm::identity(2).even_sublattice().unwrap();
        assert_eq!(z2.index(), q(2));
        assert_eq!(z2.child.determinant(), q(4));
        assert_eq!(z2.child.is_even(), Ok(true));
        let z8 = LatticeForm::identity(8).even_sublattice().unwrap();
        assert_eq!(z8.child.determinant(), q(4));
        assert_eq!(LatticeForm::e8().even_sublattice(), Err(Error::AlreadyEven));
    }

    #[test]
    fn shadow_of_zn() {
        let s = LatticeForm::identity(3).shadow_coset().unwrap();
        assert_eq!(s.representative, vec![frac(1, 2); 3]);
        assert!(s.is_characteristic());
        assert_eq!(LatticeForm::identity(8).shadow_min(), Ok(q(2)));
        assert_eq!(LatticeForm::identity(12).shadow_min(), Ok(q(3)));
        let twice = gram(&[&[1, 0], &[0, 2]]);
        assert_eq!(twice.shadow_coset(), Err(Error::NotUnimodular));
    }

    #[test]
    fn short_vector_examples() {
        let z2 = LatticeForm::identity(2);
        let v = z2.short_vectors(&q(1)).unwrap();
        let coords: Vec<_> = v.iter().map(|v| v.coords.clone()).collect();
        assert_eq!(coords, vec![vec![0, 1], vec![1, 0]]);
        assert!(v.iter().all(|v| v.norm == q(1)));
        assert_eq!(LatticeForm::e8().short_vectors(&q(2)).unwrap().len(), 120);
        assert!(LatticeForm::e8().short_vectors(&q(1)).unwrap().is_empty());
        let big = LatticeForm::identity(5).with_rank_cap(4);
        assert_eq!(big.short_vectors(&q(1)), Err(Error::RankCapExceeded { rank: 5, cap: 4 }));
    }

    #[test]
    fn minima() {
        assert_eq!(LatticeForm::identity(6).min_norm(), Ok(q(1)));
        assert_eq!(LatticeForm::e8().min_norm(), Ok(q(2)));
        assert_eq!(gram(&[&[2, 0], &[0, 2]]).min_norm(), Ok(q(2)));
    }

    #[test]
    fn coset_examples() {
        let z8 = LatticeForm::identity(8);
        let v = z8.coset_short_vectors(&vec![frac(1, 2); 8], &q(2)).unwrap();
        assert_eq!(v.len(), 256);
        assert!(v.iter().all(|v| v.norm == q(2)));
        let z1 = LatticeForm::identity(1);
        let v = z1.coset_short_vectors(&[frac(1, 2)], &frac(1, 4)).unwrap();
        let coords: Vec<_> = v.iter().map(|v| v.coords.clone()).collect();
        assert_eq!(coords, vec![vec![frac(-1, 2)], vec![frac(1, 2)]]);
        assert!(z1.coset_short_vectors(&[frac(1, 2)], &frac(1, 8)).unwrap().is_empty());
    }

    #[test]
    fn theta_examples() {
        let z1 = LatticeForm::identity(1);
        let t = z1.theta_by_enumeration(&q(4)).unwrap();
        assert_eq!(t, qseries::theta3(idx(4) + 1));
        let z5 = LatticeForm::identity(5);
        let t = z5.theta_by_enumeration(&q(5)).unwrap();
        assert_eq!(t, qseries::power(&qseries::theta3(t.precision()), 5));
        let e8 = LatticeForm::e8().theta_by_enumeration(&q(4)).unwrap();
        assert_eq!(
            e8,
            QSeries::from_terms([(0, q(1)), (idx(2), q(240)), (idx(4), q(2160))], idx(4) + 1)
        );
    }

    #[test]
    fn frames() {
        let f = LatticeForm::identity(3).find_frame(1).unwrap().unwrap();
        let mut vs = f.vectors.clone();
        vs.sort();
        assert_eq!(vs, vec![vec![0, 0, 1], vec![0, 1, 0], vec![1, 0, 0]]);
        assert_eq!(LatticeForm::identity(2).find_frame(3), Ok(None));
        let e8 = LatticeForm::e8();
        let f = e8.find_frame(4).unwrap().expect("E8 has 4-frames");
        assert!(f.validate(&e8).is_ok());
        let bad = Frame {
            k: 1,
            vectors: vec![vec![1, 0], vec![1, 0]],
        };
        assert!(matches!(bad.validate(&LatticeForm::identity(2)), Err(Error::NotAFrame(_))));
    }

    #[test]
    fn json_roundtrip() {
        let e8 = LatticeForm::e8();
        assert_eq!(LatticeForm::from_json(&e8.to_json()).unwrap(), e8);
        let v = json!({"rank": 2, "basis": [["1", "1"], ["1", "-1"]]});
        let l = LatticeForm::from_json(&v).unwrap();
        assert_eq!(l.gram(), &vec![vec![q(2), q(0)], vec![q(0), q(2)]]);
        let v = json!({"rank": 2, "basis": [["1", "1"], ["1", "-1"]], "gram": [["2", "0"], ["0", "3"]]});
        assert_eq!(LatticeForm::from_json(&v), Err(Error::BasisGramMismatch));
    }
}
