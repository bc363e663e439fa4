//! Fincke-Pohst enumeration in exact integer arithmetic.
//!
//! With `G = L D L^T` and `m = L^T`, the norm splits as
//! `Q(x) = sum_i d_i (x_i + sum_{j>i} m_ij x_j)^2`. Scaling every `d_i` and
//! `m_ij` by the common denominator `s` gives integers `D_i`, `M_ij` with
//!
//! `s^3 Q(x) = sum_i D_i (s x_i + sum_{j>i} M_ij x_j)^2`,
//!
//! so every pruning decision is an integer comparison. Coset points `x = z + o`
//! with `o = p / c` are enumerated as `y = c x`, integers in fixed residue
//! classes mod `c`.
//!
//! Arithmetic runs in `i128` and restarts in `BigInt` if anything overflows.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num::integer::Roots;
use num::traits::{CheckedAdd, CheckedMul, CheckedSub, ToPrimitive};
use num::{BigInt, Integer, One, Signed, Zero};
use rayon::prelude::*;

use super::lll::gram_schmidt;
use crate::rational::Q;

/// Integer LDL tables for one Gram matrix.
#[derive(Clone, Debug)]
pub struct Tables {
    n: usize,
    scale: BigInt,
    diag: Vec<BigInt>,
    /// `off[i][j]` for `j > i`.
    off: Vec<Vec<BigInt>>,
}

impl Tables {
    pub fn new(gram: &[Vec<Q>]) -> Self {
        let n = gram.len();
        let (mu, b) = gram_schmidt(gram);
        let mut scale = BigInt::one();
        for x in b.iter().chain(mu.iter().flatten()) {
            scale = scale.lcm(x.denom());
        }
        let s = Q::from_integer(scale.clone());
        let diag = b.iter().map(|x| (x * &s).to_integer()).collect();
        let off = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| if j > i { (&mu[j][i] * &s).to_integer() } else { BigInt::zero() })
                    .collect()
            })
            .collect();
        Tables { n, scale, diag, off }
    }

    /// Denominator relating the integer totals handed to visitors to norms:
    /// `norm = total / (s^3 c^2)`.
    pub fn norm_denominator(&self, modulus: &BigInt) -> BigInt {
        self.scale.pow(3) * modulus * modulus
    }
}

/// What to enumerate: points `y` with `y_i = residues[i] (mod modulus)` and
/// integer total at most `budget`. `symmetric` keeps one of each `+-y` and
/// skips zero; it is only meaningful for the plain lattice (`modulus = 1`).
#[derive(Clone, Debug)]
pub struct Query {
    pub modulus: BigInt,
    pub residues: Vec<BigInt>,
    pub budget: BigInt,
    pub symmetric: bool,
}

pub trait EnumInt:
    Clone + Ord + Debug + Integer + Signed + Roots + CheckedAdd + CheckedSub + CheckedMul + Send + Sync
{
    fn from_big(b: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
    fn from_i64(v: i64) -> Self;
    fn as_i64(&self) -> Option<i64>;
}

impl EnumInt for i128 {
    fn from_big(b: &BigInt) -> Option<Self> {
        b.to_i128()
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn as_i64(&self) -> Option<i64> {
        i64::try_from(*self).ok()
    }
}

impl EnumInt for BigInt {
    fn from_big(b: &BigInt) -> Option<Self> {
        Some(b.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn as_i64(&self) -> Option<i64> {
        self.to_i64()
    }
}

struct Typed<T> {
    n: usize,
    scale: T,
    diag: Vec<T>,
    off: Vec<Vec<T>>,
    modulus: T,
    residues: Vec<T>,
    symmetric: bool,
}

impl<T: EnumInt> Typed<T> {
    fn convert(t: &Tables, q: &Query) -> Option<Self> {
        let conv = |v: &[BigInt]| v.iter().map(T::from_big).collect::<Option<Vec<T>>>();
        Some(Typed {
            n: t.n,
            scale: T::from_big(&t.scale)?,
            diag: conv(&t.diag)?,
            off: t.off.iter().map(|r| conv(r)).collect::<Option<_>>()?,
            modulus: T::from_big(&q.modulus)?,
            residues: conv(&q.residues)?,
            symmetric: q.symmetric,
        })
    }

    /// Admissible values of `y_i` given the coordinates already fixed above `i`.
    fn range(&self, i: usize, y: &[i64], rem: &T, all_zero: bool) -> Option<(T, T, T)> {
        let mut s = T::zero();
        for j in i + 1..self.n {
            if y[j] != 0 {
                s = s.checked_add(&self.off[i][j].checked_mul(&T::from_i64(y[j]))?)?;
            }
        }
        let r = (rem.clone() / self.diag[i].clone()).sqrt();
        let neg_s = -s.clone();
        let lo_num = neg_s.checked_sub(&r)?;
        let hi_num = neg_s.checked_add(&r)?;
        let mut lo = -((-lo_num).div_floor(&self.scale));
        let hi = hi_num.div_floor(&self.scale);
        if self.symmetric && all_zero && lo < T::zero() {
            lo = T::zero();
        }
        // first value >= lo in the residue class
        let shift = (self.residues[i].clone() - lo.clone()).mod_floor(&self.modulus);
        lo = lo.checked_add(&shift)?;
        Some((lo, hi, s))
    }

    /// Visits points below coordinate `i`; `visit` returns `false` to stop,
    /// which is reported as `Some(false)`. `None` signals overflow.
    fn descend<F: FnMut(&[i64], &T) -> bool>(
        &self,
        i: usize,
        y: &mut Vec<i64>,
        rem: T,
        total: T,
        all_zero: bool,
        visit: &mut F,
    ) -> Option<bool> {
        let (mut v, hi, s) = self.range(i, y, &rem, all_zero)?;
        while v <= hi {
            let t = self.scale.checked_mul(&v)?.checked_add(&s)?;
            let cost = self.diag[i].checked_mul(&t.checked_mul(&t)?)?;
            y[i] = v.as_i64()?;
            let zero_here = all_zero && v.is_zero();
            let new_total = total.checked_add(&cost)?;
            let go_on = if i == 0 {
                (self.symmetric && zero_here) || visit(y, &new_total)
            } else {
                self.descend(i - 1, y, rem.checked_sub(&cost)?, new_total, zero_here, visit)?
            };
            if !go_on {
                return Some(false);
            }
            v = v.checked_add(&self.modulus)?;
        }
        y[i] = 0;
        Some(true)
    }

    /// First accepted point in the order: coordinate `n-1` outermost, values
    /// ascending.
    fn search<F: FnMut(&[i64], &T) -> bool>(&self, budget: &T, accept: &mut F) -> Option<Option<Vec<i64>>> {
        let mut y = vec![0i64; self.n];
        let mut found = None;
        let mut f = |yy: &[i64], t: &T| {
            if accept(yy, t) {
                found = Some(yy.to_vec());
                false
            } else {
                true
            }
        };
        self.descend(self.n - 1, &mut y, budget.clone(), T::zero(), true, &mut f)?;
        Some(found)
    }

    /// Values of the outermost coordinate, for splitting work across threads.
    fn top_values(&self, budget: &T) -> Option<Vec<(i64, T)>> {
        let i = self.n - 1;
        let y = vec![0i64; self.n];
        let (mut v, hi, s) = self.range(i, &y, budget, true)?;
        let mut out = Vec::new();
        while v <= hi {
            let t = self.scale.checked_mul(&v)?.checked_add(&s)?;
            let cost = self.diag[i].checked_mul(&t.checked_mul(&t)?)?;
            out.push((v.as_i64()?, cost));
            v = v.checked_add(&self.modulus)?;
        }
        Some(out)
    }

    fn run<A, F>(&self, budget: &T, init: impl Fn() -> A + Sync, visit: F) -> Option<Vec<A>>
    where
        A: Send,
        F: Fn(&mut A, &[i64], &T) + Sync,
    {
        let n = self.n;
        let tops = self.top_values(budget)?;
        tops.into_par_iter()
            .map(|(v, cost)| {
                let mut acc = init();
                let mut y = vec![0i64; n];
                y[n - 1] = v;
                if n == 1 {
                    if !(self.symmetric && v == 0) {
                        visit(&mut acc, &y, &cost);
                    }
                } else {
                    let rem = budget.checked_sub(&cost)?;
                    let mut f = |yy: &[i64], tot: &T| {
                        visit(&mut acc, yy, tot);
                        true
                    };
                    self.descend(n - 2, &mut y, rem, cost, v == 0, &mut f)?;
                }
                Some(acc)
            })
            .collect()
    }
}

fn with_fallback<R>(
    tables: &Tables,
    query: &Query,
    fast: impl FnOnce(&Typed<i128>, &i128) -> Option<R>,
    slow: impl FnOnce(&Typed<BigInt>, &BigInt) -> Option<R>,
) -> R {
    if let (Some(t), Some(b)) = (Typed::<i128>::convert(tables, query), query.budget.to_i128()) {
        if let Some(r) = fast(&t, &b) {
            return r;
        }
    }
    let t = Typed::<BigInt>::convert(tables, query).expect("BigInt conversion is total");
    slow(&t, &query.budget).expect("BigInt arithmetic cannot overflow")
}

/// First admissible point accepted by `accept`, searching with coordinate
/// `n-1` outermost and each coordinate ascending. In symmetric mode the highest
/// nonzero coordinate is positive.
pub fn first_match(tables: &Tables, query: &Query, accept: &mut dyn FnMut(&[i64], &BigInt) -> bool) -> Option<Vec<i64>> {
    if tables.n == 0 || query.budget.is_negative() {
        return None;
    }
    if let (Some(t), Some(b)) = (Typed::<i128>::convert(tables, query), query.budget.to_i128()) {
        if let Some(r) = t.search(&b, &mut |y: &[i64], tot: &i128| accept(y, &BigInt::from(*tot))) {
            return r;
        }
    }
    let t = Typed::<BigInt>::convert(tables, query).expect("BigInt conversion is total");
    t.search(&query.budget, &mut |y: &[i64], tot: &BigInt| accept(y, tot))
        .expect("BigInt arithmetic cannot overflow")
}

/// Every admissible point with its integer total.
pub fn collect(tables: &Tables, query: &Query) -> Vec<(Vec<i64>, BigInt)> {
    if tables.n == 0 || query.budget.is_negative() {
        return Vec::new();
    }
    fn go<T: EnumInt>(t: &Typed<T>, b: &T) -> Option<Vec<(Vec<i64>, BigInt)>> {
        let parts = t.run(b, Vec::new, |acc: &mut Vec<(Vec<i64>, BigInt)>, y, tot| {
            acc.push((y.to_vec(), tot.to_big()))
        })?;
        Some(parts.into_iter().flatten().collect())
    }
    with_fallback(tables, query, go, go)
}

/// Number of admissible points per integer total.
pub fn count(tables: &Tables, query: &Query) -> BTreeMap<BigInt, u64> {
    if tables.n == 0 || query.budget.is_negative() {
        return BTreeMap::new();
    }
    fn go<T: EnumInt>(t: &Typed<T>, b: &T) -> Option<BTreeMap<BigInt, u64>> {
        let parts = t.run(b, BTreeMap::<T, u64>::new, |acc, _y, tot| {
            *acc.entry(tot.clone()).or_insert(0) += 1;
        })?;
        let mut out = BTreeMap::new();
        for p in parts {
            for (k, v) in p {
                *out.entry(k.to_big()).or_insert(0) += v;
            }
        }
        Some(out)
    }
    with_fallback(tables, query, go, go)
}
