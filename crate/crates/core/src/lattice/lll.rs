//! Exact LLL reduction of a positive-definite Gram matrix.
//!
//! Only used to precondition enumeration; nothing downstream depends on the
//! reduced basis beyond it spanning the same lattice.

use num::{BigInt, Signed, Zero};

use super::hnf::RatMatrix;
use crate::rational::{frac, Q};

pub struct Reduced {
    pub gram: RatMatrix,
    /// Rows are reduced basis vectors in original coordinates.
    pub transform: Vec<Vec<BigInt>>,
}

/// Gram-Schmidt data: `mu[i][j]` for `j < i` and squared lengths `b[i]`.
/// Panics unless `g` is positive definite.
pub fn gram_schmidt(g: &[Vec<Q>]) -> (RatMatrix, Vec<Q>) {
    checked_gram_schmidt(g).expect("positive definite")
}

/// As [`gram_schmidt`], or `None` at the first nonpositive pivot.
pub fn checked_gram_schmidt(g: &[Vec<Q>]) -> Option<(RatMatrix, Vec<Q>)> {
    let n = g.len();
    let mut mu = vec![vec![Q::zero(); n]; n];
    let mut b = vec![Q::zero(); n];
    for i in 0..n {
        for j in 0..i {
            let mut s = g[i][j].clone();
            for k in 0..j {
                s -= &mu[j][k] * &mu[i][k] * &b[k];
            }
            mu[i][j] = s / &b[j];
        }
        let mut s = g[i][i].clone();
        for k in 0..i {
            s -= &mu[i][k] * &mu[i][k] * &b[k];
        }
        if !s.is_positive() {
            return None;
        }
        b[i] = s;
    }
    Some((mu, b))
}

fn round(x: &Q) -> BigInt {
    (x + frac(1, 2)).floor().to_integer()
}

pub fn lll(g: &[Vec<Q>]) -> Reduced {
    let n = g.len();
    let delta = frac(3, 4);
    let mut g: RatMatrix = g.to_vec();
    let mut u: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from(u8::from(i == j))).collect())
        .collect();
    if n < 2 {
        return Reduced { gram: g, transform: u };
    }
    let (mut mu, mut b) = gram_schmidt(&g);
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let r = round(&mu[k][j]);
            if r.is_zero() {
                continue;
            }
            let rq = Q::from_integer(r.clone());
            // b_k -= r b_j
            for l in 0..n {
                let t = &g[j][l] * &rq;
                g[k][l] -= t;
            }
            for l in 0..n {
                let t = &g[l][j] * &rq;
                g[l][k] -= t;
            }
            let (uj, uk) = (u[j].clone(), &mut u[k]);
            for (x, y) in uk.iter_mut().zip(&uj) {
                *x -= &r * y;
            }
            for l in 0..j {
                let t = &mu[j][l] * &rq;
                mu[k][l] -= t;
            }
            mu[k][j] -= &rq;
        }
        let lhs = b[k].clone();
        let rhs = (&delta - &mu[k][k - 1] * &mu[k][k - 1]) * &b[k - 1];
        if lhs >= rhs {
            k += 1;
        } else {
            g.swap(k, k - 1);
            for row in g.iter_mut() {
                row.swap(k, k - 1);
            }
            u.swap(k, k - 1);
            let (m2, b2) = gram_schmidt(&g);
            mu = m2;
            b = b2;
            k = k.max(2) - 1;
        }
    }
    Reduced { gram: g, transform: u }
}
