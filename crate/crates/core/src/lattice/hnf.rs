//! Integer and rational matrix helpers: Hermite normal form, kernels of
//! functionals mod 2, linear algebra over GF(2), exact determinants.

use num::{BigInt, Integer, One, Signed, Zero};

use crate::rational::Q;

pub type IntMatrix = Vec<Vec<BigInt>>;
pub type RatMatrix = Vec<Vec<Q>>;

/// Row-style Hermite normal form of the lattice spanned by `rows`.
///
/// Returns the nonzero rows only: an echelon form whose pivots are positive and
/// whose entries above each pivot lie in `0..pivot`.
pub fn hnf(rows: &[Vec<BigInt>]) -> IntMatrix {
    let mut m: IntMatrix = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        // Euclid on column c among rows r..
        loop {
            let pivot = (r..m.len())
                .filter(|&i| !m[i][c].is_zero())
                .min_by(|&a, &b| m[a][c].abs().cmp(&m[b][c].abs()));
            let Some(p) = pivot else { break };
            m.swap(r, p);
            let mut done = true;
            for i in r + 1..m.len() {
                if m[i][c].is_zero() {
                    continue;
                }
                let f = m[i][c].div_floor(&m[r][c]);
                if !f.is_zero() {
                    let (head, tail) = m.split_at_mut(i);
                    for (x, y) in tail[0].iter_mut().zip(&head[r]) {
                        *x -= &f * y;
                    }
                }
                if !m[i][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if m[r][c].is_zero() {
            continue;
        }
        if m[r][c].is_negative() {
            for x in m[r].iter_mut() {
                *x = -&*x;
            }
        }
        for i in 0..r {
            let f = m[i][c].div_floor(&m[r][c]);
            if !f.is_zero() {
                let (head, tail) = m.split_at_mut(r);
                for (x, y) in head[i].iter_mut().zip(&tail[0]) {
                    *x -= &f * y;
                }
            }
        }
        r += 1;
    }
    m.truncate(r);
    m.retain(|row| row.iter().any(|x| !x.is_zero()));
    m
}

/// Hermite normal form of the lattice spanned by rational rows.
pub fn hnf_rational(rows: &[Vec<Q>]) -> RatMatrix {
    let den = rows
        .iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: IntMatrix = rows
        .iter()
        .map(|r| r.iter().map(|x| (x * Q::from_integer(den.clone())).to_integer()).collect())
        .collect();
    hnf(&scaled)
        .into_iter()
        .map(|r| r.into_iter().map(|x| Q::new(x, den.clone())).collect())
        .collect()
}

/// Reduces a matrix over GF(2) to echelon form in place; returns pivot columns.
fn f2_echelon(m: &mut [Vec<u8>]) -> Vec<usize> {
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| m[i][c] == 1) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && m[i][c] == 1 {
                let (a, b) = if i < r {
                    let (h, t) = m.split_at_mut(r);
                    (&mut h[i], &t[0])
                } else {
                    let (h, t) = m.split_at_mut(i);
                    (&mut t[0], &h[r])
                };
                for (x, y) in a.iter_mut().zip(b.iter()) {
                    *x ^= y;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Vectors `c` over GF(2) with `sum_i c_i * rows[i] = 0`, as a basis.
pub fn f2_left_nullspace(rows: &[Vec<u8>]) -> Vec<Vec<u8>> {
    let n = rows.len();
    let k = rows.first().map_or(0, Vec::len);
    // augmented [rows | I]; rows reducing to zero on the left carry the relation
    let mut aug: Vec<Vec<u8>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.clone();
            v.extend((0..n).map(|j| u8::from(i == j)));
            v
        })
        .collect();
    let mut left: Vec<Vec<u8>> = aug.iter().map(|r| r[..k].to_vec()).collect();
    // echelon on the left block only, mirroring row ops on the right block
    let mut r = 0;
    for c in 0..k {
        let Some(p) = (r..n).find(|&i| left[i][c] == 1) else { continue };
        left.swap(r, p);
        aug.swap(r, p);
        for i in 0..n {
            if i != r && left[i][c] == 1 {
                let (lr, ar) = (left[r].clone(), aug[r].clone());
                for (x, y) in left[i].iter_mut().zip(&lr) {
                    *x ^= y;
                }
                for (x, y) in aug[i].iter_mut().zip(&ar) {
                    *x ^= y;
                }
            }
        }
        r += 1;
    }
    aug[r..].iter().map(|row| row[k..].to_vec()).collect()
}

/// Solves `a x = b` over GF(2), returning one solution if any exists.
pub fn f2_solve(a: &[Vec<u8>], b: &[u8]) -> Option<Vec<u8>> {
    let n = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<u8>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut v = row.clone();
            v.push(bi);
            v
        })
        .collect();
    let pivots = f2_echelon(&mut m);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = vec![0u8; n];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][n];
    }
    Some(x)
}

/// Basis (in HNF) of `{ c in Z^n : c . cols[k] = 0 mod 2 for every k }`, where
/// `rows[i][k]` is the value of functional `k` on the i-th unit vector mod 2.
pub fn kernel_mod2(rows: &[Vec<u8>]) -> IntMatrix {
    let n = rows.len();
    let mut gens: IntMatrix = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut v = vec![BigInt::zero(); n];
        v[i] = BigInt::from(2);
        gens.push(v);
    }
    for rel in f2_left_nullspace(rows) {
        gens.push(rel.into_iter().map(BigInt::from).collect());
    }
    hnf(&gens)
}

/// Determinant by fraction-based Gaussian elimination with row swaps.
pub fn det(m: &[Vec<Q>]) -> Q {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        let piv = a[c][c].clone();
        d *= &piv;
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] / &piv;
            for k in c..n {
                let t = &a[c][k] * &f;
                a[i][k] -= t;
            }
        }
    }
    d
}

/// Exact inverse, or `None` for singular input.
pub fn inverse(m: &[Vec<Q>]) -> Option<RatMatrix> {
    let n = m.len();
    let mut a: RatMatrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut v = row.clone();
            v.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            v
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(p, c);
        let inv = a[c][c].recip();
        for x in a[c].iter_mut() {
            *x *= &inv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..2 * n {
                    let t = &a[c][k] * &f;
                    a[i][k] -= t;
                }
            }
        }
    }
    Some(a.into_iter().map(|row| row[n..].to_vec()).collect())
}

pub fn mat_mul(a: &[Vec<Q>], b: &[Vec<Q>]) -> RatMatrix {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Q::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

pub fn transpose(a: &[Vec<Q>]) -> RatMatrix {
    let cols = a.first().map_or(0, Vec::len);
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

/// `b g b^T`.
pub fn congruence(b: &[Vec<Q>], g: &[Vec<Q>]) -> RatMatrix {
    mat_mul(&mat_mul(b, g), &transpose(b))
}

pub fn vec_mat(v: &[Q], m: &[Vec<Q>]) -> Vec<Q> {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols)
        .map(|j| v.iter().zip(m).fold(Q::zero(), |acc, (x, row)| acc + x * &row[j]))
        .collect()
}

pub fn to_rational(m: &[Vec<BigInt>]) -> RatMatrix {
    m.iter()
        .map(|r| r.iter().map(|x| Q::from_integer(x.clone())).collect())
        .collect()
}
