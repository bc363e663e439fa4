//! Linear codes over `Z/8`, Euclidean weight, Construction A, and the code of a
//! frame.

use num::{BigInt, Integer, One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::hnf::{self, IntMatrix};
use crate::lattice::{Frame, LatticeForm};
use crate::rational::{q, Q};

pub const DEFAULT_SIZE_CAP: u64 = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Z8Code {
    length: usize,
    generators: Vec<Vec<u8>>,
}

/// Euclidean weight `sum min(c^2, (8-c)^2)` of a word.
pub fn euclidean_weight(word: &[u8]) -> u64 {
    word.iter()
        .map(|&c| {
            let c = u64::from(c % 8);
            (c * c).min((8 - c) * (8 - c))
        })
        .sum()
}

/// Parses digit rows: one row per line, digits `0..=7` separated by
/// whitespace or commas. A token of several characters is read digit by digit,
/// so `"0123"` and `"0 1 2 3"` are the same row. Blank lines and lines starting
/// with `#` are skipped.
pub fn parse_generator_matrix(text: &str) -> Result<Z8Code> {
    let mut rows: Vec<Vec<u8>> = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row_no = line_no + 1;
        let mut row = Vec::new();
        for tok in line.split(|c: char| c.is_whitespace() || c == ',').filter(|t| !t.is_empty()) {
            for ch in tok.chars() {
                let d = ch.to_digit(10).ok_or_else(|| Error::MalformedRow {
                    row: row_no,
                    reason: format!("unexpected character {ch:?}"),
                })?;
                if d > 7 {
                    return Err(Error::DigitOutOfRange {
                        row: row_no,
                        digit: d.to_string(),
                    });
                }
                row.push(d as u8);
            }
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::MalformedRow {
                    row: row_no,
                    reason: format!("length {} differs from {}", row.len(), first.len()),
                });
            }
        }
        rows.push(row);
    }
    let length = rows.first().map(Vec::len).ok_or(Error::EmptyInput)?;
    Z8Code::new(length, rows)
}

impl Z8Code {
    pub fn new(length: usize, generators: Vec<Vec<u8>>) -> Result<Self> {
        if length == 0 {
            return Err(Error::EmptyInput);
        }
        for (i, g) in generators.iter().enumerate() {
            if g.len() != length {
                return Err(Error::MalformedRow {
                    row: i + 1,
                    reason: format!("length {} differs from {length}", g.len()),
                });
            }
            if let Some(&d) = g.iter().find(|&&d| d > 7) {
                return Err(Error::DigitOutOfRange {
                    row: i + 1,
                    digit: d.to_string(),
                });
            }
        }
        Ok(Z8Code { length, generators })
    }

    /// The zero code of the given length.
    pub fn zero(length: usize) -> Result<Self> {
        Z8Code::new(length, Vec::new())
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn generators(&self) -> &[Vec<u8>] {
        &self.generators
    }

    pub fn direct_sum(&self, other: &Z8Code) -> Z8Code {
        let (a, b) = (self.length, other.length);
        let mut gens: Vec<Vec<u8>> = self
            .generators
            .iter()
            .map(|g| g.iter().copied().chain(std::iter::repeat_n(0, b)).collect())
            .collect();
        gens.extend(
            other
                .generators
                .iter()
                .map(|g| std::iter::repeat_n(0, a).chain(g.iter().copied()).collect()),
        );
        Z8Code {
            length: a + b,
            generators: gens,
        }
    }

    /// HNF basis of `{ v in Z^n : v mod 8 in C }`.
    pub fn preimage_basis(&self) -> IntMatrix {
        let n = self.length;
        let mut rows: IntMatrix = self
            .generators
            .iter()
            .map(|g| g.iter().map(|&d| BigInt::from(d)).collect())
            .collect();
        for i in 0..n {
            let mut e = vec![BigInt::zero(); n];
            e[i] = BigInt::from(8);
            rows.push(e);
        }
        hnf::hnf(&rows)
    }

    /// `log2 |C|`; the preimage has index `8^n / |C|` in `Z^n`.
    pub fn size_log2(&self) -> u64 {
        let det: u64 = self
            .preimage_basis()
            .iter()
            .enumerate()
            .map(|(i, r)| r[i].bits() - 1)
            .sum();
        3 * self.length as u64 - det
    }

    pub fn size(&self) -> BigInt {
        BigInt::one() << self.size_log2()
    }

    /// Every pair of generators, including each with itself, pairs to 0 mod 8.
    pub fn is_self_orthogonal(&self) -> bool {
        let g = &self.generators;
        (0..g.len()).all(|i| {
            (i..g.len()).all(|j| {
                g[i].iter().zip(&g[j]).map(|(&a, &b)| u32::from(a) * u32::from(b)).sum::<u32>() % 8 == 0
            })
        })
    }

    pub fn is_self_dual(&self) -> Result<bool> {
        if self.length % 2 == 1 {
            return Err(Error::OddLength(self.length));
        }
        Ok(self.is_self_orthogonal() && self.size_log2() == 3 * self.length as u64 / 2)
    }

    /// Same set of codewords.
    pub fn same_code(&self, other: &Z8Code) -> bool {
        self.length == other.length && self.preimage_basis() == other.preimage_basis()
    }

    fn check_cap(&self, cap: u64) -> Result<()> {
        let log = self.size_log2();
        if log >= 64 || (1u64 << log) > cap {
            return Err(Error::SizeCapExceeded {
                size: format!("2^{log}"),
                cap,
            });
        }
        Ok(())
    }

    /// Multipliers `8 / d_i` of the HNF rows; every codeword is uniquely
    /// `sum c_i b_i mod 8` with `0 <= c_i < 8 / d_i`.
    fn odometer(&self) -> (Vec<Vec<u8>>, Vec<u64>) {
        let basis = self.preimage_basis();
        let rows = basis
            .iter()
            .map(|r| r.iter().map(|x| (x % 8u8).to_u8().expect("reduced")).collect())
            .collect();
        let orders = basis
            .iter()
            .enumerate()
            .map(|(i, r)| 8 / r[i].to_u64().expect("pivot divides 8"))
            .collect();
        (rows, orders)
    }

    /// Codeword with mixed-radix index `k`.
    fn word_at(rows: &[Vec<u8>], orders: &[u64], mut k: u64, n: usize) -> Vec<u8> {
        let mut w = vec![0u8; n];
        for (row, &o) in rows.iter().zip(orders) {
            let c = (k % o) as u8;
            k /= o;
            if c != 0 {
                for (x, &b) in w.iter_mut().zip(row) {
                    *x = (*x + c * b) % 8;
                }
            }
        }
        w
    }

    /// All codewords, in mixed-radix order of the HNF multipliers.
    pub fn codewords(&self, size_cap: u64) -> Result<Vec<Vec<u8>>> {
        self.check_cap(size_cap)?;
        let (rows, orders) = self.odometer();
        let total: u64 = orders.iter().product();
        Ok((0..total)
            .into_par_iter()
            .map(|k| Self::word_at(&rows, &orders, k, self.length))
            .collect())
    }

    /// Minimum Euclidean weight over nonzero codewords; `None` for the zero code.
    pub fn min_euclidean_weight(&self, size_cap: u64) -> Result<Option<u64>> {
        self.check_cap(size_cap)?;
        let (rows, orders) = self.odometer();
        let total: u64 = orders.iter().product();
        Ok((1..total)
            .into_par_iter()
            .map(|k| euclidean_weight(&Self::word_at(&rows, &orders, k, self.length)))
            .min())
    }

    /// Construction A: the preimage lattice with Gram `B B^T / 8` (or `B B^T`
    /// when `scaled` is false).
    pub fn construction_a(&self, scaled: bool) -> Result<LatticeForm> {
        if !self.is_self_orthogonal() {
            return Err(Error::NotSelfOrthogonal);
        }
        let b = hnf::to_rational(&self.preimage_basis());
        let id: Vec<Vec<Q>> = (0..self.length)
            .map(|i| (0..self.length).map(|j| q(i64::from(i == j))).collect())
            .collect();
        let mut g = hnf::congruence(&b, &id);
        if scaled {
            for x in g.iter_mut().flatten() {
                *x /= q(8);
            }
        }
        LatticeForm::new(g)
    }

    pub fn to_json(&self) -> Value {
        json!({ "length": self.length, "generators": self.generators })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let length = v
            .get("length")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::MalformedRow {
                row: 0,
                reason: "missing length".into(),
            })? as usize;
        let rows = v.get("generators").and_then(Value::as_array).ok_or_else(|| Error::MalformedRow {
            row: 0,
            reason: "missing generators".into(),
        })?;
        let gens = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let bad = || Error::MalformedRow {
                    row: i + 1,
                    reason: "expected an array of digits".into(),
                };
                r.as_array()
                    .ok_or_else(bad)?
                    .iter()
                    .map(|d| {
                        let d = d.as_u64().ok_or_else(bad)?;
                        u8::try_from(d).ok().filter(|&d| d < 8).ok_or(Error::DigitOutOfRange {
                            row: i + 1,
                            digit: d.to_string(),
                        })
                    })
                    .collect::<Result<Vec<u8>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Z8Code::new(length, gens)
    }

    /// `{length, size, self_orthogonal, self_dual, min_euclidean_weight, lattice}`;
    /// the weight is `"skipped"` above the cap and the lattice is `null` when
    /// the code is not self-orthogonal.
    pub fn report(&self, size_cap: u64) -> Value {
        let self_dual = self.is_self_dual().unwrap_or(false);
        let weight = match self.min_euclidean_weight(size_cap) {
            Ok(Some(w)) => json!(w),
            Ok(None) => Value::Null,
            Err(_) => json!("skipped"),
        };
        let lattice = match self.construction_a(true) {
            Ok(l) => {
                let mut doc = l.to_json();
                doc["unimodular"] = json!(l.is_unimodular());
                doc
            }
            Err(_) => Value::Null,
        };
        json!({
            "length": self.length,
            "size": self.size().to_string(),
            "self_orthogonal": self.is_self_orthogonal(),
            "self_dual": self_dual,
            "min_euclidean_weight": weight,
            "lattice": lattice,
        })
    }
}

/// The code `{ ((v, f_i))_i mod 8 : v in L }` of an 8-frame, coordinates in
/// frame order.
pub fn code_from_frame(l: &LatticeForm, frame: &Frame) -> Result<Z8Code> {
    if frame.k != 8 {
        return Err(Error::NotAFrame(format!("frame norm {} is not 8", frame.k)));
    }
    if !l.is_unimodular() {
        return Err(Error::NotUnimodular);
    }
    frame.validate(l)?;
    let n = l.rank();
    let fs: Vec<Vec<Q>> = frame.vectors.iter().map(|f| crate::lattice::int_vec(f)).collect();
    let gens = (0..n)
        .map(|j| {
            let mut e = vec![q(0); n];
            e[j] = q(1);
            fs.iter()
                .map(|f| {
                    let ip: BigInt = l.inner(&e, f).to_integer();
                    ip.mod_floor(&BigInt::from(8)).to_u8().expect("residue")
                })
                .collect()
        })
        .collect();
    Z8Code::new(n, gens)
}
