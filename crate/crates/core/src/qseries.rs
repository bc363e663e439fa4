//! Truncated formal power series in `q` with exact rational coefficients.
//!
//! Exponents live on a fixed grid of quarter integers: an *exponent index* `i`
//! stands for `q^(i/4)`. This is the finest grid the Jacobi series need, since
//! `theta2` is the only generator with fractional exponents and those are all
//! of the form `(m + 1/2)^2`.
//!
//! A series carries an exclusive precision bound; every stored index is below
//! it and coefficients at or beyond it are unknown.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::rational::{self, Q};

/// Exponent indices per unit power of `q`.
pub const GRID: i64 = 4;

/// Exponent index of `q^n`.
pub const fn idx(n: i64) -> i64 {
    n * GRID
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QSeries {
    terms: BTreeMap<i64, Q>,
    precision: i64,
}

impl QSeries {
    pub fn zero(precision: i64) -> Self {
        QSeries {
            terms: BTreeMap::new(),
            precision,
        }
    }

    pub fn one(precision: i64) -> Self {
        Self::monomial(0, rational::q(1), precision)
    }

    pub fn monomial(index: i64, coeff: Q, precision: i64) -> Self {
        Self::from_terms([(index, coeff)], precision)
    }

    /// Builds a series, dropping zero coefficients and indices outside `0..precision`.
    /// Repeated indices are summed.
    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Q)>, precision: i64) -> Self {
        let mut map: BTreeMap<i64, Q> = BTreeMap::new();
        for (i, c) in terms {
            if i < 0 || i >= precision {
                continue;
            }
            *map.entry(i).or_insert_with(Q::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        QSeries {
            terms: map,
            precision,
        }
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &Q)> + '_ {
        self.terms.iter().map(|(&i, c)| (i, c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lowest stored exponent index, or the precision for the zero series.
    pub fn valuation(&self) -> i64 {
        self.terms.keys().next().copied().unwrap_or(self.precision)
    }

    pub fn coefficient_at(&self, index: i64) -> Result<Q> {
        if index >= self.precision {
            return Err(Error::QueryBeyondPrecision {
                index,
                precision: self.precision,
            });
        }
        Ok(self.terms.get(&index).cloned().unwrap_or_else(Q::zero))
    }

    /// Coefficient of `q^n` for an integer power `n`.
    pub fn coefficient_at_q(&self, n: i64) -> Result<Q> {
        self.coefficient_at(idx(n))
    }

    /// Drops terms at or beyond `precision`; never raises the precision.
    pub fn truncate(&self, precision: i64) -> Self {
        let precision = precision.min(self.precision);
        QSeries {
            terms: self
                .terms
                .range(..precision)
                .map(|(&i, c)| (i, c.clone()))
                .collect(),
            precision,
        }
    }

    pub fn scale(&self, s: &Q) -> Self {
        Self::from_terms(self.terms().map(|(i, c)| (i, c * s)), self.precision)
    }

    /// True when every stored coefficient has denominator 1.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(rational::is_integer)
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms()
            .map(|(i, c)| json!([rational::format(&rational::frac(i, GRID)), rational::format(c)]))
            .collect();
        json!({
            "precision": rational::format(&rational::frac(self.precision, GRID)),
            "terms": terms,
        })
    }

    /// Inverse of [`QSeries::to_json`]. Exponents must lie on the quarter grid.
    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::MalformedSeries(m.to_string());
        let precision = v
            .get("precision")
            .and_then(rational::from_json)
            .ok_or_else(|| bad("missing or invalid precision"))?;
        let precision = to_index(&precision).ok_or_else(|| bad("precision off the quarter grid"))?;
        let terms = v
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing terms"))?;
        let mut parsed = Vec::with_capacity(terms.len());
        for t in terms {
            let pair = t.as_array().filter(|p| p.len() == 2).ok_or_else(|| bad("term is not a pair"))?;
            let e = rational::from_json(&pair[0]).ok_or_else(|| bad("invalid exponent"))?;
            let i = to_index(&e).ok_or_else(|| bad("exponent off the quarter grid"))?;
            if i < 0 || i >= precision {
                return Err(bad("exponent outside 0..precision"));
            }
            let c = rational::from_json(&pair[1]).ok_or_else(|| bad("invalid coefficient"))?;
            parsed.push((i, c));
        }
        Ok(Self::from_terms(parsed, precision))
    }
}

/// Exponent index of a rational exponent, if it lies on the grid.
pub fn to_index(e: &Q) -> Option<i64> {
    let scaled = e * rational::q(GRID);
    if !rational::is_integer(&scaled) {
        return None;
    }
    i64::try_from(scaled.to_integer()).ok()
}

impl fmt::Display for QSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.terms() {
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let power = rational::frac(i, GRID);
            let show_coeff = i == 0 || !mag.is_one();
            if show_coeff && (i == 0 || rational::is_integer(&mag)) {
                write!(f, "{}", rational::format(&mag))?;
            } else if show_coeff {
                write!(f, "({})", rational::format(&mag))?;
            }
            if i != 0 {
                if power.is_one() {
                    write!(f, "q")?;
                } else if rational::is_integer(&power) {
                    write!(f, "q^{}", power)?;
                } else {
                    write!(f, "q^({})", power)?;
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        let p = rational::frac(self.precision, GRID);
        if rational::is_integer(&p) {
            write!(f, " + O(q^{})", p)
        } else {
            write!(f, " + O(q^({}))", p)
        }
    }
}

/// Cauchy product. The result is exact below
/// `min(prec(a) + val(b), prec(b) + val(a))`.
pub fn multiply(a: &QSeries, b: &QSeries) -> QSeries {
    let precision = (a.precision + b.valuation()).min(b.precision + a.valuation());
    let mut out: BTreeMap<i64, Q> = BTreeMap::new();
    for (i, ca) in a.terms() {
        if i >= precision {
            break;
        }
        for (j, cb) in b.terms() {
            let k = i + j;
            if k >= precision {
                break;
            }
            *out.entry(k).or_insert_with(Q::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    QSeries {
        terms: out,
        precision,
    }
}

/// `a^k` by repeated squaring; `power(a, 0)` is `1` at `a`'s precision.
pub fn power(a: &QSeries, k: u32) -> QSeries {
    let mut result = QSeries::one(a.precision);
    if k == 0 {
        return result;
    }
    let mut base = a.clone();
    let mut k = k;
    let mut started = false;
    while k > 0 {
        if k & 1 == 1 {
            result = if started {
                multiply(&result, &base)
            } else {
                started = true;
                base.clone()
            };
        }
        k >>= 1;
        if k > 0 {
            base = multiply(&base, &base);
        }
    }
    result
}

/// Substitutes `q -> q^m`.
pub fn compose_q_power(a: &QSeries, m: u32) -> QSeries {
    let m = i64::from(m);
    QSeries {
        terms: a.terms().map(|(i, c)| (i * m, c.clone())).collect(),
        precision: a.precision * m,
    }
}

/// `sum s_k * a_k` with precision the minimum over inputs. The empty sum is the
/// zero series of precision 0.
pub fn linear_combine(pairs: &[(Q, &QSeries)]) -> QSeries {
    let precision = pairs.iter().map(|(_, s)| s.precision).min().unwrap_or(0);
    let terms = pairs
        .iter()
        .filter(|(s, _)| !s.is_zero())
        .flat_map(|(s, a)| a.terms().map(move |(i, c)| (i, c * s)));
    QSeries::from_terms(terms, precision)
}

fn square_series(precision: i64, offset_half: bool, alternating: bool) -> QSeries {
    let mut terms = Vec::new();
    if !offset_half {
        terms.push((0, rational::q(1)));
    }
    for m in 0i64.. {
        // exponent index of q^{m^2} or q^{(m+1/2)^2}
        let e = if offset_half { (2 * m + 1) * (2 * m + 1) } else { 4 * m * m };
        if !offset_half && m == 0 {
            continue;
        }
        if e >= precision {
            break;
        }
        let sign = if alternating && m % 2 == 1 { -2 } else { 2 };
        terms.push((e, rational::q(sign)));
    }
    QSeries::from_terms(terms, precision)
}

/// `theta3(q) = sum_{m in Z} q^{m^2}`.
pub fn theta3(precision: i64) -> QSeries {
    square_series(precision, false, false)
}

/// `theta2(q) = sum_{m in Z} q^{(m+1/2)^2}`.
pub fn theta2(precision: i64) -> QSeries {
    square_series(precision, true, false)
}

/// `theta4(q) = sum_{m in Z} (-1)^m q^{m^2}`.
pub fn theta4(precision: i64) -> QSeries {
    square_series(precision, false, true)
}

/// `(1 - q^{step/4})^8` truncated.
fn one_minus_pow8(step: i64, precision: i64) -> QSeries {
    let mut terms = Vec::with_capacity(9);
    let mut binom = BigInt::one();
    for k in 0..=8i64 {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        terms.push((k * step, Q::from_integer(&binom * sign)));
        binom = binom * (8 - k) / (k + 1);
    }
    QSeries::from_terms(terms, precision)
}

/// `Delta8(q) = q prod_{m>=1} (1 - q^{2m-1})^8 (1 - q^{4m})^8`.
pub fn delta8(precision: i64) -> QSeries {
    let lead = idx(1);
    let mut acc = QSeries::monomial(lead, rational::q(1), precision);
    for m in 1i64.. {
        let odd = idx(2 * m - 1);
        if lead + odd >= precision {
            break;
        }
        acc = multiply(&acc, &one_minus_pow8(odd, precision));
        let quad = idx(4 * m);
        if lead + quad < precision {
            acc = multiply(&acc, &one_minus_pow8(quad, precision));
        }
    }
    acc.truncate(precision)
}
