//! Small helpers around `BigRational`: parsing and printing the `"p/q"` string
//! form used by every file format, and integrality tests.

use num::{BigInt, BigRational, Integer, One, Signed, Zero};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

/// Parses `"p"`, `"-p"` or `"p/q"`; rejects decimals and zero denominators.
pub fn parse(s: &str) -> Option<Q> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((a, b)) => (a.trim(), Some(b.trim())),
        None => (s, None),
    };
    let num: BigInt = num.parse().ok()?;
    let den: BigInt = match den {
        Some(d) => d.parse().ok()?,
        None => BigInt::one(),
    };
    if den.is_zero() {
        return None;
    }
    Some(Q::new(num, den))
}

/// Canonical string form: bare integer when the denominator is 1, else `p/q`.
pub fn format(x: &Q) -> String {
    if is_integer(x) {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn to_json(x: &Q) -> serde_json::Value {
    serde_json::Value::String(format(x))
}

/// Accepts a JSON string in `p/q` form or a JSON integer.
pub fn from_json(v: &serde_json::Value) -> Option<Q> {
    match v {
        serde_json::Value::String(s) => parse(s),
        serde_json::Value::Number(n) => n.as_i64().map(q),
        _ => None,
    }
}

/// `x mod 2` for an integer-valued rational, as 0 or 1.
pub fn parity(x: &Q) -> Option<u8> {
    if !is_integer(x) {
        return None;
    }
    Some(if x.numer().is_odd() { 1 } else { 0 })
}

/// Bit sizes of |numerator| and denominator; used to rank pivot candidates.
pub fn size(x: &Q) -> (u64, u64) {
    (x.numer().abs().bits(), x.denom().bits())
}
