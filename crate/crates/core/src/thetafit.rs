//! Theta series of odd unimodular lattices in the basis
//! `theta3^(n-8j) * Delta8^j`, and the matching shadow series
//! `(-1/16)^j * theta2^(n-8j) * theta4(q^2)^(8j)` with the same coefficients.
//!
//! Knowing the minimum norm fixes the low coefficients by back-substitution
//! (basis element `j` starts at `q^j`). The rest are pinned down by facts about
//! the shadow, expressed as linear constraints and solved exactly.

use std::collections::BTreeMap;
use std::fmt;

use num::{Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::qseries::{self, idx, QSeries, GRID};
use crate::rational::{self, q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaDecomposition {
    pub n: usize,
    /// `a_0 ..= a_{n/8}`; `None` marks a coefficient not yet determined.
    pub coefficients: Vec<Option<Q>>,
}

impl ThetaDecomposition {
    pub fn unknown(n: usize) -> Self {
        ThetaDecomposition {
            n,
            coefficients: vec![None; n / 8 + 1],
        }
    }

    pub fn max_index(&self) -> usize {
        self.n / 8
    }

    pub fn is_determined(&self) -> bool {
        self.coefficients.iter().all(Option::is_some)
    }

    pub fn unknowns(&self) -> Vec<usize> {
        (0..self.coefficients.len())
            .filter(|&j| self.coefficients[j].is_none())
            .collect()
    }

    /// Determined coefficients, or `None` while any is unknown.
    pub fn values(&self) -> Option<Vec<Q>> {
        self.coefficients.iter().cloned().collect()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.coefficients
                .iter()
                .map(|c| match c {
                    Some(c) => rational::to_json(c),
                    None => Value::Null,
                })
                .collect(),
        )
    }
}

/// `constant + sum_j coeffs[j] * a_j`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AffineForm {
    pub constant: Q,
    pub coeffs: BTreeMap<usize, Q>,
}

impl AffineForm {
    pub fn constant(c: Q) -> Self {
        AffineForm {
            constant: c,
            coeffs: BTreeMap::new(),
        }
    }

    fn add_scaled(&mut self, unknown: Option<usize>, s: &Q) {
        match unknown {
            None => self.constant += s,
            Some(j) => {
                let e = self.coeffs.entry(j).or_insert_with(Q::zero);
                *e += s;
                if e.is_zero() {
                    self.coeffs.remove(&j);
                }
            }
        }
    }

    pub fn coeff(&self, j: usize) -> Q {
        self.coeffs.get(&j).cloned().unwrap_or_else(Q::zero)
    }

    /// Substitutes values for every referenced unknown.
    pub fn evaluate(&self, values: &BTreeMap<usize, Q>) -> Option<Q> {
        let mut acc = self.constant.clone();
        for (j, c) in &self.coeffs {
            acc += c * values.get(j)?;
        }
        Some(acc)
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero() && self.coeffs.is_empty()
    }
}

impl fmt::Display for AffineForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if !self.constant.is_zero() || self.coeffs.is_empty() {
            parts.push(rational::format(&self.constant));
        }
        for (j, c) in &self.coeffs {
            parts.push(format!("({})*a_{}", rational::format(c), j));
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// A series whose coefficients are affine in the undetermined `a_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSeries {
    pub terms: BTreeMap<i64, AffineForm>,
    pub precision: i64,
}

impl AffineSeries {
    pub fn coefficient_at(&self, index: i64) -> Result<AffineForm> {
        if index >= self.precision {
            return Err(Error::QueryBeyondPrecision {
                index,
                precision: self.precision,
            });
        }
        Ok(self.terms.get(&index).cloned().unwrap_or_default())
    }

    pub fn evaluate(&self, values: &BTreeMap<usize, Q>) -> Option<QSeries> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (&i, form) in &self.terms {
            out.push((i, form.evaluate(values)?));
        }
        Some(QSeries::from_terms(out, self.precision))
    }
}

/// Required value `value` for the coefficient of `q^r` in the shadow series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShadowConstraint {
    pub r: Q,
    pub value: Q,
}

/// Required value for a coefficient of the lattice series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeConstraint {
    pub r: Q,
    pub value: Q,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaSolution {
    pub decomposition: ThetaDecomposition,
    pub min_norm: usize,
    pub theta_lattice: QSeries,
    pub theta_shadow: QSeries,
}

impl ThetaSolution {
    pub fn coefficients(&self) -> Vec<Q> {
        self.decomposition
            .values()
            .expect("solution is fully determined")
    }

    pub fn to_json(&self) -> Value {
        let conditions: Vec<Value> =
            match check_shadow_conditions(self.decomposition.n, self.min_norm, &self.theta_shadow) {
                Ok(v) => v.iter().map(ShadowViolation::to_json).collect(),
                Err(e) => vec![json!({"error": e.to_string()})],
            };
        json!({
            "n": self.decomposition.n,
            "min_norm": self.min_norm,
            "a": self.decomposition.to_json(),
            "theta_L": self.theta_lattice.to_json(),
            "theta_S": self.theta_shadow.to_json(),
            "conditions": conditions,
        })
    }
}

fn check_index(n: usize, j: usize) -> Result<()> {
    if j > n / 8 {
        return Err(Error::IndexOutOfRange { j, max: n / 8 });
    }
    Ok(())
}

/// `theta3^(n-8j) * Delta8^j`, valuation `q^j` with leading coefficient 1.
pub fn lattice_basis_series(n: usize, j: usize, precision: i64) -> Result<QSeries> {
    check_index(n, j)?;
    let t3 = qseries::power(&qseries::theta3(precision), (n - 8 * j) as u32);
    let d8 = qseries::power(&qseries::delta8(precision), j as u32);
    Ok(qseries::multiply(&t3, &d8).truncate(precision))
}

/// `(-1)^j / 16^j * theta2^(n-8j) * theta4(q^2)^(8j)`.
///
/// Any `n` works on the quarter grid: the `theta2` power starts at
/// `q^((n-8j)/4)`.
pub fn shadow_basis_series(n: usize, j: usize, precision: i64) -> Result<QSeries> {
    check_index(n, j)?;
    let t2 = qseries::power(&qseries::theta2(precision), (n - 8 * j) as u32);
    let half = (precision + 1) / 2;
    let t4sq = qseries::compose_q_power(&qseries::theta4(half), 2);
    let t4sq = qseries::power(&t4sq, (8 * j) as u32);
    let sign = if j % 2 == 0 { 1 } else { -1 };
    let scale = Q::new(sign.into(), num::BigInt::from(16).pow(j as u32));
    Ok(qseries::multiply(&t2, &t4sq).truncate(precision).scale(&scale))
}

fn basis(n: usize, precision: i64, shadow: bool) -> Result<Vec<QSeries>> {
    (0..=n / 8)
        .map(|j| {
            if shadow {
                shadow_basis_series(n, j, precision)
            } else {
                lattice_basis_series(n, j, precision)
            }
        })
        .collect()
}

/// Back-substitution: `targets[k]` is the required coefficient of `q^k` in the
/// lattice series for `k < targets.len()`.
fn fit_prefix(n: usize, targets: &[Q]) -> Result<ThetaDecomposition> {
    let max = n / 8 + 1;
    if targets.len() > max {
        return Err(Error::Overdetermined {
            n,
            min_norm: targets.len(),
            max,
        });
    }
    let precision = idx(targets.len() as i64);
    let lattice = basis(n, precision, false)?;
    let mut dec = ThetaDecomposition::unknown(n);
    for (k, target) in targets.iter().enumerate() {
        let mut a = target.clone();
        for (j, series) in lattice.iter().enumerate().take(k) {
            let aj = dec.coefficients[j].as_ref().expect("filled in order");
            a -= aj * series.coefficient_at_q(k as i64)?;
        }
        dec.coefficients[k] = Some(a);
    }
    Ok(dec)
}

/// Determines `a_0 .. a_{min_norm-1}` from `theta_L = 1 + O(q^min_norm)`.
pub fn fit_from_minimum(n: usize, min_norm: usize) -> Result<ThetaDecomposition> {
    if min_norm == 0 {
        return Ok(ThetaDecomposition::unknown(n));
    }
    let mut targets = vec![Q::zero(); min_norm];
    targets[0] = q(1);
    fit_prefix(n, &targets)
}

/// Determines every `a_j` from the first `n/8 + 1` integral coefficients of a
/// known lattice theta series.
pub fn fit_from_theta(n: usize, theta: &QSeries) -> Result<ThetaDecomposition> {
    let count = n / 8 + 1;
    let need = idx(count as i64 - 1);
    if theta.precision() <= need {
        return Err(Error::InsufficientPrecision {
            have: theta.precision(),
            need,
        });
    }
    let targets = (0..count as i64)
        .map(|k| theta.coefficient_at_q(k))
        .collect::<Result<Vec<_>>>()?;
    fit_prefix(n, &targets)
}

fn affine_series(n: usize, partial: &ThetaDecomposition, precision: i64, shadow: bool) -> Result<AffineSeries> {
    let mut terms: BTreeMap<i64, AffineForm> = BTreeMap::new();
    for (j, series) in basis(n, precision, shadow)?.iter().enumerate() {
        let (unknown, scale) = match &partial.coefficients[j] {
            Some(a) => (None, a.clone()),
            None => (Some(j), q(1)),
        };
        if scale.is_zero() {
            continue;
        }
        for (i, c) in series.terms() {
            terms.entry(i).or_default().add_scaled(unknown, &(c * &scale));
        }
    }
    terms.retain(|_, f| !f.is_zero());
    Ok(AffineSeries { terms, precision })
}

/// The shadow series with undetermined `a_j` left symbolic.
pub fn affine_shadow_series(n: usize, partial: &ThetaDecomposition, precision: i64) -> Result<AffineSeries> {
    affine_series(n, partial, precision, true)
}

/// The lattice series with undetermined `a_j` left symbolic.
pub fn affine_lattice_series(n: usize, partial: &ThetaDecomposition, precision: i64) -> Result<AffineSeries> {
    affine_series(n, partial, precision, false)
}

/// Regenerates both series from fully determined coefficients.
pub fn series_from_coefficients(n: usize, a: &[Q], precision: i64) -> Result<(QSeries, QSeries)> {
    let lattice = basis(n, precision, false)?;
    let shadow = basis(n, precision, true)?;
    let lp: Vec<(Q, &QSeries)> = a.iter().cloned().zip(lattice.iter()).collect();
    let sp: Vec<(Q, &QSeries)> = a.iter().cloned().zip(shadow.iter()).collect();
    Ok((qseries::linear_combine(&lp), qseries::linear_combine(&sp)))
}

/// Working precision (exponent index) used by the solver.
pub fn default_precision(min_norm: usize) -> i64 {
    idx(10.max(min_norm as i64 + 3))
}

pub fn solve_with_shadow(n: usize, min_norm: usize, constraints: &[ShadowConstraint]) -> Result<ThetaSolution> {
    solve(n, min_norm, constraints, &[], None)
}

/// Fits the low coefficients from `min_norm`, then solves for the remaining ones
/// from the given constraints together with `B_0 = 0`.
///
/// The zero vector lies in the lattice and hence never in the shadow, so the
/// constant term of the shadow series always vanishes.
pub fn solve(
    n: usize,
    min_norm: usize,
    shadow: &[ShadowConstraint],
    lattice: &[LatticeConstraint],
    precision: Option<i64>,
) -> Result<ThetaSolution> {
    let partial = fit_from_minimum(n, min_norm)?;
    let mut precision = precision.unwrap_or_else(|| default_precision(min_norm));
    let grid = |r: &Q| qseries::to_index(r).filter(|&i| i >= 0).ok_or_else(|| Error::OffGrid(rational::format(r)));
    let mut shadow_rows = Vec::with_capacity(shadow.len() + 1);
    shadow_rows.push((0i64, Q::zero()));
    for c in shadow {
        shadow_rows.push((grid(&c.r)?, c.value.clone()));
    }
    let mut lattice_rows = Vec::with_capacity(lattice.len());
    for c in lattice {
        lattice_rows.push((grid(&c.r)?, c.value.clone()));
    }
    let top = shadow_rows.iter().chain(&lattice_rows).map(|(i, _)| *i).max().unwrap_or(0);
    precision = precision.max(top + 1);

    let sym_shadow = affine_shadow_series(n, &partial, precision)?;
    let sym_lattice = affine_lattice_series(n, &partial, precision)?;
    let mut equations = Vec::new();
    for (i, v) in &shadow_rows {
        equations.push((sym_shadow.coefficient_at(*i)?, v.clone()));
    }
    for (i, v) in &lattice_rows {
        equations.push((sym_lattice.coefficient_at(*i)?, v.clone()));
    }
    let unknowns = partial.unknowns();
    let solved = solve_linear(&unknowns, &equations)?;

    let mut dec = partial;
    for (j, v) in solved {
        dec.coefficients[j] = Some(v);
    }
    let a = dec.values().expect("all unknowns solved");
    let (theta_lattice, theta_shadow) = series_from_coefficients(n, &a, precision)?;
    check_counts("theta_L", &theta_lattice)?;
    check_counts("theta_S", &theta_shadow)?;
    Ok(ThetaSolution {
        decomposition: dec,
        min_norm,
        theta_lattice,
        theta_shadow,
    })
}

fn check_counts(name: &str, s: &QSeries) -> Result<()> {
    for (i, c) in s.terms() {
        if !rational::is_integer(c) || c.is_negative() {
            return Err(Error::IntegralityViolation(format!(
                "{} coefficient at q^{} is {}",
                name,
                rational::format(&rational::frac(i, GRID)),
                rational::format(c)
            )));
        }
    }
    Ok(())
}

/// Exact Gauss-Jordan elimination over the rationals. Pivots are chosen per
/// column as the entry of smallest bit size, ties going to the earliest row.
fn solve_linear(unknowns: &[usize], equations: &[(AffineForm, Q)]) -> Result<BTreeMap<usize, Q>> {
    let cols = unknowns.len();
    // row: coefficients of unknowns, then right-hand side
    let mut rows: Vec<Vec<Q>> = equations
        .iter()
        .map(|(form, v)| {
            let mut row: Vec<Q> = unknowns.iter().map(|&j| form.coeff(j)).collect();
            row.push(v - &form.constant);
            row
        })
        .collect();
    let mut pivot_cols = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let pick = (r..rows.len())
            .filter(|&i| !rows[i][c].is_zero())
            .min_by_key(|&i| rational::size(&rows[i][c]));
        let Some(p) = pick else { continue };
        rows.swap(r, p);
        let inv = rows[r][c].recip();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for k in c..=cols {
                    let d = &rows[r][k] * &f;
                    rows[i][k] -= d;
                }
            }
        }
        pivot_cols.push(c);
        r += 1;
    }
    if rows[r..].iter().any(|row| !row[cols].is_zero()) {
        return Err(Error::Inconsistent);
    }
    if pivot_cols.len() < cols {
        let free: Vec<usize> = (0..cols)
            .filter(|c| !pivot_cols.contains(c))
            .map(|c| unknowns[c])
            .collect();
        return Err(Error::Underdetermined {
            free: free.len(),
            unknowns: free,
        });
    }
    Ok(pivot_cols
        .iter()
        .enumerate()
        .map(|(row, &c)| (unknowns[c], rows[row][cols].clone()))
        .collect())
}

/// A failed shadow condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ShadowViolation {
    /// Nonzero `B_r` with `r` not congruent to `n/4` mod 2.
    WrongNormClass { r: Q },
    /// More than one nonzero `B_r` with `r < (min+2)/2`.
    SeveralBelowHalfMinPlusOne { norms: Vec<Q> },
    /// Nonzero `B_r` with `r < min/4`.
    NonzeroBelowQuarterMin { r: Q },
    /// `B_r > 2` with `r < min/2`.
    ExceedsTwoBelowHalfMin { r: Q, value: Q },
}

impl ShadowViolation {
    pub fn to_json(&self) -> Value {
        let f = rational::format;
        match self {
            ShadowViolation::WrongNormClass { r } => json!({"condition": "norm_class", "r": f(r)}),
            ShadowViolation::SeveralBelowHalfMinPlusOne { norms } => json!({
                "condition": "at_most_one_below_half_min_plus_one",
                "r": norms.iter().map(f).collect::<Vec<_>>(),
            }),
            ShadowViolation::NonzeroBelowQuarterMin { r } => {
                json!({"condition": "zero_below_quarter_min", "r": f(r)})
            }
            ShadowViolation::ExceedsTwoBelowHalfMin { r, value } => {
                json!({"condition": "at_most_two_below_half_min", "r": f(r), "value": f(value)})
            }
        }
    }
}

impl fmt::Display for ShadowViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShadowViolation::WrongNormClass { r } => write!(f, "B_{} nonzero outside the norm class n/4 mod 2", r),
            ShadowViolation::SeveralBelowHalfMinPlusOne { norms } => {
                let rs: Vec<String> = norms.iter().map(rational::format).collect();
                write!(f, "several nonzero B_r below (min+2)/2: r in {{{}}}", rs.join(", "))
            }
            ShadowViolation::NonzeroBelowQuarterMin { r } => write!(f, "B_{} nonzero below min/4", r),
            ShadowViolation::ExceedsTwoBelowHalfMin { r, value } => {
                write!(f, "B_{} = {} exceeds 2 below min/2", r, value)
            }
        }
    }
}

/// Tests the shadow series against the four classical conditions.
///
/// The norm-class condition is read as: `B_r` vanishes unless
/// `r = n/4 (mod 2)`, which is what every shadow satisfies.
pub fn check_shadow_conditions(n: usize, min_norm: usize, theta_shadow: &QSeries) -> Result<Vec<ShadowViolation>> {
    let m = min_norm as i64;
    // r < (min+2)/2  <=>  index < 2(min+2)
    let need = 2 * (m + 2);
    if theta_shadow.precision() < need {
        return Err(Error::InsufficientPrecision {
            have: theta_shadow.precision(),
            need,
        });
    }
    let norm = |i: i64| rational::frac(i, GRID);
    let mut out = Vec::new();
    for (i, _) in theta_shadow.terms() {
        if (i - n as i64).rem_euclid(8) != 0 {
            out.push(ShadowViolation::WrongNormClass { r: norm(i) });
        }
    }
    let low: Vec<Q> = theta_shadow.terms().filter(|(i, _)| *i < need).map(|(i, _)| norm(i)).collect();
    if low.len() > 1 {
        out.push(ShadowViolation::SeveralBelowHalfMinPlusOne { norms: low });
    }
    for (i, c) in theta_shadow.terms() {
        // r < min/4  <=>  index < min
        if i < m {
            out.push(ShadowViolation::NonzeroBelowQuarterMin { r: norm(i) });
        }
        // r < min/2  <=>  index < 2 min
        if i < 2 * m && *c > q(2) {
            out.push(ShadowViolation::ExceedsTwoBelowHalfMin {
                r: norm(i),
                value: c.clone(),
            });
        }
    }
    Ok(out)
}

/// Upper bound on the minimum of a unimodular lattice and what it implies
/// for odd lattices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NormBound {
    pub bound: u64,
    /// Lattices meeting the bound are necessarily even (n divisible by 24).
    pub bound_forces_even: bool,
    /// Largest possible minimum of an odd lattice when n = 24k, i.e. 2k+1.
    pub optimal_odd: Option<u64>,
}

pub fn minimum_norm_bound(n: u64) -> NormBound {
    let bound = if n == 23 { 3 } else { 2 * (n / 24) + 2 };
    let forces_even = n % 24 == 0;
    NormBound {
        bound,
        bound_forces_even: forces_even,
        optimal_odd: forces_even.then(|| 2 * (n / 24) + 1),
    }
}
