//! The 2-neighbor of an even unimodular lattice `Λ` along a vector `x` with
//! `(x,x) = 0 mod 4`:
//!
//! - `Λ_x^+ = { v in Λ : (x,v) even }`, of index 2 unless `x/2 ∈ Λ`;
//! - `Γ = Λ_x^+ ∪ (x/2 + y + Λ_x^+)` for any `y` with `(x,y)` odd.
//!
//! `Γ` is unimodular, and odd exactly when `(x,x) = 0 mod 8`. In that case `x/2`
//! lies in the shadow of `Γ`.
//!
//! All vectors here are in `Λ`-coordinates unless stated otherwise.

use num::{One, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::lattice::hnf::{self, RatMatrix};
use crate::lattice::{int_vec, is_integral_vec, matrix_json, LatticeForm, SublatticeRelation};
use crate::rational::{self, q, Q};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Verified,
    Failed,
    SkippedByRankCap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Check {
    pub name: &'static str,
    pub status: CheckStatus,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
    pub unimodular: bool,
    pub odd: bool,
    pub min_norm: Option<Q>,
    pub shadow_min: Option<Q>,
    /// Smallest norm on the glue coset `x/2 + y + Λ_x^+`.
    pub glue_min: Option<Q>,
}

impl Report {
    fn record(&mut self, name: &'static str, ok: bool) {
        let status = if ok { CheckStatus::Verified } else { CheckStatus::Failed };
        self.checks.push(Check { name, status });
    }

    fn skip(&mut self, name: &'static str) {
        self.checks.push(Check {
            name,
            status: CheckStatus::SkippedByRankCap,
        });
    }

    pub fn status(&self, name: &str) -> Option<CheckStatus> {
        self.checks.iter().find(|c| c.name == name).map(|c| c.status)
    }

    pub fn all_verified(&self) -> bool {
        self.checks.iter().all(|c| c.status == CheckStatus::Verified)
    }

    fn names(&self, s: CheckStatus) -> Vec<&'static str> {
        self.checks.iter().filter(|c| c.status == s).map(|c| c.name).collect()
    }

    pub fn to_json(&self) -> Value {
        let opt = |x: &Option<Q>| x.as_ref().map_or(Value::Null, rational::to_json);
        json!({
            "unimodular": self.unimodular,
            "odd": self.odd,
            "min_norm": opt(&self.min_norm),
            "shadow_min": opt(&self.shadow_min),
            "glue_min": opt(&self.glue_min),
            "verified": self.names(CheckStatus::Verified),
            "failed": self.names(CheckStatus::Failed),
            "skipped_by_rank_cap": self.names(CheckStatus::SkippedByRankCap),
        })
    }
}

#[derive(Clone, Debug)]
pub struct NeighborResult {
    pub lambda: LatticeForm,
    pub x: Vec<i64>,
    pub y: Vec<i64>,
    /// `x/2 + y`.
    pub glue: Vec<Q>,
    /// Basis of `Γ` (rows in `Λ`-coordinates) and its Gram form.
    pub gamma_basis: RatMatrix,
    pub gamma: LatticeForm,
    /// `Λ_x^+` inside `Λ`.
    pub even_part: SublatticeRelation,
    pub report: Report,
}

impl NeighborResult {
    /// Coordinates of a `Λ`-coordinate vector in the basis of `Γ`.
    pub fn to_gamma_coords(&self, v: &[Q]) -> Vec<Q> {
        let inv = hnf::inverse(&self.gamma_basis).expect("basis is nonsingular");
        hnf::vec_mat(v, &inv)
    }

    /// `x/2` in `Λ`-coordinates.
    pub fn half_x(&self) -> Vec<Q> {
        self.x.iter().map(|&c| rational::frac(c, 2)).collect()
    }

    /// `Λ_x^+` inside `Γ`.
    pub fn even_part_in_gamma(&self) -> SublatticeRelation {
        let inv = hnf::inverse(&self.gamma_basis).expect("basis is nonsingular");
        let basis = hnf::mat_mul(&self.even_part.child_basis, &inv);
        self.gamma.sublattice(basis).expect("Λ_x^+ has full rank in Γ")
    }

    /// Glue vector in `Λ_x^+`-coordinates, for coset enumeration.
    pub fn glue_in_even_part(&self) -> Vec<Q> {
        let inv = hnf::inverse(&self.even_part.child_basis).expect("basis is nonsingular");
        hnf::vec_mat(&self.glue, &inv)
    }

    pub fn to_json(&self) -> Value {
        let v = |x: &[Q]| Value::Array(x.iter().map(rational::to_json).collect());
        json!({
            "x": v(&int_vec(&self.x)),
            "y": v(&int_vec(&self.y)),
            "glue": v(&self.glue),
            "gamma": self.gamma.to_json(),
            "gamma_basis": matrix_json(&self.gamma_basis),
            "even_part": self.even_part.to_json(),
            "report": self.report.to_json(),
        })
    }
}

fn check_len(l: &LatticeForm, v: &[i64]) -> Result<()> {
    if v.len() != l.rank() {
        return Err(Error::DimensionMismatch {
            expected: l.rank(),
            got: v.len(),
        });
    }
    Ok(())
}

/// Parities of `(x, e_i)` for each basis vector.
fn products_mod2(l: &LatticeForm, x: &[i64]) -> Result<Vec<u8>> {
    if !l.is_integral() {
        return Err(Error::NonIntegralForm);
    }
    let xv = int_vec(x);
    Ok((0..l.rank())
        .map(|i| rational::parity(&l.inner(&xv, &unit(l.rank(), i))).expect("integral"))
        .collect())
}

fn unit(n: usize, i: usize) -> Vec<Q> {
    let mut e = vec![q(0); n];
    e[i] = q(1);
    e
}

/// `Λ_x^+ = { v : (x,v) = 0 mod 2 }` as a sublattice of index 2.
pub fn even_kernel_wrt(lambda: &LatticeForm, x: &[i64]) -> Result<SublatticeRelation> {
    check_len(lambda, x)?;
    let p = products_mod2(lambda, x)?;
    if p.iter().all(|&b| b == 0) {
        return Err(Error::AllProductsEven);
    }
    let rows: Vec<Vec<u8>> = p.into_iter().map(|b| vec![b]).collect();
    lambda.sublattice(hnf::to_rational(&hnf::kernel_mod2(&rows)))
}

/// First basis vector `e_i` with `(x, e_i)` odd.
pub fn find_companion(lambda: &LatticeForm, x: &[i64]) -> Result<Vec<i64>> {
    check_len(lambda, x)?;
    let p = products_mod2(lambda, x)?;
    let i = p.iter().position(|&b| b == 1).ok_or(Error::AllProductsEven)?;
    let mut y = vec![0i64; lambda.rank()];
    y[i] = 1;
    Ok(y)
}

fn is_even_unimodular(l: &LatticeForm) -> bool {
    l.is_unimodular() && l.is_even() == Ok(true)
}

/// Builds `Γ` and runs the checks that need only linear algebra.
pub fn neighbor_lattice(lambda: &LatticeForm, x: &[i64], y: &[i64]) -> Result<NeighborResult> {
    if !is_even_unimodular(lambda) {
        return Err(Error::NotEvenUnimodular);
    }
    check_len(lambda, x)?;
    check_len(lambda, y)?;
    let (xv, yv) = (int_vec(x), int_vec(y));
    let xx = lambda.norm(&xv);
    if rational::parity(&(&xx / q(2))) != Some(0) {
        return Err(Error::NormNotDivisibleBy4(rational::format(&xx)));
    }
    if rational::parity(&lambda.inner(&xv, &yv)) != Some(1) {
        return Err(Error::CompanionNotOdd);
    }
    let even_part = even_kernel_wrt(lambda, x)?;
    let glue: Vec<Q> = xv.iter().zip(&yv).map(|(a, b)| a / q(2) + b).collect();
    let mut gens = even_part.child_basis.clone();
    gens.push(glue.clone());
    let gamma_basis = hnf::hnf_rational(&gens);
    let gamma = LatticeForm::new(hnf::congruence(&gamma_basis, lambda.gram()))?.with_rank_cap(lambda.rank_cap());
    let mut result = NeighborResult {
        lambda: lambda.clone(),
        x: x.to_vec(),
        y: y.to_vec(),
        glue,
        gamma_basis,
        gamma,
        even_part,
        report: Report::default(),
    };
    structural_checks(&mut result, &xx);
    Ok(result)
}

fn same_lattice(a: &[Vec<Q>], b: &[Vec<Q>]) -> bool {
    hnf::hnf_rational(a) == hnf::hnf_rational(b)
}

/// `Γ ∩ Λ` in `Λ`-coordinates: combinations of the `Γ` basis with integral image.
pub fn intersection_with_lambda(r: &NeighborResult) -> RatMatrix {
    let rows: Vec<Vec<u8>> = r
        .gamma_basis
        .iter()
        .map(|row| {
            row.iter()
                .map(|x| rational::parity(&(x * q(2))).expect("denominators divide 2"))
                .collect()
        })
        .collect();
    let coeffs = hnf::to_rational(&hnf::kernel_mod2(&rows));
    hnf::mat_mul(&coeffs, &r.gamma_basis)
}

fn structural_checks(r: &mut NeighborResult, xx: &Q) {
    let mut rep = Report::default();
    let g = &r.gamma;
    rep.unimodular = g.is_unimodular();
    rep.record("gamma_integral", g.is_integral());
    rep.record("gamma_det_one", g.determinant().is_one());
    let odd = g.is_even() == Ok(false);
    rep.odd = odd;
    let expect_odd = rational::parity(&(xx / q(4))) == Some(0);
    rep.record("gamma_parity_matches_norm_of_x", odd == expect_odd);
    rep.record("even_part_index_2_in_lambda", r.even_part.index() == q(2));
    rep.record("even_part_index_2_in_gamma", r.even_part_in_gamma().index() == q(2));
    let meet = intersection_with_lambda(r);
    rep.record("intersection_is_even_part", same_lattice(&meet, &r.even_part.child_basis));

    // (x+2y) ∈ Λ_x^+, so the glue coset is closed under negation
    let inv = hnf::inverse(&r.even_part.child_basis).expect("basis is nonsingular");
    let twice: Vec<Q> = r.glue.iter().map(|c| c * q(2)).collect();
    rep.record("glue_coset_symmetric", is_integral_vec(&hnf::vec_mat(&twice, &inv)));

    let half = r.half_x();
    let base = &r.even_part.child_basis;
    let pairs_integral = base.iter().all(|b| rational::is_integer(&r.lambda.inner(&half, b)));
    rep.record("half_x_pairs_integrally_with_even_part", pairs_integral);
    rep.record(
        "half_x_norm_is_quarter_norm_x",
        r.lambda.norm(&half) == xx / q(4),
    );
    if odd {
        let g0_matches = match g.even_sublattice() {
            Ok(rel) => same_lattice(&hnf::mat_mul(&rel.child_basis, &r.gamma_basis), base),
            Err(_) => false,
        };
        rep.record("even_sublattice_of_gamma_is_even_part", g0_matches);
        let in_shadow = match g.shadow_coset() {
            Ok(s) => {
                let hx = r.to_gamma_coords(&half);
                let diff: Vec<Q> = hx.iter().zip(&s.representative).map(|(a, b)| a - b).collect();
                is_integral_vec(&diff) && !is_integral_vec(&hx)
            }
            Err(_) => false,
        };
        rep.record("half_x_in_shadow", in_shadow);
    }
    r.report = rep;
}

/// Minimum, shadow minimum and glue-coset checks by exhaustive enumeration, or
/// marks them skipped when the rank exceeds the cap.
pub fn enumeration_checks(r: &mut NeighborResult) -> Result<()> {
    let names = [
        "gamma_min_norm",
        "gamma_min_is_min_of_parts",
        "glue_min_at_least_lambda_min_minus_one",
        "shadow_min_at_most_quarter_norm_x",
    ];
    if r.gamma.rank() > r.gamma.rank_cap() {
        for n in names {
            r.report.skip(n);
        }
        return Ok(());
    }
    let odd = r.report.odd;
    let gmin = r.gamma.min_norm()?;
    let kmin = r.even_part.child.min_norm()?;
    let glue_min = r.even_part.child.coset_min(&r.glue_in_even_part())?;
    let lmin = r.lambda.min_norm()?;
    r.report.record("gamma_min_norm", gmin.is_positive_q());
    r.report
        .record("gamma_min_is_min_of_parts", gmin == kmin.clone().min(glue_min.clone()));
    r.report
        .record("glue_min_at_least_lambda_min_minus_one", glue_min >= &lmin - q(1));
    if odd {
        let sm = r.gamma.shadow_min()?;
        let quarter = r.lambda.norm(&r.half_x());
        r.report.record("shadow_min_at_most_quarter_norm_x", sm <= quarter);
        r.report.shadow_min = Some(sm);
    }
    r.report.min_norm = Some(gmin);
    r.report.glue_min = Some(glue_min);
    Ok(())
}

trait PositiveQ {
    fn is_positive_q(&self) -> bool;
}

impl PositiveQ for Q {
    fn is_positive_q(&self) -> bool {
        *self > Q::zero()
    }
}

/// Lexicographically first norm-8 vector outside `2Λ`.
pub fn first_norm8(lambda: &LatticeForm) -> Result<Vec<i64>> {
    let odd = |v: &[i64]| products_mod2(lambda, v).map(|p| p.contains(&1)).unwrap_or(false);
    lambda
        .first_short_vector(&q(8), |v| v.norm == q(8) && odd(&v.coords))?
        .map(|v| v.coords)
        .ok_or(Error::NoNorm8Vector)
}

/// The full construction: picks `x` of norm 8 (from [`first_norm8`] unless
/// supplied), the first basis vector `y` with `(x,y)`
/// odd, builds `Γ`, and verifies everything that is feasible at this rank.
pub fn optimal_odd_pipeline(lambda: &LatticeForm, x: Option<Vec<i64>>) -> Result<NeighborResult> {
    if !is_even_unimodular(lambda) {
        return Err(Error::NotEvenUnimodular);
    }
    let x = match x {
        Some(x) => x,
        None => first_norm8(lambda)?,
    };
    let y = find_companion(lambda, &x)?;
    let mut r = neighbor_lattice(lambda, &x, &y)?;
    enumeration_checks(&mut r)?;
    Ok(r)
}
