//! The dimension-doubling route to algebraic relations.
//!
//! `x ∈ Cⁿ` becomes `(x₁, x₁ω, …, xₙ, xₙω)`, classic PSLQ runs over `Z` (real input,
//! `D > 0`) or `Z[i]` (otherwise), and the relation `a′` is reassembled as
//! `a_k = a′_{2k−1} + a′_{2k}ω`.

use std::cmp::Ordering::{Equal, Greater, Less};

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::harness::Classification;
use crate::numerics::{BigComplex, BigReal, PrecisionContext};
use crate::pslq::{solve, SolverConfig, SolverOutcome, SolverStatus};
use crate::quadring::{lattice_params, omega_value, AlgebraicInt, GaussianInt, MixedInt, QuadraticRing};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ReductionStatus {
    Relation,
    InvalidReconstruction,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReductionOutcome {
    pub status: ReductionStatus,
    /// Present iff `status` is `Relation`.
    pub relation: Option<Vec<AlgebraicInt>>,
    /// `a′_{2k−1} + a′_{2k}ω` for every `k`, members of `Z[ω]` or not.
    pub reconstructed: Option<Vec<MixedInt>>,
    /// The inner relation `a′`, kept whenever reconstruction was attempted.
    pub raw_relation: Option<Vec<GaussianInt>>,
    /// Absent when `reconstruct` is called directly.
    pub inner: Option<SolverOutcome>,
    pub original_diagnosis: Option<Classification>,
}

impl ReductionOutcome {
    fn failed(inner: Option<SolverOutcome>, raw: Option<Vec<GaussianInt>>) -> Self {
        ReductionOutcome {
            status: ReductionStatus::Fail,
            relation: None,
            reconstructed: None,
            raw_relation: raw,
            inner,
            original_diagnosis: None,
        }
    }
}

fn require_quadratic(ring: QuadraticRing) -> Result<()> {
    if ring.is_rational() {
        return Err(invalid("reduction needs a quadratic ring, not Q"));
    }
    Ok(())
}

/// `(x₁, x₁ω, x₂, x₂ω, …)`
pub fn expand_vector(x: &[BigComplex], ring: QuadraticRing, ctx: &PrecisionContext) -> Result<Vec<BigComplex>> {
    require_quadratic(ring)?;
    let w = omega_value(ring, ctx);
    Ok(x.iter().flat_map(|v| [v.with_prec(ctx.bits()), v * &w]).collect())
}

/// Ring of the classic solve: `Z` for real input to a real quadratic ring, else `Z[i]`.
pub fn inner_ring(ring: QuadraticRing, x: &[BigComplex]) -> QuadraticRing {
    if ring.d() > 0 && x.iter().all(BigComplex::is_real) {
        QuadraticRing::rationals()
    } else {
        QuadraticRing::gaussian()
    }
}

/// `γ₁ + 0.1` of the inner ring.
pub fn default_inner_gamma(inner: QuadraticRing, ctx: &PrecisionContext) -> Result<BigReal> {
    let g1 = lattice_params(inner, ctx)?.gamma1.ok_or_else(|| invalid("inner ring has no gamma1"))?;
    Ok(g1 + ctx.one() / ctx.from_i64(10))
}

/// Reassembles `a′` (length `2n`) into `n` elements of `Z[i][ω]`.
pub fn reconstruct(a_prime: &[GaussianInt], ring: QuadraticRing) -> Result<ReductionOutcome> {
    require_quadratic(ring)?;
    if !a_prime.len().is_multiple_of(2) {
        return Err(invalid(format!("relation length {} is odd", a_prime.len())));
    }
    let mixed: Vec<MixedInt> =
        a_prime.chunks_exact(2).map(|p| MixedInt::new(p[0].clone(), p[1].clone(), ring)).collect();
    let raw = Some(a_prime.to_vec());
    if mixed.iter().all(MixedInt::is_zero) {
        return Ok(ReductionOutcome::failed(None, raw));
    }
    let relation: Option<Vec<AlgebraicInt>> = mixed.iter().map(MixedInt::to_algebraic).collect();
    let status = if relation.is_some() { ReductionStatus::Relation } else { ReductionStatus::InvalidReconstruction };
    Ok(ReductionOutcome {
        status,
        relation,
        reconstructed: Some(mixed),
        raw_relation: raw,
        inner: None,
        original_diagnosis: None,
    })
}

/// Multiplies `a` by the unit of `Z[i]` that puts its first nonzero entry in
/// `{Re > 0, Im ≥ 0}`. The inner solver fixes a relation only up to such a unit.
pub fn normalize_unit(a: &mut [GaussianInt]) {
    let Some(first) = a.iter().find(|g| !g.is_zero()) else { return };
    let turns = match (first.re.cmp0(), first.im.cmp0()) {
        (Greater, Equal | Greater) => 0,
        (Less | Equal, Greater) => 3,
        (Less, Less | Equal) => 2,
        _ => 1,
    };
    for g in a.iter_mut() {
        for _ in 0..turns {
            // multiply by i
            let re = std::mem::take(&mut g.re);
            g.re = -std::mem::take(&mut g.im);
            g.im = re;
        }
    }
}

/// Expands `x`, solves over [`inner_ring`] with `cfg` as given, normalizes the unit
/// and reconstructs.
pub fn reduction_solve(x: &[BigComplex], ring: QuadraticRing, cfg: &SolverConfig) -> Result<ReductionOutcome> {
    let expanded = expand_vector(x, ring, &cfg.precision)?;
    let inner = inner_ring(ring, x);
    let out = solve(&expanded, inner, cfg)?;
    let Some(rel) = out.relation.as_ref().filter(|_| out.status == SolverStatus::Relation) else {
        return Ok(ReductionOutcome::failed(Some(out), None));
    };
    let mut a_prime = rel.iter().map(GaussianInt::from_classical).collect::<Result<Vec<_>>>()?;
    normalize_unit(&mut a_prime);
    let mut res = reconstruct(&a_prime, ring)?;
    res.inner = Some(out);
    Ok(res)
}
