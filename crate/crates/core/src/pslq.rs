//! The PSLQ engine over `Z`, `Z[i]` and imaginary quadratic rings.
//!
//! One loop serves classic real PSLQ, complex PSLQ and APSLQ: the ring enters only
//! through its nearest-integer map. The loop keeps `B = A⁻¹` and `y = (x/‖x‖)·B`
//! instead of materialising `A`. Indices are 0-based throughout.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::io::Write;
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use rug::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{nearly_zero, vector_norm, BigComplex, BigReal, PrecisionContext};
use crate::quadring::{AlgebraicInt, NearestInteger, QuadraticRing, RingContext};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<&T> {
        (0..self.rows).map(|i| &self[(i, j)]).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Mutable `a` and shared `b`; `a != b`.
    pub(crate) fn pair_mut(&mut self, a: (usize, usize), b: (usize, usize)) -> (&mut T, &T) {
        let (ia, ib) = (a.0 * self.cols + a.1, b.0 * self.cols + b.1);
        assert_ne!(ia, ib);
        if ia < ib {
            let (lo, hi) = self.data.split_at_mut(ib);
            (&mut lo[ia], &hi[0])
        } else {
            let (lo, hi) = self.data.split_at_mut(ia);
            (&mut hi[0], &lo[ib])
        }
    }

    pub fn map<U>(&self, mut f: impl FnMut(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(&mut f).collect() }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Matrix<BigComplex> {
    pub fn identity(n: usize, ctx: &PrecisionContext) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { BigComplex::one(ctx) } else { BigComplex::zero(ctx) })
    }

    pub fn conj_transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, rhs: &Self, ctx: &PrecisionContext) -> Self {
        assert_eq!(self.cols, rhs.rows, "shape mismatch");
        Matrix::from_fn(self.rows, rhs.cols, |i, j| {
            let mut acc = BigComplex::zero(ctx);
            for k in 0..self.cols {
                acc.add_mul(&self[(i, k)], &rhs[(k, j)]);
            }
            acc
        })
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &Self, ctx: &PrecisionContext) -> BigReal {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch");
        self.data.iter().zip(&rhs.data).fold(ctx.zero(), |m, (a, b)| m.max((a - b).abs()))
    }
}

/// The `n × (n-1)` working matrix `H'`.
pub type HMatrix = Matrix<BigComplex>;

/// Ring-integer matrices (`D_A`, `B`).
pub type IntMatrix = Matrix<AlgebraicInt>;

/// Numerical image of an integer matrix.
pub fn embed_matrix(m: &IntMatrix, rc: &RingContext) -> Matrix<BigComplex> {
    m.map(|a| rc.embed(a))
}

/// `H_x` for `x` scaled to unit norm (the input need not be normalised).
pub fn build_h_matrix(x: &[BigComplex], ctx: &PrecisionContext) -> Result<HMatrix> {
    let n = x.len();
    if n < 2 {
        return Err(invalid("need at least two entries"));
    }
    if let Some(i) = x.iter().position(BigComplex::is_zero) {
        return Err(invalid(format!("entry {i} is zero")));
    }
    let bits = ctx.bits();
    let norm = vector_norm(x, ctx);
    let x: Vec<BigComplex> = x.iter().map(|v| v.with_prec(bits).scale(&norm.recip())).collect();
    // s[i] = sqrt(Σ_{k ≥ i} |x_k|²)
    let mut s = vec![ctx.zero(); n + 1];
    let mut acc = ctx.zero();
    for i in (0..n).rev() {
        acc += &x[i].norm_sqr();
        s[i] = acc.sqrt();
    }
    Ok(Matrix::from_fn(n, n - 1, |i, j| {
        if i == j {
            BigComplex::real(&s[i + 1] / &s[i])
        } else if i > j {
            let num = &x[i].conj() * &x[j];
            let den = &s[j] * &s[j + 1];
            -&num.scale(&den.recip())
        } else {
            BigComplex::zero(ctx)
        }
    }))
}

/// `D_A` for a lower-trapezoidal `A` (rows ≥ columns, non-zero diagonal).
///
/// `d(i,j) = ⌊-(1/a_jj) Σ_{k=j+1..i} d(i,k) a(k,j)⌉` with `d(i,i) = 1`; row `i` is filled
/// for decreasing `j` so every `d(i,k)` with `k > j` exists when needed.
pub fn reducing_matrix<N: NearestInteger>(a: &HMatrix, nint: &N) -> Result<IntMatrix> {
    let (m, c) = (a.rows(), a.cols());
    if m <= c {
        return Err(invalid("reducing matrix needs more rows than columns"));
    }
    if let Some(j) = (0..c).find(|&j| a[(j, j)].is_zero()) {
        return Err(Error::DegeneratePivot(j));
    }
    let ring = nint.ring();
    let ctx = nint.precision();
    let mut d = Matrix::from_fn(m, m, |i, j| if i == j { AlgebraicInt::one(ring) } else { AlgebraicInt::zero(ring) });
    for i in 1..m {
        for j in (0..i.min(c)).rev() {
            let mut sum = BigComplex::zero(ctx);
            for k in j + 1..=i {
                if !d[(i, k)].is_zero() {
                    sum.add_mul(&nint.embed(&d[(i, k)]), &a[(k, j)]);
                }
            }
            d[(i, j)] = nint.nearest(&-&(&sum / &a[(j, j)]));
        }
    }
    Ok(d)
}

/// Inverse of a unit lower-triangular integer matrix by forward substitution.
pub fn invert_unit_lower(d: &IntMatrix) -> IntMatrix {
    let n = d.rows();
    assert_eq!(n, d.cols(), "square matrix required");
    let ring = d[(0, 0)].ring();
    let mut e = Matrix::from_fn(n, n, |i, j| if i == j { AlgebraicInt::one(ring) } else { AlgebraicInt::zero(ring) });
    for j in 0..n {
        for i in j + 1..n {
            let mut acc = AlgebraicInt::zero(ring);
            for k in j..i {
                acc.sub_mul_assign(&d[(i, k)], &e[(k, j)]);
            }
            e[(i, j)] = acc;
        }
    }
    e
}

/// `Q_[A,k]`: the unitary that restores lower-trapezoidal shape after swapping rows `k, k+1`.
/// Identity when `k` is the last column.
pub fn corner_matrix(a: &HMatrix, k: usize, ctx: &PrecisionContext) -> Result<HMatrix> {
    let c = a.cols();
    if k >= c {
        return Err(invalid(format!("corner index {k} out of range")));
    }
    let mut q = Matrix::identity(c, ctx);
    if k + 1 == c {
        return Ok(q);
    }
    let beta = &a[(k, k)];
    let lambda = &a[(k, k + 1)];
    let delta = (beta.norm_sqr() + lambda.norm_sqr()).sqrt();
    if delta.is_zero() {
        return Err(Error::DegenerateCorner(k));
    }
    let inv = delta.recip();
    q[(k, k)] = beta.conj().scale(&inv);
    q[(k, k + 1)] = (-lambda).scale(&inv);
    q[(k + 1, k)] = lambda.conj().scale(&inv);
    q[(k + 1, k + 1)] = beta.scale(&inv);
    Ok(q)
}

/// Detection threshold `ε` relative to the working precision `d`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ThresholdMode {
    /// `10^-(d-1)`
    #[default]
    #[serde(rename = "d-1")]
    DMinus1,
    /// `10^-(d-4)`
    #[serde(rename = "d-4")]
    DMinus4,
    /// `10^-(d - log10 n)`
    #[serde(rename = "d-logn")]
    DMinusLogN,
}

impl ThresholdMode {
    pub fn epsilon(&self, ctx: &PrecisionContext, n: usize) -> BigReal {
        let d = i64::from(ctx.decimal_digits());
        match self {
            ThresholdMode::DMinus1 => ctx.pow10(1 - d),
            ThresholdMode::DMinus4 => ctx.pow10(4 - d),
            ThresholdMode::DMinusLogN => ctx.pow10(-d) * ctx.from_i64(n as i64),
        }
    }
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdMode::DMinus1 => "d-1",
            ThresholdMode::DMinus4 => "d-4",
            ThresholdMode::DMinusLogN => "d-logn",
        })
    }
}

impl FromStr for ThresholdMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "d-1" => Ok(ThresholdMode::DMinus1),
            "d-4" => Ok(ThresholdMode::DMinus4),
            "d-logn" | "d-log10n" => Ok(ThresholdMode::DMinusLogN),
            other => Err(Error::Parse(format!("unknown threshold {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub gamma: BigReal,
    pub threshold_mode: ThresholdMode,
    /// `None` means `10·n·d`.
    pub max_iterations: Option<u64>,
    /// Relations (and norm bounds) above this norm end the run with `Fail`.
    /// `None` means the chance level `M` with `M^m = 10^(d-1)`, where `m = n` for real
    /// input and `m = n - 1` otherwise: beyond it, d digits cannot tell a relation from noise.
    pub max_norm: Option<BigReal>,
    pub precision: PrecisionContext,
}

impl SolverConfig {
    pub fn new(gamma: BigReal, precision: PrecisionContext) -> Self {
        SolverConfig {
            gamma,
            threshold_mode: ThresholdMode::default(),
            max_iterations: None,
            max_norm: None,
            precision,
        }
    }

    pub fn with_threshold(mut self, mode: ThresholdMode) -> Self {
        self.threshold_mode = mode;
        self
    }

    pub fn with_max_iterations(mut self, cap: u64) -> Self {
        self.max_iterations = Some(cap);
        self
    }

    pub fn with_max_norm(mut self, limit: BigReal) -> Self {
        self.max_norm = Some(limit);
        self
    }

    pub fn iteration_cap(&self, n: usize) -> u64 {
        self.max_iterations.unwrap_or(10 * n as u64 * u64::from(self.precision.decimal_digits()))
    }

    fn validate(&self) -> Result<()> {
        if self.gamma.is_sign_negative() || self.gamma.is_zero() {
            return Err(invalid("gamma must be positive"));
        }
        if self.max_iterations == Some(0) {
            return Err(invalid("max_iterations must be at least 1"));
        }
        if self.max_norm.as_ref().is_some_and(|m| m.is_sign_negative() || m.is_zero()) {
            return Err(invalid("max_norm must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolverStatus {
    Relation,
    Fail,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolverOutcome {
    pub status: SolverStatus,
    pub relation: Option<Vec<AlgebraicInt>>,
    pub iterations_used: u64,
    /// `1/max|H'_jj|` at exit.
    pub final_bound: BigReal,
    /// Largest bound seen over the run.
    pub peak_bound: BigReal,
    pub note: Option<String>,
}

/// Loop state: `H'`, `B`, `y` and the normalised input.
#[derive(Clone, Debug)]
pub struct SolverState {
    x: Vec<BigComplex>,
    h: HMatrix,
    b: IntMatrix,
    y: Vec<BigComplex>,
    iteration: u64,
}

impl SolverState {
    pub fn x(&self) -> &[BigComplex] {
        &self.x
    }

    pub fn h(&self) -> &HMatrix {
        &self.h
    }

    pub fn b(&self) -> &IntMatrix {
        &self.b
    }

    pub fn y(&self) -> &[BigComplex] {
        &self.y
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }
}

/// `1/max_j |H'_jj|`, a lower bound on the norm of any relation.
pub fn relation_norm_bound(state: &SolverState) -> BigReal {
    let h = &state.h;
    let mut best = h[(0, 0)].norm_sqr();
    for j in 1..h.cols() {
        let v = h[(j, j)].norm_sqr();
        if v > best {
            best = v;
        }
    }
    best.sqrt().recip()
}

/// One line of the optional iteration trace.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: u64,
    pub r: usize,
    pub k: usize,
    pub min_abs_y: f64,
    pub bound: f64,
}

struct Engine {
    rc: RingContext,
    ctx: PrecisionContext,
    /// `γ^{2(r+1)}`, compared against `|H'_rr|²`.
    gamma_sq_pows: Vec<BigReal>,
    epsilon: BigReal,
    epsilon_sq: BigReal,
    /// Diagonal entries below this are treated as exact zeros.
    tiny: BigReal,
    norm_limit: NormLimit,
}

enum NormLimit {
    Fixed(BigReal),
    /// `M^power > 10^(d-1)`
    Chance {
        power: u32,
        scale: BigReal,
    },
}

impl NormLimit {
    fn exceeded(&self, norm: &BigReal) -> bool {
        match self {
            NormLimit::Fixed(m) => norm > m,
            NormLimit::Chance { power, scale } => norm.pow_u32(*power) > *scale,
        }
    }
}

enum Step {
    Continue,
    Found(usize),
    Degenerate(usize),
}

impl Engine {
    fn new(ring: QuadraticRing, cfg: &SolverConfig, n: usize, real_input: bool) -> Self {
        let ctx = cfg.precision;
        let g2 = cfg.gamma.with_prec(ctx.bits()).square();
        let mut gamma_sq_pows = Vec::with_capacity(n);
        let mut p = g2.clone();
        for _ in 0..n {
            gamma_sq_pows.push(p.clone());
            p *= &g2;
        }
        let half_guard = i64::from(ctx.guard_digits() / 2);
        let epsilon = cfg.threshold_mode.epsilon(&ctx, n);
        let norm_limit = match &cfg.max_norm {
            Some(m) => NormLimit::Fixed(m.clone()),
            None => NormLimit::Chance {
                power: if real_input { n as u32 } else { n as u32 - 1 },
                scale: ctx.pow10(i64::from(ctx.decimal_digits()) - 1),
            },
        };
        Engine {
            norm_limit,
            rc: RingContext::new(ring, ctx),
            epsilon: epsilon.clone(),
            epsilon_sq: epsilon.square(),
            tiny: ctx.pow10(-i64::from(ctx.decimal_digits()) - half_guard),
            gamma_sq_pows,
            ctx,
        }
    }

    fn init(&self, x: &[BigComplex]) -> Result<SolverState> {
        let n = x.len();
        let norm = vector_norm(x, &self.ctx);
        let inv = norm.recip();
        let x: Vec<BigComplex> = x.iter().map(|v| v.scale(&inv)).collect();
        let h = build_h_matrix(&x, &self.ctx)?;
        let ring = self.rc.ring();
        let b = Matrix::from_fn(n, n, |i, j| if i == j { AlgebraicInt::one(ring) } else { AlgebraicInt::zero(ring) });
        let y = x.clone();
        let mut st = SolverState { x, h, b, y, iteration: 0 };
        if let Some(j) = self.degenerate_diagonal(&st.h) {
            return Err(Error::DegeneratePivot(j));
        }
        self.hermite_reduce(&mut st);
        Ok(st)
    }

    fn degenerate_diagonal(&self, h: &HMatrix) -> Option<usize> {
        // max(|re|, |im|) >= 2^(e-1) > tiny settles the test without a square root.
        let floor = self.tiny.binary_exponent().unwrap_or(i32::MIN);
        (0..h.cols()).find(|&j| match h[(j, j)].max_exponent() {
            Some(e) if e > floor => false,
            _ => nearly_zero(&h[(j, j)].abs(), &self.tiny),
        })
    }

    /// `H' ← D H'`, `B ← B D⁻¹`, `y ← y D⁻¹`, one elementary row operation at a time.
    ///
    /// Rows are visited bottom-up so each operation reads a still-unreduced row `j`,
    /// which yields exactly `D_{H'}·H'`.
    fn hermite_reduce(&self, st: &mut SolverState) {
        let (n, c) = (st.h.rows(), st.h.cols());
        // Every ring here has minimum distance 1, so |q| < 1/2 rounds to 0. The exponent test
        // settles most entries without arithmetic: 2^e <= 2^(E-3) gives |h_ij| < |h_jj|/2.
        let quarter = self.ctx.from_f64(0.25);
        let bar: Vec<BigReal> = (0..c).map(|j| st.h[(j, j)].norm_sqr() * &quarter).collect();
        let exps: Vec<i32> = (0..c).map(|j| st.h[(j, j)].max_exponent().unwrap_or(i32::MIN)).collect();
        for i in (1..n).rev() {
            for j in (0..i.min(c)).rev() {
                let Some(e) = st.h[(i, j)].max_exponent() else { continue };
                if e <= exps[j].saturating_sub(3) || st.h[(i, j)].norm_sqr() < bar[j] {
                    continue;
                }
                let q = &st.h[(i, j)] / &st.h[(j, j)];
                let t = self.rc.nearest(&-&q);
                if t.is_zero() {
                    continue;
                }
                let te = self.rc.embed(&t);
                // row_i += t·row_j
                for col in 0..=j {
                    let delta = &te * &st.h[(j, col)];
                    st.h[(i, col)] += &delta;
                }
                // col_j(B) -= t·col_i(B), y_j -= t·y_i
                let dy = &te * &st.y[i];
                st.y[j] -= &dy;
                for row in 0..n {
                    let (bj, bi) = st.b.pair_mut((row, j), (row, i));
                    bj.sub_mul_assign(&t, bi);
                }
            }
        }
    }

    fn choose_r(&self, h: &HMatrix) -> usize {
        let mut best = 0;
        let mut best_v = &self.gamma_sq_pows[0] * &h[(0, 0)].norm_sqr();
        for r in 1..h.cols() {
            let v = &self.gamma_sq_pows[r] * &h[(r, r)].norm_sqr();
            if v > best_v {
                best = r;
                best_v = v;
            }
        }
        best
    }

    fn apply_corner(&self, h: &mut HMatrix, r: usize) -> Result<()> {
        let beta = h[(r, r)].clone();
        let lambda = h[(r, r + 1)].clone();
        let delta = (beta.norm_sqr() + lambda.norm_sqr()).sqrt();
        if delta.is_zero() {
            return Err(Error::DegenerateCorner(r));
        }
        let inv = delta.recip();
        let cb = beta.conj().scale(&inv);
        let cl = lambda.conj().scale(&inv);
        let nl = (-&lambda).scale(&inv);
        let b = beta.scale(&inv);
        // rows above r are zero in columns r, r+1
        for row in r..h.rows() {
            let u = h[(row, r)].clone();
            let v = h[(row, r + 1)].clone();
            let mut new_u = &cb * &u;
            new_u.add_mul(&cl, &v);
            let mut new_v = &nl * &u;
            new_v.add_mul(&b, &v);
            h[(row, r)] = new_u;
            h[(row, r + 1)] = new_v;
        }
        h[(r, r + 1)] = BigComplex::zero(&self.ctx);
        Ok(())
    }

    /// `Σ |b_ik|²`, exact: on a lattice ring `|a|²` is the norm of `a`.
    fn column_norm_sq(&self, b: &IntMatrix, k: usize) -> BigReal {
        let sum: Integer = (0..b.rows()).map(|i| b[(i, k)].norm()).sum();
        self.ctx.from_integer(&sum)
    }

    fn argmin_y(&self, y: &[BigComplex]) -> usize {
        let mut best = 0;
        let mut best_v = y[0].norm_sqr();
        for (k, v) in y.iter().enumerate().skip(1) {
            let v = v.norm_sqr();
            if v < best_v {
                best = k;
                best_v = v;
            }
        }
        best
    }

    /// The y-test on column `k`, confirmed by a fresh residual `|Σ b_ik x_i|`.
    fn accepts(&self, st: &SolverState, k: usize) -> bool {
        let col_sq = self.column_norm_sq(&st.b, k);
        if col_sq.is_zero()
            || st.y[k].norm_sqr() >= &self.epsilon_sq * &col_sq
            || self.norm_limit.exceeded(&col_sq.sqrt())
        {
            return false;
        }
        let relation: Vec<AlgebraicInt> = (0..st.b.rows()).map(|i| st.b[(i, k)].clone()).collect();
        nearly_zero(&residual(&relation, &st.x, &self.rc), &self.epsilon)
    }

    fn step(&self, st: &mut SolverState) -> Result<(usize, Step)> {
        let c = st.h.cols();
        let r = self.choose_r(&st.h);
        st.h.swap_rows(r, r + 1);
        st.b.swap_cols(r, r + 1);
        st.y.swap(r, r + 1);
        if r + 1 < c {
            self.apply_corner(&mut st.h, r)?;
        }
        st.iteration += 1;
        if let Some(j) = self.degenerate_diagonal(&st.h) {
            return Ok((r, Step::Degenerate(j)));
        }
        self.hermite_reduce(st);
        let k = self.argmin_y(&st.y);
        if self.accepts(st, k) {
            return Ok((r, Step::Found(k)));
        }
        Ok((r, Step::Continue))
    }
}

/// `|Σ a_i x_i|` with `a` embedded at the context precision.
pub fn residual(a: &[AlgebraicInt], x: &[BigComplex], rc: &RingContext) -> BigReal {
    let ctx = rc.precision();
    let mut acc = BigComplex::zero(ctx);
    for (ai, xi) in a.iter().zip(x) {
        if !ai.is_zero() {
            acc.add_mul(&rc.embed(ai), xi);
        }
    }
    acc.abs()
}

fn fingerprint(b: &IntMatrix) -> u64 {
    let mut h = DefaultHasher::new();
    b.data.hash(&mut h);
    h.finish()
}

fn check_inputs(x: &[BigComplex], ring: QuadraticRing, cfg: &SolverConfig) -> Result<()> {
    cfg.validate()?;
    if x.len() < 2 {
        return Err(invalid("need at least two entries"));
    }
    if !ring.has_lattice() {
        return Err(Error::UnsupportedRing(format!("{ring} has no nearest-integer lattice")));
    }
    if ring.is_rational() && x.iter().any(|v| !v.is_real()) {
        return Err(invalid("complex input needs a complex ring"));
    }
    Ok(())
}

fn unit_relation(n: usize, i: usize, ring: QuadraticRing) -> Vec<AlgebraicInt> {
    (0..n).map(|j| if j == i { AlgebraicInt::one(ring) } else { AlgebraicInt::zero(ring) }).collect()
}

/// Finds a relation `a ∈ Z[ω]ⁿ` with `Σ a_i x_i ≈ 0`, or reports failure.
pub fn solve(x: &[BigComplex], ring: QuadraticRing, cfg: &SolverConfig) -> Result<SolverOutcome> {
    solve_observed(x, ring, cfg, |_| {}, None)
}

/// As [`solve`], writing one JSON line per iteration to `trace`.
pub fn solve_traced<W: Write>(
    x: &[BigComplex],
    ring: QuadraticRing,
    cfg: &SolverConfig,
    trace: &mut W,
) -> Result<SolverOutcome> {
    let mut io_err: Option<std::io::Error> = None;
    let out = solve_observed(
        x,
        ring,
        cfg,
        |_| {},
        Some(&mut |rec: &TraceRecord| {
            if io_err.is_some() {
                return;
            }
            let line = serde_json::to_string(rec).expect("trace records serialize");
            if let Err(e) = writeln!(trace, "{line}") {
                io_err = Some(e);
            }
        }),
    )?;
    match io_err {
        Some(e) => Err(e.into()),
        None => Ok(out),
    }
}

/// As [`solve`], calling `observe` after the initial reduction and after every iteration,
/// and `trace` with a summary record per iteration.
pub fn solve_observed(
    x: &[BigComplex],
    ring: QuadraticRing,
    cfg: &SolverConfig,
    mut observe: impl FnMut(&SolverState),
    mut trace: Option<&mut dyn FnMut(&TraceRecord)>,
) -> Result<SolverOutcome> {
    check_inputs(x, ring, cfg)?;
    let n = x.len();
    let ctx = cfg.precision;
    let x: Vec<BigComplex> = x.iter().map(|v| v.with_prec(ctx.bits())).collect();
    let engine = Engine::new(ring, cfg, n, x.iter().all(BigComplex::is_real));

    let norm = vector_norm(&x, &ctx);
    if norm.is_zero() {
        return Err(invalid("input vector is zero"));
    }
    // A (numerically) vanishing entry is its own relation.
    let scaled_eps = &engine.epsilon * &norm;
    if let Some(i) = x.iter().position(|v| nearly_zero(&v.abs(), &scaled_eps)) {
        let one = ctx.one();
        return Ok(SolverOutcome {
            status: SolverStatus::Relation,
            relation: Some(unit_relation(n, i, ring)),
            iterations_used: 0,
            final_bound: one.clone(),
            peak_bound: one,
            note: Some(format!("entry {i} is zero")),
        });
    }

    let mut st = engine.init(&x)?;
    observe(&st);
    let mut bound = relation_norm_bound(&st);
    let mut peak = bound.clone();
    let cap = cfg.iteration_cap(n);
    // The trajectory is a function of B, so a repeated B means the run cycles.
    let mut seen = HashSet::new();
    seen.insert(fingerprint(&st.b));
    // States with a vanished diagonal keep the last finite bound.
    let finish = |st: &SolverState, k: Option<usize>, bound: BigReal, peak: BigReal, note: Option<&str>| {
        let relation: Option<Vec<AlgebraicInt>> = k.map(|k| (0..n).map(|i| st.b[(i, k)].clone()).collect());
        SolverOutcome {
            status: if relation.is_some() { SolverStatus::Relation } else { SolverStatus::Fail },
            relation,
            iterations_used: st.iteration,
            final_bound: bound,
            peak_bound: peak,
            note: note.map(str::to_string),
        }
    };
    while st.iteration < cap {
        let (r, step) = match engine.step(&mut st) {
            Ok(s) => s,
            Err(e) => return Ok(finish(&st, None, bound, peak, Some(&e.to_string()))),
        };
        if let Step::Degenerate(j) = step {
            let k = engine.argmin_y(&st.y);
            return Ok(if engine.accepts(&st, k) {
                finish(&st, Some(k), bound, peak, None)
            } else {
                finish(&st, None, bound, peak, Some(&format!("diagonal {j} vanished")))
            });
        }
        bound = relation_norm_bound(&st);
        if bound > peak {
            peak = bound.clone();
        }
        observe(&st);
        if let Some(trace) = trace.as_mut() {
            let k = engine.argmin_y(&st.y);
            trace(&TraceRecord {
                iteration: st.iteration,
                r,
                k,
                min_abs_y: st.y[k].abs().to_f64(),
                bound: bound.to_f64(),
            });
        }
        if let Step::Found(k) = step {
            return Ok(finish(&st, Some(k), bound, peak, None));
        }
        if engine.norm_limit.exceeded(&bound) {
            return Ok(finish(&st, None, bound, peak, Some("norm bound exceeds limit")));
        }
        if !seen.insert(fingerprint(&st.b)) {
            return Ok(finish(&st, None, bound, peak, Some("iteration cycles")));
        }
    }
    Ok(finish(&st, None, bound, peak, Some("iteration cap reached")))
}
