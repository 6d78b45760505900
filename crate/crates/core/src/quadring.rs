//! Quadratic fields `Q(√D)`, their rings of integers `Z[ω]`, and nearest-integer maps.
//!
//! `ω = √D` when `D ≡ 2, 3 (mod 4)` and `ω = (1 + √D)/2` when `D ≡ 1 (mod 4)`.
//! The rational integers are modelled as the degenerate ring with `D = 0` (config id 0).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Error, Result};
use crate::numerics::{BigComplex, BigReal, PrecisionContext};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OmegaForm {
    SqrtD,
    HalfOnePlusSqrtD,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classical {
    RationalInts,
    GaussianInts,
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct QuadraticRing {
    d: i64,
    omega_form: OmegaForm,
    classical: Classical,
}

fn is_square_free(d: i64) -> bool {
    let n = d.unsigned_abs();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p * p) {
            return false;
        }
        p += 1;
    }
    true
}

/// Builds `Z[ω]` for square-free `D ∉ {0, 1}`.
pub fn make_ring(d: i64) -> Result<QuadraticRing> {
    if d == 0 || d == 1 {
        return Err(invalid(format!("D = {d} does not define a quadratic field")));
    }
    if !is_square_free(d) {
        return Err(invalid(format!("D = {d} is not square-free")));
    }
    let omega_form = if d.rem_euclid(4) == 1 { OmegaForm::HalfOnePlusSqrtD } else { OmegaForm::SqrtD };
    let classical = if d == -1 { Classical::GaussianInts } else { Classical::General };
    Ok(QuadraticRing { d, omega_form, classical })
}

impl QuadraticRing {
    pub fn rationals() -> Self {
        QuadraticRing { d: 0, omega_form: OmegaForm::SqrtD, classical: Classical::RationalInts }
    }

    pub fn gaussian() -> Self {
        make_ring(-1).expect("-1 is square-free")
    }

    /// Ring from its config id: 0 is `Z`, anything else goes through [`make_ring`].
    pub fn from_id(id: i64) -> Result<Self> {
        if id == 0 {
            Ok(Self::rationals())
        } else {
            make_ring(id)
        }
    }

    /// Config id; 0 for the rational integers.
    pub fn id(&self) -> i64 {
        self.d
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn omega_form(&self) -> OmegaForm {
        self.omega_form
    }

    pub fn classical(&self) -> Classical {
        self.classical
    }

    pub fn is_rational(&self) -> bool {
        self.classical == Classical::RationalInts
    }

    /// Imaginary quadratic ring (includes the Gaussian integers).
    pub fn is_imaginary(&self) -> bool {
        self.d < 0
    }

    /// A nearest-integer map exists (the integers form a lattice in the ambient field).
    pub fn has_lattice(&self) -> bool {
        self.is_rational() || self.is_imaginary()
    }

    fn require_lattice(&self) -> Result<()> {
        if self.has_lattice() {
            Ok(())
        } else {
            Err(Error::UnsupportedRing(format!("Z[ω] for D = {} is dense in R; no nearest-integer lattice", self.d)))
        }
    }

    /// `(D - 1)/4` for the half-integral form.
    fn quarter(&self) -> i64 {
        (self.d - 1).div_euclid(4)
    }
}

impl fmt::Display for QuadraticRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.classical {
            Classical::RationalInts => f.write_str("Q"),
            _ => write!(f, "Q(sqrt({}))", self.d),
        }
    }
}

impl Serialize for QuadraticRing {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_i64(self.d)
    }
}

impl<'de> Deserialize<'de> for QuadraticRing {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let d = i64::deserialize(deserializer)?;
        QuadraticRing::from_id(d).map_err(serde::de::Error::custom)
    }
}

/// `α + βω ∈ Z[ω]`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AlgebraicInt {
    pub alpha: Integer,
    pub beta: Integer,
    ring: QuadraticRing,
}

impl AlgebraicInt {
    pub fn new(alpha: impl Into<Integer>, beta: impl Into<Integer>, ring: QuadraticRing) -> Self {
        let beta = beta.into();
        assert!(!ring.is_rational() || beta == 0, "rational integers have no ω part");
        AlgebraicInt { alpha: alpha.into(), beta, ring }
    }

    pub fn from_int(v: impl Into<Integer>, ring: QuadraticRing) -> Self {
        AlgebraicInt { alpha: v.into(), beta: Integer::new(), ring }
    }

    pub fn zero(ring: QuadraticRing) -> Self {
        Self::from_int(0, ring)
    }

    pub fn one(ring: QuadraticRing) -> Self {
        Self::from_int(1, ring)
    }

    pub fn omega(ring: QuadraticRing) -> Self {
        Self::new(0, 1, ring)
    }

    pub fn ring(&self) -> QuadraticRing {
        self.ring
    }

    pub fn is_zero(&self) -> bool {
        self.alpha == 0 && self.beta == 0
    }

    /// Field norm `N(α + βω)`.
    pub fn norm(&self) -> Integer {
        let (a, b) = (&self.alpha, &self.beta);
        match self.ring.omega_form {
            OmegaForm::SqrtD => Integer::from(a * a) - Integer::from(b * b) * self.ring.d,
            OmegaForm::HalfOnePlusSqrtD => {
                Integer::from(a * a) + Integer::from(a * b) - Integer::from(b * b) * self.ring.quarter()
            }
        }
    }

    pub fn is_unit(&self) -> bool {
        let n = self.norm();
        n == 1 || n == -1
    }

    /// `self -= t * other`, the column update used when inverting Hermite reduction steps.
    pub(crate) fn sub_mul_assign(&mut self, t: &AlgebraicInt, other: &AlgebraicInt) {
        if t.is_zero() || other.is_zero() {
            return;
        }
        let p = t * other;
        self.alpha -= p.alpha;
        self.beta -= p.beta;
    }

    /// Parses `α`, `β*w`, `α+β*w` or `α-β*w` (`w` alone means `1*w`).
    pub fn parse(s: &str, ring: QuadraticRing) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("bad algebraic integer {s:?}"));
        let int = |x: &str| x.parse::<Integer>().map_err(|_| bad());
        let Some(body) = t.strip_suffix('w') else {
            return Ok(Self::from_int(int(&t)?, ring));
        };
        if ring.is_rational() {
            return Err(bad());
        }
        let body = body.strip_suffix('*').unwrap_or(body);
        let split = body.char_indices().skip(1).filter(|(_, c)| *c == '+' || *c == '-').last();
        let (a, b) = match split {
            Some((p, _)) => (&body[..p], &body[p..]),
            None => ("0", body),
        };
        let b = match b {
            "" | "+" => "1",
            "-" => "-1",
            other => other.strip_prefix('+').unwrap_or(other),
        };
        Ok(Self::new(int(a)?, int(b)?, ring))
    }
}

impl fmt::Display for AlgebraicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.beta == 0 {
            write!(f, "{}", self.alpha)
        } else if self.beta < 0 {
            write!(f, "{}{}*w", self.alpha, self.beta)
        } else {
            write!(f, "{}+{}*w", self.alpha, self.beta)
        }
    }
}

impl fmt::Debug for AlgebraicInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn same_ring(a: &AlgebraicInt, b: &AlgebraicInt) -> QuadraticRing {
    assert_eq!(a.ring, b.ring, "mixing elements of different rings");
    a.ring
}

impl Add for &AlgebraicInt {
    type Output = AlgebraicInt;
    fn add(self, rhs: &AlgebraicInt) -> AlgebraicInt {
        let ring = same_ring(self, rhs);
        AlgebraicInt {
            alpha: Integer::from(&self.alpha + &rhs.alpha),
            beta: Integer::from(&self.beta + &rhs.beta),
            ring,
        }
    }
}

impl Sub for &AlgebraicInt {
    type Output = AlgebraicInt;
    fn sub(self, rhs: &AlgebraicInt) -> AlgebraicInt {
        let ring = same_ring(self, rhs);
        AlgebraicInt {
            alpha: Integer::from(&self.alpha - &rhs.alpha),
            beta: Integer::from(&self.beta - &rhs.beta),
            ring,
        }
    }
}

impl Mul for &AlgebraicInt {
    type Output = AlgebraicInt;
    fn mul(self, rhs: &AlgebraicInt) -> AlgebraicInt {
        let ring = same_ring(self, rhs);
        let (a, b, c, d) = (&self.alpha, &self.beta, &rhs.alpha, &rhs.beta);
        let ac = Integer::from(a * c);
        let bd = Integer::from(b * d);
        let cross = Integer::from(a * d) + Integer::from(b * c);
        let (alpha, beta) = match ring.omega_form {
            // ω² = D
            OmegaForm::SqrtD => (ac + bd * ring.d, cross),
            // ω² = ω + (D - 1)/4
            OmegaForm::HalfOnePlusSqrtD => (ac + Integer::from(&bd * ring.quarter()), cross + bd),
        };
        AlgebraicInt { alpha, beta, ring }
    }
}

impl Neg for &AlgebraicInt {
    type Output = AlgebraicInt;
    fn neg(self) -> AlgebraicInt {
        AlgebraicInt { alpha: Integer::from(-&self.alpha), beta: Integer::from(-&self.beta), ring: self.ring }
    }
}

impl Serialize for AlgebraicInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Numerical value of ω.
pub fn omega_value(ring: QuadraticRing, ctx: &PrecisionContext) -> BigComplex {
    if ring.is_rational() {
        return BigComplex::zero(ctx);
    }
    let root = ctx.from_i64(ring.d.abs()).sqrt();
    let sqrt_d = if ring.d < 0 { BigComplex::new(ctx.zero(), root) } else { BigComplex::real(root) };
    match ring.omega_form {
        OmegaForm::SqrtD => sqrt_d,
        OmegaForm::HalfOnePlusSqrtD => {
            let half = ctx.one() / ctx.from_i64(2);
            BigComplex::new(&(&sqrt_d.re + &ctx.one()) * &half, &sqrt_d.im * &half)
        }
    }
}

/// `α + β·ω` as a complex number.
pub fn embed(a: &AlgebraicInt, ctx: &PrecisionContext) -> BigComplex {
    RingContext::new(a.ring, *ctx).embed(a)
}

/// Covering radius, ρ, and γ₁ of a lattice ring.
#[derive(Clone, Debug)]
pub struct LatticeParams {
    pub epsilon_cover: BigReal,
    pub rho: BigReal,
    pub gamma1: Option<BigReal>,
}

impl LatticeParams {
    /// `τ(γ) = (1/γ² + 1/ρ²)^(-1/2)`.
    pub fn tau(&self, gamma: &BigReal) -> BigReal {
        let s = gamma.square().recip() + self.rho.square().recip();
        s.sqrt().recip()
    }
}

pub fn lattice_params(ring: QuadraticRing, ctx: &PrecisionContext) -> Result<LatticeParams> {
    ring.require_lattice()?;
    let one = ctx.one();
    let two = ctx.from_i64(2);
    let epsilon_cover = if ring.is_rational() {
        one.clone() / &two
    } else {
        let m = ctx.from_i64(ring.d.abs());
        let m1 = &m + &one;
        match ring.omega_form {
            OmegaForm::SqrtD => m1.sqrt() / &two,
            OmegaForm::HalfOnePlusSqrtD => m1 / (ctx.from_i64(4) * m.sqrt()),
        }
    };
    let rho = epsilon_cover.recip();
    let gamma1 = if rho > one {
        let r2 = rho.square();
        Some(&rho / &(r2 - &one).sqrt())
    } else {
        None
    };
    Ok(LatticeParams { epsilon_cover, rho, gamma1 })
}

/// Rounds to the nearest integer; ties go away from zero.
pub fn nearest_rational_integer(x: &BigReal) -> Integer {
    x.round_to_integer()
}

/// Maps field elements to a nearest point of `Z[ω]` and back.
pub trait NearestInteger {
    fn ring(&self) -> QuadraticRing;
    fn precision(&self) -> &PrecisionContext;
    fn nearest(&self, z: &BigComplex) -> AlgebraicInt;
    fn embed(&self, a: &AlgebraicInt) -> BigComplex;
}

/// A ring bound to a working precision, with ω and `√|D|` precomputed.
#[derive(Clone, Debug)]
pub struct RingContext {
    ring: QuadraticRing,
    ctx: PrecisionContext,
    omega: BigComplex,
    sqrt_abs_d: BigReal,
    half: BigReal,
}

impl RingContext {
    pub fn new(ring: QuadraticRing, ctx: PrecisionContext) -> Self {
        let sqrt_abs_d = if ring.is_rational() { ctx.one() } else { ctx.from_i64(ring.d.abs()).sqrt() };
        RingContext { ring, omega: omega_value(ring, &ctx), sqrt_abs_d, half: ctx.one() / ctx.from_i64(2), ctx }
    }

    pub fn omega(&self) -> &BigComplex {
        &self.omega
    }

    /// Embedding of `c0 + c1·ω` with Gaussian-integer coordinates.
    pub fn embed_mixed(&self, m: &MixedInt) -> BigComplex {
        let c0 = m.c0.to_complex(&self.ctx);
        let c1 = m.c1.to_complex(&self.ctx);
        &c0 + &(&c1 * &self.omega)
    }

    fn nearest_half_form(&self, z: &BigComplex) -> AlgebraicInt {
        // Rows of the lattice sit at Im = β·√|D|/2; the point nearest z lies in one of the
        // two rows bracketing it, at the nearest α within that row.
        let beta_f = (&z.im + &z.im) / &self.sqrt_abs_d;
        let lo = beta_f.floor_to_integer();
        let hi = beta_f.ceil_to_integer();
        let candidate = |beta: &Integer| {
            let shift = self.ctx.from_integer(beta) * &self.half;
            let alpha = (&z.re - &shift).round_to_integer();
            AlgebraicInt { alpha, beta: beta.clone(), ring: self.ring }
        };
        let a = candidate(&lo);
        if hi == lo {
            return a;
        }
        let b = candidate(&hi);
        let da = (z - &self.embed(&a)).norm_sqr();
        let db = (z - &self.embed(&b)).norm_sqr();
        if db < da {
            b
        } else {
            a
        }
    }
}

impl NearestInteger for RingContext {
    fn ring(&self) -> QuadraticRing {
        self.ring
    }

    fn precision(&self) -> &PrecisionContext {
        &self.ctx
    }

    /// Nearest lattice point; a rational ring uses only the real part.
    fn nearest(&self, z: &BigComplex) -> AlgebraicInt {
        if self.ring.is_rational() {
            return AlgebraicInt::from_int(z.re.round_to_integer(), self.ring);
        }
        debug_assert!(self.ring.is_imaginary(), "nearest integer needs a lattice ring");
        match self.ring.omega_form {
            OmegaForm::SqrtD => {
                let alpha = z.re.round_to_integer();
                let beta = if self.ring.classical == Classical::GaussianInts {
                    z.im.round_to_integer()
                } else {
                    (&z.im / &self.sqrt_abs_d).round_to_integer()
                };
                AlgebraicInt { alpha, beta, ring: self.ring }
            }
            OmegaForm::HalfOnePlusSqrtD => self.nearest_half_form(z),
        }
    }

    fn embed(&self, a: &AlgebraicInt) -> BigComplex {
        let alpha = self.ctx.from_integer(&a.alpha);
        if a.beta == 0 {
            return BigComplex::real(alpha);
        }
        let beta = self.ctx.from_integer(&a.beta);
        let w = self.omega.scale(&beta);
        BigComplex::new(&w.re + &alpha, w.im)
    }
}

/// Nearest element of `Z[ω]` to `z` (rings with a lattice only).
pub fn nearest_quadratic_integer(z: &BigComplex, ring: QuadraticRing, ctx: &PrecisionContext) -> Result<AlgebraicInt> {
    ring.require_lattice()?;
    if ring.is_rational() && !z.is_real() {
        return Err(invalid("non-real value has no nearest rational integer"));
    }
    Ok(RingContext::new(ring, *ctx).nearest(z))
}

/// Exact Gaussian integer `re + im·i`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct GaussianInt {
    pub re: Integer,
    pub im: Integer,
}

impl GaussianInt {
    pub fn new(re: impl Into<Integer>, im: impl Into<Integer>) -> Self {
        GaussianInt { re: re.into(), im: im.into() }
    }

    pub fn is_zero(&self) -> bool {
        self.re == 0 && self.im == 0
    }

    pub fn to_complex(&self, ctx: &PrecisionContext) -> BigComplex {
        BigComplex::new(ctx.from_integer(&self.re), ctx.from_integer(&self.im))
    }

    /// Reads an element of `Z` or `Z[i]` as a Gaussian integer.
    pub fn from_classical(a: &AlgebraicInt) -> Result<Self> {
        match a.ring.classical {
            Classical::RationalInts | Classical::GaussianInts => {
                Ok(GaussianInt { re: a.alpha.clone(), im: a.beta.clone() })
            }
            Classical::General => Err(invalid("not an element of Z or Z[i]")),
        }
    }
}

impl Add for &GaussianInt {
    type Output = GaussianInt;
    fn add(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt { re: Integer::from(&self.re + &rhs.re), im: Integer::from(&self.im + &rhs.im) }
    }
}

impl Mul for &GaussianInt {
    type Output = GaussianInt;
    fn mul(self, rhs: &GaussianInt) -> GaussianInt {
        GaussianInt {
            re: Integer::from(&self.re * &rhs.re) - Integer::from(&self.im * &rhs.im),
            im: Integer::from(&self.re * &rhs.im) + Integer::from(&self.im * &rhs.re),
        }
    }
}

impl fmt::Display for GaussianInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re == 0, self.im == 0) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}*I", self.im),
            (false, false) if self.im < 0 => write!(f, "{}{}*I", self.re, self.im),
            (false, false) => write!(f, "{}+{}*I", self.re, self.im),
        }
    }
}

impl Serialize for GaussianInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// True iff `g1 + g2·ω` lies in `Z[ω]`.
///
/// For `D ≠ -1`, `{1, i, √D, i√D}` are linearly independent over `Q`, so membership
/// forces both imaginary parts to vanish, in both ω forms. For `D = -1` every such
/// sum is already a Gaussian integer.
pub fn is_member_of_ring(g1: &GaussianInt, g2: &GaussianInt, ring: QuadraticRing) -> bool {
    match ring.classical {
        Classical::GaussianInts => true,
        Classical::RationalInts => g1.im == 0 && g2.is_zero(),
        Classical::General => g1.im == 0 && g2.im == 0,
    }
}

/// `c0 + c1·ω` with Gaussian-integer coordinates: the shape of a relation reassembled
/// from a Gaussian relation of the doubled vector. Lies in `Z[i][ω]`, not always in `Z[ω]`.
#[derive(Clone, Debug)]
pub struct MixedInt {
    pub c0: GaussianInt,
    pub c1: GaussianInt,
    ring: QuadraticRing,
}

impl MixedInt {
    pub fn new(c0: GaussianInt, c1: GaussianInt, ring: QuadraticRing) -> Self {
        MixedInt { c0, c1, ring }.canonical()
    }

    pub fn from_algebraic(a: &AlgebraicInt) -> Self {
        MixedInt::new(GaussianInt::new(a.alpha.clone(), 0), GaussianInt::new(a.beta.clone(), 0), a.ring)
    }

    pub fn ring(&self) -> QuadraticRing {
        self.ring
    }

    // With ω = i the coordinates are not unique; fold everything into c0.
    fn canonical(self) -> Self {
        if self.ring.classical != Classical::GaussianInts {
            return self;
        }
        let (a, b, c, d) = (self.c0.re, self.c0.im, self.c1.re, self.c1.im);
        MixedInt { c0: GaussianInt { re: a - d, im: b + c }, c1: GaussianInt::default(), ring: self.ring }
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero()
    }

    pub fn is_member(&self) -> bool {
        is_member_of_ring(&self.c0, &self.c1, self.ring)
    }

    /// The element as `α + βω` when it lies in `Z[ω]`.
    pub fn to_algebraic(&self) -> Option<AlgebraicInt> {
        if !self.is_member() {
            return None;
        }
        if self.ring.classical == Classical::GaussianInts {
            // canonical form keeps the value in c0 = α + βi
            return Some(AlgebraicInt::new(self.c0.re.clone(), self.c0.im.clone(), self.ring));
        }
        Some(AlgebraicInt::new(self.c0.re.clone(), self.c1.re.clone(), self.ring))
    }
}

impl PartialEq for MixedInt {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.c0 == other.c0 && self.c1 == other.c1
    }
}

impl Mul for &MixedInt {
    type Output = MixedInt;
    fn mul(self, rhs: &MixedInt) -> MixedInt {
        assert_eq!(self.ring, rhs.ring, "mixing elements of different rings");
        let ring = self.ring;
        let p00 = &self.c0 * &rhs.c0;
        let p11 = &self.c1 * &rhs.c1;
        let cross = &(&self.c0 * &rhs.c1) + &(&self.c1 * &rhs.c0);
        let scale =
            |g: &GaussianInt, k: i64| GaussianInt { re: Integer::from(&g.re * k), im: Integer::from(&g.im * k) };
        let (c0, c1) = match ring.omega_form {
            OmegaForm::SqrtD => (&p00 + &scale(&p11, ring.d), cross),
            OmegaForm::HalfOnePlusSqrtD => (&p00 + &scale(&p11, ring.quarter()), &cross + &p11),
        };
        MixedInt::new(c0, c1, ring)
    }
}

impl fmt::Display for MixedInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(a) = self.to_algebraic() {
            return write!(f, "{a}");
        }
        write!(f, "({})+({})*w", self.c0, self.c1)
    }
}

impl Serialize for MixedInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const SUPPORTED: [i64; 8] = [-1, -2, -3, -5, -6, -7, -10, -11];

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(40).unwrap()
    }

    fn tol(c: &PrecisionContext) -> BigReal {
        c.pow10(-(i64::from(c.decimal_digits())) + 5)
    }

    fn z(c: &PrecisionContext, re: f64, im: f64) -> BigComplex {
        BigComplex::new(c.from_f64(re), c.from_f64(im))
    }

    /// Brute-force nearest point over `±radius` around `center`, returned as (distance², point).
    fn brute_nearest(
        rc: &RingContext,
        target: &BigComplex,
        center: &AlgebraicInt,
        radius: i64,
    ) -> (BigReal, AlgebraicInt) {
        let mut best: Option<(BigReal, AlgebraicInt)> = None;
        for da in -radius..=radius {
            for db in -radius..=radius {
                let p =
                    AlgebraicInt::new(Integer::from(&center.alpha + da), Integer::from(&center.beta + db), rc.ring());
                let d = (target - &rc.embed(&p)).norm_sqr();
                if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                    best = Some((d, p));
                }
            }
        }
        best.unwrap()
    }

    #[test]
    fn ring_construction() {
        let g = make_ring(-1).unwrap();
        assert_eq!(g.classical(), Classical::GaussianInts);
        assert_eq!(g.omega_form(), OmegaForm::SqrtD);
        assert_eq!(make_ring(-3).unwrap().omega_form(), OmegaForm::HalfOnePlusSqrtD);
        assert_eq!(make_ring(5).unwrap().omega_form(), OmegaForm::HalfOnePlusSqrtD);
        assert_eq!(make_ring(2).unwrap().omega_form(), OmegaForm::SqrtD);
        assert_eq!(make_ring(-2).unwrap().classical(), Classical::General);
        for bad in [4, 0, 1, -4, 12, -18] {
            assert!(make_ring(bad).is_err(), "D = {bad}");
        }
        assert!(QuadraticRing::from_id(0).unwrap().is_rational());
    }

    #[test]
    fn omega_embeddings() {
        let c = ctx();
        let w = omega_value(make_ring(-1).unwrap(), &c);
        assert!(w == BigComplex::i(&c));
        let phi = omega_value(make_ring(5).unwrap(), &c);
        assert_eq!(phi.re.to_decimal_string(11), "1.6180339887");
        // ω² = ω + 1 for the golden ratio
        let lhs = &phi * &phi;
        let rhs = &phi + &BigComplex::one(&c);
        assert!((&lhs - &rhs).abs() < tol(&c));
        let w2 = omega_value(make_ring(-2).unwrap(), &c);
        assert!(w2.re.is_zero());
        assert_eq!(w2.im.to_decimal_string(9), "1.41421356");
    }

    #[test]
    fn embedding_examples() {
        let c = ctx();
        let r3 = make_ring(-3).unwrap();
        let e = embed(&AlgebraicInt::new(3, 4, r3), &c);
        // 3 + 4(1 + i√3)/2 = 5 + 2√3 i
        assert_eq!(e.re.to_decimal_string(10), "5");
        assert!((&e.im - &(c.from_i64(12).sqrt())).abs() < tol(&c));
        let g = QuadraticRing::gaussian();
        assert!(embed(&AlgebraicInt::new(0, 1, g), &c) == BigComplex::i(&c));
        assert!(embed(&AlgebraicInt::new(1, 0, g), &c) == BigComplex::one(&c));
    }

    #[test]
    fn lattice_parameters() {
        let c = ctx();
        let t = tol(&c);
        let q = lattice_params(QuadraticRing::rationals(), &c).unwrap();
        assert!((&q.rho - &c.from_i64(2)).abs() < t);
        let g43 = (c.from_i64(4) / c.from_i64(3)).sqrt();
        assert!((q.gamma1.clone().unwrap() - &g43).abs() < t);

        let g = lattice_params(QuadraticRing::gaussian(), &c).unwrap();
        let s2 = c.from_i64(2).sqrt();
        assert!((&g.rho - &s2).abs() < t);
        assert!((g.gamma1.clone().unwrap() - &s2).abs() < t);

        let p11 = lattice_params(make_ring(-11).unwrap(), &c).unwrap();
        let want = c.from_i64(22).sqrt() / c.from_i64(2);
        assert!((p11.gamma1.unwrap() - &want).abs() < t);

        let p5 = lattice_params(make_ring(-5).unwrap(), &c).unwrap();
        assert_eq!(p5.rho.to_decimal_string(4), "0.8165");
        assert!(p5.gamma1.is_none());

        let p2 = lattice_params(make_ring(-2).unwrap(), &c).unwrap();
        assert!((p2.gamma1.unwrap() - &c.from_i64(2)).abs() < t);

        assert!(matches!(lattice_params(make_ring(2).unwrap(), &c), Err(Error::UnsupportedRing(_))));
    }

    #[test]
    fn gamma1_exists_only_for_the_small_discriminants() {
        let c = ctx();
        for d in SUPPORTED {
            let p = lattice_params(make_ring(d).unwrap(), &c).unwrap();
            let expect = matches!(d, -1 | -2 | -3 | -7 | -11);
            assert_eq!(p.gamma1.is_some(), expect, "D = {d}");
            assert!((&p.epsilon_cover * &p.rho - &c.one()).abs() < tol(&c));
            if let Some(g1) = &p.gamma1 {
                let s = g1.square().recip() + p.rho.square().recip();
                assert!((s - &c.one()).abs() < c.pow10(-38));
                // τ(γ₁) = 1 and τ grows towards ρ
                assert!((p.tau(g1) - &c.one()).abs() < tol(&c));
                assert!(p.tau(&c.from_i64(1000)) < p.rho);
            }
        }
    }

    #[test]
    fn rational_rounding() {
        let c = ctx();
        assert_eq!(nearest_rational_integer(&c.parse_real("2.4").unwrap()), 2);
        assert_eq!(nearest_rational_integer(&c.parse_real("-2.5").unwrap()), -3);
        assert_eq!(nearest_rational_integer(&c.parse_real("3.7").unwrap()), 4);
        let q = QuadraticRing::rationals();
        assert!(nearest_quadratic_integer(&z(&c, 1.0, 0.5), q, &c).is_err());
        let r = nearest_quadratic_integer(&z(&c, -7.6, 0.0), q, &c).unwrap();
        assert_eq!(r, AlgebraicInt::from_int(-8, q));
        assert!(nearest_quadratic_integer(&z(&c, 1.0, 0.0), make_ring(3).unwrap(), &c).is_err());
    }

    #[test]
    fn quadratic_rounding_examples() {
        let c = ctx();
        let g = QuadraticRing::gaussian();
        assert_eq!(nearest_quadratic_integer(&z(&c, 1.2, 0.7), g, &c).unwrap(), AlgebraicInt::new(1, 1, g));
        let r2 = make_ring(-2).unwrap();
        let target = z(&c, 0.9, 1.5);
        let got = nearest_quadratic_integer(&target, r2, &c).unwrap();
        assert_eq!(got, AlgebraicInt::new(1, 1, r2));
        let rc = RingContext::new(r2, c);
        let (_, best) = brute_nearest(&rc, &target, &AlgebraicInt::zero(r2), 4);
        assert_eq!(best, got);
    }

    #[test]
    fn half_form_picks_the_true_nearest_row_point() {
        // α' = 0.45, β' = 0.9 for D = -3: the nearest lattice point is ω itself.
        let c = ctx();
        let r3 = make_ring(-3).unwrap();
        let rc = RingContext::new(r3, c);
        let beta = c.parse_real("0.9").unwrap();
        let sqrt3 = c.from_i64(3).sqrt();
        let target = BigComplex::new(c.parse_real("0.9").unwrap(), &(&beta * &sqrt3) / &c.from_i64(2));
        assert_eq!(rc.nearest(&target), AlgebraicInt::omega(r3));
    }

    #[test]
    fn lattice_points_are_fixed() {
        let c = ctx();
        for d in SUPPORTED {
            let ring = make_ring(d).unwrap();
            let rc = RingContext::new(ring, c);
            for (a, b) in [(0, 0), (3, -2), (-7, 5), (1, 1), (-4, -9)] {
                let p = AlgebraicInt::new(a, b, ring);
                assert_eq!(rc.nearest(&rc.embed(&p)), p, "D = {d}");
            }
        }
    }

    #[test]
    fn membership() {
        let r5 = make_ring(-5).unwrap();
        assert!(is_member_of_ring(&GaussianInt::new(3, 0), &GaussianInt::new(-2, 0), r5));
        assert!(!is_member_of_ring(&GaussianInt::new(0, 1), &GaussianInt::new(1, 0), r5));
        assert!(is_member_of_ring(&GaussianInt::default(), &GaussianInt::default(), r5));
        assert!(is_member_of_ring(&GaussianInt::new(0, 1), &GaussianInt::new(1, 0), QuadraticRing::gaussian()));
        for d in SUPPORTED {
            let ring = make_ring(d).unwrap();
            assert!(is_member_of_ring(&GaussianInt::new(3, 0), &GaussianInt::new(-2, 0), ring));
        }
    }

    /// Exact check of the membership criterion: `g1 + g2·ω = α + βω` has a solution in
    /// integers iff the rational and irrational components match; compute them by hand.
    #[test]
    fn membership_matches_component_solution() {
        for d in [-2i64, -3, -5, -7, -10, -11] {
            let ring = make_ring(d).unwrap();
            for (a, b, cc, dd) in [(1, 0, 2, 0), (0, 1, 1, 0), (1, 0, 0, 1), (2, 2, 3, 0), (0, 0, 0, 3)] {
                // g1 + g2ω in the basis {1, i, √m, i√m}, doubled to stay integral.
                let (i_part, sqrt_part) = match ring.omega_form() {
                    // (a+bi) + (c+di)·i√m = a + bi + c·i√m - d√m
                    OmegaForm::SqrtD => (2 * b, -2 * dd),
                    // (a+bi) + (c+di)(1+i√m)/2
                    OmegaForm::HalfOnePlusSqrtD => (2 * b + dd, -dd),
                };
                // Z[ω] has no i or √m component.
                let member = i_part == 0 && sqrt_part == 0;
                let got = is_member_of_ring(&GaussianInt::new(a, b), &GaussianInt::new(cc, dd), ring);
                assert_eq!(got, member, "D = {d}, ({a},{b},{cc},{dd})");
            }
        }
    }

    #[test]
    fn parse_and_display() {
        let r = make_ring(-2).unwrap();
        for (s, a, b) in
            [("3+1*w", 3, 1), ("-1", -1, 0), ("2*w", 0, 2), ("-4-2*w", -4, -2), ("w", 0, 1), ("5-w", 5, -1)]
        {
            assert_eq!(AlgebraicInt::parse(s, r).unwrap(), AlgebraicInt::new(a, b, r), "{s}");
        }
        assert_eq!(AlgebraicInt::new(3, -2, r).to_string(), "3-2*w");
        assert_eq!(AlgebraicInt::new(0, 1, r).to_string(), "0+1*w");
        assert!(AlgebraicInt::parse("1+w", QuadraticRing::rationals()).is_err());
        assert!(AlgebraicInt::parse("x", r).is_err());
    }

    #[test]
    fn mixed_products_match_embeddings() {
        let c = ctx();
        for d in [-1i64, -2, -3, -7, 5] {
            let ring = make_ring(d).unwrap();
            let rc = RingContext::new(ring, c);
            let a = MixedInt::new(GaussianInt::new(2, -1), GaussianInt::new(0, 3), ring);
            let b = MixedInt::new(GaussianInt::new(-1, 4), GaussianInt::new(5, 1), ring);
            let p = &a * &b;
            let lhs = rc.embed_mixed(&p);
            let rhs = &rc.embed_mixed(&a) * &rc.embed_mixed(&b);
            assert!((&lhs - &rhs).abs() < tol(&c), "D = {d}");
        }
        // ω = i collapses onto Gaussian integers
        let g = QuadraticRing::gaussian();
        let m = MixedInt::new(GaussianInt::new(0, 1), GaussianInt::new(-1, 0), g);
        assert!(m.is_zero());
    }

    fn ring_strategy() -> impl Strategy<Value = QuadraticRing> {
        prop::sample::select(vec![0i64, -1, -2, -3, -5, -6, -7, -10, -11, 2, 3, 5, 13])
            .prop_map(|d| QuadraticRing::from_id(d).unwrap())
    }

    fn elem(ring: QuadraticRing) -> impl Strategy<Value = AlgebraicInt> {
        (-1000i64..1000, -1000i64..1000)
            .prop_map(move |(a, b)| AlgebraicInt::new(a, if ring.is_rational() { 0 } else { b }, ring))
    }

    proptest! {
        #[test]
        fn ring_arithmetic_is_associative_and_embeds(
            (ring, a, b, cc) in ring_strategy().prop_flat_map(|r| (Just(r), elem(r), elem(r), elem(r)))
        ) {
            let c = ctx();
            prop_assert_eq!(&(&a * &b) * &cc, &a * &(&b * &cc));
            prop_assert_eq!(&(&a + &b) * &cc, &(&a * &cc) + &(&b * &cc));
            let rc = RingContext::new(ring, c);
            let lhs = rc.embed(&(&a * &b));
            let rhs = &rc.embed(&a) * &rc.embed(&b);
            let scale = rhs.abs() + c.one();
            prop_assert!((&lhs - &rhs).abs() < tol(&c) * scale);
            // N(ab) = N(a)N(b)
            prop_assert_eq!((&a * &b).norm(), a.norm() * b.norm());
        }

        #[test]
        fn nearest_is_minimal_against_brute_force(
            d in prop::sample::select(SUPPORTED.to_vec()),
            re in -10.0f64..10.0,
            im in -10.0f64..10.0,
        ) {
            let c = ctx();
            let ring = make_ring(d).unwrap();
            let rc = RingContext::new(ring, c);
            let target = z(&c, re, im);
            let got = rc.nearest(&target);
            let dist = (&target - &rc.embed(&got)).norm_sqr();
            let (best, _) = brute_nearest(&rc, &target, &got, 4);
            prop_assert!(&dist - &best < tol(&c));
            let eps = lattice_params(ring, &c).unwrap().epsilon_cover;
            prop_assert!(dist.sqrt() <= eps + tol(&c));
        }
    }
}
