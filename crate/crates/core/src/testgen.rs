//! Seeded test sets with planted algebraic relations.
//!
//! An instance is `x = (C₀, C₁, …, C_k)` with `C₀ = Σ z_i C_i`, so `(−1, z₁, …, z_k)`
//! is a relation. Randomness comes from ChaCha8 seeded with the set's `seed`; one
//! stream covers the whole set, in instance order.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numerics::{eval_constant, BigComplex, ConstantSpec, PrecisionContext};
use crate::quadring::{embed, AlgebraicInt, QuadraticRing};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConstantPool {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CoeffSize {
    Small,
    Large,
}

impl CoeffSize {
    /// Coefficients are drawn from `[-bound, bound]`.
    pub fn bound(&self) -> i64 {
        match self {
            CoeffSize::Small => 9,
            CoeffSize::Large => 999_999,
        }
    }

    pub fn default_digits(&self) -> u32 {
        match self {
            CoeffSize::Small => 75,
            CoeffSize::Large => 175,
        }
    }
}

macro_rules! text_enum {
    ($t:ty { $($v:ident => $s:literal),* }) => {
        impl fmt::Display for $t {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $(<$t>::$v => $s),* })
            }
        }

        impl FromStr for $t {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.trim().to_ascii_lowercase().as_str() {
                    $($s => Ok(<$t>::$v),)*
                    other => Err(Error::Parse(format!("unknown {} {other:?}", stringify!($t)))),
                }
            }
        }
    };
}

text_enum!(ConstantPool { Real => "real", Complex => "complex" });
text_enum!(CoeffSize { Small => "small", Large => "large" });

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestSetSpec {
    #[serde(rename = "d")]
    pub ring: QuadraticRing,
    pub pool: ConstantPool,
    pub coeff_size: CoeffSize,
    pub count: usize,
    pub seed: u64,
    #[serde(flatten, with = "precision_fields")]
    pub precision: PrecisionContext,
}

mod precision_fields {
    use super::*;

    #[derive(Serialize, Deserialize)]
    struct Fields {
        precision: u32,
        guard_digits: u32,
    }

    pub fn serialize<S: serde::Serializer>(p: &PrecisionContext, s: S) -> std::result::Result<S::Ok, S::Error> {
        Fields { precision: p.decimal_digits(), guard_digits: p.guard_digits() }.serialize(s)
    }

    pub fn deserialize<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<PrecisionContext, D::Error> {
        let f = Fields::deserialize(d)?;
        PrecisionContext::with_guard(f.precision, f.guard_digits).map_err(serde::de::Error::custom)
    }
}

impl TestSetSpec {
    /// Precision defaults to 75 digits for small and 175 for large coefficients.
    pub fn new(
        ring: QuadraticRing,
        pool: ConstantPool,
        coeff_size: CoeffSize,
        count: usize,
        seed: u64,
    ) -> Result<Self> {
        let precision = PrecisionContext::new(coeff_size.default_digits())?;
        let spec = TestSetSpec { ring, pool, coeff_size, count, seed, precision };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_precision(mut self, precision: PrecisionContext) -> Self {
        self.precision = precision;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.pool == ConstantPool::Complex && !self.ring.is_imaginary() {
            return Err(invalid(format!("a complex constant pool needs an imaginary ring, not {}", self.ring)));
        }
        Ok(())
    }

    pub fn constants(&self) -> Vec<ConstantSpec> {
        match self.pool {
            ConstantPool::Real => real_constant_pool(),
            ConstantPool::Complex => complex_constant_pool(),
        }
    }
}

/// `π^k, e^k, γ^k, sin k` for `1 ≤ k ≤ 9`, then `log 2, log 3, log 5, log 7`.
pub fn real_constant_pool() -> Vec<ConstantSpec> {
    let mut pool = Vec::with_capacity(40);
    pool.extend((1..=9).map(ConstantSpec::PiPow));
    pool.extend((1..=9).map(ConstantSpec::EPow));
    pool.extend((1..=9).map(ConstantSpec::EulerGammaPow));
    pool.extend((1..=9).map(ConstantSpec::Sin));
    pool.extend([2, 3, 5, 7].map(ConstantSpec::Log));
    pool
}

const COMPLEX_MODULI: [i64; 19] = [5, 4, 9, 5, 2, 9, 8, 3, 2, 4, 4, 5, 2, 7, 6, 3, 3, 5, 5];

/// `m_j·e^{ji}` for `j = -9..=9`.
pub fn complex_constant_pool() -> Vec<ConstantSpec> {
    COMPLEX_MODULI.iter().zip(-9..=9).map(|(&modulus, arg)| ConstantSpec::Polar { modulus, arg }).collect()
}

#[derive(Clone, Debug)]
pub struct ProblemInstance {
    /// `(C₀, C₁, …, C_k)`
    pub x: Vec<BigComplex>,
    /// `(−1, z₁, …, z_k)`
    pub planted: Vec<AlgebraicInt>,
    /// `C₁..C_k`
    pub constants: Vec<ConstantSpec>,
    pub k: usize,
}

impl ProblemInstance {
    /// Builds `x` from the constants and coefficients; `C₀` is summed with extra digits.
    pub fn assemble(constants: Vec<ConstantSpec>, z: Vec<AlgebraicInt>, ctx: &PrecisionContext) -> Result<Self> {
        if constants.len() != z.len() || constants.is_empty() {
            return Err(invalid("need one coefficient per constant"));
        }
        let ring = z[0].ring();
        if z.iter().any(|v| v.ring() != ring) {
            return Err(invalid("coefficients from different rings"));
        }
        let wide = PrecisionContext::with_guard(ctx.decimal_digits(), ctx.guard_digits() + 20)?;
        let mut c0 = BigComplex::zero(&wide);
        let mut x = Vec::with_capacity(z.len() + 1);
        x.push(BigComplex::zero(ctx));
        for (spec, zi) in constants.iter().zip(&z) {
            c0.add_mul(&embed(zi, &wide), &eval_constant(*spec, &wide)?);
            x.push(eval_constant(*spec, ctx)?);
        }
        x[0] = c0.with_prec(ctx.bits());
        let mut planted = Vec::with_capacity(z.len() + 1);
        planted.push(AlgebraicInt::from_int(-1, ring));
        planted.extend(z);
        Ok(ProblemInstance { x, planted, k: constants.len(), constants })
    }

    pub fn ring(&self) -> QuadraticRing {
        self.planted[0].ring()
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    /// `x` recomputed from the constant ids at `ctx`, with `C₀` summed exactly there.
    pub fn evaluate_at(&self, ctx: &PrecisionContext) -> Result<Vec<BigComplex>> {
        let mut x = Vec::with_capacity(self.n());
        let mut c0 = BigComplex::zero(ctx);
        x.push(c0.clone());
        for (spec, z) in self.constants.iter().zip(&self.planted[1..]) {
            let c = eval_constant(*spec, ctx)?;
            c0.add_mul(&embed(z, ctx), &c);
            x.push(c);
        }
        x[0] = c0;
        Ok(x)
    }
}

fn draw_coefficient<R: Rng>(rng: &mut R, spec: &TestSetSpec) -> AlgebraicInt {
    let b = spec.coeff_size.bound();
    loop {
        let alpha = rng.gen_range(-b..=b);
        let beta = if spec.ring.is_rational() { 0 } else { rng.gen_range(-b..=b) };
        if alpha != 0 || beta != 0 {
            return AlgebraicInt::new(alpha, beta, spec.ring);
        }
    }
}

/// Draws one instance from `rng`.
pub fn generate_instance<R: Rng>(rng: &mut R, spec: &TestSetSpec) -> Result<ProblemInstance> {
    spec.validate()?;
    let pool = spec.constants();
    let k = rng.gen_range(2..=10usize);
    if pool.len() < k {
        return Err(invalid(format!("pool of {} constants cannot supply {k}", pool.len())));
    }
    let constants: Vec<ConstantSpec> = index::sample(rng, pool.len(), k).into_iter().map(|i| pool[i]).collect();
    let z = (0..k).map(|_| draw_coefficient(rng, spec)).collect();
    ProblemInstance::assemble(constants, z, &spec.precision)
}

#[derive(Clone, Debug)]
pub struct TestSet {
    pub spec: TestSetSpec,
    pub instances: Vec<ProblemInstance>,
}

pub fn generate_test_set(spec: &TestSetSpec) -> Result<TestSet> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let instances = (0..spec.count).map(|_| generate_instance(&mut rng, spec)).collect::<Result<_>>()?;
    Ok(TestSet { spec: *spec, instances })
}

#[derive(Serialize, Deserialize)]
struct InstanceRecord {
    k: usize,
    constants: Vec<ConstantSpec>,
    alpha: Vec<String>,
    beta: Vec<String>,
    c0: String,
}

#[derive(Serialize, Deserialize)]
struct TestSetFile {
    #[serde(flatten)]
    header: TestSetSpec,
    instances: Vec<InstanceRecord>,
}

impl TestSet {
    pub fn ring(&self) -> QuadraticRing {
        self.spec.ring
    }

    pub fn write_json<W: Write>(&self, w: W) -> Result<()> {
        let instances = self
            .instances
            .iter()
            .map(|inst| InstanceRecord {
                k: inst.k,
                constants: inst.constants.clone(),
                alpha: inst.planted[1..].iter().map(|z| z.alpha.to_string()).collect(),
                beta: inst.planted[1..].iter().map(|z| z.beta.to_string()).collect(),
                c0: inst.x[0].to_full_string(),
            })
            .collect();
        serde_json::to_writer_pretty(w, &TestSetFile { header: self.spec, instances })?;
        Ok(())
    }

    /// Rebuilds every instance from its constants and coefficients, checking the
    /// recorded `C₀` against the rebuilt one.
    pub fn read_json<R: Read>(r: R) -> Result<Self> {
        let file: TestSetFile = serde_json::from_reader(r)?;
        let spec = file.header;
        spec.validate()?;
        if file.instances.len() != spec.count {
            return Err(invalid(format!(
                "header promises {} instances, file has {}",
                spec.count,
                file.instances.len()
            )));
        }
        let ctx = spec.precision;
        let tol = ctx.pow10(-i64::from(ctx.decimal_digits()));
        let int = |s: &str| s.parse::<rug::Integer>().map_err(|e| Error::Parse(format!("{s:?}: {e}")));
        let mut instances = Vec::with_capacity(file.instances.len());
        for (idx, rec) in file.instances.into_iter().enumerate() {
            if rec.k != rec.constants.len() || rec.alpha.len() != rec.k || rec.beta.len() != rec.k {
                return Err(invalid(format!("instance {idx}: k = {} disagrees with its lists", rec.k)));
            }
            let z = rec
                .alpha
                .iter()
                .zip(&rec.beta)
                .map(|(a, b)| {
                    let beta = int(b)?;
                    if spec.ring.is_rational() && beta != 0 {
                        return Err(invalid(format!("instance {idx}: rational ring with nonzero beta")));
                    }
                    Ok(AlgebraicInt::new(int(a)?, beta, spec.ring))
                })
                .collect::<Result<Vec<_>>>()?;
            let inst = ProblemInstance::assemble(rec.constants, z, &ctx)?;
            let recorded = ctx.parse_complex(&rec.c0)?;
            if (&recorded - &inst.x[0]).abs() > &tol * &recorded.abs().max(ctx.one()) {
                return Err(invalid(format!("instance {idx}: recorded C0 does not match its coefficients")));
            }
            instances.push(inst);
        }
        Ok(TestSet { spec, instances })
    }
}
