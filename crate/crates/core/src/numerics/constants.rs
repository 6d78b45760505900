//! Symbolic constants used to build test problems.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Mutex, OnceLock};

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{BigComplex, BigReal, PrecisionContext};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConstantSpec {
    /// `π^k`
    PiPow(u32),
    /// `e^k`
    EPow(u32),
    /// `γ^k`, Euler–Mascheroni.
    EulerGammaPow(u32),
    /// `sin(k)`, radians.
    Sin(i32),
    /// Natural logarithm of a small prime.
    Log(u32),
    /// `modulus · e^{i·arg}`
    Polar { modulus: i64, arg: i32 },
}

const LOG_PRIMES: [u32; 4] = [2, 3, 5, 7];

impl ConstantSpec {
    pub fn is_real(&self) -> bool {
        !matches!(self, ConstantSpec::Polar { arg, .. } if *arg != 0)
    }

    fn validate(&self) -> Result<()> {
        match *self {
            ConstantSpec::Log(p) if !LOG_PRIMES.contains(&p) => {
                Err(Error::InvalidInput(format!("log({p}) is not a supported constant")))
            }
            ConstantSpec::Polar { modulus: 0, .. } => {
                Err(Error::InvalidInput("polar constant with zero modulus".into()))
            }
            _ => Ok(()),
        }
    }

    fn evaluate(&self, bits: u32) -> BigComplex {
        let real = |f: Float| BigComplex::real(BigReal::from_float(f));
        match *self {
            ConstantSpec::PiPow(k) => real(Float::with_val(bits, Constant::Pi).pow(k)),
            ConstantSpec::EPow(k) => real(Float::with_val(bits, k).exp()),
            ConstantSpec::EulerGammaPow(k) => real(Float::with_val(bits, Constant::Euler).pow(k)),
            ConstantSpec::Sin(k) => real(Float::with_val(bits, k).sin()),
            ConstantSpec::Log(p) => real(Float::with_val(bits, p).ln()),
            ConstantSpec::Polar { modulus, arg } => {
                let (s, c) = Float::with_val(bits, arg).sin_cos(Float::new(bits));
                let m = Float::with_val(bits, modulus);
                let re = Float::with_val(bits, &c * &m);
                let im = Float::with_val(bits, &s * &m);
                BigComplex::new(BigReal::from_float(re), BigReal::from_float(im))
            }
        }
    }
}

type Cache = Mutex<HashMap<(ConstantSpec, u32), BigComplex>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Evaluates `spec` to the full precision of `ctx`, memoized per (spec, precision).
pub fn eval_constant(spec: ConstantSpec, ctx: &PrecisionContext) -> Result<BigComplex> {
    spec.validate()?;
    let bits = ctx.bits();
    if let Some(v) = cache().lock().expect("constant cache poisoned").get(&(spec, bits)) {
        return Ok(v.clone());
    }
    // A few extra bits so the cached value is correctly rounded at `bits`.
    let v = spec.evaluate(bits + 32).with_prec(bits);
    cache().lock().expect("constant cache poisoned").insert((spec, bits), v.clone());
    Ok(v)
}

impl fmt::Display for ConstantSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ConstantSpec::PiPow(k) => write!(f, "pi^{k}"),
            ConstantSpec::EPow(k) => write!(f, "e^{k}"),
            ConstantSpec::EulerGammaPow(k) => write!(f, "gamma^{k}"),
            ConstantSpec::Sin(k) => write!(f, "sin({k})"),
            ConstantSpec::Log(p) => write!(f, "log({p})"),
            ConstantSpec::Polar { modulus, arg: 0 } => write!(f, "{modulus}"),
            ConstantSpec::Polar { modulus, arg } => write!(f, "{modulus}*exp({arg}i)"),
        }
    }
}

fn parse_call<'a>(s: &'a str, name: &str) -> Option<&'a str> {
    s.strip_prefix(name)?.strip_prefix('(')?.strip_suffix(')')
}

fn parse_num<T: FromStr>(s: &str, whole: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse(format!("bad constant {whole:?}")))
}

impl FromStr for ConstantSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let pow = |base: &str| -> Option<Result<u32>> {
            if t == base {
                return Some(Ok(1));
            }
            t.strip_prefix(base)?.strip_prefix('^').map(|e| parse_num(e, s))
        };
        let spec = if let Some(k) = pow("pi") {
            ConstantSpec::PiPow(k?)
        } else if let Some(k) = pow("gamma") {
            ConstantSpec::EulerGammaPow(k?)
        } else if let Some(k) = pow("e") {
            ConstantSpec::EPow(k?)
        } else if let Some(arg) = parse_call(&t, "sin") {
            ConstantSpec::Sin(parse_num(arg, s)?)
        } else if let Some(arg) = parse_call(&t, "log") {
            ConstantSpec::Log(parse_num(arg, s)?)
        } else if let Some((m, rest)) = t.split_once("*exp(") {
            let arg = rest.strip_suffix("i)").ok_or_else(|| Error::Parse(format!("bad polar constant {s:?}")))?;
            let arg = match arg {
                "" | "+" => 1,
                "-" => -1,
                a => parse_num(a, s)?,
            };
            ConstantSpec::Polar { modulus: parse_num(m, s)?, arg }
        } else if let Ok(m) = t.parse::<i64>() {
            ConstantSpec::Polar { modulus: m, arg: 0 }
        } else {
            return Err(Error::Parse(format!("unknown constant {s:?}")));
        };
        spec.validate()?;
        Ok(spec)
    }
}

impl Serialize for ConstantSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ConstantSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
