//! Decimal text form of reals and complex numbers.
//!
//! Reals print as `[-]int[.frac]` when the decimal exponent is moderate and as
//! `[-]d[.ddd]e<exp>` otherwise. Complex values print as `re+im*I` (or `re-im*I`);
//! a zero imaginary part is omitted.

use rug::Float;

use super::{BigComplex, BigReal};
use crate::error::{Error, Result};

const PLAIN_MAX_EXP: i32 = 30;
const PLAIN_MIN_EXP: i32 = -6;

pub(crate) fn digits_for_bits(bits: u32) -> usize {
    (f64::from(bits) * std::f64::consts::LOG10_2).floor() as usize
}

pub(crate) fn format_real(f: &Float, digits: usize) -> String {
    let digits = digits.max(1);
    let (neg, mut mant, exp) = f.to_sign_string_exp(10, Some(digits));
    let Some(exp) = exp else {
        return "0".to_string();
    };
    while mant.len() > 1 && mant.ends_with('0') {
        mant.pop();
    }
    let mut out = String::with_capacity(mant.len() + 8);
    if neg {
        out.push('-');
    }
    let n = mant.len() as i32;
    if exp > 0 && exp <= PLAIN_MAX_EXP {
        if n <= exp {
            out.push_str(&mant);
            out.extend(std::iter::repeat_n('0', (exp - n) as usize));
        } else {
            out.push_str(&mant[..exp as usize]);
            out.push('.');
            out.push_str(&mant[exp as usize..]);
        }
    } else if exp <= 0 && exp > PLAIN_MIN_EXP {
        out.push_str("0.");
        out.extend(std::iter::repeat_n('0', (-exp) as usize));
        out.push_str(&mant);
    } else {
        out.push_str(&mant[..1]);
        if n > 1 {
            out.push('.');
            out.push_str(&mant[1..]);
        }
        out.push('e');
        out.push_str(&(exp - 1).to_string());
    }
    out
}

pub(crate) fn format_complex(re: &Float, im: &Float, digits: usize) -> String {
    let r = format_real(re, digits);
    if im.is_zero() {
        return r;
    }
    let i = format_real(im, digits);
    if i.starts_with('-') {
        format!("{r}{i}*I")
    } else {
        format!("{r}+{i}*I")
    }
}

pub(crate) fn parse_real(s: &str, bits: u32) -> Result<BigReal> {
    let t = s.trim();
    let parsed = Float::parse(t).map_err(|e| Error::Parse(format!("{t:?}: {e}")))?;
    let f = Float::with_val(bits, parsed);
    if !f.is_finite() {
        return Err(Error::Parse(format!("{t:?} is not a finite number")));
    }
    Ok(BigReal::from_float(f))
}

/// Index of the `+`/`-` that separates real and imaginary parts, if any.
fn split_point(s: &str) -> Option<usize> {
    let bytes = s.as_bytes();
    (1..bytes.len()).rev().find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'))
}

pub(crate) fn parse_complex(s: &str, bits: u32) -> Result<BigComplex> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = t.strip_suffix('I').or_else(|| t.strip_suffix('i')) else {
        return Ok(BigComplex::real(parse_real(&t, bits)?));
    };
    let body = body.strip_suffix('*').unwrap_or(body);
    let (re, im) = match split_point(body) {
        Some(p) => (&body[..p], &body[p..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    Ok(BigComplex::new(parse_real(re, bits)?, parse_real(im, bits)?))
}
