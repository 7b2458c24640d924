use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, Zero};

use crate::Rat;

/// Parses a nonnegative rational from a decimal string ("0.25", "3") or a
/// fraction string ("1/3"). This is the exact ingestion path for the kernel
/// interchange format.
pub fn parse_rational(s: &str) -> Result<Rat, String> {
    let s = s.trim();
    if s.is_empty() {
        return Err("empty rational literal".into());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_decimal(num.trim())?;
        let d = parse_decimal(den.trim())?;
        if d.is_zero() {
            return Err(format!("zero denominator in {s:?}"));
        }
        return Ok(n / d);
    }
    parse_decimal(s)
}

fn parse_decimal(s: &str) -> Result<Rat, String> {
    let (int_part, frac_part) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(format!("malformed decimal {s:?}"));
    }
    let digits_ok = |t: &str| t.chars().all(|c| c.is_ascii_digit());
    if !digits_ok(int_part) || !digits_ok(frac_part) {
        return Err(format!("malformed decimal {s:?}"));
    }
    let int_val = if int_part.is_empty() {
        BigUint::zero()
    } else {
        int_part.parse::<BigUint>().map_err(|e| e.to_string())?
    };
    let frac_val = if frac_part.is_empty() {
        BigUint::zero()
    } else {
        frac_part.parse::<BigUint>().map_err(|e| e.to_string())?
    };
    let scale = BigUint::from(10u32).pow(frac_part.len() as u32);
    let numer = int_val * &scale + frac_val;
    Ok(Rat::new(BigInt::from(numer), BigInt::from(scale.max(BigUint::one()))))
}
