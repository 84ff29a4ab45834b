//! Integer-coefficient truncated series kernels.
//!
//! All counting series in this crate have integer coefficients, and every
//! inner function of a composition is a rational function whose denominator
//! has constant term 1. These routines exploit both facts: multiplication by
//! a short polynomial and division by one cost O(N·deg) instead of O(N²).

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

const PAR_THRESHOLD: usize = 96;

/// Schoolbook product truncated to `len` coefficients.
pub fn mul_trunc(a: &[BigInt], b: &[BigInt], len: usize) -> Vec<BigInt> {
    let cell = |n: usize| -> BigInt {
        let mut acc = BigInt::zero();
        let lo = n.saturating_sub(b.len().saturating_sub(1));
        let hi = n.min(a.len().saturating_sub(1));
        if a.is_empty() || b.is_empty() || lo > hi {
            return acc;
        }
        for i in lo..=hi {
            if !a[i].is_zero() && !b[n - i].is_zero() {
                acc += &a[i] * &b[n - i];
            }
        }
        acc
    };
    if len > PAR_THRESHOLD {
        (0..len).into_par_iter().map(cell).collect()
    } else {
        (0..len).map(cell).collect()
    }
}

/// Product with a sparse polynomial given as (exponent, coefficient) pairs.
pub fn mul_sparse(a: &[BigInt], p: &[(usize, BigInt)], len: usize) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); len];
    for (e, c) in p {
        if c.is_zero() {
            continue;
        }
        for (i, x) in a.iter().enumerate() {
            let n = i + e;
            if n >= len {
                break;
            }
            if !x.is_zero() {
                out[n] += x * c;
            }
        }
    }
    out
}

/// `a / d` truncated to `len`, where `d` is a polynomial with d(0) = ±1.
pub fn div_poly(a: &[BigInt], d: &[BigInt], len: usize) -> Result<Vec<BigInt>> {
    let d0 = d.first().ok_or(Error::ZeroConstantTerm)?;
    if !(d0.is_one() || (-d0).is_one()) {
        return Err(Error::InvalidParameter("divisor must have constant term ±1".into()));
    }
    let neg = d0.is_negative();
    let tail: Vec<(usize, &BigInt)> = d
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, c)| !c.is_zero())
        .collect();
    let mut out: Vec<BigInt> = Vec::with_capacity(len);
    for n in 0..len {
        let mut v = a.get(n).cloned().unwrap_or_default();
        for &(j, c) in &tail {
            if j > n {
                break;
            }
            v -= c * &out[n - j];
        }
        out.push(if neg { -v } else { v });
    }
    Ok(out)
}

fn sparse(p: &[BigInt]) -> Vec<(usize, BigInt)> {
    p.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, c.clone()))
        .collect()
}

/// Valuation of a polynomial (index of the first nonzero coefficient).
pub fn valuation(p: &[BigInt]) -> Option<usize> {
    p.iter().position(|c| !c.is_zero())
}

/// outer(num/den) truncated to `len`, by Horner's rule.
///
/// `num` must vanish at 0 and `den(0) = ±1`. Each Horner step only keeps as
/// many coefficients as can still reach the output after the remaining
/// multiplications by the inner function.
pub fn compose_rational(
    outer: &[BigInt],
    num: &[BigInt],
    den: &[BigInt],
    len: usize,
) -> Result<Vec<BigInt>> {
    if len == 0 {
        return Ok(Vec::new());
    }
    let Some(v) = valuation(num) else {
        let mut out = vec![BigInt::zero(); len];
        out[0] = outer.first().cloned().unwrap_or_default();
        return Ok(out);
    };
    if v == 0 {
        return Err(Error::NonzeroInnerConstant);
    }
    let top = (len - 1) / v;
    if outer.len() < top + 1 {
        return Err(Error::InsufficientOrder { have: outer.len().saturating_sub(1), need: top });
    }
    let num_sp = sparse(num);
    let mut acc: Vec<BigInt> = Vec::new();
    for h in (0..=top).rev() {
        let keep = len - v * h;
        let mut next = if acc.is_empty() {
            vec![BigInt::zero(); keep]
        } else {
            let shifted = mul_sparse(&acc, &num_sp, keep);
            div_poly(&shifted, den, keep)?
        };
        next[0] += &outer[h];
        acc = next;
    }
    Ok(acc)
}

/// Evaluates a polynomial with integer coefficients at `x`.
pub fn eval_poly_f64(p: &[BigInt], x: f64) -> f64 {
    use num_traits::ToPrimitive;
    p.iter()
        .rev()
        .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
}

pub fn from_i64s(v: &[i64]) -> Vec<BigInt> {
    v.iter().map(|&x| BigInt::from(x)).collect()
}

/// Product of two polynomials, no truncation.
pub fn poly_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    mul_trunc(a, b, a.len() + b.len() - 1)
}
