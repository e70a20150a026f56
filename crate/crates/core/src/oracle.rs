//! Reference computations that do not share code paths with the `f64`
//! engines: binary floating point on big integers, hypergeometric series
//! with a certified tail, exact backward evaluation of finite continued
//! fractions, and a logarithm used as a closed-form cross-check.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cf::CoefficientStream;
use crate::error::{Error, Result};
use crate::params::ParamTriple;
use crate::scaled::Scaled;

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Bits carried beyond the requested decimal precision.
const GUARD_BITS: u64 = 64;

/// Smallest-denominator rational within `1e-15` (relative) of `x`.
///
/// Decimal inputs such as `0.3` or `2.25` map to `3/10` and `9/4`.
pub fn rational_from_f64(x: f64) -> BigRational {
    if x == x.trunc() && x.abs() < 9e15 {
        return BigRational::from_integer(BigInt::from(x as i64));
    }
    let tol = 1e-15 * x.abs().max(1.0);
    // continued-fraction convergents of |x|
    let (sign, mut r) = if x < 0.0 { (-1i64, -x) } else { (1, x) };
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    for _ in 0..64 {
        let a = r.floor();
        let ai = BigInt::from(a as i64);
        let p2 = &ai * &p1 + &p0;
        let q2 = &ai * &q1 + &q0;
        p0 = std::mem::replace(&mut p1, p2);
        q0 = std::mem::replace(&mut q1, q2);
        let approx = p1.to_f64().unwrap() / q1.to_f64().unwrap();
        if (approx - x.abs()).abs() <= tol || r - a == 0.0 {
            break;
        }
        r = 1.0 / (r - a);
    }
    BigRational::new(p1 * sign, q1)
}

/// A parameter triple with exact rational components.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTriple {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
}

impl RationalTriple {
    pub fn new(a: BigRational, b: BigRational, c: BigRational) -> Self {
        RationalTriple { a, b, c }
    }

    /// Rationalises a real triple with [`rational_from_f64`].
    pub fn from_params(t: &ParamTriple) -> Result<Self> {
        let (a, b, c) = t.real()?;
        Ok(RationalTriple::new(rational_from_f64(a), rational_from_f64(b), rational_from_f64(c)))
    }

    pub fn to_params(&self) -> ParamTriple {
        ParamTriple::new(ratio_to_f64(&self.a), ratio_to_f64(&self.b), ratio_to_f64(&self.c))
    }
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    HighPrecisionReal::from_rational(r, 64).to_f64()
}

pub fn bits_for_digits(digits: u32) -> u64 {
    (digits as f64 * LOG2_10).ceil() as u64 + GUARD_BITS
}

/// A binary floating-point number `mantissa · 2^exponent` whose mantissa
/// is kept to `bits` significant bits (truncated toward zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HighPrecisionReal {
    mantissa: BigInt,
    exponent: i64,
    bits: u64,
}

impl HighPrecisionReal {
    pub fn zero(bits: u64) -> Self {
        HighPrecisionReal {
            mantissa: BigInt::zero(),
            exponent: 0,
            bits,
        }
    }

    pub fn from_bigint(m: BigInt, bits: u64) -> Self {
        HighPrecisionReal {
            mantissa: m,
            exponent: 0,
            bits,
        }
        .normalized()
    }

    pub fn from_i64(x: i64, bits: u64) -> Self {
        Self::from_bigint(BigInt::from(x), bits)
    }

    pub fn from_rational(r: &BigRational, bits: u64) -> Self {
        if r.is_zero() {
            return Self::zero(bits);
        }
        let num = r.numer();
        let den = r.denom();
        let shift = bits as i64 + den.bits() as i64 - num.bits() as i64 + 2;
        let scaled = if shift >= 0 { num << shift as usize } else { num >> (-shift) as usize };
        HighPrecisionReal {
            mantissa: scaled / den,
            exponent: -shift,
            bits,
        }
        .normalized()
    }

    /// Exact conversion of an `f64`.
    pub fn from_f64(x: f64, bits: u64) -> Self {
        match BigRational::from_float(x) {
            Some(r) => Self::from_rational(&r, bits),
            None => Self::zero(bits),
        }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Decimal digits carried, excluding guard bits.
    pub fn digits(&self) -> u32 {
        ((self.bits.saturating_sub(GUARD_BITS)) as f64 / LOG2_10).floor() as u32
    }

    pub fn with_bits(&self, bits: u64) -> Self {
        HighPrecisionReal {
            mantissa: self.mantissa.clone(),
            exponent: self.exponent,
            bits,
        }
        .normalized()
    }

    fn normalized(mut self) -> Self {
        let len = self.mantissa.bits();
        if len > self.bits {
            let drop = len - self.bits;
            // shift the magnitude so that rounding is toward zero for both signs
            let magnitude = self.mantissa.magnitude() >> drop as usize;
            self.mantissa = BigInt::from_biguint(self.mantissa.sign(), magnitude);
            self.exponent += drop as i64;
        }
        if self.mantissa.is_zero() {
            self.exponent = 0;
        }
        self
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    /// `-1`, `0` or `1`.
    pub fn signum(&self) -> i32 {
        match self.mantissa.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    pub fn abs(&self) -> Self {
        HighPrecisionReal {
            mantissa: self.mantissa.abs(),
            exponent: self.exponent,
            bits: self.bits,
        }
    }

    pub fn neg(&self) -> Self {
        HighPrecisionReal {
            mantissa: -&self.mantissa,
            exponent: self.exponent,
            bits: self.bits,
        }
    }

    /// Binary exponent of the leading bit: `|x| ∈ [2^e, 2^{e+1})`.
    fn top_exponent(&self) -> i64 {
        self.exponent + self.mantissa.bits() as i64 - 1
    }

    pub fn add(&self, other: &Self) -> Self {
        let bits = self.bits.max(other.bits);
        if self.is_zero() {
            return other.with_bits(bits);
        }
        if other.is_zero() {
            return self.with_bits(bits);
        }
        // an addend below the last retained bit of the other is dropped
        if self.top_exponent() - other.top_exponent() > bits as i64 + 2 {
            return self.with_bits(bits);
        }
        if other.top_exponent() - self.top_exponent() > bits as i64 + 2 {
            return other.with_bits(bits);
        }
        let e = self.exponent.min(other.exponent);
        let m = (&self.mantissa << (self.exponent - e) as usize) + (&other.mantissa << (other.exponent - e) as usize);
        HighPrecisionReal {
            mantissa: m,
            exponent: e,
            bits,
        }
        .normalized()
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        HighPrecisionReal {
            mantissa: &self.mantissa * &other.mantissa,
            exponent: self.exponent + other.exponent,
            bits: self.bits.max(other.bits),
        }
        .normalized()
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        if other.is_zero() {
            return Err(Error::DomainError("division by an exact zero".into()));
        }
        let bits = self.bits.max(other.bits);
        let shift = bits + other.mantissa.bits() + 2;
        let shift = shift.saturating_sub(self.mantissa.bits());
        let m = (&self.mantissa << shift as usize) / &other.mantissa;
        Ok(HighPrecisionReal {
            mantissa: m,
            exponent: self.exponent - other.exponent - shift as i64,
            bits,
        }
        .normalized())
    }

    pub fn mul_rational(&self, r: &BigRational) -> Self {
        let num = HighPrecisionReal {
            mantissa: &self.mantissa * r.numer(),
            exponent: self.exponent,
            bits: self.bits,
        };
        // r has a positive denominator; exact division is not required
        let den = r.denom();
        let shift = self.bits + den.bits() + 2;
        HighPrecisionReal {
            mantissa: (&num.mantissa << shift as usize) / den,
            exponent: num.exponent - shift as i64,
            bits: self.bits,
        }
        .normalized()
    }

    /// `(m, e)` with `|x| = m · 2^e`, `m ∈ [0.5, 1)`, carrying the sign of `x` in `m`.
    fn frexp(&self) -> (f64, i64) {
        if self.is_zero() {
            return (0.0, 0);
        }
        let len = self.mantissa.bits() as i64;
        let keep = 60.min(len);
        let top = &self.mantissa >> (len - keep) as usize;
        let m = top.to_f64().unwrap() / 2f64.powi(keep as i32);
        (m, self.exponent + len)
    }

    /// Natural logarithm of `|x|` to `f64` accuracy; `-∞` at zero.
    pub fn ln_abs(&self) -> f64 {
        let (m, e) = self.frexp();
        if m == 0.0 {
            return f64::NEG_INFINITY;
        }
        m.abs().ln() + e as f64 * std::f64::consts::LN_2
    }

    /// Nearest `f64` (saturating to `±∞` / `0` outside the range).
    pub fn to_f64(&self) -> f64 {
        let (m, e) = self.frexp();
        if e > 1100 {
            return m.signum() * f64::INFINITY;
        }
        if e < -1100 {
            return 0.0;
        }
        m * 2f64.powi(e as i32)
    }

    pub fn to_scaled(&self) -> Scaled {
        if self.is_zero() {
            return Scaled::ZERO;
        }
        Scaled::from_ln(self.ln_abs(), self.signum() as f64)
    }

    /// `|self - other| <= 2^-bits' · |other|` style comparison: number of
    /// agreeing leading bits (saturates at the working precision).
    pub fn agreeing_bits(&self, other: &Self) -> u64 {
        let d = self.sub(other);
        if d.is_zero() {
            return self.bits.max(other.bits);
        }
        let scale = self.top_exponent().max(other.top_exponent());
        (scale - d.top_exponent()).max(0) as u64
    }

    /// Scientific notation with `digits` significant decimal digits.
    pub fn to_scientific(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let digits = digits.max(1);
        // floor(log10 |x|) estimate, corrected below
        let mut e10 = (self.ln_abs() / std::f64::consts::LN_10).floor() as i64;
        let ten = BigInt::from(10);
        let scaled_int = |e10: i64| -> BigInt {
            // round(|x| · 10^(digits-1-e10))
            let p = digits as i64 - 1 - e10;
            let mut num = self.mantissa.abs();
            let mut den = BigInt::one();
            if p >= 0 {
                num *= ten.pow(p as u32);
            } else {
                den *= ten.pow((-p) as u32);
            }
            if self.exponent >= 0 {
                num <<= self.exponent as usize;
            } else {
                den <<= (-self.exponent) as usize;
            }
            let (q, r) = num.div_rem(&den);
            if (r << 1usize) >= den {
                q + 1
            } else {
                q
            }
        };
        let mut q = scaled_int(e10);
        let limit = ten.pow(digits as u32);
        if q >= limit {
            e10 += 1;
            q = scaled_int(e10);
        } else if q < ten.pow(digits as u32 - 1) {
            e10 -= 1;
            q = scaled_int(e10);
        }
        let s = q.to_string();
        let sign = if self.signum() < 0 { "-" } else { "" };
        if s.len() > 1 {
            format!("{sign}{}.{}e{e10}", &s[..1], &s[1..])
        } else {
            format!("{sign}{s}e{e10}")
        }
    }
}

impl PartialOrd for HighPrecisionReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(match self.sub(other).signum() {
            -1 => Ordering::Less,
            0 => Ordering::Equal,
            _ => Ordering::Greater,
        })
    }
}

impl fmt::Display for HighPrecisionReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_scientific(self.digits().max(1) as usize))
    }
}

fn check_open_unit(z: &BigRational) -> Result<()> {
    if z.abs() >= BigRational::one() {
        return Err(Error::DomainError(format!("series needs |z| < 1, got {z}")));
    }
    Ok(())
}

/// Direct summation of `F(a, b; c; z)` for rational `|z| < 1`.
///
/// Summation stops once the term ratio has stayed below one for five
/// terms and `|term| q/(1 − q) < 10^-digits |sum|`, where `q` is the larger
/// of the current ratio and `|z|`, inflated by ten per cent.
pub fn series_highprec(t: &RationalTriple, z: &BigRational, digits: u32) -> Result<HighPrecisionReal> {
    check_open_unit(z)?;
    if t.c <= BigRational::zero() && t.c.is_integer() {
        return Err(Error::PoleAtParameter(format!("c = {} is a non-positive integer", t.c)));
    }
    let bits = bits_for_digits(digits);
    let mut term = HighPrecisionReal::from_i64(1, bits);
    let mut sum = term.clone();
    if z.is_zero() {
        return Ok(sum);
    }
    let zf = ratio_to_f64(z).abs();
    let ln_tol = -(digits as f64) * std::f64::consts::LN_10;
    let budget = 50_000 + (digits as f64 * 2.4 / (1.0 - zf)).ceil() as usize * 4;
    let mut quiet = 0;
    for k in 0..budget {
        let kk = BigRational::from_integer(BigInt::from(k));
        let ratio = (&t.a + &kk) * (&t.b + &kk) * z / ((&kk + BigRational::one()) * (&t.c + &kk));
        if ratio.is_zero() {
            return Ok(sum);
        }
        term = term.mul_rational(&ratio);
        sum = sum.add(&term);
        let q = ratio_to_f64(&ratio).abs();
        quiet = if q < 1.0 { quiet + 1 } else { 0 };
        if quiet >= 5 {
            let qb = 1.1 * q.max(zf);
            if qb < 1.0 {
                let ln_tail = term.ln_abs() + (qb / (1.0 - qb)).ln();
                if ln_tail < ln_tol + sum.ln_abs() {
                    return Ok(sum);
                }
            }
        }
    }
    Err(Error::NonConvergence { terms: budget })
}

/// `F(a+1, b; c+1; z)` over `F(a, b; c; z)` together with `F(a, b; c; z)`,
/// for rational `z < 1`. Negative `z` goes through the Pfaff map so every
/// series argument lies in `[0, 1)`.
pub fn gauss_ratio_highprec(t: &RationalTriple, z: &BigRational, digits: u32) -> Result<(HighPrecisionReal, HighPrecisionReal)> {
    let one = BigRational::one();
    if z >= &one {
        return Err(Error::DomainError(format!("argument {z} lies on the cut [1, ∞)")));
    }
    let bits = bits_for_digits(digits);
    let up = RationalTriple::new(&t.a + &one, t.b.clone(), &t.c + &one);
    if z >= &BigRational::zero() {
        let f0 = series_highprec(t, z, digits)?;
        let f1 = series_highprec(&up, z, digits)?;
        return Ok((f1.div(&f0)?, f0));
    }
    let zeta = z / (z - &one);
    let p0 = RationalTriple::new(t.a.clone(), &t.c - &t.b, t.c.clone());
    let p1 = RationalTriple::new(&t.a + &one, &t.c - &t.b + &one, &t.c + &one);
    let g0 = series_highprec(&p0, &zeta, digits)?;
    let g1 = series_highprec(&p1, &zeta, digits)?;
    let one_minus_z = HighPrecisionReal::from_rational(&(&one - z), bits);
    let ratio = g1.div(&g0.mul(&one_minus_z))?;
    // F(a, b; c; z) = (1 − z)^{−a} g0; the power is only needed to f64 accuracy
    let pre = (-(ratio_to_f64(&t.a)) * (1.0 - ratio_to_f64(z)).ln()).exp();
    let f0 = g0.mul(&HighPrecisionReal::from_f64(pre, bits));
    Ok((ratio, f0))
}

/// `F(1, b; c; z)` for rational `z < 1`, the limit of the specialised fraction.
pub fn star_limit_highprec(b: &BigRational, c: &BigRational, z: &BigRational, digits: u32) -> Result<HighPrecisionReal> {
    let one = BigRational::one();
    if z >= &one {
        return Err(Error::DomainError(format!("argument {z} lies on the cut [1, ∞)")));
    }
    if z >= &BigRational::zero() {
        return series_highprec(&RationalTriple::new(one, b.clone(), c.clone()), z, digits);
    }
    let zeta = z / (z - &one);
    let g = series_highprec(&RationalTriple::new(one.clone(), c - b, c.clone()), &zeta, digits)?;
    g.div(&HighPrecisionReal::from_rational(&(&one - z), bits_for_digits(digits)))
}

/// `−ln(1 − z)/z` from `ln x = 2 atanh((x − 1)/(x + 1))`, for rational `z < 1`.
pub fn log_closed_form(z: &BigRational, digits: u32) -> Result<HighPrecisionReal> {
    let one = BigRational::one();
    if z >= &one {
        return Err(Error::DomainError(format!("argument {z} lies on the cut [1, ∞)")));
    }
    let bits = bits_for_digits(digits);
    if z.is_zero() {
        return Ok(HighPrecisionReal::from_i64(1, bits));
    }
    let x = &one - z;
    let mut shifts = 0i64;
    let mut x = x;
    // bring x into [1/2, 2] via powers of two so the atanh series converges fast
    let two = BigRational::from_integer(BigInt::from(2));
    while x > two {
        x /= &two;
        shifts += 1;
    }
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    while x < half {
        x *= &two;
        shifts -= 1;
    }
    let y = (&x - &one) / (&x + &one);
    let y2 = &y * &y;
    let mut power = HighPrecisionReal::from_rational(&y, bits);
    let mut sum = power.clone();
    let ln_tol = -(digits as f64 + 5.0) * std::f64::consts::LN_10;
    for k in 1..100_000i64 {
        power = power.mul_rational(&y2);
        let term = power.mul_rational(&BigRational::new(BigInt::one(), BigInt::from(2 * k + 1)));
        sum = sum.add(&term);
        if term.is_zero() || term.ln_abs() < ln_tol + sum.ln_abs().min(0.0) {
            break;
        }
    }
    let ln_x = sum.mul_rational(&two);
    let ln2 = ln2_highprec(bits);
    let ln_one_minus_z = ln_x.add(&ln2.mul(&HighPrecisionReal::from_i64(shifts, bits)));
    ln_one_minus_z.neg().div(&HighPrecisionReal::from_rational(z, bits))
}

/// `ln 2 = 2 atanh(1/3)`.
fn ln2_highprec(bits: u64) -> HighPrecisionReal {
    let ninth = BigRational::new(BigInt::one(), BigInt::from(9));
    let mut power = HighPrecisionReal::from_rational(&BigRational::new(BigInt::one(), BigInt::from(3)), bits);
    let mut sum = power.clone();
    for k in 1..(bits as i64) {
        power = power.mul_rational(&ninth);
        if power.is_zero() || power.top_exponent() < -(bits as i64) - 8 {
            break;
        }
        sum = sum.add(&power.mul_rational(&BigRational::new(BigInt::one(), BigInt::from(2 * k + 1))));
    }
    sum.mul_rational(&BigRational::from_integer(BigInt::from(2)))
}

/// The `n`-th convergent evaluated backward from its innermost level in
/// exact rational arithmetic.
pub fn cf_exact(stream: &CoefficientStream<BigRational>, n: usize) -> Result<BigRational> {
    let mut tail = BigRational::zero();
    for j in (1..=n).rev() {
        let (num, den) = stream.coefficient(j)?;
        let d = den + &tail;
        if d.is_zero() {
            return Err(Error::ZeroDenominator { index: j });
        }
        tail = num / d;
    }
    let (num, den) = stream.coefficient(0)?;
    let d = den + tail;
    if d.is_zero() {
        return Err(Error::ZeroDenominator { index: 0 });
    }
    Ok(num / d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn rationalisation() {
        assert_eq!(rational_from_f64(0.3), q(3, 10));
        assert_eq!(rational_from_f64(2.25), q(9, 4));
        assert_eq!(rational_from_f64(-0.5), q(-1, 2));
        assert_eq!(rational_from_f64(1.0 / 3.0), q(1, 3));
        assert_eq!(rational_from_f64(7.0), q(7, 1));
    }

    #[test]
    fn arithmetic_round_trip() {
        let bits = bits_for_digits(40);
        let third = HighPrecisionReal::from_rational(&q(1, 3), bits);
        let back = third.mul(&HighPrecisionReal::from_i64(3, bits));
        let one = HighPrecisionReal::from_i64(1, bits);
        assert!(back.agreeing_bits(&one) >= bits - 4);
        let x = HighPrecisionReal::from_rational(&q(-22, 7), bits);
        let y = x.div(&third).unwrap();
        assert!((y.to_f64() + 66.0 / 7.0).abs() < 1e-14);
        assert_eq!(x.sub(&x).signum(), 0);
        assert!((x.ln_abs() - (22.0f64 / 7.0).ln()).abs() < 1e-15);
    }

    #[test]
    fn scientific_formatting() {
        let bits = bits_for_digits(30);
        let x = HighPrecisionReal::from_rational(&q(2, 3), bits);
        assert_eq!(x.to_scientific(5), "6.6667e-1");
        let y = HighPrecisionReal::from_rational(&q(-12345, 1), bits);
        assert_eq!(y.to_scientific(3), "-1.23e4");
        assert_eq!(HighPrecisionReal::from_i64(1, bits).to_scientific(1), "1e0");
    }

    #[test]
    fn log_series_matches_ln2() {
        let v = series_highprec(&RationalTriple::new(q(1, 1), q(1, 1), q(2, 1)), &q(1, 2), 50).unwrap();
        // 2 ln 2 = 1.3862943611198906188344642429163531361510002687205...
        assert_eq!(v.to_scientific(45), "1.38629436111989061883446424291635313615100027e0");
        let l = log_closed_form(&q(1, 2), 50).unwrap();
        assert!(l.agreeing_bits(&v) > 160);
    }

    #[test]
    fn log_closed_form_negative_and_large() {
        for &(n, d) in &[(-2i64, 1i64), (-7, 2), (3, 4), (-1, 1000)] {
            let z = n as f64 / d as f64;
            let v = log_closed_form(&q(n, d), 30).unwrap().to_f64();
            let expect = -(-z).ln_1p() / z;
            assert!((v - expect).abs() < 1e-15 * expect.abs(), "{z}: {v} vs {expect}");
        }
    }

    #[test]
    fn pfaff_ratio_agrees_with_direct_series() {
        let t = RationalTriple::new(q(1, 2), q(3, 2), q(9, 4));
        let z = q(-1, 2);
        let (r, f) = gauss_ratio_highprec(&t, &z, 40).unwrap();
        let up = RationalTriple::new(q(3, 2), q(3, 2), q(13, 4));
        let f0 = series_highprec(&t, &z, 40).unwrap();
        let f1 = series_highprec(&up, &z, 40).unwrap();
        let direct = f1.div(&f0).unwrap();
        assert!(r.agreeing_bits(&direct) > 120);
        assert!((f.to_f64() - f0.to_f64()).abs() < 1e-15);
    }

    #[test]
    fn frozen_reference_value() {
        // F(1/2, 3/2; 9/4; 1/4), 60 digits, from an independent multiprecision library
        let t = RationalTriple::new(q(1, 2), q(3, 2), q(9, 4));
        let v = series_highprec(&t, &q(1, 4), 60).unwrap();
        assert_eq!(v.to_scientific(30), FROZEN_F_HALF_3HALF_9QUARTER_QUARTER);
    }

    const FROZEN_F_HALF_3HALF_9QUARTER_QUARTER: &str = "1.09789785621275800638677336870e0";
}
