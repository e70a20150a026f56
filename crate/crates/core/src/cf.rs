//! Gauss's continued fraction, its specialisation at `a = 0`, and the
//! rescaled fraction, evaluated by the forward numerator/denominator
//! recurrence in either `f64` or exact rational arithmetic.
//!
//! A stream yields partial numerators and denominators `(num(n), den(n))`;
//! the `n`-th convergent is `num(0)/(den(0) + num(1)/(den(1) + … num(n)/den(n)))`.
//!
//! ```
//! use gausscf::cf::{convergent, CoefficientStream};
//! use gausscf::ParamTriple;
//!
//! let s = CoefficientStream::original(&ParamTriple::new(1.0, 1.0, 2.0), 0.5).unwrap();
//! assert!((convergent(&s, 2).unwrap() - 10.0 / 9.0).abs() < 1e-15);
//! ```

use std::fmt::Debug;

use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed};

use crate::asym::dilation;
use crate::error::{Error, Result};
use crate::hyp2f1::{frobenius_sequence, EvalContext, FrobeniusKind};
use crate::oracle::{
    bits_for_digits, gauss_ratio_highprec, rational_from_f64, star_limit_highprec, HighPrecisionReal, RationalTriple,
};
use crate::params::{check_gcf_admissible, gcf_violation, star_violation, ParamTriple};
use num_complex::Complex64;

/// Arithmetic the recurrence can run in.
pub trait CfScalar: Clone + Debug + Num + FromPrimitive {
    /// Magnitude used to keep floating-point states in range; `None` for exact types.
    fn magnitude(&self) -> Option<f64>;
}

impl CfScalar for f64 {
    fn magnitude(&self) -> Option<f64> {
        Some(self.abs())
    }
}

impl CfScalar for BigRational {
    fn magnitude(&self) -> Option<f64> {
        None
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CfVariant {
    /// Converges to `F(a+1, b; c+1; z) / F(a, b; c; z)`.
    Original,
    /// The `a → 0`, `c ↦ c − 1` specialisation; converges to `F(1, b; c; z)`.
    Star,
    /// Partial denominators `q(n)`; converges to `hgf(a+k; z) / hgf(a; z)`.
    Rescaled,
}

/// Coefficients of one of the three fractions. For [`CfVariant::Star`]
/// the field `a` is unused.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientStream<T> {
    pub variant: CfVariant,
    pub a: T,
    pub b: T,
    pub c: T,
    pub z: T,
}

fn num<T: CfScalar>(n: i64) -> T {
    T::from_i64(n).expect("small integer")
}

impl CoefficientStream<f64> {
    pub fn original(t: &ParamTriple, z: f64) -> Result<Self> {
        Self::checked(CfVariant::Original, t, z)
    }

    pub fn rescaled(t: &ParamTriple, z: f64) -> Result<Self> {
        Self::checked(CfVariant::Rescaled, t, z)
    }

    pub fn star(b: f64, c: f64, z: f64) -> Result<Self> {
        Self::checked(CfVariant::Star, &ParamTriple::new(0.0, b, c), z)
    }

    fn checked(variant: CfVariant, t: &ParamTriple, z: f64) -> Result<Self> {
        let (a, b, c) = t.real()?;
        check_variant(variant, t)?;
        Ok(CoefficientStream { variant, a, b, c, z })
    }
}

impl CoefficientStream<BigRational> {
    /// Exact stream; admissibility is checked on the `f64` images.
    pub fn exact(variant: CfVariant, t: &RationalTriple, z: BigRational) -> Result<Self> {
        check_variant(variant, &t.to_params())?;
        Ok(CoefficientStream {
            variant,
            a: t.a.clone(),
            b: t.b.clone(),
            c: t.c.clone(),
            z,
        })
    }
}

fn check_variant(variant: CfVariant, t: &ParamTriple) -> Result<()> {
    let why = match variant {
        CfVariant::Star => star_violation(t.b, t.c),
        _ => gcf_violation(t),
    };
    if let Some(why) = why {
        return Err(Error::Inadmissible(format!("{t}: {why}")));
    }
    if variant == CfVariant::Rescaled && (t.a.re == 0.0 || t.b.re == 0.0) {
        return Err(Error::Inadmissible(format!("{t}: rescaled fraction needs a, b ≠ 0")));
    }
    Ok(())
}

impl<T: CfScalar> CoefficientStream<T> {
    /// `(num(n), den(n))`: `(R(n), 1)` for the original and specialised
    /// fractions, `(r(n), q(n))` for the rescaled one.
    pub fn coefficient(&self, n: usize) -> Result<(T, T)> {
        let one = T::one();
        if n == 0 {
            return match self.variant {
                CfVariant::Rescaled => {
                    // q(0) = c / a
                    let q = self.ratio(self.c.clone(), self.a.clone(), 0)?;
                    Ok((one, q))
                }
                _ => Ok((one.clone(), one)),
            };
        }
        let m = num::<T>(((n - 1) / 2) as i64);
        let (a, b, c, z) = (self.a.clone(), self.b.clone(), self.c.clone(), self.z.clone());
        let two_m = m.clone() + m.clone();
        let odd = n % 2 == 1;
        match self.variant {
            CfVariant::Original => {
                let (top, bottom) = if odd {
                    (
                        (m.clone() + b) * (m + c.clone() - a) * z,
                        (two_m.clone() + c.clone()) * (two_m + c + one.clone()),
                    )
                } else {
                    (
                        (m.clone() + a + one.clone()) * (m + c.clone() - b + one.clone()) * z,
                        (two_m.clone() + c.clone() + one.clone()) * (two_m + c + num(2)),
                    )
                };
                Ok((T::zero() - self.ratio(top, bottom, n)?, one))
            }
            CfVariant::Star => {
                let (top, bottom) = if odd {
                    (
                        (m.clone() + b) * (m + c.clone() - one.clone()) * z,
                        (two_m.clone() + c.clone() - one.clone()) * (two_m + c),
                    )
                } else {
                    (
                        (m.clone() + one.clone()) * (m + c.clone() - b) * z,
                        (two_m.clone() + c.clone()) * (two_m + c + one.clone()),
                    )
                };
                Ok((T::zero() - self.ratio(top, bottom, n)?, one))
            }
            CfVariant::Rescaled => {
                // r(n) with n = 2m+1 or 2m+2, and q(n)
                let r = if odd {
                    self.ratio((m.clone() + c.clone() - a.clone()) * z, m.clone() + a.clone(), n)?
                } else {
                    self.ratio((m.clone() + c.clone() - b.clone() + one.clone()) * z, m.clone() + b.clone(), n)?
                };
                // q(n): n even = 2m' with m' = m + 1, n odd = 2m + 1
                let q = if odd {
                    self.ratio(two_m + c + one, m + b, n)?
                } else {
                    let m1 = m + one;
                    self.ratio(m1.clone() + m1.clone() + c, m1 + a, n)?
                };
                Ok((T::zero() - r, q))
            }
        }
    }

    fn ratio(&self, top: T, bottom: T, n: usize) -> Result<T> {
        if bottom.is_zero() {
            return Err(Error::Inadmissible(format!(
                "coefficient {n} of the {:?} fraction has a vanishing denominator",
                self.variant
            )));
        }
        Ok(top / bottom)
    }
}

/// Numerators and denominators of the two latest convergents.
#[derive(Debug, Clone, PartialEq)]
pub struct CfState<T> {
    pub a_prev: T,
    pub a_curr: T,
    pub b_prev: T,
    pub b_curr: T,
    /// Number of coefficients consumed.
    pub n: usize,
}

impl<T: CfScalar> Default for CfState<T> {
    fn default() -> Self {
        CfState {
            a_prev: T::one(),
            a_curr: T::zero(),
            b_prev: T::zero(),
            b_curr: T::one(),
            n: 0,
        }
    }
}

impl<T: CfScalar> CfState<T> {
    /// Consumes the next coefficient pair.
    pub fn step(&self, numerator: T, denominator: T) -> Self {
        let mut a_next = denominator.clone() * self.a_curr.clone() + numerator.clone() * self.a_prev.clone();
        let mut b_next = denominator * self.b_curr.clone() + numerator * self.b_prev.clone();
        let mut a_curr = self.a_curr.clone();
        let mut b_curr = self.b_curr.clone();
        if let Some(m) = b_next.magnitude() {
            if m > 1e100 || (m > 0.0 && m < 1e-100) {
                let s = T::from_f64(m).expect("finite");
                a_next = a_next / s.clone();
                b_next = b_next / s.clone();
                a_curr = a_curr / s.clone();
                b_curr = b_curr / s;
            }
        }
        CfState {
            a_prev: a_curr,
            a_curr: a_next,
            b_prev: b_curr,
            b_curr: b_next,
            n: self.n + 1,
        }
    }

    /// `A/B` of the latest convergent.
    pub fn value(&self) -> Result<T> {
        if self.b_curr.is_zero() {
            return Err(Error::ZeroDenominator {
                index: self.n.saturating_sub(1),
            });
        }
        Ok(self.a_curr.clone() / self.b_curr.clone())
    }
}

/// All convergents `0..=n`.
pub fn convergents<T: CfScalar>(stream: &CoefficientStream<T>, n: usize) -> Result<Vec<T>> {
    let mut state = CfState::default();
    let mut out = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let (p, q) = stream.coefficient(j)?;
        state = state.step(p, q);
        out.push(state.value()?);
    }
    Ok(out)
}

/// The `n`-th convergent by forward recurrence.
pub fn convergent<T: CfScalar>(stream: &CoefficientStream<T>, n: usize) -> Result<T> {
    let mut state = CfState::default();
    for j in 0..=n {
        let (p, q) = stream.coefficient(j)?;
        state = state.step(p, q);
        if state.b_curr.is_zero() {
            return Err(Error::ZeroDenominator { index: j });
        }
    }
    state.value()
}

/// Decimal digits needed to resolve an error of size `|w|^n` with 30 to spare.
pub fn digits_for(n: usize, z: f64, floor: u32) -> u32 {
    let w = dilation(z).abs();
    let need = if w > 0.0 { (n as f64 * (1.0 / w).log10()).ceil() as u32 } else { 0 };
    (need + 30).max(floor)
}

/// Actual truncation error of one of the fractions at index `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationError {
    pub n: usize,
    /// Limit minus `n`-th convergent.
    pub error: HighPrecisionReal,
    /// The same error for the rescaled fraction, `(a/c)` times `error`
    /// (equal to `error` for the specialised fraction).
    pub rescaled_error: HighPrecisionReal,
    /// The limit of the fraction.
    pub limit: HighPrecisionReal,
    pub digits: u32,
}

/// `E_n = F(a+1, b; c+1; z)/F(a, b; c; z) − convergent(n)`, with exact
/// rational convergents and a series limit carried to enough digits.
pub fn truncation_error_actual(t: &ParamTriple, z: f64, n: usize, ctx: &EvalContext) -> Result<TruncationError> {
    if !check_gcf_admissible(t) {
        return Err(Error::Inadmissible(format!("{t}: {}", gcf_violation(t).unwrap_or(""))));
    }
    let exact = RationalTriple::from_params(t)?;
    let zq = rational_from_f64(z);
    let digits = digits_for(n, z, ctx.working_precision);
    let bits = bits_for_digits(digits);
    if z == 0.0 {
        let zero = HighPrecisionReal::zero(bits);
        return Ok(TruncationError {
            n,
            error: zero.clone(),
            rescaled_error: zero,
            limit: HighPrecisionReal::from_i64(1, bits),
            digits,
        });
    }
    let (limit, f) = gauss_ratio_highprec(&exact, &zq, digits)?;
    let fv = f.to_f64();
    if fv.abs() < 1e-8 {
        return Err(Error::ZeroTarget { value: fv });
    }
    let stream = CoefficientStream::exact(CfVariant::Original, &exact, zq)?;
    let conv = HighPrecisionReal::from_rational(&convergent(&stream, n)?, bits);
    let error = limit.sub(&conv);
    let rescaled_error = error.mul_rational(&(&exact.a / &exact.c));
    Ok(TruncationError {
        n,
        error,
        rescaled_error,
        limit,
        digits,
    })
}

/// `E*_n = F(1, b; c; z) − convergent(n)` of the specialised fraction.
pub fn truncation_error_star(b: f64, c: f64, z: f64, n: usize, ctx: &EvalContext) -> Result<TruncationError> {
    if let Some(why) = star_violation(Complex64::new(b, 0.0), Complex64::new(c, 0.0)) {
        return Err(Error::Inadmissible(format!("(b; c) = ({b}; {c}): {why}")));
    }
    let (bq, cq, zq) = (rational_from_f64(b), rational_from_f64(c), rational_from_f64(z));
    let digits = digits_for(n, z, ctx.working_precision);
    let bits = bits_for_digits(digits);
    let limit = star_limit_highprec(&bq, &cq, &zq, digits)?;
    let t = RationalTriple::new(BigRational::from_integer(0.into()), bq, cq);
    let stream = CoefficientStream::exact(CfVariant::Star, &t, zq)?;
    let conv = HighPrecisionReal::from_rational(&convergent(&stream, n)?, bits);
    let error = limit.sub(&conv);
    Ok(TruncationError {
        n,
        error: error.clone(),
        rescaled_error: error,
        limit,
        digits,
    })
}

/// Relative residual of `y(n) = q(n) y(n+1) + r(n+1) y(n+2)` for a Frobenius
/// solution sampled along the lattice `t, t+k, t+p, …`.
pub fn recurrence_residual(kind: FrobeniusKind, t: &ParamTriple, z: f64, n: u64, ctx: &EvalContext) -> Result<f64> {
    let stream = CoefficientStream::rescaled(t, z)?;
    let (_, q) = stream.coefficient(n as usize)?;
    let (r, _) = stream.coefficient(n as usize + 1)?;
    let y = |j| frobenius_sequence(kind, t, z, j, ctx);
    let (y0, y1, y2) = (y(n)?, y(n + 1)?, y(n + 2)?);
    let (t1, t2) = (y1 * q, y2 * r);
    let scale = y0.ln_abs().max(t1.ln_abs()).max(t2.ln_abs());
    Ok(((y0 - t1 - t2).ln_abs() - scale).exp())
}

/// Sign of a rational, for tests on alternating errors.
pub fn rational_sign(x: &BigRational) -> i32 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn coefficient_examples() {
        let s = CoefficientStream::original(&ParamTriple::new(1.0, 1.0, 2.0), 0.5).unwrap();
        assert_eq!(s.coefficient(0).unwrap(), (1.0, 1.0));
        assert_relative_eq!(s.coefficient(1).unwrap().0, -1.0 / 12.0, max_relative = 1e-15);
        assert_relative_eq!(s.coefficient(2).unwrap().0, -1.0 / 6.0, max_relative = 1e-15);

        let r = CoefficientStream::rescaled(&ParamTriple::new(1.0, 1.0, 2.0), 0.5).unwrap();
        assert_eq!(r.coefficient(0).unwrap(), (1.0, 2.0));
        assert_eq!(r.coefficient(1).unwrap(), (-0.5, 3.0));
        assert_eq!(r.coefficient(2).unwrap().0, -1.0);

        for stream in [
            CoefficientStream::original(&ParamTriple::new(0.3, 0.7, 1.1), 0.0).unwrap(),
            CoefficientStream::star(0.7, 1.1, 0.0).unwrap(),
            CoefficientStream::rescaled(&ParamTriple::new(0.3, 0.7, 1.1), 0.0).unwrap(),
        ] {
            for n in 1..6 {
                assert_eq!(stream.coefficient(n).unwrap().0, 0.0);
            }
        }
    }

    #[test]
    fn inadmissible_streams() {
        assert!(matches!(
            CoefficientStream::original(&ParamTriple::new(1.0, 1.0, 1.0), 0.5),
            Err(Error::Inadmissible(_))
        ));
        assert!(matches!(CoefficientStream::star(1.0, 1.0, 0.5), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn small_convergents() {
        let t = RationalTriple::new(q(1, 1), q(1, 1), q(2, 1));
        let s = CoefficientStream::exact(CfVariant::Original, &t, q(1, 2)).unwrap();
        assert_eq!(convergent(&s, 0).unwrap(), q(1, 1));
        assert_eq!(convergent(&s, 2).unwrap(), q(10, 9));
        let f = CoefficientStream::original(&ParamTriple::new(1.0, 1.0, 2.0), 0.5).unwrap();
        // F(2, 1; 3; 1/2)/F(1, 1; 2; 1/2) = 4(ln 2 − 1/2)/ln 2 = 1.1146108...
        let limit = 4.0 * (2f64.ln() - 0.5) / 2f64.ln();
        assert_relative_eq!(convergent(&f, 60).unwrap(), limit, max_relative = 1e-14);
    }

    #[test]
    fn exact_matches_float_and_rescaled_is_equivalent() {
        let t = RationalTriple::new(q(1, 2), q(3, 2), q(9, 4));
        let zq = q(1, 4);
        let exact = CoefficientStream::exact(CfVariant::Original, &t, zq.clone()).unwrap();
        let resc = CoefficientStream::exact(CfVariant::Rescaled, &t, zq).unwrap();
        let float = CoefficientStream::original(&t.to_params(), 0.25).unwrap();
        let e = convergents(&exact, 60).unwrap();
        let r = convergents(&resc, 60).unwrap();
        let f = convergents(&float, 60).unwrap();
        let a_over_c = q(2, 9);
        for n in 0..=60 {
            assert_eq!(&r[n], &(&e[n] * &a_over_c), "n = {n}");
            let ef = crate::oracle::ratio_to_f64(&e[n]);
            assert_relative_eq!(ef, f[n], max_relative = 1e-13);
        }
    }

    #[test]
    fn zero_denominator_is_reported() {
        // 1/(1 + R(1)) with R(1) = −1: b(c − a)z/(c(c+1)) = 1
        let t = RationalTriple::new(q(1, 1), q(1, 1), q(2, 1));
        let s = CoefficientStream::exact(CfVariant::Original, &t, q(6, 1)).unwrap();
        assert_eq!(convergent(&s, 1), Err(Error::ZeroDenominator { index: 1 }));
        assert_eq!(crate::oracle::cf_exact(&s, 1), Err(Error::ZeroDenominator { index: 0 }));
    }

    #[test]
    fn truncation_error_vanishes_at_origin() {
        let ctx = EvalContext::default();
        let e = truncation_error_actual(&ParamTriple::new(0.5, 1.5, 2.25), 0.0, 7, &ctx).unwrap();
        assert!(e.error.is_zero());
    }

    #[test]
    fn truncation_error_sign_and_decay() {
        let ctx = EvalContext::default();
        let t = ParamTriple::new(1.0, 1.0, 2.0);
        let e20 = truncation_error_actual(&t, 0.5, 20, &ctx).unwrap().error;
        let e21 = truncation_error_actual(&t, 0.5, 21, &ctx).unwrap().error;
        assert_eq!(e20.signum(), 1);
        let rate = (e21.ln_abs() - e20.ln_abs()).exp();
        let w = 3.0 - 2.0 * 2f64.sqrt();
        assert!((rate / w - 1.0).abs() < 0.05, "{rate} vs {w}");
    }

    #[test]
    fn star_error_against_log() {
        let ctx = EvalContext::default();
        let e = truncation_error_star(1.0, 2.0, 0.5, 12, &ctx).unwrap();
        let conv = convergent(&CoefficientStream::star(1.0, 2.0, 0.5).unwrap(), 12).unwrap();
        assert_relative_eq!(e.error.to_f64(), 2.0 * 2f64.ln() - conv, max_relative = 1e-4);
    }
}
