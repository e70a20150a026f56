//! Leading asymptotics of the truncation error of Gauss's continued
//! fraction and of the recurrence solutions that control it.
//!
//! With `w = z (1 + √(1−z))^{-2}` the error decays like `wⁿ`; the
//! constant in front is assembled from the Casoratian of a recessive and a
//! dominant solution of the three-term recurrence.
//!
//! ```
//! use gausscf::asym::dilation;
//! assert!((dilation(0.75) - 1.0 / 3.0).abs() < 1e-15);
//! assert!((dilation(-3.0) + 1.0 / 3.0).abs() < 1e-15);
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hyp2f1::{frobenius_scaled, hyp2f1_real, hyp2f1_regularized, EvalContext, FrobeniusKind, SINE_GUARD};
use crate::params::{gcf_violation, star_violation, ParamTriple, ShiftVector};
use crate::scaled::Scaled;
use crate::special::{ln_gamma, sin_pi};

/// `w = z / (1 + √(1−z))²`, the geometric rate of the truncation error.
pub fn dilation(z: f64) -> f64 {
    if !(z < 1.0) {
        return f64::NAN;
    }
    let s = 1.0 + (1.0 - z).sqrt();
    z / (s * s)
}

fn sine(x: f64, what: &str) -> Result<f64> {
    let s = sin_pi(x);
    if s.abs() < SINE_GUARD {
        return Err(Error::PoleAtParameter(format!("sin π({what}) vanishes")));
    }
    Ok(s)
}

fn gamma_s(x: f64) -> Scaled {
    let (l, s) = ln_gamma(x);
    Scaled::from_ln(l, s)
}

fn rgamma_s(x: f64) -> Scaled {
    let (l, s) = ln_gamma(x);
    if l == f64::INFINITY {
        Scaled::ZERO
    } else {
        Scaled::from_ln(-l, s)
    }
}

/// `x^p` for real `x`, with `(−1)^n` pulled out for integer `p = n` and negative `x`.
fn signed_pow(x: f64, n: i64) -> Scaled {
    let s = Scaled::powf(x.abs(), n as f64);
    if x < 0.0 && n % 2 != 0 {
        -s
    } else {
        s
    }
}

/// Common factor `(2√(1−z))^{c−a−b−1/2} / n^{c−a−b+1/2}`.
fn algebraic_part(a: f64, b: f64, c: f64, z: f64, n: f64) -> Scaled {
    let e = c - a - b;
    Scaled::powf(2.0 * (1.0 - z).sqrt(), e - 0.5) * Scaled::powf(n, -(e + 0.5))
}

fn check_z(z: f64) -> Result<()> {
    if !(z < 1.0) {
        return Err(Error::DomainError(format!("z = {z} is not below 1")));
    }
    Ok(())
}

/// Leading behaviour of the recessive solution `y₁⁽⁰⁾(n)`:
/// `2√π (2√(1−z))^{c−a−b−1/2} / (n^{c−a−b+1/2} (1+√(1−z))^{n+c−1})`.
pub fn recessive_asym(t: &ParamTriple, z: f64, n: u64) -> Result<Scaled> {
    let (a, b, c) = t.real()?;
    check_z(z)?;
    let s = 1.0 + (1.0 - z).sqrt();
    let nf = n as f64;
    Ok(algebraic_part(a, b, c, z, nf) * Scaled::powf(s, -(nf + c - 1.0)) * (2.0 * PI.sqrt()))
}

/// Leading behaviour of the dominant solution `y₁⁽¹⁾(n)` for `0 < z < 1`.
pub fn dominant_asym_z_pos(t: &ParamTriple, z: f64, n: u64) -> Result<Scaled> {
    let (a, b, c) = t.real()?;
    if !(z > 0.0 && z < 1.0) {
        return Err(Error::DomainError(format!("z = {z} is not in (0, 1)")));
    }
    let pre = PI.sqrt() * sin_pi(c) / (sine(c - a, "c - a")? * sine(c - b, "c - b")?);
    let base = (1.0 + (1.0 - z).sqrt()) / z;
    let nf = n as f64;
    Ok(algebraic_part(a, b, c, z, nf) * Scaled::powf(base, nf + c - 1.0) * pre)
}

/// Leading behaviour of the dominant solution `y₁⁽∞⁾(n)` for `z < 0`,
/// including its `(−1)ⁿ` alternation.
pub fn dominant_asym_z_neg(t: &ParamTriple, z: f64, n: u64) -> Result<Scaled> {
    let (a, b, c) = t.real()?;
    if !(z < 0.0) {
        return Err(Error::DomainError(format!("z = {z} is not negative")));
    }
    let pre = PI.sqrt() / (sine(c - a, "c - a")? * sine(c - b, "c - b")?);
    let base = (1.0 + (1.0 - z).sqrt()) / (-z);
    let nf = n as f64;
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(algebraic_part(a, b, c, z, nf) * Scaled::powf(base, nf + c - 1.0) * (pre * sign))
}

/// True when `|(1+√(1−z))/(−z)| = 1`, i.e. `z = −3`: the dominant
/// prediction then changes only algebraically in `n`.
pub fn dominant_base_is_unit(z: f64) -> bool {
    z < 0.0 && (((1.0 + (1.0 - z).sqrt()) / (-z)) - 1.0).abs() < 1e-12
}

/// `sin πc / (2 sin π(c−a) sin π(c−b)) · m^{a+b−2c+1} (m/e)^{−2m}`,
/// the large-`m` form of `χ(t + m p)`.
pub fn chi_asym(t: &ParamTriple, m: u64) -> Result<Scaled> {
    let (a, b, c) = t.real()?;
    let pre = sin_pi(c) / (2.0 * sine(c - a, "c - a")? * sine(c - b, "c - b")?);
    let mf = m as f64;
    Ok(Scaled::from_ln((a + b - 2.0 * c + 1.0) * mf.ln() - 2.0 * mf * (mf.ln() - 1.0), 1.0) * pre)
}

/// Which Casoratian of two solutions at parameters `t` and `t + k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Casoratian {
    /// `y₁⁽⁰⁾(t) y₂⁽⁰⁾(t+k) − y₁⁽⁰⁾(t+k) y₂⁽⁰⁾(t)`.
    Omega0,
    /// `y₁⁽⁰⁾(t) y₁⁽¹⁾(t+k) − y₁⁽⁰⁾(t+k) y₁⁽¹⁾(t)`, for `0 < z < 1`.
    Omega1,
    /// `y₁⁽⁰⁾(t) y₁⁽∞⁾(t+k) − y₁⁽⁰⁾(t+k) y₁⁽∞⁾(t)`, for `z < 0`.
    OmegaInf,
    /// The Wronskian `y₁⁽⁰⁾(t) y₂⁽⁰⁾(t+1) − y₁⁽⁰⁾(t+1) y₂⁽⁰⁾(t)`, `1 = (1, 1; 1)`.
    Wronskian,
}

/// Closed forms of the Casoratians.
///
/// `Omega0`, `Omega1` and `Wronskian` are evaluated for `0 < z < 1`,
/// `OmegaInf` for `z < 0`.
pub fn casoratian_closed(t: &ParamTriple, z: f64, which: Casoratian) -> Result<Scaled> {
    let (a, b, c) = t.real()?;
    let ss = sine(c - a, "c - a")? * sine(c - b, "c - b")?;
    let gab = gamma_s(a) * gamma_s(b);
    match which {
        Casoratian::Omega0 | Casoratian::Omega1 | Casoratian::Wronskian => {
            if !(z > 0.0 && z < 1.0) {
                return Err(Error::DomainError(format!("{which:?} is evaluated for 0 < z < 1")));
            }
            let trig = PI * sin_pi(c) / ss;
            let v = if which == Casoratian::Wronskian {
                gab * rgamma_s(c - a) * rgamma_s(c - b) * Scaled::powf(z, -c) * Scaled::powf(1.0 - z, c - a - b - 1.0)
            } else {
                gab * rgamma_s(c - a) * rgamma_s(c - b + 1.0) * Scaled::powf(z, -c) * Scaled::powf(1.0 - z, c - a - b)
            };
            let v = v * trig;
            Ok(if which == Casoratian::Omega0 { -v } else { v })
        }
        Casoratian::OmegaInf => {
            if !(z < 0.0) {
                return Err(Error::DomainError("OmegaInf is evaluated for z < 0".into()));
            }
            Ok(gab
                * rgamma_s(c - a)
                * rgamma_s(c - b + 1.0)
                * Scaled::powf(-z, -c)
                * Scaled::powf(1.0 - z, c - a - b)
                * (-PI / ss))
        }
    }
}

/// The same Casoratians computed from values of the Frobenius solutions.
pub fn casoratian_numeric(t: &ParamTriple, z: f64, which: Casoratian, ctx: &EvalContext) -> Result<Scaled> {
    let (other, shift) = match which {
        Casoratian::Omega0 => (FrobeniusKind::Y2_0, ShiftVector::K),
        Casoratian::Omega1 => (FrobeniusKind::Y1_1, ShiftVector::K),
        Casoratian::OmegaInf => (FrobeniusKind::Y1_INF, ShiftVector::K),
        Casoratian::Wronskian => (FrobeniusKind::Y2_0, ShiftVector::ONE),
    };
    let up = t.shift(shift, 1);
    let f = |kind, s: &ParamTriple| frobenius_scaled(kind, s, z, ctx);
    Ok(f(FrobeniusKind::Y1_0, t)? * f(other, &up)? - f(FrobeniusKind::Y1_0, &up)? * f(other, t)?)
}

fn gauss_value(a: f64, b: f64, c: f64, z: f64, ctx: &EvalContext) -> Result<f64> {
    let f = hyp2f1_real(a, b, c, z, ctx)?.re();
    if f.abs() < 1e-8 {
        return Err(Error::ZeroTarget { value: f });
    }
    Ok(f)
}

/// The leading term `K wⁿ` of the truncation error `E_n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorAsymptote {
    /// `K`, everything except `wⁿ`.
    pub constant: Scaled,
    pub w: f64,
}

impl ErrorAsymptote {
    /// `E_n ~ 2π/F² · Γ(c)Γ(c+1)/(Γ(a+1)Γ(b)Γ(c−a)Γ(c−b+1)) · z(1−z)^{c−a−b}/(1+√(1−z))^{2(c+1)} · wⁿ`.
    pub fn new(t: &ParamTriple, z: f64, ctx: &EvalContext) -> Result<Self> {
        let (a, b, c) = t.real()?;
        check_z(z)?;
        if let Some(why) = gcf_violation(t) {
            return Err(Error::PoleAtParameter(format!("{t}: {why}")));
        }
        if z == 0.0 {
            return Ok(ErrorAsymptote {
                constant: Scaled::ZERO,
                w: 0.0,
            });
        }
        let f = gauss_value(a, b, c, z, ctx)?;
        let s = 1.0 + (1.0 - z).sqrt();
        let gam = gamma_s(c) * gamma_s(c + 1.0) * rgamma_s(a + 1.0) * rgamma_s(b) * rgamma_s(c - a) * rgamma_s(c - b + 1.0);
        let constant = gam * Scaled::powf(1.0 - z, c - a - b) * Scaled::powf(s, -2.0 * (c + 1.0)) * (2.0 * PI * z / (f * f));
        Ok(ErrorAsymptote {
            constant,
            w: dilation(z),
        })
    }

    /// `E*_n ~ 2πΓ(c)/(Γ(b)Γ(c−b)) · z(1−z)^{c−b−1}/(1+√(1−z))^{2c} · wⁿ`.
    pub fn star(b: f64, c: f64, z: f64) -> Result<Self> {
        check_z(z)?;
        if let Some(why) = star_violation(Complex64::new(b, 0.0), Complex64::new(c, 0.0)) {
            return Err(Error::PoleAtParameter(format!("(b; c) = ({b}; {c}): {why}")));
        }
        if z == 0.0 {
            return Ok(ErrorAsymptote {
                constant: Scaled::ZERO,
                w: 0.0,
            });
        }
        let s = 1.0 + (1.0 - z).sqrt();
        let constant = gamma_s(c)
            * rgamma_s(b)
            * rgamma_s(c - b)
            * Scaled::powf(1.0 - z, c - b - 1.0)
            * Scaled::powf(s, -2.0 * c)
            * (2.0 * PI * z);
        Ok(ErrorAsymptote {
            constant,
            w: dilation(z),
        })
    }

    /// The prediction at index `n`.
    pub fn at(&self, n: u64) -> Scaled {
        if self.constant.is_zero() {
            return Scaled::ZERO;
        }
        self.constant * signed_pow(self.w, n as i64)
    }
}

/// Predicted `E_n` for the original fraction.
pub fn error_asymptote(t: &ParamTriple, z: f64, n: u64, ctx: &EvalContext) -> Result<Scaled> {
    Ok(ErrorAsymptote::new(t, z, ctx)?.at(n))
}

/// Predicted `E*_n` for the specialised fraction.
pub fn error_asymptote_star(b: f64, c: f64, z: f64, n: u64) -> Result<Scaled> {
    Ok(ErrorAsymptote::star(b, c, z)?.at(n))
}

/// Pieces of the error estimate `ε_n ≈ ω(0) h(n) / f(0)²` with
/// `f = y₁⁽⁰⁾` and a dominant solution `g` chosen by the sign of `z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorComponents {
    /// Leading form of `h(n) = f(n+2)/g(n+2)`.
    pub h: Scaled,
    /// Casoratian `ω(0)` in closed form.
    pub omega0: Scaled,
    pub f0: Scaled,
    pub g0: Scaled,
    /// `(c/a) ω(0) h(n) / f(0)²`, which predicts `E_n`.
    pub leading: Scaled,
    /// `g(0) h(n) / f(0)`, the relative size of the next correction.
    pub correction: Scaled,
}

pub fn error_estimate_components(t: &ParamTriple, z: f64, n: u64, ctx: &EvalContext) -> Result<ErrorComponents> {
    let (a, b, c) = t.real()?;
    check_z(z)?;
    if z == 0.0 {
        return Err(Error::DomainError("the error vanishes identically at z = 0".into()));
    }
    let w = dilation(z);
    let ss = sine(c - a, "c - a")? * sine(c - b, "c - b")?;
    let nf = n as f64;
    let (h, omega0, g0) = if z > 0.0 {
        let sc = sine(c, "c")?;
        let h = Scaled::powf(w, nf + c + 1.0) * (2.0 * ss / sc);
        (
            h,
            casoratian_closed(t, z, Casoratian::Omega1)?,
            frobenius_scaled(FrobeniusKind::Y1_1, t, z, ctx)?,
        )
    } else {
        let h = Scaled::powf(-w, c + 1.0) * signed_pow(w, n as i64) * (2.0 * ss);
        (
            h,
            casoratian_closed(t, z, Casoratian::OmegaInf)?,
            frobenius_scaled(FrobeniusKind::Y1_INF, t, z, ctx)?,
        )
    };
    let f0 = frobenius_scaled(FrobeniusKind::Y1_0, t, z, ctx)?;
    let leading = omega0 * h / (f0 * f0) * (c / a);
    let correction = g0 * h / f0;
    Ok(ErrorComponents {
        h,
        omega0,
        f0,
        g0,
        leading,
        correction,
    })
}

/// Closed form of `g(0) h(n) / f(0)` in terms of Gauss functions.
pub fn correction_closed(t: &ParamTriple, z: f64, n: u64, ctx: &EvalContext) -> Result<Scaled> {
    let (a, b, c) = t.real()?;
    let f = gauss_value(a, b, c, z, ctx)?;
    let w = dilation(z);
    let nf = n as f64;
    if z > 0.0 && z < 1.0 {
        let g = hyp2f1_regularized(a, b, a + b - c + 1.0, 1.0 - z, ctx)?;
        Ok(g
            * gamma_s(c)
            * rgamma_s(c - a)
            * rgamma_s(c - b)
            * Scaled::powf(w, nf + c + 1.0)
            * (2.0 * PI / f))
    } else if z < 0.0 {
        let g = hyp2f1_regularized(a, c - b, a - b + 1.0, 1.0 / (1.0 - z), ctx)?;
        Ok(g
            * gamma_s(c)
            * rgamma_s(b)
            * rgamma_s(c - a)
            * Scaled::powf(-w, c + 1.0)
            * signed_pow(w, n as i64)
            * Scaled::powf(1.0 - z, -a)
            * (2.0 * PI / f))
    } else {
        Err(Error::DomainError(format!("z = {z} outside (−∞, 0) ∪ (0, 1)")))
    }
}

/// An explicit upper bound for `|E*_n|` valid for `2 ≤ b`, `b+1 ≤ c ≤ 2b`, `−1 ≤ z < 0`.
pub fn borwein_bound_scaled(b: f64, c: f64, z: f64, n: u64) -> Result<Scaled> {
    if !(2.0 <= b && b + 1.0 <= c && c <= 2.0 * b && -1.0 <= z && z < 0.0) {
        return Err(Error::OutOfRegime(format!(
            "(b, c, z) = ({b}, {c}, {z}) outside 2 ≤ b, b+1 ≤ c ≤ 2b, −1 ≤ z < 0"
        )));
    }
    let m = (n / 2) as f64;
    let lead = gamma_s(m + 1.0)
        * gamma_s(m + c - b)
        * gamma_s(b)
        * gamma_s(c)
        * rgamma_s(m + b)
        * rgamma_s(m + c)
        * rgamma_s(c - b)
        * ((m + b) / b);
    let brace = 2.0 * b / ((c - 2.0) * (1.0 - 2.0 / z) + (2.0 * b - c));
    Ok(lead * Scaled::powf(brace, n as f64))
}

pub fn borwein_bound(b: f64, c: f64, z: f64, n: u64) -> Result<f64> {
    Ok(borwein_bound_scaled(b, c, z, n)?.re())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ctx() -> EvalContext {
        EvalContext::default()
    }

    #[test]
    fn dilation_examples() {
        assert_eq!(dilation(0.0), 0.0);
        for z in [-100.0, -3.0, -0.5, 0.25, 0.999] {
            assert!(dilation(z).abs() < 1.0);
        }
    }

    #[test]
    fn laplace_data_of_recessive_integral() {
        // x0 = 1/(1+√(1−z)), Φ(x0) = x0², φ''(x0) = 2(1+√(1−z))²/√(1−z) at z = 3/4
        let z: f64 = 0.75;
        let s = 1.0 + (1.0 - z).sqrt();
        let x0 = 1.0 / s;
        assert_relative_eq!(x0, 2.0 / 3.0, max_relative = 1e-15);
        let phi = |x: f64| x * (1.0 - x) / (1.0 - z * x);
        assert_relative_eq!(phi(x0), 4.0 / 9.0, max_relative = 1e-15);
        let h = 1e-4;
        let lp = |x: f64| -phi(x).ln();
        let second = (lp(x0 + h) - 2.0 * lp(x0) + lp(x0 - h)) / (h * h);
        assert_relative_eq!(second, 9.0, max_relative = 1e-6);
        assert_relative_eq!(2.0 * s * s / (1.0 - z).sqrt(), 9.0, max_relative = 1e-15);
    }

    #[test]
    fn zero_and_signs() {
        let t = ParamTriple::new(0.5, 1.5, 2.25);
        assert!(error_asymptote(&t, 0.0, 5, &ctx()).unwrap().is_zero());
        assert!(error_asymptote_star(1.0, 2.0, 0.0, 5).unwrap().is_zero());
        let e = ErrorAsymptote::new(&t, -2.0, &ctx()).unwrap();
        assert!(e.at(10).re() * e.at(11).re() < 0.0);
        let d = |n| dominant_asym_z_neg(&t, -2.0, n).unwrap().re();
        assert!(d(6) * d(7) < 0.0);
        assert!(dominant_base_is_unit(-3.0));
    }

    #[test]
    fn star_is_the_limit_of_the_general_prefactor() {
        // a → 0 and c ↦ c − 1 in K/a... the general constant carries 1/Γ(a+1) → 1
        // and F(a, b; c−1; z) → 1, leaving the specialised constant.
        let (b, c, z) = (1.5, 2.25, 0.3);
        let star = ErrorAsymptote::star(b, c, z).unwrap().constant.re();
        let at = |a: f64| {
            ErrorAsymptote::new(&ParamTriple::new(a, b, c - 1.0), z, &ctx())
                .unwrap()
                .constant
                .re()
        };
        let (k1, k2) = (at(1e-3), at(1e-4));
        // linear extrapolation in a
        let limit = k2 - (k1 - k2) / 9.0;
        assert_relative_eq!(limit, star, max_relative = 1e-6);
    }

    #[test]
    fn borwein_regime() {
        assert!(matches!(borwein_bound(1.0, 2.0, -0.5, 4), Err(Error::OutOfRegime(_))));
        assert!(borwein_bound(2.0, 3.0, -1.0, 10).unwrap() > 0.0);
    }
}
