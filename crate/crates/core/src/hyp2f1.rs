//! Gauss's hypergeometric function, its rescaled Frobenius solutions and
//! the identities tying them together.
//!
//! All parameters must be real. Arguments on the cut `[1, ∞)` are rejected.
//! Values are returned either as [`Complex64`] or, for the `_scaled`
//! variants, as [`Scaled`] so that far-shifted parameters do not overflow.
//!
//! ```
//! use gausscf::hyp2f1::{hyp2f1, EvalContext};
//! use gausscf::ParamTriple;
//!
//! let ctx = EvalContext::default();
//! let f = hyp2f1(&ParamTriple::new(1.0, 1.0, 2.0), 0.5, &ctx).unwrap();
//! assert!((f.re - 2.0 * std::f64::consts::LN_2).abs() < 1e-14);
//! ```

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::{ParamTriple, ShiftVector, INTEGER_TOLERANCE};
use crate::scaled::Scaled;
use crate::special::{ln_gamma, sin_pi};

/// Largest `|x|` handled by the plain power series.
pub const SERIES_RADIUS: f64 = 0.75;

/// Sine factors below this magnitude are treated as exact zeros.
pub const SINE_GUARD: f64 = 1e-9;

/// Below this `|sin π(c−a−b)|` the direct series is preferred up to [`SLOW_SERIES_RADIUS`].
const NEAR_INTEGER_SINE: f64 = 1e-3;

const SLOW_SERIES_RADIUS: f64 = 0.98;

/// Precision and termination controls shared by the numerical engines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalContext {
    /// Decimal digits used by the arbitrary-precision oracles.
    pub working_precision: u32,
    /// Relative size of the certified series tail at which summation stops.
    pub tail_tolerance: f64,
    pub max_terms: usize,
}

impl Default for EvalContext {
    fn default() -> Self {
        EvalContext {
            working_precision: 30,
            tail_tolerance: 1e-17,
            max_terms: 200_000,
        }
    }
}

impl EvalContext {
    pub fn new(working_precision: u32, tail_tolerance: f64, max_terms: usize) -> Result<Self> {
        if working_precision < 16 {
            return Err(Error::DomainError(format!(
                "working precision {working_precision} is below 16 digits"
            )));
        }
        if !(tail_tolerance > 0.0) {
            return Err(Error::DomainError("tail tolerance must be positive".into()));
        }
        if max_terms < 64 {
            return Err(Error::DomainError(format!("max_terms {max_terms} is below 64")));
        }
        Ok(EvalContext {
            working_precision,
            tail_tolerance,
            max_terms,
        })
    }
}

fn guarded_sin(x: f64, what: &str) -> Result<f64> {
    let s = sin_pi(x);
    if s.abs() < SINE_GUARD {
        return Err(Error::PoleAtParameter(format!("sin π({what}) vanishes ({what} = {x})")));
    }
    Ok(s)
}

fn near_nonpositive_integer(x: f64) -> bool {
    let r = x.round();
    r <= 0.0 && (x - r).abs() <= INTEGER_TOLERANCE
}

/// `1 / Γ(x)` as a scaled value (zero at the poles of `Γ`).
fn rgamma_scaled(x: f64) -> Scaled {
    let (lg, s) = ln_gamma(x);
    if lg == f64::INFINITY {
        Scaled::ZERO
    } else {
        Scaled::from_ln(-lg, s)
    }
}

fn gamma_scaled(x: f64) -> Scaled {
    let (lg, s) = ln_gamma(x);
    Scaled::from_ln(lg, s)
}

/// Regularized series `Σ (a)_k (b)_k x^k / (k! Γ(c + k))` for `|x| <= 0.75`.
fn series_regularized(a: f64, b: f64, c: f64, x: f64, ctx: &EvalContext) -> Result<Scaled> {
    series_within(a, b, c, x, SERIES_RADIUS, ctx)
}

fn series_within(a: f64, b: f64, c: f64, x: f64, radius: f64, ctx: &EvalContext) -> Result<Scaled> {
    if x.abs() > radius + 1e-15 {
        return Err(Error::DomainError(format!("power series used outside |x| <= {radius} (x = {x})")));
    }
    // At an exact pole c = -N the first N + 1 terms vanish.
    let k0 = if sin_pi(c) == 0.0 && c <= 0.0 { (1.0 - c) as usize } else { 0 };
    let mut lead = rgamma_scaled(c + k0 as f64);
    for j in 0..k0 {
        let j = j as f64;
        lead = lead * ((a + j) * (b + j) * x / (j + 1.0));
    }
    if lead.is_zero() || x == 0.0 && k0 == 0 {
        return Ok(lead);
    }

    const RESCALE: f64 = 1e200;
    let tol = ctx.tail_tolerance.max(1e-18);
    let mut ln_shift = 0.0_f64;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut quiet = 0usize;
    let mut k = k0;
    loop {
        let kf = k as f64;
        let q = (a + kf) * (b + kf) * x / ((kf + 1.0) * (c + kf));
        term *= q;
        sum += term;
        k += 1;
        if term == 0.0 {
            break;
        }
        if sum.abs() > RESCALE || term.abs() > RESCALE {
            term /= RESCALE;
            sum /= RESCALE;
            ln_shift += RESCALE.ln();
        }
        let qa = q.abs();
        if qa < 1.0 {
            quiet += 1;
        } else {
            quiet = 0;
        }
        if quiet >= 5 {
            let qb = (1.1 * qa.max(x.abs())).min(0.999_999);
            let next = (a + k as f64) * (b + k as f64) / ((k as f64 + 1.0) * (c + k as f64));
            let tail = (term * next * x).abs() / (1.0 - qb);
            if tail <= tol * sum.abs() {
                break;
            }
        }
        if k - k0 > ctx.max_terms {
            return Err(Error::NonConvergence { terms: ctx.max_terms });
        }
    }
    Ok(lead * Scaled::new(Complex64::new(sum, 0.0), ln_shift))
}

/// Regularized `F(a, b; c; x) / Γ(c)` for any `x < 1`.
fn regularized(a: f64, b: f64, c: f64, x: f64, ctx: &EvalContext) -> Result<Scaled> {
    if !(x < 1.0) {
        return Err(Error::DomainError(format!("argument {x} lies on the cut [1, ∞)")));
    }
    if x < 0.0 {
        let zeta = x / (x - 1.0);
        let pre = Scaled::powf(1.0 - x, -a);
        return Ok(pre * regularized(a, c - b, c, zeta, ctx)?);
    }
    if x <= SERIES_RADIUS {
        return series_regularized(a, b, c, x, ctx);
    }
    // the 1 − x connection formula cancels badly near integer c − a − b;
    // the plain series still converges there, only more slowly
    if sin_pi(c - a - b).abs() < NEAR_INTEGER_SINE && x <= SLOW_SERIES_RADIUS {
        return series_within(a, b, c, x, SLOW_SERIES_RADIUS, ctx);
    }
    let s = guarded_sin(c - a - b, "c - a - b")?;
    let y = 1.0 - x;
    let first = series_regularized(a, b, a + b - c + 1.0, y, ctx)? * rgamma_scaled(c - a) * rgamma_scaled(c - b);
    let second = Scaled::powf(y, c - a - b)
        * series_regularized(c - a, c - b, c - a - b + 1.0, y, ctx)?
        * rgamma_scaled(a)
        * rgamma_scaled(b);
    Ok((first - second) * (PI / s))
}

fn check_c(c: f64) -> Result<()> {
    if near_nonpositive_integer(c) {
        return Err(Error::PoleAtParameter(format!("c = {c} is a non-positive integer")));
    }
    Ok(())
}

/// `F(a, b; c; x)` as a scaled value.
pub fn hyp2f1_real(a: f64, b: f64, c: f64, x: f64, ctx: &EvalContext) -> Result<Scaled> {
    check_c(c)?;
    Ok(gamma_scaled(c) * regularized(a, b, c, x, ctx)?)
}

/// `F(a, b; c; x) / Γ(c)`, finite for every `c`.
pub fn hyp2f1_regularized(a: f64, b: f64, c: f64, x: f64, ctx: &EvalContext) -> Result<Scaled> {
    regularized(a, b, c, x, ctx)
}

/// `F(a, b; c; z)` for real parameters and `z < 1`.
pub fn hyp2f1(t: &ParamTriple, z: f64, ctx: &EvalContext) -> Result<Complex64> {
    let (a, b, c) = t.real()?;
    Ok(hyp2f1_real(a, b, c, z, ctx)?.to_complex())
}

/// The plain power series for `F(a, b; c; z)`, restricted to `|z| <= 0.75`.
pub fn series_direct(t: &ParamTriple, z: f64, ctx: &EvalContext) -> Result<f64> {
    let (a, b, c) = t.real()?;
    check_c(c)?;
    Ok((gamma_scaled(c) * series_regularized(a, b, c, z, ctx)?).re())
}

/// `Σ Γ(a+k)Γ(b+k)/(Γ(1+k)Γ(c+k)) x^k`, defined also when `c` is a pole.
pub fn hgf_real(a: f64, b: f64, c: f64, x: f64, ctx: &EvalContext) -> Result<Scaled> {
    if near_nonpositive_integer(a) || near_nonpositive_integer(b) {
        return Err(Error::PoleAtParameter(format!(
            "Γ(a)Γ(b) is infinite at a = {a}, b = {b}"
        )));
    }
    Ok(gamma_scaled(a) * gamma_scaled(b) * regularized(a, b, c, x, ctx)?)
}

/// The rescaled series `Γ(a)Γ(b)/Γ(c) · F(a, b; c; z)`.
pub fn hgf_rescaled(t: &ParamTriple, z: f64, ctx: &EvalContext) -> Result<Complex64> {
    let (a, b, c) = t.real()?;
    Ok(hgf_real(a, b, c, z, ctx)?.to_complex())
}

fn chi_real(a: f64, b: f64, c: f64) -> Result<Scaled> {
    let s1 = guarded_sin(c - a, "c - a")?;
    let s2 = guarded_sin(c - b, "c - b")?;
    Ok(rgamma_scaled(c - a) * rgamma_scaled(c - b) * (PI * sin_pi(c) / (s1 * s2)))
}

/// The normalising factor `π sin πc / (sin π(c−a) sin π(c−b) Γ(c−a) Γ(c−b))`
/// of the solutions at `z = 1`.
pub fn chi_scaled(t: &ParamTriple) -> Result<Scaled> {
    let (a, b, c) = t.real()?;
    chi_real(a, b, c)
}

pub fn chi(t: &ParamTriple) -> Result<Complex64> {
    Ok(chi_scaled(t)?.to_complex())
}

/// The six rescaled Frobenius solutions of the hypergeometric equation.
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrobeniusKind {
    /// `hgf(a, b; c; z)`.
    Y1_0,
    /// `z^{1−c} hgf(a−c+1, b−c+1; 2−c; z)`; complex for `z < 0`.
    Y2_0,
    /// `χ hgf(a, b; a+b−c+1; 1−z)`, for `0 < z < 1`.
    Y1_1,
    /// `χ (1−z)^{c−a−b} hgf(c−a, c−b; c−a−b+1; 1−z)`, for `0 < z < 1`.
    Y2_1,
    /// `(−z)^{−a} hgf(a, a−c+1; a−b+1; 1/z) / sin π(c−b)`, for `z < 0`.
    Y1_INF,
    /// `(−z)^{−b} hgf(b−c+1, b; b−a+1; 1/z) / sin π(c−a)`, for `z < 0`.
    Y2_INF,
}

impl FrobeniusKind {
    pub const ALL: [FrobeniusKind; 6] = [
        FrobeniusKind::Y1_0,
        FrobeniusKind::Y2_0,
        FrobeniusKind::Y1_1,
        FrobeniusKind::Y2_1,
        FrobeniusKind::Y1_INF,
        FrobeniusKind::Y2_INF,
    ];

    /// Whether `z` lies in the region where this solution is evaluated.
    pub fn accepts(self, z: f64) -> bool {
        match self {
            FrobeniusKind::Y1_0 => z < 1.0,
            FrobeniusKind::Y2_0 => z < 1.0 && z != 0.0,
            FrobeniusKind::Y1_1 | FrobeniusKind::Y2_1 => z > 0.0 && z < 1.0,
            FrobeniusKind::Y1_INF | FrobeniusKind::Y2_INF => z < 0.0,
        }
    }
}

fn frobenius_real(kind: FrobeniusKind, a: f64, b: f64, c: f64, z: f64, ctx: &EvalContext) -> Result<Scaled> {
    if !kind.accepts(z) {
        return Err(Error::DomainError(format!("{kind:?} is not evaluated at z = {z}")));
    }
    match kind {
        FrobeniusKind::Y1_0 => hgf_real(a, b, c, z, ctx),
        FrobeniusKind::Y2_0 => {
            let pow = if z > 0.0 {
                Scaled::powf(z, 1.0 - c)
            } else {
                // principal branch: arg z = π
                Scaled::powf(-z, 1.0 - c) * Complex64::from_polar(1.0, PI * (1.0 - c))
            };
            Ok(pow * hgf_real(a - c + 1.0, b - c + 1.0, 2.0 - c, z, ctx)?)
        }
        FrobeniusKind::Y1_1 => Ok(chi_real(a, b, c)? * hgf_real(a, b, a + b - c + 1.0, 1.0 - z, ctx)?),
        FrobeniusKind::Y2_1 => Ok(chi_real(a, b, c)?
            * Scaled::powf(1.0 - z, c - a - b)
            * hgf_real(c - a, c - b, c - a - b + 1.0, 1.0 - z, ctx)?),
        FrobeniusKind::Y1_INF | FrobeniusKind::Y2_INF => {
            let (a, b) = if kind == FrobeniusKind::Y1_INF { (a, b) } else { (b, a) };
            // Pfaff form with argument 1/(1−z) in (0, 1)
            let sc = guarded_sin(c, "c")?;
            Ok(chi_real(a, b, c)?
                * (1.0 / sc)
                * Scaled::powf(1.0 - z, -a)
                * hgf_real(a, c - b, a - b + 1.0, 1.0 / (1.0 - z), ctx)?)
        }
    }
}

pub fn frobenius_scaled(kind: FrobeniusKind, t: &ParamTriple, z: f64, ctx: &EvalContext) -> Result<Scaled> {
    let (a, b, c) = t.real()?;
    frobenius_real(kind, a, b, c, z, ctx)
}

pub fn frobenius(kind: FrobeniusKind, t: &ParamTriple, z: f64, ctx: &EvalContext) -> Result<Complex64> {
    Ok(frobenius_scaled(kind, t, z, ctx)?.to_complex())
}

/// `y(n)`: the solution evaluated at the `n`-th lattice point of `t`.
pub fn frobenius_sequence(kind: FrobeniusKind, t: &ParamTriple, z: f64, n: u64, ctx: &EvalContext) -> Result<Scaled> {
    frobenius_scaled(kind, &t.lattice(n), z, ctx)
}

/// Coefficients `(p, q)` with `y = p y₁⁽⁰⁾ + q y₂⁽⁰⁾` for the four
/// connection formulas. They depend on `t` only through `sin π(·)` and
/// are therefore unchanged by integer shifts of `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionCoefficients {
    pub y1_1: (Complex64, Complex64),
    pub y2_1: (Complex64, Complex64),
    pub y1_inf: (Complex64, Complex64),
    pub y2_inf: (Complex64, Complex64),
}

pub fn connection_coefficients(t: &ParamTriple) -> Result<ConnectionCoefficients> {
    let (a, b, c) = t.real()?;
    let sca = guarded_sin(c - a, "c - a")?;
    let scb = guarded_sin(c - b, "c - b")?;
    let sc = guarded_sin(c, "c")?;
    let re = |x: f64| Complex64::new(x, 0.0);
    let e = Complex64::from_polar(1.0, PI * c) / sc;
    Ok(ConnectionCoefficients {
        y1_1: (re(1.0), re(-1.0)),
        y2_1: (re(sin_pi(a) * sin_pi(b) / (sca * scb)), re(-1.0)),
        y1_inf: (re(sin_pi(b) / (sc * scb)), e),
        y2_inf: (re(sin_pi(a) / (sc * sca)), e),
    })
}

/// Relative residuals of the four connection formulas at `z`.
///
/// The formulas for the solutions at `1` are checked for `0 < z < 1`, those
/// for the solutions at infinity for `z < 0`; the other pair is `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConnectionResiduals {
    pub y1_1: Option<f64>,
    pub y2_1: Option<f64>,
    pub y1_inf: Option<f64>,
    pub y2_inf: Option<f64>,
}

impl ConnectionResiduals {
    pub fn max(&self) -> f64 {
        [self.y1_1, self.y2_1, self.y1_inf, self.y2_inf]
            .into_iter()
            .flatten()
            .fold(0.0, f64::max)
    }
}

pub fn connection_residuals(t: &ParamTriple, z: f64, ctx: &EvalContext) -> Result<ConnectionResiduals> {
    let coef = connection_coefficients(t)?;
    let y10 = frobenius_scaled(FrobeniusKind::Y1_0, t, z, ctx)?;
    let y20 = frobenius_scaled(FrobeniusKind::Y2_0, t, z, ctx)?;
    let check = |kind: FrobeniusKind, (p, q): (Complex64, Complex64)| -> Result<Option<f64>> {
        if !kind.accepts(z) {
            return Ok(None);
        }
        let lhs = frobenius_scaled(kind, t, z, ctx)?;
        let rhs = y10 * p + y20 * q;
        Ok(Some(lhs.rel_diff(&rhs)))
    };
    Ok(ConnectionResiduals {
        y1_1: check(FrobeniusKind::Y1_1, coef.y1_1)?,
        y2_1: check(FrobeniusKind::Y2_1, coef.y2_1)?,
        y1_inf: check(FrobeniusKind::Y1_INF, coef.y1_inf)?,
        y2_inf: check(FrobeniusKind::Y2_INF, coef.y2_inf)?,
    })
}

/// The three-term relations shared by all six Frobenius solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Contiguous {
    /// `y(a) = (c/a) y(a+k) + ((a−c)z/a) y(a+p)`: the even step of the recurrence.
    Even,
    /// `y(a+k) = ((c+1)/b) y(a+p) + ((b−c−1)z/b) y(a+p+k)`: the odd step.
    Odd,
    /// `y(a+k) = (a/(c−b)) y(a) − ((1−z)/(c−b)) y(a+1)`.
    Derivative,
}

impl Contiguous {
    pub const ALL: [Contiguous; 3] = [Contiguous::Even, Contiguous::Odd, Contiguous::Derivative];
}

/// `|lhs − rhs|` of the chosen relation, relative to the largest of its three terms.
pub fn contiguous_residual(
    t: &ParamTriple,
    z: f64,
    kind: FrobeniusKind,
    which: Contiguous,
    ctx: &EvalContext,
) -> Result<f64> {
    let (a, b, c) = t.real()?;
    let y = |s: ParamTriple| frobenius_scaled(kind, &s, z, ctx);
    let k = ShiftVector::K;
    let p = ShiftVector::P;
    let (lhs, t1, t2) = match which {
        Contiguous::Even => (y(*t)?, y(t.shift(k, 1))? * (c / a), y(t.shift(p, 1))? * ((a - c) * z / a)),
        Contiguous::Odd => (
            y(t.shift(k, 1))?,
            y(t.shift(p, 1))? * ((c + 1.0) / b),
            y(t.shift(p, 1).shift(k, 1))? * ((b - c - 1.0) * z / b),
        ),
        Contiguous::Derivative => (
            y(t.shift(k, 1))?,
            y(*t)? * (a / (c - b)),
            y(t.shift(ShiftVector::ONE, 1))? * (-(1.0 - z) / (c - b)),
        ),
    };
    let scale = lhs.ln_abs().max(t1.ln_abs()).max(t2.ln_abs());
    let diff = lhs - t1 - t2;
    Ok((diff.ln_abs() - scale).exp())
}
