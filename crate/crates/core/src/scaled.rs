//! Complex numbers carried as `mantissa * exp(ln_scale)`.
//!
//! Asymptotic predictions and rescaled hypergeometric values at shifted
//! parameters routinely leave the `f64` exponent range; this type keeps
//! the logarithm of the magnitude separately.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled {
    pub mantissa: Complex64,
    pub ln_scale: f64,
}

impl Scaled {
    pub const ZERO: Scaled = Scaled {
        mantissa: Complex64::new(0.0, 0.0),
        ln_scale: 0.0,
    };

    pub const ONE: Scaled = Scaled {
        mantissa: Complex64::new(1.0, 0.0),
        ln_scale: 0.0,
    };

    pub fn new(mantissa: Complex64, ln_scale: f64) -> Self {
        Scaled { mantissa, ln_scale }.normalized()
    }

    pub fn from_complex(z: Complex64) -> Self {
        Scaled::new(z, 0.0)
    }

    pub fn from_real(x: f64) -> Self {
        Scaled::new(Complex64::new(x, 0.0), 0.0)
    }

    /// `sign * exp(ln_abs)`. An infinite negative `ln_abs` gives zero.
    pub fn from_ln(ln_abs: f64, sign: f64) -> Self {
        if ln_abs == f64::NEG_INFINITY {
            return Scaled::ZERO;
        }
        Scaled {
            mantissa: Complex64::new(sign, 0.0),
            ln_scale: ln_abs,
        }
    }

    /// `exp(w)` for complex `w`.
    pub fn exp_complex(w: Complex64) -> Self {
        Scaled {
            mantissa: Complex64::from_polar(1.0, w.im),
            ln_scale: w.re,
        }
    }

    /// `x^p` for real `x > 0`.
    pub fn powf(x: f64, p: f64) -> Self {
        Scaled::from_ln(p * x.ln(), 1.0)
    }

    fn normalized(self) -> Self {
        let m = self.mantissa.norm();
        if m == 0.0 {
            return Scaled::ZERO;
        }
        if !m.is_finite() {
            return self;
        }
        let l = m.ln();
        Scaled {
            mantissa: self.mantissa / m,
            ln_scale: self.ln_scale + l,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.norm() == 0.0
    }

    /// `ln |value|`; `-∞` for zero.
    pub fn ln_abs(&self) -> f64 {
        let m = self.mantissa.norm();
        if m == 0.0 {
            f64::NEG_INFINITY
        } else {
            m.ln() + self.ln_scale
        }
    }

    /// The value as an ordinary complex number (may overflow or underflow).
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        self.mantissa * self.ln_scale.exp()
    }

    pub fn re(&self) -> f64 {
        self.to_complex().re
    }

    /// Phase-only part: `value / |value|`.
    pub fn unit(&self) -> Complex64 {
        let m = self.mantissa.norm();
        if m == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            self.mantissa / m
        }
    }

    pub fn scale(self, x: Complex64) -> Self {
        Scaled::new(self.mantissa * x, self.ln_scale)
    }

    pub fn inv(self) -> Self {
        Scaled::new(self.mantissa.inv(), -self.ln_scale)
    }

    pub fn powi(self, n: i64) -> Self {
        let s = self.normalized();
        Scaled::new(s.mantissa.powi(n as i32), s.ln_scale * n as f64)
    }

    /// Relative distance `|self - other| / max(|self|, |other|)`.
    pub fn rel_diff(&self, other: &Scaled) -> f64 {
        let big = self.ln_abs().max(other.ln_abs());
        if big == f64::NEG_INFINITY {
            return 0.0;
        }
        let a = self.mantissa * (self.ln_scale - big).exp();
        let b = other.mantissa * (other.ln_scale - big).exp();
        (a - b).norm()
    }

    /// Real part in scientific notation with `digits` significant digits,
    /// valid far outside the `f64` exponent range.
    pub fn to_scientific(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let re = self.mantissa.re;
        if re == 0.0 {
            return "0".into();
        }
        let log10 = (re.abs().ln() + self.ln_scale) / std::f64::consts::LN_10;
        let mut exp = log10.floor();
        let mut mant = 10f64.powf(log10 - exp);
        let prec = digits.saturating_sub(1);
        if format!("{mant:.prec$}").starts_with("10") {
            mant /= 10.0;
            exp += 1.0;
        }
        let sign = if re < 0.0 { "-" } else { "" };
        format!("{sign}{mant:.prec$}e{exp}")
    }

    /// `self / other` as an ordinary complex number.
    pub fn ratio(&self, other: &Scaled) -> Complex64 {
        (*self / *other).to_complex()
    }
}

impl Mul for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Scaled) -> Scaled {
        Scaled::new(self.mantissa * rhs.mantissa, self.ln_scale + rhs.ln_scale)
    }
}

impl Div for Scaled {
    type Output = Scaled;
    fn div(self, rhs: Scaled) -> Scaled {
        Scaled::new(self.mantissa / rhs.mantissa, self.ln_scale - rhs.ln_scale)
    }
}

impl Add for Scaled {
    type Output = Scaled;
    fn add(self, rhs: Scaled) -> Scaled {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let top = self.ln_scale.max(rhs.ln_scale);
        let m = self.mantissa * (self.ln_scale - top).exp() + rhs.mantissa * (rhs.ln_scale - top).exp();
        Scaled::new(m, top)
    }
}

impl Sub for Scaled {
    type Output = Scaled;
    fn sub(self, rhs: Scaled) -> Scaled {
        self + (-rhs)
    }
}

impl Neg for Scaled {
    type Output = Scaled;
    fn neg(self) -> Scaled {
        Scaled {
            mantissa: -self.mantissa,
            ln_scale: self.ln_scale,
        }
    }
}

impl Mul<f64> for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: f64) -> Scaled {
        self.scale(Complex64::new(rhs, 0.0))
    }
}

impl Mul<Complex64> for Scaled {
    type Output = Scaled;
    fn mul(self, rhs: Complex64) -> Scaled {
        self.scale(rhs)
    }
}

impl From<f64> for Scaled {
    fn from(x: f64) -> Self {
        Scaled::from_real(x)
    }
}

impl From<Complex64> for Scaled {
    fn from(z: Complex64) -> Self {
        Scaled::from_complex(z)
    }
}
