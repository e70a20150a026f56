//! Parameter triples `(a, b; c)` of the Gauss family and their shift algebra.
//!
//! The continued fraction walks through the lattice `a + m p` and
//! `a + m p + k`, where `k = (1, 0; 1)`, `p = k + σ(k) = (1, 1; 2)` and `σ`
//! swaps the two upper parameters.

use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Distance to the nearest integer below which a parameter counts as an integer.
pub const INTEGER_TOLERANCE: f64 = 1e-9;

/// An integer shift `(da, db; dc)` of a parameter triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ShiftVector {
    pub da: i64,
    pub db: i64,
    pub dc: i64,
}

impl ShiftVector {
    /// `k = (1, 0; 1)`.
    pub const K: ShiftVector = ShiftVector::new(1, 0, 1);
    /// `p = k + σ(k) = (1, 1; 2)`.
    pub const P: ShiftVector = ShiftVector::new(1, 1, 2);
    /// `1 = (1, 1; 1)`, the shift realised by differentiation in `z`.
    pub const ONE: ShiftVector = ShiftVector::new(1, 1, 1);

    pub const fn new(da: i64, db: i64, dc: i64) -> Self {
        ShiftVector { da, db, dc }
    }

    /// Exchanges the two upper components.
    pub const fn sigma(self) -> Self {
        ShiftVector::new(self.db, self.da, self.dc)
    }

    pub const fn plus(self, other: ShiftVector) -> Self {
        ShiftVector::new(self.da + other.da, self.db + other.db, self.dc + other.dc)
    }

    pub const fn scaled(self, times: i64) -> Self {
        ShiftVector::new(self.da * times, self.db * times, self.dc * times)
    }
}

/// A parameter triple `(a, b; c)`.
///
/// Components are stored as complex numbers; the numerical engines only
/// accept triples whose imaginary parts vanish (see [`ParamTriple::real`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamTriple {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
}

impl ParamTriple {
    pub fn new(a: f64, b: f64, c: f64) -> Self {
        ParamTriple {
            a: Complex64::new(a, 0.0),
            b: Complex64::new(b, 0.0),
            c: Complex64::new(c, 0.0),
        }
    }

    pub fn complex(a: Complex64, b: Complex64, c: Complex64) -> Self {
        ParamTriple { a, b, c }
    }

    /// Componentwise `self + times * v`. Imaginary parts are carried along.
    pub fn shift(&self, v: ShiftVector, times: i64) -> Self {
        let s = v.scaled(times);
        ParamTriple {
            a: self.a + s.da as f64,
            b: self.b + s.db as f64,
            c: self.c + s.dc as f64,
        }
    }

    /// The `n`-th point of the continued-fraction lattice: `t + m p` for
    /// `n = 2m` and `t + m p + k` for `n = 2m + 1`.
    pub fn lattice(&self, n: u64) -> Self {
        let m = (n / 2) as i64;
        let base = self.shift(ShiftVector::P, m);
        if n % 2 == 0 {
            base
        } else {
            base.shift(ShiftVector::K, 1)
        }
    }

    /// The involution `σ: (a, b; c) ↦ (b, a; c)`.
    pub fn sigma(&self) -> Self {
        ParamTriple {
            a: self.b,
            b: self.a,
            c: self.c,
        }
    }

    /// Real parts `(a, b, c)`, or a domain error if any imaginary part is nonzero.
    pub fn real(&self) -> Result<(f64, f64, f64)> {
        if self.a.im != 0.0 || self.b.im != 0.0 || self.c.im != 0.0 {
            return Err(Error::DomainError(format!(
                "complex parameters {self} are outside the real evaluation region"
            )));
        }
        Ok((self.a.re, self.b.re, self.c.re))
    }
}

impl fmt::Display for ParamTriple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |z: Complex64| {
            if z.im == 0.0 {
                format!("{}", z.re)
            } else {
                format!("{z}")
            }
        };
        write!(f, "({}, {}; {})", show(self.a), show(self.b), show(self.c))
    }
}

/// True if `z` lies within [`INTEGER_TOLERANCE`] of an integer `<= max`.
pub fn near_integer_at_most(z: Complex64, max: i64) -> bool {
    if z.im.abs() > INTEGER_TOLERANCE {
        return false;
    }
    let nearest = z.re.round();
    (z.re - nearest).abs() <= INTEGER_TOLERANCE && nearest <= max as f64
}

/// Which admissibility condition of the continued fraction a triple violates.
pub fn gcf_violation(t: &ParamTriple) -> Option<&'static str> {
    if near_integer_at_most(t.a, -1) {
        return Some("a must not be an integer <= -1");
    }
    if near_integer_at_most(t.c - t.b, -1) {
        return Some("c - b must not be an integer <= -1");
    }
    if near_integer_at_most(t.b, 0) {
        return Some("b must not be an integer <= 0");
    }
    if near_integer_at_most(t.c, 0) {
        return Some("c must not be an integer <= 0");
    }
    if near_integer_at_most(t.c - t.a, 0) {
        return Some("c - a must not be an integer <= 0");
    }
    None
}

/// `a, c - b ∉ Z≤-1` and `b, c, c - a ∉ Z≤0`: every partial numerator and
/// denominator of Gauss's continued fraction is finite and nonzero.
pub fn check_gcf_admissible(t: &ParamTriple) -> bool {
    gcf_violation(t).is_none()
}

pub fn star_violation(b: Complex64, c: Complex64) -> Option<&'static str> {
    if near_integer_at_most(b, 0) {
        return Some("b must not be an integer <= 0");
    }
    if near_integer_at_most(c, 0) {
        return Some("c must not be an integer <= 0");
    }
    if near_integer_at_most(c - b, 0) {
        return Some("c - b must not be an integer <= 0");
    }
    None
}

/// `b, c, c - b ∉ Z≤0`, the condition for the `a → 0` specialisation.
pub fn check_star_admissible(b: Complex64, c: Complex64) -> bool {
    star_violation(b, c).is_none()
}
