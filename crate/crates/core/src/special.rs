//! Gamma function and trigonometric helpers.
//!
//! `ln Γ` uses the Stirling series after shifting the argument up to at
//! least 12, and Euler's reflection formula left of `1/2`. Eight Bernoulli
//! terms at `x >= 12` leave a truncation error below `1e-16`.

use std::f64::consts::PI;

use num_complex::Complex64;

/// `ln(2π) / 2`.
const HALF_LN_2PI: f64 = 0.918_938_533_204_672_8;

/// Stirling threshold: arguments are shifted until their real part reaches it.
const STIRLING_MIN: f64 = 12.0;

/// `B_{2k} / (2k (2k - 1))` for `k = 1..=8`.
const STIRLING_COEFFS: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// `sin(π x)`, exact zero at integers.
pub fn sin_pi(x: f64) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    let r = x - 2.0 * (x / 2.0).round();
    let s = if r > 0.5 {
        1.0 - r
    } else if r < -0.5 {
        -1.0 - r
    } else {
        r
    };
    if s == 0.0 {
        0.0
    } else {
        (PI * s).sin()
    }
}

/// `cos(π x)`, exact zero at half-integers.
pub fn cos_pi(x: f64) -> f64 {
    sin_pi(x + 0.5)
}

/// `sin(π z)` for complex `z`.
pub fn sin_pi_complex(z: Complex64) -> Complex64 {
    let (y_cosh, y_sinh) = ((PI * z.im).cosh(), (PI * z.im).sinh());
    Complex64::new(sin_pi(z.re) * y_cosh, cos_pi(z.re) * y_sinh)
}

fn stirling(x: f64) -> f64 {
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    let mut corr = 0.0;
    let mut pow = inv;
    for c in STIRLING_COEFFS {
        corr += c * pow;
        pow *= inv2;
    }
    (x - 0.5) * x.ln() - x + HALF_LN_2PI + corr
}

/// `(ln |Γ(x)|, sign Γ(x))`. Poles return `(+∞, 1)`.
pub fn ln_gamma(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, 1.0);
    }
    if x < 0.5 {
        let s = sin_pi(x);
        if s == 0.0 {
            return (f64::INFINITY, 1.0);
        }
        let (lg, _) = ln_gamma(1.0 - x);
        return (PI.ln() - s.abs().ln() - lg, s.signum());
    }
    if x >= STIRLING_MIN {
        return (stirling(x), 1.0);
    }
    let mut shifted = x;
    let mut prod = 1.0;
    while shifted < STIRLING_MIN {
        prod *= shifted;
        shifted += 1.0;
    }
    (stirling(shifted) - prod.ln(), 1.0)
}

/// `Γ(x)`; `±∞` at poles and for arguments beyond the `f64` range.
pub fn gamma(x: f64) -> f64 {
    let (lg, s) = ln_gamma(x);
    if lg == f64::INFINITY {
        return f64::INFINITY;
    }
    s * lg.exp()
}

/// `1 / Γ(x)`, entire: zero at the non-positive integers.
pub fn rgamma(x: f64) -> f64 {
    let (lg, s) = ln_gamma(x);
    if lg == f64::INFINITY {
        return 0.0;
    }
    s * (-lg).exp()
}

fn stirling_complex(z: Complex64) -> Complex64 {
    let inv = z.inv();
    let inv2 = inv * inv;
    let mut corr = Complex64::new(0.0, 0.0);
    let mut pow = inv;
    for c in STIRLING_COEFFS {
        corr += pow * c;
        pow *= inv2;
    }
    (z - 0.5) * z.ln() - z + HALF_LN_2PI + corr
}

/// A logarithm of `Γ(z)` for complex `z`, determined modulo `2πi`.
///
/// Poles give a real part of `+∞`. Only `exp` of the result is meaningful;
/// the imaginary part is not the principal branch of `ln Γ`.
pub fn ln_gamma_complex(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let s = sin_pi_complex(z);
        if s.norm() == 0.0 {
            return Complex64::new(f64::INFINITY, 0.0);
        }
        return Complex64::new(PI.ln(), 0.0) - s.ln() - ln_gamma_complex(1.0 - z);
    }
    if z.re >= STIRLING_MIN {
        return stirling_complex(z);
    }
    let mut shifted = z;
    let mut ln_prod = Complex64::new(0.0, 0.0);
    let mut prod = Complex64::new(1.0, 0.0);
    while shifted.re < STIRLING_MIN {
        prod *= shifted;
        if prod.norm() > 1e100 {
            ln_prod += prod.ln();
            prod = Complex64::new(1.0, 0.0);
        }
        shifted += 1.0;
    }
    stirling_complex(shifted) - ln_prod - prod.ln()
}

/// Distance from `x` to the nearest integer.
pub fn dist_to_integer(x: f64) -> f64 {
    (x - x.round()).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn factorials() {
        let mut fact = 1.0_f64;
        for n in 1..30 {
            assert_relative_eq!(gamma(n as f64), fact, max_relative = 1e-14);
            fact *= n as f64;
        }
    }

    #[test]
    fn half_integers() {
        let sqrt_pi = PI.sqrt();
        assert_relative_eq!(gamma(0.5), sqrt_pi, max_relative = 1e-14);
        assert_relative_eq!(gamma(1.5), sqrt_pi / 2.0, max_relative = 1e-14);
        assert_relative_eq!(gamma(-0.5), -2.0 * sqrt_pi, max_relative = 1e-14);
        assert_relative_eq!(gamma(-1.5), 4.0 * sqrt_pi / 3.0, max_relative = 1e-14);
    }

    #[test]
    fn reference_values() {
        // 30-digit values computed with an independent multiprecision library
        assert_relative_eq!(gamma(0.3), 2.991_568_987_687_590_6, max_relative = 1e-14);
        assert_relative_eq!(gamma(2.25), 1.133_003_096_319_346_3, max_relative = 1e-14);
        assert_relative_eq!(gamma(-2.7), -0.931_082_784_838_963_8, max_relative = 1e-13);
        assert_relative_eq!(ln_gamma(100.5).0, 361.435_540_467_777_6, max_relative = 1e-15);
        assert_relative_eq!(ln_gamma(1e-8).0, 18.420_680_738_180_21, max_relative = 1e-13);
    }

    #[test]
    fn poles() {
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-3.0), 0.0);
        assert!(gamma(-2.0).is_infinite());
    }

    #[test]
    fn sine_reduction() {
        assert_eq!(sin_pi(3.0), 0.0);
        assert_eq!(sin_pi(-7.0), 0.0);
        assert_relative_eq!(sin_pi(2.25), std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-15);
        assert_relative_eq!(sin_pi(-0.75), -std::f64::consts::FRAC_1_SQRT_2, max_relative = 1e-15);
        assert_relative_eq!(sin_pi(1e6 + 0.5), 1.0, max_relative = 1e-15);
        assert_eq!(cos_pi(0.5), 0.0);
    }

    #[test]
    fn complex_matches_real() {
        for &x in &[0.3, 1.0, 2.5, 7.25, 15.0, -0.4, -3.6, 40.5] {
            let (lg, s) = ln_gamma(x);
            let g = ln_gamma_complex(Complex64::new(x, 0.0)).exp();
            assert_relative_eq!(g.re, s * lg.exp(), max_relative = 1e-13);
            assert!(g.im.abs() <= 1e-13 * g.re.abs());
        }
    }

    #[test]
    fn complex_recurrence() {
        let z = Complex64::new(0.3, 1.7);
        let lhs = ln_gamma_complex(z + 1.0).exp();
        let rhs = z * ln_gamma_complex(z).exp();
        assert!((lhs - rhs).norm() < 1e-13 * rhs.norm());
        // |Γ(i)|^2 = π / sinh(π)
        let gi = ln_gamma_complex(Complex64::new(0.0, 1.0)).exp();
        assert_relative_eq!(gi.norm_sqr(), PI / PI.sinh(), max_relative = 1e-13);
    }
}
