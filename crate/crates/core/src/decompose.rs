//! Splitting a gamma-product sum where its linear forms change sign.
//!
//! On each piece between consecutive roots, every factor whose form is
//! negative is moved across the fraction bar with Euler's reflection
//! `Γ(x) Γ(1−x) = π / sin πx`. With integer slopes this only costs a
//! constant, a sign `(−1)^{ν⁻n}` and a change `z ↦ (−1)^{θ⁻} z`; afterwards
//! every form is positive and the Laplace method applies. Pieces that are
//! left with a negative variable are summed over even and odd indices
//! separately, in the variable `z²`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dlm::{brute_force, GammaFactor, Side, SumDescriptor};
use crate::error::{Error, Result};
use crate::hyp2f1::{EvalContext, SINE_GUARD};
use crate::params::INTEGER_TOLERANCE;
use crate::scaled::Scaled;
use crate::special::sin_pi_complex;

fn is_integer(x: f64) -> bool {
    (x - x.round()).abs() <= INTEGER_TOLERANCE
}

/// One piece `[r_s, r_{s+1})` after reflection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub interval: usize,
    /// Reflected sum over the piece, in the variable `z_s`.
    pub descriptor: SumDescriptor,
    /// `π^{|I⁻|−|J⁻|} Π sin πβ / Π sin πα` over the reflected factors.
    pub prefactor: Complex64,
    /// `ν⁻`: the component carries `(−1)^{ν⁻ n}`.
    pub sign_exponent: i64,
    /// `θ⁻`: `z_s = (−1)^{θ⁻} z`.
    pub variable_sign: i64,
    /// `|I⁺| + |J⁻| − |I⁻| − |J⁺|`.
    pub kappa: i64,
    /// Indices (into the original factor list) of the reflected factors.
    pub reflected: Vec<usize>,
}

impl Component {
    pub fn z(&self) -> f64 {
        self.descriptor.z
    }

    /// `prefactor · (−1)^{ν⁻n}`.
    pub fn multiplier(&self, n: u64) -> Complex64 {
        if (self.sign_exponent * n as i64).rem_euclid(2) == 1 {
            -self.prefactor
        } else {
            self.prefactor
        }
    }

    /// The component's contribution to the original sum at `n`.
    /// A negative variable is handled by [`even_odd_split`] when the piece
    /// allows it.
    pub fn evaluate(&self, n: u64, ctx: &EvalContext) -> Result<Scaled> {
        let inner = if self.z() < 0.0 {
            match even_odd_split(&self.descriptor, n % 2) {
                Ok(split) => split.evaluate(n / 2, ctx)?,
                Err(Error::InvalidDescriptor(_)) => brute_force(&self.descriptor, n, ctx)?,
                Err(e) => return Err(e),
            }
        } else {
            brute_force(&self.descriptor, n, ctx)?
        };
        Ok(inner * self.multiplier(n))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentDecomposition {
    /// Interior roots `r_1 < … < r_m` of the linear forms.
    pub breakpoints: Vec<f64>,
    pub components: Vec<Component>,
    /// Factors of the original sum, kept for amplitude cross-checks.
    pub original: SumDescriptor,
}

impl ComponentDecomposition {
    pub fn evaluate(&self, n: u64, ctx: &EvalContext) -> Result<Scaled> {
        let mut sum = Scaled::ZERO;
        for c in &self.components {
            sum = sum + c.evaluate(n, ctx)?;
        }
        Ok(sum)
    }

    /// The amplitude of component `s` written directly in terms of the
    /// original factors: `(2π)^{κ/2} Π |l|^{±(α−1/2)} / Π |m|^{±(β−1/2)}`,
    /// with the exponent's sign flipped on reflected factors.
    pub fn amplitude_from_original(&self, s: usize, x: f64) -> Complex64 {
        let c = &self.components[s];
        let mut ln_u = Complex64::new(c.kappa as f64 / 2.0 * (2.0 * PI).ln(), 0.0);
        for (i, f) in self.original.factors.iter().enumerate() {
            let flip = if c.reflected.contains(&i) { -1.0 } else { 1.0 };
            let sign = match f.side {
                Side::Numerator => 1.0,
                Side::Denominator => -1.0,
            };
            let expo = if flip > 0.0 { f.alpha - 0.5 } else { 0.5 - f.alpha };
            ln_u += expo * (sign * flip) * f.form(x).abs().ln();
        }
        ln_u.exp()
    }
}

/// Split `d` at the roots of its linear forms and reflect the negative factors.
///
/// Needs integer `σ` and `λ` on every factor.
///
/// ```
/// use gausscf::decompose::decompose;
/// use gausscf::dlm::fixtures::{g2, g4};
/// let (a, b, c, z) = (0.3, 0.7, 1.1, -0.5);
/// let dec = decompose(&g4(a, b, c, z)).unwrap();
/// assert_eq!(dec.breakpoints, vec![1.0]);
/// let first = &dec.components[0];
/// let expected = g2(a, 1.0 - b, c, -z);
/// assert_eq!(first.descriptor.factors.len(), 4);
/// assert!(expected.factors.iter().all(|f| first.descriptor.factors.contains(f)));
/// assert_eq!((first.descriptor.r0, first.descriptor.r1, first.z()), (0.0, 1.0, -z));
/// ```
pub fn decompose(d: &SumDescriptor) -> Result<ComponentDecomposition> {
    for f in &d.factors {
        if !is_integer(f.sigma) || !is_integer(f.lambda) {
            return Err(Error::InvalidDescriptor(format!("{f} needs integer σ and λ")));
        }
    }
    let mut breakpoints: Vec<f64> = d
        .factors
        .iter()
        .map(|f| -f.lambda / f.sigma)
        .filter(|&x| x > d.r0 && x < d.r1)
        .collect();
    breakpoints.sort_by(|a, b| a.partial_cmp(b).expect("finite roots"));
    breakpoints.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);

    let mut edges = vec![d.r0];
    edges.extend(&breakpoints);
    edges.push(d.r1);

    let mut components = Vec::new();
    for s in 0..edges.len() - 1 {
        let (lo, hi) = (edges[s], edges[s + 1]);
        let probe = if hi.is_finite() { 0.5 * (lo + hi) } else { lo + 1.0 };
        let mut factors = Vec::new();
        let mut prefactor = Complex64::new(1.0, 0.0);
        let (mut nu, mut theta, mut kappa) = (0i64, 0i64, 0i64);
        let mut reflected = Vec::new();
        for (i, f) in d.factors.iter().enumerate() {
            let negative = f.form(probe) < 0.0;
            match (f.side, negative) {
                (Side::Numerator, false) => {
                    factors.push(*f);
                    kappa += 1;
                }
                (Side::Denominator, false) => {
                    factors.push(*f);
                    kappa -= 1;
                }
                (Side::Numerator, true) => {
                    let s = sin_pi_complex(f.alpha);
                    if s.norm() < SINE_GUARD {
                        return Err(Error::NonGenericParameter(format!("sin πα vanishes for {f}")));
                    }
                    prefactor *= PI / s;
                    factors.push(GammaFactor::new(-f.sigma, -f.lambda, 1.0 - f.alpha, Side::Denominator)?);
                    nu += f.lambda.round() as i64;
                    theta += f.sigma.round() as i64;
                    kappa -= 1;
                    reflected.push(i);
                }
                (Side::Denominator, true) => {
                    prefactor *= sin_pi_complex(f.alpha) / PI;
                    factors.push(GammaFactor::new(-f.sigma, -f.lambda, 1.0 - f.alpha, Side::Numerator)?);
                    nu += f.lambda.round() as i64;
                    theta += f.sigma.round() as i64;
                    kappa += 1;
                    reflected.push(i);
                }
            }
        }
        let z = if theta.rem_euclid(2) == 1 { -d.z } else { d.z };
        components.push(Component {
            interval: s,
            descriptor: SumDescriptor::new(factors, lo, hi, z)?,
            prefactor,
            sign_exponent: nu,
            variable_sign: theta,
            kappa,
            reflected,
        });
    }
    Ok(ComponentDecomposition {
        breakpoints,
        components,
        original: d.clone(),
    })
}

/// One parity class `k = 2j + e` of a sum, re-indexed so that it is again a
/// descriptor in `m = ⌊n/2⌋` with variable `z²`, times `z^power`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParityPart {
    pub descriptor: SumDescriptor,
    pub power: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvenOddSplit {
    /// `n mod 2`; the split is valid for `n = 2m + parity`.
    pub parity: u64,
    /// The original variable `z`.
    pub z: f64,
    pub even: ParityPart,
    pub odd: ParityPart,
}

impl EvenOddSplit {
    /// The original sum at `n = 2m + parity`.
    pub fn evaluate(&self, m: u64, ctx: &EvalContext) -> Result<Scaled> {
        let mut sum = Scaled::ZERO;
        for part in [&self.even, &self.odd] {
            let v = brute_force(&part.descriptor, m, ctx)?;
            sum = sum + v * self.z.powi(part.power as i32);
        }
        Ok(sum)
    }
}

fn parity_part(d: &SumDescriptor, parity: u64, e: i64) -> Result<ParityPart> {
    let p = parity as f64;
    let ef = e as f64;
    // k = 2j + e with k ≥ r0 n = 2 r0 m + r0 p, so j ≥ r0 m + shift
    let shift = ((d.r0 * p - ef) / 2.0).ceil();
    if !d.is_infinite() {
        // largest k is r1 n − 1, so j ≤ r1 m + ⌊(r1 p − 1 − e)/2⌋
        let top = ((d.r1 * p - 1.0 - ef) / 2.0).floor() - shift + 1.0;
        if top != 0.0 {
            return Err(Error::InvalidDescriptor(format!(
                "upper endpoint {} does not align with the parity-{e} indices",
                d.r1
            )));
        }
    }
    let factors = d
        .factors
        .iter()
        .map(|f| {
            let alpha = f.alpha + f.lambda * p + f.sigma * (ef + 2.0 * shift);
            GammaFactor::new(2.0 * f.sigma, 2.0 * f.lambda, alpha, f.side)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ParityPart {
        descriptor: SumDescriptor::new(factors, d.r0, d.r1, d.z * d.z)?,
        power: (ef + 2.0 * shift) as u32,
    })
}

/// Separate even and odd `k` for `n = 2m + parity`.
///
/// Needs integer endpoints; a finite upper endpoint must also line up with
/// the parity classes.
///
/// ```
/// use gausscf::decompose::even_odd_split;
/// use gausscf::dlm::fixtures::{g3, g4};
/// let (a, b, c, z) = (0.3, 0.7, 1.1, -0.5);
/// let tail = g4(a, b, c, z).with_range(1.0, f64::INFINITY).unwrap();
/// let s = even_odd_split(&tail, 0).unwrap();
/// assert_eq!(s.even.descriptor, g3(a, b, 1.0, c, z * z));
/// assert_eq!(s.odd.descriptor, g3(a + 1.0, b + 1.0, 2.0, c + 1.0, z * z));
/// assert_eq!((s.even.power, s.odd.power), (0, 1));
/// ```
pub fn even_odd_split(d: &SumDescriptor, parity: u64) -> Result<EvenOddSplit> {
    if !is_integer(d.r0) || (d.r1.is_finite() && !is_integer(d.r1)) {
        return Err(Error::InvalidDescriptor("even-odd splitting needs integer endpoints".into()));
    }
    for f in &d.factors {
        if !is_integer(f.sigma) || !is_integer(f.lambda) {
            return Err(Error::InvalidDescriptor(format!("{f} needs integer σ and λ")));
        }
    }
    let parity = parity % 2;
    Ok(EvenOddSplit {
        parity,
        z: d.z,
        even: parity_part(d, parity, 0)?,
        odd: parity_part(d, parity, 1)?,
    })
}
