//! Discrete Laplace method for sums of gamma-function products
//!
//! ```text
//! g(n) = Σ_{k=⌈r0 n⌉}^{⌈r1 n⌉−1} Π Γ(σᵢk + λᵢn + αᵢ) / Π Γ(τⱼk + μⱼn + βⱼ) · zᵏ
//! ```
//!
//! The terms are governed by a phase `Φ(x) = zˣ Π lᵢ(x)^{lᵢ(x)} / Π mⱼ(x)^{mⱼ(x)}`
//! with `lᵢ(x) = σᵢx + λᵢ`, `mⱼ(x) = τⱼx + μⱼ`, and an amplitude `u(x)`.
//! When `Φ` has nondegenerate interior maxima,
//! `g(n) ~ C n^{γ+1/2} (n/e)^{νn} Φ_maxⁿ`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hyp2f1::EvalContext;
use crate::scaled::Scaled;
use crate::special::{ln_gamma, ln_gamma_complex};

/// Number of grid cells used when bracketing critical points of the phase.
pub const GRID_CELLS: usize = 4096;

/// Tolerance on `|φ′|` at a refined critical point.
pub const ROOT_TOLERANCE: f64 = 1e-12;

/// Maxima with `φ″` at or below this are treated as degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Numerator,
    Denominator,
}

/// One factor `Γ(σk + λn + α)`, in the numerator or the denominator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawFactor", into = "RawFactor")]
pub struct GammaFactor {
    pub sigma: f64,
    pub lambda: f64,
    pub alpha: Complex64,
    pub side: Side,
}

#[derive(Serialize, Deserialize)]
struct RawFactor {
    sigma: f64,
    lambda: f64,
    alpha_re: f64,
    #[serde(default)]
    alpha_im: f64,
    side: Side,
}

impl TryFrom<RawFactor> for GammaFactor {
    type Error = Error;
    fn try_from(r: RawFactor) -> Result<Self> {
        GammaFactor::new(r.sigma, r.lambda, Complex64::new(r.alpha_re, r.alpha_im), r.side)
    }
}

impl From<GammaFactor> for RawFactor {
    fn from(f: GammaFactor) -> Self {
        RawFactor {
            sigma: f.sigma,
            lambda: f.lambda,
            alpha_re: f.alpha.re,
            alpha_im: f.alpha.im,
            side: f.side,
        }
    }
}

impl GammaFactor {
    pub fn new(sigma: f64, lambda: f64, alpha: Complex64, side: Side) -> Result<Self> {
        if sigma == 0.0 || !sigma.is_finite() || !lambda.is_finite() || !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::InvalidDescriptor(format!(
                "factor (σ, λ, α) = ({sigma}, {lambda}, {alpha}) needs finite data and σ ≠ 0"
            )));
        }
        Ok(GammaFactor {
            sigma,
            lambda,
            alpha,
            side,
        })
    }

    /// Numerator factor with real `α`.
    pub fn num(sigma: f64, lambda: f64, alpha: f64) -> Self {
        GammaFactor::new(sigma, lambda, Complex64::new(alpha, 0.0), Side::Numerator).expect("σ ≠ 0")
    }

    /// Denominator factor with real `β`.
    pub fn den(sigma: f64, lambda: f64, beta: f64) -> Self {
        GammaFactor::new(sigma, lambda, Complex64::new(beta, 0.0), Side::Denominator).expect("σ ≠ 0")
    }

    /// The linear form `σx + λ`.
    pub fn form(&self, x: f64) -> f64 {
        self.sigma * x + self.lambda
    }

    /// `σk + λn + α`.
    pub fn argument(&self, k: i64, n: u64) -> Complex64 {
        self.alpha + (self.sigma * k as f64 + self.lambda * n as f64)
    }
}

impl fmt::Display for GammaFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alpha = if self.alpha.im == 0.0 {
            format!("{}", self.alpha.re)
        } else {
            format!("{}", self.alpha)
        };
        write!(f, "Γ({}k + {}n + {alpha})", self.sigma, self.lambda)
    }
}

/// The sum `g(n)` over `⌈r0 n⌉ ≤ k < ⌈r1 n⌉`; `r1` may be `+∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawDescriptor", into = "RawDescriptor")]
pub struct SumDescriptor {
    pub factors: Vec<GammaFactor>,
    pub r0: f64,
    pub r1: f64,
    pub z: f64,
}

#[derive(Serialize, Deserialize)]
struct RawDescriptor {
    factors: Vec<GammaFactor>,
    r0: f64,
    #[serde(serialize_with = "write_endpoint", deserialize_with = "read_endpoint")]
    r1: f64,
    z: f64,
}

fn write_endpoint<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if *x == f64::INFINITY {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*x)
    }
}

fn read_endpoint<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Endpoint {
        Number(f64),
        Text(String),
    }
    match Endpoint::deserialize(d)? {
        Endpoint::Number(x) => Ok(x),
        Endpoint::Text(s) if matches!(s.as_str(), "inf" | "+inf" | "infinity" | "Infinity") => Ok(f64::INFINITY),
        Endpoint::Text(s) => Err(serde::de::Error::custom(format!("endpoint {s:?} is neither a number nor \"inf\""))),
    }
}

impl TryFrom<RawDescriptor> for SumDescriptor {
    type Error = Error;
    fn try_from(r: RawDescriptor) -> Result<Self> {
        SumDescriptor::new(r.factors, r.r0, r.r1, r.z)
    }
}

impl From<SumDescriptor> for RawDescriptor {
    fn from(d: SumDescriptor) -> Self {
        RawDescriptor {
            factors: d.factors,
            r0: d.r0,
            r1: d.r1,
            z: d.z,
        }
    }
}

impl SumDescriptor {
    pub fn new(factors: Vec<GammaFactor>, r0: f64, r1: f64, z: f64) -> Result<Self> {
        if !(r0 >= 0.0 && r0.is_finite()) {
            return Err(Error::InvalidDescriptor(format!("r0 = {r0} must be finite and ≥ 0")));
        }
        if !(r0 < r1) {
            return Err(Error::InvalidDescriptor(format!("r0 = {r0} must be below r1 = {r1}")));
        }
        if !z.is_finite() || z == 0.0 {
            return Err(Error::InvalidDescriptor(format!("z = {z} must be a finite nonzero real")));
        }
        for f in &factors {
            GammaFactor::new(f.sigma, f.lambda, f.alpha, f.side)?;
        }
        Ok(SumDescriptor { factors, r0, r1, z })
    }

    pub fn numerators(&self) -> impl Iterator<Item = &GammaFactor> {
        self.factors.iter().filter(|f| f.side == Side::Numerator)
    }

    pub fn denominators(&self) -> impl Iterator<Item = &GammaFactor> {
        self.factors.iter().filter(|f| f.side == Side::Denominator)
    }

    pub fn is_infinite(&self) -> bool {
        self.r1 == f64::INFINITY
    }

    /// First and one-past-last summation index at `n`.
    pub fn range(&self, n: u64) -> (i64, Option<i64>) {
        let lo = (self.r0 * n as f64).ceil() as i64;
        let hi = if self.is_infinite() {
            None
        } else {
            Some((self.r1 * n as f64).ceil() as i64)
        };
        (lo, hi)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidDescriptor(e.to_string()))
    }

    /// `ln |G(k; n) zᵏ|` and its phase, or `None` when a denominator pole kills the term.
    pub fn ln_term(&self, k: i64, n: u64) -> Result<Option<Complex64>> {
        let mut acc = Complex64::new(k as f64 * self.z.abs().ln(), 0.0);
        if self.z < 0.0 && k % 2 != 0 {
            acc.im += PI;
        }
        for f in &self.factors {
            let arg = f.argument(k, n);
            let lg = if arg.im == 0.0 {
                let (l, s) = ln_gamma(arg.re);
                if l == f64::INFINITY {
                    if f.side == Side::Denominator {
                        return Ok(None);
                    }
                    return Err(Error::PoleAtParameter(format!("{f} at k = {k}, n = {n}")));
                }
                Complex64::new(l, if s < 0.0 { PI } else { 0.0 })
            } else {
                ln_gamma_complex(arg)
            };
            match f.side {
                Side::Numerator => acc += lg,
                Side::Denominator => acc -= lg,
            }
        }
        Ok(Some(acc))
    }

    /// `G(k; n) zᵏ`.
    pub fn term(&self, k: i64, n: u64) -> Result<Scaled> {
        Ok(self.ln_term(k, n)?.map_or(Scaled::ZERO, Scaled::exp_complex))
    }

    /// Copy with `z` replaced.
    pub fn with_z(&self, z: f64) -> Result<Self> {
        SumDescriptor::new(self.factors.clone(), self.r0, self.r1, z)
    }

    /// Copy restricted to `[r0, r1)`.
    pub fn with_range(&self, r0: f64, r1: f64) -> Result<Self> {
        SumDescriptor::new(self.factors.clone(), r0, r1, self.z)
    }
}

/// `(ρ, ν, γ)`: geometric ratio, Stirling exponent and algebraic exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DlmInvariants {
    pub rho: f64,
    pub nu: f64,
    pub gamma: Complex64,
}

pub fn invariants(d: &SumDescriptor) -> DlmInvariants {
    let mut ln_rho = d.z.abs().ln();
    let (mut nu, mut gamma) = (0.0, Complex64::new(0.0, 0.0));
    let (mut ni, mut nj) = (0.0, 0.0);
    for f in d.numerators() {
        ln_rho += f.sigma * f.sigma.abs().ln();
        nu += f.lambda;
        gamma += f.alpha;
        ni += 1.0;
    }
    for f in d.denominators() {
        ln_rho -= f.sigma * f.sigma.abs().ln();
        nu -= f.lambda;
        gamma -= f.alpha;
        nj += 1.0;
    }
    gamma += (nj - ni) / 2.0;
    DlmInvariants {
        rho: d.z.signum() * ln_rho.exp(),
        nu,
        gamma,
    }
}

/// Which of the convergence conditions for an infinite range holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceCase {
    FiniteRange,
    /// `0 < ρ < 1`.
    Geometric,
    /// `ρ = 1`, `ν < 0`.
    Factorial,
    /// `ρ = 1`, `ν = 0`, `Re γ < −1`.
    Algebraic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    PositiveVariable,
    Balanced,
    Positivity,
    Genericness,
    Convergence,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: Check,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub items: Vec<CheckResult>,
    pub convergence: Option<ConvergenceCase>,
    /// Distances of the boundary gamma arguments from their poles, at `n = 1`.
    pub delta0: f64,
    pub delta1: Option<f64>,
    /// True when `δ₀` or `δ₁` changes with `n` (non-integer endpoints).
    pub delta_depends_on_n: bool,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn get(&self, check: Check) -> &CheckResult {
        self.items.iter().find(|i| i.check == check).expect("every check is reported")
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.items.iter().filter(|i| !i.passed)
    }
}

const FORM_TOLERANCE: f64 = 1e-12;

/// Index and description of the first factor whose form is not positive on `(r0, r1)`.
pub fn positivity_violations(d: &SumDescriptor) -> Vec<(usize, GammaFactor)> {
    d.factors
        .iter()
        .enumerate()
        .filter(|(_, f)| {
            let at0 = f.form(d.r0) >= -FORM_TOLERANCE;
            let at1 = if d.is_infinite() {
                f.sigma > 0.0
            } else {
                f.form(d.r1) >= -FORM_TOLERANCE
            };
            !(at0 && at1)
        })
        .map(|(i, f)| (i, *f))
        .collect()
}

/// Distance of `x` from `{−j − s·k : j ≥ 0, k ≥ k_min}`.
fn lattice_distance(x: Complex64, s: f64, k_min: i64) -> f64 {
    let top = -s * k_min as f64;
    let re = x.re;
    let mut best = (re - top).abs();
    if re < top {
        let mut k = k_min;
        while s * k as f64 <= -re + 1.0 + s && k < k_min + 1_000_000 {
            let base = -s * k as f64;
            let j = base - re;
            for jj in [j.floor(), j.ceil()] {
                if jj >= 0.0 {
                    best = best.min((re - (base - jj)).abs());
                }
            }
            k += 1;
        }
    }
    best.hypot(x.im)
}

fn delta_at(d: &SumDescriptor, r: f64, n: u64, star: i64) -> f64 {
    let shift = (r * n as f64).ceil() - r * n as f64;
    let mut prod = 1.0;
    for f in d.numerators() {
        if f.form(r).abs() <= FORM_TOLERANCE {
            prod *= lattice_distance(f.alpha + f.sigma * shift, f.sigma.abs(), star);
        }
    }
    prod.min(1.0)
}

/// `(δ₀, δ₁)` at index `n`; `δ₁` is absent for an infinite range.
pub fn deltas(d: &SumDescriptor, n: u64) -> (f64, Option<f64>) {
    let d0 = delta_at(d, d.r0, n, 0);
    let d1 = (!d.is_infinite()).then(|| delta_at(d, d.r1, n, 1));
    (d0, d1)
}

pub fn validate(d: &SumDescriptor) -> ValidationReport {
    let inv = invariants(d);
    let mut items = Vec::new();

    items.push(CheckResult {
        check: Check::PositiveVariable,
        passed: d.z > 0.0,
        detail: if d.z > 0.0 {
            format!("z = {}", d.z)
        } else {
            format!("z = {} is negative; split the sum into even and odd indices", d.z)
        },
    });

    let ssig: f64 = d.numerators().map(|f| f.sigma).sum();
    let stau: f64 = d.denominators().map(|f| f.sigma).sum();
    let balanced = (ssig - stau).abs() <= FORM_TOLERANCE * (1.0 + ssig.abs());
    items.push(CheckResult {
        check: Check::Balanced,
        passed: balanced,
        detail: format!("Σσ = {ssig}, Στ = {stau}"),
    });

    let bad = positivity_violations(d);
    items.push(CheckResult {
        check: Check::Positivity,
        passed: bad.is_empty(),
        detail: if bad.is_empty() {
            "all linear forms positive on the range".into()
        } else {
            let list: Vec<String> = bad
                .iter()
                .map(|(i, f)| format!("factor {i} {f} (form {}x + {})", f.sigma, f.lambda))
                .collect();
            format!("{} changes sign on the range; decompose the sum at its roots", list.join(", "))
        },
    });

    let (delta0, delta1) = deltas(d, 1);
    let delta_depends_on_n = [d.r0, d.r1].iter().any(|r| r.is_finite() && r.fract() != 0.0);
    let generic = delta0 > 0.0 && delta1.is_none_or(|x| x > 0.0);
    items.push(CheckResult {
        check: Check::Genericness,
        passed: generic,
        detail: match delta1 {
            Some(d1) => format!("δ₀ = {delta0}, δ₁ = {d1}"),
            None => format!("δ₀ = {delta0}"),
        },
    });

    let rho = inv.rho.abs();
    let convergence = if !d.is_infinite() {
        Some(ConvergenceCase::FiniteRange)
    } else if rho < 1.0 - 1e-12 {
        Some(ConvergenceCase::Geometric)
    } else if (rho - 1.0).abs() <= 1e-12 && inv.nu < 0.0 {
        Some(ConvergenceCase::Factorial)
    } else if (rho - 1.0).abs() <= 1e-12 && inv.nu == 0.0 && inv.gamma.re < -1.0 {
        Some(ConvergenceCase::Algebraic)
    } else {
        None
    };
    items.push(CheckResult {
        check: Check::Convergence,
        passed: convergence.is_some(),
        detail: format!("ρ = {}, ν = {}, γ = {}", inv.rho, inv.nu, inv.gamma),
    });

    ValidationReport {
        items,
        convergence,
        delta0,
        delta1,
        delta_depends_on_n,
    }
}

/// `Φ(x)`, `u(x)`, `φ′(x)`, `φ″(x)` at an interior point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseValues {
    pub ln_phi: f64,
    pub phi: f64,
    pub u: Complex64,
    pub dphi: f64,
    pub d2phi: f64,
}

fn xlnx(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

fn require_positive_variable(d: &SumDescriptor) -> Result<()> {
    if d.z <= 0.0 {
        return Err(Error::DomainError(format!("the phase needs z > 0, got {}", d.z)));
    }
    Ok(())
}

/// `ln Φ(x)`, allowing forms that vanish (at endpoints).
pub fn ln_phi(d: &SumDescriptor, x: f64) -> Result<f64> {
    require_positive_variable(d)?;
    let mut acc = x * d.z.ln();
    for f in &d.factors {
        let l = f.form(x);
        if l < 0.0 {
            return Err(Error::DomainError(format!("{f}: form {l} is negative at x = {x}")));
        }
        match f.side {
            Side::Numerator => acc += xlnx(l),
            Side::Denominator => acc -= xlnx(l),
        }
    }
    Ok(acc)
}

/// `φ′(x) = −(ln Φ)′(x)`.
pub fn dphi(d: &SumDescriptor, x: f64) -> Result<f64> {
    require_positive_variable(d)?;
    let mut acc = -d.z.ln();
    for f in &d.factors {
        let l = f.form(x);
        if l <= 0.0 {
            return Err(Error::DomainError(format!("{f}: form {l} is not positive at x = {x}")));
        }
        match f.side {
            Side::Numerator => acc -= f.sigma * l.ln(),
            Side::Denominator => acc += f.sigma * l.ln(),
        }
    }
    Ok(acc)
}

pub fn phase(d: &SumDescriptor, x: f64) -> Result<PhaseValues> {
    let ln_phi = ln_phi(d, x)?;
    let dphi = dphi(d, x)?;
    let mut d2 = 0.0;
    let mut ln_u = Complex64::new(0.0, 0.0);
    let mut count = 0.0;
    for f in &d.factors {
        let l = f.form(x);
        let term = (f.alpha - 0.5) * l.ln();
        match f.side {
            Side::Numerator => {
                d2 -= f.sigma * f.sigma / l;
                ln_u += term;
                count += 1.0;
            }
            Side::Denominator => {
                d2 += f.sigma * f.sigma / l;
                ln_u -= term;
                count -= 1.0;
            }
        }
    }
    ln_u += count / 2.0 * (2.0 * PI).ln();
    Ok(PhaseValues {
        ln_phi,
        phi: ln_phi.exp(),
        u: ln_u.exp(),
        dphi,
        d2phi: d2,
    })
}

/// An interior critical point of `Φ` that is a local maximum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteriorMaximum {
    pub x0: f64,
    pub phi2: f64,
    pub u: Complex64,
    pub ln_phi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximumReport {
    pub phi_max: f64,
    pub ln_phi_max: f64,
    /// Interior points attaining `Φ_max`.
    pub maxima: Vec<InteriorMaximum>,
    /// Every interior local maximum found, including lower ones.
    pub local_maxima: Vec<InteriorMaximum>,
    pub local_minima: Vec<f64>,
    /// `(Φ(r0), Φ(r1))`, with `Φ(+∞)` taken as a limit.
    pub boundary_values: (f64, f64),
    /// Where a boundary value reaches `Φ_max`, if it does.
    pub boundary_maximum: Option<f64>,
}

/// `ln Φ(+∞)`: `−∞` when `ρ < 1` or `ρ = 1, ν < 0`, else the finite or infinite limit.
fn ln_phi_at_infinity(d: &SumDescriptor) -> f64 {
    let inv = invariants(d);
    if inv.rho < 1.0 - 1e-12 {
        return f64::NEG_INFINITY;
    }
    if (inv.rho - 1.0).abs() <= 1e-12 {
        if inv.nu < 0.0 {
            return f64::NEG_INFINITY;
        }
        if inv.nu == 0.0 {
            let mut c = 0.0;
            for f in &d.factors {
                let t = f.lambda * f.sigma.abs().ln();
                match f.side {
                    Side::Numerator => c += t,
                    Side::Denominator => c -= t,
                }
            }
            return c;
        }
    }
    f64::INFINITY
}

fn bisect(d: &SumDescriptor, mut lo: f64, mut hi: f64, flo: f64) -> Result<f64> {
    let lo_neg = flo < 0.0;
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..200 {
        mid = 0.5 * (lo + hi);
        let fm = dphi(d, mid)?;
        if fm.abs() < ROOT_TOLERANCE || hi - lo <= 4.0 * f64::EPSILON * mid.abs().max(1.0) {
            break;
        }
        if (fm < 0.0) == lo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

fn scan_upper(d: &SumDescriptor) -> Result<f64> {
    if !d.is_infinite() {
        return Ok(d.r1);
    }
    let mut span = d.r0.max(1.0);
    for _ in 0..60 {
        let hi = d.r0 + span;
        let h = span / GRID_CELLS as f64;
        let vals: Vec<f64> = (0..4)
            .map(|i| ln_phi(d, hi - (3 - i) as f64 * h))
            .collect::<Result<_>>()?;
        if vals.windows(2).all(|w| w[1] < w[0]) && dphi(d, hi)? > 0.0 {
            return Ok(hi);
        }
        span *= 2.0;
    }
    Err(Error::DomainError("the phase does not decrease eventually".into()))
}

/// Locate the critical points of `Φ` without enforcing the hypotheses of the
/// asymptotic theorem.
pub fn scan_phase(d: &SumDescriptor) -> Result<MaximumReport> {
    require_positive_variable(d)?;
    if let Some((i, f)) = positivity_violations(d).first() {
        return Err(Error::DomainError(format!("factor {i} {f} is not positive on the range")));
    }
    let hi = scan_upper(d)?;
    let lo = d.r0;
    let h = (hi - lo) / GRID_CELLS as f64;
    let mut local_maxima = Vec::new();
    let mut local_minima = Vec::new();
    let mut prev: Option<(f64, f64)> = None;
    for i in 1..GRID_CELLS {
        let x = lo + h * i as f64;
        let f = dphi(d, x)?;
        if let Some((xp, fp)) = prev {
            if fp != 0.0 && (fp < 0.0) != (f < 0.0) || f == 0.0 {
                let root = if f == 0.0 { x } else { bisect(d, xp, x, fp)? };
                let p = phase(d, root)?;
                if fp < 0.0 {
                    local_maxima.push(InteriorMaximum {
                        x0: root,
                        phi2: p.d2phi,
                        u: p.u,
                        ln_phi: p.ln_phi,
                    });
                } else {
                    local_minima.push(root);
                }
            }
        }
        prev = Some((x, f));
    }

    let b0 = ln_phi(d, d.r0)?;
    let b1 = if d.is_infinite() {
        ln_phi_at_infinity(d)
    } else {
        ln_phi(d, d.r1)?
    };
    let interior = local_maxima.iter().map(|m| m.ln_phi).fold(f64::NEG_INFINITY, f64::max);
    let ln_phi_max = interior.max(b0).max(b1);
    let close = |v: f64| v >= ln_phi_max - 1e-12 * ln_phi_max.abs().max(1.0);
    let boundary_maximum = if close(b0) {
        Some(d.r0)
    } else if close(b1) {
        Some(d.r1)
    } else {
        None
    };
    let maxima = local_maxima.iter().copied().filter(|m| close(m.ln_phi)).collect();
    Ok(MaximumReport {
        phi_max: ln_phi_max.exp(),
        ln_phi_max,
        maxima,
        local_maxima,
        local_minima,
        boundary_values: (b0.exp(), b1.exp()),
        boundary_maximum,
    })
}

/// Like [`scan_phase`], but insists on nondegenerate interior maxima.
///
/// ```
/// use gausscf::dlm::{find_maxima, fixtures};
/// let r = find_maxima(&fixtures::g1(0.3, 0.7, 1.1, 0.25)).unwrap();
/// assert!((r.maxima[0].x0 - 1.0).abs() < 1e-10);
/// assert!((r.phi_max - 4.0).abs() < 1e-10);
/// ```
pub fn find_maxima(d: &SumDescriptor) -> Result<MaximumReport> {
    let r = scan_phase(d)?;
    if let Some(at) = r.boundary_maximum {
        return Err(Error::BoundaryMaximum { at, phi_max: r.phi_max });
    }
    if r.maxima.is_empty() {
        return Err(Error::BoundaryMaximum {
            at: d.r0,
            phi_max: r.phi_max,
        });
    }
    if let Some(m) = r.maxima.iter().find(|m| m.phi2 <= DEGENERACY_THRESHOLD) {
        return Err(Error::DegenerateMaximum { at: m.x0, second: m.phi2 });
    }
    Ok(r)
}

/// `g(n) ≈ C n^{γ+1/2} (n/e)^{νn} Φ_maxⁿ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticForm {
    pub constant: Complex64,
    pub algebraic_exponent: Complex64,
    pub stirling_exponent: f64,
    pub geometric_base: f64,
}

impl AsymptoticForm {
    pub fn evaluate(&self, n: u64) -> Scaled {
        let nf = n as f64;
        let ln = Complex64::new(
            self.stirling_exponent * nf * (nf.ln() - 1.0) + nf * self.geometric_base.ln(),
            0.0,
        ) + self.algebraic_exponent * nf.ln();
        Scaled::exp_complex(ln) * self.constant
    }
}

pub fn leading_asymptote(d: &SumDescriptor) -> Result<AsymptoticForm> {
    let r = find_maxima(d)?;
    let inv = invariants(d);
    let sum: Complex64 = r.maxima.iter().map(|m| m.u / m.phi2.sqrt()).sum();
    Ok(AsymptoticForm {
        constant: sum * (2.0 * PI).sqrt(),
        algebraic_exponent: inv.gamma + 0.5,
        stirling_exponent: inv.nu,
        geometric_base: r.phi_max,
    })
}

/// Shape `(n/e)^{νn} Ψⁿ (δ₀⁻¹ + δ₁⁻¹)` of an upper bound for `|g(n)|`.
/// For an infinite range only `δ₀` enters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailBoundShape {
    pub psi: f64,
    pub nu: f64,
    pub delta0: f64,
    pub delta1: Option<f64>,
}

impl TailBoundShape {
    pub fn evaluate(&self, n: u64) -> Scaled {
        let nf = n as f64;
        let stirling = if nf > 0.0 { self.nu * nf * (nf.ln() - 1.0) } else { 0.0 };
        let inv = 1.0 / self.delta0 + self.delta1.map_or(0.0, |d| 1.0 / d);
        Scaled::from_ln(stirling + nf * self.psi.ln(), 1.0) * inv
    }
}

pub fn tail_bound_shape(d: &SumDescriptor, psi: f64, n: u64) -> Result<TailBoundShape> {
    let r = scan_phase(d)?;
    if !(psi > r.phi_max * (1.0 + 1e-12)) {
        return Err(Error::PsiTooSmall { psi, phi_max: r.phi_max });
    }
    let (delta0, delta1) = deltas(d, n);
    Ok(TailBoundShape {
        psi,
        nu: invariants(d).nu,
        delta0,
        delta1,
    })
}

/// Direct summation in log-gamma space.
///
/// ```
/// use gausscf::dlm::{brute_force, fixtures};
/// use gausscf::special::gamma;
/// use gausscf::EvalContext;
/// let (a, b, c) = (0.3, 0.7, 1.1);
/// let g = brute_force(&fixtures::g2(a, b, c, 0.5), 1, &EvalContext::default()).unwrap();
/// let expect = gamma(1.0 + a) / (gamma(c) * gamma(1.0 + b));
/// assert!((g.re() / expect - 1.0).abs() < 1e-13);
/// ```
pub fn brute_force(d: &SumDescriptor, n: u64, ctx: &EvalContext) -> Result<Scaled> {
    let (lo, hi) = d.range(n);
    let mut sum = Scaled::ZERO;
    if let Some(hi) = hi {
        for k in lo..hi {
            sum = sum + d.term(k, n)?;
        }
        return Ok(sum);
    }
    let mut prev: Option<f64> = None;
    let mut quiet = 0;
    let mut q_max: f64 = 0.0;
    for k in lo..lo + ctx.max_terms as i64 {
        let t = d.term(k, n)?;
        sum = sum + t;
        let ln_t = t.ln_abs();
        match prev {
            Some(lp) if ln_t.is_finite() && lp.is_finite() => {
                let q = (ln_t - lp).exp();
                if q < 1.0 {
                    quiet += 1;
                    q_max = if quiet == 1 { q } else { q_max.max(q) };
                } else {
                    quiet = 0;
                }
            }
            _ => quiet = 0,
        }
        prev = Some(ln_t);
        if quiet >= 5 {
            let q = (1.1 * q_max).min(0.999_999);
            let tail = ln_t + (q / (1.0 - q)).ln();
            if tail < sum.ln_abs() + ctx.tail_tolerance.ln() {
                return Ok(sum);
            }
        }
    }
    Err(Error::NonConvergence { terms: ctx.max_terms })
}

/// `brute_force(n) / prediction(n) − 1`, the empirical correction to the leading term.
pub fn empirical_residual(d: &SumDescriptor, form: &AsymptoticForm, n: u64, ctx: &EvalContext) -> Result<Complex64> {
    Ok(brute_force(d, n, ctx)?.ratio(&form.evaluate(n)) - 1.0)
}

/// The worked families of sums and their closed-form asymptotics.
pub mod fixtures {
    use super::*;

    /// `Σ_{k≥0} Γ(k+n+a)Γ(k+n+b)/(Γ(k+1)Γ(k+c)) zᵏ`.
    pub fn g1(a: f64, b: f64, c: f64, z: f64) -> SumDescriptor {
        SumDescriptor::new(
            vec![
                GammaFactor::num(1.0, 1.0, a),
                GammaFactor::num(1.0, 1.0, b),
                GammaFactor::den(1.0, 0.0, 1.0),
                GammaFactor::den(1.0, 0.0, c),
            ],
            0.0,
            f64::INFINITY,
            z,
        )
        .expect("valid descriptor")
    }

    /// `Σ_{0≤k<n} Γ(k+n+a)/(Γ(k+1)Γ(k+c)Γ(n−k+b)) zᵏ`.
    pub fn g2(a: f64, b: f64, c: f64, z: f64) -> SumDescriptor {
        SumDescriptor::new(
            vec![
                GammaFactor::num(1.0, 1.0, a),
                GammaFactor::den(1.0, 0.0, 1.0),
                GammaFactor::den(1.0, 0.0, c),
                GammaFactor::den(-1.0, 1.0, b),
            ],
            0.0,
            1.0,
            z,
        )
        .expect("valid descriptor")
    }

    /// `Σ_{k≥n} Γ(2k+2n+a)Γ(2k−2n+b)/(Γ(2k+c)Γ(2k+d)) zᵏ`.
    pub fn g3(a: f64, b: f64, c: f64, d: f64, z: f64) -> SumDescriptor {
        SumDescriptor::new(
            vec![
                GammaFactor::num(2.0, 2.0, a),
                GammaFactor::num(2.0, -2.0, b),
                GammaFactor::den(2.0, 0.0, c),
                GammaFactor::den(2.0, 0.0, d),
            ],
            1.0,
            f64::INFINITY,
            z,
        )
        .expect("valid descriptor")
    }

    /// `Σ_{k≥0} Γ(k+n+a)Γ(k−n+b)/(Γ(k+1)Γ(k+c)) zᵏ`, meant for `z < 0`.
    pub fn g4(a: f64, b: f64, c: f64, z: f64) -> SumDescriptor {
        SumDescriptor::new(
            vec![
                GammaFactor::num(1.0, 1.0, a),
                GammaFactor::num(1.0, -1.0, b),
                GammaFactor::den(1.0, 0.0, 1.0),
                GammaFactor::den(1.0, 0.0, c),
            ],
            0.0,
            f64::INFINITY,
            z,
        )
        .expect("valid descriptor")
    }

    /// Maximiser of the phase of `g1`: `√z/(1−√z)`.
    pub fn g1_peak(z: f64) -> f64 {
        z.sqrt() / (1.0 - z.sqrt())
    }

    /// Maximiser of the phase of `g2`: `√(z/(1+z))`.
    pub fn g2_peak(z: f64) -> f64 {
        (z / (1.0 + z)).sqrt()
    }

    /// `√π z^{−(c−1/2)/2} (n/e)^{2n} (1−√z)^{c−a−b−2n} / n^{c−a−b+1/2}`.
    pub fn g1_asymptote(a: f64, b: f64, c: f64, z: f64, n: u64) -> Scaled {
        let nf = n as f64;
        let s = z.sqrt();
        let e = c - a - b;
        Scaled::from_ln(
            0.5 * PI.ln() - (c - 0.5) * s.ln() + 2.0 * nf * (nf.ln() - 1.0) + (e - 2.0 * nf) * (1.0 - s).ln()
                - (e + 0.5) * nf.ln(),
            1.0,
        )
    }

    /// `(z+1)^{(b+c−a−3/2)/2} / (2√π z^{(c−1/2)/2}) · (√z+√(z+1))^{2n+a+b−1} / n^{b+c−a−1/2}`.
    pub fn g2_asymptote(a: f64, b: f64, c: f64, z: f64, n: u64) -> Scaled {
        let nf = n as f64;
        let e = b + c - a;
        Scaled::from_ln(
            (e - 1.5) * 0.5 * (z + 1.0).ln() - (2.0 * PI.sqrt()).ln() - (c - 0.5) * 0.5 * z.ln()
                + (2.0 * nf + a + b - 1.0) * (z.sqrt() + (z + 1.0).sqrt()).ln()
                - (e - 0.5) * nf.ln(),
            1.0,
        )
    }

    /// `√π (−1)ⁿ/sin πb · (2√(1−z))^{c−a−b−1/2} / √(−z)^{c−1/2} · (√−z+√(1−z))^{2n+a−b} / (2n)^{c−a−b+1/2}`
    /// for `z < 0`.
    pub fn g4_asymptote(a: f64, b: f64, c: f64, z: f64, n: u64) -> Scaled {
        let nf = n as f64;
        let e = c - a - b;
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let sb = crate::special::sin_pi(b);
        Scaled::from_ln(
            0.5 * PI.ln() + (e - 0.5) * (2.0 * (1.0 - z).sqrt()).ln() - (c - 0.5) * 0.5 * (-z).ln()
                + (2.0 * nf + a - b) * ((-z).sqrt() + (1.0 - z).sqrt()).ln()
                - (e + 0.5) * (2.0 * nf).ln(),
            1.0,
        ) * (sign / sb)
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use approx::assert_relative_eq;

    fn ctx() -> EvalContext {
        EvalContext::default()
    }

    #[test]
    fn invariants_of_fixtures() {
        let i1 = invariants(&g1(0.3, 0.7, 1.1, 0.5));
        assert_relative_eq!(i1.rho, 0.5, max_relative = 1e-15);
        assert_eq!(i1.nu, 2.0);
        assert_relative_eq!(i1.gamma.re, 0.3 + 0.7 - 1.1 - 1.0, max_relative = 1e-14);
        let i2 = invariants(&g2(0.3, 0.7, 1.1, 0.5));
        assert_eq!(i2.nu, 0.0);
        assert_relative_eq!(i2.gamma.re, 0.3 - 0.7 - 1.1, max_relative = 1e-14);
        let i3 = invariants(&g3(0.3, 0.7, 1.1, 1.3, 0.04));
        assert_relative_eq!(i3.rho, 0.04, max_relative = 1e-14);
        assert_eq!(i3.nu, 0.0);
        assert_relative_eq!(i3.gamma.re, 0.3 + 0.7 - 1.1 - 1.3, max_relative = 1e-14);
    }

    #[test]
    fn validation_items() {
        let r = validate(&g1(0.3, 0.7, 1.1, 0.5));
        assert!(r.passed());
        assert_eq!(r.convergence, Some(ConvergenceCase::Geometric));
        let r3 = validate(&g3(0.3, 0.5, 1.1, 1.3, 0.04));
        assert_relative_eq!(r3.delta0, 0.5);
        let r4 = validate(&g4(0.3, 0.7, 1.1, -0.5));
        assert!(!r4.get(Check::Positivity).passed);
        assert!(r4.get(Check::Positivity).detail.contains("factor 1"));
        assert!(!r4.get(Check::PositiveVariable).passed);
        let r5 = validate(&g1(0.3, 0.7, 1.1, 1.5));
        assert!(!r5.get(Check::Convergence).passed);
    }

    #[test]
    fn lattice_distances() {
        assert_relative_eq!(lattice_distance(Complex64::new(0.5, 0.0), 1.0, 0), 0.5);
        assert_relative_eq!(lattice_distance(Complex64::new(-2.25, 0.0), 1.0, 0), 0.25);
        assert_relative_eq!(lattice_distance(Complex64::new(-0.5, 0.0), 2.0, 1), 1.5);
        assert_relative_eq!(lattice_distance(Complex64::new(-2.0, 0.0), 2.0, 1), 0.0);
        assert_relative_eq!(lattice_distance(Complex64::new(-1.0, 3.0), 1.0, 0), 3.0);
        let shifted = SumDescriptor::new(vec![GammaFactor::num(1.0, -0.5, 0.2)], 0.5, f64::INFINITY, 0.5).unwrap();
        // at n = 3 the lower endpoint 1.5 rounds up by one half
        assert_relative_eq!(deltas(&shifted, 3).0, 0.7, max_relative = 1e-12);
        assert_relative_eq!(deltas(&shifted, 2).0, 0.2, max_relative = 1e-12);
    }

    #[test]
    fn phase_examples() {
        assert_relative_eq!(phase(&g1(0.3, 0.7, 1.1, 0.25), 1.0).unwrap().phi, 4.0, max_relative = 1e-13);
        let p = phase(&g2(0.3, 0.7, 1.1, 1.0 / 3.0), 0.5).unwrap();
        assert_relative_eq!(p.phi, 3.0, max_relative = 1e-13);
        assert_relative_eq!(p.d2phi, 2.0 * 3f64.sqrt() * (4.0f64 / 3.0).powf(1.5), max_relative = 1e-13);
        assert!(matches!(phase(&g2(0.3, 0.7, 1.1, 0.5), 1.5), Err(Error::DomainError(_))));
    }

    #[test]
    fn maxima_examples() {
        let r = find_maxima(&g2(0.3, 0.7, 1.1, 1.0 / 3.0)).unwrap();
        assert_eq!(r.maxima.len(), 1);
        assert_relative_eq!(r.maxima[0].x0, 0.5, max_relative = 1e-10);
        match find_maxima(&g3(0.3, 0.7, 1.1, 1.3, 0.04)) {
            Err(Error::BoundaryMaximum { at, phi_max }) => {
                assert_eq!(at, 1.0);
                assert_relative_eq!(phi_max, 0.64, max_relative = 1e-12);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn tail_shapes() {
        let d3 = g3(0.3, 0.5, 1.1, 1.3, 0.04);
        let s = tail_bound_shape(&d3, 0.8, 10).unwrap();
        assert_relative_eq!(s.evaluate(10).re(), 0.8f64.powi(10) / 0.5, max_relative = 1e-12);
        assert!(matches!(tail_bound_shape(&d3, 0.64, 10), Err(Error::PsiTooSmall { .. })));
        let s1 = tail_bound_shape(&g1(0.3, 0.7, 1.1, 0.25), 5.0, 4).unwrap();
        assert_eq!((s1.delta0, s1.delta1), (1.0, None));
        assert!(matches!(tail_bound_shape(&g1(0.3, 0.7, 1.1, 0.25), 2.0, 4), Err(Error::PsiTooSmall { .. })));
    }

    #[test]
    fn g1_constant_matches_closed_form() {
        let (a, b, c, z) = (0.3, 0.7, 1.1, 0.5);
        let f = leading_asymptote(&g1(a, b, c, z)).unwrap();
        for n in [10, 100] {
            assert!(f.evaluate(n).rel_diff(&g1_asymptote(a, b, c, z, n)) < 1e-9);
        }
        let f2 = leading_asymptote(&g2(a, b, c, z)).unwrap();
        assert!(f2.evaluate(50).rel_diff(&g2_asymptote(a, b, c, z, 50)) < 1e-9);
    }

    #[test]
    fn g1_brute_force_band() {
        let (a, b, c, z) = (0.3, 0.7, 1.1, 0.5);
        let d = g1(a, b, c, z);
        let f = leading_asymptote(&d).unwrap();
        let r = empirical_residual(&d, &f, 30, &ctx()).unwrap();
        assert!(r.norm() < 0.35, "{r}");
    }

    #[test]
    fn json_round_trip() {
        let d = g3(0.3, 0.7, 1.1, 1.3, 0.04);
        let s = d.to_json();
        assert!(s.contains("\"inf\""));
        assert_eq!(SumDescriptor::from_json(&s).unwrap(), d);
        let bad = r#"{"factors":[{"sigma":0,"lambda":1,"alpha_re":1,"side":"numerator"}],"r0":0,"r1":1,"z":1}"#;
        assert!(SumDescriptor::from_json(bad).is_err());
        let rev = r#"{"factors":[],"r0":1,"r1":0.5,"z":1}"#;
        assert!(SumDescriptor::from_json(rev).is_err());
    }

    #[test]
    fn denominators_at_poles_vanish() {
        // 1/Γ(k − 2) is zero for k ≤ 2
        let d = SumDescriptor::new(vec![GammaFactor::den(1.0, 0.0, -2.0)], 0.0, 4.0, 1.0).unwrap();
        let s = brute_force(&d, 1, &ctx()).unwrap();
        assert_relative_eq!(s.re(), 1.0, max_relative = 1e-14);
    }
}
