//! Batch command-line interface: error tables for the continued fraction
//! and Laplace-method reports for gamma-product sums.
//!
//! Exit codes: 0 success, 2 bad input, 3 mathematical degeneracy.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::asym::{dilation, dominant_base_is_unit, ErrorAsymptote};
use crate::cf::{truncation_error_actual, truncation_error_star};
use crate::decompose::{decompose, even_odd_split};
use crate::dlm::{
    self, brute_force, fixtures, invariants, leading_asymptote, scan_phase, tail_bound_shape, validate, AsymptoticForm,
    DlmInvariants, MaximumReport, SumDescriptor, TailBoundShape, ValidationReport,
};
use crate::error::Error;
use crate::hyp2f1::EvalContext;
use crate::params::ParamTriple;
use crate::scaled::Scaled;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

/// Digits printed for large-range values.
const SHOWN_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "gausscf", version, about = "Truncation errors of Gauss's continued fraction and discrete Laplace asymptotics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Decimal digits carried by the high-precision reference values.
    #[arg(long, global = true, default_value_t = 30)]
    pub precision_digits: u32,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Relative tail tolerance for series and direct sums.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tolerance: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Actual truncation errors next to their asymptotic prediction.
    ErrorTable(ErrorTableArgs),
    /// Laplace-method analysis of a sum read from a JSON descriptor.
    Dlm(DlmArgs),
    /// The same analysis for one of the built-in families g1..g4.
    Fixture(FixtureArgs),
}

#[derive(Debug, Args)]
pub struct ErrorTableArgs {
    #[arg(long, allow_negative_numbers = true, default_value_t = 0.0)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub z: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
    /// Use the fraction for F(1, b; c; z) (ignores --a).
    #[arg(long)]
    pub star: bool,
}

#[derive(Debug, Args)]
pub struct DlmArgs {
    pub descriptor: PathBuf,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
    /// Ψ for the tail-bound shape; defaults to 1.01 Φ_max.
    #[arg(long)]
    pub psi: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FixtureName {
    G1,
    G2,
    G3,
    G4,
}

#[derive(Debug, Args)]
pub struct FixtureArgs {
    #[arg(value_enum)]
    pub name: FixtureName,
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub b: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub c: f64,
    /// Fourth parameter, used by g3 only.
    #[arg(long, allow_negative_numbers = true, default_value_t = 1.0)]
    pub d: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub z: f64,
    #[arg(long, value_delimiter = ',', required = true)]
    pub n: Vec<u64>,
    #[arg(long)]
    pub psi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub n: u64,
    pub actual: String,
    pub prediction: String,
    pub ratio: f64,
    /// `|ratio − 1| √n`.
    pub scaled_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorTable {
    pub a: Option<f64>,
    pub b: f64,
    pub c: f64,
    pub z: f64,
    pub w: f64,
    pub rows: Vec<ErrorRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DlmRow {
    pub n: u64,
    pub direct: String,
    pub prediction: Option<String>,
    pub ratio: Option<f64>,
    /// Closed-form asymptotic of a built-in family, when one applies.
    pub closed_form: Option<String>,
    pub closed_form_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub validation: ValidationReport,
    pub invariants: DlmInvariants,
    pub maxima: Option<MaximumReport>,
    pub asymptote: Option<AsymptoticForm>,
    /// Why no asymptotic form is given.
    pub issue: Option<String>,
    pub tail_shape: Option<TailBoundShape>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub interval: usize,
    pub r0: f64,
    /// `None` for an infinite range.
    pub r1: Option<f64>,
    pub z: f64,
    pub prefactor: (f64, f64),
    pub sign_exponent: i64,
    /// Analysis of the component itself, or of its even and odd parts
    /// when its variable is negative.
    pub parts: Vec<Analysis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DlmReport {
    pub descriptor: SumDescriptor,
    pub analysis: Analysis,
    pub breakpoints: Option<Vec<f64>>,
    pub components: Vec<ComponentReport>,
    pub rows: Vec<DlmRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Report {
    ErrorTable(ErrorTable),
    Dlm(DlmReport),
}

/// Map an error to an exit code.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Inadmissible(_)
        | Error::PoleAtParameter(_)
        | Error::DomainError(_)
        | Error::InvalidDescriptor(_)
        | Error::OutOfRegime(_) => EXIT_INPUT,
        Error::NonConvergence { .. }
        | Error::ZeroDenominator { .. }
        | Error::ZeroTarget { .. }
        | Error::BoundaryMaximum { .. }
        | Error::DegenerateMaximum { .. }
        | Error::PsiTooSmall { .. }
        | Error::NonGenericParameter(_) => EXIT_DEGENERATE,
    }
}

fn context(cli: &Cli) -> Result<EvalContext, Error> {
    let max_terms = EvalContext::default().max_terms;
    EvalContext::new(cli.precision_digits, cli.tolerance, max_terms)
}

pub fn error_table(args: &ErrorTableArgs, ctx: &EvalContext) -> Result<ErrorTable, Error> {
    let mut ns = args.n.clone();
    ns.sort_unstable();
    ns.dedup();
    let t = ParamTriple::new(args.a, args.b, args.c);
    let asym = if args.star {
        ErrorAsymptote::star(args.b, args.c, args.z)
    } else {
        ErrorAsymptote::new(&t, args.z, ctx)
    };
    let asym = asym.map_err(|e| match e {
        Error::PoleAtParameter(m) => Error::Inadmissible(m),
        other => other,
    })?;
    let mut rows = Vec::new();
    for &n in &ns {
        let actual = if args.star {
            truncation_error_star(args.b, args.c, args.z, n as usize, ctx)?
        } else {
            truncation_error_actual(&t, args.z, n as usize, ctx)?
        };
        let actual = actual.error.to_scaled();
        let prediction = asym.at(n);
        let ratio = if prediction.is_zero() && actual.is_zero() {
            1.0
        } else {
            actual.ratio(&prediction).re
        };
        rows.push(ErrorRow {
            n,
            actual: actual.to_scientific(SHOWN_DIGITS),
            prediction: prediction.to_scientific(SHOWN_DIGITS),
            ratio,
            scaled_deviation: (ratio - 1.0).abs() * (n as f64).sqrt(),
        });
    }
    Ok(ErrorTable {
        a: (!args.star).then_some(args.a),
        b: args.b,
        c: args.c,
        z: args.z,
        w: dilation(args.z),
        rows,
    })
}

fn analyse(d: &SumDescriptor, psi: Option<f64>, n_hint: u64) -> Analysis {
    let validation = validate(d);
    let inv = invariants(d);
    let mut out = Analysis {
        validation,
        invariants: inv,
        maxima: None,
        asymptote: None,
        issue: None,
        tail_shape: None,
    };
    if d.z <= 0.0 {
        out.issue = Some("negative variable".into());
        return out;
    }
    match scan_phase(d) {
        Ok(r) => {
            let phi_max = r.phi_max;
            out.maxima = Some(r);
            match leading_asymptote(d) {
                Ok(f) => out.asymptote = Some(f),
                Err(e) => out.issue = Some(e.to_string()),
            }
            if phi_max.is_finite() {
                out.tail_shape = tail_bound_shape(d, psi.unwrap_or(1.01 * phi_max), n_hint).ok();
            }
        }
        Err(e) => out.issue = Some(e.to_string()),
    }
    out
}

fn component_prediction(report: &ComponentReport, n: u64) -> Option<Scaled> {
    let f = report.parts.first()?.asymptote?;
    if report.parts.len() != 1 {
        return None;
    }
    let sign = if (report.sign_exponent * n as i64).rem_euclid(2) == 1 { -1.0 } else { 1.0 };
    let pre = num_complex::Complex64::new(report.prefactor.0, report.prefactor.1) * sign;
    Some(f.evaluate(n) * pre)
}

fn closed_form(fixture: Option<(FixtureName, [f64; 5])>, n: u64) -> Option<Scaled> {
    let (name, [a, b, c, _, z]) = fixture?;
    match name {
        FixtureName::G1 => Some(fixtures::g1_asymptote(a, b, c, z, n)),
        FixtureName::G2 => Some(fixtures::g2_asymptote(a, b, c, z, n)),
        FixtureName::G4 if z < 0.0 => Some(fixtures::g4_asymptote(a, b, c, z, n)),
        _ => None,
    }
}

pub fn dlm_report(
    d: &SumDescriptor,
    ns: &[u64],
    psi: Option<f64>,
    fixture: Option<(FixtureName, [f64; 5])>,
    ctx: &EvalContext,
) -> Result<DlmReport, Error> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let n_hint = ns.last().copied().unwrap_or(1);
    let analysis = analyse(d, psi, n_hint);
    let needs_split = !analysis.validation.get(dlm::Check::Positivity).passed || d.z < 0.0;
    let mut breakpoints = None;
    let mut components = Vec::new();
    let mut decomposition = None;
    if needs_split {
        let dec = decompose(d)?;
        breakpoints = Some(dec.breakpoints.clone());
        for comp in &dec.components {
            let parts = if comp.z() < 0.0 {
                match even_odd_split(&comp.descriptor, n_hint % 2) {
                    Ok(s) => vec![
                        analyse(&s.even.descriptor, psi, n_hint / 2),
                        analyse(&s.odd.descriptor, psi, n_hint / 2),
                    ],
                    Err(_) => vec![analyse(&comp.descriptor, psi, n_hint)],
                }
            } else {
                vec![analyse(&comp.descriptor, psi, n_hint)]
            };
            components.push(ComponentReport {
                interval: comp.interval,
                r0: comp.descriptor.r0,
                r1: comp.descriptor.r1.is_finite().then_some(comp.descriptor.r1),
                z: comp.z(),
                prefactor: (comp.prefactor.re, comp.prefactor.im),
                sign_exponent: comp.sign_exponent,
                parts,
            });
        }
        decomposition = Some(dec);
    }

    let mut rows = Vec::new();
    for &n in &ns {
        let direct = match &decomposition {
            Some(dec) if !analysis.validation.get(dlm::Check::Positivity).passed => dec.evaluate(n, ctx)?,
            _ => brute_force(d, n, ctx)?,
        };
        let prediction = if decomposition.is_some() {
            components.iter().filter_map(|c| component_prediction(c, n)).reduce(|x, y| x + y)
        } else {
            analysis.asymptote.map(|f| f.evaluate(n))
        };
        let closed = closed_form(fixture, n);
        rows.push(DlmRow {
            n,
            direct: direct.to_scientific(SHOWN_DIGITS),
            ratio: prediction.map(|p| direct.ratio(&p).re),
            prediction: prediction.map(|p| p.to_scientific(SHOWN_DIGITS)),
            closed_form_ratio: closed.map(|p| direct.ratio(&p).re),
            closed_form: closed.map(|p| p.to_scientific(SHOWN_DIGITS)),
        });
    }
    Ok(DlmReport {
        descriptor: d.clone(),
        analysis,
        breakpoints,
        components,
        rows,
    })
}

fn fixture_descriptor(args: &FixtureArgs) -> SumDescriptor {
    let (a, b, c, d, z) = (args.a, args.b, args.c, args.d, args.z);
    match args.name {
        FixtureName::G1 => fixtures::g1(a, b, c, z),
        FixtureName::G2 => fixtures::g2(a, b, c, z),
        FixtureName::G3 => fixtures::g3(a, b, c, d, z),
        FixtureName::G4 => fixtures::g4(a, b, c, z),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| format!("{v:e}"))
}

fn write_analysis(out: &mut dyn Write, prefix: &str, a: &Analysis) -> std::io::Result<()> {
    let inv = &a.invariants;
    writeln!(out, "# {prefix}rho={} nu={} gamma={}", inv.rho, inv.nu, inv.gamma)?;
    for item in &a.validation.items {
        let verdict = if item.passed { "pass" } else { "FAIL" };
        writeln!(out, "# {prefix}check {:?}: {verdict} ({})", item.check, item.detail)?;
    }
    if let Some(m) = &a.maxima {
        writeln!(out, "# {prefix}phi_max={}", m.phi_max)?;
        for x in &m.maxima {
            writeln!(out, "# {prefix}maximum x0={} phi2={} u={}", x.x0, x.phi2, x.u)?;
        }
    }
    if let Some(f) = &a.asymptote {
        writeln!(
            out,
            "# {prefix}asymptote C={} exponent={} nu={} base={}",
            f.constant, f.algebraic_exponent, f.stirling_exponent, f.geometric_base
        )?;
    }
    if let Some(issue) = &a.issue {
        writeln!(out, "# {prefix}issue: {issue}")?;
    }
    if let Some(s) = &a.tail_shape {
        writeln!(out, "# {prefix}tail shape psi={} nu={} delta0={} delta1={}", s.psi, s.nu, s.delta0, opt(s.delta1))?;
    }
    Ok(())
}

pub fn write_report(out: &mut dyn Write, report: &Report, format: Format) -> std::io::Result<()> {
    if format == Format::Json {
        return writeln!(out, "{}", serde_json::to_string_pretty(report).expect("reports serialize"));
    }
    match report {
        Report::ErrorTable(t) => {
            writeln!(out, "n,actual,prediction,ratio,scaled_deviation")?;
            for r in &t.rows {
                writeln!(out, "{},{},{},{},{}", r.n, r.actual, r.prediction, r.ratio, r.scaled_deviation)?;
            }
        }
        Report::Dlm(d) => {
            write_analysis(out, "", &d.analysis)?;
            if let Some(b) = &d.breakpoints {
                writeln!(out, "# breakpoints={b:?}")?;
            }
            for c in &d.components {
                writeln!(
                    out,
                    "# component {} on [{}, {}) z={} prefactor={}{:+}i sign_exponent={}",
                    c.interval,
                    c.r0,
                    c.r1.map_or("inf".to_string(), |r| r.to_string()),
                    c.z, c.prefactor.0, c.prefactor.1, c.sign_exponent
                )?;
                for (i, p) in c.parts.iter().enumerate() {
                    write_analysis(out, &format!("component {} part {i}: ", c.interval), p)?;
                }
            }
            writeln!(out, "n,direct,prediction,ratio,closed_form,closed_form_ratio")?;
            for r in &d.rows {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    r.n,
                    r.direct,
                    r.prediction.clone().unwrap_or_default(),
                    r.ratio.map_or(String::new(), |v| v.to_string()),
                    r.closed_form.clone().unwrap_or_default(),
                    r.closed_form_ratio.map_or(String::new(), |v| v.to_string()),
                )?;
            }
        }
    }
    Ok(())
}

pub fn execute(cli: &Cli) -> Result<Report, Error> {
    let ctx = context(cli)?;
    match &cli.command {
        Command::ErrorTable(args) => Ok(Report::ErrorTable(error_table(args, &ctx)?)),
        Command::Dlm(args) => {
            let text = std::fs::read_to_string(&args.descriptor)
                .map_err(|e| Error::InvalidDescriptor(format!("{}: {e}", args.descriptor.display())))?;
            let d = SumDescriptor::from_json(&text)?;
            Ok(Report::Dlm(dlm_report(&d, &args.n, args.psi, None, &ctx)?))
        }
        Command::Fixture(args) => {
            let d = fixture_descriptor(args);
            let data = Some((args.name, [args.a, args.b, args.c, args.d, args.z]));
            Ok(Report::Dlm(dlm_report(&d, &args.n, args.psi, data, &ctx)?))
        }
    }
}

/// Parse `args`, run, and write to `out`/`err`. Returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    if let Command::ErrorTable(a) = &cli.command {
        if dominant_base_is_unit(a.z) {
            let _ = writeln!(
                err,
                "note: at z = {} the dominant solution's geometric base has modulus 1; \
                 the prediction is still valid but its ratio to the dominant form is only algebraic",
                a.z
            );
        }
    }
    match execute(&cli) {
        Ok(report) => match write_report(out, &report, cli.format) {
            Ok(()) => EXIT_OK,
            Err(e) => {
                let _ = writeln!(err, "error: {e}");
                EXIT_INPUT
            }
        },
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("gausscf").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn error_table_rows() {
        let (code, out, _) = call(&["error-table", "--a", "0.5", "--b", "1.5", "--c", "2.25", "--z", "0.5", "--n", "16,64,256"]);
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 4);
        for l in &lines[1..] {
            let ratio: f64 = l.split(',').nth(3).unwrap().parse().unwrap();
            assert!((ratio - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn zero_variable_gives_zero_errors() {
        let (code, out, _) = call(&["error-table", "--a", "0.5", "--b", "1.5", "--c", "2.25", "--z", "0", "--n", "3,5"]);
        assert_eq!(code, 0);
        for l in out.lines().skip(1) {
            assert_eq!(l.split(',').nth(1), Some("0"));
        }
    }

    #[test]
    fn inadmissible_exit_code() {
        let (code, _, err) = call(&["error-table", "--a", "2.5", "--b", "0.5", "--c", "1.5", "--z", "0.5", "--n", "4"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("c - a") || err.contains("c − a"), "{err}");
    }

    #[test]
    fn zero_target_exit_code() {
        // F(−1.5, 1; 0.5; z) vanishes near z = 0.3883467
        let (code, _, err) = call(&["error-table", "--a", "-1.5", "--b", "1", "--c", "0.5", "--z", "0.38834671891278", "--n", "4"]);
        assert_eq!(code, EXIT_DEGENERATE, "{err}");
    }

    #[test]
    fn unit_base_is_noted() {
        let (code, _, err) = call(&["error-table", "--a", "0.5", "--b", "1.5", "--c", "2.25", "--z", "-3", "--n", "8"]);
        assert_eq!(code, 0);
        assert!(err.contains("modulus 1"), "{err}");
    }

    #[test]
    fn fixture_reports() {
        let (code, out, _) = call(&["fixture", "g3", "--a", "0.3", "--b", "0.5", "--c", "1.1", "--d", "1.3", "--z", "0.04", "--n", "8"]);
        assert_eq!(code, 0);
        assert!(out.contains("boundary"), "{out}");
        assert!(out.contains("tail shape"));
        let (code, out, _) = call(&["--format", "json", "fixture", "g4", "--a", "0.3", "--b", "0.7", "--c", "1.1", "--z", "-0.5", "--n", "20"]);
        assert_eq!(code, 0);
        let rep: Report = serde_json::from_str(&out).unwrap();
        match rep {
            Report::Dlm(d) => {
                assert_eq!(d.breakpoints, Some(vec![1.0]));
                assert!(d.rows[0].closed_form_ratio.is_some());
            }
            _ => panic!(),
        }
    }
}
