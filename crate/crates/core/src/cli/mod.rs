//! Command-line front end.
//!
//! Stdout carries the payload, stderr carries diagnostics and timing. Exit
//! codes: 0 success, 1 a verification check failed, 2 invalid invocation,
//! 3 quadratic form not positive definite, 4 too many Fock states.

pub mod config;
pub mod svg;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::chain::{
    self, enumerate_levels_with, max_coupling, mode_frequencies, rescale_levels,
    single_phonon_levels, spacing_profile, ChainSpec, CouplingBound, InteractionKind, Path,
};
use crate::error::Error;
use crate::jacobi::{
    analytic_decomposition, build_jacobi, decomposition_residuals, eigenvalue_deviation,
    eigenvector_deviation, numeric_decomposition, JacobiFamily, SymTridiagonal,
};
use config::Config;

#[derive(Debug, Parser)]
#[command(name = "chain-spectra", version, about = "Spectra of coupled harmonic oscillator chains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Mode frequencies, ground energy and single-phonon levels.
    Spectrum(SpectrumArgs),
    /// Check the closed-form decomposition of a Jacobi matrix against the numeric one.
    Verify(VerifyArgs),
    /// Largest coupling that keeps the chain positive definite.
    Bound(BoundArgs),
    /// Single-phonon level diagram, one column per panel.
    Plot(PlotArgs),
    /// All Fock levels up to a number of quanta.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Constant,
    Krawtchouk,
    Hahn,
    Qkrawtchouk,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
    Svg,
}

#[derive(Debug, Clone, Args)]
pub struct ChainArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Hahn parameter (alpha = beta).
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Base of the dual q-Krawtchouk chain.
    #[arg(long)]
    pub q: Option<f64>,
    /// Custom couplings gamma_1..gamma_(n-1), comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub gamma: Option<Vec<f64>>,
    /// Number of oscillators.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Coupling strength.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    /// Matrix size (number of oscillators).
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Defaults to alpha.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    pub cbar: f64,
    /// Add this amount to the first diagonal entry before checking (negative control).
    #[arg(long, allow_negative_numbers = true)]
    pub perturb: Option<f64>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub gamma: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// `family[:key=value,...]` with keys c, alpha, q, gamma (values joined by '/').
    #[arg(long = "panel", required = true)]
    pub panels: Vec<String>,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 1.0)]
    pub mass: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hbar: f64,
    /// SVG destination; without it the SVG goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Format of the panel report printed when `--out` is given.
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub chain: ChainArgs,
    /// Maximum total number of quanta.
    #[arg(long)]
    pub levels: usize,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: OutputFormat,
    /// Write to this file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NotPositiveDefinite { .. } => 3,
            Error::CombinatorialLimit { .. } => 4,
            Error::NoConvergence { .. } | Error::NonTerminating | Error::DenominatorPole { .. } => 1,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

struct Output {
    payload: String,
    code: i32,
    /// Extra diagnostics for stderr.
    note: Option<String>,
}

impl Output {
    fn ok(payload: String) -> Self {
        Output { payload, code: 0, note: None }
    }
}

type CmdResult = Result<Output, Failure>;

/// Six significant digits for human-readable output.
pub fn sig6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.5e}");
    if (1e-4..1e6).contains(&x.abs()) {
        return format!("{}", sci.parse::<f64>().unwrap_or(x));
    }
    let (mantissa, exp) = sci.split_once('e').unwrap_or((&sci, "0"));
    let mantissa = mantissa.trim_end_matches('0').trim_end_matches('.');
    format!("{mantissa}e{exp}")
}

fn json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|mut s| {
            s.push('\n');
            s
        })
        .map_err(|e| Failure { code: 1, message: format!("serialization failed: {e}") })
}

fn reject_svg(format: OutputFormat) -> Result<(), Failure> {
    if format == OutputFormat::Svg {
        return Err(Failure::usage("--format svg is only available for plot"));
    }
    Ok(())
}

fn interaction(
    family: FamilyArg,
    alpha: Option<f64>,
    q: Option<f64>,
    gamma: Option<&[f64]>,
) -> Result<InteractionKind, Failure> {
    Ok(match family {
        FamilyArg::Constant => InteractionKind::Constant,
        FamilyArg::Krawtchouk => InteractionKind::Krawtchouk,
        FamilyArg::Hahn => InteractionKind::Hahn {
            alpha: alpha.ok_or_else(|| Failure::usage("--alpha is required for the hahn family"))?,
        },
        FamilyArg::Qkrawtchouk => InteractionKind::DualQKrawtchouk {
            q: q.ok_or_else(|| Failure::usage("--q is required for the qkrawtchouk family"))?,
        },
        FamilyArg::Custom => InteractionKind::Custom {
            gamma: gamma
                .ok_or_else(|| Failure::usage("--gamma is required for the custom family"))?
                .to_vec(),
        },
    })
}

impl ChainArgs {
    fn spec(&self) -> Result<ChainSpec, Failure> {
        let kind = interaction(self.family, self.alpha, self.q, self.gamma.as_deref())?;
        Ok(ChainSpec::new(self.n, self.mass, self.omega, self.c, self.hbar, kind)?)
    }
}

#[derive(Serialize)]
struct SpectrumPayload<'a> {
    spec: &'a ChainSpec,
    omegas_closed: Option<Vec<f64>>,
    omegas_numeric: Vec<f64>,
    ground_energy: f64,
    single_phonon_levels: Vec<f64>,
    residual_closed_vs_numeric: Option<f64>,
}

fn cmd_spectrum(args: &SpectrumArgs) -> CmdResult {
    reject_svg(args.format)?;
    let spec = args.chain.spec()?;
    let closed = match spec.interaction {
        InteractionKind::Custom { .. } => None,
        _ => Some(mode_frequencies(&spec, Path::ClosedForm)?),
    };
    let numeric = mode_frequencies(&spec, Path::Numeric)?;
    let preferred = closed.as_ref().unwrap_or(&numeric);
    let ground_energy = 0.5 * spec.hbar * preferred.omegas.iter().sum::<f64>();
    let levels = single_phonon_levels(&spec)?;
    let residual = closed.as_ref().map(|c| {
        c.omegas
            .iter()
            .zip(&numeric.omegas)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    });
    let payload = SpectrumPayload {
        spec: &spec,
        omegas_closed: closed.as_ref().map(|c| c.omegas.clone()),
        omegas_numeric: numeric.omegas.clone(),
        ground_energy,
        single_phonon_levels: levels,
        residual_closed_vs_numeric: residual,
    };
    let text = match args.format {
        OutputFormat::Json => json(&payload)?,
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut rows = vec![vec![
                "mode".to_string(),
                "family_index".to_string(),
                "omega_closed".to_string(),
                "omega_numeric".to_string(),
                "single_phonon_level".to_string(),
            ]];
            for j in 0..spec.n {
                rows.push(vec![
                    (j + 1).to_string(),
                    preferred.family_index[j].to_string(),
                    closed.as_ref().map_or(String::new(), |c| c.omegas[j].to_string()),
                    numeric.omegas[j].to_string(),
                    payload.single_phonon_levels[j].to_string(),
                ]);
            }
            for row in rows {
                w.write_record(&row).map_err(csv_failure)?;
            }
            csv_string(w)?
        }
        _ => {
            let mut s = String::new();
            let _ = writeln!(s, "family: {}  n: {}  omega: {}  c: {}  hbar: {}  mass: {}",
                spec.interaction.name(), spec.n, sig6(spec.omega), sig6(spec.coupling),
                sig6(spec.hbar), sig6(spec.mass));
            let _ = writeln!(s, "{:>5} {:>6} {:>14} {:>14} {:>14}", "mode", "index", "omega_closed", "omega_numeric", "level");
            for j in 0..spec.n {
                let _ = writeln!(
                    s,
                    "{:>5} {:>6} {:>14} {:>14} {:>14}",
                    j + 1,
                    preferred.family_index[j],
                    closed.as_ref().map_or("-".to_string(), |c| sig6(c.omegas[j])),
                    sig6(numeric.omegas[j]),
                    sig6(payload.single_phonon_levels[j])
                );
            }
            let _ = writeln!(s, "ground_energy: {}", sig6(ground_energy));
            if let Some(r) = residual {
                let _ = writeln!(s, "residual_closed_vs_numeric: {}", sig6(r));
            }
            s
        }
    };
    Ok(Output::ok(text))
}

fn csv_failure(e: csv::Error) -> Failure {
    Failure { code: 1, message: format!("csv output failed: {e}") }
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String, Failure> {
    let bytes = w
        .into_inner()
        .map_err(|e| Failure { code: 1, message: format!("csv output failed: {e}") })?;
    String::from_utf8(bytes).map_err(|e| Failure { code: 1, message: e.to_string() })
}

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub limit: f64,
    pub pass: bool,
}

#[derive(Serialize)]
struct VerifyPayload {
    family: &'static str,
    n: usize,
    perturb: Option<f64>,
    eigenvalues: Vec<f64>,
    checks: Vec<Check>,
    passed: bool,
}

fn verify_family(args: &VerifyArgs) -> Result<JacobiFamily, Failure> {
    if args.n < 2 {
        return Err(Failure::usage("verify needs --n >= 2"));
    }
    let order = args.n - 1;
    let jf = match args.family {
        FamilyArg::Constant => JacobiFamily::constant(order),
        FamilyArg::Krawtchouk => JacobiFamily::krawtchouk(args.p, order),
        FamilyArg::Hahn => {
            let alpha = args
                .alpha
                .ok_or_else(|| Failure::usage("--alpha is required for the hahn family"))?;
            JacobiFamily::hahn(alpha, args.beta.unwrap_or(alpha), order)
        }
        FamilyArg::Qkrawtchouk => {
            let q = args.q.ok_or_else(|| Failure::usage("--q is required for the qkrawtchouk family"))?;
            JacobiFamily::dual_q_krawtchouk(args.cbar, q, order)
        }
        FamilyArg::Custom => return Err(Error::ClosedFormUnavailable.into()),
    };
    Ok(jf?)
}

/// Residual checks of the closed-form decomposition against `m`.
pub fn verification_checks(jf: &JacobiFamily, m: &SymTridiagonal) -> crate::Result<(Vec<f64>, Vec<Check>)> {
    let analytic = analytic_decomposition(jf)?;
    let numeric = numeric_decomposition(m)?;
    let scale = 1.0 + m.max_abs();
    let (ao, ar) = decomposition_residuals(m, &analytic)?;
    let (no, nr) = decomposition_residuals(m, &numeric)?;
    let ev = eigenvalue_deviation(&analytic, &numeric)?;
    let vv = eigenvector_deviation(&analytic, &numeric)?;
    let check = |name, value: f64, limit: f64| Check { name, value, limit, pass: value <= limit };
    let checks = vec![
        check("analytic_orthogonality", ao, 1e-9),
        check("analytic_reconstruction", ar, 1e-9 * scale),
        check("numeric_orthogonality", no, 1e-10),
        check("numeric_reconstruction", nr, 1e-9 * scale),
        check("eigenvalue_agreement", ev, 1e-8 * scale),
        check("eigenvector_agreement", vv, 1e-7),
    ];
    Ok((analytic.eigenvalues, checks))
}

fn cmd_verify(args: &VerifyArgs) -> CmdResult {
    reject_svg(args.format)?;
    if args.format == OutputFormat::Csv {
        return Err(Failure::usage("verify supports --format text or json"));
    }
    let jf = verify_family(args)?;
    let mut m = build_jacobi(&jf)?;
    if let Some(eps) = args.perturb {
        let mut diag = m.diag().to_vec();
        diag[0] += eps;
        m = SymTridiagonal::new(diag, m.offdiag().to_vec())?;
    }
    let (eigenvalues, checks) = verification_checks(&jf, &m)?;
    let passed = checks.iter().all(|c| c.pass);
    let failing: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    let family = match args.family {
        FamilyArg::Constant => "constant",
        FamilyArg::Krawtchouk => "krawtchouk",
        FamilyArg::Hahn => "hahn",
        FamilyArg::Qkrawtchouk => "qkrawtchouk",
        FamilyArg::Custom => "custom",
    };
    let payload = VerifyPayload { family, n: args.n, perturb: args.perturb, eigenvalues, checks, passed };
    let text = if args.format == OutputFormat::Json {
        json(&payload)?
    } else {
        let mut s = String::new();
        let _ = writeln!(s, "family: {family}  n: {}", args.n);
        let _ = writeln!(s, "{:<26} {:>12} {:>12}  status", "check", "value", "limit");
        for c in &payload.checks {
            let _ = writeln!(
                s,
                "{:<26} {:>12} {:>12}  {}",
                c.name,
                sig6(c.value),
                sig6(c.limit),
                if c.pass { "pass" } else { "FAIL" }
            );
        }
        let evs: Vec<String> = payload.eigenvalues.iter().map(|&v| sig6(v)).collect();
        let _ = writeln!(s, "eigenvalues: {}", evs.join(" "));
        let _ = writeln!(s, "result: {}", if passed { "pass" } else { "FAIL" });
        s
    };
    Ok(Output {
        payload: text,
        code: if passed { 0 } else { 1 },
        note: (!passed).then(|| format!("failed checks: {}", failing.join(", "))),
    })
}

#[derive(Serialize)]
struct BoundPayload {
    family: &'static str,
    n: usize,
    omega: f64,
    bounded: bool,
    max_coupling: Option<f64>,
}

fn cmd_bound(args: &BoundArgs) -> CmdResult {
    reject_svg(args.format)?;
    if args.format == OutputFormat::Csv {
        return Err(Failure::usage("bound supports --format text or json"));
    }
    let kind = interaction(args.family, args.alpha, args.q, args.gamma.as_deref())?;
    if let InteractionKind::Custom { .. } = kind {
        return Err(Error::UnsupportedFamily.into());
    }
    let bound = max_coupling(args.n, args.omega, &kind)?;
    let payload = BoundPayload {
        family: kind.name(),
        n: args.n,
        omega: args.omega,
        bounded: bound != CouplingBound::Unbounded,
        max_coupling: bound.value(),
    };
    Ok(Output::ok(match args.format {
        OutputFormat::Json => json(&payload)?,
        _ => match bound.value() {
            Some(c) => format!("{}\n", sig6(c)),
            None => "unbounded\n".to_string(),
        },
    }))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelSpec {
    pub raw: String,
    pub family: FamilyArg,
    pub c: f64,
    pub alpha: Option<f64>,
    pub q: Option<f64>,
    pub gamma: Option<Vec<f64>>,
}

fn parse_number(key: &str, v: &str) -> Result<f64, Failure> {
    v.parse::<f64>()
        .map_err(|_| Failure::usage(format!("panel key {key} needs a number, got {v:?}")))
}

/// Parse `family[:key=value,...]`.
pub fn parse_panel(raw: &str) -> Result<PanelSpec, Failure> {
    let (family, rest) = raw.split_once(':').unwrap_or((raw, ""));
    let family = FamilyArg::from_str(family.trim(), true)
        .map_err(|_| Failure::usage(format!("unknown panel family {family:?}")))?;
    let mut panel = PanelSpec { raw: raw.to_string(), family, c: 0.0, alpha: None, q: None, gamma: None };
    for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| Failure::usage(format!("panel item {item:?} is not key=value")))?;
        let (k, v) = (k.trim(), v.trim());
        match k {
            "c" => panel.c = parse_number(k, v)?,
            "alpha" => panel.alpha = Some(parse_number(k, v)?),
            "q" => panel.q = Some(parse_number(k, v)?),
            "gamma" => {
                panel.gamma = Some(v.split('/').map(|g| parse_number(k, g)).collect::<Result<_, _>>()?)
            }
            other => return Err(Failure::usage(format!("unknown panel key {other:?}"))),
        }
    }
    Ok(panel)
}

#[derive(Serialize)]
struct PanelReport {
    label: String,
    pattern: Option<chain::SpacingPattern>,
    gaps: Vec<f64>,
    rescaled_levels: Vec<f64>,
}

fn panel_letter(idx: usize) -> String {
    let mut s = String::new();
    let mut k = idx;
    loop {
        s.insert(0, (b'a' + (k % 26) as u8) as char);
        if k < 26 {
            break;
        }
        k = k / 26 - 1;
    }
    s
}

fn cmd_plot(args: &PlotArgs, cfg: &Config) -> CmdResult {
    if args.out.is_none() && !matches!(args.format, OutputFormat::Svg | OutputFormat::Text) {
        return Err(Failure::usage("without --out the SVG goes to stdout; drop --format or pass --out"));
    }
    if args.format == OutputFormat::Csv {
        return Err(Failure::usage("plot reports support --format text or json"));
    }
    let mut panels = Vec::new();
    let mut reports = Vec::new();
    for (idx, raw) in args.panels.iter().enumerate() {
        let p = parse_panel(raw)?;
        let kind = interaction(p.family, p.alpha, p.q, p.gamma.as_deref())?;
        let spec = ChainSpec::new(args.n, args.mass, args.omega, p.c, args.hbar, kind)?;
        let levels = single_phonon_levels(&spec)?;
        let rescaled = if levels.len() == 1 {
            vec![0.5]
        } else {
            match rescale_levels(&levels, 0.0, 1.0) {
                Ok(v) => v,
                // uncoupled chain: every level coincides
                Err(Error::DegenerateRange) => vec![0.5; levels.len()],
                Err(e) => return Err(e.into()),
            }
        };
        let profile = spacing_profile(&levels).ok();
        let label = format!("({}) {}", panel_letter(idx), p.raw);
        reports.push(PanelReport {
            label: label.clone(),
            pattern: profile.as_ref().map(|pr| pr.pattern),
            gaps: profile.map(|pr| pr.gaps).unwrap_or_default(),
            rescaled_levels: rescaled.clone(),
        });
        panels.push(svg::Panel { label, levels: rescaled });
    }
    let image = svg::render(&panels, cfg);
    let Some(out) = &args.out else {
        return Ok(Output::ok(image));
    };
    std::fs::write(out, &image)
        .map_err(|e| Failure { code: 1, message: format!("cannot write {}: {e}", out.display()) })?;
    let text = match args.format {
        OutputFormat::Json => json(&reports)?,
        _ => {
            let mut s = String::new();
            for r in &reports {
                let pattern = r.pattern.map_or("n/a".to_string(), |p| format!("{p:?}"));
                let gaps: Vec<String> = r.gaps.iter().map(|&g| sig6(g)).collect();
                let _ = writeln!(s, "{}: {}  gaps: {}", r.label, pattern, gaps.join(" "));
            }
            let _ = writeln!(s, "wrote {}", out.display());
            s
        }
    };
    Ok(Output::ok(text))
}

#[derive(Serialize)]
struct LevelRow {
    energy: f64,
    degeneracy: usize,
    occupations: Vec<Vec<u32>>,
}

#[derive(Serialize)]
struct ExportPayload<'a> {
    spec: &'a ChainSpec,
    max_total_quanta: usize,
    levels: Vec<LevelRow>,
}

fn occupation_string(states: &[Vec<u32>]) -> String {
    states
        .iter()
        .map(|s| s.iter().map(u32::to_string).collect::<Vec<_>>().join("|"))
        .collect::<Vec<_>>()
        .join(";")
}

fn cmd_export(args: &ExportArgs, cfg: &Config) -> CmdResult {
    reject_svg(args.format)?;
    let spec = args.chain.spec()?;
    let groups = enumerate_levels_with(&spec, args.levels, cfg.state_cap, cfg.degeneracy_tol)?;
    let rows: Vec<LevelRow> = groups
        .into_iter()
        .map(|g| LevelRow {
            energy: g.energy,
            degeneracy: g.states.len(),
            occupations: g.states.into_iter().map(|s| s.occupations).collect(),
        })
        .collect();
    let text = match args.format {
        OutputFormat::Json => json(&ExportPayload { spec: &spec, max_total_quanta: args.levels, levels: rows })?,
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["energy", "degeneracy", "occupations"]).map_err(csv_failure)?;
            for r in &rows {
                w.write_record([
                    r.energy.to_string(),
                    r.degeneracy.to_string(),
                    occupation_string(&r.occupations),
                ])
                .map_err(csv_failure)?;
            }
            csv_string(w)?
        }
        _ => {
            let mut s = String::new();
            let _ = writeln!(s, "{:>14} {:>10}  occupations", "energy", "degeneracy");
            for r in &rows {
                let _ = writeln!(s, "{:>14} {:>10}  {}", sig6(r.energy), r.degeneracy, occupation_string(&r.occupations));
            }
            s
        }
    };
    match &args.out {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| Failure { code: 1, message: format!("cannot write {}: {e}", path.display()) })?;
            Ok(Output::ok(String::new()))
        }
        None => Ok(Output::ok(text)),
    }
}

/// Parse `args`, run the command and report to the given streams. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    let cfg = match Config::from_env() {
        Ok(cfg) => cfg,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return 2;
        }
    };
    let start = Instant::now();
    let result = match &cli.command {
        Command::Spectrum(a) => cmd_spectrum(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bound(a) => cmd_bound(a),
        Command::Plot(a) => cmd_plot(a, &cfg),
        Command::Export(a) => cmd_export(a, &cfg),
    };
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    match result {
        Ok(out) => {
            let _ = stdout.write_all(out.payload.as_bytes());
            if let Some(note) = out.note {
                let _ = writeln!(stderr, "{note}");
            }
            let _ = writeln!(stderr, "wall_time_ms: {elapsed:.3}");
            out.code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

pub fn run_from_env() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut full = vec!["chain-spectra"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn six_digits() {
        assert_eq!(sig6(2.0 / 3.0), "0.666667");
        assert_eq!(sig6(0.4f64.sqrt()), "0.632456");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(1234567.0), "1.23457e6");
        assert_eq!(sig6(2.5e-16), "2.5e-16");
        assert_eq!(sig6(-0.000123456789), "-0.000123457");
    }

    #[test]
    fn panel_grammar() {
        let p = parse_panel("qkrawtchouk:q=1.6,c=1.0").unwrap();
        assert_eq!(p.family, FamilyArg::Qkrawtchouk);
        assert_eq!((p.q, p.c), (Some(1.6), 1.0));
        let p = parse_panel("custom:gamma=1/2/3,c=0.1").unwrap();
        assert_eq!(p.gamma, Some(vec![1.0, 2.0, 3.0]));
        assert!(parse_panel("bogus:c=1").is_err());
        assert!(parse_panel("constant:d=1").is_err());
        assert!(parse_panel("constant:c").is_err());
    }

    #[test]
    fn letters() {
        assert_eq!(panel_letter(0), "a");
        assert_eq!(panel_letter(25), "z");
        assert_eq!(panel_letter(26), "aa");
    }

    #[test]
    fn bound_text() {
        assert_eq!(call(&["bound", "--family", "krawtchouk", "--n", "4", "--omega", "1"]).1, "0.666667\n");
        assert_eq!(call(&["bound", "--family", "constant", "--n", "5"]).1, "unbounded\n");
        assert_eq!(call(&["bound", "--family", "custom", "--n", "3", "--gamma", "1,1"]).0, 2);
    }

    #[test]
    fn missing_family_parameter_is_usage_error() {
        assert_eq!(call(&["spectrum", "--family", "hahn", "--n", "3"]).0, 2);
        assert_eq!(call(&["spectrum", "--family", "krawtchouk", "--n", "3", "--format", "svg"]).0, 2);
    }
}
