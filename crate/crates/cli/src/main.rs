mod config;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zeromodes::dynamics::{default_grid, log_grid, verify_mode, VerifyOptions, VerifyReport};
use zeromodes::eigen::eigen_mode;
use zeromodes::normalization::{
    classify_profile, window_a, window_b, window_sign_for_mode, ConventionResolution, NormReport, QuadOptions,
    QuadOutcome, CLASSIFY_QUAD_TOL,
};
use zeromodes::scan::{profile_series, scan_with, write_records, write_series, Axis, GridSpec, OutputFormat, ProfileQuantity};
use zeromodes::{Branch, Convention, CouplingParams, NormValue, ProfileSpec, Sign, WindowInterval};

use config::{pick, Config};

#[derive(Parser, Debug)]
#[command(name = "zeromodes", version, about = "Massless spinor profiles on an almost-S2: verify, plot, classify, scan")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the closed-form profiles against the radial equations.
    Verify(VerifyArgs),
    /// Emit (rho, value) columns of one profile.
    Profile(ProfileArgs),
    /// Window, closed-form and quadrature verdicts for the mode index n.
    Norm(CommonArgs),
    /// Scan a parameter grid and write one record per point, sign and branch.
    Scan(ScanArgs),
    /// Print the normalizability windows.
    Windows(WindowsArgs),
}

#[derive(Args, Debug, Clone)]
struct CommonArgs {
    /// Flat JSON object with the same keys as the flags (without dashes).
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, allow_hyphen_values = true)]
    f56: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    ft56: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    ft3: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    ftp: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    ftm: Option<f64>,
    /// Mode index.
    #[arg(long, allow_hyphen_values = true)]
    n: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    rho0: Option<f64>,
    /// plus, minus or both. Selects alpha (windows: the ± of the window).
    #[arg(long)]
    sign: Option<String>,
    /// A, B or both.
    #[arg(long)]
    branch: Option<String>,
    /// paper_literal, shifted_index or both.
    #[arg(long)]
    convention: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    tol: Option<f64>,
    /// Output file (stdout if absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// text, csv, json or plot_columns, depending on the subcommand.
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Skip the adaptive propagation check.
    #[arg(long)]
    no_propagate: bool,
}

#[derive(Args, Debug)]
struct ProfileArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// modulus, re_i, im_i, re_ii, im_ii or integrand.
    #[arg(long)]
    quantity: Option<String>,
    #[arg(long)]
    rho_min: Option<f64>,
    #[arg(long)]
    rho_max: Option<f64>,
    #[arg(long)]
    points: Option<usize>,
    /// Plot the ln f partner solution of a degenerate mixing matrix.
    #[arg(long)]
    secular: bool,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// min:max:count for each coupling axis; a plain flag fixes the axis.
    #[arg(long, allow_hyphen_values = true)]
    f56_range: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    ft56_range: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    ft3_range: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    ftp_range: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    ftm_range: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    n_min: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    n_max: Option<i64>,
    /// Record the largest closed-form residual per record.
    #[arg(long)]
    verify_points: bool,
    /// Reconcile every window against quadrature.
    #[arg(long)]
    quad_check: bool,
    /// Evaluate grid points on one thread.
    #[arg(long)]
    serial: bool,
}

#[derive(Args, Debug)]
struct WindowsArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, allow_hyphen_values = true)]
    n_min: Option<i64>,
    #[arg(long, allow_hyphen_values = true)]
    n_max: Option<i64>,
}

#[derive(Debug)]
enum Failure {
    /// Bad arguments: exit code 2.
    Usage(String),
    /// Runtime failure: exit code 1.
    Runtime(String),
}

impl From<zeromodes::Error> for Failure {
    fn from(e: zeromodes::Error) -> Self {
        use zeromodes::Error as E;
        match e {
            E::NonFinite { .. } | E::NonPositiveScale(_) | E::InvalidGrid(_) | E::DomainError(_) => {
                Failure::Usage(e.to_string())
            }
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

type Outcome<T> = Result<T, Failure>;

fn usage<T>(r: Result<T, String>) -> Outcome<T> {
    r.map_err(Failure::Usage)
}

/// Flags merged with the config file.
struct Settings {
    cfg: Config,
    params: CouplingParams,
    sign: Option<String>,
    branch: Option<String>,
    convention: Option<String>,
    tol: Option<f64>,
    out: Option<PathBuf>,
    format: Option<String>,
}

impl Settings {
    fn resolve(a: &CommonArgs) -> Outcome<Self> {
        let cfg = match &a.config {
            Some(path) => usage(Config::load(path))?,
            None => Config::default(),
        };
        let num = |flag: Option<f64>, key: &str, default: f64| -> Outcome<f64> {
            Ok(usage(pick(flag, &cfg, key))?.unwrap_or(default))
        };
        let params = CouplingParams::new(
            num(a.f56, "f56", 0.0)?,
            num(a.ft56, "ft56", 0.0)?,
            num(a.ft3, "ft3", 0.0)?,
            num(a.ftp, "ftp", 0.0)?,
            num(a.ftm, "ftm", 0.0)?,
            num(a.n, "n", 0.0)?,
            num(a.rho0, "rho0", 1.0)?,
        )?;
        Ok(Self {
            params,
            sign: usage(pick(a.sign.clone(), &cfg, "sign"))?,
            branch: usage(pick(a.branch.clone(), &cfg, "branch"))?,
            convention: usage(pick(a.convention.clone(), &cfg, "convention"))?,
            tol: usage(pick(a.tol, &cfg, "tol"))?,
            out: usage(pick(a.out.clone(), &cfg, "out"))?,
            format: usage(pick(a.format.clone(), &cfg, "format"))?,
            cfg,
        })
    }

    fn signs(&self) -> Outcome<Vec<Sign>> {
        either_or_both(self.sign.as_deref(), &Sign::BOTH)
    }

    fn branches(&self) -> Outcome<Vec<Branch>> {
        either_or_both(self.branch.as_deref(), &Branch::BOTH)
    }

    fn conventions(&self, default: &[Convention]) -> Outcome<Vec<Convention>> {
        match self.convention.as_deref() {
            None => Ok(default.to_vec()),
            some => either_or_both(some, &Convention::BOTH),
        }
    }

    fn single<T: Copy>(items: Vec<T>, what: &str) -> Outcome<T> {
        match items.as_slice() {
            [one] => Ok(*one),
            _ => Err(Failure::Usage(format!("{what} must name a single value here"))),
        }
    }

    fn tol(&self, default: f64) -> Outcome<f64> {
        let tol = self.tol.unwrap_or(default);
        if !(tol > 0.0 && tol.is_finite()) {
            return Err(Failure::Usage(format!("--tol must be positive, got {tol}")));
        }
        Ok(tol)
    }

    fn format(&self, allowed: &[&str], default: &str) -> Outcome<String> {
        let f = self.format.clone().unwrap_or_else(|| default.to_string()).replace('-', "_");
        if allowed.contains(&f.as_str()) {
            Ok(f)
        } else {
            Err(Failure::Usage(format!(
                "--format {f} is not supported here (expected one of {})",
                allowed.join(", ")
            )))
        }
    }

    fn writer(&self) -> Outcome<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn either_or_both<T: std::str::FromStr<Err = String> + Copy>(value: Option<&str>, both: &[T]) -> Outcome<Vec<T>> {
    match value {
        None => Ok(both.to_vec()),
        Some(s) if s.eq_ignore_ascii_case("both") => Ok(both.to_vec()),
        Some(s) => Ok(vec![usage(s.parse())?]),
    }
}

fn parse_axis(range: Option<String>, fixed: f64, name: &str) -> Outcome<Axis> {
    let Some(text) = range else {
        return Ok(Axis::fixed(fixed));
    };
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || Failure::Usage(format!("--{name}-range expects min:max:count, got `{text}`"));
    match parts.as_slice() {
        [lo, hi, count] => Ok(Axis::new(
            lo.trim().parse().map_err(|_| bad())?,
            hi.trim().parse().map_err(|_| bad())?,
            count.trim().parse().map_err(|_| bad())?,
        )),
        _ => Err(bad()),
    }
}

fn write_json<T: serde::Serialize>(value: &T, out: &mut dyn Write) -> Outcome<()> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| Failure::Runtime(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

fn run_verify(args: VerifyArgs) -> Outcome<ExitCode> {
    let s = Settings::resolve(&args.common)?;
    let tol = s.tol(1e-10)?;
    let format = s.format(&["text", "json"], "text")?;
    let no_propagate = args.no_propagate || usage(s.cfg.flag("no_propagate"))?;
    let opts = VerifyOptions {
        propagate: !no_propagate,
        ..VerifyOptions::default()
    };
    let c = s.params;
    let grid = default_grid(c.rho0());
    let reports: Vec<VerifyReport> = s
        .signs()?
        .into_iter()
        .map(|sign| verify_mode(&c, eigen_mode(&c, sign), &grid, tol, &opts))
        .collect::<zeromodes::Result<_>>()?;
    let mut out = s.writer()?;
    if format == "json" {
        write_json(&reports, &mut out)?;
    } else {
        for r in &reports {
            writeln!(
                out,
                "sign {}: alpha = {} {:+}i{}, max residual {:.3e} (tol {:.1e}), max propagation deviation {}: {}",
                r.sign,
                r.alpha_re + 0.0,
                r.alpha_im + 0.0,
                if r.degenerate { " (degenerate)" } else { "" },
                r.max_residual(),
                r.tol,
                r.max_propagation_deviation()
                    .map_or("n/a".to_string(), |d| format!("{d:.3e}")),
                if r.pass { "pass" } else { "FAIL" }
            )?;
        }
    }
    out.flush()?;
    Ok(if reports.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn run_profile(args: ProfileArgs) -> Outcome<ExitCode> {
    let s = Settings::resolve(&args.common)?;
    s.format(&["plot_columns"], "plot_columns")?;
    let c = s.params;
    let branch = Settings::single(either_or_both(s.branch.as_deref().or(Some("A")), &Branch::BOTH)?, "--branch")?;
    let sign = Settings::single(either_or_both(s.sign.as_deref().or(Some("plus")), &Sign::BOTH)?, "--sign")?;
    let quantity: ProfileQuantity = usage(
        usage(pick(args.quantity, &s.cfg, "quantity"))?
            .unwrap_or_else(|| "modulus".into())
            .parse(),
    )?;
    let rho_min = usage(pick(args.rho_min, &s.cfg, "rho_min"))?.unwrap_or(1e-3 * c.rho0());
    let rho_max = usage(pick(args.rho_max, &s.cfg, "rho_max"))?.unwrap_or(20.0 * c.rho0());
    let points = usage(pick(args.points, &s.cfg, "points"))?.unwrap_or(100);
    if !(rho_min > 0.0 && rho_max > rho_min) || points < 2 {
        return Err(Failure::Usage(
            "profile grid needs 0 < rho_min < rho_max and at least 2 points".into(),
        ));
    }
    let mut spec = ProfileSpec::new(c, branch, sign);
    if args.secular || usage(s.cfg.flag("secular"))? {
        spec = spec
            .secular()
            .ok_or_else(|| Failure::Usage("--secular needs a degenerate mixing matrix".into()))?;
    }
    let series = profile_series(&spec, &log_grid(rho_min, rho_max, points), quantity)?;
    let mut out = s.writer()?;
    write_series(&series, ("rho", quantity.as_str()), &mut out)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn describe_norm(v: &NormValue) -> String {
    match v {
        NormValue::Finite { value } => format!("finite, {value:.12e}"),
        NormValue::Divergent { endpoint } => format!("divergent at {}", endpoint_name(*endpoint)),
    }
}

fn describe_quad(q: &QuadOutcome) -> String {
    match q {
        QuadOutcome::Finite { value, error } => format!("finite, {value:.12e} ± {error:.1e}"),
        QuadOutcome::Divergent { endpoint } => format!("divergent at {}", endpoint_name(*endpoint)),
    }
}

fn endpoint_name(e: zeromodes::Endpoint) -> &'static str {
    match e {
        zeromodes::Endpoint::Origin => "origin",
        zeromodes::Endpoint::Infinity => "infinity",
        zeromodes::Endpoint::Both => "both ends",
    }
}

fn verdict(inside: bool) -> &'static str {
    if inside {
        "normalizable"
    } else {
        "not normalizable"
    }
}

fn print_norm(r: &NormReport, c: &CouplingParams, out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "branch {} sign {} n {}", r.branch, r.sign, r.n)?;
    match r.branch {
        Branch::A => writeln!(out, "  window {}: {}", r.window, verdict(r.window_verdict))?,
        Branch::B => {
            let lit = window_b(c, r.window.sign, Convention::PaperLiteral);
            writeln!(
                out,
                "  window paper_literal {}: {}",
                lit,
                verdict(r.literal_verdict.unwrap_or(false))
            )?;
            writeln!(out, "  window shifted_index {}: {}", r.window, verdict(r.window_verdict))?;
        }
    }
    writeln!(out, "  closed form: {}", describe_norm(&r.closed_form))?;
    writeln!(out, "  quadrature: {}", describe_quad(&r.quadrature))?;
    writeln!(out, "  agree: {}", r.agree)?;
    if r.branch == Branch::B {
        let used = match r.convention_used {
            ConventionResolution::NotApplicable => "n/a",
            ConventionResolution::PaperLiteral => "paper_literal",
            ConventionResolution::ShiftedIndex => "shifted_index",
            ConventionResolution::Both => "both",
            ConventionResolution::Neither => "neither",
        };
        writeln!(out, "  convention matching quadrature: {used}")?;
    }
    Ok(())
}

fn run_norm(args: CommonArgs) -> Outcome<ExitCode> {
    let s = Settings::resolve(&args)?;
    let tol = s.tol(CLASSIFY_QUAD_TOL)?;
    let format = s.format(&["text", "json"], "text")?;
    let c = s.params;
    let mut reports = Vec::new();
    for sign in s.signs()? {
        for branch in s.branches()? {
            let spec = ProfileSpec::new(c, branch, sign);
            reports.push(classify_profile(&spec, tol, &QuadOptions::default())?);
        }
    }
    let mut out = s.writer()?;
    if format == "json" {
        write_json(&reports, &mut out)?;
    } else {
        for r in &reports {
            print_norm(r, &c, &mut out)?;
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn run_scan(args: ScanArgs) -> Outcome<ExitCode> {
    let s = Settings::resolve(&args.common)?;
    let format: OutputFormat = usage(s.format(&["csv", "json", "plot_columns"], "csv")?.parse())?;
    let c = s.params;
    let cfg = &s.cfg;
    let g = GridSpec {
        f56: parse_axis(usage(pick(args.f56_range, cfg, "f56_range"))?, c.f56(), "f56")?,
        ft56: parse_axis(usage(pick(args.ft56_range, cfg, "ft56_range"))?, c.ft56(), "ft56")?,
        ft3: parse_axis(usage(pick(args.ft3_range, cfg, "ft3_range"))?, c.ft3(), "ft3")?,
        ftp: parse_axis(usage(pick(args.ftp_range, cfg, "ftp_range"))?, c.ftp(), "ftp")?,
        ftm: parse_axis(usage(pick(args.ftm_range, cfg, "ftm_range"))?, c.ftm(), "ftm")?,
        n_min: usage(pick(args.n_min, cfg, "n_min"))?.unwrap_or(-5),
        n_max: usage(pick(args.n_max, cfg, "n_max"))?.unwrap_or(5),
        rho0: c.rho0(),
        signs: s.signs()?,
        conventions: s.conventions(&[Convention::ShiftedIndex])?,
        verify: args.verify_points || usage(cfg.flag("verify_points"))?,
        quad_check: args.quad_check || usage(cfg.flag("quad_check"))?,
    };
    let serial = args.serial || usage(cfg.flag("serial"))?;
    let records = scan_with(&g, !serial)?;
    let mut out = s.writer()?;
    write_records(&records, format, &mut out)?;
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn run_windows(args: WindowsArgs) -> Outcome<ExitCode> {
    let s = Settings::resolve(&args.common)?;
    let format = s.format(&["text", "json"], "text")?;
    let c = s.params;
    let n_min = usage(pick(args.n_min, &s.cfg, "n_min"))?.unwrap_or(-5);
    let n_max = usage(pick(args.n_max, &s.cfg, "n_max"))?.unwrap_or(5);
    let mut windows: Vec<WindowInterval> = Vec::new();
    for branch in s.branches()? {
        for sign in s.signs()? {
            match branch {
                Branch::A => windows.push(window_a(&c, sign)),
                Branch::B => {
                    for conv in s.conventions(&Convention::BOTH)? {
                        windows.push(window_b(&c, sign, conv));
                    }
                }
            }
        }
    }
    let mut out = s.writer()?;
    if format == "json" {
        write_json(&windows, &mut out)?;
    } else {
        for w in &windows {
            let label = match w.convention {
                Some(conv) => format!("{} {} {}", w.branch, w.sign, conv),
                None => format!("{} {}", w.branch, w.sign),
            };
            let inside: Vec<String> = w.integers_inside(n_min, n_max).iter().map(i64::to_string).collect();
            writeln!(
                out,
                "{label}: {w}  integers in [{n_min}, {n_max}]: {{{}}}  (alpha {})",
                inside.join(", "),
                window_sign_for_mode(w.branch, w.sign)
            )?;
        }
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify(a) => run_verify(a),
        Command::Profile(a) => run_profile(a),
        Command::Norm(a) => run_norm(a),
        Command::Scan(a) => run_scan(a),
        Command::Windows(a) => run_windows(a),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
