//! Command-line grammar and dispatch.

mod config;

use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;
use serde_json::json;

use torsion_probe::characters::DirichletCharacter;
use torsion_probe::charsums::{compare, gr_bound, optimal_k, partial_sum_exact, GrBoundParams};
use torsion_probe::fields::{
    class_group, ell_torsion, fundamental_discriminant, pure_cubic_discriminant, smooth_family, split_prime_count,
    squarefree_norm_ideal_count, ClassGroupStructure, Signature, SplitKind,
};
use torsion_probe::harness::{
    hlgr_parameter_check, hlgr_parameter_check_exact, ingest_class_numbers, run_pure_cubic_experiment,
    run_quadratic_experiment, ClassGroupCache, ExperimentParams, ExperimentRow, CSV_COLUMNS,
};
use torsion_probe::kernels::{
    contour_integral_gaussian, gaussian_weighted_sum, kernel_constant, qt_plan, weighted_prime_sum, window_mass,
    zero_side_sum, CoefficientSeries,
};
use torsion_probe::lfun::{
    certify_zero_free, pair_exclusion, scan_zeros, sup_norm, CertifyParams, LFunction, Rect, ScanOptions,
};
use torsion_probe::{Error, Result};

pub use config::{Config, Format, Overrides, CACHE_ENV};

#[derive(Debug, Parser)]
#[command(name = "torsion-probe", version, about = "Characters, L-functions, kernels and class-group torsion experiments")]
pub struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Numerical tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Zero-scan resolution.
    #[arg(long, global = true)]
    resolution: Option<f64>,
    /// Disc-radius constant for certification.
    #[arg(long, global = true)]
    c2: Option<f64>,
    /// Largest |Δ| for class group computation.
    #[arg(long, global = true)]
    class_group_cap: Option<u64>,
    /// Largest |Δ| for Gaussian-kernel sums.
    #[arg(long, global = true)]
    gaussian_cap: Option<u64>,
    /// Class group cache file (overrides TORSION_PROBE_CACHE).
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Row output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Dirichlet characters.
    #[command(subcommand)]
    Char(CharCmd),
    /// Character sums and the smooth-modulus bound.
    #[command(subcommand)]
    Charsum(CharsumCmd),
    /// L-function values, zeros and zero-free regions.
    #[command(subcommand)]
    Lfun(LfunCmd),
    /// Smoothing kernels and weighted sums.
    #[command(subcommand)]
    Kernel(KernelCmd),
    /// Quadratic and pure cubic fields.
    #[command(subcommand)]
    Field(FieldCmd),
    /// Torsion-bound experiments.
    #[command(subcommand)]
    Experiment(ExperimentCmd),
}

#[derive(Debug, Args)]
struct CharArgs {
    #[arg(long)]
    modulus: u64,
    #[arg(long, default_value_t = 1)]
    index: u64,
}

impl CharArgs {
    fn character(&self) -> Result<DirichletCharacter> {
        DirichletCharacter::from_index(self.modulus, self.index)
    }
}

#[derive(Debug, Subcommand)]
enum CharCmd {
    /// All characters mod q, optionally of one order.
    List {
        #[arg(long)]
        modulus: u64,
        #[arg(long)]
        order: Option<u64>,
    },
    /// χ(n).
    Eval {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, allow_hyphen_values = true)]
        n: i64,
    },
}

#[derive(Debug, Args)]
struct RangeArgs {
    /// Range start M; the sum runs over M < n ≤ M + N.
    #[arg(long)]
    start: u64,
    /// Range length N.
    #[arg(long)]
    len: u64,
}

#[derive(Debug, Subcommand)]
enum CharsumCmd {
    /// Exact sum in the cyclotomic integers.
    Exact {
        #[command(flatten)]
        chi: CharArgs,
        #[command(flatten)]
        range: RangeArgs,
    },
    /// The bound alone; without --k the best k in 1..=20 is used.
    Bound {
        #[arg(long)]
        modulus: u64,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long)]
        k: Option<u32>,
    },
    /// Exact sum against the bound.
    Compare {
        #[command(flatten)]
        chi: CharArgs,
        #[command(flatten)]
        range: RangeArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
    },
}

#[derive(Debug, Subcommand)]
enum LfunCmd {
    /// L(s, χ), optionally with L'(s, χ).
    Eval {
        #[command(flatten)]
        chi: CharArgs,
        /// `re,im`.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        s: Complex<f64>,
        #[arg(long)]
        derivative: bool,
    },
    /// max |L| on [1-θ, 2] × [-t, t].
    Supnorm {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, default_value_t = 0.1)]
        theta: f64,
        #[arg(long, default_value_t = 3.0)]
        t_max: f64,
        #[arg(long, default_value_t = 0.05)]
        grid: f64,
    },
    /// Zeros in a rectangle.
    Scan {
        #[command(flatten)]
        chi: CharArgs,
        /// `σ1,σ2,t1,t2`.
        #[arg(long, value_parser = parse_rect, allow_hyphen_values = true)]
        rect: Rect<f64>,
    },
    /// Zero-free disc certificate; φ is measured when not given.
    Certify {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long, default_value_t = 0.1)]
        theta: f64,
        #[arg(long)]
        phi: Option<f64>,
        #[arg(long, default_value_t = 3.0)]
        t_cap: f64,
        #[arg(long, default_value_t = 0.05)]
        grid: f64,
    },
    /// At most one of two real characters vanishes in the rectangle.
    Exclude {
        #[arg(long)]
        modulus: u64,
        #[arg(long)]
        index1: u64,
        #[arg(long)]
        index2: u64,
        #[arg(long, value_parser = parse_rect, allow_hyphen_values = true)]
        rect: Rect<f64>,
    },
}

#[derive(Debug, Subcommand)]
enum KernelCmd {
    /// Σ a(n) e^{-(log n)²/(4y)}.
    Gaussian {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        y: f64,
    },
    /// The same weighted sum as a contour integral.
    Contour {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        y: f64,
        #[arg(long)]
        height: Option<f64>,
    },
    /// Weighted mass below, inside and above the window.
    Window {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        y: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Cubic-kernel weighted prime sum against its main term.
    PrimeSum {
        #[command(flatten)]
        chi: CharArgs,
        /// `ln y`.
        #[arg(long)]
        log_y: f64,
        #[arg(long)]
        delta: f64,
    },
    /// Kernel sum over the zeros found in a rectangle, with their census.
    ZeroSum {
        #[command(flatten)]
        chi: CharArgs,
        #[arg(long)]
        y: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 1.0)]
        vartheta: f64,
        #[arg(long, value_parser = parse_rect, allow_hyphen_values = true)]
        rect: Rect<f64>,
    },
    /// Largest admissible δ for (ℓ, θ, ξ).
    Plan {
        #[arg(long)]
        ell: u64,
        #[arg(long)]
        theta: f64,
        #[arg(long)]
        xi: f64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SignatureArg {
    Imaginary,
    Real,
    Both,
}

impl SignatureArg {
    fn filter(self) -> Option<Signature> {
        match self {
            SignatureArg::Imaginary => Some(Signature::Imaginary),
            SignatureArg::Real => Some(Signature::Real),
            SignatureArg::Both => None,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SplitKindArg {
    Quadratic,
    PureCubic,
    NoncyclicCubic,
    CyclicCubic,
}

#[derive(Debug, Subcommand)]
enum FieldCmd {
    /// Discriminant of Q(√d), or of Q(∛d) with --cubic.
    Disc {
        #[arg(long, allow_hyphen_values = true)]
        d: i64,
        #[arg(long)]
        cubic: bool,
    },
    /// Invariant factors of the form class group.
    Classgroup {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
    },
    /// ℓ-torsion size.
    Torsion {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        ell: u64,
    },
    /// Split primes up to X.
    Split {
        #[arg(long, value_enum)]
        kind: SplitKindArg,
        /// Discriminant (quadratic, noncyclic cubic) or radicand (pure cubic).
        #[arg(long, allow_hyphen_values = true)]
        disc: Option<i64>,
        /// Character modulus and index (cyclic cubic).
        #[arg(long)]
        modulus: Option<u64>,
        #[arg(long)]
        index: Option<u64>,
        #[arg(long)]
        x: u64,
    },
    /// Ideals of squarefree norm up to X coprime to Δ.
    Ideals {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
        #[arg(long)]
        x: u64,
    },
    /// Smooth fundamental discriminants, one per line.
    Family {
        #[arg(long)]
        max: u64,
        #[arg(long, default_value_t = 1.0)]
        smooth_exponent: f64,
        #[arg(long, value_enum, default_value = "both")]
        signature: SignatureArg,
        #[arg(long)]
        count: Option<usize>,
    },
}

#[derive(Debug, Args)]
struct BoundArgs {
    #[arg(long)]
    ell: u64,
    #[arg(long)]
    varpi: f64,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum ExperimentCmd {
    /// Quadratic fields from a file (one discriminant per line) or the
    /// smallest fundamental discriminants.
    Quadratic {
        #[arg(long, conflicts_with = "family_count")]
        family_file: Option<PathBuf>,
        #[arg(long)]
        family_count: Option<usize>,
        #[arg(long, value_enum, default_value = "imaginary")]
        signature: SignatureArg,
        #[command(flatten)]
        bound: BoundArgs,
        /// Count ideals of squarefree norm instead of split primes.
        #[arg(long)]
        ideals: bool,
    },
    /// Pure cubic fields Q(∛d) for d in [d-min, d-max].
    PureCubic {
        #[arg(long, default_value_t = 2)]
        d_min: u64,
        #[arg(long)]
        d_max: u64,
        #[command(flatten)]
        bound: BoundArgs,
        /// Class number table (CSV `label,disc,h,structure`).
        #[arg(long)]
        ingest: Option<PathBuf>,
    },
    /// Admissibility of (k, δ, ℓ) for the smooth-modulus argument.
    HlgrCheck {
        #[arg(long)]
        k: u32,
        /// Rational (`1/343`) or decimal.
        #[arg(long, value_parser = parse_rational)]
        delta: BigRational,
        #[arg(long)]
        ell: u64,
    },
}

fn parse_floats(s: &str, n: usize) -> std::result::Result<Vec<f64>, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("{x}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    Ok(v)
}

fn parse_complex(s: &str) -> std::result::Result<Complex<f64>, String> {
    let v = parse_floats(s, 2)?;
    Ok(Complex::new(v[0], v[1]))
}

fn parse_rect(s: &str) -> std::result::Result<Rect<f64>, String> {
    let v = parse_floats(s, 4)?;
    Ok(Rect::new(v[0], v[1], v[2], v[3]))
}

fn parse_rational(s: &str) -> std::result::Result<BigRational, String> {
    let s = s.trim();
    if let Some((whole, frac)) = s.split_once('.') {
        let digits = format!("{whole}{frac}");
        let num = BigInt::from_str(&digits).map_err(|e| format!("{s}: {e}"))?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        return Ok(BigRational::new(num, den));
    }
    BigRational::from_str(s).map_err(|e| format!("{s}: {e}"))
}

/// What a command produced, for the exit code.
pub enum Outcome {
    Done,
    /// The run completed but found a violation.
    Violation,
}

struct Ctx {
    config: Config,
    invocation: String,
}

impl Ctx {
    fn header_lines(&self) -> Vec<String> {
        self.config.header(&self.invocation)
    }

    /// Single-object report: JSON on stdout, header on stderr.
    fn report<T: Serialize>(&self, value: &T) -> Result<()> {
        for line in self.header_lines() {
            eprintln!("# {line}");
        }
        let text = serde_json::to_string(value).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        println!("{text}");
        Ok(())
    }

    fn cache(&self) -> Result<Option<ClassGroupCache>> {
        self.config.cache.as_deref().map(ClassGroupCache::open).transpose()
    }

    fn class_group(&self, disc: i64) -> Result<ClassGroupStructure> {
        match self.cache()? {
            Some(mut c) => c.get_or_compute(disc, self.config.class_group_cap),
            None => class_group(disc, self.config.class_group_cap),
        }
    }

    fn scan_options(&self) -> ScanOptions<f64> {
        ScanOptions { resolution: self.config.resolution, tol: self.config.tol }
    }

    /// Rows in the configured format. CSV carries the header as `#` lines.
    fn rows(&self, out: &mut dyn Write, columns: &[&str], rows: &[Vec<String>], json: &[serde_json::Value]) -> Result<()> {
        match self.config.format {
            Format::Csv => {
                for line in self.header_lines() {
                    writeln!(out, "# {line}")?;
                }
                let mut w = csv::Writer::from_writer(out);
                let to_io = |e: csv::Error| Error::Io(e.into());
                w.write_record(columns).map_err(to_io)?;
                for r in rows {
                    w.write_record(r).map_err(to_io)?;
                }
                w.flush()?;
            }
            Format::Jsonl => {
                for line in self.header_lines() {
                    eprintln!("# {line}");
                }
                for v in json {
                    writeln!(out, "{v}")?;
                }
            }
        }
        Ok(())
    }

    fn experiment_rows(&self, out: Option<&PathBuf>, rows: &[ExperimentRow]) -> Result<()> {
        let fields: Vec<Vec<String>> = rows.iter().map(ExperimentRow::csv_fields).collect();
        let json: Vec<serde_json::Value> = rows.iter().map(|r| serde_json::to_value(r).expect("row serializes")).collect();
        match out {
            Some(path) => {
                let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
                self.rows(&mut f, &CSV_COLUMNS, &fields, &json)?;
                f.flush()?;
            }
            None => self.rows(&mut std::io::stdout().lock(), &CSV_COLUMNS, &fields, &json)?,
        }
        Ok(())
    }
}

pub fn run(cli: Cli, invocation: String) -> Result<Outcome> {
    let flags = Overrides {
        tol: cli.tol,
        resolution: cli.resolution,
        c2: cli.c2,
        class_group_cap: cli.class_group_cap,
        gaussian_cap: cli.gaussian_cap,
        cache: cli.cache,
        format: cli.format,
        threads: cli.threads,
    };
    let env_cache = std::env::var_os(CACHE_ENV).map(PathBuf::from);
    let config = Config::load(cli.config.as_deref(), env_cache, &flags)?;
    if let Some(n) = config.threads {
        // Fails only if a pool already exists, which keeps the old one.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let ctx = Ctx { config, invocation };
    match cli.command {
        Command::Char(c) => run_char(&ctx, c),
        Command::Charsum(c) => run_charsum(&ctx, c),
        Command::Lfun(c) => run_lfun(&ctx, c),
        Command::Kernel(c) => run_kernel(&ctx, c),
        Command::Field(c) => run_field(&ctx, c),
        Command::Experiment(c) => run_experiment(&ctx, c),
    }
}

fn run_char(ctx: &Ctx, cmd: CharCmd) -> Result<Outcome> {
    match cmd {
        CharCmd::List { modulus, order } => {
            let chars = DirichletCharacter::enumerate(modulus, order)?;
            let columns = ["modulus", "index", "order", "conductor", "primitive", "parity"];
            let summaries: Vec<_> = chars.iter().map(|c| c.summary()).collect();
            let rows: Vec<Vec<String>> = summaries
                .iter()
                .map(|s| {
                    vec![
                        s.modulus.to_string(),
                        s.index.to_string(),
                        s.order.to_string(),
                        s.conductor.to_string(),
                        s.primitive.to_string(),
                        s.parity.to_string(),
                    ]
                })
                .collect();
            let json: Vec<_> = summaries.iter().map(|s| serde_json::to_value(s).expect("summary serializes")).collect();
            ctx.rows(&mut std::io::stdout().lock(), &columns, &rows, &json)?;
        }
        CharCmd::Eval { chi, n } => {
            let c = chi.character()?;
            let v = c.eval(n);
            let z = v.to_complex::<f64>();
            ctx.report(&json!({
                "modulus": c.modulus(),
                "index": c.index(),
                "n": n,
                "value": v.to_string(),
                "re": z.re,
                "im": z.im,
            }))?;
        }
    }
    Ok(Outcome::Done)
}

fn run_charsum(ctx: &Ctx, cmd: CharsumCmd) -> Result<Outcome> {
    match cmd {
        CharsumCmd::Exact { chi, range } => {
            let c = chi.character()?;
            let sum = partial_sum_exact(&c, range.start, range.len);
            let z = sum.to_complex::<f64>();
            ctx.report(&json!({
                "modulus": c.modulus(),
                "index": c.index(),
                "start": range.start,
                "len": range.len,
                "order": sum.order(),
                "counts": sum.counts(),
                "re": z.re,
                "im": z.im,
                "abs": z.norm(),
            }))?;
        }
        CharsumCmd::Bound { modulus, range, k } => {
            let k = match k {
                Some(k) => k,
                None => optimal_k(modulus, range.start, range.len, 1..=20)?.0,
            };
            let params = GrBoundParams::new(modulus, range.start, range.len, k)?;
            let bound: f64 = gr_bound(&params);
            ctx.report(&json!({ "params": params, "bound": bound }))?;
        }
        CharsumCmd::Compare { chi, range, k } => {
            ctx.report(&compare(&chi.character()?, range.start, range.len, k)?)?;
        }
    }
    Ok(Outcome::Done)
}

fn run_lfun(ctx: &Ctx, cmd: LfunCmd) -> Result<Outcome> {
    let tol = ctx.config.tol;
    match cmd {
        LfunCmd::Eval { chi, s, derivative } => {
            let c = chi.character()?;
            let lf = LFunction::new(&c, tol)?;
            let (v, d, info) = lf.eval_with_derivative(s)?;
            let mut report = json!({
                "modulus": c.modulus(),
                "index": c.index(),
                "s_re": s.re,
                "s_im": s.im,
                "value_re": v.re,
                "value_im": v.im,
                "eval": info,
            });
            if derivative {
                report["derivative_re"] = json!(d.re);
                report["derivative_im"] = json!(d.im);
            }
            ctx.report(&report)?;
        }
        LfunCmd::Supnorm { chi, theta, t_max, grid } => {
            ctx.report(&sup_norm(&chi.character()?, theta, t_max, grid, tol)?)?;
        }
        LfunCmd::Scan { chi, rect } => {
            ctx.report(&scan_zeros(&chi.character()?, rect, ctx.scan_options())?)?;
        }
        LfunCmd::Certify { chi, theta, phi, t_cap, grid } => {
            let c = chi.character()?;
            let phi = match phi {
                Some(p) => p,
                None => sup_norm(&c, theta, t_cap, grid, tol)?.certify_phi(),
            };
            let phi_square = if c.order() > 2 {
                let sq = c.pow(2);
                Some(sup_norm(&sq, theta, t_cap, grid, tol)?.certify_phi())
            } else {
                None
            };
            let params = CertifyParams { theta, phi, c2: ctx.config.c2, t_cap, phi_square };
            let cert = certify_zero_free(&c, &params, ctx.scan_options())?;
            ctx.report(&cert)?;
            if cert.verdict.is_violation() {
                return Ok(Outcome::Violation);
            }
        }
        LfunCmd::Exclude { modulus, index1, index2, rect } => {
            let a = DirichletCharacter::from_index(modulus, index1)?;
            let b = DirichletCharacter::from_index(modulus, index2)?;
            let report = pair_exclusion(&a, &b, rect, ctx.scan_options())?;
            ctx.report(&report)?;
            if !report.pass {
                return Ok(Outcome::Violation);
            }
        }
    }
    Ok(Outcome::Done)
}

fn run_kernel(ctx: &Ctx, cmd: KernelCmd) -> Result<Outcome> {
    match cmd {
        KernelCmd::Gaussian { disc, y } => {
            let series = CoefficientSeries::new(disc)?;
            ctx.report(&gaussian_weighted_sum::<f64>(&series, y, ctx.config.gaussian_cap)?)?;
        }
        KernelCmd::Contour { disc, y, height } => {
            let series = CoefficientSeries::new(disc)?;
            ctx.report(&contour_integral_gaussian(&series, y, height, ctx.config.tol)?)?;
        }
        KernelCmd::Window { disc, y, delta } => {
            let series = CoefficientSeries::new(disc)?;
            ctx.report(&window_mass(&series, y, delta, ctx.config.gaussian_cap)?)?;
        }
        KernelCmd::PrimeSum { chi, log_y, delta } => {
            let c = chi.character()?;
            let y = log_y.exp();
            let sum = weighted_prime_sum(&c, y, delta)?;
            let main = kernel_constant(delta) * log_y * log_y;
            ctx.report(&json!({
                "modulus": c.modulus(),
                "index": c.index(),
                "y": y,
                "delta": delta,
                "sum_re": sum.re,
                "sum_im": sum.im,
                "main_term": main,
                "ratio": sum.re / main,
            }))?;
        }
        KernelCmd::ZeroSum { chi, y, delta, vartheta, rect } => {
            let c = chi.character()?;
            let scan = scan_zeros(&c, rect, ctx.scan_options())?;
            let log_q = (c.modulus() as f64).ln();
            let sum = zero_side_sum(&scan.zeros, y, delta, log_q, vartheta)?;
            ctx.report(&json!({ "scan": scan, "zero_sum": sum }))?;
        }
        KernelCmd::Plan { ell, theta, xi } => {
            ctx.report(&qt_plan(ell, theta, xi)?)?;
        }
    }
    Ok(Outcome::Done)
}

fn run_field(ctx: &Ctx, cmd: FieldCmd) -> Result<Outcome> {
    match cmd {
        FieldCmd::Disc { d, cubic } => {
            if cubic {
                let d = u64::try_from(d).map_err(|_| Error::InvalidParameter(format!("need d > 1, got {d}")))?;
                ctx.report(&pure_cubic_discriminant(d)?)?;
            } else {
                ctx.report(&json!({ "d": d, "disc": fundamental_discriminant(d)? }))?;
            }
        }
        FieldCmd::Classgroup { disc } => {
            let g = ctx.class_group(disc)?;
            let mut out = json!({ "disc": disc, "divisors": g.divisors, "h": g.h });
            if g.narrow {
                out["narrow"] = json!(true);
            }
            ctx.report(&out)?;
        }
        FieldCmd::Torsion { disc, ell } => {
            let g = ctx.class_group(disc)?;
            let h_ell = ell_torsion(&g, ell)?;
            ctx.report(&json!({ "disc": disc, "ell": ell, "h": g.h, "h_ell": h_ell, "narrow": g.narrow }))?;
        }
        FieldCmd::Split { kind, disc, modulus, index, x } => {
            let need_disc = || disc.ok_or_else(|| Error::InvalidParameter("--disc is required for this kind".into()));
            let kind = match kind {
                SplitKindArg::Quadratic => SplitKind::Quadratic(need_disc()?),
                SplitKindArg::PureCubic => {
                    let d = need_disc()?;
                    SplitKind::PureCubic(u64::try_from(d).map_err(|_| Error::InvalidParameter(format!("radicand {d}")))?)
                }
                SplitKindArg::NoncyclicCubic => SplitKind::NonCyclicCubic(need_disc()?),
                SplitKindArg::CyclicCubic => {
                    let (Some(q), Some(i)) = (modulus, index) else {
                        return Err(Error::InvalidParameter("--modulus and --index are required".into()));
                    };
                    SplitKind::CyclicCubic(DirichletCharacter::from_index(q, i)?)
                }
            };
            ctx.report(&split_prime_count(&kind, x)?)?;
        }
        FieldCmd::Ideals { disc, x } => {
            ctx.report(&json!({ "disc": disc, "x": x, "m": squarefree_norm_ideal_count(disc, x)? }))?;
        }
        FieldCmd::Family { max, smooth_exponent, signature, count } => {
            let family = smooth_family(max, smooth_exponent, signature.filter(), count)?;
            let mut out = std::io::stdout().lock();
            for d in family {
                writeln!(out, "{d}")?;
            }
        }
    }
    Ok(Outcome::Done)
}

fn read_family(path: &PathBuf) -> Result<Vec<i64>> {
    let text = std::fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        out.push(line.parse().map_err(|e| Error::Parse { line: i as u64 + 1, message: format!("{line}: {e}") })?);
    }
    Ok(out)
}

fn run_experiment(ctx: &Ctx, cmd: ExperimentCmd) -> Result<Outcome> {
    match cmd {
        ExperimentCmd::Quadratic { family_file, family_count, signature, bound, ideals } => {
            let family = match (family_file, family_count) {
                (Some(path), _) => read_family(&path)?,
                (None, Some(n)) => {
                    let mut limit = 64u64.max(4 * n as u64);
                    loop {
                        let f = smooth_family(limit, 1.0, signature.filter(), Some(n))?;
                        if f.len() == n {
                            break f;
                        }
                        limit *= 2;
                    }
                }
                (None, None) => {
                    return Err(Error::InvalidParameter("one of --family-file, --family-count is required".into()))
                }
            };
            let params = ExperimentParams { ell: bound.ell, varpi: bound.varpi, epsilon: bound.epsilon };
            let mut cache = ctx.cache()?;
            let rows = run_quadratic_experiment(&family, params, ideals, cache.as_mut())?;
            ctx.experiment_rows(bound.out.as_ref(), &rows)?;
        }
        ExperimentCmd::PureCubic { d_min, d_max, bound, ingest } => {
            let records = match ingest {
                Some(p) => ingest_class_numbers(&p)?,
                None => Vec::new(),
            };
            let params = ExperimentParams { ell: bound.ell, varpi: bound.varpi, epsilon: bound.epsilon };
            let rows = run_pure_cubic_experiment(d_min..=d_max, params, &records)?;
            ctx.experiment_rows(bound.out.as_ref(), &rows)?;
        }
        ExperimentCmd::HlgrCheck { k, delta, ell } => {
            let exact = hlgr_parameter_check_exact(k, &delta, ell)?;
            let float = hlgr_parameter_check(k, delta.to_f64().unwrap_or(f64::NAN), ell)?;
            ctx.report(&json!({
                "k": k,
                "ell": ell,
                "l": exact.l,
                "delta": exact.delta.to_string(),
                "theta": exact.theta.to_string(),
                "xi": exact.xi.to_string(),
                "threshold": exact.threshold.to_string(),
                "theta_f64": float.theta,
                "xi_f64": float.xi,
                "threshold_f64": float.threshold,
                "pass": exact.pass,
            }))?;
            if !exact.pass {
                return Ok(Outcome::Violation);
            }
        }
    }
    Ok(Outcome::Done)
}
