//! Command-line interface: dimension traces as CSV, explicit-layer
//! verification, and convergence diagnostics.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use wreathdim::arithmetic::{ln2, ArithCtx};
use wreathdim::construction::{explicit_layers, layer_recursion, verify_layer, VerifyOptions};
use wreathdim::dimension::{claim_diagnostics, dimension_trace, growth_diagnostics, write_csv};
use wreathdim::sequences::{goodness_check, Family, PermGroupSpec, SequenceSpec};
use wreathdim::{Error, Result};

const PRECISION_ENV: &str = "WREATHDIM_PRECISION";

#[derive(Parser)]
#[command(
    name = "wreathdim",
    version,
    about = "Dimension quotients of layered subgroups of iterated wreath products in product action"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the layer recursion and write the dimension trace as CSV
    Compute(ComputeArgs),
    /// Build explicit layers and verify them against the recursion
    Verify(VerifyArgs),
    /// Goodness, growth and limit diagnostics
    Diagnose(DiagnoseArgs),
}

#[derive(Args)]
struct SeqArgs {
    /// named family for a constant sequence: sym | alt | cyc
    #[arg(long, conflicts_with = "spec")]
    family: Option<String>,
    /// degree for --family
    #[arg(long, requires = "family")]
    degree: Option<usize>,
    /// sequence-spec file (TOML); see the repository README for the format
    #[arg(long)]
    spec: Option<PathBuf>,
}

impl SeqArgs {
    fn build(&self) -> Result<SequenceSpec> {
        match (&self.family, &self.spec) {
            (Some(fam), None) => {
                let degree = self
                    .degree
                    .ok_or_else(|| Error::Validation("--family needs --degree".into()))?;
                let spec = match Family::parse(fam)? {
                    Family::Symmetric => PermGroupSpec::symmetric(degree)?,
                    Family::Alternating => PermGroupSpec::alternating(degree)?,
                    Family::Cyclic => PermGroupSpec::cyclic(degree)?,
                    Family::Custom => {
                        return Err(Error::Validation("custom groups need a --spec file".into()))
                    }
                };
                SequenceSpec::constant(spec)
            }
            (None, Some(path)) => SequenceSpec::from_file(path),
            _ => Err(Error::Validation(
                "specify either --family/--degree or --spec FILE".into(),
            )),
        }
    }
}

#[derive(Args)]
struct CommonArgs {
    #[command(flatten)]
    seq: SeqArgs,
    /// dimension target as an exact fraction, e.g. 1/2 or 0/1
    #[arg(long)]
    alpha: String,
    /// number of levels to compute
    #[arg(long, default_value_t = 10)]
    levels: usize,
    /// significand precision in bits (default: $WREATHDIM_PRECISION or 256)
    #[arg(long)]
    precision: Option<u32>,
    /// promotion threshold in bits for exact integers
    #[arg(long, default_value_t = 1 << 20)]
    threshold: u64,
}

impl CommonArgs {
    fn ctx(&self) -> Result<ArithCtx> {
        let precision = match self.precision {
            Some(p) => p,
            None => match std::env::var(PRECISION_ENV) {
                Ok(v) => v
                    .parse()
                    .map_err(|_| Error::Validation(format!("invalid {PRECISION_ENV} value '{v}'")))?,
                Err(_) => 256,
            },
        };
        if precision < 64 {
            return Err(Error::Validation(
                "precision must be at least 64 bits".into(),
            ));
        }
        Ok(ArithCtx::new(precision, self.threshold))
    }

    fn alpha(&self) -> Result<BigRational> {
        parse_alpha(&self.alpha)
    }
}

#[derive(Args)]
struct ComputeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// output CSV path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// cap on explicit product-domain size
    #[arg(long, default_value_t = 1 << 20)]
    max_points: usize,
}

#[derive(Args)]
struct DiagnoseArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// comma-separated growth constants for the threshold table
    #[arg(long, default_value = "2")]
    c_list: String,
}

fn parse_alpha(text: &str) -> Result<BigRational> {
    let (p, q) = text.split_once('/').ok_or_else(|| {
        Error::Validation(format!("alpha must be an exact fraction p/q, got '{text}'"))
    })?;
    let p = BigInt::from_str(p.trim())
        .map_err(|_| Error::Validation(format!("invalid numerator '{p}'")))?;
    let q = BigInt::from_str(q.trim())
        .map_err(|_| Error::Validation(format!("invalid denominator '{q}'")))?;
    if q.is_zero() {
        return Err(Error::Validation("alpha denominator must be nonzero".into()));
    }
    let alpha = BigRational::new(p, q);
    if alpha.is_negative() || alpha > BigRational::one() {
        return Err(Error::Validation(format!(
            "alpha must lie in [0, 1], got {alpha}"
        )));
    }
    Ok(alpha)
}

fn parse_c_list(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Validation(format!("invalid constant '{t}' in --c-list")))
        })
        .collect()
}

fn cmd_compute(args: &ComputeArgs) -> Result<()> {
    let seq = args.common.seq.build()?;
    let alpha = args.common.alpha()?;
    let ctx = args.common.ctx()?;
    let layers = layer_recursion(&seq, &alpha, args.common.levels, &ctx)?;
    let trace = dimension_trace(&layers, &seq, &alpha, &ctx)?;
    match &args.out {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            write_csv(&trace, &mut f)?;
        }
        None => {
            let stdout = std::io::stdout();
            write_csv(&trace, &mut stdout.lock())?;
        }
    }
    let last = trace.final_row();
    let mut summary = format!(
        "sequence {} alpha {}: D_{} = {}",
        trace.sequence, trace.alpha, last.level, last.d_value
    );
    if let Some(exact) = &last.d_exact {
        summary.push_str(&format!(" (exactly {exact})"));
    }
    summary.push_str(&format!(", residual = {}", last.residual));
    match &last.floor_error_ln {
        None => summary.push_str(", floor error bound = 0"),
        Some(ln) => {
            let l2 = ln.div(&ln2(ln.precision()));
            summary.push_str(&format!(", floor error bound = 2^{}", l2.to_sci()));
        }
    }
    eprintln!("{summary}");
    Ok(())
}

fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let seq = args.common.seq.build()?;
    let alpha = args.common.alpha()?;
    let ctx = args.common.ctx()?;
    let build = explicit_layers(&seq, &alpha, args.max_points, args.common.levels)?;
    if build.layers.is_empty() {
        println!("no explicit levels fit under {} points", args.max_points);
        return Ok(());
    }
    let params = layer_recursion(&seq, &alpha, args.common.levels, &ctx)?;
    let opts = VerifyOptions::default();
    let mut all_pass = true;
    for layer in &build.layers {
        let report = verify_layer(layer, &params, &seq, &opts)?;
        for check in &report.checks {
            let verdict = if check.pass { "PASS" } else { "FAIL" };
            println!(
                "level {} {:<20} {}  ({})",
                report.level, check.name, verdict, check.detail
            );
            all_pass &= check.pass;
        }
        let mins: Vec<u32> = layer
            .selected_orbits
            .iter()
            .map(|&i| layer.partition.orbits[i].min_point())
            .collect();
        println!(
            "level {} selected {} of {} orbits; minimal points {:?}",
            layer.level,
            layer.selected_orbits.len(),
            layer.orbit_count(),
            mins
        );
        if layer.domain.points() <= 1024 {
            println!("{}", layer.to_text());
        }
    }
    if let Some(at) = build.truncated_at {
        println!(
            "level {} exceeds {} points; explicit construction truncated (the recursion continues alone)",
            at, args.max_points
        );
    }
    if all_pass {
        println!("all checks passed");
        Ok(())
    } else {
        Err(Error::Inconsistency(
            "explicit layers disagree with the recursion".into(),
        ))
    }
}

fn cmd_diagnose(args: &DiagnoseArgs) -> Result<()> {
    let seq = args.common.seq.build()?;
    let alpha = args.common.alpha()?;
    let ctx = args.common.ctx()?;
    let c_list = parse_c_list(&args.c_list)?;
    let levels = args.common.levels;

    let goodness = goodness_check(&seq, levels.max(2))?;
    println!("sequence: {}", seq.describe());
    println!(
        "goodness over horizon {}: {}{}, A = {} (~{:.6}), M0 = {}",
        goodness.horizon,
        if goodness.is_good { "good" } else { "NOT good" },
        match goodness.analytic {
            Some(true) => " (analytically good tail)",
            Some(false) => " (analytically not good)",
            None => "",
        },
        goodness.a_constant,
        goodness.a_f64(),
        goodness.m0
    );
    if let Some(k) = goodness.counterexample {
        println!("  worst ratio at level {k}");
    }
    if !goodness.is_good {
        println!("  diagnostics below are advisory: no convergence promise for this sequence");
    }

    // one extra level so the selected fraction is defined at the horizon
    let layers = layer_recursion(&seq, &alpha, levels + 1, &ctx)?;
    let growth = growth_diagnostics(&layers, &c_list)?;
    println!("\ndomain growth (every level satisfies size >= level):");
    for (n, r) in &growth.ratios {
        if *n <= levels {
            println!("  level {n}: previous/current = {r:e}");
        }
    }
    for (c, m) in &growth.thresholds {
        println!("  M({c}) = {m} (valid over the computed horizon)");
    }

    let claims = claim_diagnostics(&layers, &alpha, &c_list, &ctx)?;
    println!(
        "\nterm-growth thresholds: M(2) = {}, M-hat = {}",
        claims.m2, claims.m_hat
    );
    for (c, m) in &claims.thresholds {
        println!("  term M({c}) = {m}");
    }
    println!("\nper-level diagnostics (selected fraction tends to alpha = {alpha}):");
    println!(
        "  n   selected-fraction  sum_a/a_n    sum_b/b_n    a_(n-1)/a_n  x2-growth  tail<=2a_n  full<=3a_n"
    );
    for row in claims.rows.iter().filter(|r| r.level <= levels) {
        let fmt_opt = |v: Option<f64>| match v {
            Some(x) => format!("{x:.9}"),
            None => "-".into(),
        };
        let fmt_bool = |v: Option<bool>| match v {
            Some(true) => "ok",
            Some(false) => "VIOLATED",
            None => "-",
        };
        println!(
            "  {:<3} {:<18} {:<12} {:<12} {:<12e} {:<10} {:<11} {}",
            row.level,
            fmt_opt(row.support_ratio),
            fmt_opt(row.sum_a_ratio),
            fmt_opt(row.sum_b_ratio),
            row.head_ratio.unwrap_or(f64::NAN),
            fmt_bool(row.doubling_ok),
            fmt_bool(row.tail_sum_ok),
            fmt_bool(row.full_sum_ok),
        );
    }
    Ok(())
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    match &cli.command {
        Command::Compute(args) => cmd_compute(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Diagnose(args) => cmd_diagnose(args),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
