//! Batch drivers for spin-chain entanglement studies.
//!
//! Every scan subcommand accepts a JSON config file whose keys mirror the
//! flags; flags override file values. Exit codes: 0 success, 1 config error,
//! 2 solver failure, 3 I/O error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spinchain::scan::{
    aklt_check, classify_pairs, emit, find_threshold, fit_exponential, read_two_column_csv,
    scan_dimer, scan_probes, scan_spin1, Cell, OutputFormat, RunConfig, RunMetadata, Table,
    ThresholdOutcome,
};
use spinchain::Error;

#[derive(Parser)]
#[command(name = "spinchain", version, about = "Exact-diagonalization scans of long-distance entanglement in spin chains")]
struct Cli {
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// End-to-end concurrence scan of the dimerized-frustrated chain.
    ScanDimer(ScanArgs),
    /// Dimerization threshold delta_T by bisection, per (alpha, L) pair.
    Threshold(ThresholdArgs),
    /// Bilinear-biquadratic spin-1 chain scan.
    ScanSpin1(ScanArgs),
    /// Probe-to-probe concurrence on a periodic Heisenberg ring.
    ScanProbes(ScanArgs),
    /// Solver output against closed-form values at the VBS point beta = 1/3.
    AkltCheck(ScanArgs),
    /// Classify (zz, charge) pairs from a CSV as entangled or separable.
    Classify(ClassifyArgs),
    /// Fit value(L) = E_inf + b exp(-L/xi) to (l, value) CSV data.
    Fit(FitArgs),
}

#[derive(Args, Clone)]
struct ScanArgs {
    /// JSON config file; flags given here override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Chain lengths: comma list "8,12,16" or range "8:16:4".
    #[arg(short = 'L', long)]
    lengths: Option<String>,
    /// Dimerization grid (dimer scan).
    #[arg(long)]
    delta: Option<String>,
    /// Frustration grid (dimer scan).
    #[arg(long)]
    alpha: Option<String>,
    /// Biquadratic coupling grid (spin-1 scan).
    #[arg(long)]
    beta: Option<String>,
    /// Probe coupling grid (probe scan).
    #[arg(long)]
    jp: Option<String>,
    /// Probe offset grid (probe scan).
    #[arg(long)]
    dist: Option<String>,
    /// Twice the total S^z of the solved sector.
    #[arg(long)]
    two_sz: Option<i64>,
    /// Eigenpairs per grid point.
    #[arg(short, long)]
    k: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output path; stdout when omitted.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// Lift the desk-scale length caps.
    #[arg(long)]
    allow_large: bool,
    /// Direct-address index table budget in MiB.
    #[arg(long)]
    table_budget_mb: Option<usize>,
}

#[derive(Args)]
struct ThresholdArgs {
    #[command(flatten)]
    scan: ScanArgs,
    /// Bisection bracket tolerance on delta (>= 1e-4).
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Args)]
struct ClassifyArgs {
    /// CSV with a header row containing zz and charge columns.
    #[arg(short, long)]
    input: PathBuf,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

#[derive(Args)]
struct FitArgs {
    /// CSV with a header row containing l and value columns.
    #[arg(short, long)]
    input: PathBuf,
    /// Fit the alternating-sign variant b * (-1)^L exp(-L/xi).
    #[arg(long)]
    alternating: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
    #[arg(long)]
    format: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are not errors.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(threads) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io { .. } => 3,
        Error::NoConvergence { .. } | Error::KExceedsDimension { .. } => 2,
        _ => 1,
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::ScanDimer(args) => {
            let cfg = resolve_config(&args)?;
            let table = scan_dimer(&cfg)?;
            write_out(&cfg, "dimer-frustrated", table)
        }
        Command::ScanSpin1(args) => {
            let cfg = resolve_config(&args)?;
            let table = scan_spin1(&cfg)?;
            write_out(&cfg, "bilinear-biquadratic", table)
        }
        Command::ScanProbes(args) => {
            let cfg = resolve_config(&args)?;
            let table = scan_probes(&cfg)?;
            write_out(&cfg, "probed-heisenberg", table)
        }
        Command::AkltCheck(args) => {
            let cfg = resolve_config(&args)?;
            let table = aklt_check(&cfg)?;
            write_out(&cfg, "aklt-check", table)
        }
        Command::Threshold(args) => {
            let mut cfg = resolve_config(&args.scan)?;
            if let Some(tol) = args.tol {
                cfg.threshold_tol = tol;
            }
            let tol = cfg.threshold_tol;
            if cfg.lengths.is_empty() || cfg.alphas.is_empty() {
                return Err(Error::InvalidParameter(
                    "threshold needs non-empty lengths and alpha grids".into(),
                ));
            }
            let mut table = Table::new(vec!["alpha", "l", "delta_t", "bracket_width", "status"]);
            for &l in &cfg.lengths {
                for &alpha in &cfg.alphas {
                    let row = match find_threshold(alpha, l, tol, cfg.seed) {
                        Ok(r) => match r.outcome {
                            ThresholdOutcome::Found {
                                delta_t,
                                bracket_width,
                            } => vec![
                                Cell::Float(alpha),
                                Cell::Int(l as i64),
                                Cell::Float(delta_t),
                                Cell::Float(bracket_width),
                                Cell::Text("found".into()),
                            ],
                            ThresholdOutcome::NoThreshold => vec![
                                Cell::Float(alpha),
                                Cell::Int(l as i64),
                                Cell::Float(f64::NAN),
                                Cell::Float(f64::NAN),
                                Cell::Text("no_threshold".into()),
                            ],
                        },
                        Err(e) => vec![
                            Cell::Float(alpha),
                            Cell::Int(l as i64),
                            Cell::Float(f64::NAN),
                            Cell::Float(f64::NAN),
                            Cell::Text(format!("error: {e}")),
                        ],
                    };
                    table.push_row(row);
                }
            }
            write_out(&cfg, "dimer-threshold", table)
        }
        Command::Classify(args) => {
            let pairs = read_two_column_csv(&args.input, "zz", "charge")?;
            let table = classify_pairs(&pairs);
            let format = parse_format(args.format.as_deref())?;
            let meta = RunMetadata::new(
                "su2-qutrit-classify",
                0,
                serde_json::json!({"input": args.input}),
            );
            emit(&table, format, &out_path(args.output.as_ref()), &meta)
        }
        Command::Fit(args) => {
            let rows = read_two_column_csv(&args.input, "l", "value")?;
            let points: Vec<(u32, f64)> = rows
                .iter()
                .map(|&(l, v)| {
                    if l < 0.0 || l.fract() != 0.0 {
                        return Err(Error::Parse(format!("l = {l} is not a non-negative integer")));
                    }
                    Ok((l as u32, v))
                })
                .collect::<Result<_, Error>>()?;
            let fit = fit_exponential(&points, args.alternating)?;
            let mut table = Table::new(vec![
                "e_inf",
                "amplitude",
                "xi",
                "rms_residual",
                "alternating",
                "n_points",
            ]);
            table.push_row(vec![
                Cell::Float(fit.asymptote),
                Cell::Float(fit.amplitude),
                Cell::Float(fit.decay_length),
                Cell::Float(fit.rms_residual),
                Cell::Text(fit.alternating.to_string()),
                Cell::Int(points.len() as i64),
            ]);
            let format = parse_format(args.format.as_deref())?;
            let meta = RunMetadata::new(
                "exponential-fit",
                0,
                serde_json::json!({"input": args.input, "alternating": args.alternating}),
            );
            emit(&table, format, &out_path(args.output.as_ref()), &meta)
        }
    }
}

fn out_path(path: Option<&PathBuf>) -> PathBuf {
    path.cloned().unwrap_or_else(|| PathBuf::from("-"))
}

fn parse_format(s: Option<&str>) -> Result<OutputFormat, Error> {
    s.map_or(Ok(OutputFormat::Csv), str::parse)
}

fn write_out(cfg: &RunConfig, model: &str, table: Table) -> Result<(), Error> {
    let grid = serde_json::to_value(cfg)
        .map_err(|e| Error::Parse(format!("cannot serialize config: {e}")))?;
    let meta = RunMetadata::new(model, cfg.seed, grid);
    emit(&table, cfg.format, &out_path(cfg.output.as_ref()), &meta)
}

/// Config-file values overridden by whichever flags were given.
fn resolve_config(args: &ScanArgs) -> Result<RunConfig, Error> {
    let mut cfg = match &args.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(s) = &args.lengths {
        cfg.lengths = parse_usize_grid(s)?;
    }
    if let Some(s) = &args.delta {
        cfg.deltas = parse_f64_grid(s)?;
    }
    if let Some(s) = &args.alpha {
        cfg.alphas = parse_f64_grid(s)?;
    }
    if let Some(s) = &args.beta {
        cfg.betas = parse_f64_grid(s)?;
    }
    if let Some(s) = &args.jp {
        cfg.probe_couplings = parse_f64_grid(s)?;
    }
    if let Some(s) = &args.dist {
        cfg.distances = parse_usize_grid(s)?;
    }
    if let Some(v) = args.two_sz {
        cfg.two_sz = v;
    }
    if let Some(v) = args.k {
        cfg.k = v;
    }
    if let Some(v) = args.seed {
        cfg.seed = v;
    }
    if let Some(v) = &args.output {
        cfg.output = Some(v.clone());
    }
    if let Some(v) = &args.format {
        cfg.format = v.parse()?;
    }
    if args.allow_large {
        cfg.allow_large = true;
    }
    if let Some(v) = args.table_budget_mb {
        cfg.table_budget_mb = v;
    }
    Ok(cfg)
}

fn load_config(path: &Path) -> Result<RunConfig, Error> {
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    serde_json::from_reader(file)
        .map_err(|e| Error::Parse(format!("config {}: {e}", path.display())))
}

/// "a,b,c" or inclusive "lo:hi:step".
fn parse_f64_grid(s: &str) -> Result<Vec<f64>, Error> {
    let bad = |msg: &str| Error::Parse(format!("grid '{s}': {msg}"));
    if s.contains(':') {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("ranges take the form lo:hi:step"));
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad("bad lower bound"))?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad("bad upper bound"))?;
        let step: f64 = parts[2].trim().parse().map_err(|_| bad("bad step"))?;
        if step <= 0.0 || hi < lo {
            return Err(bad("need step > 0 and hi >= lo"));
        }
        let mut out = Vec::new();
        let n = ((hi - lo) / step + 1e-9).floor() as usize;
        for i in 0..=n {
            out.push(lo + step * i as f64);
        }
        return Ok(out);
    }
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| bad("bad number")))
        .collect()
}

fn parse_usize_grid(s: &str) -> Result<Vec<usize>, Error> {
    parse_f64_grid(s)?
        .into_iter()
        .map(|v| {
            if v < 0.0 || v.fract() != 0.0 {
                Err(Error::Parse(format!(
                    "grid '{s}': {v} is not a non-negative integer"
                )))
            } else {
                Ok(v as usize)
            }
        })
        .collect()
}
