use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use netevolve::generators::{generate_events, GeneratorSpec};
use netevolve::ingest::{write_edge_events, InputKind};
use netevolve::metrics::degree_histogram;
use netevolve::powerlaw::fit_powerlaw;
use netevolve::report::{
    build_snapshots, parse_breakpoints, run_analysis, threads_from_env, write_bundle, write_summary,
    AnalysisConfig, AnalysisError, OutputFormat, ReportBundle, Slicing, Stage,
};
use netevolve::Error;

#[derive(Parser)]
#[command(name = "netevolve", version, about = "Analyse evolving collaboration networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build cumulative snapshots and compute the full report.
    Analyze(AnalyzeArgs),
    /// Emit a seeded synthetic network as edge-event CSV.
    Generate(GenerateArgs),
    /// Write log-log degree points and fitted lines per period.
    Fit(FitArgs),
    /// Re-render a saved JSON report.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Events,
    Publications,
}

impl From<Kind> for InputKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Events => InputKind::Events,
            Kind::Publications => InputKind::Publications,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Args)]
struct InputArgs {
    /// Input file, or `-` for standard input.
    #[arg(short, long, default_value = "-")]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "events")]
    kind: Kind,
    /// Comma-separated inclusive period ends.
    #[arg(long, conflicts_with = "yearly", required_unless_present = "yearly")]
    breakpoints: Option<String>,
    /// One cumulative period per calendar year.
    #[arg(long)]
    yearly: bool,
    /// Comma-separated period labels.
    #[arg(long)]
    labels: Option<String>,
}

impl InputArgs {
    fn config(&self) -> Result<AnalysisConfig, AnalysisError> {
        let slicing = match &self.breakpoints {
            Some(list) => Slicing::Breakpoints(parse_breakpoints(list).map_err(config_error)?),
            None => Slicing::Yearly,
        };
        let mut config = AnalysisConfig::new(self.input.clone(), self.kind.into(), slicing);
        config.labels = self
            .labels
            .as_ref()
            .map(|l| l.split(',').map(|s| s.trim().to_string()).collect());
        config.threads = threads_from_env();
        Ok(config)
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Relative tolerance for flagging a measure as static.
    #[arg(long, default_value_t = 0.10)]
    static_tolerance: f64,
    /// Print a short textual summary to standard error.
    #[arg(long)]
    summary: bool,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    model: ModelArg,
    #[arg(short)]
    n: usize,
    /// BA: edges per arriving node.
    #[arg(short)]
    m: Option<usize>,
    /// ER: edge probability.
    #[arg(short)]
    p: Option<f64>,
    /// WS: neighbors per node (even).
    #[arg(short)]
    k: Option<usize>,
    /// WS: rewiring probability.
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelArg {
    Er,
    Ws,
    Ba,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Directory receiving points.csv and fits.csv.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// JSON bundle written by `analyze --format json`.
    bundle: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Print the textual summary instead of a table.
    #[arg(long)]
    summary: bool,
}

fn config_error(source: Error) -> AnalysisError {
    AnalysisError {
        stage: Stage::Config,
        source,
    }
}

fn io_error(path: &Path) -> impl FnOnce(io::Error) -> AnalysisError + '_ {
    move |source| AnalysisError {
        stage: Stage::Ingest,
        source: Error::Io {
            path: path.to_owned(),
            source,
        },
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>, AnalysisError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(io_error(p))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn analyze(args: &AnalyzeArgs) -> Result<(), AnalysisError> {
    let mut config = args.input.config()?;
    config.static_tolerance = args.static_tolerance;
    let bundle = run_analysis(&config)?;
    for w in &bundle.warnings {
        eprintln!("warning: {w}");
    }
    let target = args.output.as_deref();
    let mut out = output(target)?;
    write_bundle(&bundle, args.format.into(), &mut out)
        .and_then(|_| out.flush())
        .map_err(io_error(target.unwrap_or(Path::new("<stdout>"))))?;
    if args.summary {
        write_summary(&bundle, io::stderr()).ok();
    }
    Ok(())
}

fn generate(args: &GenerateArgs) -> Result<(), AnalysisError> {
    let missing = |what: &str| config_error(Error::InvalidArgument(format!("{what} is required for this model")));
    let spec = match args.model {
        ModelArg::Er => GeneratorSpec::er(args.n, args.p.ok_or_else(|| missing("-p"))?, args.seed),
        ModelArg::Ws => GeneratorSpec::ws(
            args.n,
            args.k.ok_or_else(|| missing("-k"))?,
            args.beta.ok_or_else(|| missing("--beta"))?,
            args.seed,
        ),
        ModelArg::Ba => GeneratorSpec::ba(args.n, args.m.ok_or_else(|| missing("-m"))?, args.seed),
    };
    let events = generate_events(&spec).map_err(config_error)?;
    let target = args.output.as_deref();
    let mut out = output(target)?;
    write_edge_events(&mut out, &events, &[])
        .and_then(|_| out.flush())
        .map_err(io_error(target.unwrap_or(Path::new("<stdout>"))))
}

fn fit(args: &FitArgs) -> Result<(), AnalysisError> {
    let config = args.input.config()?;
    let bytes = if config.input == Path::new("-") {
        let mut buf = Vec::new();
        io::Read::read_to_end(&mut io::stdin(), &mut buf).map_err(io_error(&config.input))?;
        buf
    } else {
        fs::read(&config.input).map_err(io_error(&config.input))?
    };
    let (snapshots, _) = build_snapshots(&config, &bytes)?;
    fs::create_dir_all(&args.out_dir).map_err(io_error(&args.out_dir))?;

    let points_path = args.out_dir.join("points.csv");
    let fits_path = args.out_dir.join("fits.csv");
    let mut points = String::from("period,degree,count,log_degree,log_count\n");
    let mut fits = String::from("period,lambda,intercept,r_squared,n_points,x_start,y_start,x_end,y_end\n");
    for s in &snapshots {
        let hist = degree_histogram(s);
        for (&k, &count) in hist.range(1..) {
            points.push_str(&format!(
                "{},{k},{count},{},{}\n",
                s.label(),
                (k as f64).log10(),
                (count as f64).log10()
            ));
        }
        match fit_powerlaw(&hist) {
            Ok(f) => {
                let x0 = hist.range(1..).next().map_or(0.0, |(&k, _)| (k as f64).log10());
                let x1 = hist.keys().next_back().map_or(0.0, |&k| (k as f64).log10());
                fits.push_str(&format!(
                    "{},{},{},{},{},{x0},{},{x1},{}\n",
                    s.label(),
                    f.lambda,
                    f.intercept,
                    f.r_squared,
                    f.n_points,
                    f.predict(x0),
                    f.predict(x1)
                ));
            }
            Err(e) => eprintln!("warning: period {}: {e}", s.label()),
        }
    }
    fs::write(&points_path, points).map_err(io_error(&points_path))?;
    fs::write(&fits_path, fits).map_err(io_error(&fits_path))
}

fn report(args: &ReportArgs) -> Result<(), AnalysisError> {
    let text = fs::read_to_string(&args.bundle).map_err(io_error(&args.bundle))?;
    let bundle: ReportBundle = serde_json::from_str(&text).map_err(|e| AnalysisError {
        stage: Stage::Ingest,
        source: Error::Parse {
            path: args.bundle.clone(),
            message: e.to_string(),
        },
    })?;
    let mut out = output(None)?;
    let result = if args.summary {
        write_summary(&bundle, &mut out)
    } else {
        write_bundle(&bundle, args.format.into(), &mut out)
    };
    result
        .and_then(|_| out.flush())
        .map_err(io_error(Path::new("<stdout>")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Generate(g) => generate(g),
        Command::Fit(f) => fit(f),
        Command::Report(r) => report(r),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
