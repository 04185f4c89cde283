//! End-to-end analysis and report rendering.

use std::fmt;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::evolution::{
    classify_small_world, correlate_attachment, proxy_series, static_attributes, CorrelationReport,
    ProxyRow, SmallWorldThresholds, SmallWorldVerdict, StaticAttribute, DEFAULT_STATIC_TOLERANCE,
};
use crate::graph::{build_cumulative_snapshots_with_actors, GraphSnapshot, Timestamp, Warning};
use crate::ingest::{load_interactions, InputKind, Interactions};
use crate::metrics::{degree_histogram, metrics_row, MetricsRow};
use crate::powerlaw::{fit_powerlaw, PowerLawFit};

/// Environment variable capping the number of analysis threads.
pub const THREADS_ENV: &str = "NETEVOLVE_THREADS";

/// How interactions are cut into cumulative periods.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Slicing {
    /// Explicit inclusive period ends.
    Breakpoints(Vec<Timestamp>),
    /// One period per calendar year from the first to the last year seen.
    Yearly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    /// Input file; `-` reads standard input.
    pub input: PathBuf,
    pub kind: InputKind,
    pub slicing: Slicing,
    /// Period labels; defaults to `T1, T1-T2, ..` for breakpoints and the
    /// year for yearly slicing.
    pub labels: Option<Vec<String>>,
    pub thresholds: SmallWorldThresholds,
    pub static_tolerance: f64,
    /// Worker threads; `None` uses the ambient pool.
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl AnalysisConfig {
    pub fn new(input: impl Into<PathBuf>, kind: InputKind, slicing: Slicing) -> Self {
        AnalysisConfig {
            input: input.into(),
            kind,
            slicing,
            labels: None,
            thresholds: SmallWorldThresholds::default(),
            static_tolerance: DEFAULT_STATIC_TOLERANCE,
            threads: None,
        }
    }
}

/// Pipeline stage at which an analysis failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Config,
    Ingest,
    Snapshots,
    Analysis,
}

impl Stage {
    /// Process exit status for failures at this stage.
    pub fn exit_code(self) -> i32 {
        match self {
            Stage::Config => 2,
            Stage::Ingest => 3,
            Stage::Snapshots | Stage::Analysis => 4,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Config => "config",
            Stage::Ingest => "ingest",
            Stage::Snapshots => "snapshots",
            Stage::Analysis => "analysis",
        })
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{stage} stage failed: {source}")]
pub struct AnalysisError {
    pub stage: Stage,
    #[source]
    pub source: Error,
}

impl AnalysisError {
    pub fn exit_code(&self) -> i32 {
        match (&self.source, self.stage) {
            (Error::Io { .. } | Error::Parse { .. }, _) => 3,
            (_, stage) => stage.exit_code(),
        }
    }

    /// One-line machine-readable description.
    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": {
                "stage": self.stage,
                "message": self.source.to_string(),
                "exit_code": self.exit_code(),
            }
        })
        .to_string()
    }
}

fn at(stage: Stage) -> impl FnOnce(Error) -> AnalysisError {
    move |source| AnalysisError { stage, source }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub bytes: u64,
    pub sha256: String,
}

impl InputDigest {
    pub fn of(path: &Path, bytes: &[u8]) -> Self {
        let digest = Sha256::digest(bytes);
        InputDigest {
            path: path.display().to_string(),
            bytes: bytes.len() as u64,
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool: String,
    pub inputs: Vec<InputDigest>,
    pub config: AnalysisConfig,
    /// Conventions behind the reported measures.
    pub notes: Vec<String>,
}

const NOTES: [&str; 4] = [
    "density_weighted = 2*sum_links/(N(N-1)); density_simple = 2*links/(N(N-1))",
    "diameter is measured on the giant component; avg_distance averages over all reachable pairs of the whole graph",
    "clustering is the mean local coefficient over all actors, actors with degree < 2 counting as 0",
    "power_law_lambda is the negated least-squares slope of log10(count) on log10(degree) over occupied degrees >= 1",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodFit {
    pub label: String,
    pub fit: Option<PowerLawFit>,
}

/// Everything one analysis produces, aligned by period label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub rows: Vec<MetricsRow>,
    pub fits: Vec<PeriodFit>,
    pub proxies: Vec<ProxyRow>,
    pub correlations: CorrelationReport,
    pub static_attributes: Vec<StaticAttribute>,
    pub verdicts: Vec<SmallWorldVerdict>,
    pub warnings: Vec<Warning>,
    pub provenance: Provenance,
}

fn default_breakpoint_labels(n: usize) -> Vec<String> {
    (1..=n)
        .map(|k| if k == 1 { "T1".to_string() } else { format!("T1-T{k}") })
        .collect()
}

/// Re-stamps every interaction with its calendar year and returns the
/// contiguous year range as breakpoints.
fn yearly(interactions: &mut Interactions) -> Result<Vec<Timestamp>> {
    for e in &mut interactions.events {
        e.time = Timestamp::Period(e.time.year());
    }
    for a in &mut interactions.arrivals {
        a.time = Timestamp::Period(a.time.year());
    }
    let years = interactions
        .events
        .iter()
        .map(|e| e.time)
        .chain(interactions.arrivals.iter().map(|a| a.time));
    let (min, max) = years.fold((None, None), |(lo, hi): (Option<Timestamp>, Option<Timestamp>), t| {
        (Some(lo.map_or(t, |l| l.min(t))), Some(hi.map_or(t, |h| h.max(t))))
    });
    match (min, max) {
        (Some(Timestamp::Period(lo)), Some(Timestamp::Period(hi))) => {
            Ok((lo..=hi).map(Timestamp::Period).collect())
        }
        _ => Err(Error::invalid("yearly slicing needs at least one dated interaction")),
    }
}

/// Builds the cumulative snapshots described by `config` from raw input.
pub fn build_snapshots(
    config: &AnalysisConfig,
    bytes: &[u8],
) -> std::result::Result<(Vec<GraphSnapshot>, Vec<Warning>), AnalysisError> {
    let mut interactions = load_interactions(bytes, config.kind, &config.input).map_err(at(Stage::Ingest))?;
    let (breakpoints, default_labels) = match &config.slicing {
        Slicing::Breakpoints(bps) => (bps.clone(), default_breakpoint_labels(bps.len())),
        Slicing::Yearly => {
            let years = yearly(&mut interactions).map_err(at(Stage::Config))?;
            let labels = years.iter().map(|y| y.to_string()).collect();
            (years, labels)
        }
    };
    let labels = config.labels.clone().unwrap_or(default_labels);
    let built = build_cumulative_snapshots_with_actors(
        &interactions.events,
        &interactions.arrivals,
        &breakpoints,
        &labels,
    )
    .map_err(at(Stage::Config))?;
    let mut warnings = interactions.warnings;
    warnings.extend(built.warnings);
    Ok((built.snapshots, warnings))
}

/// Per-period results of [`analyze_snapshots`].
#[derive(Clone, Debug, PartialEq)]
pub struct Analysis {
    pub rows: Vec<MetricsRow>,
    pub fits: Vec<PeriodFit>,
    pub proxies: Vec<ProxyRow>,
    pub correlations: CorrelationReport,
    pub static_attributes: Vec<StaticAttribute>,
    pub verdicts: Vec<SmallWorldVerdict>,
}

/// Full analysis of already-built snapshots.
pub fn analyze_snapshots(
    snapshots: &[GraphSnapshot],
    thresholds: &SmallWorldThresholds,
    static_tolerance: f64,
) -> Result<Analysis> {
    let rows: Vec<MetricsRow> = snapshots.par_iter().map(metrics_row).collect();
    let fits: Vec<PeriodFit> = snapshots
        .par_iter()
        .map(|s| PeriodFit {
            label: s.label().to_owned(),
            fit: fit_powerlaw(&degree_histogram(s)).ok(),
        })
        .collect();
    let proxies = proxy_series(snapshots)?;
    let correlations = correlate_attachment(&proxies, &rows)?;
    let statics = if rows.len() >= 2 {
        static_attributes(&rows, static_tolerance)?
    } else {
        Vec::new()
    };
    let verdicts = rows
        .iter()
        .zip(&fits)
        .map(|(row, f)| classify_small_world(row, f.fit.as_ref(), thresholds))
        .collect();
    Ok(Analysis {
        rows,
        fits,
        proxies,
        correlations,
        static_attributes: statics,
        verdicts,
    })
}

fn read_input(path: &Path) -> Result<Vec<u8>> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        io::Read::read_to_end(&mut io::stdin(), &mut buf).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })?;
        Ok(buf)
    } else {
        std::fs::read(path).map_err(|source| Error::Io {
            path: path.to_owned(),
            source,
        })
    }
}

/// Reads the configured input and runs the whole pipeline.
pub fn run_analysis(config: &AnalysisConfig) -> std::result::Result<ReportBundle, AnalysisError> {
    let bytes = read_input(&config.input).map_err(at(Stage::Ingest))?;
    run_analysis_on(config, &bytes)
}

/// [`run_analysis`] on input bytes already in memory.
pub fn run_analysis_on(config: &AnalysisConfig, bytes: &[u8]) -> std::result::Result<ReportBundle, AnalysisError> {
    if !(config.static_tolerance > 0.0 && config.static_tolerance <= 1.0) {
        return Err(AnalysisError {
            stage: Stage::Config,
            source: Error::invalid("static tolerance must lie in (0, 1]"),
        });
    }
    match config.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build()
                .map_err(|e| AnalysisError {
                    stage: Stage::Config,
                    source: Error::invalid(e.to_string()),
                })?;
            pool.install(|| pipeline(config, bytes))
        }
        None => pipeline(config, bytes),
    }
}

fn pipeline(config: &AnalysisConfig, bytes: &[u8]) -> std::result::Result<ReportBundle, AnalysisError> {
    let (snapshots, warnings) = build_snapshots(config, bytes)?;
    let analysis =
        analyze_snapshots(&snapshots, &config.thresholds, config.static_tolerance).map_err(at(Stage::Analysis))?;
    Ok(ReportBundle {
        rows: analysis.rows,
        fits: analysis.fits,
        proxies: analysis.proxies,
        correlations: analysis.correlations,
        static_attributes: analysis.static_attributes,
        verdicts: analysis.verdicts,
        warnings,
        provenance: Provenance {
            tool: format!("netevolve {}", env!("CARGO_PKG_VERSION")),
            inputs: vec![InputDigest::of(&config.input, bytes)],
            config: config.clone(),
            notes: NOTES.iter().map(|s| s.to_string()).collect(),
        },
    })
}

/// Thread cap from [`THREADS_ENV`], if set to a positive integer.
pub fn threads_from_env() -> Option<usize> {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::invalid(format!("unknown format {other:?}"))),
        }
    }
}

/// Column order of the CSV metrics table.
pub const CSV_COLUMNS: [&str; 18] = [
    "period",
    "actors",
    "links",
    "sum_links",
    "density_pct",
    "density_simple_pct",
    "clustering",
    "diameter",
    "avg_distance",
    "power_law_lambda",
    "power_law_r2",
    "assortativity",
    "avg_neighbor_degree",
    "avg_strength",
    "centralization_degree",
    "centralization_betweenness",
    "centralization_closeness",
    "small_world",
];

fn cell(value: Option<f64>, decimals: usize) -> String {
    value.map_or_else(String::new, |v| format!("{v:.decimals$}"))
}

fn pct(value: Option<f64>) -> String {
    cell(value.map(|v| v * 100.0), 1)
}

/// Writes the per-period metrics table as CSV. Undefined cells are empty;
/// densities are percentages with one decimal.
pub fn write_csv<W: Write>(bundle: &ReportBundle, writer: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(CSV_COLUMNS)?;
    for (row, verdict) in bundle.rows.iter().zip(&bundle.verdicts) {
        w.write_record([
            row.label.clone(),
            row.n_actors.to_string(),
            row.n_links.to_string(),
            row.sum_links.to_string(),
            pct(row.density_weighted),
            pct(row.density_simple),
            cell(row.clustering, 2),
            row.diameter.map_or_else(String::new, |d| d.to_string()),
            cell(row.avg_distance, 2),
            cell(row.power_law_lambda, 2),
            cell(row.power_law_r_squared, 2),
            cell(row.assortativity, 3),
            cell(row.avg_neighbor_degree, 3),
            cell(row.avg_strength, 3),
            cell(row.centralization_degree, 4),
            cell(row.centralization_betweenness, 4),
            cell(row.centralization_closeness, 4),
            verdict.verdict.map_or_else(String::new, |v| v.to_string()),
        ])?;
    }
    w.flush()
}

pub fn write_json<W: Write>(bundle: &ReportBundle, mut writer: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut writer, bundle)?;
    writer.write_all(b"\n")
}

pub fn write_bundle<W: Write>(bundle: &ReportBundle, format: OutputFormat, writer: W) -> io::Result<()> {
    match format {
        OutputFormat::Csv => write_csv(bundle, writer),
        OutputFormat::Json => write_json(bundle, writer),
    }
}

/// Human-readable summary: verdicts, static measures and driver ranking.
pub fn write_summary<W: Write>(bundle: &ReportBundle, mut w: W) -> io::Result<()> {
    writeln!(w, "periods: {}", bundle.rows.len())?;
    for v in &bundle.verdicts {
        let verdict = match v.verdict {
            Some(true) => "small-world".to_string(),
            Some(false) => format!("not small-world (fails: {})", v.failing_flags().join(", ")),
            None => format!("undetermined (undefined: {})", v.undefined_flags().join(", ")),
        };
        writeln!(w, "  {:<12} {verdict}", v.label)?;
    }
    let statics: Vec<&str> = bundle
        .static_attributes
        .iter()
        .filter(|a| a.is_static)
        .map(|a| a.metric.as_str())
        .collect();
    writeln!(w, "static measures: {}", if statics.is_empty() { "none".into() } else { statics.join(", ") })?;
    let drivers: Vec<&str> = bundle.correlations.ranked_drivers.iter().map(|p| p.name()).collect();
    writeln!(
        w,
        "drivers of {} centralization: {}",
        bundle.correlations.ranked_against.name(),
        if drivers.is_empty() { "none".into() } else { drivers.join(" > ") }
    )?;
    if !bundle.warnings.is_empty() {
        writeln!(w, "warnings: {}", bundle.warnings.len())?;
    }
    Ok(())
}

/// Parses a comma-separated breakpoint list.
pub fn parse_breakpoints(list: &str) -> Result<Vec<Timestamp>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect()
}
