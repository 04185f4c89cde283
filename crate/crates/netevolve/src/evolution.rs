//! Longitudinal analyses over a sequence of snapshots.
//!
//! * attachment-logic proxies per period ([`proxy_series`]),
//! * their correlation with network centralization across periods
//!   ([`correlate_attachment`]), which probes how topology changes,
//! * detection of measures that stay put while the network grows
//!   ([`static_attributes`]),
//! * the four-part small-world test ([`classify_small_world`]).

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::GraphSnapshot;
use crate::metrics::{
    assortativity, avg_strength, degree_histogram, mean_avg_neighbor_degree, CentralityKind,
    MetricsRow,
};
use crate::powerlaw::{fit_powerlaw, PowerLawFit};

/// An attachment logic and the network statistic standing in for it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Proxy {
    /// power-law exponent of the degree distribution
    PrefAttachment,
    /// degree assortativity
    Homophily,
    /// mean actor strength
    Embedding,
    /// mean of the actors' average neighbor degree
    MultiConnectivity,
}

impl Proxy {
    pub const ALL: [Proxy; 4] = [
        Proxy::PrefAttachment,
        Proxy::Homophily,
        Proxy::Embedding,
        Proxy::MultiConnectivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Proxy::PrefAttachment => "pref_attachment",
            Proxy::Homophily => "homophily",
            Proxy::Embedding => "embedding",
            Proxy::MultiConnectivity => "multi_connectivity",
        }
    }
}

/// The four proxy values of one period. `None` marks an undefined value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProxyRow {
    pub label: String,
    pub pref_attachment: Option<f64>,
    pub homophily: Option<f64>,
    pub embedding: Option<f64>,
    pub multi_connectivity: Option<f64>,
}

impl ProxyRow {
    pub fn get(&self, proxy: Proxy) -> Option<f64> {
        match proxy {
            Proxy::PrefAttachment => self.pref_attachment,
            Proxy::Homophily => self.homophily,
            Proxy::Embedding => self.embedding,
            Proxy::MultiConnectivity => self.multi_connectivity,
        }
    }
}

pub fn proxy_row(s: &GraphSnapshot) -> ProxyRow {
    ProxyRow {
        label: s.label().to_owned(),
        pref_attachment: fit_powerlaw(&degree_histogram(s)).ok().map(|f| f.lambda),
        homophily: assortativity(s).ok(),
        embedding: avg_strength(s).ok(),
        multi_connectivity: mean_avg_neighbor_degree(s).ok(),
    }
}

/// One [`ProxyRow`] per snapshot, in input order.
pub fn proxy_series(snapshots: &[GraphSnapshot]) -> Result<Vec<ProxyRow>> {
    if snapshots.is_empty() {
        return Err(Error::invalid("proxy series needs at least one snapshot"));
    }
    Ok(snapshots.par_iter().map(proxy_row).collect())
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "series lengths differ: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "correlation needs 3 observations, got {}",
            x.len()
        )));
    }
    Ok(())
}

/// Product-moment correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mean_x, b - mean_y);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::undefined("correlation of a constant series"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// 1-based ranks, tied values sharing the mean of their positions.
pub fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && x[order[end]] == x[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end share their mean
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

/// Rank correlation: Pearson on average ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    check_pair(x, y)?;
    pearson(&average_ranks(x), &average_ranks(y))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationMethod {
    Pearson,
    Spearman,
}

/// Below this many observations the rank method is always used.
pub const MIN_PARAMETRIC_SAMPLES: usize = 20;

/// 5% critical value of a chi-square with two degrees of freedom,
/// `-2 ln 0.05`.
pub fn jarque_bera_critical() -> f64 {
    -2.0 * 0.05f64.ln()
}

/// Jarque–Bera statistic `n/6 (S^2 + K^2/4)` from population skewness `S`
/// and excess kurtosis `K`. `None` for a constant series.
pub fn jarque_bera(x: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in x {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    if m2 == 0.0 {
        return None;
    }
    let skew = m3 / m2.powf(1.5);
    let excess = m4 / (m2 * m2) - 3.0;
    Some(n / 6.0 * (skew * skew + excess * excess / 4.0))
}

/// Chooses the correlation method for a series: Spearman for short series
/// or when the Jarque–Bera statistic rejects normality at 5%.
pub fn normality_gate(x: &[f64]) -> CorrelationMethod {
    if x.len() < MIN_PARAMETRIC_SAMPLES {
        return CorrelationMethod::Spearman;
    }
    match jarque_bera(x) {
        Some(jb) if jb <= jarque_bera_critical() => CorrelationMethod::Pearson,
        _ => CorrelationMethod::Spearman,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStatus {
    Ok,
    /// fewer than 3 periods with both values defined
    InsufficientData,
    /// a series was constant
    UndefinedMetric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationPair {
    pub proxy: Proxy,
    pub centralization: CentralityKind,
    pub coefficient: Option<f64>,
    pub method: Option<CorrelationMethod>,
    /// Periods that entered the coefficient.
    pub n: usize,
    pub status: PairStatus,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub pairs: Vec<CorrelationPair>,
    /// Centralization the ranking is based on.
    pub ranked_against: CentralityKind,
    /// Proxies by descending |coefficient| against `ranked_against`; ties
    /// alphabetical. Pairs without a coefficient are left out.
    pub ranked_drivers: Vec<Proxy>,
}

fn correlate_series(x: &[f64], y: &[f64]) -> (Option<f64>, Option<CorrelationMethod>, PairStatus) {
    if x.len() < 3 {
        return (None, None, PairStatus::InsufficientData);
    }
    let method = match (normality_gate(x), normality_gate(y)) {
        (CorrelationMethod::Pearson, CorrelationMethod::Pearson) => CorrelationMethod::Pearson,
        _ => CorrelationMethod::Spearman,
    };
    let result = match method {
        CorrelationMethod::Pearson => pearson(x, y),
        CorrelationMethod::Spearman => spearman(x, y),
    };
    match result {
        Ok(r) => (Some(r), Some(method), PairStatus::Ok),
        Err(Error::InsufficientData(_)) => (None, Some(method), PairStatus::InsufficientData),
        Err(_) => (None, Some(method), PairStatus::UndefinedMetric),
    }
}

/// Correlates every proxy with every centralization kind across periods,
/// ranking proxies by their correlation with degree centralization.
pub fn correlate_attachment(proxies: &[ProxyRow], rows: &[MetricsRow]) -> Result<CorrelationReport> {
    correlate_attachment_against(proxies, rows, CentralityKind::Degree)
}

/// [`correlate_attachment`] with a chosen ranking centralization.
pub fn correlate_attachment_against(
    proxies: &[ProxyRow],
    rows: &[MetricsRow],
    ranked_against: CentralityKind,
) -> Result<CorrelationReport> {
    if proxies.len() != rows.len() {
        return Err(Error::invalid(format!(
            "{} proxy rows for {} metric rows",
            proxies.len(),
            rows.len()
        )));
    }
    if let Some((p, r)) = proxies.iter().zip(rows).find(|(p, r)| p.label != r.label) {
        return Err(Error::invalid(format!(
            "period labels not aligned: {:?} vs {:?}",
            p.label, r.label
        )));
    }

    let mut pairs = Vec::new();
    for proxy in Proxy::ALL {
        for kind in CentralityKind::ALL {
            let (x, y): (Vec<f64>, Vec<f64>) = proxies
                .iter()
                .zip(rows)
                .filter_map(|(p, r)| Some((p.get(proxy)?, r.centralization(kind)?)))
                .unzip();
            let (coefficient, method, status) = correlate_series(&x, &y);
            pairs.push(CorrelationPair {
                proxy,
                centralization: kind,
                coefficient,
                method,
                n: x.len(),
                status,
            });
        }
    }

    let mut ranked: Vec<(Proxy, f64)> = pairs
        .iter()
        .filter(|p| p.centralization == ranked_against)
        .filter_map(|p| Some((p.proxy, p.coefficient?.abs())))
        .collect();
    ranked.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.0.name().cmp(b.0.name()))
    });

    Ok(CorrelationReport {
        pairs,
        ranked_against,
        ranked_drivers: ranked.into_iter().map(|(p, _)| p).collect(),
    })
}

/// Default relative tolerance for [`static_attributes`].
pub const DEFAULT_STATIC_TOLERANCE: f64 = 0.10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StaticAttribute {
    pub metric: String,
    #[serde(rename = "static")]
    pub is_static: bool,
    pub range: f64,
    pub mean: f64,
    /// Periods with a defined value.
    pub n: usize,
}

type RowField = fn(&MetricsRow) -> Option<f64>;

const STATIC_CANDIDATES: [(&str, RowField); 6] = [
    ("clustering", |r| r.clustering),
    ("density_weighted", |r| r.density_weighted),
    ("density_simple", |r| r.density_simple),
    ("diameter", |r| r.diameter.map(|d| d as f64)),
    ("avg_distance", |r| r.avg_distance),
    ("power_law_lambda", |r| r.power_law_lambda),
];

/// Whether a series stays within `rel_tolerance` of its mean magnitude:
/// `max - min <= rel_tolerance * max(|mean|, 1e-9)`.
pub fn series_is_static(values: &[f64], rel_tolerance: f64) -> Option<StaticAttribute> {
    if values.is_empty() {
        return None;
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let range = max - min;
    Some(StaticAttribute {
        metric: String::new(),
        is_static: range <= rel_tolerance * mean.abs().max(1e-9),
        range,
        mean,
        n: values.len(),
    })
}

/// Flags which measures stay (almost) constant across periods.
///
/// Measures with fewer than two defined periods are left out.
pub fn static_attributes(rows: &[MetricsRow], rel_tolerance: f64) -> Result<Vec<StaticAttribute>> {
    if rows.len() < 2 {
        return Err(Error::invalid("static attributes need at least 2 periods"));
    }
    if !(rel_tolerance > 0.0 && rel_tolerance <= 1.0) {
        return Err(Error::invalid(format!(
            "relative tolerance must lie in (0, 1], got {rel_tolerance}"
        )));
    }
    Ok(STATIC_CANDIDATES
        .iter()
        .filter_map(|(name, field)| {
            let values: Vec<f64> = rows.iter().filter_map(field).collect();
            if values.len() < 2 {
                return None;
            }
            let mut attr = series_is_static(&values, rel_tolerance)?;
            attr.metric = (*name).to_owned();
            Some(attr)
        })
        .collect())
}

/// Cut-offs of the small-world test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallWorldThresholds {
    /// `density_simple` must be strictly below this.
    pub max_density: f64,
    pub min_clustering: f64,
    /// Clustering must also reach this multiple of the random-graph
    /// expectation, which equals `density_simple`.
    pub min_clustering_over_random: f64,
    /// Diameter bound is `ceil(factor * ln N / ln(max(avg degree, 2)))`.
    pub diameter_log_factor: f64,
    pub min_r_squared: f64,
    pub min_lambda: f64,
}

impl Default for SmallWorldThresholds {
    fn default() -> Self {
        SmallWorldThresholds {
            max_density: 0.05,
            min_clustering: 0.3,
            min_clustering_over_random: 3.0,
            diameter_log_factor: 2.0,
            min_r_squared: 0.6,
            min_lambda: 1.0,
        }
    }
}

/// Outcome of the four-part test. `None` marks a flag whose inputs were
/// undefined.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmallWorldVerdict {
    pub label: String,
    pub density_low: Option<bool>,
    pub clustering_high: Option<bool>,
    pub diameter_small: Option<bool>,
    pub scale_free: Option<bool>,
    /// Conjunction of the four flags: false as soon as one flag is false,
    /// undefined if none is false but one is undefined.
    pub verdict: Option<bool>,
}

impl SmallWorldVerdict {
    fn flags(&self) -> [(&'static str, Option<bool>); 4] {
        [
            ("density_low", self.density_low),
            ("clustering_high", self.clustering_high),
            ("diameter_small", self.diameter_small),
            ("scale_free", self.scale_free),
        ]
    }

    pub fn undefined_flags(&self) -> Vec<&'static str> {
        self.flags()
            .iter()
            .filter(|(_, v)| v.is_none())
            .map(|(name, _)| *name)
            .collect()
    }

    pub fn failing_flags(&self) -> Vec<&'static str> {
        self.flags()
            .iter()
            .filter(|(_, v)| *v == Some(false))
            .map(|(name, _)| *name)
            .collect()
    }
}

/// Largest diameter still counted as small on `n` actors with the given
/// average degree.
pub fn diameter_bound(n: usize, avg_degree: f64, factor: f64) -> usize {
    let base = avg_degree.max(2.0).ln();
    (factor * (n as f64).ln() / base).ceil() as usize
}

/// Applies the small-world test to one period's row and degree fit.
pub fn classify_small_world(
    row: &MetricsRow,
    fit: Option<&PowerLawFit>,
    t: &SmallWorldThresholds,
) -> SmallWorldVerdict {
    let density_low = row.density_simple.map(|d| d < t.max_density);
    let clustering_high = match (row.clustering, row.density_simple) {
        (Some(c), Some(d)) => Some(c >= t.min_clustering && c >= t.min_clustering_over_random * d),
        _ => None,
    };
    let diameter_small = match row.diameter {
        Some(d) if row.n_actors >= 2 => {
            let avg_degree = 2.0 * row.n_links as f64 / row.n_actors as f64;
            Some(d <= diameter_bound(row.n_actors, avg_degree, t.diameter_log_factor))
        }
        _ => None,
    };
    let scale_free = fit.map(|f| f.r_squared >= t.min_r_squared && f.lambda >= t.min_lambda);

    let flags = [density_low, clustering_high, diameter_small, scale_free];
    let verdict = if flags.contains(&Some(false)) {
        Some(false)
    } else if flags.contains(&None) {
        None
    } else {
        Some(true)
    };
    SmallWorldVerdict {
        label: row.label.clone(),
        density_low,
        clustering_high,
        diameter_small,
        scale_free,
        verdict,
    }
}
