//! Per-snapshot structural measures.
//!
//! Every measure is a pure function of an immutable [`GraphSnapshot`].
//! Measures that have no meaningful value on a given graph return
//! [`Error::UndefinedMetric`]; [`metrics_row`] turns those into `None`
//! cells instead of numbers.

mod centrality;
mod paths;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use centrality::{
    betweenness, centralization, closeness, harmonic_closeness, snapshot_centralization,
    Betweenness, CentralityKind,
};
pub use paths::{path_stats, PathStats};

use crate::error::{Error, Result};
use crate::graph::{ActorId, GraphSnapshot};
use crate::powerlaw::fit_powerlaw;

fn pair_capacity(s: &GraphSnapshot) -> Result<f64> {
    let n = s.n_actors();
    if n < 2 {
        return Err(Error::undefined("density needs at least 2 actors"));
    }
    Ok((n as f64) * (n as f64 - 1.0))
}

/// `2W / (N(N-1))` with W the sum of edge weights. Exceeds 1 when pairs
/// interact repeatedly.
pub fn density_weighted(s: &GraphSnapshot) -> Result<f64> {
    Ok(2.0 * s.sum_links() as f64 / pair_capacity(s)?)
}

/// `2L / (N(N-1))` with L the number of distinct connected pairs.
pub fn density_simple(s: &GraphSnapshot) -> Result<f64> {
    Ok(2.0 * s.n_links() as f64 / pair_capacity(s)?)
}

/// Number of edges among the neighbors of `v`, using `mark` as scratch
/// (all false on entry and on exit).
fn neighbor_links(s: &GraphSnapshot, v: usize, mark: &mut [bool]) -> usize {
    let nbrs = s.neighbors(v);
    for &(u, _) in nbrs {
        mark[u] = true;
    }
    let mut links = 0;
    for &(u, _) in nbrs {
        links += s
            .neighbors(u)
            .iter()
            .filter(|&&(w, _)| w > u && mark[w])
            .count();
    }
    for &(u, _) in nbrs {
        mark[u] = false;
    }
    links
}

fn local_clustering_at(s: &GraphSnapshot, v: usize, mark: &mut [bool]) -> f64 {
    let k = s.degree_at(v);
    if k < 2 {
        return 0.0;
    }
    let possible = (k * (k - 1) / 2) as f64;
    neighbor_links(s, v, mark) as f64 / possible
}

/// Fraction of neighbor pairs of `actor` that are themselves linked; 0 when
/// the actor has fewer than two neighbors.
pub fn local_clustering(s: &GraphSnapshot, actor: &ActorId) -> Result<f64> {
    let v = s.require(actor)?;
    let mut mark = vec![false; s.n_actors()];
    Ok(local_clustering_at(s, v, &mut mark))
}

/// Mean local clustering over all actors, degree-<2 actors counting as 0.
pub fn avg_clustering(s: &GraphSnapshot) -> Result<f64> {
    let n = s.n_actors();
    if n == 0 {
        return Err(Error::undefined("clustering of an empty graph"));
    }
    let mut mark = vec![false; n];
    let total: f64 = (0..n).map(|v| local_clustering_at(s, v, &mut mark)).sum();
    Ok(total / n as f64)
}

/// Global transitivity: closed triplets over connected triplets.
pub fn transitivity(s: &GraphSnapshot) -> Result<f64> {
    let n = s.n_actors();
    let mut mark = vec![false; n];
    let (mut closed, mut triples) = (0u64, 0u64);
    for v in 0..n {
        let k = s.degree_at(v) as u64;
        triples += k * k.saturating_sub(1) / 2;
        closed += neighbor_links(s, v, &mut mark) as u64;
    }
    if triples == 0 {
        return Err(Error::undefined("transitivity without connected triples"));
    }
    Ok(closed as f64 / triples as f64)
}

/// Count of actors per degree, isolated actors included.
pub fn degree_histogram(s: &GraphSnapshot) -> BTreeMap<usize, usize> {
    let mut hist = BTreeMap::new();
    for v in 0..s.n_actors() {
        *hist.entry(s.degree_at(v)).or_insert(0) += 1;
    }
    hist
}

/// Pearson correlation of the degrees at either end of every edge, each edge
/// contributing in both orientations.
///
/// Computed from exact integer moments; a graph whose edge endpoints all
/// share one degree (any regular graph) is undefined.
pub fn assortativity(s: &GraphSnapshot) -> Result<f64> {
    if s.n_links() == 0 {
        return Err(Error::undefined("assortativity without edges"));
    }
    let (mut m, mut sum, mut sum_sq, mut sum_prod) = (0i128, 0i128, 0i128, 0i128);
    for (i, j, _) in s.edges() {
        let (du, dv) = (s.degree_at(i) as i128, s.degree_at(j) as i128);
        m += 2;
        sum += du + dv;
        sum_sq += du * du + dv * dv;
        sum_prod += 2 * du * dv;
    }
    let numerator = m * sum_prod - sum * sum;
    let denominator = m * sum_sq - sum * sum;
    if denominator == 0 {
        return Err(Error::undefined("degree variance over edge endpoints is zero"));
    }
    Ok(numerator as f64 / denominator as f64)
}

fn avg_neighbor_degree_at(s: &GraphSnapshot, v: usize) -> Option<f64> {
    let nbrs = s.neighbors(v);
    if nbrs.is_empty() {
        return None;
    }
    let total: usize = nbrs.iter().map(|&(u, _)| s.degree_at(u)).sum();
    Some(total as f64 / nbrs.len() as f64)
}

/// Mean degree of the neighbors of `actor`.
pub fn avg_neighbor_degree(s: &GraphSnapshot, actor: &ActorId) -> Result<f64> {
    let v = s.require(actor)?;
    avg_neighbor_degree_at(s, v)
        .ok_or_else(|| Error::undefined(format!("{actor} has no neighbors")))
}

/// Network mean of [`avg_neighbor_degree`] over non-isolated actors.
pub fn mean_avg_neighbor_degree(s: &GraphSnapshot) -> Result<f64> {
    let values: Vec<f64> = (0..s.n_actors())
        .filter_map(|v| avg_neighbor_degree_at(s, v))
        .collect();
    if values.is_empty() {
        return Err(Error::undefined("no actor has a neighbor"));
    }
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// Mean strength over all actors, i.e. `2W / N`.
pub fn avg_strength(s: &GraphSnapshot) -> Result<f64> {
    let n = s.n_actors();
    if n == 0 {
        return Err(Error::undefined("strength of an empty graph"));
    }
    let total: u64 = (0..n).map(|v| s.strength_at(v)).sum();
    Ok(total as f64 / n as f64)
}

/// Mean weight per distinct link, `W / L`.
pub fn avg_edge_weight(s: &GraphSnapshot) -> Result<f64> {
    if s.n_links() == 0 {
        return Err(Error::undefined("edge weight without edges"));
    }
    Ok(s.sum_links() as f64 / s.n_links() as f64)
}

/// All network measures of one snapshot. `None` marks a measure that is
/// undefined for this snapshot.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub label: String,
    pub n_actors: usize,
    pub n_links: usize,
    pub sum_links: u64,
    pub density_weighted: Option<f64>,
    pub density_simple: Option<f64>,
    pub clustering: Option<f64>,
    pub transitivity: Option<f64>,
    pub diameter: Option<usize>,
    pub avg_distance: Option<f64>,
    pub assortativity: Option<f64>,
    pub avg_neighbor_degree: Option<f64>,
    pub avg_strength: Option<f64>,
    pub centralization_degree: Option<f64>,
    pub centralization_betweenness: Option<f64>,
    pub centralization_closeness: Option<f64>,
    /// Exponent of the log-log degree-distribution fit.
    pub power_law_lambda: Option<f64>,
    pub power_law_r_squared: Option<f64>,
}

impl MetricsRow {
    /// Row with only the counts filled in.
    pub fn counts(label: impl Into<String>, n_actors: usize, n_links: usize, sum_links: u64) -> Self {
        MetricsRow {
            label: label.into(),
            n_actors,
            n_links,
            sum_links,
            density_weighted: None,
            density_simple: None,
            clustering: None,
            transitivity: None,
            diameter: None,
            avg_distance: None,
            assortativity: None,
            avg_neighbor_degree: None,
            avg_strength: None,
            centralization_degree: None,
            centralization_betweenness: None,
            centralization_closeness: None,
            power_law_lambda: None,
            power_law_r_squared: None,
        }
    }

    pub fn centralization(&self, kind: CentralityKind) -> Option<f64> {
        match kind {
            CentralityKind::Degree => self.centralization_degree,
            CentralityKind::Betweenness => self.centralization_betweenness,
            CentralityKind::Closeness => self.centralization_closeness,
        }
    }
}

/// Computes every measure of `s`.
///
/// Clustering and path cells stay empty when the snapshot has no edges.
pub fn metrics_row(s: &GraphSnapshot) -> MetricsRow {
    let mut row = MetricsRow::counts(s.label(), s.n_actors(), s.n_links(), s.sum_links());
    row.density_weighted = density_weighted(s).ok();
    row.density_simple = density_simple(s).ok();
    if s.n_links() > 0 {
        row.clustering = avg_clustering(s).ok();
    }
    row.transitivity = transitivity(s).ok();
    if let Ok(p) = path_stats(s) {
        row.diameter = Some(p.diameter);
        row.avg_distance = Some(p.avg_distance);
    }
    row.assortativity = assortativity(s).ok();
    row.avg_neighbor_degree = mean_avg_neighbor_degree(s).ok();
    row.avg_strength = avg_strength(s).ok();
    row.centralization_degree = snapshot_centralization(s, CentralityKind::Degree).ok();
    row.centralization_betweenness = snapshot_centralization(s, CentralityKind::Betweenness).ok();
    row.centralization_closeness = snapshot_centralization(s, CentralityKind::Closeness).ok();
    if let Ok(fit) = fit_powerlaw(&degree_histogram(s)) {
        row.power_law_lambda = Some(fit.lambda);
        row.power_law_r_squared = Some(fit.r_squared);
    }
    row
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn id(s: &str) -> ActorId {
        ActorId::new(s).unwrap()
    }

    fn star(leaves: usize) -> GraphSnapshot {
        let pairs: Vec<(String, String)> = (0..leaves)
            .map(|i| ("c".to_string(), format!("l{i}")))
            .collect();
        GraphSnapshot::from_pairs("star", &pairs).unwrap()
    }

    fn complete(n: usize) -> GraphSnapshot {
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                pairs.push((format!("v{i}"), format!("v{j}")));
            }
        }
        GraphSnapshot::from_pairs("k", &pairs).unwrap()
    }

    fn p4() -> GraphSnapshot {
        GraphSnapshot::from_pairs("p4", &[("a", "b"), ("b", "c"), ("c", "d")]).unwrap()
    }

    /// Graph with `n` actors and total weight `w` spread over a path.
    fn with_counts(n: usize, w: u64) -> GraphSnapshot {
        let mut b = GraphBuilder::new();
        let ids: Vec<ActorId> = (0..n).map(|i| id(&format!("a{i:03}"))).collect();
        for pair in ids.windows(2) {
            b.add_interaction(&pair[0], &pair[1], 1).unwrap();
        }
        let extra = w - (n as u64 - 1);
        b.add_interaction(&ids[0], &ids[1], extra).unwrap();
        b.build("synthetic")
    }

    #[test]
    fn weighted_density_matches_table_arithmetic() {
        let d = density_weighted(&with_counts(58, 153)).unwrap();
        assert!((d * 100.0 - 9.26).abs() < 0.005, "{d}");
        let d = density_weighted(&with_counts(98, 286)).unwrap();
        assert!((d * 100.0 - 6.02).abs() < 0.005, "{d}");
        let one = GraphSnapshot::from_pairs("e", &[("a", "b")]).unwrap();
        assert_eq!(density_weighted(&one).unwrap(), 1.0);
        assert!(density_weighted(&GraphSnapshot::empty("e")).is_err());
    }

    #[test]
    fn simple_density() {
        assert_eq!(density_simple(&complete(4)).unwrap(), 1.0);
        assert_eq!(density_simple(&p4()).unwrap(), 0.5);
        // 46 links among 43 actors
        let d: f64 = 2.0 * 46.0 / (43.0 * 42.0);
        assert!((d - 0.0509).abs() < 5e-5);
    }

    #[test]
    fn local_clustering_examples() {
        assert_eq!(local_clustering(&complete(4), &id("v0")).unwrap(), 1.0);
        assert_eq!(local_clustering(&star(5), &id("c")).unwrap(), 0.0);
        let g = GraphSnapshot::from_pairs("t", &[("v", "a"), ("v", "b"), ("v", "c"), ("a", "b")]).unwrap();
        assert!((local_clustering(&g, &id("v")).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(matches!(local_clustering(&g, &id("q")), Err(Error::NotFound(_))));
    }

    #[test]
    fn average_clustering_examples() {
        assert_eq!(avg_clustering(&complete(5)).unwrap(), 1.0);
        assert_eq!(avg_clustering(&p4()).unwrap(), 0.0);
        // triangle a,b,c with pendant d on a: locals (1/3, 1, 1, 0)
        let g = GraphSnapshot::from_pairs("tp", &[("a", "b"), ("b", "c"), ("a", "c"), ("a", "d")]).unwrap();
        assert!((avg_clustering(&g).unwrap() - 7.0 / 12.0).abs() < 1e-15);
        assert!((transitivity(&g).unwrap() - 3.0 / 5.0).abs() < 1e-15);
        assert!(avg_clustering(&GraphSnapshot::empty("e")).is_err());
    }

    #[test]
    fn histogram_examples() {
        assert_eq!(degree_histogram(&star(5)), BTreeMap::from([(1, 5), (5, 1)]));
        assert_eq!(degree_histogram(&complete(4)), BTreeMap::from([(3, 4)]));
        assert!(degree_histogram(&GraphSnapshot::empty("e")).is_empty());
    }

    #[test]
    fn assortativity_examples() {
        assert_eq!(assortativity(&star(5)).unwrap(), -1.0);
        assert!(matches!(assortativity(&complete(4)), Err(Error::UndefinedMetric(_))));
        // P4 endpoint pairs: (1,2),(2,1),(2,2),(2,2),(2,1),(1,2)
        let xs = [1.0, 2.0, 2.0, 2.0, 2.0, 1.0];
        let ys = [2.0, 1.0, 2.0, 2.0, 1.0, 2.0];
        let mean = xs.iter().sum::<f64>() / 6.0;
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mean) * (y - mean)).sum();
        let var: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
        assert!((assortativity(&p4()).unwrap() - cov / var).abs() < 1e-12);
        assert!((cov / var + 0.5).abs() < 1e-12);
    }

    #[test]
    fn neighbor_degree_examples() {
        let s = star(5);
        assert_eq!(avg_neighbor_degree(&s, &id("l0")).unwrap(), 5.0);
        assert_eq!(avg_neighbor_degree(&s, &id("c")).unwrap(), 1.0);
        assert_eq!(avg_neighbor_degree(&complete(4), &id("v1")).unwrap(), 3.0);
        assert!((mean_avg_neighbor_degree(&s).unwrap() - 26.0 / 6.0).abs() < 1e-12);

        let mut b = GraphBuilder::new();
        b.add_interaction(&id("a"), &id("b"), 1).unwrap();
        b.add_actor(id("z"));
        let g = b.build("iso");
        assert!(matches!(avg_neighbor_degree(&g, &id("z")), Err(Error::UndefinedMetric(_))));
        assert_eq!(mean_avg_neighbor_degree(&g).unwrap(), 1.0);
    }

    #[test]
    fn strength_means() {
        let mut b = GraphBuilder::new();
        b.add_interaction(&id("a"), &id("b"), 3).unwrap();
        b.add_interaction(&id("b"), &id("c"), 1).unwrap();
        let g = b.build("w");
        assert!((avg_strength(&g).unwrap() - 8.0 / 3.0).abs() < 1e-15);
        assert_eq!(avg_edge_weight(&g).unwrap(), 2.0);
    }

    #[test]
    fn k4_row() {
        let row = metrics_row(&complete(4));
        assert_eq!((row.n_actors, row.n_links, row.sum_links), (4, 6, 6));
        assert_eq!(row.density_simple, Some(1.0));
        assert_eq!(row.clustering, Some(1.0));
        assert_eq!(row.diameter, Some(1));
        assert_eq!(row.avg_distance, Some(1.0));
        assert_eq!(row.assortativity, None);
        assert_eq!(row.centralization_degree, Some(0.0));
        assert_eq!(row.power_law_lambda, None);
    }

    #[test]
    fn edgeless_row_has_blank_cells() {
        let mut b = GraphBuilder::new();
        b.add_actor(id("a"));
        b.add_actor(id("b"));
        let row = metrics_row(&b.build("e"));
        assert_eq!(row.density_simple, Some(0.0));
        assert_eq!(row.clustering, None);
        assert_eq!(row.diameter, None);
        assert_eq!(row.avg_distance, None);
        assert_eq!(row.assortativity, None);
        assert_eq!(row.centralization_degree, None);
    }

    #[test]
    fn synthetic_table_two_row() {
        let row = metrics_row(&with_counts(58, 153));
        assert!((row.density_weighted.unwrap() * 100.0 - 9.26).abs() < 0.005);
        assert!(row.density_weighted >= row.density_simple);
    }
}
