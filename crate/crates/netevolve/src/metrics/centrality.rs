//! Betweenness, closeness and Freeman centralization.
//!
//! Per-source passes run in parallel; their contributions are summed in
//! source order, so scores are bit-identical for any worker count.

use std::collections::{BTreeMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::paths::bfs_distances;
use crate::error::{Error, Result};
use crate::graph::{ActorId, GraphSnapshot};

/// Shortest-path betweenness scores, indexed like `GraphSnapshot::actors`.
#[derive(Clone, Debug, PartialEq)]
pub struct Betweenness {
    actors: Vec<ActorId>,
    raw: Vec<f64>,
    normalized: Vec<f64>,
}

impl Betweenness {
    /// Unnormalized scores: each unordered pair counted once.
    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    /// Raw scores divided by (N-1)(N-2)/2; all zero when N < 3.
    pub fn normalized(&self) -> &[f64] {
        &self.normalized
    }

    pub fn raw_of(&self, actor: &ActorId) -> Option<f64> {
        let i = self.actors.binary_search(actor).ok()?;
        Some(self.raw[i])
    }

    pub fn normalized_of(&self, actor: &ActorId) -> Option<f64> {
        let i = self.actors.binary_search(actor).ok()?;
        Some(self.normalized[i])
    }

    pub fn to_map(&self) -> BTreeMap<ActorId, f64> {
        self.actors.iter().cloned().zip(self.raw.iter().copied()).collect()
    }
}

fn brandes_source(s: &GraphSnapshot, source: usize) -> Vec<f64> {
    let n = s.n_actors();
    let mut dist = vec![usize::MAX; n];
    let mut sigma = vec![0.0f64; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = VecDeque::new();
    dist[source] = 0;
    sigma[source] = 1.0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        order.push(v);
        for &(w, _) in s.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if dist[w] == dist[v] + 1 {
                sigma[w] += sigma[v];
            }
        }
    }
    let mut delta = vec![0.0f64; n];
    for &w in order.iter().rev() {
        let coeff = (1.0 + delta[w]) / sigma[w];
        // predecessors are exactly the neighbors one hop closer
        for &(v, _) in s.neighbors(w) {
            if dist[v] != usize::MAX && dist[v] + 1 == dist[w] {
                delta[v] += sigma[v] * coeff;
            }
        }
    }
    delta[source] = 0.0;
    delta
}

/// Unweighted shortest-path betweenness (Brandes accumulation).
pub fn betweenness(s: &GraphSnapshot) -> Betweenness {
    let n = s.n_actors();
    let contributions: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|source| brandes_source(s, source))
        .collect();
    let mut raw = vec![0.0f64; n];
    for delta in &contributions {
        for (acc, d) in raw.iter_mut().zip(delta) {
            *acc += d;
        }
    }
    for r in &mut raw {
        *r /= 2.0;
    }
    let pairs = if n >= 3 {
        ((n - 1) * (n - 2)) as f64 / 2.0
    } else {
        0.0
    };
    let normalized = raw
        .iter()
        .map(|&r| if pairs > 0.0 { r / pairs } else { 0.0 })
        .collect();
    Betweenness {
        actors: s.actors().to_vec(),
        raw,
        normalized,
    }
}

struct Reach {
    reached: usize,
    distance_sum: u64,
    harmonic: f64,
}

fn reach_per_node(s: &GraphSnapshot) -> Vec<Reach> {
    (0..s.n_actors())
        .into_par_iter()
        .map_init(
            || (Vec::new(), VecDeque::new()),
            |(dist, queue), source| {
                bfs_distances(s, source, dist, queue);
                let mut r = Reach {
                    reached: 0,
                    distance_sum: 0,
                    harmonic: 0.0,
                };
                for &d in dist.iter() {
                    if d != usize::MAX && d > 0 {
                        r.reached += 1;
                        r.distance_sum += d as u64;
                        r.harmonic += 1.0 / d as f64;
                    }
                }
                r
            },
        )
        .collect()
}

/// Closeness computed inside each actor's own component and scaled by the
/// fraction of the graph that component reaches:
/// `(r / (N-1)) * (r / sum of distances)` for `r` reachable actors.
/// On a connected graph this is the classic `(N-1) / sum of distances`.
/// Isolated actors score 0.
pub fn closeness(s: &GraphSnapshot) -> Vec<f64> {
    let n = s.n_actors();
    reach_per_node(s)
        .into_iter()
        .map(|r| {
            if r.reached == 0 || n < 2 {
                0.0
            } else {
                let r_f = r.reached as f64;
                (r_f / (n - 1) as f64) * (r_f / r.distance_sum as f64)
            }
        })
        .collect()
}

/// Harmonic closeness: mean of inverse distances to the other N-1 actors.
pub fn harmonic_closeness(s: &GraphSnapshot) -> Vec<f64> {
    let n = s.n_actors();
    reach_per_node(s)
        .into_iter()
        .map(|r| if n < 2 { 0.0 } else { r.harmonic / (n - 1) as f64 })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CentralityKind {
    Degree,
    Betweenness,
    Closeness,
}

impl CentralityKind {
    pub const ALL: [CentralityKind; 3] = [
        CentralityKind::Degree,
        CentralityKind::Betweenness,
        CentralityKind::Closeness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CentralityKind::Degree => "degree",
            CentralityKind::Betweenness => "betweenness",
            CentralityKind::Closeness => "closeness",
        }
    }

    /// Largest possible Σ(c_max − c_i) over graphs on `n` nodes, reached by
    /// the star. Degree uses raw degrees; the other two their normalized
    /// scores.
    fn max_spread(self, n: usize) -> f64 {
        let n = n as f64;
        match self {
            CentralityKind::Degree => (n - 1.0) * (n - 2.0),
            CentralityKind::Betweenness => n - 1.0,
            CentralityKind::Closeness => (n - 1.0) * (n - 2.0) / (2.0 * n - 3.0),
        }
    }
}

/// Freeman centralization of per-actor scores on an `n`-node graph.
///
/// `values` must be raw degrees for [`CentralityKind::Degree`], normalized
/// betweenness for `Betweenness`, and [`closeness`] scores for `Closeness`.
pub fn centralization(values: &[f64], kind: CentralityKind, n: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::undefined(format!(
            "{} centralization needs at least 3 actors",
            kind.name()
        )));
    }
    if values.len() != n {
        return Err(Error::invalid(format!(
            "{} values for {n} actors",
            values.len()
        )));
    }
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread: f64 = values.iter().map(|&v| max - v).sum();
    Ok(spread / kind.max_spread(n))
}

/// Centralization of a snapshot for one kind of centrality.
pub fn snapshot_centralization(s: &GraphSnapshot, kind: CentralityKind) -> Result<f64> {
    let n = s.n_actors();
    let values: Vec<f64> = match kind {
        CentralityKind::Degree => (0..n).map(|i| s.degree_at(i) as f64).collect(),
        CentralityKind::Betweenness => betweenness(s).normalized().to_vec(),
        CentralityKind::Closeness => closeness(s),
    };
    centralization(&values, kind, n)
}
