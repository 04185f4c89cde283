use std::collections::VecDeque;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::GraphSnapshot;

/// Hop-count path statistics of one snapshot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PathStats {
    /// Longest shortest path inside the giant component.
    pub diameter: usize,
    /// Mean shortest-path length over all reachable unordered pairs of the
    /// whole graph. Unreachable pairs are left out.
    pub avg_distance: f64,
    pub reachable_pairs: u64,
}

/// Unweighted single-source BFS distances; `usize::MAX` marks unreachable.
pub(crate) fn bfs_distances(s: &GraphSnapshot, source: usize, dist: &mut Vec<usize>, queue: &mut VecDeque<usize>) {
    dist.clear();
    dist.resize(s.n_actors(), usize::MAX);
    queue.clear();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(v) = queue.pop_front() {
        let next = dist[v] + 1;
        for &(w, _) in s.neighbors(v) {
            if dist[w] == usize::MAX {
                dist[w] = next;
                queue.push_back(w);
            }
        }
    }
}

struct SourceSummary {
    eccentricity: usize,
    distance_sum: u64,
    reached: u64,
}

/// Diameter over the giant component and mean distance over reachable
/// pairs, from a breadth-first search out of every node. Edge weights are
/// ignored.
pub fn path_stats(s: &GraphSnapshot) -> Result<PathStats> {
    if s.n_links() == 0 {
        return Err(Error::undefined("path statistics need at least one edge"));
    }
    let n = s.n_actors();
    let per_source: Vec<SourceSummary> = (0..n)
        .into_par_iter()
        .map_init(
            || (Vec::new(), VecDeque::new()),
            |(dist, queue), source| {
                bfs_distances(s, source, dist, queue);
                let mut summary = SourceSummary {
                    eccentricity: 0,
                    distance_sum: 0,
                    reached: 0,
                };
                for &d in dist.iter() {
                    if d != usize::MAX && d > 0 {
                        summary.eccentricity = summary.eccentricity.max(d);
                        summary.distance_sum += d as u64;
                        summary.reached += 1;
                    }
                }
                summary
            },
        )
        .collect();

    let giant = s.giant_component_nodes().unwrap_or_default();
    let diameter = giant
        .iter()
        .map(|&v| per_source[v].eccentricity)
        .max()
        .unwrap_or(0);
    // each unordered pair is seen from both ends; integer sums keep this exact
    let total: u64 = per_source.iter().map(|p| p.distance_sum).sum();
    let ordered_pairs: u64 = per_source.iter().map(|p| p.reached).sum();
    Ok(PathStats {
        diameter,
        avg_distance: total as f64 / ordered_pairs as f64,
        reachable_pairs: ordered_pairs / 2,
    })
}
