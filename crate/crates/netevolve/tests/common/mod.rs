//! Independent reference implementations shared by the integration tests.
//!
//! Everything here is deliberately naive: dense matrices, quadratic loops,
//! textbook formulas. None of it reuses library internals beyond the
//! public snapshot accessors.

#![allow(dead_code)]

use std::collections::BTreeMap;

use netevolve::generators::{generate, GeneratorSpec, SeededRng};
use netevolve::GraphSnapshot;

pub const UNREACHABLE: usize = usize::MAX;

/// All-pairs hop distances by Floyd–Warshall on a dense matrix.
pub fn floyd_warshall(s: &GraphSnapshot) -> Vec<Vec<usize>> {
    let n = s.n_actors();
    let mut d = vec![vec![UNREACHABLE; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for (i, j, _) in s.edges() {
        d[i][j] = 1;
        d[j][i] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k] == UNREACHABLE {
                continue;
            }
            for j in 0..n {
                if d[k][j] == UNREACHABLE {
                    continue;
                }
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Diameter of the largest component (ties to the component containing the
/// smallest index) and mean distance over reachable unordered pairs, or
/// `None` when the graph has no edge.
pub fn path_oracle(s: &GraphSnapshot) -> Option<(usize, f64)> {
    if s.n_links() == 0 {
        return None;
    }
    let d = floyd_warshall(s);
    let n = s.n_actors();

    // component of each node = set of reachable nodes; pick the largest
    let mut best: Vec<usize> = Vec::new();
    for row in &d {
        let members: Vec<usize> = (0..n).filter(|&j| row[j] != UNREACHABLE).collect();
        if members.len() > best.len() {
            best = members;
        }
    }
    let mut diameter = 0;
    for &i in &best {
        for &j in &best {
            diameter = diameter.max(d[i][j]);
        }
    }

    let (mut total, mut pairs) = (0u64, 0u64);
    for (i, row) in d.iter().enumerate() {
        for &dist in &row[i + 1..] {
            if dist != UNREACHABLE {
                total += dist as u64;
                pairs += 1;
            }
        }
    }
    Some((diameter, total as f64 / pairs as f64))
}

/// A random small graph from one of the three generator families.
pub fn random_graph(rng: &mut SeededRng, max_n: usize) -> GraphSnapshot {
    let n = 5 + rng.below((max_n - 4) as u64) as usize;
    let seed = rng.next_u64();
    let spec = match rng.below(3) {
        0 => GeneratorSpec::er(n, 0.01 + 0.12 * rng.next_f64(), seed),
        1 => {
            let k = 2 * (1 + rng.below(2) as usize);
            GeneratorSpec::ws(n, k, 0.5 * rng.next_f64(), seed)
        }
        _ => GeneratorSpec::ba(n, 1 + rng.below(3) as usize, seed),
    };
    generate(&spec).expect("valid random spec")
}

/// Two-pass product-moment correlation.
pub fn pearson_oracle(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>() / n;
    let sx = (x.iter().map(|a| (a - mx).powi(2)).sum::<f64>() / n).sqrt();
    let sy = (y.iter().map(|b| (b - my).powi(2)).sum::<f64>() / n).sqrt();
    cov / (sx * sy)
}

/// Rank of each value by counting: `#smaller + (#equal + 1) / 2`.
pub fn counting_ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|&v| {
            let less = x.iter().filter(|&&w| w < v).count() as f64;
            let equal = x.iter().filter(|&&w| w == v).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect()
}

pub fn spearman_oracle(x: &[f64], y: &[f64]) -> f64 {
    pearson_oracle(&counting_ranks(x), &counting_ranks(y))
}

/// Pair weights of a clique expansion: every ordered pair of distinct
/// authors is counted, then one orientation is kept.
pub fn clique_pair_counts(corpus: &[Vec<String>]) -> BTreeMap<(String, String), u64> {
    let mut ordered: BTreeMap<(String, String), u64> = BTreeMap::new();
    for authors in corpus {
        let mut distinct: Vec<&String> = Vec::new();
        for a in authors {
            if !distinct.contains(&a) {
                distinct.push(a);
            }
        }
        for a in &distinct {
            for b in &distinct {
                if a != b {
                    *ordered.entry(((*a).clone(), (*b).clone())).or_default() += 1;
                }
            }
        }
    }
    ordered
        .into_iter()
        .filter(|((a, b), _)| a < b)
        .collect()
}

/// A random corpus of at most `max_pubs` author lists of 1..=`max_authors`
/// names drawn, with repetition, from a pool of `pool` names.
pub fn random_corpus(rng: &mut SeededRng, max_pubs: usize, max_authors: usize, pool: usize) -> Vec<Vec<String>> {
    let pubs = 1 + rng.below(max_pubs as u64) as usize;
    (0..pubs)
        .map(|_| {
            let k = 1 + rng.below(max_authors as u64) as usize;
            (0..k).map(|_| format!("author{:02}", rng.below(pool as u64))).collect()
        })
        .collect()
}
