//! Seeded synthetic networks: Erdős–Rényi, Watts–Strogatz and
//! Barabási–Albert.
//!
//! All randomness comes from [`SeededRng`], a xoshiro256** stream seeded
//! through SplitMix64, with the sampling rules spelled out below so that
//! the same seed yields the same graph in any implementation:
//!
//! * uniform real: `(next_u64 >> 11) * 2^-53`, in `[0, 1)`
//! * uniform integer below `n`: Lemire's multiply-shift with rejection
//!
//! Node `i` of an `n`-node graph is labelled with `i` zero-padded to the
//! width of `n - 1`, so label order equals numeric order.

use std::collections::BTreeSet;

use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ActorId, GraphBuilder, GraphSnapshot, InteractionEvent, Timestamp};

/// Deterministic random stream used by every generator.
#[derive(Clone, Debug)]
pub struct SeededRng(Xoshiro256StarStar);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        SeededRng(Xoshiro256StarStar::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)` from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, n)`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "empty range");
        let threshold = n.wrapping_neg() % n;
        loop {
            let m = u128::from(self.next_u64()) * u128::from(n);
            if (m as u64) >= threshold {
                return (m >> 64) as u64;
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// G(n, p)
    Er,
    /// ring lattice with rewiring
    Ws,
    /// preferential attachment
    Ba,
}

impl std::str::FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "er" => Ok(Model::Er),
            "ws" => Ok(Model::Ws),
            "ba" => Ok(Model::Ba),
            other => Err(Error::invalid(format!("unknown model {other:?}"))),
        }
    }
}

/// Parameters of one generated graph.
///
/// `param1` is the edge probability for ER, the (even) neighbor count for
/// WS and the edges per arriving node for BA. `param2` is the WS rewiring
/// probability and is ignored otherwise.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub model: Model,
    pub n: usize,
    pub param1: f64,
    pub param2: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn er(n: usize, p: f64, seed: u64) -> Self {
        GeneratorSpec { model: Model::Er, n, param1: p, param2: 0.0, seed }
    }

    pub fn ws(n: usize, k: usize, beta: f64, seed: u64) -> Self {
        GeneratorSpec { model: Model::Ws, n, param1: k as f64, param2: beta, seed }
    }

    pub fn ba(n: usize, m: usize, seed: u64) -> Self {
        GeneratorSpec { model: Model::Ba, n, param1: m as f64, param2: 0.0, seed }
    }

    fn integer_param(&self, what: &str) -> Result<usize> {
        let v = self.param1;
        if v.fract() != 0.0 || v < 0.0 {
            return Err(Error::invalid(format!("{what} must be a non-negative integer, got {v}")));
        }
        Ok(v as usize)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 3 {
            return Err(Error::invalid(format!("n must be at least 3, got {}", self.n)));
        }
        let probability = |p: f64, what: &str| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::invalid(format!("{what} must lie in [0, 1], got {p}")))
            }
        };
        match self.model {
            Model::Er => probability(self.param1, "p"),
            Model::Ws => {
                let k = self.integer_param("k")?;
                if k % 2 != 0 || k < 2 || k >= self.n {
                    return Err(Error::invalid(format!(
                        "k must be even with 2 <= k < n, got k={k}, n={}",
                        self.n
                    )));
                }
                probability(self.param2, "beta")
            }
            Model::Ba => {
                let m = self.integer_param("m")?;
                if m < 1 || m >= self.n {
                    return Err(Error::invalid(format!(
                        "m must satisfy 1 <= m < n, got m={m}, n={}",
                        self.n
                    )));
                }
                Ok(())
            }
        }
    }

    fn label(&self) -> String {
        match self.model {
            Model::Er => format!("er-n{}-p{}-s{}", self.n, self.param1, self.seed),
            Model::Ws => format!(
                "ws-n{}-k{}-b{}-s{}",
                self.n, self.param1, self.param2, self.seed
            ),
            Model::Ba => format!("ba-n{}-m{}-s{}", self.n, self.param1, self.seed),
        }
    }
}

/// An undirected edge with the step at which it appeared.
type TimedEdge = (usize, usize, i64);

fn er_edges(spec: &GeneratorSpec) -> Vec<TimedEdge> {
    let mut rng = SeededRng::new(spec.seed);
    let p = spec.param1;
    let mut edges = Vec::new();
    for i in 0..spec.n {
        for j in i + 1..spec.n {
            if rng.next_f64() < p {
                edges.push((i, j, 0));
            }
        }
    }
    edges
}

fn ws_edges(spec: &GeneratorSpec) -> Vec<TimedEdge> {
    let n = spec.n;
    let half = spec.param1 as usize / 2;
    let beta = spec.param2;
    let mut rng = SeededRng::new(spec.seed);
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for i in 0..n {
        for j in 1..=half {
            let v = (i + j) % n;
            adj[i].insert(v);
            adj[v].insert(i);
        }
    }
    for j in 1..=half {
        for u in 0..n {
            let v = (u + j) % n;
            if !adj[u].contains(&v) || rng.next_f64() >= beta {
                continue;
            }
            if adj[u].len() >= n - 1 {
                // nowhere to go; keep the lattice edge
                continue;
            }
            let w = loop {
                let w = rng.below(n as u64) as usize;
                if w != u && !adj[u].contains(&w) {
                    break w;
                }
            };
            adj[u].remove(&v);
            adj[v].remove(&u);
            adj[u].insert(w);
            adj[w].insert(u);
        }
    }
    let mut edges = Vec::new();
    for (u, nbrs) in adj.iter().enumerate() {
        edges.extend(nbrs.range(u + 1..).map(|&v| (u, v, 0)));
    }
    edges
}

fn ba_edges(spec: &GeneratorSpec) -> Vec<TimedEdge> {
    let n = spec.n;
    let m = spec.param1 as usize;
    let mut rng = SeededRng::new(spec.seed);
    let mut edges = Vec::with_capacity(m * (m + 1) / 2 + (n - m - 1) * m);
    // every node appears once per incident edge, so a uniform draw from this
    // list is a draw proportional to degree
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * edges.capacity());
    for i in 0..=m {
        for j in i + 1..=m {
            edges.push((i, j, 0));
            endpoints.push(i);
            endpoints.push(j);
        }
    }
    let mut targets: Vec<usize> = Vec::with_capacity(m);
    for v in m + 1..n {
        targets.clear();
        while targets.len() < m {
            let t = endpoints[rng.below(endpoints.len() as u64) as usize];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        let step = (v - m) as i64;
        for &t in &targets {
            edges.push((t.min(v), t.max(v), step));
            endpoints.push(t);
            endpoints.push(v);
        }
    }
    edges
}

fn node_labels(n: usize) -> Vec<ActorId> {
    let width = (n.saturating_sub(1)).to_string().len();
    (0..n)
        .map(|i| ActorId::new(format!("{i:0width$}")).expect("non-empty label"))
        .collect()
}

fn timed_edges(spec: &GeneratorSpec) -> Result<Vec<TimedEdge>> {
    spec.validate()?;
    Ok(match spec.model {
        Model::Er => er_edges(spec),
        Model::Ws => ws_edges(spec),
        Model::Ba => ba_edges(spec),
    })
}

/// Generated graph as unit-weight interaction events. BA edges are stamped
/// with the arrival step of their newer endpoint (0 for the seed clique);
/// ER and WS edges all carry time 0.
pub fn generate_events(spec: &GeneratorSpec) -> Result<Vec<InteractionEvent>> {
    let labels = node_labels(spec.n);
    Ok(timed_edges(spec)?
        .into_iter()
        .map(|(u, v, t)| InteractionEvent {
            time: Timestamp::Period(t),
            a: labels[u].clone(),
            b: labels[v].clone(),
            weight: 1,
        })
        .collect())
}

/// Generates the graph described by `spec`. Every node is an actor, even
/// when isolated.
pub fn generate(spec: &GeneratorSpec) -> Result<GraphSnapshot> {
    let edges = timed_edges(spec)?;
    let labels = node_labels(spec.n);
    let mut builder = GraphBuilder::new();
    for l in &labels {
        builder.add_actor(l.clone());
    }
    for (u, v, _) in edges {
        builder.add_interaction(&labels[u], &labels[v], 1)?;
    }
    Ok(builder.build(spec.label()))
}

pub fn erdos_renyi(spec: &GeneratorSpec) -> Result<GraphSnapshot> {
    require_model(spec, Model::Er)?;
    generate(spec)
}

pub fn watts_strogatz(spec: &GeneratorSpec) -> Result<GraphSnapshot> {
    require_model(spec, Model::Ws)?;
    generate(spec)
}

pub fn barabasi_albert(spec: &GeneratorSpec) -> Result<GraphSnapshot> {
    require_model(spec, Model::Ba)?;
    generate(spec)
}

fn require_model(spec: &GeneratorSpec, model: Model) -> Result<()> {
    if spec.model != model {
        return Err(Error::invalid(format!(
            "expected a {model:?} spec, got {:?}",
            spec.model
        )));
    }
    Ok(())
}
