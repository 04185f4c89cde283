//! Actor and edge storage, cumulative snapshot construction and
//! connected components.
//!
//! A [`GraphSnapshot`] is an immutable, undirected, simple graph whose edges
//! carry positive integer weights. Repeated interactions between the same
//! pair of actors accumulate into the weight instead of creating parallel
//! edges, so every snapshot exposes two link counts: the number of distinct
//! connected pairs ([`GraphSnapshot::n_links`]) and the total interaction
//! count ([`GraphSnapshot::sum_links`]).
//!
//! Actors are stored in lexicographic order and addressed internally by
//! their position in that order. All per-node algorithms in this crate work
//! on those indices.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate, NaiveDateTime};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Label of a single actor (an author, a responder).
///
/// Identity is exact string equality after trimming surrounding whitespace.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ActorId(String);

impl ActorId {
    pub fn new(label: impl AsRef<str>) -> Result<Self> {
        let trimmed = label.as_ref().trim();
        if trimmed.is_empty() {
            return Err(Error::invalid("actor label is empty"));
        }
        Ok(ActorId(trimmed.to_owned()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ActorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for ActorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ActorId::new(s)
    }
}

impl TryFrom<String> for ActorId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        ActorId::new(s)
    }
}

impl From<ActorId> for String {
    fn from(id: ActorId) -> String {
        id.0
    }
}

/// Point in time of an interaction or a period boundary.
///
/// Either an integer period index (a year, a round number) or a calendar
/// instant. Periods order before instants; a dataset is expected to use one
/// kind throughout.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Timestamp {
    Period(i64),
    Instant(NaiveDateTime),
}

const INSTANT_FORMATS: &[&str] = &[
    "%Y-%m-%dT%H:%M:%S%.f",
    "%Y-%m-%dT%H:%M:%S",
    "%Y-%m-%dT%H:%M",
    "%Y-%m-%d %H:%M:%S",
    "%Y-%m-%d %H:%M",
];

impl Timestamp {
    /// Calendar year of an instant, or the period index itself.
    pub fn year(&self) -> i64 {
        match self {
            Timestamp::Period(p) => *p,
            Timestamp::Instant(dt) => i64::from(dt.year()),
        }
    }
}

impl FromStr for Timestamp {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Ok(p) = s.parse::<i64>() {
            return Ok(Timestamp::Period(p));
        }
        for fmt in INSTANT_FORMATS {
            if let Ok(dt) = NaiveDateTime::parse_from_str(s, fmt) {
                return Ok(Timestamp::Instant(dt));
            }
        }
        if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
            return Ok(Timestamp::Instant(d.and_hms_opt(0, 0, 0).expect("midnight")));
        }
        Err(Error::invalid(format!("unrecognised timestamp {s:?}")))
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Timestamp::Period(p) => write!(f, "{p}"),
            Timestamp::Instant(dt) => write!(f, "{}", dt.format("%Y-%m-%dT%H:%M:%S")),
        }
    }
}

impl Serialize for Timestamp {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Int(p) => Ok(Timestamp::Period(p)),
            Raw::Text(t) => t.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// One timestamped, weighted, undirected interaction between two actors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub time: Timestamp,
    pub a: ActorId,
    pub b: ActorId,
    pub weight: u64,
}

impl InteractionEvent {
    /// Validating constructor: rejects self-loops and zero weights.
    pub fn new(time: Timestamp, a: ActorId, b: ActorId, weight: u64) -> Result<Self> {
        let event = InteractionEvent { time, a, b, weight };
        event.validate()?;
        Ok(event)
    }

    pub fn validate(&self) -> Result<()> {
        if self.a == self.b {
            return Err(Error::invalid(format!("self-loop on actor {}", self.a)));
        }
        if self.weight == 0 {
            return Err(Error::invalid(format!(
                "zero weight between {} and {}",
                self.a, self.b
            )));
        }
        Ok(())
    }
}

/// An actor that joins the network at `time` without any interaction,
/// e.g. the author of a single-authored publication.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActorArrival {
    pub time: Timestamp,
    pub actor: ActorId,
}

/// A non-fatal problem found while ingesting or assembling data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Warning {
    /// Where the problem was found ("event 12", "line 7").
    pub context: String,
    pub message: String,
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.context, self.message)
    }
}

/// Mutable accumulator from which snapshots are frozen.
#[derive(Clone, Debug, Default)]
pub struct GraphBuilder {
    actors: BTreeSet<ActorId>,
    edges: BTreeMap<(ActorId, ActorId), u64>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_actor(&mut self, actor: ActorId) -> &mut Self {
        self.actors.insert(actor);
        self
    }

    /// Adds `weight` to the pair `{a, b}`. Self-loops and zero weights are
    /// rejected.
    pub fn add_interaction(&mut self, a: &ActorId, b: &ActorId, weight: u64) -> Result<&mut Self> {
        if a == b {
            return Err(Error::invalid(format!("self-loop on actor {a}")));
        }
        if weight == 0 {
            return Err(Error::invalid(format!("zero weight between {a} and {b}")));
        }
        let key = if a < b {
            (a.clone(), b.clone())
        } else {
            (b.clone(), a.clone())
        };
        if !self.actors.contains(a) {
            self.actors.insert(a.clone());
        }
        if !self.actors.contains(b) {
            self.actors.insert(b.clone());
        }
        *self.edges.entry(key).or_insert(0) += weight;
        Ok(self)
    }

    pub fn build(&self, label: impl Into<String>) -> GraphSnapshot {
        let actors: Vec<ActorId> = self.actors.iter().cloned().collect();
        let mut adjacency = vec![Vec::new(); actors.len()];
        let mut sum_links = 0;
        let index = |id: &ActorId| actors.binary_search(id).expect("endpoint registered");
        for ((a, b), &w) in &self.edges {
            let (i, j) = (index(a), index(b));
            adjacency[i].push((j, w));
            adjacency[j].push((i, w));
            sum_links += w;
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        GraphSnapshot {
            label: label.into(),
            actors,
            adjacency,
            n_links: self.edges.len(),
            sum_links,
        }
    }
}

/// Immutable weighted undirected simple graph at one breakpoint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSnapshot {
    label: String,
    actors: Vec<ActorId>,
    adjacency: Vec<Vec<(usize, u64)>>,
    n_links: usize,
    sum_links: u64,
}

impl GraphSnapshot {
    /// Snapshot with no actors.
    pub fn empty(label: impl Into<String>) -> Self {
        GraphBuilder::new().build(label)
    }

    /// Convenience constructor from unit-weight pairs of string labels.
    pub fn from_pairs<S: AsRef<str>>(label: impl Into<String>, pairs: &[(S, S)]) -> Result<Self> {
        let mut builder = GraphBuilder::new();
        for (a, b) in pairs {
            builder.add_interaction(&ActorId::new(a)?, &ActorId::new(b)?, 1)?;
        }
        Ok(builder.build(label))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// N: number of actors.
    pub fn n_actors(&self) -> usize {
        self.actors.len()
    }

    /// L: number of distinct connected pairs.
    pub fn n_links(&self) -> usize {
        self.n_links
    }

    /// W: sum of edge weights.
    pub fn sum_links(&self) -> u64 {
        self.sum_links
    }

    /// Actors in lexicographic order; positions are the node indices.
    pub fn actors(&self) -> &[ActorId] {
        &self.actors
    }

    pub fn actor(&self, index: usize) -> &ActorId {
        &self.actors[index]
    }

    pub fn index_of(&self, actor: &ActorId) -> Option<usize> {
        self.actors.binary_search(actor).ok()
    }

    pub fn contains(&self, actor: &ActorId) -> bool {
        self.index_of(actor).is_some()
    }

    /// Neighbors of node `index` with edge weights, sorted by neighbor index.
    pub fn neighbors(&self, index: usize) -> &[(usize, u64)] {
        &self.adjacency[index]
    }

    pub fn degree_at(&self, index: usize) -> usize {
        self.adjacency[index].len()
    }

    pub fn strength_at(&self, index: usize) -> u64 {
        self.adjacency[index].iter().map(|&(_, w)| w).sum()
    }

    /// Number of distinct neighbors of `actor`.
    pub fn degree(&self, actor: &ActorId) -> Result<usize> {
        Ok(self.degree_at(self.require(actor)?))
    }

    /// Sum of the weights of the edges incident to `actor`.
    pub fn strength(&self, actor: &ActorId) -> Result<u64> {
        Ok(self.strength_at(self.require(actor)?))
    }

    pub fn weight(&self, a: &ActorId, b: &ActorId) -> Option<u64> {
        let (i, j) = (self.index_of(a)?, self.index_of(b)?);
        self.weight_at(i, j)
    }

    pub fn weight_at(&self, i: usize, j: usize) -> Option<u64> {
        let list = &self.adjacency[i];
        list.binary_search_by_key(&j, |&(k, _)| k)
            .ok()
            .map(|pos| list[pos].1)
    }

    /// Each undirected edge once, as `(i, j, weight)` with `i < j`, in
    /// lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, list)| {
            list.iter()
                .filter(move |&&(j, _)| j > i)
                .map(move |&(j, w)| (i, j, w))
        })
    }

    pub(crate) fn require(&self, actor: &ActorId) -> Result<usize> {
        self.index_of(actor)
            .ok_or_else(|| Error::NotFound(actor.clone()))
    }

    /// Connected components as sorted node-index lists, ordered by their
    /// smallest member. Isolated actors form singleton components.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.n_actors();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        let mut stack = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            stack.push(start);
            let mut members = Vec::new();
            while let Some(v) = stack.pop() {
                members.push(v);
                for &(w, _) in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Subgraph induced by the given node indices, keeping this label.
    pub fn induced(&self, nodes: &[usize]) -> GraphSnapshot {
        let keep: BTreeSet<usize> = nodes.iter().copied().collect();
        let mut builder = GraphBuilder::new();
        for &i in &keep {
            builder.add_actor(self.actors[i].clone());
        }
        for (i, j, w) in self.edges() {
            if keep.contains(&i) && keep.contains(&j) {
                builder
                    .add_interaction(&self.actors[i], &self.actors[j], w)
                    .expect("snapshot edges are valid");
            }
        }
        builder.build(self.label.clone())
    }

    /// Induced subgraph on the largest connected component.
    ///
    /// Ties on size go to the component holding the lexicographically
    /// smallest actor. An empty snapshot yields an empty snapshot.
    pub fn giant_component(&self) -> GraphSnapshot {
        match self.giant_component_nodes() {
            Some(nodes) => self.induced(&nodes),
            None => GraphSnapshot::empty(self.label.clone()),
        }
    }

    pub(crate) fn giant_component_nodes(&self) -> Option<Vec<usize>> {
        let mut best: Option<Vec<usize>> = None;
        // components come ordered by smallest member, so a strict `>` keeps
        // the lexicographic tiebreak
        for c in self.components() {
            if best.as_ref().is_none_or(|b| c.len() > b.len()) {
                best = Some(c);
            }
        }
        best
    }
}

/// Output of [`build_cumulative_snapshots`].
#[derive(Clone, Debug)]
pub struct CumulativeSnapshots {
    pub snapshots: Vec<GraphSnapshot>,
    /// One record per rejected event.
    pub warnings: Vec<Warning>,
}

/// Builds one cumulative snapshot per breakpoint.
///
/// Snapshot `k` holds every event with `time <= breakpoints[k]`. Events may
/// arrive in any order; self-loops and zero-weight events are skipped with a
/// warning. Events after the last breakpoint are ignored.
pub fn build_cumulative_snapshots(
    events: &[InteractionEvent],
    breakpoints: &[Timestamp],
    labels: &[String],
) -> Result<CumulativeSnapshots> {
    build_cumulative_snapshots_with_actors(events, &[], breakpoints, labels)
}

/// Like [`build_cumulative_snapshots`], also registering actors that join
/// without any interaction.
pub fn build_cumulative_snapshots_with_actors(
    events: &[InteractionEvent],
    arrivals: &[ActorArrival],
    breakpoints: &[Timestamp],
    labels: &[String],
) -> Result<CumulativeSnapshots> {
    if breakpoints.is_empty() {
        return Err(Error::invalid("breakpoint list is empty"));
    }
    if labels.len() != breakpoints.len() {
        return Err(Error::invalid(format!(
            "{} labels for {} breakpoints",
            labels.len(),
            breakpoints.len()
        )));
    }
    if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("breakpoints must be strictly increasing"));
    }

    let mut warnings = Vec::new();
    let mut valid: Vec<&InteractionEvent> = Vec::with_capacity(events.len());
    for (i, event) in events.iter().enumerate() {
        match event.validate() {
            Ok(()) => valid.push(event),
            Err(e) => warnings.push(Warning {
                context: format!("event {i}"),
                message: e.to_string(),
            }),
        }
    }
    valid.sort_by_key(|e| e.time);
    let mut arrivals: Vec<&ActorArrival> = arrivals.iter().collect();
    arrivals.sort_by_key(|a| a.time);

    let mut builder = GraphBuilder::new();
    let (mut next_event, mut next_arrival) = (0, 0);
    let mut snapshots = Vec::with_capacity(breakpoints.len());
    for (bp, label) in breakpoints.iter().zip(labels) {
        while next_event < valid.len() && valid[next_event].time <= *bp {
            let e = valid[next_event];
            builder.add_interaction(&e.a, &e.b, e.weight)?;
            next_event += 1;
        }
        while next_arrival < arrivals.len() && arrivals[next_arrival].time <= *bp {
            builder.add_actor(arrivals[next_arrival].actor.clone());
            next_arrival += 1;
        }
        snapshots.push(builder.build(label.clone()));
    }
    Ok(CumulativeSnapshots {
        snapshots,
        warnings,
    })
}
