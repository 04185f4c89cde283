//! Reading interaction data.
//!
//! Two input kinds are supported:
//!
//! * **events**: CSV with header `time,a,b,weight`. `weight` may be
//!   missing (column or cell) and defaults to 1. A row with an empty `b`
//!   registers `a` as an actor without any interaction.
//! * **publications**: JSON Lines, one
//!   `{"pub_id": .., "date": .., "authors": [..]}` object per line.
//!   Each publication is expanded into the pairwise co-authorship events of
//!   its authors.
//!
//! Bad rows are skipped with a [`Warning`]; if more than 10% of the data
//! rows are skipped the whole file is rejected.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ActorArrival, ActorId, GraphSnapshot, InteractionEvent, Timestamp, Warning};

/// Largest tolerated share of skipped rows.
pub const MAX_SKIPPED_FRACTION: f64 = 0.10;

/// Events and actor registrations read from one source.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Interactions {
    pub events: Vec<InteractionEvent>,
    pub arrivals: Vec<ActorArrival>,
    pub warnings: Vec<Warning>,
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

fn check_skip_ratio(path: &Path, skipped: usize, total: usize) -> Result<()> {
    if total > 0 && skipped as f64 > MAX_SKIPPED_FRACTION * total as f64 {
        return Err(Error::Parse {
            path: path.to_owned(),
            message: format!("{skipped} of {total} rows skipped"),
        });
    }
    Ok(())
}

/// Reads an edge-event CSV file.
pub fn parse_edge_events(path: &Path) -> Result<Interactions> {
    let bytes = read_bytes(path)?;
    read_edge_events(bytes.as_slice(), path)
}

/// Reads edge-event CSV from any reader; `source` names it in messages.
pub fn read_edge_events<R: Read>(reader: R, source: &Path) -> Result<Interactions> {
    let parse_err = |message: String| Error::Parse {
        path: source.to_owned(),
        message,
    };
    let mut rdr = csv::ReaderBuilder::new()
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers().map_err(|e| parse_err(e.to_string()))?.clone();
    let column = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let (Some(time_col), Some(a_col), Some(b_col)) = (column("time"), column("a"), column("b")) else {
        return Err(parse_err(format!(
            "expected header time,a,b[,weight], found {:?}",
            headers.iter().collect::<Vec<_>>()
        )));
    };
    let weight_col = column("weight");

    let mut out = Interactions::default();
    let (mut total, mut skipped) = (0usize, 0usize);
    for (i, record) in rdr.records().enumerate() {
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                total += 1;
                skipped += 1;
                out.warnings.push(Warning {
                    context: format!("row {}", i + 1),
                    message: e.to_string(),
                });
                continue;
            }
        };
        if record.iter().all(str::is_empty) {
            continue;
        }
        total += 1;
        let line = record
            .position()
            .map_or_else(|| format!("row {}", i + 1), |p| format!("line {}", p.line()));
        match parse_event_row(&record, time_col, a_col, b_col, weight_col) {
            Ok(Row::Event(e)) => out.events.push(e),
            Ok(Row::Arrival(a)) => out.arrivals.push(a),
            Err(message) => {
                skipped += 1;
                out.warnings.push(Warning {
                    context: line,
                    message,
                });
            }
        }
    }
    check_skip_ratio(source, skipped, total)?;
    Ok(out)
}

enum Row {
    Event(InteractionEvent),
    Arrival(ActorArrival),
}

fn parse_event_row(
    record: &csv::StringRecord,
    time_col: usize,
    a_col: usize,
    b_col: usize,
    weight_col: Option<usize>,
) -> std::result::Result<Row, String> {
    let cell = |c: usize| record.get(c).unwrap_or("");
    let time: Timestamp = cell(time_col).parse().map_err(|e: Error| e.to_string())?;
    let a = ActorId::new(cell(a_col)).map_err(|_| "empty actor a".to_string())?;
    if cell(b_col).is_empty() {
        return Ok(Row::Arrival(ActorArrival { time, actor: a }));
    }
    let b = ActorId::new(cell(b_col)).map_err(|e| e.to_string())?;
    let weight = match weight_col.map(cell) {
        None | Some("") => 1,
        Some(w) => w
            .parse::<u64>()
            .map_err(|_| format!("weight {w:?} is not a positive integer"))?,
    };
    InteractionEvent::new(time, a, b, weight)
        .map(Row::Event)
        .map_err(|e| e.to_string())
}

/// Writes events (and lone actors) as edge-event CSV, LF line endings.
pub fn write_edge_events<W: Write>(
    writer: W,
    events: &[InteractionEvent],
    arrivals: &[ActorArrival],
) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(writer);
    w.write_record(["time", "a", "b", "weight"])?;
    for e in events {
        w.write_record([
            e.time.to_string(),
            e.a.to_string(),
            e.b.to_string(),
            e.weight.to_string(),
        ])?;
    }
    for a in arrivals {
        w.write_record([a.time.to_string(), a.actor.to_string(), String::new(), String::new()])?;
    }
    w.flush()
}

/// Flattens a snapshot into events stamped `time`; isolated actors become
/// arrival rows. Re-ingesting the output rebuilds the same graph.
pub fn snapshot_to_interactions(s: &GraphSnapshot, time: Timestamp) -> (Vec<InteractionEvent>, Vec<ActorArrival>) {
    let events = s
        .edges()
        .map(|(i, j, w)| InteractionEvent {
            time,
            a: s.actor(i).clone(),
            b: s.actor(j).clone(),
            weight: w,
        })
        .collect();
    let arrivals = (0..s.n_actors())
        .filter(|&i| s.degree_at(i) == 0)
        .map(|i| ActorArrival {
            time,
            actor: s.actor(i).clone(),
        })
        .collect();
    (events, arrivals)
}

/// One publication with its author list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublicationRecord {
    pub pub_id: String,
    pub date: Timestamp,
    pub authors: Vec<ActorId>,
}

impl PublicationRecord {
    /// Builds a record, trimming labels and dropping repeated authors
    /// (case-sensitive, first occurrence kept).
    pub fn new<S: AsRef<str>>(pub_id: impl Into<String>, date: Timestamp, authors: &[S]) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut list = Vec::with_capacity(authors.len());
        for a in authors {
            let id = ActorId::new(a)?;
            if seen.insert(id.clone()) {
                list.push(id);
            }
        }
        Ok(PublicationRecord {
            pub_id: pub_id.into(),
            date,
            authors: list,
        })
    }
}

#[derive(Deserialize)]
struct RawPublication {
    pub_id: serde_json::Value,
    date: Timestamp,
    authors: Vec<String>,
}

/// Publications read from a JSON Lines source.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Publications {
    pub records: Vec<PublicationRecord>,
    pub warnings: Vec<Warning>,
}

pub fn parse_publications(path: &Path) -> Result<Publications> {
    let bytes = read_bytes(path)?;
    read_publications(bytes.as_slice(), path)
}

/// Reads publication JSON Lines. Duplicate `pub_id`s and malformed lines
/// are skipped with a warning.
pub fn read_publications<R: Read>(mut reader: R, source: &Path) -> Result<Publications> {
    let mut text = String::new();
    reader.read_to_string(&mut text).map_err(|e| Error::Parse {
        path: source.to_owned(),
        message: e.to_string(),
    })?;
    let mut out = Publications::default();
    let mut ids = HashSet::new();
    let (mut total, mut skipped) = (0usize, 0usize);
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        total += 1;
        let context = format!("line {}", i + 1);
        let parsed = serde_json::from_str::<RawPublication>(line)
            .map_err(|e| e.to_string())
            .and_then(|raw| {
                let id = match raw.pub_id {
                    serde_json::Value::String(s) => s,
                    other => other.to_string(),
                };
                // blank author names are dropped here; an empty list is
                // reported when the record is expanded
                let names: Vec<&String> = raw.authors.iter().filter(|a| !a.trim().is_empty()).collect();
                PublicationRecord::new(id, raw.date, &names).map_err(|e| e.to_string())
            });
        match parsed {
            Ok(record) if !ids.insert(record.pub_id.clone()) => {
                skipped += 1;
                out.warnings.push(Warning {
                    context,
                    message: format!("duplicate pub_id {:?}", record.pub_id),
                });
            }
            Ok(record) => out.records.push(record),
            Err(message) => {
                skipped += 1;
                out.warnings.push(Warning { context, message });
            }
        }
    }
    check_skip_ratio(source, skipped, total)?;
    Ok(out)
}

/// Clique expansion: a publication with `k >= 2` authors yields the
/// `k(k-1)/2` unit-weight author pairs, stamped with its date. A
/// single-author publication registers its author without edges.
pub fn expand_publications(records: &[PublicationRecord]) -> Interactions {
    let mut out = Interactions::default();
    for record in records {
        let authors: Vec<&ActorId> = {
            let mut seen = BTreeSet::new();
            record.authors.iter().filter(|a| seen.insert(*a)).collect()
        };
        match authors.len() {
            0 => out.warnings.push(Warning {
                context: format!("publication {}", record.pub_id),
                message: "no authors".into(),
            }),
            1 => out.arrivals.push(ActorArrival {
                time: record.date,
                actor: authors[0].clone(),
            }),
            _ => {
                for (i, a) in authors.iter().enumerate() {
                    for b in &authors[i + 1..] {
                        out.events.push(InteractionEvent {
                            time: record.date,
                            a: (*a).clone(),
                            b: (*b).clone(),
                            weight: 1,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Kind of input file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputKind {
    Events,
    Publications,
}

impl std::str::FromStr for InputKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "events" => Ok(InputKind::Events),
            "publications" => Ok(InputKind::Publications),
            other => Err(Error::invalid(format!("unknown input kind {other:?}"))),
        }
    }
}

/// Reads `bytes` as the given kind of input.
pub fn load_interactions(bytes: &[u8], kind: InputKind, source: &Path) -> Result<Interactions> {
    match kind {
        InputKind::Events => read_edge_events(bytes, source),
        InputKind::Publications => {
            let pubs = read_publications(bytes, source)?;
            let mut expanded = expand_publications(&pubs.records);
            let mut warnings = pubs.warnings;
            warnings.append(&mut expanded.warnings);
            expanded.warnings = warnings;
            Ok(expanded)
        }
    }
}

/// Path used in messages for data read from standard input.
pub fn stdin_source() -> PathBuf {
    PathBuf::from("<stdin>")
}
