//! Longitudinal analysis of growing collaboration networks.
//!
//! Interaction logs (timestamped actor pairs, or publications expanded into
//! co-author pairs) are cut into cumulative [`GraphSnapshot`]s. Each
//! snapshot gets the usual battery of structural measures, a log-log
//! power-law fit of its degree distribution and four attachment-logic
//! proxies. Across periods the crate correlates the proxies with network
//! centralization, flags measures that stay constant while the network
//! grows, and applies a four-part small-world test.
//!
//! ```
//! use netevolve::graph::{build_cumulative_snapshots, InteractionEvent, Timestamp, ActorId};
//! use netevolve::metrics::{density_weighted, metrics_row};
//!
//! let ev = |t, a: &str, b: &str| InteractionEvent::new(
//!     Timestamp::Period(t), ActorId::new(a).unwrap(), ActorId::new(b).unwrap(), 1,
//! ).unwrap();
//! let events = [ev(1, "A", "B"), ev(2, "A", "B"), ev(3, "B", "C")];
//! let built = build_cumulative_snapshots(
//!     &events,
//!     &[Timestamp::Period(2), Timestamp::Period(3)],
//!     &["early".into(), "late".into()],
//! ).unwrap();
//!
//! let late = &built.snapshots[1];
//! assert_eq!((late.n_actors(), late.n_links(), late.sum_links()), (3, 2, 3));
//! assert_eq!(density_weighted(late).unwrap(), 1.0);
//! assert_eq!(metrics_row(late).diameter, Some(2));
//! ```

pub mod error;
pub mod evolution;
pub mod generators;
pub mod graph;
pub mod ingest;
pub mod metrics;
pub mod powerlaw;
pub mod report;

pub use error::{Error, Result};
pub use graph::{ActorId, GraphSnapshot, InteractionEvent, Timestamp};
