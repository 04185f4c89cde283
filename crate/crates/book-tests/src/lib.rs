//! Every chapter of the guide in `book/src` is pulled in as the doc comment
//! of a module below, so `cargo test --doc -p book-tests` runs the
//! listings. One module per chapter keeps failures traceable.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/snapshots.md")]
pub mod snapshots {}

#[doc = include_str!("../../../book/src/measures.md")]
pub mod measures {}

#[doc = include_str!("../../../book/src/power-law.md")]
pub mod power_law {}

#[doc = include_str!("../../../book/src/evolution.md")]
pub mod evolution {}

#[doc = include_str!("../../../book/src/generators.md")]
pub mod generators {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

#[doc = include_str!("../../../book/src/reproducibility.md")]
pub mod reproducibility {}

#[doc = include_str!("../../../README.md")]
pub mod readme {}
