//! Command-line front end and HTTP session service for `greybox-core`.
//!
//! The `greybox` binary wraps the checklist engine (`intake ...`), the
//! specification linter (`validate`), the recommender (`recommend`), the
//! simplex benchmark (`bench`) and experiment reports (`plan`, `report`).
//! `serve` exposes checklist sessions over HTTP; see [`http`].
//!
//! Sessions and specifications are plain files in a data directory, and
//! the CLI and the HTTP service write them through the same code path.

pub mod cli;
pub mod exit;
pub mod http;
pub mod intake;
pub mod store;
