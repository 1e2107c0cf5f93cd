//! Checks of edge-count, depth and coloring bounds on intersection graphs of
//! disc families and of charging bounds on families of quadratic curves.
//!
//! The modules follow the pipeline: [`geom`] primitives feed [`family`]
//! generators, [`depth`] computes crossing depths and union complexity,
//! [`graph`] builds the intersection graph, [`sampling`] evaluates the
//! random-sampling inequality chain, [`charging`] builds the red/blue charge
//! certificate, and [`verify`] bundles the acceptance suite.

pub mod charging;
pub mod depth;
pub mod error;
pub mod family;
pub mod geom;
pub mod graph;
pub mod report;
pub mod sampling;
pub mod verify;

pub use error::{Error, Result};
pub use family::{Family, Kind};

pub const TOOL_NAME: &str = "linunion";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
