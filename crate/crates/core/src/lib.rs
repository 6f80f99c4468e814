//! Core library for `wsnsim`: a deterministic round-based simulator for
//! cluster-based wireless sensor networks.
//!
//! The crate is organized around the lifecycle of a simulation:
//!
//! - [`radio`] — first-order radio energy model (free-space / multipath split)
//! - [`topology`] — seeded random sensor fields and base-station placement
//! - [`rng`] — the portable deterministic generator all randomness flows from
//! - [`neighbors`] — ranked k-nearest-neighbor tables and rank-order distances
//! - [`clustering`] — one-pass approximate rank-order merge and the iterative
//!   rank-order agglomeration used as its verification oracle
//! - [`protocols`] — ARO-WSN, LEACH, LEACH-C, K-means and FUZZY-LEACH behind a
//!   common per-round contract
//! - [`sim`] — the round loop, energy ledger and death bookkeeping
//! - [`config`] — human-readable configuration with defaults for every knob
//! - [`oracle`] — independent brute-force reimplementations used by the
//!   equivalence checks (kept deliberately separate from the fast paths)

pub mod clustering;
pub mod config;
pub mod neighbors;
pub mod oracle;
pub mod protocols;
pub mod radio;
pub mod rng;
pub mod sim;
pub mod topology;

pub use config::SimConfig;
pub use protocols::ProtocolKind;
pub use radio::RadioParams;
pub use sim::{run_simulation, SimResult};
pub use topology::{FieldConfig, Node, Point};
