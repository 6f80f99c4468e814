//! Experiment harness, output writers and plotting behind the `wsnsim` CLI.

pub mod experiments;
pub mod oracle_checks;
pub mod output;
pub mod plot;
