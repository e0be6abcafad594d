//! Truncation towers: finite data modelling a countable spectrum.

mod analysis;
mod model;

pub use analysis::{
    ar_stabilization, closure_in_limit, tower_cb_rank, verify_tower, witness_failure_chain, ArReport, ArVerdict, ChainEntry,
    FamilyDesc, LimitVerdict, TowerCbReport, TowerReport, WitnessChain, WitnessMap,
};
pub use model::{PointFlags, TruncationTower, TOWER_SCHEMA};
