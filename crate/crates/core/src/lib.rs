//! Temporal reachability network creation game.
//!
//! Agents are the nodes of a complete, edge-labeled host graph. Each agent buys
//! incident edges so that it can reach every other agent along a temporal path
//! (a path whose labels never decrease). This crate provides
//!
//! - temporal reachability and temporal-spanner predicates ([`graph`]),
//! - strategy profiles and agent costs ([`game`]),
//! - greedy and exact best responses ([`response`]),
//! - Nash / greedy equilibrium checks and structural audits ([`equilibrium`]),
//! - improving-response dynamics with cycle detection ([`dynamics`]),
//! - generators for the known instance families ([`constructions`]),
//! - minimal/minimum spanners and price-of-anarchy ratios ([`optimum`]),
//! - the plain-text file formats ([`format`]).

pub mod constructions;
pub mod dynamics;
pub mod equilibrium;
mod error;
pub mod format;
pub mod game;
pub mod graph;
pub mod optimum;
pub mod response;
pub mod setcover;
mod union_find;

pub use error::{Error, Result};
pub use fixedbitset::FixedBitSet as NodeSet;
pub use game::{CostVector, StrategyProfile};
pub use graph::{DirectedTemporalGraph, Edge, TemporalGraph};
pub use setcover::SetCoverInstance;

/// Nodes are dense indices `0..n`.
pub type Node = usize;

/// Time label of an edge; valid labels start at 1.
pub type Label = u32;

/// Exact rational used for price-of-anarchy ratios.
pub type Ratio = num_rational::Ratio<u64>;

/// Default cap on explored search nodes for the exponential solvers.
pub const DEFAULT_BUDGET_CAP: u64 = 10_000_000;
