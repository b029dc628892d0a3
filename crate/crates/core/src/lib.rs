//! Ant reinforcement processes on finite graphs.
//!
//! A sequence of random walkers travels from a nest to a food vertex; after
//! each walk a path inside the walker's trace is reinforced. The crate holds
//! the walk engine, exact electrical-network and absorbing-chain oracles, the
//! analytic objects for the losange and counterexample graphs, and the urn
//! processes that drive the convergence arguments.

pub mod graph;
pub mod walk;
pub mod conductance;
pub mod losange;
pub mod urn;
pub mod stats;
pub mod counterexample;
pub mod rng;
