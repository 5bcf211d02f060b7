//! Continuous-time simulation of a spatial SIS epidemic in which moving
//! particles and contaminated sites both carry infection, together with
//! the machinery used to reason about its phase diagram: monotone
//! couplings, a branching-process subcriticality bound, a region/site
//! percolation comparison and the survival-search protocol.

pub mod bounds;
pub mod coupling;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod lattice;
pub mod percolation;
pub mod rng;

pub use error::{Error, Result};
