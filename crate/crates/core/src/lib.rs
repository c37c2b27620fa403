//! Structural hole spanner discovery.
//!
//! Ground truth comes from exact betweenness ([`centrality::brandes_bc`]);
//! nodes are described by one-hop ego features ([`features`]) and classified
//! by a message-passing network ([`gnn`]), optionally meta-trained across
//! graph families ([`meta`]).

pub mod centrality;
pub mod error;
pub mod features;
pub mod gnn;
pub mod graph;
pub mod io;
pub mod meta;

pub use error::{Result, ShsError};
