//! Round-synchronous CONGEST simulation of random walks, gossip and mixing-time
//! estimation over evolving regular graphs.

pub mod congest;
pub mod gossip;
pub mod graph;
pub mod harness;
pub mod mixing;
pub mod rng;
pub mod spectral;
pub mod stats;
pub mod walks;
