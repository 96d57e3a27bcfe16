//! Decision-diagram quantum circuit simulation with SWAP elimination by
//! qubit relabeling.

pub mod bench;
pub mod circuit;
mod clock;
pub mod dd;
pub mod dense;
pub mod generators;
pub mod qasm;
pub mod reorder;
pub mod sim;
