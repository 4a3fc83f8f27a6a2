//! The over-the-air protocol: data field wire codec plus the per-member
//! state machine that consumes and produces sealed packets.

pub mod node;
pub mod wire;

pub use node::{ElectionRule, NodeConfig, NodeState, Output, ProtoError};
pub use wire::{Body, DataField, Stamp, WireError};
