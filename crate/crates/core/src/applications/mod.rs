//! Classical codes, teleportation, and system-apparatus information flow.

mod classical;
mod flow;
mod teleport;

pub use classical::{classical_correctable, confusability_classes, Partition, CONFUSABILITY_EPS};
pub use flow::{information_flow, FlowReport};
pub use teleport::{correctable_after_noisy_teleport, noisy_teleport_channel, teleport_channel};
