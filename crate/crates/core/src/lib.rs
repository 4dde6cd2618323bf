pub mod builders;
pub mod circuit;
pub mod decompose;
pub mod document;
pub mod error;
pub mod gate;
pub mod metrics;
pub mod passes;
pub mod phase_poly;
pub mod qasm;
pub mod render;
pub mod schedule;
pub mod sim;

pub use builders::{FaninMode, QramInstance, QramLayout};
pub use circuit::{Circuit, Region, RegionBuilder, Regions};
pub use decompose::CczVariant;
pub use error::*;
pub use gate::{Control, Gate, GateKind, Polarity, WireId};
