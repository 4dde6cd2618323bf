use thiserror::Error;

use crate::gate::{GateKind, WireId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IrError {
    #[error("unknown wire `{0}`")]
    UnknownWire(String),
    #[error("wire handle {0:?} is not registered")]
    UnknownWireId(WireId),
    #[error("duplicate wire `{0}`")]
    DuplicateWire(String),
    #[error("invalid wire name `{0}`")]
    InvalidWireName(String),
    #[error("{kind} takes a different arity (got {controls} controls, {targets} targets)")]
    ArityMismatch {
        kind: GateKind,
        controls: usize,
        targets: usize,
    },
    #[error("wire {0:?} used twice by one gate")]
    OverlappingControlTarget(WireId),
    #[error("{0} does not accept negative controls")]
    NegativeControlNotAllowed(GateKind),
    #[error("condition must be present exactly on CLASSICAL_CZ (got {0})")]
    ConditionMismatch(GateKind),
    #[error("record must be present exactly on MEASURE_X (got {0})")]
    RecordMismatch(GateKind),
    #[error("condition `{0}` does not refer to an earlier measurement")]
    UnknownRecord(String),
    #[error("invalid measurement record name `{0}`")]
    InvalidRecordName(String),
    #[error("measurement record `{0}` written twice")]
    DuplicateRecord(String),
    #[error("{0} has no unitary inverse")]
    NonUnitaryGate(GateKind),
    #[error("invalid region tags: {0}")]
    InvalidRegions(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecomposeError {
    #[error("shared wire is not one of the gate's wires")]
    InvalidSharedWire,
    #[error("the two Toffolis do not share exactly one control")]
    NotSharedControl,
    #[error("the two Toffolis do not share exactly the target")]
    NotSharedTarget,
    #[error("expected a positive-control CCX, got {0}")]
    NotToffoli(GateKind),
    #[error("{0} is outside the CNOT + diagonal fragment")]
    NonLinearFragment(GateKind),
    #[error("phase polynomial supports at most 64 wires, got {0}")]
    TooManyVariables(usize),
    #[error(transparent)]
    Ir(#[from] IrError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error("{wires} wires exceed the simulator limit of {limit}")]
    TooManyWires { wires: usize, limit: usize },
    #[error("{0} cannot be applied as a unitary")]
    NonUnitaryGate(GateKind),
    #[error("circuit wires do not match the QRAM layout: {0}")]
    LayoutMismatch(String),
    #[error("condition `{0}` has no recorded outcome")]
    MissingRecord(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("circuit has no region tags")]
    MissingRegionTags,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("gates at index {0} do not match a parallelisation template")]
    PatternMismatch(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DocumentError {
    #[error("schema violation at `{path}`: {message}")]
    SchemaViolation { path: String, message: String },
}

impl DocumentError {
    pub fn at(path: impl Into<String>, message: impl Into<String>) -> Self {
        DocumentError::SchemaViolation { path: path.into(), message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("cannot classify wire `{0}`")]
    UnknownWireClass(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RenderError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Ir(#[from] IrError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("address width q must be between 1 and {max}, got {q}")]
    AddressWidth { q: u32, max: u32 },
    #[error("query exponent n must satisfy 1 <= n <= q (q = {q}, n = {n})")]
    QueryExponent { q: u32, n: u32 },
    #[error("memory must hold 2^q = {expected} bits, got {got}")]
    MemoryLength { expected: usize, got: usize },
    #[error("invalid memory specification `{0}`")]
    MemorySpec(String),
}
