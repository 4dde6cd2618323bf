//! Gate alphabet of the circuit IR.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::IrError;

/// Dense handle of a wire inside one [`Circuit`](crate::Circuit).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WireId(pub usize);

impl WireId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Control {
    pub wire: WireId,
    pub polarity: Polarity,
}

impl Control {
    pub fn pos(wire: WireId) -> Self {
        Control { wire, polarity: Polarity::Positive }
    }

    pub fn neg(wire: WireId) -> Self {
        Control { wire, polarity: Polarity::Negative }
    }

    /// Whether the control fires for the given computational-basis value.
    pub fn fires(&self, bit: bool) -> bool {
        match self.polarity {
            Polarity::Positive => bit,
            Polarity::Negative => !bit,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GateKind {
    X,
    H,
    S,
    SDag,
    T,
    TDag,
    Z,
    /// One control, one target.
    Cx,
    /// One control fanned out to `k >= 1` targets in a single step.
    #[serde(rename = "MCX_FANOUT")]
    McxFanout,
    Cz,
    Ccx,
    Ccz,
    /// Three-control X. Only produced by the parallelisation templates.
    C3x,
    /// Hadamard followed by a computational-basis measurement; writes a record.
    MeasureX,
    /// CZ applied when a previously recorded measurement bit is 1.
    ClassicalCz,
}

impl GateKind {
    pub const ALL: [GateKind; 15] = [
        GateKind::X,
        GateKind::H,
        GateKind::S,
        GateKind::SDag,
        GateKind::T,
        GateKind::TDag,
        GateKind::Z,
        GateKind::Cx,
        GateKind::McxFanout,
        GateKind::Cz,
        GateKind::Ccx,
        GateKind::Ccz,
        GateKind::C3x,
        GateKind::MeasureX,
        GateKind::ClassicalCz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "X",
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::SDag => "S_DAG",
            GateKind::T => "T",
            GateKind::TDag => "T_DAG",
            GateKind::Z => "Z",
            GateKind::Cx => "CX",
            GateKind::McxFanout => "MCX_FANOUT",
            GateKind::Cz => "CZ",
            GateKind::Ccx => "CCX",
            GateKind::Ccz => "CCZ",
            GateKind::C3x => "C3X",
            GateKind::MeasureX => "MEASURE_X",
            GateKind::ClassicalCz => "CLASSICAL_CZ",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        GateKind::ALL.into_iter().find(|k| k.name() == name)
    }

    /// Number of controls the kind takes.
    pub fn control_arity(self) -> usize {
        match self {
            GateKind::X
            | GateKind::H
            | GateKind::S
            | GateKind::SDag
            | GateKind::T
            | GateKind::TDag
            | GateKind::Z
            | GateKind::MeasureX => 0,
            GateKind::Cx | GateKind::McxFanout | GateKind::Cz | GateKind::ClassicalCz => 1,
            GateKind::Ccx | GateKind::Ccz => 2,
            GateKind::C3x => 3,
        }
    }

    /// Exact target count; `None` means "one or more" (fan-out).
    pub fn target_arity(self) -> Option<usize> {
        match self {
            GateKind::McxFanout => None,
            _ => Some(1),
        }
    }

    /// Single-qubit gates diagonal in the computational basis.
    pub fn is_diagonal_1q(self) -> bool {
        matches!(
            self,
            GateKind::S | GateKind::SDag | GateKind::T | GateKind::TDag | GateKind::Z
        )
    }

    /// Phase of a diagonal single-qubit gate in units of pi/4.
    pub fn phase_units(self) -> Option<u8> {
        match self {
            GateKind::T => Some(1),
            GateKind::S => Some(2),
            GateKind::Z => Some(4),
            GateKind::SDag => Some(6),
            GateKind::TDag => Some(7),
            _ => None,
        }
    }

    pub fn is_unitary(self) -> bool {
        !matches!(self, GateKind::MeasureX | GateKind::ClassicalCz)
    }

    pub fn allows_negative_controls(self) -> bool {
        matches!(self, GateKind::Ccx | GateKind::Ccz | GateKind::C3x)
    }

    /// Kinds whose control may be shared inside one moment (fan-out CNOT).
    pub fn is_cnot_like(self) -> bool {
        matches!(self, GateKind::Cx | GateKind::McxFanout)
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    pub controls: Vec<Control>,
    pub targets: Vec<WireId>,
    /// Record read by a `ClassicalCz`.
    pub condition: Option<String>,
    /// Record written by a `MeasureX`.
    pub record: Option<String>,
}

impl Gate {
    /// Builds a gate and checks the per-kind structural rules.
    pub fn new(
        kind: GateKind,
        controls: Vec<Control>,
        targets: Vec<WireId>,
        condition: Option<String>,
        record: Option<String>,
    ) -> Result<Gate, IrError> {
        let gate = Gate { kind, controls, targets, condition, record };
        gate.check_shape()?;
        Ok(gate)
    }

    fn plain(kind: GateKind, controls: Vec<Control>, targets: Vec<WireId>) -> Gate {
        Gate { kind, controls, targets, condition: None, record: None }
    }

    pub fn single(kind: GateKind, wire: WireId) -> Gate {
        Gate::plain(kind, vec![], vec![wire])
    }

    pub fn x(w: WireId) -> Gate {
        Gate::single(GateKind::X, w)
    }

    pub fn h(w: WireId) -> Gate {
        Gate::single(GateKind::H, w)
    }

    pub fn s(w: WireId) -> Gate {
        Gate::single(GateKind::S, w)
    }

    pub fn sdg(w: WireId) -> Gate {
        Gate::single(GateKind::SDag, w)
    }

    pub fn t(w: WireId) -> Gate {
        Gate::single(GateKind::T, w)
    }

    pub fn tdg(w: WireId) -> Gate {
        Gate::single(GateKind::TDag, w)
    }

    pub fn z(w: WireId) -> Gate {
        Gate::single(GateKind::Z, w)
    }

    pub fn cx(control: WireId, target: WireId) -> Gate {
        Gate::plain(GateKind::Cx, vec![Control::pos(control)], vec![target])
    }

    pub fn fanout(control: WireId, targets: Vec<WireId>) -> Gate {
        Gate::plain(GateKind::McxFanout, vec![Control::pos(control)], targets)
    }

    pub fn cz(a: WireId, b: WireId) -> Gate {
        Gate::plain(GateKind::Cz, vec![Control::pos(a)], vec![b])
    }

    pub fn ccx(c0: WireId, c1: WireId, target: WireId) -> Gate {
        Gate::plain(
            GateKind::Ccx,
            vec![Control::pos(c0), Control::pos(c1)],
            vec![target],
        )
    }

    pub fn ccz(c0: WireId, c1: WireId, target: WireId) -> Gate {
        Gate::plain(
            GateKind::Ccz,
            vec![Control::pos(c0), Control::pos(c1)],
            vec![target],
        )
    }

    pub fn controlled(kind: GateKind, controls: Vec<Control>, target: WireId) -> Gate {
        Gate::plain(kind, controls, vec![target])
    }

    pub fn measure_x(wire: WireId, record: impl Into<String>) -> Gate {
        Gate {
            kind: GateKind::MeasureX,
            controls: vec![],
            targets: vec![wire],
            condition: None,
            record: Some(record.into()),
        }
    }

    /// CZ on `(shared, other)` conditioned on `record`. The `other` wire is the
    /// one the correction is realised on (`H - CX - H`).
    pub fn classical_cz(shared: WireId, other: WireId, record: impl Into<String>) -> Gate {
        Gate {
            kind: GateKind::ClassicalCz,
            controls: vec![Control::pos(shared)],
            targets: vec![other],
            condition: Some(record.into()),
            record: None,
        }
    }

    /// All wires touched, controls first.
    pub fn wires(&self) -> impl Iterator<Item = WireId> + '_ {
        self.controls.iter().map(|c| c.wire).chain(self.targets.iter().copied())
    }

    pub fn touches(&self, w: WireId) -> bool {
        self.wires().any(|x| x == w)
    }

    pub fn min_wire(&self) -> WireId {
        self.wires().min().expect("gate without wires")
    }

    pub fn is_unitary(&self) -> bool {
        self.kind.is_unitary()
    }

    pub fn t_count(&self) -> usize {
        match self.kind {
            GateKind::T | GateKind::TDag => 1,
            _ => 0,
        }
    }

    /// Inverse of a unitary gate.
    pub fn dagger(&self) -> Result<Gate, IrError> {
        let kind = match self.kind {
            GateKind::S => GateKind::SDag,
            GateKind::SDag => GateKind::S,
            GateKind::T => GateKind::TDag,
            GateKind::TDag => GateKind::T,
            k if k.is_unitary() => k,
            k => return Err(IrError::NonUnitaryGate(k)),
        };
        Ok(Gate { kind, ..self.clone() })
    }

    /// Replace wire handles through `map` (used when splicing sub-circuits).
    pub fn remap(&self, map: impl Fn(WireId) -> WireId) -> Gate {
        Gate {
            kind: self.kind,
            controls: self
                .controls
                .iter()
                .map(|c| Control { wire: map(c.wire), polarity: c.polarity })
                .collect(),
            targets: self.targets.iter().map(|&t| map(t)).collect(),
            condition: self.condition.clone(),
            record: self.record.clone(),
        }
    }

    /// Same gate with interchangeable wires sorted: the controls of multi-control
    /// kinds and the targets of a fan-out.
    pub fn canonical(&self) -> Gate {
        let mut g = self.clone();
        if self.kind.control_arity() >= 2 {
            g.controls.sort_by_key(|c| c.wire);
        }
        if self.kind == GateKind::McxFanout {
            g.targets.sort();
        }
        g
    }

    /// Arity, disjointness, polarity and record rules that do not need the circuit.
    pub fn check_shape(&self) -> Result<(), IrError> {
        let kind = self.kind;
        let arity_ok = self.controls.len() == kind.control_arity()
            && match kind.target_arity() {
                Some(n) => self.targets.len() == n,
                None => !self.targets.is_empty(),
            };
        if !arity_ok {
            return Err(IrError::ArityMismatch {
                kind,
                controls: self.controls.len(),
                targets: self.targets.len(),
            });
        }
        let mut seen: Vec<WireId> = Vec::with_capacity(self.controls.len() + self.targets.len());
        for w in self.wires() {
            if seen.contains(&w) {
                return Err(IrError::OverlappingControlTarget(w));
            }
            seen.push(w);
        }
        if !kind.allows_negative_controls()
            && self.controls.iter().any(|c| c.polarity == Polarity::Negative)
        {
            return Err(IrError::NegativeControlNotAllowed(kind));
        }
        if (kind == GateKind::ClassicalCz) != self.condition.is_some() {
            return Err(IrError::ConditionMismatch(kind));
        }
        if (kind == GateKind::MeasureX) != self.record.is_some() {
            return Err(IrError::RecordMismatch(kind));
        }
        Ok(())
    }
}
