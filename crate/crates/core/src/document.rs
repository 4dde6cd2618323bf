//! JSON interchange format for circuits.

use serde::{Deserialize, Serialize};

use crate::builders::QramInstance;
use crate::circuit::{Circuit, Regions};
use crate::error::{DocumentError, IrError};
use crate::gate::{Control, Gate, GateKind, Polarity};

pub const IR_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDocument {
    ir_version: u32,
    wires: Vec<String>,
    gates: Vec<RawGate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    regions: Option<RawRegions>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    instance: Option<QramInstance>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGate {
    kind: GateKind,
    #[serde(default)]
    controls: Vec<RawControl>,
    targets: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    condition: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    record: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawControl {
    wire: String,
    polarity: Polarity,
}

/// Half-open `[lo, hi)` gate ranges.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegions {
    fanout: [usize; 2],
    query: [usize; 2],
    fanin: [usize; 2],
}

/// A circuit plus the QRAM instance it was built for, if any.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub circuit: Circuit,
    pub instance: Option<QramInstance>,
}

impl Document {
    pub fn new(circuit: Circuit) -> Self {
        Document { circuit, instance: None }
    }

    pub fn with_instance(circuit: Circuit, instance: QramInstance) -> Self {
        Document { circuit, instance: Some(instance) }
    }

    fn to_raw(&self) -> RawDocument {
        let c = &self.circuit;
        let name = |w| c.wire_name(w).to_string();
        RawDocument {
            ir_version: IR_VERSION,
            wires: c.wire_names().to_vec(),
            gates: c
                .gates()
                .iter()
                .map(|g| RawGate {
                    kind: g.kind,
                    controls: g
                        .controls
                        .iter()
                        .map(|ctl| RawControl { wire: name(ctl.wire), polarity: ctl.polarity })
                        .collect(),
                    targets: g.targets.iter().map(|&t| name(t)).collect(),
                    condition: g.condition.clone(),
                    record: g.record.clone(),
                })
                .collect(),
            regions: c.regions().map(|r| RawRegions {
                fanout: [r.fanout.start, r.fanout.end],
                query: [r.query.start, r.query.end],
                fanin: [r.fanin.start, r.fanin.end],
            }),
            instance: self.instance.clone(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_raw()).expect("document serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Document, DocumentError> {
        let mut de = serde_json::Deserializer::from_str(text);
        let raw: RawDocument = serde_path_to_error::deserialize(&mut de).map_err(|e| {
            let path = e.path().to_string();
            DocumentError::at(path, e.into_inner().to_string())
        })?;
        de.end().map_err(|e| DocumentError::at(".", e.to_string()))?;
        from_raw(raw)
    }
}

fn ir(path: String) -> impl FnOnce(IrError) -> DocumentError {
    move |e| DocumentError::at(path, e.to_string())
}

fn from_raw(raw: RawDocument) -> Result<Document, DocumentError> {
    if raw.ir_version != IR_VERSION {
        return Err(DocumentError::at(
            "ir_version",
            format!("unsupported version {} (expected {IR_VERSION})", raw.ir_version),
        ));
    }
    let mut c = Circuit::new();
    for (i, w) in raw.wires.into_iter().enumerate() {
        c.add_wire(w).map_err(ir(format!("wires[{i}]")))?;
    }
    for (i, g) in raw.gates.into_iter().enumerate() {
        let controls = g
            .controls
            .iter()
            .enumerate()
            .map(|(j, ctl)| {
                c.wire(&ctl.wire)
                    .map(|w| Control { wire: w, polarity: ctl.polarity })
                    .map_err(ir(format!("gates[{i}].controls[{j}].wire")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let targets = g
            .targets
            .iter()
            .enumerate()
            .map(|(j, t)| c.wire(t).map_err(ir(format!("gates[{i}].targets[{j}]"))))
            .collect::<Result<Vec<_>, _>>()?;
        let gate = Gate::new(g.kind, controls, targets, g.condition, g.record)
            .map_err(ir(format!("gates[{i}]")))?;
        let field = match () {
            _ if gate.condition.is_some() => "condition",
            _ if gate.record.is_some() => "record",
            _ => "kind",
        };
        c.push(gate).map_err(ir(format!("gates[{i}].{field}")))?;
    }
    if let Some(r) = raw.regions {
        let range = |p: [usize; 2]| p[0]..p[1];
        c.set_regions(Some(Regions {
            fanout: range(r.fanout),
            query: range(r.query),
            fanin: range(r.fanin),
        }))
        .map_err(ir("regions".to_string()))?;
    }
    let instance = match raw.instance {
        None => None,
        Some(i) => Some(
            QramInstance::new(i.q, i.n, i.memory)
                .map_err(|e| DocumentError::at("instance", e.to_string()))?,
        ),
    };
    Ok(Document { circuit: c, instance })
}

pub fn serialize(c: &Circuit) -> String {
    Document::new(c.clone()).to_json()
}

pub fn parse(text: &str) -> Result<Circuit, DocumentError> {
    Document::from_json(text).map(|d| d.circuit)
}
