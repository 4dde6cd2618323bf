//! OpenQASM 2.0 export.
//!
//! Wires become `q[i]` in circuit order. Every measurement record gets its own
//! one-bit classical register. Negative controls are conjugated with `x`;
//! three-control Toffolis use the `c3x` gate from `qelib1.inc`.

use std::collections::HashMap;
use std::fmt::Write;

use crate::circuit::Circuit;
use crate::gate::{Gate, GateKind, Polarity, WireId};

fn creg_name(record: &str, taken: &mut HashMap<String, usize>) -> String {
    let mut s: String = record
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' { c } else { '_' })
        .collect();
    if !s.starts_with(|c: char| c.is_ascii_lowercase()) {
        s.insert_str(0, "c_");
    }
    let n = taken.entry(s.clone()).or_insert(0);
    *n += 1;
    if *n > 1 {
        s = format!("{s}_{}", *n - 1);
    }
    s
}

pub fn to_qasm(c: &Circuit) -> String {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    writeln!(out, "qreg q[{}];", c.num_wires().max(1)).unwrap();

    let mut taken = HashMap::new();
    let cregs: HashMap<&str, String> = c
        .measurement_records()
        .iter()
        .map(|r| (r.as_str(), creg_name(r, &mut taken)))
        .collect();
    for r in c.measurement_records() {
        writeln!(out, "creg {}[1];", cregs[r.as_str()]).unwrap();
    }

    let q = |w: WireId| format!("q[{}]", w.0);
    for g in c.gates() {
        emit(&mut out, g, &q, &cregs);
    }
    out
}

fn emit(out: &mut String, g: &Gate, q: &dyn Fn(WireId) -> String, cregs: &HashMap<&str, String>) {
    let negs: Vec<WireId> = g
        .controls
        .iter()
        .filter(|c| c.polarity == Polarity::Negative)
        .map(|c| c.wire)
        .collect();
    for &w in &negs {
        writeln!(out, "x {};", q(w)).unwrap();
    }
    let ctl: Vec<String> = g.controls.iter().map(|c| q(c.wire)).collect();
    let t = |i: usize| q(g.targets[i]);
    let line = match g.kind {
        GateKind::X => format!("x {};", t(0)),
        GateKind::H => format!("h {};", t(0)),
        GateKind::S => format!("s {};", t(0)),
        GateKind::SDag => format!("sdg {};", t(0)),
        GateKind::T => format!("t {};", t(0)),
        GateKind::TDag => format!("tdg {};", t(0)),
        GateKind::Z => format!("z {};", t(0)),
        GateKind::Cx => format!("cx {},{};", ctl[0], t(0)),
        GateKind::Cz => format!("cz {},{};", ctl[0], t(0)),
        GateKind::McxFanout => g
            .targets
            .iter()
            .map(|&w| format!("cx {},{};", ctl[0], q(w)))
            .collect::<Vec<_>>()
            .join("\n"),
        GateKind::Ccx => format!("ccx {},{},{};", ctl[0], ctl[1], t(0)),
        GateKind::Ccz => {
            format!("h {0};\nccx {1},{2},{0};\nh {0};", t(0), ctl[0], ctl[1])
        }
        GateKind::C3x => format!("c3x {},{},{},{};", ctl[0], ctl[1], ctl[2], t(0)),
        GateKind::MeasureX => {
            let r = &cregs[g.record.as_deref().expect("measurement record")];
            format!("h {0};\nmeasure {0} -> {1}[0];", t(0), r)
        }
        GateKind::ClassicalCz => {
            let r = &cregs[g.condition.as_deref().expect("correction condition")];
            format!("if({r}==1) cz {},{};", ctl[0], t(0))
        }
    };
    out.push_str(&line);
    out.push('\n');
    for &w in &negs {
        writeln!(out, "x {};", q(w)).unwrap();
    }
}
