//! Circuit-to-circuit rewrites.

mod ghz;
mod template;

pub use ghz::{expand_ghz_fanout, GhzOptions};
pub use template::{apply_parallelisation_template, find_template_sites, TemplateKind};

use std::collections::HashMap;

use crate::circuit::Circuit;
use crate::decompose::phase_gates;
use crate::error::IrError;
use crate::gate::{Gate, WireId};

/// Merges every run of consecutive diagonal single-qubit gates on a wire into
/// its reduced form mod 8 (T^8 = I, T^4 = Z, T^2 = S). Runs never cross a
/// region boundary.
pub fn merge_phases(circuit: &Circuit) -> Result<Circuit, IrError> {
    circuit.map_regions(|_, gates| Ok::<_, IrError>(merge_phase_runs(gates)))
}

fn merge_phase_runs(gates: &[Gate]) -> Vec<Gate> {
    let mut slots: Vec<Vec<Gate>> = Vec::with_capacity(gates.len());
    // wire -> (slot of the run's first gate, accumulated units)
    let mut open: HashMap<WireId, (usize, u8)> = HashMap::new();
    let flush = |slots: &mut Vec<Vec<Gate>>, w: WireId, (slot, units): (usize, u8)| {
        slots[slot] = phase_gates(units, w);
    };
    for g in gates {
        if let Some(units) = g.kind.phase_units().filter(|_| g.controls.is_empty()) {
            let w = g.targets[0];
            if let Some(run) = open.get_mut(&w) {
                run.1 = (run.1 + units) % 8;
                slots.push(Vec::new());
            } else {
                open.insert(w, (slots.len(), units));
                slots.push(vec![g.clone()]);
            }
            continue;
        }
        for w in g.wires() {
            if let Some(run) = open.remove(&w) {
                flush(&mut slots, w, run);
            }
        }
        slots.push(vec![g.clone()]);
    }
    let mut rest: Vec<_> = open.into_iter().collect();
    rest.sort_by_key(|(w, _)| *w);
    for (w, run) in rest {
        flush(&mut slots, w, run);
    }
    slots.into_iter().flatten().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{Region, RegionBuilder};
    use crate::gate::GateKind;

    fn kinds(c: &Circuit) -> Vec<GateKind> {
        c.gates().iter().map(|g| g.kind).collect()
    }

    #[test]
    fn four_t_become_z_and_eight_vanish() {
        let mut c = Circuit::with_wires(["t"]).unwrap();
        c.extend((0..4).map(|_| Gate::t(WireId(0)))).unwrap();
        assert_eq!(kinds(&merge_phases(&c).unwrap()), vec![GateKind::Z]);
        c.extend((0..4).map(|_| Gate::t(WireId(0)))).unwrap();
        assert!(merge_phases(&c).unwrap().is_empty());
    }

    #[test]
    fn runs_stop_at_other_gates() {
        let mut c = Circuit::with_wires(["a", "b"]).unwrap();
        let (a, b) = (WireId(0), WireId(1));
        c.extend([Gate::t(a), Gate::t(b), Gate::t(a), Gate::cx(a, b), Gate::tdg(a), Gate::sdg(a)])
            .unwrap();
        let m = merge_phases(&c).unwrap();
        assert_eq!(
            m.gates(),
            &[Gate::s(a), Gate::t(b), Gate::cx(a, b), Gate::z(a), Gate::t(a)][..]
        );
    }

    #[test]
    fn runs_stay_inside_regions() {
        let c = Circuit::with_wires(["a"]).unwrap();
        let mut b = RegionBuilder::new(c);
        b.begin(Region::Fanout);
        b.push(Gate::t(WireId(0))).unwrap();
        b.begin(Region::Query);
        b.push(Gate::t(WireId(0))).unwrap();
        b.begin(Region::Fanin);
        let c = b.finish().unwrap();
        let m = merge_phases(&c).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m.regions(), c.regions());
    }
}
