use crate::circuit::{Circuit, Regions};
use crate::error::RewriteError;
use crate::gate::{Control, Gate, GateKind, Polarity};

/// Polarity of the Toffoli control sitting on the CNOT-sandwiched wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TemplateKind {
    Positive,
    Negative,
}

struct Site {
    kind: TemplateKind,
    replacement: [Gate; 2],
}

// CX(c -> m); CCX(x, m -> t); CX(c -> m)  ==  t ^= x AND (m XOR c)  (or XNOR for a
// negative m-control), which splits into two 3-control X gates without the CNOTs.
fn match_site(gates: &[Gate], site: usize) -> Option<Site> {
    let [a, b, c]: &[Gate; 3] = gates.get(site..site + 3)?.try_into().ok()?;
    if a.kind != GateKind::Cx || a != c || b.kind != GateKind::Ccx {
        return None;
    }
    let (ctl, m) = (a.controls[0].wire, a.targets[0]);
    let mi = b.controls.iter().position(|k| k.wire == m)?;
    let x = b.controls[1 - mi];
    let t = b.targets[0];
    if ctl == x.wire || ctl == t {
        return None;
    }
    let kind = match b.controls[mi].polarity {
        Polarity::Positive => TemplateKind::Positive,
        Polarity::Negative => TemplateKind::Negative,
    };
    let c3x = |pc: Control, pm: Control| Gate::controlled(GateKind::C3x, vec![x, pc, pm], t);
    let replacement = match kind {
        TemplateKind::Positive => [
            c3x(Control::pos(ctl), Control::neg(m)),
            c3x(Control::neg(ctl), Control::pos(m)),
        ],
        TemplateKind::Negative => [
            c3x(Control::neg(ctl), Control::neg(m)),
            c3x(Control::pos(ctl), Control::pos(m)),
        ],
    };
    Some(Site { kind, replacement })
}

/// Indices where a CX-CCX-CX sandwich starts (inside a single region).
pub fn find_template_sites(circuit: &Circuit) -> Vec<(usize, TemplateKind)> {
    (0..circuit.len().saturating_sub(2))
        .filter(|&i| circuit.region_of(i) == circuit.region_of(i + 2))
        .filter_map(|i| match_site(circuit.gates(), i).map(|s| (i, s.kind)))
        .collect()
}

/// Rewrites the sandwich at `site` into two 3-control X gates.
pub fn apply_parallelisation_template(circuit: &Circuit, site: usize) -> Result<Circuit, RewriteError> {
    let m = match_site(circuit.gates(), site)
        .filter(|_| circuit.region_of(site) == circuit.region_of(site + 2))
        .ok_or(RewriteError::PatternMismatch(site))?;
    let mut out = circuit.empty_like();
    let gates = circuit.gates();
    let new_gates = gates[..site]
        .iter()
        .cloned()
        .chain(m.replacement)
        .chain(gates[site + 3..].iter().cloned());
    out.extend(new_gates).expect("rewrite keeps gates valid");
    if let Some(r) = circuit.regions() {
        let shift = |x: usize| if x > site { x - 1 } else { x };
        out.set_regions(Some(Regions {
            fanout: shift(r.fanout.start)..shift(r.fanout.end),
            query: shift(r.query.start)..shift(r.query.end),
            fanin: shift(r.fanin.start)..shift(r.fanin.end),
        }))
        .expect("shifted regions stay ordered");
    }
    Ok(out)
}
