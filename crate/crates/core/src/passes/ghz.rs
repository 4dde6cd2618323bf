use crate::circuit::Circuit;
use crate::error::IrError;
use crate::gate::{Gate, GateKind, WireId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GhzOptions {
    /// Maximum number of ancillas to add. `None` gives every fan-out of width
    /// k its own k - 1 copies; a smaller budget splits wide fan-outs into
    /// rounds of at most `budget + 1` targets.
    pub ancilla_budget: Option<usize>,
}

fn fresh_names(c: &Circuit, count: usize) -> Vec<String> {
    (0..)
        .map(|i| format!("anc_{i}"))
        .filter(|n| c.find_wire(n).is_none())
        .take(count)
        .collect()
}

/// Replaces each MCX_FANOUT by a CNOT tree copying the control onto ancillas,
/// one transversal CNOT layer, and the mirrored tree. Ancillas start and end
/// in |0> and are shared between fan-outs.
pub fn expand_ghz_fanout(circuit: &Circuit, opts: &GhzOptions) -> Result<Circuit, IrError> {
    let widest = circuit
        .gates()
        .iter()
        .filter(|g| g.kind == GateKind::McxFanout)
        .map(|g| g.targets.len())
        .max()
        .unwrap_or(1);
    let pool_size = (widest - 1).min(opts.ancilla_budget.unwrap_or(usize::MAX));

    let mut base = circuit.empty_like();
    let pool: Vec<WireId> = fresh_names(circuit, pool_size)
        .into_iter()
        .map(|n| base.add_wire(n))
        .collect::<Result<_, _>>()?;
    // Re-home the original gates and tags on the widened wire list.
    let mut widened = base.clone();
    widened.extend(circuit.gates().iter().cloned())?;
    widened.set_regions(circuit.regions().cloned())?;

    widened.map_regions(|_, gates| {
        let mut out = Vec::with_capacity(gates.len());
        for g in gates {
            if g.kind != GateKind::McxFanout {
                out.push(g.clone());
                continue;
            }
            let control = g.controls[0].wire;
            if g.targets.len() == 1 || pool.is_empty() {
                out.extend(g.targets.iter().map(|&t| Gate::cx(control, t)));
                continue;
            }
            for chunk in g.targets.chunks(pool.len() + 1) {
                out.extend(ghz_round(control, chunk, &pool));
            }
        }
        Ok::<_, IrError>(out)
    })
}

fn ghz_round(control: WireId, targets: &[WireId], pool: &[WireId]) -> Vec<Gate> {
    let mut copies = vec![control];
    let mut tree = Vec::new();
    let mut next = pool.iter();
    while copies.len() < targets.len() {
        let have = copies.len();
        for i in 0..have {
            if copies.len() == targets.len() {
                break;
            }
            let anc = *next.next().expect("pool sized for the chunk");
            tree.push(Gate::cx(copies[i], anc));
            copies.push(anc);
        }
    }
    let mut out = tree.clone();
    out.extend(copies.iter().zip(targets).map(|(&c, &t)| Gate::cx(c, t)));
    out.extend(tree.into_iter().rev());
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::depth;

    #[test]
    fn four_targets_use_three_ancillas() {
        let mut c = Circuit::with_wires(["c", "t0", "t1", "t2", "t3"]).unwrap();
        c.push(Gate::fanout(WireId(0), (1..5).map(WireId).collect())).unwrap();
        let e = expand_ghz_fanout(&c, &GhzOptions::default()).unwrap();
        assert_eq!(e.num_wires(), 8);
        assert_eq!(depth(&e), 2 + 1 + 2);
        assert_eq!(e.count_kind(GateKind::McxFanout), 0);
    }

    #[test]
    fn single_target_becomes_cx() {
        let mut c = Circuit::with_wires(["c", "t"]).unwrap();
        c.push(Gate::fanout(WireId(0), vec![WireId(1)])).unwrap();
        let e = expand_ghz_fanout(&c, &GhzOptions::default()).unwrap();
        assert_eq!(e.gates(), &[Gate::cx(WireId(0), WireId(1))]);
        assert_eq!(e.num_wires(), 2);
    }

    #[test]
    fn budget_limits_ancillas() {
        let mut c = Circuit::with_wires((0..9).map(|i| format!("w{i}"))).unwrap();
        c.push(Gate::fanout(WireId(0), (1..9).map(WireId).collect())).unwrap();
        let e = expand_ghz_fanout(&c, &GhzOptions { ancilla_budget: Some(3) }).unwrap();
        assert_eq!(e.num_wires(), 12);
        assert_eq!(e.find_wire("anc_2"), Some(WireId(11)));
    }
}
