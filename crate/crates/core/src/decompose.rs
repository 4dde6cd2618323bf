//! Clifford+T lowerings of CCZ / Toffoli and the paired, parallelism-preserving forms.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::DecomposeError;
use crate::gate::{Gate, GateKind, Polarity, WireId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CczVariant {
    #[serde(rename = "CANONICAL_7T")]
    Canonical7T,
    ParallelSharedWire,
    LogicalAndCompute,
    LogicalAndUncompute,
}

impl CczVariant {
    pub const ALL: [CczVariant; 4] = [
        CczVariant::Canonical7T,
        CczVariant::ParallelSharedWire,
        CczVariant::LogicalAndCompute,
        CczVariant::LogicalAndUncompute,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CczVariant::Canonical7T => "CANONICAL_7T",
            CczVariant::ParallelSharedWire => "PARALLEL_SHARED_WIRE",
            CczVariant::LogicalAndCompute => "LOGICAL_AND_COMPUTE",
            CczVariant::LogicalAndUncompute => "LOGICAL_AND_UNCOMPUTE",
        }
    }

    pub fn t_count(self) -> usize {
        match self {
            CczVariant::Canonical7T | CczVariant::ParallelSharedWire => 7,
            CczVariant::LogicalAndCompute => 4,
            CczVariant::LogicalAndUncompute => 0,
        }
    }

    /// Variants whose unitary is exactly CCZ.
    pub fn is_exact(self) -> bool {
        matches!(self, CczVariant::Canonical7T | CczVariant::ParallelSharedWire)
    }
}

impl fmt::Display for CczVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CczVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        CczVariant::ALL
            .into_iter()
            .find(|v| v.name() == norm)
            .ok_or_else(|| format!("unknown variant `{s}`"))
    }
}

/// Textbook seven-T CCZ on `(c0, c1, t)`.
fn canonical_core(c0: WireId, c1: WireId, t: WireId) -> Vec<Gate> {
    vec![
        Gate::cx(c1, t),
        Gate::tdg(t),
        Gate::cx(c0, t),
        Gate::t(t),
        Gate::cx(c1, t),
        Gate::tdg(t),
        Gate::cx(c0, t),
        Gate::t(c1),
        Gate::t(t),
        Gate::cx(c0, c1),
        Gate::t(c0),
        Gate::tdg(c1),
        Gate::cx(c0, c1),
    ]
}

/// CCZ in which `q1` is only ever a CNOT control or carries a T, so two such
/// blocks sharing `q1` can run side by side.
fn shared_wire_core(q0: WireId, q1: WireId, q2: WireId) -> Vec<Gate> {
    vec![
        Gate::t(q0),
        Gate::t(q1),
        Gate::t(q2),
        Gate::cx(q2, q0),
        Gate::tdg(q0),
        Gate::cx(q1, q0),
        Gate::cx(q1, q2),
        Gate::t(q0),
        Gate::tdg(q2),
        Gate::cx(q1, q2),
        Gate::cx(q2, q0),
        Gate::tdg(q0),
        Gate::cx(q1, q0),
    ]
}

/// Four-T core writing `c0 AND c1` onto `t` (between Hadamards), up to `(-i)^{c0 c1}`.
fn logical_and_core(c0: WireId, c1: WireId, t: WireId) -> Vec<Gate> {
    vec![
        Gate::t(t),
        Gate::cx(c0, t),
        Gate::tdg(t),
        Gate::cx(c1, t),
        Gate::t(t),
        Gate::cx(c0, t),
        Gate::tdg(t),
        Gate::cx(c1, t),
    ]
}

/// Record key used when an uncompute is lowered without an explicit one.
pub fn default_record(target: WireId) -> String {
    format!("r{}", target.0)
}

pub fn lower_ccz(
    variant: CczVariant,
    wires: [WireId; 3],
    shared: WireId,
) -> Result<Vec<Gate>, DecomposeError> {
    let [w0, w1, w2] = wires;
    Ok(match variant {
        CczVariant::Canonical7T => canonical_core(w0, w1, w2),
        CczVariant::ParallelSharedWire => {
            if !wires.contains(&shared) {
                return Err(DecomposeError::InvalidSharedWire);
            }
            let mut rest = wires.iter().copied().filter(|&w| w != shared);
            let (q0, q2) = (rest.next().unwrap(), rest.next().unwrap());
            shared_wire_core(q0, shared, q2)
        }
        CczVariant::LogicalAndCompute => logical_and_core(w0, w1, w2),
        CczVariant::LogicalAndUncompute => lower_and_uncompute((w0, w1), w2, default_record(w2)),
    })
}

pub fn lower_toffoli(
    variant: CczVariant,
    controls: (WireId, WireId),
    target: WireId,
    shared: WireId,
) -> Result<Vec<Gate>, DecomposeError> {
    if variant == CczVariant::LogicalAndUncompute {
        return Ok(lower_and_uncompute(controls, target, default_record(target)));
    }
    let mut out = vec![Gate::h(target)];
    out.extend(lower_ccz(variant, [controls.0, controls.1, target], shared)?);
    out.push(Gate::h(target));
    Ok(out)
}

/// Measurement-based release of a logical-AND ancilla.
///
/// The leading S cancels the `(-i)^{c0 c1}` left by the compute half; it is a
/// Clifford gate so the T-count stays zero.
pub fn lower_and_uncompute(
    controls: (WireId, WireId),
    target: WireId,
    record: impl Into<String>,
) -> Vec<Gate> {
    let record = record.into();
    vec![
        Gate::s(target),
        Gate::measure_x(target, record.clone()),
        Gate::classical_cz(controls.0, controls.1, record),
    ]
}

/// Phase gates realising `units` multiples of pi/4 on one wire, Clifford part first.
pub fn phase_gates(units: u8, wire: WireId) -> Vec<Gate> {
    match units % 8 {
        0 => vec![],
        1 => vec![Gate::t(wire)],
        2 => vec![Gate::s(wire)],
        3 => vec![Gate::s(wire), Gate::t(wire)],
        4 => vec![Gate::z(wire)],
        5 => vec![Gate::z(wire), Gate::t(wire)],
        6 => vec![Gate::sdg(wire)],
        _ => vec![Gate::tdg(wire)],
    }
}

fn bundle_cx(control: WireId, targets: Vec<WireId>) -> Gate {
    if targets.len() == 1 {
        Gate::cx(control, targets[0])
    } else {
        Gate::fanout(control, targets)
    }
}

/// k logical ANDs `targets[i] = shared AND others[i]` interleaved so that the
/// shared wire drives a single fan-out CNOT at each of its two steps.
pub fn and_bundle(shared: WireId, others: &[WireId], targets: &[WireId]) -> Vec<Gate> {
    assert_eq!(others.len(), targets.len());
    let mut g = Vec::new();
    let each = |f: fn(WireId) -> Gate| targets.iter().map(move |&t| f(t));
    g.extend(each(Gate::h));
    g.extend(each(Gate::t));
    g.extend(others.iter().zip(targets).map(|(&p, &t)| Gate::cx(p, t)));
    g.extend(each(Gate::tdg));
    g.push(bundle_cx(shared, targets.to_vec()));
    g.extend(each(Gate::t));
    g.extend(others.iter().zip(targets).map(|(&p, &t)| Gate::cx(p, t)));
    g.extend(each(Gate::tdg));
    g.push(bundle_cx(shared, targets.to_vec()));
    g.extend(each(Gate::h));
    g
}

/// k Toffolis `CCX(p.0, p.1 -> target)` sharing their target. The target
/// only carries Hadamards, one merged phase and fan-out controls.
pub fn shared_target_bundle(pairs: &[(WireId, WireId)], target: WireId) -> Vec<Gate> {
    let a: Vec<WireId> = pairs.iter().map(|p| p.0).collect();
    let b: Vec<WireId> = pairs.iter().map(|p| p.1).collect();
    let mut g = vec![Gate::h(target)];
    g.extend(a.iter().chain(&b).map(|&w| Gate::t(w)));
    g.extend(phase_gates((pairs.len() % 8) as u8, target));
    g.extend(pairs.iter().map(|&(x, y)| Gate::cx(y, x)));
    g.extend(a.iter().map(|&w| Gate::tdg(w)));
    g.push(bundle_cx(target, a.iter().chain(&b).copied().collect()));
    g.extend(a.iter().map(|&w| Gate::t(w)));
    g.extend(b.iter().map(|&w| Gate::tdg(w)));
    g.push(bundle_cx(target, b.clone()));
    g.extend(pairs.iter().map(|&(x, y)| Gate::cx(y, x)));
    g.extend(a.iter().map(|&w| Gate::tdg(w)));
    g.push(bundle_cx(target, a));
    g.push(Gate::h(target));
    g
}

fn toffoli_parts(g: &Gate) -> Result<([WireId; 2], WireId), DecomposeError> {
    if g.kind != GateKind::Ccx || g.controls.iter().any(|c| c.polarity == Polarity::Negative) {
        return Err(DecomposeError::NotToffoli(g.kind));
    }
    g.check_shape()?;
    Ok(([g.controls[0].wire, g.controls[1].wire], g.targets[0]))
}

/// Two Toffolis with one common control, targets on fresh ancillas.
pub fn pair_lower_shared_control(a: &Gate, b: &Gate) -> Result<Vec<Gate>, DecomposeError> {
    let (ca, ta) = toffoli_parts(a)?;
    let (cb, tb) = toffoli_parts(b)?;
    let common: Vec<WireId> = ca.iter().copied().filter(|w| cb.contains(w)).collect();
    if common.len() != 1 {
        return Err(DecomposeError::NotSharedControl);
    }
    let s = common[0];
    let pa = if ca[0] == s { ca[1] } else { ca[0] };
    let pb = if cb[0] == s { cb[1] } else { cb[0] };
    let distinct = [pa, pb, ta, tb];
    for i in 0..4 {
        for j in i + 1..4 {
            if distinct[i] == distinct[j] {
                return Err(DecomposeError::NotSharedControl);
            }
        }
    }
    Ok(and_bundle(s, &[pa, pb], &[ta, tb]))
}

/// Two Toffolis with a common target and four distinct controls.
pub fn pair_lower_shared_target(a: &Gate, b: &Gate) -> Result<Vec<Gate>, DecomposeError> {
    let (ca, ta) = toffoli_parts(a)?;
    let (cb, tb) = toffoli_parts(b)?;
    if ta != tb || ca.iter().any(|w| cb.contains(w)) {
        return Err(DecomposeError::NotSharedTarget);
    }
    Ok(shared_target_bundle(&[(ca[0], ca[1]), (cb[0], cb[1])], ta))
}

/// Replaces every positive-control CCX of `gates` with `lower_toffoli`.
/// For the shared-wire variant the Toffoli's target is the pass-through wire.
pub fn lower_all_toffolis(gates: &[Gate], variant: CczVariant) -> Result<Vec<Gate>, DecomposeError> {
    let mut out = Vec::with_capacity(gates.len() * 8);
    for g in gates {
        if g.kind == GateKind::Ccx {
            let ([c0, c1], t) = toffoli_parts(g)?;
            out.extend(lower_toffoli(variant, (c0, c1), t, t)?);
        } else {
            out.push(g.clone());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const W: [WireId; 3] = [WireId(0), WireId(1), WireId(2)];

    fn tc(gs: &[Gate]) -> usize {
        gs.iter().map(Gate::t_count).sum()
    }

    #[test]
    fn t_counts_match_variant_table() {
        for v in CczVariant::ALL {
            let gs = lower_ccz(v, W, W[1]).unwrap();
            assert_eq!(tc(&gs), v.t_count(), "{v}");
        }
    }

    #[test]
    fn shared_wire_only_controls_or_phases() {
        for s in W {
            let gs = lower_ccz(CczVariant::ParallelSharedWire, W, s).unwrap();
            for g in &gs {
                if g.targets.contains(&s) {
                    assert!(g.kind.is_diagonal_1q(), "{g:?}");
                }
            }
        }
    }

    #[test]
    fn shared_wire_must_belong() {
        assert_eq!(
            lower_ccz(CczVariant::ParallelSharedWire, W, WireId(9)),
            Err(DecomposeError::InvalidSharedWire)
        );
    }

    #[test]
    fn uncompute_has_no_t() {
        let gs = lower_and_uncompute((W[0], W[1]), W[2], "r");
        assert_eq!(tc(&gs), 0);
        assert_eq!(gs[1].kind, GateKind::MeasureX);
        assert_eq!(gs[2].condition.as_deref(), Some("r"));
    }

    #[test]
    fn pairing_errors() {
        let a = Gate::ccx(WireId(0), WireId(1), WireId(2));
        let b = Gate::ccx(WireId(3), WireId(4), WireId(5));
        assert_eq!(pair_lower_shared_control(&a, &b), Err(DecomposeError::NotSharedControl));
        assert_eq!(pair_lower_shared_target(&a, &b), Err(DecomposeError::NotSharedTarget));
        let cx = Gate::cx(WireId(0), WireId(1));
        assert_eq!(
            pair_lower_shared_target(&cx, &b),
            Err(DecomposeError::NotToffoli(GateKind::Cx))
        );
    }

    #[test]
    fn shared_target_pair_merges_target_t_into_s() {
        let a = Gate::ccx(WireId(0), WireId(1), WireId(4));
        let b = Gate::ccx(WireId(2), WireId(3), WireId(4));
        let gs = pair_lower_shared_target(&a, &b).unwrap();
        let on_target: Vec<GateKind> = gs
            .iter()
            .filter(|g| g.targets == [WireId(4)] && g.controls.is_empty())
            .map(|g| g.kind)
            .collect();
        assert_eq!(on_target, vec![GateKind::H, GateKind::S, GateKind::H]);
        assert_eq!(tc(&gs), 12);
    }

    #[test]
    fn variant_names_parse() {
        for v in CczVariant::ALL {
            assert_eq!(v.name().parse::<CczVariant>(), Ok(v));
            assert_eq!(serde_json::to_string(&v).unwrap(), format!("\"{}\"", v.name()));
        }
        assert_eq!("logical-and-compute".parse(), Ok(CczVariant::LogicalAndCompute));
    }
}
