//! ASAP moment assignment under the fan-out CNOT model.
//!
//! A gate occupies each of its wires for one moment, except that CNOT-like
//! gates (CX, MCX_FANOUT) starting in the same moment may share their control
//! wire. A CLASSICAL_CZ is realised as H, classically controlled CX, H on its
//! target wire: it holds the target for three moments and the control only in
//! the middle one, where the control may again be shared.

use std::collections::HashMap;

use serde::Serialize;

use crate::circuit::{Circuit, Region, Regions};
use crate::error::{IrError, ScheduleError};
use crate::gate::{Gate, GateKind, WireId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    /// `moments[t]` lists, in circuit order, the gates starting at moment `t`.
    pub moments: Vec<Vec<usize>>,
    pub depth: usize,
    pub starts: Vec<usize>,
    /// Per-region depths when the circuit carries region tags.
    pub region_depths: Option<RegionDepths>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionDepths {
    pub fanout: usize,
    pub query: usize,
    pub fanin: usize,
    /// Depth of the whole circuit scheduled jointly.
    pub total: usize,
}

struct Slot {
    wire: WireId,
    offset: i64,
    shared: bool,
}

fn occupancy(g: &Gate) -> Vec<Slot> {
    let slot = |wire, offset, shared| Slot { wire, offset, shared };
    match g.kind {
        k if k.is_cnot_like() => std::iter::once(slot(g.controls[0].wire, 0, true))
            .chain(g.targets.iter().map(|&t| slot(t, 0, false)))
            .collect(),
        GateKind::ClassicalCz => {
            let t = g.targets[0];
            vec![slot(t, 0, false), slot(g.controls[0].wire, 1, true), slot(t, 1, false), slot(t, 2, false)]
        }
        _ => g.wires().map(|w| slot(w, 0, false)).collect(),
    }
}

fn duration(g: &Gate) -> usize {
    if g.kind == GateKind::ClassicalCz {
        3
    } else {
        1
    }
}

#[derive(Default)]
struct Fronts {
    /// Last moment each wire is busy in, and whether that use was a shared control.
    last: HashMap<WireId, (i64, bool)>,
    records: HashMap<String, i64>,
}

impl Fronts {
    fn place(&mut self, g: &Gate) -> usize {
        let slots = occupancy(g);
        let front = |w: WireId| self.last.get(&w).copied().unwrap_or((-1, false));
        let mut min_start = 0i64;
        if let Some(key) = &g.condition {
            // The correction's controlled step must follow the measurement.
            if let Some(&m) = self.records.get(key) {
                min_start = min_start.max(m);
            }
        }
        let free = slots
            .iter()
            .map(|s| front(s.wire).0 + 1 - s.offset)
            .fold(min_start, i64::max);
        let lo = slots
            .iter()
            .map(|s| front(s.wire).0 - s.offset)
            .fold(min_start, i64::max);
        let fits = |start: i64| {
            slots.iter().all(|s| {
                let m = start + s.offset;
                let (f, was_shared) = front(s.wire);
                m > f || (s.shared && was_shared && m == f)
            })
        };
        let start = (lo.max(0)..=free).find(|&t| fits(t)).unwrap_or(free);
        for s in &slots {
            let m = start + s.offset;
            let e = self.last.entry(s.wire).or_insert((-1, false));
            if m > e.0 {
                *e = (m, s.shared);
            } else if m == e.0 {
                e.1 &= s.shared;
            }
        }
        if let Some(r) = &g.record {
            self.records.insert(r.clone(), start);
        }
        start as usize
    }
}

/// Start moment of every gate and the resulting depth.
pub fn schedule_gates(gates: &[Gate]) -> (Vec<usize>, usize) {
    let mut fronts = Fronts::default();
    let mut depth = 0;
    let starts: Vec<usize> = gates
        .iter()
        .map(|g| {
            let s = fronts.place(g);
            depth = depth.max(s + duration(g));
            s
        })
        .collect();
    (starts, depth)
}

pub fn schedule_asap(circuit: &Circuit) -> Schedule {
    let (starts, depth) = schedule_gates(circuit.gates());
    let mut moments = vec![Vec::new(); depth];
    for (i, &s) in starts.iter().enumerate() {
        moments[s].push(i);
    }
    let region_depths = circuit.regions().map(|r| depths_for(circuit, r, depth));
    Schedule { moments, depth, starts, region_depths }
}

pub fn depth(circuit: &Circuit) -> usize {
    schedule_gates(circuit.gates()).1
}

fn depths_for(c: &Circuit, r: &Regions, total: usize) -> RegionDepths {
    let d = |range: std::ops::Range<usize>| schedule_gates(&c.gates()[range]).1;
    RegionDepths {
        fanout: d(r.fanout.clone()),
        query: d(r.query.clone()),
        fanin: d(r.fanin.clone()),
        total,
    }
}

pub fn region_depths(circuit: &Circuit) -> Result<RegionDepths, ScheduleError> {
    let r = circuit.regions().ok_or(ScheduleError::MissingRegionTags)?;
    Ok(depths_for(circuit, r, depth(circuit)))
}

/// Gates reordered by start moment (stable within a moment), region by region
/// so that region tags stay contiguous.
pub fn flatten(circuit: &Circuit, schedule: &Schedule) -> Result<Circuit, IrError> {
    let mut order: Vec<usize> = (0..circuit.len()).collect();
    order.sort_by_key(|&i| (region_rank(circuit.region_of(i), circuit, i), schedule.starts[i], i));
    rebuild(circuit, order.into_iter().map(|i| (i, circuit.gates()[i].clone())))
}

fn region_rank(r: Region, c: &Circuit, i: usize) -> u8 {
    match (r, c.regions()) {
        (Region::Fanout, _) => 1,
        (Region::Query, _) => 2,
        (Region::Fanin, _) => 3,
        (Region::None, Some(rg)) if i >= rg.fanin.end => 4,
        _ => 0,
    }
}

/// Builds a circuit from `(original index, gate)` pairs, keeping region tags.
fn rebuild(c: &Circuit, gates: impl Iterator<Item = (usize, Gate)>) -> Result<Circuit, IrError> {
    let mut out = c.empty_like();
    let mut counts = [0usize; 5];
    for (i, g) in gates {
        counts[region_rank(c.region_of(i), c, i) as usize] += 1;
        out.push(g)?;
    }
    if c.regions().is_some() {
        let f = counts[0];
        let q = f + counts[1];
        let i = q + counts[2];
        let e = i + counts[3];
        out.set_regions(Some(Regions { fanout: f..q, query: q..i, fanin: i..e }))?;
    }
    Ok(out)
}

/// Within every moment, CNOT-like gates sharing a control (and a region) are
/// merged into one MCX_FANOUT. The result is flattened in moment order.
pub fn fuse_fanout_cnots(circuit: &Circuit, schedule: &Schedule) -> Result<Circuit, IrError> {
    let mut order: Vec<usize> = (0..circuit.len()).collect();
    order.sort_by_key(|&i| (region_rank(circuit.region_of(i), circuit, i), schedule.starts[i], i));
    let mut merged: Vec<(usize, Gate)> = Vec::with_capacity(order.len());
    // (region rank, moment, control) -> position in `merged`
    let mut open: HashMap<(u8, usize, WireId), usize> = HashMap::new();
    for i in order {
        let g = &circuit.gates()[i];
        let rank = region_rank(circuit.region_of(i), circuit, i);
        if g.kind.is_cnot_like() {
            let key = (rank, schedule.starts[i], g.controls[0].wire);
            if let Some(&pos) = open.get(&key) {
                let host = &mut merged[pos].1;
                host.kind = GateKind::McxFanout;
                host.targets.extend(g.targets.iter().copied());
                continue;
            }
            open.insert(key, merged.len());
        }
        merged.push((i, g.clone()));
    }
    rebuild(circuit, merged.into_iter())
}
