//! Circuits over named wires, with optional FANOUT/QUERY/FANIN region tags.

use std::collections::{BTreeSet, HashMap};
use std::ops::Range;

use crate::error::IrError;
use crate::gate::{Gate, GateKind, WireId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Region {
    Fanout,
    Query,
    Fanin,
    None,
}

impl Region {
    pub const TAGGED: [Region; 3] = [Region::Fanout, Region::Query, Region::Fanin];

    pub fn name(self) -> &'static str {
        match self {
            Region::Fanout => "fanout",
            Region::Query => "query",
            Region::Fanin => "fanin",
            Region::None => "none",
        }
    }
}

/// Three contiguous, ordered gate ranges. Gates outside them are untagged.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Regions {
    pub fanout: Range<usize>,
    pub query: Range<usize>,
    pub fanin: Range<usize>,
}

impl Regions {
    pub fn range(&self, region: Region) -> Option<Range<usize>> {
        match region {
            Region::Fanout => Some(self.fanout.clone()),
            Region::Query => Some(self.query.clone()),
            Region::Fanin => Some(self.fanin.clone()),
            Region::None => None,
        }
    }

    pub fn region_of(&self, gate: usize) -> Region {
        Region::TAGGED
            .into_iter()
            .find(|&r| self.range(r).is_some_and(|rg| rg.contains(&gate)))
            .unwrap_or(Region::None)
    }

    fn check(&self, gate_count: usize) -> Result<(), IrError> {
        let ordered = self.fanout.start <= self.fanout.end
            && self.fanout.end == self.query.start
            && self.query.start <= self.query.end
            && self.query.end == self.fanin.start
            && self.fanin.start <= self.fanin.end;
        if !ordered {
            return Err(IrError::InvalidRegions(
                "regions must be contiguous and ordered fanout, query, fanin".into(),
            ));
        }
        if self.fanin.end > gate_count {
            return Err(IrError::InvalidRegions(format!(
                "fanin ends at {} but the circuit has {gate_count} gates",
                self.fanin.end
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Circuit {
    wires: Vec<String>,
    index: HashMap<String, WireId>,
    gates: Vec<Gate>,
    regions: Option<Regions>,
    records: BTreeSet<String>,
}

pub(crate) fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '.' || c == '[' || c == ']')
}

impl Circuit {
    pub fn new() -> Self {
        Circuit::default()
    }

    pub fn with_wires<I, S>(names: I) -> Result<Self, IrError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut c = Circuit::new();
        for n in names {
            c.add_wire(n)?;
        }
        Ok(c)
    }

    pub fn add_wire(&mut self, name: impl Into<String>) -> Result<WireId, IrError> {
        let name = name.into();
        if !valid_name(&name) {
            return Err(IrError::InvalidWireName(name));
        }
        if self.index.contains_key(&name) {
            return Err(IrError::DuplicateWire(name));
        }
        let id = WireId(self.wires.len());
        self.index.insert(name.clone(), id);
        self.wires.push(name);
        Ok(id)
    }

    pub fn wire(&self, name: &str) -> Result<WireId, IrError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| IrError::UnknownWire(name.to_string()))
    }

    pub fn find_wire(&self, name: &str) -> Option<WireId> {
        self.index.get(name).copied()
    }

    pub fn wire_name(&self, id: WireId) -> &str {
        &self.wires[id.0]
    }

    pub fn wire_names(&self) -> &[String] {
        &self.wires
    }

    pub fn wire_ids(&self) -> impl Iterator<Item = WireId> {
        (0..self.wires.len()).map(WireId)
    }

    pub fn num_wires(&self) -> usize {
        self.wires.len()
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn regions(&self) -> Option<&Regions> {
        self.regions.as_ref()
    }

    pub fn measurement_records(&self) -> &BTreeSet<String> {
        &self.records
    }

    pub fn region_of(&self, gate: usize) -> Region {
        self.regions.as_ref().map_or(Region::None, |r| r.region_of(gate))
    }

    /// Gates of one tagged region as a stand-alone circuit on the same wires.
    pub fn region_circuit(&self, region: Region) -> Option<Circuit> {
        let range = self.regions.as_ref()?.range(region)?;
        let mut c = self.empty_like();
        for g in &self.gates[range] {
            c.push_unchecked_records(g.clone());
        }
        Some(c)
    }

    /// Same wires, no gates.
    pub fn empty_like(&self) -> Circuit {
        Circuit {
            wires: self.wires.clone(),
            index: self.index.clone(),
            gates: Vec::new(),
            regions: None,
            records: BTreeSet::new(),
        }
    }

    /// Validates and appends a gate.
    pub fn push(&mut self, gate: Gate) -> Result<(), IrError> {
        gate.check_shape()?;
        for w in gate.wires() {
            if w.0 >= self.wires.len() {
                return Err(IrError::UnknownWireId(w));
            }
        }
        if let Some(cond) = &gate.condition {
            if !self.records.contains(cond) {
                return Err(IrError::UnknownRecord(cond.clone()));
            }
        }
        if let Some(rec) = &gate.record {
            if !valid_name(rec) {
                return Err(IrError::InvalidRecordName(rec.clone()));
            }
            if self.records.contains(rec) {
                return Err(IrError::DuplicateRecord(rec.clone()));
            }
            self.records.insert(rec.clone());
        }
        self.gates.push(gate);
        Ok(())
    }

    // Used for region slices, whose conditions may refer to records written
    // in an earlier region.
    fn push_unchecked_records(&mut self, gate: Gate) {
        if let Some(rec) = &gate.record {
            self.records.insert(rec.clone());
        }
        self.gates.push(gate);
    }

    pub fn extend<I: IntoIterator<Item = Gate>>(&mut self, gates: I) -> Result<(), IrError> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// Non-mutating append.
    pub fn append(&self, gate: Gate) -> Result<Circuit, IrError> {
        let mut c = self.clone();
        c.push(gate)?;
        Ok(c)
    }

    pub fn set_regions(&mut self, regions: Option<Regions>) -> Result<(), IrError> {
        if let Some(r) = &regions {
            r.check(self.gates.len())?;
        }
        self.regions = regions;
        Ok(())
    }

    /// Appends `other`'s gates; wires are matched by name.
    pub fn compose(&self, other: &Circuit) -> Result<Circuit, IrError> {
        let mut c = self.clone();
        c.regions = None;
        for g in &other.gates {
            let mapped = g.remap(|w| {
                c.find_wire(other.wire_name(w)).unwrap_or(WireId(usize::MAX))
            });
            if let Some(w) = g.wires().find(|&w| c.find_wire(other.wire_name(w)).is_none()) {
                return Err(IrError::UnknownWire(other.wire_name(w).to_string()));
            }
            c.push(mapped)?;
        }
        Ok(c)
    }

    /// Reversed gate order with each gate replaced by its inverse.
    /// Region tags are mirrored (the inverse of FANOUT becomes FANIN).
    pub fn inverse(&self) -> Result<Circuit, IrError> {
        let mut c = self.empty_like();
        for g in self.gates.iter().rev() {
            c.push(g.dagger()?)?;
        }
        if let Some(r) = &self.regions {
            let n = self.gates.len();
            let flip = |rg: &Range<usize>| (n - rg.end)..(n - rg.start);
            c.set_regions(Some(Regions {
                fanout: flip(&r.fanin),
                query: flip(&r.query),
                fanin: flip(&r.fanout),
            }))?;
        }
        Ok(c)
    }

    pub fn t_count(&self) -> usize {
        self.gates.iter().map(Gate::t_count).sum()
    }

    pub fn count_kind(&self, kind: GateKind) -> usize {
        self.gates.iter().filter(|g| g.kind == kind).count()
    }

    pub fn is_unitary(&self) -> bool {
        self.gates.iter().all(Gate::is_unitary)
    }

    /// Rewrites each tagged region (or the whole circuit when untagged)
    /// through `f`, keeping the region boundaries aligned with the output.
    pub fn map_regions<E>(
        &self,
        mut f: impl FnMut(Region, &[Gate]) -> Result<Vec<Gate>, E>,
    ) -> Result<Circuit, E>
    where
        E: From<IrError>,
    {
        let mut out = self.empty_like();
        match &self.regions {
            None => {
                out.extend(f(Region::None, &self.gates)?)?;
            }
            Some(r) => {
                let mut bounds = [0usize; 4];
                out.extend(f(Region::None, &self.gates[..r.fanout.start])?)?;
                for (i, region) in Region::TAGGED.into_iter().enumerate() {
                    bounds[i] = out.len();
                    let range = r.range(region).expect("tagged region");
                    out.extend(f(region, &self.gates[range])?)?;
                }
                bounds[3] = out.len();
                out.extend(f(Region::None, &self.gates[r.fanin.end..])?)?;
                out.set_regions(Some(Regions {
                    fanout: bounds[0]..bounds[1],
                    query: bounds[1]..bounds[2],
                    fanin: bounds[2]..bounds[3],
                }))?;
            }
        }
        Ok(out)
    }

    /// Keeps only gates for which `keep` returns true, preserving region tags.
    pub fn filter_gates(&self, mut keep: impl FnMut(usize, &Gate) -> bool) -> Result<Circuit, IrError> {
        let mut out = self.empty_like();
        let mut bounds = [0usize; 4];
        let old = self.regions.clone();
        for (i, g) in self.gates.iter().enumerate() {
            if let Some(r) = &old {
                update_bounds(&mut bounds, r, i, out.len());
            }
            if keep(i, g) {
                out.push(g.clone())?;
            }
        }
        if let Some(r) = &old {
            update_bounds(&mut bounds, r, self.gates.len(), out.len());
            out.set_regions(Some(Regions {
                fanout: bounds[0]..bounds[1],
                query: bounds[1]..bounds[2],
                fanin: bounds[2]..bounds[3],
            }))?;
        }
        Ok(out)
    }
}

// Maps the four region boundaries of `r` to output positions while filtering.
fn update_bounds(bounds: &mut [usize; 4], r: &Regions, old_index: usize, new_len: usize) {
    let marks = [r.fanout.start, r.query.start, r.fanin.start, r.fanin.end];
    for (b, &m) in bounds.iter_mut().zip(marks.iter()) {
        if m == old_index {
            *b = new_len;
        }
    }
}

/// Incrementally builds a circuit whose gates are tagged by region.
#[derive(Debug, Clone)]
pub struct RegionBuilder {
    circuit: Circuit,
    marks: Vec<(Region, usize)>,
}

impl RegionBuilder {
    pub fn new(circuit: Circuit) -> Self {
        RegionBuilder { circuit, marks: Vec::new() }
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn begin(&mut self, region: Region) {
        self.marks.push((region, self.circuit.len()));
    }

    pub fn push(&mut self, g: Gate) -> Result<(), IrError> {
        self.circuit.push(g)
    }

    pub fn extend<I: IntoIterator<Item = Gate>>(&mut self, gates: I) -> Result<(), IrError> {
        self.circuit.extend(gates)
    }

    pub fn finish(mut self) -> Result<Circuit, IrError> {
        let end = self.circuit.len();
        let start_of = |r: Region| self.marks.iter().find(|m| m.0 == r).map(|m| m.1);
        let (Some(f), Some(q), Some(i)) = (
            start_of(Region::Fanout),
            start_of(Region::Query),
            start_of(Region::Fanin),
        ) else {
            return Err(IrError::InvalidRegions("all three regions must be opened".into()));
        };
        self.circuit.set_regions(Some(Regions { fanout: f..q, query: q..i, fanin: i..end }))?;
        Ok(self.circuit)
    }
}
