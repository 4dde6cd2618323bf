//! Brute-force oracle: dense state vectors and unitaries for small circuits,
//! a sparse basis-state engine for QRAM-sized ones, and measurement-branch
//! enumeration for the X-basis uncompute.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::builders::{bits_to_string, QramInstance, QramLayout};
use crate::circuit::Circuit;
use crate::error::SimError;
use crate::gate::{Gate, GateKind, WireId};

/// Absolute tolerance on amplitude components.
pub const TOL: f64 = 1e-9;
/// Branches lighter than this are dropped during enumeration.
pub const BRANCH_CUTOFF: f64 = 1e-12;
/// Dense unitaries are built column by column; 2^12 x 2^12 is the ceiling.
pub const UNITARY_MAX_WIRES: usize = 12;
/// Width of the basis-state key of the sparse engine.
pub const SPARSE_MAX_WIRES: usize = 128;
const DEFAULT_MAX_SIM_WIRES: usize = 22;
const PRUNE: f64 = 1e-14;

/// Dense state-vector cap, overridable through `QRAMFORGE_MAX_SIM_WIRES`.
pub fn max_sim_wires() -> usize {
    std::env::var("QRAMFORGE_MAX_SIM_WIRES")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_MAX_SIM_WIRES)
}

fn omega(units: u8) -> Complex64 {
    let h = FRAC_1_SQRT_2;
    match units % 8 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(h, h),
        2 => Complex64::new(0.0, 1.0),
        3 => Complex64::new(-h, h),
        4 => Complex64::new(-1.0, 0.0),
        5 => Complex64::new(-h, -h),
        6 => Complex64::new(0.0, -1.0),
        _ => Complex64::new(h, -h),
    }
}

/// Action of a non-branching gate on one computational basis state, expressed
/// through a bit accessor so dense and sparse engines share it.
enum BasisAction {
    /// New basis state (after flips) and phase factor.
    Monomial { flips: Vec<WireId>, phase: Complex64 },
    Hadamard(WireId),
}

fn basis_action(gate: &Gate, bit: impl Fn(WireId) -> bool) -> Result<BasisAction, SimError> {
    let fires = || gate.controls.iter().all(|c| c.fires(bit(c.wire)));
    let one = Complex64::new(1.0, 0.0);
    let none = |phase| BasisAction::Monomial { flips: vec![], phase };
    Ok(match gate.kind {
        GateKind::H => BasisAction::Hadamard(gate.targets[0]),
        GateKind::X => BasisAction::Monomial { flips: gate.targets.clone(), phase: one },
        GateKind::Cx | GateKind::McxFanout | GateKind::Ccx | GateKind::C3x => {
            if fires() {
                BasisAction::Monomial { flips: gate.targets.clone(), phase: one }
            } else {
                none(one)
            }
        }
        GateKind::S | GateKind::SDag | GateKind::T | GateKind::TDag | GateKind::Z => {
            let units = gate.kind.phase_units().expect("diagonal kind");
            none(if bit(gate.targets[0]) { omega(units) } else { one })
        }
        GateKind::Cz | GateKind::Ccz => {
            none(if fires() && bit(gate.targets[0]) { -one } else { one })
        }
        GateKind::MeasureX | GateKind::ClassicalCz => {
            return Err(SimError::NonUnitaryGate(gate.kind))
        }
    })
}

// ---------------------------------------------------------------- dense

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    wires: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0...0> on `wires` wires.
    pub fn zero(wires: usize) -> Result<Self, SimError> {
        Self::basis(wires, 0)
    }

    /// Basis state `index`; the first wire is the most significant bit.
    pub fn basis(wires: usize, index: usize) -> Result<Self, SimError> {
        let limit = max_sim_wires().min(usize::BITS as usize - 1);
        if wires > limit {
            return Err(SimError::TooManyWires { wires, limit });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << wires];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { wires, amps })
    }

    pub fn from_amplitudes(wires: usize, amps: Vec<Complex64>) -> Self {
        assert_eq!(amps.len(), 1 << wires);
        StateVector { wires, amps }
    }

    pub fn wires(&self) -> usize {
        self.wires
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn pos(&self, w: WireId) -> usize {
        self.wires - 1 - w.0
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<(), SimError> {
        if let Some(w) = gate.wires().find(|w| w.0 >= self.wires) {
            return Err(SimError::LayoutMismatch(format!("gate touches wire {} of {}", w.0, self.wires)));
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            if a == Complex64::new(0.0, 0.0) {
                continue;
            }
            let bit = |w: WireId| (i >> self.pos(w)) & 1 == 1;
            match basis_action(gate, bit)? {
                BasisAction::Monomial { flips, phase } => {
                    let j = flips.iter().fold(i, |j, &w| j ^ (1 << self.pos(w)));
                    out[j] += a * phase;
                }
                BasisAction::Hadamard(w) => {
                    let m = 1 << self.pos(w);
                    let s = a * FRAC_1_SQRT_2;
                    out[i & !m] += s;
                    out[i | m] += if i & m != 0 { -s } else { s };
                }
            }
        }
        self.amps = out;
        Ok(())
    }

    pub fn run(&mut self, circuit: &Circuit) -> Result<(), SimError> {
        for g in circuit.gates() {
            self.apply(g)?;
        }
        Ok(())
    }

    pub fn to_sparse(&self) -> SparseState {
        let mut terms = Vec::new();
        for (i, &a) in self.amps.iter().enumerate() {
            if a.norm() > PRUNE {
                let key = (0..self.wires)
                    .filter(|&w| (i >> (self.wires - 1 - w)) & 1 == 1)
                    .fold(0u128, |k, w| k | (1u128 << w));
                terms.push((key, a));
            }
        }
        SparseState { wires: self.wires, terms }
    }
}

/// Applies one gate to a copy of `state`.
pub fn apply(state: &StateVector, gate: &Gate) -> Result<StateVector, SimError> {
    let mut s = state.clone();
    s.apply(gate)?;
    Ok(s)
}

/// Column-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl UnitaryMatrix {
    pub fn identity(dim: usize) -> Self {
        Self::from_permutation(&(0..dim).collect::<Vec<_>>())
    }

    /// `perm[col]` is the row holding the 1 of column `col`.
    pub fn from_permutation(perm: &[usize]) -> Self {
        let dim = perm.len();
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (col, &row) in perm.iter().enumerate() {
            data[col * dim + row] = Complex64::new(1.0, 0.0);
        }
        UnitaryMatrix { dim, data }
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let dim = entries.len();
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (i, &e) in entries.iter().enumerate() {
            data[i * dim + i] = e;
        }
        UnitaryMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[col * self.dim + row]
    }

    pub fn column(&self, col: usize) -> &[Complex64] {
        &self.data[col * self.dim..(col + 1) * self.dim]
    }

    pub fn dagger(&self) -> Self {
        let d = self.dim;
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for c in 0..d {
            for r in 0..d {
                data[r * d + c] = self.get(r, c).conj();
            }
        }
        UnitaryMatrix { dim: d, data }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let d = self.dim;
        assert_eq!(d, other.dim);
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for c in 0..d {
            for k in 0..d {
                let b = other.get(k, c);
                if b == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for r in 0..d {
                    data[c * d + r] += self.get(r, k) * b;
                }
            }
        }
        UnitaryMatrix { dim: d, data }
    }

    /// Kronecker product, `self` on the more significant wires.
    pub fn kron(&self, other: &Self) -> Self {
        let (a, b) = (self.dim, other.dim);
        let d = a * b;
        let mut data = vec![Complex64::new(0.0, 0.0); d * d];
        for c1 in 0..a {
            for r1 in 0..a {
                let x = self.get(r1, c1);
                if x == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c2 in 0..b {
                    for r2 in 0..b {
                        data[(c1 * b + c2) * d + r1 * b + r2] = x * other.get(r2, c2);
                    }
                }
            }
        }
        UnitaryMatrix { dim: d, data }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Entry of largest magnitude, first in column-major order among ties.
    fn reference_entry(&self) -> Complex64 {
        let mut best = Complex64::new(0.0, 0.0);
        for &x in &self.data {
            if x.norm() > best.norm() + TOL {
                best = x;
            }
        }
        best
    }

    /// Maximum deviation after aligning the global phase of `other` to `self`.
    pub fn phase_aligned_diff(&self, other: &Self) -> f64 {
        let (a, b) = (self.reference_entry(), other.reference_entry());
        if a.norm() < TOL || b.norm() < TOL {
            return self.max_abs_diff(other);
        }
        let pa = a / a.norm();
        let pb = b / b.norm();
        let rot = pa / pb;
        self.data
            .iter()
            .zip(&other.data)
            .map(|(x, y)| (x - y * rot).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) < tol
    }

    pub fn approx_eq_up_to_phase(&self, other: &Self, tol: f64) -> bool {
        self.phase_aligned_diff(other) < tol
    }

    /// `max |U^dagger U - I|`.
    pub fn unitarity_error(&self) -> f64 {
        self.dagger().mul(self).max_abs_diff(&Self::identity(self.dim))
    }
}

/// Dense unitary of a measurement-free circuit (first wire = most significant).
pub fn unitary_of(circuit: &Circuit) -> Result<UnitaryMatrix, SimError> {
    let w = circuit.num_wires();
    let limit = UNITARY_MAX_WIRES.min(max_sim_wires());
    if w > limit {
        return Err(SimError::TooManyWires { wires: w, limit });
    }
    if let Some(g) = circuit.gates().iter().find(|g| !g.is_unitary()) {
        return Err(SimError::NonUnitaryGate(g.kind));
    }
    let dim = 1usize << w;
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    for col in 0..dim {
        let mut s = SparseState::basis(w, index_to_key(w, col));
        s.run(circuit)?;
        for &(key, a) in &s.terms {
            data[col * dim + key_to_index(w, key)] += a;
        }
    }
    Ok(UnitaryMatrix { dim, data })
}

// ---------------------------------------------------------------- sparse

/// Dense index (first wire most significant) to sparse key (bit i = wire i).
pub fn index_to_key(wires: usize, index: usize) -> u128 {
    (0..wires)
        .filter(|&w| (index >> (wires - 1 - w)) & 1 == 1)
        .fold(0, |k, w| k | (1u128 << w))
}

pub fn key_to_index(wires: usize, key: u128) -> usize {
    (0..wires)
        .filter(|&w| (key >> w) & 1 == 1)
        .fold(0, |i, w| i | (1usize << (wires - 1 - w)))
}

/// Superposition stored as its nonzero basis terms. Bit `i` of a key is wire `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    wires: usize,
    terms: Vec<(u128, Complex64)>,
}

impl SparseState {
    pub fn basis(wires: usize, key: u128) -> Self {
        assert!(wires <= SPARSE_MAX_WIRES);
        SparseState { wires, terms: vec![(key, Complex64::new(1.0, 0.0))] }
    }

    /// Basis state with the given wires set to 1.
    pub fn with_ones(wires: usize, ones: impl IntoIterator<Item = WireId>) -> Self {
        Self::basis(wires, ones.into_iter().fold(0, |k, w| k | (1u128 << w.0)))
    }

    pub fn wires(&self) -> usize {
        self.wires
    }

    pub fn terms(&self) -> &[(u128, Complex64)] {
        &self.terms
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    pub fn amplitude(&self, key: u128) -> Complex64 {
        self.terms
            .iter()
            .filter(|(k, _)| *k == key)
            .map(|(_, a)| *a)
            .sum()
    }

    fn scale(&mut self, f: f64) {
        for (_, a) in &mut self.terms {
            *a *= f;
        }
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<(), SimError> {
        if let Some(w) = gate.wires().find(|w| w.0 >= self.wires) {
            return Err(SimError::LayoutMismatch(format!("gate touches wire {} of {}", w.0, self.wires)));
        }
        if gate.kind == GateKind::H {
            let m = 1u128 << gate.targets[0].0;
            let mut out = Vec::with_capacity(self.terms.len() * 2);
            for &(k, a) in &self.terms {
                let s = a * FRAC_1_SQRT_2;
                out.push((k & !m, s));
                out.push((k | m, if k & m != 0 { -s } else { s }));
            }
            out.sort_by_key(|t| t.0);
            let mut merged: Vec<(u128, Complex64)> = Vec::with_capacity(out.len());
            for (k, a) in out {
                match merged.last_mut() {
                    Some(last) if last.0 == k => last.1 += a,
                    _ => merged.push((k, a)),
                }
            }
            merged.retain(|(_, a)| a.norm() > PRUNE);
            self.terms = merged;
            return Ok(());
        }
        for t in &mut self.terms {
            let k = t.0;
            match basis_action(gate, |w| (k >> w.0) & 1 == 1)? {
                BasisAction::Monomial { flips, phase } => {
                    t.0 = flips.iter().fold(k, |k, w| k ^ (1u128 << w.0));
                    t.1 *= phase;
                }
                BasisAction::Hadamard(_) => unreachable!("handled above"),
            }
        }
        Ok(())
    }

    pub fn run(&mut self, circuit: &Circuit) -> Result<(), SimError> {
        for g in circuit.gates() {
            self.apply(g)?;
        }
        Ok(())
    }

    pub fn to_dense(&self) -> Result<StateVector, SimError> {
        let mut s = StateVector::zero(self.wires)?;
        s.amps[0] = Complex64::new(0.0, 0.0);
        for &(k, a) in &self.terms {
            s.amps[key_to_index(self.wires, k)] += a;
        }
        Ok(s)
    }

    /// Splits on wire `w`: (state with bit 0, state with bit 1), unnormalised.
    fn split(&self, w: WireId) -> (SparseState, SparseState) {
        let m = 1u128 << w.0;
        let (one, zero): (Vec<_>, Vec<_>) = self.terms.iter().partition(|(k, _)| k & m != 0);
        (
            SparseState { wires: self.wires, terms: zero },
            SparseState { wires: self.wires, terms: one },
        )
    }
}

// ---------------------------------------------------------------- branches

#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub outcomes: BTreeMap<String, bool>,
    pub probability: f64,
    /// Normalised post-measurement state.
    pub state: SparseState,
}

impl Branch {
    pub fn outcome_bits(&self) -> String {
        self.outcomes.values().map(|&b| if b { '1' } else { '0' }).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BranchReport {
    pub branches: Vec<Branch>,
    pub dropped: usize,
    pub dropped_probability: f64,
}

/// How many outcome paths to follow per input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchPolicy {
    All,
    /// Follow every outcome while the number of measurements is at most
    /// `max_measurements`; beyond that, follow `paths` outcome strings drawn
    /// from a seeded generator (each branch still weighted by its probability).
    Sampled { max_measurements: usize, paths: usize, seed: u64 },
}

pub fn enumerate_branches(
    circuit: &Circuit,
    input: SparseState,
    policy: BranchPolicy,
) -> Result<BranchReport, SimError> {
    let measurements = circuit.count_kind(GateKind::MeasureX);
    let sampled = match policy {
        BranchPolicy::Sampled { max_measurements, paths, seed } if measurements > max_measurements => {
            Some((paths, seed))
        }
        _ => None,
    };
    let mut report = BranchReport { branches: vec![], dropped: 0, dropped_probability: 0.0 };
    let start = Branch { outcomes: BTreeMap::new(), probability: 1.0, state: input };
    match sampled {
        None => walk(circuit.gates(), start, None, &mut report)?,
        Some((paths, seed)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..paths {
                walk(circuit.gates(), start.clone(), Some(&mut rng), &mut report)?;
            }
        }
    }
    Ok(report)
}

fn walk(
    gates: &[Gate],
    mut branch: Branch,
    mut rng: Option<&mut ChaCha8Rng>,
    report: &mut BranchReport,
) -> Result<(), SimError> {
    for (i, g) in gates.iter().enumerate() {
        match g.kind {
            GateKind::MeasureX => {
                let w = g.targets[0];
                let key = g.record.clone().expect("measurement record");
                branch.state.apply(&Gate::h(w))?;
                let (s0, s1) = branch.state.split(w);
                let parts = [(false, s0), (true, s1)];
                let forced = rng.as_mut().map(|r| r.gen::<bool>());
                for (bit, mut s) in parts {
                    if forced.is_some_and(|f| f != bit) {
                        continue;
                    }
                    let p = s.norm_sqr();
                    let prob = branch.probability * p;
                    if p < BRANCH_CUTOFF || prob < BRANCH_CUTOFF {
                        report.dropped += 1;
                        report.dropped_probability += prob;
                        continue;
                    }
                    s.scale(1.0 / p.sqrt());
                    let mut outcomes = branch.outcomes.clone();
                    outcomes.insert(key.clone(), bit);
                    let child = Branch { outcomes, probability: prob, state: s };
                    walk(&gates[i + 1..], child, rng.as_deref_mut(), report)?;
                }
                return Ok(());
            }
            GateKind::ClassicalCz => {
                let key = g.condition.as_ref().expect("condition");
                let bit = *branch
                    .outcomes
                    .get(key)
                    .ok_or_else(|| SimError::MissingRecord(key.clone()))?;
                if bit {
                    branch.state.apply(&Gate::cz(g.controls[0].wire, g.targets[0]))?;
                }
            }
            _ => branch.state.apply(g)?,
        }
    }
    report.branches.push(branch);
    Ok(())
}

/// Outcomes, probability and post-measurement state of one branch.
pub type DenseBranch = (BTreeMap<String, bool>, f64, StateVector);

/// Dense front end of [`enumerate_branches`] following every outcome.
pub fn enumerate_measurement_branches(
    circuit: &Circuit,
    input: &StateVector,
) -> Result<Vec<DenseBranch>, SimError> {
    if input.wires() != circuit.num_wires() {
        return Err(SimError::LayoutMismatch(format!(
            "state has {} wires, circuit {}",
            input.wires(),
            circuit.num_wires()
        )));
    }
    let report = enumerate_branches(circuit, input.to_sparse(), BranchPolicy::All)?;
    report
        .branches
        .into_iter()
        .map(|b| Ok((b.outcomes, b.probability, b.state.to_dense()?)))
        .collect()
}

// ---------------------------------------------------------------- QRAM oracle

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum VerdictLevel {
    Exact,
    GlobalPhasePerMemory,
    Inequivalent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub memory: String,
    pub address: usize,
    pub target: u8,
    pub outcomes: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceVerdict {
    pub level: VerdictLevel,
    pub max_deviation: f64,
    /// `(address << 1) | target` of the first failing input.
    pub witnessing_input: Option<usize>,
    pub witness: Option<Witness>,
    pub memories_checked: usize,
    pub branches_checked: usize,
    pub branches_dropped: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions {
    /// Memories to sweep; `None` picks [`default_memories`].
    pub memories: Option<Vec<Vec<bool>>>,
    pub branches: BranchPolicy,
}

pub const MEMORY_SEED: u64 = 0x5EED_0A11;

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            memories: None,
            branches: BranchPolicy::Sampled { max_measurements: 8, paths: 8, seed: MEMORY_SEED },
        }
    }
}

/// Every memory for q <= 2, 64 seeded samples for q = 3, a handful beyond.
pub fn default_memories(q: u32) -> Vec<Vec<bool>> {
    let cells = 1usize << q;
    if q <= 2 {
        return (0..1u64 << cells)
            .map(|w| (0..cells).map(|j| (w >> j) & 1 == 1).collect())
            .collect();
    }
    let samples = if q == 3 { 64 } else { 4 };
    let mut rng = ChaCha8Rng::seed_from_u64(MEMORY_SEED ^ u64::from(q));
    let mut out = vec![vec![true; cells]];
    while out.len() < samples {
        out.push((0..cells).map(|_| rng.gen::<bool>()).collect());
    }
    out
}

pub fn verify_qram(circuit: &Circuit, inst: &QramInstance) -> Result<EquivalenceVerdict, SimError> {
    verify_qram_with(circuit, inst, &VerifyOptions::default())
}

/// Runs every address and target basis input for every memory and compares
/// against the QRAM read map. Measured wires are released; every other
/// non-address, non-target wire must come back to its initial value.
pub fn verify_qram_with(
    circuit: &Circuit,
    inst: &QramInstance,
    opts: &VerifyOptions,
) -> Result<EquivalenceVerdict, SimError> {
    let layout = QramLayout::from_circuit(circuit, inst.q)?;
    let w = circuit.num_wires();
    if w > SPARSE_MAX_WIRES {
        return Err(SimError::TooManyWires { wires: w, limit: SPARSE_MAX_WIRES });
    }
    let measured: u128 = circuit
        .gates()
        .iter()
        .filter(|g| g.kind == GateKind::MeasureX)
        .fold(0, |m, g| m | (1u128 << g.targets[0].0));
    let memories = opts.memories.clone().unwrap_or_else(|| default_memories(inst.q));

    let mut verdict = EquivalenceVerdict {
        level: VerdictLevel::Exact,
        max_deviation: 0.0,
        witnessing_input: None,
        witness: None,
        memories_checked: 0,
        branches_checked: 0,
        branches_dropped: 0,
    };
    let mut exact_dev = 0.0f64;
    let mut phase_dev = 0.0f64;
    let mut fail_dev = 0.0f64;

    for memory in &memories {
        if memory.len() != inst.cells() {
            return Err(SimError::LayoutMismatch(format!(
                "memory of {} bits for q = {}",
                memory.len(),
                inst.q
            )));
        }
        let mem_inst = QramInstance { q: inst.q, n: inst.n, memory: memory.clone() };
        let mem_key = layout
            .memory
            .iter()
            .zip(memory)
            .filter(|(_, &b)| b)
            .fold(0u128, |k, (w, _)| k | (1u128 << w.0));
        // Reference phase per outcome string for this memory.
        let mut reference: BTreeMap<String, Complex64> = BTreeMap::new();
        verdict.memories_checked += 1;

        for addr in 0..inst.cells() {
            for t in 0..2u8 {
                let addr_key = (0..inst.q as usize)
                    .filter(|&i| (addr >> i) & 1 == 1)
                    .fold(0u128, |k, i| k | (1u128 << layout.address[i].0));
                let tbit = 1u128 << layout.target.0;
                let input = mem_key | addr_key | if t == 1 { tbit } else { 0 };
                let out_t = (t == 1) ^ mem_inst.lookup(addr);
                let expected = (mem_key | addr_key | if out_t { tbit } else { 0 }) & !measured;

                let report = enumerate_branches(circuit, SparseState::basis(w, input), opts.branches)?;
                verdict.branches_dropped += report.dropped;
                for b in &report.branches {
                    verdict.branches_checked += 1;
                    let mut c = Complex64::new(0.0, 0.0);
                    let mut stray = 0.0;
                    for &(k, a) in b.state.terms() {
                        if k & !measured == expected {
                            c += a;
                        } else {
                            stray += a.norm_sqr();
                        }
                    }
                    let map_dev = stray.sqrt().max((1.0 - c.norm()).abs());
                    let outcomes = b.outcome_bits();
                    let fail = |reason: &str| Witness {
                        memory: bits_to_string(memory),
                        address: addr,
                        target: t,
                        outcomes: outcomes.clone(),
                        reason: reason.to_string(),
                    };
                    if map_dev > TOL {
                        fail_dev = fail_dev.max(map_dev.max((c - 1.0).norm()));
                        if verdict.witness.is_none() {
                            verdict.witness = Some(fail("wrong basis output or unrestored wires"));
                            verdict.witnessing_input = Some((addr << 1) | t as usize);
                        }
                        continue;
                    }
                    exact_dev = exact_dev.max((c - 1.0).norm());
                    let r = *reference.entry(outcomes.clone()).or_insert(c);
                    let d = (c - r).norm();
                    phase_dev = phase_dev.max(d);
                    if d > TOL {
                        fail_dev = fail_dev.max(d);
                        if verdict.witness.is_none() {
                            verdict.witness = Some(fail("phase depends on the address"));
                            verdict.witnessing_input = Some((addr << 1) | t as usize);
                        }
                    }
                }
            }
        }
    }

    if verdict.witness.is_some() {
        verdict.level = VerdictLevel::Inequivalent;
        verdict.max_deviation = fail_dev;
    } else if exact_dev <= TOL {
        verdict.level = VerdictLevel::Exact;
        verdict.max_deviation = exact_dev;
    } else {
        verdict.level = VerdictLevel::GlobalPhasePerMemory;
        verdict.max_deviation = phase_dev;
    }
    Ok(verdict)
}

/// Compares two circuits column by column on the wires of `a`, matching wires
/// by name. Wires only present in `b` start in |0> and must return to |0>.
/// Returns the maximum amplitude deviation over the given input columns.
pub fn compare_on_shared_wires(
    a: &Circuit,
    b: &Circuit,
    inputs: impl IntoIterator<Item = u128>,
) -> Result<f64, SimError> {
    let map: Vec<WireId> = a
        .wire_names()
        .iter()
        .map(|n| {
            b.find_wire(n)
                .ok_or_else(|| SimError::LayoutMismatch(format!("wire `{n}` missing")))
        })
        .collect::<Result<_, _>>()?;
    let translate = |key: u128| {
        map.iter()
            .enumerate()
            .filter(|(i, _)| (key >> i) & 1 == 1)
            .fold(0u128, |k, (_, w)| k | (1u128 << w.0))
    };
    let mut worst = 0.0f64;
    for key in inputs {
        let mut sa = SparseState::basis(a.num_wires(), key);
        sa.run(a)?;
        let mut sb = SparseState::basis(b.num_wires(), translate(key));
        sb.run(b)?;
        let mut expected: BTreeMap<u128, Complex64> = BTreeMap::new();
        for &(k, amp) in sa.terms() {
            *expected.entry(translate(k)).or_default() += amp;
        }
        let mut got: BTreeMap<u128, Complex64> = BTreeMap::new();
        for &(k, amp) in sb.terms() {
            *got.entry(k).or_default() += amp;
        }
        for k in expected.keys().chain(got.keys()) {
            let d = (expected.get(k).copied().unwrap_or_default()
                - got.get(k).copied().unwrap_or_default())
            .norm();
            worst = worst.max(d);
        }
    }
    Ok(worst)
}
