//! Bucket brigade QRAM circuits: Toffoli level, sequential Clifford+T and
//! the parallel Clifford+T form with fan-out CNOTs.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::circuit::{Circuit, Region, RegionBuilder};
use crate::decompose::{and_bundle, lower_all_toffolis, shared_target_bundle, CczVariant};
use crate::error::{DecomposeError, InstanceError, SimError};
use crate::gate::{Gate, WireId};

/// Largest address width the builders accept (2^16 pointer wires).
pub const MAX_Q: u32 = 16;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QramInstance {
    pub q: u32,
    pub n: u32,
    /// `memory[j]` is the classical bit stored in cell `m_j`.
    #[serde(serialize_with = "ser_bits", deserialize_with = "de_bits")]
    pub memory: Vec<bool>,
}

fn ser_bits<S: Serializer>(bits: &[bool], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&bits_to_string(bits))
}

fn de_bits<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<bool>, D::Error> {
    let s = String::deserialize(d)?;
    parse_bits(&s).ok_or_else(|| serde::de::Error::custom("memory must be a string of 0/1"))
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn parse_bits(s: &str) -> Option<Vec<bool>> {
    s.chars()
        .map(|c| match c {
            '0' => Some(false),
            '1' => Some(true),
            _ => None,
        })
        .collect()
}

impl QramInstance {
    pub fn new(q: u32, n: u32, memory: Vec<bool>) -> Result<Self, InstanceError> {
        if q == 0 || q > MAX_Q {
            return Err(InstanceError::AddressWidth { q, max: MAX_Q });
        }
        if n == 0 || n > q {
            return Err(InstanceError::QueryExponent { q, n });
        }
        let expected = 1usize << q;
        if memory.len() != expected {
            return Err(InstanceError::MemoryLength { expected, got: memory.len() });
        }
        Ok(QramInstance { q, n, memory })
    }

    /// Memory given as an integer whose bit `j` is `m_j`.
    pub fn from_word(q: u32, n: u32, word: u64) -> Result<Self, InstanceError> {
        let cells = if q < 64 { 1usize << q } else { 0 };
        Self::new(q, n, (0..cells).map(|j| j < 64 && (word >> j) & 1 == 1).collect())
    }

    pub fn random(q: u32, n: u32, seed: u64) -> Result<Self, InstanceError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cells = if q <= MAX_Q { 1usize << q } else { 0 };
        Self::new(q, n, (0..cells).map(|_| rng.gen::<bool>()).collect())
    }

    /// `BITS` (character `j` is `m_j`), `ones`, `zeros` or `random:SEED`.
    pub fn from_spec(q: u32, n: u32, spec: &str) -> Result<Self, InstanceError> {
        let cells = if q <= MAX_Q { 1usize << q } else { 0 };
        match spec {
            "ones" => Self::new(q, n, vec![true; cells]),
            "zeros" => Self::new(q, n, vec![false; cells]),
            s => {
                if let Some(seed) = s.strip_prefix("random:") {
                    let seed = seed
                        .parse::<u64>()
                        .map_err(|_| InstanceError::MemorySpec(s.to_string()))?;
                    Self::random(q, n, seed)
                } else {
                    let bits = parse_bits(s).ok_or_else(|| InstanceError::MemorySpec(s.to_string()))?;
                    Self::new(q, n, bits)
                }
            }
        }
    }

    pub fn cells(&self) -> usize {
        1 << self.q
    }

    pub fn queried(&self) -> usize {
        1 << self.n
    }

    /// Bit that a query of `address` XORs onto the target.
    pub fn lookup(&self, address: usize) -> bool {
        address < self.queried() && self.memory[address]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FaninMode {
    Measurement,
    Unitary,
}

impl FromStr for FaninMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "measurement" => Ok(FaninMode::Measurement),
            "unitary" => Ok(FaninMode::Unitary),
            _ => Err(format!("unknown fanin mode `{s}`")),
        }
    }
}

impl fmt::Display for FaninMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FaninMode::Measurement => "measurement",
            FaninMode::Unitary => "unitary",
        })
    }
}

fn bits_label(j: usize, q: u32) -> String {
    (0..q).rev().map(|i| if (j >> i) & 1 == 1 { '1' } else { '0' }).collect()
}

pub fn address_name(i: u32) -> String {
    format!("a{i}")
}

pub fn pointer_name(j: usize, q: u32) -> String {
    format!("b_{}", bits_label(j, q))
}

pub fn memory_name(j: usize, q: u32) -> String {
    format!("m{}", bits_label(j, q))
}

pub const TARGET: &str = "target";

/// Wire handles of a QRAM circuit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QramLayout {
    pub q: u32,
    /// `address[i]` is `a_i` (bit of weight 2^i).
    pub address: Vec<WireId>,
    pub pointers: Vec<WireId>,
    pub memory: Vec<WireId>,
    pub target: WireId,
}

impl QramLayout {
    /// Wire order: a_{q-1}..a_0, b_0..b_{2^q-1}, m_{2^q-1}..m_0, target.
    pub fn wire_names(q: u32) -> Vec<String> {
        let cells = 1usize << q;
        let mut names: Vec<String> = (0..q).rev().map(address_name).collect();
        names.extend((0..cells).map(|j| pointer_name(j, q)));
        names.extend((0..cells).rev().map(|j| memory_name(j, q)));
        names.push(TARGET.to_string());
        names
    }

    pub fn empty_circuit(q: u32) -> (Circuit, QramLayout) {
        let c = Circuit::with_wires(Self::wire_names(q)).expect("generated names are valid");
        let layout = Self::from_circuit(&c, q).expect("layout of freshly built circuit");
        (c, layout)
    }

    pub fn from_circuit(c: &Circuit, q: u32) -> Result<QramLayout, SimError> {
        if q == 0 || q > MAX_Q {
            return Err(SimError::LayoutMismatch(format!("unsupported address width {q}")));
        }
        let get = |name: String| {
            c.find_wire(&name)
                .ok_or_else(|| SimError::LayoutMismatch(format!("missing wire `{name}`")))
        };
        let cells = 1usize << q;
        Ok(QramLayout {
            q,
            address: (0..q).map(|i| get(address_name(i))).collect::<Result<_, _>>()?,
            pointers: (0..cells).map(|j| get(pointer_name(j, q))).collect::<Result<_, _>>()?,
            memory: (0..cells).map(|j| get(memory_name(j, q))).collect::<Result<_, _>>()?,
            target: get(TARGET.to_string())?,
        })
    }

    /// Infers `q` from the address wires present.
    pub fn detect(c: &Circuit) -> Result<QramLayout, SimError> {
        let q = (0..=MAX_Q).take_while(|&i| c.find_wire(&address_name(i)).is_some()).count() as u32;
        Self::from_circuit(c, q)
    }

    pub fn cells(&self) -> usize {
        self.pointers.len()
    }
}

/// Level 1 of the pointer tree: b_0 = NOT a_0, b_1 = a_0.
fn first_level(l: &QramLayout) -> Vec<Gate> {
    vec![
        Gate::x(l.pointers[0]),
        Gate::cx(l.address[0], l.pointers[1]),
        Gate::cx(l.pointers[1], l.pointers[0]),
    ]
}

/// Pointer pairs `(b_j, b_{j+h})` split by level k >= 2, with the level's address bit.
fn level_pairs(l: &QramLayout, k: u32) -> (WireId, Vec<WireId>, Vec<WireId>) {
    let h = 1usize << (k - 1);
    let low = l.pointers[..h].to_vec();
    let high = l.pointers[h..2 * h].to_vec();
    (l.address[(k - 1) as usize], low, high)
}

fn split_cx<'a>(high: &'a [WireId], low: &'a [WireId]) -> impl Iterator<Item = Gate> + 'a {
    high.iter().zip(low).map(|(&hi, &lo)| Gate::cx(hi, lo))
}

fn toffoli_fanout(l: &QramLayout) -> Vec<Gate> {
    let mut g = first_level(l);
    for k in 2..=l.q {
        let (a, low, high) = level_pairs(l, k);
        g.extend(low.iter().zip(&high).map(|(&lo, &hi)| Gate::ccx(a, lo, hi)));
        g.extend(split_cx(&high, &low));
    }
    g
}

fn inverse_gates(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().rev().map(|g| g.dagger().expect("unitary fan-out")).collect()
}

pub fn build_toffoli_bucket_brigade(inst: &QramInstance) -> Circuit {
    let (c, l) = QramLayout::empty_circuit(inst.q);
    let fanout = toffoli_fanout(&l);
    let mut b = RegionBuilder::new(c);
    b.begin(Region::Fanout);
    b.extend(fanout.clone()).expect("fanout gates");
    b.begin(Region::Query);
    b.extend((0..inst.queried()).map(|j| Gate::ccx(l.pointers[j], l.memory[j], l.target)))
        .expect("query gates");
    b.begin(Region::Fanin);
    b.extend(inverse_gates(&fanout)).expect("fanin gates");
    b.finish().expect("regions")
}

/// Every Toffoli replaced by the canonical seven-T decomposition.
pub fn build_sequential_clifford_t(inst: &QramInstance) -> Circuit {
    lower_circuit(&build_toffoli_bucket_brigade(inst), CczVariant::Canonical7T)
        .expect("canonical lowering of builder output")
}

/// Applies one Toffoli lowering to every CCX, region by region.
pub fn lower_circuit(c: &Circuit, variant: CczVariant) -> Result<Circuit, DecomposeError> {
    c.map_regions(|_, gates| lower_all_toffolis(gates, variant))
}

pub fn build_parallel_clifford_t(inst: &QramInstance, mode: FaninMode) -> Circuit {
    let (c, l) = QramLayout::empty_circuit(inst.q);
    let mut fanout = first_level(&l);
    for k in 2..=l.q {
        let (a, low, high) = level_pairs(&l, k);
        fanout.extend(and_bundle(a, &low, &high));
        fanout.extend(split_cx(&high, &low));
    }
    let pairs: Vec<(WireId, WireId)> =
        (0..inst.queried()).map(|j| (l.pointers[j], l.memory[j])).collect();
    let query = shared_target_bundle(&pairs, l.target);

    let fanin = match mode {
        FaninMode::Unitary => inverse_gates(&fanout),
        FaninMode::Measurement => {
            let mut g = Vec::new();
            for k in (2..=l.q).rev() {
                let (a, low, high) = level_pairs(&l, k);
                g.extend(split_cx(&high, &low));
                for (&lo, &hi) in low.iter().zip(&high) {
                    let record = format!("r_{}", c.wire_name(hi));
                    g.push(Gate::s(hi));
                    g.push(Gate::measure_x(hi, record.clone()));
                    g.push(Gate::classical_cz(a, lo, record));
                }
            }
            g.extend(inverse_gates(&first_level(&l)));
            g
        }
    };

    let mut b = RegionBuilder::new(c);
    b.begin(Region::Fanout);
    b.extend(fanout).expect("fanout gates");
    b.begin(Region::Query);
    b.extend(query).expect("query gates");
    b.begin(Region::Fanin);
    b.extend(fanin).expect("fanin gates");
    b.finish().expect("regions")
}

/// The QRAM read as a permutation of `(address, target)` basis states,
/// indexed `address * 2 + target`.
pub fn reference_qram_map(inst: &QramInstance) -> Vec<usize> {
    (0..inst.cells() * 2)
        .map(|idx| {
            let (a, t) = (idx >> 1, idx & 1);
            (a << 1) | (t ^ usize::from(inst.lookup(a)))
        })
        .collect()
}
