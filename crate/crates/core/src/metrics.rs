//! Closed-form cost models, measured counts and the comparison sweep.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::Serialize;

use crate::builders::{
    build_parallel_clifford_t, build_sequential_clifford_t, FaninMode, QramInstance,
};
use crate::circuit::Circuit;
use crate::error::MetricsError;
use crate::passes::merge_phases;
use crate::schedule::{region_depths, schedule_gates, RegionDepths};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Family {
    BbSequential,
    Qrom,
    BbParallel,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::BbSequential => "BB_SEQUENTIAL",
            Family::Qrom => "QROM",
            Family::BbParallel => "BB_PARALLEL",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bbs" | "bb_sequential" | "sequential" => Ok(Family::BbSequential),
            "rom" | "qrom" => Ok(Family::Qrom),
            "bbp" | "bb_parallel" | "parallel" => Ok(Family::BbParallel),
            other => Err(format!("unknown family `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ModelValues {
    pub width: i128,
    pub tcount: i128,
    pub depth: i128,
    /// The depth is only the leading term of an unknown expression.
    pub incomplete: bool,
}

/// Exact integer evaluation of a family's cost formulas.
pub fn model(family: Family, q: u32, n: u32) -> ModelValues {
    let (q, p2q, p2n) = (i128::from(q), 1i128 << q, 1i128 << n);
    match family {
        Family::BbSequential => ModelValues {
            width: q + p2q + 5,
            tcount: 21 * p2q - 28,
            depth: 21 * p2q + 2 * q - 26,
            incomplete: false,
        },
        Family::Qrom => ModelValues {
            width: q + 1,
            tcount: 4 * p2n - 4,
            depth: 10 * p2n,
            incomplete: true,
        },
        Family::BbParallel => ModelValues {
            width: q + p2q + 1,
            tcount: 4 * p2q + 6 * p2n,
            depth: 10 * q + 10 + 4 * q,
            incomplete: false,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WireClass {
    Address,
    Pointer,
    Memory,
    Target,
    Ancilla,
}

fn digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

pub fn classify(name: &str) -> Result<WireClass, MetricsError> {
    if name == "target" {
        return Ok(WireClass::Target);
    }
    if name.strip_prefix("anc_").is_some_and(digits) {
        return Ok(WireClass::Ancilla);
    }
    if name.strip_prefix("b_").is_some_and(digits) {
        return Ok(WireClass::Pointer);
    }
    if name.strip_prefix('a').is_some_and(digits) {
        return Ok(WireClass::Address);
    }
    if name.strip_prefix('m').is_some_and(digits) {
        return Ok(WireClass::Memory);
    }
    Err(MetricsError::UnknownWireClass(name.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Measured {
    /// Wires excluding memory cells.
    pub width: usize,
    /// T and T_DAG after phase merging.
    pub tcount: usize,
    pub depth: usize,
    pub region_depths: Option<RegionDepths>,
}

pub fn measure(c: &Circuit) -> Result<Measured, MetricsError> {
    let mut width = 0;
    for name in c.wire_names() {
        if classify(name)? != WireClass::Memory {
            width += 1;
        }
    }
    let merged = merge_phases(c).expect("merging keeps a valid circuit");
    Ok(Measured {
        width,
        tcount: merged.t_count(),
        depth: schedule_gates(c.gates()).1,
        region_depths: region_depths(c).ok(),
    })
}

/// T-count of one tagged region after phase merging.
pub fn region_t_count(c: &Circuit, region: crate::circuit::Region) -> Option<usize> {
    let merged = merge_phases(c).ok()?;
    merged.region_circuit(region).map(|r| r.t_count())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Deltas {
    pub width: i128,
    pub tcount: i128,
    pub depth: i128,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResourceReport {
    pub family: Family,
    pub q: u32,
    pub n: u32,
    pub measured: Option<Measured>,
    pub model: ModelValues,
    pub deltas: Option<Deltas>,
}

impl ResourceReport {
    pub fn new(family: Family, q: u32, n: u32, measured: Option<Measured>) -> Self {
        let model = model(family, q, n);
        let deltas = measured.map(|m| Deltas {
            width: m.width as i128 - model.width,
            tcount: m.tcount as i128 - model.tcount,
            depth: m.depth as i128 - model.depth,
        });
        ResourceReport { family, q, n, measured, model, deltas }
    }
}

/// Builds the family's circuit (all-ones memory) when it has a builder.
pub fn build_family(family: Family, q: u32, n: u32, fanin: FaninMode) -> Option<Circuit> {
    let inst = QramInstance::from_spec(q, n, "ones").ok()?;
    match family {
        Family::BbSequential => Some(build_sequential_clifford_t(&inst)),
        Family::BbParallel => Some(build_parallel_clifford_t(&inst, fanin)),
        Family::Qrom => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NPolicy {
    NEqualsQ,
    Fixed(u32),
}

impl NPolicy {
    pub fn n_for(self, q: u32) -> u32 {
        match self {
            NPolicy::NEqualsQ => q,
            NPolicy::Fixed(n) => n.min(q),
        }
    }
}

impl FromStr for NPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "n_equals_q" {
            return Ok(NPolicy::NEqualsQ);
        }
        s.strip_prefix("fixed:")
            .or_else(|| s.strip_prefix("fixed"))
            .and_then(|v| v.trim_matches(|c| c == '(' || c == ')').parse().ok())
            .filter(|&n: &u32| n >= 1)
            .map(NPolicy::Fixed)
            .ok_or_else(|| format!("unknown n policy `{s}` (use n_equals_q or fixed:N)"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepConfig {
    pub families: Vec<Family>,
    pub q_range: std::ops::RangeInclusive<u32>,
    pub n_policy: NPolicy,
    /// Circuits are only built (and measured) up to this q.
    pub measure_cap: u32,
    pub fanin: FaninMode,
}

/// One row per (family, q), ordered by family then q.
pub fn sweep(cfg: &SweepConfig) -> Vec<ResourceReport> {
    let mut families = cfg.families.clone();
    families.sort();
    families.dedup();
    let mut rows = Vec::new();
    for fam in families {
        for q in cfg.q_range.clone() {
            let n = cfg.n_policy.n_for(q);
            let measured = if q <= cfg.measure_cap {
                build_family(fam, q, n, cfg.fanin).map(|c| measure(&c).expect("builder wire names"))
            } else {
                None
            };
            rows.push(ResourceReport::new(fam, q, n, measured));
        }
    }
    rows
}

pub const CSV_HEADER: [&str; 13] = [
    "family",
    "q",
    "n",
    "width_model",
    "width_measured",
    "tcount_model",
    "tcount_measured",
    "depth_model",
    "depth_measured",
    "fanout_depth",
    "query_depth",
    "fanin_depth",
    "flags",
];

pub fn write_csv<W: Write>(rows: &[ResourceReport], out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(CSV_HEADER)?;
    let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
    for r in rows {
        let m = r.measured;
        let rd = m.and_then(|m| m.region_depths);
        let mut flags = Vec::new();
        if r.model.incomplete {
            flags.push("incomplete-model");
        }
        if m.is_none() && r.family != Family::Qrom {
            flags.push("not-built");
        }
        w.write_record([
            r.family.name().to_string(),
            r.q.to_string(),
            r.n.to_string(),
            r.model.width.to_string(),
            opt(m.map(|m| m.width)),
            r.model.tcount.to_string(),
            opt(m.map(|m| m.tcount)),
            r.model.depth.to_string(),
            opt(m.map(|m| m.depth)),
            opt(rd.map(|d| d.fanout)),
            opt(rd.map(|d| d.query)),
            opt(rd.map(|d| d.fanin)),
            flags.join(";"),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_examples() {
        assert_eq!(model(Family::BbSequential, 15, 15).depth, 688_132);
        assert_eq!(model(Family::BbParallel, 15, 15).depth, 220);
        assert_eq!(model(Family::Qrom, 3, 3).tcount, 28);
        assert_eq!(model(Family::BbSequential, 2, 2).tcount, 56);
        assert_eq!(model(Family::BbParallel, 2, 2).width, 7);
        assert!(model(Family::Qrom, 4, 4).incomplete);
    }

    #[test]
    fn classification() {
        assert_eq!(classify("a1"), Ok(WireClass::Address));
        assert_eq!(classify("b_01"), Ok(WireClass::Pointer));
        assert_eq!(classify("m10"), Ok(WireClass::Memory));
        assert_eq!(classify("target"), Ok(WireClass::Target));
        assert_eq!(classify("anc_3"), Ok(WireClass::Ancilla));
        assert_eq!(classify("q0"), Err(MetricsError::UnknownWireClass("q0".into())));
        assert!(classify("anc_").is_err());
    }

    #[test]
    fn measured_parallel_q2() {
        let c = build_family(Family::BbParallel, 2, 2, FaninMode::Measurement).unwrap();
        let m = measure(&c).unwrap();
        assert_eq!(m.width, 7);
        assert_eq!(m.tcount, 32);
        let r = ResourceReport::new(Family::BbParallel, 2, 2, Some(m));
        assert_eq!(r.deltas.unwrap().tcount, -8);
    }

    #[test]
    fn policies_parse() {
        assert_eq!("n_equals_q".parse(), Ok(NPolicy::NEqualsQ));
        assert_eq!("fixed:3".parse(), Ok(NPolicy::Fixed(3)));
        assert_eq!("fixed(2)".parse(), Ok(NPolicy::Fixed(2)));
        assert!("fixed:0".parse::<NPolicy>().is_err());
        assert_eq!("bbs".parse(), Ok(Family::BbSequential));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let cfg = SweepConfig {
            families: vec![Family::Qrom, Family::BbParallel],
            q_range: 2..=3,
            n_policy: NPolicy::NEqualsQ,
            measure_cap: 2,
            fanin: FaninMode::Measurement,
        };
        let rows = sweep(&cfg);
        let mut buf = Vec::new();
        write_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("QROM,2,2,3,,12,,40,"));
        assert!(lines[1].ends_with("incomplete-model"));
        assert!(lines[3].starts_with("BB_PARALLEL,2,2,7,7,40,32,38,27,11,10,7,"));
        assert!(!text.contains('\r'));
    }
}
